//! Weighted ordered-tree edit distance (Zhang–Shasha).

use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dtree::Label;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// What a node tests or returns; relabeling changes this or the gain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKey {
    Split(u32),
    Leaf(Label),
}

/// Ordered tree with an entropy weight on every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedTree {
    pub key: NodeKey,
    pub gain: Rational,
    pub children: Vec<OrderedTree>,
}

impl OrderedTree {
    pub fn new(key: NodeKey, gain: Rational, children: Vec<OrderedTree>) -> Self {
        OrderedTree { key, gain, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(OrderedTree::size).sum::<usize>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Node weight `1 + gain`.
    Entropy,
    /// Node weight `decay^depth`, root at depth 0.
    Depth,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Entropy => "entropy",
            SchemeKind::Depth => "depth",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(SchemeKind::Entropy),
            "depth" => Ok(SchemeKind::Depth),
            other => Err(Error::invalid("scheme", format!("{other:?} (expected entropy or depth)"))),
        }
    }
}

/// Per-operation base costs scaled by a node weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EditCostScheme {
    pub kind: SchemeKind,
    #[serde(with = "rational::serde_str")]
    pub relabel: Rational,
    #[serde(with = "rational::serde_str")]
    pub insert: Rational,
    #[serde(with = "rational::serde_str")]
    pub delete: Rational,
    #[serde(with = "rational::serde_str")]
    pub decay: Rational,
}

impl EditCostScheme {
    /// Base costs must be positive and `decay` in `(0, 1]`.
    pub fn new(
        kind: SchemeKind,
        relabel: Rational,
        insert: Rational,
        delete: Rational,
        decay: Rational,
    ) -> Result<Self> {
        for (name, c) in [("relabel", &relabel), ("insert", &insert), ("delete", &delete)] {
            if *c <= Rational::zero() {
                return Err(Error::invalid("edit cost", format!("{name} cost must be positive")));
            }
        }
        if decay <= Rational::zero() || decay > Rational::one() {
            return Err(Error::invalid("edit cost", "decay must lie in (0, 1]"));
        }
        Ok(EditCostScheme { kind, relabel, insert, delete, decay })
    }

    /// Unit base costs and decay 1/2.
    pub fn default_for(kind: SchemeKind) -> Self {
        let one = Rational::one();
        EditCostScheme { kind, relabel: one.clone(), insert: one.clone(), delete: one, decay: rational::ratio(1, 2) }
    }

    pub fn entropy() -> Self {
        Self::default_for(SchemeKind::Entropy)
    }

    pub fn depth() -> Self {
        Self::default_for(SchemeKind::Depth)
    }

    fn weight(&self, gain: &Rational, depth: u32) -> Rational {
        match self.kind {
            SchemeKind::Entropy => Rational::one() + gain,
            SchemeKind::Depth => num_traits::pow(self.decay.clone(), depth as usize),
        }
    }

    /// Cost of deleting `node`, or of inserting it on the other side.
    pub fn delete_cost(&self, node: &NodeInfo) -> Rational {
        &self.delete * self.weight(&node.gain, node.depth)
    }

    pub fn insert_cost(&self, node: &NodeInfo) -> Rational {
        &self.insert * self.weight(&node.gain, node.depth)
    }

    /// The base times the weight difference when key and gain agree (zero
    /// under the entropy scheme), else times the heavier weight. Together
    /// with insert and delete this is a metric on labels whenever the three
    /// bases are equal, so distances obey the triangle inequality.
    pub fn relabel_cost(&self, a: &NodeInfo, b: &NodeInfo) -> Rational {
        let (wa, wb) = (self.weight(&a.gain, a.depth), self.weight(&b.gain, b.depth));
        let w = if a.key == b.key && a.gain == b.gain {
            if wa > wb {
                wa - wb
            } else {
                wb - wa
            }
        } else {
            std::cmp::max(wa, wb)
        };
        &self.relabel * w
    }
}

/// A node as the cost functions see it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub key: NodeKey,
    pub gain: Rational,
    pub depth: u32,
}

/// Postorder flattening with leftmost-leaf indices.
pub struct Postorder {
    pub nodes: Vec<NodeInfo>,
    /// `leftmost[i]`: postorder index of the leftmost leaf below node `i`.
    pub leftmost: Vec<usize>,
    /// `parent[i]`, `None` for the root.
    pub parent: Vec<Option<usize>>,
}

impl Postorder {
    pub fn new(t: &OrderedTree) -> Self {
        fn go(t: &OrderedTree, depth: u32, p: &mut Postorder) -> usize {
            let mut first = None;
            let mut kids = Vec::with_capacity(t.children.len());
            for c in &t.children {
                let id = go(c, depth + 1, p);
                first.get_or_insert(p.leftmost[id]);
                kids.push(id);
            }
            let id = p.nodes.len();
            p.nodes.push(NodeInfo { key: t.key, gain: t.gain.clone(), depth });
            p.leftmost.push(first.unwrap_or(id));
            p.parent.push(None);
            for k in kids {
                p.parent[k] = Some(id);
            }
            id
        }
        let mut p = Postorder { nodes: Vec::new(), leftmost: Vec::new(), parent: Vec::new() };
        go(t, 0, &mut p);
        p
    }

    /// The highest node for each leftmost leaf, in postorder.
    fn keyroots(&self) -> Vec<usize> {
        let mut highest = std::collections::BTreeMap::new();
        for i in 0..self.nodes.len() {
            highest.insert(self.leftmost[i], i);
        }
        let mut k: Vec<usize> = highest.into_values().collect();
        k.sort_unstable();
        k
    }
}

/// Minimal cost of an ordered edit mapping from `a` to `b`.
pub fn tree_edit_distance(a: &OrderedTree, b: &OrderedTree, c: &EditCostScheme) -> Rational {
    let pa = Postorder::new(a);
    let pb = Postorder::new(b);
    let del: Vec<Rational> = pa.nodes.iter().map(|n| c.delete_cost(n)).collect();
    let ins: Vec<Rational> = pb.nodes.iter().map(|n| c.insert_cost(n)).collect();
    let ren: Vec<Vec<Rational>> =
        pa.nodes.iter().map(|u| pb.nodes.iter().map(|v| c.relabel_cost(u, v)).collect()).collect();

    // scale every cost to an integer over one common denominator
    let all = || del.iter().chain(&ins).chain(ren.iter().flatten());
    let denom = all().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let scale = |r: &Rational| r.numer() * (&denom / r.denom());
    let bound: BigInt = all().map(scale).sum();
    let dist = if bound.bits() < 120 {
        let int = |r: &Rational| scale(r).to_i128().expect("below 2^120");
        let ren = ren.iter().map(|row| row.iter().map(int).collect()).collect::<Vec<Vec<i128>>>();
        BigInt::from(zhang_shasha(
            &pa,
            &pb,
            &del.iter().map(int).collect::<Vec<_>>(),
            &ins.iter().map(int).collect::<Vec<_>>(),
            &ren,
        ))
    } else {
        let ren = ren.iter().map(|row| row.iter().map(scale).collect()).collect::<Vec<Vec<BigInt>>>();
        zhang_shasha(
            &pa,
            &pb,
            &del.iter().map(scale).collect::<Vec<_>>(),
            &ins.iter().map(scale).collect::<Vec<_>>(),
            &ren,
        )
    };
    Rational::new(dist, denom)
}

fn zhang_shasha<C>(pa: &Postorder, pb: &Postorder, del: &[C], ins: &[C], ren: &[Vec<C>]) -> C
where
    C: Clone + Ord + Zero,
    for<'x> &'x C: Add<&'x C, Output = C>,
{
    let (na, nb) = (pa.nodes.len(), pb.nodes.len());
    // 1-based indices; row/column 0 of `fd` stands for the empty forest
    let mut td = vec![vec![C::zero(); nb + 1]; na + 1];
    let mut fd = vec![vec![C::zero(); nb + 1]; na + 1];
    let la = |i: usize| pa.leftmost[i - 1] + 1;
    let lb = |j: usize| pb.leftmost[j - 1] + 1;
    for &ka in &pa.keyroots() {
        for &kb in &pb.keyroots() {
            let (i, j) = (ka + 1, kb + 1);
            let (li, lj) = (la(i), lb(j));
            fd[li - 1][lj - 1] = C::zero();
            for di in li..=i {
                fd[di][lj - 1] = &fd[di - 1][lj - 1] + &del[di - 1];
            }
            for dj in lj..=j {
                fd[li - 1][dj] = &fd[li - 1][dj - 1] + &ins[dj - 1];
            }
            for di in li..=i {
                for dj in lj..=j {
                    let by_delete = &fd[di - 1][dj] + &del[di - 1];
                    let by_insert = &fd[di][dj - 1] + &ins[dj - 1];
                    let best = by_delete.min(by_insert);
                    if la(di) == li && lb(dj) == lj {
                        let v = best.min(&fd[di - 1][dj - 1] + &ren[di - 1][dj - 1]);
                        td[di][dj] = v.clone();
                        fd[di][dj] = v;
                    } else {
                        let by_tree = &fd[la(di) - 1][lb(dj) - 1] + &td[di][dj];
                        fd[di][dj] = best.min(by_tree);
                    }
                }
            }
        }
    }
    td[na][nb].clone()
}
