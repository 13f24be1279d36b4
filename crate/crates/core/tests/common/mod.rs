//! Independent oracles and random generators shared by the integration
//! tests. Nothing here calls the library code it is used to check.

#![allow(dead_code)]

use codd_core::bits::BitString;
use codd_core::codd::{CoddExpr, ExprJson, Node};
use codd_core::dtree::{DecisionTree, Label};
use codd_core::rational::{ratio, Rational};
use codd_core::synsem::{NodeKey, OrderedTree};
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bit `i` of input `x`, bit 0 being the most significant of `n`.
pub fn bit(n: u32, x: u32, i: u32) -> bool {
    x >> (n - 1 - i) & 1 == 1
}

/// Leaf reached by `x` and the number of queries on the way.
pub fn walk(t: &DecisionTree, n: u32, x: u32) -> (Label, u32, *const DecisionTree) {
    let mut t = t;
    let mut depth = 0;
    while let DecisionTree::Node { bit: b, zero, one } = t {
        // out-of-range bits read as 0
        t = if *b < n && bit(n, x, *b) { one } else { zero };
        depth += 1;
    }
    let DecisionTree::Leaf(l) = t else { unreachable!() };
    (*l, depth, t as *const _)
}

pub fn avg_depth(t: &DecisionTree, n: u32, weights: &[u64]) -> Rational {
    let total: u64 = weights.iter().sum();
    let acc: u64 = (0..1u32 << n).map(|x| weights[x as usize] * walk(t, n, x).1 as u64).sum();
    ratio(acc as i64, total as i64)
}

/// Every tree on `n` bits of depth at most `max_depth` that never queries a
/// bit twice on a path. Leaves are labeled 0.
pub fn legal_trees(n: u32, max_depth: u32) -> Vec<DecisionTree> {
    fn go(free: &[u32], depth: u32) -> Vec<DecisionTree> {
        let mut out = vec![DecisionTree::Leaf(0)];
        if depth == 0 {
            return out;
        }
        for (i, &b) in free.iter().enumerate() {
            let rest: Vec<u32> = free.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &c)| c).collect();
            let subs = go(&rest, depth - 1);
            for z in &subs {
                for o in &subs {
                    out.push(DecisionTree::node(b, z.clone(), o.clone()));
                }
            }
        }
        out
    }
    go(&(0..n).collect::<Vec<_>>(), max_depth)
}

/// Relabels the leaves of `shape` so it computes `outputs`, if every leaf's
/// inputs agree on the output.
pub fn realize(shape: &DecisionTree, n: u32, outputs: &[Label]) -> Option<DecisionTree> {
    fn go(t: &DecisionTree, n: u32, outputs: &[Label], inputs: Vec<u32>) -> Option<DecisionTree> {
        match t {
            DecisionTree::Leaf(_) => {
                let l = outputs[*inputs.first()? as usize];
                inputs.iter().all(|&x| outputs[x as usize] == l).then_some(DecisionTree::Leaf(l))
            }
            DecisionTree::Node { bit: b, zero, one } => {
                let (ones, zeros): (Vec<u32>, Vec<u32>) = inputs.into_iter().partition(|&x| bit(n, x, *b));
                Some(DecisionTree::node(*b, go(zero, n, outputs, zeros)?, go(one, n, outputs, ones)?))
            }
        }
    }
    go(shape, n, outputs, (0..1u32 << n).collect())
}

/// Minimal average depth over all legal trees computing `outputs`.
pub fn brute_force_min_depth(n: u32, outputs: &[Label], weights: &[u64]) -> Rational {
    legal_trees(n, n)
        .iter()
        .filter_map(|s| realize(s, n, outputs))
        .map(|t| avg_depth(&t, n, weights))
        .min()
        .expect("the full-depth tree realizes anything")
}

/// Random legal tree: each node splits with probability `p_split` while
/// depth and free bits allow. Leaves get distinct labels.
pub fn random_legal_tree(rng: &mut impl Rng, n: u32, p_split: f64) -> DecisionTree {
    fn go(rng: &mut impl Rng, free: &mut Vec<u32>, p: f64, next: &mut Label) -> DecisionTree {
        if free.is_empty() || !rng.random_bool(p) {
            *next += 1;
            return DecisionTree::Leaf(*next - 1);
        }
        let i = rng.random_range(0..free.len());
        let b = free.swap_remove(i);
        let z = go(rng, free, p, next);
        let o = go(rng, free, p, next);
        free.push(b);
        let last = free.len() - 1;
        free.swap(i, last);
        DecisionTree::node(b, z, o)
    }
    let mut free: Vec<u32> = (0..n).collect();
    go(rng, &mut free, p_split, &mut 0)
}

/// Weights in `0..=max` with at least one positive.
pub fn random_weights(rng: &mut impl Rng, n: u32, max: u64) -> Vec<u64> {
    loop {
        let w: Vec<u64> = (0..1u32 << n).map(|_| rng.random_range(0..=max)).collect();
        if w.iter().any(|&v| v > 0) {
            return w;
        }
    }
}

pub fn random_bits(rng: &mut impl Rng, max_len: usize) -> BitString {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| rng.random_bool(0.5)).collect()
}

/// Random node table of `count` nodes; references point backwards.
pub fn random_expr(rng: &mut impl Rng, count: usize) -> CoddExpr {
    let mut nodes = Vec::with_capacity(count);
    for i in 0..count {
        let pick = if i == 0 { rng.random_range(0..6) } else { rng.random_range(0..8) };
        let node = match pick {
            0 => Node::Leaf(random_bits(rng, 12)),
            1 => Node::K,
            2 => Node::S,
            3 => Node::Sp,
            4 => Node::Encode,
            5 => Node::Decode,
            6 => {
                let bit = rng.random_range(0..20);
                Node::Decide { bit, zero: rng.random_range(0..i as u32), one: rng.random_range(0..i as u32) }
            }
            _ => Node::Apply { func: rng.random_range(0..i as u32), arg: rng.random_range(0..i as u32) },
        };
        nodes.push(node);
    }
    CoddExpr::from_json(&ExprJson { nodes }).expect("backward references")
}

/// First-order decision dag over `n`-bit inputs with leaves of `width` bits.
pub fn random_decision_dag(rng: &mut impl Rng, n: u32, width: usize, p_split: f64) -> CoddExpr {
    let t = random_legal_tree(rng, n, p_split);
    fn relabel(rng: &mut impl Rng, t: &DecisionTree, width: usize) -> CoddExpr {
        match t {
            DecisionTree::Leaf(_) => CoddExpr::leaf((0..width).map(|_| rng.random_bool(0.5)).collect()),
            DecisionTree::Node { bit, zero, one } => {
                let z = relabel(rng, zero, width);
                let o = relabel(rng, one, width);
                CoddExpr::decide(*bit as u16, &z, &o)
            }
        }
    }
    relabel(rng, &t, width)
}

/// Preorder nodes with parent links, for mapping enumeration.
struct Flat {
    key: Vec<NodeKey>,
    gain: Vec<Rational>,
    depth: Vec<u32>,
    parent: Vec<Option<usize>>,
}

fn flatten(t: &OrderedTree) -> Flat {
    fn go(t: &OrderedTree, depth: u32, parent: Option<usize>, f: &mut Flat) {
        let id = f.key.len();
        f.key.push(t.key);
        f.gain.push(t.gain.clone());
        f.depth.push(depth);
        f.parent.push(parent);
        for c in &t.children {
            go(c, depth + 1, Some(id), f);
        }
    }
    let mut f = Flat { key: vec![], gain: vec![], depth: vec![], parent: vec![] };
    go(t, 0, None, &mut f);
    f
}

impl Flat {
    fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        while let Some(p) = self.parent[b] {
            if p == a {
                return true;
            }
            b = p;
        }
        false
    }

    /// `a` precedes `b` in preorder without being its ancestor.
    fn left_of(&self, a: usize, b: usize) -> bool {
        a < b && !self.is_ancestor(a, b)
    }
}

/// Cost model restated: entropy weight `1 + gain`, depth weight
/// `decay^depth`; relabel is free iff key and gain agree, else the base
/// times the larger gain weight or the shallower depth weight.
#[derive(Clone)]
pub struct OracleCosts {
    pub entropy: bool,
    pub decay: Rational,
}

impl OracleCosts {
    fn weight(&self, gain: &Rational, depth: u32) -> Rational {
        if self.entropy {
            Rational::one() + gain
        } else {
            let mut w = Rational::one();
            for _ in 0..depth {
                w *= &self.decay;
            }
            w
        }
    }
}

/// Minimal cost over all ordered (Tai) mappings between `a` and `b`, by
/// enumerating every partial injection.
pub fn brute_force_edit_distance(a: &OrderedTree, b: &OrderedTree, c: &OracleCosts) -> Rational {
    let fa = flatten(a);
    let fb = flatten(b);
    let (na, nb) = (fa.key.len(), fb.key.len());
    let del: Rational = (0..na).map(|i| c.weight(&fa.gain[i], fa.depth[i])).sum();
    let ins: Rational = (0..nb).map(|j| c.weight(&fb.gain[j], fb.depth[j])).sum();
    let mut best: Option<Rational> = None;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut used_b = vec![false; nb];

    fn consistent(fa: &Flat, fb: &Flat, pairs: &[(usize, usize)], u: usize, v: usize) -> bool {
        pairs.iter().all(|&(x, y)| {
            fa.is_ancestor(x, u) == fb.is_ancestor(y, v)
                && fa.is_ancestor(u, x) == fb.is_ancestor(v, y)
                && fa.left_of(x, u) == fb.left_of(y, v)
                && fa.left_of(u, x) == fb.left_of(v, y)
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        i: usize,
        fa: &Flat,
        fb: &Flat,
        c: &OracleCosts,
        pairs: &mut Vec<(usize, usize)>,
        used_b: &mut [bool],
        del: &Rational,
        ins: &Rational,
        best: &mut Option<Rational>,
    ) {
        if i == fa.key.len() {
            let mut cost = del + ins;
            for &(u, v) in pairs.iter() {
                cost -= c.weight(&fa.gain[u], fa.depth[u]);
                cost -= c.weight(&fb.gain[v], fb.depth[v]);
                let (wu, wv) = (c.weight(&fa.gain[u], fa.depth[u]), c.weight(&fb.gain[v], fb.depth[v]));
                cost += if fa.key[u] == fb.key[v] && fa.gain[u] == fb.gain[v] { (wu - wv).abs() } else { wu.max(wv) };
            }
            if best.as_ref().is_none_or(|b| cost < *b) {
                *best = Some(cost);
            }
            return;
        }
        search(i + 1, fa, fb, c, pairs, used_b, del, ins, best);
        for v in 0..fb.key.len() {
            if !used_b[v] && consistent(fa, fb, pairs, i, v) {
                used_b[v] = true;
                pairs.push((i, v));
                search(i + 1, fa, fb, c, pairs, used_b, del, ins, best);
                pairs.pop();
                used_b[v] = false;
            }
        }
    }

    search(0, &fa, &fb, c, &mut pairs, &mut used_b, &del, &ins, &mut best);
    best.expect("the empty mapping is always valid")
}

/// All ordered trees with at most `max_nodes` nodes whose node labels are
/// drawn from `labels`.
pub fn all_ordered_trees(max_nodes: usize, labels: &[(NodeKey, Rational)]) -> Vec<OrderedTree> {
    // forests[k]: all ordered forests with exactly k nodes
    let mut forests: Vec<Vec<Vec<OrderedTree>>> = vec![vec![vec![]]];
    let mut trees: Vec<Vec<OrderedTree>> = vec![vec![]];
    for k in 1..=max_nodes {
        let mut tk = Vec::new();
        for kids in &forests[k - 1] {
            for (key, gain) in labels {
                tk.push(OrderedTree::new(*key, gain.clone(), kids.clone()));
            }
        }
        trees.push(tk);
        // a forest of k nodes: a first tree of j nodes, then a forest of k - j
        let mut fk = Vec::new();
        for j in 1..=k {
            for first in &trees[j] {
                for rest in &forests[k - j] {
                    let mut f = vec![first.clone()];
                    f.extend(rest.iter().cloned());
                    fk.push(f);
                }
            }
        }
        forests.push(fk);
    }
    trees.into_iter().flatten().collect()
}
