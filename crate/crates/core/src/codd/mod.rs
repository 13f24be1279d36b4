//! Combinatorial decision dags: decision nodes whose inputs may be the
//! bit-string encodings of other dags, plus K and S combinators.
//!
//! Expressions are stored as hash-consed node tables in canonical order
//! (children before parents, root last), so structurally equal expressions
//! are equal values and shared subexpressions are stored once.

mod encoding;
mod eval;
mod memo;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dtree::DecisionTree;
use crate::error::{Error, Result};

pub use encoding::{decode, encode, EncodedCodd};
pub use eval::{eval_codd, Evaluation, Fuel, Outcome};
pub use memo::{find_repeats, memoize_rewrite, MemoOutcome, Repeat};

/// Index into a node table.
pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf(#[serde(with = "bits_str")] BitString),
    Decide {
        bit: u16,
        zero: NodeId,
        one: NodeId,
    },
    K,
    S,
    /// `Sp f x y → (f x)(f y)`.
    Sp,
    Encode,
    Decode,
    Apply {
        func: NodeId,
        arg: NodeId,
    },
}

impl Node {
    pub fn children(&self) -> Vec<NodeId> {
        match *self {
            Node::Decide { zero, one, .. } => vec![zero, one],
            Node::Apply { func, arg } => vec![func, arg],
            _ => Vec::new(),
        }
    }

    /// Nullary combinators and primitives.
    pub fn is_primitive(&self) -> bool {
        matches!(self, Node::K | Node::S | Node::Sp | Node::Encode | Node::Decode)
    }

    fn map_children(&self, f: impl Fn(NodeId) -> NodeId) -> Node {
        match *self {
            Node::Decide { bit, zero, one } => Node::Decide { bit, zero: f(zero), one: f(one) },
            Node::Apply { func, arg } => Node::Apply { func: f(func), arg: f(arg) },
            ref other => other.clone(),
        }
    }
}

/// A canonical, hash-consed expression dag; the last node is the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoddExpr {
    nodes: Vec<Node>,
}

impl CoddExpr {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_id(&self) -> NodeId {
        (self.nodes.len() - 1) as NodeId
    }

    pub fn root(&self) -> &Node {
        self.nodes.last().expect("expressions are nonempty")
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn as_leaf(&self) -> Option<&BitString> {
        match self.root() {
            Node::Leaf(bits) => Some(bits),
            _ => None,
        }
    }

    fn single(node: Node) -> Self {
        CoddExpr { nodes: vec![node] }
    }

    pub fn leaf(bits: BitString) -> Self {
        CoddExpr::single(Node::Leaf(bits))
    }

    pub fn k() -> Self {
        CoddExpr::single(Node::K)
    }

    pub fn s() -> Self {
        CoddExpr::single(Node::S)
    }

    pub fn sp() -> Self {
        CoddExpr::single(Node::Sp)
    }

    pub fn encoder() -> Self {
        CoddExpr::single(Node::Encode)
    }

    pub fn decoder() -> Self {
        CoddExpr::single(Node::Decode)
    }

    pub fn decide(bit: u16, zero: &CoddExpr, one: &CoddExpr) -> Self {
        let mut b = DagBuilder::new();
        let (z, o) = (b.import(zero), b.import(one));
        let root = b.decide(bit, z, o);
        b.finish(root)
    }

    pub fn apply(func: &CoddExpr, arg: &CoddExpr) -> Self {
        CoddExpr::apply_all(func, &[arg])
    }

    /// `func a1 a2 ...`, left-associated.
    pub fn apply_all(func: &CoddExpr, args: &[&CoddExpr]) -> Self {
        let mut b = DagBuilder::new();
        let mut acc = b.import(func);
        for a in args {
            let a = b.import(a);
            acc = b.apply(acc, a);
        }
        b.finish(acc)
    }

    /// The subdag rooted at `id`.
    pub fn subexpr(&self, id: NodeId) -> CoddExpr {
        let mut b = DagBuilder::new();
        let root = b.import_from(self, id);
        b.finish(root)
    }

    /// Node id of the subdag structurally equal to `pattern`, if any.
    pub fn find(&self, pattern: &CoddExpr) -> Option<NodeId> {
        let kind = std::mem::discriminant(pattern.root());
        (0..self.nodes.len() as NodeId)
            .find(|&id| std::mem::discriminant(&self.nodes[id as usize]) == kind && self.subexpr(id) == *pattern)
    }

    /// First-order view of a decision tree; label `l` becomes the
    /// `width`-bit big-endian leaf.
    pub fn from_decision_tree(t: &DecisionTree, width: usize) -> Self {
        fn go(b: &mut DagBuilder, t: &DecisionTree, width: usize) -> NodeId {
            match t {
                DecisionTree::Leaf(l) => b.leaf(BitString::from_index(*l, width)),
                DecisionTree::Node { bit, zero, one } => {
                    let z = go(b, zero, width);
                    let o = go(b, one, width);
                    b.decide(*bit as u16, z, o)
                }
            }
        }
        let mut b = DagBuilder::new();
        let root = go(&mut b, t, width);
        b.finish(root)
    }

    /// Nodes other than the nullary primitives.
    pub fn compound_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_primitive()).count()
    }

    pub fn to_json(&self) -> ExprJson {
        ExprJson { nodes: self.nodes.clone() }
    }

    /// Node references must point to earlier entries; the last is the root.
    pub fn from_json(json: &ExprJson) -> Result<Self> {
        if json.nodes.is_empty() {
            return Err(Error::invalid("expression", "no nodes"));
        }
        let mut b = DagBuilder::new();
        let mut ids = Vec::with_capacity(json.nodes.len());
        for (i, node) in json.nodes.iter().enumerate() {
            if let Some(bad) = node.children().into_iter().find(|&c| c as usize >= i) {
                return Err(Error::invalid(
                    "expression",
                    format!("node {i} references node {bad}, not an earlier one"),
                ));
            }
            ids.push(b.node(node.map_children(|c| ids[c as usize])));
        }
        Ok(b.finish(*ids.last().expect("nonempty")))
    }
}

/// `{"nodes": [...]}`; children precede parents, the last node is the root.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExprJson {
    pub nodes: Vec<Node>,
}

/// Number of distinct decision nodes.
pub fn codd_size(e: &CoddExpr) -> usize {
    e.nodes.iter().filter(|n| matches!(n, Node::Decide { .. })).count()
}

/// Hash-consing node table.
#[derive(Default)]
pub struct DagBuilder {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `node`; its children must already be in this builder.
    pub fn node(&mut self, node: Node) -> NodeId {
        debug_assert!(node.children().iter().all(|&c| (c as usize) < self.nodes.len()));
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn leaf(&mut self, bits: BitString) -> NodeId {
        self.node(Node::Leaf(bits))
    }

    pub fn decide(&mut self, bit: u16, zero: NodeId, one: NodeId) -> NodeId {
        self.node(Node::Decide { bit, zero, one })
    }

    pub fn apply(&mut self, func: NodeId, arg: NodeId) -> NodeId {
        self.node(Node::Apply { func, arg })
    }

    pub fn import(&mut self, e: &CoddExpr) -> NodeId {
        self.import_from(e, e.root_id())
    }

    /// Copies the subdag of `e` rooted at `id`.
    pub fn import_from(&mut self, e: &CoddExpr, id: NodeId) -> NodeId {
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        for old in postorder(&e.nodes, id) {
            let node = e.nodes[old as usize].map_children(|c| map[&c]);
            let new = self.node(node);
            map.insert(old, new);
        }
        map[&id]
    }

    /// Canonical expression for the subdag at `root`: depth-first,
    /// children first, left child before right.
    pub fn finish(self, root: NodeId) -> CoddExpr {
        let order = postorder(&self.nodes, root);
        let mut renumber: HashMap<NodeId, NodeId> = HashMap::with_capacity(order.len());
        let mut nodes = Vec::with_capacity(order.len());
        for old in order {
            nodes.push(self.nodes[old as usize].map_children(|c| renumber[&c]));
            renumber.insert(old, renumber.len() as NodeId);
        }
        CoddExpr { nodes }
    }
}

/// Distinct nodes reachable from `root`, each after its children.
fn postorder(nodes: &[Node], root: NodeId) -> Vec<NodeId> {
    let mut seen = vec![false; nodes.len()];
    let mut out = Vec::new();
    let mut stack = vec![(root, false)];
    while let Some((id, expanded)) = stack.pop() {
        if expanded {
            out.push(id);
            continue;
        }
        if seen[id as usize] {
            continue;
        }
        seen[id as usize] = true;
        stack.push((id, true));
        for c in nodes[id as usize].children().into_iter().rev() {
            if !seen[c as usize] {
                stack.push((c, false));
            }
        }
    }
    out
}

mod bits_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::bits::BitString;

    pub fn serialize<S: Serializer>(b: &BitString, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&b.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BitString, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
