//! Bit-querying binary decision trees over an [`InputSpace`].

mod greedy;
mod optimal;
mod subcube;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::partitions::{shannon_of_masses, Distribution, InputSpace, Partition};
use crate::rational::{self, Rational};

pub use greedy::greedy_tree;
pub use optimal::{optimal_tree, optimal_tree_with, OptimalTree, TieBreak, MAX_OPTIMAL_BITS};
pub use subcube::Subcube;

/// Output identifier carried by leaves.
pub type Label = u64;

/// A decision tree; `Node` sends inputs whose `bit` is 0 to `zero`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "TreeJson", into = "TreeJson")]
pub enum DecisionTree {
    Leaf(Label),
    Node { bit: u32, zero: Box<DecisionTree>, one: Box<DecisionTree> },
}

impl DecisionTree {
    pub fn leaf(label: Label) -> Self {
        DecisionTree::Leaf(label)
    }

    /// Unchecked; see [`DecisionTree::validate`].
    pub fn node(bit: u32, zero: DecisionTree, one: DecisionTree) -> Self {
        DecisionTree::Node { bit, zero: Box::new(zero), one: Box::new(one) }
    }

    /// Builds a node and checks the result against an `n`-bit space.
    pub fn checked_node(n: u32, bit: u32, zero: DecisionTree, one: DecisionTree) -> Result<Self> {
        let t = DecisionTree::node(bit, zero, one);
        t.validate(n)?;
        Ok(t)
    }

    /// Every bit index is below `n` and none repeats on a root-to-leaf path.
    pub fn validate(&self, n: u32) -> Result<()> {
        fn go(t: &DecisionTree, n: u32, used: u64) -> Result<()> {
            match t {
                DecisionTree::Leaf(_) => Ok(()),
                DecisionTree::Node { bit, zero, one } => {
                    if *bit >= n {
                        return Err(Error::invalid("decision tree", format!("bit index {bit} out of range for n={n}")));
                    }
                    if used & (1 << bit) != 0 {
                        return Err(Error::invalid("decision tree", format!("bit {bit} re-queried on a path")));
                    }
                    go(zero, n, used | (1 << bit))?;
                    go(one, n, used | (1 << bit))
                }
            }
        }
        go(self, n, 0)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, DecisionTree::Leaf(_))
    }

    /// Label and path length for `x`; bits past the end of `x` read as 0.
    fn trace(&self, x: &impl BitSource) -> (&DecisionTree, u32) {
        let mut t = self;
        let mut depth = 0;
        while let DecisionTree::Node { bit, zero, one } = t {
            t = if x.bit(*bit) { one } else { zero };
            depth += 1;
        }
        (t, depth)
    }

    pub fn eval_input(&self, space: InputSpace, x: u32) -> Label {
        leaf_label(self.trace(&(space, x)).0)
    }

    pub fn depth_of(&self, space: InputSpace, x: u32) -> u32 {
        self.trace(&(space, x)).1
    }

    /// Preorder traversal.
    pub fn nodes(&self) -> Vec<&DecisionTree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            if let DecisionTree::Node { zero, one, .. } = t {
                stack.push(one);
                stack.push(zero);
            }
        }
        out
    }

    pub fn depth(&self) -> u32 {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("tree serializes")
    }
}

fn leaf_label(t: &DecisionTree) -> Label {
    match t {
        DecisionTree::Leaf(l) => *l,
        DecisionTree::Node { .. } => unreachable!("trace stops at leaves"),
    }
}

trait BitSource {
    fn bit(&self, i: u32) -> bool;
}

impl BitSource for (InputSpace, u32) {
    fn bit(&self, i: u32) -> bool {
        self.0.bit(self.1, i)
    }
}

impl BitSource for BitString {
    fn bit(&self, i: u32) -> bool {
        self.get(i as usize)
    }
}

pub fn eval_tree(t: &DecisionTree, x: &BitString) -> Label {
    leaf_label(t.trace(x).0)
}

/// Number of internal (decision) nodes.
pub fn tree_size(t: &DecisionTree) -> usize {
    t.nodes().iter().filter(|n| !n.is_leaf()).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    /// One cell per reachable leaf.
    ByLeaf,
    /// Leaves with equal labels share a cell.
    ByOutput,
}

pub fn induced_partition(t: &DecisionTree, space: InputSpace, mode: PartitionMode) -> Partition {
    let keys = space.inputs().map(|x| {
        let leaf = t.trace(&(space, x)).0;
        match mode {
            PartitionMode::ByLeaf => leaf as *const DecisionTree as usize as u64,
            PartitionMode::ByOutput => leaf_label(leaf),
        }
    });
    Partition::from_keys(space, keys).expect("one key per input")
}

/// Expected number of queries, `Σ_x mass(x) · depth(x)`.
pub fn average_depth(t: &DecisionTree, d: &Distribution) -> Rational {
    let space = d.space();
    let total: num_bigint::BigUint = space.inputs().map(|x| d.weight(x) * t.depth_of(space, x)).sum();
    rational::from_parts(&total, d.denom())
}

/// The extensional program a tree should realize: one output per input.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    space: InputSpace,
    outputs: Vec<Label>,
}

impl Labeling {
    pub fn new(space: InputSpace, outputs: Vec<Label>) -> Result<Self> {
        if outputs.len() != space.size() {
            return Err(Error::invalid(
                "labeling",
                format!("expected {} outputs, got {}", space.size(), outputs.len()),
            ));
        }
        Ok(Labeling { space, outputs })
    }

    pub fn from_fn(space: InputSpace, f: impl Fn(u32) -> Label) -> Self {
        Labeling { space, outputs: space.inputs().map(f).collect() }
    }

    pub fn from_tree(t: &DecisionTree, space: InputSpace) -> Self {
        Labeling::from_fn(space, |x| t.eval_input(space, x))
    }

    pub fn space(&self) -> InputSpace {
        self.space
    }

    pub fn output(&self, x: u32) -> Label {
        self.outputs[x as usize]
    }

    pub fn outputs(&self) -> &[Label] {
        &self.outputs
    }

    /// Inputs grouped by equal output.
    pub fn partition(&self) -> Partition {
        Partition::from_keys(self.space, self.outputs.iter().copied()).expect("total labeling")
    }

    pub fn to_json(&self) -> LabelingJson {
        LabelingJson { n: self.space.bits(), output: self.outputs.clone() }
    }

    pub fn from_json(json: &LabelingJson) -> Result<Self> {
        Labeling::new(InputSpace::new(json.n)?, json.output.clone())
    }
}

/// `{"n": int, "output": [int, ...]}` in numeric input order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelingJson {
    pub n: u32,
    pub output: Vec<Label>,
}

/// Shannon entropy (bits) of the label among `inputs`, with masses
/// renormalized to the set; zero when the set carries no mass.
pub fn label_entropy(lab: &Labeling, masses: &[f64], inputs: &[u32]) -> f64 {
    let total: f64 = inputs.iter().map(|&x| masses[x as usize]).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut by_label: std::collections::BTreeMap<Label, f64> = Default::default();
    for &x in inputs {
        *by_label.entry(lab.output(x)).or_default() += masses[x as usize];
    }
    shannon_of_masses(by_label.values().map(|m| m / total))
}

/// Information gain about the label from querying `bit` inside `cube`.
pub fn split_gain(lab: &Labeling, masses: &[f64], cube: Subcube, bit: u32) -> f64 {
    let space = lab.space();
    let all = cube.inputs(space);
    let total: f64 = all.iter().map(|&x| masses[x as usize]).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut conditional = 0.0;
    for side in [false, true] {
        let part = cube.restrict(bit, side).inputs(space);
        let m: f64 = part.iter().map(|&x| masses[x as usize]).sum();
        conditional += m / total * label_entropy(lab, masses, &part);
    }
    (label_entropy(lab, masses, &all) - conditional).max(0.0)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum TreeJson {
    Leaf { leaf: Label },
    Node { bit: u32, zero: Box<TreeJson>, one: Box<TreeJson> },
}

impl From<TreeJson> for DecisionTree {
    fn from(j: TreeJson) -> Self {
        match j {
            TreeJson::Leaf { leaf } => DecisionTree::Leaf(leaf),
            TreeJson::Node { bit, zero, one } => DecisionTree::node(bit, (*zero).into(), (*one).into()),
        }
    }
}

impl From<DecisionTree> for TreeJson {
    fn from(t: DecisionTree) -> Self {
        match t {
            DecisionTree::Leaf(leaf) => TreeJson::Leaf { leaf },
            DecisionTree::Node { bit, zero, one } => {
                TreeJson::Node { bit, zero: Box::new((*zero).into()), one: Box::new((*one).into()) }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{refines, shannon_entropy};
    use crate::rational::ratio;

    fn space(n: u32) -> InputSpace {
        InputSpace::new(n).unwrap()
    }

    fn leaf(l: Label) -> DecisionTree {
        DecisionTree::leaf(l)
    }

    fn xor2() -> DecisionTree {
        DecisionTree::node(0, DecisionTree::node(1, leaf(0), leaf(1)), DecisionTree::node(1, leaf(1), leaf(0)))
    }

    #[test]
    fn eval_examples() {
        let x: BitString = "10".parse().unwrap();
        assert_eq!(eval_tree(&leaf(7), &x), 7);
        assert_eq!(eval_tree(&DecisionTree::node(0, leaf(0), leaf(1)), &x), 1);
        assert_eq!(eval_tree(&xor2(), &"11".parse().unwrap()), 0);
        assert_eq!(eval_tree(&xor2(), &"01".parse().unwrap()), 1);
    }

    #[test]
    fn induced_partition_examples() {
        let s = space(2);
        for mode in [PartitionMode::ByLeaf, PartitionMode::ByOutput] {
            assert_eq!(induced_partition(&leaf(0), s, mode), Partition::indiscrete(s));
        }
        let split = DecisionTree::node(0, leaf(0), leaf(1));
        assert_eq!(
            induced_partition(&split, s, PartitionMode::ByLeaf),
            Partition::from_cells(s, &[0, 0, 1, 1]).unwrap()
        );
        let same = DecisionTree::node(0, leaf(5), leaf(5));
        assert_eq!(induced_partition(&same, s, PartitionMode::ByLeaf).cell_count(), 2);
        assert_eq!(induced_partition(&same, s, PartitionMode::ByOutput).cell_count(), 1);
    }

    #[test]
    fn average_depth_examples() {
        let u = Distribution::uniform(space(2));
        assert_eq!(average_depth(&leaf(3), &u), ratio(0, 1));
        assert_eq!(average_depth(&xor2(), &u), ratio(2, 1));
        let lopsided = DecisionTree::node(0, leaf(0), DecisionTree::node(1, leaf(1), leaf(2)));
        assert_eq!(average_depth(&lopsided, &u), ratio(3, 2));
    }

    #[test]
    fn average_depth_equals_internal_subcube_mass() {
        let s = space(3);
        let d = Distribution::from_weights(s, &[1, 2, 3, 4, 5, 6, 7, 0]).unwrap();
        let t = DecisionTree::node(
            2,
            DecisionTree::node(0, leaf(0), leaf(1)),
            DecisionTree::node(1, leaf(1), DecisionTree::node(0, leaf(2), leaf(3))),
        );
        fn internal_mass(t: &DecisionTree, cube: Subcube, d: &Distribution) -> Rational {
            match t {
                DecisionTree::Leaf(_) => ratio(0, 1),
                DecisionTree::Node { bit, zero, one } => {
                    let here: Rational = cube.inputs(d.space()).iter().map(|&x| d.mass(x)).sum();
                    here + internal_mass(zero, cube.restrict(*bit, false), d)
                        + internal_mass(one, cube.restrict(*bit, true), d)
                }
            }
        }
        assert_eq!(average_depth(&t, &d), internal_mass(&t, Subcube::full(s), &d));
    }

    #[test]
    fn tree_size_examples() {
        assert_eq!(tree_size(&leaf(0)), 0);
        assert_eq!(tree_size(&DecisionTree::node(0, leaf(0), leaf(1))), 1);
        assert_eq!(tree_size(&xor2()), 3);
    }

    #[test]
    fn validation_rejects_repeats_and_range() {
        assert!(xor2().validate(2).is_ok());
        assert!(xor2().validate(1).is_err());
        let repeat = DecisionTree::node(0, DecisionTree::node(0, leaf(0), leaf(1)), leaf(1));
        assert!(repeat.validate(2).is_err());
        assert!(DecisionTree::checked_node(2, 1, leaf(0), leaf(1)).is_ok());
        assert!(DecisionTree::checked_node(2, 2, leaf(0), leaf(1)).is_err());
    }

    #[test]
    fn json_form() {
        let t = DecisionTree::node(1, leaf(0), leaf(4));
        let json = t.to_json_string();
        assert_eq!(json, r#"{"bit":1,"zero":{"leaf":0},"one":{"leaf":4}}"#);
        let back: DecisionTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<DecisionTree>(r#"{"leaf":1,"bit":0}"#).is_err());
    }

    #[test]
    fn by_leaf_refines_by_output() {
        let s = space(2);
        let t = DecisionTree::node(0, leaf(1), DecisionTree::node(1, leaf(1), leaf(0)));
        let fine = induced_partition(&t, s, PartitionMode::ByLeaf);
        let coarse = induced_partition(&t, s, PartitionMode::ByOutput);
        assert!(refines(&fine, &coarse).unwrap());
        let u = Distribution::uniform(s);
        assert!(shannon_entropy(&fine, &u).unwrap() <= rational::to_f64(&average_depth(&t, &u)) + 1e-12);
    }

    #[test]
    fn gains_on_xor_and_projection() {
        let s = space(2);
        let masses = Distribution::uniform(s).masses_f64();
        let xor = Labeling::from_tree(&xor2(), s);
        assert_eq!(split_gain(&xor, &masses, Subcube::full(s), 0), 0.0);
        assert_eq!(split_gain(&xor, &masses, Subcube::full(s), 1), 0.0);
        let proj = Labeling::from_fn(s, |x| s.bit(x, 0) as Label);
        assert!((split_gain(&proj, &masses, Subcube::full(s), 0) - 1.0).abs() < 1e-12);
    }
}
