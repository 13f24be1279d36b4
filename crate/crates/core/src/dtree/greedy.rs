use super::{split_gain, DecisionTree, Labeling, Subcube};
use crate::partitions::Distribution;

const GAIN_TIE: f64 = 1e-12;

/// Top-down induction: split on the bit with the largest information gain
/// (lowest index on ties) until every subcube is label-pure. Zero-gain
/// splits are taken when nothing better exists, so XOR-like labelings are
/// still realized.
pub fn greedy_tree(lab: &Labeling, d: &Distribution) -> DecisionTree {
    let masses = d.masses_f64();
    grow(lab, &masses, Subcube::full(lab.space()))
}

fn grow(lab: &Labeling, masses: &[f64], cube: Subcube) -> DecisionTree {
    let space = lab.space();
    let inputs = cube.inputs(space);
    let first = lab.output(inputs[0]);
    if inputs.iter().all(|&x| lab.output(x) == first) {
        return DecisionTree::Leaf(first);
    }
    let mut best: Option<(u32, f64)> = None;
    for bit in cube.free_bits(space) {
        let gain = split_gain(lab, masses, cube, bit);
        if best.is_none_or(|(_, g)| gain > g + GAIN_TIE) {
            best = Some((bit, gain));
        }
    }
    let (bit, _) = best.expect("impure subcube has a free bit");
    DecisionTree::node(bit, grow(lab, masses, cube.restrict(bit, false)), grow(lab, masses, cube.restrict(bit, true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtree::{average_depth, optimal_tree, Label};
    use crate::partitions::InputSpace;
    use crate::rational::ratio;

    #[test]
    fn greedy_examples() {
        let s = InputSpace::new(2).unwrap();
        let u = Distribution::uniform(s);
        let proj = Labeling::from_fn(s, |x| s.bit(x, 0) as Label);
        assert_eq!(greedy_tree(&proj, &u), optimal_tree(&proj, &u).unwrap().tree);
        assert_eq!(greedy_tree(&Labeling::from_fn(s, |_| 9), &u), DecisionTree::Leaf(9));

        let xor = Labeling::from_fn(s, |x| (s.bit(x, 0) ^ s.bit(x, 1)) as Label);
        let t = greedy_tree(&xor, &u);
        assert!(matches!(t, DecisionTree::Node { bit: 0, .. }));
        assert_eq!(average_depth(&t, &u), ratio(2, 1));
    }

    #[test]
    fn greedy_never_beats_optimal() {
        let s = InputSpace::new(3).unwrap();
        let u = Distribution::uniform(s);
        let lab = Labeling::new(s, vec![0, 0, 0, 1, 1, 1, 2, 2]).unwrap();
        let g = average_depth(&greedy_tree(&lab, &u), &u);
        let o = optimal_tree(&lab, &u).unwrap().average_depth;
        assert!(g >= o);
    }
}
