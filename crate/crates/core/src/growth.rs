//! Random growth of decision trees and the logical entropy of what they
//! compute.
//!
//! A growth step replaces one leaf by a split with two fresh leaves. The
//! path partition (one cell per leaf) can only get finer under such a step,
//! so its logical entropy never decreases. The output partition can
//! coarsen when the new labels collide with existing ones, so traces
//! measure the path partition unless told otherwise.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dtree::{DecisionTree, Label, PartitionMode};
use crate::error::{Error, Result};
use crate::partitions::{Distribution, InputSpace};
use crate::rational::{self, Rational};
use crate::synsem::csv_err;
use crate::{seed, stats};

/// Replace the leaf at preorder position `target` by
/// `Decide(bit, Leaf(label0), Leaf(label1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthStep {
    pub target: usize,
    pub bit: u32,
    pub label0: Label,
    pub label1: Label,
}

pub fn expand_leaf(t: &DecisionTree, step: GrowthStep) -> Result<DecisionTree> {
    fn go(t: &DecisionTree, step: &GrowthStep, next: &mut usize) -> Result<DecisionTree> {
        let here = *next;
        *next += 1;
        match t {
            DecisionTree::Leaf(_) if here == step.target => {
                Ok(DecisionTree::node(step.bit, DecisionTree::Leaf(step.label0), DecisionTree::Leaf(step.label1)))
            }
            DecisionTree::Leaf(_) => Ok(t.clone()),
            DecisionTree::Node { .. } if here == step.target => {
                Err(Error::invalid("growth step", format!("node {here} is not a leaf")))
            }
            DecisionTree::Node { bit, zero, one } => {
                if step.target < here {
                    return Ok(t.clone());
                }
                let z = go(zero, step, next)?;
                let o = go(one, step, next)?;
                Ok(DecisionTree::node(*bit, z, o))
            }
        }
    }
    let mut next = 0;
    let out = go(t, &step, &mut next)?;
    if step.target >= next {
        return Err(Error::invalid("growth step", format!("node {} does not exist ({next} nodes)", step.target)));
    }
    Ok(out)
}

/// Arena tree that keeps the entropy of its partition current as leaves
/// are split.
struct Grower<'d> {
    space: InputSpace,
    d: &'d Distribution,
    mode: PartitionMode,
    nodes: Vec<ArenaNode>,
    leaves: Vec<usize>,
    /// Weight per output label, for the output partition.
    label_weight: std::collections::HashMap<Label, BigUint>,
    /// Sum of squared cell weights.
    sumsq: BigUint,
}

enum ArenaNode {
    Leaf { label: Label, inputs: Vec<u32>, weight: BigUint },
    Node { bit: u32, zero: usize, one: usize },
}

impl<'d> Grower<'d> {
    fn new(space: InputSpace, d: &'d Distribution, mode: PartitionMode, label: Label) -> Self {
        let inputs: Vec<u32> = space.inputs().collect();
        let weight = d.denom().clone();
        let mut g = Grower {
            space,
            d,
            mode,
            nodes: Vec::new(),
            leaves: Vec::new(),
            label_weight: Default::default(),
            sumsq: &weight * &weight,
        };
        g.label_weight.insert(label, weight.clone());
        g.nodes.push(ArenaNode::Leaf { label, inputs, weight });
        g.leaves.push(0);
        g
    }

    fn push_leaf(&mut self, label: Label, inputs: Vec<u32>) -> usize {
        let weight: BigUint = inputs.iter().map(|&x| self.d.weight(x)).sum();
        self.nodes.push(ArenaNode::Leaf { label, inputs, weight });
        self.nodes.len() - 1
    }

    fn shift_label(&mut self, label: Label, add: &BigUint, remove: &BigUint) {
        let w = self.label_weight.entry(label).or_default();
        self.sumsq -= &*w * &*w;
        *w += add;
        *w -= remove;
        self.sumsq += &*w * &*w;
    }

    /// Splits `leaves[k]`; the zero child takes its slot, the one child is
    /// appended.
    fn split(&mut self, k: usize, bit: u32, label0: Label, label1: Label) {
        let id = self.leaves[k];
        let ArenaNode::Leaf { label, inputs, weight } =
            std::mem::replace(&mut self.nodes[id], ArenaNode::Node { bit, zero: 0, one: 0 })
        else {
            unreachable!("leaves holds leaf ids only");
        };
        let (ones, zeros): (Vec<u32>, Vec<u32>) = inputs.into_iter().partition(|&x| self.space.bit(x, bit));
        let zero = self.push_leaf(label0, zeros);
        let one = self.push_leaf(label1, ones);
        self.nodes[id] = ArenaNode::Node { bit, zero, one };
        self.leaves[k] = zero;
        self.leaves.push(one);

        let w0 = self.leaf_weight(zero).clone();
        let w1 = self.leaf_weight(one).clone();
        match self.mode {
            PartitionMode::ByLeaf => {
                self.sumsq -= &weight * &weight;
                self.sumsq += &w0 * &w0 + &w1 * &w1;
            }
            PartitionMode::ByOutput => {
                let none = BigUint::zero();
                self.shift_label(label, &none, &weight);
                self.shift_label(label0, &w0, &none);
                self.shift_label(label1, &w1, &none);
            }
        }
    }

    fn leaf_weight(&self, id: usize) -> &BigUint {
        match &self.nodes[id] {
            ArenaNode::Leaf { weight, .. } => weight,
            ArenaNode::Node { .. } => unreachable!("not a leaf"),
        }
    }

    fn entropy(&self) -> Rational {
        let denom = self.d.denom() * self.d.denom();
        rational::one() - rational::from_parts(&self.sumsq, &denom)
    }

    fn size(&self) -> usize {
        self.leaves.len() - 1
    }

    fn tree(&self) -> DecisionTree {
        fn go(nodes: &[ArenaNode], id: usize) -> DecisionTree {
            match &nodes[id] {
                ArenaNode::Leaf { label, .. } => DecisionTree::Leaf(*label),
                ArenaNode::Node { bit, zero, one } => DecisionTree::node(*bit, go(nodes, *zero), go(nodes, *one)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthConfig {
    pub n: u32,
    pub steps: usize,
    pub seed: u64,
    /// Labels are drawn uniformly from `0..alphabet`.
    pub alphabet: u64,
    pub mode: PartitionMode,
}

impl GrowthConfig {
    /// Binary labels, path partition.
    pub fn new(n: u32, steps: usize, seed: u64) -> Self {
        GrowthConfig { n, steps, seed, alphabet: 2, mode: PartitionMode::ByLeaf }
    }

    fn check(&self) -> Result<InputSpace> {
        if self.alphabet == 0 {
            return Err(Error::invalid("growth config", "alphabet must be nonempty"));
        }
        InputSpace::new(self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub size: usize,
    #[serde(with = "rational::serde_str")]
    pub entropy: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthTrace {
    pub config: GrowthConfig,
    /// Entry 0 is the initial leaf.
    pub entries: Vec<TraceEntry>,
    #[serde(skip)]
    pub tree: DecisionTree,
}

impl GrowthTrace {
    /// `step, size, entropy_num, entropy_den`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["step", "size", "entropy_num", "entropy_den"]).map_err(csv_err)?;
        for e in &self.entries {
            out.write_record([
                e.step.to_string(),
                e.size.to_string(),
                e.entropy.numer().to_string(),
                e.entropy.denom().to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Steps at which the entropy went down.
    pub fn violations(&self) -> Vec<usize> {
        self.entries.windows(2).filter(|w| w[1].entropy < w[0].entropy).map(|w| w[1].step).collect()
    }
}

fn grow_with(
    config: &GrowthConfig,
    space: InputSpace,
    d: &Distribution,
    rng: &mut impl Rng,
    record: bool,
) -> GrowthTrace {
    let mut g = Grower::new(space, d, config.mode, rng.random_range(0..config.alphabet));
    let mut entries = Vec::with_capacity(if record { config.steps + 1 } else { 1 });
    let entry = |g: &Grower, step| TraceEntry { step, size: g.size(), entropy: g.entropy() };
    if record {
        entries.push(entry(&g, 0));
    }
    for step in 1..=config.steps {
        let k = rng.random_range(0..g.leaves.len());
        let bit = rng.random_range(0..space.bits());
        let label0 = rng.random_range(0..config.alphabet);
        let label1 = rng.random_range(0..config.alphabet);
        g.split(k, bit, label0, label1);
        if record {
            entries.push(entry(&g, step));
        }
    }
    if !record {
        entries.push(entry(&g, config.steps));
    }
    GrowthTrace { config: config.clone(), entries, tree: g.tree() }
}

/// From one random leaf, `steps` uniformly random splits: uniform leaf,
/// uniform bit (re-querying a bit on the path is allowed), uniform labels.
pub fn grow_random(config: &GrowthConfig, d: &Distribution) -> Result<GrowthTrace> {
    let space = config.check()?;
    d.ensure_over(&space)?;
    let mut rng = seed::stream(config.seed, 0);
    Ok(grow_with(config, space, d, &mut rng, true))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnsembleConfig {
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub n: u32,
    pub seed: u64,
    pub alphabet: u64,
    pub mode: PartitionMode,
}

impl EnsembleConfig {
    pub fn new(sizes: Vec<usize>, samples: usize, n: u32, seed: u64) -> Self {
        EnsembleConfig { sizes, samples, n, seed, alphabet: 2, mode: PartitionMode::ByLeaf }
    }

    fn growth(&self, size: usize, seed: u64) -> GrowthConfig {
        GrowthConfig { n: self.n, steps: size, seed, alphabet: self.alphabet, mode: self.mode }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeRow {
    pub size: usize,
    pub samples: usize,
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleTable {
    pub config: EnsembleConfig,
    pub rows: Vec<SizeRow>,
    /// Over all (size, entropy) samples; `None` when either is constant.
    pub spearman: Option<f64>,
}

impl EnsembleTable {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["size", "samples", "mean", "min", "q25", "median", "q75", "max"]).map_err(csv_err)?;
        for r in &self.rows {
            out.write_record([
                r.size.to_string(),
                r.samples.to_string(),
                r.mean.to_string(),
                r.min.to_string(),
                r.q25.to_string(),
                r.median.to_string(),
                r.q75.to_string(),
                r.max.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Stream index of sample `j` of size `s`; independent of the size list.
fn sample_stream(size: usize, j: usize) -> u64 {
    ((size as u64) << 32) | j as u64
}

/// Final entropies of independent random trees of exactly `size` splits.
fn sample_entropies(
    config: &GrowthConfig,
    space: InputSpace,
    d: &Distribution,
    samples: usize,
    master: u64,
) -> Vec<Rational> {
    (0..samples)
        .into_par_iter()
        .map(|j| {
            let mut rng = seed::stream(master, sample_stream(config.steps, j));
            grow_with(config, space, d, &mut rng, false).entries.pop().expect("final entry").entropy
        })
        .collect()
}

/// For each size, `samples` trees grown to that size; entropy quantiles per
/// size and the rank correlation of size with entropy.
pub fn size_entropy_ensemble(config: &EnsembleConfig, d: &Distribution) -> Result<EnsembleTable> {
    let space = config.growth(0, config.seed).check()?;
    d.ensure_over(&space)?;
    let mut rows = Vec::with_capacity(config.sizes.len());
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &size in &config.sizes {
        let mut h: Vec<f64> =
            sample_entropies(&config.growth(size, config.seed), space, d, config.samples, config.seed)
                .iter()
                .map(rational::to_f64)
                .collect();
        xs.extend(std::iter::repeat_n(size as f64, h.len()));
        ys.extend(&h);
        h.sort_by(f64::total_cmp);
        rows.push(SizeRow {
            size,
            samples: h.len(),
            mean: stats::mean(&h),
            min: stats::quantile(&h, 0.0),
            q25: stats::quantile(&h, 0.25),
            median: stats::quantile(&h, 0.5),
            q75: stats::quantile(&h, 0.75),
            max: stats::quantile(&h, 1.0),
        });
    }
    Ok(EnsembleTable { config: config.clone(), rows, spearman: stats::spearman(&xs, &ys) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileConfig {
    pub size: usize,
    pub samples: usize,
    pub n: u32,
    pub seed: u64,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub bins: usize,
    pub alphabet: u64,
    pub mode: PartitionMode,
}

impl ProfileConfig {
    /// δ = 1/10, 20 bins.
    pub fn new(size: usize, samples: usize, n: u32, seed: u64) -> Self {
        ProfileConfig {
            size,
            samples,
            n,
            seed,
            delta: rational::ratio(1, 10),
            bins: 20,
            alphabet: 2,
            mode: PartitionMode::ByLeaf,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationProfile {
    pub config: ProfileConfig,
    /// Equal-width bins over `[0, 1 − Σ mass²]`, the largest logical
    /// entropy any partition reaches under the distribution.
    pub histogram: Vec<Bin>,
    #[serde(with = "rational::serde_str")]
    pub empirical_max: Rational,
    /// Samples with entropy at least `(1 − δ)` times the empirical maximum.
    pub fraction_within: f64,
}

/// Entropy distribution of random trees with exactly `size` splits.
pub fn entropy_concentration_profile(config: &ProfileConfig, d: &Distribution) -> Result<ConcentrationProfile> {
    let growth = GrowthConfig {
        n: config.n,
        steps: config.size,
        seed: config.seed,
        alphabet: config.alphabet,
        mode: config.mode,
    };
    let space = growth.check()?;
    d.ensure_over(&space)?;
    if config.samples == 0 || config.bins == 0 {
        return Err(Error::invalid("profile config", "samples and bins must be positive"));
    }
    if config.delta < Rational::zero() || config.delta > rational::one() {
        return Err(Error::invalid("profile config", "delta must lie in [0, 1]"));
    }
    let h = sample_entropies(&growth, space, d, config.samples, config.seed);
    let empirical_max = h.iter().max().cloned().expect("samples > 0");
    let threshold = (rational::one() - &config.delta) * &empirical_max;
    let within = h.iter().filter(|e| **e >= threshold).count();

    let sumsq: BigUint = d.weights().iter().map(|w| w * w).sum();
    let upper = rational::to_f64(&(rational::one() - rational::from_parts(&sumsq, &(d.denom() * d.denom()))));
    let width = upper / config.bins as f64;
    let mut histogram: Vec<Bin> =
        (0..config.bins).map(|i| Bin { lo: i as f64 * width, hi: (i + 1) as f64 * width, count: 0 }).collect();
    for e in &h {
        let x = rational::to_f64(e);
        let i = if width > 0.0 { ((x / width) as usize).min(config.bins - 1) } else { 0 };
        histogram[i].count += 1;
    }
    Ok(ConcentrationProfile {
        config: config.clone(),
        histogram,
        empirical_max,
        fraction_within: within as f64 / h.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtree::induced_partition;
    use crate::partitions::{logical_entropy, refines};
    use crate::rational::ratio;

    fn s(n: u32) -> InputSpace {
        InputSpace::new(n).unwrap()
    }

    fn entropy(t: &DecisionTree, n: u32, mode: PartitionMode) -> Rational {
        let d = Distribution::uniform(s(n));
        logical_entropy(&induced_partition(t, s(n), mode), &d).unwrap()
    }

    #[test]
    fn expand_leaf_examples() {
        let step = GrowthStep { target: 0, bit: 0, label0: 0, label1: 1 };
        let t = expand_leaf(&DecisionTree::Leaf(0), step).unwrap();
        assert_eq!(entropy(&DecisionTree::Leaf(0), 2, PartitionMode::ByOutput), ratio(0, 1));
        assert_eq!(entropy(&t, 2, PartitionMode::ByOutput), ratio(1, 2));

        // same labels as the old leaf: no new output distinction
        let same = expand_leaf(&t, GrowthStep { target: 2, bit: 1, label0: 1, label1: 1 }).unwrap();
        assert_eq!(entropy(&same, 2, PartitionMode::ByOutput), ratio(1, 2));

        // re-querying bit 0 under its own one-branch: the zero side is unreachable
        let requery = expand_leaf(&t, GrowthStep { target: 2, bit: 0, label0: 0, label1: 1 }).unwrap();
        assert_eq!(entropy(&requery, 2, PartitionMode::ByOutput), ratio(1, 2));
        assert_eq!(entropy(&requery, 2, PartitionMode::ByLeaf), ratio(1, 2));
    }

    #[test]
    fn expand_leaf_rejects_internal_and_missing_targets() {
        let t = DecisionTree::node(0, DecisionTree::Leaf(0), DecisionTree::Leaf(1));
        assert!(expand_leaf(&t, GrowthStep { target: 0, bit: 1, label0: 0, label1: 0 }).is_err());
        assert!(expand_leaf(&t, GrowthStep { target: 3, bit: 1, label0: 0, label1: 0 }).is_err());
        let grown = expand_leaf(&t, GrowthStep { target: 1, bit: 1, label0: 2, label1: 3 }).unwrap();
        assert_eq!(
            grown,
            DecisionTree::node(
                0,
                DecisionTree::node(1, DecisionTree::Leaf(2), DecisionTree::Leaf(3)),
                DecisionTree::Leaf(1)
            )
        );
    }

    #[test]
    fn output_partition_can_coarsen() {
        // both new labels collide with the sibling's
        let t = DecisionTree::node(0, DecisionTree::Leaf(0), DecisionTree::Leaf(1));
        let g = expand_leaf(&t, GrowthStep { target: 2, bit: 1, label0: 0, label1: 0 }).unwrap();
        assert!(entropy(&g, 2, PartitionMode::ByOutput) < entropy(&t, 2, PartitionMode::ByOutput));
        assert!(entropy(&g, 2, PartitionMode::ByLeaf) >= entropy(&t, 2, PartitionMode::ByLeaf));
    }

    #[test]
    fn incremental_entropy_matches_the_partition() {
        let d = Distribution::from_weights(s(3), &[1, 2, 3, 0, 5, 1, 1, 7]).unwrap();
        for mode in [PartitionMode::ByLeaf, PartitionMode::ByOutput] {
            for seed in 0..5 {
                let mut c = GrowthConfig::new(3, 12, seed);
                c.mode = mode;
                c.alphabet = 3;
                let tr = grow_random(&c, &d).unwrap();
                let want = logical_entropy(&induced_partition(&tr.tree, s(3), mode), &d).unwrap();
                assert_eq!(tr.entries.last().unwrap().entropy, want);
                assert_eq!(tr.entries.last().unwrap().size, 12);
            }
        }
    }

    #[test]
    fn path_partitions_refine_along_a_trace() {
        let d = Distribution::uniform(s(3));
        let c = GrowthConfig::new(3, 1, 0);
        let mut rng = seed::stream(9, 0);
        let mut g = Grower::new(s(3), &d, c.mode, 0);
        for _ in 0..20 {
            let before = induced_partition(&g.tree(), s(3), PartitionMode::ByLeaf);
            let k = rng.random_range(0..g.leaves.len());
            g.split(k, rng.random_range(0..3), 0, 1);
            let after = induced_partition(&g.tree(), s(3), PartitionMode::ByLeaf);
            assert!(refines(&after, &before).unwrap());
        }
    }

    #[test]
    fn traces_are_deterministic_and_monotone() {
        let d = Distribution::uniform(s(4));
        let a = grow_random(&GrowthConfig::new(4, 200, 11), &d).unwrap();
        let b = grow_random(&GrowthConfig::new(4, 200, 11), &d).unwrap();
        assert_eq!(a, b);
        assert!(a.violations().is_empty());
        assert!(a.entries.windows(2).all(|w| w[1].size == w[0].size + 1));

        let zero = grow_random(&GrowthConfig::new(4, 0, 3), &d).unwrap();
        assert_eq!(zero.entries, vec![TraceEntry { step: 0, size: 0, entropy: ratio(0, 1) }]);

        let mut csv = Vec::new();
        zero.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "step,size,entropy_num,entropy_den\n0,0,0,1\n");
    }

    #[test]
    fn ensemble_bounds() {
        let d = Distribution::uniform(s(3));
        let mut c = EnsembleConfig::new(vec![0], 5, 3, 1);
        c.alphabet = 1;
        c.mode = PartitionMode::ByOutput;
        let t = size_entropy_ensemble(&c, &d).unwrap();
        assert_eq!(t.rows[0].max, 0.0);
        assert_eq!(t.spearman, None);

        let t = size_entropy_ensemble(&EnsembleConfig::new(vec![1, 4, 9], 6, 3, 1), &d).unwrap();
        assert!(t.rows.iter().all(|r| r.max <= 1.0 - 1.0 / 8.0));
        assert!(t.spearman.unwrap() > 0.0);
    }

    #[test]
    fn ensemble_rows_do_not_depend_on_the_size_list() {
        let d = Distribution::uniform(s(3));
        let both = size_entropy_ensemble(&EnsembleConfig::new(vec![2, 5], 4, 3, 8), &d).unwrap();
        let one = size_entropy_ensemble(&EnsembleConfig::new(vec![5], 4, 3, 8), &d).unwrap();
        assert_eq!(both.rows[1], one.rows[0]);
    }

    #[test]
    fn profile_examples() {
        let d = Distribution::uniform(s(3));
        let p = entropy_concentration_profile(&ProfileConfig::new(0, 10, 3, 0), &d).unwrap();
        assert_eq!(p.histogram[0].count, 10);
        assert_eq!(p.fraction_within, 1.0);

        let p = entropy_concentration_profile(&ProfileConfig::new(6, 50, 3, 0), &d).unwrap();
        assert!((0.0..=1.0).contains(&p.fraction_within));
        assert_eq!(p.histogram.iter().map(|b| b.count).sum::<usize>(), 50);
    }
}
