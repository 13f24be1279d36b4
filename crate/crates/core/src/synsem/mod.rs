//! Syntax against semantics: do programs that compute similar functions
//! have similar trees?
//!
//! Semantic distance is the expected disagreement of two Boolean labelings.
//! Syntactic distance is a weighted edit distance between their decision
//! trees, where each internal node carries the information gain of its
//! split.

mod edit;

use num_traits::Zero;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dtree::{greedy_tree, optimal_tree_with, split_gain, DecisionTree, Label, Labeling, Subcube, TieBreak};
use crate::error::{Error, Result};
use crate::partitions::{Distribution, InputSpace};
use crate::rational::{self, Rational};
use crate::{seed, stats};

pub use edit::{tree_edit_distance, EditCostScheme, NodeInfo, NodeKey, OrderedTree, Postorder, SchemeKind};

/// `Σ mass(x)·|f(x) − g(x)|` over Boolean labelings.
pub fn semantic_distance(f: &Labeling, g: &Labeling, d: &Distribution) -> Result<Rational> {
    f.space().ensure_same(&g.space())?;
    d.ensure_over(&f.space())?;
    let mut disagree = num_bigint::BigUint::zero();
    for x in f.space().inputs() {
        let (a, b) = (f.output(x), g.output(x));
        if a > 1 || b > 1 {
            return Err(Error::invalid("labeling", format!("output on input {x} is not Boolean")));
        }
        if a != b {
            disagree += d.weight(x);
        }
    }
    Ok(rational::from_parts(&disagree, d.denom()))
}

/// A decision tree whose internal nodes carry their information gain.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum EntropyLabeledTree {
    Leaf { leaf: Label },
    Node { bit: u32, gain: f64, zero: Box<EntropyLabeledTree>, one: Box<EntropyLabeledTree> },
}

impl EntropyLabeledTree {
    pub fn gain(&self) -> f64 {
        match self {
            EntropyLabeledTree::Leaf { .. } => 0.0,
            EntropyLabeledTree::Node { gain, .. } => *gain,
        }
    }

    /// The edit-distance view; gains become exact rationals.
    pub fn to_ordered(&self) -> OrderedTree {
        match self {
            EntropyLabeledTree::Leaf { leaf } => OrderedTree::new(NodeKey::Leaf(*leaf), Rational::zero(), vec![]),
            EntropyLabeledTree::Node { bit, gain, zero, one } => OrderedTree::new(
                NodeKey::Split(*bit),
                rational::from_f64(*gain),
                vec![zero.to_ordered(), one.to_ordered()],
            ),
        }
    }
}

/// Labels every split of `t` with its gain about `lab` inside the node's
/// subcube under `d`. `t` must be a valid tree computing `lab` exactly.
pub fn entropy_labels(t: &DecisionTree, lab: &Labeling, d: &Distribution) -> Result<EntropyLabeledTree> {
    let space = lab.space();
    d.ensure_over(&space)?;
    t.validate(space.bits())?;
    if Labeling::from_tree(t, space) != *lab {
        return Err(Error::invalid("tree", "does not realize the labeling"));
    }
    let masses = d.masses_f64();
    fn go(t: &DecisionTree, lab: &Labeling, masses: &[f64], cube: Subcube) -> EntropyLabeledTree {
        match t {
            DecisionTree::Leaf(l) => EntropyLabeledTree::Leaf { leaf: *l },
            DecisionTree::Node { bit, zero, one } => EntropyLabeledTree::Node {
                bit: *bit,
                gain: split_gain(lab, masses, cube, *bit),
                zero: Box::new(go(zero, lab, masses, cube.restrict(*bit, false))),
                one: Box::new(go(one, lab, masses, cube.restrict(*bit, true))),
            },
        }
    }
    Ok(go(t, lab, &masses, Subcube::full(space)))
}

/// How tree pairs are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairEnsemble {
    /// `f` uniform; `g` is `f` with `k` distinct outputs flipped, `k`
    /// uniform in `0..=2^(n-1)`.
    #[default]
    Perturbed,
    /// `f` and `g` independent and uniform.
    Independent,
    /// `g = f`.
    Identical,
}

impl std::str::FromStr for PairEnsemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perturbed" => Ok(PairEnsemble::Perturbed),
            "independent" => Ok(PairEnsemble::Independent),
            "identical" => Ok(PairEnsemble::Identical),
            other => {
                Err(Error::invalid("ensemble", format!("{other:?} (expected perturbed, independent or identical)")))
            }
        }
    }
}

/// Tree builder for each labeling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builder {
    /// Minimal expected depth, ties to the most informative root.
    #[default]
    Optimal,
    Greedy,
}

impl std::str::FromStr for Builder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(Builder::Optimal),
            "greedy" => Ok(Builder::Greedy),
            other => Err(Error::invalid("builder", format!("{other:?} (expected optimal or greedy)"))),
        }
    }
}

pub const MAX_CORRELATION_BITS: u32 = 6;

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationConfig {
    pub n: u32,
    pub pairs: usize,
    pub seed: u64,
    pub ensemble: PairEnsemble,
    pub builder: Builder,
    pub schemes: Vec<EditCostScheme>,
    #[serde(serialize_with = "serialize_dist")]
    pub distribution: Option<Distribution>,
}

fn serialize_dist<S: serde::Serializer>(d: &Option<Distribution>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match d {
        None => s.serialize_str("uniform"),
        Some(d) => d.to_json().serialize(s),
    }
}

impl CorrelationConfig {
    /// Uniform distribution, perturbed pairs, optimal trees, both schemes.
    pub fn new(n: u32, pairs: usize, seed: u64) -> Self {
        CorrelationConfig {
            n,
            pairs,
            seed,
            ensemble: PairEnsemble::default(),
            builder: Builder::default(),
            schemes: vec![EditCostScheme::entropy(), EditCostScheme::depth()],
            distribution: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub pair_id: usize,
    #[serde(with = "rational::serde_str")]
    pub semantic: Rational,
    /// One distance per configured scheme, in order.
    #[serde(serialize_with = "serialize_rationals")]
    pub syntactic: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub scheme: SchemeKind,
    /// `None` when either distance column is constant.
    pub spearman: Option<f64>,
    pub pearson: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub config: CorrelationConfig,
    pub summary: Vec<SchemeSummary>,
    pub records: Vec<PairRecord>,
}

impl CorrelationReport {
    pub fn summary_for(&self, kind: SchemeKind) -> Option<&SchemeSummary> {
        self.summary.iter().find(|s| s.scheme == kind)
    }

    /// `pair_id, semantic, syn_<scheme>...` with distances as decimals.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["pair_id".to_string(), "semantic".to_string()];
        header.extend(self.config.schemes.iter().map(|s| format!("syn_{}", s.kind.name())));
        out.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let mut row = vec![r.pair_id.to_string(), rational::to_f64(&r.semantic).to_string()];
            row.extend(r.syntactic.iter().map(|d| rational::to_f64(d).to_string()));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid("csv", format!("{other:?}")),
    }
}

fn random_labeling(space: InputSpace, rng: &mut impl Rng) -> Labeling {
    let outputs = space.inputs().map(|_| rng.random_range(0..2)).collect();
    Labeling::new(space, outputs).expect("one output per input")
}

/// The labeling pair for `pair_id`; depends only on the seed and the id.
pub fn sample_pair(space: InputSpace, ensemble: PairEnsemble, master: u64, pair_id: usize) -> (Labeling, Labeling) {
    let mut rng = seed::stream(master, pair_id as u64);
    let f = random_labeling(space, &mut rng);
    let g = match ensemble {
        PairEnsemble::Identical => f.clone(),
        PairEnsemble::Independent => random_labeling(space, &mut rng),
        PairEnsemble::Perturbed => {
            let size = space.size();
            let k = rng.random_range(0..=size / 2);
            let mut out = f.outputs().to_vec();
            for x in index::sample(&mut rng, size, k) {
                out[x] ^= 1;
            }
            Labeling::new(space, out).expect("same space")
        }
    };
    (f, g)
}

fn build(lab: &Labeling, d: &Distribution, builder: Builder) -> Result<EntropyLabeledTree> {
    let t = match builder {
        Builder::Optimal => optimal_tree_with(lab, d, TieBreak::MaxGain)?.tree,
        Builder::Greedy => greedy_tree(lab, d),
    };
    entropy_labels(&t, lab, d)
}

/// Draws `pairs` labeling pairs and correlates semantic with syntactic
/// distance under each scheme. Pairs run in parallel on the current rayon
/// pool; records are kept in pair order.
pub fn correlation_experiment(config: &CorrelationConfig) -> Result<CorrelationReport> {
    let space = InputSpace::new(config.n)?;
    if config.n > MAX_CORRELATION_BITS {
        return Err(Error::Capacity { what: "correlation_experiment", max: MAX_CORRELATION_BITS, got: config.n });
    }
    if config.schemes.is_empty() {
        return Err(Error::invalid("correlation config", "no edit cost scheme"));
    }
    let d = match &config.distribution {
        Some(d) => {
            d.ensure_over(&space)?;
            d.clone()
        }
        None => Distribution::uniform(space),
    };
    let records = (0..config.pairs)
        .into_par_iter()
        .map(|pair_id| {
            let (f, g) = sample_pair(space, config.ensemble, config.seed, pair_id);
            let tf = build(&f, &d, config.builder)?.to_ordered();
            let tg = build(&g, &d, config.builder)?.to_ordered();
            Ok(PairRecord {
                pair_id,
                semantic: semantic_distance(&f, &g, &d)?,
                syntactic: config.schemes.iter().map(|c| tree_edit_distance(&tf, &tg, c)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let semantic: Vec<f64> = records.iter().map(|r| rational::to_f64(&r.semantic)).collect();
    let summary = config
        .schemes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let syn: Vec<f64> = records.iter().map(|r| rational::to_f64(&r.syntactic[i])).collect();
            SchemeSummary {
                scheme: c.kind,
                spearman: stats::spearman(&semantic, &syn),
                pearson: stats::pearson(&semantic, &syn),
            }
        })
        .collect();
    Ok(CorrelationReport { config: config.clone(), summary, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn s2() -> InputSpace {
        InputSpace::new(2).unwrap()
    }

    #[test]
    fn semantic_distance_examples() {
        let u = Distribution::uniform(s2());
        let f = Labeling::new(s2(), vec![0, 1, 1, 0]).unwrap();
        let not_f = Labeling::new(s2(), vec![1, 0, 0, 1]).unwrap();
        let one_off = Labeling::new(s2(), vec![0, 1, 1, 1]).unwrap();
        assert_eq!(semantic_distance(&f, &f, &u).unwrap(), ratio(0, 1));
        assert_eq!(semantic_distance(&f, &not_f, &u).unwrap(), ratio(1, 1));
        assert_eq!(semantic_distance(&f, &one_off, &u).unwrap(), ratio(1, 4));
        let three = Labeling::new(s2(), vec![0, 1, 2, 0]).unwrap();
        assert!(semantic_distance(&f, &three, &u).is_err());
    }

    #[test]
    fn entropy_label_examples() {
        let u = Distribution::uniform(s2());
        let bit0 = Labeling::from_fn(s2(), |x| s2().bit(x, 0) as Label);
        let t = DecisionTree::node(0, DecisionTree::Leaf(0), DecisionTree::Leaf(1));
        assert_eq!(entropy_labels(&t, &bit0, &u).unwrap().gain(), 1.0);

        let xor = Labeling::from_fn(s2(), |x| (s2().bit(x, 0) ^ s2().bit(x, 1)) as Label);
        let t = optimal_tree_with(&xor, &u, TieBreak::MaxGain).unwrap().tree;
        let labeled = entropy_labels(&t, &xor, &u).unwrap();
        assert_eq!(labeled.gain(), 0.0);
        let EntropyLabeledTree::Node { zero, one, .. } = labeled else { panic!("xor needs a split") };
        assert_eq!((zero.gain(), one.gain()), (1.0, 1.0));

        let constant = Labeling::from_fn(s2(), |_| 0);
        let leaf = entropy_labels(&DecisionTree::Leaf(0), &constant, &u).unwrap();
        assert_eq!(leaf, EntropyLabeledTree::Leaf { leaf: 0 });

        assert!(entropy_labels(&DecisionTree::Leaf(1), &constant, &u).is_err());
    }

    #[test]
    fn identical_pairs_have_undefined_correlation() {
        let mut c = CorrelationConfig::new(3, 10, 7);
        c.ensemble = PairEnsemble::Identical;
        let r = correlation_experiment(&c).unwrap();
        assert!(r.records.iter().all(|p| p.semantic.is_zero() && p.syntactic.iter().all(Zero::is_zero)));
        assert!(r.summary.iter().all(|s| s.spearman.is_none() && s.pearson.is_none()));
        let json = serde_json::to_string(&r.summary).unwrap();
        assert!(json.contains(r#""spearman":null"#));
    }

    #[test]
    fn reports_are_deterministic() {
        let c = CorrelationConfig::new(3, 10, 42);
        let a = serde_json::to_string(&correlation_experiment(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&correlation_experiment(&c).unwrap()).unwrap();
        assert_eq!(a, b);
        let r = correlation_experiment(&c).unwrap();
        assert_eq!(r.records.len(), 10);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("pair_id,semantic,syn_entropy,syn_depth\n"));
        assert_eq!(text.lines().count(), 11);
    }

    #[test]
    fn capacity_is_checked() {
        assert!(matches!(correlation_experiment(&CorrelationConfig::new(7, 1, 0)), Err(Error::Capacity { .. })));
    }
}
