//! Patterns as programs that keep the relevant distinctions of another
//! program while making fewer distinctions overall.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::codd::{eval_codd, CoddExpr, Fuel};
use crate::dtree::{optimal_tree, DecisionTree, Label, Labeling, LabelingJson};
use crate::error::{Error, Result};
use crate::partitions::{dit_set, Distribution, DitSet, InputSpace};
use crate::rational::{self, Rational};

/// Extensional view of a program at a fixed input length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramView {
    labeling: Labeling,
}

impl ProgramView {
    pub fn new(labeling: Labeling) -> Self {
        ProgramView { labeling }
    }

    pub fn from_tree(t: &DecisionTree, space: InputSpace) -> Self {
        ProgramView::new(Labeling::from_tree(t, space))
    }

    /// Applies `e` to every input leaf; equal normal forms are equal outputs.
    pub fn from_codd(e: &CoddExpr, space: InputSpace, fuel: Fuel) -> Result<Self> {
        let mut ids: HashMap<CoddExpr, Label> = HashMap::new();
        let mut outputs = Vec::with_capacity(space.size());
        for x in space.inputs() {
            let r = eval_codd(e, &[CoddExpr::leaf(space.bit_string(x))], fuel)?;
            let nf = r.normal_form().ok_or_else(|| {
                Error::invalid("program", format!("evaluation on input {} ran out of fuel", space.bit_string(x)))
            })?;
            let next = ids.len() as Label;
            outputs.push(*ids.entry(nf.clone()).or_insert(next));
        }
        Ok(ProgramView::new(Labeling::new(space, outputs)?))
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn space(&self) -> InputSpace {
        self.labeling.space()
    }

    fn distinguishes(&self, x: u32, y: u32) -> bool {
        self.labeling.output(x) != self.labeling.output(y)
    }

    pub fn dit_count(&self) -> u64 {
        self.labeling.partition().dit_count()
    }
}

/// Pairs of inputs the program maps to different outputs.
pub fn program_dits(f: &ProgramView) -> DitSet {
    dit_set(&f.labeling.partition())
}

/// Nonnegative weight per unordered input pair; weight > 0 marks the
/// distinction as relevant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevanceFn {
    space: InputSpace,
    default: Rational,
    overrides: HashMap<(u32, u32), Rational>,
}

impl RelevanceFn {
    pub fn uniform(space: InputSpace, weight: Rational) -> Result<Self> {
        RelevanceFn::new(space, weight, std::iter::empty())
    }

    pub fn none(space: InputSpace) -> Self {
        RelevanceFn { space, default: Rational::zero(), overrides: HashMap::new() }
    }

    pub fn new(
        space: InputSpace,
        default: Rational,
        overrides: impl IntoIterator<Item = (u32, u32, Rational)>,
    ) -> Result<Self> {
        if default < Rational::zero() {
            return Err(Error::invalid("relevance", "negative default weight"));
        }
        let size = space.size() as u32;
        let mut map = HashMap::new();
        for (x, y, w) in overrides {
            if x == y || x >= size || y >= size {
                return Err(Error::invalid("relevance", format!("bad pair ({x}, {y})")));
            }
            if w < Rational::zero() {
                return Err(Error::invalid("relevance", format!("negative weight on ({x}, {y})")));
            }
            map.insert((x.min(y), x.max(y)), w);
        }
        Ok(RelevanceFn { space, default, overrides: map })
    }

    /// Weight `1` on exactly the pairs accepted by `relevant`.
    pub fn from_predicate(space: InputSpace, relevant: impl Fn(u32, u32) -> bool) -> Self {
        let size = space.size() as u32;
        let overrides = (0..size)
            .flat_map(|x| (x + 1..size).map(move |y| (x, y)))
            .filter(|&(x, y)| relevant(x, y))
            .map(|p| (p, Rational::one()))
            .collect();
        RelevanceFn { space, default: Rational::zero(), overrides }
    }

    pub fn space(&self) -> InputSpace {
        self.space
    }

    pub fn weight(&self, x: u32, y: u32) -> Rational {
        self.overrides.get(&(x.min(y), x.max(y))).cloned().unwrap_or_else(|| self.default.clone())
    }

    pub fn is_relevant(&self, x: u32, y: u32) -> bool {
        x != y && self.weight(x, y) > Rational::zero()
    }

    /// Sum of the weights of all unordered pairs.
    pub fn total_weight(&self) -> Rational {
        let untouched = self.space.pair_count() - self.overrides.len() as u64;
        let explicit: Rational = self.overrides.values().cloned().sum();
        &self.default * Rational::from_integer(untouched.into()) + explicit
    }

    pub fn from_json(json: &RelevanceJson) -> Result<Self> {
        let space = InputSpace::new(json.n)?;
        let overrides =
            json.overrides.iter().map(|(x, y, w)| Ok((*x, *y, rational::parse(w)?))).collect::<Result<Vec<_>>>()?;
        RelevanceFn::new(space, rational::parse(&json.default_weight)?, overrides)
    }

    pub fn to_json(&self) -> RelevanceJson {
        let mut overrides: Vec<_> = self.overrides.iter().map(|(&(x, y), w)| (x, y, rational::format(w))).collect();
        overrides.sort();
        RelevanceJson { n: self.space.bits(), default_weight: rational::format(&self.default), overrides }
    }
}

/// `{"n": int, "default_weight": "p/q", "overrides": [[x, y, "p/q"], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelevanceJson {
    pub n: u32,
    pub default_weight: String,
    #[serde(default)]
    pub overrides: Vec<(u32, u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternVerdict {
    pub is_pattern: bool,
    pub dits_f: u64,
    pub dits_p: u64,
    /// Relevant distinctions of `F` that `P` does not make.
    pub missed_relevant: u64,
    /// Slack `K` for the approximate predicate; absent for the exact one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<u64>,
    /// Absent when `F` is constant or `ρ` has zero total weight.
    #[serde(with = "rational::serde_str_opt")]
    pub intensity: Option<Rational>,
    pub runtime_refines: Option<bool>,
    #[serde(with = "rational::serde_str_opt")]
    pub runtime_factor: Option<Rational>,
}

struct Comparison {
    dits_f: u64,
    dits_p: u64,
    missed_relevant: u64,
    missed_weight: Rational,
}

fn compare(p: &ProgramView, f: &ProgramView, rho: &RelevanceFn) -> Result<Comparison> {
    p.space().ensure_same(&f.space())?;
    rho.space.ensure_same(&f.space())?;
    let size = f.space().size() as u32;
    let mut missed_relevant = 0;
    let mut missed_weight = Rational::zero();
    for x in 0..size {
        for y in x + 1..size {
            if f.distinguishes(x, y) && !p.distinguishes(x, y) {
                let w = rho.weight(x, y);
                if w > Rational::zero() {
                    missed_relevant += 1;
                    missed_weight += w;
                }
            }
        }
    }
    Ok(Comparison { dits_f: f.dit_count(), dits_p: p.dit_count(), missed_relevant, missed_weight })
}

fn intensity_of(c: &Comparison, rho: &RelevanceFn) -> Option<Rational> {
    let total = rho.total_weight();
    if c.dits_f == 0 || total.is_zero() {
        return None;
    }
    let fewer = Rational::new((c.dits_f as i64 - c.dits_p as i64).into(), (c.dits_f as i64).into());
    let fewer = fewer.max(Rational::zero());
    Some(fewer * (&total - &c.missed_weight) / total)
}

fn verdict(c: Comparison, rho: &RelevanceFn, is_pattern: bool, slack: Option<u64>) -> PatternVerdict {
    PatternVerdict {
        is_pattern,
        intensity: intensity_of(&c, rho),
        dits_f: c.dits_f,
        dits_p: c.dits_p,
        missed_relevant: c.missed_relevant,
        slack,
        runtime_refines: None,
        runtime_factor: None,
    }
}

/// `P` makes every relevant distinction of `F` and strictly fewer overall.
pub fn is_pattern(p: &ProgramView, f: &ProgramView, rho: &RelevanceFn) -> Result<PatternVerdict> {
    let c = compare(p, f, rho)?;
    let holds = c.missed_relevant == 0 && c.dits_p < c.dits_f;
    Ok(verdict(c, rho, holds, None))
}

/// `P` makes at least `slack` fewer distinctions than `F` and misses fewer
/// than `slack` of its relevant ones.
pub fn is_approx_pattern(p: &ProgramView, f: &ProgramView, rho: &RelevanceFn, slack: u64) -> Result<PatternVerdict> {
    if slack < 1 {
        return Err(Error::invalid("slack", "must be at least 1"));
    }
    let c = compare(p, f, rho)?;
    let holds = c.dits_f >= c.dits_p + slack && c.missed_relevant < slack;
    Ok(verdict(c, rho, holds, Some(slack)))
}

/// `(|F| - |P|)/|F| · (w(ρ) - w(missed))/w(ρ)`, floored at zero.
pub fn pattern_intensity(p: &ProgramView, f: &ProgramView, rho: &RelevanceFn) -> Result<Rational> {
    let c = compare(p, f, rho)?;
    intensity_of(&c, rho).ok_or(Error::Undefined("pattern intensity: F is constant or relevance has zero weight"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuntimeComparison {
    pub refines: bool,
    /// `depth(F) / max(depth(P), 2^-n)`.
    pub factor: Rational,
    pub depth_p: Rational,
    pub depth_f: Rational,
}

/// Compares the minimal expected depths of the optimal trees for `P` and `F`.
pub fn runtime_refines(p: &ProgramView, f: &ProgramView, d: &Distribution) -> Result<RuntimeComparison> {
    p.space().ensure_same(&f.space())?;
    let depth_p = optimal_tree(&p.labeling, d)?.average_depth;
    let depth_f = optimal_tree(&f.labeling, d)?.average_depth;
    let floor = Rational::new(1.into(), (1u64 << p.space().bits()).into());
    let factor = &depth_f / depth_p.clone().max(floor);
    Ok(RuntimeComparison { refines: depth_p < depth_f, factor, depth_p, depth_f })
}

/// Exact or approximate verdict with the runtime fields filled in when a
/// distribution is given.
pub fn check(
    p: &ProgramView,
    f: &ProgramView,
    rho: &RelevanceFn,
    slack: Option<u64>,
    d: Option<&Distribution>,
) -> Result<PatternVerdict> {
    let mut v = match slack {
        None => is_pattern(p, f, rho)?,
        Some(k) => is_approx_pattern(p, f, rho, k)?,
    };
    if let Some(d) = d {
        let r = runtime_refines(p, f, d)?;
        v.runtime_refines = Some(r.refines);
        v.runtime_factor = Some(r.factor);
    }
    Ok(v)
}

/// A program file: an explicit table or a decision tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProgramJson {
    Table(LabelingJson),
    Tree { n: u32, tree: DecisionTree },
}

impl ProgramJson {
    pub fn to_view(&self) -> Result<ProgramView> {
        match self {
            ProgramJson::Table(t) => Ok(ProgramView::new(Labeling::from_json(t)?)),
            ProgramJson::Tree { n, tree } => {
                tree.validate(*n)?;
                Ok(ProgramView::from_tree(tree, InputSpace::new(*n)?))
            }
        }
    }
}
