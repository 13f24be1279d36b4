//! Minimum expected-depth trees by dynamic programming over subcubes.
//!
//! A subcube is indexed in base 3, one digit per bit position: 0 free,
//! 1 pinned to 0, 2 pinned to 1. Pinning a free position only increases the
//! index, so a single descending sweep sees children before parents.

use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{split_gain, DecisionTree, Label, Labeling, Subcube};
use crate::error::{Error, Result};
use crate::partitions::Distribution;
use crate::rational::{self, Rational};

/// The DP table has `3^n` entries.
pub const MAX_OPTIMAL_BITS: u32 = 12;

/// Gains closer than this are treated as tied.
const GAIN_TIE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Lowest bit index among minimal-cost splits.
    #[default]
    LowestBit,
    /// Largest information gain among minimal-cost splits, then lowest bit.
    MaxGain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalTree {
    pub tree: DecisionTree,
    pub average_depth: Rational,
}

pub fn optimal_tree(lab: &Labeling, d: &Distribution) -> Result<OptimalTree> {
    optimal_tree_with(lab, d, TieBreak::LowestBit)
}

pub fn optimal_tree_with(lab: &Labeling, d: &Distribution, tie: TieBreak) -> Result<OptimalTree> {
    let space = lab.space();
    d.ensure_over(&space)?;
    if space.bits() > MAX_OPTIMAL_BITS {
        return Err(Error::Capacity { what: "optimal_tree", max: MAX_OPTIMAL_BITS, got: space.bits() });
    }
    // weights below 2^64 keep every cost below n * 2^64
    let (tree, cost) = if d.denom().bits() <= 64 {
        let w: Vec<u128> = d.weights().iter().map(|w| w.to_u128().expect("fits")).collect();
        let (tree, cost) = Solver::new(lab, d, w, tie).run();
        (tree, BigUint::from(cost))
    } else {
        Solver::new(lab, d, d.weights().to_vec(), tie).run()
    };
    Ok(OptimalTree { tree, average_depth: rational::from_parts(&cost, d.denom()) })
}

const LEAF: u8 = u8::MAX;

struct Solver<'a, C> {
    lab: &'a Labeling,
    masses: Vec<f64>,
    pow3: Vec<usize>,
    weights: Vec<C>,
    tie: TieBreak,
}

impl<'a, C> Solver<'a, C>
where
    C: Clone + Ord + Zero + for<'x> Add<&'x C, Output = C>,
{
    fn new(lab: &'a Labeling, d: &Distribution, weights: Vec<C>, tie: TieBreak) -> Self {
        let n = lab.space().bits() as usize;
        let pow3 = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
        Solver { lab, masses: d.masses_f64(), pow3, weights, tie }
    }

    fn n(&self) -> u32 {
        self.lab.space().bits()
    }

    fn digit(&self, idx: usize, bit: u32) -> usize {
        idx / self.pow3[bit as usize] % 3
    }

    fn subcube(&self, idx: usize) -> Subcube {
        (0..self.n()).fold(Subcube::full(self.lab.space()), |c, b| match self.digit(idx, b) {
            1 => c.restrict(b, false),
            2 => c.restrict(b, true),
            _ => c,
        })
    }

    fn run(self) -> (DecisionTree, C) {
        let n = self.n();
        let states = self.pow3[n as usize];
        let mut mass: Vec<C> = vec![C::zero(); states];
        let mut pure: Vec<Option<Label>> = vec![None; states];
        let mut cost: Vec<C> = vec![C::zero(); states];
        let mut choice: Vec<u8> = vec![LEAF; states];

        for idx in (0..states).rev() {
            let free: Vec<u32> = (0..n).filter(|&b| self.digit(idx, b) == 0).collect();
            let Some(&first) = free.first() else {
                let x = (0..n).fold(0u32, |x, b| (x << 1) | (self.digit(idx, b) == 2) as u32);
                mass[idx] = self.weights[x as usize].clone();
                pure[idx] = Some(self.lab.output(x));
                continue;
            };
            let step = self.pow3[first as usize];
            mass[idx] = mass[idx + step].clone() + &mass[idx + 2 * step];
            pure[idx] = match (pure[idx + step], pure[idx + 2 * step]) {
                (Some(a), Some(b)) if a == b => Some(a),
                _ => None,
            };
            if pure[idx].is_some() {
                continue;
            }

            let split_cost = |b: u32| {
                let step = self.pow3[b as usize];
                cost[idx + step].clone() + &cost[idx + 2 * step]
            };
            let best = free.iter().map(|&b| split_cost(b)).min().expect("impure subcube has a free bit");
            let tied: Vec<u32> = free.iter().copied().filter(|&b| split_cost(b) == best).collect();
            let bit = match self.tie {
                TieBreak::LowestBit => tied[0],
                TieBreak::MaxGain if tied.len() == 1 => tied[0],
                TieBreak::MaxGain => {
                    let cube = self.subcube(idx);
                    let gains: Vec<f64> = tied.iter().map(|&b| split_gain(self.lab, &self.masses, cube, b)).collect();
                    let top = gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    tied[gains.iter().position(|&g| g >= top - GAIN_TIE).expect("nonempty")]
                }
            };
            cost[idx] = best + &mass[idx];
            choice[idx] = bit as u8;
        }

        let tree = self.build(0, &choice, &pure);
        (tree, cost[0].clone())
    }

    fn build(&self, idx: usize, choice: &[u8], pure: &[Option<Label>]) -> DecisionTree {
        match choice[idx] {
            LEAF => DecisionTree::Leaf(pure[idx].expect("leaf subcubes are pure")),
            bit => {
                let step = self.pow3[bit as usize];
                DecisionTree::node(
                    bit as u32,
                    self.build(idx + step, choice, pure),
                    self.build(idx + 2 * step, choice, pure),
                )
            }
        }
    }
}
