//! Input spaces, distributions over them, partitions, and the distinction
//! (dit) sets and entropies of partitions.
//!
//! Distributions keep every mass as a numerator over one shared denominator,
//! so cell masses are integer sums and the logical entropy stays exact.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest input length we enumerate exhaustively.
pub const MAX_BITS: u32 = 16;

/// All bit strings of length `n`, enumerated in numeric order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputSpace {
    n: u32,
}

impl InputSpace {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("input space", "bit length must be at least 1"));
        }
        if n > MAX_BITS {
            return Err(Error::Capacity { what: "input space", max: MAX_BITS, got: n });
        }
        Ok(InputSpace { n })
    }

    pub fn bits(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        1usize << self.n
    }

    pub fn inputs(&self) -> std::ops::Range<u32> {
        0..(1u32 << self.n)
    }

    /// Bit `i` (0 = most significant) of input `x`.
    pub fn bit(&self, x: u32, i: u32) -> bool {
        i < self.n && (x >> (self.n - 1 - i)) & 1 == 1
    }

    pub fn bit_string(&self, x: u32) -> BitString {
        BitString::from_index(x as u64, self.n as usize)
    }

    /// Number of unordered pairs of distinct inputs.
    pub fn pair_count(&self) -> u64 {
        let m = self.size() as u64;
        m * (m - 1) / 2
    }

    pub fn ensure_same(&self, other: &InputSpace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SpaceMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

/// An exact probability distribution over an [`InputSpace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    space: InputSpace,
    weights: Vec<BigUint>,
    denom: BigUint,
}

impl Distribution {
    pub fn uniform(space: InputSpace) -> Self {
        Distribution { space, weights: vec![BigUint::one(); space.size()], denom: BigUint::from(space.size()) }
    }

    /// Normalizes nonnegative integer weights; at least one must be positive.
    pub fn from_weights(space: InputSpace, weights: &[u64]) -> Result<Self> {
        if weights.len() != space.size() {
            return Err(Error::invalid(
                "distribution",
                format!("expected {} weights, got {}", space.size(), weights.len()),
            ));
        }
        let weights: Vec<BigUint> = weights.iter().map(|&w| BigUint::from(w)).collect();
        let denom: BigUint = weights.iter().sum();
        if denom.is_zero() {
            return Err(Error::invalid("distribution", "total weight is zero"));
        }
        Ok(Distribution { space, weights, denom }.reduced())
    }

    /// Masses must be nonnegative and sum to exactly one.
    pub fn from_masses(space: InputSpace, masses: &[Rational]) -> Result<Self> {
        if masses.len() != space.size() {
            return Err(Error::invalid(
                "distribution",
                format!("expected {} masses, got {}", space.size(), masses.len()),
            ));
        }
        let mut denom = BigUint::one();
        for (x, m) in masses.iter().enumerate() {
            if m < &Rational::zero() {
                return Err(Error::invalid("distribution", format!("negative mass at input {x}")));
            }
            denom = denom.lcm(&m.denom().magnitude().clone());
        }
        let weights: Vec<BigUint> =
            masses.iter().map(|m| m.numer().magnitude() * (&denom / m.denom().magnitude())).collect();
        let total: BigUint = weights.iter().sum();
        if total != denom {
            return Err(Error::invalid(
                "distribution",
                format!("masses sum to {}, not 1", rational::format(&rational::from_parts(&total, &denom))),
            ));
        }
        Ok(Distribution { space, weights, denom }.reduced())
    }

    fn reduced(mut self) -> Self {
        let g = self.weights.iter().fold(self.denom.clone(), |g, w| g.gcd(w));
        if !g.is_one() {
            for w in &mut self.weights {
                *w /= &g;
            }
            self.denom /= &g;
        }
        self
    }

    pub fn space(&self) -> InputSpace {
        self.space
    }

    pub fn mass(&self, x: u32) -> Rational {
        rational::from_parts(&self.weights[x as usize], &self.denom)
    }

    /// Numerator of `mass(x)` over [`Distribution::denom`].
    pub fn weight(&self, x: u32) -> &BigUint {
        &self.weights[x as usize]
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    /// Floating-point masses, for Shannon quantities.
    pub fn masses_f64(&self) -> Vec<f64> {
        let d = self.denom.to_f64().unwrap_or(f64::INFINITY);
        self.weights.iter().map(|w| w.to_f64().unwrap_or(0.0) / d).collect()
    }

    pub fn ensure_over(&self, space: &InputSpace) -> Result<()> {
        self.space.ensure_same(space)
    }

    pub fn to_json(&self) -> DistributionJson {
        DistributionJson {
            n: self.space.bits(),
            mass: self.space.inputs().map(|x| rational::format(&self.mass(x))).collect(),
        }
    }

    pub fn from_json(json: &DistributionJson) -> Result<Self> {
        let space = InputSpace::new(json.n)?;
        let masses = json.mass.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>()?;
        Distribution::from_masses(space, &masses)
    }
}

/// `{"n": int, "mass": ["p/q", ...]}` in numeric input order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionJson {
    pub n: u32,
    pub mass: Vec<String>,
}

/// A partition of an input space; cell ids are dense and numbered by first
/// occurrence in numeric input order, so equal partitions are equal values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    space: InputSpace,
    cell: Vec<u32>,
    cells: u32,
}

impl Partition {
    /// Groups inputs by equal key.
    pub fn from_keys<K: Eq + Hash>(space: InputSpace, keys: impl IntoIterator<Item = K>) -> Result<Self> {
        let mut ids: HashMap<K, u32> = HashMap::new();
        let mut cell = Vec::with_capacity(space.size());
        for key in keys {
            let next = ids.len() as u32;
            cell.push(*ids.entry(key).or_insert(next));
        }
        if cell.len() != space.size() {
            return Err(Error::invalid("partition", format!("expected {} inputs, got {}", space.size(), cell.len())));
        }
        Ok(Partition { space, cells: ids.len() as u32, cell })
    }

    /// Validates that the ids are exactly `0..k` with every id used.
    pub fn from_cells(space: InputSpace, cells: &[u32]) -> Result<Self> {
        let k = cells.iter().copied().max().map_or(0, |m| m + 1);
        let mut used = vec![false; k as usize];
        for &c in cells {
            used[c as usize] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(Error::invalid("partition", format!("cell id {missing} is unused")));
        }
        Partition::from_keys(space, cells.iter().copied())
    }

    pub fn indiscrete(space: InputSpace) -> Self {
        Partition { space, cell: vec![0; space.size()], cells: 1 }
    }

    pub fn discrete(space: InputSpace) -> Self {
        Partition { space, cell: space.inputs().collect(), cells: space.size() as u32 }
    }

    pub fn space(&self) -> InputSpace {
        self.space
    }

    pub fn cell_of(&self, x: u32) -> u32 {
        self.cell[x as usize]
    }

    pub fn cell_count(&self) -> u32 {
        self.cells
    }

    pub fn cell_ids(&self) -> &[u32] {
        &self.cell
    }

    /// Members of each cell, by cell id.
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let mut blocks = vec![Vec::new(); self.cells as usize];
        for x in self.space.inputs() {
            blocks[self.cell_of(x) as usize].push(x);
        }
        blocks
    }

    /// Numerators (over `d.denom()`) of each cell's mass.
    pub fn cell_weights(&self, d: &Distribution) -> Result<Vec<BigUint>> {
        d.ensure_over(&self.space)?;
        let mut w = vec![BigUint::zero(); self.cells as usize];
        for x in self.space.inputs() {
            w[self.cell_of(x) as usize] += d.weight(x);
        }
        Ok(w)
    }

    /// Number of unordered pairs lying in different cells.
    pub fn dit_count(&self) -> u64 {
        let mut sizes = vec![0u64; self.cells as usize];
        for &c in &self.cell {
            sizes[c as usize] += 1;
        }
        self.space.pair_count() - sizes.iter().map(|s| s * s.saturating_sub(1) / 2).sum::<u64>()
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson { n: self.space.bits(), cell: self.cell.clone() }
    }

    pub fn from_json(json: &PartitionJson) -> Result<Self> {
        Partition::from_cells(InputSpace::new(json.n)?, &json.cell)
    }
}

/// `{"n": int, "cell": [int, ...]}` in numeric input order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionJson {
    pub n: u32,
    pub cell: Vec<u32>,
}

/// Unordered pairs `(x, y)`, stored with `x < y`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DitSet {
    pairs: BTreeSet<(u32, u32)>,
}

impl DitSet {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        let key = if x < y { (x, y) } else { (y, x) };
        self.pairs.contains(&key)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &DitSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.pairs.iter().copied()
    }
}

impl FromIterator<(u32, u32)> for DitSet {
    fn from_iter<I: IntoIterator<Item = (u32, u32)>>(iter: I) -> Self {
        DitSet { pairs: iter.into_iter().filter(|(x, y)| x != y).map(|(x, y)| (x.min(y), x.max(y))).collect() }
    }
}

pub fn dit_set(p: &Partition) -> DitSet {
    let size = p.space.size() as u32;
    (0..size).flat_map(|x| (x + 1..size).map(move |y| (x, y))).filter(|&(x, y)| p.cell_of(x) != p.cell_of(y)).collect()
}

/// `1 - Σ_cells mass(cell)²`.
pub fn logical_entropy(p: &Partition, d: &Distribution) -> Result<Rational> {
    let cells = p.cell_weights(d)?;
    let sum_sq: BigUint = cells.iter().map(|w| w * w).sum();
    let denom_sq = d.denom() * d.denom();
    Ok(rational::from_parts(&(&denom_sq - &sum_sq), &denom_sq))
}

/// `-Σ_cells m log2 m` in bits, over cells of positive mass.
pub fn shannon_entropy(p: &Partition, d: &Distribution) -> Result<f64> {
    let cells = p.cell_weights(d)?;
    let denom = d.denom().to_f64().unwrap_or(f64::INFINITY);
    Ok(shannon_of_masses(cells.iter().map(|w| w.to_f64().unwrap_or(0.0) / denom)))
}

/// Shannon entropy (bits) of a list of masses, ignoring zeros.
pub fn shannon_of_masses(masses: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = masses.into_iter().filter(|&m| m > 0.0).map(|m| -m * m.log2()).sum();
    // -0.0 for a single full cell
    h.max(0.0)
}

/// True iff every cell of `fine` lies inside one cell of `coarse`.
pub fn refines(fine: &Partition, coarse: &Partition) -> Result<bool> {
    fine.space.ensure_same(&coarse.space)?;
    let mut image: Vec<Option<u32>> = vec![None; fine.cells as usize];
    for x in fine.space.inputs() {
        let slot = &mut image[fine.cell_of(x) as usize];
        match *slot {
            None => *slot = Some(coarse.cell_of(x)),
            Some(c) if c != coarse.cell_of(x) => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn space(n: u32) -> InputSpace {
        InputSpace::new(n).unwrap()
    }

    fn halves() -> Partition {
        Partition::from_cells(space(2), &[0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn dit_sets_of_extreme_partitions() {
        assert!(dit_set(&Partition::indiscrete(space(2))).is_empty());
        assert_eq!(dit_set(&Partition::discrete(space(2))).len(), 6);
    }

    #[test]
    fn dit_set_of_halves_is_cross_pairs() {
        let expected: DitSet = [(0, 2), (0, 3), (1, 2), (1, 3)].into_iter().collect();
        assert_eq!(dit_set(&halves()), expected);
        assert_eq!(halves().dit_count(), 4);
    }

    #[test]
    fn logical_entropy_examples() {
        let u = Distribution::uniform(space(2));
        assert_eq!(logical_entropy(&halves(), &u).unwrap(), ratio(1, 2));
        assert_eq!(logical_entropy(&Partition::indiscrete(space(2)), &u).unwrap(), ratio(0, 1));

        let d = Distribution::from_masses(space(2), &[ratio(1, 2), ratio(1, 4), ratio(1, 4), ratio(0, 1)]).unwrap();
        let p = Partition::discrete(space(2));
        // pair-sum oracle over ordered distinguishing pairs
        let mut oracle = ratio(0, 1);
        for x in 0..4 {
            for y in 0..4 {
                if p.cell_of(x) != p.cell_of(y) {
                    oracle += d.mass(x) * d.mass(y);
                }
            }
        }
        assert_eq!(oracle, ratio(5, 8));
        assert_eq!(logical_entropy(&p, &d).unwrap(), oracle);
    }

    #[test]
    fn shannon_examples() {
        let u = Distribution::uniform(space(2));
        assert_eq!(shannon_entropy(&halves(), &u).unwrap(), 1.0);
        assert_eq!(shannon_entropy(&Partition::indiscrete(space(2)), &u).unwrap(), 0.0);
        let p = Partition::from_cells(space(2), &[0, 0, 1, 2]).unwrap();
        assert!((shannon_entropy(&p, &u).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn refinement_examples() {
        let s = space(2);
        assert!(refines(&Partition::discrete(s), &Partition::indiscrete(s)).unwrap());
        assert!(refines(&halves(), &halves()).unwrap());
        let other = Partition::from_cells(s, &[0, 1, 0, 1]).unwrap();
        assert!(!refines(&halves(), &other).unwrap());
        assert!(refines(&halves(), &Partition::indiscrete(space(3))).is_err());
    }

    #[test]
    fn cells_are_canonicalized() {
        let a = Partition::from_cells(space(2), &[1, 1, 0, 0]).unwrap();
        assert_eq!(a, halves());
        assert!(Partition::from_cells(space(2), &[0, 0, 2, 2]).is_err());
        assert!(Partition::from_cells(space(2), &[0, 0, 1]).is_err());
    }

    #[test]
    fn distribution_validation() {
        let s = space(1);
        assert!(Distribution::from_masses(s, &[ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Distribution::from_masses(s, &[ratio(3, 2), ratio(-1, 2)]).is_err());
        assert!(Distribution::from_weights(s, &[0, 0]).is_err());
        let d = Distribution::from_weights(s, &[2, 6]).unwrap();
        assert_eq!(d.mass(1), ratio(3, 4));
        assert_eq!(d.denom(), &BigUint::from(4u32));
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let d = Distribution::uniform(space(3));
        assert!(matches!(logical_entropy(&halves(), &d), Err(Error::SpaceMismatch { .. })));
        assert!(shannon_entropy(&halves(), &d).is_err());
    }

    #[test]
    fn json_forms_roundtrip() {
        let d = Distribution::from_weights(space(2), &[1, 1, 2, 0]).unwrap();
        let json = serde_json::to_string(&d.to_json()).unwrap();
        assert_eq!(json, r#"{"n":2,"mass":["1/4","1/4","1/2","0/1"]}"#);
        let back: DistributionJson = serde_json::from_str(&json).unwrap();
        assert_eq!(Distribution::from_json(&back).unwrap(), d);
        let p = halves();
        assert_eq!(Partition::from_json(&p.to_json()).unwrap(), p);
    }
}
