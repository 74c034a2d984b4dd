//! Random binning over source alphabets.
//!
//! Each source's alphabet `[2^source_bits]` is partitioned into
//! `2^(source_bits - cell_bits)` cells of `2^cell_bits` elements each, by
//! chopping a uniformly random permutation into consecutive blocks. A
//! partition set is *good for* a realization `y` (one cell index per source)
//! if the product of the selected cells contains a tuple the failure table
//! clears, and *good* if that holds for every realization. The diagonal
//! variant restricts the search to tuples formed by one shared within-cell
//! position, which is what the supernode and index-coding transforms need:
//! a single index then describes the whole tuple.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::code::FailureTable;
use crate::error::{Error, Result};
use crate::rat::Rational;
use crate::rng::{derive_seed, substream};
use crate::tuple::TupleSpace;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    #[default]
    Diagonal,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Full => f.write_str("full"),
            Mode::Diagonal => f.write_str("diagonal"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "diagonal" => Ok(Mode::Diagonal),
            other => Err(Error::Parameter(format!("unknown mode {other:?}"))),
        }
    }
}

/// One equal-cell partition per source. Within-cell element order is the
/// sampled order; it defines the position used by diagonal witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct PartitionSet {
    source_bits: u32,
    cell_bits: u32,
    cells: Vec<Vec<Vec<u64>>>,
    /// inverse[i][x] = (cell, position) of x in source i's partition
    inverse: Vec<Vec<(u32, u32)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PartitionRepr {
    source_bits: u32,
    cell_bits: u32,
    cells: Vec<Vec<Vec<u64>>>,
}

impl TryFrom<PartitionRepr> for PartitionSet {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        PartitionSet::from_cells(r.source_bits, r.cell_bits, r.cells)
    }
}

impl From<PartitionSet> for PartitionRepr {
    fn from(p: PartitionSet) -> Self {
        PartitionRepr {
            source_bits: p.source_bits,
            cell_bits: p.cell_bits,
            cells: p.cells,
        }
    }
}

impl PartitionSet {
    pub fn from_cells(source_bits: u32, cell_bits: u32, cells: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        if cell_bits > source_bits || source_bits > 32 {
            return Err(Error::Parameter(format!(
                "cell width {cell_bits} must lie in 0..={source_bits} (and source width <= 32)"
            )));
        }
        let num_cells = 1u64 << (source_bits - cell_bits);
        let cell_size = 1u64 << cell_bits;
        let alphabet = 1u64 << source_bits;
        let mut inverse = Vec::with_capacity(cells.len());
        for (i, partition) in cells.iter().enumerate() {
            if partition.len() as u64 != num_cells {
                return Err(Error::Parameter(format!(
                    "source {i}: {} cells, expected {num_cells}",
                    partition.len()
                )));
            }
            let mut inv = vec![(u32::MAX, u32::MAX); alphabet as usize];
            for (c, cell) in partition.iter().enumerate() {
                if cell.len() as u64 != cell_size {
                    return Err(Error::Parameter(format!(
                        "source {i} cell {c}: {} elements, expected {cell_size}",
                        cell.len()
                    )));
                }
                for (pos, &x) in cell.iter().enumerate() {
                    if x >= alphabet {
                        return Err(Error::Parameter(format!(
                            "source {i}: element {x} outside alphabet [{alphabet}]"
                        )));
                    }
                    if inv[x as usize].0 != u32::MAX {
                        return Err(Error::Parameter(format!(
                            "source {i}: element {x} appears twice"
                        )));
                    }
                    inv[x as usize] = (c as u32, pos as u32);
                }
            }
            inverse.push(inv);
        }
        Ok(PartitionSet {
            source_bits,
            cell_bits,
            cells,
            inverse,
        })
    }

    pub fn k(&self) -> usize {
        self.cells.len()
    }

    pub fn source_bits(&self) -> u32 {
        self.source_bits
    }

    pub fn cell_bits(&self) -> u32 {
        self.cell_bits
    }

    pub fn num_cells(&self) -> u64 {
        1u64 << (self.source_bits - self.cell_bits)
    }

    pub fn cell_size(&self) -> u64 {
        1u64 << self.cell_bits
    }

    pub fn cell(&self, source: usize, cell: u64) -> &[u64] {
        &self.cells[source][cell as usize]
    }

    /// (cell index, within-cell position) of element `x` for `source`.
    pub fn locate(&self, source: usize, x: u64) -> (u32, u32) {
        self.inverse[source][x as usize]
    }

    /// The cell index alone: the inverse map the decoders apply.
    pub fn cell_of(&self, source: usize, x: u64) -> u64 {
        self.inverse[source][x as usize].0 as u64
    }

    /// Re-check every structural invariant; empty means consistent.
    pub fn check_invariants(&self) -> Vec<String> {
        match PartitionSet::from_cells(self.source_bits, self.cell_bits, self.cells.clone()) {
            Ok(rebuilt) => {
                let mut out = Vec::new();
                if rebuilt.inverse != self.inverse {
                    out.push("inverse map inconsistent with cells".to_string());
                }
                out
            }
            Err(e) => vec![e.to_string()],
        }
    }

    fn check_against(&self, a: &FailureTable) -> Result<()> {
        if a.k != self.k() || a.source_bits != self.source_bits {
            return Err(Error::Parameter(format!(
                "failure table is {} sources x {} bits, partitions are {} x {}",
                a.k,
                a.source_bits,
                self.k(),
                self.source_bits
            )));
        }
        Ok(())
    }

    fn check_realization(&self, y: &[u64]) -> Result<()> {
        if y.len() != self.k() {
            return Err(Error::Parameter(format!(
                "realization has {} entries, expected {}",
                y.len(),
                self.k()
            )));
        }
        if let Some(bad) = y.iter().find(|&&c| c >= self.num_cells()) {
            return Err(Error::Parameter(format!(
                "cell index {bad} outside [{}]",
                self.num_cells()
            )));
        }
        Ok(())
    }

    /// Search the full product of the selected cells for a non-failing
    /// tuple; returns the lexicographically smallest one (by value).
    pub fn is_good_for(&self, y: &[u64], a: &FailureTable) -> Result<Option<Vec<u64>>> {
        self.check_against(a)?;
        self.check_realization(y)?;
        let sorted: Vec<Vec<u64>> = y
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut cell = self.cells[i][c as usize].clone();
                cell.sort_unstable();
                cell
            })
            .collect();
        let space = TupleSpace::new(&vec![self.cell_size(); self.k()])?;
        let mut pos = vec![0u64; self.k()];
        let mut tuple = vec![0u64; self.k()];
        loop {
            for i in 0..self.k() {
                tuple[i] = sorted[i][pos[i] as usize];
            }
            if a.get(&tuple) == 0 {
                return Ok(Some(tuple));
            }
            if !space.advance(&mut pos) {
                return Ok(None);
            }
        }
    }

    /// Smallest shared position j whose diagonal tuple the table clears.
    /// Positions are 0-based indices into the sampled cell order.
    pub fn find_diagonal_witness(
        &self,
        y: &[u64],
        a: &FailureTable,
    ) -> Result<Option<DiagonalWitness>> {
        self.check_against(a)?;
        self.check_realization(y)?;
        let mut tuple = vec![0u64; self.k()];
        for j in 0..self.cell_size() {
            for i in 0..self.k() {
                tuple[i] = self.cells[i][y[i] as usize][j as usize];
            }
            if a.get(&tuple) == 0 {
                return Ok(Some(DiagonalWitness { j, tuple }));
            }
        }
        Ok(None)
    }

    /// A witness in the requested mode, if one exists.
    pub fn witness_for(
        &self,
        y: &[u64],
        a: &FailureTable,
        mode: Mode,
    ) -> Result<Option<GoodnessWitness>> {
        match mode {
            Mode::Full => Ok(self.is_good_for(y, a)?.map(GoodnessWitness::Product)),
            Mode::Diagonal => Ok(self
                .find_diagonal_witness(y, a)?
                .map(GoodnessWitness::Diagonal)),
        }
    }

    /// Good for every realization? Short-circuits on the first failure.
    pub fn is_good(&self, a: &FailureTable, mode: Mode, budget: u64) -> Result<GoodnessVerdict> {
        self.check_against(a)?;
        let realizations = TupleSpace::new(&vec![self.num_cells(); self.k()])?;
        let per_check = match mode {
            Mode::Full => self
                .cell_size()
                .checked_pow(self.k() as u32)
                .ok_or_else(|| Error::Parameter("cell product overflows".into()))?,
            Mode::Diagonal => self.cell_size(),
        };
        let work = realizations.total() as u128 * per_check as u128;
        if work > budget as u128 {
            return Err(Error::Budget {
                needed: work,
                budget,
            });
        }

        let mut y = vec![0u64; self.k()];
        loop {
            if self.witness_for(&y, a, mode)?.is_none() {
                return Ok(GoodnessVerdict {
                    good: false,
                    first_failing: Some(y),
                });
            }
            if !realizations.advance(&mut y) {
                return Ok(GoodnessVerdict {
                    good: true,
                    first_failing: None,
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalWitness {
    pub j: u64,
    pub tuple: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GoodnessWitness {
    Product(Vec<u64>),
    Diagonal(DiagonalWitness),
}

impl GoodnessWitness {
    pub fn tuple(&self) -> &[u64] {
        match self {
            GoodnessWitness::Product(t) => t,
            GoodnessWitness::Diagonal(d) => &d.tuple,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodnessVerdict {
    pub good: bool,
    pub first_failing: Option<Vec<u64>>,
}

/// Sample one partition set: per source, a uniformly random permutation of
/// the alphabet chopped into consecutive blocks. Source `i` draws from the
/// substream `(seed, "partition", i)`.
pub fn sample_partition_set(
    k: usize,
    source_bits: u32,
    cell_bits: u32,
    seed: u64,
) -> Result<PartitionSet> {
    if cell_bits > source_bits || source_bits > 32 {
        return Err(Error::Parameter(format!(
            "cell width {cell_bits} must lie in 0..={source_bits} (and source width <= 32)"
        )));
    }
    let alphabet = 1u64 << source_bits;
    let cell_size = 1usize << cell_bits;
    let mut cells = Vec::with_capacity(k);
    for i in 0..k {
        let mut perm: Vec<u64> = (0..alphabet).collect();
        perm.shuffle(&mut substream(seed, "partition", i as u64));
        let partition: Vec<Vec<u64>> = perm.chunks(cell_size).map(|c| c.to_vec()).collect();
        cells.push(partition);
    }
    PartitionSet::from_cells(source_bits, cell_bits, cells)
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub partition: Option<PartitionSet>,
    pub attempts_used: u32,
}

/// Sample partition sets until one is good in the requested mode. Absence
/// after `max_attempts` is an outcome, not an error; attempt `t` uses the
/// derived seed `(seed, "partition-attempt", t)`.
pub fn search_good_partition(
    a: &FailureTable,
    cell_bits: u32,
    max_attempts: u32,
    seed: u64,
    mode: Mode,
    budget: u64,
) -> Result<SearchOutcome> {
    if max_attempts == 0 {
        return Err(Error::Parameter("max_attempts must be at least 1".into()));
    }
    for t in 0..max_attempts {
        let p = sample_partition_set(
            a.k,
            a.source_bits,
            cell_bits,
            derive_seed(seed, "partition-attempt", t as u64),
        )?;
        if p.is_good(a, mode, budget)?.good {
            return Ok(SearchOutcome {
                partition: Some(p),
                attempts_used: t + 1,
            });
        }
    }
    Ok(SearchOutcome {
        partition: None,
        attempts_used: max_attempts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodProbabilityEstimate {
    pub trials: u64,
    pub good: u64,
    pub fraction: Rational,
}

/// Monte-Carlo estimate of the probability that a uniformly sampled
/// partition set is good. Trial `t` uses the derived seed
/// `(seed, "good-trial", t)`.
pub fn estimate_good_probability(
    a: &FailureTable,
    cell_bits: u32,
    trials: u64,
    seed: u64,
    mode: Mode,
    budget: u64,
) -> Result<GoodProbabilityEstimate> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let mut good = 0u64;
    for t in 0..trials {
        let p = sample_partition_set(
            a.k,
            a.source_bits,
            cell_bits,
            derive_seed(seed, "good-trial", t),
        )?;
        if p.is_good(a, mode, budget)?.good {
            good += 1;
        }
    }
    Ok(GoodProbabilityEstimate {
        trials,
        good,
        fraction: Rational::ratio_u64(good, trials),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// True when the formula lands strictly inside (0, 1); outside that the
    /// asymptotic regime is simply not reached and the value is advisory.
    pub in_range: bool,
}

/// The rate-loss fraction `-log2(1-eps)/(Rn) + 2 log2(Rn)/(Rn)`. Advisory:
/// desk-scale parameters routinely land outside (0, 1), which is flagged,
/// never silently accepted.
pub fn delta_of_epsilon(epsilon: &Rational, rate: &Rational, n: u32) -> Result<DeltaEstimate> {
    if epsilon.is_negative() || *epsilon >= Rational::one() {
        return Err(Error::Parameter(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    let rn = rate.scale_u64(n as u64).to_f64();
    if rn.is_nan() || rn <= 1.0 {
        return Err(Error::Parameter(format!(
            "R*n = {rn} must exceed 1 for log2(Rn) to be positive"
        )));
    }
    let one_minus = (&Rational::one() - epsilon).to_f64();
    let delta = -one_minus.log2() / rn + 2.0 * rn.log2() / rn;
    Ok(DeltaEstimate {
        delta,
        in_range: delta > 0.0 && delta < 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim31Check {
    pub exact: Rational,
    pub bound: Rational,
    pub holds: bool,
    pub admissible_tuples: u64,
    pub epsilon: Rational,
}

/// Conditional failure probability of a fresh diagonal tuple.
///
/// `realization` fixes, per source, the cell-mates occupying every position
/// other than `j0` (exactly `2^cell_bits - 1` distinct values each). The
/// free element of source `i` is then uniform over the alphabet minus those
/// values, independently across sources. The check enumerates that law
/// exactly and compares against
/// `(1 - 2^-(source_bits - cell_bits) + 2^-source_bits)^-k * epsilon`.
pub fn claim31_exact_check(
    a: &FailureTable,
    cell_bits: u32,
    j0: u64,
    realization: &[Vec<u64>],
    budget: u64,
) -> Result<Claim31Check> {
    if cell_bits > a.source_bits {
        return Err(Error::Parameter(format!(
            "cell width {cell_bits} exceeds source width {}",
            a.source_bits
        )));
    }
    let cell_size = 1u64 << cell_bits;
    if j0 >= cell_size {
        return Err(Error::Parameter(format!(
            "position {j0} outside cell size {cell_size}"
        )));
    }
    if realization.len() != a.k {
        return Err(Error::Parameter(format!(
            "realization has {} sources, table has {}",
            realization.len(),
            a.k
        )));
    }
    let alphabet = 1u64 << a.source_bits;
    let mut candidates: Vec<Vec<u64>> = Vec::with_capacity(a.k);
    for (i, fixed) in realization.iter().enumerate() {
        if fixed.len() as u64 != cell_size - 1 {
            return Err(Error::Parameter(format!(
                "source {i}: {} fixed cell-mates, expected {}",
                fixed.len(),
                cell_size - 1
            )));
        }
        let mut taken = vec![false; alphabet as usize];
        for &x in fixed {
            if x >= alphabet {
                return Err(Error::Parameter(format!(
                    "source {i}: fixed value {x} outside alphabet [{alphabet}]"
                )));
            }
            if taken[x as usize] {
                return Err(Error::Parameter(format!(
                    "source {i}: fixed value {x} repeated"
                )));
            }
            taken[x as usize] = true;
        }
        candidates.push((0..alphabet).filter(|&x| !taken[x as usize]).collect());
    }

    let per_source = alphabet - (cell_size - 1);
    let space = TupleSpace::new(&vec![per_source; a.k])?;
    if space.total() > budget {
        return Err(Error::Budget {
            needed: space.total() as u128,
            budget,
        });
    }

    let mut failing = 0u64;
    let mut tuple = vec![0u64; a.k];
    space.for_each(|pos| {
        for i in 0..a.k {
            tuple[i] = candidates[i][pos[i] as usize];
        }
        failing += a.get(&tuple) as u64;
    });

    let exact = Rational::ratio_u64(failing, space.total());
    let epsilon = a.epsilon();
    let base = &(&Rational::one() - &Rational::pow2(-((a.source_bits - cell_bits) as i64)))
        + &Rational::pow2(-(a.source_bits as i64));
    let bound = &epsilon / &base.powi(a.k as i32);
    Ok(Claim31Check {
        holds: exact <= bound,
        exact,
        bound,
        admissible_tuples: space.total(),
        epsilon,
    })
}

/// All distinct shapes of an equal-cell partition of `[2^source_bits]` into
/// cells of `2^cell_bits` elements, ignoring cell order and within-cell
/// order. Cells come out sorted, ordered by their smallest element.
pub fn enumerate_partition_shapes(source_bits: u32, cell_bits: u32) -> Result<Vec<Vec<Vec<u64>>>> {
    if cell_bits > source_bits || source_bits > 16 {
        return Err(Error::Parameter(
            "shape enumeration is for tiny parameters only".into(),
        ));
    }
    let alphabet = 1u64 << source_bits;
    let cell_size = (1u64 << cell_bits) as usize;
    let mut shapes = Vec::new();
    let mut current: Vec<Vec<u64>> = Vec::new();
    let remaining: Vec<u64> = (0..alphabet).collect();

    fn choose(
        pool: &[u64],
        want: usize,
        start: usize,
        picked: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if picked.len() == want {
            out.push(picked.clone());
            return;
        }
        for i in start..pool.len() {
            picked.push(pool[i]);
            choose(pool, want, i + 1, picked, out);
            picked.pop();
        }
    }

    fn recurse(
        remaining: &[u64],
        cell_size: usize,
        current: &mut Vec<Vec<u64>>,
        shapes: &mut Vec<Vec<Vec<u64>>>,
    ) {
        if remaining.is_empty() {
            shapes.push(current.clone());
            return;
        }
        // anchor the smallest remaining element to kill cell-order symmetry
        let anchor = remaining[0];
        let pool: Vec<u64> = remaining[1..].to_vec();
        let mut combos = Vec::new();
        choose(&pool, cell_size - 1, 0, &mut Vec::new(), &mut combos);
        for mates in combos {
            let mut cell = vec![anchor];
            cell.extend(&mates);
            let rest: Vec<u64> = pool
                .iter()
                .copied()
                .filter(|x| !mates.contains(x))
                .collect();
            current.push(cell);
            recurse(&rest, cell_size, current, shapes);
            current.pop();
        }
    }

    recurse(&remaining, cell_size, &mut current, &mut shapes);
    Ok(shapes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table_with_ones(k: usize, bits: u32, ones: &[&[u64]]) -> FailureTable {
        let mut t = FailureTable::constant(k, bits, 0).unwrap();
        for &x in ones {
            let idx = t.space().index_of(x);
            t.set_flat(idx, 1);
        }
        t
    }

    #[test]
    fn sampled_partitions_satisfy_invariants() {
        let p = sample_partition_set(2, 2, 1, 99).unwrap();
        assert!(p.check_invariants().is_empty());
        assert_eq!(p.num_cells(), 2);
        assert_eq!(p.cell_size(), 2);
        for i in 0..2 {
            let mut all: Vec<u64> = (0..p.num_cells())
                .flat_map(|c| p.cell(i, c).to_vec())
                .collect();
            all.sort_unstable();
            assert_eq!(all, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn degenerate_cell_sizes() {
        // every cell a singleton
        let p = sample_partition_set(1, 2, 0, 5).unwrap();
        assert_eq!(p.num_cells(), 4);
        assert_eq!(p.cell_size(), 1);
        // one giant cell
        let p = sample_partition_set(1, 2, 2, 5).unwrap();
        assert_eq!(p.num_cells(), 1);
        assert_eq!(p.cell_size(), 4);
        assert!(sample_partition_set(1, 2, 3, 5).is_err());
    }

    #[test]
    fn witness_search_on_explicit_partition() {
        // partition {{0,1},{2,3}}, A(x)=1 iff x=0, realization = cell 0
        let p = PartitionSet::from_cells(2, 1, vec![vec![vec![0, 1], vec![2, 3]]]).unwrap();
        let a = table_with_ones(1, 2, &[&[0]]);
        assert_eq!(p.is_good_for(&[0], &a).unwrap(), Some(vec![1]));
        assert_eq!(p.is_good_for(&[1], &a).unwrap(), Some(vec![2]));

        let all_fail = FailureTable::constant(1, 2, 1).unwrap();
        assert_eq!(p.is_good_for(&[0], &all_fail).unwrap(), None);

        let all_pass = FailureTable::constant(1, 2, 0).unwrap();
        // lexicographically smallest element of the cell
        assert_eq!(p.is_good_for(&[0], &all_pass).unwrap(), Some(vec![0]));
    }

    #[test]
    fn diagonal_witness_uses_shared_position() {
        let p = PartitionSet::from_cells(
            1,
            1,
            vec![
                vec![vec![1, 0]], // sampled order: position 0 holds 1
            ],
        )
        .unwrap();
        let all_pass = FailureTable::constant(1, 1, 0).unwrap();
        let w = p.find_diagonal_witness(&[0], &all_pass).unwrap().unwrap();
        assert_eq!(w.j, 0);
        assert_eq!(w.tuple, vec![1]);

        let all_fail = FailureTable::constant(1, 1, 1).unwrap();
        assert!(p.find_diagonal_witness(&[0], &all_fail).unwrap().is_none());
    }

    #[test]
    fn off_diagonal_zero_found_only_by_full_search() {
        // k=2, cells of size 2; A = 0 only at (cell0[0], cell1[1])
        let p = PartitionSet::from_cells(1, 1, vec![vec![vec![0, 1]], vec![vec![0, 1]]]).unwrap();
        let mut a = FailureTable::constant(2, 1, 1).unwrap();
        let idx = a.space().index_of(&[0, 1]);
        a.set_flat(idx, 0);
        assert!(p.find_diagonal_witness(&[0, 0], &a).unwrap().is_none());
        assert_eq!(p.is_good_for(&[0, 0], &a).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn goodness_over_all_realizations() {
        let all_pass = FailureTable::constant(2, 2, 0).unwrap();
        let p = sample_partition_set(2, 2, 1, 3).unwrap();
        assert!(p.is_good(&all_pass, Mode::Full, 1 << 20).unwrap().good);
        assert!(p.is_good(&all_pass, Mode::Diagonal, 1 << 20).unwrap().good);

        // singleton cells: any 1-entry breaks goodness
        let one_bad = table_with_ones(1, 2, &[&[3]]);
        let p = sample_partition_set(1, 2, 0, 3).unwrap();
        let verdict = p.is_good(&one_bad, Mode::Full, 1 << 20).unwrap();
        assert!(!verdict.good);
        let y = verdict.first_failing.unwrap();
        assert_eq!(p.cell(0, y[0]), &[3]);

        // cells of size 2 always tolerate a single 1-entry
        let p = sample_partition_set(1, 2, 1, 17).unwrap();
        assert!(p.is_good(&one_bad, Mode::Full, 1 << 20).unwrap().good);

        // one giant cell: good iff the table has any 0-entry
        let p = sample_partition_set(1, 2, 2, 17).unwrap();
        assert!(p.is_good(&one_bad, Mode::Full, 1 << 20).unwrap().good);
        let all_fail = FailureTable::constant(1, 2, 1).unwrap();
        assert!(!p.is_good(&all_fail, Mode::Full, 1 << 20).unwrap().good);
    }

    #[test]
    fn goodness_respects_the_budget() {
        let a = FailureTable::constant(2, 2, 0).unwrap();
        let p = sample_partition_set(2, 2, 1, 1).unwrap();
        match p.is_good(&a, Mode::Full, 3) {
            Err(Error::Budget { needed, budget }) => {
                assert_eq!(needed, 16);
                assert_eq!(budget, 3);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn search_outcomes() {
        let all_pass = FailureTable::constant(1, 2, 0).unwrap();
        let found = search_good_partition(&all_pass, 1, 1, 9, Mode::Diagonal, 1 << 20).unwrap();
        assert!(found.partition.is_some());
        assert_eq!(found.attempts_used, 1);

        let all_fail = FailureTable::constant(1, 2, 1).unwrap();
        let missing = search_good_partition(&all_fail, 1, 5, 9, Mode::Full, 1 << 20).unwrap();
        assert!(missing.partition.is_none());
        assert_eq!(missing.attempts_used, 5);

        assert!(search_good_partition(&all_pass, 1, 0, 9, Mode::Full, 1 << 20).is_err());
    }

    #[test]
    fn good_probability_extremes_and_exact_value() {
        let all_pass = FailureTable::constant(1, 2, 0).unwrap();
        let est = estimate_good_probability(&all_pass, 1, 50, 4, Mode::Full, 1 << 20).unwrap();
        assert_eq!(est.fraction, Rational::one());

        let all_fail = FailureTable::constant(1, 2, 1).unwrap();
        let est = estimate_good_probability(&all_fail, 1, 50, 4, Mode::Full, 1 << 20).unwrap();
        assert!(est.fraction.is_zero());

        // single 1-entry with cells of size 2: every partition is good
        let one_bad = table_with_ones(1, 2, &[&[2]]);
        let est = estimate_good_probability(&one_bad, 1, 200, 4, Mode::Full, 1 << 20).unwrap();
        assert_eq!(est.fraction, Rational::one());
    }

    #[test]
    fn delta_formula_values() {
        // eps=0, Rn=4: 0 + 2*2/4 = 1, out of range
        let d = delta_of_epsilon(&Rational::zero(), &Rational::from_int(4), 1).unwrap();
        assert!((d.delta - 1.0).abs() < 1e-12);
        assert!(!d.in_range);

        // eps=1/2, Rn=4: 1/4 + 1 = 5/4, out of range
        let d = delta_of_epsilon(&Rational::new(1, 2), &Rational::from_int(4), 1).unwrap();
        assert!((d.delta - 1.25).abs() < 1e-12);
        assert!(!d.in_range);

        // eps=0, Rn=2^20: 40/2^20, in range
        let d = delta_of_epsilon(&Rational::zero(), &Rational::one(), 1 << 20).unwrap();
        assert!((d.delta - 40.0 / (1u64 << 20) as f64).abs() < 1e-15);
        assert!(d.in_range);

        assert!(delta_of_epsilon(&Rational::one(), &Rational::from_int(4), 1).is_err());
        assert!(delta_of_epsilon(&Rational::zero(), &Rational::one(), 1).is_err());
    }

    #[test]
    fn claim31_extremes() {
        let all_pass = FailureTable::constant(2, 2, 0).unwrap();
        let r = vec![vec![1], vec![2]];
        let check = claim31_exact_check(&all_pass, 1, 0, &r, 1 << 20).unwrap();
        assert!(check.exact.is_zero());
        assert!(check.bound.is_zero());
        assert!(check.holds);

        let all_fail = FailureTable::constant(2, 2, 1).unwrap();
        let check = claim31_exact_check(&all_fail, 1, 1, &r, 1 << 20).unwrap();
        assert_eq!(check.exact, Rational::one());
        assert!(check.bound >= Rational::one());
        assert!(check.holds);
    }

    #[test]
    fn claim31_small_sweep() {
        // k=2, Rn=2, cells of 2, a table with 3 one-entries: every
        // realization satisfies the bound
        let a = table_with_ones(2, 2, &[&[0, 0], &[1, 2], &[3, 3]]);
        let mut checked = 0;
        for f1 in 0..4u64 {
            for f2 in 0..4u64 {
                let r = vec![vec![f1], vec![f2]];
                for j0 in 0..2 {
                    let check = claim31_exact_check(&a, 1, j0, &r, 1 << 20).unwrap();
                    assert!(check.holds, "violated at {r:?} j0={j0}");
                    assert_eq!(check.admissible_tuples, 9);
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 32);
    }

    #[test]
    fn shape_enumeration_counts() {
        let shapes = enumerate_partition_shapes(2, 1).unwrap();
        assert_eq!(shapes.len(), 3);
        assert!(shapes.contains(&vec![vec![0, 1], vec![2, 3]]));
        assert!(shapes.contains(&vec![vec![0, 2], vec![1, 3]]));
        assert!(shapes.contains(&vec![vec![0, 3], vec![1, 2]]));
        // 8 elements in cells of 2: 7!! = 105
        assert_eq!(enumerate_partition_shapes(3, 1).unwrap().len(), 105);
        // trivial shapes
        assert_eq!(enumerate_partition_shapes(2, 0).unwrap().len(), 1);
        assert_eq!(enumerate_partition_shapes(2, 2).unwrap().len(), 1);
    }

    #[test]
    fn sampler_hits_every_shape_uniformly() {
        // chi-square over the 3 shapes of [4] into two cells of 2,
        // df = 2, significance 0.001 -> critical value 13.8155
        let shapes = enumerate_partition_shapes(2, 1).unwrap();
        let mut counts = vec![0u64; shapes.len()];
        let trials = 3000u64;
        for t in 0..trials {
            let p = sample_partition_set(1, 2, 1, t).unwrap();
            let mut shape: Vec<Vec<u64>> = (0..p.num_cells())
                .map(|c| {
                    let mut cell = p.cell(0, c).to_vec();
                    cell.sort_unstable();
                    cell
                })
                .collect();
            shape.sort();
            let idx = shapes.iter().position(|s| *s == shape).unwrap();
            counts[idx] += 1;
        }
        let expected = trials as f64 / shapes.len() as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 13.8155, "chi2 = {chi2}, counts = {counts:?}");
        assert!(counts.iter().all(|&c| c > 0));
    }

    proptest! {
        #[test]
        fn witnesses_reverify_and_diagonal_implies_full(
            seed in 0u64..500,
            ones in proptest::collection::vec(0u64..16, 0..8),
        ) {
            let mut a = FailureTable::constant(2, 2, 0).unwrap();
            for &o in &ones {
                a.set_flat(o, 1);
            }
            let p = sample_partition_set(2, 2, 1, seed).unwrap();
            let realizations = TupleSpace::new(&[2, 2]).unwrap();
            for y in realizations.iter() {
                let diag = p.find_diagonal_witness(&y, &a).unwrap();
                let full = p.is_good_for(&y, &a).unwrap();
                if let Some(w) = &diag {
                    // a diagonal witness re-verifies and implies a full witness
                    prop_assert_eq!(a.get(&w.tuple), 0);
                    prop_assert!(full.is_some());
                    for (i, &x) in w.tuple.iter().enumerate() {
                        prop_assert_eq!(p.cell_of(i, x), y[i]);
                    }
                }
                if let Some(t) = &full {
                    prop_assert_eq!(a.get(t), 0);
                    for (i, &x) in t.iter().enumerate() {
                        prop_assert_eq!(p.cell_of(i, x), y[i]);
                    }
                }
            }
        }
    }
}
