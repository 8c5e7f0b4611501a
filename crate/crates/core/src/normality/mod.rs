//! Block counts, their expectations and the cell geometry behind them.
//!
//! Positions are 1-based. Every statistic at level `ℓ` looks at the windows
//! starting at `j = 1..=n`: digits `x_j..x_{j+ℓ-1}` and bases
//! `q_j..q_{j+ℓ-1}`. With this alignment the conservation identities hold
//! exactly at every `n`:
//!
//! - `Σ_D Q_n(D) = n` and `Σ_D N_n(D, x) = n`;
//! - `Σ_B Q_n(D, B) = Q_n(D)` and `Σ_B N_n(D, B, x) = N_n(D, x)`.

mod cells;
mod report;

pub use cells::{cell_rectangles, rectangles_csv, rectangles_svg, CellModel, CellRectangle, IntervalSet};
pub use report::{
    normality_report, BlockRow, LevelReport, NormalityReport, ReportConfig, RnSummary, Status, UnRow,
};

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Exact, Rational};
use crate::windows::{count_windows, ExclusionSet, WindowCounter};

/// `D < B`: `d_i < b_i` for every `i`.
pub fn admissible(d: &[u64], b: &[u64]) -> bool {
    d.len() == b.len() && d.iter().zip(b).all(|(x, y)| x < y)
}

fn block_product(b: &[u64]) -> BigInt {
    b.iter().fold(BigInt::from(1u8), |a, &x| a * x)
}

fn check_block(d: &[u64]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::BadParams("blocks must have length at least 1".into()));
    }
    Ok(())
}

fn need(len: usize, n: usize, ell: usize) -> Result<()> {
    let needed = n + ell - 1;
    if len < needed {
        return Err(Error::SourceExhausted { needed, available: len });
    }
    Ok(())
}

fn base_windows(q: &[u64], ell: usize, n: usize) -> WindowCounter<u64> {
    count_windows(q, ell, n, 1, &ExclusionSet::None)
}

/// `Σ_B c(B) [D < B] / (b_1···b_ℓ)` over base-window counts `c`.
fn expectation_from_counts<'a>(d: &[u64], counts: impl Iterator<Item = (&'a Vec<u64>, &'a u64)>) -> Rational {
    let mut acc = Rational::zero();
    for (b, &c) in counts {
        if admissible(d, b) {
            acc += Rational::new(BigInt::from(c), block_product(b));
        }
    }
    acc
}

/// `Q_n(D) = Σ_{j=1}^{n} I_{Q,j}(D) / (q_j···q_{j+ℓ-1})`.
pub fn expectation_q_n(q: &[u64], d: &[u64], n: usize) -> Result<Rational> {
    check_block(d)?;
    need(q.len(), n, d.len())?;
    if n == 0 {
        return Ok(Rational::zero());
    }
    Ok(expectation_from_counts(d, base_windows(q, d.len(), n).counts().iter()))
}

/// `Q_n(D, B) = |{j ≤ n : (q_j..) = B}| · [D < B] / (b_1···b_ℓ)`.
pub fn expectation_q_n_db(q: &[u64], d: &[u64], b: &[u64], n: usize) -> Result<Rational> {
    check_block(d)?;
    if d.len() != b.len() {
        return Err(Error::LengthMismatch(d.len(), b.len()));
    }
    need(q.len(), n, d.len())?;
    if !admissible(d, b) || n == 0 {
        return Ok(Rational::zero());
    }
    let hits = q[..n + b.len() - 1].windows(b.len()).filter(|w| *w == b).count();
    Ok(Rational::new(BigInt::from(hits), block_product(b)))
}

/// `N_n(D, x)`: windows `j ∈ [1,n] \ A` with `(x_j..x_{j+ℓ-1}) = D`.
pub fn count_n(digits: &[u64], d: &[u64], n: usize, excl: &ExclusionSet) -> Result<u64> {
    check_block(d)?;
    need(digits.len(), n, d.len())?;
    Ok(digits[..n + d.len() - 1]
        .windows(d.len())
        .enumerate()
        .filter(|(i, w)| *w == d && !excl.contains(i + 1))
        .count() as u64)
}

/// `N_n(D, B, x)`: as [`count_n`], restricted to positions where the bases read `B`.
pub fn count_n_db(q: &[u64], digits: &[u64], d: &[u64], b: &[u64], n: usize, excl: &ExclusionSet) -> Result<u64> {
    check_block(d)?;
    if d.len() != b.len() {
        return Err(Error::LengthMismatch(d.len(), b.len()));
    }
    let ell = d.len();
    need(digits.len(), n, ell)?;
    need(q.len(), n, ell)?;
    Ok((0..n)
        .filter(|&i| !excl.contains(i + 1) && digits[i..i + ell] == *d && q[i..i + ell] == *b)
        .count() as u64)
}

/// `P̂_D = Q_n(D)/n` with the drift against `n/2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PdEstimate {
    pub n: usize,
    pub estimate: Exact,
    pub estimate_half: Exact,
    pub drift: Exact,
}

pub fn limit_p_d(q: &[u64], d: &[u64], n: usize) -> Result<PdEstimate> {
    if n < 2 {
        return Err(Error::BadParams("need n ≥ 2".into()));
    }
    let full = expectation_q_n(q, d, n)? / Rational::from_integer(n.into());
    let h = n / 2;
    let half = expectation_q_n(q, d, h)? / Rational::from_integer(h.into());
    let drift = rational::abs_diff(&full, &half);
    Ok(PdEstimate { n, estimate: full.into(), estimate_half: half.into(), drift: drift.into() })
}

/// Joint window counts of `(digit, base)` pairs at one block length.
///
/// Digit/base pair counts honour the exclusion set; the base-only counts
/// that feed the expectations never do.
#[derive(Clone, Debug)]
pub struct BlockStats {
    ell: usize,
    n: usize,
    pairs: WindowCounter<(u64, u64)>,
    bases: WindowCounter<u64>,
    excluded: usize,
}

impl BlockStats {
    /// Counts windows `j = 1..=n` of the paired digit/base streams.
    pub fn new(q: &[u64], digits: &[u64], ell: usize, n: usize, excl: &ExclusionSet) -> Result<Self> {
        if ell == 0 {
            return Err(Error::BadParams("block length must be at least 1".into()));
        }
        need(q.len(), n, ell)?;
        need(digits.len(), n, ell)?;
        let m = n + ell - 1;
        crate::expansion::check_admissible(&digits[..m], &q[..m])?;
        let zipped: Vec<(u64, u64)> = digits[..m].iter().copied().zip(q[..m].iter().copied()).collect();
        let pairs = count_windows(&zipped, ell, n, 1, excl);
        let bases = base_windows(q, ell, n);
        Ok(BlockStats { ell, n, pairs, bases, excluded: excl.count_in(1, n + 1) })
    }

    /// Counts covering the stream stretch `[offset, offset + len)`, to be merged
    /// with neighbouring stretches.
    pub fn partial(q: &[u64], digits: &[u64], ell: usize, offset: usize, excl: &ExclusionSet) -> Self {
        let zipped: Vec<(u64, u64)> = digits.iter().copied().zip(q.iter().copied()).collect();
        let pairs = WindowCounter::from_slice(ell, offset, &zipped, excl);
        let bases = WindowCounter::from_slice(ell, offset, q, &ExclusionSet::None);
        let n = bases.total() as usize;
        let excluded = n - pairs.total() as usize;
        BlockStats { ell, n, pairs, bases, excluded }
    }

    pub fn merge(self, other: Self, excl: &ExclusionSet) -> Self {
        let pairs = self.pairs.merge(other.pairs, excl);
        let bases = self.bases.merge(other.bases, &ExclusionSet::None);
        let n = bases.total() as usize;
        let excluded = n - pairs.total() as usize;
        BlockStats { ell: self.ell, n, pairs, bases, excluded }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn excluded(&self) -> usize {
        self.excluded
    }

    fn digit_counts(&self) -> HashMap<Vec<u64>, u64> {
        let mut m: HashMap<Vec<u64>, u64> = HashMap::new();
        for (w, &c) in self.pairs.counts() {
            let d: Vec<u64> = w.iter().map(|p| p.0).collect();
            *m.entry(d).or_insert(0) += c;
        }
        m
    }

    /// `N_n(D, x)` for every observed `D`.
    pub fn digit_block_counts(&self) -> BTreeMap<Vec<u64>, u64> {
        self.digit_counts().into_iter().collect()
    }

    /// `N_n(D, B, x)` for every observed `(D, B)`.
    pub fn pair_counts(&self) -> BTreeMap<(Vec<u64>, Vec<u64>), u64> {
        self.pairs
            .counts()
            .iter()
            .map(|(w, &c)| ((w.iter().map(|p| p.0).collect(), w.iter().map(|p| p.1).collect()), c))
            .collect()
    }

    /// Window counts of base blocks.
    pub fn base_block_counts(&self) -> BTreeMap<Vec<u64>, u64> {
        self.bases.counts().iter().map(|(w, &c)| (w.clone(), c)).collect()
    }

    pub fn count(&self, d: &[u64]) -> u64 {
        self.pairs
            .counts()
            .iter()
            .filter(|(w, _)| w.iter().map(|p| p.0).eq(d.iter().copied()))
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn count_db(&self, d: &[u64], b: &[u64]) -> u64 {
        if d.len() != b.len() {
            return 0;
        }
        let key: Vec<(u64, u64)> = d.iter().copied().zip(b.iter().copied()).collect();
        self.pairs.get(&key)
    }

    pub fn expectation(&self, d: &[u64]) -> Rational {
        expectation_from_counts(d, self.bases.counts().iter())
    }

    pub fn expectation_db(&self, d: &[u64], b: &[u64]) -> Rational {
        if !admissible(d, b) {
            return Rational::zero();
        }
        Rational::new(BigInt::from(self.bases.get(b)), block_product(b))
    }

    /// `Q_n(D)` for every `D` with positive expectation.
    pub fn all_expectations(&self) -> BTreeMap<Vec<u64>, Rational> {
        let mut out: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
        for (b, &c) in self.bases.counts() {
            let w = Rational::new(BigInt::from(c), block_product(b));
            for d in admissible_blocks(b) {
                *out.entry(d).or_insert_with(Rational::zero) += &w;
            }
        }
        out
    }
}

/// All `D < B` in lexicographic order.
pub fn admissible_blocks(b: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::with_capacity(b.len())];
    for &bi in b {
        let mut next = Vec::with_capacity(out.len() * bi as usize);
        for prefix in &out {
            for d in 0..bi {
                let mut v = prefix.clone();
                v.push(d);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// `Σ_i d_i / (b_1···b_i)`, the left end of `I_{D,B}`.
pub fn block_value(d: &[u64], b: &[u64]) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::from(1u8);
    for (&x, &y) in d.iter().zip(b) {
        num = num * y + x;
        den *= y;
    }
    Rational::new(num, den)
}

pub fn format_block(b: &[u64]) -> String {
    b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const Q: [u64; 5] = [2, 3, 2, 3, 2];

    #[test]
    fn expectations_periodic() {
        assert_eq!(expectation_q_n(&Q, &[0], 4).unwrap(), rat(5, 3));
        assert_eq!(expectation_q_n(&Q, &[2], 4).unwrap(), rat(2, 3));
        assert_eq!(expectation_q_n(&Q, &[5], 4).unwrap(), rat(0, 1));
        assert_eq!(expectation_q_n_db(&Q, &[1, 2], &[2, 3], 4).unwrap(), rat(1, 3));
        assert_eq!(expectation_q_n_db(&Q, &[2, 0], &[2, 3], 4).unwrap(), rat(0, 1));
        assert!(matches!(expectation_q_n_db(&Q, &[1], &[2, 3], 4), Err(Error::LengthMismatch(1, 2))));
        assert!(expectation_q_n(&Q, &[], 2).is_err());
    }

    #[test]
    fn counts_pattern() {
        let q: Vec<u64> = (0..101).map(|i| if i % 2 == 0 { 2 } else { 3 }).collect();
        let x: Vec<u64> = (0..101).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
        assert_eq!(count_n(&x, &[1, 2], 100, &ExclusionSet::None).unwrap(), 50);
        assert_eq!(count_n(&x, &[1, 2], 100, &ExclusionSet::All).unwrap(), 0);
        assert_eq!(count_n_db(&q, &x, &[1, 2], &[2, 3], 100, &ExclusionSet::None).unwrap(), 50);
        assert_eq!(count_n_db(&q, &x, &[1, 2], &[3, 3], 100, &ExclusionSet::None).unwrap(), 0);
        let s = BlockStats::new(&q, &x, 2, 100, &ExclusionSet::None).unwrap();
        assert_eq!(s.count(&[1, 2]), 50);
        assert_eq!(s.count_db(&[1, 2], &[2, 3]), 50);
    }

    #[test]
    fn p_d_periodic() {
        let q: Vec<u64> = (0..4000).map(|i| if i % 2 == 0 { 2 } else { 3 }).collect();
        let e = limit_p_d(&q, &[0], 2000).unwrap();
        assert_eq!(e.estimate.to_rational().unwrap(), rat(5, 12));
        let e = limit_p_d(&q, &[2], 2000).unwrap();
        assert_eq!(e.estimate.to_rational().unwrap(), rat(1, 6));
    }

    #[test]
    fn all_expectations_sum_to_n() {
        let q = [2u64, 3, 5, 2, 2, 4, 3];
        let x = [1u64, 2, 4, 0, 1, 3, 2];
        for ell in 1..=3 {
            let n = q.len() + 1 - ell;
            let s = BlockStats::new(&q, &x, ell, n, &ExclusionSet::None).unwrap();
            let total: Rational = s.all_expectations().values().sum();
            assert_eq!(total, rat(n as i64, 1));
        }
    }

    #[test]
    fn admissible_enumeration() {
        assert_eq!(admissible_blocks(&[2, 3]).len(), 6);
        assert_eq!(block_value(&[1, 2], &[2, 3]), rat(5, 6));
        assert_eq!(format_block(&[1, 0, 2]), "1-0-2");
    }
}
