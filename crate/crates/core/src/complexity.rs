//! Word complexity, block entropy and determinism diagnostics of a sequence.
//!
//! Windows are `ω_i..ω_{i+k−1}` for `i ∈ [1, N]`, so `N + k − 1` letters are
//! read. The exclusion budget for `p̂_ε(k)` is `⌊εN⌋` windows.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Exact, Rational};
use crate::windows::{count_windows, ExclusionSet};

const PAR_CHUNK: usize = 1 << 16;

fn need(seq: &[u64], k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::BadParams("block length must be at least 1".into()));
    }
    if seq.len() < n + k - 1 {
        return Err(Error::SourceExhausted { needed: n + k - 1, available: seq.len() });
    }
    Ok(())
}

/// Window count of every distinct `k`-block, in no particular order.
pub fn class_counts(seq: &[u64], k: usize, n: usize, excl: &ExclusionSet) -> Result<Vec<u64>> {
    need(seq, k, n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let data = &seq[..n + k - 1];
    let mut alphabet: Vec<u64> = data.to_vec();
    alphabet.par_sort_unstable();
    alphabet.dedup();
    let m = alphabet.len().max(2) as u128;
    let fits = (m as f64).log2() * k as f64 <= 126.0;
    if !fits {
        let c = count_windows(data, k, n, 1, excl);
        return Ok(c.into_counts().into_values().collect());
    }
    let letters: Vec<u128> = data
        .par_iter()
        .map(|x| alphabet.binary_search(x).expect("collected") as u128)
        .collect();
    let top = m.pow(k as u32 - 1);
    let mut codes: Vec<u128> = (0..n)
        .into_par_iter()
        .step_by(PAR_CHUNK)
        .flat_map_iter(|start| {
            let end = (start + PAR_CHUNK).min(n);
            let mut code = letters[start..start + k].iter().fold(0u128, |a, &c| a * m + c);
            let mut out = Vec::with_capacity(end - start);
            for i in start..end {
                if i > start {
                    code = (code - letters[i - 1] * top) * m + letters[i + k - 1];
                }
                if !excl.contains(i + 1) {
                    out.push(code);
                }
            }
            out.into_iter()
        })
        .collect();
    codes.par_sort_unstable();
    let mut counts = Vec::new();
    let mut i = 0;
    while i < codes.len() {
        let j = codes[i..].partition_point(|&c| c == codes[i]) + i;
        counts.push((j - i) as u64);
        i = j;
    }
    Ok(counts)
}

/// Distinct `k`-blocks over the windows in `[1, N] ∖ A`.
pub fn distinct_blocks(seq: &[u64], k: usize, n: usize, excl: &ExclusionSet) -> Result<usize> {
    Ok(class_counts(seq, k, n, excl)?.len())
}

/// Budget `⌊εN⌋`, with `ε` clamped to `[0, 1]`.
pub fn exclusion_budget(eps: &Rational, n: usize) -> u64 {
    let t = eps * Rational::from_integer(n.into());
    let f = t.floor().to_integer();
    if f.is_zero() || f < Zero::zero() {
        0
    } else {
        f.to_u64().unwrap_or(u64::MAX).min(n as u64)
    }
}

/// Classes left after removing the rarest classes while the removed windows fit in `budget`.
pub fn p_eps_from_counts(counts: &[u64], budget: u64) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let mut spent = 0u64;
    let mut removed = 0;
    for c in sorted {
        if spent + c > budget {
            break;
        }
        spent += c;
        removed += 1;
    }
    counts.len() - removed
}

pub fn p_eps(seq: &[u64], k: usize, eps: &Rational, n: usize) -> Result<usize> {
    let counts = class_counts(seq, k, n, &ExclusionSet::None)?;
    Ok(p_eps_from_counts(&counts, exclusion_budget(eps, n)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockEntropy {
    pub k: usize,
    pub n: usize,
    pub distinct: usize,
    /// `Ĥ_k` in nats.
    pub entropy: f64,
    pub entropy_bits: f64,
    pub slope: f64,
    /// `log p̂_0(k)`, the maximum-entropy bound.
    pub max_entropy: f64,
    /// Distinct blocks per window.
    pub sparsity: f64,
}

fn entropy_of(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0)
}

pub fn block_entropy(seq: &[u64], k: usize, n: usize) -> Result<BlockEntropy> {
    let counts = class_counts(seq, k, n, &ExclusionSet::None)?;
    let entropy = entropy_of(&counts);
    let distinct = counts.len();
    Ok(BlockEntropy {
        k,
        n,
        distinct,
        entropy,
        entropy_bits: entropy / std::f64::consts::LN_2,
        slope: entropy / k as f64,
        max_entropy: (distinct.max(1) as f64).ln(),
        sparsity: if n == 0 { 0.0 } else { distinct as f64 / n as f64 },
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LetterDensities {
    pub n: usize,
    pub letters: Vec<(u64, Exact)>,
    /// `Σ −d̂(E_m) log d̂(E_m)` over observed letters.
    pub series: f64,
}

pub fn letter_densities(seq: &[u64], n: usize) -> Result<LetterDensities> {
    need(seq, 1, n)?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in &seq[..n] {
        *counts.entry(x).or_default() += 1;
    }
    let c: Vec<u64> = counts.values().copied().collect();
    Ok(LetterDensities {
        n,
        letters: counts.iter().map(|(&x, &c)| (x, Rational::new(c.into(), (n as u64).into()).into())).collect(),
        series: entropy_of(&c),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogIntegral {
    pub n: usize,
    /// Logarithm base; `None` for natural logs.
    pub base: Option<u64>,
    pub mean: f64,
    pub mean_half: f64,
    pub relative_change: f64,
    pub drift: bool,
    /// Exact coefficients `c_q` with `mean = Σ c_q log q`.
    pub terms: Vec<(u64, Exact)>,
    pub symbolic: String,
}

/// Relative change between the means at `N/2` and `N` above which drift is flagged.
pub const DRIFT_THRESHOLD: f64 = 0.01;

/// Mean of `log q_n` (or `log_g q_n`) over `n ≤ N`, compared against the mean over `n ≤ N/2`.
pub fn log_integral(seq: &[u64], base: Option<u64>, n: usize) -> Result<LogIntegral> {
    if n < 2 {
        return Err(Error::BadParams("need N ≥ 2".into()));
    }
    need(seq, 1, n)?;
    if base.is_some_and(|g| g < 2) {
        return Err(Error::BadParams("log base must be at least 2".into()));
    }
    if let Some(&q) = seq[..n].iter().find(|&&q| q == 0) {
        return Err(Error::OutOfRange(format!("log of {q}")));
    }
    let scale = base.map_or(1.0, |g| (g as f64).ln());
    let mean_over = |m: usize| seq[..m].iter().map(|&q| (q as f64).ln()).sum::<f64>() / (m as f64 * scale);
    let mean = mean_over(n);
    let mean_half = mean_over(n / 2);
    let relative_change = if mean.abs() > 0.0 { (mean - mean_half).abs() / mean.abs() } else { 0.0 };
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &q in &seq[..n] {
        *counts.entry(q).or_default() += 1;
    }
    let terms: Vec<(u64, Rational)> =
        counts.into_iter().map(|(q, c)| (q, Rational::new(c.into(), (n as u64).into()))).collect();
    let log_name = match base {
        Some(g) => format!("log_{g}"),
        None => "log".to_string(),
    };
    let symbolic = terms
        .iter()
        .filter(|(q, _)| *q != 1)
        .map(|(q, c)| format!("{}·{log_name}({q})", rational::format_rational(c)))
        .collect::<Vec<_>>()
        .join(" + ");
    Ok(LogIntegral {
        n,
        base,
        mean,
        mean_half,
        relative_change,
        drift: relative_change > DRIFT_THRESHOLD,
        terms: terms.into_iter().map(|(q, c)| (q, c.into())).collect(),
        symbolic: if symbolic.is_empty() { "0".into() } else { symbolic },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    ConsistentWithDeterministic,
    ConsistentWithPositiveEntropy,
    Unresolved,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub k: usize,
    pub eps: Exact,
    pub p_eps: usize,
    /// `log p̂_ε(k) / k`.
    pub rate: f64,
    /// `(log p̂_ε(k) − log p̂_ε(⌈k/2⌉)) / (k − ⌈k/2⌉)`.
    pub growth: Option<f64>,
    /// `p̂_0(k) · 16 ≤ N`.
    pub resolved: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionOne {
    pub eps: Exact,
    pub min_rate: f64,
    pub k_at_min_rate: usize,
    pub min_growth: Option<f64>,
    pub below_eps: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub n: usize,
    pub k_max: usize,
    pub resolved_k_max: usize,
    pub rows: Vec<ComplexityRow>,
    pub entropies: Vec<BlockEntropy>,
    pub condition_i: Vec<ConditionOne>,
    pub condition_ii: LetterDensities,
    pub log_mean: LogIntegral,
    pub verdict: Verdict,
}

impl ComplexityReport {
    /// CSV `k,eps,p_eps,H_k`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,eps,p_eps,H_k\n");
        for r in &self.rows {
            let h = self.entropies.iter().find(|e| e.k == r.k).map_or(f64::NAN, |e| e.entropy);
            let _ = writeln!(s, "{},{},{},{}", r.k, r.eps, r.p_eps, h);
        }
        s
    }

    pub fn p_eps(&self, k: usize, eps: &Rational) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.k == k && r.eps.to_rational().ok().as_ref() == Some(eps))
            .map(|r| r.p_eps)
    }
}

fn ln_count(p: usize) -> f64 {
    (p.max(1) as f64).ln()
}

/// Finite-prefix check of the two determinism conditions over `k ∈ [1, k_max]`.
///
/// Only resolved lengths enter the verdict. Condition (i) for `ε` counts as met
/// when the doubling growth estimate drops below `ε` at some resolved `k`.
pub fn determinism_check(seq: &[u64], n: usize, eps_list: &[Rational], k_max: usize) -> Result<ComplexityReport> {
    if k_max == 0 || eps_list.is_empty() {
        return Err(Error::BadParams("need k_max ≥ 1 and at least one ε".into()));
    }
    need(seq, k_max, n)?;
    let per_k: Vec<Vec<u64>> = (1..=k_max)
        .map(|k| class_counts(seq, k, n, &ExclusionSet::None))
        .collect::<Result<_>>()?;
    let resolved: Vec<bool> = per_k.iter().map(|c| (c.len() as u128) * 16 <= n as u128).collect();
    let resolved_k_max = resolved.iter().take_while(|&&r| r).count();
    let mut rows = Vec::new();
    let mut condition_i = Vec::new();
    for eps in eps_list {
        let budget = exclusion_budget(eps, n);
        let p: Vec<usize> = per_k.iter().map(|c| p_eps_from_counts(c, budget)).collect();
        let mut min_rate = (f64::INFINITY, 0usize);
        let mut min_growth: Option<f64> = None;
        for k in 1..=k_max {
            let rate = ln_count(p[k - 1]) / k as f64;
            let growth = (k >= 2).then(|| {
                let h = k.div_ceil(2);
                (ln_count(p[k - 1]) - ln_count(p[h - 1])) / (k - h) as f64
            });
            if resolved[k - 1] {
                if rate < min_rate.0 {
                    min_rate = (rate, k);
                }
                if let Some(g) = growth {
                    min_growth = Some(min_growth.map_or(g, |m: f64| m.min(g)));
                }
            }
            rows.push(ComplexityRow { k, eps: eps.into(), p_eps: p[k - 1], rate, growth, resolved: resolved[k - 1] });
        }
        let eps_f = rational::to_f64(eps);
        let below = min_rate.0 < eps_f || min_growth.is_some_and(|g| g < eps_f);
        condition_i.push(ConditionOne {
            eps: eps.into(),
            min_rate: if min_rate.0.is_finite() { min_rate.0 } else { 0.0 },
            k_at_min_rate: min_rate.1,
            min_growth,
            below_eps: below,
        });
    }
    let entropies = per_k
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let entropy = entropy_of(c);
            BlockEntropy {
                k: i + 1,
                n,
                distinct: c.len(),
                entropy,
                entropy_bits: entropy / std::f64::consts::LN_2,
                slope: entropy / (i + 1) as f64,
                max_entropy: ln_count(c.len()),
                sparsity: c.len() as f64 / n.max(1) as f64,
            }
        })
        .collect();
    // a rate can never drop below ε = 0, so only positive ε are judged
    let judged: Vec<&ConditionOne> = eps_list
        .iter()
        .zip(&condition_i)
        .filter(|(e, _)| e.is_positive())
        .map(|(_, c)| c)
        .collect();
    let verdict = if resolved_k_max < 2 || judged.is_empty() {
        Verdict::Unresolved
    } else if judged.iter().all(|c| c.below_eps) {
        Verdict::ConsistentWithDeterministic
    } else {
        Verdict::ConsistentWithPositiveEntropy
    };
    Ok(ComplexityReport {
        n,
        k_max,
        resolved_k_max,
        rows,
        entropies,
        condition_i,
        condition_ii: letter_densities(seq, n)?,
        log_mean: log_integral(seq, None, n.max(2))?,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn periodic_factors() {
        let s: Vec<u64> = (0..100).map(|i| 2 + (i % 2) as u64).collect();
        assert_eq!(distinct_blocks(&s, 3, 90, &ExclusionSet::None).unwrap(), 2);
        assert_eq!(distinct_blocks(&s, 3, 90, &ExclusionSet::All).unwrap(), 0);
        assert_eq!(p_eps(&s, 2, &rat(1, 1), 90).unwrap(), 0);
    }

    #[test]
    fn generic_path_agrees() {
        let s: Vec<u64> = (0..5000u64).map(|i| (i * i * 7 + i / 3) % 1000 + 2).collect();
        // 1000 letters, k = 20 overflows a u128 code
        let fast = distinct_blocks(&s, 12, 4000, &ExclusionSet::None).unwrap();
        let slow = count_windows(&s, 12, 4000, 1, &ExclusionSet::None).distinct();
        assert_eq!(fast, slow);
        let wide = distinct_blocks(&s, 20, 4000, &ExclusionSet::None).unwrap();
        assert_eq!(wide, count_windows(&s, 20, 4000, 1, &ExclusionSet::None).distinct());
    }

    #[test]
    fn constant_entropy_zero() {
        let s = vec![5u64; 200];
        let e = block_entropy(&s, 3, 150).unwrap();
        assert_eq!(e.entropy, 0.0);
        assert_eq!(e.distinct, 1);
    }

    #[test]
    fn log_integral_forms() {
        let s: Vec<u64> = (0..1000).map(|i| 2 + (i % 2) as u64).collect();
        let l = log_integral(&s, None, 1000).unwrap();
        assert_eq!(l.symbolic, "1/2·log(2) + 1/2·log(3)");
        assert!((l.mean - (2f64.ln() + 3f64.ln()) / 2.0).abs() < 1e-12);
        assert!(!l.drift);
        let g = log_integral(&[7; 10], Some(7), 10).unwrap();
        assert!((g.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_floor() {
        assert_eq!(exclusion_budget(&rat(1, 3), 10), 3);
        assert_eq!(exclusion_budget(&rat(0, 1), 10), 0);
        assert_eq!(exclusion_budget(&rat(3, 1), 10), 10);
        assert_eq!(p_eps_from_counts(&[5, 1, 2, 2], 3), 2);
    }
}
