use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{Exact, Rational};

/// `e_n` with `q_n = g^{e_n}`.
pub fn gpower_exponents(bases: &[u64], g: u64) -> Result<Vec<u32>> {
    if g < 2 {
        return Err(Error::BadParams("g must be at least 2".into()));
    }
    bases
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let mut e = 0u32;
            let mut v = q;
            while v > 1 && v % g == 0 {
                v /= g;
                e += 1;
            }
            if v != 1 || e == 0 {
                return Err(Error::NotGPower { position: i + 1, base: q, g });
            }
            Ok(e)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GPowerDensity {
    pub g: u64,
    pub k: u32,
    pub n: usize,
    /// Mean of `log_g q_n`.
    pub mean_log: Exact,
    /// Density of `A_k = A ∪ (A+1) ∪ … ∪ (A+k)` in `[a_1, a_N]`.
    pub empirical: Exact,
    /// `mean(min(k+1, log_g q_n)) / mean(log_g q_n)`.
    pub formula: Exact,
    pub difference: f64,
}

/// Index set `A = {a_n}` with `a_n = a_{n−1} + log_g q_n`, `a_0 = 0`.
pub fn gpower_index_density(bases: &[u64], g: u64, k: u32, n: usize) -> Result<GPowerDensity> {
    if n < 2 {
        return Err(Error::BadParams("need N ≥ 2".into()));
    }
    if bases.len() < n {
        return Err(Error::SourceExhausted { needed: n, available: bases.len() });
    }
    let e = gpower_exponents(&bases[..n], g)?;
    let total: u64 = e.iter().map(|&x| x as u64).sum();
    let capped: u64 = e.iter().map(|&x| x.min(k + 1) as u64).sum();
    let first = e[0] as u64;
    let last = total;
    let span = (last - first + 1) as usize;
    let mut bits = vec![0u64; span.div_ceil(64)];
    let mut a = 0u64;
    for &x in &e {
        a += x as u64;
        for j in 0..=k as u64 {
            let m = a + j;
            if m > last {
                break;
            }
            let idx = (m - first) as usize;
            bits[idx / 64] |= 1 << (idx % 64);
        }
    }
    let covered: u64 = bits.iter().map(|w| w.count_ones() as u64).sum();
    let empirical = Rational::new(covered.into(), (span as u64).into());
    let formula = Rational::new(capped.into(), total.into());
    let mean_log = Rational::new(total.into(), (n as u64).into());
    let difference = crate::rational::to_f64(&crate::rational::abs_diff(&empirical, &formula));
    Ok(GPowerDensity { g, k, n, mean_log: mean_log.into(), empirical: empirical.into(), formula: formula.into(), difference })
}
