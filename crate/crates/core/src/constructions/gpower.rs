use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{ratio, Construction, ConstructionOutput, ConstructionSpec, Diagnostics};
use crate::error::{Error, Result};
use crate::rational::{Exact, Rational};
use crate::rng::{InverseSquare, SplitMix64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ex36Variant {
    /// Zero digits on every block whose exponent equals `a_1`.
    I,
    /// Zero digits on not-yet-seen bases until the zero excess passes `m`.
    Ii,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ex36Checkpoint {
    pub m: usize,
    /// `N'_{m+1}`.
    pub n_prime: usize,
    /// Base-`g` digits emitted up to `N'_{m+1}`.
    pub g_position: u64,
    pub zeros: u64,
    pub nonzeros: u64,
    pub zero_ratio: f64,
    pub exceeds_m: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ex36Diagnostics {
    pub variant: Ex36Variant,
    pub g: u64,
    pub n: usize,
    /// The exponent law is `P(a = k) ∝ k⁻²` cut off at `k_max`.
    pub k_max: u64,
    pub max_exponent: u32,
    pub a1: u32,
    pub mean_exponent_half: Exact,
    pub mean_exponent: Exact,
    /// The mean exponent grew between `N/2` and `N`.
    pub mean_drift: bool,
    pub g_digits: u64,
    /// Frequency of each base-`g` digit over the whole stream.
    pub g_digit_frequency: Vec<Exact>,
    /// Share of base-`g` positions in blocks with `a_m = a_1`, at `N/2` and `N`.
    pub a1_share_half: Exact,
    pub a1_share: Exact,
    pub a1_share_decreasing: bool,
    /// Frequency of digit 0 on base-`g` positions in blocks with `a_m = a_1`.
    pub a1_zero_frequency: Option<Exact>,
    /// Fraction of `n ∈ [0, N−1]` with `q_n···q_1 y mod 1 ∈ [0, 1/g)`.
    pub orbit_low_frequency: Exact,
    /// `1/g + (1 − 1/g)·d̂(a = a_1)` for variant (i).
    pub orbit_low_target: Option<Exact>,
    pub checkpoints: Vec<Ex36Checkpoint>,
}

fn exponents(k_max: u64, n: usize, rng: &mut SplitMix64) -> Result<Vec<u32>> {
    if k_max > u32::MAX as u64 {
        return Err(Error::BadParams("k_max must fit in 32 bits".into()));
    }
    let law = InverseSquare::new(k_max)?;
    Ok((0..n).map(|_| law.sample(rng) as u32).collect())
}

fn check(g: u64, n: usize) -> Result<()> {
    if !(2..=256).contains(&g) {
        return Err(Error::BadParams(format!("g must lie in [2, 256], got {g}")));
    }
    if n < 2 {
        return Err(Error::BadParams("need N ≥ 2".into()));
    }
    Ok(())
}

fn summarize(
    variant: Ex36Variant,
    g: u64,
    k_max: u64,
    exps: &[u32],
    digits: &[u8],
    checkpoints: Vec<Ex36Checkpoint>,
) -> Ex36Diagnostics {
    let n = exps.len();
    let a1 = exps[0];
    let half = n / 2;
    let sum = |xs: &[u32]| xs.iter().map(|&a| a as u64).sum::<u64>();
    let (s_half, s_all) = (sum(&exps[..half]), sum(exps));
    let mean_half = Rational::new(s_half.into(), (half as u64).into());
    let mean_all = Rational::new(s_all.into(), (n as u64).into());
    let a1_mass = |xs: &[u32]| xs.iter().filter(|&&a| a == a1).map(|&a| a as u64).sum::<u64>();
    let share_half = Rational::new(a1_mass(&exps[..half]).into(), s_half.max(1).into());
    let share_all = Rational::new(a1_mass(exps).into(), s_all.max(1).into());
    let mut freq = vec![0u64; g as usize];
    for &d in digits {
        freq[d as usize] += 1;
    }
    let mut a1_zero = (0u64, 0u64);
    let mut low = 0usize;
    let mut pos = 0usize;
    for &a in exps {
        let block = &digits[pos..pos + a as usize];
        if a == a1 {
            a1_zero.0 += block.iter().filter(|&&d| d == 0).count() as u64;
            a1_zero.1 += a as u64;
        }
        // q_{n+1} y_n-shift < 1/g iff the leading base-g digit of block n+1 is 0
        if block[0] == 0 {
            low += 1;
        }
        pos += a as usize;
    }
    let d1 = Rational::new((exps.iter().filter(|&&a| a == a1).count() as u64).into(), (n as u64).into());
    let gr = Rational::new(1.into(), g.into());
    Ex36Diagnostics {
        variant,
        g,
        n,
        k_max,
        max_exponent: exps.iter().copied().max().unwrap_or(0),
        a1,
        mean_drift: mean_all > mean_half,
        mean_exponent_half: mean_half.into(),
        mean_exponent: mean_all.into(),
        g_digits: digits.len() as u64,
        g_digit_frequency: freq.iter().map(|&c| ratio(c as usize, digits.len()).into()).collect(),
        a1_share_decreasing: share_all < share_half,
        a1_share_half: share_half.into(),
        a1_share: share_all.into(),
        a1_zero_frequency: (a1_zero.1 > 0).then(|| Rational::new(a1_zero.0.into(), a1_zero.1.into()).into()),
        orbit_low_frequency: ratio(low, n).into(),
        orbit_low_target: (variant == Ex36Variant::I)
            .then(|| (&gr + (Rational::from_integer(1.into()) - &gr) * d1).into()),
        checkpoints,
    }
}

/// `q_n = g^{a_n}`; base-`g` digits are 0 on blocks with `a_m = a_1` and uniform elsewhere.
pub fn build_ex36i(g: u64, k_max: u64, seed: u64, n: usize) -> Result<Construction> {
    check(g, n)?;
    let mut rng = SplitMix64::new(seed);
    let exps = exponents(k_max, n, &mut rng)?;
    let a1 = exps[0];
    let mut digits = Vec::with_capacity(exps.iter().map(|&a| a as usize).sum());
    for &a in &exps {
        for _ in 0..a {
            digits.push(if a == a1 { 0 } else { rng.below(g) as u8 });
        }
    }
    let diag = summarize(Ex36Variant::I, g, k_max, &exps, &digits, Vec::new());
    Ok(Construction {
        spec: ConstructionSpec::Ex36i { g, k_max, seed, n },
        output: ConstructionOutput::GPower { g, exponents: exps, g_digits: digits },
        diagnostics: Diagnostics::Ex36(diag),
    })
}

/// Uniform digits, except that blocks of bases unseen before `N_m` are zeroed
/// until the weight of unseen bases beats `m` times the rest.
pub fn build_ex36ii(g: u64, k_max: u64, seed: u64, n: usize) -> Result<Construction> {
    check(g, n)?;
    let mut rng = SplitMix64::new(seed);
    let exps = exponents(k_max, n, &mut rng)?;
    let mut digits: Vec<u8> = Vec::with_capacity(exps.iter().map(|&a| a as usize).sum());
    let mut seen: HashSet<u32> = HashSet::new();
    let mut weight: HashMap<u32, u64> = HashMap::new();
    let mut checkpoints = Vec::new();
    let (mut zeros, mut nonzeros) = (0u64, 0u64);
    let mut m = 1usize;
    // weight on seen and unseen bases over the whole prefix
    let (mut inside, mut outside) = (0u64, 0u64);
    for (t, &a) in exps.iter().enumerate() {
        let fresh = t > 0 && !seen.contains(&a);
        for _ in 0..a {
            let d = if fresh { 0 } else { rng.below(g) as u8 };
            if d == 0 {
                zeros += 1;
            } else {
                nonzeros += 1;
            }
            digits.push(d);
        }
        *weight.entry(a).or_default() += a as u64;
        if t == 0 {
            seen.insert(a);
            inside += a as u64;
            continue;
        }
        if fresh {
            outside += a as u64;
        } else {
            inside += a as u64;
        }
        if (inside as u128) * (m as u128) < outside as u128 {
            checkpoints.push(Ex36Checkpoint {
                m,
                n_prime: t + 1,
                g_position: digits.len() as u64,
                zeros,
                nonzeros,
                zero_ratio: if nonzeros == 0 { f64::MAX } else { zeros as f64 / nonzeros as f64 },
                exceeds_m: zeros > (m as u64) * nonzeros,
            });
            m += 1;
            seen.extend(weight.keys().copied());
            inside += outside;
            outside = 0;
        }
    }
    let diag = summarize(Ex36Variant::Ii, g, k_max, &exps, &digits, checkpoints);
    Ok(Construction {
        spec: ConstructionSpec::Ex36ii { g, k_max, seed, n },
        output: ConstructionOutput::GPower { g, exponents: exps, g_digits: digits },
        diagnostics: Diagnostics::Ex36(diag),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(c: &Construction) -> &Ex36Diagnostics {
        match &c.diagnostics {
            Diagnostics::Ex36(d) => d,
            _ => panic!("wrong diagnostics"),
        }
    }

    #[test]
    fn variant_i_zero_blocks() {
        let c = build_ex36i(2, 1 << 10, 3, 20_000).unwrap();
        let d = diag(&c);
        assert_eq!(d.a1_zero_frequency.as_ref().unwrap().to_rational().unwrap(), Rational::from_integer(1.into()));
        let ConstructionOutput::GPower { exponents, g_digits, .. } = &c.output else { panic!() };
        assert_eq!(g_digits.len() as u64, exponents.iter().map(|&a| a as u64).sum::<u64>());
    }

    #[test]
    fn variant_ii_checkpoints_exceed_m() {
        let c = build_ex36ii(2, 1 << 16, 11, 200_000).unwrap();
        let d = diag(&c);
        assert!(!d.checkpoints.is_empty());
        for cp in &d.checkpoints {
            assert!(cp.exceeds_m, "{cp:?}");
        }
    }

    #[test]
    fn reruns_identical() {
        let a = build_ex36ii(3, 1000, 5, 5000).unwrap();
        let b = build_ex36ii(3, 1000, 5, 5000).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(build_ex36i(1, 10, 0, 10).is_err());
    }
}
