use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::{ratio, Construction, ConstructionOutput, ConstructionSpec, Diagnostics, DigitSource};
use crate::error::{Error, Result};
use crate::rational::{rat, Exact, Rational};
use crate::rng::{Categorical, SplitMix64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitDiagnostics {
    pub steps: usize,
    /// `M(N + 1)`: bases emitted after `N` steps.
    pub bases_emitted: usize,
    pub splits: usize,
    pub m_ratio: Exact,
    pub m_ratio_target: Exact,
    /// Target orbit mass of `[0, ½)`.
    pub half_mass_target: Exact,
    /// `M(n)` for `n = 1..=N+1`.
    #[serde(skip)]
    pub step_starts: Vec<usize>,
}

/// Splits step `n` into bases `(2, 2)` when `split(n, digit, M(n))` holds, else emits base 4.
fn run_split(
    y4: &DigitSource,
    n: usize,
    split: impl Fn(usize, u64, usize) -> bool,
) -> Result<(Vec<u64>, Vec<u64>, Vec<usize>, usize)> {
    let d = y4.take(4, n)?;
    let mut bases = Vec::with_capacity(n * 3 / 2 + 2);
    let mut digits = Vec::with_capacity(n * 3 / 2 + 2);
    let mut starts = Vec::with_capacity(n + 1);
    let mut splits = 0;
    for (i, &di) in d.iter().enumerate() {
        starts.push(bases.len());
        if split(i + 1, di, bases.len()) {
            // d/4 = x/2 + x'/4 with x = ⌊d/2⌋, x' = d mod 2
            bases.extend([2, 2]);
            digits.extend([di / 2, di % 2]);
            splits += 1;
        } else {
            bases.push(4);
            digits.push(di);
        }
    }
    starts.push(bases.len());
    Ok((bases, digits, starts, splits))
}

fn diagnostics(n: usize, bases: usize, splits: usize, target: Rational, half: Rational, starts: Vec<usize>) -> SplitDiagnostics {
    SplitDiagnostics {
        steps: n,
        bases_emitted: bases,
        splits,
        m_ratio: ratio(bases, n).into(),
        m_ratio_target: target.into(),
        half_mass_target: half.into(),
        step_starts: starts,
    }
}

/// Splits whenever `4^{n−1} y mod 1 ∈ [½, 1)`, i.e. the `n`-th base-4 digit is 2 or 3.
pub fn build_ex31(y4: &DigitSource, n: usize) -> Result<Construction> {
    let (bases, digits, starts, splits) = run_split(y4, n, |_, d, _| d >= 2)?;
    let diag = diagnostics(n, bases.len(), splits, rat(3, 2), rat(1, 2), starts);
    Ok(Construction {
        spec: ConstructionSpec::Ex31 { y4: y4.clone(), n },
        output: ConstructionOutput::Cantor { bases, digits },
        diagnostics: Diagnostics::Split(diag),
    })
}

/// Splits when `4^{n−1} y mod 1 ∈ [¼, ½)`; with `c`, only while also `M(n) < c·n`.
pub fn build_ex32(y4: &DigitSource, n: usize, c: Option<&Rational>) -> Result<Construction> {
    if let Some(c) = c {
        if c <= &Rational::one() || c >= &rat(5, 4) {
            return Err(Error::BadParams(format!("C must lie in (1, 5/4), got {c}")));
        }
    }
    let (bases, digits, starts, splits) = match c {
        None => run_split(y4, n, |_, d, _| d == 1)?,
        Some(c) => {
            let (num, den) = (c.numer().clone(), c.denom().clone());
            run_split(y4, n, move |step, d, m| d == 1 && num_bigint::BigInt::from(m) * &den < &num * step)?
        }
    };
    let (target, half) = match c {
        None => (rat(5, 4), rat(2, 5)),
        Some(c) => (c.clone(), (c * rat(2, 1)).recip()),
    };
    let diag = diagnostics(n, bases.len(), splits, target, half, starts);
    Ok(Construction {
        spec: ConstructionSpec::Ex32 { y4: y4.clone(), n, c: c.cloned() },
        output: ConstructionOutput::Cantor { bases, digits },
        diagnostics: Diagnostics::Split(diag),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ex35Diagnostics {
    pub a: u64,
    pub b: u64,
    pub eps: Exact,
    pub n: usize,
    pub digit0_frequency: Exact,
    /// `(a + b) / (2ab)`.
    pub digit0_target: Exact,
    /// Fraction of `n ∈ [0, N−1]` with `q_n···q_1 y mod 1 ∈ [0, 1/a)`; needs `a | b`.
    pub orbit_low_frequency: Option<Exact>,
    /// `1/a + ε/2`.
    pub orbit_low_target: Exact,
}

/// Digit laws for a base `q ∈ {a, b}`: digits 0 and 1 tilted by `±ε`, the rest uniform.
fn tilted(q: u64, eps: &Rational, plus_on_zero: bool) -> Result<Categorical> {
    let base = Rational::new(1.into(), q.into());
    let (w0, w1) = if plus_on_zero { (&base + eps, &base - eps) } else { (&base - eps, &base + eps) };
    let mut w = vec![w0, w1];
    w.extend(std::iter::repeat(base).take(q as usize - 2));
    Categorical::new(&w)
}

/// `q_n` uniform on `{a, b}`; digit law tilted towards 0 under `a` and towards 1 under `b`.
pub fn build_ex35(a: u64, b: u64, eps: &Rational, seed: u64, n: usize) -> Result<Construction> {
    if a < 2 || a >= b {
        return Err(Error::BadParams(format!("need 2 ≤ a < b, got a={a}, b={b}")));
    }
    if eps.is_negative() || eps > &Rational::new(1.into(), b.into()) {
        return Err(Error::BadParams(format!("eps must lie in [0, 1/b], got {eps}")));
    }
    let law_a = tilted(a, eps, true)?;
    let law_b = tilted(b, eps, false)?;
    let mut rng = SplitMix64::new(seed);
    let mut bases = Vec::with_capacity(n);
    let mut digits = Vec::with_capacity(n);
    for _ in 0..n {
        let (q, law) = if rng.below(2) == 0 { (a, &law_a) } else { (b, &law_b) };
        bases.push(q);
        digits.push(law.sample(&mut rng) as u64);
    }
    let zeros = digits.iter().filter(|&&d| d == 0).count();
    let orbit_low = (b % a == 0).then(|| {
        // q_n···q_1 y < 1/a  ⇔  x_{n+1} < q_{n+1}/a when a | q_{n+1}
        let low = bases.iter().zip(&digits).filter(|(&q, &x)| x < q / a).count();
        Exact::from(ratio(low, n))
    });
    let diag = Ex35Diagnostics {
        a,
        b,
        eps: eps.into(),
        n,
        digit0_frequency: ratio(zeros, n).into(),
        digit0_target: Rational::new((a + b).into(), (2 * a * b).into()).into(),
        orbit_low_frequency: orbit_low,
        orbit_low_target: (Rational::new(1.into(), a.into()) + eps * rat(1, 2)).into(),
    };
    Ok(Construction {
        spec: ConstructionSpec::Ex35 { a, b, eps: eps.clone(), seed, n },
        output: ConstructionOutput::Cantor { bases, digits },
        diagnostics: Diagnostics::Ex35(diag),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::value_of;

    #[test]
    fn ex31_branch_rule_small() {
        let y4 = DigitSource::Digits { digits: vec![2, 0, 3, 1, 1, 2] };
        let c = build_ex31(&y4, 6).unwrap();
        assert_eq!(c.bases().unwrap(), &[2, 2, 4, 2, 2, 4, 4, 2, 2]);
        assert_eq!(c.digits().unwrap(), &[1, 0, 0, 1, 1, 1, 1, 1, 0]);
        let q4 = vec![4u64; 6];
        assert_eq!(
            value_of(c.digits().unwrap(), c.bases().unwrap(), 9).unwrap(),
            value_of(&[2, 0, 3, 1, 1, 2], &q4, 6).unwrap()
        );
    }

    #[test]
    fn ex32_variant_threshold() {
        let y4 = DigitSource::Digits { digits: vec![1; 40] };
        let c = build_ex32(&y4, 40, Some(&rat(9, 8))).unwrap();
        let Diagnostics::Split(d) = &c.diagnostics else { panic!() };
        for (i, w) in d.step_starts.windows(2).enumerate() {
            let n = i + 1;
            let split = w[1] - w[0] == 2;
            assert_eq!(split, (w[0] as u64) * 8 < 9 * n as u64, "step {n}");
        }
        assert!(build_ex32(&y4, 4, Some(&rat(5, 4))).is_err());
    }

    #[test]
    fn ex35_deterministic_and_valid() {
        let a = build_ex35(2, 4, &rat(1, 4), 7, 1000).unwrap();
        let b = build_ex35(2, 4, &rat(1, 4), 7, 1000).unwrap();
        assert_eq!(a.digits(), b.digits());
        for (&q, &x) in a.bases().unwrap().iter().zip(a.digits().unwrap()) {
            assert!(x < q);
            // ε = 1/b removes digit 0 under b
            assert!(!(q == 4 && x == 0));
        }
        assert!(build_ex35(2, 4, &rat(1, 3), 7, 10).is_err());
        assert!(build_ex35(2, 4, &rat(0, 1), 7, 10).is_ok());
    }
}
