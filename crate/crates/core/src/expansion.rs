//! Digits, values and orbit points of Cantor series expansions.
//!
//! For `x = p/d` the greedy digits are `x_i = ⌊q_i r_{i-1}⌋` with remainders
//! `r_i = q_i r_{i-1} − x_i`; keeping only the numerator of `r_i` over the
//! fixed denominator `d` turns this into modular integer arithmetic, and the
//! orbit point `q_n···q_1 x mod 1` is exactly `r_n`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

fn split_unit(x: &Rational) -> Result<(BigUint, BigUint)> {
    if !rational::in_unit_interval(x) {
        return Err(Error::OutOfRange(format!("{x} is not in [0,1)")));
    }
    let p = x.numer().to_biguint().expect("nonnegative");
    let d = x.denom().to_biguint().expect("positive");
    Ok((p, d))
}

fn need_bases(q: &[u64], n: usize) -> Result<()> {
    if q.len() < n {
        return Err(Error::SourceExhausted { needed: n, available: q.len() });
    }
    Ok(())
}

/// Remainder numerators `r_0 = p, r_i = q_i r_{i-1} mod d`, calling `f(i, digit, r_i)`.
fn walk(p: &BigUint, d: &BigUint, q: &[u64], mut f: impl FnMut(usize, u64, &BigUint)) {
    if let (Some(mut r), Some(dd)) = (p.to_u64(), d.to_u64()) {
        let dd = dd as u128;
        for (i, &qi) in q.iter().enumerate() {
            let t = qi as u128 * r as u128;
            let digit = (t / dd) as u64;
            r = (t % dd) as u64;
            f(i + 1, digit, &BigUint::from(r));
        }
    } else {
        let mut r = p.clone();
        for (i, &qi) in q.iter().enumerate() {
            let (digit, rem) = (r * qi).div_rem(d);
            r = rem;
            f(i + 1, digit.to_u64().expect("digit below q_i"), &r);
        }
    }
}

/// The first `n` digits of `x ∈ [0,1)`; terminating expansions end in zeros.
pub fn digits_of(x: &Rational, q: &[u64], n: usize) -> Result<Vec<u64>> {
    let (p, d) = split_unit(x)?;
    need_bases(q, n)?;
    let mut out = Vec::with_capacity(n);
    walk(&p, &d, &q[..n], |_, digit, _| out.push(digit));
    Ok(out)
}

/// `(num, den)` with `Σ x_i/(q_1···q_i) = num/den` and `den = q_1···q_n`.
fn partial_sum(digits: &[u64], q: &[u64]) -> (BigUint, BigUint) {
    match digits.len() {
        0 => (BigUint::zero(), BigUint::one()),
        n if n <= 32 => {
            let mut num = BigUint::zero();
            let mut den = BigUint::one();
            for (&x, &b) in digits.iter().zip(q) {
                num = num * b + x;
                den *= b;
            }
            (num, den)
        }
        n => {
            let (ln, ld) = partial_sum(&digits[..n / 2], &q[..n / 2]);
            let (rn, rd) = partial_sum(&digits[n / 2..], &q[n / 2..]);
            (ln * &rd + rn, ld * rd)
        }
    }
}

pub fn check_admissible(digits: &[u64], q: &[u64]) -> Result<()> {
    need_bases(q, digits.len())?;
    for (i, (&x, &b)) in digits.iter().zip(q).enumerate() {
        if x >= b {
            return Err(Error::InadmissibleDigit { position: i + 1, digit: x, base: b });
        }
    }
    Ok(())
}

/// `Σ_{i ≤ n} x_i / (q_1···q_i)`.
pub fn value_of(digits: &[u64], q: &[u64], n: usize) -> Result<Rational> {
    if digits.len() < n {
        return Err(Error::SourceExhausted { needed: n, available: digits.len() });
    }
    check_admissible(&digits[..n], q)?;
    let (num, den) = partial_sum(&digits[..n], &q[..n]);
    Ok(rational::from_ratio_u(&num, &den))
}

/// `q_n···q_1 x mod 1`, by modular reduction of the numerator.
pub fn orbit_point(x: &Rational, q: &[u64], n: usize) -> Result<Rational> {
    let (p, d) = split_unit(x)?;
    need_bases(q, n)?;
    let mut last = p.clone();
    walk(&p, &d, &q[..n], |_, _, r| last = r.clone());
    Ok(rational::from_ratio_u(&last, &d))
}

/// Orbit numerators `r_0..=r_n` over the common denominator of `x`.
pub fn orbit_numerators(x: &Rational, q: &[u64], n: usize) -> Result<(Vec<BigUint>, BigUint)> {
    let (p, d) = split_unit(x)?;
    need_bases(q, n)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(p.clone());
    walk(&p, &d, &q[..n], |_, _, r| out.push(r.clone()));
    Ok((out, d))
}

/// Half-open `[lo, hi)` containing the orbit point after `n` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitInterval {
    pub lo: Rational,
    pub hi: Rational,
    /// Number of tail digits used.
    pub digits_used: usize,
}

impl OrbitInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v < &self.hi
    }
}

/// Brackets `q_n···q_1 x mod 1` using the digits after position `n`.
///
/// `digits` and `q` are full prefixes starting at position 1. The interval
/// is `[Σ_{i≤m} x_{n+i}/(q_{n+1}···q_{n+i}), that + 1/(q_{n+1}···q_{n+m}))`
/// for the least `m` whose width is at most `eps`.
pub fn orbit_interval_from_digits(digits: &[u64], q: &[u64], n: usize, eps: &Rational) -> Result<OrbitInterval> {
    if !eps.is_positive() {
        return Err(Error::BadParams("eps must be positive".into()));
    }
    let avail = digits.len().min(q.len());
    let mut num = BigUint::zero();
    let mut den = BigUint::one();
    let mut m = 0usize;
    let eps_num = eps.numer().to_biguint().expect("positive");
    let eps_den = eps.denom().to_biguint().expect("positive");
    // width 1/den ≤ eps_num/eps_den  ⇔  eps_den ≤ eps_num·den
    while eps_den > &eps_num * &den {
        let i = n + m;
        if i >= avail {
            return Err(Error::PrecisionUnreachable(format!(
                "{} digits after position {n} give width 1/{den}, need ≤ {eps}",
                m
            )));
        }
        let (x, b) = (digits[i], q[i]);
        if x >= b {
            return Err(Error::InadmissibleDigit { position: i + 1, digit: x, base: b });
        }
        num = num * b + x;
        den *= b;
        m += 1;
    }
    let lo = rational::from_ratio_u(&num, &den);
    let hi = rational::from_ratio_u(&(num + 1u32), &den);
    Ok(OrbitInterval { lo, hi, digits_used: m })
}

/// What follows a finite digit list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    Zeros,
    /// `x_i = q_i − 1` for every later position.
    AllMax,
}

/// Rewrites a digit list so that it is the canonical expansion of the same
/// value, carrying an all-maximal tail into the terminating form. The result
/// has the same length and is followed by zeros.
///
/// Fails with `OutOfRange` when every digit is maximal (the value is 1).
pub fn canonicalize(digits: &[u64], q: &[u64], tail: Tail) -> Result<Vec<u64>> {
    check_admissible(digits, q)?;
    let mut out = digits.to_vec();
    if tail == Tail::Zeros {
        return Ok(out);
    }
    // add 1/(q_1···q_n): propagate a carry from the last position
    for i in (0..out.len()).rev() {
        if out[i] + 1 < q[i] {
            out[i] += 1;
            return Ok(out);
        }
        out[i] = 0;
    }
    Err(Error::OutOfRange("an all-maximal expansion has value 1".into()))
}

/// Procedural digit rule: `f(i, q_i)` is the digit at 1-based position `i`.
pub type DigitFn = Arc<dyn Fn(usize, u64) -> u64 + Send + Sync>;

#[derive(Clone)]
pub enum Digits {
    Exact(Rational),
    Explicit(Vec<u64>),
    Procedural(DigitFn),
}

impl std::fmt::Debug for Digits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Digits::Exact(r) => write!(f, "Exact({r})"),
            Digits::Explicit(v) => write!(f, "Explicit({} digits)", v.len()),
            Digits::Procedural(_) => f.write_str("Procedural(..)"),
        }
    }
}

/// A real number in `[0,1)` together with the basic sequence it is expanded in.
#[derive(Clone, Debug)]
pub struct CantorReal {
    pub bases: Vec<u64>,
    pub digits: Digits,
}

impl CantorReal {
    pub fn exact(x: Rational, bases: Vec<u64>) -> Result<Self> {
        split_unit(&x)?;
        Ok(CantorReal { bases, digits: Digits::Exact(x) })
    }

    pub fn explicit(digits: Vec<u64>, bases: Vec<u64>) -> Result<Self> {
        let n = digits.len().min(bases.len());
        check_admissible(&digits[..n], &bases)?;
        Ok(CantorReal { bases, digits: Digits::Explicit(digits) })
    }

    pub fn procedural(f: DigitFn, bases: Vec<u64>) -> Self {
        CantorReal { bases, digits: Digits::Procedural(f) }
    }

    /// `x_1..x_n`.
    pub fn digit_prefix(&self, n: usize) -> Result<Vec<u64>> {
        need_bases(&self.bases, n)?;
        match &self.digits {
            Digits::Exact(x) => digits_of(x, &self.bases, n),
            Digits::Explicit(v) => {
                if v.len() < n {
                    return Err(Error::SourceExhausted { needed: n, available: v.len() });
                }
                Ok(v[..n].to_vec())
            }
            Digits::Procedural(f) => {
                let v: Vec<u64> = (1..=n).map(|i| f(i, self.bases[i - 1])).collect();
                check_admissible(&v, &self.bases)?;
                Ok(v)
            }
        }
    }

    /// Exact orbit point; only for rational values.
    pub fn orbit_point(&self, n: usize) -> Result<Rational> {
        match &self.digits {
            Digits::Exact(x) => orbit_point(x, &self.bases, n),
            _ => Err(Error::PrecisionUnreachable(
                "digit-defined numbers only support interval orbit queries".into(),
            )),
        }
    }

    /// Interval of width ≤ `eps` around the orbit point after `n` steps.
    pub fn orbit_interval(&self, n: usize, eps: &Rational) -> Result<OrbitInterval> {
        match &self.digits {
            Digits::Exact(x) => {
                let lo = orbit_point(x, &self.bases, n)?;
                let hi = &lo + eps;
                Ok(OrbitInterval { lo, hi, digits_used: 0 })
            }
            _ => {
                let avail = self.bases.len();
                let digits = self.digit_prefix(avail.min(self.available_digits()))?;
                orbit_interval_from_digits(&digits, &self.bases, n, eps)
            }
        }
    }

    /// Orbit intervals for `n = 0..count`; exact values give zero-width intervals.
    pub fn orbit_intervals(&self, count: usize, eps: &Rational) -> Result<Vec<OrbitInterval>> {
        match &self.digits {
            Digits::Exact(x) => {
                let (nums, d) = orbit_numerators(x, &self.bases, count.saturating_sub(1))?;
                Ok(nums
                    .into_par_iter()
                    .take(count)
                    .map(|r| {
                        let lo = rational::from_ratio_u(&r, &d);
                        OrbitInterval { hi: lo.clone(), lo, digits_used: 0 }
                    })
                    .collect())
            }
            _ => {
                let digits = self.digit_prefix(self.bases.len().min(self.available_digits()))?;
                (0..count)
                    .into_par_iter()
                    .map(|n| orbit_interval_from_digits(&digits, &self.bases, n, eps))
                    .collect()
            }
        }
    }

    fn available_digits(&self) -> usize {
        match &self.digits {
            Digits::Explicit(v) => v.len(),
            _ => self.bases.len(),
        }
    }
}

/// `⌊q · v⌋` for a rational `v`.
pub fn floor_times(v: &Rational, q: u64) -> u64 {
    let t = v * Rational::from_integer(q.into());
    t.floor().to_integer().to_u64().expect("nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn five_sixths() {
        let q = [2, 3, 2, 3];
        assert_eq!(digits_of(&rat(5, 6), &q, 4).unwrap(), vec![1, 2, 0, 0]);
        assert_eq!(value_of(&[1, 2], &q, 2).unwrap(), rat(5, 6));
        assert_eq!(orbit_point(&rat(5, 6), &q, 2).unwrap(), rat(0, 1));
    }

    #[test]
    fn one_seventh_binary() {
        let q = [2u64; 9];
        assert_eq!(digits_of(&rat(1, 7), &q, 9).unwrap(), vec![0, 0, 1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(orbit_point(&rat(1, 3), &q, 1).unwrap(), rat(2, 3));
    }

    #[test]
    fn zero_and_range() {
        assert_eq!(digits_of(&rat(0, 1), &[5, 5, 5], 3).unwrap(), vec![0, 0, 0]);
        assert!(matches!(digits_of(&rat(1, 1), &[2], 1), Err(Error::OutOfRange(_))));
        assert!(matches!(orbit_point(&rat(-1, 2), &[2], 1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn inadmissible_digit() {
        assert!(matches!(
            value_of(&[1, 3], &[2, 3], 2),
            Err(Error::InadmissibleDigit { position: 2, digit: 3, base: 3 })
        ));
    }

    #[test]
    fn large_denominator_path() {
        let x = Rational::new(
            "123456789012345678901234567".parse().unwrap(),
            "987654321098765432109876543".parse().unwrap(),
        );
        let q: Vec<u64> = (0..200).map(|i| 2 + i % 7).collect();
        let d = digits_of(&x, &q, 200).unwrap();
        let v = value_of(&d, &q, 200).unwrap();
        let m: Rational = rational::from_ratio_u(&BigUint::one(), &q.iter().fold(BigUint::one(), |a, &b| a * b));
        assert!(v <= x && &x - &v < m);
    }

    #[test]
    fn interval_from_digits() {
        let q = [2u64; 10];
        let d = [1, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        let iv = orbit_interval_from_digits(&d, &q, 0, &rat(1, 8)).unwrap();
        assert!(iv.lo >= rat(1, 2) && iv.hi <= rat(5, 8));
        let iv = orbit_interval_from_digits(&d, &q, 0, &rat(1, 1)).unwrap();
        assert_eq!((iv.lo, iv.hi), (rat(0, 1), rat(1, 1)));
        assert!(matches!(
            orbit_interval_from_digits(&d, &q, 8, &rat(1, 16)),
            Err(Error::PrecisionUnreachable(_))
        ));
    }

    #[test]
    fn canonical_carry() {
        let q = [2u64; 4];
        assert_eq!(canonicalize(&[0, 1, 1, 1], &q, Tail::AllMax).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(canonicalize(&[0, 1, 0, 1], &q, Tail::Zeros).unwrap(), vec![0, 1, 0, 1]);
        assert!(canonicalize(&[1, 1], &q, Tail::AllMax).is_err());
        let q = [3u64, 5, 2];
        assert_eq!(canonicalize(&[1, 4, 1], &q, Tail::AllMax).unwrap(), vec![2, 0, 0]);
    }

    #[test]
    fn procedural_real() {
        let r = CantorReal::procedural(Arc::new(|i, _| (i % 2) as u64), vec![2; 20]);
        assert_eq!(r.digit_prefix(4).unwrap(), vec![1, 0, 1, 0]);
        let iv = r.orbit_interval(1, &rat(1, 1000)).unwrap();
        // orbit after one step is 0.0101..₂ = 1/3
        assert!(iv.contains(&rat(1, 3)));
        assert!(r.orbit_point(1).is_err());
    }
}
