//! Executable counterexample constructions and periodic rebasing.
//!
//! Each builder is a pure function of its specification: the same spec and
//! seed give bit-identical output.

mod gpower;
mod splitting;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use gpower::{build_ex36i, build_ex36ii, Ex36Checkpoint, Ex36Diagnostics, Ex36Variant};
pub use splitting::{build_ex31, build_ex32, build_ex35, Ex35Diagnostics, SplitDiagnostics};

use crate::distribution::OrbitSample;
use crate::error::{Error, Result};
use crate::expansion::CantorReal;
use crate::generators::{concatenation_digits, ConcatKind};
use crate::rational::{self, Rational};
use crate::rng::SplitMix64;

/// Default truncation of the heavy-tailed exponent law.
pub const DEFAULT_K_MAX: u64 = 1 << 16;

/// A stream of base-`G` digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DigitSource {
    /// Champernowne's concatenation `1, 2, 3, …` written in base `G`.
    Champernowne,
    Digits { digits: Vec<u64> },
    Random { seed: u64 },
}

impl Default for DigitSource {
    fn default() -> Self {
        DigitSource::Champernowne
    }
}

impl DigitSource {
    pub fn take(&self, base: u64, count: usize) -> Result<Vec<u64>> {
        match self {
            DigitSource::Champernowne => Ok(concatenation_digits(ConcatKind::Champernowne, base, count)),
            DigitSource::Digits { digits } => {
                if digits.len() < count {
                    return Err(Error::SourceExhausted { needed: count, available: digits.len() });
                }
                if let Some((i, &d)) = digits.iter().enumerate().take(count).find(|(_, &d)| d >= base) {
                    return Err(Error::InadmissibleDigit { position: i + 1, digit: d, base });
                }
                Ok(digits[..count].to_vec())
            }
            DigitSource::Random { seed } => {
                let mut rng = SplitMix64::new(*seed);
                Ok((0..count).map(|_| rng.below(base)).collect())
            }
        }
    }
}

fn default_k_max() -> u64 {
    DEFAULT_K_MAX
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionSpec {
    Ex31 {
        #[serde(default)]
        y4: DigitSource,
        n: usize,
    },
    Ex32 {
        #[serde(default)]
        y4: DigitSource,
        n: usize,
        #[serde(default, with = "rational::serde_str_opt")]
        c: Option<Rational>,
    },
    Ex35 {
        a: u64,
        b: u64,
        #[serde(with = "rational::serde_str")]
        eps: Rational,
        seed: u64,
        n: usize,
    },
    Ex36i {
        g: u64,
        #[serde(default = "default_k_max")]
        k_max: u64,
        seed: u64,
        n: usize,
    },
    Ex36ii {
        g: u64,
        #[serde(default = "default_k_max")]
        k_max: u64,
        seed: u64,
        n: usize,
    },
    Rebase {
        #[serde(default)]
        source: DigitSource,
        source_base: u64,
        pattern: Vec<u64>,
        /// Number of source digits.
        n: usize,
    },
}

impl ConstructionSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ConstructionSpec::Ex31 { .. } => "ex31",
            ConstructionSpec::Ex32 { .. } => "ex32",
            ConstructionSpec::Ex35 { .. } => "ex35",
            ConstructionSpec::Ex36i { .. } => "ex36i",
            ConstructionSpec::Ex36ii { .. } => "ex36ii",
            ConstructionSpec::Rebase { .. } => "rebase",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ConstructionOutput {
    /// Bases `q_n` and digits `x_n` of `y = Σ x_n / (q_1···q_n)`.
    Cantor { bases: Vec<u64>, digits: Vec<u64> },
    /// `q_n = g^{a_n}` and the base-`g` digit stream of `y`.
    GPower { g: u64, exponents: Vec<u32>, g_digits: Vec<u8> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostics {
    Split(SplitDiagnostics),
    Ex35(Ex35Diagnostics),
    Ex36(Ex36Diagnostics),
    Rebase { source_base: u64, pattern: Vec<u64>, source_digits: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Construction {
    pub spec: ConstructionSpec,
    pub output: ConstructionOutput,
    pub diagnostics: Diagnostics,
}

impl Construction {
    pub fn bases(&self) -> Option<&[u64]> {
        match &self.output {
            ConstructionOutput::Cantor { bases, .. } => Some(bases),
            ConstructionOutput::GPower { .. } => None,
        }
    }

    pub fn digits(&self) -> Option<&[u64]> {
        match &self.output {
            ConstructionOutput::Cantor { digits, .. } => Some(digits),
            ConstructionOutput::GPower { .. } => None,
        }
    }

    pub fn cantor_real(&self) -> Result<CantorReal> {
        match &self.output {
            ConstructionOutput::Cantor { bases, digits } => CantorReal::explicit(digits.clone(), bases.clone()),
            ConstructionOutput::GPower { .. } => {
                Err(Error::UnsupportedModel("g-power output has no bounded-base expansion".into()))
            }
        }
    }

    /// Orbit points `n = 0..` for every `n` whose remaining digits reach width `eps`.
    pub fn orbit_sample(&self, eps: &Rational) -> Result<OrbitSample> {
        let ConstructionOutput::Cantor { bases, digits } = &self.output else {
            return Err(Error::UnsupportedModel("g-power output has no bounded-base expansion".into()));
        };
        if !eps.is_positive() {
            return Err(Error::BadParams("eps must be positive".into()));
        }
        // bases are at least 2, so this many trailing digits always suffice
        let mut guard = 0usize;
        let mut w = Rational::one();
        while &w > eps {
            w /= Rational::from_integer(2.into());
            guard += 1;
        }
        let count = digits.len().min(bases.len()).saturating_sub(guard);
        let y = self.cantor_real()?;
        OrbitSample::from_orbit(&y, count, eps)
    }
}

pub fn build(spec: &ConstructionSpec) -> Result<Construction> {
    match spec {
        ConstructionSpec::Ex31 { y4, n } => build_ex31(y4, *n),
        ConstructionSpec::Ex32 { y4, n, c } => build_ex32(y4, *n, c.as_ref()),
        ConstructionSpec::Ex35 { a, b, eps, seed, n } => build_ex35(*a, *b, eps, *seed, *n),
        ConstructionSpec::Ex36i { g, k_max, seed, n } => build_ex36i(*g, *k_max, *seed, *n),
        ConstructionSpec::Ex36ii { g, k_max, seed, n } => build_ex36ii(*g, *k_max, *seed, *n),
        ConstructionSpec::Rebase { source, source_base, pattern, n } => {
            let digits = source.take(*source_base, *n)?;
            let (bases, out) = rebase(&digits, *source_base, pattern)?;
            Ok(Construction {
                spec: spec.clone(),
                output: ConstructionOutput::Cantor { bases, digits: out },
                diagnostics: Diagnostics::Rebase {
                    source_base: *source_base,
                    pattern: pattern.clone(),
                    source_digits: *n,
                },
            })
        }
    }
}

/// Mixed-radix digits of `d` for `pattern`, most significant first.
pub fn rebase_digit(d: u64, pattern: &[u64]) -> Vec<u64> {
    let mut out = vec![0; pattern.len()];
    let mut v = d;
    for (slot, &p) in out.iter_mut().zip(pattern).rev() {
        *slot = v % p;
        v /= p;
    }
    out
}

/// Rewrites base-`G` digits as digits of the periodic basic sequence `pattern`.
///
/// Returns `(bases, digits)`, both of length `digits.len() · pattern.len()`.
pub fn rebase(digits: &[u64], source_base: u64, pattern: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    if pattern.is_empty() || pattern.iter().any(|&p| p < 2) {
        return Err(Error::BadParams("pattern bases must be at least 2".into()));
    }
    let product = pattern.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p));
    if product != Some(source_base) {
        return Err(Error::MismatchedRadix { pattern_product: product.unwrap_or(u64::MAX), source_base });
    }
    let mut bases = Vec::with_capacity(digits.len() * pattern.len());
    let mut out = Vec::with_capacity(digits.len() * pattern.len());
    for (i, &d) in digits.iter().enumerate() {
        if d >= source_base {
            return Err(Error::InadmissibleDigit { position: i + 1, digit: d, base: source_base });
        }
        bases.extend_from_slice(pattern);
        out.extend(rebase_digit(d, pattern));
    }
    Ok((bases, out))
}

pub(crate) fn ratio(num: usize, den: usize) -> Rational {
    if den == 0 {
        Rational::zero()
    } else {
        Rational::new(num.into(), den.into())
    }
}
