use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::concat::ConcatKind;
use super::substitution::DEFAULT_T_MAX;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Rotation number: a rational convergent standing in for an irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    /// Convergent of `(√5 − 1)/2` with denominator above `10^17`.
    Golden,
    /// Convergent of `√2 − 1` with denominator above `10^17`.
    Sqrt2,
    Rational { num: u128, den: u128 },
}

const PRESET_MIN_DEN: u128 = 100_000_000_000_000_000;

impl Alpha {
    /// `(p, d)` with `0 ≤ p < d` and `gcd(p, d) = 1`.
    pub fn fraction(&self) -> Result<(u128, u128)> {
        match *self {
            Alpha::Golden => {
                // F_k / F_{k+1}
                let (mut a, mut b) = (1u128, 1u128);
                while b <= PRESET_MIN_DEN {
                    (a, b) = (b, a + b);
                }
                Ok((a, b))
            }
            Alpha::Sqrt2 => {
                // p/q → √2 with p² − 2q² = ±1
                let (mut p, mut q) = (1u128, 1u128);
                while q <= PRESET_MIN_DEN {
                    (p, q) = (p + 2 * q, p + q);
                }
                Ok((p - q, q))
            }
            Alpha::Rational { num, den } => {
                if den == 0 || num >= den {
                    return Err(Error::InvalidSpec(format!("alpha {num}/{den} must lie in [0,1)")));
                }
                let g = num.gcd(&den);
                Ok((num / g, den / g))
            }
        }
    }

    pub fn to_rational(&self) -> Result<Rational> {
        let (p, d) = self.fraction()?;
        Ok(rational::from_u128(p, d))
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Golden => f.write_str("golden"),
            Alpha::Sqrt2 => f.write_str("sqrt2"),
            Alpha::Rational { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "golden" => Ok(Alpha::Golden),
            "sqrt2" => Ok(Alpha::Sqrt2),
            other => {
                let r = rational::parse_rational(other)?;
                let num = r.numer().to_u128();
                let den = r.denom().to_u128();
                match (num, den) {
                    (Some(num), Some(den)) => {
                        let a = Alpha::Rational { num, den };
                        a.fraction()?;
                        Ok(a)
                    }
                    _ => Err(Error::InvalidSpec(format!("alpha {other:?} must lie in [0,1) with a 128-bit denominator"))),
                }
            }
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A coding cell `[lo, hi)` carrying a base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    pub base: u64,
}

fn default_max_power() -> u32 {
    DEFAULT_T_MAX
}

fn default_non_ergodic_bases() -> [u64; 3] {
    [2, 3, 4]
}

/// How a basic sequence is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Periodic {
        pattern: Vec<u64>,
    },
    /// `q_n = f(start + nα)` with `f` constant on each cell.
    RotationCoding {
        alpha: Alpha,
        #[serde(default, with = "rational::serde_str_opt", skip_serializing_if = "Option::is_none")]
        start: Option<Rational>,
        cells: Vec<Cell>,
    },
    /// `q_n = bases[0]` if `{nα} ≥ {n²α}`, else `bases[1]`.
    NilCoding {
        alpha: Alpha,
        bases: [u64; 2],
    },
    Substitution {
        rules: BTreeMap<char, String>,
        base_of: BTreeMap<char, u64>,
        start: char,
        #[serde(default = "default_max_power")]
        max_power: u32,
    },
    Concatenation {
        sequence: ConcatKind,
        base: u64,
        #[serde(default)]
        digit_offset: u64,
    },
    Bernoulli {
        alphabet: Vec<u64>,
        #[serde(with = "rational::serde_str_vec")]
        weights: Vec<Rational>,
        seed: u64,
    },
    /// `(abc)^1 (bac)^1 (abc)^2 (bac)^2 ...` with letters mapped to `base_of`.
    NonErgodicWord {
        #[serde(default = "default_non_ergodic_bases")]
        base_of: [u64; 3],
    },
    File {
        path: PathBuf,
    },
}

/// `ceil(r · m)` for `r ∈ [0, 1]`.
pub(crate) fn ceil_scaled(r: &Rational, m: u128) -> Result<u128> {
    (r * Rational::from_integer(BigInt::from(m)))
        .ceil()
        .to_integer()
        .to_u128()
        .ok_or_else(|| Error::InvalidSpec(format!("cell endpoint {r} outside [0,1]")))
}

fn check_base(b: u64, what: &str) -> Result<()> {
    if b < 2 {
        return Err(Error::InvalidSpec(format!("{what}: base {b} is below 2")));
    }
    Ok(())
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(Error::InvalidSpec("periodic pattern is empty".into()));
                }
                pattern.iter().try_for_each(|&b| check_base(b, "pattern"))
            }
            GeneratorSpec::RotationCoding { alpha, start, cells } => {
                alpha.fraction()?;
                if let Some(s) = start {
                    if !rational::in_unit_interval(s) {
                        return Err(Error::InvalidSpec(format!("start {s} outside [0,1)")));
                    }
                }
                if cells.is_empty() {
                    return Err(Error::InvalidSpec("no coding cells".into()));
                }
                let mut edge = Rational::zero();
                for c in cells {
                    check_base(c.base, "cell")?;
                    if c.lo != edge || c.hi <= c.lo {
                        return Err(Error::InvalidSpec(format!(
                            "cells must partition [0,1) in order; got [{}, {}) after {}",
                            c.lo, c.hi, edge
                        )));
                    }
                    edge = c.hi.clone();
                }
                if !edge.is_one() {
                    return Err(Error::InvalidSpec(format!("cells end at {edge}, not 1")));
                }
                Ok(())
            }
            GeneratorSpec::NilCoding { alpha, bases } => {
                alpha.fraction()?;
                bases.iter().try_for_each(|&b| check_base(b, "nil coding"))
            }
            GeneratorSpec::Substitution { rules, base_of, .. } => {
                base_of.values().try_for_each(|&b| check_base(b, "substitution"))?;
                if rules.values().any(|w| w.is_empty()) {
                    return Err(Error::InvalidSpec("substitution image is empty".into()));
                }
                Ok(())
            }
            GeneratorSpec::Concatenation { base, digit_offset, .. } => {
                if *base < 2 {
                    return Err(Error::InvalidSpec("concatenation base must be at least 2".into()));
                }
                if *digit_offset < 2 && !matches!(self, GeneratorSpec::Concatenation { sequence: ConcatKind::Aks, .. }) {
                    return Err(Error::InvalidSpec("digit offset below 2 would emit bases below 2".into()));
                }
                if *digit_offset < 1 {
                    return Err(Error::InvalidSpec("partial quotients need an offset of at least 1".into()));
                }
                Ok(())
            }
            GeneratorSpec::Bernoulli { alphabet, weights, .. } => {
                if alphabet.is_empty() || alphabet.len() != weights.len() {
                    return Err(Error::InvalidSpec("alphabet and weights must be nonempty and of equal length".into()));
                }
                alphabet.iter().try_for_each(|&b| check_base(b, "bernoulli"))?;
                if weights.iter().any(|w| !w.is_positive()) {
                    return Err(Error::InvalidSpec("weights must be positive".into()));
                }
                let total: Rational = weights.iter().sum();
                if !total.is_one() {
                    return Err(Error::InvalidSpec(format!("weights sum to {total}, not 1")));
                }
                Ok(())
            }
            GeneratorSpec::NonErgodicWord { base_of } => base_of.iter().try_for_each(|&b| check_base(b, "word")),
            GeneratorSpec::File { .. } => Ok(()),
        }
    }

    fn substitution(pairs: &[(char, &str)], bases: &[(char, u64)]) -> Self {
        GeneratorSpec::Substitution {
            rules: pairs.iter().map(|&(c, s)| (c, s.to_string())).collect(),
            base_of: bases.iter().copied().collect(),
            start: 'a',
            max_power: DEFAULT_T_MAX,
        }
    }

    pub fn thue_morse(a: u64, b: u64) -> Self {
        Self::substitution(&[('a', "ab"), ('b', "ba")], &[('a', a), ('b', b)])
    }

    pub fn fibonacci(a: u64, b: u64) -> Self {
        Self::substitution(&[('a', "ab"), ('b', "bab")], &[('a', a), ('b', b)])
    }

    pub fn rudin_shapiro(bases: [u64; 4]) -> Self {
        Self::substitution(
            &[('a', "ab"), ('b', "ac"), ('c', "db"), ('d', "dc")],
            &[('a', bases[0]), ('b', bases[1]), ('c', bases[2]), ('d', bases[3])],
        )
    }

    /// Golden rotation with cells `[0, 1−α) → 2` and `[1−α, 1) → 3`.
    pub fn sturmian_golden() -> Self {
        let alpha = Alpha::Golden;
        let a = alpha.to_rational().expect("preset");
        let cut = Rational::one() - a;
        GeneratorSpec::RotationCoding {
            alpha,
            start: None,
            cells: vec![
                Cell { lo: Rational::zero(), hi: cut.clone(), base: 2 },
                Cell { lo: cut, hi: Rational::one(), base: 3 },
            ],
        }
    }

    /// Golden rotation with `f = a` on `[0, ½)` and `b` on `[½, 1)`.
    pub fn rotation_half(alpha: Alpha, a: u64, b: u64) -> Self {
        let half = rational::rat(1, 2);
        GeneratorSpec::RotationCoding {
            alpha,
            start: None,
            cells: vec![
                Cell { lo: Rational::zero(), hi: half.clone(), base: a },
                Cell { lo: half, hi: Rational::one(), base: b },
            ],
        }
    }

    pub fn nil_golden(a: u64, b: u64) -> Self {
        GeneratorSpec::NilCoding { alpha: Alpha::Golden, bases: [a, b] }
    }

    pub fn champernowne(base: u64, digit_offset: u64) -> Self {
        GeneratorSpec::Concatenation { sequence: ConcatKind::Champernowne, base, digit_offset }
    }

    pub fn uniform_bernoulli(alphabet: Vec<u64>, seed: u64) -> Self {
        let n = alphabet.len() as i64;
        GeneratorSpec::Bernoulli { weights: vec![rational::rat(1, n); alphabet.len()], alphabet, seed }
    }

    /// Named presets accepted by the command line.
    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "thue-morse" | "thue_morse" => Self::thue_morse(2, 3),
            "fibonacci" => Self::fibonacci(2, 3),
            "rudin-shapiro" | "rudin_shapiro" => Self::rudin_shapiro([2, 3, 4, 5]),
            "sturmian" | "golden" => Self::sturmian_golden(),
            "rotation" => Self::rotation_half(Alpha::Golden, 2, 3),
            "nil" => Self::nil_golden(2, 3),
            "champernowne" => Self::champernowne(10, 2),
            "squares" => GeneratorSpec::Concatenation { sequence: ConcatKind::Squares, base: 10, digit_offset: 2 },
            "primes" => GeneratorSpec::Concatenation { sequence: ConcatKind::Primes, base: 10, digit_offset: 2 },
            "aks" => GeneratorSpec::Concatenation { sequence: ConcatKind::Aks, base: 10, digit_offset: 1 },
            "non-ergodic" | "non_ergodic" => GeneratorSpec::NonErgodicWord { base_of: [2, 3, 4] },
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn preset_alphas_are_convergents() {
        let (p, q) = Alpha::Golden.fraction().unwrap();
        assert!(q > PRESET_MIN_DEN);
        // consecutive Fibonacci numbers: q² − pq − p² = ±1
        let (p, q) = (p as i128, q as i128);
        assert_eq!((q * q - p * q - p * p).abs(), 1);
        let (p, q) = Alpha::Sqrt2.fraction().unwrap();
        let (a, b) = ((p + q) as i128, q as i128);
        assert_eq!((a * a - 2 * b * b).abs(), 1);
    }

    #[test]
    fn alpha_text_forms() {
        assert_eq!("golden".parse::<Alpha>().unwrap(), Alpha::Golden);
        assert_eq!("2/6".parse::<Alpha>().unwrap().fraction().unwrap(), (1, 3));
        assert!("3/2".parse::<Alpha>().is_err());
    }

    #[test]
    fn cells_must_partition() {
        let bad = GeneratorSpec::RotationCoding {
            alpha: Alpha::Golden,
            start: None,
            cells: vec![
                Cell { lo: rat(0, 1), hi: rat(1, 3), base: 2 },
                Cell { lo: rat(1, 2), hi: rat(1, 1), base: 3 },
            ],
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidSpec(_))));
        assert!(GeneratorSpec::sturmian_golden().validate().is_ok());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let bad = GeneratorSpec::Bernoulli { alphabet: vec![2, 3], weights: vec![rat(1, 2), rat(1, 3)], seed: 0 };
        assert!(bad.validate().is_err());
        assert!(GeneratorSpec::Periodic { pattern: vec![] }.validate().is_err());
        assert!(GeneratorSpec::Periodic { pattern: vec![2, 1] }.validate().is_err());
    }

    #[test]
    fn json_shapes() {
        let s: GeneratorSpec = serde_json::from_str(
            r#"{"kind":"bernoulli","alphabet":[2,3],"weights":["1/2","0.5"],"seed":42}"#,
        )
        .unwrap();
        assert_eq!(s, GeneratorSpec::uniform_bernoulli(vec![2, 3], 42));
        let s: GeneratorSpec = serde_json::from_str(r#"{"kind":"periodic","pattern":[2,3]}"#).unwrap();
        assert_eq!(s, GeneratorSpec::Periodic { pattern: vec![2, 3] });
        let text = serde_json::to_string(&GeneratorSpec::sturmian_golden()).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, GeneratorSpec::sturmian_golden());
        let s: GeneratorSpec = serde_json::from_str(r#"{"kind":"non_ergodic_word"}"#).unwrap();
        assert_eq!(s, GeneratorSpec::NonErgodicWord { base_of: [2, 3, 4] });
    }
}
