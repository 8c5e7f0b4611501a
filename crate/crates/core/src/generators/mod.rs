//! Basic sequences: declarative specs, resumable base streams, and the
//! window statistics used to judge whether a sequence is dynamically
//! generated.

mod concat;
mod cylinder;
mod spec;
mod substitution;

pub use concat::{concatenation_digits, partial_quotients, to_base, ConcatKind, DigitStream};
pub use cylinder::{
    check_dynamic_generation, cylinder_stats, CylinderStats, DynGenConfig, DynGenLevel, DynGenReport, Verdict,
};
pub use spec::{Alpha, Cell, GeneratorSpec};
pub use substitution::{substitution_fixed_point, Substitution, DEFAULT_T_MAX};

use std::path::Path;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::rng::{Categorical, SplitMix64};

/// The first `n` bases of the sequence described by `spec`.
pub fn generate(spec: &GeneratorSpec, n: usize) -> Result<Vec<u64>> {
    let mut s = BasicSequence::new(spec.clone())?;
    s.ensure(n)?;
    Ok(s.prefix(n).to_vec())
}

/// Reads newline- or whitespace-separated decimal integers.
pub fn read_integers(path: &Path) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(path)?;
    parse_integers(&text)
}

pub fn parse_integers(text: &str) -> Result<Vec<u64>> {
    text.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("not an integer: {t:?}"))))
        .collect()
}

pub fn write_integers(values: &[u64]) -> String {
    let mut s = String::with_capacity(values.len() * 3);
    for v in values {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

enum Stream {
    Periodic { pattern: Vec<u64>, i: usize },
    Rotation(RotationState),
    Nil(NilState),
    Substitution { word: Vec<u8>, subst: Substitution, base_of: Vec<u64> },
    Concat { digits: DigitStream, offset: u64 },
    Bernoulli { alphabet: Vec<u64>, law: Categorical, rng: SplitMix64 },
    NonErgodic { bases: [u64; 3], rep: usize, emitted_in_rep: usize },
    File { values: Vec<u64> },
}

/// `frac(start + n·α)` walked one step at a time on the grid `1/modulus`.
struct RotationState {
    modulus: u128,
    step: u128,
    x: u128,
    /// `(threshold, base)`: the point `x/modulus` lies in the cell iff
    /// `x ≥ threshold` of this cell and `x <` the next threshold.
    cells: Vec<(u128, u64)>,
    den: u128,
}

struct NilState {
    modulus: u128,
    p: u128,
    x: u128,
    y: u128,
    y_step: u128,
    bases: (u64, u64),
}

/// A resumable stream of bases with an exact prefix buffer.
pub struct BasicSequence {
    spec: Option<GeneratorSpec>,
    stream: Stream,
    prefix: Vec<u64>,
    product_cache: (usize, BigUint),
}

impl BasicSequence {
    pub fn new(spec: GeneratorSpec) -> Result<Self> {
        spec.validate()?;
        let stream = match &spec {
            GeneratorSpec::Periodic { pattern } => Stream::Periodic { pattern: pattern.clone(), i: 0 },
            GeneratorSpec::RotationCoding { alpha, start, cells } => {
                let (p, d) = alpha.fraction()?;
                let s = start.clone().unwrap_or_default();
                let s_den = u128::try_from(s.denom().clone())
                    .map_err(|_| Error::InvalidSpec("start denominator too large".into()))?;
                let s_num = u128::try_from(s.numer().clone())
                    .map_err(|_| Error::InvalidSpec("start must lie in [0,1)".into()))?;
                let modulus = d
                    .checked_mul(s_den)
                    .filter(|m| m.leading_zeros() >= 2)
                    .ok_or_else(|| Error::InvalidSpec("alpha and start denominators too large".into()))?;
                let mut thresholds = Vec::with_capacity(cells.len());
                for c in cells {
                    thresholds.push((spec::ceil_scaled(&c.lo, modulus)?, c.base));
                }
                Stream::Rotation(RotationState {
                    modulus,
                    step: p * s_den,
                    x: s_num * d,
                    cells: thresholds,
                    den: d,
                })
            }
            GeneratorSpec::NilCoding { alpha, bases } => {
                let (p, d) = alpha.fraction()?;
                if d.leading_zeros() < 3 {
                    return Err(Error::InvalidSpec("alpha denominator too large".into()));
                }
                Stream::Nil(NilState {
                    modulus: d,
                    p,
                    x: 0,
                    y: 0,
                    y_step: p % d,
                    bases: (bases[0], bases[1]),
                })
            }
            GeneratorSpec::Substitution { rules, base_of, start, max_power } => {
                let subst = Substitution::new(rules, *start)?;
                subst.validate(*max_power)?;
                let mut bases = Vec::with_capacity(subst.letters().len());
                for c in subst.letters() {
                    bases.push(
                        *base_of
                            .get(c)
                            .ok_or_else(|| Error::InvalidSpec(format!("no base for letter {c:?}")))?,
                    );
                }
                let start = subst.index_of(*start).expect("validated");
                Stream::Substitution { word: vec![start], subst, base_of: bases }
            }
            GeneratorSpec::Concatenation { sequence, base, digit_offset } => Stream::Concat {
                digits: DigitStream::new(*sequence, *base),
                offset: *digit_offset,
            },
            GeneratorSpec::Bernoulli { alphabet, weights, seed } => Stream::Bernoulli {
                alphabet: alphabet.clone(),
                law: Categorical::new(weights)?,
                rng: SplitMix64::new(*seed),
            },
            GeneratorSpec::NonErgodicWord { base_of } => Stream::NonErgodic {
                bases: *base_of,
                rep: 1,
                emitted_in_rep: 0,
            },
            GeneratorSpec::File { path } => {
                let values = read_integers(path)?;
                if let Some((i, &v)) = values.iter().enumerate().find(|(_, &v)| v < 2) {
                    return Err(Error::InvalidSpec(format!("base {v} at position {} is below 2", i + 1)));
                }
                Stream::File { values }
            }
        };
        Ok(BasicSequence {
            spec: Some(spec),
            stream,
            prefix: Vec::new(),
            product_cache: (0, BigUint::one()),
        })
    }

    /// Wraps an explicit list of bases.
    pub fn from_bases(bases: Vec<u64>) -> Result<Self> {
        if let Some((i, &v)) = bases.iter().enumerate().find(|(_, &v)| v < 2) {
            return Err(Error::InvalidSpec(format!("base {v} at position {} is below 2", i + 1)));
        }
        Ok(BasicSequence {
            spec: None,
            stream: Stream::File { values: bases.clone() },
            prefix: bases,
            product_cache: (0, BigUint::one()),
        })
    }

    /// `None` for sequences built from explicit bases.
    pub fn spec(&self) -> Option<&GeneratorSpec> {
        self.spec.as_ref()
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Extends the buffered prefix to at least `n` bases.
    pub fn ensure(&mut self, n: usize) -> Result<()> {
        if self.prefix.len() >= n {
            return Ok(());
        }
        self.prefix.reserve(n - self.prefix.len());
        let out = &mut self.prefix;
        match &mut self.stream {
            Stream::Periodic { pattern, i } => {
                while out.len() < n {
                    out.push(pattern[*i]);
                    *i = (*i + 1) % pattern.len();
                }
            }
            Stream::Rotation(st) => {
                if 2 * n as u128 >= st.den {
                    return Err(Error::HorizonExceeded { n, denominator: st.den });
                }
                while out.len() < n {
                    st.x = add_mod(st.x, st.step, st.modulus);
                    let i = st.cells.partition_point(|&(t, _)| t <= st.x);
                    out.push(st.cells[i - 1].1);
                }
            }
            Stream::Nil(st) => {
                if 2 * n as u128 >= st.modulus {
                    return Err(Error::HorizonExceeded { n, denominator: st.modulus });
                }
                while out.len() < n {
                    // x_n = nα, y_n = n²α, and (n+1)² − n² = 2n + 1
                    st.x = add_mod(st.x, st.p, st.modulus);
                    st.y = add_mod(st.y, st.y_step, st.modulus);
                    st.y_step = add_mod(st.y_step, add_mod(st.p, st.p, st.modulus), st.modulus);
                    out.push(if st.x >= st.y { st.bases.0 } else { st.bases.1 });
                }
            }
            Stream::Substitution { word, subst, base_of } => {
                while word.len() < n {
                    *word = subst.apply(word);
                }
                let from = out.len();
                out.extend(word[from..n].iter().map(|&c| base_of[c as usize]));
            }
            Stream::Concat { digits, offset } => {
                while out.len() < n {
                    out.push(digits.next().expect("infinite") + *offset);
                }
            }
            Stream::Bernoulli { alphabet, law, rng } => {
                while out.len() < n {
                    out.push(alphabet[law.sample(rng)]);
                }
            }
            Stream::NonErgodic { bases, rep, emitted_in_rep } => {
                // (abc)^r (bac)^r for r = 1, 2, ...
                const ABC: [usize; 3] = [0, 1, 2];
                const BAC: [usize; 3] = [1, 0, 2];
                while out.len() < n {
                    let i = *emitted_in_rep;
                    let half = 3 * *rep;
                    let letter = if i < half { ABC[i % 3] } else { BAC[(i - half) % 3] };
                    out.push(bases[letter]);
                    *emitted_in_rep += 1;
                    if *emitted_in_rep == 2 * half {
                        *emitted_in_rep = 0;
                        *rep += 1;
                    }
                }
            }
            Stream::File { values } => {
                if values.len() < n {
                    return Err(Error::SourceExhausted { needed: n, available: values.len() });
                }
                let from = out.len();
                out.extend_from_slice(&values[from..n]);
            }
        }
        Ok(())
    }

    /// `q_1..q_n`; call [`ensure`](Self::ensure) first.
    pub fn prefix(&self, n: usize) -> &[u64] {
        &self.prefix[..n]
    }

    pub fn take_prefix(&mut self, n: usize) -> Result<Vec<u64>> {
        self.ensure(n)?;
        Ok(self.prefix[..n].to_vec())
    }

    /// `q_n`, 1-based.
    pub fn base(&mut self, n: usize) -> Result<u64> {
        assert!(n >= 1, "bases are indexed from 1");
        self.ensure(n)?;
        Ok(self.prefix[n - 1])
    }

    /// `M_n = q_1···q_n`, with `M_0 = 1`.
    pub fn product(&mut self, n: usize) -> Result<BigUint> {
        self.ensure(n)?;
        let (m, ref acc) = self.product_cache;
        let value = if n >= m {
            acc * product_of(&self.prefix[m..n])
        } else {
            product_of(&self.prefix[..n])
        };
        if n >= m {
            self.product_cache = (n, value.clone());
        }
        Ok(value)
    }
}

/// Product of a slice by balanced splitting.
pub fn product_of(xs: &[u64]) -> BigUint {
    match xs.len() {
        0 => BigUint::one(),
        1 => BigUint::from(xs[0]),
        n if n <= 16 => xs.iter().fold(BigUint::one(), |a, &x| a * x),
        n => product_of(&xs[..n / 2]) * product_of(&xs[n / 2..]),
    }
}

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn tm() -> GeneratorSpec {
        GeneratorSpec::thue_morse(2, 3)
    }

    #[test]
    fn periodic_prefix() {
        let s = GeneratorSpec::Periodic { pattern: vec![2, 3] };
        assert_eq!(generate(&s, 4).unwrap(), vec![2, 3, 2, 3]);
    }

    #[test]
    fn thue_morse_bases() {
        assert_eq!(generate(&tm(), 8).unwrap(), vec![2, 3, 3, 2, 3, 2, 2, 3]);
    }

    #[test]
    fn champernowne_bases() {
        let s = GeneratorSpec::Concatenation { sequence: ConcatKind::Champernowne, base: 10, digit_offset: 2 };
        assert_eq!(generate(&s, 11).unwrap(), vec![3, 4, 5, 6, 7, 8, 9, 10, 11, 3, 2]);
    }

    #[test]
    fn aks_bases_shift_by_one() {
        let s = GeneratorSpec::Concatenation { sequence: ConcatKind::Aks, base: 10, digit_offset: 1 };
        assert_eq!(generate(&s, 4).unwrap(), vec![3, 4, 2, 3]);
    }

    #[test]
    fn extension_is_consistent() {
        let specs = vec![
            tm(),
            GeneratorSpec::sturmian_golden(),
            GeneratorSpec::nil_golden(2, 3),
            GeneratorSpec::Bernoulli { alphabet: vec![2, 3, 5], weights: vec![rat(1, 2), rat(1, 3), rat(1, 6)], seed: 9 },
            GeneratorSpec::NonErgodicWord { base_of: [2, 3, 4] },
        ];
        for spec in specs {
            let full = generate(&spec, 500).unwrap();
            let mut s = BasicSequence::new(spec).unwrap();
            for n in [0, 1, 7, 100, 333, 500] {
                s.ensure(n).unwrap();
                assert_eq!(s.prefix(n), &full[..n]);
            }
        }
    }

    #[test]
    fn non_ergodic_word_prefix() {
        let s = GeneratorSpec::NonErgodicWord { base_of: [2, 3, 4] };
        // abc bac abcabc bacbac
        assert_eq!(
            generate(&s, 18).unwrap(),
            vec![2, 3, 4, 3, 2, 4, 2, 3, 4, 2, 3, 4, 3, 2, 4, 3, 2, 4]
        );
    }

    #[test]
    fn rotation_coding_matches_direct_evaluation() {
        let spec = GeneratorSpec::RotationCoding {
            alpha: Alpha::Rational { num: 3, den: 10 },
            start: Some(rat(1, 7)),
            cells: vec![
                Cell { lo: rat(0, 1), hi: rat(1, 2), base: 2 },
                Cell { lo: rat(1, 2), hi: rat(1, 1), base: 5 },
            ],
        };
        let got = generate(&spec, 4).unwrap();
        let want: Vec<u64> = (1..=4)
            .map(|n| {
                let v = crate::rational::frac(&(rat(1, 7) + rat(3 * n, 10)));
                if v < rat(1, 2) { 2 } else { 5 }
            })
            .collect();
        assert_eq!(got, want);
        assert!(matches!(generate(&spec, 5), Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn nil_coding_matches_direct_evaluation() {
        let (p, d) = (7u128, 1000u128);
        let spec = GeneratorSpec::NilCoding { alpha: Alpha::Rational { num: p, den: d }, bases: [2, 3] };
        let got = generate(&spec, 400).unwrap();
        for (i, &q) in got.iter().enumerate() {
            let n = i as u128 + 1;
            let x = n * p % d;
            let y = n * n * p % d;
            assert_eq!(q, if x >= y { 2 } else { 3 }, "n={n}");
        }
    }

    #[test]
    fn running_product() {
        let mut s = BasicSequence::new(GeneratorSpec::Periodic { pattern: vec![2, 3] }).unwrap();
        assert_eq!(s.product(0).unwrap(), BigUint::one());
        assert_eq!(s.product(4).unwrap(), BigUint::from(36u32));
        assert_eq!(s.product(3).unwrap(), BigUint::from(12u32));
        assert_eq!(s.product(5).unwrap(), BigUint::from(72u32));
    }

    #[test]
    fn file_source_exhausts() {
        let mut s = BasicSequence::from_bases(vec![2, 5]).unwrap();
        assert!(s.ensure(2).is_ok());
        assert!(matches!(s.ensure(3), Err(Error::SourceExhausted { needed: 3, available: 2 })));
        assert!(BasicSequence::from_bases(vec![2, 1]).is_err());
    }

    #[test]
    fn substitution_spec_roundtrip() {
        let spec: GeneratorSpec = serde_json::from_str(
            r#"{"kind":"substitution","rules":{"a":"ab","b":"ba"},"base_of":{"a":2,"b":3},"start":"a"}"#,
        )
        .unwrap();
        assert_eq!(spec, tm());
    }
}
