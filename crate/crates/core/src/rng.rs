//! Seeded randomness: SplitMix64 and exact samplers built on it.

use crate::error::{Error, Result};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX2);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[0, n)` by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Draws `true` with probability `num/den`.
    pub fn bernoulli(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// A 53-bit float in `[0,1)`; only for reporting and tests.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Draws from a finite distribution given by exact rational weights.
///
/// A 64-bit draw `u` stands for the dyadic `u / 2^64`; it selects the first
/// outcome whose cumulative weight `F_i` satisfies `u / 2^64 < F_i`.
#[derive(Clone, Debug)]
pub struct Categorical {
    thresholds: Vec<u128>,
}

impl Categorical {
    pub fn new(weights: &[Rational]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpec("empty weight list".into()));
        }
        let mut acc = Rational::zero();
        let scale = Rational::from_integer(BigInt::one() << 64u32);
        let mut thresholds = Vec::with_capacity(weights.len());
        for w in weights {
            if w.is_negative() {
                return Err(Error::InvalidSpec(format!("weight {w} is negative")));
            }
            acc += w;
            let t = (&acc * &scale).ceil().to_integer();
            thresholds.push(t.to_u128().ok_or_else(|| {
                Error::InvalidSpec("weights exceed 1".into())
            })?);
        }
        if !acc.is_one() {
            return Err(Error::InvalidSpec(format!("weights sum to {acc}, not 1")));
        }
        Ok(Categorical { thresholds })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> usize {
        let u = rng.next_u64() as u128;
        self.thresholds.partition_point(|&t| t <= u)
    }
}

/// `P(a = k) ∝ k^-2` for `1 ≤ k ≤ k_max`.
///
/// Proposal `K = floor(1/U)` has `P(K = k) = 1/(k(k+1))`; acceptance with
/// probability `(k+1)/(2k)` corrects it to `k^-2`.
#[derive(Clone, Copy, Debug)]
pub struct InverseSquare {
    pub k_max: u64,
}

impl InverseSquare {
    pub fn new(k_max: u64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::BadParams("k_max must be at least 1".into()));
        }
        Ok(InverseSquare { k_max })
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> u64 {
        const TWO64: u128 = 1u128 << 64;
        loop {
            let w = rng.next_u64() as u128 + 1;
            let k = TWO64 / w;
            let v = rng.next_u64() as u128;
            // accept iff v / 2^64 < (k+1) / (2k)
            let accept = v
                .checked_mul(2 * k)
                .map_or(false, |lhs| lhs < (k + 1) * TWO64);
            if accept && k <= self.k_max as u128 {
                return k as u64;
            }
        }
    }

    /// `k^-2 / Σ_{j≤k_max} j^-2`, in floating point.
    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 || k > self.k_max {
            return 0.0;
        }
        let z: f64 = (1..=self.k_max).map(|j| 1.0 / (j as f64 * j as f64)).sum();
        1.0 / (k as f64 * k as f64) / z
    }
}
