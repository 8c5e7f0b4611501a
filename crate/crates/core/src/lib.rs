//! Exact arithmetic for Q-Cantor series expansions.
//!
//! A basic sequence `Q = (q_n)` of integers `q_n >= 2` acts as a mixed radix:
//! every `x` in `[0, 1)` has a unique expansion `x = sum x_n / (q_1 ... q_n)`
//! with `0 <= x_n < q_n` and no eventual all-`(q_n - 1)` tail.
//!
//! The crate is organised around the pieces needed to study normality of such
//! expansions when `Q` itself is produced by a dynamical system:
//!
//! - [`generators`]: basic sequences from periodic, rotation, nilsequence,
//!   substitution, concatenation, Bernoulli and file sources, plus finite-prefix
//!   checks of the block-density conditions.
//! - [`expansion`]: digits, values and orbit points `q_n ... q_1 x mod 1`.
//! - [`normality`]: block counts `N_n^Q(D, x)`, expectations `Q_n(D)`, their
//!   base-conditioned variants and the cell geometry `E_B x I_{D,B}`.
//! - [`distribution`]: star discrepancy, density fits, hot-spot counts, joint
//!   cell/interval frequencies and the g-power index density.
//! - [`complexity`]: excluded-density word complexity, block entropy and
//!   determinism diagnostics.
//! - [`constructions`]: executable counterexample constructions and rebasing.
//!
//! All statistics are exact rationals; floating point only appears in values
//! that are irrational by nature (entropies, logarithms) and in decimal
//! renderings of exact values.

pub mod complexity;
pub mod constructions;
pub mod distribution;
pub mod error;
pub mod expansion;
pub mod generators;
pub mod normality;
pub mod rational;
pub mod rng;
pub mod windows;

pub use error::{Error, Result};
pub use rational::Rational;
