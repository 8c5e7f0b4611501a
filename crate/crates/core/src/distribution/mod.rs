//! Uniform-distribution diagnostics for orbits `u_n = q_n···q_1 y mod 1`.
//!
//! Points are exact rationals or short half-open intervals known to contain
//! the true value. Every statistic that depends on which side of a boundary a
//! point falls reports the undecidable points separately.

mod gpower;
mod hotspot;

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use gpower::{gpower_exponents, gpower_index_density, GPowerDensity};
pub use hotspot::{
    dyadic_hotspot_scan, hotspot_nu, joint_cell_interval_stats, DyadicLevel, DyadicScan, HotSpotQuery, HotSpotResult,
    JointRow, JointTable,
};

use crate::error::{Error, Result};
use crate::expansion::{CantorReal, OrbitInterval};
use crate::rational::{self, Exact, Rational};

/// A point `u` known to lie in `[lo, lo + width)`, or equal to `lo` when `width = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPoint {
    pub lo: Rational,
    pub width: Rational,
}

/// Where a point sits relative to a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Uncertain,
}

impl OrbitPoint {
    pub fn exact(v: Rational) -> Self {
        OrbitPoint { lo: v, width: Rational::zero() }
    }

    pub fn is_exact(&self) -> bool {
        self.width.is_zero()
    }

    pub fn hi(&self) -> Rational {
        &self.lo + &self.width
    }

    /// Membership in the open interval `(a, b)`.
    pub fn in_open(&self, a: &Rational, b: &Rational) -> Membership {
        if self.is_exact() {
            return if a < &self.lo && &self.lo < b { Membership::In } else { Membership::Out };
        }
        let hi = self.hi();
        if &hi <= a || &self.lo >= b {
            Membership::Out
        } else if &self.lo > a && &hi <= b {
            Membership::In
        } else {
            Membership::Uncertain
        }
    }

    /// Membership in the half-open interval `[a, b)`.
    pub fn in_half_open(&self, a: &Rational, b: &Rational) -> Membership {
        if self.is_exact() {
            return if a <= &self.lo && &self.lo < b { Membership::In } else { Membership::Out };
        }
        let hi = self.hi();
        if &hi <= a || &self.lo >= b {
            Membership::Out
        } else if &self.lo >= a && &hi <= b {
            Membership::In
        } else {
            Membership::Uncertain
        }
    }
}

impl From<OrbitInterval> for OrbitPoint {
    fn from(iv: OrbitInterval) -> Self {
        let width = &iv.hi - &iv.lo;
        OrbitPoint { lo: iv.lo, width }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitSample {
    pub points: Vec<OrbitPoint>,
    pub provenance: String,
}

impl OrbitSample {
    pub fn new(points: Vec<OrbitPoint>, provenance: impl Into<String>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !rational::in_unit_interval(&p.lo) || p.width.is_negative() || p.hi() > Rational::one() {
                return Err(Error::OutOfRange(format!("point {i} is not inside [0,1)")));
            }
        }
        Ok(OrbitSample { points, provenance: provenance.into() })
    }

    pub fn from_exact(values: Vec<Rational>) -> Result<Self> {
        Self::new(values.into_iter().map(OrbitPoint::exact).collect(), "explicit")
    }

    /// `u_n = q_n···q_1 y mod 1` for `n = 0..count`, to width `eps` when `y` is digit-defined.
    pub fn from_orbit(y: &CantorReal, count: usize, eps: &Rational) -> Result<Self> {
        let points = y.orbit_intervals(count, eps)?.into_iter().map(OrbitPoint::from).collect();
        Ok(OrbitSample { points, provenance: format!("orbit n=0..{count}") })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_width(&self) -> Rational {
        self.points.iter().map(|p| &p.width).max().cloned().unwrap_or_else(Rational::zero)
    }

    /// CSV rows `n,lo_num,lo_den,hi_num,hi_den`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,lo_num,lo_den,hi_num,hi_den\n");
        for (n, p) in self.points.iter().enumerate() {
            let hi = p.hi();
            let _ = writeln!(s, "{n},{},{},{},{}", p.lo.numer(), p.lo.denom(), hi.numer(), hi.denom());
        }
        s
    }
}

/// Lower endpoints in increasing order.
fn sorted_lows(sample: &OrbitSample) -> Vec<&Rational> {
    let mut keyed: Vec<(f64, &Rational)> = sample.points.iter().map(|p| (rational::to_f64(&p.lo), &p.lo)).collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(b.1)));
    let mut v: Vec<&Rational> = keyed.into_iter().map(|k| k.1).collect();
    if v.windows(2).any(|w| w[0] > w[1]) {
        v.sort();
    }
    v
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Discrepancy {
    pub n: usize,
    pub value: Exact,
    /// Largest point width; the discrepancy of the true points differs by at most this.
    pub width_slack: Exact,
}

/// `D*_N = max_i max(i/N − u_(i), u_(i) − (i−1)/N)` over sorted lower endpoints.
pub fn star_discrepancy(sample: &OrbitSample) -> Result<Discrepancy> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len();
    let u = sorted_lows(sample);
    let nf = n as f64;
    let approx: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let v = rational::to_f64(v);
            ((i + 1) as f64 / nf - v).max(v - i as f64 / nf)
        })
        .collect();
    let top = approx.iter().cloned().fold(f64::MIN, f64::max);
    let n_big = Rational::from_integer(n.into());
    let mut best = Rational::zero();
    for (i, a) in approx.iter().enumerate() {
        if *a < top - 1e-9 {
            continue;
        }
        let up = Rational::from_integer((i + 1).into()) / &n_big - u[i];
        let down = u[i] - Rational::from_integer(i.into()) / &n_big;
        best = best.max(up).max(down);
    }
    Ok(Discrepancy { n, value: best.into(), width_slack: sample.max_width().into() })
}

/// `|N⁻¹ Σ e(h u_n)|` for `h = 1..=h_max`, on lower endpoints.
pub fn weyl_sums(sample: &OrbitSample, h_max: u32) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let u: Vec<f64> = sample.points.iter().map(|p| rational::to_f64(&p.lo)).collect();
    let n = u.len() as f64;
    Ok((1..=h_max)
        .map(|h| {
            let (mut c, mut s) = (0.0, 0.0);
            for &x in &u {
                let t = std::f64::consts::TAU * (h as f64 * x).fract();
                c += t.cos();
                s += t.sin();
            }
            (c * c + s * s).sqrt() / n
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCell {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
}

/// Piecewise-constant density on a partition of `[0,1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseDensity {
    pub cells: Vec<DensityCell>,
}

impl PiecewiseDensity {
    pub fn new(cells: Vec<DensityCell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::BadDensity("no cells".into()));
        }
        let mut at = Rational::zero();
        let mut mass = Rational::zero();
        for c in &cells {
            if c.lo != at || c.hi <= c.lo {
                return Err(Error::BadDensity(format!("cells must tile [0,1) in order; gap or overlap at {at}")));
            }
            if c.density.is_negative() {
                return Err(Error::BadDensity("negative density".into()));
            }
            mass += (&c.hi - &c.lo) * &c.density;
            at = c.hi.clone();
        }
        if !at.is_one() {
            return Err(Error::BadDensity(format!("cells end at {at}, not 1")));
        }
        if !mass.is_one() {
            return Err(Error::BadDensity(format!("total mass is {mass}, not 1")));
        }
        Ok(PiecewiseDensity { cells })
    }

    /// Uniform density on `k` equal cells.
    pub fn uniform(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::BadDensity("need at least one cell".into()));
        }
        Self::new(
            (0..k)
                .map(|i| DensityCell {
                    lo: rational::from_u128(i as u128, k as u128),
                    hi: rational::from_u128(i as u128 + 1, k as u128),
                    density: Rational::one(),
                })
                .collect(),
        )
    }

    /// `1/C` on `[0,½)` and `2 − 1/C` on `[½,1)`.
    pub fn two_step(c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::BadDensity("C must be positive".into()));
        }
        let low = c.recip();
        let high = Rational::from_integer(2.into()) - &low;
        let half = rational::rat(1, 2);
        Self::new(vec![
            DensityCell { lo: Rational::zero(), hi: half.clone(), density: low },
            DensityCell { lo: half, hi: Rational::one(), density: high },
        ])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellFit {
    pub lo: Exact,
    pub hi: Exact,
    pub count: u64,
    /// Points assigned here by lower endpoint whose interval crosses the cell's upper edge.
    pub uncertain: u64,
    pub empirical_mass: Exact,
    pub target_mass: Exact,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityFit {
    pub n: usize,
    pub cells: Vec<CellFit>,
    pub sup_error: Exact,
}

impl DensityFit {
    /// Histogram CSV `lo,hi,count,empirical_mass,target_mass,error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lo,hi,count,uncertain,empirical_mass,target_mass,error\n");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                c.lo, c.hi, c.count, c.uncertain, c.empirical_mass.decimal, c.target_mass.decimal, c.error
            );
        }
        s
    }
}

/// Empirical mass of each density cell against its target mass.
pub fn empirical_vs_density(sample: &OrbitSample, density: &PiecewiseDensity) -> Result<DensityFit> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len();
    let mut counts = vec![0u64; density.cells.len()];
    let mut uncertain = vec![0u64; density.cells.len()];
    for p in &sample.points {
        let k = density.cells.partition_point(|c| c.hi <= p.lo);
        counts[k] += 1;
        if !p.is_exact() && p.hi() > density.cells[k].hi {
            uncertain[k] += 1;
        }
    }
    let n_big = Rational::from_integer(n.into());
    let mut sup = Rational::zero();
    let cells = density
        .cells
        .iter()
        .zip(counts.iter().zip(&uncertain))
        .map(|(c, (&count, &unc))| {
            let emp = Rational::from_integer(count.into()) / &n_big;
            let target = (&c.hi - &c.lo) * &c.density;
            let err = rational::abs_diff(&emp, &target);
            sup = sup.clone().max(err.clone());
            CellFit {
                lo: (&c.lo).into(),
                hi: (&c.hi).into(),
                count,
                uncertain: unc,
                empirical_mass: emp.into(),
                target_mass: target.into(),
                error: err.to_f64().unwrap_or(f64::NAN),
            }
        })
        .collect();
    Ok(DensityFit { n, cells, sup_error: sup.into() })
}

/// Fraction of points whose lower endpoint lies in `[a, b)`.
pub fn mass_of(sample: &OrbitSample, a: &Rational, b: &Rational) -> Result<Rational> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let c = sample.points.iter().filter(|p| a <= &p.lo && &p.lo < b).count();
    Ok(Rational::new(c.into(), sample.len().into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn trivial_discrepancies() {
        let one = OrbitSample::from_exact(vec![rat(1, 2)]).unwrap();
        assert_eq!(star_discrepancy(&one).unwrap().value.to_rational().unwrap(), rat(1, 2));
        let zeros = OrbitSample::from_exact(vec![rat(0, 1); 7]).unwrap();
        assert_eq!(star_discrepancy(&zeros).unwrap().value.to_rational().unwrap(), rat(1, 1));
        let n = 40;
        let eq = OrbitSample::from_exact((0..n).map(|k| rat(2 * k + 1, 2 * n)).collect()).unwrap();
        assert_eq!(star_discrepancy(&eq).unwrap().value.to_rational().unwrap(), rat(1, 2 * n));
        assert!(matches!(star_discrepancy(&OrbitSample::from_exact(vec![]).unwrap()), Err(Error::EmptySample)));
    }

    #[test]
    fn density_checks() {
        assert!(matches!(
            PiecewiseDensity::new(vec![DensityCell { lo: rat(0, 1), hi: rat(1, 2), density: rat(2, 1) }]),
            Err(Error::BadDensity(_))
        ));
        let d = PiecewiseDensity::two_step(&rat(5, 4)).unwrap();
        assert_eq!(d.cells[0].density, rat(4, 5));
        assert_eq!(d.cells[1].density, rat(6, 5));
        let d = PiecewiseDensity::two_step(&rat(9, 8)).unwrap();
        assert_eq!((&d.cells[0].hi - &d.cells[0].lo) * &d.cells[0].density, rat(4, 9));
    }

    #[test]
    fn uniform_fit_of_equispaced() {
        let n = 64;
        let s = OrbitSample::from_exact((0..n).map(|k| rat(k, n)).collect()).unwrap();
        let fit = empirical_vs_density(&s, &PiecewiseDensity::uniform(8).unwrap()).unwrap();
        assert!(fit.sup_error.to_rational().unwrap() <= rat(1, n));
        assert_eq!(fit.cells.iter().map(|c| c.count).sum::<u64>(), n as u64);
    }

    #[test]
    fn membership_rules() {
        let p = OrbitPoint { lo: rat(1, 4), width: rat(1, 8) };
        assert_eq!(p.in_open(&rat(0, 1), &rat(1, 2)), Membership::In);
        assert_eq!(p.in_open(&rat(1, 4), &rat(1, 2)), Membership::Uncertain);
        assert_eq!(p.in_half_open(&rat(1, 4), &rat(1, 2)), Membership::In);
        assert_eq!(p.in_half_open(&rat(0, 1), &rat(3, 10)), Membership::Uncertain);
        assert_eq!(p.in_open(&rat(3, 8), &rat(1, 2)), Membership::Out);
        let e = OrbitPoint::exact(rat(1, 4));
        assert_eq!(e.in_open(&rat(1, 4), &rat(1, 2)), Membership::Out);
    }

    #[test]
    fn weyl_of_equispaced_vanishes() {
        let s = OrbitSample::from_exact((0..16).map(|k| rat(k, 16)).collect()).unwrap();
        for w in weyl_sums(&s, 5).unwrap() {
            assert!(w < 1e-12);
        }
    }
}
