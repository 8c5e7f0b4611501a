use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Membership, OrbitSample};
use crate::error::{Error, Result};
use crate::rational::{self, Exact, Rational};
use crate::windows::ExclusionSet;

/// `ν_{(a,b)}`: orbit indices `n ∈ [0, N−1] ∖ N_σ` with `u_n ∈ (a, b)`.
#[derive(Clone, Debug)]
pub struct HotSpotQuery {
    pub a: Rational,
    pub b: Rational,
    pub sigma: Rational,
    pub c: Rational,
    /// Orbit indices `n` left out of the count.
    pub exclusion: ExclusionSet,
}

impl HotSpotQuery {
    pub fn new(a: Rational, b: Rational) -> Self {
        HotSpotQuery { a, b, sigma: Rational::one(), c: Rational::one(), exclusion: ExclusionSet::None }
    }

    fn validate(&self) -> Result<()> {
        if self.a.is_negative() || self.a >= self.b || self.b > Rational::one() {
            return Err(Error::BadParams(format!("need 0 ≤ a < b ≤ 1, got ({}, {})", self.a, self.b)));
        }
        if !self.sigma.is_positive() || self.sigma > Rational::one() {
            return Err(Error::BadParams("sigma must lie in (0,1]".into()));
        }
        if !self.c.is_positive() {
            return Err(Error::BadParams("C must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HotSpotResult {
    pub n: usize,
    pub a: Exact,
    pub b: Exact,
    pub count: u64,
    /// Points whose interval straddles `a` or `b`; the bounds below count them as inside.
    pub uncertain: u64,
    pub excluded: usize,
    pub exclusion_density: f64,
    /// Realized exclusion density is at most `1 − σ`.
    pub budget_ok: bool,
    pub ratio: f64,
    pub bound_sigma: f64,
    pub bound_linear: f64,
    pub within_sigma: bool,
    pub within_linear: bool,
}

pub fn hotspot_nu(sample: &OrbitSample, query: &HotSpotQuery) -> Result<HotSpotResult> {
    query.validate()?;
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let span = &query.b - &query.a;
    if sample.max_width() >= span {
        return Err(Error::PrecisionUnreachable(format!(
            "point width {} is not below the interval length {span}",
            sample.max_width()
        )));
    }
    let n = sample.len();
    let (mut count, mut uncertain, mut excluded) = (0u64, 0u64, 0usize);
    for (i, p) in sample.points.iter().enumerate() {
        if query.exclusion.contains(i) {
            excluded += 1;
            continue;
        }
        match p.in_open(&query.a, &query.b) {
            Membership::In => count += 1,
            Membership::Uncertain => uncertain += 1,
            Membership::Out => {}
        }
    }
    let exclusion_density = excluded as f64 / n as f64;
    let len = rational::to_f64(&span);
    let c = rational::to_f64(&query.c);
    let sigma = rational::to_f64(&query.sigma);
    let ratio = count as f64 / n as f64;
    let pessimistic = (count + uncertain) as f64 / n as f64;
    let bound_sigma = c * len.powf(sigma);
    let bound_linear = c * len;
    let budget = Rational::one() - &query.sigma;
    let budget_ok = Rational::new(excluded.into(), n.into()) <= budget;
    Ok(HotSpotResult {
        n,
        a: (&query.a).into(),
        b: (&query.b).into(),
        count,
        uncertain,
        excluded,
        exclusion_density,
        budget_ok,
        ratio,
        bound_sigma,
        bound_linear,
        within_sigma: pessimistic < bound_sigma,
        within_linear: pessimistic <= bound_linear,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DyadicLevel {
    pub level: u32,
    /// Largest `ν / (N (b − a))` over the open dyadic intervals of this level, uncertain points included.
    pub worst_ratio: f64,
    pub worst_index: usize,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DyadicScan {
    pub n: usize,
    pub excluded: usize,
    pub c: Exact,
    pub levels: Vec<DyadicLevel>,
    pub all_within: bool,
}

/// Checks `ν_{(a,b)} / N ≤ C (b − a)` for every open dyadic `(k/2^j, (k+1)/2^j)`, `j ≤ max_level`.
pub fn dyadic_hotspot_scan(sample: &OrbitSample, max_level: u32, c: &Rational, excl: &ExclusionSet) -> Result<DyadicScan> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if max_level > 24 {
        return Err(Error::BadParams("dyadic level above 24".into()));
    }
    let size = 1usize << max_level;
    let scale = Rational::from_integer(size.into());
    let mut bins = vec![0u64; size];
    let mut atoms = vec![0u64; size];
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    let mut excluded = 0;
    let to_index = |v: &Rational| v.to_integer().to_usize().expect("within [0, 2^L]");
    for (i, p) in sample.points.iter().enumerate() {
        if excl.contains(i) {
            excluded += 1;
            continue;
        }
        let s = &p.lo * &scale;
        let k = to_index(&s.floor());
        if p.is_exact() {
            if s.is_integer() {
                atoms[k] += 1;
            } else {
                bins[k] += 1;
            }
        } else {
            let top = (&p.hi() * &scale).ceil();
            ranges.push((k, to_index(&top).saturating_sub(1).max(k).min(size - 1)));
        }
    }
    let mut pre_bins = vec![0u64; size + 1];
    let mut pre_atoms = vec![0u64; size + 1];
    for i in 0..size {
        pre_bins[i + 1] = pre_bins[i] + bins[i];
        pre_atoms[i + 1] = pre_atoms[i] + atoms[i];
    }
    let n = sample.len() as f64;
    let cf = rational::to_f64(c);
    let mut levels = Vec::new();
    for level in 0..=max_level {
        let span = size >> level;
        let mut unc = vec![0u64; 1 << level];
        for &(k0, k1) in &ranges {
            for slot in &mut unc[k0 / span..=k1 / span] {
                *slot += 1;
            }
        }
        let width = 1.0 / (1u64 << level) as f64;
        let (mut worst, mut worst_index) = (0.0f64, 0usize);
        for (i, u) in unc.iter().enumerate() {
            let (lo, hi) = (i * span, (i + 1) * span);
            let inside = pre_bins[hi] - pre_bins[lo] + (pre_atoms[hi] - pre_atoms[lo] - atoms[lo]) + u;
            let r = inside as f64 / (n * width);
            if r > worst {
                worst = r;
                worst_index = i;
            }
        }
        levels.push(DyadicLevel { level, worst_ratio: worst, worst_index, within: worst <= cf });
    }
    let all_within = levels.iter().all(|l| l.within);
    Ok(DyadicScan { n: sample.len(), excluded, c: c.into(), levels, all_within })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointRow {
    pub block: Vec<u64>,
    pub interval: usize,
    pub count: u64,
    pub uncertain: u64,
    pub frequency: Exact,
    pub target: Exact,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointTable {
    pub n: usize,
    pub ell: usize,
    pub intervals: Vec<(Exact, Exact)>,
    pub block_frequency: Vec<(Vec<u64>, Exact)>,
    pub interval_frequency: Vec<Exact>,
    pub rows: Vec<JointRow>,
    pub sup_deviation: f64,
}

/// Frequencies of `{n < N : (q_{n+1},…,q_{n+ℓ}) = B, u_n ∈ [a, b)}` against `d̂(B)(b − a)`.
///
/// Points are placed by lower endpoint; those whose interval leaves `[a, b)` are tallied as uncertain.
pub fn joint_cell_interval_stats(
    bases: &[u64],
    sample: &OrbitSample,
    ell: usize,
    n: usize,
    intervals: &[(Rational, Rational)],
) -> Result<JointTable> {
    if ell == 0 || n == 0 {
        return Err(Error::BadParams("need ℓ ≥ 1 and N ≥ 1".into()));
    }
    if bases.len() < n + ell - 1 {
        return Err(Error::SourceExhausted { needed: n + ell - 1, available: bases.len() });
    }
    if sample.len() < n {
        return Err(Error::SourceExhausted { needed: n, available: sample.len() });
    }
    for (a, b) in intervals {
        if a.is_negative() || a >= b || b > &Rational::one() {
            return Err(Error::BadParams(format!("bad interval [{a}, {b})")));
        }
    }
    let mut blocks: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut cells: HashMap<(Vec<u64>, usize), (u64, u64)> = HashMap::new();
    let mut per_interval = vec![0u64; intervals.len()];
    for i in 0..n {
        let w = bases[i..i + ell].to_vec();
        *blocks.entry(w.clone()).or_default() += 1;
        let p = &sample.points[i];
        for (k, (a, b)) in intervals.iter().enumerate() {
            if a <= &p.lo && &p.lo < b {
                per_interval[k] += 1;
                let e = cells.entry((w.clone(), k)).or_default();
                e.0 += 1;
                if p.in_half_open(a, b) == Membership::Uncertain {
                    e.1 += 1;
                }
            }
        }
    }
    let n_big = Rational::from_integer(n.into());
    let freq = |c: u64| Rational::from_integer(c.into()) / &n_big;
    let mut rows = Vec::new();
    let mut sup = 0.0f64;
    for (w, &bc) in &blocks {
        let db = freq(bc);
        for (k, (a, b)) in intervals.iter().enumerate() {
            let (count, uncertain) = cells.get(&(w.clone(), k)).copied().unwrap_or((0, 0));
            let f = freq(count);
            let target = &db * (b - a);
            let deviation = rational::abs_diff(&f, &target).to_f64().unwrap_or(f64::NAN);
            sup = sup.max(deviation);
            rows.push(JointRow {
                block: w.clone(),
                interval: k,
                count,
                uncertain,
                frequency: f.into(),
                target: target.into(),
                deviation,
            });
        }
    }
    Ok(JointTable {
        n,
        ell,
        intervals: intervals.iter().map(|(a, b)| (a.into(), b.into())).collect(),
        block_frequency: blocks.iter().map(|(w, &c)| (w.clone(), freq(c).into())).collect(),
        interval_frequency: per_interval.iter().map(|&c| freq(c).into()).collect(),
        rows,
        sup_deviation: sup,
    })
}

impl JointTable {
    pub fn frequency(&self, block: &[u64], interval: usize) -> Option<Rational> {
        self.rows
            .iter()
            .find(|r| r.block == block && r.interval == interval)
            .and_then(|r| r.frequency.to_rational().ok())
    }

    pub fn block_frequency(&self, block: &[u64]) -> Rational {
        self.block_frequency
            .iter()
            .find(|(w, _)| w == block)
            .and_then(|(_, f)| f.to_rational().ok())
            .unwrap_or_else(Rational::zero)
    }
}
