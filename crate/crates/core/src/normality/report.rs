use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{format_block, BlockStats};
use crate::error::{Error, Result};
use crate::rational::{self, Exact, Rational};
use crate::windows::ExclusionSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    InsufficientMass,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportConfig {
    pub ell_max: usize,
    #[serde(with = "rational::serde_str")]
    pub tol: Rational,
    /// Blocks with expectation below this are reported, not judged.
    #[serde(with = "rational::serde_str")]
    pub theta: Rational,
    /// Largest number of judged blocks for which the full ratio matrix is kept.
    pub rn_matrix_cap: usize,
    pub include_un: bool,
}

impl ReportConfig {
    pub fn new(ell_max: usize, tol: Rational) -> Self {
        ReportConfig {
            ell_max,
            tol,
            theta: Rational::from_integer(BigInt::from(10)),
            rn_matrix_cap: 32,
            include_un: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockRow {
    pub d: Vec<u64>,
    pub count: u64,
    pub expectation: Exact,
    pub ratio: Option<Exact>,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnRow {
    pub d: Vec<u64>,
    pub b: Vec<u64>,
    pub count: u64,
    pub expectation: Exact,
    pub ratio: Option<Exact>,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RnSummary {
    pub judged_blocks: usize,
    /// Largest `(N/Q)(D₁) / (N/Q)(D₂)`; `None` if some judged block never occurs.
    pub worst_ratio: Option<f64>,
    pub worst_pair: Option<(Vec<u64>, Vec<u64>)>,
    pub status: Status,
    pub matrix: Option<Vec<Vec<Option<f64>>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelReport {
    pub ell: usize,
    pub blocks: Vec<BlockRow>,
    pub rn: RnSummary,
    pub un: Vec<UnRow>,
    pub count_sum: u64,
    pub expectation_sum: Exact,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    pub excluded: usize,
    pub config: ReportConfig,
    pub levels: Vec<LevelReport>,
    pub normal: Status,
    pub ratio_normal: Status,
    pub uniform: Status,
}

fn judge(count: u64, expectation: &Rational, cfg: &ReportConfig) -> (Option<Rational>, Status) {
    if expectation.is_zero() {
        return (None, Status::InsufficientMass);
    }
    let ratio = Rational::new(BigInt::from(count), BigInt::from(1u8)) / expectation;
    if expectation < &cfg.theta {
        return (Some(ratio), Status::InsufficientMass);
    }
    let dev = (&ratio - Rational::from_integer(1.into())).abs();
    let status = if dev <= cfg.tol { Status::Pass } else { Status::Fail };
    (Some(ratio), status)
}

fn combine<'a>(it: impl Iterator<Item = &'a Status>) -> Status {
    let mut any = false;
    for s in it {
        match s {
            Status::Fail => return Status::Fail,
            Status::Pass => any = true,
            Status::InsufficientMass => {}
        }
    }
    if any {
        Status::Pass
    } else {
        Status::InsufficientMass
    }
}

fn rn_summary(rows: &[BlockRow], cfg: &ReportConfig) -> RnSummary {
    let judged: Vec<(&Vec<u64>, f64)> = rows
        .iter()
        .filter(|r| r.status != Status::InsufficientMass)
        .map(|r| (&r.d, r.ratio.as_ref().map_or(0.0, |x| x.decimal)))
        .collect();
    if judged.len() < 2 {
        return RnSummary {
            judged_blocks: judged.len(),
            worst_ratio: None,
            worst_pair: None,
            status: Status::InsufficientMass,
            matrix: None,
        };
    }
    let (hi_d, hi) = judged.iter().cloned().fold((judged[0].0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let (lo_d, lo) = judged.iter().cloned().fold((judged[0].0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
    let tol = rational::to_f64(&cfg.tol);
    let (worst, status) = if lo > 0.0 {
        let w = hi / lo;
        let ok = w - 1.0 <= tol && 1.0 - lo / hi <= tol;
        (Some(w), if ok { Status::Pass } else { Status::Fail })
    } else {
        (None, Status::Fail)
    };
    let matrix = (judged.len() <= cfg.rn_matrix_cap).then(|| {
        judged
            .iter()
            .map(|(_, a)| judged.iter().map(|(_, b)| (*b > 0.0).then(|| a / b)).collect())
            .collect()
    });
    RnSummary {
        judged_blocks: judged.len(),
        worst_ratio: worst,
        worst_pair: Some((hi_d.clone(), lo_d.clone())),
        status,
        matrix,
    }
}

/// Block-by-block comparison of digit counts against their expectations.
///
/// Needs `n + ell_max − 1` bases and digits.
pub fn normality_report(
    q: &[u64],
    digits: &[u64],
    n: usize,
    cfg: &ReportConfig,
    excl: &ExclusionSet,
) -> Result<NormalityReport> {
    if cfg.ell_max == 0 {
        return Err(Error::BadParams("block length must be at least 1".into()));
    }
    let mut levels = Vec::with_capacity(cfg.ell_max);
    let mut excluded = 0;
    for ell in 1..=cfg.ell_max {
        let stats = BlockStats::new(q, digits, ell, n, excl)?;
        excluded = stats.excluded();
        let counts = stats.digit_block_counts();
        let expectations = stats.all_expectations();
        let keys: BTreeSet<&Vec<u64>> = counts.keys().chain(expectations.keys()).collect();
        let zero = Rational::zero();
        let mut blocks = Vec::with_capacity(keys.len());
        for d in keys {
            let c = counts.get(d).copied().unwrap_or(0);
            let e = expectations.get(d).unwrap_or(&zero);
            let (ratio, status) = judge(c, e, cfg);
            blocks.push(BlockRow { d: d.clone(), count: c, expectation: e.into(), ratio: ratio.map(Exact::from), status });
        }
        let mut un = Vec::new();
        if cfg.include_un {
            let pairs = stats.pair_counts();
            for (b, _) in stats.base_block_counts() {
                for d in super::admissible_blocks(&b) {
                    let c = pairs.get(&(d.clone(), b.clone())).copied().unwrap_or(0);
                    let e = stats.expectation_db(&d, &b);
                    let (ratio, status) = judge(c, &e, cfg);
                    un.push(UnRow { d, b: b.clone(), count: c, expectation: e.into(), ratio: ratio.map(Exact::from), status });
                }
            }
        }
        let expectation_sum: Rational = expectations.values().sum();
        let rn = rn_summary(&blocks, cfg);
        levels.push(LevelReport {
            ell,
            count_sum: counts.values().sum(),
            expectation_sum: expectation_sum.into(),
            rn,
            blocks,
            un,
        });
    }
    let normal = combine(levels.iter().flat_map(|l| l.blocks.iter().map(|b| &b.status)));
    let ratio_normal = combine(levels.iter().map(|l| &l.rn.status));
    let uniform = combine(levels.iter().flat_map(|l| l.un.iter().map(|b| &b.status)));
    Ok(NormalityReport { n, excluded, config: cfg.clone(), levels, normal, ratio_normal, uniform })
}

impl NormalityReport {
    pub fn block(&self, d: &[u64]) -> Option<&BlockRow> {
        self.levels.get(d.len().checked_sub(1)?)?.blocks.iter().find(|r| r.d == d)
    }

    /// Flat table: `ell,D,B,count,expectation_num,expectation_den,ratio,ratio_decimal`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ell,D,B,count,expectation_num,expectation_den,ratio,ratio_decimal\n");
        let ratio_cols = |r: &Option<Exact>| match r {
            Some(x) => (x.to_string(), format!("{}", x.decimal)),
            None => (String::new(), String::new()),
        };
        for l in &self.levels {
            for r in &l.blocks {
                let (a, b) = ratio_cols(&r.ratio);
                s.push_str(&format!(
                    "{},{},,{},{},{},{},{}\n",
                    l.ell,
                    format_block(&r.d),
                    r.count,
                    r.expectation.num,
                    r.expectation.den,
                    a,
                    b
                ));
            }
            for r in &l.un {
                let (a, b) = ratio_cols(&r.ratio);
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    l.ell,
                    format_block(&r.d),
                    format_block(&r.b),
                    r.count,
                    r.expectation.num,
                    r.expectation.den,
                    a,
                    b
                ));
            }
        }
        s
    }
}
