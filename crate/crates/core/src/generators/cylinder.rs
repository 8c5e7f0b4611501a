use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Exact, Rational};
use crate::windows::{count_windows, ExclusionSet};

/// Window counts of base blocks over positions `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderStats {
    pub k: usize,
    pub n: usize,
    #[serde(with = "block_map")]
    pub counts: BTreeMap<Vec<u64>, u64>,
}

impl CylinderStats {
    pub fn count(&self, w: &[u64]) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `d̂_n(w) = count(w) / n`.
    pub fn frequency(&self, w: &[u64]) -> Rational {
        rational::from_u128(self.count(w) as u128, self.n.max(1) as u128)
    }

    pub fn frequency_f64(&self, w: &[u64]) -> f64 {
        self.count(w) as f64 / self.n.max(1) as f64
    }

    pub fn frequency_sum(&self) -> Rational {
        if self.n == 0 {
            return Rational::zero();
        }
        rational::from_u128(self.total() as u128, self.n as u128)
    }
}

mod block_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        block: Vec<u64>,
        count: u64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<u64>, u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m.iter().map(|(b, &c)| Entry { block: b.clone(), count: c }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Vec<u64>, u64>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.block, e.count)).collect())
    }
}

/// Counts the length-`k` windows starting at positions `1..=n` of `bases`.
pub fn cylinder_stats(bases: &[u64], k: usize, n: usize) -> Result<CylinderStats> {
    if k == 0 {
        return Err(Error::BadParams("block length must be at least 1".into()));
    }
    let needed = n + k - 1;
    if bases.len() < needed {
        return Err(Error::SourceExhausted { needed, available: bases.len() });
    }
    let c = count_windows(bases, k, n, 1, &ExclusionSet::None);
    Ok(CylinderStats { k, n, counts: c.into_counts().into_iter().collect() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Suspect,
}

impl Verdict {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Suspect
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynGenConfig {
    pub k_max: usize,
    pub n: usize,
    /// Allowed `|d̂_N(w) − d̂_{N/2}(w)|`.
    pub tol: f64,
    /// Frequencies below this flag a block as possibly density zero.
    pub floor: f64,
    /// A block whose frequency falls below `decay · d̂_{N/2}(w)` is flagged.
    pub decay: f64,
    /// Smallest count at `N` for which the decay test is applied.
    pub decay_min_count: u64,
}

impl DynGenConfig {
    pub fn new(k_max: usize, n: usize, tol: f64) -> Self {
        DynGenConfig { k_max, n, tol, floor: 1e-5, decay: 0.75, decay_min_count: 64 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuspectBlock {
    pub block: Vec<u64>,
    pub count: u64,
    pub frequency: f64,
    pub frequency_half: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynGenLevel {
    pub k: usize,
    pub distinct_blocks: usize,
    pub stability: Verdict,
    pub max_deviation: f64,
    pub worst_block: Option<Vec<u64>>,
    pub positivity: Verdict,
    pub suspect_blocks: Vec<SuspectBlock>,
    pub sum: Exact,
    pub conservation: Verdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynGenReport {
    pub config: DynGenConfig,
    pub levels: Vec<DynGenLevel>,
    pub stability: Verdict,
    pub positivity: Verdict,
    pub conservation: Verdict,
}

/// Finite-prefix screen of the three dynamical-generation conditions.
///
/// Needs `n + k_max − 1` bases. Verdicts are heuristics: `Suspect` marks a
/// prefix that looks inconsistent with the condition.
pub fn check_dynamic_generation(bases: &[u64], cfg: &DynGenConfig) -> Result<DynGenReport> {
    if cfg.k_max == 0 || cfg.n < 2 * cfg.k_max {
        return Err(Error::BadParams(format!(
            "need k_max ≥ 1 and N ≥ 2·k_max, got k_max={} N={}",
            cfg.k_max, cfg.n
        )));
    }
    let half = cfg.n / 2;
    let mut levels = Vec::with_capacity(cfg.k_max);
    for k in 1..=cfg.k_max {
        let full = cylinder_stats(bases, k, cfg.n)?;
        let early = cylinder_stats(bases, k, half)?;
        let mut max_dev = 0.0f64;
        let mut worst = None;
        let mut keys: Vec<&Vec<u64>> = full.counts.keys().collect();
        keys.extend(early.counts.keys().filter(|w| !full.counts.contains_key(*w)));
        for w in keys {
            let dev = (full.frequency_f64(w) - early.frequency_f64(w)).abs();
            if dev > max_dev {
                max_dev = dev;
                worst = Some(w.clone());
            }
        }
        let mut suspects = Vec::new();
        for (w, &c) in &full.counts {
            let d = full.frequency_f64(w);
            let dh = early.frequency_f64(w);
            let decayed = c >= cfg.decay_min_count && d < cfg.decay * dh;
            if d < cfg.floor || decayed {
                suspects.push(SuspectBlock { block: w.clone(), count: c, frequency: d, frequency_half: dh });
            }
        }
        let sum = full.frequency_sum();
        let conserved = full.total() == cfg.n as u64;
        levels.push(DynGenLevel {
            k,
            distinct_blocks: full.counts.len(),
            stability: Verdict::from_ok(max_dev <= cfg.tol),
            max_deviation: max_dev,
            worst_block: worst,
            positivity: Verdict::from_ok(suspects.is_empty()),
            suspect_blocks: suspects,
            sum: Exact::from(&sum),
            conservation: Verdict::from_ok(conserved && num_traits::One::is_one(&sum)),
        });
    }
    let all = |f: fn(&DynGenLevel) -> Verdict| Verdict::from_ok(levels.iter().all(|l| f(l) == Verdict::Pass));
    Ok(DynGenReport {
        config: cfg.clone(),
        stability: all(|l| l.stability),
        positivity: all(|l| l.positivity),
        conservation: all(|l| l.conservation),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn periodic_counts() {
        let q: Vec<u64> = (0..1001).map(|i| if i % 2 == 0 { 2 } else { 3 }).collect();
        let s = cylinder_stats(&q, 2, 1000).unwrap();
        assert_eq!(s.count(&[2, 3]), 500);
        assert_eq!(s.count(&[3, 2]), 500);
        assert_eq!(s.counts.len(), 2);
        let s1 = cylinder_stats(&q, 1, 1000).unwrap();
        assert_eq!(s1.frequency(&[2]), rat(1, 2));
        assert_eq!(s1.frequency_sum(), rat(1, 1));
    }

    #[test]
    fn short_prefix_is_an_error() {
        assert!(matches!(cylinder_stats(&[2, 3], 2, 2), Err(Error::SourceExhausted { needed: 3, available: 2 })));
    }

    #[test]
    fn periodic_passes() {
        let q: Vec<u64> = (0..10_010).map(|i| if i % 2 == 0 { 2 } else { 3 }).collect();
        let r = check_dynamic_generation(&q, &DynGenConfig::new(3, 10_000, 0.01)).unwrap();
        assert_eq!(r.stability, Verdict::Pass);
        assert_eq!(r.positivity, Verdict::Pass);
        assert_eq!(r.conservation, Verdict::Pass);
    }

    #[test]
    fn square_positions_are_suspect() {
        let n = 1_000_000usize;
        let q: Vec<u64> = (1..=n + 8)
            .map(|i| {
                let r = (i as f64).sqrt() as usize;
                let is_sq = (r.saturating_sub(1)..=r + 1).any(|s| s * s == i);
                if is_sq { 3 } else { 2 }
            })
            .collect();
        let r = check_dynamic_generation(&q, &DynGenConfig::new(1, n, 0.01)).unwrap();
        assert_eq!(r.positivity, Verdict::Suspect);
        assert!(r.levels[0].suspect_blocks.iter().any(|b| b.block == vec![3]));
        assert_eq!(r.stability, Verdict::Pass);
    }
}
