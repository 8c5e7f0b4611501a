//! Mergeable sliding-window counters and exclusion sets.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rayon::prelude::*;

/// Positions removed from a count.
#[derive(Clone, Default)]
pub enum ExclusionSet {
    #[default]
    None,
    All,
    Indices(BTreeSet<usize>),
    Predicate(Arc<dyn Fn(usize) -> bool + Send + Sync>),
}

impl fmt::Debug for ExclusionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExclusionSet::None => f.write_str("None"),
            ExclusionSet::All => f.write_str("All"),
            ExclusionSet::Indices(s) => write!(f, "Indices({} entries)", s.len()),
            ExclusionSet::Predicate(_) => f.write_str("Predicate(..)"),
        }
    }
}

impl ExclusionSet {
    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        ExclusionSet::Indices(it.into_iter().collect())
    }

    pub fn predicate<F: Fn(usize) -> bool + Send + Sync + 'static>(f: F) -> Self {
        ExclusionSet::Predicate(Arc::new(f))
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        match self {
            ExclusionSet::None => false,
            ExclusionSet::All => true,
            ExclusionSet::Indices(s) => s.contains(&i),
            ExclusionSet::Predicate(p) => p(i),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, ExclusionSet::None)
    }

    /// Number of excluded indices in `[lo, hi)`.
    pub fn count_in(&self, lo: usize, hi: usize) -> usize {
        if hi <= lo {
            return 0;
        }
        match self {
            ExclusionSet::None => 0,
            ExclusionSet::All => hi - lo,
            ExclusionSet::Indices(s) => s.range(lo..hi).count(),
            ExclusionSet::Predicate(p) => (lo..hi).filter(|&i| p(i)).count(),
        }
    }

    /// Realized density over `[lo, hi)`.
    pub fn density(&self, lo: usize, hi: usize) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.count_in(lo, hi) as f64 / (hi - lo) as f64
    }
}

/// Counts of length-`k` windows over a contiguous stretch of a stream.
///
/// A counter remembers its first and last `k-1` elements so two counters over
/// adjacent stretches can be merged, counting the windows that straddle the
/// seam. Window positions are absolute: the element at index `offset + i` of
/// the stream starts window `offset + i`.
#[derive(Clone, Debug)]
pub struct WindowCounter<T: Hash + Eq + Clone> {
    k: usize,
    offset: usize,
    len: usize,
    head: Vec<T>,
    tail: Vec<T>,
    counts: HashMap<Vec<T>, u64>,
    windows: u64,
}

impl<T: Hash + Eq + Clone> WindowCounter<T> {
    pub fn empty(k: usize, offset: usize) -> Self {
        assert!(k >= 1, "window length must be positive");
        WindowCounter {
            k,
            offset,
            len: 0,
            head: Vec::new(),
            tail: Vec::new(),
            counts: HashMap::new(),
            windows: 0,
        }
    }

    /// Counts every window lying inside `data`, whose first element sits at
    /// stream index `offset`. Windows starting at excluded indices are skipped.
    pub fn from_slice(k: usize, offset: usize, data: &[T], excl: &ExclusionSet) -> Self {
        let mut c = Self::empty(k, offset);
        c.len = data.len();
        let edge = (k - 1).min(data.len());
        c.head = data[..edge].to_vec();
        c.tail = data[data.len() - edge..].to_vec();
        if data.len() >= k {
            for (i, w) in data.windows(k).enumerate() {
                if !excl.contains(offset + i) {
                    c.bump(w);
                }
            }
        }
        c
    }

    #[inline]
    fn bump(&mut self, w: &[T]) {
        self.windows += 1;
        if let Some(v) = self.counts.get_mut(w) {
            *v += 1;
        } else {
            self.counts.insert(w.to_vec(), 1);
        }
    }

    /// Appends `right`, which must start where `self` ends.
    pub fn merge(mut self, right: Self, excl: &ExclusionSet) -> Self {
        assert_eq!(self.k, right.k, "window lengths differ");
        assert_eq!(self.offset + self.len, right.offset, "counters are not adjacent");
        let k = self.k;
        if k > 1 {
            let mut seam = self.tail.clone();
            let seam_start = self.offset + self.len - self.tail.len();
            let left_part = seam.len();
            seam.extend(right.head.iter().cloned());
            if seam.len() >= k {
                for (i, w) in seam.windows(k).enumerate() {
                    // only windows touching both sides
                    if i + k <= left_part || i >= left_part {
                        continue;
                    }
                    if !excl.contains(seam_start + i) {
                        self.bump(w);
                    }
                }
            }
        }
        if self.counts.len() < right.counts.len() {
            let mut big = right.counts;
            for (w, v) in self.counts.drain() {
                *big.entry(w).or_insert(0) += v;
            }
            self.counts = big;
        } else {
            for (w, v) in right.counts {
                *self.counts.entry(w).or_insert(0) += v;
            }
        }
        self.windows += right.windows;
        let edge = k - 1;
        if self.head.len() < edge {
            let need = edge - self.head.len();
            self.head.extend(right.head.iter().take(need).cloned());
        }
        if right.tail.len() < edge {
            let mut t = self.tail;
            t.extend(right.tail.iter().cloned());
            let cut = t.len().saturating_sub(edge);
            self.tail = t[cut..].to_vec();
        } else {
            self.tail = right.tail;
        }
        self.len += right.len;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.windows
    }

    pub fn get(&self, w: &[T]) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &HashMap<Vec<T>, u64> {
        &self.counts
    }

    pub fn into_counts(self) -> HashMap<Vec<T>, u64> {
        self.counts
    }

    /// Entries sorted by key.
    pub fn sorted(&self) -> Vec<(Vec<T>, u64)>
    where
        T: Ord,
    {
        let mut v: Vec<_> = self.counts.iter().map(|(w, c)| (w.clone(), *c)).collect();
        v.sort();
        v
    }
}

const CHUNK: usize = 1 << 16;

/// Counts the `n` windows starting at `data[0..n]` (stream indices
/// `offset..offset+n`), in parallel over chunks stitched by merge.
pub fn count_windows<T>(data: &[T], k: usize, n: usize, offset: usize, excl: &ExclusionSet) -> WindowCounter<T>
where
    T: Hash + Eq + Clone + Send + Sync,
{
    assert!(
        data.len() >= n + k - 1,
        "need {} elements for {n} windows of length {k}, have {}",
        n + k - 1,
        data.len()
    );
    if n == 0 {
        return WindowCounter::empty(k, offset);
    }
    let data = &data[..n + k - 1];
    if data.len() <= CHUNK {
        return WindowCounter::from_slice(k, offset, data, excl);
    }
    let parts: Vec<WindowCounter<T>> = data
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(i, chunk)| WindowCounter::from_slice(k, offset + i * CHUNK, chunk, excl))
        .collect();
    let mut it = parts.into_iter();
    let first = it.next().expect("non-empty");
    it.fold(first, |acc, part| acc.merge(part, excl))
}
