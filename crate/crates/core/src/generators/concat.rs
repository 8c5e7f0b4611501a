//! Digit streams obtained by concatenating expansions of integer sequences,
//! and the continued-fraction concatenation of Adler, Keane and Smorodinsky.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcatKind {
    Champernowne,
    Squares,
    Primes,
    Aks,
}

impl std::str::FromStr for ConcatKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "champernowne" => Ok(ConcatKind::Champernowne),
            "squares" => Ok(ConcatKind::Squares),
            "primes" => Ok(ConcatKind::Primes),
            "aks" => Ok(ConcatKind::Aks),
            _ => Err(crate::Error::InvalidSpec(format!("unknown concatenation kind {s:?}"))),
        }
    }
}

/// Base-`g` digits of `n`, most significant first.
pub fn to_base(mut n: u64, g: u64) -> Vec<u64> {
    debug_assert!(g >= 2);
    if n == 0 {
        return vec![0];
    }
    let mut v = Vec::new();
    while n > 0 {
        v.push(n % g);
        n /= g;
    }
    v.reverse();
    v
}

/// Continued-fraction partial quotients of `p/q` for `0 < p < q`.
///
/// Euclid's algorithm ends on a quotient of at least 2, which is the
/// convention that makes the expansion unique.
pub fn partial_quotients(mut p: u64, mut q: u64) -> Vec<u64> {
    debug_assert!(0 < p && p < q);
    let mut out = Vec::new();
    loop {
        let a = q / p;
        let r = q % p;
        out.push(a);
        if r == 0 {
            break;
        }
        q = p;
        p = r;
    }
    out
}

/// Incremental prime source by trial division against earlier primes.
#[derive(Clone, Debug, Default)]
struct Primes {
    found: Vec<u64>,
}

impl Primes {
    fn next(&mut self) -> u64 {
        let mut c = match self.found.last() {
            None => 2,
            Some(2) => 3,
            Some(&p) => p + 2,
        };
        loop {
            let is_prime = self
                .found
                .iter()
                .take_while(|&&p| p * p <= c)
                .all(|&p| c % p != 0);
            if is_prime {
                self.found.push(c);
                return c;
            }
            c += if c == 2 { 1 } else { 2 };
        }
    }
}

/// Resumable digit stream for one concatenation kind.
#[derive(Clone, Debug)]
pub struct DigitStream {
    kind: ConcatKind,
    g: u64,
    counter: u64,
    aks_den: u64,
    primes: Primes,
    pending: Vec<u64>,
    pos: usize,
}

impl DigitStream {
    pub fn new(kind: ConcatKind, g: u64) -> Self {
        assert!(g >= 2, "base must be at least 2");
        DigitStream {
            kind,
            g,
            counter: 0,
            aks_den: 2,
            primes: Primes::default(),
            pending: Vec::new(),
            pos: 0,
        }
    }

    pub fn kind(&self) -> ConcatKind {
        self.kind
    }

    pub fn base(&self) -> u64 {
        self.g
    }

    fn refill(&mut self) {
        self.pos = 0;
        self.pending = match self.kind {
            ConcatKind::Champernowne => {
                self.counter += 1;
                to_base(self.counter, self.g)
            }
            ConcatKind::Squares => {
                self.counter += 1;
                to_base(self.counter * self.counter, self.g)
            }
            ConcatKind::Primes => to_base(self.primes.next(), self.g),
            ConcatKind::Aks => {
                // 1/2, 1/3, 2/3, 1/4, 2/4, 3/4, ... including unreduced fractions
                self.counter += 1;
                if self.counter == self.aks_den {
                    self.aks_den += 1;
                    self.counter = 1;
                }
                partial_quotients(self.counter, self.aks_den)
            }
        };
    }

    pub fn take_vec(&mut self, count: usize) -> Vec<u64> {
        self.take(count).collect()
    }
}

impl Iterator for DigitStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.pos >= self.pending.len() {
            self.refill();
        }
        let d = self.pending[self.pos];
        self.pos += 1;
        Some(d)
    }
}

/// The first `count` digits of the concatenation stream.
pub fn concatenation_digits(kind: ConcatKind, g: u64, count: usize) -> Vec<u64> {
    DigitStream::new(kind, g).take_vec(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_prefixes() {
        assert_eq!(
            concatenation_digits(ConcatKind::Champernowne, 10, 15),
            vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 0, 1, 1, 1, 2]
        );
        assert_eq!(
            concatenation_digits(ConcatKind::Squares, 10, 12),
            vec![1, 4, 9, 1, 6, 2, 5, 3, 6, 4, 9, 6]
        );
        assert_eq!(
            concatenation_digits(ConcatKind::Primes, 10, 16),
            vec![2, 3, 5, 7, 1, 1, 1, 3, 1, 7, 1, 9, 2, 3, 2, 9]
        );
    }

    #[test]
    fn binary_champernowne() {
        // 1, 10, 11, 100
        assert_eq!(
            concatenation_digits(ConcatKind::Champernowne, 2, 8),
            vec![1, 1, 0, 1, 1, 1, 0, 0]
        );
    }

    #[test]
    fn partial_quotient_convention() {
        assert_eq!(partial_quotients(1, 2), vec![2]);
        assert_eq!(partial_quotients(2, 3), vec![1, 2]);
        assert_eq!(partial_quotients(2, 4), vec![2]);
        assert_eq!(partial_quotients(3, 5), vec![1, 1, 2]);
        assert_eq!(partial_quotients(4, 5), vec![1, 4]);
        assert_eq!(partial_quotients(1, 4), vec![4]);
    }

    #[test]
    fn aks_stream_order() {
        assert_eq!(
            concatenation_digits(ConcatKind::Aks, 10, 16),
            vec![2, 3, 1, 2, 4, 2, 1, 3, 5, 2, 2, 1, 1, 2, 1, 4]
        );
    }

    #[test]
    fn primes_are_primes() {
        let mut p = Primes::default();
        let v: Vec<u64> = (0..10).map(|_| p.next()).collect();
        assert_eq!(v, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
