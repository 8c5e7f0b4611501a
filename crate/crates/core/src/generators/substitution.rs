//! Substitutions on finite alphabets and their fixed points.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub const DEFAULT_T_MAX: u32 = 16;

/// A substitution with letters indexed `0..n` in the order of `letters`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    letters: Vec<char>,
    images: Vec<Vec<u8>>,
    start: u8,
}

impl Substitution {
    pub fn new(rules: &BTreeMap<char, String>, start: char) -> Result<Self> {
        let mut letters: BTreeSet<char> = rules.keys().copied().collect();
        for img in rules.values() {
            letters.extend(img.chars());
        }
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.len() > u8::MAX as usize {
            return Err(Error::InvalidSpec("alphabet too large".into()));
        }
        let index = |c: char| letters.iter().position(|&l| l == c).map(|i| i as u8);
        let mut images = Vec::with_capacity(letters.len());
        for &l in &letters {
            let img = rules
                .get(&l)
                .ok_or_else(|| Error::InvalidSpec(format!("no rule for letter {l:?}")))?;
            if img.is_empty() {
                return Err(Error::InvalidSpec(format!("empty image for letter {l:?}")));
            }
            images.push(img.chars().map(|c| index(c).expect("letter collected")).collect());
        }
        let start = index(start)
            .ok_or_else(|| Error::InvalidSpec(format!("start letter {start:?} has no rule")))?;
        Ok(Substitution { letters, images, start })
    }

    pub fn from_pairs(pairs: &[(char, &str)], start: char) -> Result<Self> {
        let rules = pairs.iter().map(|&(c, s)| (c, s.to_string())).collect();
        Self::new(&rules, start)
    }

    pub fn fibonacci_squared() -> Self {
        Self::from_pairs(&[('a', "ab"), ('b', "bab")], 'a').expect("preset")
    }

    pub fn fibonacci_raw() -> Self {
        Self::from_pairs(&[('a', "b"), ('b', "ab")], 'a').expect("preset")
    }

    pub fn thue_morse() -> Self {
        Self::from_pairs(&[('a', "ab"), ('b', "ba")], 'a').expect("preset")
    }

    pub fn rudin_shapiro() -> Self {
        Self::from_pairs(&[('a', "ab"), ('b', "ac"), ('c', "db"), ('d', "dc")], 'a').expect("preset")
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn letter(&self, i: u8) -> char {
        self.letters[i as usize]
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.letters.iter().position(|&l| l == c).map(|i| i as u8)
    }

    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(word.len() * 2);
        for &c in word {
            out.extend_from_slice(&self.images[c as usize]);
        }
        out
    }

    /// (H2): the image of the start letter begins with that letter.
    pub fn has_h2(&self) -> bool {
        self.images[self.start as usize][0] == self.start
    }

    /// Letters whose iterated images stay bounded, violating (H1).
    ///
    /// `|ψ^t(a)|` is unbounded iff some letter reachable from `a` lies on a
    /// cycle of the letter graph and has an image of length at least 2.
    pub fn non_growing_letters(&self) -> Vec<char> {
        let n = self.letters.len();
        let reach = self.reachability();
        let expanding: Vec<bool> = (0..n)
            .map(|b| reach[b][b] && self.images[b].len() >= 2)
            .collect();
        (0..n)
            .filter(|&a| !(0..n).any(|b| (a == b || reach[a][b]) && expanding[b]))
            .map(|a| self.letters[a])
            .collect()
    }

    /// `reach[a][b]`: `b` occurs in `ψ^t(a)` for some `t ≥ 1`.
    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.letters.len();
        let mut reach = vec![vec![false; n]; n];
        for (a, img) in self.images.iter().enumerate() {
            for &b in img {
                reach[a][b as usize] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        reach
    }

    /// Smallest `t ≤ t_max` with every letter occurring in every `ψ^t(a)`.
    pub fn primitivity_exponent(&self, t_max: u32) -> Option<u32> {
        let n = self.letters.len();
        let mut step = vec![vec![false; n]; n];
        for (a, img) in self.images.iter().enumerate() {
            for &b in img {
                step[a][b as usize] = true;
            }
        }
        let mut power = step.clone();
        for t in 1..=t_max {
            if power.iter().all(|row| row.iter().all(|&x| x)) {
                return Some(t);
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if power[i][k] {
                        for j in 0..n {
                            next[i][j] |= step[k][j];
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    /// Runs the checks in the order (H2), (H1), primitivity.
    pub fn validate(&self, t_max: u32) -> Result<()> {
        if !self.has_h2() {
            return Err(Error::NotExtendable(self.letter(self.start)));
        }
        if let Some(&c) = self.non_growing_letters().first() {
            return Err(Error::NotGrowing(c));
        }
        if self.primitivity_exponent(t_max).is_none() {
            return Err(Error::NotPrimitive { t_max });
        }
        Ok(())
    }

    /// First `length` letters of the fixed point, as letter indices.
    pub fn fixed_point_indices(&self, length: usize, t_max: u32) -> Result<Vec<u8>> {
        self.validate(t_max)?;
        let mut w = vec![self.start];
        while w.len() < length {
            w = self.apply(&w);
        }
        w.truncate(length);
        Ok(w)
    }

    pub fn fixed_point(&self, length: usize, t_max: u32) -> Result<String> {
        Ok(self
            .fixed_point_indices(length, t_max)?
            .into_iter()
            .map(|i| self.letter(i))
            .collect())
    }
}

/// First `length` letters of the fixed point of `rules` starting at `start`.
pub fn substitution_fixed_point(rules: &BTreeMap<char, String>, start: char, length: usize) -> Result<String> {
    Substitution::new(rules, start)?.fixed_point(length, DEFAULT_T_MAX)
}
