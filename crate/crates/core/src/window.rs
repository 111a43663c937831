//! Compressed summaries of long words built by concatenation.
//!
//! A [`Compressed`] keeps the length, a bounded head and tail, and a
//! [`Collector`] holding everything observed in windows of bounded span. Any
//! window of span at most `reach` that crosses a junction lies inside
//! `tail(left) ++ head(right)`, so concatenation is exact.

use std::collections::HashSet;

use crate::error::{Error, Result};

pub trait Collector: Clone {
    /// Largest span (in positions) of a window the collector observes.
    fn reach(&self) -> usize;
    fn absorb(&mut self, other: &Self);
    /// Records windows with at least one position in `left` and one in `right`.
    fn scan_junction(&mut self, left: &[u32], right: &[u32]);
    /// Records every window inside `word`.
    fn scan_word(&mut self, word: &[u32]);
}

#[derive(Clone, Debug)]
pub struct Compressed<C> {
    pub len: u128,
    /// The whole word when `len ≤ 2·reach`, else its first `reach` symbols.
    head: Vec<u32>,
    /// Empty when `head` is the whole word, else the last `reach` symbols.
    tail: Vec<u32>,
    pub collector: C,
}

impl<C: Collector> Compressed<C> {
    pub fn from_word(word: &[u32], mut collector: C) -> Self {
        collector.scan_word(word);
        let r = collector.reach();
        let (head, tail) = if word.len() <= 2 * r {
            (word.to_vec(), Vec::new())
        } else {
            (word[..r].to_vec(), word[word.len() - r..].to_vec())
        };
        Compressed { len: word.len() as u128, head, tail, collector }
    }

    /// `sym^count` without materializing it.
    pub fn run(sym: u32, count: u128, mut collector: C) -> Self {
        let r = collector.reach();
        let sample = vec![sym; (count.min(r as u128 + 1)) as usize];
        collector.scan_word(&sample);
        let (head, tail) = if count <= 2 * r as u128 {
            (vec![sym; count as usize], Vec::new())
        } else {
            (vec![sym; r], vec![sym; r])
        };
        Compressed { len: count, head, tail, collector }
    }

    pub fn is_explicit(&self) -> bool {
        self.tail.is_empty()
    }

    /// First `min(len, reach)` symbols.
    pub fn prefix(&self) -> &[u32] {
        let r = self.collector.reach();
        &self.head[..self.head.len().min(r)]
    }

    /// Last `min(len, reach)` symbols.
    pub fn suffix(&self) -> &[u32] {
        if self.is_explicit() {
            let r = self.collector.reach();
            &self.head[self.head.len().saturating_sub(r)..]
        } else {
            &self.tail
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut collector = self.collector.clone();
        collector.absorb(&other.collector);
        collector.scan_junction(self.suffix(), other.prefix());
        let r = collector.reach();
        let len = self.len + other.len;
        let (head, tail) = if len <= 2 * r as u128 {
            let mut w = self.head.clone();
            w.extend_from_slice(&other.head);
            (w, Vec::new())
        } else {
            let head = if self.len >= r as u128 {
                self.prefix().to_vec()
            } else {
                let mut h = self.head.clone();
                h.extend_from_slice(&other.head[..r - self.head.len()]);
                h
            };
            let tail = if other.len >= r as u128 {
                other.suffix().to_vec()
            } else {
                let need = r - other.head.len();
                let mut t = self.suffix()[self.suffix().len() - need..].to_vec();
                t.extend_from_slice(&other.head);
                t
            };
            (head, tail)
        };
        Compressed { len, head, tail, collector }
    }

    pub fn empty(collector: C) -> Self {
        Compressed { len: 0, head: Vec::new(), tail: Vec::new(), collector }
    }
}

/// Realized triples `(u, v, span)` with `1 ≤ span ≤ width` over an alphabet of size `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCollector {
    width: usize,
    k: usize,
    bits: Vec<u64>,
}

impl PairCollector {
    pub fn new(width: usize, k: usize) -> Self {
        let n = width * k * k;
        PairCollector { width, k, bits: vec![0; n.div_ceil(64)] }
    }

    /// Bits needed for a collector of this shape.
    pub fn size(width: usize, k: usize) -> u128 {
        width as u128 * (k as u128) * (k as u128)
    }

    #[inline]
    fn index(&self, u: u32, v: u32, span: usize) -> usize {
        ((span - 1) * self.k + u as usize) * self.k + v as usize
    }

    #[inline]
    fn set(&mut self, u: u32, v: u32, span: usize) {
        let i = self.index(u, v, span);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, u: u32, v: u32, span: usize) -> bool {
        if span == 0 || span > self.width || u as usize >= self.k || v as usize >= self.k {
            return false;
        }
        let i = self.index(u, v, span);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

impl Collector for PairCollector {
    fn reach(&self) -> usize {
        self.width
    }

    fn absorb(&mut self, other: &Self) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
    }

    fn scan_junction(&mut self, left: &[u32], right: &[u32]) {
        for (i, &u) in left.iter().enumerate() {
            let dl = left.len() - i;
            for (j, &v) in right.iter().enumerate() {
                let span = dl + j;
                if span > self.width {
                    break;
                }
                self.set(u, v, span);
            }
        }
    }

    fn scan_word(&mut self, word: &[u32]) {
        for a in 0..word.len() {
            let end = (a + self.width).min(word.len() - 1);
            for b in a + 1..=end {
                self.set(word[a], word[b], b - a);
            }
        }
    }
}

/// Distinct factors of exact length `len`, packed base `2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCollector {
    len: usize,
    bits: u32,
    pub factors: HashSet<u64>,
}

impl FactorCollector {
    pub fn new(len: usize, alphabet: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Precondition("factor length must be at least 1".into()));
        }
        let bits = usize::BITS - alphabet.saturating_sub(1).leading_zeros();
        let bits = bits.max(1);
        if len as u32 * bits > 64 {
            return Err(Error::Precondition(format!(
                "factors of length {len} over {alphabet} letters do not pack into 64 bits"
            )));
        }
        Ok(FactorCollector { len, bits, factors: HashSet::new() })
    }

    pub fn factor_len(&self) -> usize {
        self.len
    }

    fn pack(&self, w: &[u32]) -> u64 {
        w.iter().fold(0u64, |acc, &x| (acc << self.bits) | x as u64)
    }

    pub fn unpack(&self, code: u64) -> Vec<u32> {
        let mask = (1u64 << self.bits) - 1;
        (0..self.len)
            .rev()
            .map(|i| ((code >> (i as u32 * self.bits)) & mask) as u32)
            .collect()
    }

    /// Factors in lexicographic order of their letter sequences.
    pub fn sorted(&self) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = self.factors.iter().map(|&c| self.unpack(c)).collect();
        v.sort();
        v
    }
}

impl Collector for FactorCollector {
    fn reach(&self) -> usize {
        self.len - 1
    }

    fn absorb(&mut self, other: &Self) {
        self.factors.extend(other.factors.iter().copied());
    }

    fn scan_junction(&mut self, left: &[u32], right: &[u32]) {
        let mut joined = left.to_vec();
        joined.extend_from_slice(right);
        let cut = left.len();
        for start in 0..joined.len().saturating_sub(self.len - 1) {
            let end = start + self.len;
            if start < cut && end > cut {
                let code = self.pack(&joined[start..end]);
                self.factors.insert(code);
            }
        }
    }

    fn scan_word(&mut self, word: &[u32]) {
        if word.len() < self.len {
            return;
        }
        for w in word.windows(self.len) {
            let code = self.pack(w);
            self.factors.insert(code);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_pairs(word: &[u32], width: usize, k: usize) -> PairCollector {
        let mut c = PairCollector::new(width, k);
        c.scan_word(word);
        c
    }

    fn brute_factors(word: &[u32], len: usize) -> HashSet<u64> {
        let mut c = FactorCollector::new(len, 4).unwrap();
        c.scan_word(word);
        c.factors
    }

    proptest! {
        #[test]
        fn pair_concat_matches_brute(pieces in prop::collection::vec(prop::collection::vec(0u32..4, 0..12), 1..6),
                                     width in 1usize..9) {
            let mut acc = Compressed::empty(PairCollector::new(width, 4));
            let mut flat = Vec::new();
            for p in &pieces {
                acc = acc.concat(&Compressed::from_word(p, PairCollector::new(width, 4)));
                flat.extend_from_slice(p);
            }
            prop_assert_eq!(acc.len, flat.len() as u128);
            prop_assert_eq!(acc.collector, brute_pairs(&flat, width, 4));
        }

        #[test]
        fn factor_concat_matches_brute(pieces in prop::collection::vec(prop::collection::vec(0u32..4, 0..12), 1..6),
                                       runs in prop::collection::vec((0u32..4, 0u128..20), 0..4),
                                       len in 1usize..7) {
            let mut acc = Compressed::empty(FactorCollector::new(len, 4).unwrap());
            let mut flat = Vec::new();
            for p in &pieces {
                acc = acc.concat(&Compressed::from_word(p, FactorCollector::new(len, 4).unwrap()));
                flat.extend_from_slice(p);
            }
            for &(sym, count) in &runs {
                acc = acc.concat(&Compressed::run(sym, count, FactorCollector::new(len, 4).unwrap()));
                flat.extend(std::iter::repeat(sym).take(count as usize));
            }
            prop_assert_eq!(acc.len, flat.len() as u128);
            prop_assert_eq!(&acc.collector.factors, &brute_factors(&flat, len));
            let r = len - 1;
            prop_assert_eq!(acc.prefix(), &flat[..flat.len().min(r)]);
            prop_assert_eq!(acc.suffix(), &flat[flat.len() - flat.len().min(r)..]);
        }
    }

    #[test]
    fn pack_round_trip() {
        let c = FactorCollector::new(5, 3).unwrap();
        assert_eq!(c.unpack(c.pack(&[2, 0, 1, 1, 2])), vec![2, 0, 1, 1, 2]);
        assert!(FactorCollector::new(33, 3).is_err());
        assert!(FactorCollector::new(0, 2).is_err());
    }
}
