//! Fixed-width method sets.
//!
//! A [`MethodSet`] is a bit-vector over a class alphabet. The width is fixed
//! when the set is created; binary operations between sets of different
//! widths are rejected rather than silently coerced.

use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::WidthMismatch;

const WORD_BITS: usize = u64::BITS as usize;

/// Index of a method in its class alphabet. Index 0 is the constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodId(pub usize);

impl MethodId {
    pub const CONSTRUCTOR: MethodId = MethodId(0);

    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_constructor(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodSet {
    width: usize,
    words: SmallVec<[u64; 2]>,
}

impl MethodSet {
    pub fn empty(width: usize) -> Self {
        Self {
            width,
            words: smallvec![0; width.div_ceil(WORD_BITS)],
        }
    }

    pub fn full(width: usize) -> Self {
        let mut set = Self::empty(width);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        set.trim();
        set
    }

    pub fn singleton(width: usize, m: MethodId) -> Self {
        let mut set = Self::empty(width);
        set.insert(m);
        set
    }

    pub fn from_ids<I: IntoIterator<Item = MethodId>>(width: usize, ids: I) -> Self {
        let mut set = Self::empty(width);
        for m in ids {
            set.insert(m);
        }
        set
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, ids: I) -> Self {
        Self::from_ids(width, ids.into_iter().map(MethodId))
    }

    /// Parses a 0/1 string, leftmost character is method 0.
    pub fn from_bit_string(bits: &str) -> Option<Self> {
        let mut set = Self::empty(bits.len());
        for (i, c) in bits.chars().enumerate() {
            match c {
                '1' => {
                    set.insert(MethodId(i));
                }
                '0' => {}
                _ => return None,
            }
        }
        Some(set)
    }

    fn trim(&mut self) {
        let rem = self.width % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn contains(&self, m: MethodId) -> bool {
        assert!(m.0 < self.width, "method {} out of width {}", m.0, self.width);
        self.words[m.0 / WORD_BITS] & (1 << (m.0 % WORD_BITS)) != 0
    }

    pub fn insert(&mut self, m: MethodId) -> bool {
        assert!(m.0 < self.width, "method {} out of width {}", m.0, self.width);
        let word = &mut self.words[m.0 / WORD_BITS];
        let before = *word;
        *word |= 1 << (m.0 % WORD_BITS);
        before != *word
    }

    pub fn remove(&mut self, m: MethodId) -> bool {
        assert!(m.0 < self.width, "method {} out of width {}", m.0, self.width);
        let word = &mut self.words[m.0 / WORD_BITS];
        let before = *word;
        *word &= !(1 << (m.0 % WORD_BITS));
        before != *word
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = MethodId> + '_ {
        (0..self.width).map(MethodId).filter(|m| self.contains(*m))
    }

    fn check(&self, other: &Self) -> Result<(), WidthMismatch> {
        if self.width == other.width {
            Ok(())
        } else {
            Err(WidthMismatch {
                left: self.width,
                right: other.width,
            })
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self, WidthMismatch> {
        self.check(other)?;
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(Self {
            width: self.width,
            words,
        })
    }

    pub fn try_union(&self, other: &Self) -> Result<Self, WidthMismatch> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn try_intersection(&self, other: &Self) -> Result<Self, WidthMismatch> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn try_difference(&self, other: &Self) -> Result<Self, WidthMismatch> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn try_is_subset(&self, other: &Self) -> Result<bool, WidthMismatch> {
        self.check(other)?;
        Ok(self
            .words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0))
    }

    /// Panicking variants for callers that already established equal widths.
    pub fn union(&self, other: &Self) -> Self {
        self.try_union(other).expect("method set width")
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.try_intersection(other).expect("method set width")
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.try_difference(other).expect("method set width")
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.try_is_subset(other).expect("method set width")
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn complement(&self) -> Self {
        Self::full(self.width).difference(self)
    }

    pub fn union_with(&mut self, other: &Self) {
        assert_eq!(self.width, other.width, "method set width");
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= *b;
        }
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.width)
            .map(|i| if self.contains(MethodId(i)) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for MethodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|m| m.0)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_string_round_trip() {
        let s = MethodSet::from_bit_string("01101").unwrap();
        assert_eq!(s.to_bit_string(), "01101");
        assert_eq!(s.len(), 3);
        assert!(s.contains(MethodId(1)));
        assert!(!s.contains(MethodId(0)));
    }

    #[test]
    fn full_is_trimmed() {
        let s = MethodSet::full(70);
        assert_eq!(s.len(), 70);
        assert_eq!(s.complement(), MethodSet::empty(70));
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let a = MethodSet::empty(3);
        let b = MethodSet::empty(4);
        assert!(a.try_union(&b).is_err());
        assert!(a.try_is_subset(&b).is_err());
    }

    #[test]
    fn set_algebra() {
        let a = MethodSet::from_indices(5, [0, 1, 2]);
        let b = MethodSet::from_indices(5, [2, 3]);
        assert_eq!(a.union(&b), MethodSet::from_indices(5, [0, 1, 2, 3]));
        assert_eq!(a.intersection(&b), MethodSet::from_indices(5, [2]));
        assert_eq!(a.difference(&b), MethodSet::from_indices(5, [0, 1]));
        assert!(MethodSet::from_indices(5, [1]).is_subset(&a));
    }
}
