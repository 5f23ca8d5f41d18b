//! Fixed-capacity vertex bitsets.
//!
//! A [`VertexSet`] is a subset of `{0, .., n-1}` stored as 64-bit words,
//! vertex `v` at bit `v % 64` of word `v / 64`. Sets compare by the integer
//! value of that bitmask, which is the tie-break order used by every search
//! in this crate ("lexicographically smallest bitmask").

use std::cmp::Ordering;
use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    capacity: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(capacity: usize) -> usize {
    capacity.div_ceil(WORD)
}

impl VertexSet {
    /// The empty subset of `{0, .., capacity-1}`.
    pub fn empty(capacity: usize) -> Self {
        Self {
            capacity,
            words: vec![0; words_for(capacity)],
        }
    }

    /// All of `{0, .., capacity-1}`.
    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    /// Builds a set from vertex indices. Panics if a vertex is out of range.
    pub fn from_vertices<I: IntoIterator<Item = usize>>(capacity: usize, vertices: I) -> Self {
        let mut s = Self::empty(capacity);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Interprets the low `capacity` bits of `mask` as a set (capacity ≤ 64).
    pub fn from_mask(capacity: usize, mask: u64) -> Self {
        assert!(capacity <= WORD, "from_mask needs capacity <= 64");
        let mut s = Self::empty(capacity);
        if capacity > 0 {
            s.words[0] = mask;
            s.trim();
        }
        s
    }

    /// The bitmask as a `u64`, when the capacity allows it.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        let rem = self.capacity % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        assert!(v < self.capacity, "vertex {v} out of range 0..{}", self.capacity);
        self.words[v / WORD] |= 1 << (v % WORD);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if v < self.capacity {
            self.words[v / WORD] &= !(1 << (v % WORD));
        }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.capacity && self.words[v / WORD] & (1 << (v % WORD)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest member.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Largest member.
    pub fn last(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    /// `|self ∩ other|` without allocating.
    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Complement within `{0, .., capacity-1}`.
    pub fn complement(&self) -> VertexSet {
        let mut s = self.clone();
        for w in s.words.iter_mut() {
            *w = !*w;
        }
        s.trim();
        s
    }
}

impl Ord for VertexSet {
    /// Integer order of the bitmask: the highest differing vertex decides.
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.words.len().max(other.words.len());
        for i in (0..len).rev() {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_respects_capacity() {
        let s = VertexSet::full(70);
        assert_eq!(s.len(), 70);
        assert_eq!(s.last(), Some(69));
        assert_eq!(s.complement().len(), 0);
    }

    #[test]
    fn iteration_is_ascending_across_words() {
        let s = VertexSet::from_vertices(130, [129, 3, 64, 0, 65]);
        assert_eq!(s.to_vec(), vec![0, 3, 64, 65, 129]);
        assert_eq!(s.first(), Some(0));
        assert_eq!(s.last(), Some(129));
    }

    #[test]
    fn order_is_integer_order_of_mask() {
        let a = VertexSet::from_vertices(5, [1, 4]); // 0b10010
        let b = VertexSet::from_vertices(5, [2, 4]); // 0b10100
        let c = VertexSet::from_vertices(5, [0, 1, 2, 3]); // 0b01111
        assert!(a < b);
        assert!(c < a);
        let hi = VertexSet::from_vertices(100, [70]);
        let lo = VertexSet::from_vertices(100, [0, 1, 2, 63]);
        assert!(lo < hi);
    }

    #[test]
    fn set_algebra() {
        let a = VertexSet::from_vertices(10, [1, 2, 3]);
        let b = VertexSet::from_vertices(10, [3, 4]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.union(&b).to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 2]);
        assert_eq!(a.intersection_len(&b), 1);
        assert!(VertexSet::from_vertices(10, [1, 3]).is_subset(&a));
        assert_eq!(VertexSet::from_mask(5, 0b10101).to_vec(), vec![0, 2, 4]);
    }
}
