//! Bitvectors: a sparse representation storing only 1-positions (rank and
//! select by binary search) and a dense representation with per-word rank
//! counts, used inside the wavelet tree.

use crate::error::{Error, Result};

/// A bitvector stored as its sorted 1-positions. Space is proportional to the
/// number of 1s, not the length. Positions are kept as `u32` — texts are
/// limited to `u32` indexing anyway and the savings matter at scale.
///
/// `rank1(i)` counts 1s in positions `0..=i` (inclusive of `i`) and `select1`
/// is 1-based, matching the arithmetic the suffix-array queries rely on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBitvector {
    len: u64,
    ones: Vec<u32>,
}

impl SparseBitvector {
    pub fn new(len: u64, ones: Vec<u32>) -> Result<SparseBitvector> {
        for pair in ones.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::corrupt("bitvector 1-positions must be strictly increasing"));
            }
        }
        if let Some(&last) = ones.last() {
            if last as u64 >= len {
                return Err(Error::corrupt("bitvector 1-position past the end"));
            }
        }
        Ok(SparseBitvector { len, ones })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.ones.len() as u64
    }

    pub fn ones(&self) -> &[u32] {
        &self.ones
    }

    /// Number of 1s in positions `0..=i`.
    pub fn rank1(&self, i: u64) -> Result<u64> {
        if i >= self.len {
            return Err(Error::OutOfRange { index: i as usize, len: self.len as usize });
        }
        Ok(self.ones.partition_point(|&p| p as u64 <= i) as u64)
    }

    /// Position of the `j`-th 1, `j` counted from 1.
    pub fn select1(&self, j: u64) -> Result<u64> {
        if j == 0 || j > self.ones.len() as u64 {
            return Err(Error::OutOfRange { index: j as usize, len: self.ones.len() + 1 });
        }
        Ok(self.ones[(j - 1) as usize] as u64)
    }

    pub fn get(&self, i: u64) -> bool {
        i <= u32::MAX as u64 && self.ones.binary_search(&(i as u32)).is_ok()
    }
}

/// A plain bitvector with one cumulative rank count per 64-bit word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseBitvector {
    len: usize,
    words: Vec<u64>,
    /// ranks[k] = number of 1s in words[..k].
    ranks: Vec<u32>,
}

impl DenseBitvector {
    pub fn from_bits(len: usize, words: Vec<u64>) -> DenseBitvector {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        let mut ranks = Vec::with_capacity(words.len() + 1);
        let mut acc = 0u32;
        ranks.push(0);
        for &word in &words {
            acc += word.count_ones();
            ranks.push(acc);
        }
        DenseBitvector { len, words, ranks }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of 1s in positions `0..i` (exclusive).
    pub fn rank1_excl(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let word = i / 64;
        let base = self.ranks[word] as usize;
        if i % 64 == 0 {
            base
        } else {
            base + (self.words[word] & ((1u64 << (i % 64)) - 1)).count_ones() as usize
        }
    }

    pub fn rank0_excl(&self, i: usize) -> usize {
        i - self.rank1_excl(i)
    }
}

/// Incrementally builds a [`DenseBitvector`].
#[derive(Debug, Default)]
pub struct BitBuilder {
    len: usize,
    words: Vec<u64>,
}

impl BitBuilder {
    pub fn with_capacity(bits: usize) -> BitBuilder {
        BitBuilder { len: 0, words: Vec::with_capacity(bits.div_ceil(64)) }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn finish(self) -> DenseBitvector {
        DenseBitvector::from_bits(self.len, self.words)
    }
}
