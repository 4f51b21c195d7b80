//! A balanced, pointerless wavelet tree over small integer alphabets,
//! supporting the three-sided range counting and range selection queries the
//! suffix-array machinery needs.

use crate::error::{Error, Result};
use crate::succinct::bitvector::{BitBuilder, DenseBitvector};

/// Wavelet tree over a sequence of symbols in `[0, sigma)`. Level `d` stores
/// bit `levels-1-d` of each symbol, with each node's zeros stably partitioned
/// to the left in the next level.
#[derive(Debug, Clone)]
pub struct WaveletTree {
    len: usize,
    sigma: usize,
    levels: Vec<DenseBitvector>,
}

impl WaveletTree {
    pub fn build(seq: &[u32], sigma: usize) -> Result<WaveletTree> {
        if sigma == 0 && !seq.is_empty() {
            return Err(Error::config("wavelet tree alphabet must be non-empty"));
        }
        if let Some(&bad) = seq.iter().find(|&&s| s as usize >= sigma) {
            return Err(Error::config(format!("symbol {bad} out of alphabet range {sigma}")));
        }
        let height = levels_for(sigma);
        let mut levels = Vec::with_capacity(height);
        let mut cur: Vec<u32> = seq.to_vec();
        for d in 0..height {
            let shift = height - 1 - d;
            let mut builder = BitBuilder::with_capacity(cur.len());
            for &s in &cur {
                builder.push(s >> shift & 1 == 1);
            }
            levels.push(builder.finish());
            if d + 1 < height {
                // Stable partition by the current bit, per implicit node. The
                // node boundaries are preserved because the partition never
                // moves a symbol across a higher-bit boundary.
                let mut next = Vec::with_capacity(cur.len());
                let mask = u32::MAX << shift;
                let mut start = 0;
                while start < cur.len() {
                    let prefix = cur[start] & mask << 1;
                    let mut end = start;
                    while end < cur.len() && cur[end] & (mask << 1) == prefix {
                        end += 1;
                    }
                    next.extend(cur[start..end].iter().filter(|&&s| s >> shift & 1 == 0));
                    next.extend(cur[start..end].iter().filter(|&&s| s >> shift & 1 == 1));
                    start = end;
                }
                cur = next;
            }
        }
        Ok(WaveletTree { len: seq.len(), sigma, levels })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn levels(&self) -> &[DenseBitvector] {
        &self.levels
    }

    pub(crate) fn from_parts(len: usize, sigma: usize, levels: Vec<DenseBitvector>) -> WaveletTree {
        WaveletTree { len, sigma, levels }
    }

    /// The symbol at position `i`.
    pub fn access(&self, i: usize) -> Result<u32> {
        if i >= self.len {
            return Err(Error::OutOfRange { index: i, len: self.len });
        }
        let mut sym = 0u32;
        let mut s = 0usize;
        let mut e = self.len;
        let mut pos = i;
        for bv in &self.levels {
            let zeros = bv.rank0_excl(e) - bv.rank0_excl(s);
            sym <<= 1;
            if bv.get(s + pos) {
                sym |= 1;
                pos = bv.rank1_excl(s + pos) - bv.rank1_excl(s);
                s += zeros;
            } else {
                pos = bv.rank0_excl(s + pos) - bv.rank0_excl(s);
                e = s + zeros;
            }
        }
        Ok(sym)
    }

    /// Number of positions `i < j` whose symbol lies in `[lo, hi]`.
    pub fn count_range(&self, j: usize, lo: u32, hi: u32) -> Result<usize> {
        if j > self.len {
            return Err(Error::OutOfRange { index: j, len: self.len + 1 });
        }
        if lo > hi || hi as usize >= self.sigma {
            return Err(Error::OutOfRange { index: hi as usize, len: self.sigma });
        }
        if self.levels.is_empty() {
            // Unit alphabet: every symbol qualifies.
            return Ok(j);
        }
        let top = (1u32 << self.levels.len()) - 1;
        Ok(self.count_rec(0, 0, self.len, j, 0, top, lo, hi))
    }

    /// Number of positions `i < j` whose symbol is at least `r`.
    pub fn count_prefix(&self, j: usize, r: u32) -> Result<usize> {
        self.count_range(j, r, self.sigma.saturating_sub(1) as u32)
    }

    #[allow(clippy::too_many_arguments)]
    fn count_rec(
        &self,
        d: usize,
        s: usize,
        e: usize,
        j: usize,
        a: u32,
        b: u32,
        lo: u32,
        hi: u32,
    ) -> usize {
        if j == 0 || lo > b || hi < a {
            return 0;
        }
        if lo <= a && b <= hi {
            return j;
        }
        let bv = &self.levels[d];
        let zeros = bv.rank0_excl(e) - bv.rank0_excl(s);
        let zeros_j = bv.rank0_excl(s + j) - bv.rank0_excl(s);
        let mid = a + (b - a) / 2;
        self.count_rec(d + 1, s, s + zeros, zeros_j, a, mid, lo, hi)
            + self.count_rec(d + 1, s + zeros, e, j - zeros_j, mid + 1, b, lo, hi)
    }

    /// Position of the `(j+1)`-th element (0-based `j`) whose symbol lies in
    /// `[lo, hi]`, by binary search over prefix counts.
    pub fn select_range(&self, lo: u32, hi: u32, j: usize) -> Result<usize> {
        let total = self.count_range(self.len, lo, hi)?;
        if j >= total {
            return Err(Error::OutOfRange { index: j, len: total });
        }
        // Smallest prefix length containing j+1 qualifying symbols; the match
        // sits at the last position of that prefix.
        let mut lo_len = 0usize;
        let mut hi_len = self.len;
        while lo_len < hi_len {
            let mid = (lo_len + hi_len) / 2;
            if self.count_range(mid + 1, lo, hi)? >= j + 1 {
                hi_len = mid;
            } else {
                lo_len = mid + 1;
            }
        }
        Ok(lo_len)
    }
}

pub(crate) fn levels_for(sigma: usize) -> usize {
    if sigma <= 1 {
        0
    } else {
        (usize::BITS - (sigma - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn scan_count(seq: &[u32], j: usize, lo: u32, hi: u32) -> usize {
        seq[..j].iter().filter(|&&s| lo <= s && s <= hi).count()
    }

    #[test]
    fn example_sequence_counts() {
        // Co-lexicographic recoding of the worked example's parse BWT.
        let seq = [0u32, 3, 2, 4, 1, 1];
        let wt = WaveletTree::build(&seq, 5).unwrap();
        for (i, &s) in seq.iter().enumerate() {
            assert_eq!(wt.access(i).unwrap(), s);
        }
        assert_eq!(wt.count_prefix(3, 2).unwrap(), 2);
        assert_eq!(wt.count_range(6, 2, 3).unwrap(), 2);
        assert_eq!(wt.select_range(2, 3, 1).unwrap(), 2);
        for r in 0..5 {
            assert_eq!(wt.count_prefix(0, r).unwrap(), 0);
        }
        assert_eq!(wt.count_prefix(6, 0).unwrap(), 6);
    }

    #[test]
    fn empty_range_is_rejected() {
        let wt = WaveletTree::build(&[0, 1, 2], 3).unwrap();
        assert!(wt.count_range(3, 2, 1).is_err());
    }

    #[test]
    fn full_range_select_is_identity() {
        let seq = [4u32, 1, 3, 3, 0, 2];
        let wt = WaveletTree::build(&seq, 5).unwrap();
        for j in 0..seq.len() {
            assert_eq!(wt.select_range(0, 4, j).unwrap(), j);
        }
    }

    #[test]
    fn unit_alphabet() {
        let seq = [0u32; 7];
        let wt = WaveletTree::build(&seq, 1).unwrap();
        assert_eq!(wt.access(3).unwrap(), 0);
        assert_eq!(wt.count_range(5, 0, 0).unwrap(), 5);
        assert_eq!(wt.select_range(0, 0, 6).unwrap(), 6);
    }

    #[test]
    fn random_instances_match_linear_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for sigma in [2usize, 3, 5, 17, 64] {
            let len = 2000;
            let seq: Vec<u32> = (0..len).map(|_| rng.gen_range(0..sigma as u32)).collect();
            let wt = WaveletTree::build(&seq, sigma).unwrap();
            for _ in 0..300 {
                let j = rng.gen_range(0..=len);
                let a = rng.gen_range(0..sigma as u32);
                let b = rng.gen_range(a..sigma as u32);
                assert_eq!(wt.count_range(j, a, b).unwrap(), scan_count(&seq, j, a, b));
                assert_eq!(
                    wt.count_prefix(j, a).unwrap(),
                    scan_count(&seq, j, a, sigma as u32 - 1)
                );
            }
            // Selection is consistent with counting.
            for _ in 0..100 {
                let a = rng.gen_range(0..sigma as u32);
                let b = rng.gen_range(a..sigma as u32);
                let total = wt.count_range(len, a, b).unwrap();
                if total == 0 {
                    continue;
                }
                let j = rng.gen_range(0..total);
                let k = wt.select_range(a, b, j).unwrap();
                assert!(a <= seq[k] && seq[k] <= b);
                assert_eq!(wt.count_range(k + 1, a, b).unwrap(), j + 1);
            }
        }
    }

    #[test]
    fn access_matches_source() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let seq: Vec<u32> = (0..500).map(|_| rng.gen_range(0..11)).collect();
        let wt = WaveletTree::build(&seq, 11).unwrap();
        for (i, &s) in seq.iter().enumerate() {
            assert_eq!(wt.access(i).unwrap(), s);
        }
    }
}
