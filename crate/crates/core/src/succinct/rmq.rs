//! Range-minimum queries via block minima plus a sparse table over blocks.
//! Ties break to the leftmost index.

use crate::error::{Error, Result};

const BLOCK: usize = 32;

/// Owns the array it answers minima over.
#[derive(Debug, Clone)]
pub struct RmqStructure {
    values: Vec<u32>,
    /// table[k][b]: leftmost minimum index over blocks b..b+2^k; row 0 holds
    /// the per-block minima.
    table: Vec<Vec<u32>>,
}

impl RmqStructure {
    pub fn new(values: Vec<u32>) -> RmqStructure {
        let nb = values.len().div_ceil(BLOCK);
        let mut block_min = Vec::with_capacity(nb);
        for b in 0..nb {
            let s = b * BLOCK;
            let e = (s + BLOCK).min(values.len());
            let mut best = s;
            for i in s + 1..e {
                if values[i] < values[best] {
                    best = i;
                }
            }
            block_min.push(best as u32);
        }
        let mut table = vec![block_min];
        let mut k = 1;
        while (1 << k) <= nb {
            let prev = &table[k - 1];
            let half = 1usize << (k - 1);
            let row: Vec<u32> = (0..=nb - (1 << k))
                .map(|b| {
                    let left = prev[b];
                    let right = prev[b + half];
                    if values[right as usize] < values[left as usize] {
                        right
                    } else {
                        left
                    }
                })
                .collect();
            table.push(row);
            k += 1;
        }
        RmqStructure { values, table }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Index of the leftmost minimum in `values[l..=r]`.
    pub fn query(&self, l: usize, r: usize) -> Result<usize> {
        if l > r || r >= self.values.len() {
            return Err(Error::OutOfRange { index: r, len: self.values.len() });
        }
        let lb = l / BLOCK;
        let rb = r / BLOCK;
        if lb == rb {
            return Ok(self.scan(l, r));
        }
        // Partial head and tail blocks, full blocks in between.
        let mut best = self.scan(l, (lb + 1) * BLOCK - 1);
        if rb > lb + 1 {
            let inner = self.query_blocks(lb + 1, rb - 1);
            if self.values[inner] < self.values[best] {
                best = inner;
            }
        }
        let tail = self.scan(rb * BLOCK, r);
        if self.values[tail] < self.values[best] {
            best = tail;
        }
        Ok(best)
    }

    /// Minimum value over `values[l..=r]`.
    pub fn min_value(&self, l: usize, r: usize) -> Result<u32> {
        Ok(self.values[self.query(l, r)?])
    }

    fn scan(&self, l: usize, r: usize) -> usize {
        let mut best = l;
        for i in l + 1..=r {
            if self.values[i] < self.values[best] {
                best = i;
            }
        }
        best
    }

    fn query_blocks(&self, lb: usize, rb: usize) -> usize {
        let k = (usize::BITS - 1 - (rb - lb + 1).leading_zeros()) as usize;
        let left = self.table[k][lb];
        let right = self.table[k][rb + 1 - (1 << k)];
        // Leftmost tie-break: prefer the left window on equality.
        if self.values[right as usize] < self.values[left as usize] {
            right as usize
        } else {
            left as usize
        }
    }
}
