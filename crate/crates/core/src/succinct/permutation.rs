//! A permutation stored together with its inverse for O(1) application in
//! both directions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<u32>,
    backward: Vec<u32>,
}

impl Permutation {
    /// Builds from the forward mapping, checking it is a bijection on
    /// `0..forward.len()`.
    pub fn new(forward: Vec<u32>) -> Result<Permutation> {
        let n = forward.len();
        let mut backward = vec![u32::MAX; n];
        for (i, &v) in forward.iter().enumerate() {
            if v as usize >= n {
                return Err(Error::corrupt(format!("permutation value {v} out of range {n}")));
            }
            if backward[v as usize] != u32::MAX {
                return Err(Error::corrupt(format!("permutation value {v} repeated")));
            }
            backward[v as usize] = i as u32;
        }
        Ok(Permutation { forward, backward })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn apply(&self, i: usize) -> Result<u32> {
        self.forward
            .get(i)
            .copied()
            .ok_or(Error::OutOfRange { index: i, len: self.forward.len() })
    }

    pub fn invert(&self, v: usize) -> Result<u32> {
        self.backward
            .get(v)
            .copied()
            .ok_or(Error::OutOfRange { index: v, len: self.backward.len() })
    }
}
