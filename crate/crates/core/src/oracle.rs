//! Brute-force reference implementations of SA, ISA, LCP, LCE and BWT, used
//! for testing: every answer the index gives is checked against these.
//!
//! The suffix array here sorts cyclic rotations (not finite suffixes), so its
//! BWT and SA conventions match the index's cyclic presentation; the sentinel
//! block appended by [`prepare_text`](crate::prepare_text) makes the two
//! orders agree on ordinary inputs. LCP and LCE use finite-suffix semantics,
//! matching [`PfpIndex::lce`](crate::PfpIndex::lce).

use crate::error::{Error, Result};
use crate::parser::Text;

/// Largest text the oracle will accept; it is quadratic in the worst case and
/// exists only for desk-scale verification.
pub const ORACLE_MAX_LEN: usize = 1_000_000;

/// Ground-truth index built by plain sorting and scanning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleIndex {
    pub sa: Vec<usize>,
    pub isa: Vec<usize>,
    pub lcp: Vec<usize>,
    pub bwt: Vec<u8>,
}

fn cyclic_cmp(bytes: &[u8], a: usize, b: usize) -> std::cmp::Ordering {
    let n = bytes.len();
    for k in 0..n {
        let ca = bytes[(a + k) % n];
        let cb = bytes[(b + k) % n];
        if ca != cb {
            return ca.cmp(&cb);
        }
    }
    std::cmp::Ordering::Equal
}

/// Builds the full SA/ISA/LCP/BWT of `text` by comparison-sorting its
/// rotations. Refuses texts longer than [`ORACLE_MAX_LEN`].
pub fn oracle_build(text: &Text) -> Result<OracleIndex> {
    let n = text.n();
    if n > ORACLE_MAX_LEN {
        return Err(Error::config(format!(
            "oracle refuses texts longer than {ORACLE_MAX_LEN} (got {n})"
        )));
    }
    let bytes = text.bytes();
    let mut sa: Vec<usize> = (0..n).collect();
    sa.sort_by(|&a, &b| cyclic_cmp(bytes, a, b));
    let mut isa = vec![0usize; n];
    for (rank, &pos) in sa.iter().enumerate() {
        isa[pos] = rank;
    }
    let mut lcp = vec![0usize; n];
    for rank in 1..n {
        lcp[rank] = oracle_lce(text, sa[rank - 1], sa[rank])?;
    }
    let bwt = sa.iter().map(|&pos| bytes[(pos + n - 1) % n]).collect();
    Ok(OracleIndex { sa, isa, lcp, bwt })
}

/// Longest common extension of the finite suffixes S[i..n-1] and S[j..n-1],
/// by direct character comparison.
pub fn oracle_lce(text: &Text, i: usize, j: usize) -> Result<usize> {
    let n = text.n();
    if i >= n || j >= n {
        return Err(Error::OutOfRange { index: i.max(j), len: n });
    }
    let bytes = text.bytes();
    let mut l = 0usize;
    while i + l < n && j + l < n && bytes[i + l] == bytes[j + l] {
        l += 1;
    }
    Ok(l)
}
