//! Assembles the queryable index from a dictionary and parse: the phrase-start
//! bitvector B_P, the suffix-run bitvector B_BWT with its table M, the wavelet
//! tree W over the parse's BWT, the permutation π from BWT positions back to
//! parse positions, and the boundary-suffix LCP tables that power LCE queries.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::parser::{parse_text, Dictionary, Parse, Text, TriggerConfig};
use crate::succinct::{Permutation, RmqStructure, SparseBitvector, WaveletTree};

/// One row of table M: the length of the lexicographically t-th distinct
/// proper phrase suffix (of length ≥ w) and the co-lexicographic range of the
/// phrases ending with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRow {
    pub len: usize,
    pub colex_lo: usize,
    pub colex_hi: usize,
}

/// Suffix lengths of table M, packed: almost every length fits a u16, so the
/// rare longer rows live in a sorted escape table. At corpus scale this
/// halves the largest index component.
#[derive(Debug, Clone, Default)]
pub(crate) struct LenTable {
    short: Vec<u16>,
    /// (row, length) for rows whose length is >= u16::MAX, sorted by row.
    long: Vec<(u32, u32)>,
}

impl LenTable {
    pub(crate) fn with_capacity(rows: usize) -> LenTable {
        LenTable { short: Vec::with_capacity(rows), long: Vec::new() }
    }

    pub(crate) fn push(&mut self, len: u32) {
        if len >= u16::MAX as u32 {
            self.long.push((self.short.len() as u32, len));
            self.short.push(u16::MAX);
        } else {
            self.short.push(len as u16);
        }
    }

    pub(crate) fn get(&self, t: usize) -> usize {
        let v = self.short[t];
        if v != u16::MAX {
            v as usize
        } else {
            let at = self.long.binary_search_by_key(&(t as u32), |&(r, _)| r).unwrap();
            self.long[at].1 as usize
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.short.len()
    }
}

/// Support tables for constant-time LCE between "boundary suffixes": the
/// suffixes of S starting immediately after each phrase's leading trigger.
///
/// Position-to-rank lookups go through B_P (a boundary position determines its
/// parse position), so neither a hash table nor a rank → position array is
/// stored.
#[derive(Debug, Clone)]
pub struct BoundaryLcpSupport {
    /// Parse position q → rank of the boundary suffix at starts[q] + w.
    pub(crate) rank_of_parse_pos: Vec<u32>,
    /// RMQ over lcp[t] = LCP of the boundary suffixes ranked t-1 and t.
    pub(crate) rmq: RmqStructure,
}

impl BoundaryLcpSupport {
    /// `order` lists parse positions by the rank of their boundary suffix.
    pub(crate) fn from_rank_order(order: &[u32], lcp: Vec<u32>) -> BoundaryLcpSupport {
        debug_assert_eq!(order.len(), lcp.len());
        let mut rank_of_parse_pos = vec![0u32; order.len()];
        for (r, &q) in order.iter().enumerate() {
            rank_of_parse_pos[q as usize] = r as u32;
        }
        BoundaryLcpSupport { rank_of_parse_pos, rmq: RmqStructure::new(lcp) }
    }

    pub fn len(&self) -> usize {
        self.rank_of_parse_pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank_of_parse_pos.is_empty()
    }

    pub(crate) fn rank_of_parse_pos(&self, q: usize) -> usize {
        self.rank_of_parse_pos[q] as usize
    }

    pub fn lcp(&self) -> &[u32] {
        self.rmq.values()
    }

    /// LCP of the boundary suffixes at two distinct ranks.
    pub(crate) fn lce_between(&self, r1: usize, r2: usize) -> Result<usize> {
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        Ok(self.rmq.min_value(lo + 1, hi)? as usize)
    }
}

/// The complete index over one text. Immutable after construction.
#[derive(Debug, Clone)]
pub struct PfpIndex {
    pub(crate) n: usize,
    pub(crate) w: usize,
    pub(crate) dict: Dictionary,
    pub(crate) parse: Parse,
    pub(crate) b_p: SparseBitvector,
    pub(crate) b_bwt: SparseBitvector,
    pub(crate) m_len: LenTable,
    pub(crate) m_lo: Vec<u32>,
    pub(crate) m_hi: Vec<u32>,
    pub(crate) wt: WaveletTree,
    pub(crate) pi: Permutation,
    /// Phrase id (lexicographic) → co-lex rank, and its inverse.
    pub(crate) colex_rank: Vec<u32>,
    pub(crate) colex_phrase: Vec<u32>,
    pub(crate) boundary: BoundaryLcpSupport,
}

impl PfpIndex {
    /// Parses a prepared text and builds the index over it. The text is not
    /// retained; every component is assembled from the dictionary and parse.
    pub fn build(text: &Text, cfg: &TriggerConfig) -> Result<PfpIndex> {
        let (dict, parse) = parse_text(text, cfg)?;
        assemble(dict, parse, cfg.w(), text.n())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn dict(&self) -> &Dictionary {
        &self.dict
    }

    pub fn parse(&self) -> &Parse {
        &self.parse
    }

    /// Number of M rows = distinct proper phrase suffixes of length ≥ w.
    pub fn suffix_count(&self) -> usize {
        self.m_len.len()
    }

    pub fn m_row(&self, t: usize) -> Result<MRow> {
        if t >= self.m_len.len() {
            return Err(Error::OutOfRange { index: t, len: self.m_len.len() });
        }
        Ok(MRow {
            len: self.m_len.get(t),
            colex_lo: self.m_lo[t] as usize,
            colex_hi: self.m_hi[t] as usize,
        })
    }

    pub fn b_p(&self) -> &SparseBitvector {
        &self.b_p
    }

    pub fn b_bwt(&self) -> &SparseBitvector {
        &self.b_bwt
    }

    pub fn wavelet(&self) -> &WaveletTree {
        &self.wt
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn colex_rank_of_phrase(&self, d: usize) -> usize {
        self.colex_rank[d] as usize
    }

    pub fn phrase_of_colex_rank(&self, r: usize) -> usize {
        self.colex_phrase[r] as usize
    }

    pub fn boundary(&self) -> &BoundaryLcpSupport {
        &self.boundary
    }

    /// Text position of the boundary suffix with the given lexicographic rank.
    /// Linear scan; intended for inspection and tests, not hot paths.
    pub fn boundary_position_of_rank(&self, rank: usize) -> Option<usize> {
        let q = self
            .boundary
            .rank_of_parse_pos
            .iter()
            .position(|&r| r as usize == rank)?;
        Some((self.parse.start(q) + self.w) % self.n)
    }
}

/// Builds the index from an existing dictionary and parse, after validating
/// that they describe a well-formed parsing (phrase overlaps, start chain,
/// sentinel anchor).
pub fn build_index(dict: Dictionary, parse: Parse, w: usize) -> Result<PfpIndex> {
    let n = validate_parse(&dict, &parse, w)?;
    assemble(dict, parse, w, n)
}

/// Consistency checks for an externally supplied (dictionary, parse) pair;
/// returns the text length n.
fn validate_parse(dict: &Dictionary, parse: &Parse, w: usize) -> Result<usize> {
    if parse.is_empty() {
        return Err(Error::corrupt("parse is empty"));
    }
    let m = parse.len();
    let mut n = 0usize;
    for q in 0..m {
        let d = parse.rank(q) as usize;
        if d >= dict.len() {
            return Err(Error::corrupt(format!("parse rank {d} out of dictionary range")));
        }
        let len = dict.phrase_len(d);
        if len < w + 1 {
            return Err(Error::corrupt(format!("phrase {d} shorter than w + 1")));
        }
        let next = dict.phrase(parse.rank((q + 1) % m) as usize);
        if dict.phrase(d)[len - w..] != next[..w] {
            return Err(Error::corrupt(format!("overlap mismatch at parse position {q}")));
        }
        n += len - w;
    }
    if dict.phrase(parse.rank(0) as usize)[..w].iter().any(|&b| b != crate::parser::SENTINEL) {
        return Err(Error::corrupt("parse position 0 is not anchored at the sentinel trigger"));
    }
    let mut pos = n - w;
    for q in 0..m {
        if parse.start(q) != pos {
            return Err(Error::corrupt(format!("phrase start mismatch at parse position {q}")));
        }
        pos = (pos + dict.phrase_len(parse.rank(q) as usize) - w) % n;
    }
    Ok(n)
}

fn assemble(dict: Dictionary, parse: Parse, w: usize, n: usize) -> Result<PfpIndex> {
    let b_p = build_bp(&parse, n)?;
    let (colex_rank, colex_phrase) = build_colex(&dict);
    let (b_bwt, m_len, m_lo, m_hi) = build_bbwt_and_m(&dict, w, n, &colex_rank)?;
    let (wt, pi) = build_w_and_pi(&parse, &colex_rank)?;
    let mut index = PfpIndex {
        n,
        w,
        dict,
        parse,
        b_p,
        b_bwt,
        m_len,
        m_lo,
        m_hi,
        wt,
        pi,
        colex_rank,
        colex_phrase,
        boundary: BoundaryLcpSupport::from_rank_order(&[], Vec::new()),
    };
    index.boundary = build_boundary_lcp(&index)?;
    Ok(index)
}

/// B_P: one 1 at the first character of each phrase's leading trigger.
pub fn build_bp(parse: &Parse, n: usize) -> Result<SparseBitvector> {
    let mut ones = parse.starts().to_vec();
    ones.sort_unstable();
    SparseBitvector::new(n as u64, ones)
}

/// Co-lexicographic phrase order: returns (phrase id → co-lex rank, co-lex
/// rank → phrase id).
pub fn build_colex(dict: &Dictionary) -> (Vec<u32>, Vec<u32>) {
    let mut order: Vec<u32> = (0..dict.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        dict.phrase(a as usize).iter().rev().cmp(dict.phrase(b as usize).iter().rev())
    });
    let mut rank = vec![0u32; dict.len()];
    for (r, &d) in order.iter().enumerate() {
        rank[d as usize] = r as u32;
    }
    (rank, order)
}

/// Sorts all proper phrase suffixes of length ≥ w, aggregates equal strings
/// across phrases, and emits B_BWT (a 1 opening each distinct suffix's run of
/// occurrences) together with the columns of table M.
///
/// Lemma 1 (prefix-freeness of these suffixes) makes plain slice comparison a
/// total order with no prefix ties, so no per-phrase terminators are needed.
#[allow(clippy::type_complexity)]
pub(crate) fn build_bbwt_and_m(
    dict: &Dictionary,
    w: usize,
    n: usize,
    colex_rank: &[u32],
) -> Result<(SparseBitvector, LenTable, Vec<u32>, Vec<u32>)> {
    // Suffixes are bucketed by first byte and each bucket is sorted on its
    // own, so the transient (phrase, offset) scratch holds one bucket instead
    // of every suffix at once — the construction peak on skewed alphabets
    // (DNA) drops by a factor of the alphabet size.
    let mut bucket_sizes = [0usize; 256];
    let mut suffix_total = 0usize;
    for d in 0..dict.len() {
        let len = dict.phrase_len(d);
        if len < w + 1 {
            return Err(Error::corrupt(format!("phrase {d} shorter than w + 1")));
        }
        let phrase = dict.phrase(d);
        for off in 1..=len - w {
            bucket_sizes[phrase[off] as usize] += 1;
        }
        suffix_total += len - w;
    }
    let key = |&(d, off): &(u32, u32)| &dict.phrase(d as usize)[off as usize..];

    let mut sufs: Vec<(u32, u32)> = Vec::with_capacity(bucket_sizes.iter().copied().max().unwrap_or(0));
    let mut ones: Vec<u32> = Vec::new();
    let mut m_len = LenTable::default();
    let mut m_lo: Vec<u32> = Vec::new();
    let mut m_hi: Vec<u32> = Vec::new();
    let mut cum = 0u64;
    let mut seen = 0usize;
    for first in 0..=255u8 {
        if bucket_sizes[first as usize] == 0 {
            continue;
        }
        sufs.clear();
        for d in 0..dict.len() {
            let phrase = dict.phrase(d);
            for off in 1..=phrase.len() - w {
                if phrase[off] == first {
                    sufs.push((d as u32, off as u32));
                }
            }
        }
        sufs.sort_unstable_by(|a, b| key(a).cmp(key(b)));
        seen += sufs.len();

        let mut g = 0usize;
        while g < sufs.len() {
            let s = key(&sufs[g]);
            let mut e = g;
            let mut occ = 0u64;
            let mut lo = u32::MAX;
            let mut hi = 0u32;
            while e < sufs.len() && key(&sufs[e]) == s {
                let d = sufs[e].0 as usize;
                occ += dict.freq(d);
                lo = lo.min(colex_rank[d]);
                hi = hi.max(colex_rank[d]);
                e += 1;
            }
            // The phrases sharing this suffix must occupy a contiguous co-lex
            // range for the wavelet-tree counting to be exact.
            if (hi - lo + 1) as usize != e - g {
                return Err(Error::corrupt("co-lex range of a phrase suffix is not contiguous"));
            }
            ones.push(cum as u32);
            m_len.push(s.len() as u32);
            m_lo.push(lo);
            m_hi.push(hi);
            cum += occ;
            g = e;
        }
    }
    debug_assert_eq!(seen, suffix_total);
    if cum != n as u64 {
        return Err(Error::corrupt(format!(
            "suffix occurrences cover {cum} characters, expected {n}"
        )));
    }
    Ok((SparseBitvector::new(n as u64, ones)?, m_len, m_lo, m_hi))
}

/// Sorted cyclic rotations of the rank sequence, by prefix doubling. Errors if
/// two rotations are equal (impossible for a parse of a sentinel-terminated
/// text, whose sentinel phrase occurs exactly once).
fn sort_cyclic_rotations(seq: &[u32]) -> Result<Vec<u32>> {
    let m = seq.len();
    if m == 0 {
        return Err(Error::corrupt("cannot sort rotations of an empty parse"));
    }
    if m == 1 {
        return Ok(vec![0]);
    }
    let mut rank: Vec<u32> = seq.to_vec();
    let mut order: Vec<u32> = (0..m as u32).collect();
    let mut k = 1usize;
    loop {
        let pair = |i: usize| (rank[i], rank[(i + k) % m]);
        order.sort_unstable_by_key(|&i| pair(i as usize));
        let mut next = vec![0u32; m];
        let mut r = 0u32;
        for t in 1..m {
            if pair(order[t] as usize) != pair(order[t - 1] as usize) {
                r += 1;
            }
            next[order[t] as usize] = r;
        }
        rank = next;
        if r as usize == m - 1 {
            return Ok(order);
        }
        if k >= m {
            return Err(Error::corrupt("parse rank sequence is periodic"));
        }
        k *= 2;
    }
}

/// The BWT of the parse recoded to co-lex phrase ranks (W), and π mapping each
/// BWT position to the parse position of that phrase occurrence.
pub fn build_w_and_pi(parse: &Parse, colex_rank: &[u32]) -> Result<(WaveletTree, Permutation)> {
    let m = parse.len();
    let rot = sort_cyclic_rotations(parse.ranks())?;
    let mut pi_forward = Vec::with_capacity(m);
    let mut wseq = Vec::with_capacity(m);
    for &r in &rot {
        let q = (r as usize + m - 1) % m;
        pi_forward.push(q as u32);
        wseq.push(colex_rank[parse.rank(q) as usize]);
    }
    let wt = WaveletTree::build(&wseq, colex_rank.len())?;
    let pi = Permutation::new(pi_forward)?;
    Ok((wt, pi))
}

/// Length of the common prefix of two byte strings, eight bytes at a time.
pub(crate) fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    let max = a.len().min(b.len());
    let mut l = 0usize;
    while l + 8 <= max {
        let x = u64::from_le_bytes(a[l..l + 8].try_into().unwrap());
        let y = u64::from_le_bytes(b[l..l + 8].try_into().unwrap());
        if x != y {
            return l + ((x ^ y).trailing_zeros() / 8) as usize;
        }
        l += 8;
    }
    while l < max && a[l] == b[l] {
        l += 1;
    }
    l
}

/// Compares the boundary suffixes of parse positions `qa` and `qb` character
/// by character, streaming phrase chunks (phrase minus its leading trigger)
/// straight from the dictionary — no expanded text is needed. Returns the LCP
/// and the lexicographic order of the two finite suffixes.
fn boundary_cmp_lcp(
    dict: &Dictionary,
    parse: &Parse,
    w: usize,
    qa: usize,
    qb: usize,
) -> (usize, Ordering) {
    let m = parse.len();
    let chunk = |q: usize| -> &[u8] { &dict.phrase(parse.rank(q) as usize)[w..] };
    let (mut qa, mut qb) = (qa + 1, qb + 1);
    let mut a: &[u8] = chunk(qa - 1);
    let mut b: &[u8] = chunk(qb - 1);
    let mut lcp = 0usize;
    loop {
        let k = common_prefix(a, b);
        lcp += k;
        a = &a[k..];
        b = &b[k..];
        if a.is_empty() && qa < m {
            a = chunk(qa);
            qa += 1;
        }
        if b.is_empty() && qb < m {
            b = chunk(qb);
            qb += 1;
        }
        match (a.is_empty(), b.is_empty()) {
            (true, true) => return (lcp, Ordering::Equal),
            (true, false) => return (lcp, Ordering::Less),
            (false, true) => return (lcp, Ordering::Greater),
            (false, false) => {
                if a[0] != b[0] {
                    return (lcp, a[0].cmp(&b[0]));
                }
            }
        }
    }
}

/// Adjacent LCPs of the boundary suffixes in the given parse-position order;
/// the flag reports whether every adjacent pair is in strictly increasing
/// lexicographic order.
fn boundary_adjacent_lcps(
    dict: &Dictionary,
    parse: &Parse,
    w: usize,
    order: &[u32],
) -> (Vec<u32>, bool) {
    let mut lcp = Vec::with_capacity(order.len());
    let mut sorted = true;
    lcp.push(0);
    for pair in order.windows(2) {
        let (l, ord) = boundary_cmp_lcp(dict, parse, w, pair[0] as usize, pair[1] as usize);
        lcp.push(l as u32);
        sorted &= ord == Ordering::Less;
    }
    (lcp, sorted)
}

/// Boundary-suffix tables. The boundary suffix of parse position q starts at
/// starts[q] + w (mod n), immediately after the phrase's leading trigger.
///
/// Ordering reuses the index's own ISA (already functional at this point):
/// rotation order agrees with finite-suffix order unless one boundary suffix
/// is a prefix of another, which only crafted texts with interior sentinels
/// can produce — a verification pass over adjacent pairs catches that case and
/// falls back to a direct comparison sort.
fn build_boundary_lcp(index: &PfpIndex) -> Result<BoundaryLcpSupport> {
    let n = index.n;
    let m = index.parse.len();
    let w = index.w;
    let mut order: Vec<u32> = (0..m as u32).collect();
    {
        // Cache the m ISA lookups, sort indices by them, then release the
        // cache before the LCP scans so the transients don't stack.
        let mut isa_of = Vec::with_capacity(m);
        for q in 0..m {
            let pos = (index.parse.start(q) + w) % n;
            isa_of.push(index.isa(pos)? as u32);
        }
        order.sort_unstable_by_key(|&q| isa_of[q as usize]);
    }
    let (lcp, sorted) = boundary_adjacent_lcps(&index.dict, &index.parse, w, &order);
    let lcp = if sorted {
        lcp
    } else {
        order.sort_unstable_by(|&a, &b| {
            boundary_cmp_lcp(&index.dict, &index.parse, w, a as usize, b as usize).1
        });
        boundary_adjacent_lcps(&index.dict, &index.parse, w, &order).0
    };
    Ok(BoundaryLcpSupport::from_rank_order(&order, lcp))
}
