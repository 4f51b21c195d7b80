//! Binary serialization of a [`PfpIndex`] and import/export of dictionary and
//! parse files in the layout used by external PFP builders.
//!
//! The index file layout (documented in FORMAT.md) is:
//!
//! ```text
//! magic "PFPIDX01"
//! header: n, w, m, sigma, suffix_count  (five u64, little-endian)
//! sections, in fixed order, each prefixed by its u64 byte length:
//!   dict, parse, b_bwt, m, wavelet, pi, boundary
//! checksum: FNV-1a 64 of everything above (u64, little-endian)
//! ```
//!
//! Only components that are expensive to recompute are stored; B_P, the
//! co-lexicographic phrase order, phrase frequencies, phrase starts, rank
//! counts and permutation inverses are rebuilt on load. All integers inside
//! sections are LEB128 varints except wavelet-tree level words, which are raw
//! u64 little-endian. The encoding is canonical: serializing a deserialized
//! index reproduces the input bytes exactly.

use crate::builder::{build_bp, build_colex, BoundaryLcpSupport, LenTable, PfpIndex};
use crate::error::{Error, Result};
use crate::parser::{Dictionary, Parse, SENTINEL};
use crate::succinct::{levels_for, DenseBitvector, Permutation, SparseBitvector, WaveletTree};

pub const MAGIC: &[u8; 8] = b"PFPIDX01";

/// Section names in file order, for size reporting.
pub const SECTION_NAMES: [&str; 7] =
    ["dict", "parse", "b_bwt", "m", "wavelet", "pi", "boundary"];

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

/// Bounded reader over a byte slice; every read is length-checked.
struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Reader<'a> {
        Reader { buf, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if len > self.remaining() {
            return Err(Error::corrupt("index file truncated"));
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        let mut shift = 0u32;
        loop {
            let byte = *self
                .buf
                .get(self.pos)
                .ok_or_else(|| Error::corrupt("index file truncated inside varint"))?;
            self.pos += 1;
            if shift >= 64 || (shift == 63 && byte > 1) {
                return Err(Error::corrupt("varint overflows u64"));
            }
            v |= ((byte & 0x7f) as u64) << shift;
            if byte & 0x80 == 0 {
                return Ok(v);
            }
            shift += 7;
        }
    }

    fn varint_usize(&mut self) -> Result<usize> {
        let v = self.varint()?;
        usize::try_from(v).map_err(|_| Error::corrupt("varint out of usize range"))
    }

    fn varint_u32(&mut self) -> Result<u32> {
        let v = self.varint()?;
        u32::try_from(v).map_err(|_| Error::corrupt("varint out of u32 range"))
    }
}

fn section_dict(index: &PfpIndex) -> Vec<u8> {
    let dict = index.dict();
    let mut out = Vec::with_capacity(dict.total_len() + dict.len() * 2 + 8);
    put_varint(&mut out, dict.len() as u64);
    for d in 0..dict.len() {
        let p = dict.phrase(d);
        put_varint(&mut out, p.len() as u64);
        out.extend_from_slice(p);
    }
    out
}

fn section_parse(index: &PfpIndex) -> Vec<u8> {
    let ranks = index.parse().ranks();
    let mut out = Vec::with_capacity(ranks.len() * 2 + 8);
    put_varint(&mut out, ranks.len() as u64);
    for &r in ranks {
        put_varint(&mut out, r as u64);
    }
    out
}

fn section_b_bwt(index: &PfpIndex) -> Vec<u8> {
    let ones = index.b_bwt().ones();
    let mut out = Vec::with_capacity(ones.len() + 8);
    put_varint(&mut out, ones.len() as u64);
    let mut prev = 0u64;
    for &p in ones {
        put_varint(&mut out, p as u64 - prev);
        prev = p as u64;
    }
    out
}

fn section_m(index: &PfpIndex) -> Vec<u8> {
    let rows = index.suffix_count();
    let mut out = Vec::with_capacity(rows * 4 + 8);
    put_varint(&mut out, rows as u64);
    for t in 0..rows {
        let row = index.m_row(t).expect("row index in range");
        put_varint(&mut out, row.len as u64);
        put_varint(&mut out, row.colex_lo as u64);
        put_varint(&mut out, (row.colex_hi - row.colex_lo) as u64);
    }
    out
}

fn section_wavelet(index: &PfpIndex) -> Vec<u8> {
    let wt = index.wavelet();
    let words_per_level = wt.len().div_ceil(64);
    let mut out = Vec::with_capacity(16 + wt.levels().len() * words_per_level * 8);
    put_varint(&mut out, wt.len() as u64);
    put_varint(&mut out, wt.sigma() as u64);
    for level in wt.levels() {
        for &word in level.words() {
            put_u64(&mut out, word);
        }
    }
    out
}

fn section_pi(index: &PfpIndex) -> Vec<u8> {
    let forward = index.pi().forward();
    let mut out = Vec::with_capacity(forward.len() * 2 + 8);
    put_varint(&mut out, forward.len() as u64);
    for &q in forward {
        put_varint(&mut out, q as u64);
    }
    out
}

fn section_boundary(index: &PfpIndex) -> Vec<u8> {
    let boundary = index.boundary();
    let m = boundary.len();
    let mut out = Vec::with_capacity(m * 3 + 8);
    put_varint(&mut out, m as u64);
    for q in 0..m {
        put_varint(&mut out, boundary.rank_of_parse_pos(q) as u64);
    }
    for &l in boundary.lcp() {
        put_varint(&mut out, l as u64);
    }
    out
}

/// Number of distinct byte values in the dictionary; with a covering parse
/// this equals the alphabet size of the text (sentinel included).
pub fn alphabet_size(dict: &Dictionary) -> usize {
    let mut seen = [false; 256];
    for d in 0..dict.len() {
        for &b in dict.phrase(d) {
            seen[b as usize] = true;
        }
    }
    seen.iter().filter(|&&s| s).count()
}

/// Serializes the index, also reporting each section's payload size in bytes
/// (excluding its length prefix).
pub fn serialize_with_sections(index: &PfpIndex) -> (Vec<u8>, Vec<(&'static str, u64)>) {
    let sections = [
        section_dict(index),
        section_parse(index),
        section_b_bwt(index),
        section_m(index),
        section_wavelet(index),
        section_pi(index),
        section_boundary(index),
    ];
    let mut out = Vec::with_capacity(
        MAGIC.len() + 48 + sections.iter().map(|s| s.len() + 8).sum::<usize>(),
    );
    out.extend_from_slice(MAGIC);
    put_u64(&mut out, index.n() as u64);
    put_u64(&mut out, index.w() as u64);
    put_u64(&mut out, index.parse().len() as u64);
    put_u64(&mut out, alphabet_size(index.dict()) as u64);
    put_u64(&mut out, index.suffix_count() as u64);
    let mut sizes = Vec::with_capacity(sections.len());
    for (name, body) in SECTION_NAMES.iter().zip(&sections) {
        sizes.push((*name, body.len() as u64));
        put_u64(&mut out, body.len() as u64);
        out.extend_from_slice(body);
    }
    let checksum = fnv1a64(&out);
    put_u64(&mut out, checksum);
    (out, sizes)
}

/// Serializes the index into the canonical byte layout.
pub fn serialize(index: &PfpIndex) -> Vec<u8> {
    serialize_with_sections(index).0
}

/// Reconstructs an index from its serialized form, rebuilding the components
/// the format omits (B_P, co-lex order, frequencies, starts, rank counts).
pub fn deserialize(bytes: &[u8]) -> Result<PfpIndex> {
    if bytes.len() < MAGIC.len() + 48 {
        return Err(Error::corrupt("index file too short"));
    }
    let (payload, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().unwrap());
    if fnv1a64(payload) != stored {
        return Err(Error::corrupt("index file checksum mismatch"));
    }
    let mut r = Reader::new(payload);
    if r.take(MAGIC.len())? != MAGIC {
        return Err(Error::corrupt("bad magic: not an index file"));
    }
    let n = r.u64()? as usize;
    let w = r.u64()? as usize;
    let m = r.u64()? as usize;
    let sigma = r.u64()? as usize;
    let suffix_count = r.u64()? as usize;
    if n == 0 || w == 0 || m == 0 || n > u32::MAX as usize {
        return Err(Error::corrupt("index header out of range"));
    }

    let mut sections = Vec::with_capacity(SECTION_NAMES.len());
    for _ in SECTION_NAMES {
        let len = r.u64()? as usize;
        sections.push(Reader::new(r.take(len)?));
    }
    if r.remaining() != 0 {
        return Err(Error::corrupt("trailing bytes after last section"));
    }
    let [mut sec_dict, mut sec_parse, mut sec_bbwt, mut sec_m, mut sec_wt, mut sec_pi, mut sec_bd]: [Reader; 7] =
        sections.try_into().ok().unwrap();

    // Parse ranks first: phrase frequencies are recomputed from them.
    let rank_count = sec_parse.varint_usize()?;
    if rank_count != m {
        return Err(Error::corrupt("parse length disagrees with header"));
    }
    let mut ranks = Vec::with_capacity(m);
    for _ in 0..m {
        ranks.push(sec_parse.varint_u32()?);
    }

    let phrase_count = sec_dict.varint_usize()?;
    let mut phrases = Vec::with_capacity(phrase_count);
    for _ in 0..phrase_count {
        let len = sec_dict.varint_usize()?;
        phrases.push(sec_dict.take(len)?.to_vec());
    }
    let mut freq = vec![0u64; phrase_count];
    for &rk in &ranks {
        *freq
            .get_mut(rk as usize)
            .ok_or_else(|| Error::corrupt("parse rank out of dictionary range"))? += 1;
    }
    if freq.contains(&0) {
        return Err(Error::corrupt("dictionary phrase unused by the parse"));
    }
    let dict = Dictionary::from_phrases(phrases, freq)?;
    if alphabet_size(&dict) != sigma {
        return Err(Error::corrupt("alphabet size disagrees with header"));
    }
    let parse = Parse::from_ranks(ranks, &dict, w, n)?;

    let ones_count = sec_bbwt.varint_usize()?;
    if ones_count != suffix_count {
        return Err(Error::corrupt("B_BWT one-count disagrees with header"));
    }
    let mut ones = Vec::with_capacity(ones_count);
    let mut acc = 0u64;
    for i in 0..ones_count {
        let delta = sec_bbwt.varint()?;
        if i > 0 && delta == 0 {
            return Err(Error::corrupt("B_BWT positions must be strictly increasing"));
        }
        acc += delta;
        ones.push(
            u32::try_from(acc).map_err(|_| Error::corrupt("B_BWT position out of range"))?,
        );
    }
    let b_bwt = SparseBitvector::new(n as u64, ones)?;

    let rows = sec_m.varint_usize()?;
    if rows != suffix_count {
        return Err(Error::corrupt("table M row count disagrees with header"));
    }
    let mut m_len = LenTable::with_capacity(rows);
    let mut m_lo = Vec::with_capacity(rows);
    let mut m_hi = Vec::with_capacity(rows);
    for _ in 0..rows {
        m_len.push(sec_m.varint_u32()?);
        let lo = sec_m.varint_u32()?;
        let span = sec_m.varint_u32()?;
        let hi = lo
            .checked_add(span)
            .ok_or_else(|| Error::corrupt("table M range out of bounds"))?;
        if hi as usize >= dict.len() {
            return Err(Error::corrupt("table M range out of bounds"));
        }
        m_lo.push(lo);
        m_hi.push(hi);
    }

    let wt_len = sec_wt.varint_usize()?;
    let wt_sigma = sec_wt.varint_usize()?;
    if wt_len != m || wt_sigma != dict.len() {
        return Err(Error::corrupt("wavelet tree shape disagrees with parse"));
    }
    let words_per_level = wt_len.div_ceil(64);
    let mut levels = Vec::with_capacity(levels_for(wt_sigma));
    for _ in 0..levels_for(wt_sigma) {
        let mut words = Vec::with_capacity(words_per_level);
        for _ in 0..words_per_level {
            words.push(sec_wt.u64()?);
        }
        levels.push(DenseBitvector::from_bits(wt_len, words));
    }
    let wt = WaveletTree::from_parts(wt_len, wt_sigma, levels);

    let pi_len = sec_pi.varint_usize()?;
    if pi_len != m {
        return Err(Error::corrupt("permutation length disagrees with parse"));
    }
    let mut forward = Vec::with_capacity(m);
    for _ in 0..m {
        forward.push(sec_pi.varint_u32()?);
    }
    let pi = Permutation::new(forward)?;

    let bd_len = sec_bd.varint_usize()?;
    if bd_len != m {
        return Err(Error::corrupt("boundary table length disagrees with parse"));
    }
    let mut order = vec![u32::MAX; m];
    for q in 0..m {
        let rank = sec_bd.varint_usize()?;
        let slot = order
            .get_mut(rank)
            .ok_or_else(|| Error::corrupt("boundary rank out of range"))?;
        if *slot != u32::MAX {
            return Err(Error::corrupt("boundary ranks are not a permutation"));
        }
        *slot = q as u32;
    }
    let mut lcp = Vec::with_capacity(m);
    for _ in 0..m {
        lcp.push(sec_bd.varint_u32()?);
    }

    for sec in [&sec_dict, &sec_parse, &sec_bbwt, &sec_m, &sec_wt, &sec_pi, &sec_bd] {
        if sec.remaining() != 0 {
            return Err(Error::corrupt("section has trailing bytes"));
        }
    }

    let boundary = BoundaryLcpSupport::from_rank_order(&order, lcp);
    let b_p = build_bp(&parse, n)?;
    let (colex_rank, colex_phrase) = build_colex(&dict);
    Ok(PfpIndex {
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
        boundary,
    })
}

/// Writes the dictionary in the external builder layout: phrases in
/// lexicographic order, each terminated by 0x01, file terminated by 0x00.
/// Sentinel bytes inside phrases are re-encoded as 0x02 (both 0x01 and 0x02
/// are reserved in prepared texts, so this is unambiguous).
pub fn export_dict(dict: &Dictionary) -> Vec<u8> {
    let mut out = Vec::with_capacity(dict.total_len() + dict.len() + 1);
    for d in 0..dict.len() {
        for &b in dict.phrase(d) {
            out.push(if b == SENTINEL { 0x02 } else { b });
        }
        out.push(0x01);
    }
    out.push(0x00);
    out
}

/// Writes the parse in the external builder layout: phrase ranks as 4-byte
/// little-endian integers, 1-based.
pub fn export_parse(parse: &Parse) -> Vec<u8> {
    let mut out = Vec::with_capacity(parse.len() * 4);
    for &r in parse.ranks() {
        out.extend_from_slice(&(r + 1).to_le_bytes());
    }
    out
}

/// Reads dictionary and parse files in the external builder layout back into
/// a (dictionary, parse) pair; `w` must match the parameters the files were
/// produced with.
pub fn import_dict_and_parse(
    dict_bytes: &[u8],
    parse_bytes: &[u8],
    w: usize,
) -> Result<(Dictionary, Parse)> {
    let Some((&0x00, body)) = dict_bytes.split_last() else {
        return Err(Error::corrupt("dictionary file must end with byte 0x00"));
    };
    let mut phrases: Vec<Vec<u8>> = Vec::new();
    for chunk in body.split(|&b| b == 0x01) {
        if chunk.is_empty() {
            continue;
        }
        phrases
            .push(chunk.iter().map(|&b| if b == 0x02 { SENTINEL } else { b }).collect());
    }
    if phrases.is_empty() {
        return Err(Error::corrupt("dictionary file holds no phrases"));
    }
    if parse_bytes.len() % 4 != 0 {
        return Err(Error::corrupt("parse file length must be a multiple of 4"));
    }
    let mut ranks = Vec::with_capacity(parse_bytes.len() / 4);
    let mut freq = vec![0u64; phrases.len()];
    let mut n = 0usize;
    for chunk in parse_bytes.chunks_exact(4) {
        let v = u32::from_le_bytes(chunk.try_into().unwrap());
        if v == 0 || v as usize > phrases.len() {
            return Err(Error::corrupt(format!("parse rank {v} out of dictionary range")));
        }
        let d = (v - 1) as usize;
        ranks.push(d as u32);
        freq[d] += 1;
        let len = phrases[d].len();
        if len < w + 1 {
            return Err(Error::corrupt(format!("phrase {d} shorter than w + 1")));
        }
        n += len - w;
    }
    if freq.contains(&0) {
        return Err(Error::corrupt("dictionary phrase unused by the parse"));
    }
    let dict = Dictionary::from_phrases(phrases, freq)?;
    let parse = Parse::from_ranks(ranks, &dict, w, n)?;
    Ok((dict, parse))
}
