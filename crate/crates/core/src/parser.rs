//! Prefix-free parsing: prepare a text, segment it into overlapping phrases
//! delimited by trigger strings, and expand a parse back into the text.
//!
//! The text is treated as cyclic. `w` sentinel bytes are appended and the
//! all-sentinel window is always a trigger, so the first phrase of the parse
//! begins at the sentinel trigger and every character of the text is
//! contained in exactly one phrase.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Sentinel byte appended `w` times to the prepared text.
pub const SENTINEL: u8 = 0x01;
/// Bytes `0x00..=RESERVED_MAX` are reserved (0x01 is the text sentinel,
/// 0x00 and 0x02 are used by the dictionary file machinery).
pub const RESERVED_MAX: u8 = 0x02;
/// Amount by which `remap` shifts input bytes out of the reserved range.
pub const REMAP_SHIFT: u8 = 3;

/// Karp-Rabin modulus: the Mersenne prime 2^61 - 1.
pub const KR_PRIME: u64 = (1 << 61) - 1;
/// Default base of the polynomial rolling hash.
pub const KR_DEFAULT_BASE: u64 = 2_147_483_659;

/// Default window length, per the reference parsing parameters.
pub const DEFAULT_W: usize = 10;
/// Default hash modulus parameter.
pub const DEFAULT_P: u64 = 100;

/// Texts longer than this are rejected; positions are stored as `u32`.
pub const MAX_TEXT_LEN: usize = (u32::MAX - 1) as usize;

/// A prepared text: the raw input with `w` sentinel bytes appended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    bytes: Vec<u8>,
    w: usize,
}

impl Text {
    /// Wraps an already-prepared byte string. The last `w` bytes must be
    /// sentinels. Unlike [`prepare_text`], interior sentinel bytes are
    /// permitted; this is how the deterministic explicit-trigger examples
    /// are constructed.
    pub fn from_raw_parts(bytes: Vec<u8>, w: usize) -> Result<Text> {
        if w == 0 {
            return Err(Error::config("window length w must be >= 1"));
        }
        if bytes.len() < w + 1 {
            return Err(Error::config(format!(
                "prepared text of length {} is shorter than w + 1 = {}",
                bytes.len(),
                w + 1
            )));
        }
        if bytes.len() > MAX_TEXT_LEN {
            return Err(Error::TooLarge { len: bytes.len(), limit: MAX_TEXT_LEN });
        }
        if bytes[bytes.len() - w..].iter().any(|&b| b != SENTINEL) {
            return Err(Error::config("prepared text must end with w sentinel bytes"));
        }
        Ok(Text { bytes, w })
    }

    /// Total length `n`, sentinels included.
    pub fn n(&self) -> usize {
        self.bytes.len()
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Cyclic access: `S[i mod n]`.
    pub fn byte_cyclic(&self, i: usize) -> u8 {
        self.bytes[i % self.bytes.len()]
    }
}

/// Appends `w` sentinel bytes to `raw`. Bytes in the reserved range are
/// rejected unless `remap` is set, in which case every byte is shifted up by
/// [`REMAP_SHIFT`].
pub fn prepare_text(raw: &[u8], w: usize, remap: bool) -> Result<Text> {
    if raw.is_empty() {
        return Err(Error::config("input text must be non-empty"));
    }
    if w == 0 {
        return Err(Error::config("window length w must be >= 1"));
    }
    if raw.len() + w > MAX_TEXT_LEN {
        return Err(Error::TooLarge { len: raw.len() + w, limit: MAX_TEXT_LEN });
    }
    let mut bytes = Vec::with_capacity(raw.len() + w);
    if remap {
        for (pos, &b) in raw.iter().enumerate() {
            let shifted = b.checked_add(REMAP_SHIFT).ok_or(Error::ReservedByte { byte: b, pos })?;
            bytes.push(shifted);
        }
    } else {
        if let Some(pos) = raw.iter().position(|&b| b <= RESERVED_MAX) {
            return Err(Error::ReservedByte { byte: raw[pos], pos });
        }
        bytes.extend_from_slice(raw);
    }
    bytes.resize(raw.len() + w, SENTINEL);
    Ok(Text { bytes, w })
}

/// How trigger strings are chosen.
#[derive(Debug, Clone)]
pub enum TriggerMode {
    /// A length-`w` window is a trigger when its Karp-Rabin hash is
    /// congruent to 0 modulo `p`. Windows containing sentinel bytes are
    /// never hash triggers.
    Hash { p: u64, base: u64 },
    /// A window is a trigger when it is a member of the set. Used to
    /// reproduce deterministic parses in tests.
    Explicit { triggers: BTreeSet<Vec<u8>> },
}

/// Parsing parameters: window length plus trigger selection mode.
///
/// The all-sentinel window is a trigger in every mode.
#[derive(Debug, Clone)]
pub struct TriggerConfig {
    w: usize,
    mode: TriggerMode,
}

impl TriggerConfig {
    pub fn hash(w: usize, p: u64) -> Result<TriggerConfig> {
        Self::hash_with_base(w, p, KR_DEFAULT_BASE)
    }

    pub fn hash_with_base(w: usize, p: u64, base: u64) -> Result<TriggerConfig> {
        if w == 0 {
            return Err(Error::config("window length w must be >= 1"));
        }
        if p == 0 {
            return Err(Error::config("hash modulus p must be >= 1"));
        }
        if base == 0 || base >= KR_PRIME {
            return Err(Error::config("hash base must be in 1..2^61-1"));
        }
        Ok(TriggerConfig { w, mode: TriggerMode::Hash { p, base } })
    }

    pub fn explicit<I>(w: usize, triggers: I) -> Result<TriggerConfig>
    where
        I: IntoIterator<Item = Vec<u8>>,
    {
        if w == 0 {
            return Err(Error::config("window length w must be >= 1"));
        }
        let mut set = BTreeSet::new();
        for t in triggers {
            if t.len() != w {
                return Err(Error::config(format!(
                    "explicit trigger of length {} does not match w = {}",
                    t.len(),
                    w
                )));
            }
            set.insert(t);
        }
        Ok(TriggerConfig { w, mode: TriggerMode::Explicit { triggers: set } })
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn mode(&self) -> &TriggerMode {
        &self.mode
    }
}

impl Default for TriggerConfig {
    fn default() -> Self {
        TriggerConfig::hash(DEFAULT_W, DEFAULT_P).unwrap()
    }
}

/// Polynomial rolling hash over the 61-bit Mersenne field.
#[derive(Debug, Clone)]
pub struct KrHasher {
    base: u64,
    /// base^(w-1) mod KR_PRIME, used to remove the outgoing byte.
    lead_pow: u64,
    w: usize,
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % KR_PRIME as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= KR_PRIME {
        s - KR_PRIME
    } else {
        s
    }
}

impl KrHasher {
    pub fn new(w: usize, base: u64) -> KrHasher {
        let mut lead_pow = 1u64;
        for _ in 1..w {
            lead_pow = mulmod(lead_pow, base);
        }
        KrHasher { base, lead_pow, w }
    }

    /// Hash of a full window, computed from scratch.
    pub fn hash(&self, window: &[u8]) -> u64 {
        debug_assert_eq!(window.len(), self.w);
        let mut h = 0u64;
        for &b in window {
            h = addmod(mulmod(h, self.base), b as u64);
        }
        h
    }

    /// Slides the window one byte: removes `out` from the front, appends `inc`.
    pub fn roll(&self, h: u64, out: u8, inc: u8) -> u64 {
        let without = addmod(h, KR_PRIME - mulmod(out as u64, self.lead_pow));
        addmod(mulmod(without, self.base), inc as u64)
    }
}

/// Karp-Rabin hash of one window under the config's hash parameters.
pub fn kr_window_hash(window: &[u8], cfg: &TriggerConfig) -> Result<u64> {
    if window.len() != cfg.w {
        return Err(Error::config(format!(
            "window length {} does not match w = {}",
            window.len(),
            cfg.w
        )));
    }
    match cfg.mode {
        TriggerMode::Hash { base, .. } => Ok(KrHasher::new(cfg.w, base).hash(window)),
        TriggerMode::Explicit { .. } => {
            Err(Error::config("kr_window_hash requires hash mode"))
        }
    }
}

/// The lexicographically sorted set of distinct phrases with per-phrase
/// occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    /// Concatenated phrase bytes in lexicographic order.
    buf: Vec<u8>,
    /// `offsets[d]..offsets[d+1]` is phrase `d` within `buf`.
    offsets: Vec<usize>,
    /// Occurrences of phrase `d` in the parse.
    freq: Vec<u64>,
}

impl Dictionary {
    pub fn from_phrases(phrases: Vec<Vec<u8>>, freq: Vec<u64>) -> Result<Dictionary> {
        if phrases.len() != freq.len() {
            return Err(Error::config("phrase/frequency length mismatch"));
        }
        for pair in phrases.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::corrupt("dictionary phrases must be strictly increasing"));
            }
        }
        let mut buf = Vec::with_capacity(phrases.iter().map(Vec::len).sum());
        let mut offsets = Vec::with_capacity(phrases.len() + 1);
        offsets.push(0);
        for p in &phrases {
            buf.extend_from_slice(p);
            offsets.push(buf.len());
        }
        Ok(Dictionary { buf, offsets, freq })
    }

    /// Number of distinct phrases.
    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    pub fn phrase(&self, d: usize) -> &[u8] {
        &self.buf[self.offsets[d]..self.offsets[d + 1]]
    }

    pub fn phrase_len(&self, d: usize) -> usize {
        self.offsets[d + 1] - self.offsets[d]
    }

    pub fn freq(&self, d: usize) -> u64 {
        self.freq[d]
    }

    /// Sum of phrase lengths.
    pub fn total_len(&self) -> usize {
        self.buf.len()
    }

    pub fn rank_of(&self, phrase: &[u8]) -> Option<usize> {
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.phrase(mid) < phrase {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        (lo < self.len() && self.phrase(lo) == phrase).then_some(lo)
    }
}

/// The parse: phrase ranks covering the cyclic text, with phrase start
/// positions. Parse position 0 is the phrase whose leading trigger is the
/// sentinel window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parse {
    ranks: Vec<u32>,
    starts: Vec<u32>,
}

impl Parse {
    pub fn new(ranks: Vec<u32>, starts: Vec<u32>) -> Parse {
        debug_assert_eq!(ranks.len(), starts.len());
        Parse { ranks, starts }
    }

    /// Number of phrases `m`.
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn starts(&self) -> &[u32] {
        &self.starts
    }

    pub fn rank(&self, q: usize) -> u32 {
        self.ranks[q]
    }

    pub fn start(&self, q: usize) -> usize {
        self.starts[q] as usize
    }

    /// Reconstructs the starts from the ranks and phrase lengths; used when
    /// loading a serialized parse.
    pub fn from_ranks(ranks: Vec<u32>, dict: &Dictionary, w: usize, n: usize) -> Result<Parse> {
        let mut starts = Vec::with_capacity(ranks.len());
        let mut pos = n - w;
        for &r in &ranks {
            let d = r as usize;
            if d >= dict.len() {
                return Err(Error::corrupt("parse rank out of dictionary range"));
            }
            starts.push(pos as u32);
            pos = (pos + dict.phrase_len(d) - w) % n;
        }
        if pos != n - w {
            return Err(Error::corrupt("parse phrase lengths do not cover the text"));
        }
        Ok(Parse { ranks, starts })
    }
}

/// Positions of all trigger windows, in cyclic order starting from the
/// sentinel window at `n - w`.
fn trigger_positions(text: &Text, cfg: &TriggerConfig) -> Vec<usize> {
    let n = text.n();
    let w = cfg.w;
    let bytes = text.bytes();
    let mut linear: Vec<usize> = Vec::new();
    match cfg.mode() {
        TriggerMode::Hash { p, base } => {
            // Only windows free of sentinel bytes can be hash triggers; with a
            // prepared text those are exactly the windows ending before n - w.
            if n >= 2 * w {
                let hasher = KrHasher::new(w, *base);
                let last = n - 2 * w;
                let mut h = hasher.hash(&bytes[0..w]);
                let mut i = 0usize;
                loop {
                    if h % p == 0 && bytes[i..i + w].iter().all(|&b| b != SENTINEL) {
                        linear.push(i);
                    }
                    if i == last {
                        break;
                    }
                    h = hasher.roll(h, bytes[i], bytes[i + w]);
                    i += 1;
                }
            }
        }
        TriggerMode::Explicit { triggers } => {
            let mut window = vec![0u8; w];
            for i in 0..n {
                if i == n - w {
                    continue; // the sentinel window is forced below
                }
                for (k, slot) in window.iter_mut().enumerate() {
                    *slot = text.byte_cyclic(i + k);
                }
                if triggers.contains(&window) {
                    linear.push(i);
                }
            }
        }
    }
    // Rotate into cyclic order anchored at the sentinel trigger.
    let pivot = n - w;
    let split = linear.partition_point(|&i| i < pivot);
    let mut starts = Vec::with_capacity(linear.len() + 1);
    starts.push(pivot);
    starts.extend(linear[split..].iter().copied().filter(|&i| i != pivot));
    starts.extend_from_slice(&linear[..split]);
    starts
}

fn cyclic_phrase<'a>(bytes: &'a [u8], start: usize, len: usize, scratch: &'a mut Vec<u8>) -> &'a [u8] {
    let n = bytes.len();
    if start + len <= n {
        &bytes[start..start + len]
    } else {
        scratch.clear();
        scratch.extend_from_slice(&bytes[start..]);
        let mut rem = len - (n - start);
        while rem > 0 {
            let take = rem.min(n);
            scratch.extend_from_slice(&bytes[..take]);
            rem -= take;
        }
        scratch
    }
}

/// Parses a prepared text into its dictionary and parse.
pub fn parse_text(text: &Text, cfg: &TriggerConfig) -> Result<(Dictionary, Parse)> {
    if cfg.w != text.w() {
        return Err(Error::config(format!(
            "trigger config w = {} does not match text w = {}",
            cfg.w,
            text.w()
        )));
    }
    let n = text.n();
    let w = cfg.w;
    let starts = trigger_positions(text, cfg);
    let m = starts.len();
    let bytes = text.bytes();

    let phrase_len = |q: usize| -> usize {
        let next = starts[(q + 1) % m];
        (next + n - starts[q]) % n + w + if m == 1 { n } else { 0 }
    };

    // First pass: distinct phrases with occurrence counts.
    let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut scratch = Vec::new();
    for q in 0..m {
        let phrase = cyclic_phrase(bytes, starts[q], phrase_len(q), &mut scratch);
        match counts.get_mut(phrase) {
            Some(c) => *c += 1,
            None => {
                counts.insert(phrase.to_vec(), 1);
            }
        }
    }
    let mut phrases: Vec<Vec<u8>> = counts.keys().cloned().collect();
    phrases.sort_unstable();
    let freq: Vec<u64> = phrases.iter().map(|p| counts[p]).collect();
    drop(counts);
    let dict = Dictionary::from_phrases(phrases, freq)?;

    // Second pass: phrase ranks.
    let mut ranks = Vec::with_capacity(m);
    for q in 0..m {
        let phrase = cyclic_phrase(bytes, starts[q], phrase_len(q), &mut scratch);
        let d = dict.rank_of(phrase).expect("phrase collected in first pass");
        ranks.push(d as u32);
    }
    let starts = starts.into_iter().map(|s| s as u32).collect();
    Ok((dict, Parse::new(ranks, starts)))
}

/// Inverse of [`parse_text`]: concatenates the phrases, dropping the
/// overlapping `w` leading characters of each, and returns the prepared text.
pub fn expand(dict: &Dictionary, parse: &Parse, w: usize) -> Result<Text> {
    if parse.is_empty() {
        return Err(Error::corrupt("cannot expand an empty parse"));
    }
    let m = parse.len();
    let mut out: Vec<u8> = Vec::new();
    for q in 0..m {
        let d = parse.rank(q) as usize;
        if d >= dict.len() {
            return Err(Error::corrupt(format!("parse rank {d} out of dictionary range")));
        }
        let phrase = dict.phrase(d);
        if phrase.len() < w + 1 {
            return Err(Error::corrupt("phrase shorter than w + 1"));
        }
        let next = dict.phrase(parse.rank((q + 1) % m) as usize);
        if phrase[phrase.len() - w..] != next[..w] {
            return Err(Error::corrupt(format!(
                "overlap mismatch between parse positions {} and {}",
                q,
                (q + 1) % m
            )));
        }
        out.extend_from_slice(&phrase[w..]);
    }
    Text::from_raw_parts(out, w)
}
