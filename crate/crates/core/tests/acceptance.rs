//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! 1. Golden worked example — published values, exact match.
//! 2. Oracle equivalence — 540 random texts across the parameter grid.
//! 3. Invariant suite — structural laws on random instances.
//! 4. Space proportionality — 50 MB mutated-copy corpus.
//! 5. Determinism — byte-identical serialization across runs.
//! 6. Query latency — sub-millisecond means on the 50 MB corpus.

use std::alloc::{GlobalAlloc, Layout, System};
use std::io::Read;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfpds::{
    build_index, deserialize, expand, oracle_build, oracle_lce, parse_text, prepare_text,
    serialize, PfpIndex, Text, TriggerConfig, SENTINEL,
};

// ---------------------------------------------------------------------------
// Peak-memory tracking for the space criterion.

struct CountingAllocator;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for CountingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let live = LIVE.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(live, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        LIVE.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOCATOR: CountingAllocator = CountingAllocator;

fn reset_peak() {
    PEAK.store(LIVE.load(Ordering::Relaxed), Ordering::Relaxed);
}

fn peak() -> usize {
    PEAK.load(Ordering::Relaxed)
}

// ---------------------------------------------------------------------------

type CheckResult = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let corpus = CorpusArtifacts::prepare();
    let checks: Vec<(&str, Box<dyn FnOnce() -> CheckResult>)> = vec![
        ("golden worked example", Box::new(golden_worked_example)),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("invariant suite", Box::new(invariant_suite)),
        ("space proportionality (50 MB corpus)", {
            let c = corpus.clone();
            Box::new(move || space_proportionality(&c))
        }),
        ("determinism", Box::new(determinism)),
        ("query latency (50 MB corpus)", {
            let c = corpus;
            Box::new(move || query_latency(&c))
        }),
    ];
    let mut failed = 0usize;
    for (name, check) in checks {
        let started = Instant::now();
        match check() {
            Ok(detail) => {
                println!("[PASS] {name} ({:.1}s) — {detail}", started.elapsed().as_secs_f64());
            }
            Err(reason) => {
                failed += 1;
                println!("[FAIL] {name} ({:.1}s) — {reason}", started.elapsed().as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: golden worked example.

/// The worked example: GATTACAT#GATACAT#GATTAGATA with '#' encoded as the
/// sentinel byte, plus two appended sentinels (n = 28, w = 2).
fn example_text() -> Text {
    let mut bytes: Vec<u8> = b"GATTACAT.GATACAT.GATTAGATA"
        .iter()
        .map(|&b| if b == b'.' { SENTINEL } else { b })
        .collect();
    bytes.extend_from_slice(&[SENTINEL, SENTINEL]);
    Text::from_raw_parts(bytes, 2).unwrap()
}

fn example_config() -> TriggerConfig {
    TriggerConfig::explicit(
        2,
        vec![
            b"AC".to_vec(),
            b"AG".to_vec(),
            vec![b'T', SENTINEL],
            vec![SENTINEL, SENTINEL],
        ],
    )
    .unwrap()
}

fn bits_of(ones: &[u32], len: usize) -> String {
    let mut s = vec![b'0'; len];
    for &p in ones {
        s[p as usize] = b'1';
    }
    String::from_utf8(s).unwrap()
}

fn golden_worked_example() -> CheckResult {
    let text = example_text();
    let index = PfpIndex::build(&text, &example_config()).map_err(|e| e.to_string())?;

    ensure!(index.dict().len() == 5, "expected 5 dictionary phrases, got {}", index.dict().len());
    ensure!(
        index.parse().ranks() == [0, 1, 3, 1, 4, 2],
        "parse ranks {:?} != [0, 1, 3, 1, 4, 2]",
        index.parse().ranks()
    );

    let bp = bits_of(index.b_p().ones(), index.n());
    ensure!(bp == "0000100100001001000001000010", "B_P = {bp}");
    let bbwt = bits_of(index.b_bwt().ones(), index.n());
    ensure!(bbwt == "1111110110111110111110110111", "B_BWT = {bbwt}");

    ensure!(index.pi().forward() == [5, 0, 2, 4, 1, 3], "pi = {:?}", index.pi().forward());

    let row = index.m_row(19).map_err(|e| e.to_string())?;
    ensure!(
        row.len == 3 && row.colex_lo == 2 && row.colex_hi == 3,
        "M[19] = ({}, [{}, {}])",
        row.len,
        row.colex_lo,
        row.colex_hi
    );
    // Phrases ending with suffix AC (reversed: CA) span the co-lex range
    // [2, 3] in the reversed-phrase table.
    let mut ac_row = None;
    for t in 0..index.suffix_count() {
        let r = index.m_row(t).unwrap();
        let phrase = index.dict().phrase(index.phrase_of_colex_rank(r.colex_lo));
        if &phrase[phrase.len() - r.len..] == b"AC" {
            ac_row = Some(r);
        }
    }
    let ac = ac_row.ok_or("no M row for suffix AC")?;
    ensure!(
        ac.colex_lo == 2 && ac.colex_hi == 3,
        "colex range of reversed suffix CA = [{}, {}]",
        ac.colex_lo,
        ac.colex_hi
    );

    ensure!(index.lce(3, 11).map_err(|e| e.to_string())? == 9, "LCE(3,11) != 9");
    ensure!(index.lce(6, 14).map_err(|e| e.to_string())? == 6, "LCE(6,14) != 6");
    ensure!(index.sa(24).map_err(|e| e.to_string())? == 11, "SA(24) != 11");
    ensure!(index.isa(11).map_err(|e| e.to_string())? == 24, "ISA(11) != 24");

    let mut bwt = String::new();
    for i in 0..index.n() {
        let b = index.bwt(i).map_err(|e| e.to_string())?;
        bwt.push(if b == SENTINEL { '#' } else { b as char });
    }
    ensure!(bwt == "AT#TTTTTCCGGGGAAA###AAATATAA", "BWT column = {bwt}");

    // Boundary-suffix map (text position → rank) and adjacent-LCP array.
    for (pos, rank) in [(0, 4), (6, 0), (9, 3), (14, 1), (17, 5), (23, 2)] {
        let got = index.boundary_position_of_rank(rank);
        ensure!(got == Some(pos), "boundary rank {rank} at {got:?}, expected {pos}");
    }
    ensure!(
        index.boundary().lcp() == [0, 6, 2, 0, 3, 5],
        "boundary lcp = {:?}",
        index.boundary().lcp()
    );
    Ok("all published values reproduced".into())
}

// ---------------------------------------------------------------------------
// Criterion 2: oracle equivalence.

fn random_raw(rng: &mut ChaCha8Rng, len: usize, sigma: u8) -> Vec<u8> {
    (0..len).map(|_| b'A' + rng.gen_range(0..sigma)).collect()
}

/// Every tenth text gets explicit random triggers instead of hash triggers.
fn config_for(rng: &mut ChaCha8Rng, raw: &[u8], case: usize) -> (usize, TriggerConfig) {
    let w = [2usize, 4, 10][case % 3];
    if case % 10 == 9 && raw.len() > w {
        let count = rng.gen_range(1..=4);
        let triggers: Vec<Vec<u8>> = (0..count)
            .map(|_| {
                let s = rng.gen_range(0..=raw.len() - w);
                raw[s..s + w].to_vec()
            })
            .collect();
        (w, TriggerConfig::explicit(w, triggers).unwrap())
    } else {
        let p = [4u64, 16, 100][(case / 3) % 3];
        (w, TriggerConfig::hash(w, p).unwrap())
    }
}

fn oracle_equivalence() -> CheckResult {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acce97ed);
    let cases = 540usize;
    let mut lce_pairs_checked = 0usize;
    for case in 0..cases {
        let len = rng.gen_range(10..=5000);
        let sigma = rng.gen_range(2..=16);
        let raw = random_raw(&mut rng, len, sigma);
        let (w, cfg) = config_for(&mut rng, &raw, case);
        let text = prepare_text(&raw, w, false).map_err(|e| format!("case {case}: {e}"))?;
        let index =
            PfpIndex::build(&text, &cfg).map_err(|e| format!("case {case}: build: {e}"))?;
        let oracle = oracle_build(&text).map_err(|e| format!("case {case}: oracle: {e}"))?;
        let n = text.n();
        for i in 0..n {
            let checks = [
                ("sa", index.sa(i), oracle.sa[i]),
                ("isa", index.isa(i), oracle.isa[i]),
                ("lcp", index.lcp(i), if i == 0 { 0 } else { oracle.lcp[i] }),
                ("bwt", index.bwt(i).map(usize::from), oracle.bwt[i] as usize),
                ("access", index.access(i).map(usize::from), text.bytes()[i] as usize),
            ];
            for (what, got, want) in checks {
                let got = got.map_err(|e| format!("case {case}: {what}({i}): {e}"))?;
                ensure!(
                    got == want,
                    "case {case} (len {len}, sigma {sigma}, w {w}): {what}({i}) = {got}, oracle says {want}"
                );
            }
        }
        for _ in 0..1000 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let got = index.lce(i, j).map_err(|e| format!("case {case}: lce: {e}"))?;
            let want = oracle_lce(&text, i, j).unwrap();
            ensure!(got == want, "case {case}: lce({i},{j}) = {got}, oracle says {want}");
            lce_pairs_checked += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    ensure!(elapsed < 600.0, "suite took {elapsed:.0}s, over the 10 minute budget");
    Ok(format!("{cases} texts, {lce_pairs_checked} LCE pairs, zero mismatches"))
}

// ---------------------------------------------------------------------------
// Criterion 3: invariant suite.

/// Lemma 1: proper phrase suffixes of length >= w form a prefix-free set.
fn check_prefix_free(index: &PfpIndex) -> Result<(), String> {
    let dict = index.dict();
    let w = index.w();
    let mut suffixes: Vec<&[u8]> = Vec::new();
    for d in 0..dict.len() {
        let p = dict.phrase(d);
        for off in 1..=p.len() - w {
            suffixes.push(&p[off..]);
        }
    }
    suffixes.sort_unstable();
    for pair in suffixes.windows(2) {
        if pair[0] != pair[1] && pair[1].starts_with(pair[0]) {
            return Err(format!("suffix {:?} is a proper prefix of {:?}", pair[0], pair[1]));
        }
    }
    Ok(())
}

fn invariant_suite() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1437a91a);
    let texts = 150usize;
    let mut rmq_ranges_checked = 0usize;
    for case in 0..texts {
        let len = rng.gen_range(10..=2000);
        let sigma = rng.gen_range(2..=16);
        let raw = random_raw(&mut rng, len, sigma);
        let (w, cfg) = config_for(&mut rng, &raw, case);
        let text = prepare_text(&raw, w, false).map_err(|e| e.to_string())?;
        let (dict, parse) = parse_text(&text, &cfg).map_err(|e| e.to_string())?;

        // expand ∘ parse is the identity.
        let roundtrip = expand(&dict, &parse, w).map_err(|e| e.to_string())?;
        ensure!(roundtrip.bytes() == text.bytes(), "case {case}: expand(parse(S)) != S");

        let index = build_index(dict, parse, w).map_err(|e| e.to_string())?;
        let n = index.n();

        check_prefix_free(&index).map_err(|e| format!("case {case}: Lemma 1: {e}"))?;

        // sa ∘ isa and the permutation inverse law.
        for i in 0..n {
            let r = index.isa(i).map_err(|e| e.to_string())?;
            let back = index.sa(r).map_err(|e| e.to_string())?;
            ensure!(back == i, "case {case}: sa(isa({i})) = {back}");
        }
        for k in 0..index.parse().len() {
            let q = index.pi().apply(k).map_err(|e| e.to_string())?;
            let back = index.pi().invert(q as usize).map_err(|e| e.to_string())?;
            ensure!(back as usize == k, "case {case}: pi inverse law broken at {k}");
        }

        // B_BWT has one 1 per M row, and row occurrence counts cover S.
        ensure!(
            index.b_bwt().count_ones() == index.suffix_count() as u64,
            "case {case}: B_BWT ones != M rows"
        );
        let mut occ_sum = 0u64;
        for t in 0..index.suffix_count() {
            let row = index.m_row(t).unwrap();
            for r in row.colex_lo..=row.colex_hi {
                occ_sum += index.dict().freq(index.phrase_of_colex_rank(r));
            }
        }
        ensure!(occ_sum == n as u64, "case {case}: sum of suffix occurrences {occ_sum} != n {n}");

        // rmq_lcp is the range minimum of the LCP array.
        if case % 15 == 0 {
            let oracle = oracle_build(&text).map_err(|e| e.to_string())?;
            for _ in 0..100 {
                let l = rng.gen_range(1..n);
                let r = rng.gen_range(l..n);
                let got = index.rmq_lcp(l, r).map_err(|e| e.to_string())?;
                let want = *oracle.lcp[l..=r].iter().min().unwrap();
                ensure!(
                    got == want,
                    "case {case}: rmq_lcp({l},{r}) = {got}, LCP minimum is {want}"
                );
                rmq_ranges_checked += 1;
            }
        }
    }
    ensure!(rmq_ranges_checked >= 1000, "only {rmq_ranges_checked} rmq ranges checked");
    Ok(format!("{texts} texts, {rmq_ranges_checked} rmq ranges, all invariants hold"))
}

// ---------------------------------------------------------------------------
// Criteria 4 and 6: the 50 MB mutated-copy corpus.

const SEED_LEN: usize = 500_000;
const COPIES: usize = 100;
const CORPUS_W: usize = 10;
const CORPUS_P: u64 = 50;

#[derive(Clone)]
struct CorpusArtifacts {
    path: std::path::PathBuf,
    _dir: std::sync::Arc<tempfile::TempDir>,
}

impl CorpusArtifacts {
    /// Writes the corpus to disk up front so its construction buffers do not
    /// count toward the build's peak memory.
    fn prepare() -> CorpusArtifacts {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let bases = [b'A', b'C', b'G', b'T'];
        let seed: Vec<u8> = (0..SEED_LEN).map(|_| bases[rng.gen_range(0..4)]).collect();
        let dir = tempfile::TempDir::new().expect("temp dir");
        let path = dir.path().join("corpus.txt");
        let mut corpus = Vec::with_capacity(SEED_LEN * COPIES);
        for _ in 0..COPIES {
            let mut copy = seed.clone();
            for b in copy.iter_mut() {
                // 0.1% point mutations, always to a different base.
                if rng.gen_range(0..1000) == 0 {
                    let mut nb = bases[rng.gen_range(0..4)];
                    while nb == *b {
                        nb = bases[rng.gen_range(0..4)];
                    }
                    *b = nb;
                }
            }
            corpus.extend_from_slice(&copy);
        }
        std::fs::write(&path, &corpus).expect("writing corpus");
        CorpusArtifacts { path, _dir: std::sync::Arc::new(dir) }
    }

    /// Reads the corpus into a buffer with room for the sentinel block, so
    /// appending sentinels never reallocates (and never doubles peak memory).
    fn read_text(&self) -> Text {
        let len = std::fs::metadata(&self.path).expect("corpus metadata").len() as usize;
        let mut raw = Vec::with_capacity(len + CORPUS_W + 1024);
        std::fs::File::open(&self.path)
            .expect("opening corpus")
            .read_to_end(&mut raw)
            .expect("reading corpus");
        raw.resize(len + CORPUS_W, SENTINEL);
        Text::from_raw_parts(raw, CORPUS_W).expect("corpus text")
    }
}

fn build_corpus_index(corpus: &CorpusArtifacts) -> Result<(PfpIndex, f64, usize), String> {
    reset_peak();
    let started = Instant::now();
    let text = corpus.read_text();
    let cfg = TriggerConfig::hash(CORPUS_W, CORPUS_P).unwrap();
    let (dict, parse) = parse_text(&text, &cfg).map_err(|e| e.to_string())?;
    drop(text);
    let index = build_index(dict, parse, CORPUS_W).map_err(|e| e.to_string())?;
    Ok((index, started.elapsed().as_secs_f64(), peak()))
}

fn space_proportionality(corpus: &CorpusArtifacts) -> CheckResult {
    let input_size = std::fs::metadata(&corpus.path).map_err(|e| e.to_string())?.len() as usize;
    let (index, build_secs, build_peak) = build_corpus_index(corpus)?;
    let serialized = serialize(&index);
    ensure!(
        serialized.len() < input_size,
        "serialized index ({} bytes) not smaller than input ({input_size} bytes)",
        serialized.len()
    );
    ensure!(
        build_peak < 3 * serialized.len(),
        "build peak {build_peak} bytes >= 3x serialized size ({} bytes)",
        3 * serialized.len()
    );
    ensure!(build_secs < 300.0, "build took {build_secs:.0}s, over the 5 minute budget");
    Ok(format!(
        "input {input_size} B, serialized {} B ({:.1}%), peak {build_peak} B ({:.2}x), built in {build_secs:.1}s",
        serialized.len(),
        100.0 * serialized.len() as f64 / input_size as f64,
        build_peak as f64 / serialized.len() as f64
    ))
}

// ---------------------------------------------------------------------------
// Criterion 5: determinism.

fn determinism() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdead);
    for case in 0..5 {
        let raw = random_raw(&mut rng, 4000, 4);
        let text = prepare_text(&raw, 4, false).map_err(|e| e.to_string())?;
        let cfg = TriggerConfig::hash(4, 16).unwrap();
        let a = serialize(&PfpIndex::build(&text, &cfg).map_err(|e| e.to_string())?);
        let b = serialize(&PfpIndex::build(&text, &cfg).map_err(|e| e.to_string())?);
        ensure!(a == b, "case {case}: two builds of the same text differ");
        let c = serialize(&deserialize(&a).map_err(|e| e.to_string())?);
        ensure!(a == c, "case {case}: serialize/deserialize/re-serialize differs");
    }
    Ok("repeated builds and round trips byte-identical".into())
}

// ---------------------------------------------------------------------------
// Criterion 6: query latency on the corpus index.

fn query_latency(corpus: &CorpusArtifacts) -> CheckResult {
    let (index, _, _) = build_corpus_index(corpus)?;
    let n = index.n();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a7e);
    let count = 10_000usize;
    let mut report = String::new();
    for kind in ["sa", "lcp", "lce"] {
        let args: Vec<(usize, usize)> =
            (0..count).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let started = Instant::now();
        let mut sink = 0usize;
        for &(i, j) in &args {
            sink = sink.wrapping_add(match kind {
                "sa" => index.sa(i).map_err(|e| e.to_string())?,
                "lcp" => index.lcp(i).map_err(|e| e.to_string())?,
                _ => index.lce(i, j).map_err(|e| e.to_string())?,
            });
        }
        std::hint::black_box(sink);
        let mean_ms = started.elapsed().as_secs_f64() * 1000.0 / count as f64;
        ensure!(mean_ms < 1.0, "{kind} mean latency {mean_ms:.3} ms >= 1 ms");
        report.push_str(&format!("{kind} {:.1}us ", mean_ms * 1000.0));
    }
    Ok(format!("means over {count} queries: {report}"))
}
