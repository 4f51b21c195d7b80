//! Command-line front end: build and serialize indexes, run queries, report
//! statistics, and benchmark query latency.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors (I/O,
//! corrupt files, out-of-range arguments).

use std::alloc::{GlobalAlloc, Layout, System};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pfpds::{oracle_build, oracle_lce, PfpIndex, Text, TriggerConfig};

/// Tracks live and peak heap usage so `build` can report an allocator-level
/// peak-memory estimate.
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

fn peak_allocated() -> usize {
    PEAK.load(Ordering::Relaxed)
}

#[derive(Parser)]
#[command(name = "pfp", version, about = "Prefix-free parsing text index")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a text and write the serialized index.
    Build(BuildArgs),
    /// Run queries against an index file.
    Query(QueryArgs),
    /// Report index statistics.
    Stats(StatsArgs),
    /// Measure query latency with random arguments.
    Bench(BenchArgs),
    /// Answer queries by brute force, for debugging (small inputs only).
    #[command(hide = true)]
    Oracle(OracleArgs),
}

#[derive(Args)]
struct ParseFlags {
    /// Trigger window length.
    #[arg(short, long, default_value_t = pfpds::DEFAULT_W)]
    w: usize,
    /// Hash modulus: windows whose hash is 0 mod p are triggers.
    #[arg(short, long, default_value_t = pfpds::DEFAULT_P)]
    p: u64,
    /// Comma-separated explicit trigger strings (overrides -p).
    #[arg(long, value_delimiter = ',')]
    triggers: Option<Vec<String>>,
    /// Shift all input bytes up by 3 to free the reserved range 0x00-0x02.
    #[arg(long)]
    remap: bool,
    /// Treat the input as FASTA: drop header lines and line breaks.
    #[arg(long)]
    fasta: bool,
}

#[derive(Args)]
struct BuildArgs {
    /// Input text file.
    #[arg(required_unless_present = "import_dict", conflicts_with_all = ["import_dict", "import_parse"])]
    input: Option<PathBuf>,
    /// Output index file.
    #[arg(short, long)]
    output: PathBuf,
    /// Build from an exported dictionary file instead of raw text.
    #[arg(long, requires = "import_parse")]
    import_dict: Option<PathBuf>,
    /// Build from an exported parse file instead of raw text.
    #[arg(long, requires = "import_dict")]
    import_parse: Option<PathBuf>,
    #[command(flatten)]
    parse: ParseFlags,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryKind {
    Sa,
    Isa,
    Lcp,
    Lce,
    Bwt,
    Access,
    Rmq,
}

impl QueryKind {
    fn arity(self) -> usize {
        match self {
            QueryKind::Sa
            | QueryKind::Isa
            | QueryKind::Lcp
            | QueryKind::Bwt
            | QueryKind::Access => 1,
            QueryKind::Lce | QueryKind::Rmq => 2,
        }
    }
}

#[derive(Args)]
struct QueryArgs {
    /// Index file produced by `build`.
    index: PathBuf,
    /// Query kind.
    kind: QueryKind,
    /// Positions (or position pairs for lce/rmq); ranges like 0..28 expand.
    args: Vec<String>,
    /// Read whitespace-separated argument tuples from a file, one per line.
    #[arg(long, conflicts_with = "args")]
    batch: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Index file produced by `build`.
    index: PathBuf,
    /// Emit the report as CSV instead of aligned text.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Index file produced by `build`.
    index: PathBuf,
    /// Query kind to benchmark.
    kind: QueryKind,
    /// Number of random queries.
    #[arg(default_value_t = 10_000)]
    count: usize,
    /// Seed for the query-argument generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Emit the summary as CSV instead of aligned text.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Input text file.
    input: PathBuf,
    /// Query kind (rmq is index-only).
    kind: QueryKind,
    /// Positions (or position pairs for lce); ranges like 0..28 expand.
    args: Vec<String>,
    #[command(flatten)]
    parse: ParseFlags,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is a
            // usage error (exit 1, not clap's default 2).
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Query(args) => cmd_query(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn trigger_config(flags: &ParseFlags) -> Result<TriggerConfig> {
    let cfg = match &flags.triggers {
        Some(list) => {
            if flags.remap {
                bail!("--triggers cannot be combined with --remap: trigger bytes would no longer match the shifted text");
            }
            TriggerConfig::explicit(flags.w, list.iter().map(|t| t.as_bytes().to_vec()))?
        }
        None => TriggerConfig::hash(flags.w, flags.p)?,
    };
    Ok(cfg)
}

fn read_input(path: &Path, fasta: bool) -> Result<Vec<u8>> {
    let mut raw =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if fasta {
        let mut out = Vec::with_capacity(raw.len());
        for line in raw.split(|&b| b == b'\n') {
            let line = line.strip_suffix(b"\r").unwrap_or(line);
            if line.first() == Some(&b'>') {
                continue;
            }
            out.extend_from_slice(line);
        }
        return Ok(out);
    }
    // Plain input: a single trailing newline is an artifact of text editors,
    // not part of the text.
    if raw.last() == Some(&b'\n') {
        raw.pop();
        if raw.last() == Some(&b'\r') {
            raw.pop();
        }
    }
    Ok(raw)
}

fn load_index(path: &Path) -> Result<PfpIndex> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(pfpds::deserialize(&bytes)?)
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let started = Instant::now();
    let index = if let (Some(dict_path), Some(parse_path)) =
        (&args.import_dict, &args.import_parse)
    {
        let dict_bytes = std::fs::read(dict_path)
            .with_context(|| format!("reading {}", dict_path.display()))?;
        let parse_bytes = std::fs::read(parse_path)
            .with_context(|| format!("reading {}", parse_path.display()))?;
        let (dict, parse) =
            pfpds::import_dict_and_parse(&dict_bytes, &parse_bytes, args.parse.w)?;
        pfpds::build_index(dict, parse, args.parse.w)?
    } else {
        let input = args.input.as_ref().expect("clap enforces input xor import");
        let raw = read_input(input, args.parse.fasta)?;
        let text = pfpds::prepare_text(&raw, args.parse.w, args.parse.remap)?;
        let cfg = trigger_config(&args.parse)?;
        PfpIndex::build(&text, &cfg)?
    };
    let serialized = pfpds::serialize(&index);
    std::fs::write(&args.output, &serialized)
        .with_context(|| format!("writing {}", args.output.display()))?;
    eprintln!(
        "built index: n={} m={} dict_phrases={} file={} bytes, {:.2}s wall, peak memory ~{} bytes",
        index.n(),
        index.parse().len(),
        index.dict().len(),
        serialized.len(),
        started.elapsed().as_secs_f64(),
        peak_allocated(),
    );
    Ok(())
}

/// Expands argument words (numbers or half-open ranges `a..b`) into a flat
/// list of positions.
fn expand_args(words: &[String]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for word in words {
        if let Some((a, b)) = word.split_once("..") {
            let a: usize = a.parse().map_err(|_| anyhow!("bad range start {a:?}"))?;
            let b: usize = b.parse().map_err(|_| anyhow!("bad range end {b:?}"))?;
            if a > b {
                bail!("range {word} is reversed");
            }
            out.extend(a..b);
        } else {
            out.push(word.parse().map_err(|_| anyhow!("bad position {word:?}"))?);
        }
    }
    Ok(out)
}

fn gather_args(words: &[String], batch: Option<&Path>, arity: usize) -> Result<Vec<usize>> {
    let positions = match batch {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            expand_args(&body.split_whitespace().map(str::to_owned).collect::<Vec<_>>())?
        }
        None => expand_args(words)?,
    };
    if positions.is_empty() {
        bail!("no query arguments given");
    }
    if positions.len() % arity != 0 {
        bail!("this query kind takes arguments in groups of {arity}");
    }
    Ok(positions)
}

fn run_query(index: &PfpIndex, kind: QueryKind, args: &[usize]) -> Result<String> {
    Ok(match kind {
        QueryKind::Sa => index.sa(args[0])?.to_string(),
        QueryKind::Isa => index.isa(args[0])?.to_string(),
        QueryKind::Lcp => index.lcp(args[0])?.to_string(),
        QueryKind::Lce => index.lce(args[0], args[1])?.to_string(),
        QueryKind::Rmq => index.rmq_lcp(args[0], args[1])?.to_string(),
        QueryKind::Bwt => format_byte(index.bwt(args[0])?),
        QueryKind::Access => format_byte(index.access(args[0])?),
    })
}

/// Prints printable bytes as characters and everything else (including the
/// sentinel) as \xNN escapes.
fn format_byte(b: u8) -> String {
    if b.is_ascii_graphic() || b == b' ' {
        (b as char).to_string()
    } else {
        format!("\\x{b:02x}")
    }
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let index = load_index(&args.index)?;
    let arity = args.kind.arity();
    let positions = gather_args(&args.args, args.batch.as_deref(), arity)?;
    let mut out = String::new();
    for group in positions.chunks(arity) {
        writeln!(out, "{}", run_query(&index, args.kind, group)?).unwrap();
    }
    print!("{out}");
    Ok(())
}

struct StatsReport {
    n: usize,
    sigma: usize,
    m: usize,
    dict_phrases: usize,
    dict_total_len: usize,
    r: usize,
    component_sizes: Vec<(&'static str, u64)>,
}

fn stats_report(index: &PfpIndex) -> Result<StatsReport> {
    let mut r = 0usize;
    let mut prev = None;
    for i in 0..index.n() {
        let b = index.bwt(i)?;
        if prev != Some(b) {
            r += 1;
            prev = Some(b);
        }
    }
    let (_, component_sizes) = pfpds::serialize_with_sections(index);
    Ok(StatsReport {
        n: index.n(),
        sigma: pfpds::format::alphabet_size(index.dict()),
        m: index.parse().len(),
        dict_phrases: index.dict().len(),
        dict_total_len: index.dict().total_len(),
        r,
        component_sizes,
    })
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let index = load_index(&args.index)?;
    let s = stats_report(&index)?;
    let n_over_r = s.n as f64 / s.r as f64;
    if args.csv {
        println!("field,value");
        println!("n,{}", s.n);
        println!("sigma,{}", s.sigma);
        println!("m,{}", s.m);
        println!("dict_phrases,{}", s.dict_phrases);
        println!("dict_total_len,{}", s.dict_total_len);
        println!("r,{}", s.r);
        println!("n_over_r,{n_over_r:.3}");
        for (name, size) in &s.component_sizes {
            println!("size_{name},{size}");
        }
    } else {
        println!("n               {}", s.n);
        println!("sigma           {}", s.sigma);
        println!("m               {}", s.m);
        println!("dict_phrases    {}", s.dict_phrases);
        println!("dict_total_len  {}", s.dict_total_len);
        println!("r               {}", s.r);
        println!("n_over_r        {n_over_r:.3}");
        for (name, size) in &s.component_sizes {
            println!("size[{name:<8}] {size} bytes");
        }
    }
    Ok(())
}

/// SplitMix64: a small seeded generator that is deterministic across
/// platforms, which is all the benchmark needs.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, bound: usize) -> usize {
        (self.next() % bound as u64) as usize
    }
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let index = load_index(&args.index)?;
    let n = index.n();
    let arity = args.kind.arity();
    let mut rng = SplitMix64(args.seed);
    let mut queries = Vec::with_capacity(args.count);
    for _ in 0..args.count {
        let mut group = [0usize; 2];
        for slot in group.iter_mut().take(arity) {
            *slot = match args.kind {
                // lcp(0) is defined but rmq needs l >= 1; keep both in range.
                QueryKind::Lcp | QueryKind::Rmq => 1 + rng.below(n - 1),
                _ => rng.below(n),
            };
        }
        if args.kind == QueryKind::Rmq && group[0] > group[1] {
            group.swap(0, 1);
        }
        queries.push(group);
    }
    let mut latencies = Vec::with_capacity(args.count);
    let mut sink = 0usize;
    for group in &queries {
        let started = Instant::now();
        let v = match args.kind {
            QueryKind::Sa => index.sa(group[0])?,
            QueryKind::Isa => index.isa(group[0])?,
            QueryKind::Lcp => index.lcp(group[0])?,
            QueryKind::Lce => index.lce(group[0], group[1])?,
            QueryKind::Rmq => index.rmq_lcp(group[0], group[1])?,
            QueryKind::Bwt => index.bwt(group[0])? as usize,
            QueryKind::Access => index.access(group[0])? as usize,
        };
        latencies.push(started.elapsed().as_nanos() as u64);
        sink = sink.wrapping_add(v);
    }
    std::hint::black_box(sink);
    latencies.sort_unstable();
    let mean = latencies.iter().sum::<u64>() as f64 / latencies.len() as f64;
    let median = latencies[latencies.len() / 2];
    let p99 = latencies[((latencies.len() * 99) / 100).min(latencies.len() - 1)];
    if args.csv {
        println!("queries,mean_ns,median_ns,p99_ns");
        println!("{},{mean:.0},{median},{p99}", latencies.len());
    } else {
        println!("queries  {}", latencies.len());
        println!("mean     {:.2} us", mean / 1000.0);
        println!("median   {:.2} us", median as f64 / 1000.0);
        println!("p99      {:.2} us", p99 as f64 / 1000.0);
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let raw = read_input(&args.input, args.parse.fasta)?;
    let text: Text = pfpds::prepare_text(&raw, args.parse.w, args.parse.remap)?;
    let oracle = oracle_build(&text)?;
    let arity = args.kind.arity();
    let positions = gather_args(&args.args, None, arity)?;
    let n = text.n();
    for group in positions.chunks(arity) {
        let check = |i: usize| -> Result<usize> {
            if i >= n {
                bail!("position {i} out of range (n = {n})");
            }
            Ok(i)
        };
        let line = match args.kind {
            QueryKind::Sa => oracle.sa[check(group[0])?].to_string(),
            QueryKind::Isa => oracle.isa[check(group[0])?].to_string(),
            QueryKind::Lcp => oracle.lcp[check(group[0])?].to_string(),
            QueryKind::Bwt => format_byte(oracle.bwt[check(group[0])?]),
            QueryKind::Access => format_byte(text.bytes()[check(group[0])?]),
            QueryKind::Lce => oracle_lce(&text, group[0], group[1])?.to_string(),
            QueryKind::Rmq => bail!("rmq is answered by the index, not the oracle"),
        };
        println!("{line}");
    }
    Ok(())
}
