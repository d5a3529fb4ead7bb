use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mtbdd_core::analysis::{
    self, adversarial_run, bound_general, bound_unit, suggest_bits, suggest_delta, AnalysisError,
    Reference, SweepGrid,
};
use mtbdd_core::mtbdd::{NodeStore, VectorDD};
use mtbdd_core::numerics::{NumericsError, PrecConfig, MAX_BITS, MIN_BITS};
use mtbdd_core::quantum::{parse_circuit, simulate, Family, GenOptions, QuantumError};

/// Caps the number of sweep worker threads.
const WORKERS_ENV: &str = "MTBDD_WORKERS";
const DEFAULT_DELTA: f64 = 0.0;
const DEFAULT_BITS: u32 = 53;
const DENSE_DUMP_MAX_QUBITS: u32 = 16;

#[derive(Parser)]
#[command(name = "mtbdd", version, about = "MTBDD simulation with merged leaves and error analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a circuit file and report node counts (and error with --reference)
    Simulate(SimulateArgs),
    /// Run a grid of generated circuits against the 128-bit reference
    Sweep(SweepArgs),
    /// Evaluate the first-order error bound of one multiplication
    Bound(BoundArgs),
    /// Suggest a merge threshold for an error budget
    Suggest(SuggestArgs),
    /// Run the planted-leaf instance on H^n times the uniform state
    Adversarial(AdversarialArgs),
    /// Write a benchmark circuit file
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Merge threshold [default: 0]
    #[arg(long, value_parser = parse_delta)]
    delta: Option<f64>,
    /// Significand bits [default: 53]
    #[arg(long, value_parser = parse_bits)]
    bits: Option<u32>,
    /// Also run at 128 bits without merging and report the max error
    #[arg(long)]
    reference: bool,
    /// Write the final state: dense text for up to 16 qubits, DOT otherwise or
    /// when the path ends in `.dot`
    #[arg(long)]
    dump_state: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated families: dj, qpe, wstate
    #[arg(long, value_delimiter = ',', required = true)]
    families: Vec<Family>,
    /// Qubit counts as `A..B` (inclusive) or a single number
    #[arg(long, value_parser = parse_range)]
    qubits: RangeInclusive<u32>,
    /// Comma-separated merge thresholds
    #[arg(long, value_delimiter = ',', value_parser = parse_delta, default_value = "0,1e-15,1e-12,1e-9,1e-6,1e-3")]
    deltas: Vec<f64>,
    /// Comma-separated significand widths
    #[arg(long, value_delimiter = ',', value_parser = parse_bits, default_value = "53")]
    bits: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: PathBuf,
    /// Also write the records as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Fill the wall_ms column (makes output run-dependent)
    #[arg(long)]
    timing: bool,
    /// Write DJ's closing Hadamards as z then ry(pi/2)
    #[arg(long)]
    h_as_ry: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_parser = parse_nonneg)]
    eps: f64,
    #[arg(long, value_parser = parse_delta)]
    delta: f64,
    /// Largest matrix entry magnitude; with --cV selects the general bound
    #[arg(long = "cM", requires = "c_v", value_parser = parse_nonneg)]
    c_m: Option<f64>,
    /// Largest vector entry magnitude
    #[arg(long = "cV", requires = "c_m", value_parser = parse_nonneg)]
    c_v: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SuggestArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_parser = parse_nonneg)]
    eps: f64,
    #[arg(long, value_parser = parse_nonneg)]
    allowed_error: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct AdversarialArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_parser = parse_delta)]
    delta: f64,
    #[arg(long, value_parser = parse_bits)]
    bits: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    qubits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    h_as_ry: bool,
    /// Significant digits of decimal angles
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u16).range(1..=200))]
    digits: u16,
    /// Expand Toffoli gates into Clifford+T
    #[arg(long)]
    decompose_toffoli: bool,
}

fn parse_nonneg(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a real number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be finite and non-negative"))
    }
}

fn parse_delta(s: &str) -> Result<f64, String> {
    parse_nonneg(s)
}

fn parse_bits(s: &str) -> Result<u32, String> {
    let b: u32 = s.trim().parse().map_err(|_| format!("`{s}` is not an integer"))?;
    PrecConfig::new(b).map(|c| c.bits()).map_err(|_| {
        format!("significand width must lie in {MIN_BITS}..={MAX_BITS}, got {b}")
    })
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{t}` is not a qubit count"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok(a..=b)
}

/// Failures mapped onto exit codes.
enum CliError {
    /// Bad arguments, unreadable inputs, unparsable circuits: exit 2.
    Usage(String),
    /// Exponent range or non-finite arithmetic: exit 3.
    Numeric(String),
    /// Anything else: exit 4.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

fn classify_numeric(e: Option<&NumericsError>, msg: String) -> CliError {
    match e {
        Some(NumericsError::Overflow | NumericsError::Underflow | NumericsError::NonFinite) => {
            CliError::Numeric(msg)
        }
        Some(NumericsError::InvalidPrecision(_) | NumericsError::InvalidAngle(_)) => {
            CliError::Usage(msg)
        }
        _ => CliError::Internal(msg),
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        let msg = e.to_string();
        match &e {
            AnalysisError::InvalidArgument(_) => CliError::Usage(msg),
            AnalysisError::Quantum(q) if is_input_error(q) => CliError::Usage(msg),
            AnalysisError::Io(_) => CliError::Usage(msg),
            _ => classify_numeric(e.numerics(), msg),
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        let msg = e.to_string();
        if is_input_error(&e) {
            CliError::Usage(msg)
        } else {
            classify_numeric(e.numerics(), msg)
        }
    }
}

impl From<mtbdd_core::mtbdd::DdError> for CliError {
    fn from(e: mtbdd_core::mtbdd::DdError) -> Self {
        QuantumError::from(e).into()
    }
}

fn is_input_error(e: &QuantumError) -> bool {
    !matches!(e, QuantumError::Dd(_) | QuantumError::Numerics(_))
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

/// Fails early when an output file could not be created later.
fn check_output(path: &Path) -> Result<(), CliError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    match parent {
        Some(dir) if !dir.is_dir() => Err(CliError::Usage(format!(
            "{}: directory does not exist",
            dir.display()
        ))),
        _ if path.is_dir() => Err(CliError::Usage(format!("{}: is a directory", path.display()))),
        _ => Ok(()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

/// Shortest round-trip form, in scientific notation outside `[1e-4, 1e6)`.
fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn print_rows(format: Format, rows: &[(&str, String)]) {
    match format {
        Format::Text => {
            for (k, v) in rows {
                println!("{k} {v}");
            }
        }
        Format::Csv => {
            let keys: Vec<&str> = rows.iter().map(|(k, _)| *k).collect();
            let vals: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
            println!("{}", keys.join(","));
            println!("{}", vals.join(","));
        }
        Format::Json => {
            let obj: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(k, v)| {
                    let val = v
                        .parse::<serde_json::Number>()
                        .map(serde_json::Value::Number)
                        .unwrap_or_else(|_| serde_json::Value::String(v.clone()));
                    (k.to_string(), val)
                })
                .collect();
            println!("{}", serde_json::Value::Object(obj));
        }
    }
}

fn dump_state(path: &Path, store: &NodeStore, state: VectorDD) -> Result<(), CliError> {
    let dot = path.extension().is_some_and(|e| e == "dot") || state.n > DENSE_DUMP_MAX_QUBITS;
    let mut w = create(path)?;
    let res = if dot {
        w.write_all(store.to_dot(state.root).as_bytes())
    } else {
        let dense = store.to_dense(state)?;
        dense.iter().enumerate().try_for_each(|(i, x)| writeln!(w, "{i} {} {}", x.re, x.im))
    };
    res.and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), CliError> {
    if let Some(p) = &a.dump_state {
        check_output(p)?;
    }
    let text = fs::read_to_string(&a.circuit).map_err(|e| io_err(&a.circuit, e))?;
    let circuit = parse_circuit(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.circuit.display())))?;
    let delta = a.delta.unwrap_or_else(|| {
        eprintln!("delta not given, using {DEFAULT_DELTA}");
        DEFAULT_DELTA
    });
    let bits = a.bits.unwrap_or_else(|| {
        eprintln!("bits not given, using {DEFAULT_BITS}");
        DEFAULT_BITS
    });
    let cfg = PrecConfig::new(bits).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut store = NodeStore::new(cfg, delta)?;
    let state = simulate(&mut store, &circuit)?;
    let mut rows = vec![
        ("qubits", circuit.n().to_string()),
        ("gates", circuit.gates().len().to_string()),
        ("delta", num(delta)),
        ("bits", bits.to_string()),
        ("final_nodes", store.count_nodes(state.root).to_string()),
        ("peak_nodes", store.peak_nodes().to_string()),
    ];
    if a.reference {
        let reference = Reference::simulate(&circuit)?;
        let (err, idx) =
            analysis::max_distance(&store, state, reference.store(), reference.state())?;
        rows.push(("max_error", num(err)));
        rows.push(("worst_index", idx.to_string()));
    }
    if let Some(p) = &a.dump_state {
        dump_state(p, &store, state)?;
    }
    print_rows(a.format, &rows);
    Ok(())
}

fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV}={v} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<(), CliError> {
    check_output(&a.csv)?;
    if let Some(j) = &a.json {
        check_output(j)?;
    }
    let workers = workers_from_env()?;
    let mut grid = SweepGrid::new(a.families, a.qubits.collect(), a.deltas, a.bits);
    grid.seed = a.seed;
    grid.timing = a.timing;
    grid.h_as_ry = a.h_as_ry;
    let records = analysis::sweep_with_workers(&grid, workers)?;
    analysis::write_csv(&records, create(&a.csv)?)?;
    if let Some(j) = &a.json {
        analysis::write_json(&records, create(j)?)?;
    }
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    eprintln!("{} records written to {} ({failed} failed)", records.len(), a.csv.display());
    Ok(())
}

fn cmd_bound(a: BoundArgs) -> Result<(), CliError> {
    let r = match (a.c_m, a.c_v) {
        (Some(cm), Some(cv)) => bound_general(a.n, a.eps, a.delta, cm, cv)?,
        _ => bound_unit(a.n, a.eps, a.delta)?,
    };
    match a.format {
        Format::Json => println!("{}", serde_json::to_string(&r).map_err(|e| CliError::Internal(e.to_string()))?),
        Format::Csv => {
            println!("n,eps,delta,c,term_fp,term_merge,total");
            println!("{},{},{},{},{},{},{}", r.n, r.eps, r.delta, r.c, r.term_fp, r.term_merge, r.total);
        }
        Format::Text => {
            println!("n | error 1: (n+1) eps C | error 2: delta 2^(n+1)");
            println!("{} | {:.3e} | {:.3e}", r.n, r.term_fp, r.term_merge);
            println!("total {:.3e} (C = {:.3e})", r.total, r.c);
            println!(
                "not included: O(eps^2) ~ {:.1e}, O(delta eps 2^n) ~ {:.1e}",
                r.order_eps2, r.order_delta_eps
            );
            if let Some(b) = r.suggested_bits() {
                println!("bits resolving delta: {b}");
            }
        }
    }
    Ok(())
}

fn cmd_suggest(a: SuggestArgs) -> Result<(), CliError> {
    let delta = suggest_delta(a.n, a.eps, a.allowed_error)?;
    let bits = suggest_bits(delta).ok();
    match a.format {
        Format::Text => {
            println!("n | delta s.t. error <= {:e}", a.allowed_error);
            println!("{} | {:.3e}", a.n, delta);
            if let Some(b) = bits {
                println!("bits resolving delta: {b}");
            }
        }
        Format::Csv => {
            println!("n,eps,allowed_error,delta,bits");
            let b = bits.map(|b| b.to_string()).unwrap_or_default();
            println!("{},{},{},{},{b}", a.n, a.eps, a.allowed_error, delta);
        }
        Format::Json => println!(
            "{}",
            json!({"n": a.n, "eps": a.eps, "allowed_error": a.allowed_error, "delta": delta, "bits": bits})
        ),
    }
    Ok(())
}

fn cmd_adversarial(a: AdversarialArgs) -> Result<(), CliError> {
    let r = adversarial_run(a.n, a.delta, a.bits)?;
    print_rows(
        a.format,
        &[
            ("n", a.n.to_string()),
            ("delta", num(a.delta)),
            ("bits", a.bits.to_string()),
            ("error", num(r.report.max_error)),
            ("delta_prime", num(r.delta_prime)),
            ("predicted", num(r.predicted)),
            ("final_nodes", r.report.final_nodes.to_string()),
        ],
    );
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<(), CliError> {
    check_output(&a.out)?;
    let opts = GenOptions {
        seed: a.seed,
        h_as_ry: a.h_as_ry,
        angle_digits: a.digits as usize,
    };
    let mut circuit = a.family.generate(a.qubits, &opts)?;
    if a.decompose_toffoli {
        circuit = circuit.decompose_toffoli();
    }
    let mut w = create(&a.out)?;
    write!(w, "// {} on {} qubits, seed {}\n{circuit}", a.family, a.qubits, a.seed)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&a.out, e))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Suggest(a) => cmd_suggest(a),
        Command::Adversarial(a) => cmd_adversarial(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
