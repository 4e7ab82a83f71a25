//! `stabsketch`: compress states into stabilizer sketches and estimate observables.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use stabsketch::estimator::estimate;
use stabsketch::experiments::{
    fig1, histogram, histogram_csv, memory_savings, scaling_sweep, sweep_csv, HISTOGRAM_BINS,
};
use stabsketch::io::{
    decode_compressed, decode_header, decode_observable, decode_state, encode_compressed,
    read_state_csv,
};
use stabsketch::moments::{design_trace_identities, first_moment_mc, second_moment_mc};
use stabsketch::moments::{MAX_FIRST_MOMENT_QUBITS, MAX_SECOND_MOMENT_QUBITS};
use stabsketch::sketch::{compress, CompressParams, DEFAULT_PRECISION_BITS};
use stabsketch::statevector::{Observable, StabilizerProjectorObservable};
use stabsketch::vsp::{build_reduction, random_matching_instance, run_protocol};
use stabsketch::GateCircuit;

#[derive(Parser, Debug)]
#[command(name = "stabsketch", version, about = "Stabilizer-sketch compression of quantum states")]
struct Cli {
    /// Seed for all randomness (default: drawn from the OS and echoed in the output).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress a state file (SVEC, or CSV with --n) into an STSK file.
    Compress(CompressArgs),
    /// Estimate <psi|M|psi> from an STSK file.
    Estimate(EstimateArgs),
    /// Monte-Carlo moments of random stabilizer code projectors.
    Moments(MomentsArgs),
    /// Vector-in-subspace protocol over random partial-matching instances.
    Vsp(VspArgs),
    /// Symmetric-subspace histogram experiment.
    Fig1(Fig1Args),
    /// Closed-form error and memory savings.
    Savings(SavingsArgs),
    /// Serialized size against qubit count.
    Sweep(SweepArgs),
    /// Print the header of an STSK file.
    Info(InfoArgs),
}

#[derive(Args, Debug)]
struct CompressArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    rank: u64,
    #[arg(long)]
    out: PathBuf,
    /// Qubit count, required for CSV input.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u8,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    compressed: PathBuf,
    /// Dense observable in OBSM format.
    #[arg(long, conflicts_with = "stabilizer_projector", required_unless_present = "stabilizer_projector")]
    observable: Option<PathBuf>,
    /// Circuit file `C` for the projector `C^dag (|0><0|^m (x) I) C`.
    #[arg(long, requires = "m_qubits")]
    stabilizer_projector: Option<PathBuf>,
    #[arg(long)]
    m_qubits: Option<usize>,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Args, Debug)]
struct VspArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    b: u8,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.25)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Write the generated instances as JSON.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Fig1Args {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![7, 8, 9])]
    k: Vec<usize>,
}

#[derive(Args, Debug)]
struct SavingsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Rank bound, as a number or `2^e`.
    #[arg(long, value_parser = parse_rank)]
    rank: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InfoArgs {
    file: PathBuf,
}

fn parse_rank(s: &str) -> Result<f64, String> {
    let value = match s.strip_prefix("2^") {
        Some(e) => 2f64.powi(e.parse::<i32>().map_err(|e| e.to_string())?),
        None => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if value >= 1.0 {
        Ok(value)
    } else {
        Err(format!("rank must be at least 1, got {s}"))
    }
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Data(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

impl From<stabsketch::Error> for Failure {
    fn from(e: stabsketch::Error) -> Self {
        match e {
            stabsketch::Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let seed = cli
        .seed
        .unwrap_or_else(|| rand::rngs::StdRng::from_os_rng().random());
    match cli.command {
        Command::Compress(a) => {
            let raw = read(&a.input)?;
            let state = if a.input.extension().is_some_and(|e| e == "csv") {
                let n = a.n.ok_or_else(|| Failure::Usage("--n is required for CSV input".into()))?;
                let text = String::from_utf8(raw).map_err(|e| Failure::Data(e.to_string()))?;
                read_state_csv(&text, n)?
            } else {
                decode_state(&raw)?
            };
            let params = CompressParams {
                epsilon: a.epsilon,
                p: a.p,
                rank: a.rank,
                precision_bits: a.precision_bits,
            };
            let d = compress(&state, &params, seed)?;
            let bytes = encode_compressed(&d);
            write(&a.out, &bytes)?;
            print_json(&json!({
                "out": a.out.display().to_string(),
                "n": d.num_qubits(),
                "k": d.k(),
                "L": d.l(),
                "bytes": bytes.len(),
                "seed": seed,
            }));
        }
        Command::Estimate(a) => {
            let d = decode_compressed(&read(&a.compressed)?)?;
            let obs = match (a.observable, a.stabilizer_projector) {
                (Some(path), _) => Observable::Dense(decode_observable(&read(&path)?)?),
                (None, Some(path)) => {
                    let text = String::from_utf8(read(&path)?).map_err(|e| Failure::Data(e.to_string()))?;
                    let circuit = GateCircuit::from_text(&text, Some(d.num_qubits()))?;
                    let m = a.m_qubits.expect("required by clap");
                    Observable::StabilizerProjector(StabilizerProjectorObservable::from_circuit(circuit, m)?)
                }
                (None, None) => unreachable!("clap requires one observable"),
            };
            print_json(&to_value(&estimate(&d, &obs)?));
        }
        Command::Moments(a) => {
            let first = if a.n <= MAX_FIRST_MOMENT_QUBITS {
                first_moment_mc(a.n, a.k, a.samples, seed)?.max_dev_first
            } else {
                None
            };
            let mut report = if a.n <= MAX_SECOND_MOMENT_QUBITS {
                second_moment_mc(a.n, a.k, a.samples, seed)?
            } else {
                first_moment_mc(a.n, a.k, a.samples, seed)?
            };
            report.max_dev_first = first;
            let mut v = to_value(&report);
            v["seed"] = json!(seed);
            v["trace_identities"] = to_value(&design_trace_identities(a.n, a.k)?);
            print_json(&v);
        }
        Command::Vsp(a) => {
            let b = a.b == 1;
            let mut instances = Vec::with_capacity(a.trials);
            let mut per_trial = Vec::with_capacity(a.trials);
            for t in 0..a.trials {
                let mut rng = stabsketch::sketch::sketch_rng(seed, 2 * t as u64);
                let inst = random_matching_instance(a.n, b, &mut rng)?;
                let v = build_reduction(&inst)?;
                let out = run_protocol(&v, a.epsilon, a.p, seed.wrapping_add(2 * t as u64 + 1))?;
                per_trial.push(json!({
                    "bit": u8::from(out.bit),
                    "estimate": out.estimate,
                    "truth": v.truth,
                    "bytes": out.bytes,
                }));
                instances.push(inst);
            }
            let successes = per_trial.iter().filter(|t| t["bit"] == json!(a.b)).count();
            let mean_bytes =
                per_trial.iter().map(|t| t["bytes"].as_f64().unwrap_or(0.0)).sum::<f64>() / a.trials.max(1) as f64;
            if let Some(path) = a.export {
                write(&path, serde_json::to_string_pretty(&instances).expect("serializable").as_bytes())?;
            }
            print_json(&json!({
                "success_rate": successes as f64 / a.trials.max(1) as f64,
                "mean_bytes": mean_bytes,
                "seed": seed,
                "per_trial": per_trial,
            }));
        }
        Command::Fig1(a) => {
            let report = fig1(a.trials, a.n, &a.k, seed)?;
            fs::create_dir_all(&a.out).map_err(|e| Failure::Data(format!("{}: {e}", a.out.display())))?;
            let mut samples_csv = String::from("k,trial,F\n");
            let mut summary = Vec::new();
            for s in &report.series {
                for (t, f) in s.samples.iter().enumerate() {
                    samples_csv.push_str(&format!("{},{t},{f}\n", s.k));
                }
                let hist = histogram(&s.samples, HISTOGRAM_BINS);
                write(&a.out.join(format!("fig1_hist_k{}.csv", s.k)), histogram_csv(&hist).as_bytes())?;
                summary.push(json!({
                    "k": s.k,
                    "sample_mean": s.sample_mean,
                    "sample_std": s.sample_std,
                    "bound_std": s.bound_std,
                    "bound_std_frobenius": s.bound_std_frobenius,
                }));
            }
            write(&a.out.join("fig1_samples.csv"), samples_csv.as_bytes())?;
            let out = json!({
                "n": report.n,
                "rank": report.rank,
                "trials": report.trials,
                "seed": report.seed,
                "expectation": report.expectation,
                "series": summary,
            });
            write(&a.out.join("fig1_summary.json"), serde_json::to_string_pretty(&out).expect("serializable").as_bytes())?;
            print_json(&out);
        }
        Command::Savings(a) => {
            print_json(&to_value(&memory_savings(a.n, a.k, a.rank, 1.0)?));
        }
        Command::Sweep(a) => {
            let report = scaling_sweep(a.n_min, a.n_max, a.epsilon, a.p, seed)?;
            if let Some(path) = a.out {
                write(&path, sweep_csv(&report).as_bytes())?;
            }
            let mut v = to_value(&report);
            v["seed"] = json!(seed);
            print_json(&v);
        }
        Command::Info(a) => {
            let raw = read(&a.file)?;
            let h = decode_header(&raw)?;
            if cli.json {
                let mut v = to_value(&h);
                v["bytes"] = json!(raw.len());
                print_json(&v);
            } else {
                println!("n={}", h.n);
                println!("k={}", h.k);
                println!("L={}", h.l);
                println!("epsilon={}", h.epsilon);
                println!("p={}", h.p);
                println!("precision_bits={}", h.precision_bits);
                println!("seed={}", h.seed);
                println!("bytes={}", raw.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(match f {
                Failure::Usage(_) => 1,
                Failure::Data(_) => 2,
            })
        }
    }
}
