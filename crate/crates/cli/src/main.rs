use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use monofind::exact::{distance_to_free, greedy_disjoint_family, lis_length, verify_witness};
use monofind::generators::{generate, GenError, InstanceSpec, Style};
use monofind::harness::{
    estimate_success, scaling_experiment, write_jsonl, write_summary_csv, HarnessError, ScalingConfig,
    SuccessConfig, TesterParams,
};
use monofind::io::{load_sequence, save_sequence};
use monofind::tester::{find_monotone, AlgorithmConstants, TesterError, TrialRng};
use monofind::{IndexInterval, PatternWitness, SequenceView, ValueRange};

#[derive(Parser)]
#[command(name = "monofind", version, about = "Find length-k increasing subsequences with few queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a certified instance and its `.cert.json` sidecar.
    Gen(GenArgs),
    /// Run the randomized search on a sequence file and print the outcome as JSON.
    Find(FindArgs),
    /// Check a witness file against a sequence.
    Verify(VerifyArgs),
    /// Exact LIS length, distance to pattern-free and greedy family size.
    Oracle(OracleArgs),
    /// Success rate over seeded trials on a generated instance.
    Bench(BenchArgs),
    /// Mean queries across instance sizes with a fit against log2 n.
    Scaling(ScalingArgs),
    /// Test whether the longest increasing subsequence exceeds k.
    LisTest(FindArgs),
}

#[derive(Args)]
struct Search {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TOML or JSON file overriding algorithm constants.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    style: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output sequence file (`.txt` or `.f64`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FindArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    search: Search,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON file holding an index array or an object with a `witness` field.
    #[arg(long)]
    witness: PathBuf,
    /// Also require the witness to have exactly this length.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    style: String,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    search: Search,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
    /// Write `<out>.jsonl` (per-trial records) and `<out>.csv` (summary).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave wall-clock times out of the records.
    #[arg(long)]
    no_wall_time: bool,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, default_value = "blocks")]
    style: String,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[command(flatten)]
    search: Search,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_wall_time: bool,
}

enum Failure {
    /// Bad flags, unreadable or malformed input.
    Usage(anyhow::Error),
    /// A result that should be impossible, or a witness that does not check out.
    Invariant(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn tester_failure(e: TesterError) -> Failure {
    match e {
        TesterError::InvalidParameter(_) | TesterError::Config(_) | TesterError::View(_) => Failure::Usage(e.into()),
        _ => Failure::Invariant(e.into()),
    }
}

fn harness_failure(e: HarnessError) -> Failure {
    match e {
        HarnessError::Tester(t) => tester_failure(t),
        HarnessError::OneSidedViolation { .. } | HarnessError::Generator(GenError::CertificationFailed(_)) => {
            Failure::Invariant(e.into())
        }
        _ => Failure::Usage(e.into()),
    }
}

fn constants(path: &Option<PathBuf>) -> Result<AlgorithmConstants, Failure> {
    match path {
        Some(p) => AlgorithmConstants::load(p).map_err(tester_failure),
        None => Ok(AlgorithmConstants::default()),
    }
}

fn load(path: &Path) -> Result<Vec<f64>, Failure> {
    let v = load_sequence(path).with_context(|| format!("reading {}", path.display()))?;
    if v.is_empty() {
        return Err(Failure::Usage(anyhow!("{} holds no values", path.display())));
    }
    Ok(v)
}

fn style(s: &str) -> Result<Style, Failure> {
    s.parse().map_err(|e: GenError| Failure::Usage(e.into()))
}

fn sidecar(out: &Path) -> PathBuf {
    out.with_extension("cert.json")
}

fn gen(a: &GenArgs) -> Result<(), Failure> {
    let spec = InstanceSpec { style: style(&a.style)?, n: a.n, k: a.k, eps: a.eps, seed: a.seed };
    let inst = generate(&spec).map_err(|e| match e {
        GenError::CertificationFailed(_) => Failure::Invariant(e.into()),
        _ => Failure::Usage(e.into()),
    })?;
    save_sequence(&a.out, &inst.values).with_context(|| format!("writing {}", a.out.display()))?;
    let cert = sidecar(&a.out);
    let json = serde_json::to_string_pretty(&inst).context("serializing certificate")?;
    fs::write(&cert, json + "\n").with_context(|| format!("writing {}", cert.display()))?;
    println!("{}", cert.display());
    Ok(())
}

fn run_find(a: &FindArgs, k: usize) -> Result<monofind::RunOutcome, Failure> {
    let values = load(&a.input)?;
    let consts = constants(&a.search.config)?;
    let view = SequenceView::new(&values).context("building view")?;
    let mut rng = TrialRng::seeded(a.search.seed);
    find_monotone(&view, k, a.search.eps, a.search.delta, &consts, &mut rng).map_err(tester_failure)
}

fn find(a: &FindArgs) -> Result<(), Failure> {
    let out = run_find(a, a.search.k)?;
    println!("{}", serde_json::to_string(&out).context("serializing outcome")?);
    Ok(())
}

fn lis_test(a: &FindArgs) -> Result<(), Failure> {
    let out = run_find(a, a.search.k + 1)?;
    match out.witness {
        Some(w) => println!("LIS > {}, witness {:?}", a.search.k, w.indices),
        None => println!("LIS ≤ {} plausible", a.search.k),
    }
    Ok(())
}

fn read_witness(path: &Path) -> Result<PatternWitness, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let inner = match v {
        serde_json::Value::Object(mut m) => m.remove("witness").unwrap_or(serde_json::Value::Null),
        other => other,
    };
    serde_json::from_value(inner)
        .map_err(|_| Failure::Usage(anyhow!("{}: expected an index array or a `witness` field", path.display())))
}

fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let values = load(&a.input)?;
    let w = read_witness(&a.witness)?;
    let full = IndexInterval::full(values.len()).context("empty sequence")?;
    let length_ok = a.k.is_none_or(|k| w.len() == k);
    let valid = length_ok && verify_witness(&values, &w, full, &ValueRange::full());
    println!("{}", serde_json::json!({ "valid": valid, "length": w.len() }));
    if valid {
        Ok(())
    } else {
        Err(Failure::Invariant(anyhow!("witness {:?} is not an increasing subsequence", w.indices)))
    }
}

fn oracle(a: &OracleArgs) -> Result<(), Failure> {
    if a.k < 2 {
        return Err(Failure::Usage(anyhow!("oracle needs k >= 2")));
    }
    let values = load(&a.input)?;
    let report = serde_json::json!({
        "n": values.len(),
        "k": a.k,
        "lis_length": lis_length(&values),
        "distance_to_free": distance_to_free(&values, a.k),
        "greedy_family_size": greedy_disjoint_family(&values, a.k).len(),
    });
    println!("{report}");
    Ok(())
}

fn emit(
    out: &Option<PathBuf>,
    records: &[monofind::harness::TrialRecord],
    summaries: &[monofind::harness::SummaryRow],
    with_time: bool,
) -> Result<(), Failure> {
    if let Some(prefix) = out {
        let jsonl = prefix.with_extension("jsonl");
        let file = fs::File::create(&jsonl).with_context(|| format!("creating {}", jsonl.display()))?;
        write_jsonl(io::BufWriter::new(file), records, with_time).map_err(harness_failure)?;
        let csv_path = prefix.with_extension("csv");
        let file = fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
        write_summary_csv(file, summaries).map_err(harness_failure)?;
    }
    write_summary_csv(io::stdout().lock(), summaries).map_err(harness_failure)
}

fn bench(a: &BenchArgs) -> Result<(), Failure> {
    let s = &a.search;
    let cfg = SuccessConfig {
        instance: InstanceSpec { style: style(&a.style)?, n: a.n, k: s.k, eps: s.eps, seed: a.instance_seed },
        params: TesterParams { k: s.k, eps: s.eps, delta: s.delta },
        trials: a.trials,
        base_seed: s.seed,
        constants: constants(&s.config)?,
    };
    let report = estimate_success(&cfg).map_err(harness_failure)?;
    emit(&a.out, &report.records, &[report.summary()], !a.no_wall_time)
}

fn scaling(a: &ScalingArgs) -> Result<(), Failure> {
    let s = &a.search;
    let cfg = ScalingConfig {
        ns: a.n.clone(),
        style: style(&a.style)?,
        params: TesterParams { k: s.k, eps: s.eps, delta: s.delta },
        trials: a.trials,
        base_seed: s.seed,
        instance_seed: a.instance_seed,
        constants: constants(&s.config)?,
    };
    let report = scaling_experiment(&cfg).map_err(harness_failure)?;
    emit(&a.out, &report.records, &report.summaries, !a.no_wall_time)?;
    let fit = serde_json::to_string(&report.fit).context("serializing fit")?;
    writeln!(io::stdout(), "{fit}").context("writing fit")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Find(a) => find(a),
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
        Command::Scaling(a) => scaling(a),
        Command::LisTest(a) => lis_test(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
