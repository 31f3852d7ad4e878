//! `linkloop`: generate DPAH networks, run recommendation feedback loops,
//! sweeps, metrics and plot extracts.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 runtime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::json;

use linkloop::dpah::{generate, DpahParams};
use linkloop::embedding::N2VParams;
use linkloop::graph::{read_edge_list, write_edge_list};
use linkloop::harness::{self, extract, Figure, RecordTable, RunInfo, SweepSpec};
use linkloop::metrics::MetricsSnapshot;
use linkloop::recommenders::{RecommenderKind, ZeroScorePolicy, DEFAULT_COT_SIZE};
use linkloop::simulation::{self, SimulationConfig, DEFAULT_STEPS};
use linkloop::{Error, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "linkloop", about = "Link-recommendation feedback loops on bi-populated networks")]
struct Cli {
    /// Experiment seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for outputs whose path is not given explicitly.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (sweep only).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a DPAH network as an edge list.
    Generate(GenerateArgs),
    /// Run the feedback loop on a stored network.
    Simulate(SimulateArgs),
    /// Run a homophily / minority-size sweep.
    Sweep(SweepArgs),
    /// Compute structural and fairness metrics of a stored network.
    Metrics(MetricsArgs),
    /// Reshape records into a plot-ready table.
    Extract(ExtractArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Minority fraction.
    #[arg(long, default_value_t = 0.3)]
    fm: f64,
    /// Minority homophily h_mm.
    #[arg(long, default_value_t = 0.5)]
    hmm: f64,
    /// Majority homophily h_MM.
    #[arg(long = "hmm-maj", default_value_t = 0.5)]
    hmm_maj: f64,
    /// Activity exponent for both groups.
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    /// Minority activity exponent (overrides --gamma).
    #[arg(long)]
    gamma_m: Option<f64>,
    /// Majority activity exponent (overrides --gamma).
    #[arg(long)]
    gamma_maj: Option<f64>,
    #[arg(long, default_value_t = 0.03)]
    density: f64,
    /// Output edge list [default: <out-dir>/network.edges].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Edge list to start from.
    #[arg(long)]
    input: PathBuf,
    /// One of ppr, wtf, 2h, cf, n2v.
    #[arg(long)]
    recommender: String,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Damping factor for ppr and wtf.
    #[arg(long, default_value_t = linkloop::pagerank::DEFAULT_ALPHA)]
    alpha: f64,
    /// Circle-of-trust size for wtf.
    #[arg(long, default_value_t = DEFAULT_COT_SIZE)]
    cot_size: usize,
    /// TOML file with node2vec parameters.
    #[arg(long)]
    n2v_config: Option<PathBuf>,
    /// Recommend among zero-score candidates too.
    #[arg(long)]
    include_zero_scores: bool,
    /// Records file [default: <out-dir>/records.csv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// TOML sweep spec.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in spec: rq2 (full homophily grid) or rq3 (minority sizes).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Records file from simulate or sweep.
    #[arg(long)]
    records: PathBuf,
    /// One of structure, violins, heatmap, fm_lines, ingroup.
    #[arg(long)]
    figure: String,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let body = serde_json::to_string_pretty(value).expect("json value serializes");
    std::fs::write(path, body + "\n").map_err(|e| io_err(path, e))
}

fn ensure_parent(path: &Path) -> Result<(), Failure> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => std::fs::create_dir_all(p).map_err(|e| io_err(p, e)),
        _ => Ok(()),
    }
}

/// A closed pipe (`| head`) is not an error.
fn stdout(bytes: &[u8]) -> Result<(), Failure> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(bytes) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(io_err(Path::new("<stdout>"), e)),
        _ => Ok(()),
    }
}

/// `<file>.config.json` next to an output file.
fn echo_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

fn cmd_generate(cli: &Cli, a: &GenerateArgs) -> Result<(), Failure> {
    let params = DpahParams {
        n: a.n,
        f_m: a.fm,
        h_mm: a.hmm,
        h_maj: a.hmm_maj,
        gamma_m: a.gamma_m.unwrap_or(a.gamma),
        gamma_maj: a.gamma_maj.unwrap_or(a.gamma),
        density: a.density,
        seed: cli.seed,
    };
    params.validate()?;
    let out = a.out.clone().unwrap_or_else(|| cli.out_dir.join("network.edges"));
    ensure_parent(&out)?;
    let g = generate(&params)?;
    write_edge_list(&out, &g)?;
    params.write_sidecar(echo_path(&out))?;
    log::info!("wrote {} edges to {}", g.edge_count(), out.display());
    Ok(())
}

/// Network parameters recorded by `generate`, if the echo file exists.
fn generation_echo(input: &Path) -> Option<DpahParams> {
    let text = std::fs::read_to_string(echo_path(input)).ok()?;
    serde_json::from_str(&text).ok()
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<(), Failure> {
    let recommender = match a.recommender.parse::<RecommenderKind>()? {
        RecommenderKind::Ppr { .. } => RecommenderKind::Ppr { alpha: a.alpha },
        RecommenderKind::Wtf { .. } => RecommenderKind::Wtf {
            alpha: a.alpha,
            cot_size: a.cot_size,
        },
        RecommenderKind::N2v(_) => {
            let params = match &a.n2v_config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
                    toml::from_str::<N2VParams>(&text)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
                }
                None => N2VParams::default(),
            };
            RecommenderKind::N2v(params)
        }
        other => other,
    };
    let cfg = SimulationConfig {
        steps: a.steps,
        zero_scores: if a.include_zero_scores {
            ZeroScorePolicy::Include
        } else {
            ZeroScorePolicy::Exclude
        },
        ..SimulationConfig::new(recommender, cli.seed)
    };
    cfg.validate()?;

    let mut g = read_edge_list(&a.input)?;
    let echo = generation_echo(&a.input);
    let f_m = g.minority_fraction();
    let (h_mm, h_maj) = echo.as_ref().map_or((f64::NAN, f64::NAN), |p| (p.h_mm, p.h_maj));
    let out = a.out.clone().unwrap_or_else(|| cli.out_dir.join("records.csv"));
    ensure_parent(&out)?;
    write_json(
        &echo_path(&out),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "input": a.input,
            "simulation": cfg,
            "network": echo,
        }),
    )?;

    let steps = simulation::run(&mut g, &cfg)?;
    let name = cfg.recommender.name();
    let info = RunInfo {
        run_id: harness::run_id(name, h_mm, h_maj, f_m, 0),
        recommender: name.to_string(),
        h_mm,
        h_maj,
        f_m,
        replicate: 0,
        seed: cli.seed,
    };
    harness::write_records(&out, &harness::tidy_rows(&info, &steps))?;
    log::info!("wrote {} rows to {}", steps.len(), out.display());
    Ok(())
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> Result<(), Failure> {
    let mut spec = match (&a.config, &a.preset) {
        (Some(p), _) => SweepSpec::from_toml_file(p)?,
        (None, Some(name)) => SweepSpec::preset(name)?,
        (None, None) => SweepSpec::default(),
    };
    if a.config.is_none() {
        spec.base_seed = cli.seed;
    }
    spec.validate()?;
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = harness::run_sweep(&spec, workers, &cli.out_dir)?;
    for f in &outcome.failed {
        eprintln!(
            "failed: h_mm={} h_MM={} f_m={} replicate={} {}: {}",
            f.h_mm,
            f.h_maj,
            f.f_m,
            f.replicate,
            f.recommender.as_deref().unwrap_or("(generation)"),
            f.reason
        );
    }
    log::info!("wrote {} rows to {}", outcome.rows, outcome.records_path.display());
    Ok(())
}

fn cmd_metrics(a: &MetricsArgs) -> Result<(), Failure> {
    let g = read_edge_list(&a.input)?;
    let m = MetricsSnapshot::compute(&g.snapshot())?;
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "input": a.input,
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "metrics": m,
    });
    match &a.out {
        Some(p) => {
            ensure_parent(p)?;
            write_json(p, &value)
        }
        None => {
            let text = serde_json::to_string_pretty(&value).expect("json value serializes") + "\n";
            stdout(text.as_bytes())
        }
    }
}

fn cmd_extract(a: &ExtractArgs) -> Result<(), Failure> {
    let figure: Figure = a.figure.parse()?;
    let table = RecordTable::read(&a.records)?;
    let out = extract(&table, figure)?;
    match &a.out {
        Some(p) => {
            ensure_parent(p)?;
            out.write(p)?;
            write_json(
                &echo_path(p),
                &json!({"schema_version": SCHEMA_VERSION, "records": a.records, "figure": figure.name()}),
            )
        }
        None => {
            let mut buf = Vec::new();
            out.write_to(&mut buf)?;
            stdout(&buf)
        }
    }
}

fn main() -> ExitCode {
    let version = format!("{} (record schema {SCHEMA_VERSION})", env!("CARGO_PKG_VERSION"));
    let matches = match Cli::command().version(clap::builder::Str::from(version.leak() as &str)).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .init();

    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(&cli, a),
        Command::Simulate(a) => cmd_simulate(&cli, a),
        Command::Sweep(a) => cmd_sweep(&cli, a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Extract(a) => cmd_extract(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
