//! evoboss: command-line driver for runs, sweeps and reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/format error, 3 runtime failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use evoboss::baselines::{run_random, run_recombination, run_smw};
use evoboss::boes::{run_boes, InitStrategy, RunConfig, StoreKind};
use evoboss::embeddings::{onehot_store, pca, synth_store, EmbeddingStore};
use evoboss::evaluation::{
    ndcg, quartile_curves, snapshots, sweep, trace_file_name, write_curves_csv,
    write_snapshots_csv, Gain, Method, StartSampling, SweepSpec,
};
use evoboss::gp::{FitObjective, KernelFamily};
use evoboss::landscape::{
    enumerate_variants, infer_positions, load_landscape, load_landscape_with_meta, Landscape,
    LandscapeMeta, Variant,
};
use evoboss::synthetic::{planted_landscape, PeakSpec};

#[derive(Parser)]
#[command(name = "evoboss", version, about = "Bayesian optimization in protein embedding space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a landscape CSV and its metadata against the known dataset ranges.
    ValidateData { csv: PathBuf, meta: PathBuf },
    /// Write a seeded synthetic embedding store for the full 20^n space.
    SynthEmbed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix; writes PREFIX.idx and PREFIX.emb.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the one-hot store (dimension 20n) for the full 20^n space.
    OnehotEmbed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a landscape of Gaussian peaks over a store, with a planted global optimum.
    SynthLandscape {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix; writes PREFIX.csv and PREFIX.meta.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one optimization and write its trace.
    Run {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value = "wild_type")]
        start: String,
        #[arg(long)]
        out: PathBuf,
        /// Overwrite an existing trace file.
        #[arg(long)]
        force: bool,
    },
    /// Repeat a method from many starting variants.
    Sweep {
        #[command(flatten)]
        method: MethodArgs,
        /// Number of uniformly sampled starts (ignored with --start-sampling all).
        #[arg(long, default_value_t = 200)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = Sampling::Uniform)]
        start_sampling: Sampling,
        /// Read precomputed traces instead of running (method flags are ignored).
        #[arg(long)]
        external_traces: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long, env = "EVOBOSS_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        force: bool,
    },
    /// Quartile curves and snapshot distributions of a directory of traces.
    Report {
        #[arg(long)]
        traces_dir: PathBuf,
        /// Screen counts: comma-separated values or inclusive ranges `a:b[:step]`.
        #[arg(long, default_value = "1:200", value_parser = parse_counts)]
        grid: Counts,
        #[arg(long, default_value = "50,100,150,190", value_parser = parse_counts)]
        snapshots: Counts,
        /// Output directory for curves.csv and snapshots.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// NDCG of a predicted ranking against true values (one number per line).
    Ndcg {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, value_enum, default_value_t = GainArg::Linear)]
        gain: GainArg,
        /// Also write `ndcg,<value>` to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Principal components of an embedding store.
    Pca {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Output directory for projection.csv and explained_variance.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct MethodArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    landscape: PathBuf,
    /// Sidecar metadata; without it the first CSV row is the wild type.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Store prefix, `onehot`, or `synthetic[:dim[:seed]]`.
    #[arg(long, value_parser = parse_store)]
    store: Option<StoreArg>,
    #[arg(long)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    batch: usize,
    /// Extra random initial screens, `random:<k>`.
    #[arg(long, value_parser = parse_init)]
    init: Option<usize>,
    #[arg(long, value_enum, default_value_t = KernelArg::Matern32)]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Map)]
    fit_objective: ObjectiveArg,
    #[arg(long)]
    no_warm_start: bool,
    /// Stop as soon as the best observed fitness reaches this value.
    #[arg(long)]
    stop_at: Option<f64>,
    /// Residues kept per position by recombination.
    #[arg(long, default_value_t = 3)]
    top_k: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Boes,
    Smw,
    Recombination,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Matern32,
    Se,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Map,
    Mle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampling {
    All,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum GainArg {
    Linear,
    Exponential,
}

#[derive(Clone, Debug)]
enum StoreArg {
    Prefix(PathBuf),
    Onehot,
    Synthetic { dim: usize, seed: u64 },
}

type Counts = Vec<usize>;

fn parse_store(s: &str) -> Result<StoreArg, String> {
    if s == "onehot" {
        return Ok(StoreArg::Onehot);
    }
    if s == "synthetic" || s.starts_with("synthetic:") {
        let mut parts = s.split(':').skip(1);
        let dim = match parts.next() {
            Some(d) => d.parse().map_err(|_| format!("invalid dimension {d:?}"))?,
            None => 32,
        };
        let seed = match parts.next() {
            Some(v) => v.parse().map_err(|_| format!("invalid seed {v:?}"))?,
            None => 0,
        };
        if parts.next().is_some() {
            return Err(format!("invalid store {s:?}"));
        }
        return Ok(StoreArg::Synthetic { dim, seed });
    }
    Ok(StoreArg::Prefix(PathBuf::from(s)))
}

fn parse_init(s: &str) -> Result<usize, String> {
    s.strip_prefix("random:")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| format!("expected random:<k>, got {s:?}"))
}

fn parse_counts(s: &str) -> Result<Counts, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let nums: Vec<usize> = item
            .split(':')
            .map(|p| p.parse().map_err(|_| format!("invalid count {p:?}")))
            .collect::<Result<_, _>>()?;
        match nums[..] {
            [c] => out.push(c),
            [a, b] => out.extend(a..=b),
            [a, b, step] if step > 0 => out.extend((a..=b).step_by(step)),
            _ => return Err(format!("invalid range {item:?}")),
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err("counts must be a non-empty list of positive integers".into());
    }
    Ok(out)
}

enum CliError {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl From<evoboss::Error> for CliError {
    fn from(e: evoboss::Error) -> Self {
        if e.is_data_error() || matches!(e, evoboss::Error::InvalidInput(_)) {
            CliError::Data(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn store_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".idx"), with(".emb"))
}

fn load_store(prefix: &Path) -> CliResult<EmbeddingStore> {
    let (idx, emb) = store_paths(prefix);
    Ok(EmbeddingStore::load(idx, emb)?)
}

fn save_store(store: &EmbeddingStore, prefix: &Path) -> CliResult {
    let (idx, emb) = store_paths(prefix);
    Ok(store.save(idx, emb)?)
}

fn read_landscape(csv: &Path, meta: Option<&Path>) -> CliResult<Landscape> {
    Ok(match meta {
        Some(meta) => load_landscape_with_meta(csv, meta)?,
        None => load_landscape(csv, infer_positions(csv)?)?,
    })
}

fn resolve_store(arg: &StoreArg, n: usize) -> CliResult<(EmbeddingStore, StoreKind)> {
    Ok(match arg {
        StoreArg::Prefix(p) => (load_store(p)?, StoreKind::Embedding),
        StoreArg::Onehot => (onehot_store(&enumerate_variants(n)?)?, StoreKind::Onehot),
        StoreArg::Synthetic { dim, seed } => (
            synth_store(&enumerate_variants(n)?, *dim, *seed)?,
            StoreKind::Synthetic,
        ),
    })
}

/// Everything a run or sweep needs, resolved from flags.
struct Prepared {
    landscape: Landscape,
    start: Variant,
    store: Option<EmbeddingStore>,
    config: Option<RunConfig>,
}

fn prepare(args: &MethodArgs, start: Option<&str>) -> CliResult<Prepared> {
    let landscape = read_landscape(&args.landscape, args.meta.as_deref())?;
    let start = match start {
        None | Some("wild_type") => landscape.wild_type().clone(),
        Some(word) => Variant::parse(word)?,
    };
    if start.len() != landscape.n() {
        return Err(CliError::Usage(format!(
            "start {start} does not have {} residues",
            landscape.n()
        )));
    }
    if !matches!(args.method, MethodArg::Boes) {
        return Ok(Prepared { landscape, start, store: None, config: None });
    }
    let store_arg = args
        .store
        .as_ref()
        .ok_or_else(|| CliError::Usage("--store is required for --method boes".into()))?;
    let (store, store_kind) = resolve_store(store_arg, landscape.n())?;
    let config = RunConfig {
        kernel_family: match args.kernel {
            KernelArg::Matern32 => KernelFamily::Matern32Scaled,
            KernelArg::Se => KernelFamily::SquaredExponential,
        },
        store_kind,
        batch: args.batch,
        init: args.init.map_or(InitStrategy::StartOnly, InitStrategy::RandomK),
        fit_objective: match args.fit_objective {
            ObjectiveArg::Map => FitObjective::Map,
            ObjectiveArg::Mle => FitObjective::Mle,
        },
        seed: args.seed,
        warm_start: !args.no_warm_start,
        stop_at: args.stop_at,
        ..RunConfig::new(start.clone(), args.budget)
    };
    Ok(Prepared { landscape, start, store: Some(store), config: Some(config) })
}

fn cmd_run(args: &MethodArgs, start: &str, out: &Path, force: bool) -> CliResult {
    if out.exists() && !force {
        return Err(CliError::Usage(format!(
            "{} exists; pass --force to overwrite",
            out.display()
        )));
    }
    let p = prepare(args, Some(start))?;
    let start = &p.start;
    let trace = match args.method {
        MethodArg::Boes => run_boes(
            p.config.as_ref().expect("boes config"),
            &p.landscape,
            p.store.as_ref().expect("boes store"),
        )?,
        MethodArg::Smw => run_smw(&p.landscape, start, args.budget, args.seed)?,
        MethodArg::Recombination => {
            run_recombination(&p.landscape, start, args.budget, args.top_k, args.seed)?
        }
        MethodArg::Random => run_random(&p.landscape, args.budget, args.seed)?,
    };
    trace.write_jsonl(out)?;
    eprintln!(
        "{} screens, best {}",
        trace.len(),
        trace.final_best().unwrap_or(0.0)
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    args: &MethodArgs,
    runs: usize,
    sampling: Sampling,
    external: Option<&Path>,
    out_dir: &Path,
    jobs: Option<usize>,
    force: bool,
) -> CliResult {
    if !force && out_dir.join(trace_file_name(0)).exists() {
        return Err(CliError::Usage(format!(
            "{} already holds traces; pass --force to overwrite",
            out_dir.display()
        )));
    }
    let p = prepare(args, None)?;
    let method = match (external, args.method) {
        (Some(dir), _) => Method::ExternalTraceDir(dir.to_path_buf()),
        (None, MethodArg::Boes) => Method::Boes(p.config.clone().expect("boes config")),
        (None, MethodArg::Smw) => Method::Smw,
        (None, MethodArg::Recombination) => Method::Recombination { top_k: args.top_k },
        (None, MethodArg::Random) => Method::Random,
    };
    let spec = SweepSpec {
        method,
        start_sampling: match sampling {
            Sampling::All => StartSampling::AllVariants,
            Sampling::Uniform => StartSampling::Uniform { runs, seed: args.seed },
        },
        budget: args.budget,
        seed: args.seed,
    };
    let jobs = jobs
        .filter(|&j| j > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let traces = sweep(&spec, &p.landscape, p.store.as_ref(), Some(out_dir), jobs)?;
    if external.is_some() {
        for (i, t) in traces.iter().enumerate() {
            t.write_jsonl(out_dir.join(trace_file_name(i)))?;
        }
    }
    eprintln!("{} traces written to {}", traces.len(), out_dir.display());
    Ok(())
}

fn cmd_report(traces_dir: &Path, grid: &[usize], at: &[usize], out: &Path) -> CliResult {
    let traces = evoboss::evaluation::load_traces(traces_dir)?;
    fs::create_dir_all(out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    write_curves_csv(&quartile_curves(&traces, grid)?, out.join("curves.csv"))?;
    write_snapshots_csv(&snapshots(&traces, at)?, out.join("snapshots.csv"))?;
    Ok(())
}

fn read_numbers(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // last comma-separated field, so `variant,value` files work too
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if out.is_empty() && i == 0 => {}
            Err(_) => {
                return Err(CliError::Data(format!(
                    "{}:{}: non-numeric value {field:?}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

fn cmd_ndcg(pred: &Path, truth: &Path, gain: GainArg, out: Option<&Path>) -> CliResult {
    let gain = match gain {
        GainArg::Linear => Gain::Linear,
        GainArg::Exponential => Gain::Exponential,
    };
    let value = ndcg(&read_numbers(pred)?, &read_numbers(truth)?, gain)?;
    let line = format!("ndcg,{value}\n");
    print!("{line}");
    if let Some(out) = out {
        fs::write(out, line).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    }
    Ok(())
}

fn cmd_pca(store: &Path, k: usize, out: &Path) -> CliResult {
    let store = load_store(store)?;
    let result = pca(&store, k)?;
    fs::create_dir_all(out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    let mut proj = String::from("variant");
    for c in 1..=k {
        proj.push_str(&format!(",pc{c}"));
    }
    proj.push('\n');
    for (r, v) in store.variants().iter().enumerate() {
        proj.push_str(&v.word());
        for c in 0..k {
            proj.push_str(&format!(",{}", result.projection[(r, c)]));
        }
        proj.push('\n');
    }
    let mut ratio = String::from("component,explained_variance_ratio\n");
    for (c, r) in result.explained_variance_ratio.iter().enumerate() {
        ratio.push_str(&format!("{},{r}\n", c + 1));
    }
    for (name, body) in [("projection.csv", proj), ("explained_variance.csv", ratio)] {
        let path = out.join(name);
        fs::write(&path, body)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Published fitness range and wild-type fitness of the two combinatorial datasets.
const KNOWN_DATASETS: [(&str, f64, f64); 2] = [("gb1", 8.76, 1.0), ("phoq", 133.59, 3.29)];
const DATASET_TOLERANCE: f64 = 5e-3;

fn cmd_validate(csv: &Path, meta: &Path) -> CliResult {
    let landscape = load_landscape_with_meta(csv, meta)?;
    let wt = landscape.fitness(landscape.wild_type());
    println!("name={}", landscape.name());
    println!("n={}", landscape.n());
    println!("rows={}", landscape.measured().len());
    println!("min={}", landscape.fitness_min());
    println!("max={}", landscape.fitness_max());
    println!("wild_type={} fitness={wt}", landscape.wild_type());

    let name = landscape.name().to_ascii_lowercase();
    let Some(&(label, max, wt_expected)) = KNOWN_DATASETS.iter().find(|(k, ..)| name.contains(k))
    else {
        println!("no reference ranges for this dataset; format checks passed");
        return Ok(());
    };
    let mut failures = Vec::new();
    if landscape.fitness_min().abs() > DATASET_TOLERANCE {
        failures.push(format!("minimum {} is not 0.0", landscape.fitness_min()));
    }
    if (landscape.fitness_max() - max).abs() > DATASET_TOLERANCE {
        failures.push(format!("maximum {} is not {max}", landscape.fitness_max()));
    }
    if (wt - wt_expected).abs() > DATASET_TOLERANCE {
        failures.push(format!("wild-type fitness {wt} is not {wt_expected}"));
    }
    if failures.is_empty() {
        println!("{label}: ranges ok");
        Ok(())
    } else {
        Err(CliError::Data(format!("{label}: {}", failures.join("; "))))
    }
}

fn cmd_synth_landscape(store: &Path, seed: u64, out: &Path) -> CliResult {
    let store = load_store(store)?;
    let planted = planted_landscape(&store, &PeakSpec { seed, ..PeakSpec::default() })?;
    let with = |ext: &str| {
        let mut s = out.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    planted.landscape.write_csv(with(".csv"))?;
    let meta: LandscapeMeta = planted.landscape.metadata();
    meta.write(with(".meta"))?;
    println!("optimum={} fitness={}", planted.optimum, planted.landscape.fitness_max());
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::ValidateData { csv, meta } => cmd_validate(&csv, &meta),
        Command::SynthEmbed { n, dim, seed, out } => {
            save_store(&synth_store(&enumerate_variants(n)?, dim, seed)?, &out)
        }
        Command::OnehotEmbed { n, out } => save_store(&onehot_store(&enumerate_variants(n)?)?, &out),
        Command::SynthLandscape { store, seed, out } => cmd_synth_landscape(&store, seed, &out),
        Command::Run { method, start, out, force } => cmd_run(&method, &start, &out, force),
        Command::Sweep {
            method,
            runs,
            start_sampling,
            external_traces,
            out_dir,
            jobs,
            force,
        } => cmd_sweep(
            &method,
            runs,
            start_sampling,
            external_traces.as_deref(),
            &out_dir,
            jobs,
            force,
        ),
        Command::Report { traces_dir, grid, snapshots, out } => {
            cmd_report(&traces_dir, &grid, &snapshots, &out)
        }
        Command::Ndcg { pred, truth, gain, out } => cmd_ndcg(&pred, &truth, gain, out.as_deref()),
        Command::Pca { store, k, out } => cmd_pca(&store, k, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
