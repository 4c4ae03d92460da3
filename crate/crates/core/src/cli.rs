//! `bassabm` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bass::{bass_curve, shape_ratio, takeoff_time, BassParams};
use crate::calibrate::fit_bass;
use crate::error::Error;
use crate::io;
use crate::network::network_stats;
use crate::rng::{stream, Stream};
use crate::seeding::Pattern;
use crate::sweep::{
    envelope, locate, roi_criterion, run_single, run_sweep, GridSpec, SimConfig, SubsetFilter, SweepRecord,
    DEFAULT_REPLICATIONS,
};

#[derive(Debug, Parser)]
#[command(
    name = "bassabm",
    version,
    about = "Threshold-adoption simulation on lattice networks with Bass-model calibration"
)]
pub struct Cli {
    /// Master seed (overrides any seed in a config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file, or output directory for `sweep`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for `sweep`.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation from a JSON config and write its trajectory CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Also write the rewired network as an edge list.
        #[arg(long)]
        edges_out: Option<PathBuf>,
        /// Also write the innovator schedule.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Run a parameter grid and write the sweep table and envelopes.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        replications: u32,
    },
    /// Fit Bass parameters to a trajectory CSV (`tick,proportion`).
    Fit { trajectory: PathBuf },
    /// Evaluate the Bass curve over a time grid.
    Bass {
        p: f64,
        q: f64,
        /// Single time point.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
    },
    /// Print the takeoff time for (p, q).
    Takeoff { p: f64, q: f64 },
    /// Evaluate the ROI criterion for a boosted introduction rate.
    Roi(RoiArgs),
    /// Convex envelope of a (k, delta_u, sigma) subset of a sweep table.
    Envelope {
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta_u: f64,
        #[arg(long)]
        sigma: Pattern,
        /// Classify `label,p,q` points against the envelope instead.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Degree, path length and clustering of a (rewired) lattice.
    Netstats {
        #[arg(long, default_value_t = 200)]
        rows: usize,
        #[arg(long, default_value_t = 200)]
        cols: usize,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        p_r: f64,
        /// BFS sources; exact when at least the node count.
        #[arg(long, default_value_t = 200)]
        sample: usize,
        #[arg(long)]
        edges_out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RoiArgs {
    /// Base scenario as `p,q`.
    #[arg(long, value_parser = parse_pair)]
    pub base: Option<(f64, f64)>,
    /// Boosted scenario as `p,q`.
    #[arg(long, value_parser = parse_pair)]
    pub boosted: Option<(f64, f64)>,
    /// Take both scenarios from this sweep CSV instead.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Zero-based data row of the base scenario in `--sweep`.
    #[arg(long)]
    pub base_row: Option<usize>,
    #[arg(long)]
    pub boosted_row: Option<usize>,
    #[arg(long)]
    pub t_star: f64,
    #[arg(long, default_value_t = 1.0)]
    pub profit_per_adopter: f64,
    #[arg(long, default_value_t = 40_000)]
    pub population: usize,
    #[arg(long, default_value_t = 0.0)]
    pub investment: f64,
    #[arg(long, default_value_t = 0.0)]
    pub roi_min: f64,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `p,q`, got `{s}`"))?;
    let p = a.trim().parse().map_err(|_| format!("bad p `{a}`"))?;
    let q = b.trim().parse().map_err(|_| format!("bad q `{b}`"))?;
    Ok((p, q))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

/// Library errors that come from bad input map to usage errors.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::DegenerateTrajectory => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Everything needed to reproduce an output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub master_seed: Option<u64>,
    pub config: serde_json::Value,
    pub parameters: serde_json::Value,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    fn new(command: &str, master_seed: Option<u64>, config: serde_json::Value, parameters: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            master_seed,
            config,
            parameters,
            started_unix: unix_now(),
            finished_unix: 0,
            outputs: Vec::new(),
        }
    }

    fn write(mut self, path: &Path) -> CliResult<()> {
        self.finished_unix = unix_now();
        let text = serde_json::to_string_pretty(&self).map_err(|e| CliError::Runtime(e.to_string()))?;
        fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// `<file>.manifest.json` next to an output file.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn output(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn finite(name: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("`{name}` must be finite, got {x}")))
    }
}

/// Parses and validates a simulation config. Unknown keys and out-of-range
/// values are reported with the offending key.
pub fn load_sim_config(path: &Path) -> CliResult<SimConfig> {
    let text = read_text(path)?;
    let cfg: SimConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config error in {}: {e}", path.display())))?;
    cfg.validate().map_err(|e| CliError::Usage(format!("config error in {}: {e}", path.display())))?;
    Ok(cfg)
}

pub fn load_grid(path: &Path) -> CliResult<GridSpec> {
    let text = read_text(path)?;
    let grid: GridSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("grid error in {}: {e}", path.display())))?;
    Ok(grid)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { ref config, ref edges_out, ref plan_out } => {
            cmd_simulate(config, cli.out.as_deref(), cli.seed, edges_out.as_deref(), plan_out.as_deref())
        }
        Command::Sweep { ref grid, replications } => {
            let out = cli.out.as_deref().ok_or_else(|| CliError::Usage("sweep needs --out <dir>".into()))?;
            cmd_sweep(grid, out, replications, cli.jobs, cli.seed.unwrap_or(0))
        }
        Command::Fit { ref trajectory } => cmd_fit(trajectory, &cli.out),
        Command::Bass { p, q, t, t_end, dt } => cmd_bass(p, q, t, t_end, dt, &cli.out),
        Command::Takeoff { p, q } => cmd_takeoff(p, q, &cli.out),
        Command::Roi(ref args) => cmd_roi(args, &cli.out),
        Command::Envelope { ref sweep, k, delta_u, sigma, ref points } => {
            cmd_envelope(sweep, SubsetFilter { k, delta_u, sigma }, points.as_deref(), &cli.out)
        }
        Command::Netstats { rows, cols, k, p_r, sample, ref edges_out } => {
            cmd_netstats(rows, cols, k, p_r, sample, cli.seed.unwrap_or(0), edges_out.as_deref(), &cli.out)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn cmd_simulate(
    config: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    edges_out: Option<&Path>,
    plan_out: Option<&Path>,
) -> CliResult<()> {
    let out = out.ok_or_else(|| CliError::Usage("simulate needs --out <file>".into()))?;
    let mut cfg = load_sim_config(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let mut manifest = RunManifest::new("simulate", Some(cfg.seed), json!(cfg), json!({ "config_path": config }));
    let run = run_single(&cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    io::write_trajectory(BufWriter::new(File::create(out)?), &run.trajectory)?;
    manifest.outputs.push(out.display().to_string());
    if let Some(path) = edges_out {
        io::write_edges(BufWriter::new(File::create(path)?), &cfg.network()?)?;
        manifest.outputs.push(path.display().to_string());
    }
    if let Some(path) = plan_out {
        io::write_plan(BufWriter::new(File::create(path)?), &cfg.seeding_plan()?)?;
        manifest.outputs.push(path.display().to_string());
    }
    manifest.parameters["saturated_at"] = json!(run.trajectory.saturated_at);
    manifest.parameters["final_proportion"] = json!(run.trajectory.final_proportion());
    manifest.write(&manifest_path(out))
}

fn envelope_file_name(f: &SubsetFilter) -> String {
    format!("envelope_k{}_du{}_{}.csv", f.k, f.delta_u, f.sigma)
}

pub fn cmd_sweep(grid_path: &Path, out_dir: &Path, replications: u32, jobs: usize, master_seed: u64) -> CliResult<()> {
    let spec = load_grid(grid_path)?;
    let grid = spec.expand().map_err(|e| CliError::Usage(format!("grid error in {}: {e}", grid_path.display())))?;
    if replications == 0 {
        return Err(CliError::Usage("--replications must be at least 1".into()));
    }
    fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest::new(
        "sweep",
        Some(master_seed),
        json!(spec),
        json!({ "grid_path": grid_path, "replications": replications, "jobs": jobs }),
    );
    let records = run_sweep(&grid, replications, master_seed, jobs)?;

    let sweep_path = out_dir.join("sweep.csv");
    io::write_sweep(BufWriter::new(File::create(&sweep_path)?), &records)?;
    manifest.outputs.push(sweep_path.display().to_string());

    let mut filters: Vec<SubsetFilter> = Vec::new();
    for cfg in &grid {
        let f = SubsetFilter { k: cfg.k, delta_u: cfg.delta_u, sigma: cfg.sigma };
        if !filters.contains(&f) {
            filters.push(f);
        }
    }
    let mut skipped = Vec::new();
    for f in &filters {
        match envelope(&records, *f) {
            Ok(env) => {
                let path = out_dir.join(envelope_file_name(f));
                io::write_points(BufWriter::new(File::create(&path)?), &env.hull_vertices)?;
                manifest.outputs.push(path.display().to_string());
            }
            Err(e) => skipped.push(format!("{}: {e}", envelope_file_name(f))),
        }
    }

    let failed = records.iter().filter(|r| !r.is_fitted()).count();
    let unsaturated = records.iter().filter(|r| r.saturation_tick.is_none()).count();
    let unconverged = records.iter().filter(|r| r.is_fitted() && !r.converged).count();
    manifest.parameters["rows"] = json!(records.len());
    manifest.parameters["fit_failures"] = json!(failed);
    manifest.parameters["unsaturated"] = json!(unsaturated);
    manifest.parameters["unconverged"] = json!(unconverged);
    manifest.parameters["skipped_envelopes"] = json!(skipped);
    manifest.write(&out_dir.join("manifest.json"))?;
    if failed == records.len() {
        return Err(CliError::Runtime(format!("all {failed} runs failed")));
    }
    Ok(())
}

#[derive(Serialize)]
struct FitReport<'a> {
    #[serde(flatten)]
    fit: &'a crate::calibrate::FitResult,
    takeoff: Option<f64>,
    shape_ratio: f64,
}

pub fn cmd_fit(path: &Path, out: &Option<PathBuf>) -> CliResult<()> {
    let traj = io::read_trajectory(open(path)?)?;
    let fit = fit_bass(&traj, None)?;
    let report = FitReport {
        fit: &fit,
        takeoff: takeoff_time(&fit.params).ok().map(|t| t.time),
        shape_ratio: shape_ratio(&fit.params),
    };
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_bass(p: f64, q: f64, t: Option<f64>, t_end: f64, dt: f64, out: &Option<PathBuf>) -> CliResult<()> {
    let params = BassParams::new(finite("p", p)?, finite("q", q)?)?;
    let times: Vec<f64> = match t {
        Some(t) => {
            if !(finite("t", t)? >= 0.0) {
                return Err(CliError::Usage("--t must be non-negative".into()));
            }
            vec![t]
        }
        None => {
            if !(finite("dt", dt)? > 0.0) || !(finite("t_end", t_end)? >= 0.0) {
                return Err(CliError::Usage("--dt must be positive and --t-end non-negative".into()));
            }
            let n = (t_end / dt).round() as usize;
            (0..=n).map(|i| i as f64 * dt).collect()
        }
    };
    let mut w = csv::Writer::from_writer(output(out)?);
    w.write_record(["tick", "proportion"]).map_err(Error::from)?;
    for t in times {
        w.write_record([t.to_string(), bass_curve(&params, t).to_string()]).map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_takeoff(p: f64, q: f64, out: &Option<PathBuf>) -> CliResult<()> {
    let params = BassParams::new(finite("p", p)?, finite("q", q)?)?;
    let t = takeoff_time(&params)?;
    let mut w = output(out)?;
    writeln!(w, "{:.9}", t.time)?;
    w.flush()?;
    if t.degenerate {
        eprintln!("note: takeoff precedes launch (q <= p(2+sqrt 3))");
    }
    Ok(())
}

pub fn cmd_roi(args: &RoiArgs, out: &Option<PathBuf>) -> CliResult<()> {
    let (base, boosted) = match (&args.sweep, args.base, args.boosted) {
        (Some(path), None, None) => {
            let records: Vec<SweepRecord> = io::read_sweep(open(path)?, &SimConfig::default())?;
            let pick = |row: Option<usize>, name: &str| -> CliResult<BassParams> {
                let row = row.ok_or_else(|| CliError::Usage(format!("--{name}-row is required with --sweep")))?;
                let r = records.get(row).ok_or_else(|| {
                    CliError::Usage(format!("--{name}-row {row} out of range ({} rows)", records.len()))
                })?;
                r.bass().ok_or_else(|| CliError::Usage(format!("row {row} has no fitted parameters")))
            };
            (pick(args.base_row, "base")?, pick(args.boosted_row, "boosted")?)
        }
        (None, Some(b), Some(x)) => (BassParams::new(b.0, b.1)?, BassParams::new(x.0, x.1)?),
        _ => {
            return Err(CliError::Usage(
                "give either --base p,q and --boosted p,q, or --sweep with --base-row/--boosted-row".into(),
            ))
        }
    };
    let scale = finite("profit_per_adopter", args.profit_per_adopter)? * args.population as f64;
    let report = roi_criterion(
        &base,
        &boosted,
        finite("t_star", args.t_star)?,
        finite("investment", args.investment)?,
        finite("roi_min", args.roi_min)?,
        |n| scale * n,
    )?;
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_envelope(sweep: &Path, filter: SubsetFilter, points: Option<&Path>, out: &Option<PathBuf>) -> CliResult<()> {
    let records = io::read_sweep(open(sweep)?, &SimConfig::default())?;
    let env = envelope(&records, filter)?;
    match points {
        None => io::write_points(output(out)?, &env.hull_vertices)?,
        Some(path) => {
            let pts = io::read_empirical(open(path)?)?;
            let mut w = csv::Writer::from_writer(output(out)?);
            w.write_record(["label", "p", "q", "location"]).map_err(Error::from)?;
            for pt in pts {
                let loc = serde_json::to_value(locate((pt.p, pt.q), &env)).unwrap_or_default();
                w.write_record([pt.label, pt.p.to_string(), pt.q.to_string(), loc.as_str().unwrap_or("").to_string()])
                    .map_err(Error::from)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_netstats(
    rows: usize,
    cols: usize,
    k: usize,
    p_r: f64,
    sample: usize,
    seed: u64,
    edges_out: Option<&Path>,
    out: &Option<PathBuf>,
) -> CliResult<()> {
    let cfg = SimConfig { rows, cols, k, p_r, seed, ..SimConfig::default() };
    let net = cfg.network()?;
    if let Some(path) = edges_out {
        io::write_edges(BufWriter::new(File::create(path)?), &net)?;
    }
    let stats = network_stats(&net, sample, &mut stream(seed, Stream::Stats));
    let mut w = output(out)?;
    serde_json::to_writer_pretty(
        &mut w,
        &json!({ "seed": seed, "p_r": p_r, "rewired_edges": net.rewired_edges(), "stats": stats }),
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
