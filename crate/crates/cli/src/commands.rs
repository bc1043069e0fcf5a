use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::path::Path;

use coldsim_core::carrier::{fit_weibull, mean_exchanges};
use coldsim_core::config::{ConfigError, ConfigFile};
use coldsim_core::ingest::ingest_exchange_log;
use coldsim_core::markov::{lower_bound, upper_bound};
use coldsim_core::report::{emit_sweep_csv, emit_trials_csv, write_sweep_csv, SweepRow};
use coldsim_core::sim::{run_batch, run_batch_with_workers, SimSummary};
use coldsim_core::states::{count_states, enumerate_general};
use coldsim_core::{HarmonicMode, SimConfig, SimMode, StateSpace, SweepAxis, UbMethod};
use serde::Serialize;

pub const SEED_VAR: &str = "COLDSIM_SEED";

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Data(String),
    Numerical(String),
    Output(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Data(m) => write!(f, "data error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<coldsim_core::Error> for Failure {
    fn from(e: coldsim_core::Error) -> Self {
        match e {
            coldsim_core::Error::InvalidParameter { .. } => Failure::Config(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn output_err(e: impl fmt::Display) -> Failure {
    Failure::Output(e.to_string())
}

fn write_json(value: &impl Serialize, path: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(output_err)?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Output(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(output_err),
    }
}

struct Loaded {
    file: ConfigFile,
    sim: SimConfig,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let mut file = ConfigFile::load(path)?;
    if let Ok(raw) = std::env::var(SEED_VAR) {
        file.seed = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("{SEED_VAR}=`{raw}` is not an unsigned 64-bit integer")))?;
    }
    let sim = file.sim_config()?;
    Ok(Loaded { file, sim })
}

pub fn states(n: usize, k: usize, s: usize) -> Result<(), Failure> {
    let mut out = String::new();
    if s == 3 {
        let space = StateSpace::enumerate(n, k)?;
        out.push_str("index,i,j,z,is_failure\n");
        for (idx, state) in space.states().iter().enumerate() {
            match state.counts() {
                Some((i, j, z)) => out.push_str(&format!("{idx},{i},{j},{z},false\n")),
                None => out.push_str(&format!("{idx},,,,true\n")),
            }
        }
    } else {
        let rows = enumerate_general(n, k, s)?;
        let mut header = vec!["index".to_string(), "available".to_string()];
        header.extend((1..s).map(|c| format!("state_{c}")));
        header.push("is_failure".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for (idx, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{idx},{},false\n", cells.join(",")));
        }
        let total = count_states(n, k, s)?;
        out.push_str(&format!("{}{},true\n", total - 1, ",".repeat(s)));
    }
    std::io::stdout().write_all(out.as_bytes()).map_err(output_err)
}

#[derive(Serialize)]
struct FitReport {
    shape: f64,
    scale: f64,
    mean_exchanges: f64,
    r_squared: f64,
    n_samples: usize,
}

pub fn fit(input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let log = ingest_exchange_log(input).map_err(|e| Failure::Data(e.to_string()))?;
    let params = fit_weibull(&log.samples).map_err(|e| Failure::Data(e.to_string()))?;
    let diag = params.fit().expect("fitted parameters carry diagnostics");
    let report = FitReport {
        shape: params.shape(),
        scale: params.scale(),
        mean_exchanges: mean_exchanges(&params),
        r_squared: diag.r_squared,
        n_samples: diag.n_samples,
    };
    write_json(&report, output)
}

#[derive(Serialize)]
struct BoundsReport {
    n: usize,
    k: usize,
    eta: f64,
    lower_bound_hours: f64,
    lower_bound_approx_hours: f64,
    upper_bound_hours: f64,
    ub_method: &'static str,
    upper_bound_fundamental_hours: f64,
    upper_bound_linear_solve_hours: f64,
}

struct Bounds {
    lower: f64,
    upper: f64,
}

fn analytic_bounds(cfg: &SimConfig) -> Result<Bounds, Failure> {
    let eta = cfg.hard_error.eta();
    let space = StateSpace::enumerate(cfg.n, cfg.k)?;
    Ok(Bounds {
        lower: lower_bound(cfg.n, cfg.k, cfg.rates.lambda, eta, HarmonicMode::Exact)?,
        upper: upper_bound(&space, &cfg.rates, eta, UbMethod::LinearSolve)?,
    })
}

pub fn bounds(config: &Path) -> Result<(), Failure> {
    let Loaded { sim: cfg, .. } = load(config)?;
    let eta = cfg.hard_error.eta();
    let space = StateSpace::enumerate(cfg.n, cfg.k)?;
    let fundamental = upper_bound(&space, &cfg.rates, eta, UbMethod::Fundamental)?;
    let b = analytic_bounds(&cfg)?;
    let report = BoundsReport {
        n: cfg.n,
        k: cfg.k,
        eta,
        lower_bound_hours: b.lower,
        lower_bound_approx_hours: lower_bound(cfg.n, cfg.k, cfg.rates.lambda, eta, HarmonicMode::Approx)?,
        upper_bound_hours: b.upper,
        ub_method: UbMethod::LinearSolve.as_str(),
        upper_bound_fundamental_hours: fundamental,
        upper_bound_linear_solve_hours: b.upper,
    };
    write_json(&report, None)
}

fn batch(cfg: &SimConfig, workers: Option<usize>) -> Result<SimSummary, Failure> {
    let summary = match workers {
        Some(w) => run_batch_with_workers(cfg, w)?,
        None => run_batch(cfg)?,
    };
    if summary.unreliable {
        log::warn!(
            "{:.0}% of trials censored; means are dominated by the horizon",
            100.0 * summary.censored_fraction
        );
    }
    Ok(summary)
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    mode: SimMode,
    seed: u64,
    #[serde(flatten)]
    summary: &'a SimSummary,
}

pub fn simulate(config: &Path, trials_csv: Option<&Path>, workers: Option<usize>) -> Result<(), Failure> {
    let Loaded { file, sim: cfg } = load(config)?;
    let summary = batch(&cfg, workers)?;
    let trials_path = trials_csv.map(Path::to_path_buf).or(file.trials_csv.map(Into::into));
    if let Some(path) = trials_path {
        emit_trials_csv(&summary.outcomes, &path).map_err(output_err)?;
    }
    let report = SimulateReport {
        mode: cfg.mode,
        seed: cfg.seed,
        summary: &summary,
    };
    write_json(&report, file.summary_output.as_deref().map(Path::new))
}

pub fn sweep(
    config: &Path,
    axis: Option<&str>,
    grid: Option<Vec<f64>>,
    output: Option<&Path>,
    workers: Option<usize>,
) -> Result<(), Failure> {
    let Loaded { file, sim: cfg } = load(config)?;
    let axis = match axis {
        Some(a) => a.parse::<SweepAxis>()?,
        None => file
            .sweep_axis
            .ok_or_else(|| Failure::Config("no sweep axis given (--axis or sweep_axis)".into()))?,
    };
    let grid = grid
        .or(file.sweep_grid.clone())
        .ok_or_else(|| Failure::Config("no sweep grid given (--grid or sweep_grid)".into()))?;
    if grid.is_empty() || grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less)) {
        return Err(Failure::Config("sweep grid must be nonempty and strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &value in &grid {
        let point = axis.apply(&cfg, value);
        point.validate()?;
        let summary = batch(&point, workers)?;
        let b = analytic_bounds(&point)?;
        rows.push(SweepRow::new(value, &summary, b.lower, b.upper));
    }
    match output.map(Path::to_path_buf).or(file.sweep_output.map(Into::into)) {
        Some(path) => emit_sweep_csv(&rows, &path).map_err(output_err),
        None => write_sweep_csv(std::io::stdout().lock(), &rows).map_err(output_err),
    }
}
