//! Micro-parameter sweeps and the analysis of their induced Bass parameters.

mod envelope;
mod roi;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bass::{takeoff_time, BassParams};
use crate::calibrate::{fit_bass, FitResult};
use crate::engine::{simulate_with_mode, AdoptionTrajectory, DecisionParams, UpdateMode, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::network::{build_lattice, rewire, LatticeSpec, Neighborhood, SocialNetwork};
use crate::rng::{run_seed, stream, Stream};
use crate::seeding::{innovator_count, plan_innovators, Pattern, SeedingPlan, DEFAULT_INNOVATOR_FRACTION};

pub use envelope::{
    convex_hull, envelope, locate, nearest_micro, Envelope, Location, SubsetFilter, BOUNDARY_TOLERANCE,
};
pub use roi::{roi_check, roi_criterion, RoiReport};

pub const GRID_K: [usize; 2] = [8, 4];
pub const GRID_DELTA_U: [f64; 2] = [0.6, 0.8];
pub const GRID_P_R: [f64; 6] = [0.0, 0.0025, 0.005, 0.01, 0.02, 0.04];
pub const GRID_GAMMA: [usize; 5] = [125, 200, 250, 500, 1000];
pub const DEFAULT_SIZE: usize = 200;
pub const DEFAULT_MAX_TICKS: u32 = 1000;
pub const DEFAULT_REPLICATIONS: u32 = 5;

/// One micro-parameter combination, plus the seed of the run that uses it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub rows: usize,
    pub cols: usize,
    /// Lattice degree: 4 (von Neumann) or 8 (Moore).
    pub k: usize,
    pub delta_u: f64,
    pub sigma: Pattern,
    pub p_r: f64,
    pub gamma: usize,
    pub alpha: f64,
    pub innovator_fraction: f64,
    pub max_ticks: u32,
    pub update: UpdateMode,
    pub seed: u64,
    pub replication: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            rows: DEFAULT_SIZE,
            cols: DEFAULT_SIZE,
            k: 8,
            delta_u: 0.6,
            sigma: Pattern::Uniform,
            p_r: 0.0,
            gamma: 1000,
            alpha: DEFAULT_ALPHA,
            innovator_fraction: DEFAULT_INNOVATOR_FRACTION,
            max_ticks: DEFAULT_MAX_TICKS,
            update: UpdateMode::Synchronous,
            seed: 0,
            replication: 0,
        }
    }
}

impl SimConfig {
    pub fn lattice(&self) -> Result<LatticeSpec> {
        let nb = Neighborhood::from_degree(self.k)
            .ok_or_else(|| Error::param("k", format!("must be 4 or 8, got {}", self.k)))?;
        LatticeSpec::new(self.rows, self.cols, nb)
    }

    pub fn population(&self) -> usize {
        self.rows * self.cols
    }

    pub fn innovators(&self) -> usize {
        innovator_count(self.population(), self.innovator_fraction)
    }

    pub fn decision_params(&self) -> Result<DecisionParams> {
        DecisionParams::new(self.alpha, self.delta_u)
    }

    /// Checks every field against its documented range.
    pub fn validate(&self) -> Result<()> {
        self.lattice()?;
        if !(0.0..=1.0).contains(&self.p_r) {
            return Err(Error::InvalidProbability { name: "p_r", value: self.p_r });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidProbability { name: "alpha", value: self.alpha });
        }
        if !(0.0..=1.0).contains(&self.innovator_fraction) {
            return Err(Error::InvalidProbability { name: "innovator_fraction", value: self.innovator_fraction });
        }
        if !self.delta_u.is_finite() {
            return Err(Error::param("delta_u", "must be finite"));
        }
        if self.gamma == 0 {
            return Err(Error::param("gamma", "must be at least 1"));
        }
        let seeding_ticks = self.innovators().div_ceil(self.gamma) as u32;
        if self.max_ticks == 0 || self.max_ticks < seeding_ticks {
            return Err(Error::param(
                "max_ticks",
                format!("{} is shorter than the {seeding_ticks}-tick seeding schedule", self.max_ticks),
            ));
        }
        Ok(())
    }

    /// Rewired network for this run.
    pub fn network(&self) -> Result<SocialNetwork> {
        let lattice = build_lattice(self.lattice()?)?;
        rewire(&lattice, self.p_r, &mut stream(self.seed, Stream::Rewire))
    }

    pub fn seeding_plan(&self) -> Result<SeedingPlan> {
        plan_innovators(
            &self.lattice()?,
            self.sigma,
            self.innovators(),
            self.gamma,
            &mut stream(self.seed, Stream::Placement),
            &mut stream(self.seed, Stream::Schedule),
        )
    }
}

/// Lists of values whose Cartesian product is the sweep grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub alpha: f64,
    pub innovator_fraction: f64,
    pub max_ticks: u32,
    pub update: UpdateMode,
    pub k: Vec<usize>,
    pub delta_u: Vec<f64>,
    pub sigma: Vec<Pattern>,
    pub p_r: Vec<f64>,
    pub gamma: Vec<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        let base = SimConfig::default();
        GridSpec {
            rows: base.rows,
            cols: base.cols,
            alpha: base.alpha,
            innovator_fraction: base.innovator_fraction,
            max_ticks: base.max_ticks,
            update: base.update,
            k: GRID_K.to_vec(),
            delta_u: GRID_DELTA_U.to_vec(),
            sigma: Pattern::ALL.to_vec(),
            p_r: GRID_P_R.to_vec(),
            gamma: GRID_GAMMA.to_vec(),
        }
    }
}

impl GridSpec {
    /// Expands in the order k, delta_u, sigma, p_r, gamma (gamma fastest).
    pub fn expand(&self) -> Result<Vec<SimConfig>> {
        for (name, len) in [
            ("k", self.k.len()),
            ("delta_u", self.delta_u.len()),
            ("sigma", self.sigma.len()),
            ("p_r", self.p_r.len()),
            ("gamma", self.gamma.len()),
        ] {
            if len == 0 {
                return Err(Error::param(name, "grid axis is empty"));
            }
        }
        let mut out = Vec::new();
        for &k in &self.k {
            for &delta_u in &self.delta_u {
                for &sigma in &self.sigma {
                    for &p_r in &self.p_r {
                        for &gamma in &self.gamma {
                            let cfg = SimConfig {
                                rows: self.rows,
                                cols: self.cols,
                                k,
                                delta_u,
                                sigma,
                                p_r,
                                gamma,
                                alpha: self.alpha,
                                innovator_fraction: self.innovator_fraction,
                                max_ticks: self.max_ticks,
                                update: self.update,
                                seed: 0,
                                replication: 0,
                            };
                            cfg.validate()?;
                            out.push(cfg);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Induced macro parameters of one run, one row of the sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub config: SimConfig,
    /// Fitted coefficients; NaN when the fit failed.
    pub p: f64,
    pub q: f64,
    pub r_squared: f64,
    /// NaN when the fit failed or `q = 0`.
    pub takeoff: f64,
    pub saturation_tick: Option<u32>,
    pub converged: bool,
}

impl SweepRecord {
    pub fn bass(&self) -> Option<BassParams> {
        BassParams::new(self.p, self.q).ok()
    }

    pub fn is_fitted(&self) -> bool {
        self.p.is_finite() && self.q.is_finite()
    }

    pub fn matches(&self, filter: &SubsetFilter) -> bool {
        self.config.k == filter.k
            && (self.config.delta_u - filter.delta_u).abs() < 1e-9
            && self.config.sigma == filter.sigma
    }
}

/// Everything produced by one simulated run.
#[derive(Debug)]
pub struct RunOutput {
    pub trajectory: AdoptionTrajectory,
    pub fit: Result<FitResult>,
    pub record: SweepRecord,
}

/// Network, seeding, dynamics and fit for a single configuration.
pub fn run_single(config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let net = config.network()?;
    let plan = config.seeding_plan()?;
    let trajectory = simulate_with_mode(
        &net,
        &plan,
        config.decision_params()?,
        config.max_ticks,
        config.update,
        &mut stream(config.seed, Stream::Dynamics),
    )?;
    let fit = fit_bass(&trajectory, None);
    let mut record = SweepRecord {
        config: *config,
        p: f64::NAN,
        q: f64::NAN,
        r_squared: f64::NAN,
        takeoff: f64::NAN,
        saturation_tick: trajectory.saturated_at,
        converged: false,
    };
    if let Ok(f) = &fit {
        record.p = f.params.p;
        record.q = f.params.q;
        record.r_squared = f.r_squared;
        record.converged = f.converged;
        record.takeoff = takeoff_time(&f.params).map(|t| t.time).unwrap_or(f64::NAN);
    }
    Ok(RunOutput { trajectory, fit, record })
}

/// Runs every configuration `replications` times. Row order is config-major,
/// replication-minor and independent of `jobs`; each run's seed is mixed
/// from `master_seed`, its config index and its replication number.
pub fn run_sweep(grid: &[SimConfig], replications: u32, master_seed: u64, jobs: usize) -> Result<Vec<SweepRecord>> {
    if grid.is_empty() {
        return Err(Error::Empty("sweep grid"));
    }
    if replications == 0 {
        return Err(Error::param("replications", "must be at least 1"));
    }
    for cfg in grid {
        cfg.validate()?;
    }
    let tasks: Vec<SimConfig> = grid
        .iter()
        .enumerate()
        .flat_map(|(i, cfg)| {
            (0..replications).map(move |rep| SimConfig {
                seed: run_seed(master_seed, i as u64, rep as u64),
                replication: rep,
                ..*cfg
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::param("jobs", e.to_string()))?;
    let rows = pool.install(|| tasks.par_iter().map(run_record).collect());
    Ok(rows)
}

fn run_record(cfg: &SimConfig) -> SweepRecord {
    match run_single(cfg) {
        Ok(out) => out.record,
        // configs were validated up front, so this is a runtime failure of
        // the run itself; keep the row with empty results
        Err(_) => SweepRecord {
            config: *cfg,
            p: f64::NAN,
            q: f64::NAN,
            r_squared: f64::NAN,
            takeoff: f64::NAN,
            saturation_tick: None,
            converged: false,
        },
    }
}

/// Median of the finite values, `None` if there are none.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
