//! Innovator placement and activation schedules.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::LatticeSpec;

/// Share of the population seeded as innovators.
pub const DEFAULT_INNOVATOR_FRACTION: f64 = 0.025;

/// Number of sub-clusters used by [`Pattern::Intermediate`].
pub const INTERMEDIATE_CLUSTERS: usize = 5;

/// Spatial dispersion of the innovators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// One block around the lattice centre.
    Compact,
    /// Five blocks: the centre plus the four quadrant centres.
    Intermediate,
    /// Uniformly scattered.
    Uniform,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::Compact, Pattern::Intermediate, Pattern::Uniform];

    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::Compact => "compact",
            Pattern::Intermediate => "intermediate",
            Pattern::Uniform => "uniform",
        }
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "compact" => Ok(Pattern::Compact),
            "intermediate" => Ok(Pattern::Intermediate),
            "uniform" => Ok(Pattern::Uniform),
            _ => Err(Error::Parse(format!("unknown seeding pattern `{s}`"))),
        }
    }
}

/// Which innovators adopt, and when.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedingPlan {
    pub pattern: Option<Pattern>,
    pub total_innovators: usize,
    pub rate_gamma: usize,
    pub positions: Vec<usize>,
    /// Parallel to `positions`; ticks start at 1.
    pub activation_ticks: Vec<u32>,
}

impl SeedingPlan {
    /// Tick of the final activation, 0 for an empty plan.
    pub fn last_tick(&self) -> u32 {
        self.activation_ticks.last().copied().unwrap_or(0)
    }

    /// Activations grouped by tick: element `t - 1` lists the nodes for tick `t`.
    pub fn by_tick(&self) -> Vec<&[usize]> {
        if self.rate_gamma == 0 {
            return Vec::new();
        }
        self.positions.chunks(self.rate_gamma).collect()
    }
}

/// Innovator count for a population, rounded to the nearest agent.
pub fn innovator_count(node_count: usize, fraction: f64) -> usize {
    (fraction * node_count as f64).round() as usize
}

/// Rate of innovator introduction implied by an innovation coefficient,
/// `gamma = p * N`.
pub fn gamma_for_p(p: f64, n: usize) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::param("p", format!("must be positive, got {p}")));
    }
    if n == 0 {
        return Err(Error::param("n", "population must be positive"));
    }
    Ok(p * n as f64)
}

fn chebyshev(spec: &LatticeSpec, node: usize, center: (usize, usize)) -> usize {
    let (r, c) = spec.coords(node);
    r.abs_diff(center.0).max(c.abs_diff(center.1))
}

/// The `count` cells closest to `center` in Chebyshev distance, ties broken
/// row-major, nearest first.
fn nearest_block(spec: &LatticeSpec, center: (usize, usize), count: usize) -> Vec<usize> {
    let mut cells: Vec<usize> = (0..spec.node_count()).collect();
    cells.sort_by_key(|&i| (chebyshev(spec, i, center), i));
    cells.truncate(count);
    cells
}

pub fn cluster_centers(spec: &LatticeSpec) -> [(usize, usize); INTERMEDIATE_CLUSTERS] {
    let (r, c) = (spec.rows, spec.cols);
    [(r / 2, c / 2), (r / 4, c / 4), (r / 4, 3 * c / 4), (3 * r / 4, c / 4), (3 * r / 4, 3 * c / 4)]
}

pub fn place_innovators<R: Rng + ?Sized>(
    spec: &LatticeSpec,
    pattern: Pattern,
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    spec.validate()?;
    let n = spec.node_count();
    if count > n {
        return Err(Error::TooManyInnovators { count, nodes: n });
    }
    match pattern {
        Pattern::Compact => Ok(nearest_block(spec, (spec.rows / 2, spec.cols / 2), count)),
        Pattern::Uniform => Ok(index::sample(rng, n, count).into_vec()),
        Pattern::Intermediate => {
            let centers = cluster_centers(spec);
            let base = count / INTERMEDIATE_CLUSTERS;
            let extra = count % INTERMEDIATE_CLUSTERS;
            let mut seen = HashSet::with_capacity(count);
            let mut out = Vec::with_capacity(count);
            for (k, &center) in centers.iter().enumerate() {
                let size = if k == 0 { base + extra } else { base };
                for cell in nearest_block(spec, center, size) {
                    if !seen.insert(cell) {
                        return Err(Error::OverlappingClusters { rows: spec.rows, cols: spec.cols, count });
                    }
                    out.push(cell);
                }
            }
            Ok(out)
        }
    }
}

/// Randomly orders the innovators and activates them `gamma` per tick from
/// tick 1; the last block may be partial.
pub fn schedule_innovators<R: Rng + ?Sized>(positions: &[usize], gamma: usize, rng: &mut R) -> Result<SeedingPlan> {
    if gamma == 0 {
        return Err(Error::param("gamma", "must be at least 1"));
    }
    let mut positions = positions.to_vec();
    positions.shuffle(rng);
    let activation_ticks = (0..positions.len()).map(|i| (i / gamma) as u32 + 1).collect();
    Ok(SeedingPlan { pattern: None, total_innovators: positions.len(), rate_gamma: gamma, positions, activation_ticks })
}

/// Placement followed by scheduling, using independent streams.
pub fn plan_innovators<R: Rng + ?Sized>(
    spec: &LatticeSpec,
    pattern: Pattern,
    count: usize,
    gamma: usize,
    placement_rng: &mut R,
    schedule_rng: &mut R,
) -> Result<SeedingPlan> {
    let positions = place_innovators(spec, pattern, count, placement_rng)?;
    let mut plan = schedule_innovators(&positions, gamma, schedule_rng)?;
    plan.pattern = Some(pattern);
    Ok(plan)
}
