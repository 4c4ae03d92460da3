//! Irreversible threshold-adoption dynamics.
//!
//! Each agent weighs the share of adopting neighbours against its own
//! utility gain from adopting. Non-adopters switch when the overall utility
//! difference is strictly positive and never switch back. Innovators ignore
//! their neighbours and adopt on the tick the seeding plan assigns them.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::SocialNetwork;
use crate::seeding::SeedingPlan;

/// Utility differences within this distance of zero count as zero, so that
/// exact ties such as one adopter among five neighbours at `delta_u = 0.6`
/// resolve the same way regardless of floating-point rounding.
pub const UTILITY_TIE_EPS: f64 = 1e-12;

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionParams {
    /// Weight of social influence against personal preference.
    pub alpha: f64,
    /// Perceived utility gain of adopting over not adopting.
    pub delta_u: f64,
}

impl DecisionParams {
    pub fn new(alpha: f64, delta_u: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidProbability { name: "alpha", value: alpha });
        }
        if !delta_u.is_finite() {
            return Err(Error::param("delta_u", "must be finite"));
        }
        Ok(DecisionParams { alpha, delta_u })
    }

    pub fn with_delta_u(delta_u: f64) -> Self {
        DecisionParams { alpha: DEFAULT_ALPHA, delta_u }
    }
}

/// `U+ - U-` for an agent whose adopting-neighbour share is `v_plus`, with
/// the non-adopting share taken as `1 - v_plus`.
pub fn delta_utility(v_plus: f64, params: &DecisionParams) -> f64 {
    params.alpha * (2.0 * v_plus - 1.0) + (1.0 - params.alpha) * params.delta_u
}

fn prefers_adoption(v_plus: f64, params: &DecisionParams) -> bool {
    delta_utility(v_plus, params) > UTILITY_TIE_EPS
}

/// Minimum number of adopting neighbours, out of `neighbor_count`, that makes
/// adoption strictly preferable. `neighbor_count + 1` means never; 0 means
/// the agent adopts with no adopting neighbours at all.
pub fn adoption_threshold(neighbor_count: usize, params: &DecisionParams) -> usize {
    if neighbor_count == 0 {
        return if prefers_adoption(0.0, params) { 0 } else { 1 };
    }
    (0..=neighbor_count)
        .find(|&m| prefers_adoption(m as f64 / neighbor_count as f64, params))
        .unwrap_or(neighbor_count + 1)
}

/// How non-innovators are scheduled within a tick.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    /// Every decision at tick `t` reads the state at the start of `t`.
    #[default]
    Synchronous,
    /// Agents decide one at a time in a fresh random order each tick and see
    /// earlier decisions from the same tick.
    RandomSequential,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentState {
    pub adopted: bool,
    pub is_innovator: bool,
}

/// Cumulative adopter share per tick, starting at tick 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdoptionTrajectory {
    pub proportions: Vec<f64>,
    pub population: usize,
    pub saturated_at: Option<u32>,
}

impl AdoptionTrajectory {
    /// Wraps externally supplied proportions (e.g. read from CSV).
    pub fn from_proportions(proportions: Vec<f64>, population: usize) -> Result<Self> {
        if proportions.is_empty() {
            return Err(Error::Empty("trajectory"));
        }
        if let Some(bad) = proportions.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::param("proportion", format!("{bad} is outside [0, 1]")));
        }
        let saturated_at = proportions.iter().position(|&x| x >= 1.0).map(|t| t as u32);
        Ok(AdoptionTrajectory { proportions, population, saturated_at })
    }

    pub fn ticks(&self) -> usize {
        self.proportions.len()
    }

    pub fn final_proportion(&self) -> f64 {
        self.proportions.last().copied().unwrap_or(0.0)
    }

    /// Adopter count at each tick.
    pub fn adopters(&self) -> impl Iterator<Item = u64> + '_ {
        self.proportions.iter().map(move |&x| (x * self.population as f64).round() as u64)
    }
}

/// Stepwise state of one run, for callers that need to inspect agents
/// between ticks.
pub struct Simulation<'a> {
    net: &'a SocialNetwork,
    params: DecisionParams,
    mode: UpdateMode,
    schedule: Vec<&'a [usize]>,
    last_seed_tick: u32,
    states: Vec<AgentState>,
    adopter_neighbors: Vec<u32>,
    thresholds: Vec<u32>,
    adopters: usize,
    tick: u32,
    pending: Vec<usize>,
}

impl<'a> Simulation<'a> {
    pub fn new(
        net: &'a SocialNetwork,
        plan: &'a SeedingPlan,
        params: DecisionParams,
        mode: UpdateMode,
    ) -> Result<Self> {
        let n = net.node_count();
        let mut states = vec![AgentState::default(); n];
        for &node in &plan.positions {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, nodes: n });
            }
            if states[node].is_innovator {
                return Err(Error::param("plan", format!("node {node} scheduled twice")));
            }
            states[node].is_innovator = true;
        }
        let max_degree = (0..n).map(|i| net.degree(i)).max().unwrap_or(0);
        let by_degree: Vec<u32> = (0..=max_degree).map(|d| adoption_threshold(d, &params) as u32).collect();
        let thresholds = (0..n).map(|i| by_degree[net.degree(i)]).collect();
        Ok(Simulation {
            net,
            params,
            mode,
            schedule: plan.by_tick(),
            last_seed_tick: plan.last_tick(),
            states,
            adopter_neighbors: vec![0; n],
            thresholds,
            adopters: 0,
            tick: 0,
            pending: Vec::new(),
        })
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn last_seed_tick(&self) -> u32 {
        self.last_seed_tick
    }

    pub fn params(&self) -> &DecisionParams {
        &self.params
    }

    pub fn states(&self) -> &[AgentState] {
        &self.states
    }

    pub fn adopters(&self) -> usize {
        self.adopters
    }

    pub fn proportion(&self) -> f64 {
        self.adopters as f64 / self.net.node_count() as f64
    }

    /// Adopting neighbours of `node` in the current state.
    pub fn adopter_neighbors(&self, node: usize) -> u32 {
        self.adopter_neighbors[node]
    }

    fn adopt(&mut self, node: usize) {
        let state = &mut self.states[node];
        if state.adopted {
            return;
        }
        state.adopted = true;
        self.adopters += 1;
        for &j in self.net.neighbors(node) {
            self.adopter_neighbors[j as usize] += 1;
        }
    }

    #[inline]
    fn ready(&self, node: usize) -> bool {
        let s = self.states[node];
        !s.adopted && !s.is_innovator && self.adopter_neighbors[node] >= self.thresholds[node]
    }

    /// Advances one tick and returns how many agents adopted during it.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        self.tick += 1;
        let before = self.adopters;
        let seeds: &[usize] = self.schedule.get(self.tick as usize - 1).copied().unwrap_or(&[]);
        match self.mode {
            UpdateMode::Synchronous => {
                let mut pending = std::mem::take(&mut self.pending);
                pending.clear();
                pending.extend((0..self.states.len()).filter(|&i| self.ready(i)));
                for &node in seeds {
                    self.adopt(node);
                }
                for &node in &pending {
                    self.adopt(node);
                }
                self.pending = pending;
            }
            UpdateMode::RandomSequential => {
                for &node in seeds {
                    self.adopt(node);
                }
                let mut order: Vec<usize> = (0..self.states.len())
                    .filter(|&i| !self.states[i].adopted && !self.states[i].is_innovator)
                    .collect();
                order.shuffle(rng);
                for node in order {
                    if self.ready(node) {
                        self.adopt(node);
                    }
                }
            }
        }
        assert!(self.adopters >= before, "adoption must be irreversible");
        self.adopters - before
    }
}

/// Runs the synchronous dynamics until saturation, `max_ticks`, or two
/// consecutive ticks without change once seeding is over.
pub fn simulate<R: Rng + ?Sized>(
    net: &SocialNetwork,
    plan: &SeedingPlan,
    params: DecisionParams,
    max_ticks: u32,
    rng: &mut R,
) -> Result<AdoptionTrajectory> {
    simulate_with_mode(net, plan, params, max_ticks, UpdateMode::Synchronous, rng)
}

pub fn simulate_with_mode<R: Rng + ?Sized>(
    net: &SocialNetwork,
    plan: &SeedingPlan,
    params: DecisionParams,
    max_ticks: u32,
    mode: UpdateMode,
    rng: &mut R,
) -> Result<AdoptionTrajectory> {
    if max_ticks < plan.last_tick() || max_ticks == 0 {
        return Err(Error::param(
            "max_ticks",
            format!("{max_ticks} is shorter than the seeding schedule ({} ticks)", plan.last_tick()),
        ));
    }
    let mut sim = Simulation::new(net, plan, params, mode)?;
    let n = net.node_count();
    let mut proportions = vec![0.0];
    let mut saturated_at = None;
    let mut idle = 0;
    while sim.tick() < max_ticks {
        let changed = sim.step(rng);
        proportions.push(sim.proportion());
        if sim.adopters() == n {
            saturated_at = Some(sim.tick());
            break;
        }
        if sim.tick() > sim.last_seed_tick() {
            idle = if changed == 0 { idle + 1 } else { 0 };
            if idle >= 2 {
                break;
            }
        }
    }
    Ok(AdoptionTrajectory { proportions, population: n, saturated_at })
}
