//! Agent-based innovation diffusion on lattice social networks, and the
//! Bass-model machinery used to read macro-level parameters off the
//! simulated adoption curves.
//!
//! The pipeline is: [`network`] builds and rewires a 2-D lattice,
//! [`seeding`] places and schedules innovators, [`engine`] runs the
//! irreversible threshold dynamics, [`calibrate`] fits `(p, q)` with
//! [`bass`] as the model curve, and [`sweep`] runs whole parameter grids
//! and analyzes the induced `(p, q)` regions.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bass;
pub mod calibrate;
pub mod cli;
pub mod engine;
mod error;
pub mod io;
pub mod network;
pub mod rng;
pub mod seeding;
pub mod sweep;

pub use bass::BassParams;
pub use calibrate::{fit_bass, FitResult};
pub use engine::{simulate, AdoptionTrajectory, DecisionParams, UpdateMode};
pub use error::{Error, Result};
pub use network::{build_lattice, LatticeSpec, Neighborhood, NetworkStats, SocialNetwork};
pub use seeding::{Pattern, SeedingPlan};
pub use sweep::{SimConfig, SweepRecord};
