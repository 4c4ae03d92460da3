//! Nonlinear least-squares fit of the Bass curve to an adoption trajectory.
//!
//! Levenberg–Marquardt with Marquardt's diagonal scaling, the analytic
//! gradient from [`crate::bass::bass_gradient`], and projection onto the box
//! `p in [1e-6, 1]`, `q in [0, 1]`.

use serde::{Deserialize, Serialize};

use crate::bass::{bass_curve, bass_gradient, BassParams};
use crate::engine::AdoptionTrajectory;
use crate::error::{Error, Result};

pub const P_MIN: f64 = 1e-6;
pub const P_MAX: f64 = 1.0;
pub const Q_MIN: f64 = 0.0;
pub const Q_MAX: f64 = 1.0;
pub const STEP_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 500;
pub const MIN_TICKS: usize = 4;

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFlags {
    pub p_lower: bool,
    pub p_upper: bool,
    pub q_lower: bool,
    pub q_upper: bool,
}

impl BoundFlags {
    pub fn any(&self) -> bool {
        self.p_lower || self.p_upper || self.q_lower || self.q_upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BassParams,
    pub r_squared: f64,
    /// Sum of squared residuals at the solution.
    pub residual_sum: f64,
    pub iterations: usize,
    pub converged: bool,
    pub at_bound: BoundFlags,
    /// Number of trajectory points used (tick 0 through the fit window end).
    pub points: usize,
    /// Residual sum after each accepted step, starting from the initial guess.
    #[serde(skip)]
    pub ssr_history: Vec<f64>,
}

/// Ticks used for fitting: tick 0 through the first saturated tick, or the
/// whole trajectory if it never saturates.
pub fn fit_window(traj: &AdoptionTrajectory) -> &[f64] {
    let end = traj.proportions.iter().position(|&x| x >= 1.0).map(|t| t + 1).unwrap_or(traj.proportions.len());
    &traj.proportions[..end]
}

fn project(p: f64, q: f64) -> (f64, f64) {
    (p.clamp(P_MIN, P_MAX), q.clamp(Q_MIN, Q_MAX))
}

fn ssr(data: &[f64], params: &BassParams) -> f64 {
    data.iter().enumerate().map(|(t, &y)| (y - bass_curve(params, t as f64)).powi(2)).sum()
}

pub fn fit_bass(traj: &AdoptionTrajectory, init: Option<BassParams>) -> Result<FitResult> {
    let data = fit_window(traj);
    if data.len() < MIN_TICKS {
        return Err(Error::TrajectoryTooShort { needed: MIN_TICKS, got: data.len() });
    }
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let ss_tot: f64 = data.iter().map(|y| (y - mean).powi(2)).sum();
    if !(ss_tot > 0.0) {
        return Err(Error::DegenerateTrajectory);
    }

    let start = init.unwrap_or(BassParams { p: data[1].max(1e-3), q: 0.5 });
    let (p0, q0) = project(start.p, start.q);
    let mut x = BassParams { p: p0, q: q0 };
    let mut current = ssr(data, &x);
    let mut history = vec![current];
    let mut lambda = LAMBDA_INIT;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // normal equations (J^T J + lambda diag) delta = J^T (y - f)
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (t, &y) in data.iter().enumerate() {
            let t = t as f64;
            let (dp, dq) = bass_gradient(&x, t);
            let r = y - bass_curve(&x, t);
            a11 += dp * dp;
            a12 += dp * dq;
            a22 += dq * dq;
            g1 += dp * r;
            g2 += dq * r;
        }
        let d1 = if a11 > 0.0 { a11 } else { 1.0 };
        let d2 = if a22 > 0.0 { a22 } else { 1.0 };

        let mut accepted = false;
        while lambda <= LAMBDA_MAX {
            let m11 = a11 + lambda * d1;
            let m22 = a22 + lambda * d2;
            let det = m11 * m22 - a12 * a12;
            if det.is_finite() && det > 0.0 {
                let dp = (m22 * g1 - a12 * g2) / det;
                let dq = (m11 * g2 - a12 * g1) / det;
                let (np, nq) = project(x.p + dp, x.q + dq);
                let candidate = BassParams { p: np, q: nq };
                let trial = ssr(data, &candidate);
                if trial < current {
                    let rel_p = (np - x.p).abs() / x.p.abs().max(P_MIN);
                    let rel_q = (nq - x.q).abs() / x.q.abs().max(P_MIN);
                    x = candidate;
                    current = trial;
                    history.push(current);
                    lambda = (lambda / 10.0).max(1e-15);
                    accepted = true;
                    if rel_p.max(rel_q) < STEP_TOLERANCE {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no descent direction left at any damping: the step has
            // shrunk to nothing around the current point
            converged = true;
        }
        if converged {
            break;
        }
    }

    Ok(FitResult {
        params: x,
        r_squared: 1.0 - current / ss_tot,
        residual_sum: current,
        iterations,
        converged,
        at_bound: BoundFlags {
            p_lower: x.p <= P_MIN,
            p_upper: x.p >= P_MAX,
            q_lower: x.q <= Q_MIN,
            q_upper: x.q >= Q_MAX,
        },
        points: data.len(),
        ssr_history: history,
    })
}

/// Analytic minus central-difference partial derivatives of the Bass curve,
/// `(d/dp, d/dq)`, with step `1e-6`. The step is shrunk for `p` below
/// `2e-6`; at `q = 0` a forward difference is used.
pub fn jacobian_check(params: &BassParams, t: f64) -> (f64, f64) {
    const H: f64 = 1e-6;
    let (ap, aq) = bass_gradient(params, t);
    let n = |p: f64, q: f64| bass_curve(&BassParams { p, q }, t);
    let BassParams { p, q } = *params;

    let hp = H.min(p / 2.0);
    let fp = (n(p + hp, q) - n(p - hp, q)) / (2.0 * hp);
    let fq = if q >= H { (n(p, q + H) - n(p, q - H)) / (2.0 * H) } else { (n(p, q + H) - n(p, q)) / H };
    (ap - fp, aq - fq)
}
