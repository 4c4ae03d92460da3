//! Bass diffusion model: closed-form adoption curve, its parameter
//! gradient, an RK4 integrator of the underlying ODE and the takeoff time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `2 + sqrt(3)`, the root factor of the third-derivative condition.
const TAKEOFF_FACTOR: f64 = 3.732_050_807_568_877;

/// Innovation (`p`) and imitation (`q`) coefficients, per tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BassParams {
    pub p: f64,
    pub q: f64,
}

impl BassParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::param("p/q", format!("non-finite parameters ({p}, {q})")));
        }
        if p <= 0.0 {
            return Err(Error::param("p", format!("must be positive, got {p}")));
        }
        if q < 0.0 {
            return Err(Error::param("q", format!("must be non-negative, got {q}")));
        }
        Ok(BassParams { p, q })
    }

    pub fn curve(&self, t: f64) -> f64 {
        bass_curve(self, t)
    }

    pub fn shape_ratio(&self) -> f64 {
        shape_ratio(self)
    }
}

/// Cumulative adopter share at time `t` starting from zero adopters.
pub fn bass_curve(params: &BassParams, t: f64) -> f64 {
    let e = (-(params.p + params.q) * t).exp();
    (1.0 - e) / (1.0 + (params.q / params.p) * e)
}

/// Analytic `(dn/dp, dn/dq)` of [`bass_curve`].
pub fn bass_gradient(params: &BassParams, t: f64) -> (f64, f64) {
    let BassParams { p, q } = *params;
    let e = (-(p + q) * t).exp();
    let r = q / p;
    let a = 1.0 - e;
    let b = 1.0 + r * e;
    // d e / dp = d e / dq = -t e
    let de = -t * e;
    let da = -de;
    let db_dp = (-q / (p * p)) * e + r * de;
    let db_dq = e / p + r * de;
    let b2 = b * b;
    ((da * b - a * db_dp) / b2, (da * b - a * db_dq) / b2)
}

/// Fourth-order Runge–Kutta solution of `dn/dt = (p + q n)(1 - n)` from
/// `n(0) = 0`, sampled at every step. The final step is shortened to land
/// on `t_end` exactly.
pub fn bass_ode_solve(params: &BassParams, t_end: f64, dt: f64) -> Result<Vec<(f64, f64)>> {
    if !params.p.is_finite() || !params.q.is_finite() {
        return Err(Error::param("p/q", "non-finite parameters"));
    }
    if !(dt > 0.0) || !(t_end > 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::param("dt/t_end", format!("need positive finite values, got dt={dt}, t_end={t_end}")));
    }
    let BassParams { p, q } = *params;
    let f = |n: f64| (p + q * n) * (1.0 - n);
    let steps = (t_end / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut n = 0.0;
    out.push((0.0, n));
    for i in 0..steps {
        let t0 = i as f64 * dt;
        let t1 = ((i + 1) as f64 * dt).min(t_end);
        let h = t1 - t0;
        let k1 = f(n);
        let k2 = f(n + 0.5 * h * k1);
        let k3 = f(n + 0.5 * h * k2);
        let k4 = f(n + h * k3);
        n += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((t1, n));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Takeoff {
    pub time: f64,
    /// Set when the inflection of adoption growth falls before launch
    /// (`q <= p (2 + sqrt 3)`), i.e. the curve never shows a takeoff.
    pub degenerate: bool,
}

/// Time at which the third derivative of the Bass curve vanishes,
/// `ln(q / (p (2 + sqrt 3))) / (p + q)`.
pub fn takeoff_time(params: &BassParams) -> Result<Takeoff> {
    let BassParams { p, q } = *params;
    if !(p > 0.0) {
        return Err(Error::param("p", format!("must be positive, got {p}")));
    }
    if !(q > 0.0) {
        return Err(Error::param("q", format!("takeoff needs q > 0, got {q}")));
    }
    let time = (q / (p * TAKEOFF_FACTOR)).ln() / (p + q);
    Ok(Takeoff { time, degenerate: time <= 0.0 })
}

pub fn shape_ratio(params: &BassParams) -> f64 {
    params.q / params.p
}
