//! Return-on-investment check for boosting the innovator introduction rate.

use serde::{Deserialize, Serialize};

use super::SweepRecord;
use crate::bass::{bass_curve, takeoff_time, BassParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiReport {
    pub adoption_base: f64,
    pub adoption_boosted: f64,
    pub profit_base: f64,
    /// Profit of the boosted scenario net of the investment.
    pub profit_boosted: f64,
    pub difference: f64,
    pub profitable: bool,
}

impl RoiReport {
    /// Compares `G(n_boosted) - investment` with `G(n_base)`; profitable when
    /// the gain strictly exceeds `roi_min`.
    pub fn from_adoption(
        adoption_base: f64,
        adoption_boosted: f64,
        investment: f64,
        roi_min: f64,
        profit: impl Fn(f64) -> f64,
    ) -> Self {
        let profit_base = profit(adoption_base);
        let profit_boosted = profit(adoption_boosted) - investment;
        let difference = profit_boosted - profit_base;
        RoiReport {
            adoption_base,
            adoption_boosted,
            profit_base,
            profit_boosted,
            difference,
            profitable: difference > roi_min,
        }
    }
}

/// Evaluates the criterion at `t_star` from two fitted Bass curves, with an
/// arbitrary profit function of the adopter share.
pub fn roi_criterion(
    base: &BassParams,
    boosted: &BassParams,
    t_star: f64,
    investment: f64,
    roi_min: f64,
    profit: impl Fn(f64) -> f64,
) -> Result<RoiReport> {
    let tb = takeoff_time(base)?.time;
    let tx = takeoff_time(boosted)?.time;
    if !(t_star > tb && t_star > tx) {
        return Err(Error::TStarBeforeTakeoff { t_star, base: tb, boosted: tx });
    }
    Ok(RoiReport::from_adoption(bass_curve(base, t_star), bass_curve(boosted, t_star), investment, roi_min, profit))
}

/// [`roi_criterion`] for two sweep records, with profit linear in adopters:
/// `G = profit_per_adopter * population * n`.
pub fn roi_check(
    base: &SweepRecord,
    boosted: &SweepRecord,
    t_star: f64,
    profit_per_adopter: f64,
    investment: f64,
    roi_min: f64,
) -> Result<RoiReport> {
    let b = base.bass().ok_or_else(|| Error::param("base", "record has no fitted parameters"))?;
    let x = boosted.bass().ok_or_else(|| Error::param("boosted", "record has no fitted parameters"))?;
    let population = base.config.population() as f64;
    roi_criterion(&b, &x, t_star, investment, roi_min, |n| profit_per_adopter * population * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SimConfig;

    fn record(p: f64, q: f64, gamma: usize) -> SweepRecord {
        SweepRecord {
            config: SimConfig { gamma, ..SimConfig::default() },
            p,
            q,
            r_squared: 1.0,
            takeoff: takeoff_time(&BassParams { p, q }).unwrap().time,
            saturation_tick: Some(30),
            converged: true,
        }
    }

    #[test]
    fn identical_records_are_not_profitable() {
        let r = record(0.01, 0.4, 250);
        let rep = roi_check(&r, &r, 20.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(rep.difference, 0.0);
        assert!(!rep.profitable);
    }

    #[test]
    fn linear_profit_arithmetic() {
        let rep = RoiReport::from_adoption(0.5, 0.7, 150.0, 0.0, |n| 1000.0 * n);
        assert!((rep.difference - 50.0).abs() < 1e-9);
        assert!(rep.profitable);
        let rep = RoiReport::from_adoption(0.5, 0.7, 150.0, 50.0, |n| 1000.0 * n);
        assert!(!rep.profitable);
    }

    #[test]
    fn t_star_must_follow_takeoff() {
        let a = record(0.0072863, 0.3187899, 125);
        let b = record(0.0325243, 0.3314418, 1000);
        assert!(matches!(roi_check(&a, &b, 5.0, 1.0, 0.0, 0.0), Err(Error::TStarBeforeTakeoff { .. })));
        assert!(roi_check(&a, &b, 7.6, 1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn faster_introduction_raises_adoption_after_takeoff() {
        // table rows for gamma = 125 and gamma = 1000 (k=8, du=0.6, compact, P_r=0)
        let base = record(0.0072863, 0.3187899, 125);
        let boosted = record(0.0325243, 0.3314418, 1000);
        for t in [8.0, 12.0, 20.0, 40.0] {
            let rep = roi_check(&base, &boosted, t, 1.0, 0.0, 0.0).unwrap();
            assert!(rep.adoption_boosted > rep.adoption_base);
        }
    }
}
