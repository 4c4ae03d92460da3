//! Convex envelopes of induced `(p, q)` points and lookups against them.

use serde::{Deserialize, Serialize};

use super::SweepRecord;
use crate::error::{Error, Result};
use crate::seeding::Pattern;

pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Selects the records of one `(k, delta_u, sigma)` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetFilter {
    pub k: usize,
    pub delta_u: f64,
    pub sigma: Pattern,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub filter: Option<SubsetFilter>,
    /// Counter-clockwise, starting at the lowest (then leftmost) vertex.
    pub hull_vertices: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain. Collinear points on the hull are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // upper chain may not eat into the lower one
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(Error::TooFewPoints(hull.len()));
    }
    let start =
        (0..hull.len()).min_by(|&a, &b| hull[a].1.total_cmp(&hull[b].1).then(hull[a].0.total_cmp(&hull[b].0))).unwrap();
    hull.rotate_left(start);
    Ok(hull)
}

/// Convex envelope of the fitted `(p, q)` of the records matching `filter`.
pub fn envelope(records: &[SweepRecord], filter: SubsetFilter) -> Result<Envelope> {
    let points: Vec<(f64, f64)> =
        records.iter().filter(|r| r.matches(&filter) && r.is_fitted()).map(|r| (r.p, r.q)).collect();
    Ok(Envelope { filter: Some(filter), hull_vertices: convex_hull(&points)? })
}

pub fn locate(point: (f64, f64), env: &Envelope) -> Location {
    let h = &env.hull_vertices;
    let mut on_edge = false;
    for i in 0..h.len() {
        let c = cross(h[i], h[(i + 1) % h.len()], point);
        if c < -BOUNDARY_TOLERANCE {
            return Location::Outside;
        }
        if c <= BOUNDARY_TOLERANCE {
            on_edge = true;
        }
    }
    if on_edge {
        Location::Boundary
    } else {
        Location::Inside
    }
}

/// Record whose `(p, q)` is closest to `point`, each axis scaled by the
/// records' range on it. Ties go to the earlier record.
pub fn nearest_micro(point: (f64, f64), records: &[SweepRecord]) -> Result<&SweepRecord> {
    let fitted: Vec<&SweepRecord> = records.iter().filter(|r| r.is_fitted()).collect();
    if fitted.is_empty() {
        return Err(Error::Empty("records"));
    }
    let span = |f: fn(&SweepRecord) -> f64| {
        let (lo, hi) =
            fitted.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(f(r)), hi.max(f(r))));
        if hi > lo {
            hi - lo
        } else {
            1.0
        }
    };
    let (sp, sq) = (span(|r| r.p), span(|r| r.q));
    let mut best = fitted[0];
    let mut best_d = f64::INFINITY;
    for r in fitted {
        let d = ((r.p - point.0) / sp).powi(2) + ((r.q - point.1) / sq).powi(2);
        if d < best_d {
            best_d = d;
            best = r;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(points: &[(f64, f64)]) -> Envelope {
        Envelope { filter: None, hull_vertices: convex_hull(points).unwrap() }
    }

    #[test]
    fn triangle_is_its_own_hull() {
        let h = convex_hull(&[(1.0, 1.0), (0.0, 0.0), (2.0, 0.5)]).unwrap();
        assert_eq!(h, vec![(0.0, 0.0), (2.0, 0.5), (1.0, 1.0)]);
    }

    #[test]
    fn interior_and_collinear_points_dropped() {
        let h = convex_hull(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5), (0.5, 0.0)]).unwrap();
        assert_eq!(h, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }

    #[test]
    fn starts_at_lowest_then_leftmost() {
        let h = convex_hull(&[(0.0, 1.0), (1.0, 0.0), (3.0, 0.0), (2.0, 2.0)]).unwrap();
        assert_eq!(h[0], (1.0, 0.0));
        // counter-clockwise: positive signed area
        let area: f64 = (0..h.len()).map(|i| cross((0.0, 0.0), h[i], h[(i + 1) % h.len()])).sum();
        assert!(area > 0.0);
    }

    #[test]
    fn too_few_or_collinear() {
        assert!(matches!(convex_hull(&[(0.0, 0.0), (1.0, 1.0)]), Err(Error::TooFewPoints(_))));
        assert!(matches!(convex_hull(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]), Err(Error::TooFewPoints(_))));
        assert!(convex_hull(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]).is_err());
    }

    #[test]
    fn point_location() {
        let e = env(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(locate((0.5, 0.5), &e), Location::Inside);
        assert_eq!(locate((1.0, 1.0), &e), Location::Boundary);
        assert_eq!(locate((0.5, 0.0), &e), Location::Boundary);
        assert_eq!(locate((10.0, 10.0), &e), Location::Outside);
        assert_eq!(locate((-1e-9, 0.5), &e), Location::Outside);
    }
}
