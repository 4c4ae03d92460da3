//! CSV readers and writers for every file the toolkit exchanges.
//!
//! Floats are written with Rust's shortest round-trip formatting and `.` as
//! the decimal separator; missing values are empty cells.

use std::io::{Read, Write};

use crate::engine::AdoptionTrajectory;
use crate::error::{Error, Result};
use crate::network::SocialNetwork;
use crate::seeding::{Pattern, SeedingPlan};
use crate::sweep::{SimConfig, SweepRecord};

pub const TRAJECTORY_HEADER: [&str; 3] = ["tick", "adopters", "proportion"];
pub const SWEEP_HEADER: [&str; 12] = [
    "k",
    "delta_u",
    "sigma",
    "p_r",
    "gamma",
    "seed",
    "replication",
    "p",
    "q",
    "r_squared",
    "takeoff",
    "saturation_tick",
];

fn opt(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        String::new()
    }
}

fn parse_f64(s: &str, what: &str, line: u64) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("line {line}: bad {what} `{s}`")))
}

fn parse_opt_f64(s: &str, what: &str, line: u64) -> Result<f64> {
    if s.trim().is_empty() {
        Ok(f64::NAN)
    } else {
        parse_f64(s, what, line)
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

pub fn write_trajectory<W: Write>(w: W, traj: &AdoptionTrajectory) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_HEADER)?;
    for (t, (x, n)) in traj.proportions.iter().zip(traj.adopters()).enumerate() {
        out.write_record([t.to_string(), n.to_string(), x.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `tick,proportion` (an `adopters` column is optional). Ticks must
/// run 0, 1, 2, ... without gaps. The population is recovered from the
/// `adopters` column when present, otherwise it is 0.
pub fn read_trajectory<R: Read>(r: R) -> Result<AdoptionTrajectory> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let tick_col = column(&headers, "tick")?;
    let prop_col = column(&headers, "proportion")?;
    let adopters_col = column(&headers, "adopters").ok();
    let mut proportions = Vec::new();
    let mut population = 0usize;
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let tick = parse_f64(&rec[tick_col], "tick", line)?;
        if tick != proportions.len() as f64 {
            return Err(Error::Parse(format!("line {line}: expected tick {}, found {tick}", proportions.len())));
        }
        let x = parse_f64(&rec[prop_col], "proportion", line)?;
        if let Some(c) = adopters_col {
            let n = parse_f64(&rec[c], "adopters", line)?;
            if x > 0.0 {
                population = (n / x).round() as usize;
            }
        }
        proportions.push(x);
    }
    AdoptionTrajectory::from_proportions(proportions, population)
}

pub fn write_sweep<W: Write>(w: W, records: &[SweepRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_HEADER)?;
    for r in records {
        let c = &r.config;
        out.write_record([
            c.k.to_string(),
            c.delta_u.to_string(),
            c.sigma.to_string(),
            c.p_r.to_string(),
            c.gamma.to_string(),
            c.seed.to_string(),
            c.replication.to_string(),
            opt(r.p),
            opt(r.q),
            opt(r.r_squared),
            opt(r.takeoff),
            r.saturation_tick.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a sweep CSV. Fields not stored in the file (lattice size, alpha,
/// innovator share, tick limit) are taken from `base`.
pub fn read_sweep<R: Read>(r: R, base: &SimConfig) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let cols: Vec<usize> = SWEEP_HEADER.iter().map(|h| column(&headers, h)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let f = |i: usize| &rec[cols[i]];
        let int = |i: usize, what: &str| -> Result<u64> {
            f(i).parse().map_err(|_| Error::Parse(format!("line {line}: bad {what} `{}`", f(i))))
        };
        let config = SimConfig {
            k: int(0, "k")? as usize,
            delta_u: parse_f64(f(1), "delta_u", line)?,
            sigma: f(2).parse::<Pattern>()?,
            p_r: parse_f64(f(3), "p_r", line)?,
            gamma: int(4, "gamma")? as usize,
            seed: int(5, "seed")?,
            replication: int(6, "replication")? as u32,
            ..*base
        };
        let sat = f(11);
        out.push(SweepRecord {
            config,
            p: parse_opt_f64(f(7), "p", line)?,
            q: parse_opt_f64(f(8), "q", line)?,
            r_squared: parse_opt_f64(f(9), "r_squared", line)?,
            takeoff: parse_opt_f64(f(10), "takeoff", line)?,
            saturation_tick: if sat.is_empty() { None } else { Some(int(11, "saturation_tick")? as u32) },
            converged: true,
        });
    }
    Ok(out)
}

pub fn write_points<W: Write>(w: W, points: &[(f64, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["p", "q"])?;
    for (p, q) in points {
        out.write_record([p.to_string(), q.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_points<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let (pc, qc) = (column(&headers, "p")?, column(&headers, "q")?);
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let line = line_of(&rec);
            Ok((parse_f64(&rec[pc], "p", line)?, parse_f64(&rec[qc], "q", line)?))
        })
        .collect()
}

/// An externally estimated `(p, q)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPoint {
    pub label: String,
    pub p: f64,
    pub q: f64,
}

/// Reads `label,p,q`.
pub fn read_empirical<R: Read>(r: R) -> Result<Vec<EmpiricalPoint>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let (lc, pc, qc) = (column(&headers, "label")?, column(&headers, "p")?, column(&headers, "q")?);
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let line = line_of(&rec);
            Ok(EmpiricalPoint {
                label: rec[lc].to_string(),
                p: parse_f64(&rec[pc], "p", line)?,
                q: parse_f64(&rec[qc], "q", line)?,
            })
        })
        .collect()
}

pub fn write_edges<W: Write>(w: W, net: &SocialNetwork) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["src", "dst"])?;
    for (a, b) in net.edges() {
        out.write_record([a.to_string(), b.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edges<R: Read>(r: R, node_count: usize) -> Result<SocialNetwork> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let (sc, dc) = (column(&headers, "src")?, column(&headers, "dst")?);
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let node = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("line {line}: bad node `{s}`")));
        edges.push((node(&rec[sc])?, node(&rec[dc])?));
    }
    SocialNetwork::from_edges(node_count, &edges)
}

pub fn write_plan<W: Write>(w: W, plan: &SeedingPlan) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node", "tick"])?;
    for (node, tick) in plan.positions.iter().zip(&plan.activation_ticks) {
        out.write_record([node.to_string(), tick.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_lattice, LatticeSpec, Neighborhood};

    #[test]
    fn trajectory_reader_rejects_gaps_and_missing_columns() {
        let gap = "tick,proportion\n0,0\n2,0.5\n";
        assert!(read_trajectory(gap.as_bytes()).is_err());
        let missing = "t,proportion\n0,0\n";
        assert!(read_trajectory(missing.as_bytes()).is_err());
        let ok = "tick,proportion\n0,0\n1,0.25\n2,1\n";
        let t = read_trajectory(ok.as_bytes()).unwrap();
        assert_eq!(t.proportions, vec![0.0, 0.25, 1.0]);
    }

    #[test]
    fn trajectory_round_trip_keeps_population() {
        let t = AdoptionTrajectory::from_proportions(vec![0.0, 0.025, 0.5, 1.0], 40_000).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &t).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("tick,adopters,proportion\n0,0,0\n1,1000,0.025\n"));
        assert_eq!(read_trajectory(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn edge_list_round_trip() {
        let net = build_lattice(LatticeSpec::new(4, 3, Neighborhood::Moore).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_edges(&mut buf, &net).unwrap();
        let back = read_edges(buf.as_slice(), net.node_count()).unwrap();
        assert_eq!(back.edges().collect::<Vec<_>>(), net.edges().collect::<Vec<_>>());
    }

    #[test]
    fn empirical_points() {
        let src = "label,p,q\ncolor tv,0.005,0.84\ndryer,0.017,0.36\n";
        let pts = read_empirical(src.as_bytes()).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].label, "color tv");
        assert_eq!(pts[1].q, 0.36);
    }
}
