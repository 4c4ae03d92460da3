#![allow(dead_code)]

use bassabm::Pattern;

/// One row of the published calibration table.
#[derive(Debug, Clone, Copy)]
pub struct Row {
    pub k: usize,
    pub delta_u: f64,
    pub sigma: Pattern,
    pub p_r: f64,
    pub gamma: usize,
    pub p: f64,
    pub q: f64,
    pub r_squared: f64,
    pub takeoff: f64,
}

// The table uses decimal commas and upper-case pattern names.
fn num(s: &str) -> f64 {
    s.trim().replace(',', ".").parse().unwrap_or_else(|_| panic!("bad number `{s}`"))
}

pub fn table() -> Vec<Row> {
    include_str!("../fixtures/published_fits.tsv")
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            assert_eq!(f.len(), 9, "bad row `{l}`");
            Row {
                k: f[0].parse().unwrap(),
                delta_u: num(f[1]),
                sigma: f[2].parse().unwrap(),
                p_r: num(f[3]),
                gamma: f[4].parse().unwrap(),
                p: num(f[5]),
                q: num(f[6]),
                r_squared: num(f[7]),
                takeoff: num(f[8]),
            }
        })
        .collect()
}

pub fn find(k: usize, delta_u: f64, sigma: Pattern, p_r: f64, gamma: usize) -> Row {
    *table()
        .iter()
        .find(|r| r.k == k && r.delta_u == delta_u && r.sigma == sigma && r.p_r == p_r && r.gamma == gamma)
        .expect("row not in table")
}
