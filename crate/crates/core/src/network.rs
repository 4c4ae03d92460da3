//! Lattice social networks and small-world rewiring.

use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    /// Orthogonal neighbours only (interior degree 4).
    VonNeumann,
    /// Orthogonal and diagonal neighbours (interior degree 8).
    Moore,
}

impl Neighborhood {
    pub fn interior_degree(self) -> usize {
        match self {
            Neighborhood::VonNeumann => 4,
            Neighborhood::Moore => 8,
        }
    }

    pub fn from_degree(k: usize) -> Option<Self> {
        match k {
            4 => Some(Neighborhood::VonNeumann),
            8 => Some(Neighborhood::Moore),
            _ => None,
        }
    }

    fn offsets(self) -> &'static [(isize, isize)] {
        const VN: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        const MOORE: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];
        match self {
            Neighborhood::VonNeumann => &VN,
            Neighborhood::Moore => &MOORE,
        }
    }
}

/// Dimensions and neighbourhood of a non-toroidal 2-D lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    pub neighborhood: Neighborhood,
}

impl LatticeSpec {
    pub fn new(rows: usize, cols: usize, neighborhood: Neighborhood) -> Result<Self> {
        let spec = LatticeSpec { rows, cols, neighborhood };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::InvalidLattice { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    #[inline]
    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node / self.cols, node % self.cols)
    }
}

/// Undirected simple graph over lattice nodes. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialNetwork {
    adjacency: Vec<Vec<u32>>,
    base_spec: Option<LatticeSpec>,
    rewire_prob: f64,
    rewired_edges: usize,
    edge_count: usize,
}

impl SocialNetwork {
    /// Builds a network from an explicit undirected edge list. Self-loops and
    /// duplicates are rejected.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            for n in [a, b] {
                if n >= node_count {
                    return Err(Error::NodeOutOfRange { node: n, nodes: node_count });
                }
            }
            if a == b {
                return Err(Error::param("edges", format!("self-loop at node {a}")));
            }
            if adjacency[a].contains(&(b as u32)) {
                return Err(Error::param("edges", format!("duplicate edge ({a}, {b})")));
            }
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(SocialNetwork { adjacency, base_spec: None, rewire_prob: 0.0, rewired_edges: 0, edge_count: edges.len() })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adjacency[node]
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn base_spec(&self) -> Option<&LatticeSpec> {
        self.base_spec.as_ref()
    }

    pub fn rewire_prob(&self) -> f64 {
        self.rewire_prob
    }

    /// Number of edges that were selected for rewiring.
    pub fn rewired_edges(&self) -> usize {
        self.rewired_edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&(b as u32)).is_ok()
    }

    /// Edges with the smaller index first, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(|&j| j as usize).filter(move |&j| j > i).map(move |j| (i, j)))
    }
}

/// The regular lattice: every node linked to its first-order neighbours,
/// fewer at the edges and corners (no wrap-around).
pub fn build_lattice(spec: LatticeSpec) -> Result<SocialNetwork> {
    spec.validate()?;
    let mut adjacency = Vec::with_capacity(spec.node_count());
    let mut degree_sum = 0;
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            let mut list = Vec::with_capacity(spec.neighborhood.interior_degree());
            for &(dr, dc) in spec.neighborhood.offsets() {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr >= 0 && nc >= 0 && (nr as usize) < spec.rows && (nc as usize) < spec.cols {
                    list.push(spec.index(nr as usize, nc as usize) as u32);
                }
            }
            // offsets are in row-major order, so `list` is already sorted
            degree_sum += list.len();
            adjacency.push(list);
        }
    }
    Ok(SocialNetwork {
        adjacency,
        base_spec: Some(spec),
        rewire_prob: 0.0,
        rewired_edges: 0,
        edge_count: degree_sum / 2,
    })
}

/// Watts–Strogatz rewiring of a pure lattice.
///
/// Edges are visited in canonical order `(i, j)`, `i < j`. Each is selected
/// with probability `p_r`; a selected edge keeps `i` and moves its other end
/// to a uniformly drawn node, redrawing on self-loops and duplicates. The
/// edge count is unchanged.
pub fn rewire<R: Rng + ?Sized>(net: &SocialNetwork, p_r: f64, rng: &mut R) -> Result<SocialNetwork> {
    if !(0.0..=1.0).contains(&p_r) {
        return Err(Error::InvalidProbability { name: "p_r", value: p_r });
    }
    if net.rewire_prob > 0.0 || net.rewired_edges > 0 {
        return Err(Error::AlreadyRewired(net.rewire_prob));
    }
    let n = net.node_count();
    let edges: Vec<(usize, usize)> = net.edges().collect();
    let mut adjacency = net.adjacency.clone();
    let mut rewired = 0;

    for (i, j) in edges {
        if !rng.gen_bool(p_r) {
            continue;
        }
        rewired += 1;
        remove(&mut adjacency[i], j);
        remove(&mut adjacency[j], i);
        // j itself is always a valid draw after removal, so this terminates
        let target = loop {
            let t = rng.gen_range(0..n);
            if t != i && !adjacency[i].contains(&(t as u32)) {
                break t;
            }
        };
        adjacency[i].push(target as u32);
        adjacency[target].push(i as u32);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(SocialNetwork {
        adjacency,
        base_spec: net.base_spec,
        rewire_prob: p_r,
        rewired_edges: rewired,
        edge_count: net.edge_count,
    })
}

fn remove(list: &mut Vec<u32>, node: usize) {
    if let Some(pos) = list.iter().position(|&x| x as usize == node) {
        list.swap_remove(pos);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_degree: f64,
    /// Mean shortest-path length in hops over reached (source, target) pairs.
    pub mean_path_length: f64,
    pub clustering_coefficient: f64,
    pub sources: usize,
    /// Pairs (source, target) with no connecting path, excluded from the mean.
    pub unreachable_pairs: u64,
}

/// Degree, sampled BFS path length and mean local clustering.
///
/// When `sample_size >= node_count` every node is a BFS source and the
/// path length is exact.
pub fn network_stats<R: Rng + ?Sized>(net: &SocialNetwork, sample_size: usize, rng: &mut R) -> NetworkStats {
    let n = net.node_count();
    let sources: Vec<usize> =
        if sample_size >= n { (0..n).collect() } else { index::sample(rng, n, sample_size).into_vec() };

    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut total_hops: u64 = 0;
    let mut reached_pairs: u64 = 0;
    let mut unreachable: u64 = 0;
    for &s in &sources {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[s] = 0;
        queue.clear();
        queue.push_back(s);
        let mut reached = 0u64;
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for &v in net.neighbors(u) {
                let v = v as usize;
                if dist[v] == u32::MAX {
                    dist[v] = du + 1;
                    total_hops += (du + 1) as u64;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached_pairs += reached;
        unreachable += (n as u64 - 1) - reached;
    }

    let mean_path_length = if reached_pairs == 0 { 0.0 } else { total_hops as f64 / reached_pairs as f64 };
    let clustering_coefficient =
        if n == 0 { 0.0 } else { (0..n).map(|i| local_clustering(net, i)).sum::<f64>() / n as f64 };
    NetworkStats {
        node_count: n,
        edge_count: net.edge_count(),
        mean_degree: if n == 0 { 0.0 } else { 2.0 * net.edge_count() as f64 / n as f64 },
        mean_path_length,
        clustering_coefficient,
        sources: sources.len(),
        unreachable_pairs: unreachable,
    }
}

/// Fraction of neighbour pairs that are themselves linked; 0 below degree 2.
pub fn local_clustering(net: &SocialNetwork, node: usize) -> f64 {
    let nbrs = net.neighbors(node);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (a, &u) in nbrs.iter().enumerate() {
        for &v in &nbrs[a + 1..] {
            if net.has_edge(u as usize, v as usize) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (d * (d - 1)) as f64
}
