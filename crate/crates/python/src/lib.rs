//! Python bindings for `bassabm`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bassabm::bass::{bass_curve as curve, takeoff_time as takeoff};
use bassabm::network::{network_stats, rewire};
use bassabm::rng::{stream, Stream};
use bassabm::sweep::{self, GridSpec, Location};
use bassabm::{
    AdoptionTrajectory, BassParams, LatticeSpec, Neighborhood, Pattern, SimConfig, SocialNetwork, UpdateMode,
};

fn err(e: bassabm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn neighborhood(k: usize) -> PyResult<Neighborhood> {
    Neighborhood::from_degree(k).ok_or_else(|| PyValueError::new_err(format!("k must be 4 or 8, got {k}")))
}

fn update_mode(name: &str) -> PyResult<UpdateMode> {
    match name {
        "synchronous" => Ok(UpdateMode::Synchronous),
        "random_sequential" => Ok(UpdateMode::RandomSequential),
        _ => Err(PyValueError::new_err(format!("unknown update mode `{name}`"))),
    }
}

fn pattern(name: &str) -> PyResult<Pattern> {
    name.parse().map_err(err)
}

/// Lattice social network, optionally rewired.
#[pyclass(name = "Network", frozen)]
struct PyNetwork {
    inner: SocialNetwork,
}

#[pymethods]
impl PyNetwork {
    #[staticmethod]
    #[pyo3(signature = (rows, cols, k = 8))]
    fn lattice(rows: usize, cols: usize, k: usize) -> PyResult<Self> {
        let spec = LatticeSpec::new(rows, cols, neighborhood(k)?).map_err(err)?;
        Ok(PyNetwork { inner: bassabm::build_lattice(spec).map_err(err)? })
    }

    #[staticmethod]
    fn from_edges(node_count: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyNetwork { inner: SocialNetwork::from_edges(node_count, &edges).map_err(err)? })
    }

    /// Returns a rewired copy.
    #[pyo3(signature = (p_r, seed = 0))]
    fn rewired(&self, p_r: f64, seed: u64) -> PyResult<Self> {
        Ok(PyNetwork { inner: rewire(&self.inner, p_r, &mut stream(seed, Stream::Rewire)).map_err(err)? })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn rewired_edges(&self) -> usize {
        self.inner.rewired_edges()
    }

    fn neighbors(&self, node: usize) -> PyResult<Vec<u32>> {
        if node >= self.inner.node_count() {
            return Err(PyValueError::new_err(format!("node {node} out of range")));
        }
        Ok(self.inner.neighbors(node).to_vec())
    }

    fn degree(&self, node: usize) -> PyResult<usize> {
        Ok(self.neighbors(node)?.len())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    #[pyo3(signature = (sample = 200, seed = 0))]
    fn stats<'py>(&self, py: Python<'py>, sample: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let s = network_stats(&self.inner, sample, &mut stream(seed, Stream::Stats));
        let d = PyDict::new(py);
        d.set_item("node_count", s.node_count)?;
        d.set_item("edge_count", s.edge_count)?;
        d.set_item("mean_degree", s.mean_degree)?;
        d.set_item("mean_path_length", s.mean_path_length)?;
        d.set_item("clustering_coefficient", s.clustering_coefficient)?;
        d.set_item("unreachable_pairs", s.unreachable_pairs)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Network(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

#[pyfunction]
fn bass_curve(p: f64, q: f64, t: f64) -> PyResult<f64> {
    Ok(curve(&BassParams::new(p, q).map_err(err)?, t))
}

#[pyfunction]
fn takeoff_time(p: f64, q: f64) -> PyResult<f64> {
    Ok(takeoff(&BassParams::new(p, q).map_err(err)?).map_err(err)?.time)
}

/// Fits `(p, q)` to a cumulative adoption curve sampled once per tick.
#[pyfunction]
fn fit_bass<'py>(py: Python<'py>, proportions: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let traj = AdoptionTrajectory::from_proportions(proportions, 0).map_err(err)?;
    let fit = bassabm::fit_bass(&traj, None).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("p", fit.params.p)?;
    d.set_item("q", fit.params.q)?;
    d.set_item("r_squared", fit.r_squared)?;
    d.set_item("iterations", fit.iterations)?;
    d.set_item("converged", fit.converged)?;
    Ok(d)
}

/// Runs one configuration and returns the trajectory with its Bass fit.
#[pyfunction]
#[pyo3(signature = (k = 8, delta_u = 0.6, sigma = "compact", p_r = 0.0, gamma = 250, rows = 200, cols = 200, seed = 0, update = "synchronous"))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    k: usize,
    delta_u: f64,
    sigma: &str,
    p_r: f64,
    gamma: usize,
    rows: usize,
    cols: usize,
    seed: u64,
    update: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SimConfig {
        rows,
        cols,
        k,
        delta_u,
        sigma: pattern(sigma)?,
        p_r,
        gamma,
        update: update_mode(update)?,
        seed,
        ..SimConfig::default()
    };
    let out = py.detach(|| sweep::run_single(&config)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("proportions", out.trajectory.proportions)?;
    d.set_item("saturated_at", out.trajectory.saturated_at)?;
    d.set_item("p", out.record.p)?;
    d.set_item("q", out.record.q)?;
    d.set_item("r_squared", out.record.r_squared)?;
    d.set_item("takeoff", out.record.takeoff)?;
    Ok(d)
}

/// Runs the Cartesian product of the given axes; each record is a dict.
#[pyfunction]
#[pyo3(signature = (k, delta_u, sigma, p_r, gamma, rows = 200, cols = 200, replications = 1, seed = 0, jobs = 1))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    k: Vec<usize>,
    delta_u: Vec<f64>,
    sigma: Vec<String>,
    p_r: Vec<f64>,
    gamma: Vec<usize>,
    rows: usize,
    cols: usize,
    replications: u32,
    seed: u64,
    jobs: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let grid = GridSpec {
        rows,
        cols,
        k,
        delta_u,
        sigma: sigma.iter().map(|s| pattern(s)).collect::<PyResult<_>>()?,
        p_r,
        gamma,
        ..GridSpec::default()
    };
    let configs = grid.expand().map_err(err)?;
    let records = py.detach(|| sweep::run_sweep(&configs, replications, seed, jobs)).map_err(err)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("k", r.config.k)?;
            d.set_item("delta_u", r.config.delta_u)?;
            d.set_item("sigma", r.config.sigma.as_str())?;
            d.set_item("p_r", r.config.p_r)?;
            d.set_item("gamma", r.config.gamma)?;
            d.set_item("replication", r.config.replication)?;
            d.set_item("p", r.p)?;
            d.set_item("q", r.q)?;
            d.set_item("r_squared", r.r_squared)?;
            d.set_item("takeoff", r.takeoff)?;
            d.set_item("saturation_tick", r.saturation_tick)?;
            Ok(d)
        })
        .collect()
}

/// Convex hull of `(p, q)` points, counter-clockwise.
#[pyfunction]
fn convex_hull(points: Vec<(f64, f64)>) -> PyResult<Vec<(f64, f64)>> {
    sweep::convex_hull(&points).map_err(err)
}

/// Classifies a point against a hull as "inside", "boundary" or "outside".
#[pyfunction]
fn locate(point: (f64, f64), hull: Vec<(f64, f64)>) -> &'static str {
    match sweep::locate(point, &sweep::Envelope { filter: None, hull_vertices: hull }) {
        Location::Inside => "inside",
        Location::Boundary => "boundary",
        Location::Outside => "outside",
    }
}

#[pymodule]
fn bassabm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_function(wrap_pyfunction!(bass_curve, m)?)?;
    m.add_function(wrap_pyfunction!(takeoff_time, m)?)?;
    m.add_function(wrap_pyfunction!(fit_bass, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(locate, m)?)?;
    Ok(())
}
