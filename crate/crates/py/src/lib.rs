use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use netfractal::boxcover::EXHAUSTIVE_MAX_NODES;
use netfractal::dimension::{
    fit_mean_series, Analysis, AnalysisConfig, DEFAULT_MAX_POINTS, DEFAULT_SEED, DEFAULT_TRIALS,
};
use netfractal::{Error, LoadOptions, MetricKind};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::DegenerateScalingRange { .. }
        | Error::TooFewPoints { .. }
        | Error::NonPositiveMean { .. }
        | Error::MatrixTooLarge { .. }
        | Error::Disconnected => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn metric(name: &str) -> PyResult<MetricKind> {
    name.parse().map_err(to_py)
}

/// Simple undirected graph with dense node ids.
#[pyclass(name = "Graph", frozen, module = "pynetfractal")]
struct PyGraph {
    inner: netfractal::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(node_count: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = netfractal::Graph::from_edges(node_count, edges).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    /// Parses edge-list text. Returns the graph and the number of dropped
    /// duplicate edges and self-loops.
    #[staticmethod]
    #[pyo3(signature = (text, comment_prefix = "#", delimiter = None))]
    fn parse(text: &str, comment_prefix: &str, delimiter: Option<char>) -> PyResult<(Self, usize)> {
        let options = LoadOptions {
            comment_prefix: comment_prefix.to_string(),
            delimiter,
        };
        let loaded = netfractal::load_edge_list(text.as_bytes(), &options).map_err(to_py)?;
        Ok((
            PyGraph {
                inner: loaded.graph,
            },
            loaded.dropped.total(),
        ))
    }

    #[staticmethod]
    fn karate() -> Self {
        PyGraph {
            inner: netfractal::karate_fixture(),
        }
    }

    #[staticmethod]
    fn sierpinski(level: u32) -> PyResult<Self> {
        let m = netfractal::generate_sierpinski(level).map_err(to_py)?;
        Ok(PyGraph { inner: m.graph })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn degrees(&self) -> Vec<usize> {
        netfractal::degrees(&self.inner)
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    /// Returns the largest connected component and the number of discarded nodes.
    fn largest_component(&self) -> PyResult<(Self, usize)> {
        let (g, discarded) = netfractal::largest_component(&self.inner).map_err(to_py)?;
        Ok((PyGraph { inner: g }, discarded))
    }

    /// Edge weights `degree(i) * degree(j)` as `(i, j, weight)` triples.
    fn repulsive_forces(&self) -> PyResult<Vec<(usize, usize, u64)>> {
        let wg = netfractal::edge_repulsive_force(&self.inner).map_err(to_py)?;
        Ok(self
            .inner
            .edges()
            .iter()
            .zip(wg.edge_weights())
            .map(|(&(a, b), w)| (a, b, w))
            .collect())
    }

    #[pyo3(signature = (metric = "repulsion"))]
    fn distances(&self, py: Python<'_>, metric: &str) -> PyResult<PyDistanceMatrix> {
        let kind = self::metric(metric)?;
        let inner = py
            .detach(|| netfractal::all_pairs(&self.inner, kind))
            .map_err(to_py)?;
        Ok(PyDistanceMatrix { inner })
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

#[pyclass(name = "DistanceMatrix", frozen, module = "pynetfractal")]
struct PyDistanceMatrix {
    inner: netfractal::DistanceMatrix,
}

#[pymethods]
impl PyDistanceMatrix {
    #[getter]
    fn metric(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn diameter(&self) -> u64 {
        self.inner.diameter()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<u64> {
        let n = self.inner.node_count();
        if i >= n || j >= n {
            return Err(PyValueError::new_err(format!(
                "index out of range for {n} nodes"
            )));
        }
        Ok(self.inner.get(i, j))
    }

    fn distinct(&self) -> Vec<u64> {
        netfractal::distinct_distances(&self.inner)
    }

    fn to_list(&self) -> Vec<Vec<u64>> {
        self.inner.to_square()
    }

    /// Greedy box covering for one node order; returns `(box_count, colors)`.
    fn greedy_box_cover(&self, box_size: u64, order: Vec<usize>) -> PyResult<(usize, Vec<usize>)> {
        let n = self.inner.node_count();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(PyValueError::new_err(
                    "order must be a permutation of the nodes",
                ));
            }
        }
        if order.len() != n {
            return Err(PyValueError::new_err(
                "order must be a permutation of the nodes",
            ));
        }
        let cover = netfractal::greedy_box_cover(&self.inner, box_size, &order);
        Ok((cover.box_count, cover.colors))
    }

    /// Exact minimum number of boxes (small graphs only).
    fn min_boxes(&self, box_size: u64) -> PyResult<usize> {
        if self.inner.node_count() > EXHAUSTIVE_MAX_NODES {
            return Err(PyValueError::new_err(format!(
                "exhaustive search is limited to {EXHAUSTIVE_MAX_NODES} nodes"
            )));
        }
        netfractal::brute_force_min_boxes(&self.inner, box_size).map_err(to_py)
    }

    #[pyo3(signature = (box_size, trials = DEFAULT_TRIALS, seed = DEFAULT_SEED))]
    fn run_trials<'py>(
        &self,
        py: Python<'py>,
        box_size: u64,
        trials: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let s = py
            .detach(|| netfractal::run_trials(&self.inner, box_size, trials, seed))
            .map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("l_B", s.box_size)?;
        d.set_item("trials", s.trials)?;
        d.set_item("mean", s.mean)?;
        d.set_item("std", s.std)?;
        d.set_item("min", s.min)?;
        d.set_item("max", s.max)?;
        Ok(d)
    }

    #[pyo3(signature = (max_points = DEFAULT_MAX_POINTS))]
    fn schedule(&self, max_points: usize) -> PyResult<Vec<u64>> {
        netfractal::build_schedule(&self.inner, max_points)
            .map(|s| s.values)
            .map_err(to_py)
    }
}

fn analysis_dict<'py>(py: Python<'py>, a: &Analysis) -> PyResult<Bound<'py, PyDict>> {
    let e = &a.estimate;
    let d = PyDict::new(py);
    d.set_item("method", e.method.as_str())?;
    d.set_item("dimension", e.dimension)?;
    d.set_item("dimension_std", e.dimension_std)?;
    d.set_item("trial_mean_dimension", e.trial_mean_dimension)?;
    d.set_item("slope_stderr", e.slope_stderr)?;
    d.set_item("r_squared", e.r_squared)?;
    d.set_item("points_used", e.points_used)?;
    d.set_item("nodes", a.series.node_count)?;
    d.set_item("edges", a.series.edge_count)?;
    d.set_item("discarded_nodes", a.discarded_nodes)?;
    d.set_item("diameter", a.diameter)?;
    d.set_item("box_sizes", a.schedule.values.clone())?;
    d.set_item("mean_nb", a.series.means())?;
    d.set_item(
        "std_nb",
        a.series.points.iter().map(|p| p.std).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Full pipeline: largest component, distances, schedule, randomized
/// coverings, log-log fit.
#[pyfunction]
#[pyo3(signature = (graph, method = "repulsion", trials = DEFAULT_TRIALS, seed = DEFAULT_SEED,
                    max_points = DEFAULT_MAX_POINTS, fit_range = None))]
fn analyze<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    method: &str,
    trials: usize,
    seed: u64,
    max_points: usize,
    fit_range: Option<(f64, f64)>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut config = AnalysisConfig::new(metric(method)?);
    config.trials = trials;
    config.seed = seed;
    config.max_points = max_points;
    config.fit_range = fit_range;
    let analysis = py
        .detach(|| netfractal::analyze(&graph.inner, &config))
        .map_err(to_py)?;
    analysis_dict(py, &analysis)
}

/// Fits `log(mean) = a + b log(l_B)`; returns `(dimension, r_squared, points_used)`.
#[pyfunction]
#[pyo3(signature = (box_sizes, means, fit_range = None))]
fn fit_power_law(
    box_sizes: Vec<f64>,
    means: Vec<f64>,
    fit_range: Option<(f64, f64)>,
) -> PyResult<(f64, f64, usize)> {
    if box_sizes.len() != means.len() {
        return Err(PyValueError::new_err(
            "box_sizes and means differ in length",
        ));
    }
    let (fit, used) = fit_mean_series(&box_sizes, &means, fit_range).map_err(to_py)?;
    Ok((-fit.slope, fit.r_squared, used))
}

#[pymodule]
fn pynetfractal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyDistanceMatrix>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
