//! Python bindings. Result records cross the boundary as plain dicts built
//! from their JSON form, so field names match the CLI's JSON output.

use std::path::PathBuf;

use homophily_core as core;
use homophily_core::{Attribute, Direction, Error, ExperimentConfig, FilterSpec, UserId};
use pyo3::exceptions::{PyIOError, PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::InFile { ref cause, .. } if matches!(**cause, Error::Io { .. }) => {
            PyIOError::new_err(e.to_string())
        }
        Error::NotFound(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: serde::de::DeserializeOwned>(value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = value.py().import("json")?.call_method1("dumps", (value,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn ids(users: Vec<u64>) -> Vec<UserId> {
    users.into_iter().map(UserId).collect()
}

fn attribute(name: &str) -> PyResult<Attribute> {
    name.parse().map_err(err)
}

fn direction(name: &str) -> PyResult<Direction> {
    name.parse().map_err(err)
}

/// Undirected mutual-follow graph.
#[pyclass(frozen, name = "Graph")]
struct PyGraph(core::SocialGraph);

#[pymethods]
impl PyGraph {
    /// Builds a graph from `(u, v)` pairs; `users`, when given, fixes the
    /// user set so isolated users can be represented.
    #[new]
    #[pyo3(signature = (edges, users=None))]
    fn new(edges: Vec<(u64, u64)>, users: Option<Vec<u64>>) -> PyResult<Self> {
        let universe = users.map(ids);
        core::SocialGraph::from_edges(
            edges.into_iter().map(|(a, b)| (UserId(a), UserId(b))),
            universe.as_deref(),
        )
        .map(PyGraph)
        .map_err(err)
    }

    /// Reads an edge file; with `labels` the labelled users form the user set.
    #[staticmethod]
    #[pyo3(signature = (path, labels=None))]
    fn load(path: PathBuf, labels: Option<&PyLabels>) -> PyResult<Self> {
        core::dataset::read_graph(path, labels.map(|l| &l.0))
            .map(PyGraph)
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.0.n_edges()
    }

    fn users(&self) -> Vec<u64> {
        self.0.users().iter().map(|u| u.0).collect()
    }

    fn neighbors(&self, user: u64) -> PyResult<Vec<u64>> {
        Ok(self.0.neighbors(UserId(user)).map_err(err)?.into_iter().map(|u| u.0).collect())
    }

    fn edges(&self) -> Vec<(u64, u64)> {
        self.0.edges().map(|(a, b)| (a.0, b.0)).collect()
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.stats())
    }

    fn __repr__(&self) -> String {
        format!("Graph(users={}, edges={})", self.0.len(), self.0.n_edges())
    }
}

/// True home-location labels.
#[pyclass(frozen, name = "Labels")]
struct PyLabels(core::LabelMap);

#[pymethods]
impl PyLabels {
    #[new]
    fn new(labels: Vec<(u64, String)>) -> PyResult<Self> {
        core::LabelMap::from_pairs(labels.into_iter().map(|(u, l)| (UserId(u), l)))
            .map(PyLabels)
            .map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        core::dataset::read_labels(path).map(PyLabels).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn get(&self, user: u64) -> Option<String> {
        self.0.get(UserId(user)).map(str::to_owned)
    }

    fn users(&self) -> Vec<u64> {
        self.0.users().iter().map(|u| u.0).collect()
    }

    fn vocabulary(&self) -> Vec<String> {
        self.0.vocabulary().to_vec()
    }
}

/// Per-user friend and follower counts.
#[pyclass(frozen, name = "Attributes")]
struct PyAttributes(core::AttributeTable);

#[pymethods]
impl PyAttributes {
    /// Builds a table from `(user, friends, followers)` rows.
    #[new]
    fn new(rows: Vec<(u64, u64, u64)>) -> PyResult<Self> {
        core::AttributeTable::from_counts(rows.into_iter().map(|(u, fr, fo)| (UserId(u), fr, fo)))
            .map(PyAttributes)
            .map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        core::dataset::read_attributes(path).map(PyAttributes).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Values of `attribute` ("friends", "followers" or "ratio") in user order.
    fn column(&self, attribute: &str) -> PyResult<Vec<f64>> {
        Ok(self.0.column(self::attribute(attribute)?))
    }

    fn box_stats<'py>(&self, py: Python<'py>, attribute: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.box_stats(self::attribute(attribute)?).map_err(err)?)
    }

    fn correlations<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.correlation_matrix().map_err(err)?)
    }
}

/// Reads `edges.tsv`, `labels.tsv` and `attributes.tsv` from a directory.
#[pyfunction]
fn load_dataset(dir: PathBuf) -> PyResult<(PyGraph, PyLabels, PyAttributes)> {
    let d = core::Dataset::load_dir(dir).map_err(err)?;
    Ok((PyGraph(d.graph), PyLabels(d.labels), PyAttributes(d.attributes)))
}

/// Majority-vote estimate for one user, ignoring the user's own label.
#[pyfunction]
fn infer(graph: &PyGraph, labels: &PyLabels, user: u64) -> PyResult<Option<String>> {
    core::infer_one(&graph.0, &labels.0, UserId(user)).map_err(err)
}

/// Leave-one-out accuracy and coverage; all labelled users by default.
#[pyfunction]
#[pyo3(signature = (graph, labels, targets=None))]
fn evaluate<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    labels: &PyLabels,
    targets: Option<Vec<u64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let targets = targets.map(ids).unwrap_or_else(|| labels.0.users().to_vec());
    to_py(py, &core::evaluate(&graph.0, &labels.0, &targets).map_err(err)?)
}

/// Users of `users` kept by a filter; `threshold=None` keeps everyone.
#[pyfunction]
#[pyo3(signature = (attributes, users, attribute, direction, threshold=None))]
fn apply_filter(
    attributes: &PyAttributes,
    users: Vec<u64>,
    attribute: &str,
    direction: &str,
    threshold: Option<f64>,
) -> PyResult<Vec<u64>> {
    let spec = FilterSpec::new(self::attribute(attribute)?, self::direction(direction)?, threshold).map_err(err)?;
    let kept = core::apply_filter(&ids(users), &attributes.0, &spec).map_err(err)?;
    Ok(kept.into_iter().map(|u| u.0).collect())
}

#[pyfunction]
fn threshold_grid(values: Vec<f64>) -> PyResult<Vec<f64>> {
    core::threshold_grid(&values).map_err(err)
}

/// Accuracy-coverage curve of one filter and its best point.
#[pyfunction]
#[pyo3(signature = (graph, labels, attributes, attribute, direction, coverage_floor=0.3))]
fn sweep<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    labels: &PyLabels,
    attributes: &PyAttributes,
    attribute: &str,
    direction: &str,
    coverage_floor: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let result = core::sweep(
        &graph.0,
        &labels.0,
        &attributes.0,
        self::attribute(attribute)?,
        self::direction(direction)?,
        coverage_floor,
    )
    .map_err(err)?;
    to_py(py, &result)
}

/// Five-row filter comparison with significance verdicts.
#[pyfunction]
#[pyo3(signature = (graph, labels, attributes, dataset="dataset", alpha=0.05, coverage_floor=0.3))]
fn run_experiment<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    labels: &PyLabels,
    attributes: &PyAttributes,
    dataset: &str,
    alpha: f64,
    coverage_floor: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig {
        dataset: dataset.to_owned(),
        alpha,
        coverage_floor,
    };
    let report = core::run_experiment(&graph.0, &labels.0, &attributes.0, &cfg).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    core::spearman(&x, &y).map_err(err)
}

#[pyfunction]
fn box_stats<'py>(py: Python<'py>, values: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core::box_stats(&values).map_err(err)?)
}

/// One-sided test that `filtered` accuracy exceeds `baseline` accuracy.
/// Samples are `(successes, trials)` pairs.
#[pyfunction]
#[pyo3(signature = (baseline, filtered, alpha=0.05))]
fn compare_accuracy<'py>(
    py: Python<'py>,
    baseline: (u64, u64),
    filtered: (u64, u64),
    alpha: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let b = core::ProportionSample::new(baseline.0, baseline.1).map_err(err)?;
    let f = core::ProportionSample::new(filtered.0, filtered.1).map_err(err)?;
    to_py(py, &core::compare_accuracy(b, f, alpha).map_err(err)?)
}

/// Default generator configuration as a dict.
#[pyfunction]
fn default_synth_config<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core::SynthConfig::default())
}

/// Generates a synthetic dataset. `config` may override any subset of the
/// defaults; `out`, when given, also writes the dataset files there.
#[pyfunction]
#[pyo3(signature = (config=None, seed=None, out=None))]
fn generate(
    config: Option<&Bound<'_, PyAny>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> PyResult<(PyGraph, PyLabels, PyAttributes)> {
    let mut cfg: core::SynthConfig = match config {
        Some(c) => from_py(c)?,
        None => core::SynthConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let ds = core::generate(&cfg).map_err(err)?;
    if let Some(dir) = out {
        core::synth::emit(&ds, dir).map_err(err)?;
    }
    let d = ds.into_dataset();
    Ok((PyGraph(d.graph), PyLabels(d.labels), PyAttributes(d.attributes)))
}

#[pymodule]
fn homophily(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyLabels>()?;
    m.add_class::<PyAttributes>()?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(infer, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(apply_filter, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_grid, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(box_stats, m)?)?;
    m.add_function(wrap_pyfunction!(compare_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(default_synth_config, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("SCHEMA_VERSION", core::SCHEMA_VERSION)?;
    Ok(())
}
