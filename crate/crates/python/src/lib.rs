//! Python bindings: sparse matrices, graph designs, generation and
//! verification. Big integers cross over as Python `int`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;

use krongraph::config::DesignConfig;
use krongraph::design;
use krongraph::generator::{self, GenerateOptions, PlanOptions};
use krongraph::sparse;
use krongraph::verifier;
use krongraph::{FactorSpec, GraphDesign, LoopPlacement};
use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err<E: Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn placement(loop_: &str) -> PyResult<LoopPlacement> {
    loop_.parse().map_err(value_err)
}

fn to_map(d: &krongraph::DegreeDistribution) -> BTreeMap<BigUint, BigUint> {
    d.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

/// Sparse non-negative integer matrix in column-major triple form.
#[pyclass(name = "SparseMatrix", module = "krongraph_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PySparseMatrix {
    inner: krongraph::SparseMatrix,
}

#[pymethods]
impl PySparseMatrix {
    /// Star with `m_hat` points; `loop` is "none", "center" or "leaf".
    #[staticmethod]
    #[pyo3(signature = (m_hat, r#loop = "none"))]
    fn star(m_hat: u64, r#loop: &str) -> PyResult<Self> {
        let f = FactorSpec::new(m_hat, placement(r#loop)?).map_err(value_err)?;
        Ok(Self {
            inner: krongraph::star_matrix(&f),
        })
    }

    #[staticmethod]
    fn from_triples(rows: usize, cols: usize, triples: Vec<(usize, usize, u64)>) -> PyResult<Self> {
        let inner = krongraph::SparseMatrix::from_triples(rows, cols, triples).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        let inner = krongraph::SparseMatrix::identity(n).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn triples(&self) -> Vec<(usize, usize, u64)> {
        self.inner
            .triples()
            .iter()
            .map(|t| (t.row, t.col, t.value))
            .collect()
    }

    fn to_dense(&self) -> Vec<Vec<u64>> {
        self.inner.to_dense()
    }

    fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    fn kron(&self, other: &Self) -> PyResult<Self> {
        let inner = sparse::kron(&self.inner, &other.inner).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn matmul(&self, other: &Self) -> PyResult<Self> {
        let inner = sparse::matmul(&self.inner, &other.inner).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.matmul(other)
    }

    fn ewise_mult(&self, other: &Self) -> PyResult<Self> {
        let inner = sparse::ewise_mult(&self.inner, &other.inner).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn closed_wedge_sum(&self) -> PyResult<u64> {
        sparse::closed_wedge_sum(&self.inner).map_err(value_err)
    }

    fn triangle_count(&self) -> PyResult<u64> {
        sparse::triangle_count(&self.inner).map_err(value_err)
    }

    /// Row-nnz degree distribution as `{degree: count}`.
    fn degrees(&self) -> BTreeMap<BigUint, BigUint> {
        to_map(&sparse::degrees(&self.inner))
    }

    fn __repr__(&self) -> String {
        let (r, c) = self.inner.shape();
        format!("SparseMatrix(shape=({r}, {c}), nnz={})", self.inner.nnz())
    }
}

/// A chain of star factors with a loop policy.
#[pyclass(name = "Design", module = "krongraph_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDesign {
    inner: GraphDesign,
}

#[pymethods]
impl PyDesign {
    #[new]
    #[pyo3(signature = (m_hats, r#loop = "none", remove_loop = false))]
    fn new(m_hats: Vec<u64>, r#loop: &str, remove_loop: bool) -> PyResult<Self> {
        let inner = GraphDesign::uniform(&m_hats, placement(r#loop)?, remove_loop).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Loads the design part of a configuration file.
    #[staticmethod]
    fn from_config(path: PathBuf) -> PyResult<Self> {
        let cfg = DesignConfig::from_path(&path).map_err(value_err)?;
        Ok(Self { inner: cfg.design })
    }

    #[getter]
    fn m_hats(&self) -> Vec<u64> {
        self.inner.m_hats()
    }

    #[getter]
    fn remove_loop(&self) -> bool {
        self.inner.remove_loop()
    }

    fn vertices(&self) -> BigUint {
        design::predict_vertices(&self.inner)
    }

    fn edges(&self) -> PyResult<BigUint> {
        design::predict_edges(&self.inner).map_err(value_err)
    }

    fn triangles(&self) -> PyResult<BigUint> {
        design::predict_triangles(&self.inner).map_err(value_err)
    }

    fn distribution(&self) -> PyResult<BTreeMap<BigUint, BigUint>> {
        let d = design::predict_degree_distribution(&self.inner).map_err(value_err)?;
        Ok(to_map(&d))
    }

    /// `(n1, d_max, value)`, or `None` when undefined.
    fn alpha(&self) -> PyResult<Option<(BigUint, BigUint, f64)>> {
        let d = design::predict_degree_distribution(&self.inner).map_err(value_err)?;
        Ok(krongraph::power_law_alpha(&d)
            .ok()
            .map(|a| (a.n1, a.d_max, a.value)))
    }

    fn power_law_valid(&self) -> PyResult<bool> {
        Ok(krongraph::validate_power_law(&self.inner)
            .map_err(value_err)?
            .is_valid())
    }

    /// Every predicted property as a dict.
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = krongraph::design_report(&self.inner).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("vertices", &r.vertices)?;
        d.set_item("edges", &r.edges)?;
        d.set_item("triangles", &r.triangles)?;
        d.set_item("distribution", to_map(&r.distribution))?;
        d.set_item("loop_vertex_degree", r.loop_vertex_degree.clone())?;
        d.set_item("alpha", r.alpha.clone().map(|a| (a.n1, a.d_max, a.value)))?;
        d.set_item("self_loops", r.self_loops)?;
        d.set_item("power_law_valid", r.power_law_valid())?;
        Ok(d)
    }

    /// Full adjacency for small designs.
    #[pyo3(signature = (max_vertices = 100_000))]
    fn materialize(&self, max_vertices: u64) -> PyResult<PySparseMatrix> {
        let inner = generator::materialize(&self.inner, max_vertices).map_err(value_err)?;
        Ok(PySparseMatrix { inner })
    }

    fn __repr__(&self) -> String {
        let loops: Vec<String> = self
            .inner
            .factors()
            .iter()
            .map(|f| f.placement().to_string())
            .collect();
        format!(
            "Design(m_hats={:?}, loops={:?}, remove_loop={})",
            self.inner.m_hats(),
            loops,
            self.inner.remove_loop()
        )
    }
}

/// Writes edge shards and a manifest into `out`; returns
/// `{"total_edges", "shards": [(file, edges)], "split", "workers"}`.
#[pyfunction]
#[pyo3(signature = (design, out, workers = 1, split = None, threads = None, one_based = false))]
fn generate<'py>(
    py: Python<'py>,
    design: &PyDesign,
    out: PathBuf,
    workers: usize,
    split: Option<usize>,
    threads: Option<usize>,
    one_based: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let d = &design.inner;
    let split = split.unwrap_or_else(|| generator::default_split(d, None));
    let plan = generator::plan(d, split, workers, &PlanOptions::default()).map_err(value_err)?;
    let manifest = py
        .detach(|| generator::generate_all(&plan, &out, &GenerateOptions { threads, one_based }))
        .map_err(value_err)?;
    let result = PyDict::new(py);
    result.set_item("total_edges", manifest.total_edges)?;
    result.set_item("split", manifest.split_index)?;
    result.set_item("workers", manifest.workers)?;
    let shards: Vec<(String, u64)> = manifest.shards.iter().map(|s| (s.file.clone(), s.edges)).collect();
    result.set_item("shards", shards)?;
    Ok(result)
}

/// Measures the shards in `out` against the design; returns
/// `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (design, out, triangles = false))]
fn verify(py: Python<'_>, design: &PyDesign, out: PathBuf, triangles: bool) -> PyResult<(bool, String)> {
    let d = &design.inner;
    let predicted = krongraph::design_report(d).map_err(value_err)?;
    let (_, measured) = py
        .detach(|| verifier::measure_run(d, &out, triangles))
        .map_err(value_err)?;
    let report = verifier::diff(&predicted, &measured);
    Ok((report.pass(), report.to_string()))
}

#[pymodule]
fn krongraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySparseMatrix>()?;
    m.add_class::<PyDesign>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
