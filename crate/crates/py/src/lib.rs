//! Python bindings. Values cross the boundary as `tropicurve/1` JSON text,
//! so reports come back as strings for `json.loads`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tropicurve::curve::TropicalCurve;
use tropicurve::divisor::{break_divisor_decompose, is_principal};
use tropicurve::graph::ExtendedGraph;
use tropicurve::io;
use tropicurve::rational::parse_rational;
use tropicurve::synthesis::{fully_faithful_pipeline, smoothing_pipeline, tate_demo, PipelineOptions};
use tropicurve::tropicalize::{tropicalize, Embedding};
use tropicurve::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::PillarSearchExhausted(_) | Error::CertificateFailure(_) | Error::Stage0Failure(_) | Error::MonotonicityViolation(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A metric graph with infinite leaf edges.
#[pyclass(name = "Graph", frozen)]
struct PyGraph(ExtendedGraph);

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        io::parse_graph(src).map(PyGraph).map_err(err)
    }

    fn to_json(&self) -> String {
        io::write_graph(&self.0)
    }

    fn betti_number(&self) -> usize {
        self.0.betti_number()
    }

    fn vertices(&self) -> Vec<String> {
        self.0.finite().vertices().iter().map(|v| v.0.clone()).collect()
    }

    fn edges(&self) -> Vec<String> {
        self.0.finite().edges().iter().map(|e| e.id.0.clone()).collect()
    }

    fn rays(&self) -> Vec<String> {
        self.0.rays().iter().map(|r| r.id.0.clone()).collect()
    }

    /// Whether a divisor document is principal on the finite part; returns
    /// the witness function as JSON, or None.
    fn principal_witness(&self, divisor: &str) -> PyResult<Option<String>> {
        let d = io::parse_divisor(divisor).map_err(err)?;
        let p = is_principal(self.0.finite(), &d).map_err(err)?;
        Ok(p.witness().map(io::write_function))
    }

    /// The break divisor equivalent to a degree-g divisor and the function
    /// relating them, both as JSON.
    fn break_divisor(&self, divisor: &str) -> PyResult<(String, String)> {
        let d = io::parse_divisor(divisor).map_err(err)?;
        let (b, f) = break_divisor_decompose(self.0.finite(), &d).map_err(err)?;
        Ok((io::write_divisor(&b), io::write_function(&f)))
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, edges={}, rays={}, genus={})",
            self.0.finite().vertices().len(),
            self.0.finite().edges().len(),
            self.0.rays().len(),
            self.0.betti_number()
        )
    }
}

/// A weighted rational curve in extended tropical space.
#[pyclass(name = "Curve", frozen)]
struct PyCurve(TropicalCurve);

#[pymethods]
impl PyCurve {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        io::parse_curve(src).map(PyCurve).map_err(err)
    }

    fn to_json(&self) -> String {
        io::write_curve(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn is_smooth(&self) -> bool {
        self.0.check_smooth().smooth
    }

    fn is_balanced(&self) -> bool {
        self.0.check_balancing().balanced
    }

    /// Ray directions, one list per ray.
    fn ray_directions(&self) -> Vec<Vec<i64>> {
        self.0.edges().iter().filter(|e| e.length.is_none()).map(|e| e.direction.clone()).collect()
    }

    fn weights(&self) -> Vec<u64> {
        self.0.edges().iter().map(|e| e.weight).collect()
    }

    fn __repr__(&self) -> String {
        format!("Curve(dim={}, vertices={}, edges={})", self.0.dim(), self.0.vertices().len(), self.0.edges().len())
    }
}

/// A skeleton with PL coordinate functions.
#[pyclass(name = "Embedding", frozen)]
struct PyEmbedding(Embedding);

fn options(budget: usize) -> PipelineOptions {
    PipelineOptions { budget, ..Default::default() }
}

#[pymethods]
impl PyEmbedding {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        io::parse_embedding(src).map(PyEmbedding).map_err(err)
    }

    fn to_json(&self) -> String {
        io::write_embedding(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn skeleton(&self) -> PyGraph {
        PyGraph(self.0.skeleton().clone())
    }

    fn tropicalize(&self) -> PyResult<PyCurve> {
        tropicalize(&self.0).map(|t| PyCurve(t.curve)).map_err(err)
    }

    fn is_fully_faithful(&self) -> PyResult<bool> {
        tropicalize(&self.0).map(|t| t.faithfulness().fully_faithful).map_err(err)
    }

    /// Fully faithful refinement and the pipeline report as JSON.
    #[pyo3(signature = (budget = 64))]
    fn faithfulize(&self, py: Python<'_>, budget: usize) -> PyResult<(PyEmbedding, String)> {
        let (e, r) = py.detach(|| fully_faithful_pipeline(&self.0, &options(budget))).map_err(err)?;
        Ok((PyEmbedding(e), io::write_report(&r)))
    }

    /// Refinement with smooth tropicalization and the report as JSON.
    #[pyo3(signature = (budget = 64))]
    fn smooth(&self, py: Python<'_>, budget: usize) -> PyResult<(PyEmbedding, String)> {
        let (e, r) = py.detach(|| smoothing_pipeline(&self.0, &options(budget))).map_err(err)?;
        Ok((PyEmbedding(e), io::write_report(&r)))
    }

    fn __repr__(&self) -> String {
        format!("Embedding(dim={}, genus={})", self.0.dim(), self.0.skeleton().betti_number())
    }
}

/// The Tate curve embedding for the rational parameter `c`, e.g. "1" or "3/2".
#[pyfunction]
#[pyo3(signature = (c = "1"))]
fn tate(c: &str) -> PyResult<PyEmbedding> {
    let c = parse_rational(c).map_err(err)?;
    tate_demo(&c).map(|d| PyEmbedding(d.embedding)).map_err(err)
}

/// Names of the bundled sample embeddings.
#[pyfunction]
fn fixture_names() -> Vec<String> {
    tropicurve::fixtures::suite().into_iter().map(|(n, _)| n).collect()
}

#[pyfunction]
fn fixture(name: &str) -> PyResult<PyEmbedding> {
    tropicurve::fixtures::suite()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, e)| PyEmbedding(e))
        .ok_or_else(|| PyValueError::new_err(format!("no fixture named {name:?}")))
}

#[pymodule]
fn tropicurve_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_function(wrap_pyfunction!(tate, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add("SCHEMA", io::SCHEMA)?;
    Ok(())
}
