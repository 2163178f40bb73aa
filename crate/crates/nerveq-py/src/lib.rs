use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nerveq::associator::{check_associator, solve_associator, AssocSeries};
use nerveq::dsl::{eval_str, nerve_of, MorphismJson, Value};
use nerveq::exactalg::{GradedMap, Rational};
use nerveq::hopf_backend::{AlgebraSpec, AxiomCheck, FiniteGroup, HopfAlgebra};
use nerveq::nerve::{NerveEvaluator, NerveMode};
use nerveq::quantizer::{quantize as quantize_core, QuantizedHopf};
use nerveq::transport::u_phi;
use nerveq::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Syntax { .. } | Error::Type { .. } | Error::Parse(_) | Error::ArityMismatch(_) | Error::OutOfRange(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn rational(s: &str) -> PyResult<Rational> {
    s.parse().map_err(|_| PyValueError::new_err(format!("not a rational: {s}")))
}

fn checks(c: &[AxiomCheck]) -> Vec<(String, bool, Option<String>)> {
    c.iter().map(|c| (c.name.clone(), c.ok, c.first_failure.clone())).collect()
}

/// A morphism written in the text syntax: a map, a braid, or an
/// `h`-series of maps with chords.
#[pyclass(name = "Morphism", frozen)]
struct PyMorphism {
    v: Value,
    order: usize,
}

#[pymethods]
impl PyMorphism {
    #[new]
    #[pyo3(signature = (text, order = 2))]
    fn new(text: &str, order: usize) -> PyResult<Self> {
        Ok(PyMorphism { v: eval_str(text, order).map_err(err)?, order })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.v.kind()
    }

    #[getter]
    fn source(&self) -> usize {
        self.v.arity().0
    }

    #[getter]
    fn target(&self) -> usize {
        self.v.arity().1
    }

    #[getter]
    fn order(&self) -> usize {
        self.order
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PyMorphism) -> PyResult<Self> {
        let order = self.order.min(other.order);
        Ok(PyMorphism { v: self.v.compose(&other.v, order).map_err(err)?, order })
    }

    fn tensor(&self, other: &PyMorphism) -> PyResult<Self> {
        let order = self.order.min(other.order);
        Ok(PyMorphism { v: self.v.tensor(&other.v, order).map_err(err)?, order })
    }

    fn normalize(&self) -> Self {
        PyMorphism { v: self.v.normalize(), order: self.order }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.v.to_json()).unwrap()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: MorphismJson = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let v = Value::from_json(&j).map_err(err)?;
        Ok(PyMorphism { v, order: j.order.unwrap_or(0) })
    }

    fn __str__(&self) -> String {
        self.v.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Morphism('{}')", self.v)
    }

    fn __eq__(&self, other: &PyMorphism) -> bool {
        self.v == other.v
    }
}

/// Truncated Drinfeld associator.
#[pyclass(name = "Associator", frozen)]
struct PyAssociator(AssocSeries);

#[pymethods]
impl PyAssociator {
    #[staticmethod]
    fn solve(degree: usize) -> PyResult<Self> {
        Ok(PyAssociator(solve_associator(degree).map_err(err)?))
    }

    #[staticmethod]
    fn one(cap: usize) -> Self {
        PyAssociator(AssocSeries::one(cap))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyAssociator(AssocSeries::from_json(&v).map_err(err)?))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).unwrap()
    }

    #[getter]
    fn degree_cap(&self) -> usize {
        self.0.cap()
    }

    /// `1 + c [x,y] + ...` when the series minus one is a Lie element.
    fn bracket_text(&self) -> Option<String> {
        self.0.bracket_text()
    }

    fn table(&self) -> Vec<(String, String)> {
        self.0.table().into_iter().map(|(w, c)| (w, c.to_string())).collect()
    }

    /// `(ok, report text)` for grouplikeness, pentagon and hexagons.
    fn check(&self) -> PyResult<(bool, String)> {
        let r = check_associator(&self.0).map_err(err)?;
        Ok((r.ok(), r.to_string()))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// A Hopf algebra backend with exact rational structure maps.
#[pyclass(name = "HopfAlgebra", frozen)]
struct PyHopf(Arc<HopfAlgebra>);

fn hopf(h: nerveq::Result<HopfAlgebra>) -> PyResult<PyHopf> {
    Ok(PyHopf(Arc::new(h.map_err(err)?)))
}

#[pymethods]
impl PyHopf {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        hopf(AlgebraSpec::from_json(text).and_then(|s| s.build()))
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        hopf(nerveq::dsl::parse_algebra(path.as_ref()).and_then(|s| s.build()))
    }

    /// Functions on the symmetric group `S_k`.
    #[staticmethod]
    fn fun_symmetric(k: usize) -> PyResult<Self> {
        hopf(HopfAlgebra::fun_group(&FiniteGroup::symmetric(k)))
    }

    #[staticmethod]
    fn fun_cyclic(n: usize) -> PyResult<Self> {
        hopf(HopfAlgebra::fun_group(&FiniteGroup::cyclic(n)))
    }

    #[staticmethod]
    fn group_algebra_symmetric(k: usize) -> PyResult<Self> {
        hopf(HopfAlgebra::group_algebra(&FiniteGroup::symmetric(k)))
    }

    /// Truncated symmetric algebra of a Lie algebra; brackets are
    /// `(i, j, k, c)` meaning `[e_i, e_j]` contains `c e_k`.
    #[staticmethod]
    fn sym_trunc(generators: Vec<String>, brackets: Vec<(usize, usize, usize, String)>, cap: u32) -> PyResult<Self> {
        let b = brackets
            .into_iter()
            .map(|(i, j, k, c)| Ok((i, j, k, rational(&c)?)))
            .collect::<PyResult<Vec<_>>>()?;
        hopf(AlgebraSpec::sym_trunc(&generators, &b, cap).build())
    }

    fn tensor(&self, other: &PyHopf) -> PyResult<Self> {
        hopf(HopfAlgebra::tensor(&self.0, &other.0))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn is_poisson(&self) -> bool {
        self.0.flags().poisson
    }

    /// `(name, ok, first failure)` per axiom.
    fn validate(&self) -> Vec<(String, bool, Option<String>)> {
        checks(&self.0.validate().checks)
    }

    fn __str__(&self) -> String {
        self.0.describe()
    }
}

/// Linear map between tensor powers of a backend.
#[pyclass(name = "GradedMap", frozen)]
struct PyMap(GradedMap);

#[pymethods]
impl PyMap {
    #[getter]
    fn source_power(&self) -> usize {
        self.0.source_power()
    }

    #[getter]
    fn target_power(&self) -> usize {
        self.0.target_power()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.0.nnz()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `(source label, target label, coefficient)`.
    fn triplets(&self) -> Vec<(String, String, String)> {
        let sp = self.0.space();
        self.0.triplets().into_iter().map(|(a, b, c)| (sp.idx_label(&a), sp.idx_label(&b), c.to_string())).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).unwrap()
    }

    fn __eq__(&self, other: &PyMap) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

fn maps(s: &nerveq::exactalg::HSeries<GradedMap>) -> Vec<PyMap> {
    s.coeffs().iter().cloned().map(PyMap).collect()
}

/// Quantized Hopf algebra modulo `h^{order+1}`.
#[pyclass(name = "QuantizedHopf", frozen)]
struct PyQuantized(QuantizedHopf);

#[pymethods]
impl PyQuantized {
    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    /// Coefficients of `h^k` for the deformed product.
    fn product(&self) -> Vec<PyMap> {
        maps(self.0.m())
    }

    fn coproduct(&self) -> Vec<PyMap> {
        maps(self.0.delta())
    }

    fn antipode(&self) -> Vec<PyMap> {
        maps(self.0.antipode())
    }

    fn is_trivial(&self) -> bool {
        self.0.is_trivial()
    }

    /// Hopf axioms, semiclassical limit and classical limit.
    fn report(&self) -> Vec<(String, bool, Option<String>)> {
        checks(&self.0.full_report().checks)
    }

    fn ok(&self) -> bool {
        self.0.full_report().ok()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).unwrap()
    }
}

#[pyfunction]
#[pyo3(signature = (algebra, associator, order = 2))]
fn quantize(py: Python<'_>, algebra: &PyHopf, associator: &PyAssociator, order: usize) -> PyResult<PyQuantized> {
    let (h, phi) = (algebra.0.clone(), associator.0.clone());
    let q = py.detach(move || quantize_core(h, &phi, order)).map_err(err)?;
    Ok(PyQuantized(q))
}

/// Nerve of a morphism as coefficients of `h^k`. Modes: symmetric,
/// braided, infinitesimal, quantized (needs an associator).
#[pyfunction]
#[pyo3(signature = (algebra, morphism, mode = "braided", associator = None, order = 2))]
fn nerve(
    py: Python<'_>,
    algebra: &PyHopf,
    morphism: &str,
    mode: &str,
    associator: Option<&PyAssociator>,
    order: usize,
) -> PyResult<Vec<PyMap>> {
    let mode = match (mode, associator) {
        ("symmetric", _) => NerveMode::Symmetric,
        ("braided", _) => NerveMode::Braided,
        ("infinitesimal", _) => NerveMode::Infinitesimal { order },
        ("quantized", Some(a)) => NerveMode::Quantized { phi: a.0.clone(), order },
        ("quantized", None) => return Err(PyValueError::new_err("quantized mode needs an associator")),
        (m, _) => return Err(PyValueError::new_err(format!("unknown mode {m}"))),
    };
    let v = eval_str(morphism, order).map_err(err)?;
    let h = algebra.0.clone();
    let s = py.detach(move || NerveEvaluator::new(h, mode).and_then(|ev| nerve_of(&ev, &v))).map_err(err)?;
    Ok(maps(&s))
}

/// Transport of a braided morphism to maps with chords.
#[pyfunction]
#[pyo3(signature = (morphism, associator, order = 2))]
fn transport(morphism: &PyMorphism, associator: &PyAssociator, order: usize) -> PyResult<PyMorphism> {
    let b = match &morphism.v {
        Value::Braid(b) => b.clone(),
        Value::Map(f) => nerveq::props::BrMorphism::from_monotone(f).map_err(err)?,
        Value::Linear(_) => return Err(PyValueError::new_err("transport needs a braided morphism")),
    };
    let s = u_phi(&b, &associator.0, order).map_err(err)?;
    Ok(PyMorphism { v: Value::Linear(s), order })
}

/// Run the command line front end in-process; returns the exit code.
#[pyfunction]
fn run_cli(argv: Vec<String>) -> i32 {
    nerveq::cli::cli_main(std::iter::once("nerveq".to_string()).chain(argv))
}

#[pymodule]
#[pyo3(name = "nerveq")]
pub fn nerveq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMorphism>()?;
    m.add_class::<PyAssociator>()?;
    m.add_class::<PyHopf>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyQuantized>()?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(nerve, m)?)?;
    m.add_function(wrap_pyfunction!(transport, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
