//! Python bindings: fixtures, scalars, induced spaces, sections and reports.

use std::collections::HashMap;
use std::sync::Arc;

use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

use qinduce::bundle::{check_section_isomorphisms, check_trivialization, verify_section};
use qinduce::coalgebra::Label;
use qinduce::comodule::Comodule;
use qinduce::fixtures::{load_fixture_with, Fixture as CoreFixture, LoadOptions};
use qinduce::induction::{check_canonical_coactions, check_multiplicativity, check_restriction, induced_space};
use qinduce::scalars::{GaussRat, Var};
use qinduce::subgroup::{CoisotropicSubgroup, Side};

fn err(e: qinduce::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Element of the parameter field Q(i)(q, kappa, ...).
#[pyclass(frozen, skip_from_py_object, name = "Scalar", module = "qinduce")]
#[derive(Clone)]
struct PyScalar(qinduce::Scalar);

#[pymethods]
impl PyScalar {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        expr.parse().map(PyScalar).map_err(err)
    }

    fn __add__(&self, o: &Self) -> Self {
        PyScalar(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &Self) -> Self {
        PyScalar(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &Self) -> Self {
        PyScalar(&self.0 * &o.0)
    }

    fn __truediv__(&self, o: &Self) -> PyResult<Self> {
        self.0.checked_div(&o.0).map(PyScalar).map_err(|e| PyZeroDivisionError::new_err(e.to_string()))
    }

    fn __neg__(&self) -> Self {
        PyScalar(-&self.0)
    }

    fn __eq__(&self, o: &Self) -> bool {
        self.0 == o.0
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.to_string().hash(&mut h);
        h.finish()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Substitute numbers, given as expressions over Q(i), for parameters.
    fn specialize(&self, values: HashMap<String, String>) -> PyResult<Self> {
        let mut point = HashMap::new();
        for (k, v) in values {
            let c: qinduce::Scalar = v.parse().map_err(err)?;
            let c = c.as_gauss().ok_or_else(|| PyValueError::new_err(format!("`{v}` is not a number")))?;
            point.insert(Var::from(k.as_str()), c);
        }
        self.0.specialize(&point).map(PyScalar).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scalar('{}')", self.0)
    }
}

/// Outcome of a batch of checks.
#[pyclass(frozen, name = "Report", module = "qinduce")]
struct PyReport(qinduce::Report);

#[pymethods]
impl PyReport {
    #[getter]
    fn ok(&self) -> bool {
        self.0.is_ok()
    }

    #[getter]
    fn title(&self) -> String {
        self.0.title.clone()
    }

    /// `(id, status, instances, failures, witnesses)` per check.
    fn checks(&self) -> Vec<(String, String, usize, usize, Vec<String>)> {
        self.0
            .checks
            .iter()
            .map(|c| {
                let s = if c.status == qinduce::Status::Pass { "pass" } else { "fail" };
                (c.id.clone(), s.to_string(), c.instances, c.failures, c.witnesses.clone())
            })
            .collect()
    }

    fn status(&self, id: &str) -> Option<&'static str> {
        self.0.status(id).map(|s| if s == qinduce::Status::Pass { "pass" } else { "fail" })
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.0.notes.clone()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }

    fn __bool__(&self) -> bool {
        self.0.is_ok()
    }
}

fn report(mut r: qinduce::Report) -> PyReport {
    r.strip_timing();
    PyReport(r)
}

/// Truncated induced corepresentation space.
#[pyclass(frozen, name = "InducedSpace", module = "qinduce")]
struct PyInduced {
    ind: qinduce::induction::InducedSpace,
    comodule: String,
}

#[pymethods]
impl PyInduced {
    #[getter]
    fn dim(&self) -> usize {
        self.ind.dim()
    }

    #[getter]
    fn comodule(&self) -> String {
        self.comodule.clone()
    }

    fn basis(&self) -> Vec<String> {
        self.ind.basis().iter().map(|t| self.ind.fmt(t)).collect()
    }

    /// For each basis vector, its coaction as `(word, component)` pairs.
    fn coaction_table(&self) -> PyResult<Vec<Vec<(String, String)>>> {
        let alg = &self.ind.source().alg;
        self.ind
            .basis()
            .iter()
            .map(|t| {
                let parts = self.ind.coaction_components(t).map_err(err)?;
                Ok(parts.iter().map(|(w, g)| (alg.fmt_word(w), self.ind.fmt(g))).collect())
            })
            .collect()
    }

    fn check_restriction(&self) -> PyReport {
        report(check_restriction(&self.ind))
    }

    fn __repr__(&self) -> String {
        format!("<InducedSpace ind({}) dim={}>", self.comodule, self.ind.dim())
    }
}

/// A section of a coisotropic subgroup, taken from fixture data.
#[pyclass(frozen, name = "Section", module = "qinduce")]
struct PySection(qinduce::bundle::Section);

#[pymethods]
impl PySection {
    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    fn verify(&self, degree: u32) -> PyReport {
        report(verify_section(&self.0, degree))
    }

    fn check_trivialization(&self, degree: u32) -> PyReport {
        report(check_trivialization(&self.0, degree))
    }

    /// Round trips of the isomorphisms for the character labelled `character`.
    fn check_isomorphisms(&self, character: &str, degree: u32) -> PyResult<PyReport> {
        let b = carrier_element(&self.0.sub, character)?;
        let rho = Comodule::character(self.0.sub.carrier().clone(), b, Side::Right);
        Ok(report(check_section_isomorphisms(&self.0, &rho, degree)))
    }
}

fn carrier_element(sub: &CoisotropicSubgroup, label: &str) -> PyResult<u32> {
    let c = sub.carrier();
    if let (Ok(p), Some(Label::Indexed(sym, _))) = (label.trim().parse::<i64>(), c.labels().first()) {
        return c.indexed(sym, p).map_err(err);
    }
    let v = c.parse_vec(label, &HashMap::new()).map_err(err)?;
    match v.iter().collect::<Vec<_>>()[..] {
        [(b, x)] if x.is_one() => Ok(*b),
        _ => Err(PyValueError::new_err(format!("`{label}` is not a carrier basis element"))),
    }
}

/// A loaded and gated fixture.
#[pyclass(frozen, name = "Fixture", module = "qinduce")]
struct PyFixture(Arc<CoreFixture>);

impl PyFixture {
    fn sub(&self, name: &str) -> PyResult<&Arc<CoisotropicSubgroup>> {
        self.0.subgroup(name).map_err(err)
    }
}

#[pymethods]
impl PyFixture {
    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn gates(&self) -> PyReport {
        report(self.0.gates.clone())
    }

    fn subgroups(&self) -> Vec<String> {
        self.0.subgroups().map(|(k, _)| k.clone()).collect()
    }

    fn sections(&self) -> Vec<String> {
        self.0.section_names().into_iter().map(String::from).collect()
    }

    fn comodules(&self) -> Vec<String> {
        self.0.comodule_names().into_iter().map(String::from).collect()
    }

    /// Induce from a character (index or carrier label) or a declared comodule.
    #[pyo3(signature = (subgroup, character=None, comodule=None, degree=2))]
    fn induce(
        &self,
        subgroup: &str,
        character: Option<&str>,
        comodule: Option<&str>,
        degree: u32,
    ) -> PyResult<PyInduced> {
        let sub = self.sub(subgroup)?;
        let rho = match (character, comodule) {
            (Some(_), Some(_)) => return Err(PyValueError::new_err("give a character or a comodule, not both")),
            (_, Some(name)) => self.0.comodule(name).map_err(err)?,
            (ch, None) => {
                let b = carrier_element(sub, ch.unwrap_or("0"))?;
                Comodule::character(sub.carrier().clone(), b, Side::Right)
            }
        };
        let ind = induced_space(sub.as_ref(), &rho, degree).map_err(err)?;
        Ok(PyInduced { ind, comodule: rho.name.clone() })
    }

    #[pyo3(signature = (subgroup, params=None))]
    fn section(&self, subgroup: &str, params: Option<HashMap<String, i64>>) -> PyResult<PySection> {
        qinduce::bundle::Section::from_fixture(&self.0, subgroup, &params.unwrap_or_default())
            .map(PySection)
            .map_err(err)
    }

    fn canonical_coactions(&self, subgroup: &str, degree: u32) -> PyResult<PyReport> {
        Ok(report(check_canonical_coactions(self.sub(subgroup)?.as_ref(), degree)))
    }

    fn multiplicativity(&self, subgroup: &str, degree: u32) -> PyResult<PyReport> {
        Ok(report(check_multiplicativity(self.sub(subgroup)?, degree)))
    }

    fn __repr__(&self) -> String {
        format!("<Fixture {}>", self.0.name)
    }
}

/// Load a shipped fixture by name, or a fixture file by path.
#[pyfunction]
#[pyo3(signature = (name, degree=None, window=None, skip_gates=false))]
fn load_fixture(name: &str, degree: Option<u32>, window: Option<u32>, skip_gates: bool) -> PyResult<PyFixture> {
    load_fixture_with(name, &LoadOptions { degree, window, skip_gates }).map(|f| PyFixture(Arc::new(f))).map_err(err)
}

#[pyfunction]
fn shipped_fixtures() -> Vec<&'static str> {
    qinduce::fixtures::shipped_fixtures()
}

/// Parse a rational expression over Q(i) in the fixture grammar.
#[pyfunction]
fn scalar(expr: &str) -> PyResult<PyScalar> {
    PyScalar::new(expr)
}

#[pyfunction]
fn gaussian(re: i64, im: i64) -> PyScalar {
    let g = &GaussRat::from_int(re) + &(&GaussRat::i() * &GaussRat::from_int(im));
    PyScalar(qinduce::Scalar::from_gauss(g))
}

#[pymodule]
fn _qinduce(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScalar>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyFixture>()?;
    m.add_class::<PyInduced>()?;
    m.add_class::<PySection>()?;
    m.add_function(wrap_pyfunction!(load_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(shipped_fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(scalar, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian, m)?)?;
    Ok(())
}
