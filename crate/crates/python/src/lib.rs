//! Python bindings. Scalars cross the boundary as strings (`"1/6"`, `"-1+2i"`).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sharelab_core::classifier::{self, FamilyKind};
use sharelab_core::diophantine::{self, Parity, PellInstance};
use sharelab_core::function::{self, jet_of_exppoly_at_t, parse_expr, CandidateFunction, ExpPolyFunction, Jet};
use sharelab_core::jet::{self, AnchorKind, JetError, RecurrenceContext};
use sharelab_core::numeric::{Poly, Scalar};
use sharelab_core::verifier::{self, grid_verify_expr, Implication, Region, SharingProblem, VerifyOptions};

create_exception!(sharelab, PivotVanished, PyRuntimeError);

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scalar(s: &str) -> PyResult<Scalar> {
    function::parse_scalar(s).map_err(value_err)
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::pretty).collect()
}

#[pyclass(frozen, name = "Witness")]
pub struct PyWitness {
    inner: verifier::Witness,
}

#[pymethods]
impl PyWitness {
    /// `"a_implies_a"` or `"b_implies_b"`.
    #[getter]
    fn implication(&self) -> &'static str {
        match self.inner.implication {
            Implication::AImpliesA => "a_implies_a",
            Implication::BImpliesB => "b_implies_b",
        }
    }

    #[getter]
    fn location(&self) -> String {
        self.inner.location.pretty()
    }

    #[getter]
    fn lhs(&self) -> String {
        self.inner.lhs.pretty()
    }

    #[getter]
    fn rhs(&self) -> String {
        self.inner.rhs.pretty()
    }

    #[getter]
    fn defect(&self) -> f64 {
        self.inner.defect
    }

    fn __repr__(&self) -> String {
        format!("Witness({}, location={}, lhs={}, rhs={})", self.implication(), self.location(), self.lhs(), self.rhs())
    }
}

#[pyclass(frozen, name = "VerificationReport")]
pub struct PyReport {
    inner: verifier::VerificationReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn holds(&self) -> bool {
        self.inner.holds()
    }

    #[getter]
    fn holds_a_implies(&self) -> bool {
        self.inner.holds_a_implies
    }

    #[getter]
    fn holds_b_implies(&self) -> bool {
        self.inner.holds_b_implies
    }

    #[getter]
    fn region_local(&self) -> bool {
        self.inner.region_local
    }

    #[getter]
    fn exact(&self) -> bool {
        self.inner.regime == sharelab_core::numeric::Regime::Exact
    }

    #[getter]
    fn g_constant_estimate(&self) -> Option<String> {
        self.inner.g_constant_estimate.as_ref().map(Scalar::pretty)
    }

    #[getter]
    fn witnesses(&self) -> Vec<PyWitness> {
        self.inner.witnesses.iter().map(|w| PyWitness { inner: w.clone() }).collect()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("reports serialize")
    }

    #[staticmethod]
    fn from_json(doc: &str) -> PyResult<Self> {
        serde_json::from_str(doc).map(|inner| PyReport { inner }).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "VerificationReport(holds_a_implies={}, holds_b_implies={}, witnesses={}, region_local={})",
            self.inner.holds_a_implies,
            self.inner.holds_b_implies,
            self.inner.witnesses.len(),
            self.inner.region_local
        )
    }
}

#[pyclass(frozen, name = "SolutionFamily")]
pub struct PyFamily {
    inner: classifier::SolutionFamily,
}

#[pymethods]
impl PyFamily {
    /// `"i"`, `"ii"`, `"iii"` or `"iv"`.
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.label()
    }

    #[getter]
    fn formula(&self) -> String {
        self.inner.formula.clone()
    }

    #[getter]
    fn constraints(&self) -> Vec<String> {
        self.inner.constraints.clone()
    }

    #[getter]
    fn parameters(&self) -> BTreeMap<String, String> {
        self.inner.parameters.iter().map(|(k, v)| (k.clone(), v.pretty())).collect()
    }

    fn __repr__(&self) -> String {
        self.inner.to_string()
    }
}

fn problem(a: &str, b: &str, relaxed: bool) -> PyResult<SharingProblem> {
    SharingProblem::with_mode(scalar(a)?, scalar(b)?, relaxed).map_err(value_err)
}

fn run_verify(f: &CandidateFunction, prob: &SharingProblem, tol: f64, precision: usize) -> PyResult<PyReport> {
    let opts = VerifyOptions { tol, precision, ..Default::default() };
    verifier::verify(f, prob, &opts).map(|inner| PyReport { inner }).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Member of a solution family; `b` defaults to `-a/8` for family (iv).
#[pyfunction]
#[pyo3(signature = (kind, a, b=None, c="1", relaxed=false, tol=1e-24, precision=128))]
fn verify_family(kind: &str, a: &str, b: Option<&str>, c: &str, relaxed: bool, tol: f64, precision: usize) -> PyResult<PyReport> {
    let kind: FamilyKind = kind.parse().map_err(value_err)?;
    let a_s = scalar(a)?;
    let b_s = match (b, kind) {
        (Some(b), _) => scalar(b)?,
        (None, FamilyKind::IV) => -(&a_s / &Scalar::int(8)),
        (None, _) => return Err(value_err("b is required for this family")),
    };
    let fam = classifier::family(kind, &a_s, &b_s).map_err(value_err)?;
    let f = fam.instantiate(&scalar(c)?).map_err(value_err)?;
    let prob = SharingProblem::with_mode(a_s, b_s, relaxed).map_err(value_err)?;
    run_verify(&f, &prob, tol, precision)
}

/// `f = P(e^{lambda z})` with `coeffs` listing `P` from the constant term up.
#[pyfunction]
#[pyo3(signature = (lambda_, coeffs, a, b, relaxed=false, tol=1e-24, precision=128))]
fn verify_exppoly(
    lambda_: &str,
    coeffs: Vec<String>,
    a: &str,
    b: &str,
    relaxed: bool,
    tol: f64,
    precision: usize,
) -> PyResult<PyReport> {
    let f = exppoly(lambda_, &coeffs)?;
    run_verify(&CandidateFunction::ExpPoly(f), &problem(a, b, relaxed)?, tol, precision)
}

/// Grid search on the rectangle `(x0, x1, y0, y1)`; the report is region-local.
#[pyfunction]
#[pyo3(signature = (source, a, b, region=(-5.0, 5.0, -5.0, 5.0), grid=21, relaxed=false, tol=1e-24, precision=128))]
fn verify_expr(
    py: Python<'_>,
    source: &str,
    a: &str,
    b: &str,
    region: (f64, f64, f64, f64),
    grid: usize,
    relaxed: bool,
    tol: f64,
    precision: usize,
) -> PyResult<PyReport> {
    let f = parse_expr(source).map_err(value_err)?;
    let prob = problem(a, b, relaxed)?;
    let region = Region::new(region.0, region.1, region.2, region.3).map_err(value_err)?;
    py.detach(|| grid_verify_expr(&f, &prob, &region, grid, tol, precision))
        .map(|inner| PyReport { inner })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyfunction]
fn classify(a: &str, b: &str) -> PyResult<Vec<PyFamily>> {
    let fams = classifier::classify(&scalar(a)?, &scalar(b)?).map_err(value_err)?;
    Ok(fams.into_iter().map(|inner| PyFamily { inner }).collect())
}

/// The two admissible values of `f''` at an `a`-point.
#[pyfunction]
#[pyo3(signature = (a, b, k=1))]
fn fpp_candidates_at_a(a: &str, b: &str, k: u32) -> PyResult<(String, String)> {
    let ctx = RecurrenceContext::relaxed(scalar(a)?, scalar(b)?, k, AnchorKind::AtAPoint).map_err(value_err)?;
    let c = jet::fpp_candidates_at_a(&ctx);
    Ok((c.u.pretty(), c.v.pretty()))
}

/// Extends `seed = [f, f', f'']` to `order`; `anchor` is `"a-point"` or `"b-point"`.
#[pyfunction]
#[pyo3(signature = (a, b, seed, order, k=1, anchor="a-point", relaxed=false))]
fn jet_extend(a: &str, b: &str, seed: Vec<String>, order: usize, k: u32, anchor: &str, relaxed: bool) -> PyResult<Vec<String>> {
    let kind = match anchor {
        "a-point" => AnchorKind::AtAPoint,
        "b-point" => AnchorKind::AtSimpleBPoint,
        other => return Err(value_err(format!("anchor must be 'a-point' or 'b-point', got '{other}'"))),
    };
    let (a, b) = (scalar(a)?, scalar(b)?);
    let ctx = if relaxed { RecurrenceContext::relaxed(a, b, k, kind) } else { RecurrenceContext::new(a, b, k, kind) }.map_err(value_err)?;
    let seed = seed.iter().map(|s| scalar(s)).collect::<PyResult<Vec<_>>>()?;
    if seed.len() != 3 {
        return Err(value_err("seed needs exactly [f, f', f'']"));
    }
    match jet::jet_extend(&Jet::new(Scalar::int(0), seed), &ctx, order) {
        Ok(j) => Ok(strings(&j.derivs)),
        Err(e @ JetError::PivotVanished { .. }) => Err(PivotVanished::new_err(e.to_string())),
        Err(e) => Err(value_err(e)),
    }
}

fn exppoly(lambda_: &str, coeffs: &[String]) -> PyResult<ExpPolyFunction> {
    let coeffs = coeffs.iter().map(|c| scalar(c)).collect::<PyResult<Vec<_>>>()?;
    ExpPolyFunction::new(scalar(lambda_)?, Poly::new(coeffs)).map_err(value_err)
}

/// Derivatives of `P(e^{lambda z})` at the point where `e^{lambda z} = t0`.
#[pyfunction]
fn exppoly_jet(lambda_: &str, coeffs: Vec<String>, t0: &str, order: usize) -> PyResult<Vec<String>> {
    let f = exppoly(lambda_, &coeffs)?;
    let j = jet_of_exppoly_at_t(&f, &scalar(t0)?, order).map_err(value_err)?;
    Ok(strings(&j.derivs))
}

/// `n <= nmax` with `k(n+1)^2 + n` a perfect square.
#[pyfunction]
fn square_family_scan(py: Python<'_>, k: u64, nmax: u64) -> Vec<u64> {
    py.detach(|| diophantine::square_family_scan(k, nmax))
}

/// Positive solutions of `x^2 - D y^2 = N` with `x + y sqrt(D) <= bound`, and whether the
/// descent certificate is complete.
#[pyfunction]
#[pyo3(signature = (d, n, bound, xmod=None, y="any"))]
fn pell_descent(d: i64, n: i64, bound: i64, xmod: Option<(i64, i64)>, y: &str) -> PyResult<(Vec<(BigInt, BigInt)>, bool)> {
    let parity = match y {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        "any" => Parity::Any,
        other => return Err(value_err(format!("y must be 'even', 'odd' or 'any', got '{other}'"))),
    };
    let mut inst = PellInstance::new(d, n, bound).with_parity(parity);
    if let Some((r, m)) = xmod {
        inst = inst.with_congruence(r, m);
    }
    let (sols, cert) = diophantine::pell_descent(&inst).map_err(value_err)?;
    Ok((sols, cert.complete()))
}

/// Feasible `(d, j, k)` triples of the case analysis.
#[pyfunction]
fn enumerate_cases() -> Vec<(u32, u32, u32)> {
    classifier::enumerate_cases().feasible.iter().map(|c| (c.d, c.j, c.k)).collect()
}

#[pymodule]
fn sharelab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReport>()?;
    m.add_class::<PyWitness>()?;
    m.add_class::<PyFamily>()?;
    m.add("PivotVanished", m.py().get_type::<PivotVanished>())?;
    m.add_function(wrap_pyfunction!(verify_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify_exppoly, m)?)?;
    m.add_function(wrap_pyfunction!(verify_expr, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(fpp_candidates_at_a, m)?)?;
    m.add_function(wrap_pyfunction!(jet_extend, m)?)?;
    m.add_function(wrap_pyfunction!(exppoly_jet, m)?)?;
    m.add_function(wrap_pyfunction!(square_family_scan, m)?)?;
    m.add_function(wrap_pyfunction!(pell_descent, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_cases, m)?)?;
    Ok(())
}
