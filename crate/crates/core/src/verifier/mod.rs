//! Deciding the sharing implications `f = a ⇒ f' = a` and `f' = b ⇒ f = b` for candidates.
//!
//! Candidates of the form `P(e^{λz})` are handled completely in `t = e^{λz}`: every `a`-point
//! of `f` is a nonzero root of `P - a`. Closed-form expressions are only checked on a grid and
//! the report says so.

pub mod counting;
pub mod gconst;
pub mod scan;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::function::{AffineFunction, CandidateFunction, ExpPolyFunction, FunctionError};
use crate::numeric::roots::is_origin;
use crate::numeric::{poly_roots_with, NumericError, Poly, Regime, RootOptions, Scalar, DEFAULT_PRECISION, DEFAULT_TOL};

pub use counting::{counting, h1_info, h2_pole_orders, CountingData, H1Info, LemmaCheck};
pub use gconst::{check_g_constant, GEstimate};
pub use scan::{grid_verify_expr, spherical_scan, Region, ScanResult};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("candidate is constant")]
    DegenerateCandidate,
    #[error("every sample point hit a zero of the denominator")]
    AllSamplesDegenerate,
    #[error("invalid region or grid: {0}")]
    InvalidRegion(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// The pair of values in `f = a ⇒ f' = a`, `f' = b ⇒ f = b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharingProblem {
    pub a: Scalar,
    pub b: Scalar,
    /// Allows `a = 0` or `b = 0`; reports carry a watermark.
    pub relaxed: bool,
}

impl SharingProblem {
    /// Standard problem: `a`, `b` nonzero and distinct.
    pub fn new(a: Scalar, b: Scalar) -> Result<Self, VerifyError> {
        if a.is_zero() || b.is_zero() {
            return Err(VerifyError::InvalidProblem("a and b must be nonzero (use relaxed mode to allow zero)".into()));
        }
        Self::relaxed(a, b).map(|p| SharingProblem { relaxed: false, ..p })
    }

    /// Relaxed problem: only `a != b` is required.
    pub fn relaxed(a: Scalar, b: Scalar) -> Result<Self, VerifyError> {
        if a == b || a.approx_eq(&b, 0.0) {
            return Err(VerifyError::InvalidProblem("a and b must differ".into()));
        }
        Ok(SharingProblem { a, b, relaxed: true })
    }

    pub fn with_mode(a: Scalar, b: Scalar, relaxed: bool) -> Result<Self, VerifyError> {
        if relaxed {
            Self::relaxed(a, b)
        } else {
            Self::new(a, b)
        }
    }

    /// The constant `(k+1)b/(a-b)` of the differential identity.
    pub fn c_of_k(&self, k: u32) -> Scalar {
        Scalar::int(k as i64 + 1) * self.b.clone() / (self.a.clone() - self.b.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Implication {
    /// `f = a ⇒ f' = a`
    AImpliesA,
    /// `f' = b ⇒ f = b`
    BImpliesB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    T,
    Z,
}

/// A point where an implication fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub coordinate: Coordinate,
    pub location: Scalar,
    /// Principal preimage in `z` when the location is given in `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Scalar>,
    pub implication: Implication,
    /// The value that should equal `rhs` (`f'` for the first implication, `f` for the second).
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub holds_a_implies: bool,
    pub holds_b_implies: bool,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_constant_estimate: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_max_deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountingData>,
    pub regime: Regime,
    /// Set for grid checks, where finding no witness is evidence rather than proof.
    pub region_local: bool,
    pub relaxed: bool,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    fn empty(regime: Regime, relaxed: bool) -> Self {
        VerificationReport {
            holds_a_implies: true,
            holds_b_implies: true,
            witnesses: vec![],
            g_constant_estimate: None,
            g_max_deviation: None,
            counts: None,
            regime,
            region_local: false,
            relaxed,
            warnings: if relaxed { vec!["relaxed mode: a = 0 or b = 0 permitted".into()] } else { vec![] },
        }
    }

    pub fn holds(&self) -> bool {
        self.holds_a_implies && self.holds_b_implies
    }

    fn absorb(&mut self, part: ImplicationResult) {
        match part.implication {
            Implication::AImpliesA => self.holds_a_implies = part.holds,
            Implication::BImpliesB => self.holds_b_implies = part.holds,
        }
        self.witnesses.extend(part.witnesses);
        self.warnings.extend(part.warnings);
    }
}

/// Outcome of one implication check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationResult {
    pub implication: Implication,
    pub holds: bool,
    /// Number of distinct points examined (nonzero roots in `t`).
    pub points_checked: usize,
    pub witnesses: Vec<Witness>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    pub precision: usize,
    /// Sample count for the constancy estimate.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: DEFAULT_TOL, precision: DEFAULT_PRECISION, samples: 100, seed: 0x5eed }
    }
}

/// `f = a ⇒ f' = a` for `f = P(e^{λz})`.
pub fn check_implication_a(f: &ExpPolyFunction, prob: &SharingProblem, tol: f64) -> Result<ImplicationResult, VerifyError> {
    let roots_of = poly_minus(f.poly(), &prob.a);
    let image = f.derivative_poly(1);
    check_in_t(f, Implication::AImpliesA, &roots_of, &image, &prob.a, tol)
}

/// `f' = b ⇒ f = b` for `f = P(e^{λz})`.
pub fn check_implication_b(f: &ExpPolyFunction, prob: &SharingProblem, tol: f64) -> Result<ImplicationResult, VerifyError> {
    let roots_of = poly_minus(&f.derivative_poly(1), &prob.b);
    check_in_t(f, Implication::BImpliesB, &roots_of, f.poly(), &prob.b, tol)
}

fn poly_minus(p: &Poly, c: &Scalar) -> Poly {
    p - &Poly::constant(c.clone())
}

/// Every nonzero root `t` of `roots_of` must satisfy `image(t) = target`.
fn check_in_t(
    f: &ExpPolyFunction,
    implication: Implication,
    roots_of: &Poly,
    image: &Poly,
    target: &Scalar,
    tol: f64,
) -> Result<ImplicationResult, VerifyError> {
    if f.poly().degree().unwrap_or(0) == 0 {
        return Err(VerifyError::DegenerateCandidate);
    }
    let prec = f.lambda().precision().or_else(|| f.poly().coeffs().iter().find_map(Scalar::precision)).unwrap_or(DEFAULT_PRECISION);
    let mut out = ImplicationResult { implication, holds: true, points_checked: 0, witnesses: vec![], warnings: vec![] };
    if roots_of.is_zero() {
        // every point is a root; one sample decides
        let t = Scalar::int(1);
        let v = image.eval(&t);
        if !close(&v, target, tol) {
            out.holds = false;
            out.witnesses.push(witness(f, implication, t, v, target, prec));
        }
        out.points_checked = 1;
        return Ok(out);
    }
    let defect_poly = poly_minus(image, target);

    if let (Some(q), Some(r)) = (roots_of.to_exact(), defect_poly.to_exact()) {
        if f.is_exact() {
            // nonzero roots of q are the roots of q0 = q / t^j; the implication holds iff the
            // square-free part of q0 divides r
            let j = q.valuation().unwrap_or(0);
            let q0 = q.shift_down(j);
            if q0.degree().unwrap_or(0) == 0 {
                return Ok(out);
            }
            let s = q0.square_free_part();
            out.points_checked = s.degree().unwrap_or(0);
            let g = s.gcd(&r);
            let bad = s.exact_div(&g).expect("gcd divides");
            if bad.degree().unwrap_or(0) > 0 {
                out.holds = false;
                let opts = RootOptions::new(tol).with_precision(prec);
                let rs = poly_roots_with(&Poly::from(bad), &opts)?;
                for root in rs.roots {
                    let v = image.eval(&root.location);
                    out.witnesses.push(witness(f, implication, root.location, v, target, prec));
                }
            }
            return Ok(out);
        }
    }

    let opts = RootOptions::new(tol).with_precision(prec);
    let rs = poly_roots_with(roots_of, &opts)?;
    for root in rs.roots {
        if is_origin(&root.location, tol) {
            if !root.location.is_zero() {
                out.warnings.push(format!(
                    "root t = {} within tolerance of 0 treated as t = 0 and excluded; rerun exactly",
                    root.location.pretty()
                ));
            }
            continue;
        }
        out.points_checked += 1;
        let v = image.eval(&root.location);
        let scale = image.abs_eval(root.location.abs_f64()).max(target.abs_f64()).max(1.0);
        if (v.clone() - target.clone()).abs_f64() > tol * scale {
            out.holds = false;
            out.witnesses.push(witness(f, implication, root.location, v, target, prec));
        }
    }
    Ok(out)
}

fn close(v: &Scalar, target: &Scalar, tol: f64) -> bool {
    match (v, target) {
        (Scalar::Exact(_), Scalar::Exact(_)) => v == target,
        _ => (v.clone() - target.clone()).abs_f64() <= tol * target.abs_f64().max(1.0),
    }
}

fn witness(f: &ExpPolyFunction, implication: Implication, t: Scalar, lhs: Scalar, rhs: &Scalar, prec: usize) -> Witness {
    let defect = (lhs.clone() - rhs.clone()).abs_f64();
    Witness { coordinate: Coordinate::T, z: f.z_of(&t, prec).ok(), location: t, implication, lhs, rhs: rhs.clone(), defect }
}

/// Full check of a candidate: both implications, and for `P(e^{λz})` also the constancy
/// estimate and the counting data. Closed-form expressions need [`grid_verify_expr`].
pub fn verify(f: &CandidateFunction, prob: &SharingProblem, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    match f {
        CandidateFunction::Affine(a) => verify_affine(a, prob, opts),
        CandidateFunction::ExpPoly(e) => {
            let regime = if e.is_exact() && prob.a.is_exact() && prob.b.is_exact() { Regime::Exact } else { Regime::Float };
            let mut report = VerificationReport::empty(regime, prob.relaxed);
            report.absorb(check_implication_a(e, prob, opts.tol)?);
            report.absorb(check_implication_b(e, prob, opts.tol)?);
            attach_g(&mut report, f, prob, opts)?;
            report.counts = Some(counting(e, prob, opts.tol)?);
            Ok(report)
        }
        CandidateFunction::Expr(_) => Err(VerifyError::InvalidRegion(
            "closed-form candidates are verified on a grid; supply a region".into(),
        )),
    }
}

/// `f = sz + B` solved directly.
fn verify_affine(f: &AffineFunction, prob: &SharingProblem, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    let exact = f.slope.is_exact() && f.intercept.is_exact() && prob.a.is_exact() && prob.b.is_exact();
    let mut report = VerificationReport::empty(if exact { Regime::Exact } else { Regime::Float }, prob.relaxed);
    let eq = |x: &Scalar, y: &Scalar| close(x, y, opts.tol);
    let zw = |z: Scalar, implication, lhs: Scalar, rhs: &Scalar| Witness {
        coordinate: Coordinate::Z,
        defect: (lhs.clone() - rhs.clone()).abs_f64(),
        location: z,
        z: None,
        implication,
        lhs,
        rhs: rhs.clone(),
    };
    let value = |z: &Scalar| f.slope.clone() * z.clone() + f.intercept.clone();
    // f = a
    if f.slope.is_zero() {
        if eq(&f.intercept, &prob.a) && !eq(&f.slope, &prob.a) {
            report.holds_a_implies = false;
            report.witnesses.push(zw(Scalar::int(0), Implication::AImpliesA, f.slope.clone(), &prob.a));
        }
    } else {
        let z = (prob.a.clone() - f.intercept.clone()) / f.slope.clone();
        if !eq(&f.slope, &prob.a) {
            report.holds_a_implies = false;
            report.witnesses.push(zw(z, Implication::AImpliesA, f.slope.clone(), &prob.a));
        }
    }
    // f' = b: either nowhere or everywhere
    if eq(&f.slope, &prob.b) {
        let z = if eq(&value(&Scalar::int(0)), &prob.b) { Scalar::int(1) } else { Scalar::int(0) };
        let v = value(&z);
        if !eq(&v, &prob.b) {
            report.holds_b_implies = false;
            report.witnesses.push(zw(z, Implication::BImpliesB, v, &prob.b));
        }
    }
    attach_g(&mut report, &CandidateFunction::Affine(f.clone()), prob, opts)?;
    Ok(report)
}

/// Adds the constancy estimate; a denominator vanishing everywhere becomes a warning.
fn attach_g(report: &mut VerificationReport, f: &CandidateFunction, prob: &SharingProblem, opts: &VerifyOptions) -> Result<(), VerifyError> {
    match check_g_constant(f, prob, opts.samples, opts.tol, opts.seed) {
        Ok(g) => {
            report.g_constant_estimate = Some(g.estimate);
            report.g_max_deviation = Some(g.max_deviation);
            Ok(())
        }
        Err(VerifyError::AllSamplesDegenerate) => {
            report.warnings.push("g is undefined: (f - a)(f' - b) vanishes at every sample".into());
            Ok(())
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exppoly(lambda: Scalar, coeffs: &[i64]) -> ExpPolyFunction {
        ExpPolyFunction::new(lambda, Poly::from_ints(coeffs)).unwrap()
    }

    #[test]
    fn family_iv_exact() {
        let f = exppoly(Scalar::ratio(1, 6), &[8, -48, 48]);
        let prob = SharingProblem::new(Scalar::int(8), Scalar::int(-1)).unwrap();
        let a = check_implication_a(&f, &prob, DEFAULT_TOL).unwrap();
        assert!(a.holds && a.witnesses.is_empty());
        assert_eq!(a.points_checked, 1);
        let b = check_implication_b(&f, &prob, DEFAULT_TOL).unwrap();
        assert!(b.holds && b.witnesses.is_empty());
        assert_eq!(b.points_checked, 1);
    }

    #[test]
    fn family_iv_float() {
        let f = ExpPolyFunction::new(Scalar::ratio(1, 6).to_float(128), Poly::from_ints(&[8, -48, 48]).to_float(128)).unwrap();
        let prob = SharingProblem::new(Scalar::int(8), Scalar::int(-1)).unwrap();
        let r = verify(&CandidateFunction::ExpPoly(f), &prob, &VerifyOptions::default()).unwrap();
        assert!(r.holds() && r.witnesses.is_empty(), "{r:?}");
        assert_eq!(r.regime, Regime::Float);
    }

    #[test]
    fn picard_value_holds_vacuously() {
        // family (iii) with a = 1, b = 2: P = t + 1 in t = e^{2z}
        let f = exppoly(Scalar::int(2), &[1, 1]);
        let prob = SharingProblem::new(Scalar::int(1), Scalar::int(2)).unwrap();
        let a = check_implication_a(&f, &prob, DEFAULT_TOL).unwrap();
        assert!(a.holds);
        assert_eq!(a.points_checked, 0);
    }

    #[test]
    fn counterexample_has_witness() {
        let f = exppoly(Scalar::int(1), &[0, 1, 1]);
        let prob = SharingProblem::new(Scalar::int(1), Scalar::int(3)).unwrap();
        let b = check_implication_b(&f, &prob, DEFAULT_TOL).unwrap();
        assert!(!b.holds);
        let w = b.witnesses.iter().find(|w| w.location == Scalar::int(1)).expect("witness at t = 1");
        assert_eq!(w.lhs, Scalar::int(2));
        assert_eq!(w.defect, 1.0);
    }

    #[test]
    fn affine_family() {
        let f = AffineFunction { slope: Scalar::int(8), intercept: Scalar::int(1) };
        let prob = SharingProblem::new(Scalar::int(8), Scalar::int(-1)).unwrap();
        let r = verify(&CandidateFunction::Affine(f), &prob, &VerifyOptions::default()).unwrap();
        assert!(r.holds());
        assert_eq!(r.g_constant_estimate, Some(Scalar::int(0)));
        let bad = AffineFunction { slope: Scalar::int(-1), intercept: Scalar::int(0) };
        let r = verify(&CandidateFunction::Affine(bad), &prob, &VerifyOptions::default()).unwrap();
        assert!(!r.holds_a_implies && !r.holds_b_implies);
    }

    #[test]
    fn problem_validation() {
        assert!(SharingProblem::new(Scalar::int(1), Scalar::int(1)).is_err());
        assert!(SharingProblem::new(Scalar::int(0), Scalar::int(1)).is_err());
        assert!(SharingProblem::relaxed(Scalar::int(0), Scalar::int(1)).unwrap().relaxed);
    }
}
