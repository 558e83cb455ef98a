//! Case analysis over `(d, j, k)`: feasible cases, the exponent `λ`, the degree-2 family, and
//! exact refutations of the degree-3 and degree-4 ansätze.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::function::{AffineFunction, CandidateFunction, ExpPolyFunction, FunctionError};
use crate::numeric::exact::{gauss_int, pretty_gauss, rat};
use crate::numeric::{poly_roots, GaussRational, Poly, QwNumber, Scalar, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ClassifierError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("d^2 b = j^2 a, so lambda is undefined")]
    DegenerateDenominator,
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Every `b`-point of `f'` is multiple.
    AllBMultiple,
    /// Both simple and multiple `b`-points occur.
    MixedSimpleAndMultiple,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseParams {
    pub d: u32,
    pub j: u32,
    pub k: u32,
    pub branch: Branch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedCase {
    pub d: u32,
    pub j: u32,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseEnumeration {
    pub feasible: Vec<CaseParams>,
    pub rejected: Vec<RejectedCase>,
}

/// Largest degree examined by [`enumerate_cases`].
pub const MAX_CASE_DEGREE: u32 = 12;

/// Feasible `(d, j, k)` with `d <= 12`; every other `(d, j)` comes back with a reason.
pub fn enumerate_cases() -> CaseEnumeration {
    let mut feasible = vec![];
    let mut rejected = vec![];
    let mut reject = |d, j, reason: String| rejected.push(RejectedCase { d, j, reason });
    for d in 2..=MAX_CASE_DEGREE {
        for j in 1..=d {
            if j >= d {
                reject(d, j, "j < d fails: P - a would vanish only at t = 0".into());
            } else if !(2 * j <= d && d <= 3 * j) {
                reject(d, j, format!("2j <= d <= 3j fails: {} <= {d} <= {}", 2 * j, 3 * j));
            } else if j == 1 {
                // all b-points multiple; d is 2 or 3 here and k = d - 1
                feasible.push(CaseParams { d, j, k: d - 1, branch: Branch::AllBMultiple });
            } else if (d - j) % (j - 1) != 0 {
                reject(d, j, format!("k = (d - j)/(j - 1) = {}/{} is not an integer", d - j, j - 1));
            } else {
                let k = (d - j) / (j - 1);
                if !(2..=4).contains(&k) {
                    reject(d, j, format!("k = {k} outside 2 <= k <= 4"));
                } else if d - j > 2 {
                    reject(d, j, format!("jet uniqueness: d - j = {} > 2 (pivot nonzero, so only (4, 2, 2) remains)", d - j));
                } else {
                    feasible.push(CaseParams { d, j, k, branch: Branch::MixedSimpleAndMultiple });
                }
            }
        }
    }
    CaseEnumeration { feasible, rejected }
}

/// `λ` together with the two relations it has to satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaRelations {
    pub lambda: Scalar,
    /// `(λd)^2 - λd`
    pub lambda_d: Scalar,
    /// `(a/b)(λj)^2`
    pub lambda_j: Scalar,
    /// `(k+1)b/(a-b)`
    pub c: Scalar,
    /// Both relations equal `c`.
    pub consistent: bool,
    /// `d = j`, outside the case analysis.
    pub degenerate_dj: bool,
}

/// `λ = d b / (d^2 b - j^2 a)`.
pub fn lambda_from_djk(a: &Scalar, b: &Scalar, d: u32, j: u32) -> Result<Scalar, ClassifierError> {
    let (d, j) = (Scalar::int(d as i64), Scalar::int(j as i64));
    let den = &(&(&d * &d) * b) - &(&(&j * &j) * a);
    if den.is_zero() {
        return Err(ClassifierError::DegenerateDenominator);
    }
    Ok(&(&d * b) / &den)
}

/// [`lambda_from_djk`] plus a check of `(λd)^2 - λd = (a/b)(λj)^2 = (k+1)b/(a-b)`.
pub fn lambda_relations(a: &Scalar, b: &Scalar, d: u32, j: u32, k: u32) -> Result<LambdaRelations, ClassifierError> {
    if b.is_zero() || a == b {
        return Err(ClassifierError::InvalidParameters("b != 0 and a != b required".into()));
    }
    let lambda = lambda_from_djk(a, b, d, j)?;
    let ld = &lambda * &Scalar::int(d as i64);
    let lj = &lambda * &Scalar::int(j as i64);
    let lambda_d = &(&ld * &ld) - &ld;
    let lambda_j = &(a / b) * &(&lj * &lj);
    let c = &Scalar::int(k as i64 + 1) * &(b / &(a - b));
    let eq = |x: &Scalar, y: &Scalar| if x.is_exact() && y.is_exact() { x == y } else { x.approx_eq_rel(y, DEFAULT_TOL) };
    let consistent = eq(&lambda_d, &c) && eq(&lambda_j, &c);
    Ok(LambdaRelations { lambda, lambda_d, lambda_j, c, consistent, degenerate_dj: d == j })
}

/// `(k+1)b/(a-b) = d^2 j^2 ab/(d^2 b - j^2 a)^2`, the relation free of `λ`.
pub fn ohne_lambda_holds(a: &Scalar, b: &Scalar, d: u32, j: u32, k: u32) -> bool {
    let (d, j) = (Scalar::int(d as i64), Scalar::int(j as i64));
    let (d2, j2) = (&d * &d, &j * &j);
    let den = &(&d2 * b) - &(&j2 * a);
    if den.is_zero() || a == b {
        return false;
    }
    let lhs = &Scalar::int(k as i64 + 1) * &(b / &(a - b));
    let rhs = &(&(&d2 * &j2) * &(a * b)) / &(&den * &den);
    if lhs.is_exact() && rhs.is_exact() {
        lhs == rhs
    } else {
        lhs.approx_eq_rel(&rhs, DEFAULT_TOL)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
}

impl FamilyKind {
    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::I => "i",
            FamilyKind::II => "ii",
            FamilyKind::III => "iii",
            FamilyKind::IV => "iv",
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = ClassifierError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(FamilyKind::I),
            "ii" | "2" => Ok(FamilyKind::II),
            "iii" | "3" => Ok(FamilyKind::III),
            "iv" | "4" => Ok(FamilyKind::IV),
            other => Err(ClassifierError::InvalidParameters(format!("unknown family '{other}' (expected i, ii, iii or iv)"))),
        }
    }
}

/// A solution family with the free constant `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub kind: FamilyKind,
    /// Fixed parameters (`a`, `b`, `lambda`).
    pub parameters: BTreeMap<String, Scalar>,
    /// Names of the free parameters.
    pub free: Vec<String>,
    pub constraints: Vec<String>,
    /// The family written out in `z`.
    pub formula: String,
}

impl SolutionFamily {
    fn new(kind: FamilyKind, params: &[(&str, Scalar)], constraints: &[&str], formula: String) -> Self {
        SolutionFamily {
            kind,
            parameters: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            free: vec!["C".into()],
            constraints: constraints.iter().map(|s| s.to_string()).collect(),
            formula,
        }
    }

    pub fn param(&self, name: &str) -> Option<&Scalar> {
        self.parameters.get(name)
    }

    /// The member with free constant `c`; `C = 0` is rejected where it leaves a constant.
    pub fn instantiate(&self, c: &Scalar) -> Result<CandidateFunction, ClassifierError> {
        let p = |name: &str| self.parameters.get(name).cloned().ok_or_else(|| ClassifierError::InvalidParameters(format!("missing {name}")));
        if self.kind != FamilyKind::I && c.is_zero() {
            return Err(ClassifierError::InvalidParameters("C must be nonzero".into()));
        }
        Ok(match self.kind {
            FamilyKind::I => CandidateFunction::Affine(AffineFunction { slope: p("a")?, intercept: c.clone() }),
            FamilyKind::II => CandidateFunction::ExpPoly(ExpPolyFunction::new(Scalar::int(1), Poly::new(vec![Scalar::int(0), c.clone()]))?),
            FamilyKind::III => CandidateFunction::ExpPoly(ExpPolyFunction::new(p("lambda")?, Poly::new(vec![p("a")?, c.clone()]))?),
            FamilyKind::IV => {
                let a = p("a")?;
                let six_ac = &(&Scalar::int(6) * &a) * c;
                CandidateFunction::ExpPoly(ExpPolyFunction::new(p("lambda")?, Poly::new(vec![a, -six_ac.clone(), &six_ac * c]))?)
            }
        })
    }
}

impl fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) f = {}", self.kind.label(), self.formula)?;
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k} = {}", v.pretty())).collect();
        write!(f, "; {}", params.join(", "))?;
        if !self.constraints.is_empty() {
            write!(f, "; constraints: {}", self.constraints.join(", "))?;
        }
        write!(f, "; free: {}", self.free.join(", "))
    }
}

/// `s` as a multiplicative prefix: `""`, `"-"`, `"2*"` or `"(1+i)*"`.
fn factor(s: &Scalar) -> String {
    let p = s.pretty();
    match p.as_str() {
        "1" => String::new(),
        "-1" => "-".into(),
        _ if p.chars().skip(1).all(|c| c.is_ascii_digit() || c == '.') => format!("{p}*"),
        _ => format!("({p})*"),
    }
}

/// `" + s"` or `" - |s|"` for a trailing constant term.
fn plus(s: &Scalar) -> String {
    let p = s.pretty();
    match p.strip_prefix('-') {
        Some(rest) if !rest.contains(['+', '-']) => format!(" - {rest}"),
        _ if p.contains(['+', '-']) => format!(" + ({p})"),
        _ => format!(" + {p}"),
    }
}

fn family_i(a: &Scalar) -> SolutionFamily {
    SolutionFamily::new(FamilyKind::I, &[("a", a.clone())], &[], format!("{}z + C", factor(a)))
}

fn family_ii() -> SolutionFamily {
    SolutionFamily::new(FamilyKind::II, &[("lambda", Scalar::int(1))], &["lambda = 1", "C != 0"], "C*exp(z)".into())
}

/// Family (iii) `C e^{bz/(b-a)} + a`, with the constancy check of `R = bP/(P' + λP)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardFamily {
    pub family: SolutionFamily,
    /// `R ≡ b - a` for constant `P`.
    pub r_constant: bool,
    pub r_value: Scalar,
    /// Every zero of `f' - b` is simple and carries `f = b`.
    pub b_points_simple: bool,
    /// `a = 0`: the family is `C e^z` and `f ≡ f'`.
    pub reduces_to_ii: bool,
}

pub fn picard_family(a: &Scalar, b: &Scalar) -> Result<PicardFamily, ClassifierError> {
    if a == b {
        return Err(ClassifierError::DegenerateParameters("a = b".into()));
    }
    if b.is_zero() {
        return Err(ClassifierError::DegenerateParameters("b = 0".into()));
    }
    let lambda = b / &(b - a);
    // R = bP/(P' + λP) with P ≡ C, as polynomials in C
    let p_of_c: Poly = Poly::t();
    let p_prime: Poly = Poly::zero();
    let num = p_of_c.scale(b);
    let den = &p_prime + &p_of_c.scale(&lambda);
    let r_value = b - a;
    let r_constant = num == den.scale(&r_value);
    // f' - b = λ C t - b is linear in t; its root t* = b/(λC) gives f = a + b/λ for every C
    let f_at_b_point = a + &(b / &lambda);
    let b_points_simple = !lambda.is_zero() && f_at_b_point == *b;
    let formula = format!("C*exp({}z){}", factor(&lambda), plus(a));
    let family = SolutionFamily::new(
        FamilyKind::III,
        &[("a", a.clone()), ("b", b.clone()), ("lambda", lambda)],
        &["lambda = b/(b-a)", "C != 0"],
        formula,
    );
    Ok(PicardFamily { family, r_constant, r_value, b_points_simple, reduces_to_ii: a.is_zero() })
}

/// Derivation record of the degree-2 case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct D2Resolution {
    pub family: SolutionFamily,
    /// Location of the zero of `f''` for `r = 1`.
    pub b_point_t: Scalar,
    /// `b/a`
    pub b_over_a: Scalar,
    pub lambda: Scalar,
    /// `A r^2` in units of `a`.
    pub a_r2_over_a: Scalar,
}

/// Solves the ansatz `f = A t(t - r) + a` with `r = 1`: returns family (iv).
pub fn resolve_case_d2(a: &Scalar) -> Result<D2Resolution, ClassifierError> {
    if a.is_zero() {
        return Err(ClassifierError::InvalidParameters("a must be nonzero".into()));
    }
    // shape t(t - 1); f' = λA t P0'(t), f'' = λ^2 A t (t P0')'
    let p0: Poly = Poly::from_ints(&[0, -1, 1]);
    let d1 = p0.euler();
    let d2 = d1.euler();
    // the nonzero zero of f'' (linear after removing t)
    let lin = d2.shift_down(1);
    let t_b = -(&lin.coeff(0) / &lin.coeff(1));
    // a = f'(1) = λA d1(1), b = f'(t_b) = λA d1(t_b)
    let b_over_a = &d1.eval(&t_b) / &d1.eval(&Scalar::int(1));
    let b = a * &b_over_a;
    // f(t_b) = b: A p0(t_b) + a = b
    let a_coef = &(&b - a) / &p0.eval(&t_b);
    // a = λ A d1(1)
    let lambda = a / &(&a_coef * &d1.eval(&Scalar::int(1)));
    let six_a = factor(&(&Scalar::int(6) * a));
    let formula = format!("{six_a}C*exp(z/6)*(C*exp(z/6) - 1){}", plus(a));
    let family = SolutionFamily::new(
        FamilyKind::IV,
        &[("a", a.clone()), ("b", b), ("lambda", lambda.clone())],
        &["b = -a/8", "lambda = 1/6", "C != 0"],
        formula,
    );
    Ok(D2Resolution { family, b_point_t: t_b, a_r2_over_a: &a_coef / a, b_over_a, lambda })
}

/// One branch of a refutation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefutationBranch {
    pub parameter: String,
    /// `"discriminant = ..."`
    pub statement: String,
    /// Discriminant of the quadratic factor of `f''/t^j`.
    pub discriminant: String,
    pub nonzero: bool,
    /// Independent floating-point evaluation of the discriminant.
    pub numeric_check: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefutationRecord {
    pub case: String,
    pub ansatz: String,
    pub normalization: String,
    /// Degree in `r` of the discriminant under `t -> t/r`.
    pub homogeneity_degree: u32,
    /// `f'(r) = f'(s)` condition after normalization.
    pub condition: String,
    pub excluded: Vec<(String, String)>,
    pub branches: Vec<RefutationBranch>,
    pub refuted: bool,
}

impl fmt::Display for RefutationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {}: {}", self.case, self.ansatz)?;
        writeln!(f, "  normalization: {} (discriminant homogeneous of degree {} in r)", self.normalization, self.homogeneity_degree)?;
        writeln!(f, "  condition: {}", self.condition)?;
        for (p, why) in &self.excluded {
            writeln!(f, "  excluded {p}: {why}")?;
        }
        for b in &self.branches {
            write!(f, "  {}: {} ({})", b.parameter, b.statement, if b.nonzero { "nonzero" } else { "ZERO" })?;
            if let Some(n) = &b.numeric_check {
                write!(f, " [numeric {n}]")?;
            }
            writeln!(f)?;
        }
        write!(f, "  refuted: {}", self.refuted)
    }
}

type Pq = Poly<GaussRational>;

fn pq_from(coeffs: &[(i64, i64)]) -> Pq {
    Poly::new(coeffs.iter().map(|&(re, im)| gauss_int(re, im)).collect())
}

/// Writes a polynomial in `var` with Gaussian-rational coefficients.
fn show_poly(p: &Pq, var: &str) -> String {
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev().filter(|(_, c)| !c.is_zero()) {
        let text = pretty_gauss(c);
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) if c.im.is_zero() => (true, rest.to_string()),
            _ => (false, text),
        };
        let body = if c.im.is_zero() || c.re.is_zero() { body } else { format!("({body})") };
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let term = match (body.as_str(), i) {
            ("1", 0) | (_, 0) => body.clone(),
            ("1", _) => mono,
            _ => format!("{body}*{mono}"),
        };
        out += &match (out.is_empty(), neg) {
            (true, false) => term,
            (true, true) => format!("-{term}"),
            (false, false) => format!(" + {term}"),
            (false, true) => format!(" - {term}"),
        };
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Conditions for `P(t) = t^m (t - 1)(t - s)` with coefficients in `Q(i)[s]`:
/// `(f'(1) - f'(s))/(λC)` as a polynomial in `s`, and the quadratic factor of `f''/(λ^2 C t^m)`.
fn ansatz(m: usize) -> (Pq, [Pq; 3]) {
    // coefficients of t^0..: t^m (t^2 - (1+s) t + s)
    let mut coeffs: Vec<Pq> = vec![Pq::zero(); m];
    coeffs.push(pq_from(&[(0, 0), (1, 0)]));
    coeffs.push(pq_from(&[(-1, 0), (-1, 0)]));
    coeffs.push(pq_from(&[(1, 0)]));
    let p: Poly<Pq> = Poly::new(coeffs);
    let d1 = p.euler();
    let s = Pq::t();
    let at_one = d1.eval(&Pq::one());
    let at_s = d1.eval_in(&s, |c| c.clone());
    let condition = &at_one - &at_s;
    let d2 = d1.euler().shift_down(m);
    (condition, [d2.coeff(0), d2.coeff(1), d2.coeff(2)])
}

fn discriminant(q: &[Pq; 3]) -> Pq {
    &(&q[1] * &q[1]) - &(&pq_from(&[(4, 0)]) * &(&q[2] * &q[0]))
}

/// `d = 3, j = 1, k = 2`: `f = C t(t - 1)(t - s) + a`.
pub fn refute_case_d3() -> RefutationRecord {
    let (condition, quad) = ansatz(1);
    let one_minus_s = pq_from(&[(1, 0), (-1, 0)]);
    let rest = condition.exact_div(&one_minus_s).expect("s = 1 is a root of the condition");
    let disc = discriminant(&quad);
    let mut branches = vec![];
    let roots = poly_roots(&Poly::from(rest.clone()), DEFAULT_TOL).map(|r| r.roots).unwrap_or_default();
    for root in roots {
        let Some(s) = root.location.as_exact().cloned() else { continue };
        let delta = disc.eval(&s);
        let numeric = {
            let sf = Scalar::Exact(s.clone()).to_c64();
            let v = 16.0 * (1.0 + sf) * (1.0 + sf) - 36.0 * sf;
            format!("{:.3}{:+.3}i", v.re, v.im)
        };
        branches.push(RefutationBranch {
            parameter: format!("s = {}", pretty_gauss(&s)),
            statement: format!("discriminant = {}", pretty_gauss(&delta)),
            discriminant: pretty_gauss(&delta),
            nonzero: !delta.is_zero(),
            numeric_check: Some(numeric),
        });
    }
    branches.sort_by(|a, b| b.parameter.cmp(&a.parameter));
    let refuted = branches.len() == 2 && branches.iter().all(|b| b.nonzero);
    RefutationRecord {
        case: "d=3, j=1, k=2".into(),
        ansatz: "f = C t (t - r)(t - s) + a, t = exp(lambda z)".into(),
        normalization: "r = 1".into(),
        homogeneity_degree: 2,
        condition: format!("(1 - s)*({}) = 0", show_poly(&rest, "s")),
        excluded: vec![("s = 1".into(), "the a-points of f are simple".into())],
        branches,
        refuted,
    }
}

/// `d = 4, j = 2, k = 2`: `f = C t^2 (t - 1)(t - w) + a`.
pub fn refute_case_d4() -> RefutationRecord {
    let (condition, quad) = ansatz(2);
    let one_minus_w = pq_from(&[(1, 0), (-1, 0)]);
    let rest = condition.exact_div(&one_minus_w).expect("w = 1 is a root of the condition");
    let disc = discriminant(&quad);
    let mut branches = vec![];

    // w = -1
    let minus_one = gauss_int(-1, 0);
    if rest.eval(&minus_one).is_zero() {
        let delta = disc.eval(&minus_one);
        branches.push(RefutationBranch {
            parameter: "w = -1".into(),
            statement: format!("discriminant = {}", pretty_gauss(&delta)),
            discriminant: pretty_gauss(&delta),
            nonzero: !delta.is_zero(),
            numeric_check: None,
        });
    }

    // the remaining factor must be the minimal polynomial w^2 - w + 1 of Q(w)
    let quotient = rest.exact_div(&pq_from(&[(1, 0), (1, 0)]));
    if quotient == Some(pq_from(&[(1, 0), (-1, 0), (1, 0)])) {
        let rational = |p: &Pq| -> Option<Poly<BigRational>> {
            p.coeffs().iter().map(|c| c.im.is_zero().then(|| c.re.clone())).collect::<Option<Vec<_>>>().map(Poly::new)
        };
        if let Some(dr) = rational(&disc) {
            let delta = QwNumber::from_poly(&dr);
            // (1 + w)^2 = 3w in Q(w)
            let one_plus_w = QwNumber::from_rational(rat(1, 1)) + QwNumber::w();
            debug_assert_eq!(one_plus_w.clone() * one_plus_w, QwNumber::new(rat(0, 1), rat(3, 1)));
            branches.push(RefutationBranch {
                parameter: "w^2 = w - 1 (primitive sixth root of unity)".into(),
                statement: format!("discriminant = {delta}"),
                discriminant: delta.to_string(),
                nonzero: !delta.is_zero(),
                numeric_check: Some(numeric_d4_check(&delta)),
            });
        }
    }

    let refuted = branches.len() == 2 && branches.iter().all(|b| b.nonzero);
    RefutationRecord {
        case: "d=4, j=2, k=2".into(),
        ansatz: "f = C t^2 (t - r)(t - w) + a, t = exp(lambda z)".into(),
        normalization: "r = 1".into(),
        homogeneity_degree: 2,
        condition: format!("(1 - w)*({}) = 0", show_poly(&rest, "w")),
        excluded: vec![("w = 1".into(), "the a-points of f are simple".into())],
        branches,
        refuted,
    }
}

/// Evaluates `81(1+w)^2 - 256w` at `w = e^{iπ/3}` with 128-bit floats and compares to `delta`.
fn numeric_d4_check(delta: &QwNumber) -> String {
    let prec = 128;
    let w = &(&Scalar::int(1) + &Scalar::int(-3).sqrt(prec)) / &Scalar::int(2);
    let one_w = &Scalar::int(1) + &w;
    let direct = &(&Scalar::int(81) * &(&one_w * &one_w)) - &(&Scalar::int(256) * &w);
    let expected = &Scalar::from_rational(delta.x.clone()) + &(&Scalar::from_rational(delta.y.clone()) * &w);
    let err = (&direct - &expected).abs_f64();
    format!("|81(1+w)^2 - 256w - ({delta})| = {err:.1e} at w = exp(i pi/3), {prec} bits")
}

/// All solution families for `(a, b)`.
pub fn classify(a: &Scalar, b: &Scalar) -> Result<Vec<SolutionFamily>, ClassifierError> {
    if a.is_zero() || b.is_zero() {
        return Err(ClassifierError::InvalidParameters("a and b must be nonzero".into()));
    }
    if a == b || (a - b).is_zero() {
        return Err(ClassifierError::InvalidParameters("a and b must differ".into()));
    }
    let mut out = vec![family_i(a), family_ii(), picard_family(a, b)?.family];
    let minus_a_8 = -(a / &Scalar::int(8));
    let is_iv = if a.is_exact() && b.is_exact() { *b == minus_a_8 } else { b.approx_eq_rel(&minus_a_8, DEFAULT_TOL) };
    if is_iv {
        out.push(resolve_case_d2(a)?.family);
    }
    Ok(out)
}

/// Family `kind` at `(a, b)`, when it exists there.
pub fn family(kind: FamilyKind, a: &Scalar, b: &Scalar) -> Result<SolutionFamily, ClassifierError> {
    classify(a, b)?.into_iter().find(|f| f.kind == kind).ok_or_else(|| {
        ClassifierError::InvalidParameters(format!("family ({}) needs b = -a/8; got a = {}, b = {}", kind.label(), a.pretty(), b.pretty()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases() {
        let e = enumerate_cases();
        let got: Vec<(u32, u32, u32, Branch)> = e.feasible.iter().map(|c| (c.d, c.j, c.k, c.branch)).collect();
        assert_eq!(
            got,
            vec![(2, 1, 1, Branch::AllBMultiple), (3, 1, 2, Branch::AllBMultiple), (4, 2, 2, Branch::MixedSimpleAndMultiple)]
        );
        let reason = |d, j| e.rejected.iter().find(|r| r.d == d && r.j == j).unwrap().reason.clone();
        assert!(reason(5, 2).starts_with("jet uniqueness"));
        assert!(reason(7, 2).starts_with("2j <= d <= 3j"));
        let total: u32 = (2..=MAX_CASE_DEGREE).sum();
        assert_eq!(e.feasible.len() + e.rejected.len(), total as usize);
    }

    #[test]
    fn lambda() {
        let r = lambda_relations(&Scalar::int(8), &Scalar::int(-1), 2, 1, 1).unwrap();
        assert_eq!(r.lambda, Scalar::ratio(1, 6));
        assert_eq!((r.lambda_d.clone(), r.lambda_j.clone()), (Scalar::ratio(-2, 9), Scalar::ratio(-2, 9)));
        assert!(r.consistent && !r.degenerate_dj);
        assert!(ohne_lambda_holds(&Scalar::int(8), &Scalar::int(-1), 2, 1, 1));
        assert_eq!(lambda_from_djk(&Scalar::int(4), &Scalar::int(1), 2, 1), Err(ClassifierError::DegenerateDenominator));
        assert!(lambda_relations(&Scalar::int(8), &Scalar::int(-1), 2, 2, 1).unwrap().degenerate_dj);
    }

    #[test]
    fn d2() {
        let r = resolve_case_d2(&Scalar::int(8)).unwrap();
        assert_eq!(r.b_point_t, Scalar::ratio(1, 4));
        assert_eq!(r.b_over_a, Scalar::ratio(-1, 8));
        assert_eq!(r.lambda, Scalar::ratio(1, 6));
        assert_eq!(r.a_r2_over_a, Scalar::int(6));
        assert_eq!(r.family.param("b"), Some(&Scalar::int(-1)));
        let r = resolve_case_d2(&Scalar::int(-16)).unwrap();
        assert_eq!(r.family.param("b"), Some(&Scalar::int(2)));
        let f = r.family.instantiate(&Scalar::int(1)).unwrap();
        let CandidateFunction::ExpPoly(e) = f else { panic!() };
        assert_eq!(e.poly(), &Poly::from_ints(&[-16, 96, -96]));
    }

    #[test]
    fn d3() {
        let r = refute_case_d3();
        assert!(r.refuted, "{r}");
        assert_eq!(r.branches[0].parameter, "s = i");
        assert_eq!(r.branches[0].discriminant, "-4i");
        assert_eq!(r.branches[0].statement, "discriminant = -4i");
        assert_eq!(r.condition, "(1 - s)*(s^2 + 1) = 0");
        assert_eq!(r.branches[1].parameter, "s = -i");
        assert_eq!(r.branches[1].discriminant, "4i");
    }

    #[test]
    fn d4() {
        let r = refute_case_d4();
        assert!(r.refuted, "{r}");
        assert_eq!(r.branches[0].discriminant, "256");
        assert_eq!(r.condition, "(1 - w)*(w^3 + 1) = 0");
        assert_eq!(r.branches[1].discriminant, QwNumber::new(rat(0, 1), rat(-13, 1)).to_string());
    }

    #[test]
    fn picard() {
        let p = picard_family(&Scalar::int(1), &Scalar::int(2)).unwrap();
        assert_eq!(p.family.param("lambda"), Some(&Scalar::int(2)));
        assert!(p.r_constant && p.b_points_simple && !p.reduces_to_ii);
        assert_eq!(p.r_value, Scalar::int(1));
        let p = picard_family(&Scalar::int(0), &Scalar::int(3)).unwrap();
        assert_eq!(p.family.param("lambda"), Some(&Scalar::int(1)));
        assert!(p.reduces_to_ii);
        assert!(picard_family(&Scalar::int(2), &Scalar::int(2)).is_err());
    }

    #[test]
    fn classification() {
        let kinds = |a, b| classify(&Scalar::int(a), &Scalar::int(b)).unwrap().iter().map(|f| f.kind).collect::<Vec<_>>();
        assert_eq!(kinds(8, -1), vec![FamilyKind::I, FamilyKind::II, FamilyKind::III, FamilyKind::IV]);
        assert_eq!(kinds(1, 2), vec![FamilyKind::I, FamilyKind::II, FamilyKind::III]);
        assert!(classify(&Scalar::int(1), &Scalar::int(1)).is_err());
        let iv = family(FamilyKind::IV, &Scalar::int(8), &Scalar::int(-1)).unwrap();
        assert!(iv.constraints.contains(&"b = -a/8".to_string()) && iv.constraints.contains(&"lambda = 1/6".to_string()));
    }
}
