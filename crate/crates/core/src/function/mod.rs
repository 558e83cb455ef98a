//! Candidate entire functions: affine maps, polynomials in `e^{λz}` and parsed closed forms.

pub mod expr;
pub mod series;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use expr::{parse_expr, parse_scalar, print_expr, Expr, ExprFunction, ParseError};

use crate::numeric::{NumericError, Poly, Scalar, DEFAULT_PRECISION};

/// Default jet order.
pub const DEFAULT_ORDER: usize = 12;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FunctionError {
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("candidate is constant")]
    DegenerateCandidate,
    #[error("parse error {0}")]
    Parse(ParseError),
    #[error("expression is not entire{}: {reason}", offset.map(|o| format!(" (at byte {o})")).unwrap_or_default())]
    NonEntire { offset: Option<usize>, reason: String },
    #[error("'{0}' is not a constant expression")]
    NotConstant(String),
    #[error("t = 0 is not a value of e^(lambda z)")]
    ZeroT,
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// `f(z) = slope * z + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFunction {
    pub slope: Scalar,
    pub intercept: Scalar,
}

/// `f(z) = P(e^{λz})` with `λ != 0` and `deg P >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpPolyFunction {
    lambda: Scalar,
    poly: Poly,
}

impl ExpPolyFunction {
    pub fn new(lambda: Scalar, poly: Poly) -> Result<Self, FunctionError> {
        if lambda.is_zero() {
            return Err(FunctionError::ZeroLambda);
        }
        if poly.degree().unwrap_or(0) == 0 {
            return Err(FunctionError::DegenerateCandidate);
        }
        Ok(ExpPolyFunction { lambda, poly })
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn is_exact(&self) -> bool {
        self.lambda.is_exact() && self.poly.is_exact()
    }

    /// `∂_z^n P` as a polynomial in `t`.
    pub fn derivative_poly(&self, n: usize) -> Poly {
        let mut p = self.poly.clone();
        for _ in 0..n {
            p = dz_derive(&p, &self.lambda).expect("lambda checked at construction");
        }
        p
    }

    pub fn evaluate_t(&self, t: &Scalar) -> Scalar {
        self.poly.eval(t)
    }

    /// `t = e^{λz}`; exact only when `λz` is exactly zero.
    pub fn t_of(&self, z: &Scalar, prec: usize) -> Scalar {
        (self.lambda.clone() * z.clone()).exp(prec)
    }

    /// Principal-branch preimage `z = log(t)/λ` of a point `t != 0`.
    pub fn z_of(&self, t: &Scalar, prec: usize) -> Result<Scalar, FunctionError> {
        if t.is_zero() {
            return Err(FunctionError::ZeroT);
        }
        Ok(t.ln(prec)?.checked_div(&self.lambda)?)
    }

    /// The period `2πi/λ`.
    pub fn period(&self, prec: usize) -> Scalar {
        let pi = crate::numeric::BigComplex::from_parts(crate::numeric::BigComplex::pi(prec), astro_float::BigFloat::from_word(0, prec), prec);
        let two_pi_i = Scalar::Float(pi) * Scalar::gauss(crate::numeric::exact::rat(0, 1), crate::numeric::exact::rat(2, 1));
        two_pi_i / self.lambda.clone()
    }
}

/// The derivation `∂_z Q(t) = λ t Q'(t)`.
pub fn dz_derive(p: &Poly, lambda: &Scalar) -> Result<Poly, FunctionError> {
    if lambda.is_zero() {
        return Err(FunctionError::ZeroLambda);
    }
    Ok(p.euler().scale(lambda))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CandidateFunction {
    Affine(AffineFunction),
    #[serde(rename = "exppoly")]
    ExpPoly(ExpPolyFunction),
    Expr(ExprFunction),
}

impl CandidateFunction {
    /// `f(z)`; precision comes from `z` when it is a float, else `prec`.
    pub fn evaluate(&self, z: &Scalar, prec: usize) -> Scalar {
        let prec = z.precision().unwrap_or(prec);
        match self {
            CandidateFunction::Affine(f) => f.slope.clone() * z.clone() + f.intercept.clone(),
            CandidateFunction::ExpPoly(f) => f.evaluate_t(&f.t_of(z, prec)),
            CandidateFunction::Expr(f) => f.eval(z, prec),
        }
    }

    /// Equivalent closed form, used as an independent evaluation route.
    pub fn to_expr(&self) -> ExprFunction {
        match self {
            CandidateFunction::Expr(f) => f.clone(),
            CandidateFunction::Affine(f) => ExprFunction::new(Expr::Add(
                Box::new(Expr::Mul(Box::new(Expr::Const(f.slope.clone())), Box::new(Expr::Var))),
                Box::new(Expr::Const(f.intercept.clone())),
            ))
            .expect("affine maps are entire"),
            CandidateFunction::ExpPoly(f) => expr_of_exppoly(f),
        }
    }
}

impl From<AffineFunction> for CandidateFunction {
    fn from(f: AffineFunction) -> Self {
        CandidateFunction::Affine(f)
    }
}

impl From<ExpPolyFunction> for CandidateFunction {
    fn from(f: ExpPolyFunction) -> Self {
        CandidateFunction::ExpPoly(f)
    }
}

impl From<ExprFunction> for CandidateFunction {
    fn from(f: ExprFunction) -> Self {
        CandidateFunction::Expr(f)
    }
}

/// `sum c_k exp(kλ z)`.
fn expr_of_exppoly(f: &ExpPolyFunction) -> ExprFunction {
    let mut acc: Option<Expr> = None;
    for (k, c) in f.poly().coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = if k == 0 {
            Expr::Const(c.clone())
        } else {
            let arg = Expr::Mul(Box::new(Expr::Const(Scalar::int(k as i64) * f.lambda().clone())), Box::new(Expr::Var));
            Expr::Mul(Box::new(Expr::Const(c.clone())), Box::new(Expr::Exp(Box::new(arg))))
        };
        acc = Some(match acc {
            None => term,
            Some(a) => Expr::Add(Box::new(a), Box::new(term)),
        });
    }
    ExprFunction::new(acc.unwrap_or(Expr::Const(Scalar::int(0)))).expect("sums of exponentials are entire")
}

/// Derivative values `(f(z0), f'(z0), ..., f^(N)(z0))` at an anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub anchor: Scalar,
    pub derivs: Vec<Scalar>,
}

impl Jet {
    pub fn new(anchor: Scalar, derivs: Vec<Scalar>) -> Self {
        assert!(!derivs.is_empty(), "a jet has at least one entry");
        Jet { anchor, derivs }
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn is_exact(&self) -> bool {
        self.derivs.iter().all(Scalar::is_exact)
    }

    /// Taylor coefficient `f^(n)(z0)/n!`.
    pub fn taylor_coefficient(&self, n: usize) -> Scalar {
        let mut fact = Scalar::int(1);
        for k in 2..=n {
            fact = fact * Scalar::int(k as i64);
        }
        self.derivs[n].clone() / fact
    }
}

/// Jet of `f` at `z0`; exact whenever the inputs allow it.
pub fn jet_of(f: &CandidateFunction, z0: &Scalar, order: usize) -> Jet {
    let prec = z0.precision().unwrap_or(DEFAULT_PRECISION);
    let derivs = match f {
        CandidateFunction::Affine(a) => {
            let mut d = vec![a.slope.clone() * z0.clone() + a.intercept.clone()];
            if order >= 1 {
                d.push(a.slope.clone());
            }
            d.extend((2..=order).map(|_| Scalar::int(0)));
            d
        }
        CandidateFunction::ExpPoly(e) => exppoly_derivs(e, &e.t_of(z0, prec), order),
        CandidateFunction::Expr(e) => e.derivatives(z0, order, prec),
    };
    Jet::new(z0.clone(), derivs)
}

/// Jet of `P(e^{λz})` at the point where `e^{λz} = t0`, computed in `t` alone so that an
/// exact `t0` gives an exact jet. The anchor is the principal preimage of `t0`.
pub fn jet_of_exppoly_at_t(f: &ExpPolyFunction, t0: &Scalar, order: usize) -> Result<Jet, FunctionError> {
    let prec = t0.precision().unwrap_or(DEFAULT_PRECISION);
    let anchor = f.z_of(t0, prec)?;
    Ok(Jet::new(anchor, exppoly_derivs(f, t0, order)))
}

fn exppoly_derivs(f: &ExpPolyFunction, t0: &Scalar, order: usize) -> Vec<Scalar> {
    let mut p = f.poly().clone();
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        out.push(p.eval(t0));
        if n < order {
            p = dz_derive(&p, f.lambda()).expect("nonzero lambda");
        }
    }
    out
}

/// On-disk candidate description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CandidateFile {
    Affine {
        slope: Scalar,
        intercept: Scalar,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Scalar>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Scalar>,
    },
    #[serde(rename = "exppoly")]
    ExpPoly {
        lambda: Scalar,
        coeffs: Vec<Scalar>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Scalar>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Scalar>,
    },
    Expr {
        source: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Scalar>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Scalar>,
    },
}

impl CandidateFile {
    pub fn from_candidate(f: &CandidateFunction, a: Option<Scalar>, b: Option<Scalar>) -> Self {
        match f {
            CandidateFunction::Affine(x) => CandidateFile::Affine { slope: x.slope.clone(), intercept: x.intercept.clone(), a, b },
            CandidateFunction::ExpPoly(x) => {
                CandidateFile::ExpPoly { lambda: x.lambda().clone(), coeffs: x.poly().coeffs().to_vec(), a, b }
            }
            CandidateFunction::Expr(x) => CandidateFile::Expr { source: x.to_string(), a, b },
        }
    }

    pub fn candidate(&self) -> Result<CandidateFunction, FunctionError> {
        Ok(match self {
            CandidateFile::Affine { slope, intercept, .. } => {
                CandidateFunction::Affine(AffineFunction { slope: slope.clone(), intercept: intercept.clone() })
            }
            CandidateFile::ExpPoly { lambda, coeffs, .. } => {
                CandidateFunction::ExpPoly(ExpPolyFunction::new(lambda.clone(), Poly::new(coeffs.clone()))?)
            }
            CandidateFile::Expr { source, .. } => CandidateFunction::Expr(parse_expr(source)?),
        })
    }

    pub fn values(&self) -> (Option<&Scalar>, Option<&Scalar>) {
        match self {
            CandidateFile::Affine { a, b, .. } | CandidateFile::ExpPoly { a, b, .. } | CandidateFile::Expr { a, b, .. } => {
                (a.as_ref(), b.as_ref())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family_iv() -> ExpPolyFunction {
        ExpPolyFunction::new(Scalar::ratio(1, 6), Poly::from_ints(&[8, -48, 48])).unwrap()
    }

    #[test]
    fn derivation_in_t() {
        let f = family_iv();
        let p1 = f.derivative_poly(1);
        assert_eq!(p1, Poly::from_ints(&[0, -8, 16]));
        let p2 = f.derivative_poly(2);
        assert_eq!(p2, Poly::new(vec![Scalar::int(0), Scalar::ratio(-4, 3), Scalar::ratio(16, 3)]));
        assert_eq!(p2.eval(&Scalar::ratio(1, 4)), Scalar::int(0));
        assert_eq!(dz_derive(&Poly::from_ints(&[5]), &Scalar::int(2)).unwrap(), Poly::new(vec![]));
        assert_eq!(dz_derive(&p1, &Scalar::int(0)), Err(FunctionError::ZeroLambda));
    }

    #[test]
    fn evaluation_routes() {
        let f = family_iv();
        assert_eq!(f.evaluate_t(&Scalar::ratio(1, 4)), Scalar::int(-1));
        let aff = CandidateFunction::Affine(AffineFunction { slope: Scalar::int(8), intercept: Scalar::int(3) });
        assert_eq!(aff.evaluate(&Scalar::int(0), 128), Scalar::int(3));
        let e = CandidateFunction::Expr(parse_expr("exp(z)-1").unwrap());
        assert_eq!(e.evaluate(&Scalar::int(0), 128), Scalar::int(0));
    }

    #[test]
    fn jets() {
        let e = CandidateFunction::Expr(parse_expr("exp(z)").unwrap());
        assert_eq!(jet_of(&e, &Scalar::int(0), 4).derivs, vec![Scalar::int(1); 5]);

        let f = CandidateFunction::ExpPoly(family_iv());
        assert_eq!(jet_of(&f, &Scalar::int(0), 2).derivs, [8, 8, 4].map(Scalar::int).to_vec());

        let q = CandidateFunction::Expr(parse_expr("(1/2)*z^2").unwrap());
        assert_eq!(
            jet_of(&q, &Scalar::int(1), 2).derivs,
            vec![Scalar::ratio(1, 2), Scalar::int(1), Scalar::int(1)]
        );

        // t = 1/4 is a double root of f' + 1, so f'' vanishes there
        let b = jet_of_exppoly_at_t(&family_iv(), &Scalar::ratio(1, 4), 2).unwrap();
        assert_eq!(b.derivs, [-1, -1, 0].map(Scalar::int).to_vec());
        assert!(!b.anchor.is_exact());
    }

    #[test]
    fn candidate_file_round_trip() {
        let text = r#"{"kind":"exppoly","lambda":"1/6","coeffs":[8,-48,48],"a":8,"b":"-1"}"#;
        let file: CandidateFile = serde_json::from_str(text).unwrap();
        let cand = file.candidate().unwrap();
        assert_eq!(cand, CandidateFunction::ExpPoly(family_iv()));
        let again: CandidateFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(again, file);
        let e: CandidateFile = serde_json::from_str(r#"{"kind":"expr","source":"exp(z^3)-1"}"#).unwrap();
        assert!(matches!(e.candidate().unwrap(), CandidateFunction::Expr(_)));
    }
}
