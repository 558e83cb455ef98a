//! Taylor-jet recurrence for `f''(f' - f) = c (f - a)(f' - b)` with `c = (k+1)b/(a-b)`.
//!
//! Differentiating the identity `n` times and evaluating at a point where `f = f'` leaves an
//! equation that is linear in `f^(n+1)`: the coefficient of `f^(n+2)` is `f' - f = 0`. The
//! recurrence therefore propagates a seed `(f, f', f'')` to any order.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::function::Jet;
use crate::numeric::{Scalar, DEFAULT_PRECISION};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("pivot vanished at n = {n} (k = {k}, a = {}, b = {}); see `diophantine squares`", a.pretty(), b.pretty())]
    PivotVanished { n: usize, k: u32, a: Scalar, b: Scalar },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("seed does not satisfy the anchor contract: {0}")]
    InvalidSeed(String),
    #[error("coefficient of f^(n+2) is {0}, not zero")]
    NonlinearStep(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorKind {
    /// `f = f' = a`
    AtAPoint,
    /// `f = f' = b`, a simple zero of `f' - b`
    AtSimpleBPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceContext {
    pub a: Scalar,
    pub b: Scalar,
    pub k: u32,
    pub c: Scalar,
    pub anchor_kind: AnchorKind,
    /// Permits `a = 0` or `b = 0`.
    pub relaxed: bool,
}

impl RecurrenceContext {
    pub fn new(a: Scalar, b: Scalar, k: u32, anchor_kind: AnchorKind) -> Result<Self, JetError> {
        if a.is_zero() || b.is_zero() {
            return Err(JetError::InvalidContext("a and b must be nonzero".into()));
        }
        Self::relaxed(a, b, k, anchor_kind).map(|c| RecurrenceContext { relaxed: false, ..c })
    }

    /// Only `a != b` and `k >= 1` are required.
    pub fn relaxed(a: Scalar, b: Scalar, k: u32, anchor_kind: AnchorKind) -> Result<Self, JetError> {
        if k == 0 {
            return Err(JetError::InvalidContext("k must be positive".into()));
        }
        if a == b || (a.clone() - b.clone()).is_zero() {
            return Err(JetError::InvalidContext("a and b must differ".into()));
        }
        let c = Scalar::int(k as i64 + 1) * b.clone() / (a.clone() - b.clone());
        Ok(RecurrenceContext { a, b, k, c, anchor_kind, relaxed: true })
    }

    pub fn with_anchor(&self, anchor_kind: AnchorKind) -> Self {
        RecurrenceContext { anchor_kind, ..self.clone() }
    }

    fn precision(&self) -> usize {
        self.a.precision().or(self.b.precision()).unwrap_or(DEFAULT_PRECISION)
    }
}

/// The two admissible values of `f''` at an `a`-point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FppCandidates {
    pub u: Scalar,
    pub v: Scalar,
    /// `a^2 + 4(k+1)ab = 0`, so `u = v`.
    pub double: bool,
    /// One candidate is `0`, which contradicts `f''(z0) != 0` (only possible with `b = 0`).
    pub zero_branch: bool,
    /// Set when an exact discriminant had no square root in `Q(i)`.
    pub demoted: Option<String>,
}

/// Roots of `f''(f'' - a) = (k+1)ab`, i.e. `a/2 ± sqrt(a^2 + 4(k+1)ab)/2`.
pub fn fpp_candidates_at_a(ctx: &RecurrenceContext) -> FppCandidates {
    let (a, b) = (&ctx.a, &ctx.b);
    let disc = a.clone() * a.clone() + Scalar::int(4 * (ctx.k as i64 + 1)) * a.clone() * b.clone();
    let mut demoted = None;
    let root = match disc.sqrt_exact() {
        Some(r) => r,
        None if disc.is_exact() => {
            demoted = Some(format!("sqrt({}) is not in Q(i); using {} bits", disc.pretty(), ctx.precision()));
            disc.sqrt(ctx.precision())
        }
        None => disc.sqrt(ctx.precision()),
    };
    let half = Scalar::ratio(1, 2);
    let u = (a.clone() + root.clone()) * half.clone();
    let v = (a.clone() - root) * half;
    FppCandidates { double: disc.is_zero(), zero_branch: u.is_zero() || v.is_zero(), u, v, demoted }
}

/// `f''` at a simple `b`-point: `-k b`.
pub fn fpp_at_simple_b(ctx: &RecurrenceContext) -> Scalar {
    -(Scalar::int(ctx.k as i64) * ctx.b.clone())
}

/// `(n+1) f'' - n f'`.
pub fn pivot_c(n: usize, fpp: &Scalar, fprime: &Scalar) -> Scalar {
    Scalar::int(n as i64 + 1) * fpp.clone() - Scalar::int(n as i64) * fprime.clone()
}

/// `[1 - n(k+1)] b`.
pub fn pivot_ctilde(n: usize, ctx: &RecurrenceContext) -> Scalar {
    Scalar::int(1 - n as i64 * (ctx.k as i64 + 1)) * ctx.b.clone()
}

/// The value `-(n+1)^2 (k+1) b / n` of `a` for which an `a`-point pivot can vanish.
pub fn relation_a_b(n: usize, k: u32, b: &Scalar) -> Scalar {
    let n1 = n as i64 + 1;
    -(Scalar::int(n1 * n1 * (k as i64 + 1)) * b.clone() / Scalar::int(n as i64))
}

/// Whether some admissible `f''` at an `a`-point makes `pivot_c(n, ·, a)` vanish.
pub fn pivot_vanishes_at_a_point(n: usize, ctx: &RecurrenceContext) -> bool {
    let fp = fpp_candidates_at_a(ctx);
    [fp.u, fp.v].iter().any(|u| is_negligible(&pivot_c(n, u, &ctx.a), &ctx.a))
}

/// `x = 0` exactly, or below `2^(-prec/2)` relative to `scale` for floats.
fn is_negligible(x: &Scalar, scale: &Scalar) -> bool {
    match x.precision() {
        None => x.is_zero(),
        Some(p) => x.abs_f64() <= 2f64.powf(-(p as f64) / 2.0) * scale.abs_f64().max(1.0),
    }
}

/// An affine form `c0 + cx X + cy Y` in the two unknowns `X = f^(n+1)`, `Y = f^(n+2)`.
#[derive(Clone, Debug)]
struct Form {
    c0: Scalar,
    cx: Scalar,
    cy: Scalar,
}

impl Form {
    fn known(v: Scalar) -> Form {
        Form { c0: v, cx: Scalar::zero(), cy: Scalar::zero() }
    }

    fn add(&self, o: &Form) -> Form {
        Form { c0: &self.c0 + &o.c0, cx: &self.cx + &o.cx, cy: &self.cy + &o.cy }
    }

    fn sub(&self, o: &Form) -> Form {
        Form { c0: &self.c0 - &o.c0, cx: &self.cx - &o.cx, cy: &self.cy - &o.cy }
    }

    fn scale(&self, s: &Scalar) -> Form {
        Form { c0: &self.c0 * s, cx: &self.cx * s, cy: &self.cy * s }
    }

    /// Product; quadratic terms in the unknowns never occur for `n >= 2`.
    fn mul(&self, o: &Form) -> Form {
        debug_assert!(
            (&self.cx * &o.cx).is_zero() && (&self.cy * &o.cy).is_zero() && (&self.cx * &o.cy).is_zero() && (&self.cy * &o.cx).is_zero(),
            "quadratic term in the recurrence"
        );
        Form {
            c0: &self.c0 * &o.c0,
            cx: &(&self.c0 * &o.cx) + &(&self.cx * &o.c0),
            cy: &(&self.c0 * &o.cy) + &(&self.cy * &o.c0),
        }
    }
}

fn binomial_row(n: usize) -> Vec<Scalar> {
    let mut row = vec![1i64];
    for i in 1..=n {
        row.push(row[i - 1] * (n - i + 1) as i64 / i as i64);
    }
    row.into_iter().map(Scalar::int).collect()
}

/// `d^n/dz^n [f''(f' - f) - c(f - a)(f' - b)]` at the anchor, as a form in `f^(n+1)`, `f^(n+2)`.
/// `x[i]` must be known for `i <= n`; the two entries beyond are unknowns.
fn differentiated_identity(x: &[Scalar], n: usize, ctx: &RecurrenceContext) -> Form {
    leibniz(n, ctx, |i| {
        if i == n + 1 {
            Form { c0: Scalar::zero(), cx: Scalar::int(1), cy: Scalar::zero() }
        } else if i == n + 2 {
            Form { c0: Scalar::zero(), cx: Scalar::zero(), cy: Scalar::int(1) }
        } else {
            Form::known(x[i].clone())
        }
    })
}

/// Bilinear Leibniz expansion of the `n`-th derivative over the jet entries given by `entry`.
fn leibniz(n: usize, ctx: &RecurrenceContext, entry: impl Fn(usize) -> Form) -> Form {
    // derivatives of the shifted factors f - a and f' - b
    let f_minus_a = |i: usize| if i == 0 { entry(0).sub(&Form::known(ctx.a.clone())) } else { entry(i) };
    let fp_minus_b = |i: usize| if i == 0 { entry(1).sub(&Form::known(ctx.b.clone())) } else { entry(i + 1) };
    let mut total = Form::known(Scalar::zero());
    for (i, bc) in binomial_row(n).iter().enumerate() {
        let j = n - i;
        let lhs = entry(i + 2).mul(&entry(j + 1).sub(&entry(j)));
        let rhs = f_minus_a(i).mul(&fp_minus_b(j)).scale(&ctx.c);
        total = total.add(&lhs.sub(&rhs).scale(bc));
    }
    total
}

/// Checks the seed against the anchor contract.
fn check_seed(seed: &Jet, ctx: &RecurrenceContext) -> Result<(), JetError> {
    if seed.order() < 2 {
        return Err(JetError::InvalidSeed("seed needs f, f', f''".into()));
    }
    let d = &seed.derivs;
    let close = |x: &Scalar, y: &Scalar| is_negligible(&(x - y), y);
    match ctx.anchor_kind {
        AnchorKind::AtAPoint => {
            if !close(&d[0], &ctx.a) || !close(&d[1], &ctx.a) {
                return Err(JetError::InvalidSeed(format!("an a-point needs f = f' = a = {}", ctx.a.pretty())));
            }
            let q = &d[2] * &(&d[2] - &ctx.a);
            let rhs = Scalar::int(ctx.k as i64 + 1) * ctx.a.clone() * ctx.b.clone();
            if !close(&q, &rhs) {
                return Err(JetError::InvalidSeed(format!("f'' = {} does not solve f''(f''-a) = (k+1)ab", d[2].pretty())));
            }
        }
        AnchorKind::AtSimpleBPoint => {
            if !close(&d[0], &ctx.b) || !close(&d[1], &ctx.b) {
                return Err(JetError::InvalidSeed(format!("a b-point needs f = f' = b = {}", ctx.b.pretty())));
            }
            if !close(&d[2], &fpp_at_simple_b(ctx)) {
                return Err(JetError::InvalidSeed(format!("a simple b-point needs f'' = -kb = {}", fpp_at_simple_b(ctx).pretty())));
            }
        }
    }
    Ok(())
}

/// Extends a seed `(f, f', f'')` to order `order` through the recurrence.
pub fn jet_extend(seed: &Jet, ctx: &RecurrenceContext, order: usize) -> Result<Jet, JetError> {
    check_seed(seed, ctx)?;
    let mut x: Vec<Scalar> = seed.derivs[..3].to_vec();
    if order < 2 {
        x.truncate(order + 1);
    }
    for n in 2..order {
        let form = differentiated_identity(&x, n, ctx);
        if !is_negligible(&form.cy, &x[1]) {
            return Err(JetError::NonlinearStep(form.cy.pretty()));
        }
        let expected = match ctx.anchor_kind {
            AnchorKind::AtAPoint => pivot_c(n, &x[2], &ctx.a),
            AnchorKind::AtSimpleBPoint => pivot_ctilde(n, ctx),
        };
        debug_assert!(is_negligible(&(&form.cx - &expected), &expected), "pivot disagrees with the closed formula");
        if is_negligible(&form.cx, &x[2]) {
            return Err(JetError::PivotVanished { n, k: ctx.k, a: ctx.a.clone(), b: ctx.b.clone() });
        }
        x.push(-(form.c0 / form.cx));
    }
    Ok(Jet::new(seed.anchor.clone(), x))
}

/// Values of the `n`-th derivatives of `f''(f' - f) - c(f - a)(f' - b)` at the anchor for
/// `n = 0..=order-2`; all vanish when the jet belongs to a solution.
pub fn identity_residuals(jet: &Jet, ctx: &RecurrenceContext) -> Vec<Scalar> {
    if jet.order() < 2 {
        return vec![];
    }
    (0..=jet.order() - 2).map(|n| leibniz(n, ctx, |i| Form::known(jet.derivs[i].clone())).c0).collect()
}

/// Entrywise agreement of two jets through order `upto`: exact equality for exact entries,
/// relative tolerance otherwise.
pub fn jet_match(j1: &Jet, j2: &Jet, upto: usize, tol: f64) -> bool {
    assert!(j1.order() >= upto && j2.order() >= upto, "jets shorter than the comparison order");
    j1.derivs[..=upto].iter().zip(&j2.derivs[..=upto]).all(|(x, y)| {
        if x.is_exact() && y.is_exact() {
            x == y
        } else {
            x.approx_eq_rel(y, tol)
        }
    })
}

/// Exponents of the exceptional family `c e^{λ1 z} sinh(λ2 z) + a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinhParams {
    pub lambda1: Scalar,
    pub lambda2: Scalar,
    /// `λ2^2`, kept exact.
    pub lambda2_squared: Scalar,
}

/// `λ1 = n/(2(n+1))`, `λ2 = sqrt(λ1^2 + (n/(n+1)) b/(a-b))`.
pub fn sinh_exceptional_params(n: usize, k: u32, a: &Scalar, b: &Scalar) -> SinhParams {
    let _ = k;
    let n_over = Scalar::ratio(n as i64, n as i64 + 1);
    let lambda1 = n_over.clone() * Scalar::ratio(1, 2);
    let lambda2_squared = lambda1.clone() * lambda1.clone() + n_over * b.clone() / (a.clone() - b.clone());
    let prec = a.precision().or(b.precision()).unwrap_or(DEFAULT_PRECISION);
    SinhParams { lambda2: lambda2_squared.sqrt(prec), lambda1, lambda2_squared }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(a: i64, b: i64, k: u32, kind: AnchorKind) -> RecurrenceContext {
        RecurrenceContext::new(Scalar::int(a), Scalar::int(b), k, kind).unwrap()
    }

    #[test]
    fn candidates_at_a() {
        let f = fpp_candidates_at_a(&ctx(8, -1, 1, AnchorKind::AtAPoint));
        assert_eq!((f.u.clone(), f.v.clone(), f.double), (Scalar::int(4), Scalar::int(4), true));
        let f = fpp_candidates_at_a(&ctx(9, -1, 1, AnchorKind::AtAPoint));
        assert_eq!((f.u, f.v, f.double), (Scalar::int(6), Scalar::int(3), false));
        let r = RecurrenceContext::relaxed(Scalar::int(1), Scalar::int(0), 1, AnchorKind::AtAPoint).unwrap();
        let f = fpp_candidates_at_a(&r);
        assert_eq!((f.u, f.v, f.zero_branch), (Scalar::int(1), Scalar::int(0), true));
    }

    #[test]
    fn demotion_is_reported() {
        // a^2 + 8ab = 17
        let f = fpp_candidates_at_a(&ctx(1, 2, 1, AnchorKind::AtAPoint));
        assert!(f.demoted.is_some());
        assert!(!f.u.is_exact());
    }

    #[test]
    fn b_point_and_pivots() {
        assert_eq!(fpp_at_simple_b(&ctx(8, -1, 1, AnchorKind::AtSimpleBPoint)), Scalar::int(1));
        assert_eq!(fpp_at_simple_b(&ctx(8, 3, 2, AnchorKind::AtSimpleBPoint)), Scalar::int(-6));
        assert_eq!(pivot_c(2, &Scalar::int(4), &Scalar::int(8)), Scalar::int(-4));
        assert_eq!(pivot_ctilde(1, &ctx(8, -1, 1, AnchorKind::AtSimpleBPoint)), Scalar::int(1));
        assert_eq!(pivot_ctilde(3, &ctx(8, 1, 2, AnchorKind::AtSimpleBPoint)), Scalar::int(-8));
    }

    #[test]
    fn short_orders_echo_the_seed() {
        let seed = Jet::new(Scalar::int(0), vec![Scalar::int(8), Scalar::int(8), Scalar::int(4)]);
        assert_eq!(jet_extend(&seed, &ctx(8, -1, 1, AnchorKind::AtAPoint), 2).unwrap(), seed);
    }

    #[test]
    fn pivot_vanishes_on_the_relation() {
        assert_eq!(relation_a_b(2, 1, &Scalar::int(1)), Scalar::int(-9));
        let c = ctx(-9, 1, 1, AnchorKind::AtAPoint);
        assert!(pivot_vanishes_at_a_point(2, &c));
        let seed = Jet::new(Scalar::int(0), vec![Scalar::int(-9), Scalar::int(-9), Scalar::int(-6)]);
        match jet_extend(&seed, &c, 5) {
            Err(JetError::PivotVanished { n: 2, k: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        // the other branch f'' = -3 is regular
        let seed = Jet::new(Scalar::int(0), vec![Scalar::int(-9), Scalar::int(-9), Scalar::int(-3)]);
        assert!(jet_extend(&seed, &c, 5).is_ok());
    }

    #[test]
    fn bad_seeds_are_rejected() {
        let seed = Jet::new(Scalar::int(0), vec![Scalar::int(8), Scalar::int(8), Scalar::int(5)]);
        assert!(matches!(jet_extend(&seed, &ctx(8, -1, 1, AnchorKind::AtAPoint), 5), Err(JetError::InvalidSeed(_))));
    }

    #[test]
    fn residuals_vanish_on_extended_jets() {
        let c = ctx(9, -1, 1, AnchorKind::AtAPoint);
        // f'' = 6 sits on the vanishing-pivot relation (9 = 9 * 2 * 1 / 2); take the other root
        let seed = Jet::new(Scalar::int(0), vec![Scalar::int(9), Scalar::int(9), Scalar::int(3)]);
        let jet = jet_extend(&seed, &c, 10).unwrap();
        let res = identity_residuals(&jet, &c);
        assert_eq!(res.len(), 9);
        assert!(res.iter().all(|r| r.is_zero()), "{res:?}");
        let mut bad = jet.clone();
        bad.derivs[7] = &bad.derivs[7] + &Scalar::int(1);
        assert!(!identity_residuals(&bad, &c)[6].is_zero());
    }

    #[test]
    fn sinh_parameters() {
        let p = sinh_exceptional_params(2, 1, &Scalar::int(-9), &Scalar::int(1));
        assert_eq!(p.lambda1, Scalar::ratio(1, 3));
        assert_eq!(p.lambda2_squared, Scalar::ratio(1, 9) - Scalar::ratio(1, 15));
        assert!((p.lambda2.abs_f64() - (2.0f64 / 45.0).sqrt()).abs() < 1e-15);
        let diff = p.lambda1.clone() * p.lambda1.clone() - p.lambda2_squared.clone();
        assert_eq!(diff, -(Scalar::ratio(2, 3) * Scalar::int(1) / Scalar::int(-10)));
    }
}
