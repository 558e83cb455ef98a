//! Root counts on the fundamental domain, read off polynomials in `t`.

use serde::{Deserialize, Serialize};

use super::{SharingProblem, VerifyError};
use crate::function::ExpPolyFunction;
use crate::numeric::roots::is_origin;
use crate::numeric::{poly_roots_with, GaussRational, Poly, RootOptions, Scalar, DEFAULT_PRECISION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingData {
    /// `deg P`
    pub d: usize,
    /// Order of `t = 0` as a root of `P - a`.
    pub j: usize,
    /// Common order of the zeros of `f''`; `None` if there are none or the orders differ.
    pub k: Option<u32>,
    /// Orders of the distinct zeros of `f''` in `t != 0`.
    pub fpp_orders: Vec<u32>,
    pub n_a: usize,
    pub nbar_a: usize,
    pub n_b_fprime: usize,
    pub nbar_b_fprime: usize,
    pub n_0_fpp: usize,
}

/// One clause of the counting identities with its outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub clause: String,
    pub holds: bool,
}

impl CountingData {
    /// Evaluates the identities satisfied by every solution whose `f''` has zeros.
    pub fn lemma_checks(&self) -> Vec<LemmaCheck> {
        let (d, j) = (self.d, self.j);
        let dj = d.saturating_sub(j);
        let v = vec![
            ("(b) 1 <= j < d", j >= 1 && j < d),
            ("(c) n(a) = nbar(a) = d - j", self.n_a == dj && self.nbar_a == dj),
            ("(e) n(0, f'') = d - j", self.n_0_fpp == dj),
            ("(f) n(b, f') = d", self.n_b_fprime == d),
            ("(f) nbar(b, f') = j", self.nbar_b_fprime == j),
            ("2j <= d <= 3j", 2 * j <= d && d <= 3 * j),
            ("zeros of f'' share one order k", self.k.is_some()),
        ];
        v.into_iter().map(|(c, h)| LemmaCheck { clause: c.into(), holds: h }).collect()
    }

    pub fn all_clauses_hold(&self) -> bool {
        self.lemma_checks().iter().all(|c| c.holds)
    }
}

/// Multiplicities of the nonzero roots of `p` (one entry per distinct root).
fn nonzero_root_orders(p: &Poly, tol: f64, prec: usize) -> Result<Vec<u32>, VerifyError> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(vec![]);
    }
    if let Some(e) = p.to_exact() {
        let j = e.valuation().unwrap_or(0);
        let q0: Poly<GaussRational> = e.shift_down(j);
        let mut orders = vec![];
        for (i, factor) in q0.square_free_decomposition().iter().enumerate() {
            for _ in 0..factor.degree().unwrap_or(0) {
                orders.push(i as u32 + 1);
            }
        }
        return Ok(orders);
    }
    let rs = poly_roots_with(p, &RootOptions::new(tol).with_precision(prec))?;
    Ok(rs.roots.iter().filter(|r| !is_origin(&r.location, tol)).map(|r| r.multiplicity).collect())
}

fn prec_of(f: &ExpPolyFunction) -> usize {
    f.lambda().precision().or_else(|| f.poly().coeffs().iter().find_map(Scalar::precision)).unwrap_or(DEFAULT_PRECISION)
}

/// Counting data of `f = P(e^{λz})`.
pub fn counting(f: &ExpPolyFunction, prob: &SharingProblem, tol: f64) -> Result<CountingData, VerifyError> {
    let d = f.degree();
    if d == 0 {
        return Err(VerifyError::DegenerateCandidate);
    }
    let prec = prec_of(f);
    let p_minus_a = f.poly() - &Poly::constant(prob.a.clone());
    let j = valuation_tol(&p_minus_a, tol);
    let a_orders = nonzero_root_orders(&p_minus_a, tol, prec)?;
    let fp_minus_b = &f.derivative_poly(1) - &Poly::constant(prob.b.clone());
    let b_orders = nonzero_root_orders(&fp_minus_b, tol, prec)?;
    let fpp_orders = nonzero_root_orders(&f.derivative_poly(2), tol, prec)?;
    let k = match fpp_orders.first() {
        Some(&k0) if fpp_orders.iter().all(|&k| k == k0) => Some(k0),
        _ => None,
    };
    let sum = |v: &[u32]| v.iter().map(|&m| m as usize).sum::<usize>();
    Ok(CountingData {
        d,
        j,
        k,
        n_a: sum(&a_orders),
        nbar_a: a_orders.len(),
        n_b_fprime: sum(&b_orders),
        nbar_b_fprime: b_orders.len(),
        n_0_fpp: sum(&fpp_orders),
        fpp_orders,
    })
}

/// Number of leading coefficients that vanish (exactly, or below `tol` relative to the largest).
fn valuation_tol(p: &Poly, tol: f64) -> usize {
    if p.is_exact() {
        return p.valuation().unwrap_or(0);
    }
    let scale = p.coeffs().iter().map(Scalar::abs_f64).fold(0.0, f64::max).max(1.0);
    p.coeffs().iter().take_while(|c| c.abs_f64() <= tol * scale).count()
}

/// Degrees of `h1 = λtP'/(P - a)` after cancelling common factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1Info {
    pub numerator_degree: usize,
    pub denominator_degree: usize,
    /// `max` of the two degrees.
    pub degree: usize,
    pub pole_at_zero: bool,
    pub pole_at_infinity: bool,
}

fn reduce_exact(num: &Poly<GaussRational>, den: &Poly<GaussRational>) -> (Poly<GaussRational>, Poly<GaussRational>) {
    let g = num.gcd(den);
    (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
}

/// `h1` is only available in exact arithmetic (cancellation needs exact gcds).
pub fn h1_info(f: &ExpPolyFunction, prob: &SharingProblem) -> Option<H1Info> {
    let num = f.derivative_poly(1).to_exact()?;
    let den = (f.poly() - &Poly::constant(prob.a.clone())).to_exact()?;
    let (n, d) = reduce_exact(&num, &den);
    let (nd, dd) = (n.degree()?, d.degree()?);
    Some(H1Info {
        numerator_degree: nd,
        denominator_degree: dd,
        degree: nd.max(dd),
        pole_at_zero: d.valuation().unwrap_or(0) > 0,
        pole_at_infinity: nd > dd,
    })
}

/// Pole orders of `h2 = f''/(f' - b)` at the roots of `f' - b`, as `(t, order)`.
pub fn h2_pole_orders(f: &ExpPolyFunction, prob: &SharingProblem, tol: f64) -> Result<Vec<(Scalar, u32)>, VerifyError> {
    let num = f.derivative_poly(2);
    let den = &f.derivative_poly(1) - &Poly::constant(prob.b.clone());
    let prec = prec_of(f);
    let rs = poly_roots_with(&den, &RootOptions::new(tol).with_precision(prec))?;
    let mut out = vec![];
    for r in rs.roots {
        let vanishing = vanishing_order(&num, &r.location, r.multiplicity, tol);
        let order = r.multiplicity.saturating_sub(vanishing);
        if order > 0 {
            out.push((r.location, order));
        }
    }
    Ok(out)
}

/// Order of vanishing of `p` at `x`, capped at `cap`.
fn vanishing_order(p: &Poly, x: &Scalar, cap: u32, tol: f64) -> u32 {
    let mut q = p.clone();
    let mut n = 0;
    while n < cap {
        let v = q.eval(x);
        let zero = if v.is_exact() {
            num_traits::Zero::is_zero(&v)
        } else {
            v.abs_f64() <= tol.sqrt() * q.abs_eval(x.abs_f64()).max(1.0)
        };
        if !zero {
            break;
        }
        n += 1;
        q = q.derive();
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DEFAULT_TOL;

    fn family_iv() -> (ExpPolyFunction, SharingProblem) {
        (
            ExpPolyFunction::new(Scalar::ratio(1, 6), Poly::from_ints(&[8, -48, 48])).unwrap(),
            SharingProblem::new(Scalar::int(8), Scalar::int(-1)).unwrap(),
        )
    }

    #[test]
    fn family_iv_counts() {
        let (f, prob) = family_iv();
        let c = counting(&f, &prob, DEFAULT_TOL).unwrap();
        assert_eq!(
            (c.d, c.j, c.k, c.n_a, c.nbar_a, c.n_b_fprime, c.nbar_b_fprime, c.n_0_fpp),
            (2, 1, Some(1), 1, 1, 2, 1, 1)
        );
        assert!(c.all_clauses_hold());
        let h1 = h1_info(&f, &prob).unwrap();
        assert_eq!(h1.degree, 1);
        assert!(!h1.pole_at_zero && !h1.pole_at_infinity);
        let h2 = h2_pole_orders(&f, &prob, DEFAULT_TOL).unwrap();
        assert_eq!(h2, vec![(Scalar::ratio(1, 4), 1)]);
    }

    #[test]
    fn no_fpp_zeros_gives_no_k() {
        let f = ExpPolyFunction::new(Scalar::int(1), Poly::from_ints(&[2, 0, 0, 1])).unwrap();
        let prob = SharingProblem::new(Scalar::int(2), Scalar::int(1)).unwrap();
        let c = counting(&f, &prob, DEFAULT_TOL).unwrap();
        assert_eq!(c.k, None);
        assert_eq!(c.n_0_fpp, 0);
        // t^2 + a: j = d, which clause (b) rules out
        let g = ExpPolyFunction::new(Scalar::int(3), Poly::from_ints(&[2, 0, 1])).unwrap();
        let c = counting(&g, &prob, DEFAULT_TOL).unwrap();
        assert_eq!((c.d, c.j), (2, 2));
        assert!(!c.lemma_checks()[0].holds);
    }
}
