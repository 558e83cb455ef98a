use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ring::{Field, Ring};
use super::scalar::{Regime, Scalar};
use super::NumericError;

/// Univariate polynomial, coefficients lowest power first, kept trimmed
/// (the zero polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly<R = Scalar> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// `c * t^n`
    pub fn monomial(c: R, n: usize) -> Self {
        let mut v = vec![R::zero(); n];
        v.push(c);
        Poly::new(v)
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Poly::monomial(R::one(), 1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// Coefficient of `t^n` (zero past the degree).
    pub fn coeff(&self, n: usize) -> R {
        self.coeffs.get(n).cloned().unwrap_or_else(R::zero)
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    /// Multiplicity of the root `t = 0`; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Drops the factor `t^k` (low coefficients are discarded, assumed zero).
    pub fn shift_down(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn eval(&self, x: &R) -> R {
        self.coeffs.iter().rev().fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Evaluation in an extension ring `S` reached through `lift`.
    pub fn eval_in<S: Ring>(&self, x: &S, lift: impl Fn(&R) -> S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + lift(c))
    }

    /// `d/dt`.
    pub fn derive(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * R::from_i64(i as i64))
                .collect(),
        )
    }

    /// `t * p'(t)`, the Euler operator.
    pub fn euler(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.clone() * R::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    fn add_impl(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    fn sub_impl(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    fn mul_impl(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly { coeffs: vec![] };
        }
        let mut out = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Poly::constant(R::one()), |acc, _| acc.mul_impl(self))
    }
}

impl<R: Field> Poly<R> {
    /// Euclidean division; `None` when dividing by the zero polynomial.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dl = d.leading()?.inv()?;
        let dd = d.degree()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![R::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let c = rem.last().cloned().unwrap_or_else(R::zero) * dl.clone();
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(|x| x.is_zero()) && rem.len() > dd {
                rem.pop();
            }
        }
        Some((Poly::new(quot), Poly::new(rem)))
    }

    pub fn monic(&self) -> Self {
        match self.leading().and_then(|l| l.inv()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Quotient of an exact division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d)?;
        r.is_zero().then_some(q)
    }

    /// Product of the distinct irreducible factors (monic).
    pub fn square_free_part(&self) -> Self {
        let g = self.gcd(&self.derive());
        self.exact_div(&g).map(|p| p.monic()).unwrap_or_else(|| self.monic())
    }

    /// Yun's square-free decomposition: `self = lc * prod_i factors[i]^(i+1)`,
    /// with each factor monic, square-free and pairwise coprime.
    pub fn square_free_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d1 = self.derive();
        let a0 = self.gcd(&d1);
        let mut b = self.exact_div(&a0).expect("gcd divides");
        let mut c = d1.exact_div(&a0).expect("gcd divides derivative");
        let mut d = c - b.derive();
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            out.push(a.clone());
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = c - b.derive();
        }
        while out.last().is_some_and(|f| f.degree() == Some(0)) {
            out.pop();
        }
        out
    }
}

impl<R: Ring> Zero for Poly<R> {
    fn zero() -> Self {
        Poly { coeffs: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<R: Ring> One for Poly<R> {
    fn one() -> Self {
        Poly::constant(R::one())
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn from_i64(n: i64) -> Self {
        Poly::constant(R::from_i64(n))
    }
}

impl<R: Ring> Add for Poly<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.add_impl(&o)
    }
}

impl<R: Ring> Sub for Poly<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.sub_impl(&o)
    }
}

impl<R: Ring> Mul for Poly<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_impl(&o)
    }
}

impl<R: Ring> Neg for Poly<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<'a, R: Ring> Add<&'a Poly<R>> for &'a Poly<R> {
    type Output = Poly<R>;
    fn add(self, o: &'a Poly<R>) -> Poly<R> {
        self.add_impl(o)
    }
}

impl<'a, R: Ring> Sub<&'a Poly<R>> for &'a Poly<R> {
    type Output = Poly<R>;
    fn sub(self, o: &'a Poly<R>) -> Poly<R> {
        self.sub_impl(o)
    }
}

impl<'a, R: Ring> Mul<&'a Poly<R>> for &'a Poly<R> {
    type Output = Poly<R>;
    fn mul(self, o: &'a Poly<R>) -> Poly<R> {
        self.mul_impl(o)
    }
}

impl Poly<Scalar> {
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Scalar::int(c)).collect())
    }

    /// `Some(regime)` when all coefficients share one regime, `None` for mixed coefficients.
    /// The zero polynomial reports `Exact`.
    pub fn regime(&self) -> Option<Regime> {
        let mut it = self.coeffs.iter().map(Scalar::regime);
        let first = it.next().unwrap_or(Regime::Exact);
        it.all(|r| r == first).then_some(first)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    /// Exact coefficients, when every coefficient is exact.
    pub fn to_exact(&self) -> Option<Poly<super::GaussRational>> {
        let v: Option<Vec<_>> = self.coeffs.iter().map(|c| c.as_exact().cloned()).collect();
        v.map(Poly::new)
    }

    pub fn to_float(&self, prec: usize) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.to_float(prec)).collect())
    }

    /// `sum |c_i| |x|^i`, the scale against which residuals are measured.
    pub fn abs_eval(&self, x_abs: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x_abs + c.abs_f64())
    }
}

impl From<Poly<super::GaussRational>> for Poly<Scalar> {
    fn from(p: Poly<super::GaussRational>) -> Self {
        p.map(|c| Scalar::Exact(c.clone()))
    }
}

fn check_regimes(p: &Poly<Scalar>, q: &Poly<Scalar>) -> Result<(), NumericError> {
    let rp = p.regime().ok_or(NumericError::MixedRegime)?;
    let rq = q.regime().ok_or(NumericError::MixedRegime)?;
    if p.is_zero() || q.is_zero() || rp == rq {
        Ok(())
    } else {
        Err(NumericError::MixedRegime)
    }
}

pub fn poly_add(p: &Poly<Scalar>, q: &Poly<Scalar>) -> Result<Poly<Scalar>, NumericError> {
    check_regimes(p, q)?;
    Ok(p + q)
}

pub fn poly_mul(p: &Poly<Scalar>, q: &Poly<Scalar>) -> Result<Poly<Scalar>, NumericError> {
    check_regimes(p, q)?;
    Ok(p * q)
}

pub fn poly_derive(p: &Poly<Scalar>) -> Result<Poly<Scalar>, NumericError> {
    p.regime().ok_or(NumericError::MixedRegime)?;
    Ok(p.derive())
}

/// `beta^2 - 4 alpha gamma`, zero exactly when `alpha t^2 + beta t + gamma` has a double root.
pub fn discriminant_quadratic(alpha: &Scalar, beta: &Scalar, gamma: &Scalar) -> Result<Scalar, NumericError> {
    if alpha.is_zero() {
        return Err(NumericError::LeadingZero);
    }
    Ok(beta * beta - &(Scalar::int(4) * alpha.clone()) * gamma)
}

impl<R: Ring + fmt::Display> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}
