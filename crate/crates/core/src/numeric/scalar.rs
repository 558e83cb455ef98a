use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bigfloat::BigComplex;
use super::exact::{format_gauss, gauss_sqrt_exact, parse_gauss, pretty_gauss, rat, GaussRational};
use super::ring::{Field, Ring};
use super::NumericError;

/// Default working precision of the Float regime, in bits.
pub const DEFAULT_PRECISION: usize = 128;

/// Default certification tolerance.
pub const DEFAULT_TOL: f64 = 1e-24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Exact,
    Float,
}

/// A complex number, either exact in `Q(i)` or a big float with a tracked precision.
///
/// Arithmetic between two floats runs at the smaller precision. Mixing an exact operand into
/// a float operation promotes the exact value to the float's precision.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRational),
    Float(BigComplex),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(Complex::new(rat(n, 1), rat(0, 1)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(Complex::new(rat(n, d), rat(0, 1)))
    }

    pub fn gauss(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(Complex::new(re, im))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar::Exact(Complex::new(q, BigRational::zero()))
    }

    pub fn i() -> Self {
        Scalar::Exact(Complex::new(rat(0, 1), rat(1, 1)))
    }

    pub fn float(re: f64, im: f64, prec: usize) -> Self {
        Scalar::Float(BigComplex::from_f64(re, im, prec))
    }

    pub fn regime(&self) -> Regime {
        match self {
            Scalar::Exact(_) => Regime::Exact,
            Scalar::Float(_) => Regime::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&GaussRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn precision(&self) -> Option<usize> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Float(z) => Some(z.precision()),
        }
    }

    /// Converts to the Float regime at `prec` bits (floats are re-rounded).
    pub fn to_float(&self, prec: usize) -> Scalar {
        Scalar::Float(self.to_big(prec))
    }

    pub fn to_big(&self, prec: usize) -> BigComplex {
        match self {
            Scalar::Exact(q) => BigComplex::from_gauss(q, prec),
            Scalar::Float(z) => z.with_precision(prec),
        }
    }

    pub fn to_c64(&self) -> Complex<f64> {
        match self {
            Scalar::Exact(q) => Complex::new(
                q.re.to_f64().unwrap_or(f64::NAN),
                q.im.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Float(z) => z.to_c64(),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.norm_sqr().to_f64().unwrap_or(f64::INFINITY).sqrt(),
            Scalar::Float(z) => z.abs_f64(),
        }
    }

    /// `|self - other| <= tol`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.clone() - other.clone()).abs_f64() <= tol,
        }
    }

    /// `|self - other| <= tol * max(1, |other|)`.
    pub fn approx_eq_rel(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.clone() - other.clone()).abs_f64() <= tol * other.abs_f64().max(1.0),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, NumericError> {
        match (self, rhs) {
            (_, Scalar::Exact(d)) if d.is_zero() => Err(NumericError::DivisionByZero),
            (_, Scalar::Float(d)) if d.is_zero() => Err(NumericError::DivisionByZero),
            _ => Ok(self.clone() / rhs.clone()),
        }
    }

    /// Exact principal square root when it lies in `Q(i)`.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        self.as_exact().and_then(gauss_sqrt_exact).map(Scalar::Exact)
    }

    /// Principal square root; exact inputs stay exact when possible and are otherwise
    /// demoted to the Float regime at `prec` bits.
    pub fn sqrt(&self, prec: usize) -> Scalar {
        match self {
            Scalar::Exact(_) => self.sqrt_exact().unwrap_or_else(|| Scalar::Float(self.to_big(prec).sqrt())),
            Scalar::Float(z) => Scalar::Float(z.sqrt()),
        }
    }

    /// `e^self`; exact zero maps to exact one, other exact inputs are promoted at `prec` bits.
    pub fn exp(&self, prec: usize) -> Scalar {
        match self {
            Scalar::Exact(q) if q.is_zero() => Scalar::one(),
            Scalar::Exact(_) => Scalar::Float(self.to_big(prec).exp()),
            Scalar::Float(z) => Scalar::Float(z.exp()),
        }
    }

    /// Principal logarithm; exact one maps to exact zero.
    pub fn ln(&self, prec: usize) -> Result<Scalar, NumericError> {
        match self {
            Scalar::Exact(q) if q.is_one() => Ok(Scalar::zero()),
            Scalar::Exact(_) => self.to_big(prec).ln().map(Scalar::Float),
            Scalar::Float(z) => z.ln().map(Scalar::Float),
        }
    }

    pub fn powi(&self, n: u32) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.powu(n)),
            Scalar::Float(z) => Scalar::Float(z.powi(n)),
        }
    }

    /// Compact rendering for reports: exact values as `-2/9`, `1/2-1/3i`; floats with ~20 digits.
    pub fn pretty(&self) -> String {
        match self {
            Scalar::Exact(q) => pretty_gauss(q),
            Scalar::Float(z) => {
                let c = z.to_c64();
                if c.im == 0.0 {
                    format!("{:.17e}", c.re)
                } else {
                    format!("{:.17e}{:+.17e}i", c.re, c.im)
                }
            }
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<GaussRational> for Scalar {
    fn from(q: GaussRational) -> Self {
        Scalar::Exact(q)
    }
}

fn binop(
    a: Scalar,
    b: Scalar,
    exact: impl FnOnce(GaussRational, GaussRational) -> GaussRational,
    float: impl FnOnce(&BigComplex, &BigComplex) -> BigComplex,
) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
        (Scalar::Float(x), Scalar::Float(y)) => Scalar::Float(float(&x, &y)),
        (Scalar::Exact(x), Scalar::Float(y)) => Scalar::Float(float(&BigComplex::from_gauss(&x, y.precision()), &y)),
        (Scalar::Float(x), Scalar::Exact(y)) => {
            let p = x.precision();
            Scalar::Float(float(&x, &BigComplex::from_gauss(&y, p)))
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        binop(self, o, |x, y| x + y, BigComplex::add)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        binop(self, o, |x, y| x - y, BigComplex::sub)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        binop(self, o, |x, y| x * y, BigComplex::mul)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero; use [`Scalar::checked_div`] for a fallible version.
    fn div(self, o: Scalar) -> Scalar {
        binop(
            self,
            o,
            |x, y| {
                let inv = Field::inv(&y).expect("exact division by zero");
                x * inv
            },
            BigComplex::div,
        )
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(z) => Scalar::Float(z.neg()),
        }
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                $tr::$m(self.clone(), o.clone())
            }
        }
    )*};
}
ref_ops!(Add add, Sub sub, Mul mul, Div div);

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a.value_eq(b),
            _ => false,
        }
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::int(0)
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(z) => z.is_zero(),
        }
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::int(1)
    }
}

impl Ring for Scalar {
    fn from_i64(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl Field for Scalar {
    fn inv(&self) -> Option<Self> {
        Scalar::one().checked_div(self).ok()
    }
}

impl fmt::Display for Scalar {
    /// Exact: `re_num/re_den+im_num/im_den*i`. Float: `re+im*i@precision`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => f.write_str(&format_gauss(q)),
            Scalar::Float(z) => write!(f, "{z}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = NumericError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains('@') {
            BigComplex::parse(s).map(Scalar::Float)
        } else {
            parse_gauss(s).map(Scalar::Exact)
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    /// Accepts the canonical string form and, for hand-written files, plain JSON numbers
    /// (read exactly from their decimal text).
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a scalar string or number")
            }
            fn visit_str<E: serde::de::Error>(self, s: &str) -> Result<Scalar, E> {
                s.parse().map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, n: i64) -> Result<Scalar, E> {
                Ok(Scalar::int(n))
            }
            fn visit_u64<E: serde::de::Error>(self, n: u64) -> Result<Scalar, E> {
                Ok(Scalar::from_rational(BigRational::from_integer(n.into())))
            }
            fn visit_f64<E: serde::de::Error>(self, x: f64) -> Result<Scalar, E> {
                let s = format!("{x}");
                super::exact::parse_decimal(&s)
                    .map(Scalar::from_rational)
                    .ok_or_else(|| E::custom(format!("unsupported number {s}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_arithmetic_is_closed() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::gauss(rat(1, 2), rat(-2, 5));
        let q = (&a * &b + a.clone()) / b.clone();
        let back = (q * b.clone() - a.clone()) / a.clone();
        assert_eq!(back, Scalar::gauss(rat(1, 2), rat(-2, 5)));
        assert!(Scalar::int(1).checked_div(&Scalar::zero()).is_err());
    }

    #[test]
    fn mixed_operands_promote_to_float() {
        let x = Scalar::ratio(1, 3) + Scalar::float(1.0, 0.0, 128);
        assert_eq!(x.precision(), Some(128));
        assert!(x.approx_eq(&Scalar::float(4.0 / 3.0, 0.0, 128), 1e-15));
    }

    #[test]
    fn sqrt_demotes_only_when_needed() {
        assert_eq!(Scalar::int(9).sqrt(128), Scalar::int(3));
        assert!(!Scalar::int(2).sqrt(128).is_exact());
        assert!((Scalar::int(2).sqrt(128).to_c64().re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn float_text_round_trip() {
        let x = Scalar::ratio(2, 7).to_float(192) * Scalar::i();
        let back: Scalar = x.to_string().parse().unwrap();
        assert_eq!(back, x);
        assert_eq!(back.precision(), Some(192));
    }

    proptest! {
        #[test]
        fn exact_text_round_trip(a in -10_000i64..10_000, b in 1i64..500, c in -10_000i64..10_000, d in 1i64..500) {
            let x = Scalar::gauss(rat(a, b), rat(c, d));
            let back: Scalar = x.to_string().parse().unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
