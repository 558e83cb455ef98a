//! The quadratic field `Q(w)` with `w^2 = w - 1`, i.e. `w` a primitive sixth root of unity.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::exact::pretty_gauss;
use super::ring::{Field, Ring};
use super::Poly;

/// `x + y*w` with rational `x`, `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QwNumber {
    pub x: BigRational,
    pub y: BigRational,
}

impl QwNumber {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        QwNumber { x, y }
    }

    /// The generator `w`.
    pub fn w() -> Self {
        QwNumber { x: BigRational::zero(), y: BigRational::one() }
    }

    pub fn from_rational(x: BigRational) -> Self {
        QwNumber { x, y: BigRational::zero() }
    }

    /// Reduces a rational polynomial in `w` modulo `w^2 - w + 1`.
    pub fn from_poly(p: &Poly<BigRational>) -> Self {
        // Horner in the field itself
        let mut acc = QwNumber::zero();
        for c in p.coeffs().iter().rev() {
            acc = acc * QwNumber::w() + QwNumber::from_rational(c.clone());
        }
        acc
    }

    /// Field norm `(x + y w)(x + y w̄) = x^2 + xy + y^2`.
    pub fn norm(&self) -> BigRational {
        &self.x * &self.x + &self.x * &self.y + &self.y * &self.y
    }

    /// Numeric value with `w = e^{i pi/3}` (the other embedding is the conjugate).
    pub fn to_c64(&self) -> Complex<f64> {
        use num_traits::ToPrimitive;
        let w = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        Complex::new(x, 0.0) + w * y
    }
}

impl Add for QwNumber {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QwNumber { x: self.x + o.x, y: self.y + o.y }
    }
}

impl Sub for QwNumber {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        QwNumber { x: self.x - o.x, y: self.y - o.y }
    }
}

impl Neg for QwNumber {
    type Output = Self;
    fn neg(self) -> Self {
        QwNumber { x: -self.x, y: -self.y }
    }
}

impl Mul for QwNumber {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // w^2 = w - 1
        let yy = &self.y * &o.y;
        QwNumber {
            x: &self.x * &o.x - &yy,
            y: &self.x * &o.y + &o.x * &self.y + yy,
        }
    }
}

impl Zero for QwNumber {
    fn zero() -> Self {
        QwNumber { x: BigRational::zero(), y: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl One for QwNumber {
    fn one() -> Self {
        QwNumber { x: BigRational::one(), y: BigRational::zero() }
    }
}

impl Ring for QwNumber {
    fn from_i64(n: i64) -> Self {
        QwNumber::from_rational(BigRational::from_i64(n))
    }
}

impl Field for QwNumber {
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        // conjugate of w is 1 - w
        Some(QwNumber { x: (&self.x + &self.y) / &n, y: -&self.y / &n })
    }
}

impl fmt::Display for QwNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zero = BigRational::zero();
        let x = pretty_gauss(&Complex::new(self.x.clone(), zero.clone()));
        let y = pretty_gauss(&Complex::new(self.y.clone(), zero));
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{x}"),
            (true, false) if self.y.is_one() => write!(f, "w"),
            (true, false) if (-&self.y).is_one() => write!(f, "-w"),
            (true, false) => write!(f, "{y}w"),
            (false, false) => {
                if self.y < BigRational::zero() {
                    write!(f, "{x}{y}w")
                } else {
                    write!(f, "{x}+{y}w")
                }
            }
        }
    }
}
