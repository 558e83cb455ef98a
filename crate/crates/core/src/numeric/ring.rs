use std::fmt::Debug;
use std::ops::{Neg, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Commutative ring with unit, as used by [`Poly`](super::Poly) and the jet machinery.
pub trait Ring: Clone + Debug + PartialEq + Zero + One + Sub<Output = Self> + Neg<Output = Self> {
    fn from_i64(n: i64) -> Self;
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring {
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.clone() * r)
    }
}

impl Ring for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}

impl Field for BigRational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Ring for Complex<BigRational> {
    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_i64(n), BigRational::zero())
    }
}

impl Field for Complex<BigRational> {
    fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Complex::new(&self.re / &n, -&self.im / &n))
    }
}

impl Ring for Complex<f64> {
    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }
}

impl Field for Complex<f64> {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Complex::new(1.0, 0.0) / self)
        }
    }
}
