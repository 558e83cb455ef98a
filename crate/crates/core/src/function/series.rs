//! Truncated Taylor series arithmetic (coefficients `f^(n)(z0)/n!`), generic over the scalar type.

use num_complex::Complex;

use crate::numeric::{Field, Scalar};

/// Scalars that series propagation can run on.
pub trait JetScalar: Field {
    fn lift(c: &Scalar) -> Self;
    fn exp_value(&self, prec: usize) -> Self;
}

impl JetScalar for Scalar {
    fn lift(c: &Scalar) -> Self {
        c.clone()
    }
    fn exp_value(&self, prec: usize) -> Self {
        self.exp(prec)
    }
}

impl JetScalar for Complex<f64> {
    fn lift(c: &Scalar) -> Self {
        c.to_c64()
    }
    fn exp_value(&self, _prec: usize) -> Self {
        self.exp()
    }
}

pub fn constant<T: JetScalar>(c: T, len: usize) -> Vec<T> {
    let mut v = vec![T::zero(); len];
    v[0] = c;
    v
}

pub fn variable<T: JetScalar>(z0: T, len: usize) -> Vec<T> {
    let mut v = constant(z0, len);
    if len > 1 {
        v[1] = T::one();
    }
    v
}

pub fn add<T: JetScalar>(f: &[T], g: &[T]) -> Vec<T> {
    f.iter().zip(g).map(|(a, b)| a.clone() + b.clone()).collect()
}

pub fn sub<T: JetScalar>(f: &[T], g: &[T]) -> Vec<T> {
    f.iter().zip(g).map(|(a, b)| a.clone() - b.clone()).collect()
}

pub fn neg<T: JetScalar>(f: &[T]) -> Vec<T> {
    f.iter().map(|a| -a.clone()).collect()
}

pub fn scale<T: JetScalar>(f: &[T], c: &T) -> Vec<T> {
    f.iter().map(|a| a.clone() * c.clone()).collect()
}

/// Truncated Cauchy product.
pub fn mul<T: JetScalar>(f: &[T], g: &[T]) -> Vec<T> {
    let n = f.len();
    (0..n)
        .map(|k| {
            let mut acc = T::zero();
            for i in 0..=k {
                acc = acc + f[i].clone() * g[k - i].clone();
            }
            acc
        })
        .collect()
}

pub fn powu<T: JetScalar>(f: &[T], mut e: u64) -> Vec<T> {
    let mut result = constant(T::one(), f.len());
    let mut base = f.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    result
}

/// `g = exp(f)` via `n g_n = sum_{k=1}^{n} k f_k g_{n-k}`.
pub fn exp<T: JetScalar>(f: &[T], prec: usize) -> Vec<T> {
    let n = f.len();
    let mut g = Vec::with_capacity(n);
    g.push(f[0].exp_value(prec));
    for m in 1..n {
        let mut acc = T::zero();
        for k in 1..=m {
            acc = acc + T::from_i64(k as i64) * f[k].clone() * g[m - k].clone();
        }
        g.push(acc.checked_div(&T::from_i64(m as i64)).expect("nonzero index"));
    }
    g
}

/// Taylor coefficients to plain derivatives: multiply entry `n` by `n!`.
pub fn to_derivatives<T: JetScalar>(coeffs: Vec<T>) -> Vec<T> {
    let mut fact = T::one();
    coeffs
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            if n > 0 {
                fact = fact.clone() * T::from_i64(n as i64);
            }
            c * fact.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_variable_is_all_ones_after_factorials() {
        let e = to_derivatives(exp(&variable(Scalar::int(0), 6), 128));
        assert!(e.iter().all(|c| *c == Scalar::int(1)));
    }

    #[test]
    fn power_matches_binomial() {
        // (1 + z)^5 at z0 = 0 has coefficients C(5, n)
        let s = variable(Scalar::int(1), 6);
        let p = powu(&s, 5);
        let want = [1, 5, 10, 10, 5, 1].map(Scalar::int);
        assert_eq!(p, want.to_vec());
    }
}
