//! Complex numbers over `astro-float` with an explicit working precision.

use std::cell::RefCell;
use std::fmt;

use astro_float::{BigFloat, Consts, Exponent, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::exact::GaussRational;
use super::NumericError;

pub const RM: RoundingMode = RoundingMode::ToEven;

const WORD_BITS: usize = Word::BITS as usize;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

pub(crate) fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Correctly rounded (ties to even) conversion to a float with `prec` significant bits,
/// `prec` rounded up to whole words as astro-float stores it.
pub fn bf_from_rational(q: &BigRational, prec: usize) -> BigFloat {
    if q.is_zero() {
        return BigFloat::from_word(0, prec);
    }
    let words = prec.div_ceil(WORD_BITS).max(1);
    let p = (words * WORD_BITS) as i64;
    let (num, den) = (q.numer().abs(), q.denom().clone());
    // scale by 2^s so that 2^(p-1) <= num * 2^s / den < 2^p
    let mut s = p - (num.bits() as i64 - den.bits() as i64);
    let quot_rem = |s: i64| {
        if s >= 0 {
            (&num << (s as usize)).div_rem(&den)
        } else {
            num.div_rem(&(&den << ((-s) as usize)))
        }
    };
    let (mut m, mut r) = quot_rem(s);
    if m.bits() as i64 > p {
        s -= 1;
        (m, r) = quot_rem(s);
    } else if (m.bits() as i64) < p {
        s += 1;
        (m, r) = quot_rem(s);
    }
    let divisor = if s >= 0 { den.clone() } else { &den << ((-s) as usize) };
    let twice = &r << 1usize;
    if twice > divisor || (twice == divisor && m.bit(0)) {
        m += 1u32;
        if m.bits() as i64 > p {
            m >>= 1usize;
            s -= 1;
        }
    }
    let mut digits = m.to_u64_digits().1;
    digits.resize(words, 0);
    let sign = if q.is_negative() { Sign::Neg } else { Sign::Pos };
    let e = p - s;
    let inexact = !r.is_zero();
    BigFloat::from_raw_parts(&digits, words * WORD_BITS, sign, e as Exponent, inexact)
}

/// Exact rational value of a finite float.
pub fn bf_to_rational(x: &BigFloat) -> Option<BigRational> {
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let (m, _, sign, e, _) = x.as_raw_parts()?;
    let mant = BigInt::from_biguint(num_bigint::Sign::Plus, BigUint::from_slice(&words_to_u32(m)));
    let shift = e as i64 - (m.len() * WORD_BITS) as i64;
    let mut v = BigRational::from_integer(mant);
    let two = BigRational::from_integer(BigInt::from(2));
    v *= num_traits::pow(two, shift.unsigned_abs() as usize).pow(if shift < 0 { -1 } else { 1 });
    Some(if sign == Sign::Neg { -v } else { v })
}

fn words_to_u32(m: &[Word]) -> Vec<u32> {
    m.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect()
}

/// Decimal scientific notation with enough digits to identify the float uniquely.
fn bf_to_decimal(x: &BigFloat) -> String {
    let q = match bf_to_rational(x) {
        Some(q) => q,
        None => return "nan".into(),
    };
    if q.is_zero() {
        return "0e0".into();
    }
    let bits = x.mantissa_max_bit_len().unwrap_or(WORD_BITS);
    let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as i64 + 2;
    let neg = q.is_negative();
    let q = q.abs();
    // decimal exponent estimate, then fix up so that the integer part has `digits` digits
    let mut exp10 = ((q.numer().bits() as f64 - q.denom().bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scaled = |e: i64| -> BigInt {
        let k = digits - 1 - e;
        let f = num_traits::pow(ten.clone(), k.unsigned_abs() as usize);
        let v = if k >= 0 { &q * f } else { &q / f };
        v.round().to_integer()
    };
    let lo = num_traits::pow(BigInt::from(10), (digits - 1) as usize);
    let hi = &lo * 10;
    let mut m = scaled(exp10);
    while m >= hi {
        exp10 += 1;
        m = scaled(exp10);
    }
    while m < lo {
        exp10 -= 1;
        m = scaled(exp10);
    }
    let ds = m.to_string();
    let frac = ds[1..].trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{}e{exp10}", &ds[..1])
    } else {
        format!("{sign}{}.{frac}e{exp10}", &ds[..1])
    }
}

/// Parses `[-]d[.ddd][e[-]n]` exactly and rounds once to `prec` bits.
fn bf_parse_decimal(s: &str, prec: usize) -> Option<BigFloat> {
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.strip_prefix('+').unwrap_or(e).parse::<i64>().ok()?),
        None => (s, 0),
    };
    let q = super::exact::parse_decimal(mant)?;
    let f = num_traits::pow(BigRational::from_integer(BigInt::from(10)), exp.unsigned_abs() as usize);
    let q = if exp >= 0 { q * f } else { q / f };
    Some(bf_from_rational(&q, prec))
}

pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    match x.to_string().parse::<f64>() {
        Ok(v) => v,
        Err(_) => f64::NAN,
    }
}

fn bf_is_neg(x: &BigFloat) -> bool {
    x.is_negative() && !x.is_zero()
}

/// Complex number with arbitrary-precision binary floating parts.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
    prec: usize,
}

impl BigComplex {
    pub fn from_parts(re: BigFloat, im: BigFloat, prec: usize) -> Self {
        let mut z = BigComplex { re, im, prec };
        let _ = z.re.set_precision(prec, RM);
        let _ = z.im.set_precision(prec, RM);
        z
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        BigComplex { re: BigFloat::from_f64(re, prec), im: BigFloat::from_f64(im, prec), prec }
    }

    pub fn from_c64(z: Complex<f64>, prec: usize) -> Self {
        Self::from_f64(z.re, z.im, prec)
    }

    pub fn from_gauss(q: &GaussRational, prec: usize) -> Self {
        BigComplex { re: bf_from_rational(&q.re, prec), im: bf_from_rational(&q.im, prec), prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_f64(0.0, 0.0, prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        Self::from_parts(self.re.clone(), self.im.clone(), prec)
    }

    /// Exact value of a finite number.
    pub fn to_gauss(&self) -> Option<GaussRational> {
        Some(Complex::new(bf_to_rational(&self.re)?, bf_to_rational(&self.im)?))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec.min(o.prec);
        BigComplex { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM), prec: p }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec.min(o.prec);
        BigComplex { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM), prec: p }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec.min(o.prec);
        let w = p + 64;
        let re = self.re.mul(&o.re, w, RM).sub(&self.im.mul(&o.im, w, RM), p, RM);
        let im = self.re.mul(&o.im, w, RM).add(&self.im.mul(&o.re, w, RM), p, RM);
        BigComplex { re, im, prec: p }
    }

    pub fn div(&self, o: &Self) -> Self {
        let p = self.prec.min(o.prec);
        let w = p + 64;
        let den = o.re.mul(&o.re, w, RM).add(&o.im.mul(&o.im, w, RM), w, RM);
        let re = self.re.mul(&o.re, w, RM).add(&self.im.mul(&o.im, w, RM), w, RM);
        let im = self.im.mul(&o.re, w, RM).sub(&self.re.mul(&o.im, w, RM), w, RM);
        BigComplex { re: re.div(&den, p, RM), im: im.div(&den, p, RM), prec: p }
    }

    pub fn neg(&self) -> Self {
        BigComplex { re: self.re.neg(), im: self.im.neg(), prec: self.prec }
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: self.im.neg(), prec: self.prec }
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        self.mul(&Self::from_f64(s, 0.0, self.prec))
    }

    pub fn norm_sqr(&self) -> BigFloat {
        let p = self.prec;
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt(self.prec, RM)
    }

    pub fn abs_f64(&self) -> f64 {
        let (re, im) = (bf_to_f64(&self.re), bf_to_f64(&self.im));
        if re.is_finite() && im.is_finite() && (re != 0.0 || im != 0.0 || self.is_zero()) {
            re.hypot(im)
        } else {
            bf_to_f64(&self.abs())
        }
    }

    pub fn to_c64(&self) -> Complex<f64> {
        Complex::new(bf_to_f64(&self.re), bf_to_f64(&self.im))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec;
        if self.is_zero() {
            return self.clone();
        }
        let two = BigFloat::from_i64(2, p);
        let m = self.abs();
        let re = m.add(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
        let mut im = m.sub(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
        if bf_is_neg(&self.im) {
            im = im.neg();
        }
        BigComplex { re, im, prec: p }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        with_consts(|cc| {
            let r = self.re.exp(p, RM, cc);
            if self.im.is_zero() {
                return BigComplex { re: r, im: BigFloat::from_i64(0, p), prec: p };
            }
            let c = self.im.cos(p, RM, cc);
            let s = self.im.sin(p, RM, cc);
            BigComplex { re: r.mul(&c, p, RM), im: r.mul(&s, p, RM), prec: p }
        })
    }

    /// Principal logarithm; `ln 0` is reported as an error.
    pub fn ln(&self) -> Result<Self, NumericError> {
        if self.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        let p = self.prec;
        let arg = self.arg();
        let modulus = with_consts(|cc| self.norm_sqr().ln(p, RM, cc)).div(&BigFloat::from_i64(2, p), p, RM);
        Ok(BigComplex { re: modulus, im: arg, prec: p })
    }

    /// Argument in `(-pi, pi]`.
    pub fn arg(&self) -> BigFloat {
        let p = self.prec;
        with_consts(|cc| {
            let pi = cc.pi(p, RM);
            if self.re.is_zero() {
                let half = pi.div(&BigFloat::from_i64(2, p), p, RM);
                return if bf_is_neg(&self.im) { half.neg() } else if self.im.is_zero() { BigFloat::from_i64(0, p) } else { half };
            }
            let base = self.im.div(&self.re, p, RM).atan(p, RM, cc);
            if bf_is_neg(&self.re) {
                if bf_is_neg(&self.im) {
                    base.sub(&pi, p, RM)
                } else {
                    base.add(&pi, p, RM)
                }
            } else {
                base
            }
        })
    }

    pub fn pi(prec: usize) -> BigFloat {
        with_consts(|cc| cc.pi(prec, RM))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = BigComplex::from_f64(1.0, 0.0, self.prec);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Exact bitwise value equality (precision annotations may differ).
    pub fn value_eq(&self, o: &Self) -> bool {
        self.re.cmp(&o.re) == Some(0) && self.im.cmp(&o.im) == Some(0)
    }

    /// Parses the `re+im*i@prec` text produced by `Display`; the round trip is lossless.
    pub fn parse(s: &str) -> Result<Self, NumericError> {
        let bad = || NumericError::Parse(format!("invalid float scalar '{s}'"));
        let (body, prec) = s.trim().rsplit_once('@').ok_or_else(bad)?;
        let prec: usize = prec.parse().map_err(|_| bad())?;
        if prec == 0 {
            return Err(bad());
        }
        let body = body.strip_suffix("*i").ok_or_else(bad)?;
        // separator '+' is the first one not at the start and not inside an exponent
        let bytes = body.as_bytes();
        let idx = (1..bytes.len())
            .find(|&i| bytes[i] == b'+' && !matches!(bytes[i - 1], b'e' | b'E'))
            .ok_or_else(bad)?;
        let re = bf_parse_decimal(&body[..idx], prec).ok_or_else(bad)?;
        let im = bf_parse_decimal(&body[idx + 1..], prec).ok_or_else(bad)?;
        Ok(BigComplex { re, im, prec })
    }
}

impl PartialEq for BigComplex {
    fn eq(&self, other: &Self) -> bool {
        self.value_eq(other)
    }
}

impl fmt::Display for BigComplex {
    /// `re+im*i@prec`, parts in decimal scientific notation with round-trip digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*i@{}", bf_to_decimal(&self.re), bf_to_decimal(&self.im), self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::exact::{gauss, rat};

    fn close(a: &BigComplex, re: f64, im: f64) -> bool {
        let z = a.to_c64();
        (z.re - re).abs() < 1e-15 && (z.im - im).abs() < 1e-15
    }

    #[test]
    fn elementary_functions() {
        let p = 128;
        let i_pi = BigComplex::from_parts(BigFloat::from_i64(0, p), BigComplex::pi(p), p);
        // e^{i pi} = -1
        assert!(close(&i_pi.exp(), -1.0, 0.0));
        let z = BigComplex::from_f64(-3.0, -4.0, p);
        assert!(close(&z.sqrt(), 1.0, -2.0));
        let l = BigComplex::from_f64(-1.0, 0.0, p).ln().unwrap();
        assert!(close(&l, 0.0, std::f64::consts::PI));
        let back = z.ln().unwrap().exp();
        assert!(back.sub(&z).abs_f64() < 1e-35);
        assert!(BigComplex::zero(p).ln().is_err());
    }

    #[test]
    fn precision_is_min_of_operands() {
        let a = BigComplex::from_f64(1.0, 0.0, 192);
        let b = BigComplex::from_f64(2.0, 0.0, 128);
        assert_eq!(a.add(&b).precision(), 128);
        assert_eq!(a.mul(&b).precision(), 128);
    }

    #[test]
    fn text_round_trip_is_lossless() {
        let q = gauss(rat(1, 3), rat(-22, 7));
        let z = BigComplex::from_gauss(&q, 128);
        let s = z.to_string();
        let back = BigComplex::parse(&s).unwrap();
        assert_eq!(back, z);
        assert_eq!(back.precision(), 128);
    }

    #[test]
    fn rational_conversion_matches_division() {
        for prec in [64, 128, 192, 320] {
            let q = rat(-22, 7);
            let direct = BigFloat::from_i64(-22, prec).div(&BigFloat::from_i64(7, prec), prec, RM);
            assert_eq!(bf_from_rational(&q, prec).cmp(&direct), Some(0));
            assert_eq!(bf_to_rational(&BigFloat::from_f64(0.375, prec)), Some(rat(3, 8)));
        }
        assert_eq!(bf_to_decimal(&BigFloat::from_f64(-0.375, 64)), "-3.75e-1");
    }

    proptest::proptest! {
        #[test]
        fn decimal_text_is_lossless(n in -1_000_000i64..1_000_000, d in 1i64..100_000, m in -50i64..50, w in 1usize..6) {
            let prec = 64 * w;
            let x = bf_from_rational(&rat(n, d), prec);
            let x = x.mul(&BigFloat::from_f64(10f64.powi(m as i32), prec), prec, RM);
            let z = BigComplex::from_parts(x.clone(), x.neg(), prec);
            let back = BigComplex::parse(&z.to_string()).unwrap();
            proptest::prop_assert_eq!(back, z);
        }
    }
}
