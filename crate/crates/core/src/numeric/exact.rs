//! Gaussian rationals `Q(i)` and the exact helpers built on them.

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::NumericError;

/// Exact complex number `re + im*i` with rational parts.
pub type GaussRational = Complex<BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn gauss(re: BigRational, im: BigRational) -> GaussRational {
    Complex::new(re, im)
}

pub fn gauss_int(re: i64, im: i64) -> GaussRational {
    Complex::new(rat(re, 1), rat(im, 1))
}

/// Exact integer square root, `None` when `n` is negative or not a perfect square.
pub fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn rational_sqrt_exact(q: &BigRational) -> Option<BigRational> {
    let n = int_sqrt_exact(q.numer())?;
    let d = int_sqrt_exact(q.denom())?;
    Some(BigRational::new(n, d))
}

/// Principal square root in `Q(i)` when it exists.
///
/// For `q = x + iy` the principal root is `sqrt((|q|+x)/2) + i sgn(y) sqrt((|q|-x)/2)`,
/// so it lies in `Q(i)` iff `|q|` and both half-sums are rational squares.
pub fn gauss_sqrt_exact(q: &GaussRational) -> Option<GaussRational> {
    if q.im.is_zero() {
        if q.re.is_negative() {
            let r = rational_sqrt_exact(&-&q.re)?;
            return Some(Complex::new(BigRational::zero(), r));
        }
        return rational_sqrt_exact(&q.re).map(|r| Complex::new(r, BigRational::zero()));
    }
    let modulus = rational_sqrt_exact(&q.norm_sqr())?;
    let two = rat(2, 1);
    let re = rational_sqrt_exact(&((&modulus + &q.re) / &two))?;
    let mut im = rational_sqrt_exact(&((&modulus - &q.re) / &two))?;
    if q.im.is_negative() {
        im = -im;
    }
    Some(Complex::new(re, im))
}

fn fmt_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Canonical text form `re_num/re_den+im_num/im_den*i`.
pub fn format_gauss(q: &GaussRational) -> String {
    format!("{}+{}*i", fmt_rational(&q.re), fmt_rational(&q.im))
}

/// Parses a rational written as `n`, `n/d` or a plain decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<BigRational, NumericError> {
    let s = s.trim();
    let bad = || NumericError::Parse(format!("invalid rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    parse_decimal(s).ok_or_else(bad)
}

/// Exact value of a decimal literal (`12`, `-0.125`, `3.`), no exponent notation.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
        || int_part.len() + frac_part.len() == 0
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let q = BigRational::new(numer, denom);
    Some(if neg { -q } else { q })
}

/// Inverse of [`format_gauss`]; also accepts a bare rational for a real value.
pub fn parse_gauss(s: &str) -> Result<GaussRational, NumericError> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix("*i") {
        // split on the '+' separating the two parts; the imaginary part may carry its own sign
        let idx = body
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+')
            .map(|(i, _)| i)
            .ok_or_else(|| NumericError::Parse(format!("invalid exact scalar '{s}'")))?;
        let re = parse_rational(&body[..idx])?;
        let im = parse_rational(&body[idx + 1..])?;
        return Ok(Complex::new(re, im));
    }
    Ok(Complex::new(parse_rational(s)?, BigRational::zero()))
}

/// `true` iff `q` is a rational integer.
pub fn is_integer(q: &GaussRational) -> bool {
    q.im.is_zero() && q.re.denom().is_one()
}

/// Human-oriented rendering: `-2/9`, `3i`, `-i`, `1/2-1/3i`.
pub fn pretty_gauss(q: &GaussRational) -> String {
    let part = |r: &BigRational| {
        if r.denom().is_one() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    };
    // unit coefficients of i are left implicit
    let imag = |r: &BigRational| if r.abs().is_one() { String::new() } else { part(&r.abs()) };
    let sign = if q.im.is_negative() { "-" } else { "+" };
    match (q.re.is_zero(), q.im.is_zero()) {
        (_, true) => part(&q.re),
        (true, false) => format!("{}{}i", if q.im.is_negative() { "-" } else { "" }, imag(&q.im)),
        (false, false) => format!("{}{}{}i", part(&q.re), sign, imag(&q.im)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_roots() {
        assert_eq!(gauss_sqrt_exact(&gauss_int(9, 0)), Some(gauss_int(3, 0)));
        assert_eq!(gauss_sqrt_exact(&gauss_int(-4, 0)), Some(gauss_int(0, 2)));
        // (1+i)^2 = 2i
        assert_eq!(gauss_sqrt_exact(&gauss_int(0, 2)), Some(gauss_int(1, 1)));
        // (1-2i)^2 = -3-4i
        assert_eq!(gauss_sqrt_exact(&gauss_int(-3, -4)), Some(gauss_int(1, -2)));
        assert_eq!(gauss_sqrt_exact(&gauss_int(2, 0)), None);
        assert_eq!(gauss_sqrt_exact(&gauss(rat(2, 45), rat(0, 1))), None);
        assert_eq!(gauss_sqrt_exact(&gauss(rat(1, 4), rat(0, 1))), Some(gauss(rat(1, 2), rat(0, 1))));
    }

    #[test]
    fn text_round_trip() {
        let q = gauss(rat(-3, 4), rat(5, -7));
        let s = format_gauss(&q);
        assert_eq!(s, "-3/4+-5/7*i");
        assert_eq!(parse_gauss(&s).unwrap(), q);
        assert_eq!(parse_gauss("1/6").unwrap(), gauss(rat(1, 6), rat(0, 1)));
        assert_eq!(parse_decimal("-0.125"), Some(rat(-1, 8)));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn pretty_forms() {
        assert_eq!(pretty_gauss(&gauss(rat(-2, 9), rat(0, 1))), "-2/9");
        assert_eq!(pretty_gauss(&gauss_int(0, -4)), "-4i");
        assert_eq!(pretty_gauss(&gauss(rat(1, 2), rat(-1, 3))), "1/2-1/3i");
    }
}
