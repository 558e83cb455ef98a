//! Sampling `g = f''(f' - f)/((f - a)(f' - b))`, constant for solutions.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SharingProblem, VerifyError};
use crate::function::series::{self};
use crate::function::CandidateFunction;
use crate::numeric::{Scalar, DEFAULT_PRECISION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GEstimate {
    /// Mean of the sampled values.
    pub estimate: Scalar,
    /// `max |g_i - estimate|`.
    pub max_deviation: f64,
    pub samples: usize,
    /// Points rejected for a vanishing denominator.
    pub rejected: usize,
}

/// Denominator of the sampling grid for exact points.
const GRID_DEN: i64 = 64;

/// Samples `g` at `samples` deterministic points: the annulus `1/2 <= |t| <= 2` for
/// `P(e^{λz})`, the disk `|z| <= 2` otherwise. Exact candidates are sampled at
/// Gaussian-rational points so the estimate is exact.
pub fn check_g_constant(
    f: &CandidateFunction,
    prob: &SharingProblem,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<GEstimate, VerifyError> {
    if samples == 0 {
        return Err(VerifyError::InvalidProblem("samples must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 10 * samples + 100;
    let prec = precision_of(f, prob);
    let exact = is_exact(f, prob);
    let mut values: Vec<Scalar> = Vec::with_capacity(samples);
    let mut rejected = 0;
    while values.len() < samples {
        if rejected >= budget {
            return Err(VerifyError::AllSamplesDegenerate);
        }
        let point = match f {
            CandidateFunction::ExpPoly(_) => sample_point(&mut rng, 0.5, 2.0, exact, prec),
            _ => sample_point(&mut rng, 0.0, 2.0, exact, prec),
        };
        let (v, v1, v2) = values_at(f, &point, prec);
        let den = (v.clone() - prob.a.clone()) * (v1.clone() - prob.b.clone());
        let degenerate = if den.is_exact() {
            num_traits::Zero::is_zero(&den)
        } else {
            den.abs_f64() <= tol.sqrt() * (1.0 + v.abs_f64()) * (1.0 + v1.abs_f64())
        };
        if degenerate {
            rejected += 1;
            continue;
        }
        values.push(v2 * (v1 - v) / den);
    }
    let mut sum = values[0].clone();
    for v in &values[1..] {
        sum = sum + v.clone();
    }
    let estimate = sum / Scalar::int(values.len() as i64);
    let max_deviation = values.iter().map(|v| (v.clone() - estimate.clone()).abs_f64()).fold(0.0, f64::max);
    Ok(GEstimate { estimate, max_deviation, samples, rejected })
}

fn is_exact(f: &CandidateFunction, prob: &SharingProblem) -> bool {
    let params = prob.a.is_exact() && prob.b.is_exact();
    params
        && match f {
            CandidateFunction::Affine(a) => a.slope.is_exact() && a.intercept.is_exact(),
            CandidateFunction::ExpPoly(e) => e.is_exact(),
            CandidateFunction::Expr(_) => false,
        }
}

fn precision_of(f: &CandidateFunction, prob: &SharingProblem) -> usize {
    let from_f = match f {
        CandidateFunction::Affine(a) => a.slope.precision().or(a.intercept.precision()),
        CandidateFunction::ExpPoly(e) => e.lambda().precision().or_else(|| e.poly().coeffs().iter().find_map(Scalar::precision)),
        CandidateFunction::Expr(_) => None,
    };
    from_f.or(prob.a.precision()).or(prob.b.precision()).unwrap_or(DEFAULT_PRECISION)
}

/// Uniform point in the annulus `r0 <= |x| <= r1` (rejection sampling in the square).
fn sample_point(rng: &mut ChaCha8Rng, r0: f64, r1: f64, exact: bool, prec: usize) -> Scalar {
    let lim = (r1 * GRID_DEN as f64) as i64;
    loop {
        if exact {
            let x = rng.gen_range(-lim..=lim);
            let y = rng.gen_range(-lim..=lim);
            let r2 = ((x * x + y * y) as f64).sqrt() / GRID_DEN as f64;
            if r2 >= r0 && r2 <= r1 {
                return Scalar::gauss(BigRational::new(x.into(), GRID_DEN.into()), BigRational::new(y.into(), GRID_DEN.into()));
            }
        } else {
            let x: f64 = rng.gen_range(-r1..=r1);
            let y: f64 = rng.gen_range(-r1..=r1);
            let r = x.hypot(y);
            if r >= r0 && r <= r1 {
                return Scalar::float(x, y, prec);
            }
        }
    }
}

/// `(f, f', f'')` at a sample point (`t` for `P(e^{λz})`, `z` otherwise).
fn values_at(f: &CandidateFunction, x: &Scalar, prec: usize) -> (Scalar, Scalar, Scalar) {
    match f {
        CandidateFunction::Affine(a) => (a.slope.clone() * x.clone() + a.intercept.clone(), a.slope.clone(), Scalar::int(0)),
        CandidateFunction::ExpPoly(e) => (e.evaluate_t(x), e.derivative_poly(1).eval(x), e.derivative_poly(2).eval(x)),
        CandidateFunction::Expr(e) => {
            let d = series::to_derivatives(e.ast().series(x, 2, prec));
            (d[0].clone(), d[1].clone(), d[2].clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{parse_expr, ExpPolyFunction};
    use crate::numeric::{Poly, DEFAULT_TOL};

    #[test]
    fn family_iv_is_exactly_constant() {
        let f = CandidateFunction::ExpPoly(ExpPolyFunction::new(Scalar::ratio(1, 6), Poly::from_ints(&[8, -48, 48])).unwrap());
        let prob = SharingProblem::new(Scalar::int(8), Scalar::int(-1)).unwrap();
        let g = check_g_constant(&f, &prob, 100, DEFAULT_TOL, 7).unwrap();
        assert_eq!(g.estimate, Scalar::ratio(-2, 9));
        assert_eq!(g.max_deviation, 0.0);
    }

    #[test]
    fn f_equal_to_derivative_gives_zero() {
        let f = CandidateFunction::ExpPoly(ExpPolyFunction::new(Scalar::int(1), Poly::from_ints(&[0, 3])).unwrap());
        let prob = SharingProblem::new(Scalar::int(8), Scalar::int(-1)).unwrap();
        assert_eq!(check_g_constant(&f, &prob, 20, DEFAULT_TOL, 1).unwrap().estimate, Scalar::int(0));
    }

    #[test]
    fn closed_form_sampling_is_float() {
        let f = CandidateFunction::Expr(parse_expr("exp(z)").unwrap());
        let prob = SharingProblem::new(Scalar::int(1), Scalar::int(2)).unwrap();
        let g = check_g_constant(&f, &prob, 20, DEFAULT_TOL, 1).unwrap();
        assert!(g.estimate.abs_f64() < 1e-30 && g.max_deviation < 1e-30);
    }
}
