//! Certified root finding for complex polynomials.
//!
//! Float polynomials go through simultaneous Aberth–Ehrlich iteration, then approximations
//! closer than a tolerance-derived radius are merged into one root of multiplicity `m` and
//! polished by Newton on the `(m-1)`-th derivative. Exact polynomials are split by Yun's
//! square-free decomposition first, so multiplicities are exact; linear and rational quadratic
//! factors keep exact roots.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::bigfloat::BigComplex;
use super::exact::{gauss_sqrt_exact, GaussRational};
use super::ring::Field;
use super::scalar::{Scalar, DEFAULT_PRECISION};
use super::{NumericError, Poly};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub location: Scalar,
    pub multiplicity: u32,
    /// `|p(r)| / sum |c_i| |r|^i`
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn distinct(&self) -> usize {
        self.roots.len()
    }

    /// Roots farther than `eps` from the origin.
    pub fn nonzero(&self, eps: f64) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(move |r| !is_origin(&r.location, eps))
    }
}

pub(crate) fn is_origin(z: &Scalar, eps: f64) -> bool {
    match z {
        Scalar::Exact(q) => q.is_zero(),
        Scalar::Float(_) => z.abs_f64() <= eps,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub tol: f64,
    pub precision: usize,
    pub max_iter: usize,
}

impl RootOptions {
    pub fn new(tol: f64) -> Self {
        RootOptions { tol, precision: DEFAULT_PRECISION, max_iter: 600 }
    }

    pub fn with_precision(mut self, precision: usize) -> Self {
        self.precision = precision;
        self
    }
}

/// All complex roots of `p` with multiplicities.
pub fn poly_roots(p: &Poly<Scalar>, tol: f64) -> Result<RootSet, NumericError> {
    let prec = p.coeffs().iter().filter_map(Scalar::precision).min().unwrap_or(DEFAULT_PRECISION);
    poly_roots_with(p, &RootOptions::new(tol).with_precision(prec))
}

pub fn poly_roots_with(p: &Poly<Scalar>, opts: &RootOptions) -> Result<RootSet, NumericError> {
    if !(opts.tol > 0.0) {
        return Err(NumericError::InvalidArgument("tolerance must be positive".into()));
    }
    match p.degree() {
        None | Some(0) => return Err(NumericError::InvalidDegree),
        _ => {}
    }
    match p.to_exact() {
        Some(e) => exact_roots(&e, p, opts),
        None => {
            p.regime().ok_or(NumericError::MixedRegime)?;
            let big = to_big(p, opts.precision);
            let roots = float_roots(&big, opts)?;
            Ok(RootSet {
                roots: roots
                    .into_iter()
                    .map(|(z, m)| Root { residual: residual(p, &Scalar::Float(z.clone())), location: Scalar::Float(z), multiplicity: m })
                    .collect(),
            })
        }
    }
}

fn to_big(p: &Poly<Scalar>, prec: usize) -> Vec<BigComplex> {
    p.coeffs().iter().map(|c| c.to_big(prec)).collect()
}

/// Relative residual `|p(z)| / sum |c_i||z|^i`.
pub fn residual(p: &Poly<Scalar>, z: &Scalar) -> f64 {
    let v = p.eval(z).abs_f64();
    if v == 0.0 {
        return 0.0;
    }
    let scale = p.abs_eval(z.abs_f64());
    if scale == 0.0 {
        v
    } else {
        v / scale
    }
}

fn exact_roots(e: &Poly<GaussRational>, p: &Poly<Scalar>, opts: &RootOptions) -> Result<RootSet, NumericError> {
    let mut roots = Vec::new();
    for (i, factor) in e.square_free_decomposition().into_iter().enumerate() {
        let mult = (i + 1) as u32;
        for z in exact_factor_roots(&factor, opts)? {
            let res = residual(p, &z);
            if !z.is_exact() && res > opts.tol {
                return Err(NumericError::NoConvergence { iterations: opts.max_iter });
            }
            roots.push(Root { location: z, multiplicity: mult, residual: res });
        }
    }
    Ok(RootSet { roots })
}

/// Roots of a monic square-free exact factor: exact when linear or a quadratic with a
/// square discriminant, otherwise certified floats.
fn exact_factor_roots(f: &Poly<GaussRational>, opts: &RootOptions) -> Result<Vec<Scalar>, NumericError> {
    match f.degree() {
        None | Some(0) => Ok(vec![]),
        Some(1) => {
            let r = -(f.coeff(0) * Field::inv(&f.coeff(1)).expect("monic"));
            Ok(vec![Scalar::Exact(r)])
        }
        Some(2) => {
            let (c, b, a) = (f.coeff(0), f.coeff(1), f.coeff(2));
            let four = super::exact::gauss_int(4, 0);
            let disc = b.clone() * b.clone() - four * a.clone() * c;
            if let Some(s) = gauss_sqrt_exact(&disc) {
                let two_a = a.clone() + a;
                let inv = Field::inv(&two_a).expect("nonzero leading coefficient");
                let r1 = (-b.clone() + s.clone()) * inv.clone();
                let r2 = (-b - s) * inv;
                return Ok(vec![Scalar::Exact(r1), Scalar::Exact(r2)]);
            }
            float_factor(f, opts)
        }
        _ => float_factor(f, opts),
    }
}

fn float_factor(f: &Poly<GaussRational>, opts: &RootOptions) -> Result<Vec<Scalar>, NumericError> {
    let big: Vec<BigComplex> = f.coeffs().iter().map(|c| BigComplex::from_gauss(c, opts.precision)).collect();
    let roots = float_roots(&big, opts)?;
    // the factor is square-free, so every cluster must be a single simple root
    Ok(roots
        .into_iter()
        .flat_map(|(z, m)| std::iter::repeat_n(Scalar::Float(z), m as usize))
        .collect())
}

fn horner(c: &[BigComplex], z: &BigComplex) -> BigComplex {
    let mut acc = BigComplex::zero(z.precision());
    for a in c.iter().rev() {
        acc = acc.mul(z).add(a);
    }
    acc
}

fn derivative(c: &[BigComplex]) -> Vec<BigComplex> {
    c.iter().enumerate().skip(1).map(|(i, a)| a.scale_f64(i as f64)).collect()
}

/// Distinct root approximations with multiplicities for a float coefficient vector
/// (lowest power first, nonzero leading coefficient).
fn float_roots(c: &[BigComplex], opts: &RootOptions) -> Result<Vec<(BigComplex, u32)>, NumericError> {
    let prec = opts.precision;
    let mut c: Vec<BigComplex> = c.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(vec![]);
    }
    // exact zero roots are split off first
    let zeros = c.iter().position(|x| !x.is_zero()).unwrap_or(0);
    let c: Vec<BigComplex> = c[zeros..].to_vec();
    let lead = c.last().cloned().expect("nonempty");
    let monic: Vec<BigComplex> = c.iter().map(|x| x.div(&lead)).collect();
    let deg = monic.len() - 1;

    let mut approx = aberth(&monic, opts);
    let mut out: Vec<(BigComplex, u32)> = Vec::new();
    if zeros > 0 {
        out.push((BigComplex::zero(prec), zeros as u32));
    }
    if deg == 0 {
        return Ok(out);
    }

    // cluster approximations of multiple roots
    let radius = opts.tol.powf(0.25);
    let mut used = vec![false; approx.len()];
    let derivs = {
        let mut v = vec![monic.clone()];
        for _ in 0..deg {
            let next = derivative(v.last().expect("nonempty"));
            v.push(next);
        }
        v
    };
    for i in 0..approx.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![i];
        let mut k = 0;
        while k < members.len() {
            let zi = approx[members[k]].clone();
            let scale = zi.abs_f64().max(1.0);
            for j in 0..approx.len() {
                if !used[j] && approx[j].sub(&zi).abs_f64() <= radius * scale {
                    used[j] = true;
                    members.push(j);
                }
            }
            k += 1;
        }
        let m = members.len();
        let mut mean = BigComplex::zero(prec);
        for &j in &members {
            mean = mean.add(&approx[j]);
        }
        mean = mean.scale_f64(1.0 / m as f64);
        let polished = newton_polish(&derivs[m - 1], &derivs.get(m).cloned().unwrap_or_default(), mean, opts);
        for &j in &members {
            approx[j] = polished.clone();
        }
        out.push((polished, m as u32));
    }

    // certify against the monic polynomial
    let monic_poly: Poly<Scalar> = Poly::new(monic.iter().cloned().map(Scalar::Float).collect());
    for (z, m) in out.iter().skip(usize::from(zeros > 0)) {
        let r = residual(&monic_poly, &Scalar::Float(z.clone()));
        if r > opts.tol || !z.is_finite() {
            return Err(NumericError::NoConvergence { iterations: opts.max_iter });
        }
        debug_assert!(*m >= 1);
    }
    Ok(out)
}

fn newton_polish(f: &[BigComplex], df: &[BigComplex], mut z: BigComplex, opts: &RootOptions) -> BigComplex {
    if df.is_empty() {
        return z;
    }
    let eps = 2f64.powi(-(opts.precision as i32) + 4);
    for _ in 0..60 {
        let fz = horner(f, &z);
        if fz.is_zero() {
            break;
        }
        let dz = horner(df, &z);
        if dz.is_zero() {
            break;
        }
        let step = fz.div(&dz);
        z = z.sub(&step);
        if step.abs_f64() <= eps * z.abs_f64().max(eps) {
            break;
        }
    }
    z
}

/// Simultaneous Aberth–Ehrlich iteration on a monic polynomial with nonzero constant term.
fn aberth(monic: &[BigComplex], opts: &RootOptions) -> Vec<BigComplex> {
    let prec = opts.precision;
    let n = monic.len() - 1;
    let dmonic = derivative(monic);
    // Fujiwara-type bound for the initial circle
    let bound = (0..n)
        .map(|i| monic[i].abs_f64().powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3)
        * 2.0;
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            BigComplex::from_f64(bound * theta.cos(), bound * theta.sin(), prec)
        })
        .collect();
    let stop = 2f64.powi(-(prec as i32) / 4);
    for _ in 0..opts.max_iter {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let pz = horner(monic, &z[k]);
            if pz.is_zero() {
                continue;
            }
            let dz = horner(&dmonic, &z[k]);
            let ratio = if dz.is_zero() { BigComplex::from_f64(1e-3, 0.0, prec) } else { pz.div(&dz) };
            let mut sum = BigComplex::zero(prec);
            for j in 0..n {
                if j != k {
                    let diff = z[k].sub(&z[j]);
                    if !diff.is_zero() {
                        sum = sum.add(&BigComplex::from_f64(1.0, 0.0, prec).div(&diff));
                    }
                }
            }
            let denom = BigComplex::from_f64(1.0, 0.0, prec).sub(&ratio.mul(&sum));
            let w = if denom.is_zero() { ratio } else { ratio.div(&denom) };
            let step = w.abs_f64();
            if !step.is_finite() {
                continue;
            }
            max_step = max_step.max(step / z[k].abs_f64().max(1e-300));
            z[k] = z[k].sub(&w);
        }
        if max_step <= stop {
            break;
        }
    }
    z
}
