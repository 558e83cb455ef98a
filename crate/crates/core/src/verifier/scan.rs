//! Grid-based checks in the `z`-plane: spherical derivative scan and Newton search for
//! `a`-points and `b`-points of closed-form candidates.

use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Coordinate, Implication, SharingProblem, VerificationReport, VerifyError, Witness};
use crate::function::{CandidateFunction, ExprFunction};
use crate::numeric::{Regime, Scalar};

type C64 = Complex<f64>;

/// Axis-parallel rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Region {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self, VerifyError> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(VerifyError::InvalidRegion(format!("empty rectangle [{x0},{x1}]x[{y0},{y1}]")));
        }
        Ok(Region { x0, x1, y0, y1 })
    }

    pub fn square(r: f64) -> Self {
        Region { x0: -r, x1: r, y0: -r, y1: r }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    fn grown(&self, frac: f64) -> Region {
        let (dx, dy) = ((self.x1 - self.x0) * frac, (self.y1 - self.y0) * frac);
        Region { x0: self.x0 - dx, x1: self.x1 + dx, y0: self.y0 - dy, y1: self.y1 + dy }
    }

    /// Grid nodes, `n` per side, corners included.
    pub fn nodes(&self, n: usize) -> Vec<C64> {
        let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        (0..n).flat_map(|i| (0..n).map(move |k| C64::new(step(self.x0, self.x1, k), step(self.y0, self.y1, i)))).collect()
    }
}

impl FromStr for Region {
    type Err = VerifyError;
    /// `x0,x1,y0,y1`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        match parts {
            Ok(v) if v.len() == 4 => Region::new(v[0], v[1], v[2], v[3]),
            _ => Err(VerifyError::InvalidRegion(format!("expected x0,x1,y0,y1, got '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// `max |f'|/(1 + |f|^2)` over the finite grid values.
    pub max: f64,
    pub argmax: (f64, f64),
    pub nodes: usize,
    /// Nodes where `f` or `f'` overflowed double precision.
    pub skipped: usize,
}

/// `(f, f')` in double precision.
fn value_and_derivative(f: &CandidateFunction, z: C64) -> (C64, C64) {
    match f {
        CandidateFunction::Affine(a) => {
            let s = a.slope.to_c64();
            (s * z + a.intercept.to_c64(), s)
        }
        CandidateFunction::ExpPoly(e) => {
            let lambda = e.lambda().to_c64();
            let t = (lambda * z).exp();
            let (mut p, mut dp) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for c in e.poly().coeffs().iter().rev() {
                dp = dp * t + p;
                p = p * t + c.to_c64();
            }
            (p, lambda * t * dp)
        }
        CandidateFunction::Expr(x) => {
            let d = x.derivatives(&z, 1, 53);
            (d[0], d[1])
        }
    }
}

/// Maximum of the spherical derivative over a `grid × grid` lattice of `region`.
pub fn spherical_scan(f: &CandidateFunction, region: &Region, grid: usize) -> Result<ScanResult, VerifyError> {
    if grid < 2 {
        return Err(VerifyError::InvalidRegion("grid needs at least 2 nodes per side".into()));
    }
    let nodes = region.nodes(grid);
    let vals: Vec<Option<(f64, C64)>> = nodes
        .par_iter()
        .map(|&z| {
            let (v, dv) = value_and_derivative(f, z);
            let s = dv.norm() / (1.0 + v.norm_sqr());
            s.is_finite().then_some((s, z))
        })
        .collect();
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    let (max, arg) = vals.into_iter().flatten().fold((0.0f64, C64::new(0.0, 0.0)), |acc, (s, z)| if s > acc.0 { (s, z) } else { acc });
    Ok(ScanResult { max, argmax: (arg.re, arg.im), nodes: grid * grid, skipped })
}

const NEWTON_F64_ITERS: usize = 200;
const NEWTON_BIG_ITERS: usize = 400;

/// Newton on `h(z) = f^(m)(z) - target` from a double-precision seed; `None` if the iterate
/// leaves `bounds` or the budget runs out. Convergence is judged by the step size only.
fn newton_f64(f: &ExprFunction, m: usize, target: C64, seed: C64, bounds: &Region) -> Option<C64> {
    let mut z = seed;
    for _ in 0..NEWTON_F64_ITERS {
        let d = f.derivatives(&z, m + 1, 53);
        let h = d[m] - target;
        if h == C64::new(0.0, 0.0) {
            let scale = target.norm().max(d[m].norm()).max(1.0);
            return (f64::EPSILON * scale <= 1e-6 * d[m + 1].norm() * z.norm().max(1.0)).then_some(z);
        }
        let step = h / d[m + 1];
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if !bounds.contains(z) {
            return None;
        }
        if step.norm() <= 1e-13 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// Polishes a root at full precision; `None` when the step criterion is not met.
fn polish(f: &ExprFunction, m: usize, target: &Scalar, z0: C64, prec: usize, tol: f64) -> Option<Scalar> {
    let mut z = Scalar::float(z0.re, z0.im, prec);
    let ulp = 2f64.powi(-(prec as i32));
    let scale = target.abs_f64().max(1.0);
    for _ in 0..NEWTON_BIG_ITERS {
        let d = f.derivatives(&z, m + 1, prec);
        let h = d[m].clone() - target.clone();
        // a residual at rounding level can come from cancellation (a tiny exponential added to
        // a constant), so the root is kept only if rounding cannot move it by more than sqrt(tol)
        let conditioned = |z: &Scalar| ulp * scale <= tol.sqrt() * d[m + 1].abs_f64() * z.abs_f64().max(1.0);
        if num_traits::Zero::is_zero(&h) {
            return conditioned(&z).then_some(z);
        }
        let step = h.checked_div(&d[m + 1]).ok()?;
        z = z - step.clone();
        if step.abs_f64() <= tol * z.abs_f64().max(1.0) {
            return conditioned(&z).then_some(z);
        }
    }
    None
}

struct FoundRoots {
    roots: Vec<Scalar>,
    failures: usize,
}

/// Roots of `f^(m) = target` inside `region`, deduplicated within `sqrt(tol)`.
fn find_roots(f: &ExprFunction, m: usize, target: &Scalar, region: &Region, grid: usize, tol: f64, prec: usize) -> FoundRoots {
    let bounds = region.grown(0.1);
    let target64 = target.to_c64();
    let seeds = region.nodes(grid);
    let results: Vec<Option<C64>> = seeds.par_iter().map(|&s| newton_f64(f, m, target64, s, &bounds)).collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    let mut coarse: Vec<C64> = vec![];
    for z in results.into_iter().flatten() {
        if !coarse.iter().any(|c| (c - z).norm() <= 1e-7 * z.norm().max(1.0)) {
            coarse.push(z);
        }
    }
    let polished: Vec<Option<Scalar>> = coarse.par_iter().map(|&z| polish(f, m, target, z, prec, tol)).collect();
    let radius = tol.sqrt();
    let mut roots: Vec<Scalar> = vec![];
    for z in polished.into_iter().flatten() {
        if !region.contains(z.to_c64()) {
            continue;
        }
        if !roots.iter().any(|r| (r.clone() - z.clone()).abs_f64() <= radius * z.abs_f64().max(1.0)) {
            roots.push(z);
        }
    }
    FoundRoots { roots, failures }
}

/// Region-local check of both implications for a closed-form candidate.
pub fn grid_verify_expr(
    f: &ExprFunction,
    prob: &SharingProblem,
    region: &Region,
    grid: usize,
    tol: f64,
    prec: usize,
) -> Result<VerificationReport, VerifyError> {
    if grid < 2 {
        return Err(VerifyError::InvalidRegion("grid needs at least 2 nodes per side".into()));
    }
    let mut report = VerificationReport::empty(Regime::Float, prob.relaxed);
    report.region_local = true;
    report.warnings.push(format!(
        "region-local: searched [{}, {}] x [{}, {}] from a {grid}x{grid} grid; absence of witnesses is not a proof",
        region.x0, region.x1, region.y0, region.y1
    ));
    let check_tol = tol.sqrt();
    for (implication, m, target, other) in
        [(Implication::AImpliesA, 0, &prob.a, 1usize), (Implication::BImpliesB, 1, &prob.b, 0usize)]
    {
        let found = find_roots(f, m, target, region, grid, tol, prec);
        if found.failures > 0 {
            report.warnings.push(format!(
                "{implication:?}: {} of {} Newton seeds did not converge inside the search box",
                found.failures,
                grid * grid
            ));
        }
        for z in found.roots {
            let d = f.derivatives(&z, 1, prec);
            let lhs = d[other].clone();
            let defect = (lhs.clone() - target.clone()).abs_f64();
            if defect > check_tol * target.abs_f64().max(1.0) {
                match implication {
                    Implication::AImpliesA => report.holds_a_implies = false,
                    Implication::BImpliesB => report.holds_b_implies = false,
                }
                report.witnesses.push(Witness {
                    coordinate: Coordinate::Z,
                    location: z,
                    z: None,
                    implication,
                    lhs,
                    rhs: target.clone(),
                    defect,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::parse_expr;
    use crate::numeric::DEFAULT_TOL;

    #[test]
    fn closed_form_example_is_region_local_pass() {
        let f = parse_expr("exp(z^3)-1").unwrap();
        let prob = SharingProblem::relaxed(Scalar::int(-1), Scalar::int(0)).unwrap();
        let r = grid_verify_expr(&f, &prob, &Region::square(5.0), 21, DEFAULT_TOL, 128).unwrap();
        assert!(r.holds() && r.region_local, "{r:?}");
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn quadratic_counterexample_holds() {
        let f = parse_expr("(1/2)*z^2").unwrap();
        let prob = SharingProblem::relaxed(Scalar::int(0), Scalar::int(2)).unwrap();
        let r = grid_verify_expr(&f, &prob, &Region::square(5.0), 11, DEFAULT_TOL, 128).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn violation_is_found() {
        // f = z^2: f = 1 at z = ±1 where f' = ±2 != 1
        let f = parse_expr("z^2").unwrap();
        let prob = SharingProblem::new(Scalar::int(1), Scalar::int(3)).unwrap();
        let r = grid_verify_expr(&f, &prob, &Region::square(3.0), 11, DEFAULT_TOL, 128).unwrap();
        assert!(!r.holds_a_implies);
        assert_eq!(r.witnesses.iter().filter(|w| w.implication == Implication::AImpliesA).count(), 2);
    }
}
