//! Integer certificates: squares of `(k+1)(n+1)^2 + n`, a mod-9 sieve, a difference of squares,
//! descent in `Z[√3]`, and the two feasibility equations in `(m, n, k)` and `(d, j, k, n)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiophantineError {
    #[error("unit {x} + {y}√{d} has norm {norm}, not 1")]
    InvalidUnit { x: BigInt, y: BigInt, d: BigInt, norm: BigInt },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub fn is_square(m: &BigInt) -> bool {
    if m.is_negative() {
        return false;
    }
    let r = m.sqrt();
    &r * &r == *m
}

/// `(k+1)(n+1)^2 + n`
pub fn square_family_value(k: u64, n: &BigInt) -> BigInt {
    let n1 = n + 1;
    BigInt::from(k + 1) * &n1 * &n1 + n
}

/// All `1 <= n <= n_max` with `(k+1)(n+1)^2 + n` a perfect square.
pub fn square_family_scan(k: u64, n_max: u64) -> Vec<u64> {
    let mut hits: Vec<u64> =
        (1..=n_max).into_par_iter().filter(|&n| is_square(&square_family_value(k, &BigInt::from(n)))).collect();
    hits.sort_unstable();
    hits
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModSieve {
    pub value_residues: BTreeSet<u32>,
    pub square_residues: BTreeSet<u32>,
    pub disjoint: bool,
}

/// Residues of `5(n+1)^2 + n` and of squares modulo 9.
pub fn mod_sieve_k4() -> ModSieve {
    let value_residues: BTreeSet<u32> = (0..9u32).map(|n| (5 * (n + 1) * (n + 1) + n) % 9).collect();
    let square_residues: BTreeSet<u32> = (0..9u32).map(|s| s * s % 9).collect();
    let disjoint = value_residues.is_disjoint(&square_residues);
    ModSieve { value_residues, square_residues, disjoint }
}

/// Solutions of `x^2 - y^2 = 17` with `x = 8n + 9`, `y = 4s`, `n >= 0`, as `(x, y, n)`.
pub fn diff_squares_k3() -> Vec<(BigInt, BigInt, BigInt)> {
    diff_squares(&BigInt::from(17)).into_iter().filter_map(|(x, y)| {
        let (n, r) = Integer::div_rem(&(&x - 9), &BigInt::from(8));
        (r.is_zero() && !n.is_negative() && Integer::is_multiple_of(&y, &BigInt::from(4))).then_some((x, y, n))
    }).collect()
}

/// Positive `(x, y)` with `x^2 - y^2 = m`, from the factorizations `m = (x + y)(x - y)`.
pub fn diff_squares(m: &BigInt) -> Vec<(BigInt, BigInt)> {
    divisor_pairs(m)
        .into_iter()
        .filter_map(|(p, q)| {
            let (s, d) = (&p + &q, &p - &q);
            (s.is_even() && d.is_even() && d.is_positive()).then(|| (s / 2, d / 2))
        })
        .collect()
}

/// `(p, q)` with `p q = m`, `p >= q >= 1`.
pub fn divisor_pairs(m: &BigInt) -> Vec<(BigInt, BigInt)> {
    let mut out = vec![];
    let mut q = BigInt::one();
    while &q * &q <= *m {
        if (m % &q).is_zero() {
            out.push((m / &q, q.clone()));
        }
        q += 1;
    }
    out
}

/// `x + y√3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zsqrt3 {
    pub x: BigInt,
    pub y: BigInt,
}

impl Zsqrt3 {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Zsqrt3 { x: x.into(), y: y.into() }
    }

    /// `ε = 2 + √3`
    pub fn epsilon() -> Self {
        Zsqrt3::new(2, 1)
    }
}

pub fn zsqrt3_mul(p: &Zsqrt3, q: &Zsqrt3) -> Zsqrt3 {
    Zsqrt3 { x: &p.x * &q.x + 3 * &p.y * &q.y, y: &p.x * &q.y + &q.x * &p.y }
}

pub fn zsqrt3_norm(p: &Zsqrt3) -> BigInt {
    &p.x * &p.x - 3 * &p.y * &p.y
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Any,
}

impl Parity {
    fn admits(self, y: &BigInt) -> bool {
        match self {
            Parity::Even => y.is_even(),
            Parity::Odd => y.is_odd(),
            Parity::Any => true,
        }
    }
}

/// `x^2 - D y^2 = N` over positive `x, y` with `x + y√D <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellInstance {
    pub d: BigInt,
    pub n: BigInt,
    /// `x ≡ residue (mod modulus)`
    pub x_congruence: Option<(BigInt, BigInt)>,
    pub y_parity: Parity,
    pub bound: BigInt,
    /// Unit of norm 1 used for the descent step; `7 + 4√3` by default.
    pub unit: (BigInt, BigInt),
}

impl PellInstance {
    pub fn new(d: i64, n: i64, bound: i64) -> Self {
        PellInstance {
            d: d.into(),
            n: n.into(),
            x_congruence: None,
            y_parity: Parity::Any,
            bound: bound.into(),
            unit: (7.into(), 4.into()),
        }
    }

    pub fn with_congruence(mut self, residue: i64, modulus: i64) -> Self {
        self.x_congruence = Some((residue.into(), modulus.into()));
        self
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.y_parity = parity;
        self
    }

    pub fn with_unit(mut self, x: i64, y: i64) -> Self {
        self.unit = (x.into(), y.into());
        self
    }

    /// The instance behind `3(n+1)^2 + n = s^2`: `x = 6n + 7`, `y = 2s`.
    pub fn k2_instance() -> Self {
        PellInstance::new(3, 13, 51).with_congruence(1, 6).with_parity(Parity::Even)
    }

    fn admits(&self, x: &BigInt, y: &BigInt) -> bool {
        let congruent = match &self.x_congruence {
            Some((r, m)) => (x - r).mod_floor(m).is_zero(),
            None => true,
        };
        congruent && self.y_parity.admits(y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentCertificate {
    pub instance: PellInstance,
    /// The descent step keeps the congruence and parity, checked over all residue pairs.
    pub closure_check: bool,
    /// Modulus of the residue check.
    pub closure_modulus: BigInt,
    /// `bound^2 > U^2 N` with `U` an integer upper bound of the unit.
    pub bound_check: bool,
    pub bound_statement: String,
    /// Number of `(x, y)` pairs in the search region.
    pub enumerated: u64,
    pub solutions: Vec<(BigInt, BigInt)>,
}

impl DescentCertificate {
    pub fn complete(&self) -> bool {
        self.closure_check && self.bound_check
    }
}

impl fmt::Display for DescentCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inst = &self.instance;
        let cong = match &inst.x_congruence {
            Some((r, m)) => format!(", x ≡ {r} (mod {m})"),
            None => String::new(),
        };
        let sols: Vec<String> = self.solutions.iter().map(|(x, y)| format!("({x}, {y})")).collect();
        write!(
            f,
            "{{instance: x^2 - {}y^2 = {}{cong}, y {:?}, x + y√{} <= {}; closure_check: {} (mod {}); bound_check: \"{}\" {}; enumerated: {}; solutions: [{}]}}",
            inst.d,
            inst.n,
            inst.y_parity,
            inst.d,
            inst.bound,
            if self.closure_check { "pass" } else { "fail" },
            self.closure_modulus,
            self.bound_statement,
            if self.bound_check { "pass" } else { "fail" },
            self.enumerated,
            sols.join(", ")
        )
    }
}

/// `(x + y√D) / (ux + uy√D)` for a unit of norm 1: `(x ux - D y uy, y ux - x uy)`.
fn divide_by_unit(x: &BigInt, y: &BigInt, inst: &PellInstance) -> (BigInt, BigInt) {
    let (ux, uy) = &inst.unit;
    (x * ux - &inst.d * y * uy, y * ux - x * uy)
}

/// `x + y√D <= bound` for positive `x, y` and integer `bound`, decided exactly.
fn within(x: &BigInt, y: &BigInt, d: &BigInt, bound: &BigInt) -> bool {
    let room = bound - x;
    !room.is_negative() && y * y * d <= &room * &room
}

/// Enumerates the search region and certifies that it suffices.
pub fn pell_descent(inst: &PellInstance) -> Result<(Vec<(BigInt, BigInt)>, DescentCertificate), DiophantineError> {
    if !inst.d.is_positive() || is_square(&inst.d) {
        return Err(DiophantineError::InvalidInstance(format!("D = {} must be a positive nonsquare", inst.d)));
    }
    if let Some((_, m)) = &inst.x_congruence {
        if m < &BigInt::one() {
            return Err(DiophantineError::InvalidInstance("modulus must be at least 1".into()));
        }
    }
    let (ux, uy) = &inst.unit;
    let norm = ux * ux - &inst.d * uy * uy;
    if !norm.is_one() {
        return Err(DiophantineError::InvalidUnit { x: ux.clone(), y: uy.clone(), d: inst.d.clone(), norm });
    }

    // phase 1: residues modulo lcm(m, 2) cover the congruence and the parity at once
    let modulus = inst.x_congruence.as_ref().map(|(_, m)| m.lcm(&BigInt::from(2))).unwrap_or_else(|| BigInt::from(2));
    let mut closure_check = true;
    let mut rx = BigInt::zero();
    while rx < modulus {
        let mut ry = BigInt::zero();
        while ry < modulus {
            if inst.admits(&rx, &ry) {
                let (x1, y1) = divide_by_unit(&rx, &ry, inst);
                closure_check &= inst.admits(&x1.mod_floor(&modulus), &y1.mod_floor(&modulus));
            }
            ry += 1;
        }
        rx += 1;
    }

    // the unit lies below ux + ceil(uy √D)
    let uy2d = uy * uy * &inst.d;
    let mut ceil_root = uy2d.sqrt();
    if &ceil_root * &ceil_root < uy2d {
        ceil_root += 1;
    }
    let unit_bound = ux + ceil_root;
    let lhs = &inst.bound * &inst.bound;
    let rhs = &unit_bound * &unit_bound * &inst.n;
    let bound_check = inst.n.is_positive() && lhs > rhs;
    let bound_statement = format!("{}^2 > {}^2·{} ({} {} {})", inst.bound, unit_bound, inst.n, lhs, if lhs > rhs { ">" } else { "<=" }, rhs);

    // phase 2
    let mut solutions = vec![];
    let mut enumerated = 0u64;
    let mut y = BigInt::one();
    while within(&BigInt::one(), &y, &inst.d, &inst.bound) {
        let mut x = BigInt::one();
        while within(&x, &y, &inst.d, &inst.bound) {
            enumerated += 1;
            if inst.admits(&x, &y) && &x * &x - &inst.d * &y * &y == inst.n {
                solutions.push((x.clone(), y.clone()));
            }
            x += 1;
        }
        y += 1;
    }
    solutions.sort();
    let cert = DescentCertificate {
        instance: inst.clone(),
        closure_check,
        closure_modulus: modulus,
        bound_check,
        bound_statement,
        enumerated,
        solutions: solutions.clone(),
    };
    Ok((solutions, cert))
}

/// Outcome of the `(m, n, k)` sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MnkReport {
    pub solutions: Vec<(u64, u64, u64)>,
    /// `m = 1` makes the left side vanish for every `(n, k)` in range.
    pub m1_row_zero: bool,
    /// `(8/9)(n+1)^2(k+1) > 4(n+1)` for every `n >= 2`, `k >= 1` in range.
    pub inequality_holds: bool,
    pub checked: u64,
}

/// Both sides of `(1 - 1/m^2)[(n+1)^2(k+1) + n] = 4(n+1)` multiplied by `m^2`.
pub fn mnk_sides(m: u64, n: u64, k: u64) -> (BigInt, BigInt) {
    let (m, n, k) = (BigInt::from(m), BigInt::from(n), BigInt::from(k));
    let m2 = &m * &m;
    let n1 = &n + 1;
    ((&m2 - 1) * (&n1 * &n1 * (&k + 1) + &n), 4 * &m2 * &n1)
}

pub fn mnk_equation(m: u64, n: u64, k: u64) -> bool {
    let (l, r) = mnk_sides(m, n, k);
    l == r
}

/// Sweeps odd `m <= m_max`, `2 <= n <= n_max`, `1 <= k <= k_max`.
pub fn mnk_feasible(n_max: u64, k_max: u64, m_max: u64) -> MnkReport {
    let grid: Vec<(u64, u64)> = (2..=n_max).flat_map(|n| (1..=k_max).map(move |k| (n, k))).collect();
    let mut solutions: Vec<(u64, u64, u64)> = grid
        .par_iter()
        .flat_map_iter(|&(n, k)| (1..=m_max).step_by(2).filter(move |&m| mnk_equation(m, n, k)).map(move |m| (m, n, k)))
        .collect();
    solutions.sort_unstable();
    let m1_row_zero = grid.iter().all(|&(n, k)| {
        let (l, r) = mnk_sides(1, n, k);
        l.is_zero() && !r.is_zero()
    });
    let inequality_holds = grid.iter().all(|&(n, k)| {
        let n1 = BigInt::from(n + 1);
        8 * &n1 * &n1 * BigInt::from(k + 1) > 36 * n1
    });
    let checked = grid.len() as u64 * m_max.div_ceil(2);
    MnkReport { solutions, m1_row_zero, inequality_holds, checked }
}

/// `d^2 j^2 (n+1)^2 ((k+1)(n+1)^2 + n) = (d^2 n + j^2 (n+1)^2 (k+1))^2`.
pub fn dj_equation_check(d: u64, j: u64, k: u64, n: u64) -> bool {
    let (d, j, k, n) = (BigInt::from(d), BigInt::from(j), BigInt::from(k), BigInt::from(n));
    let n1 = &n + 1;
    let (d2, j2, n12) = (&d * &d, &j * &j, &n1 * &n1);
    let lhs = &d2 * &j2 * &n12 * ((&k + 1) * &n12 + &n);
    let rhs = &d2 * &n + &j2 * &n12 * (&k + 1);
    lhs == &rhs * &rhs
}

/// `2j <= d <= 3j` and `j < d`.
pub fn dj_in_domain(d: u64, j: u64) -> bool {
    j < d && 2 * j <= d && d <= 3 * j
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DjSweep {
    /// Solutions with `2j <= d <= 3j`.
    pub solutions: Vec<(u64, u64, u64, u64)>,
    /// Solutions outside that range, flagged and still reported.
    pub out_of_domain: Vec<(u64, u64, u64, u64)>,
    pub checked: u64,
}

/// Exhaustive sweep over `1 <= d <= d_max`, `1 <= j <= j_max`, `k` in `ks`, `1 <= n <= n_max`.
pub fn dj_sweep(d_max: u64, j_max: u64, ks: std::ops::RangeInclusive<u64>, n_max: u64) -> DjSweep {
    let ks: Vec<u64> = ks.collect();
    let grid: Vec<(u64, u64, u64)> =
        (1..=d_max).flat_map(|d| (1..=j_max).flat_map({ let ks = ks.clone(); move |j| ks.clone().into_iter().map(move |k| (d, j, k)) })).collect();
    let mut all: Vec<(u64, u64, u64, u64)> = grid
        .par_iter()
        .flat_map_iter(|&(d, j, k)| (1..=n_max).filter(move |&n| dj_equation_check(d, j, k, n)).map(move |n| (d, j, k, n)))
        .collect();
    all.sort_unstable();
    let (solutions, out_of_domain) = all.into_iter().partition(|&(d, j, _, _)| dj_in_domain(d, j));
    DjSweep { solutions, out_of_domain, checked: grid.len() as u64 * n_max }
}
