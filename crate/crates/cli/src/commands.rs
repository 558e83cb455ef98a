use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sharelab_core::classifier::{self, FamilyKind, SolutionFamily};
use sharelab_core::diophantine::{self, DescentCertificate, DjSweep, MnkReport, ModSieve, Parity, PellInstance};
use sharelab_core::function::{
    dz_derive, jet_of, jet_of_exppoly_at_t, parse_expr, parse_scalar, CandidateFile, CandidateFunction, ExpPolyFunction, Jet,
};
use sharelab_core::jet::{self, AnchorKind, JetError, RecurrenceContext};
use sharelab_core::numeric::{poly_add, poly_roots, Poly, Regime, Scalar};
use sharelab_core::verifier::{self, grid_verify_expr, Implication, Region, SharingProblem, VerificationReport, VerifyOptions};

use crate::{AnchorArg, Cli, CliConfig, Command, DioCommand, JetArgs, OutputArg, ParityArg, RegimeArg, ValueArgs, VerifyArgs};

pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_REGION_LOCAL: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_COMPUTATION: u8 = 4;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Computation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Computation(_) => EXIT_COMPUTATION,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn computation(e: impl ToString) -> CliError {
    CliError::Computation(e.to_string())
}

/// A finished command: exit code, text rendering and the structured document.
struct Outcome {
    code: u8,
    text: String,
    structured: serde_json::Value,
}

pub fn run(cli: &Cli) -> u8 {
    let cfg = &cli.config;
    let result = check_config(cfg).and_then(|_| match &cli.command {
        Command::Verify(args) => cmd_verify(args, cfg),
        Command::Classify(args) => cmd_classify(args, cfg),
        Command::Diophantine(sub) => cmd_diophantine(sub),
        Command::Jet(args) => cmd_jet(args, cfg),
    });
    match result {
        Ok(out) => {
            match cfg.output {
                OutputArg::Text => print!("{}", out.text),
                OutputArg::Structured => println!("{}", serde_json::to_string_pretty(&out.structured).expect("reports serialize")),
            }
            if let Some(path) = &cfg.out {
                let doc = serde_json::to_string_pretty(&out.structured).expect("reports serialize");
                if let Err(e) = std::fs::write(path, doc + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            out.code
        }
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Computation(m) => eprintln!("computation error: {m}"),
            }
            e.code()
        }
    }
}

const MIN_PRECISION: usize = 53;

fn check_config(cfg: &CliConfig) -> Result<(), CliError> {
    if cfg.precision_bits < MIN_PRECISION {
        return Err(usage(format!("precision must be at least {MIN_PRECISION} bits, got {}", cfg.precision_bits)));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(usage(format!("tolerance must be positive, got {}", cfg.tol)));
    }
    Ok(())
}

fn scalar_arg(name: &str, s: &str, cfg: &CliConfig) -> Result<Scalar, CliError> {
    let bad = |e: &dyn std::fmt::Display| usage(format!("--{name}: {e}"));
    // `re+im*i@bits` (the serialized form) or any exact scalar followed by `@bits`
    let v = match s.rsplit_once('@') {
        Some((body, bits)) => match s.parse::<Scalar>() {
            Ok(v) => v,
            Err(_) => {
                let bits: usize = bits.parse().map_err(|e| bad(&e))?;
                if bits < MIN_PRECISION {
                    return Err(bad(&format!("precision must be at least {MIN_PRECISION} bits, got {bits}")));
                }
                parse_scalar(body).map_err(|e| bad(&e))?.to_float(bits)
            }
        },
        None => parse_scalar(s).map_err(|e| bad(&e))?,
    };
    regime_scalar(name, v, cfg)
}

fn regime_scalar(name: &str, v: Scalar, cfg: &CliConfig) -> Result<Scalar, CliError> {
    match cfg.regime {
        RegimeArg::Exact if !v.is_exact() => Err(usage(format!("{name} = {} is not Gaussian rational; exact regime refused", v.pretty()))),
        RegimeArg::Float => Ok(v.to_float(cfg.precision_bits)),
        _ => Ok(v),
    }
}

fn regime_candidate(f: CandidateFunction, cfg: &CliConfig) -> Result<CandidateFunction, CliError> {
    let conv = |name: &str, v: &Scalar| regime_scalar(name, v.clone(), cfg);
    Ok(match f {
        CandidateFunction::Affine(mut x) => {
            x.slope = conv("slope", &x.slope)?;
            x.intercept = conv("intercept", &x.intercept)?;
            CandidateFunction::Affine(x)
        }
        CandidateFunction::ExpPoly(e) => {
            let lambda = conv("lambda", e.lambda())?;
            let coeffs = e.poly().coeffs().iter().map(|c| conv("coefficient", c)).collect::<Result<Vec<_>, _>>()?;
            CandidateFunction::ExpPoly(ExpPolyFunction::new(lambda, Poly::new(coeffs)).map_err(usage)?)
        }
        CandidateFunction::Expr(x) => {
            if cfg.regime == RegimeArg::Exact {
                return Err(usage("closed-form candidates are checked on a float grid; exact regime refused"));
            }
            CandidateFunction::Expr(x)
        }
    })
}

/// Family member with free constant `c`; `b` defaults to `-a/8` for family (iv).
fn family_member(
    kind: &str,
    a: &Scalar,
    b: Option<Scalar>,
    c: &Scalar,
) -> Result<(SolutionFamily, CandidateFunction, Scalar), CliError> {
    let kind: FamilyKind = kind.parse().map_err(usage)?;
    let b = match (b, kind) {
        (Some(b), _) => b,
        (None, FamilyKind::IV) => -(a / &Scalar::int(8)),
        (None, _) => return Err(usage(format!("family ({}) needs --b", kind.label()))),
    };
    let fam = classifier::family(kind, a, &b).map_err(usage)?;
    let f = fam.instantiate(c).map_err(usage)?;
    Ok((fam, f, b))
}

fn cmd_verify(args: &VerifyArgs, cfg: &CliConfig) -> Result<Outcome, CliError> {
    let a_flag = args.a.as_deref().map(|s| scalar_arg("a", s, cfg)).transpose()?;
    let b_flag = args.b.as_deref().map(|s| scalar_arg("b", s, cfg)).transpose()?;
    let (f, a, b) = if let Some(path) = &args.candidate {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let file: CandidateFile = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let (fa, fb) = file.values();
        let a = a_flag.or(fa.cloned());
        let b = b_flag.or(fb.cloned());
        (file.candidate().map_err(usage)?, a, b)
    } else if let Some(kind) = &args.family {
        let a = a_flag.ok_or_else(|| usage("--family needs --a"))?;
        let c = scalar_arg("C", &args.c, cfg)?;
        let (_, f, b) = family_member(kind, &a, b_flag, &c)?;
        (f, Some(a), Some(b))
    } else if let Some(src) = &args.expr {
        (CandidateFunction::Expr(parse_expr(src).map_err(usage)?), a_flag, b_flag)
    } else if args.exppoly {
        let lambda = parse_scalar(args.lambda.as_deref().unwrap_or_default()).map_err(|e| usage(format!("--lambda: {e}")))?;
        let coeffs = args
            .coeffs
            .as_deref()
            .unwrap_or_default()
            .split(',')
            .map(|c| parse_scalar(c.trim()).map_err(|e| usage(format!("--coeffs: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        (CandidateFunction::ExpPoly(ExpPolyFunction::new(lambda, Poly::new(coeffs)).map_err(usage)?), a_flag, b_flag)
    } else {
        return Err(usage("no candidate: give a candidate file, --family, --expr or --exppoly"));
    };
    let f = regime_candidate(f, cfg)?;
    let a = regime_scalar("a", a.ok_or_else(|| usage("missing --a"))?, cfg)?;
    let b = regime_scalar("b", b.ok_or_else(|| usage("missing --b"))?, cfg)?;
    let prob = SharingProblem::with_mode(a, b, cfg.relaxed).map_err(usage)?;

    let mut report = match &f {
        CandidateFunction::Expr(e) => {
            let region: Region = args.region.parse().map_err(usage)?;
            grid_verify_expr(e, &prob, &region, args.grid, cfg.tol, cfg.precision_bits).map_err(computation)?
        }
        _ => {
            let opts = VerifyOptions { tol: cfg.tol, precision: cfg.precision_bits, samples: args.samples, ..Default::default() };
            verifier::verify(&f, &prob, &opts).map_err(|e| match e {
                verifier::VerifyError::InvalidProblem(_) | verifier::VerifyError::InvalidRegion(_) => usage(e),
                _ => computation(e),
            })?
        }
    };
    if cfg.regime == RegimeArg::Auto && report.regime == Regime::Float && !matches!(f, CandidateFunction::Expr(_)) {
        report.warnings.push("float regime: an input is not Gaussian rational".into());
    }
    let code = if !report.holds() {
        EXIT_VIOLATED
    } else if report.region_local {
        EXIT_REGION_LOCAL
    } else {
        EXIT_HOLDS
    };
    Ok(Outcome { code, text: render_report(&report, &prob), structured: serde_json::to_value(&report).expect("serializable") })
}

/// `pretty()`, or a double-precision approximation when an exact value is unwieldy.
fn short(v: &Scalar) -> String {
    let p = v.pretty();
    if p.len() <= 60 {
        return p;
    }
    let z = v.to_c64();
    format!("~{:.6e}{:+.6e}i", z.re, z.im)
}

fn render_report(r: &VerificationReport, prob: &SharingProblem) -> String {
    let mut s = String::new();
    let status = |ok: bool| if ok { "holds" } else { "violated" };
    let _ = writeln!(s, "a = {}, b = {}", prob.a.pretty(), prob.b.pretty());
    let _ = writeln!(s, "f = a => f' = a: {}", status(r.holds_a_implies));
    let _ = writeln!(s, "f' = b => f = b: {}", status(r.holds_b_implies));
    for w in &r.witnesses {
        let which = match w.implication {
            Implication::AImpliesA => "f' at an a-point",
            Implication::BImpliesB => "f at a b-point",
        };
        let coord = format!("{:?}", w.coordinate).to_lowercase();
        let z = w.z.as_ref().map(|z| format!(" (z = {})", short(z))).unwrap_or_default();
        let _ = writeln!(
            s,
            "  witness: {coord} = {}{z}: {which} = {}, expected {}, defect {:.3e}",
            short(&w.location),
            short(&w.lhs),
            short(&w.rhs),
            w.defect
        );
    }
    if let Some(g) = &r.g_constant_estimate {
        let _ = writeln!(s, "g estimate: {} (max deviation {:.3e})", short(g), r.g_max_deviation.unwrap_or(0.0));
    }
    if let Some(c) = &r.counts {
        let k = c.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "counts: d = {}, j = {}, k = {k}, n(a) = {}, nbar(a) = {}, n(b,f') = {}, nbar(b,f') = {}, n(0,f'') = {}",
            c.d, c.j, c.n_a, c.nbar_a, c.n_b_fprime, c.nbar_b_fprime, c.n_0_fpp
        );
    }
    let _ = writeln!(s, "regime: {:?}", r.regime);
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let verdict = if !r.holds() {
        "violated"
    } else if r.region_local {
        "holds on the searched region only"
    } else {
        "holds"
    };
    let _ = writeln!(s, "result: {verdict}");
    s
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub a: Scalar,
    pub b: Scalar,
    pub families: Vec<SolutionFamily>,
    /// `b = -a/8`, the condition for family (iv).
    pub iv_condition: bool,
}

fn cmd_classify(args: &ValueArgs, cfg: &CliConfig) -> Result<Outcome, CliError> {
    let a = scalar_arg("a", &args.a, cfg)?;
    let b = scalar_arg("b", &args.b, cfg)?;
    let families = classifier::classify(&a, &b).map_err(usage)?;
    let iv_condition = families.iter().any(|f| f.kind == FamilyKind::IV);
    let mut text = String::new();
    for f in &families {
        let _ = writeln!(text, "{f}");
    }
    let _ = writeln!(
        text,
        "family (iv) condition b = -a/8: {} (-a/8 = {})",
        if iv_condition { "holds" } else { "fails" },
        (-(&a / &Scalar::int(8))).pretty()
    );
    let report = ClassifyReport { a, b, families, iv_condition };
    Ok(Outcome { code: EXIT_HOLDS, text, structured: serde_json::to_value(&report).expect("serializable") })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum DiophantineReport {
    Squares { nmax: u64, hits: BTreeMap<u64, Vec<u64>> },
    Mod9(ModSieve),
    /// `(x, y, n)` as decimal strings.
    Diffsq { solutions: Vec<(String, String, String)> },
    Pell(DescentCertificate),
    Mnk(MnkReport),
    Djeq(DjSweep),
}

fn ok_code(ok: bool) -> u8 {
    if ok {
        EXIT_HOLDS
    } else {
        EXIT_VIOLATED
    }
}

fn cmd_diophantine(sub: &DioCommand) -> Result<Outcome, CliError> {
    let mut text = String::new();
    let (code, report) = match sub {
        DioCommand::Squares { k, nmax } => {
            let mut hits = BTreeMap::new();
            for &k in k {
                if k == 0 {
                    return Err(usage("k must be positive"));
                }
                let h = diophantine::square_family_scan(k, *nmax);
                let _ = writeln!(text, "k = {k}: {} in 1 <= n <= {nmax}", if h.is_empty() { "no square".into() } else { format!("squares at n = {h:?}") });
                hits.insert(k, h);
            }
            let ok = hits.values().all(Vec::is_empty);
            let _ = writeln!(text, "result: {}", if ok { "empty" } else { "nonempty" });
            (ok_code(ok), DiophantineReport::Squares { nmax: *nmax, hits })
        }
        DioCommand::Mod9 => {
            let m = diophantine::mod_sieve_k4();
            let _ = writeln!(text, "5(n+1)^2 + n mod 9: {:?}", m.value_residues);
            let _ = writeln!(text, "squares mod 9: {:?}", m.square_residues);
            let _ = writeln!(text, "result: {}", if m.disjoint { "disjoint" } else { "overlap" });
            (ok_code(m.disjoint), DiophantineReport::Mod9(m))
        }
        DioCommand::Diffsq => {
            let sols = diophantine::diff_squares_k3();
            for (x, y, n) in &sols {
                let _ = writeln!(text, "x = {x}, y = {y}, n = {n}");
            }
            let unique = sols.len() == 1 && sols[0].0 == 9.into() && sols[0].1 == 8.into() && sols[0].2 == 0.into();
            let _ = writeln!(text, "result: {}", if unique { "unique, n = 0" } else { "unexpected solution set" });
            let solutions = sols.iter().map(|(x, y, n)| (x.to_string(), y.to_string(), n.to_string())).collect();
            (ok_code(unique), DiophantineReport::Diffsq { solutions })
        }
        DioCommand::Pell { d, n, xmod, y, bound, unit } => {
            let mut inst = PellInstance::new(*d, *n, *bound);
            if let Some(xm) = xmod {
                let (r, m) = xm.split_once(':').ok_or_else(|| usage(format!("--xmod expects r:m, got '{xm}'")))?;
                let r: i64 = r.trim().parse().map_err(|_| usage(format!("--xmod: bad residue '{r}'")))?;
                let m: i64 = m.trim().parse().map_err(|_| usage(format!("--xmod: bad modulus '{m}'")))?;
                if m <= 0 {
                    return Err(usage("--xmod modulus must be positive"));
                }
                inst = inst.with_congruence(r, m);
            }
            inst = inst.with_parity(match y {
                ParityArg::Even => Parity::Even,
                ParityArg::Odd => Parity::Odd,
                ParityArg::Any => Parity::Any,
            });
            let (ux, uy) = unit.split_once(',').ok_or_else(|| usage(format!("--unit expects x,y, got '{unit}'")))?;
            let ux: i64 = ux.trim().parse().map_err(|_| usage("--unit: bad x"))?;
            let uy: i64 = uy.trim().parse().map_err(|_| usage("--unit: bad y"))?;
            let (_, cert) = diophantine::pell_descent(&inst.with_unit(ux, uy)).map_err(usage)?;
            let _ = writeln!(text, "{cert}");
            (ok_code(cert.complete()), DiophantineReport::Pell(cert))
        }
        DioCommand::Mnk { nmax, kmax, mmax } => {
            let r = diophantine::mnk_feasible(*nmax, *kmax, *mmax);
            let _ = writeln!(text, "checked {} triples (odd m <= {mmax}, 2 <= n <= {nmax}, 1 <= k <= {kmax})", r.checked);
            let _ = writeln!(text, "solutions: {:?}", r.solutions);
            let _ = writeln!(text, "m = 1: left side vanishes for every (n, k): {}", r.m1_row_zero);
            let _ = writeln!(text, "m >= 3: (8/9)(n+1)^2(k+1) > 4(n+1) throughout: {}", r.inequality_holds);
            let ok = r.solutions.is_empty() && r.m1_row_zero && r.inequality_holds;
            let _ = writeln!(text, "result: {}", if ok { "infeasible" } else { "not certified" });
            (ok_code(ok), DiophantineReport::Mnk(r))
        }
        DioCommand::Djeq { dmax, jmax, kmin, kmax, nmax } => {
            if kmin > kmax {
                return Err(usage("--kmin exceeds --kmax"));
            }
            let r = diophantine::dj_sweep(*dmax, *jmax, *kmin..=*kmax, *nmax);
            let _ = writeln!(text, "checked {} tuples (d <= {dmax}, j <= {jmax}, {kmin} <= k <= {kmax}, n <= {nmax})", r.checked);
            let _ = writeln!(text, "solutions with 2j <= d <= 3j: {:?}", r.solutions);
            if !r.out_of_domain.is_empty() {
                let _ = writeln!(text, "solutions outside 2j <= d <= 3j: {:?}", r.out_of_domain);
            }
            let ok = r.solutions.is_empty();
            let _ = writeln!(text, "result: {}", if ok { "no admissible solution" } else { "admissible solutions found" });
            (ok_code(ok), DiophantineReport::Djeq(r))
        }
    };
    Ok(Outcome { code, text, structured: serde_json::to_value(&report).expect("serializable") })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JetBranch {
    pub seed_fpp: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet: Option<Jet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Agreement with the closed-form jet, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches_closed_form: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JetReport {
    pub context: RecurrenceContext,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Jet>,
    pub branches: Vec<JetBranch>,
    pub notes: Vec<String>,
}

/// Closed-form jet at an `a`-point or `b`-point of `f`, with a note on the anchor.
fn closed_form_jet(
    f: &CandidateFunction,
    kind: AnchorKind,
    target: &Scalar,
    z0: &Scalar,
    order: usize,
    cfg: &CliConfig,
) -> Result<(Jet, String), CliError> {
    match f {
        CandidateFunction::ExpPoly(e) => {
            let p = match kind {
                AnchorKind::AtAPoint => e.poly().clone(),
                AnchorKind::AtSimpleBPoint => dz_derive(e.poly(), e.lambda()).map_err(computation)?,
            };
            let q = poly_add(&p, &Poly::constant(-target.clone())).map_err(computation)?;
            let roots = poly_roots(&q, cfg.tol).map_err(computation)?;
            let mut nonzero: Vec<_> = roots.roots.into_iter().filter(|r| r.location.abs_f64() > 0.0).collect();
            nonzero.sort_by_key(|r| r.multiplicity);
            let root = nonzero.into_iter().next().ok_or_else(|| usage(format!("f never takes the anchor value {}", target.pretty())))?;
            let jet = jet_of_exppoly_at_t(e, &root.location, order).map_err(computation)?;
            Ok((jet, format!("anchor at t = {} (multiplicity {})", root.location.pretty(), root.multiplicity)))
        }
        CandidateFunction::Affine(x) => {
            let z = match kind {
                AnchorKind::AtAPoint => (target - &x.intercept).checked_div(&x.slope).map_err(computation)?,
                AnchorKind::AtSimpleBPoint => {
                    if !x.slope.approx_eq(target, 0.0) {
                        return Err(usage(format!("f' = {} never equals b", x.slope.pretty())));
                    }
                    z0.clone()
                }
            };
            Ok((jet_of(f, &z, order), format!("anchor at z = {}", z.pretty())))
        }
        CandidateFunction::Expr(_) => {
            let z = if z0.is_exact() { z0.to_float(cfg.precision_bits) } else { z0.clone() };
            Ok((jet_of(f, &z, order), format!("anchor at z = {}", z0.pretty())))
        }
    }
}

fn cmd_jet(args: &JetArgs, cfg: &CliConfig) -> Result<Outcome, CliError> {
    let a = scalar_arg("a", &args.a, cfg)?;
    let b_flag = args.b.as_deref().map(|s| scalar_arg("b", s, cfg)).transpose()?;
    let c = scalar_arg("C", &args.c, cfg)?;
    let z0 = parse_scalar(&args.z0).map_err(|e| usage(format!("--z0: {e}")))?;
    let kind = match args.anchor {
        AnchorArg::APoint => AnchorKind::AtAPoint,
        AnchorArg::BPoint => AnchorKind::AtSimpleBPoint,
    };
    let mut notes = vec![];
    let (closed, b) = if let Some(fam) = &args.family {
        let (_, f, b) = family_member(fam, &a, b_flag, &c)?;
        (Some(regime_candidate(f, cfg)?), b)
    } else if let Some(src) = &args.expr {
        let f = CandidateFunction::Expr(parse_expr(src).map_err(usage)?);
        (Some(f), b_flag.ok_or_else(|| usage("--expr needs --b"))?)
    } else {
        (None, b_flag.ok_or_else(|| usage("missing --b"))?)
    };

    let k = match (args.k, &closed) {
        (Some(k), _) => k,
        (None, Some(CandidateFunction::ExpPoly(e))) => {
            let prob = SharingProblem::with_mode(a.clone(), b.clone(), cfg.relaxed).map_err(usage)?;
            match verifier::counting(e, &prob, cfg.tol).ok().and_then(|c| c.k) {
                Some(k) => {
                    notes.push(format!("k = {k} from the zeros of f''"));
                    k
                }
                None => {
                    notes.push("f'' has no zeros of a common order; using k = 1".into());
                    1
                }
            }
        }
        (None, _) => 1,
    };
    let ctx = if cfg.relaxed {
        RecurrenceContext::relaxed(a.clone(), b.clone(), k, kind)
    } else {
        RecurrenceContext::new(a.clone(), b.clone(), k, kind)
    }
    .map_err(usage)?;
    let target = match kind {
        AnchorKind::AtAPoint => a.clone(),
        AnchorKind::AtSimpleBPoint => b.clone(),
    };

    let closed_jet = match &closed {
        Some(f) => {
            let (j, note) = closed_form_jet(f, kind, &target, &z0, args.order.max(2), cfg)?;
            notes.push(note);
            Some(j)
        }
        None => None,
    };
    let anchor = closed_jet.as_ref().map(|j| j.anchor.clone()).unwrap_or(z0);

    let fpps: Vec<Scalar> = if let Some(s) = &args.fpp {
        vec![scalar_arg("fpp", s, cfg)?]
    } else {
        match kind {
            AnchorKind::AtSimpleBPoint => vec![jet::fpp_at_simple_b(&ctx)],
            AnchorKind::AtAPoint => {
                let cands = jet::fpp_candidates_at_a(&ctx);
                if let Some(d) = &cands.demoted {
                    notes.push(format!("demoted to float: {d}"));
                }
                if cands.zero_branch {
                    notes.push("one admissible f'' is 0, which no solution attains at an a-point".into());
                }
                match &closed_jet {
                    Some(j) => {
                        let near = |x: &Scalar| (x - &j.derivs[2]).abs_f64();
                        vec![if near(&cands.v) < near(&cands.u) { cands.v } else { cands.u }]
                    }
                    None if cands.double => vec![cands.u],
                    None => vec![cands.u, cands.v],
                }
            }
        }
    };
    if let (Some(j), AnchorKind::AtSimpleBPoint) = (&closed_jet, kind) {
        if j.derivs[2].abs_f64() == 0.0 {
            notes.push("closed form has f'' = 0 here: the b-point is not simple".into());
        }
    }

    let mut code = EXIT_HOLDS;
    let mut branches = vec![];
    for fpp in fpps {
        let seed = Jet::new(anchor.clone(), vec![target.clone(), target.clone(), fpp.clone()]);
        let branch = match jet::jet_extend(&seed, &ctx, args.order) {
            Ok(j) => {
                let matches = closed_jet.as_ref().map(|cj| {
                    let upto = j.order().min(cj.order());
                    jet::jet_match(&j, cj, upto, cfg.tol.sqrt())
                });
                if matches == Some(false) {
                    code = code.max(EXIT_VIOLATED);
                }
                JetBranch { seed_fpp: fpp, jet: Some(j), error: None, matches_closed_form: matches }
            }
            Err(e) => {
                code = code.max(match e {
                    JetError::InvalidSeed(_) | JetError::InvalidContext(_) => EXIT_USAGE,
                    _ => EXIT_COMPUTATION,
                });
                JetBranch { seed_fpp: fpp, jet: None, error: Some(e.to_string()), matches_closed_form: None }
            }
        };
        branches.push(branch);
    }

    let report = JetReport { context: ctx, order: args.order, closed_form: closed_jet, branches, notes };
    let text = render_jet(&report);
    if code >= EXIT_USAGE {
        eprint!("{text}");
        let msg = report.branches.iter().filter_map(|b| b.error.clone()).collect::<Vec<_>>().join("; ");
        return Err(if code == EXIT_USAGE { usage(msg) } else { computation(msg) });
    }
    Ok(Outcome { code, text, structured: serde_json::to_value(&report).expect("serializable") })
}

fn render_jet(r: &JetReport) -> String {
    let mut s = String::new();
    let ctx = &r.context;
    let kind = match ctx.anchor_kind {
        AnchorKind::AtAPoint => "a-point",
        AnchorKind::AtSimpleBPoint => "simple b-point",
    };
    let _ = writeln!(s, "a = {}, b = {}, k = {}, c = {}, anchor: {kind}", ctx.a.pretty(), ctx.b.pretty(), ctx.k, ctx.c.pretty());
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    if let Some(cj) = &r.closed_form {
        let _ = writeln!(s, "closed form at z = {}:", cj.anchor.pretty());
        for (n, v) in cj.derivs.iter().enumerate().take(r.order + 1) {
            let _ = writeln!(s, "  f^({n}) = {}", v.pretty());
        }
    }
    for br in &r.branches {
        let _ = writeln!(s, "seed f'' = {}:", br.seed_fpp.pretty());
        if let Some(j) = &br.jet {
            for (n, v) in j.derivs.iter().enumerate() {
                let _ = writeln!(s, "  f^({n}) = {}", v.pretty());
            }
        }
        if let Some(e) = &br.error {
            let _ = writeln!(s, "  error: {e}");
        }
        match br.matches_closed_form {
            Some(true) => {
                let _ = writeln!(s, "  recurrence jet = closed-form jet");
            }
            Some(false) => {
                let _ = writeln!(s, "  recurrence jet differs from the closed-form jet");
            }
            None => {}
        }
    }
    s
}
