use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sharelab_core::classifier::*;
use sharelab_core::function::CandidateFunction;
use sharelab_core::numeric::{Scalar, DEFAULT_TOL};
use sharelab_core::verifier::{check_g_constant, check_implication_a, check_implication_b, h1_info, h2_pole_orders, verify, SharingProblem, VerifyOptions};

fn gauss(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let s = Scalar::ratio(rng.gen_range(-12..=12), rng.gen_range(1..=6)) + Scalar::ratio(rng.gen_range(-12..=12), rng.gen_range(1..=6)) * Scalar::i();
        if !s.is_zero() {
            return s;
        }
    }
}

#[test]
fn every_family_member_solves_the_problem() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (a, b) in [(Scalar::int(8), Scalar::int(-1)), (Scalar::int(-16), Scalar::int(2)), (Scalar::int(3), Scalar::ratio(1, 2))] {
        let prob = SharingProblem::new(a.clone(), b.clone()).unwrap();
        for fam in classify(&a, &b).unwrap() {
            for _ in 0..3 {
                let c = gauss(&mut rng);
                let f = fam.instantiate(&c).unwrap();
                if let CandidateFunction::ExpPoly(e) = &f {
                    assert!(e.is_exact());
                    assert!(check_implication_a(e, &prob, DEFAULT_TOL).unwrap().holds, "({}) C = {}", fam.kind.label(), c.pretty());
                    assert!(check_implication_b(e, &prob, DEFAULT_TOL).unwrap().holds, "({}) C = {}", fam.kind.label(), c.pretty());
                }
                let report = verify(&f, &prob, &VerifyOptions::default()).unwrap();
                assert!(report.holds(), "({}) C = {}", fam.kind.label(), c.pretty());
                let g = check_g_constant(&f, &prob, 50, DEFAULT_TOL, 7).unwrap();
                assert!(g.max_deviation <= 1e-20, "({}) C = {}: {}", fam.kind.label(), c.pretty(), g.max_deviation);
            }
        }
    }
}

#[test]
fn family_iv_constant_matches_k1() {
    // k = 1: c = 2b/(a - b)
    let (a, b) = (Scalar::int(8), Scalar::int(-1));
    let prob = SharingProblem::new(a.clone(), b.clone()).unwrap();
    let f = family(FamilyKind::IV, &a, &b).unwrap().instantiate(&Scalar::int(1)).unwrap();
    let g = check_g_constant(&f, &prob, 50, DEFAULT_TOL, 1).unwrap();
    assert!(g.estimate.approx_eq_rel(&Scalar::ratio(-2, 9), 1e-20), "{}", g.estimate.pretty());
    let CandidateFunction::ExpPoly(e) = f else { panic!("family (iv) is exponential") };
    let h1 = h1_info(&e, &prob).unwrap();
    assert_eq!(h1.degree, 1);
    assert_eq!(h2_pole_orders(&e, &prob, DEFAULT_TOL).unwrap(), vec![(Scalar::ratio(1, 4), 1)]);
}

#[test]
fn family_iv_exists_exactly_on_the_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let a = gauss(&mut rng);
        let on = -(a.clone() / Scalar::int(8));
        let kinds = |b: &Scalar| classify(&a, b).unwrap().into_iter().map(|f| f.kind).collect::<Vec<_>>();
        assert!(kinds(&on).contains(&FamilyKind::IV), "a = {}", a.pretty());
        let off = on.clone() + Scalar::ratio(1, 3);
        if !off.is_zero() && off != a {
            assert!(!kinds(&off).contains(&FamilyKind::IV), "a = {}", a.pretty());
            assert!(family(FamilyKind::IV, &a, &off).is_err());
        }
    }
}

#[test]
fn lambda_free_relation_on_the_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let a = gauss(&mut rng);
        let b = -(a.clone() / Scalar::int(8));
        let (d, j) = (Scalar::int(2), Scalar::int(1));
        let lhs = Scalar::int(2) * b.clone() / (a.clone() - b.clone());
        let den = d.clone() * d.clone() * b.clone() - j.clone() * j.clone() * a.clone();
        let rhs = d.clone() * d * j.clone() * j * a.clone() * b.clone() / (den.clone() * den);
        assert_eq!(lhs, rhs, "a = {}", a.pretty());
        assert_eq!(lhs, Scalar::ratio(-2, 9));
        assert!(ohne_lambda_holds(&a, &b, 2, 1, 1));
        let r = lambda_relations(&a, &b, 2, 1, 1).unwrap();
        assert!(r.consistent);
        assert_eq!(r.lambda, Scalar::ratio(1, 6));
    }
}

#[test]
fn degenerate_parameters_are_refused() {
    assert!(classify(&Scalar::int(0), &Scalar::int(1)).is_err());
    assert!(classify(&Scalar::int(2), &Scalar::int(2)).is_err());
    assert!(SharingProblem::new(Scalar::int(2), Scalar::int(0)).is_err());
}
