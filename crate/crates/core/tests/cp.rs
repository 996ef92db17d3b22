use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use paradox_core::catalog::{cyclic, f2_boundary, f2_boundary_cert, f2_self_cert, free2, modular, window_lp, z_self};
use paradox_core::{
    build_witness, check_expectation_identities, expectation_sides, extract_paradox, find_paradox,
    freeness_projections, random, trace, trace_check, verify_witness, ClopenSet, CpElement, Error, LpOutcome,
    MeasureTable, Model, ParadoxCert, SimpleFunction, Word,
};
use proptest::prelude::*;

fn w(m: &Model, s: &str) -> Word {
    m.spec().parse_word(s).unwrap()
}

fn cyl(m: &Model, s: &str) -> ClopenSet {
    ClopenSet::cylinder(m, &w(m, s)).unwrap()
}

fn ind(set: &ClopenSet) -> SimpleFunction {
    SimpleFunction::indicator(set)
}

fn model(i: usize) -> Model {
    random::corpus_models()[i].clone()
}

fn z_measure(r: u64) -> MeasureTable {
    match paradox_core::lp_feasibility(&window_lp(&z_self(), r).unwrap()).unwrap() {
        LpOutcome::Feasible(mt) => mt,
        LpOutcome::Infeasible(_) => panic!("integers admit a mean"),
    }
}

fn roundtrip(cert: &ParadoxCert) {
    let (x, y) = build_witness(cert).unwrap();
    assert!(verify_witness(&x, &y, &cert.domain).unwrap().is_valid());
    let back = extract_paradox(&x, &y, &cert.domain).unwrap();
    assert!(back.verify().unwrap().is_valid());
    assert_eq!(back.translators(), cert.translators());
    for (a, b) in [(back.first_cover(), cert.first_cover()), (back.second_cover(), cert.second_cover())] {
        let ua = ClopenSet::union_all(&cert.domain.model().clone(), a.iter().map(|p| &p.set)).unwrap();
        let ub = ClopenSet::union_all(&cert.domain.model().clone(), b.iter().map(|p| &p.set)).unwrap();
        assert_eq!(ua, ub);
    }
}

#[test]
fn multiplication_examples() {
    let m = f2_boundary();
    let p = CpElement::unitary(&m, &w(&m, "a")).mul(&CpElement::unitary(&m, &w(&m, "a^-1"))).unwrap();
    assert_eq!(p, CpElement::unitary(&m, &Word::identity()));

    let lhs = CpElement::term(ind(&cyl(&m, "a")), &w(&m, "a"));
    let rhs = CpElement::function(ind(&cyl(&m, "a^-1")));
    assert!(lhs.mul(&rhs).unwrap().is_zero());

    let x = CpElement::term(ind(&cyl(&m, "b")), &w(&m, "a"));
    assert_eq!(x.adjoint().mul(&x).unwrap(), CpElement::function(ind(&cyl(&m, "a^-1 b"))));
}

#[test]
fn expectation_examples() {
    let m = f2_boundary();
    let x = CpElement::function(ind(&cyl(&m, "a"))).add(&CpElement::term(ind(&cyl(&m, "b")), &w(&m, "a"))).unwrap();
    assert_eq!(x.cond_expectation(), ind(&cyl(&m, "a")));
    assert!(CpElement::unitary(&m, &w(&m, "a")).cond_expectation().is_zero());
    let y = CpElement::term(ind(&cyl(&m, "a")), &w(&m, "a"));
    // a^-1 . [a] is everything but [a^-1]
    assert_eq!(y.adjoint().mul(&y).unwrap().cond_expectation(), ind(&cyl(&m, "a^-1").complement()));
}

#[test]
fn expectation_identity_examples() {
    let m = f2_boundary();
    let v = ind(&cyl(&m, "b a"));
    let x = CpElement::term(v.clone(), &w(&m, "a"));
    let sides = expectation_sides(&x).unwrap();
    assert_eq!(sides.e_xxs, v);
    assert_eq!(sides.e_xsx, v.translate(&w(&m, "a^-1")));
    let sum = CpElement::unitary(&m, &w(&m, "a")).add(&CpElement::unitary(&m, &w(&m, "b"))).unwrap();
    assert!(check_expectation_identities(&sum).unwrap());
    let two = BigRational::from_integer(BigInt::from(2));
    assert_eq!(expectation_sides(&sum).unwrap().e_xxs, SimpleFunction::constant(&m, two));
}

#[test]
fn expectation_identities_on_random_elements() {
    for (i, m) in random::corpus_models().iter().enumerate() {
        let mut rng = random::rng(100 + i as u64);
        for _ in 0..200 {
            let x = random::element(m, &mut rng, 4, 2);
            assert!(check_expectation_identities(&x).unwrap());
        }
    }
}

#[test]
fn boundary_witness_has_the_expected_terms() {
    let m = f2_boundary();
    let (x, y) = build_witness(&f2_boundary_cert()).unwrap();
    assert_eq!(x.coefficient(&Word::identity()), ind(&cyl(&m, "a^-1")));
    assert_eq!(x.coefficient(&w(&m, "a")), ind(&cyl(&m, "a")));
    assert_eq!(x.terms().count(), 2);
    assert_eq!(y.coefficient(&w(&m, "b")), ind(&cyl(&m, "b")));
    assert_eq!(y.coefficient(&w(&m, "b^-1")), ind(&cyl(&m, "b^-2")));
    assert_eq!(y.terms().count(), 2);
}

#[test]
fn witness_roundtrips() {
    roundtrip(&f2_boundary_cert());
    roundtrip(&f2_self_cert());
    let mut rng = random::rng(29);
    let mut found = 0;
    for _ in 0..80 {
        let (u, r, p) = random::window_case(&mut rng);
        if let Some(cert) = find_paradox(&u, r, p).unwrap().found() {
            roundtrip(&cert);
            found += 1;
        }
    }
    assert!(found > 5);
}

#[test]
fn witness_rejections() {
    let m = f2_boundary();
    let full = ClopenSet::full(&m);
    let e = CpElement::function(ind(&full));
    assert!(!verify_witness(&e, &e, &full).unwrap().is_valid());
    assert!(matches!(extract_paradox(&e, &e, &full), Err(Error::Unverified(_))));

    let (x, y) = build_witness(&f2_boundary_cert()).unwrap();
    // perturb one translator of x
    let moved: Vec<(Word, SimpleFunction)> =
        x.terms().map(|(t, a)| (if t.is_identity() { w(&m, "b") } else { t.clone() }, a.clone())).collect();
    let bad = CpElement::from_terms(&m, moved).unwrap();
    assert_eq!(verify_witness(&bad, &y, &full).unwrap().reason(), Some("x*x != 1_U"));

    let overlap = x.add(&CpElement::term(ind(&cyl(&m, "b")), &w(&m, "b"))).unwrap();
    assert!(!verify_witness(&overlap, &y, &full).unwrap().is_valid());
    assert!(extract_paradox(&overlap, &y, &full).is_err());

    assert_eq!(verify_witness(&x, &x, &full).unwrap().reason(), Some("y*x != 0"));

    let mut unverified = f2_boundary_cert();
    unverified.split = 1;
    assert!(matches!(build_witness(&unverified), Err(Error::Unverified(_))));
    assert!(matches!(verify_witness(&x, &y, &ClopenSet::full(&z_self())), Err(Error::ModelMismatch)));
}

#[test]
fn trace_on_integer_windows() {
    let z = z_self();
    let mt = z_measure(3);
    let u1 = CpElement::unitary(&z, &w(&z, "a"));
    assert_eq!(trace(&mt, &u1.adjoint().mul(&u1).unwrap()).unwrap(), BigRational::one());
    assert_eq!(trace(&mt, &u1.mul(&u1.adjoint()).unwrap()).unwrap(), BigRational::one());
    let c = CpElement::term(ind(&ClopenSet::cone(&z, &w(&z, "a")).unwrap()), &w(&z, "a^-1"));
    assert!(trace_check(&mt, &[c]).unwrap().is_valid());

    let mut rng = random::rng(41);
    let samples: Vec<CpElement> = (0..50).map(|_| random::element(&z, &mut rng, 3, 1)).collect();
    assert!(trace_check(&mt, &samples).unwrap().is_valid());

    let small = z_measure(1);
    let far = CpElement::term(ind(&ClopenSet::points(&z, &[w(&z, "a^3")]).unwrap()), &Word::identity());
    assert!(matches!(trace_check(&small, &[far]), Err(Error::WindowTooSmall(_))));
}

#[test]
fn freeness_in_three_groups() {
    let z3 = cyclic(3);
    let s = z3.parse_word("s").unwrap();
    let rep = freeness_projections(&z3, &z3.three_partition(&s, 2).unwrap()).unwrap();
    assert!(rep.verdict.is_valid());
    assert!(!rep.restricted);
    assert!(rep.projections.iter().all(|f| !f.is_zero()));

    let f2 = free2();
    for t in ["a", "a b"] {
        let tw = f2.parse_word(t).unwrap();
        let rep = freeness_projections(&f2, &f2.two_partition(&tw, 3).unwrap()).unwrap();
        assert!(rep.verdict.is_valid(), "{t}");
        assert!(rep.restricted);
        assert_eq!(rep.projections.iter().filter(|f| !f.is_zero()).count(), 2);
    }

    let md = modular();
    let t = md.parse_word("t").unwrap();
    let rep = freeness_projections(&md, &md.three_partition(&t, 3).unwrap()).unwrap();
    assert!(rep.verdict.is_valid());
    assert!(rep.projections.iter().all(|f| !f.is_zero()));

    let a = f2.parse_word("a").unwrap();
    let mut broken = f2.two_partition(&a, 2).unwrap();
    let (e_col, a_col) = {
        let col = |x: &Word| broken.classes.iter().find(|(v, _)| v == x).unwrap().1;
        (col(&Word::identity()), col(&a))
    };
    assert_ne!(e_col, a_col);
    for entry in broken.classes.iter_mut() {
        if entry.0 == a {
            entry.1 = e_col;
        }
    }
    assert!(matches!(freeness_projections(&f2, &broken), Err(Error::Unverified(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), mi in 0usize..5) {
        let m = model(mi);
        let mut rng = random::rng(seed);
        let x = random::element(&m, &mut rng, 3, 2);
        let y = random::element(&m, &mut rng, 3, 2);
        let z = random::element(&m, &mut rng, 3, 2);
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y.add(&z).unwrap()).unwrap(), x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.adjoint().adjoint(), x.clone());
        prop_assert_eq!(x.mul(&y).unwrap().adjoint(), y.adjoint().mul(&x.adjoint()).unwrap());
        prop_assert!(x.sub(&x).unwrap().is_zero());
    }

    #[test]
    fn expectation_is_a_bimodule_map(seed in any::<u64>(), mi in 0usize..5) {
        let m = model(mi);
        let mut rng = random::rng(seed);
        let x = random::element(&m, &mut rng, 3, 2);
        let f = random::simple_function(&m, &mut rng, 2);
        let g = random::simple_function(&m, &mut rng, 2);
        let fx_g = CpElement::function(f.clone()).mul(&x).unwrap().mul(&CpElement::function(g.clone())).unwrap();
        prop_assert_eq!(fx_g.cond_expectation(), f.mul(&x.cond_expectation()).unwrap().mul(&g).unwrap());
    }
}
