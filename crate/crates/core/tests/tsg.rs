use paradox_core::catalog::{covering_lp, f2_boundary, f2_boundary_cert, f2_self, f2_self_cert, z_self};
use paradox_core::{
    compose, find_equi, find_paradox, leq, lp_feasibility, paradox_to_tsg, properly_infinite, random, reverse,
    tsg_to_paradox, unperforation_probe, verify_equi, verify_leq, ClopenSet, EquidecompCert, Error, Model, Move,
    SearchOutcome, TsgElement, Word,
};
use proptest::prelude::*;
use rand::Rng;

fn w(m: &Model, s: &str) -> Word {
    m.spec().parse_word(s).unwrap()
}

fn cyl(m: &Model, s: &str) -> ClopenSet {
    ClopenSet::cylinder(m, &w(m, s)).unwrap()
}

/// Additive functional on boundary clopens of F_2 that only reads the last
/// letter of each cylinder: +1 for a, -1 for a^-1. It is invariant under
/// translation, so it separates equidecomposition classes.
fn last_letter_charge(set: &ClopenSet) -> i64 {
    set.cylinder_words()
        .iter()
        .map(|w| match w.syllables().last() {
            Some(&(0, k)) => k.signum(),
            _ => 0,
        })
        .sum()
}

fn single_moves(x: &TsgElement) -> EquidecompCert {
    let moves = x
        .levels()
        .iter()
        .enumerate()
        .map(|(i, s)| Move { piece: s.clone(), source: i + 1, translator: Word::identity(), target: i + 1 })
        .collect();
    EquidecompCert { moves }
}

/// Cuts `u` along the depth-2 cells and pushes each cell by a random short
/// word, keeping the images disjoint. Returns the certificate and its image.
fn random_push(u: &ClopenSet, rng: &mut random::SeededRng) -> (EquidecompCert, ClopenSet) {
    let m = u.model();
    let ball = m.spec().ball(1);
    let mut moves = Vec::new();
    let mut image = ClopenSet::empty(m);
    for cell in ClopenSet::depth_partition(m, 2) {
        let piece = u.intersect(&cell).unwrap();
        if piece.is_empty() {
            continue;
        }
        let mut t = ball[rng.gen_range(0..ball.len())].clone();
        if !piece.translate(&t).is_disjoint(&image).unwrap() {
            t = Word::identity();
        }
        let moved = piece.translate(&t);
        if !moved.is_disjoint(&image).unwrap() {
            // an earlier image already landed in this cell
            return (single_moves(&TsgElement::single(u)), u.clone());
        }
        image = image.union(&moved).unwrap();
        moves.push(Move { piece, source: 1, translator: t, target: 1 });
    }
    (EquidecompCert { moves }, image)
}

#[test]
fn addition_laws() {
    let m = f2_boundary();
    let a = TsgElement::single(&cyl(&m, "a"));
    let b = TsgElement::single(&cyl(&m, "b"));
    let c = TsgElement::single(&cyl(&m, "b^-1 a"));
    assert_eq!(a.add(&TsgElement::zero(&m)).unwrap(), a);
    assert_eq!(a.add(&b).unwrap().levels(), TsgElement::new(&m, vec![cyl(&m, "a"), cyl(&m, "b")]).unwrap().levels());
    assert_eq!(a.add(&a).unwrap().levels().len(), 2);
    assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
    assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
    assert_eq!(TsgElement::new(&m, vec![ClopenSet::empty(&m)]).unwrap(), TsgElement::zero(&m));
    assert_eq!(a.add(&TsgElement::zero(&f2_self())), Err(Error::ModelMismatch));
}

#[test]
fn equidecomposition_examples() {
    let m = f2_boundary();
    let x = TsgElement::new(&m, vec![cyl(&m, "a"), ClopenSet::full(&m)]).unwrap();
    assert!(verify_equi(&x, &x, &single_moves(&x)).unwrap().is_valid());

    let a = TsgElement::single(&cyl(&m, "a"));
    let rest = TsgElement::single(&cyl(&m, "a^-1").complement());
    let one =
        EquidecompCert { moves: vec![Move { piece: cyl(&m, "a"), source: 1, translator: w(&m, "a^-1"), target: 1 }] };
    assert!(verify_equi(&a, &rest, &one).unwrap().is_valid());
    assert_eq!(find_equi(&a, &rest, 1, 1).unwrap().found(), Some(one));

    let full = TsgElement::single(&ClopenSet::full(&m));
    assert_eq!(find_equi(&full, &full, 1, 1).unwrap().found(), Some(single_moves(&full)));

    let bad = EquidecompCert {
        moves: vec![Move { piece: cyl(&m, "a"), source: 2, translator: Word::identity(), target: 1 }],
    };
    assert!(matches!(verify_equi(&a, &a, &bad), Err(Error::Malformed(_))));
}

#[test]
fn a_cylinder_is_not_equidecomposable_with_the_whole_boundary() {
    let m = f2_boundary();
    let a = TsgElement::single(&cyl(&m, "a"));
    let full = TsgElement::single(&ClopenSet::full(&m));
    assert_eq!(last_letter_charge(&cyl(&m, "a")), 1);
    assert_eq!(last_letter_charge(&ClopenSet::full(&m)), 0);
    for (r, p) in [(1, 2), (2, 4), (3, 6)] {
        assert_eq!(find_equi(&a, &full, r, p).unwrap(), SearchOutcome::NotFoundWithinBounds, "r={r} p={p}");
    }
    // the one-sided comparison is immediate
    assert!(leq(&a, &full, 1, 1).unwrap().is_found());
}

#[test]
fn charge_is_preserved_by_found_certificates() {
    let m = f2_boundary();
    let mut rng = random::rng(21);
    let mut found = 0;
    for _ in 0..40 {
        let u = random::clopen(&m, &mut rng, 2);
        let v = random::clopen(&m, &mut rng, 2);
        if u.is_empty() || v.is_empty() {
            continue;
        }
        let (x, y) = (TsgElement::single(&u), TsgElement::single(&v));
        if let Some(c) = find_equi(&x, &y, 2, 4).unwrap().found() {
            assert!(verify_equi(&x, &y, &c).unwrap().is_valid());
            assert_eq!(last_letter_charge(&u), last_letter_charge(&v));
            assert!(verify_equi(&y, &x, &reverse(&m, &c)).unwrap().is_valid());
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn preorder_examples() {
    let m = f2_boundary();
    let full = TsgElement::single(&ClopenSet::full(&m));
    assert_eq!(leq(&TsgElement::zero(&m), &full, 1, 1).unwrap().found(), Some(EquidecompCert::default()));
    let ab = TsgElement::new(&m, vec![cyl(&m, "a"), cyl(&m, "b")]).unwrap();
    let c = leq(&ab, &full, 1, 2).unwrap().found().unwrap();
    assert!(c.moves.iter().all(|mv| mv.translator.is_identity()));

    let x = ClopenSet::full(&m);
    let spec_cert = EquidecompCert {
        moves: vec![
            Move { piece: cyl(&m, "a^-1"), source: 1, translator: Word::identity(), target: 1 },
            Move { piece: cyl(&m, "a^-1").complement(), source: 1, translator: w(&m, "a"), target: 1 },
            Move { piece: cyl(&m, "b^-1").complement(), source: 2, translator: w(&m, "b"), target: 1 },
            Move { piece: cyl(&m, "b^-1"), source: 2, translator: w(&m, "b^-1"), target: 1 },
        ],
    };
    assert!(verify_leq(&full.times(2), &full, &spec_cert).unwrap().is_valid());
    let strict = verify_equi(&full.times(2), &full, &spec_cert).unwrap();
    assert_eq!(strict.reason(), Some("target does not cover level 1"));
    assert!(properly_infinite(&x, 1, 4).unwrap().is_found());
}

#[test]
fn proper_infiniteness_examples() {
    let m = f2_boundary();
    let a = cyl(&m, "a");
    let c = properly_infinite(&a, 3, 8).unwrap().found().unwrap();
    let one = TsgElement::single(&a);
    assert!(verify_leq(&one.times(2), &one, &c).unwrap().is_valid());

    let z = z_self();
    for r in 1..=3 {
        assert_eq!(properly_infinite(&ClopenSet::full(&z), r, 8).unwrap(), SearchOutcome::NotFoundWithinBounds);
        assert!(lp_feasibility(&covering_lp(&ClopenSet::full(&z), r).unwrap()).unwrap().is_feasible());
    }
    assert_eq!(properly_infinite(&ClopenSet::empty(&z), 1, 1), Err(Error::EmptySet));
    assert!(matches!(leq(&one, &one, 0, 1), Err(Error::InvalidBounds(_))));
}

#[test]
fn converters_on_the_bundled_certificates() {
    let m = f2_boundary();
    let full = TsgElement::single(&ClopenSet::full(&m));
    let (x, y, c) = paradox_to_tsg(&f2_boundary_cert()).unwrap();
    assert_eq!((x.clone(), y.clone()), (full.times(2), full.clone()));
    assert_eq!(tsg_to_paradox(&x, &y, &c).unwrap(), f2_boundary_cert());

    for pc in [f2_boundary_cert(), f2_self_cert()] {
        let (x, y, c) = paradox_to_tsg(&pc).unwrap();
        assert!(verify_leq(&x, &y, &c).unwrap().is_valid());
        let back = tsg_to_paradox(&x, &y, &c).unwrap();
        assert!(back.verify().unwrap().is_valid());
        assert_eq!(back.translators(), pc.translators());
    }

    let two = TsgElement::new(&m, vec![cyl(&m, "a"), cyl(&m, "b")]).unwrap();
    assert!(matches!(tsg_to_paradox(&two, &two, &single_moves(&two)), Err(Error::Malformed(_))));
    let broken = EquidecompCert { moves: c.moves[..1].to_vec() };
    assert!(matches!(tsg_to_paradox(&x, &y, &broken), Err(Error::Unverified(_))));
    let mut bad = f2_boundary_cert();
    bad.split = 1;
    assert!(matches!(paradox_to_tsg(&bad), Err(Error::Unverified(_))));
}

#[test]
fn extra_remainder_is_dropped() {
    let m = f2_boundary();
    let a = cyl(&m, "a");
    let full = ClopenSet::full(&m);
    let x = TsgElement::new(&m, vec![full.clone(), full.clone(), a.clone()]).unwrap();
    let y = TsgElement::single(&full);
    if let Some(c) = leq(&x, &y, 2, 6).unwrap().found() {
        let pc = tsg_to_paradox(&x, &y, &c).unwrap();
        assert!(pc.verify().unwrap().is_valid());
    }
}

#[test]
fn propinf_and_paradox_agree() {
    let mut rng = random::rng(13);
    let mut found = 0;
    for _ in 0..60 {
        let (u, r, p) = random::window_case(&mut rng);
        let a = properly_infinite(&u, r, p).unwrap().found();
        let b = find_paradox(&u, r, p).unwrap().found();
        assert_eq!(a.is_some(), b.is_some(), "{} r={r} p={p}", u.describe());
        if let (Some(a), Some(b)) = (a, b) {
            let one = TsgElement::single(&u);
            let pc = tsg_to_paradox(&one.times(2), &one, &a).unwrap();
            assert!(pc.pieces.len() <= p);
            let (x, y, c) = paradox_to_tsg(&b).unwrap();
            assert!(c.moves.len() <= p);
            assert!(verify_leq(&x, &y, &c).unwrap().is_valid());
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn infeasible_windows_on_the_curated_suite_are_properly_infinite() {
    let b = f2_boundary();
    let g = f2_self();
    let suite =
        [(ClopenSet::full(&b), 1, 4), (cyl(&b, "a"), 3, 8), (cyl(&b, "b^-1"), 3, 8), (ClopenSet::full(&g), 1, 4)];
    for (u, r, p) in suite {
        if !lp_feasibility(&covering_lp(&u, r).unwrap()).unwrap().is_feasible() {
            assert!(properly_infinite(&u, r, p).unwrap().is_found(), "{}", u.describe());
        }
    }
}

#[test]
fn unperforation_examples() {
    let m = f2_boundary();
    let full = TsgElement::single(&ClopenSet::full(&m));
    let rep = unperforation_probe(&full, &full, 3, 2, 1, 5).unwrap();
    assert!(rep.premise.is_some());
    assert!(rep.conclusion.is_some());
    assert!(!rep.violation);

    let rep = unperforation_probe(&TsgElement::zero(&m), &full, 2, 1, 1, 1).unwrap();
    assert!(!rep.violation);

    let z = z_self();
    let cone = TsgElement::single(&ClopenSet::cone(&z, &w(&z, "a")).unwrap());
    let rep = unperforation_probe(&cone, &cone, 2, 1, 2, 6).unwrap();
    assert!(rep.premise.is_none());
    assert!(!rep.violation);

    assert!(matches!(unperforation_probe(&full, &full, 2, 2, 1, 1), Err(Error::InvalidBounds(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reverse_and_compose_on_random_triples(seed in any::<u64>(), mi in 0usize..3) {
        let m = [f2_boundary(), f2_self(), z_self()][mi].clone();
        let mut rng = random::rng(seed);
        let u = random::clopen(&m, &mut rng, 2);
        prop_assume!(!u.is_empty());
        let (c1, v) = random_push(&u, &mut rng);
        let (c2, w2) = random_push(&v, &mut rng);
        let (x, y, z) = (TsgElement::single(&u), TsgElement::single(&v), TsgElement::single(&w2));
        prop_assert!(verify_equi(&x, &y, &c1).unwrap().is_valid());
        prop_assert!(verify_equi(&y, &z, &c2).unwrap().is_valid());
        prop_assert!(verify_equi(&y, &x, &reverse(&m, &c1)).unwrap().is_valid());
        let c = compose(&m, &c1, &c2).unwrap();
        prop_assert!(verify_equi(&x, &z, &c).unwrap().is_valid());
        prop_assert!(verify_equi(&z, &x, &reverse(&m, &c)).unwrap().is_valid());
    }
}
