use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use paradox_core::catalog::{covering_lp, f2_boundary, f2_depth1_lp, f2_self, modular, window_lp, z_self};
use paradox_core::{
    check_farkas, check_measure, lp_feasibility, random, ActionModel, ClopenSet, Error, FarkasCert, LpInstance,
    LpOutcome,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// invariance recomputed from the family rather than from the constraint rows
fn invariant_on_family(inst: &LpInstance, out: &LpOutcome) -> bool {
    let LpOutcome::Feasible(mt) = out else { return false };
    if mt.values.iter().any(|v| v < &BigRational::zero()) {
        return false;
    }
    if mt.measure_of(inst.normalize()).unwrap() != *inst.target() {
        return false;
    }
    inst.family().iter().all(|f| {
        let base = mt.measure_of(f).unwrap();
        inst.translators().iter().all(|k| mt.measure_of(&f.translate(k)).unwrap() == base)
    })
}

#[test]
fn integers_are_amenable_in_every_window() {
    let z = z_self();
    for r in 1..=5 {
        let inst = window_lp(&z, r).unwrap();
        let out = lp_feasibility(&inst).unwrap();
        assert!(invariant_on_family(&inst, &out), "r = {r}");
    }
}

#[test]
fn free_group_depth_one_windows_are_infeasible() {
    for m in [f2_self(), f2_boundary()] {
        let inst = f2_depth1_lp(&m).unwrap();
        let LpOutcome::Infeasible(fc) = lp_feasibility(&inst).unwrap() else { panic!("expected infeasible") };
        assert!(check_farkas(&fc, &inst).unwrap().is_valid());
        assert_eq!(fc.multipliers.len(), inst.constraints().len());
    }
}

#[test]
fn modular_group_window_is_infeasible() {
    let m = ActionModel::self_action(modular());
    assert!(!lp_feasibility(&window_lp(&m, 2).unwrap()).unwrap().is_feasible());
}

#[test]
fn feasibility_shrinks_as_windows_grow() {
    let mut rng = random::rng(3);
    let mut checked = 0;
    for _ in 0..60 {
        let (u, _, _) = random::window_case(&mut rng);
        let small = lp_feasibility(&covering_lp(&u, 1).unwrap()).unwrap().is_feasible();
        let large = lp_feasibility(&covering_lp(&u, 2).unwrap()).unwrap().is_feasible();
        assert!(small || !large, "{}", u.describe());
        checked += 1;
    }
    assert_eq!(checked, 60);
}

#[test]
fn scaling_the_normalisation_keeps_the_status() {
    let mut rng = random::rng(5);
    for _ in 0..30 {
        let (u, r, _) = random::window_case(&mut rng);
        let one = covering_lp(&u, r).unwrap();
        let two =
            LpInstance::build(one.family().to_vec(), one.translators().to_vec(), u.clone(), q(2, 1), 4096).unwrap();
        let a = lp_feasibility(&one).unwrap();
        let b = lp_feasibility(&two).unwrap();
        assert_eq!(a.is_feasible(), b.is_feasible());
        if b.is_feasible() {
            assert!(invariant_on_family(&two, &b));
        }
    }
}

#[test]
fn checkers_reject_tampering() {
    let z = z_self();
    let inst = window_lp(&z, 2).unwrap();
    let LpOutcome::Feasible(mt) = lp_feasibility(&inst).unwrap() else { panic!() };
    let mut neg = mt.clone();
    neg.values[0] = q(-1, 3);
    assert_eq!(check_measure(&neg, &inst).unwrap().reason(), Some("negativity at atom 1"));
    let mut off = mt.clone();
    off.values[0] += q(1, 7);
    assert!(check_measure(&off, &inst).unwrap().reason().unwrap().starts_with("violated: "));
    let mut short = mt;
    short.values.pop();
    assert!(matches!(check_measure(&short, &inst), Err(Error::DimensionMismatch(_))));

    let m = f2_self();
    let inst = f2_depth1_lp(&m).unwrap();
    let LpOutcome::Infeasible(fc) = lp_feasibility(&inst).unwrap() else { panic!() };
    let halved = FarkasCert { multipliers: fc.multipliers.iter().map(|y| y * q(1, 2)).collect() };
    assert!(!check_farkas(&halved, &inst).unwrap().is_valid());
    let zero = FarkasCert { multipliers: vec![BigRational::zero(); fc.multipliers.len() + 1] };
    assert!(matches!(check_farkas(&zero, &inst), Err(Error::DimensionMismatch(_))));
}

#[test]
fn atom_cap_is_enforced() {
    let m = f2_boundary();
    let one = window_lp(&m, 2).unwrap();
    let err = LpInstance::build(
        one.family().to_vec(),
        one.translators().to_vec(),
        ClopenSet::full(&m),
        BigRational::one(),
        8,
    );
    assert!(matches!(err, Err(Error::AtomCap { cap: 8, .. })));
}
