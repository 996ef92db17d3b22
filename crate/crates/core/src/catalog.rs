//! Standard groups, actions and instances used by the demos and tests.

use crate::clopen::{ActionModel, ClopenSet, Model};
use crate::error::Result;
use crate::group::{GroupSpec, Word};
use crate::measure::LpInstance;
use crate::paradox::{ParadoxCert, Piece};

pub fn free2() -> GroupSpec {
    GroupSpec::free(&["a", "b"]).expect("valid spec")
}

pub fn integers() -> GroupSpec {
    GroupSpec::free(&["a"]).expect("valid spec")
}

/// `Z_2 * Z_3` with generators `s` (order 2) and `t` (order 3).
pub fn modular() -> GroupSpec {
    GroupSpec::free_product(&[("s", 2), ("t", 3)]).expect("valid spec")
}

/// `Z_n` generated by `s`.
pub fn cyclic(n: u64) -> GroupSpec {
    GroupSpec::free_product(&[("s", n)]).expect("valid spec")
}

pub fn f2_boundary() -> Model {
    ActionModel::boundary(free2()).expect("free group has a Cantor boundary")
}

pub fn f2_self() -> Model {
    ActionModel::self_action(free2())
}

pub fn z_self() -> Model {
    ActionModel::self_action(integers())
}

fn word(model: &Model, s: &str) -> Word {
    model.spec().parse_word(s).expect("valid word")
}

/// `([a⁻¹], e), (X∖[a⁻¹], a) | (X∖[b⁻¹], b), ([b⁻¹], b⁻¹)` on the boundary of `F_2`.
pub fn f2_boundary_cert() -> ParadoxCert {
    let m = f2_boundary();
    let ai = ClopenSet::cylinder(&m, &word(&m, "a^-1")).expect("boundary model");
    let bi = ClopenSet::cylinder(&m, &word(&m, "b^-1")).expect("boundary model");
    ParadoxCert {
        domain: ClopenSet::full(&m),
        pieces: vec![
            Piece { set: ai.clone(), translator: Word::identity() },
            Piece { set: ai.complement(), translator: word(&m, "a") },
            Piece { set: bi.complement(), translator: word(&m, "b") },
            Piece { set: bi, translator: word(&m, "b^-1") },
        ],
        split: 2,
    }
}

/// The doubling of `F_2` itself: `(C(a⁻¹), e), (G∖C(a⁻¹), a) | (C(b⁻¹), e), (G∖C(b⁻¹), b)`.
/// The images are the four depth-one cones.
pub fn f2_self_cert() -> ParadoxCert {
    let m = f2_self();
    let ai = ClopenSet::cone(&m, &word(&m, "a^-1")).expect("self model");
    let bi = ClopenSet::cone(&m, &word(&m, "b^-1")).expect("self model");
    ParadoxCert {
        domain: ClopenSet::full(&m),
        pieces: vec![
            Piece { set: ai.clone(), translator: Word::identity() },
            Piece { set: ai.complement(), translator: word(&m, "a") },
            Piece { set: bi.clone(), translator: Word::identity() },
            Piece { set: bi.complement(), translator: word(&m, "b") },
        ],
        split: 2,
    }
}

/// Family of the depth-`r` cells, translators `ball(r)`, normalised on the whole space.
pub fn window_lp(model: &Model, r: u64) -> Result<LpInstance> {
    LpInstance::new(ClopenSet::depth_partition(model, r as usize), model.spec().ball(r), ClopenSet::full(model))
}

/// The depth-one window on `F_2`: the four first-letter sets (and `{e}` in
/// the self action), invariance under the four generators.
pub fn f2_depth1_lp(model: &Model) -> Result<LpInstance> {
    let gens: Vec<Word> = ["a", "a^-1", "b", "b^-1"].iter().map(|s| word(model, s)).collect();
    let mut family = Vec::new();
    for g in &gens {
        family.push(if model.is_boundary() { ClopenSet::cylinder(model, g)? } else { ClopenSet::cone(model, g)? });
    }
    if !model.is_boundary() {
        family.push(ClopenSet::points(model, &[Word::identity()])?);
    }
    LpInstance::new(family, gens, ClopenSet::full(model))
}

/// The window in which a certificate found by `find_paradox(u, r, _)` lives:
/// family `u ∩` depth-`r` cells, translators `ball(r)`, normalised at `u`.
pub fn covering_lp(u: &ClopenSet, r: u64) -> Result<LpInstance> {
    let mut family = Vec::new();
    for cell in ClopenSet::depth_partition(u.model(), r as usize) {
        let a = u.intersect(&cell)?;
        if !a.is_empty() {
            family.push(a);
        }
    }
    LpInstance::new(family, u.model().spec().ball(r), u.clone())
}
