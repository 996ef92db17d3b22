//! Seeded generators for words, clopen sets and crossed-product elements.
//! The same seed always yields the same objects.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clopen::{ClopenSet, Model};
use crate::cp::{CpElement, SimpleFunction};
use crate::group::{GroupSpec, Word};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform element of `ball(r)`.
pub fn word(spec: &GroupSpec, rng: &mut SeededRng, r: u64) -> Word {
    spec.ball(r).choose(rng).cloned().unwrap_or_default()
}

/// A random union of cells of the depth-`d` partition, `d ≤ depth`.
pub fn clopen(model: &Model, rng: &mut SeededRng, depth: usize) -> ClopenSet {
    let d = rng.gen_range(0..=depth);
    let cells = ClopenSet::depth_partition(model, d);
    let chosen = cells.iter().filter(|_| rng.gen_bool(0.5));
    ClopenSet::union_all(model, chosen).expect("one model")
}

/// Nonzero rational `p/q` with `|p| ≤ 3`, `1 ≤ q ≤ 3`.
pub fn rational(rng: &mut SeededRng) -> BigRational {
    let mut p = 0i64;
    while p == 0 {
        p = rng.gen_range(-3..=3);
    }
    BigRational::new(p.into(), rng.gen_range(1i64..=3).into())
}

pub fn simple_function(model: &Model, rng: &mut SeededRng, depth: usize) -> SimpleFunction {
    let n = rng.gen_range(1..=3);
    let pieces = (0..n).map(|_| (clopen(model, rng, depth), rational(rng))).collect();
    SimpleFunction::from_pieces(model, pieces).expect("one model")
}

/// At most `support` terms with translators from `ball(depth)` and
/// coefficients over depth-`≤ depth` cells.
pub fn element(model: &Model, rng: &mut SeededRng, support: usize, depth: usize) -> CpElement {
    let n = rng.gen_range(1..=support.max(1));
    let ball = model.spec().ball(depth as u64);
    let terms = (0..n)
        .map(|_| {
            let t = ball.choose(rng).cloned().unwrap_or_default();
            (t, simple_function(model, rng, depth))
        })
        .collect();
    CpElement::from_terms(model, terms).expect("one model")
}

/// The action models the randomized corpus draws from.
pub fn corpus_models() -> Vec<Model> {
    use crate::catalog;
    vec![
        catalog::f2_boundary(),
        catalog::f2_self(),
        catalog::z_self(),
        crate::clopen::ActionModel::boundary(catalog::modular()).expect("Cantor boundary"),
        crate::clopen::ActionModel::self_action(catalog::modular()),
    ]
}

/// A search problem `(U, r, p)` with `U` a nonempty union of cells of depth `≤ 2`.
pub fn window_case(rng: &mut SeededRng) -> (ClopenSet, u64, usize) {
    let models = corpus_models();
    let model = &models[rng.gen_range(0..models.len())];
    let mut u = clopen(model, rng, 2);
    while u.is_empty() {
        u = clopen(model, rng, 2);
    }
    (u, rng.gen_range(1..=2), rng.gen_range(2..=6))
}
