//! Symbolic crossed-product algebra: finite sums `Σ a_t u_t` whose
//! coefficients are rational simple functions on clopen sets, with the
//! covariance rule `u_s a u_s* = s.a`.
//!
//! Coefficients sit on the left: `(a u_s)(b u_t) = a (s.b) u_{st}` and
//! `(a u_t)* = (t⁻¹.a) u_{t⁻¹}`. Scalars are real, so `a* = a`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::clopen::{refine_cover_to_partition, ActionModel, ClopenSet, Model, Refinement};
use crate::error::{Error, Result, Verdict};
use crate::group::{GroupSpec, PartitionCert, Word};
use crate::measure::MeasureTable;
use crate::paradox::{ParadoxCert, Piece};

/// A finitely-valued function, stored as value → level set. Values are
/// nonzero and level sets nonempty, so equal functions are equal values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleFunction {
    model: Model,
    levels: BTreeMap<BigRational, ClopenSet>,
}

impl SimpleFunction {
    pub fn zero(model: &Model) -> Self {
        SimpleFunction { model: model.clone(), levels: BTreeMap::new() }
    }

    pub fn indicator(set: &ClopenSet) -> Self {
        SimpleFunction::from_pieces(set.model(), vec![(set.clone(), BigRational::one())]).expect("one model")
    }

    pub fn constant(model: &Model, c: BigRational) -> Self {
        SimpleFunction::from_pieces(model, vec![(ClopenSet::full(model), c)]).expect("one model")
    }

    /// Pointwise sum of `value · 1_set` over the pieces.
    pub fn from_pieces(model: &Model, pieces: Vec<(ClopenSet, BigRational)>) -> Result<Self> {
        if pieces.iter().any(|(s, _)| s.model() != model) {
            return Err(Error::ModelMismatch);
        }
        let sets: Vec<&ClopenSet> = pieces.iter().map(|(s, _)| s).collect();
        let rf = Refinement::new(model, &sets)?;
        let mut by_value: BTreeMap<BigRational, fixedbitset::FixedBitSet> = BTreeMap::new();
        for j in 0..rf.len() {
            let v: BigRational =
                pieces.iter().enumerate().filter(|(i, _)| rf.mask(*i).contains(j)).map(|(_, (_, v))| v.clone()).sum();
            if !v.is_zero() {
                by_value.entry(v).or_insert_with(|| fixedbitset::FixedBitSet::with_capacity(rf.len())).insert(j);
            }
        }
        let levels = by_value.into_iter().map(|(v, m)| (v, rf.union_of(&m))).collect();
        Ok(SimpleFunction { model: model.clone(), levels })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// `(set, value)` pairs with pairwise disjoint sets.
    pub fn pieces(&self) -> impl Iterator<Item = (&ClopenSet, &BigRational)> {
        self.levels.iter().map(|(v, s)| (s, v))
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.levels.keys().all(|v| !v.is_negative())
    }

    pub fn support(&self) -> ClopenSet {
        ClopenSet::union_all(&self.model, self.levels.values()).expect("one model")
    }

    fn owned_pieces(&self) -> Vec<(ClopenSet, BigRational)> {
        self.levels.iter().map(|(v, s)| (s.clone(), v.clone())).collect()
    }

    pub fn add(&self, other: &SimpleFunction) -> Result<SimpleFunction> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let mut pieces = self.owned_pieces();
        pieces.extend(other.owned_pieces());
        SimpleFunction::from_pieces(&self.model, pieces)
    }

    pub fn scale(&self, c: &BigRational) -> SimpleFunction {
        let pieces = self.owned_pieces().into_iter().map(|(s, v)| (s, v * c)).collect();
        SimpleFunction::from_pieces(&self.model, pieces).expect("one model")
    }

    pub fn sub(&self, other: &SimpleFunction) -> Result<SimpleFunction> {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SimpleFunction) -> Result<SimpleFunction> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let mut pieces = Vec::new();
        for (va, sa) in &self.levels {
            for (vb, sb) in &other.levels {
                let s = sa.intersect(sb)?;
                if !s.is_empty() {
                    pieces.push((s, va * vb));
                }
            }
        }
        SimpleFunction::from_pieces(&self.model, pieces)
    }

    /// `(g.f)(x) = f(g⁻¹x)`, i.e. level sets move to `g·set`.
    pub fn translate(&self, g: &Word) -> SimpleFunction {
        let levels = self.levels.iter().map(|(v, s)| (v.clone(), s.translate(g))).collect();
        SimpleFunction { model: self.model.clone(), levels }
    }

    /// `∫ f dμ`; every level set must be a union of the table's atoms.
    pub fn integrate(&self, mt: &MeasureTable) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (v, s) in &self.levels {
            total += v * mt.measure_of(s)?;
        }
        Ok(total)
    }
}

/// A finite sum `Σ a_t u_t` with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CpElement {
    model: Model,
    terms: BTreeMap<Word, SimpleFunction>,
}

impl CpElement {
    pub fn zero(model: &Model) -> Self {
        CpElement { model: model.clone(), terms: BTreeMap::new() }
    }

    /// `u_t`.
    pub fn unitary(model: &Model, t: &Word) -> Self {
        CpElement::term(SimpleFunction::constant(model, BigRational::one()), t)
    }

    /// `a u_t`.
    pub fn term(a: SimpleFunction, t: &Word) -> Self {
        let mut terms = BTreeMap::new();
        let model = a.model.clone();
        if !a.is_zero() {
            terms.insert(t.clone(), a);
        }
        CpElement { model, terms }
    }

    /// `a u_e`.
    pub fn function(a: SimpleFunction) -> Self {
        CpElement::term(a, &Word::identity())
    }

    pub fn from_terms(model: &Model, terms: Vec<(Word, SimpleFunction)>) -> Result<Self> {
        terms.into_iter().try_fold(CpElement::zero(model), |acc, (t, a)| acc.add(&CpElement::term(a, &t)))
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &SimpleFunction)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &Word) -> SimpleFunction {
        self.terms.get(t).cloned().unwrap_or_else(|| SimpleFunction::zero(&self.model))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_sum(&mut self, t: Word, a: SimpleFunction) -> Result<()> {
        let sum = match self.terms.remove(&t) {
            Some(b) => b.add(&a)?,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(t, sum);
        }
        Ok(())
    }

    pub fn add(&self, other: &CpElement) -> Result<CpElement> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let mut out = self.clone();
        for (t, a) in &other.terms {
            out.insert_sum(t.clone(), a.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> CpElement {
        let mut out = CpElement::zero(&self.model);
        for (t, a) in &self.terms {
            let s = a.scale(c);
            if !s.is_zero() {
                out.terms.insert(t.clone(), s);
            }
        }
        out
    }

    pub fn sub(&self, other: &CpElement) -> Result<CpElement> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &CpElement) -> Result<CpElement> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let spec = self.model.spec();
        let mut out = CpElement::zero(&self.model);
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                let c = a.mul(&b.translate(s))?;
                if !c.is_zero() {
                    out.insert_sum(spec.multiply(s, t), c)?;
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> CpElement {
        let spec = self.model.spec();
        let terms = self
            .terms
            .iter()
            .map(|(t, a)| {
                let ti = spec.inverse(t);
                let moved = a.translate(&ti);
                (ti, moved)
            })
            .collect();
        CpElement { model: self.model.clone(), terms }
    }

    /// The coefficient at the identity.
    pub fn cond_expectation(&self) -> SimpleFunction {
        self.coefficient(&Word::identity())
    }
}

/// Both sides of each expectation identity, for `x = Σ a_t u_t`:
/// `E(xx*) = Σ a_t²` and `E(x*x) = Σ_t t⁻¹.(a_t²)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectationSides {
    pub e_xxs: SimpleFunction,
    pub sum_sq: SimpleFunction,
    pub e_xsx: SimpleFunction,
    pub sum_translated_sq: SimpleFunction,
}

impl ExpectationSides {
    pub fn holds(&self) -> bool {
        self.e_xxs == self.sum_sq && self.e_xsx == self.sum_translated_sq
    }
}

pub fn expectation_sides(x: &CpElement) -> Result<ExpectationSides> {
    let spec = x.model.spec();
    let xs = x.adjoint();
    let mut sum_sq = SimpleFunction::zero(&x.model);
    let mut sum_translated_sq = SimpleFunction::zero(&x.model);
    for (t, a) in &x.terms {
        let sq = a.mul(a)?;
        sum_translated_sq = sum_translated_sq.add(&sq.translate(&spec.inverse(t)))?;
        sum_sq = sum_sq.add(&sq)?;
    }
    Ok(ExpectationSides {
        e_xxs: x.mul(&xs)?.cond_expectation(),
        sum_sq,
        e_xsx: xs.mul(x)?.cond_expectation(),
        sum_translated_sq,
    })
}

pub fn check_expectation_identities(x: &CpElement) -> Result<bool> {
    Ok(expectation_sides(x)?.holds())
}

fn cover_to_element(model: &Model, cover: &[Piece], u: &ClopenSet) -> Result<CpElement> {
    let sets: Vec<ClopenSet> = cover.iter().map(|p| p.set.clone()).collect();
    let parts = refine_cover_to_partition(&sets, u)?;
    let mut x = CpElement::zero(model);
    for (p, part) in cover.iter().zip(parts) {
        if part.is_empty() {
            continue;
        }
        let img = part.translate(&p.translator);
        x = x.add(&CpElement::term(SimpleFunction::indicator(&img), &p.translator))?;
    }
    Ok(x)
}

/// Isometries `x, y` with `x*x = y*y = 1_U` and orthogonal ranges, built
/// from a paradoxical decomposition of `U`: `x = Σ u_{t_i} 1_{P_i}` where the
/// `P_i` partition `U` inside the first cover, likewise `y` for the second.
pub fn build_witness(cert: &ParadoxCert) -> Result<(CpElement, CpElement)> {
    if !cert.verify()?.is_valid() {
        return Err(Error::Unverified("input is not a valid certificate".into()));
    }
    let model = cert.model();
    let x = cover_to_element(model, cert.first_cover(), &cert.domain)?;
    let y = cover_to_element(model, cert.second_cover(), &cert.domain)?;
    Ok((x, y))
}

pub fn verify_witness(x: &CpElement, y: &CpElement, u: &ClopenSet) -> Result<Verdict> {
    if x.model != y.model || x.model != *u.model() {
        return Err(Error::ModelMismatch);
    }
    let one_u = CpElement::function(SimpleFunction::indicator(u));
    if x.adjoint().mul(x)? != one_u {
        return Ok(Verdict::fail("x*x != 1_U"));
    }
    if y.adjoint().mul(y)? != one_u {
        return Ok(Verdict::fail("y*y != 1_U"));
    }
    if !y.adjoint().mul(x)?.is_zero() {
        return Ok(Verdict::fail("y*x != 0"));
    }
    let gap = one_u.sub(&x.mul(&x.adjoint())?.add(&y.mul(&y.adjoint())?)?)?;
    let only_e = gap.terms.keys().all(Word::is_identity);
    if !only_e || !gap.cond_expectation().is_nonnegative() {
        return Ok(Verdict::fail("xx* + yy* is not below 1_U"));
    }
    Ok(Verdict::Valid)
}

fn element_to_cover(x: &CpElement) -> Result<Vec<Piece>> {
    let spec = x.model.spec();
    let mut pieces = Vec::new();
    for (t, a) in &x.terms {
        if !a.is_nonnegative() {
            return Err(Error::Malformed("witness has a negative coefficient".into()));
        }
        pieces.push(Piece { set: a.support().translate(&spec.inverse(t)), translator: t.clone() });
    }
    Ok(pieces)
}

/// Reads a paradoxical decomposition off a verified witness: the piece for
/// `u_t` is `t⁻¹·supp(a_t)`.
pub fn extract_paradox(x: &CpElement, y: &CpElement, u: &ClopenSet) -> Result<ParadoxCert> {
    if let Verdict::Invalid(why) = verify_witness(x, y, u)? {
        return Err(Error::Unverified(format!("witness invalid: {why}")));
    }
    let mut pieces = element_to_cover(x)?;
    let split = pieces.len();
    pieces.extend(element_to_cover(y)?);
    let cert = ParadoxCert { domain: u.clone(), pieces, split };
    match cert.verify()? {
        Verdict::Valid => Ok(cert),
        Verdict::Invalid(why) => Err(Error::Unverified(why)),
    }
}

/// `φ(z) = ∫ E(z) dμ`.
pub fn trace(mt: &MeasureTable, z: &CpElement) -> Result<BigRational> {
    z.cond_expectation().integrate(mt)
}

/// `φ(x*x) = φ(xx*)` for every sample.
pub fn trace_check(mt: &MeasureTable, samples: &[CpElement]) -> Result<Verdict> {
    for (i, x) in samples.iter().enumerate() {
        let left = trace(mt, &x.adjoint().mul(x)?)?;
        let right = trace(mt, &x.mul(&x.adjoint())?)?;
        if left != right {
            return Ok(Verdict::fail(format!("sample {}: phi(x*x) = {left}, phi(xx*) = {right}", i + 1)));
        }
    }
    Ok(Verdict::Valid)
}

/// Projections `f_j = 1_{G_j}` from a colouring of a ball, in the self action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreenessReport {
    pub projections: Vec<CpElement>,
    pub window: ClopenSet,
    /// The window is a proper subset of the group, so `Σ f_j` is `1_W`
    /// rather than `1`.
    pub restricted: bool,
    pub verdict: Verdict,
}

/// Checks `Σ f_j = 1_W` and `(t.f_j) f_j = 0`, with `t.f = u_t f u_t*`.
pub fn freeness_projections(spec: &GroupSpec, part: &PartitionCert) -> Result<FreenessReport> {
    if let Verdict::Invalid(why) = part.verify(spec) {
        return Err(Error::Unverified(why));
    }
    let model = ActionModel::self_action(spec.clone());
    let all: Vec<Word> = part.classes.iter().map(|(w, _)| w.clone()).collect();
    let window = ClopenSet::points(&model, &all)?;
    let projections: Vec<CpElement> = (1..=3)
        .map(|c| -> Result<CpElement> {
            let set = ClopenSet::points(&model, &part.class(c))?;
            Ok(CpElement::function(SimpleFunction::indicator(&set)))
        })
        .collect::<Result<_>>()?;
    let restricted = !window.is_full();
    let mut sum = CpElement::zero(&model);
    for f in &projections {
        sum = sum.add(f)?;
    }
    let mut verdict = Verdict::Valid;
    if sum != CpElement::function(SimpleFunction::indicator(&window)) {
        verdict = Verdict::fail("f_1 + f_2 + f_3 != 1 on the window");
    }
    let ut = CpElement::unitary(&model, &part.t);
    for (j, f) in projections.iter().enumerate() {
        let moved = ut.mul(f)?.mul(&ut.adjoint())?;
        if verdict.is_valid() && !moved.mul(f)?.is_zero() {
            verdict = Verdict::fail(format!("(t.f_{}) f_{} != 0", j + 1, j + 1));
        }
    }
    Ok(FreenessReport { projections, window, restricted, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2b() -> Model {
        ActionModel::boundary(GroupSpec::free(&["a", "b"]).unwrap()).unwrap()
    }

    fn w(m: &Model, s: &str) -> Word {
        m.spec().parse_word(s).unwrap()
    }

    fn ind(m: &Model, s: &str) -> SimpleFunction {
        SimpleFunction::indicator(&ClopenSet::cylinder(m, &w(m, s)).unwrap())
    }

    #[test]
    fn unitaries_multiply() {
        let m = f2b();
        let p = CpElement::unitary(&m, &w(&m, "a")).mul(&CpElement::unitary(&m, &w(&m, "a^-1"))).unwrap();
        assert_eq!(p, CpElement::unitary(&m, &Word::identity()));
    }

    #[test]
    fn covariance_kills_disjoint_terms() {
        let m = f2b();
        let lhs = CpElement::term(ind(&m, "a"), &w(&m, "a"));
        let rhs = CpElement::function(ind(&m, "a^-1"));
        assert!(lhs.mul(&rhs).unwrap().is_zero());
    }

    #[test]
    fn adjoint_moves_support() {
        let m = f2b();
        let x = CpElement::term(ind(&m, "b"), &w(&m, "a"));
        let p = x.adjoint().mul(&x).unwrap();
        assert_eq!(p, CpElement::function(ind(&m, "a^-1 b")));
    }

    #[test]
    fn expectation_picks_identity_coefficient() {
        let m = f2b();
        let x = CpElement::function(ind(&m, "a")).add(&CpElement::term(ind(&m, "b"), &w(&m, "a"))).unwrap();
        assert_eq!(x.cond_expectation(), ind(&m, "a"));
        assert!(CpElement::unitary(&m, &w(&m, "a")).cond_expectation().is_zero());
    }

    #[test]
    fn lemma52_on_small_inputs() {
        let m = f2b();
        let x = CpElement::unitary(&m, &w(&m, "a")).add(&CpElement::unitary(&m, &w(&m, "b"))).unwrap();
        assert!(check_expectation_identities(&x).unwrap());
        assert!(check_expectation_identities(&CpElement::term(ind(&m, "a b"), &w(&m, "b^-1"))).unwrap());
    }

    #[test]
    fn unitary_pair_is_not_a_witness() {
        let m = f2b();
        let e = CpElement::unitary(&m, &Word::identity());
        let v = verify_witness(&e, &e, &ClopenSet::full(&m)).unwrap();
        assert!(!v.is_valid());
    }

    #[test]
    fn simple_functions_are_canonical() {
        let m = f2b();
        let x = ClopenSet::full(&m);
        let a = ClopenSet::cylinder(&m, &w(&m, "a")).unwrap();
        let one = BigRational::one();
        let f = SimpleFunction::from_pieces(&m, vec![(a.clone(), one.clone()), (a.complement(), one.clone())]).unwrap();
        assert_eq!(f, SimpleFunction::indicator(&x));
        let g = SimpleFunction::indicator(&a).sub(&SimpleFunction::indicator(&a)).unwrap();
        assert!(g.is_zero());
    }
}
