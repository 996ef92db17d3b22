//! Invariant finitely additive measures on finite windows, decided by an exact
//! rational linear program. Every answer comes with a certificate that is
//! re-checked by substitution: a measure table, or Farkas multipliers.

mod simplex;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::clopen::{ClopenSet, Model, Refinement};
use crate::error::{Error, Result, Verdict};
use crate::group::Word;

pub const DEFAULT_ATOM_CAP: usize = 4096;

/// One linear equation over the atom masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub label: String,
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

/// `μ ≥ 0` on atoms, `μ(E) = target`, and `μ(k·F) = μ(F)` for `k ∈ K`, `F ∈ family`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpInstance {
    model: Model,
    family: Vec<ClopenSet>,
    translators: Vec<Word>,
    normalize: ClopenSet,
    target: BigRational,
    atoms: Vec<ClopenSet>,
    rows: Vec<Constraint>,
}

impl LpInstance {
    pub fn new(family: Vec<ClopenSet>, translators: Vec<Word>, normalize: ClopenSet) -> Result<Self> {
        LpInstance::build(family, translators, normalize, BigRational::one(), DEFAULT_ATOM_CAP)
    }

    pub fn build(
        family: Vec<ClopenSet>,
        translators: Vec<Word>,
        normalize: ClopenSet,
        target: BigRational,
        cap: usize,
    ) -> Result<Self> {
        let model = normalize.model().clone();
        if family.iter().any(|f| f.model() != &model) {
            return Err(Error::ModelMismatch);
        }
        let spec = model.spec();
        // generators: family, E, then k·F for F in family ∪ {E}
        let mut gens: Vec<ClopenSet> = family.clone();
        gens.push(normalize.clone());
        for k in &translators {
            for f in family.iter().chain(std::iter::once(&normalize)) {
                gens.push(f.translate(k));
            }
        }
        let refs: Vec<&ClopenSet> = gens.iter().collect();
        let classes = Refinement::new(&model, &refs)?.signature_classes();
        if classes.len() > cap {
            return Err(Error::AtomCap { count: classes.len(), cap });
        }
        let atoms: Vec<ClopenSet> = classes.iter().map(|(a, _)| a.clone()).collect();
        let indicator = |g: usize| -> Vec<BigRational> {
            classes.iter().map(|(_, sig)| if sig[g] { BigRational::one() } else { BigRational::zero() }).collect()
        };
        let nf = family.len();
        let mut rows = vec![Constraint {
            label: format!("mu({}) = {}", normalize.describe(), target),
            coeffs: indicator(nf),
            rhs: target.clone(),
        }];
        for (ki, k) in translators.iter().enumerate() {
            for fi in 0..nf {
                let moved = indicator(nf + 1 + ki * (nf + 1) + fi);
                let base = indicator(fi);
                let coeffs: Vec<BigRational> = moved.iter().zip(&base).map(|(p, q)| p - q).collect();
                if coeffs.iter().all(Zero::is_zero) {
                    continue;
                }
                rows.push(Constraint {
                    label: format!("mu({} . F{}) = mu(F{})", spec.format_word(k), fi + 1, fi + 1),
                    coeffs,
                    rhs: BigRational::zero(),
                });
            }
        }
        Ok(LpInstance { model, family, translators, normalize, target, atoms, rows })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn family(&self) -> &[ClopenSet] {
        &self.family
    }

    pub fn translators(&self) -> &[Word] {
        &self.translators
    }

    pub fn normalize(&self) -> &ClopenSet {
        &self.normalize
    }

    pub fn target(&self) -> &BigRational {
        &self.target
    }

    pub fn atoms(&self) -> &[ClopenSet] {
        &self.atoms
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.rows
    }
}

/// A rational mass per atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureTable {
    pub atoms: Vec<ClopenSet>,
    pub values: Vec<BigRational>,
}

impl MeasureTable {
    /// Measure of a union of atoms; other sets are outside the window.
    pub fn measure_of(&self, set: &ClopenSet) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (a, v) in self.atoms.iter().zip(&self.values) {
            if a.is_subset(set)? {
                total += v;
            } else if !a.is_disjoint(set)? {
                return Err(Error::WindowTooSmall(format!("{} is not a union of atoms", set.describe())));
            }
        }
        Ok(total)
    }
}

/// Multipliers, one per constraint row, with `yᵀA ≤ 0` and `yᵀb = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCert {
    pub multipliers: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(MeasureTable),
    Infeasible(FarkasCert),
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }
}

pub fn lp_feasibility(inst: &LpInstance) -> Result<LpOutcome> {
    let a: Vec<Vec<BigRational>> = inst.rows.iter().map(|r| r.coeffs.clone()).collect();
    let b: Vec<BigRational> = inst.rows.iter().map(|r| r.rhs.clone()).collect();
    let out = match simplex::phase1(&a, &b, inst.atoms.len()) {
        simplex::Phase1::Feasible(x) => LpOutcome::Feasible(MeasureTable { atoms: inst.atoms.clone(), values: x }),
        simplex::Phase1::Infeasible(y) => LpOutcome::Infeasible(FarkasCert { multipliers: y }),
    };
    let verdict = match &out {
        LpOutcome::Feasible(mt) => check_measure(mt, inst)?,
        LpOutcome::Infeasible(fc) => check_farkas(fc, inst)?,
    };
    match verdict {
        Verdict::Valid => Ok(out),
        Verdict::Invalid(why) => Err(Error::Unverified(why)),
    }
}

pub fn check_measure(mt: &MeasureTable, inst: &LpInstance) -> Result<Verdict> {
    if mt.values.len() != inst.atoms.len() || mt.atoms != inst.atoms {
        return Err(Error::DimensionMismatch(format!(
            "table has {} atoms, instance has {}",
            mt.values.len(),
            inst.atoms.len()
        )));
    }
    if let Some(i) = mt.values.iter().position(Signed::is_negative) {
        return Ok(Verdict::fail(format!("negativity at atom {}", i + 1)));
    }
    for row in &inst.rows {
        let lhs: BigRational = row.coeffs.iter().zip(&mt.values).map(|(c, v)| c * v).sum();
        if lhs != row.rhs {
            return Ok(Verdict::fail(format!("violated: {}", row.label)));
        }
    }
    Ok(Verdict::Valid)
}

pub fn check_farkas(fc: &FarkasCert, inst: &LpInstance) -> Result<Verdict> {
    if fc.multipliers.len() != inst.rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} multipliers for {} constraints",
            fc.multipliers.len(),
            inst.rows.len()
        )));
    }
    let yb: BigRational = fc.multipliers.iter().zip(&inst.rows).map(|(y, r)| y * &r.rhs).sum();
    if yb != BigRational::one() {
        return Ok(Verdict::fail("combined right-hand side is not 1"));
    }
    for j in 0..inst.atoms.len() {
        let col: BigRational = fc.multipliers.iter().zip(&inst.rows).map(|(y, r)| y * &r.coeffs[j]).sum();
        if col.is_positive() {
            return Ok(Verdict::fail(format!("combined coefficient of atom {} is positive", j + 1)));
        }
    }
    Ok(Verdict::Valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::ActionModel;
    use crate::group::GroupSpec;

    #[test]
    fn integers_carry_an_invariant_mean() {
        let z = ActionModel::self_action(GroupSpec::free(&["a"]).unwrap());
        let all = ClopenSet::full(&z);
        let k = vec![z.spec().parse_word("a").unwrap(), z.spec().parse_word("a^-1").unwrap()];
        let inst = LpInstance::new(vec![all.clone()], k, all.clone()).unwrap();
        let LpOutcome::Feasible(mt) = lp_feasibility(&inst).unwrap() else { panic!("feasible") };
        assert_eq!(mt.measure_of(&all).unwrap(), BigRational::one());
        let mut bad = mt.clone();
        bad.values[0] = BigRational::new((-1).into(), 2.into());
        assert!(check_measure(&bad, &inst).unwrap().reason().unwrap().starts_with("negativity"));
    }

    #[test]
    fn free_group_depth_one_is_infeasible() {
        for m in [
            ActionModel::self_action(GroupSpec::free(&["a", "b"]).unwrap()),
            ActionModel::boundary(GroupSpec::free(&["a", "b"]).unwrap()).unwrap(),
        ] {
            let spec = m.spec();
            let gens: Vec<Word> = ["a", "a^-1", "b", "b^-1"].iter().map(|s| spec.parse_word(s).unwrap()).collect();
            let mut family: Vec<ClopenSet> = gens
                .iter()
                .map(|g| {
                    if m.is_boundary() {
                        ClopenSet::cylinder(&m, g).unwrap()
                    } else {
                        ClopenSet::cone(&m, g).unwrap()
                    }
                })
                .collect();
            if !m.is_boundary() {
                family.push(ClopenSet::points(&m, &[Word::identity()]).unwrap());
            }
            let inst = LpInstance::new(family, gens, ClopenSet::full(&m)).unwrap();
            let LpOutcome::Infeasible(fc) = lp_feasibility(&inst).unwrap() else { panic!("infeasible") };
            assert!(check_farkas(&fc, &inst).unwrap().is_valid());
        }
    }
}
