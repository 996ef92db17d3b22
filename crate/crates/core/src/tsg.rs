//! A bounded fragment of the type semigroup: finite multisets of clopen
//! sets, equidecomposition certificates between them, the algebraic
//! preorder, and conversions to and from paradoxical decompositions.
//!
//! Levels are 1-based positions in the canonical (sorted) multiset.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::clopen::{ClopenSet, Model, Refinement};
use crate::error::{Error, Result, SearchOutcome, Verdict};
use crate::group::Word;
use crate::paradox::{atoms_of, ParadoxCert, Piece};
use crate::search::{self, Opt, Problem};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TsgElement {
    model: Model,
    levels: Vec<ClopenSet>,
}

impl TsgElement {
    /// Empty sets are dropped; the rest is sorted.
    pub fn new(model: &Model, sets: Vec<ClopenSet>) -> Result<Self> {
        if sets.iter().any(|s| s.model() != model) {
            return Err(Error::ModelMismatch);
        }
        let mut levels: Vec<ClopenSet> = sets.into_iter().filter(|s| !s.is_empty()).collect();
        levels.sort();
        Ok(TsgElement { model: model.clone(), levels })
    }

    pub fn zero(model: &Model) -> Self {
        TsgElement { model: model.clone(), levels: Vec::new() }
    }

    pub fn single(set: &ClopenSet) -> Self {
        TsgElement::new(set.model(), vec![set.clone()]).expect("one model")
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn levels(&self) -> &[ClopenSet] {
        &self.levels
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn add(&self, other: &TsgElement) -> Result<TsgElement> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        TsgElement::new(&self.model, self.levels.iter().chain(&other.levels).cloned().collect())
    }

    /// `n · self`.
    pub fn times(&self, n: usize) -> TsgElement {
        let levels = (0..n).flat_map(|_| self.levels.iter().cloned()).collect();
        TsgElement::new(&self.model, levels).expect("one model")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub piece: ClopenSet,
    pub source: usize,
    pub translator: Word,
    pub target: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EquidecompCert {
    pub moves: Vec<Move>,
}

fn check_levels(x: &TsgElement, y: &TsgElement, cert: &EquidecompCert) -> Result<()> {
    if x.model != y.model || cert.moves.iter().any(|m| m.piece.model() != &x.model) {
        return Err(Error::ModelMismatch);
    }
    for (k, m) in cert.moves.iter().enumerate() {
        if m.source == 0 || m.source > x.levels.len() || m.target == 0 || m.target > y.levels.len() {
            return Err(Error::Malformed(format!("move {} refers to a missing level", k + 1)));
        }
    }
    Ok(())
}

/// Checks that the given sets are pairwise disjoint and returns their union.
fn disjoint_union(model: &Model, sets: &[ClopenSet]) -> Result<Option<ClopenSet>> {
    let mut acc = ClopenSet::empty(model);
    for s in sets {
        if !acc.is_disjoint(s)? {
            return Ok(None);
        }
        acc = acc.union(s)?;
    }
    Ok(Some(acc))
}

fn verify(x: &TsgElement, y: &TsgElement, cert: &EquidecompCert, exact: bool) -> Result<Verdict> {
    check_levels(x, y, cert)?;
    if let Some(k) = cert.moves.iter().position(|m| m.piece.is_empty()) {
        return Ok(Verdict::fail(format!("move {} has an empty piece", k + 1)));
    }
    for (i, level) in x.levels.iter().enumerate() {
        let pieces: Vec<ClopenSet> = cert.moves.iter().filter(|m| m.source == i + 1).map(|m| m.piece.clone()).collect();
        match disjoint_union(&x.model, &pieces)? {
            None => return Ok(Verdict::fail(format!("source not disjoint at level {}", i + 1))),
            Some(u) if u != *level => return Ok(Verdict::fail(format!("source does not cover level {}", i + 1))),
            Some(_) => {}
        }
    }
    for (j, level) in y.levels.iter().enumerate() {
        let images: Vec<ClopenSet> =
            cert.moves.iter().filter(|m| m.target == j + 1).map(|m| m.piece.translate(&m.translator)).collect();
        match disjoint_union(&x.model, &images)? {
            None => return Ok(Verdict::fail(format!("target not disjoint at level {}", j + 1))),
            Some(u) if exact && u != *level => {
                return Ok(Verdict::fail(format!("target does not cover level {}", j + 1)))
            }
            Some(u) if !u.is_subset(level)? => return Ok(Verdict::fail(format!("target leaves level {}", j + 1))),
            Some(_) => {}
        }
    }
    Ok(Verdict::Valid)
}

/// `x ∼ y`: sources partition each level of `x`, images partition each level of `y`.
pub fn verify_equi(x: &TsgElement, y: &TsgElement, cert: &EquidecompCert) -> Result<Verdict> {
    verify(x, y, cert, true)
}

/// `x ≤ y`: as [`verify_equi`] but images need only be disjoint inside `y`.
pub fn verify_leq(x: &TsgElement, y: &TsgElement, cert: &EquidecompCert) -> Result<Verdict> {
    verify(x, y, cert, false)
}

fn search_moves(
    x: &TsgElement,
    y: &TsgElement,
    r: u64,
    p: usize,
    exact: bool,
) -> Result<SearchOutcome<EquidecompCert>> {
    if r < 1 || p < 1 {
        return Err(Error::InvalidBounds("need r >= 1 and p >= 1".into()));
    }
    if x.model != y.model {
        return Err(Error::ModelMismatch);
    }
    if x.is_zero() {
        return Ok(if !exact || y.is_zero() {
            SearchOutcome::Found(EquidecompCert::default())
        } else {
            SearchOutcome::NotFoundWithinBounds
        });
    }
    let model = &x.model;
    let translators = model.spec().ball(r);
    let (nt, ny) = (translators.len(), y.levels.len());

    let mut slots_src: Vec<(usize, ClopenSet)> = Vec::new();
    for (i, level) in x.levels.iter().enumerate() {
        for a in atoms_of(level, r as usize)? {
            slots_src.push((i, a));
        }
    }
    // candidate images per target level, refined level by level
    let mut images: Vec<Vec<Vec<Option<ClopenSet>>>> = Vec::new();
    let mut families: Vec<Vec<ClopenSet>> = y.levels.iter().map(|l| vec![l.clone()]).collect();
    for (_, a) in &slots_src {
        let mut per_t = Vec::with_capacity(nt);
        for t in &translators {
            let img = a.translate(t);
            let mut per_j = Vec::with_capacity(ny);
            for (j, level) in y.levels.iter().enumerate() {
                if img.is_subset(level)? {
                    families[j].push(img.clone());
                    per_j.push(Some(img.clone()));
                } else {
                    per_j.push(None);
                }
            }
            per_t.push(per_j);
        }
        images.push(per_t);
    }
    let mut offsets = Vec::with_capacity(ny);
    let mut refinements = Vec::with_capacity(ny);
    let mut total = 0;
    for fam in families.iter_mut() {
        fam.sort();
        fam.dedup();
        let refs: Vec<&ClopenSet> = fam.iter().collect();
        let rf = Refinement::new(model, &refs)?;
        offsets.push(total);
        total += rf.len();
        refinements.push(rf);
    }
    let global = |j: usize, s: &ClopenSet| -> FixedBitSet {
        let idx = families[j].binary_search(s).expect("image is in the family");
        let mut out = FixedBitSet::with_capacity(total);
        for c in refinements[j].mask(idx).ones() {
            out.insert(offsets[j] + c);
        }
        out
    };
    let mut slots = Vec::with_capacity(slots_src.len());
    for (s, (i, _)) in slots_src.iter().enumerate() {
        let mut opts = Vec::new();
        for (ti, per_level) in images[s].iter().enumerate() {
            for (j, img) in per_level.iter().enumerate() {
                if let Some(img) = img {
                    opts.push(Opt { group: (i * nt + ti) * ny + j, cells: global(j, img) });
                }
            }
        }
        slots.push(opts);
    }
    let primary = exact.then(|| {
        let mut all = FixedBitSet::with_capacity(total);
        for (j, level) in y.levels.iter().enumerate() {
            all.union_with(&global(j, level));
        }
        all
    });
    let problem =
        Problem { slots, cells: total, groups: x.levels.len() * nt * ny, primary, min_groups: 1, max_groups: p };
    let (choice, _) = search::solve(&problem);
    let Some(choice) = choice else {
        return Ok(SearchOutcome::NotFoundWithinBounds);
    };
    let mut groups: BTreeMap<usize, Vec<&ClopenSet>> = BTreeMap::new();
    for (s, &oi) in choice.iter().enumerate() {
        groups.entry(problem.slots[s][oi].group).or_default().push(&slots_src[s].1);
    }
    let mut moves = Vec::with_capacity(groups.len());
    for (g, members) in groups {
        let (j, rest) = (g % ny, g / ny);
        let (i, ti) = (rest / nt, rest % nt);
        moves.push(Move {
            piece: ClopenSet::union_all(model, members)?,
            source: i + 1,
            translator: translators[ti].clone(),
            target: j + 1,
        });
    }
    let cert = EquidecompCert { moves };
    match verify(x, y, &cert, exact)? {
        Verdict::Valid => Ok(SearchOutcome::Found(cert)),
        Verdict::Invalid(why) => Err(Error::Unverified(why)),
    }
}

/// Bounded search for `x ∼ y` with translators in `ball(r)` and at most `p` moves.
pub fn find_equi(x: &TsgElement, y: &TsgElement, r: u64, p: usize) -> Result<SearchOutcome<EquidecompCert>> {
    search_moves(x, y, r, p, true)
}

/// Bounded search for `x ≤ y`.
pub fn leq(x: &TsgElement, y: &TsgElement, r: u64, p: usize) -> Result<SearchOutcome<EquidecompCert>> {
    search_moves(x, y, r, p, false)
}

/// Bounded search for `2[E] ≤ [E]`.
pub fn properly_infinite(e: &ClopenSet, r: u64, p: usize) -> Result<SearchOutcome<EquidecompCert>> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let one = TsgElement::single(e);
    leq(&one.times(2), &one, r, p)
}

/// Turns a certificate for `2[E] + z ≤ [E]` (or `∼`) into a paradoxical
/// decomposition of `E`: the two copies of `E` become the two covers and
/// moves out of `z` are dropped.
pub fn tsg_to_paradox(x: &TsgElement, y: &TsgElement, cert: &EquidecompCert) -> Result<ParadoxCert> {
    if !verify_leq(x, y, cert)?.is_valid() {
        return Err(Error::Unverified("input is not a valid certificate".into()));
    }
    let [e] = y.levels.as_slice() else {
        return Err(Error::Malformed("target must be a single set".into()));
    };
    let copies: Vec<usize> = (0..x.levels.len()).filter(|&i| x.levels[i] == *e).map(|i| i + 1).collect();
    let [c1, c2, ..] = copies.as_slice() else {
        return Err(Error::Malformed("source must contain the target set twice".into()));
    };
    let mut pieces = Vec::new();
    for level in [*c1, *c2] {
        for m in cert.moves.iter().filter(|m| m.source == level) {
            pieces.push(Piece { set: m.piece.clone(), translator: m.translator.clone() });
        }
    }
    let split = cert.moves.iter().filter(|m| m.source == *c1).count();
    let out = ParadoxCert { domain: e.clone(), pieces, split };
    match out.verify()? {
        Verdict::Valid => Ok(out),
        Verdict::Invalid(why) => Err(Error::Unverified(why)),
    }
}

/// Reshapes a paradoxical decomposition of `U` into a certificate for
/// `2[U] ≤ [U]`. Overlapping covers are first refined to partitions, which
/// drops pieces that become empty.
pub fn paradox_to_tsg(cert: &ParadoxCert) -> Result<(TsgElement, TsgElement, EquidecompCert)> {
    if !cert.verify()?.is_valid() {
        return Err(Error::Unverified("input is not a valid certificate".into()));
    }
    let model = cert.model();
    let mut moves = Vec::new();
    for (level, cover) in [(1, cert.first_cover()), (2, cert.second_cover())] {
        let mut seen = ClopenSet::empty(model);
        for p in cover {
            let piece = p.set.difference(&seen)?;
            seen = seen.union(&p.set)?;
            if !piece.is_empty() {
                moves.push(Move { piece, source: level, translator: p.translator.clone(), target: 1 });
            }
        }
    }
    let y = TsgElement::single(&cert.domain);
    let x = y.times(2);
    let out = EquidecompCert { moves };
    match verify_leq(&x, &y, &out)? {
        Verdict::Valid => Ok((x, y, out)),
        Verdict::Invalid(why) => Err(Error::Unverified(why)),
    }
}

/// The inverse equidecomposition: `y ∼ x` from `x ∼ y`.
pub fn reverse(model: &Model, cert: &EquidecompCert) -> EquidecompCert {
    let spec = model.spec();
    let moves = cert
        .moves
        .iter()
        .map(|m| Move {
            piece: m.piece.translate(&m.translator),
            source: m.target,
            translator: spec.inverse(&m.translator),
            target: m.source,
        })
        .collect();
    EquidecompCert { moves }
}

/// `x ∼ z` from `c1: x ∼ y` and `c2: y ∼ z`, by intersecting the images of
/// `c1` with the pieces of `c2` on each level of `y`.
pub fn compose(model: &Model, c1: &EquidecompCert, c2: &EquidecompCert) -> Result<EquidecompCert> {
    let spec = model.spec();
    let mut moves = Vec::new();
    for m1 in &c1.moves {
        let img = m1.piece.translate(&m1.translator);
        for m2 in c2.moves.iter().filter(|m| m.source == m1.target) {
            let d = img.intersect(&m2.piece)?;
            if d.is_empty() {
                continue;
            }
            moves.push(Move {
                piece: d.translate(&spec.inverse(&m1.translator)),
                source: m1.source,
                translator: spec.multiply(&m2.translator, &m1.translator),
                target: m2.target,
            });
        }
    }
    Ok(EquidecompCert { moves })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    /// `n x ≤ m y` was certified.
    pub premise: Option<EquidecompCert>,
    /// `x ≤ y` was certified.
    pub conclusion: Option<EquidecompCert>,
    /// Premise certified while the conclusion was not found. Bounded
    /// evidence only: a failed search does not refute `x ≤ y`.
    pub violation: bool,
}

pub fn unperforation_probe(
    x: &TsgElement,
    y: &TsgElement,
    n: usize,
    m: usize,
    r: u64,
    p: usize,
) -> Result<ProbeReport> {
    if !(n > m && m >= 1) {
        return Err(Error::InvalidBounds("need n > m >= 1".into()));
    }
    let premise = leq(&x.times(n), &y.times(m), r, p)?.found();
    let conclusion = leq(x, y, r, p)?.found();
    let violation = premise.is_some() && conclusion.is_none();
    Ok(ProbeReport { premise, conclusion, violation })
}
