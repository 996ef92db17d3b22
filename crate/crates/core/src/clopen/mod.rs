//! Exact Boolean algebras of clopen sets for two actions of a free product `G`:
//!
//! * [`ActionKind::Boundary`]: `G` acting on the space of ends of its letter
//!   tree (infinite reduced words). Clopen sets are finite unions of
//!   cylinders `[w]`, stored as the antichain of maximal cylinders, so equal
//!   sets have equal representations.
//! * [`ActionKind::SelfAction`]: `G` acting on itself by left translation.
//!   Sets are finite Boolean combinations of cones `C(w)` (all elements
//!   whose spelling starts with `w`) and points, stored at a uniform depth
//!   `d`: cones of depth exactly `d` plus points of depth `< d`, with `d`
//!   the least depth at which the set is expressible.
//!
//! Boundary points are never materialised; membership is asked of a finite
//! prefix.

mod refine;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupSpec, Letter, Path, Word};

pub use refine::{atoms, refine_cover_to_partition, Cell, Refinement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    #[serde(rename = "boundary")]
    Boundary,
    #[serde(rename = "self")]
    SelfAction,
}

/// A group together with the space it acts on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionModel {
    kind: ActionKind,
    group: GroupSpec,
}

pub type Model = Arc<ActionModel>;

impl ActionModel {
    /// Rejects groups whose boundary is finite: finite groups, `Z`, and `Z_2 * Z_2`.
    pub fn new(group: GroupSpec, kind: ActionKind) -> Result<Model> {
        if kind == ActionKind::Boundary && !group.has_cantor_boundary() {
            return Err(Error::UnsupportedModel(
                "boundary action needs a free product with infinitely many ends".into(),
            ));
        }
        Ok(Arc::new(ActionModel { kind, group }))
    }

    pub fn boundary(group: GroupSpec) -> Result<Model> {
        ActionModel::new(group, ActionKind::Boundary)
    }

    pub fn self_action(group: GroupSpec) -> Model {
        Arc::new(ActionModel { kind: ActionKind::SelfAction, group })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.group
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn is_boundary(&self) -> bool {
        self.kind == ActionKind::Boundary
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct ConeRepr {
    depth: usize,
    cones: BTreeSet<Path>,
    points: BTreeSet<Path>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Repr {
    Cylinders(BTreeSet<Path>),
    Cones(ConeRepr),
}

/// A clopen set in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClopenSet {
    model: Model,
    repr: Repr,
}

fn has_prefix_in(set: &BTreeSet<Path>, p: &[Letter]) -> bool {
    (0..=p.len()).any(|i| set.contains(&p[..i]))
}

fn has_extension_in(set: &BTreeSet<Path>, p: &[Letter]) -> bool {
    set.range(p.to_vec()..).find(|q| q.len() > p.len() || q.as_slice() != p).is_some_and(|q| q.starts_with(p))
}

/// Antichain of maximal cylinders, with sibling-complete families collapsed.
fn canonical_cylinders(spec: &GroupSpec, paths: impl IntoIterator<Item = Path>) -> BTreeSet<Path> {
    let all: BTreeSet<Path> = paths.into_iter().collect();
    let mut set: BTreeSet<Path> = BTreeSet::new();
    for p in all.iter() {
        if !(0..p.len()).any(|i| all.contains(&p[..i])) {
            set.insert(p.clone());
        }
    }
    let max_depth = set.iter().map(Vec::len).max().unwrap_or(0);
    for d in (1..=max_depth).rev() {
        let mut by_parent: BTreeMap<Path, usize> = BTreeMap::new();
        for p in set.iter().filter(|p| p.len() == d) {
            *by_parent.entry(p[..d - 1].to_vec()).or_default() += 1;
        }
        for (parent, n) in by_parent {
            if n == spec.child_count(&parent) {
                for c in spec.children(&parent) {
                    set.remove(&c);
                }
                set.insert(parent);
            }
        }
    }
    set
}

fn complement_cylinders(spec: &GroupSpec, set: &BTreeSet<Path>) -> BTreeSet<Path> {
    fn walk(spec: &GroupSpec, set: &BTreeSet<Path>, node: Path, out: &mut Vec<Path>) {
        if set.contains(&node) {
            return;
        }
        if !has_extension_in(set, &node) {
            out.push(node);
            return;
        }
        for c in spec.children(&node) {
            walk(spec, set, c, out);
        }
    }
    let mut out = Vec::new();
    walk(spec, set, Vec::new(), &mut out);
    canonical_cylinders(spec, out)
}

fn translate_cylinder(spec: &GroupSpec, g: &[Letter], w: &[Letter], out: &mut Vec<Path>) {
    let (prod, cancelled) = spec.left_mul_path(g, w);
    if cancelled < w.len() {
        out.push(prod);
    } else {
        for c in spec.children(w) {
            translate_cylinder(spec, g, &c, out);
        }
    }
}

fn translate_cone(spec: &GroupSpec, g: &[Letter], w: &[Letter], cones: &mut Vec<Path>, points: &mut Vec<Path>) {
    let (prod, cancelled) = spec.left_mul_path(g, w);
    if cancelled < w.len() {
        cones.push(prod);
    } else {
        points.push(prod);
        for c in spec.children(w) {
            translate_cone(spec, g, &c, cones, points);
        }
    }
}

fn expand_cone(spec: &GroupSpec, c: &Path, depth: usize, cones: &mut BTreeSet<Path>, points: &mut BTreeSet<Path>) {
    if c.len() >= depth {
        cones.insert(c[..depth].to_vec());
        return;
    }
    points.insert(c.clone());
    for ch in spec.children(c) {
        expand_cone(spec, &ch, depth, cones, points);
    }
}

impl ConeRepr {
    fn empty() -> Self {
        ConeRepr { depth: 0, cones: BTreeSet::new(), points: BTreeSet::new() }
    }

    fn contains(&self, p: &[Letter]) -> bool {
        if p.len() < self.depth {
            self.points.contains(p)
        } else {
            self.cones.contains(&p[..self.depth])
        }
    }

    fn expanded(&self, spec: &GroupSpec, depth: usize) -> ConeRepr {
        if depth <= self.depth {
            return self.clone();
        }
        let mut cones = BTreeSet::new();
        let mut points = self.points.clone();
        for c in &self.cones {
            expand_cone(spec, c, depth, &mut cones, &mut points);
        }
        ConeRepr { depth, cones, points }
    }

    /// Lowers the depth while the set stays expressible.
    fn minimized(mut self, spec: &GroupSpec) -> ConeRepr {
        while self.depth > 0 {
            let d1 = self.depth - 1;
            let parents: BTreeSet<Path> = self.cones.iter().map(|c| c[..d1].to_vec()).collect();
            let level_points: Vec<&Path> = self.points.iter().filter(|p| p.len() == d1).collect();
            let parents_ok = parents
                .iter()
                .all(|v| self.points.contains(v) && spec.children(v).iter().all(|c| self.cones.contains(c)));
            let points_ok = level_points.iter().all(|v| spec.children(v).iter().all(|c| self.cones.contains(c)));
            if !(parents_ok && points_ok) {
                break;
            }
            let cones: BTreeSet<Path> = level_points.into_iter().cloned().collect();
            self.points.retain(|p| p.len() < d1);
            self.cones = cones;
            self.depth = d1;
        }
        self
    }

    fn from_parts(
        spec: &GroupSpec,
        cones: impl IntoIterator<Item = Path>,
        points: impl IntoIterator<Item = Path>,
    ) -> ConeRepr {
        let cones: Vec<Path> = cones.into_iter().collect();
        let points: BTreeSet<Path> = points.into_iter().collect();
        let depth = cones.iter().map(Vec::len).chain(points.iter().map(|p| p.len() + 1)).max().unwrap_or(0);
        let mut repr = ConeRepr { depth, cones: BTreeSet::new(), points };
        for c in &cones {
            expand_cone(spec, c, depth, &mut repr.cones, &mut repr.points);
        }
        repr.minimized(spec)
    }

    fn all_at(spec: &GroupSpec, depth: usize) -> (BTreeSet<Path>, BTreeSet<Path>) {
        let mut points = BTreeSet::new();
        let mut layer = vec![Vec::new()];
        for _ in 0..depth {
            let next: Vec<Path> = layer.iter().flat_map(|p| spec.children(p)).collect();
            points.extend(layer);
            layer = next;
        }
        (layer.into_iter().collect(), points)
    }
}

impl ClopenSet {
    pub fn model(&self) -> &Model {
        &self.model
    }

    fn spec(&self) -> &GroupSpec {
        self.model.spec()
    }

    pub(crate) fn from_cylinder_paths(model: &Model, paths: impl IntoIterator<Item = Path>) -> Self {
        ClopenSet { model: model.clone(), repr: Repr::Cylinders(canonical_cylinders(model.spec(), paths)) }
    }

    pub(crate) fn from_cone_paths(
        model: &Model,
        cones: impl IntoIterator<Item = Path>,
        points: impl IntoIterator<Item = Path>,
    ) -> Self {
        ClopenSet { model: model.clone(), repr: Repr::Cones(ConeRepr::from_parts(model.spec(), cones, points)) }
    }

    pub fn empty(model: &Model) -> Self {
        let repr = match model.kind() {
            ActionKind::Boundary => Repr::Cylinders(BTreeSet::new()),
            ActionKind::SelfAction => Repr::Cones(ConeRepr::empty()),
        };
        ClopenSet { model: model.clone(), repr }
    }

    pub fn full(model: &Model) -> Self {
        match model.kind() {
            ActionKind::Boundary => ClopenSet::from_cylinder_paths(model, [Vec::new()]),
            ActionKind::SelfAction => ClopenSet::from_cone_paths(model, [Vec::new()], []),
        }
    }

    fn require(model: &Model, kind: ActionKind) -> Result<()> {
        if model.kind() == kind {
            Ok(())
        } else {
            Err(Error::ModelMismatch)
        }
    }

    /// Union of cylinders `[w]` (boundary model).
    pub fn cylinders(model: &Model, words: &[Word]) -> Result<Self> {
        ClopenSet::require(model, ActionKind::Boundary)?;
        Ok(ClopenSet::from_cylinder_paths(model, words.iter().map(|w| model.spec().letters(w))))
    }

    pub fn cylinder(model: &Model, w: &Word) -> Result<Self> {
        ClopenSet::cylinders(model, std::slice::from_ref(w))
    }

    /// Union of cones `C(w)` and single points (self-action model).
    pub fn cones_and_points(model: &Model, cones: &[Word], points: &[Word]) -> Result<Self> {
        ClopenSet::require(model, ActionKind::SelfAction)?;
        let spec = model.spec();
        Ok(ClopenSet::from_cone_paths(
            model,
            cones.iter().map(|w| spec.letters(w)),
            points.iter().map(|w| spec.letters(w)),
        ))
    }

    pub fn cone(model: &Model, w: &Word) -> Result<Self> {
        ClopenSet::cones_and_points(model, std::slice::from_ref(w), &[])
    }

    pub fn points(model: &Model, words: &[Word]) -> Result<Self> {
        ClopenSet::cones_and_points(model, &[], words)
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            Repr::Cylinders(s) => s.is_empty(),
            Repr::Cones(c) => c.cones.is_empty() && c.points.is_empty(),
        }
    }

    pub fn is_full(&self) -> bool {
        *self == ClopenSet::full(&self.model)
    }

    fn check_model(&self, other: &ClopenSet) -> Result<()> {
        if self.model == other.model {
            Ok(())
        } else {
            Err(Error::ModelMismatch)
        }
    }

    fn aligned(&self, other: &ClopenSet) -> (ConeRepr, ConeRepr) {
        match (&self.repr, &other.repr) {
            (Repr::Cones(a), Repr::Cones(b)) => {
                let d = a.depth.max(b.depth);
                (a.expanded(self.spec(), d), b.expanded(self.spec(), d))
            }
            _ => unreachable!("aligned called on boundary sets"),
        }
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check_model(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Cylinders(a), Repr::Cylinders(b)) => {
                ClopenSet::from_cylinder_paths(&self.model, a.iter().chain(b).cloned())
            }
            _ => {
                let (a, b) = self.aligned(other);
                ClopenSet::from_cone_paths(
                    &self.model,
                    a.cones.into_iter().chain(b.cones),
                    a.points.into_iter().chain(b.points),
                )
            }
        })
    }

    pub fn intersect(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check_model(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Cylinders(a), Repr::Cylinders(b)) => {
                let left = a.iter().filter(|u| has_prefix_in(b, u));
                let right = b.iter().filter(|v| has_prefix_in(a, v));
                ClopenSet::from_cylinder_paths(&self.model, left.chain(right).cloned())
            }
            _ => {
                let (a, b) = self.aligned(other);
                let cones: Vec<Path> = a.cones.intersection(&b.cones).cloned().collect();
                let points: Vec<Path> = a.points.intersection(&b.points).cloned().collect();
                ClopenSet::from_cone_paths(&self.model, cones, points)
            }
        })
    }

    pub fn complement(&self) -> ClopenSet {
        match &self.repr {
            Repr::Cylinders(a) => {
                ClopenSet { model: self.model.clone(), repr: Repr::Cylinders(complement_cylinders(self.spec(), a)) }
            }
            Repr::Cones(c) => {
                let (all_cones, all_points) = ConeRepr::all_at(self.spec(), c.depth);
                let cones: Vec<Path> = all_cones.difference(&c.cones).cloned().collect();
                let points: Vec<Path> = all_points.difference(&c.points).cloned().collect();
                ClopenSet::from_cone_paths(&self.model, cones, points)
            }
        }
    }

    pub fn difference(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check_model(other)?;
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &ClopenSet) -> Result<bool> {
        self.check_model(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Cylinders(a), Repr::Cylinders(b)) => a.iter().all(|u| has_prefix_in(b, u)),
            _ => {
                let (a, b) = self.aligned(other);
                a.cones.is_subset(&b.cones) && a.points.is_subset(&b.points)
            }
        })
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> Result<bool> {
        self.check_model(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Cylinders(a), Repr::Cylinders(b)) => {
                a.iter().all(|u| !has_prefix_in(b, u) && !has_extension_in(b, u))
            }
            _ => {
                let (a, b) = self.aligned(other);
                a.cones.is_disjoint(&b.cones) && a.points.is_disjoint(&b.points)
            }
        })
    }

    pub fn union_all<'a>(model: &Model, sets: impl IntoIterator<Item = &'a ClopenSet>) -> Result<ClopenSet> {
        sets.into_iter().try_fold(ClopenSet::empty(model), |acc, s| acc.union(s))
    }

    /// Exact image `g . self`.
    pub fn translate(&self, g: &Word) -> ClopenSet {
        if g.is_identity() {
            return self.clone();
        }
        let spec = self.spec();
        let gl = spec.letters(g);
        match &self.repr {
            Repr::Cylinders(a) => {
                if self.is_full() {
                    return self.clone();
                }
                let mut out = Vec::new();
                for w in a {
                    translate_cylinder(spec, &gl, w, &mut out);
                }
                ClopenSet::from_cylinder_paths(&self.model, out)
            }
            Repr::Cones(c) => {
                let mut cones = Vec::new();
                let mut points = Vec::new();
                for w in &c.cones {
                    translate_cone(spec, &gl, w, &mut cones, &mut points);
                }
                for p in &c.points {
                    points.push(spec.left_mul_path(&gl, p).0);
                }
                ClopenSet::from_cone_paths(&self.model, cones, points)
            }
        }
    }

    /// Self-action: whether the element is in the set. Boundary: whether every
    /// end extending the prefix lies in the set.
    pub fn contains_path(&self, p: &[Letter]) -> bool {
        match &self.repr {
            Repr::Cylinders(a) => has_prefix_in(a, p),
            Repr::Cones(c) => c.contains(p),
        }
    }

    /// Membership query. For the boundary, `w` is a finite prefix of an end and
    /// the answer is `None` when the prefix does not decide membership.
    pub fn membership(&self, w: &Word) -> Option<bool> {
        let p = self.spec().letters(w);
        match &self.repr {
            Repr::Cylinders(a) => {
                if has_prefix_in(a, &p) {
                    Some(true)
                } else if has_extension_in(a, &p) {
                    None
                } else {
                    Some(false)
                }
            }
            Repr::Cones(c) => Some(c.contains(&p)),
        }
    }

    /// Deepest prefix used by the representation.
    pub fn depth(&self) -> usize {
        match &self.repr {
            Repr::Cylinders(a) => a.iter().map(Vec::len).max().unwrap_or(0),
            Repr::Cones(c) => c.depth,
        }
    }

    /// The partition of the whole space into depth-`d` cells: cylinders of
    /// length `d`, or points of length `< d` and cones of length `d`.
    pub fn depth_partition(model: &Model, d: usize) -> Vec<ClopenSet> {
        let spec = model.spec();
        match model.kind() {
            ActionKind::Boundary => {
                spec.paths_of_length(d).into_iter().map(|p| ClopenSet::from_cylinder_paths(model, [p])).collect()
            }
            ActionKind::SelfAction => {
                let (cones, points) = ConeRepr::all_at(spec, d);
                points
                    .into_iter()
                    .map(|p| ClopenSet::from_cone_paths(model, [], [p]))
                    .chain(cones.into_iter().map(|c| ClopenSet::from_cone_paths(model, [c], [])))
                    .collect()
            }
        }
    }

    pub fn cylinder_words(&self) -> Vec<Word> {
        match &self.repr {
            Repr::Cylinders(a) => a.iter().map(|p| self.spec().word_of(p)).collect(),
            Repr::Cones(_) => Vec::new(),
        }
    }

    /// `(depth, cones, points)` of a self-action set.
    pub fn cone_parts(&self) -> Option<(usize, Vec<Word>, Vec<Word>)> {
        match &self.repr {
            Repr::Cones(c) => Some((
                c.depth,
                c.cones.iter().map(|p| self.spec().word_of(p)).collect(),
                c.points.iter().map(|p| self.spec().word_of(p)).collect(),
            )),
            Repr::Cylinders(_) => None,
        }
    }

    pub(crate) fn prefix_paths(&self) -> Vec<(Path, bool)> {
        match &self.repr {
            Repr::Cylinders(a) => a.iter().map(|p| (p.clone(), false)).collect(),
            Repr::Cones(c) => {
                c.cones.iter().map(|p| (p.clone(), false)).chain(c.points.iter().map(|p| (p.clone(), true))).collect()
            }
        }
    }

    /// Compact human-readable rendering, e.g. `[a] ∪ [b^-1]` or `C(a) ∪ {e}`.
    pub fn describe(&self) -> String {
        let spec = self.spec();
        let mut parts = Vec::new();
        match &self.repr {
            Repr::Cylinders(a) => {
                if a.contains(&Vec::new()) {
                    return "X".into();
                }
                parts.extend(a.iter().map(|p| format!("[{}]", spec.format_word(&spec.word_of(p)))));
            }
            Repr::Cones(c) => {
                if c.depth == 0 && !c.cones.is_empty() {
                    return "G".into();
                }
                parts.extend(c.cones.iter().map(|p| format!("C({})", spec.format_word(&spec.word_of(p)))));
                if !c.points.is_empty() {
                    let mut s = String::from("{");
                    for (i, p) in c.points.iter().enumerate() {
                        if i > 0 {
                            s.push_str(", ");
                        }
                        let _ = write!(s, "{}", spec.format_word(&spec.word_of(p)));
                    }
                    s.push('}');
                    parts.push(s);
                }
            }
        }
        if parts.is_empty() {
            "∅".into()
        } else {
            parts.join(" ∪ ")
        }
    }
}
