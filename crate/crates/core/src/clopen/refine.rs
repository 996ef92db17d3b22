//! Common refinements of finite families of clopen sets.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;

use super::{has_extension_in, ActionKind, ClopenSet, Model};
use crate::error::{Error, Result};
use crate::group::Path;

/// One cell of a refinement. Every set of the family either contains a cell
/// or is disjoint from it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Cylinder(Path),
    Cone(Path),
    Point(Path),
}

impl Cell {
    pub fn path(&self) -> &Path {
        match self {
            Cell::Cylinder(p) | Cell::Cone(p) | Cell::Point(p) => p,
        }
    }
}

/// The coarsest tree partition refining every set of a family. `masks[i]`
/// marks the cells contained in set `i`.
#[derive(Clone, Debug)]
pub struct Refinement {
    model: Model,
    cells: Vec<Cell>,
    masks: Vec<FixedBitSet>,
}

impl Refinement {
    pub fn new(model: &Model, sets: &[&ClopenSet]) -> Result<Self> {
        if sets.iter().any(|s| s.model() != model) {
            return Err(Error::ModelMismatch);
        }
        let spec = model.spec();
        let mut closure: BTreeSet<Path> = BTreeSet::new();
        let mut split_points: BTreeSet<Path> = BTreeSet::new();
        closure.insert(Vec::new());
        for s in sets {
            for (p, is_point) in s.prefix_paths() {
                for i in 0..=p.len() {
                    closure.insert(p[..i].to_vec());
                }
                if is_point {
                    split_points.insert(p);
                }
            }
        }
        let cones = model.kind() == ActionKind::SelfAction;
        let mut cells = Vec::new();
        let mut stack = vec![Vec::new()];
        while let Some(node) = stack.pop() {
            let leaf = !has_extension_in(&closure, &node) && !split_points.contains(&node);
            if leaf {
                cells.push(if cones { Cell::Cone(node) } else { Cell::Cylinder(node) });
                continue;
            }
            if cones {
                cells.push(Cell::Point(node.clone()));
            }
            let mut inner = Vec::new();
            for c in spec.children(&node) {
                if closure.contains(&c) {
                    inner.push(c);
                } else {
                    cells.push(if cones { Cell::Cone(c) } else { Cell::Cylinder(c) });
                }
            }
            stack.extend(inner.into_iter().rev());
        }
        cells.sort();
        let masks = sets
            .iter()
            .map(|s| {
                let mut m = FixedBitSet::with_capacity(cells.len());
                for (j, c) in cells.iter().enumerate() {
                    if s.contains_path(c.path()) {
                        m.insert(j);
                    }
                }
                m
            })
            .collect();
        Ok(Refinement { model: model.clone(), cells, masks })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn mask(&self, i: usize) -> &FixedBitSet {
        &self.masks[i]
    }

    pub fn cell_set(&self, j: usize) -> ClopenSet {
        let mut m = FixedBitSet::with_capacity(self.cells.len());
        m.insert(j);
        self.union_of(&m)
    }

    pub fn union_of(&self, mask: &FixedBitSet) -> ClopenSet {
        let chosen = mask.ones().map(|j| &self.cells[j]);
        match self.model.kind() {
            ActionKind::Boundary => ClopenSet::from_cylinder_paths(&self.model, chosen.map(|c| c.path().clone())),
            ActionKind::SelfAction => {
                let mut cones = Vec::new();
                let mut points = Vec::new();
                for c in chosen {
                    match c {
                        Cell::Point(p) => points.push(p.clone()),
                        other => cones.push(other.path().clone()),
                    }
                }
                ClopenSet::from_cone_paths(&self.model, cones, points)
            }
        }
    }

    /// Cells grouped by which sets of the family contain them. Each group is
    /// returned with its membership signature.
    pub fn signature_classes(&self) -> Vec<(ClopenSet, Vec<bool>)> {
        let mut groups: BTreeMap<Vec<bool>, FixedBitSet> = BTreeMap::new();
        for j in 0..self.cells.len() {
            let sig: Vec<bool> = self.masks.iter().map(|m| m.contains(j)).collect();
            groups.entry(sig).or_insert_with(|| FixedBitSet::with_capacity(self.cells.len())).insert(j);
        }
        let mut out: Vec<(ClopenSet, Vec<bool>)> =
            groups.into_iter().map(|(sig, m)| (self.union_of(&m), sig)).collect();
        out.sort();
        out
    }
}

/// The atoms of the Boolean algebra generated by `family`: nonempty sets of
/// the form `∩ (F or its complement)`, in canonical order.
pub fn atoms(family: &[ClopenSet]) -> Result<Vec<ClopenSet>> {
    let model = family.first().ok_or(Error::EmptySet)?.model().clone();
    let refs: Vec<&ClopenSet> = family.iter().collect();
    let r = Refinement::new(&model, &refs)?;
    Ok(r.signature_classes().into_iter().map(|(a, _)| a).collect())
}

/// `P_i = V_i \ (V_1 ∪ … ∪ V_{i-1})`, checking that the `V_i` lie in `u` and cover it.
pub fn refine_cover_to_partition(cover: &[ClopenSet], u: &ClopenSet) -> Result<Vec<ClopenSet>> {
    let mut seen = ClopenSet::empty(u.model());
    let mut out = Vec::with_capacity(cover.len());
    for v in cover {
        if !v.is_subset(u)? {
            return Err(Error::NotACover);
        }
        out.push(v.difference(&seen)?);
        seen = seen.union(v)?;
    }
    if seen != *u {
        return Err(Error::NotACover);
    }
    Ok(out)
}
