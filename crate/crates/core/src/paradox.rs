//! Paradoxical decompositions: certificates, exact verification, bounded
//! search, and the 2-to-1 matching test for the self action.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::clopen::{ActionKind, ClopenSet, Model, Refinement};
use crate::error::{Error, Result, SearchOutcome, Verdict};
use crate::group::Word;
use crate::search::{self, Opt, Problem};

/// Refinements with more atoms than this are refused.
pub const ATOM_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Piece {
    pub set: ClopenSet,
    pub translator: Word,
}

/// Two covers of `domain`: pieces `0..split` and `split..`. The translated
/// pieces must be pairwise disjoint subsets of `domain`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParadoxCert {
    pub domain: ClopenSet,
    pub pieces: Vec<Piece>,
    pub split: usize,
}

impl ParadoxCert {
    pub fn model(&self) -> &Model {
        self.domain.model()
    }

    pub fn first_cover(&self) -> &[Piece] {
        &self.pieces[..self.split.min(self.pieces.len())]
    }

    pub fn second_cover(&self) -> &[Piece] {
        &self.pieces[self.split.min(self.pieces.len())..]
    }

    /// Translators as a sorted multiset.
    pub fn translators(&self) -> Vec<Word> {
        let mut ts: Vec<Word> = self.pieces.iter().map(|p| p.translator.clone()).collect();
        ts.sort();
        ts
    }

    pub fn verify(&self) -> Result<Verdict> {
        Ok(self.check()?.0)
    }

    /// Verdict together with a human-readable trace of every check made.
    pub fn check(&self) -> Result<(Verdict, Vec<String>)> {
        let spec = self.model().spec();
        let mut log = Vec::new();
        if self.pieces.iter().any(|p| p.set.model() != self.model()) {
            return Err(Error::ModelMismatch);
        }
        if self.split == 0 || self.split >= self.pieces.len() {
            return Ok((Verdict::fail("both covers need at least one piece"), log));
        }
        let mut images = Vec::with_capacity(self.pieces.len());
        for (k, p) in self.pieces.iter().enumerate() {
            if p.set.is_empty() {
                return Ok((Verdict::fail(format!("piece {} is empty", k + 1)), log));
            }
            if !p.set.is_subset(&self.domain)? {
                return Ok((Verdict::fail(format!("piece {} is not contained in U", k + 1)), log));
            }
            let img = p.set.translate(&p.translator);
            log.push(format!(
                "piece {}: {} . {} = {}",
                k + 1,
                spec.format_word(&p.translator),
                p.set.describe(),
                img.describe()
            ));
            if !img.is_subset(&self.domain)? {
                return Ok((Verdict::fail(format!("translated piece {} leaves U", k + 1)), log));
            }
            images.push(img);
        }
        for (name, cover) in [("first", self.first_cover()), ("second", self.second_cover())] {
            let union = ClopenSet::union_all(self.model(), cover.iter().map(|p| &p.set))?;
            if union != self.domain {
                return Ok((Verdict::fail(format!("{name} cover does not cover U")), log));
            }
            log.push(format!("{name} cover: union = U"));
        }
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if !images[i].is_disjoint(&images[j])? {
                    return Ok((
                        Verdict::fail(format!("translated pieces not disjoint ({} and {})", i + 1, j + 1)),
                        log,
                    ));
                }
            }
        }
        log.push("translated pieces pairwise disjoint".into());
        Ok((Verdict::Valid, log))
    }
}

fn check_bounds(u: &ClopenSet, r: u64, p: usize) -> Result<()> {
    if u.is_empty() {
        return Err(Error::EmptySet);
    }
    if r < 1 || p < 2 {
        return Err(Error::InvalidBounds("need r >= 1 and p >= 2".into()));
    }
    Ok(())
}

/// The pieces of `u` cut out by the depth-`depth` partition.
pub(crate) fn atoms_of(u: &ClopenSet, depth: usize) -> Result<Vec<ClopenSet>> {
    let mut out = Vec::new();
    for cell in ClopenSet::depth_partition(u.model(), depth) {
        let a = u.intersect(&cell)?;
        if !a.is_empty() {
            out.push(a);
        }
        if out.len() > ATOM_CAP {
            return Err(Error::AtomCap { count: out.len(), cap: ATOM_CAP });
        }
    }
    Ok(out)
}

/// Search with translators from `ball(r)`, pieces from the depth-`r`
/// partition of `u`, and at most `p` pieces in total.
pub fn find_paradox(u: &ClopenSet, r: u64, p: usize) -> Result<SearchOutcome<ParadoxCert>> {
    check_bounds(u, r, p)?;
    let ball = u.model().spec().ball(r);
    find_paradox_with(u, &ball, r as usize, p)
}

/// As [`find_paradox`] with an explicit translator list (tried in order).
pub fn find_paradox_with(
    u: &ClopenSet,
    translators: &[Word],
    depth: usize,
    p: usize,
) -> Result<SearchOutcome<ParadoxCert>> {
    check_bounds(u, 1, p)?;
    let model = u.model().clone();
    let atoms = atoms_of(u, depth)?;
    let nt = translators.len();

    let mut images: Vec<Vec<Option<ClopenSet>>> = Vec::with_capacity(atoms.len());
    let mut family: Vec<ClopenSet> = Vec::new();
    for a in &atoms {
        let mut row = Vec::with_capacity(nt);
        for t in translators {
            let img = a.translate(t);
            if img.is_subset(u)? {
                family.push(img.clone());
                row.push(Some(img));
            } else {
                row.push(None);
            }
        }
        images.push(row);
    }
    family.sort();
    family.dedup();
    let refs: Vec<&ClopenSet> = family.iter().collect();
    let refinement = Refinement::new(&model, &refs)?;
    let mask_of = |s: &ClopenSet| -> FixedBitSet {
        let i = family.binary_search(s).expect("image is in the family");
        refinement.mask(i).clone()
    };

    let mut slots = Vec::with_capacity(2 * atoms.len());
    for cover in 0..2 {
        for row in &images {
            let opts = row
                .iter()
                .enumerate()
                .filter_map(|(ti, img)| img.as_ref().map(|img| Opt { group: cover * nt + ti, cells: mask_of(img) }))
                .collect();
            slots.push(opts);
        }
    }
    let problem =
        Problem { slots, cells: refinement.len(), groups: 2 * nt, primary: None, min_groups: 2, max_groups: p };
    let (choice, _) = search::solve(&problem);
    let Some(choice) = choice else {
        return Ok(SearchOutcome::NotFoundWithinBounds);
    };

    let mut groups: BTreeMap<usize, Vec<&ClopenSet>> = BTreeMap::new();
    for (s, &oi) in choice.iter().enumerate() {
        let g = problem.slots[s][oi].group;
        groups.entry(g).or_default().push(&atoms[s % atoms.len()]);
    }
    let mut pieces = Vec::new();
    let mut split = 0;
    for (g, members) in groups {
        if g < nt {
            split += 1;
        }
        pieces.push(Piece { set: ClopenSet::union_all(&model, members)?, translator: translators[g % nt].clone() });
    }
    let cert = ParadoxCert { domain: u.clone(), pieces, split };
    match cert.verify()? {
        Verdict::Valid => Ok(SearchOutcome::Found(cert)),
        Verdict::Invalid(why) => Err(Error::Unverified(why)),
    }
}

/// Outcome of the 2-to-1 matching test on a finite window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoublingReport {
    /// `|A|` for `A = E ∩ ball(r)`.
    pub window: usize,
    pub flow: usize,
    /// `2|A| - flow`; positive slack rules out certificates with translators in `K`.
    pub slack: usize,
    /// A subset of `A` whose neighbourhood is smaller than twice its size.
    pub witness: Vec<Word>,
    pub witness_neighbourhood: usize,
    pub empty: bool,
}

pub fn doubling_check(e: &ClopenSet, k: &[Word], r: u64) -> Result<DoublingReport> {
    if e.model().kind() != ActionKind::SelfAction {
        return Err(Error::UnsupportedModel("doubling check needs the self action".into()));
    }
    if k.is_empty() {
        return Err(Error::InvalidBounds("translator set is empty".into()));
    }
    let spec = e.model().spec();
    let window: Vec<Word> = spec.ball(r).into_iter().filter(|w| e.membership(w) == Some(true)).collect();
    let mut right: BTreeMap<Word, usize> = BTreeMap::new();
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(window.len());
    for a in &window {
        let mut nbrs = Vec::new();
        for t in k {
            let img = spec.multiply(t, a);
            if e.membership(&img) == Some(true) {
                let next = right.len();
                let id = *right.entry(img).or_insert(next);
                if !nbrs.contains(&id) {
                    nbrs.push(id);
                }
            }
        }
        adj.push(nbrs);
    }
    // Each left vertex is split into two copies: copy c of vertex v is 2v + c.
    let copies = 2 * window.len();
    let mut match_right: Vec<Option<usize>> = vec![None; right.len()];
    let mut match_left: Vec<Option<usize>> = vec![None; copies];
    fn augment(
        x: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_left: &mut [Option<usize>],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &y in &adj[x / 2] {
            if seen[y] {
                continue;
            }
            seen[y] = true;
            let free = match match_right[y] {
                None => true,
                Some(x2) => augment(x2, adj, seen, match_left, match_right),
            };
            if free {
                match_right[y] = Some(x);
                match_left[x] = Some(y);
                return true;
            }
        }
        false
    }
    let mut flow = 0;
    for x in 0..copies {
        let mut seen = vec![false; right.len()];
        if augment(x, &adj, &mut seen, &mut match_left, &mut match_right) {
            flow += 1;
        }
    }
    let mut reached_left = vec![false; copies];
    let mut reached_right = vec![false; right.len()];
    let mut queue: Vec<usize> = (0..copies).filter(|&x| match_left[x].is_none()).collect();
    for &x in &queue {
        reached_left[x] = true;
    }
    while let Some(x) = queue.pop() {
        for &y in &adj[x / 2] {
            if !reached_right[y] {
                reached_right[y] = true;
                if let Some(x2) = match_right[y] {
                    if !reached_left[x2] {
                        reached_left[x2] = true;
                        queue.push(x2);
                    }
                }
            }
        }
    }
    let witness: Vec<Word> = window
        .iter()
        .enumerate()
        .filter(|(v, _)| reached_left[2 * v] || reached_left[2 * v + 1])
        .map(|(_, w)| w.clone())
        .collect();
    Ok(DoublingReport {
        window: window.len(),
        flow,
        slack: copies - flow,
        witness,
        witness_neighbourhood: reached_right.iter().filter(|&&b| b).count(),
        empty: window.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::ActionModel;
    use crate::group::GroupSpec;

    fn f2b() -> Model {
        ActionModel::boundary(GroupSpec::free(&["a", "b"]).unwrap()).unwrap()
    }

    fn w(m: &Model, s: &str) -> Word {
        m.spec().parse_word(s).unwrap()
    }

    fn classical(m: &Model) -> ParadoxCert {
        let x = ClopenSet::full(m);
        let ai = ClopenSet::cylinder(m, &w(m, "a^-1")).unwrap();
        let bi = ClopenSet::cylinder(m, &w(m, "b^-1")).unwrap();
        ParadoxCert {
            domain: x,
            pieces: vec![
                Piece { set: ai.clone(), translator: Word::identity() },
                Piece { set: ai.complement(), translator: w(m, "a") },
                Piece { set: bi.complement(), translator: w(m, "b") },
                Piece { set: bi, translator: w(m, "b^-1") },
            ],
            split: 2,
        }
    }

    #[test]
    fn boundary_certificate_verifies() {
        let m = f2b();
        assert_eq!(classical(&m).verify().unwrap(), Verdict::Valid);
    }

    #[test]
    fn duplicated_piece_is_rejected() {
        let m = f2b();
        let x = ClopenSet::full(&m);
        let cert = ParadoxCert {
            domain: x.clone(),
            pieces: vec![
                Piece { set: x.clone(), translator: Word::identity() },
                Piece { set: x, translator: Word::identity() },
            ],
            split: 1,
        };
        let v = cert.verify().unwrap();
        assert!(v.reason().unwrap().starts_with("translated pieces not disjoint"));
    }

    #[test]
    fn search_finds_four_pieces_on_the_boundary() {
        let m = f2b();
        let cert = find_paradox(&ClopenSet::full(&m), 1, 4).unwrap().found().unwrap();
        assert_eq!(cert.pieces.len(), 4);
        assert!(cert.verify().unwrap().is_valid());
    }

    #[test]
    fn doubling_on_small_windows() {
        let f2 = ActionModel::self_action(GroupSpec::free(&["a", "b"]).unwrap());
        let g = ClopenSet::full(&f2);
        let rep = doubling_check(&g, &f2.spec().ball(1), 2).unwrap();
        assert_eq!((rep.window, rep.flow, rep.slack), (17, 34, 0));

        let z = ActionModel::self_action(GroupSpec::free(&["a"]).unwrap());
        let all = ClopenSet::full(&z);
        let rep = doubling_check(&all, &z.spec().ball(1), 3).unwrap();
        assert_eq!((rep.window, rep.flow, rep.slack), (7, 9, 5));
        assert!(rep.witness_neighbourhood < 2 * rep.witness.len());

        let rep = doubling_check(&ClopenSet::empty(&z), &z.spec().ball(1), 3).unwrap();
        assert!(rep.empty && rep.slack == 0);
        assert!(doubling_check(&ClopenSet::full(&f2b()), &[Word::identity()], 1).is_err());
    }
}
