//! Bounded exact-cover / packing search.
//!
//! Every slot must pick exactly one of its options. An option claims a set
//! of cells and belongs to a group; claimed cells must be pairwise disjoint,
//! and at most `max_groups` distinct groups may be used. If `primary` is
//! given, every primary cell must be claimed in the end.
//!
//! Budgets are tried in increasing order, so the first solution uses as few
//! groups as possible. Within a budget, slots are branched on by fewest
//! viable options (ties to the lower index) and options are tried in the
//! order given, which makes the result deterministic.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

#[derive(Clone, Debug)]
pub struct Opt {
    pub group: usize,
    pub cells: FixedBitSet,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub slots: Vec<Vec<Opt>>,
    pub cells: usize,
    pub groups: usize,
    pub primary: Option<FixedBitSet>,
    pub min_groups: usize,
    pub max_groups: usize,
}

/// Search statistics, useful for benchmarks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub memo_hits: u64,
}

/// Memo entries beyond this are not recorded.
const MEMO_CAP: usize = 1 << 20;

struct Dfs<'a> {
    p: &'a Problem,
    budget: usize,
    choice: Vec<Option<usize>>,
    used: FixedBitSet,
    group_uses: Vec<u32>,
    groups_in_use: usize,
    failed: HashSet<(Vec<u32>, FixedBitSet, Vec<usize>)>,
    stats: Stats,
}

impl<'a> Dfs<'a> {
    fn viable(&self, o: &Opt) -> bool {
        o.cells.is_disjoint(&self.used) && (self.group_uses[o.group] > 0 || self.groups_in_use < self.budget)
    }

    fn key(&self) -> (Vec<u32>, FixedBitSet, Vec<usize>) {
        let assigned: Vec<u32> =
            self.choice.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(i, _)| i as u32).collect();
        let groups: Vec<usize> = (0..self.p.groups).filter(|&g| self.group_uses[g] > 0).collect();
        (assigned, self.used.clone(), groups)
    }

    fn run(&mut self) -> bool {
        self.stats.nodes += 1;
        let mut best: Option<(usize, usize)> = None;
        let mut reach = self.p.primary.as_ref().map(|_| self.used.clone());
        for (s, opts) in self.p.slots.iter().enumerate() {
            if self.choice[s].is_some() {
                continue;
            }
            let mut n = 0;
            for o in opts.iter().filter(|o| self.viable(o)) {
                n += 1;
                if let Some(r) = reach.as_mut() {
                    r.union_with(&o.cells);
                }
            }
            if n == 0 {
                return false;
            }
            if best.is_none_or(|(_, m)| n < m) {
                best = Some((s, n));
            }
        }
        if let (Some(primary), Some(reach)) = (&self.p.primary, &reach) {
            if !primary.is_subset(reach) {
                return false;
            }
        }
        let Some((slot, _)) = best else {
            return self.p.primary.as_ref().is_none_or(|pr| pr.is_subset(&self.used));
        };
        let key = self.key();
        if self.failed.contains(&key) {
            self.stats.memo_hits += 1;
            return false;
        }
        for (i, o) in self.p.slots[slot].iter().enumerate() {
            if !self.viable(o) {
                continue;
            }
            self.choice[slot] = Some(i);
            self.used.union_with(&o.cells);
            if self.group_uses[o.group] == 0 {
                self.groups_in_use += 1;
            }
            self.group_uses[o.group] += 1;
            if self.run() {
                return true;
            }
            self.group_uses[o.group] -= 1;
            if self.group_uses[o.group] == 0 {
                self.groups_in_use -= 1;
            }
            self.used.difference_with(&o.cells);
            self.choice[slot] = None;
        }
        if self.failed.len() < MEMO_CAP {
            self.failed.insert(key);
        }
        false
    }
}

/// Returns the chosen option index for every slot, or `None` if no
/// assignment exists within the group budget.
pub fn solve(p: &Problem) -> (Option<Vec<usize>>, Stats) {
    let mut stats = Stats::default();
    for budget in p.min_groups.max(1)..=p.max_groups.min(p.groups) {
        let mut dfs = Dfs {
            p,
            budget,
            choice: vec![None; p.slots.len()],
            used: FixedBitSet::with_capacity(p.cells),
            group_uses: vec![0; p.groups],
            groups_in_use: 0,
            failed: HashSet::new(),
            stats: Stats::default(),
        };
        let ok = dfs.run();
        stats.nodes += dfs.stats.nodes;
        stats.memo_hits += dfs.stats.memo_hits;
        if ok {
            return (Some(dfs.choice.into_iter().map(|c| c.expect("all slots assigned")).collect()), stats);
        }
    }
    (None, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, ones: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &i in ones {
            b.insert(i);
        }
        b
    }

    #[test]
    fn prefers_fewer_groups() {
        let p = Problem {
            slots: vec![
                vec![Opt { group: 0, cells: bits(3, &[0]) }, Opt { group: 1, cells: bits(3, &[1]) }],
                vec![Opt { group: 2, cells: bits(3, &[2]) }, Opt { group: 1, cells: bits(3, &[2]) }],
            ],
            cells: 3,
            groups: 3,
            primary: None,
            min_groups: 1,
            max_groups: 3,
        };
        assert_eq!(solve(&p).0, Some(vec![1, 1]));
    }

    #[test]
    fn exact_cover_is_enforced() {
        let p = Problem {
            slots: vec![vec![Opt { group: 0, cells: bits(2, &[0]) }]],
            cells: 2,
            groups: 1,
            primary: Some(bits(2, &[0, 1])),
            min_groups: 1,
            max_groups: 1,
        };
        assert_eq!(solve(&p).0, None);
    }

    #[test]
    fn conflicting_slots_fail() {
        let o = Opt { group: 0, cells: bits(1, &[0]) };
        let p = Problem {
            slots: vec![vec![o.clone()], vec![o]],
            cells: 1,
            groups: 1,
            primary: None,
            min_groups: 1,
            max_groups: 1,
        };
        assert_eq!(solve(&p).0, None);
    }
}
