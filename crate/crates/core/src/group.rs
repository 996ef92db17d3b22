//! Free products of cyclic groups.
//!
//! Elements are kept in syllable normal form: a list of `(factor, exponent)`
//! pairs with adjacent factors distinct, finite-cyclic exponents in
//! `1..n`. Multiplication is concatenation followed by reduction at the
//! junction, which solves the word problem for every group used here
//! (free groups, `Z_2 * Z_3`, `Z_n`, `Z`).
//!
//! Besides syllables, elements can be spelled as *letters*: an
//! infinite-cyclic syllable `a^k` is `|k|` letters `a^±1`, a finite-cyclic
//! syllable is a single letter. Letter sequences label the vertices of the
//! tree whose ends form the boundary, so the clopen algebra works on them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Verdict};

/// One cyclic factor; `order == 0` means infinite cyclic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub order: u64,
}

impl Factor {
    pub fn infinite(name: &str) -> Self {
        Factor { name: name.to_string(), order: 0 }
    }

    pub fn finite(name: &str, order: u64) -> Self {
        Factor { name: name.to_string(), order }
    }

    pub fn is_infinite(&self) -> bool {
        self.order == 0
    }
}

#[derive(Deserialize)]
struct RawSpec {
    factors: Vec<Factor>,
}

impl TryFrom<RawSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        GroupSpec::new(raw.factors)
    }
}

/// A free product of cyclic groups, one generator per factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct GroupSpec {
    factors: Vec<Factor>,
}

/// A single letter of the tree spelling. For infinite factors `exp` is `±1`,
/// for a factor of order `n` it lies in `1..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub factor: usize,
    pub exp: i64,
}

impl Letter {
    fn key(&self) -> (usize, u64, bool) {
        (self.factor, self.exp.unsigned_abs(), self.exp < 0)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Vertex of the letter tree, i.e. a group element spelled letter by letter.
pub type Path = Vec<Letter>;

/// A reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    fn key(&self) -> impl Iterator<Item = (usize, u64, bool)> + '_ {
        self.syllables.iter().map(|&(f, k)| (f, k.unsigned_abs(), k < 0))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(other.key())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of a group element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

impl GroupSpec {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("at least one factor is required".into()));
        }
        let mut seen = BTreeSet::new();
        for f in &factors {
            let valid_name =
                !f.name.is_empty() && f.name != "e" && f.name.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !valid_name {
                return Err(Error::InvalidGroup(format!(
                    "generator name `{}` must be a non-empty identifier other than `e`",
                    f.name
                )));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidGroup(format!("duplicate generator `{}`", f.name)));
            }
            if f.order == 1 {
                return Err(Error::InvalidGroup(format!(
                    "factor `{}` has order 1; finite orders must be at least 2",
                    f.name
                )));
            }
        }
        Ok(GroupSpec { factors })
    }

    /// Free group on the given generators.
    pub fn free(names: &[&str]) -> Result<Self> {
        GroupSpec::new(names.iter().map(|n| Factor::infinite(n)).collect())
    }

    /// Free product of cyclic groups; order 0 is infinite cyclic.
    pub fn free_product(factors: &[(&str, u64)]) -> Result<Self> {
        GroupSpec::new(factors.iter().map(|&(n, o)| Factor { name: n.into(), order: o }).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// True when the group itself is finite (a single finite cyclic factor).
    pub fn is_finite(&self) -> bool {
        self.factors.len() == 1 && !self.factors[0].is_infinite()
    }

    /// True when the space of ends is infinite, i.e. the boundary is a Cantor set.
    pub fn has_cantor_boundary(&self) -> bool {
        match self.factors.len() {
            1 => false,
            2 => !(self.factors[0].order == 2 && self.factors[1].order == 2),
            _ => true,
        }
    }

    fn normalize(&self, factor: usize, exp: i64) -> i64 {
        match self.factors[factor].order {
            0 => exp,
            n => exp.rem_euclid(n as i64),
        }
    }

    fn push_syllable(&self, stack: &mut Vec<(usize, i64)>, factor: usize, exp: i64) {
        let exp = self.normalize(factor, exp);
        if exp == 0 {
            return;
        }
        match stack.last_mut() {
            Some((f, k)) if *f == factor => {
                let merged = self.normalize(factor, *k + exp);
                if merged == 0 {
                    stack.pop();
                } else {
                    *k = merged;
                }
            }
            _ => stack.push((factor, exp)),
        }
    }

    /// Builds a word from arbitrary syllables, reducing as it goes.
    pub fn word(&self, syllables: &[(usize, i64)]) -> Result<Word> {
        let mut stack = Vec::with_capacity(syllables.len());
        for &(f, k) in syllables {
            if f >= self.factors.len() {
                return Err(Error::UnknownGenerator(format!("#{f}")));
            }
            self.push_syllable(&mut stack, f, k);
        }
        Ok(Word { syllables: stack })
    }

    pub fn generator(&self, factor: usize) -> Word {
        self.word(&[(factor, 1)]).expect("factor index in range")
    }

    /// Reduces a token list of `(generator name, exponent)` pairs.
    pub fn reduce<S: AsRef<str>>(&self, tokens: &[(S, i64)]) -> Result<Word> {
        let mut stack = Vec::with_capacity(tokens.len());
        for (name, k) in tokens {
            let name = name.as_ref();
            if name == "e" {
                continue;
            }
            let f = self.factor_index(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            self.push_syllable(&mut stack, f, *k);
        }
        Ok(Word { syllables: stack })
    }

    /// Parses `"a^-1 b^2"`; `"e"` and the empty string are the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut tokens = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((name, exp)) => {
                    let exp = exp.parse::<i64>().map_err(|_| Error::WordSyntax {
                        word: text.to_string(),
                        reason: format!("bad exponent in `{tok}`"),
                    })?;
                    (name, exp)
                }
                None => (tok, 1),
            };
            tokens.push((name, exp));
        }
        self.reduce(&tokens)
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_identity() {
            return "e".to_string();
        }
        let parts: Vec<String> = w
            .syllables
            .iter()
            .map(|&(f, k)| {
                let name = &self.factors[f].name;
                if k == 1 {
                    name.clone()
                } else {
                    format!("{name}^{k}")
                }
            })
            .collect();
        parts.join(" ")
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Word {
        let mut stack = u.syllables.clone();
        for &(f, k) in &v.syllables {
            self.push_syllable(&mut stack, f, k);
        }
        Word { syllables: stack }
    }

    pub fn inverse(&self, u: &Word) -> Word {
        let syllables = u.syllables.iter().rev().map(|&(f, k)| (f, self.normalize(f, -k))).collect();
        Word { syllables }
    }

    pub fn pow(&self, u: &Word, k: i64) -> Word {
        let base = if k < 0 { self.inverse(u) } else { u.clone() };
        (0..k.unsigned_abs()).fold(Word::identity(), |acc, _| self.multiply(&acc, &base))
    }

    /// `g u g^-1`.
    pub fn conjugate(&self, g: &Word, u: &Word) -> Word {
        self.multiply(&self.multiply(g, u), &self.inverse(g))
    }

    fn syllable_cost(&self, factor: usize, exp: i64) -> u64 {
        match self.factors[factor].order {
            0 => exp.unsigned_abs(),
            n => {
                let k = exp as u64;
                k.min(n - k)
            }
        }
    }

    /// Word length: `|k|` per infinite syllable, `min(k, n-k)` per finite one.
    pub fn length(&self, w: &Word) -> u64 {
        w.syllables.iter().map(|&(f, k)| self.syllable_cost(f, k)).sum()
    }

    /// Number of letters, i.e. the depth of `w` in the letter tree.
    pub fn letter_length(&self, w: &Word) -> usize {
        w.syllables
            .iter()
            .map(|&(f, k)| if self.factors[f].is_infinite() { k.unsigned_abs() as usize } else { 1 })
            .sum()
    }

    pub fn letters(&self, w: &Word) -> Path {
        let mut out = Vec::with_capacity(w.syllables.len());
        for &(f, k) in &w.syllables {
            if self.factors[f].is_infinite() {
                let step = k.signum();
                out.extend((0..k.unsigned_abs()).map(|_| Letter { factor: f, exp: step }));
            } else {
                out.push(Letter { factor: f, exp: k });
            }
        }
        out
    }

    /// Inverse of [`GroupSpec::letters`]; `path` must be a reduced letter sequence.
    pub fn word_of(&self, path: &[Letter]) -> Word {
        let mut syllables: Vec<(usize, i64)> = Vec::with_capacity(path.len());
        for l in path {
            match syllables.last_mut() {
                Some((f, k)) if *f == l.factor && self.factors[l.factor].is_infinite() => *k += l.exp,
                _ => syllables.push((l.factor, l.exp)),
            }
        }
        Word { syllables }
    }

    pub fn letter_inverse(&self, l: Letter) -> Letter {
        Letter { factor: l.factor, exp: self.normalize(l.factor, -l.exp) }
    }

    /// All letters of one factor, in letter order.
    fn factor_letters(&self, factor: usize) -> Vec<Letter> {
        match self.factors[factor].order {
            0 => vec![Letter { factor, exp: 1 }, Letter { factor, exp: -1 }],
            n => (1..n as i64).map(|exp| Letter { factor, exp }).collect(),
        }
    }

    /// Letters that may follow `last` in a reduced spelling.
    pub fn next_letters(&self, last: Option<Letter>) -> Vec<Letter> {
        let mut out = Vec::new();
        for f in 0..self.factors.len() {
            match last {
                Some(l) if l.factor == f => {
                    if self.factors[f].is_infinite() {
                        out.push(l);
                    }
                }
                _ => out.extend(self.factor_letters(f)),
            }
        }
        out
    }

    pub fn children(&self, path: &[Letter]) -> Vec<Path> {
        self.next_letters(path.last().copied())
            .into_iter()
            .map(|l| {
                let mut c = path.to_vec();
                c.push(l);
                c
            })
            .collect()
    }

    pub fn child_count(&self, path: &[Letter]) -> usize {
        match path.last() {
            None => (0..self.factors.len()).map(|f| self.factor_letters(f).len()).sum(),
            Some(l) => {
                let others: usize =
                    (0..self.factors.len()).filter(|&f| f != l.factor).map(|f| self.factor_letters(f).len()).sum();
                others + usize::from(self.factors[l.factor].is_infinite())
            }
        }
    }

    /// Reduced product `g * w` of letter sequences, together with the number
    /// of letters of `w` that cancelled completely. A letter merged with a
    /// letter of `g` in a finite factor counts as surviving.
    pub fn left_mul_path(&self, g: &[Letter], w: &[Letter]) -> (Path, usize) {
        let mut out = g.to_vec();
        let mut i = 0;
        while i < w.len() {
            match out.last().copied() {
                Some(l) if l.factor == w[i].factor => {
                    let merged = self.normalize(l.factor, l.exp + w[i].exp);
                    out.pop();
                    if merged == 0 {
                        i += 1;
                        continue;
                    }
                    if self.factors[l.factor].is_infinite() {
                        // Same sign: no reduction happens.
                        out.push(l);
                        break;
                    }
                    let cancelled = i;
                    out.push(Letter { factor: l.factor, exp: merged });
                    out.extend_from_slice(&w[i + 1..]);
                    return (out, cancelled);
                }
                _ => break,
            }
        }
        out.extend_from_slice(&w[i..]);
        (out, i)
    }

    /// All vertices of the letter tree at exactly `depth`.
    pub fn paths_of_length(&self, depth: usize) -> Vec<Path> {
        let mut layer = vec![Vec::new()];
        for _ in 0..depth {
            layer = layer.iter().flat_map(|p| self.children(p)).collect();
        }
        layer
    }

    /// All reduced words of length at most `r`, ordered by length and then
    /// lexicographically by (factor, |exponent|, sign).
    pub fn ball(&self, r: u64) -> Vec<Word> {
        let mut out = Vec::new();
        let mut stack: Vec<(Path, u64)> = vec![(Vec::new(), 0)];
        while let Some((path, cost)) = stack.pop() {
            for l in self.next_letters(path.last().copied()) {
                let c = cost + self.letter_cost(l);
                if c <= r {
                    let mut next = path.clone();
                    next.push(l);
                    stack.push((next, c));
                }
            }
            out.push(self.word_of(&path));
        }
        self.sort_by_length(&mut out);
        out
    }

    fn letter_cost(&self, l: Letter) -> u64 {
        if self.factors[l.factor].is_infinite() {
            1
        } else {
            self.syllable_cost(l.factor, l.exp)
        }
    }

    pub fn sort_by_length(&self, words: &mut [Word]) {
        words.sort_by(|a, b| self.length(a).cmp(&self.length(b)).then_with(|| a.cmp(b)));
    }

    /// Exact order, by cyclic reduction: torsion in a free product is
    /// conjugate into a factor.
    pub fn order(&self, t: &Word) -> Order {
        let mut w = t.clone();
        while w.syllables.len() >= 2 && w.syllables[0].0 == w.syllables[w.syllables.len() - 1].0 {
            let (f, k) = w.syllables[0];
            let head = Word { syllables: vec![(f, k)] };
            w = self.multiply(&self.multiply(&self.inverse(&head), &w), &head);
        }
        match w.syllables.as_slice() {
            [] => Order::Finite(1),
            [(f, k)] => match self.factors[*f].order {
                0 => Order::Infinite,
                n => Order::Finite(n / gcd(n, *k as u64)),
            },
            _ => Order::Infinite,
        }
    }

    /// Writes `g = t^k h` with `h` the least element of the coset `<t> g`
    /// (least by length, then word order). For finite order `n`, `k` lies in `0..n`.
    pub fn coset_position(&self, t: &Word, g: &Word) -> (Word, i64) {
        let key = |w: &Word| (self.length(w), w.clone());
        match self.order(t) {
            Order::Finite(n) => {
                let mut best = (key(g), 0i64);
                let mut cur = g.clone();
                for j in 1..n as i64 {
                    cur = self.multiply(t, &cur);
                    let k = key(&cur);
                    if k < best.0 {
                        best = (k, j);
                    }
                }
                let ((_, h), j) = best;
                (h, (-j).rem_euclid(n as i64))
            }
            Order::Infinite => {
                // |t^j g| >= |j| - |g| in letters, so |j| beyond this bound cannot win.
                let bound = (self.letter_length(g) as u64 + self.length(g)) as i64;
                let mut best = (key(g), 0i64);
                let t_inv = self.inverse(t);
                let mut up = g.clone();
                let mut down = g.clone();
                for j in 1..=bound {
                    up = self.multiply(t, &up);
                    down = self.multiply(&t_inv, &down);
                    for (cand, jj) in [(&up, j), (&down, -j)] {
                        let k = key(cand);
                        if k < best.0 {
                            best = (k, jj);
                        }
                    }
                }
                let ((_, h), j) = best;
                (h, -j)
            }
        }
    }

    fn transversal_color(&self, t: &Word, order: Order, g: &Word) -> u8 {
        let (_, k) = self.coset_position(t, g);
        match order {
            Order::Finite(n) if n % 2 == 1 && k == n as i64 - 1 => 3,
            _ => (k.rem_euclid(2) + 1) as u8,
        }
    }

    /// Colours the ball of radius `r` so that no colour class meets its
    /// `t`-translate. Two colours suffice unless `t` has odd finite order.
    pub fn three_partition(&self, t: &Word, r: u64) -> Result<PartitionCert> {
        if t.is_identity() {
            return Err(Error::IdentityElement);
        }
        let order = self.order(t);
        let colors = match order {
            Order::Finite(n) if n % 2 == 1 => 3,
            _ => 2,
        };
        let classes = self
            .ball(r)
            .into_iter()
            .map(|g| {
                let c = self.transversal_color(t, order, &g);
                (g, c)
            })
            .collect();
        Ok(PartitionCert { t: t.clone(), radius: r, colors, rule: RULE_MIN_TRANSVERSAL.to_string(), classes })
    }

    /// Two-class variant with `G_2 = t G_1`; refuses elements of odd order.
    pub fn two_partition(&self, t: &Word, r: u64) -> Result<PartitionCert> {
        if t.is_identity() {
            return Err(Error::IdentityElement);
        }
        if let Order::Finite(n) = self.order(t) {
            if n % 2 == 1 {
                return Err(Error::OddOrder(n));
            }
        }
        self.three_partition(t, r)
    }

    /// Exhaustively searches 2-colourings of the finite orbit `{t^i h}` in which
    /// `x` and `t x` always differ. Returns `None` when no such colouring exists.
    pub fn two_color_orbit(&self, t: &Word, h: &Word) -> Result<Option<Vec<(Word, u8)>>> {
        let n = match self.order(t) {
            Order::Finite(n) => n as usize,
            Order::Infinite => return Err(Error::Malformed("orbit of an infinite-order element is infinite".into())),
        };
        if n > 20 {
            return Err(Error::InvalidBounds(format!("orbit of size {n} is too large to enumerate")));
        }
        let orbit: Vec<Word> = (0..n as i64).map(|i| self.multiply(&self.pow(t, i), h)).collect();
        for mask in 0u32..(1 << n) {
            let color = |i: usize| ((mask >> i) & 1) as u8 + 1;
            if (0..n).all(|i| color(i) != color((i + 1) % n)) {
                return Ok(Some(orbit.into_iter().enumerate().map(|(i, w)| (w, color(i))).collect()));
            }
        }
        Ok(None)
    }
}

const RULE_MIN_TRANSVERSAL: &str = "right-coset transversal by least element; colour = k mod 2, k = n-1 -> 3 for odd n";

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Colouring of a ball such that each class is disjoint from its `t`-translate
/// wherever both lie in the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCert {
    pub t: Word,
    pub radius: u64,
    pub colors: u8,
    pub rule: String,
    pub classes: Vec<(Word, u8)>,
}

impl PartitionCert {
    pub fn class(&self, color: u8) -> Vec<Word> {
        self.classes.iter().filter(|(_, c)| *c == color).map(|(w, _)| w.clone()).collect()
    }

    pub fn verify(&self, spec: &GroupSpec) -> Verdict {
        let window: BTreeMap<&Word, u8> = self.classes.iter().map(|(w, c)| (w, *c)).collect();
        if window.len() != self.classes.len() {
            return Verdict::fail("a word is coloured twice");
        }
        let ball = spec.ball(self.radius);
        if ball.len() != window.len() || ball.iter().any(|w| !window.contains_key(w)) {
            return Verdict::fail("classes do not partition the window");
        }
        if self.t.is_identity() {
            return Verdict::fail("t is the identity");
        }
        for (w, &c) in &window {
            if c == 0 || c > self.colors {
                return Verdict::fail(format!("colour {c} out of range"));
            }
            let tw = spec.multiply(&self.t, w);
            if let Some(&ct) = window.get(&tw) {
                if ct == c {
                    return Verdict::fail(format!("class {c} meets its translate at {}", spec.format_word(&tw)));
                }
                if self.colors == 2 && c == 1 && ct != 2 {
                    return Verdict::fail("second class is not the translate of the first");
                }
            }
        }
        Verdict::Valid
    }
}
