//! Factorial extendable languages truncated at a finite depth, and the word
//! combinatorics computed on them.
//!
//! Every predicate here is a statement "up to depth N": a reported violation
//! is a proof about the infinite language, a reported success is only bounded.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Letter, Word};
use crate::iet::{CodedMap, IetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LanguageError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Iet(#[from] IetError),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("orbit depth budget {0} is too small for this coding depth")]
    DepthBudgetExceeded(usize),
    #[error("window of length {len} is shorter than the required {need}")]
    WindowTooShort { len: usize, need: usize },
    #[error("word {0} has no left or no right extension")]
    NotExtendable(String),
    #[error("factor of {0} is missing from a shorter level")]
    NotFactorial(String),
}

/// Levels `L_0 = {ε}, L_1, ..., L_N`, each sorted in the alphabet's order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLanguage {
    alphabet: Alphabet,
    levels: Vec<BTreeSet<Word>>,
}

impl FiniteLanguage {
    /// Validated constructor; `levels[k]` holds the words of length `k + 1`.
    pub fn from_levels(alphabet: Alphabet, levels: Vec<BTreeSet<Word>>) -> Result<Self, LanguageError> {
        if levels.is_empty() {
            return Err(LanguageError::ZeroDepth);
        }
        let mut all = vec![std::iter::once(Vec::new()).collect::<BTreeSet<Word>>()];
        all.extend(levels);
        let lang = FiniteLanguage { alphabet, levels: all };
        lang.validate()?;
        Ok(lang)
    }

    pub(crate) fn from_full_levels(alphabet: Alphabet, levels: Vec<BTreeSet<Word>>) -> Self {
        debug_assert!(levels.first().is_some_and(|l| l.len() == 1));
        FiniteLanguage { alphabet, levels }
    }

    /// Factor closure of `words`, truncated at depth `n`.
    pub fn from_words(alphabet: Alphabet, words: &[Word], n: usize) -> Self {
        let mut levels: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); n + 1];
        levels[0].insert(Vec::new());
        for w in words {
            for (k, level) in levels.iter_mut().enumerate().take(n.min(w.len()) + 1).skip(1) {
                level.extend(w.windows(k).map(<[Letter]>::to_vec));
            }
        }
        FiniteLanguage { alphabet, levels }
    }

    fn validate(&self) -> Result<(), LanguageError> {
        let n = self.depth();
        for k in 1..=n {
            for w in &self.levels[k] {
                if w.len() != k || w.iter().any(|&l| l as usize >= self.alphabet.len()) {
                    return Err(LanguageError::NotFactorial(self.alphabet.render(w)));
                }
                if k > 1 && (!self.levels[k - 1].contains(&w[1..]) || !self.levels[k - 1].contains(&w[..k - 1])) {
                    return Err(LanguageError::NotFactorial(self.alphabet.render(w)));
                }
            }
        }
        for k in 1..n {
            for w in &self.levels[k] {
                if self.left_extensions(w).is_empty() || self.right_extensions(w).is_empty() {
                    return Err(LanguageError::NotExtendable(self.alphabet.render(w)));
                }
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `L_k`, with `L_0 = {ε}`.
    pub fn level(&self, k: usize) -> &BTreeSet<Word> {
        &self.levels[k]
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        w.len() <= self.depth() && self.levels[w.len()].contains(w)
    }

    /// Same language cut at a smaller depth.
    pub fn truncated(&self, n: usize) -> FiniteLanguage {
        FiniteLanguage { alphabet: self.alphabet.clone(), levels: self.levels[..=n.min(self.depth())].to_vec() }
    }

    /// Letters `a` with `aw` in the language (needs `|w| < N`).
    pub fn left_extensions(&self, w: &[Letter]) -> BTreeSet<Letter> {
        let k = w.len() + 1;
        if k > self.depth() {
            return BTreeSet::new();
        }
        self.alphabet
            .letters()
            .filter(|&a| {
                let mut aw = Vec::with_capacity(k);
                aw.push(a);
                aw.extend_from_slice(w);
                self.levels[k].contains(&aw)
            })
            .collect()
    }

    /// Letters `b` with `wb` in the language (needs `|w| < N`).
    pub fn right_extensions(&self, w: &[Letter]) -> BTreeSet<Letter> {
        let k = w.len() + 1;
        if k > self.depth() {
            return BTreeSet::new();
        }
        self.alphabet
            .letters()
            .filter(|&b| {
                let mut wb = w.to_vec();
                wb.push(b);
                self.levels[k].contains(&wb)
            })
            .collect()
    }

    /// Pairs `(a, b)` with `awb` in the language (needs `|w| <= N - 2`).
    pub fn extension_pairs(&self, w: &[Letter]) -> BTreeSet<(Letter, Letter)> {
        let k = w.len() + 2;
        let mut out = BTreeSet::new();
        if k > self.depth() {
            return out;
        }
        for a in self.left_extensions(w) {
            for b in self.right_extensions(w) {
                let mut awb = Vec::with_capacity(k);
                awb.push(a);
                awb.extend_from_slice(w);
                awb.push(b);
                if self.levels[k].contains(&awb) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    /// Words of length at most `N - 2` with at least two left and two right
    /// extensions, shortest first.
    pub fn bispecials(&self) -> Vec<Word> {
        let top = self.depth().saturating_sub(2);
        let mut out = Vec::new();
        if self.depth() < 2 {
            return out;
        }
        for k in 0..=top {
            for w in &self.levels[k] {
                let pairs = self.extension_pairs(w);
                let a: BTreeSet<Letter> = pairs.iter().map(|p| p.0).collect();
                let d: BTreeSet<Letter> = pairs.iter().map(|p| p.1).collect();
                if a.len() > 1 && d.len() > 1 {
                    out.push(w.clone());
                }
            }
        }
        out
    }

    /// Image under a letter-to-letter map into `target`.
    pub fn map_letters(&self, target: &Alphabet, phi: &[Letter]) -> FiniteLanguage {
        let levels = self
            .levels
            .iter()
            .map(|lv| lv.iter().map(|w| w.iter().map(|&l| phi[l as usize]).collect()).collect())
            .collect();
        FiniteLanguage { alphabet: target.clone(), levels }
    }

    /// Union with another language over the same alphabet, at the smaller depth.
    pub fn union(&self, other: &FiniteLanguage) -> FiniteLanguage {
        let n = self.depth().min(other.depth());
        let levels = (0..=n).map(|k| self.levels[k].union(&other.levels[k]).cloned().collect()).collect();
        FiniteLanguage { alphabet: self.alphabet.clone(), levels }
    }

    /// Same words over a larger alphabet (existing letters keep their indices).
    pub fn with_alphabet(&self, alphabet: Alphabet) -> FiniteLanguage {
        assert!(alphabet.len() >= self.alphabet.len());
        FiniteLanguage { alphabet, levels: self.levels.clone() }
    }

    pub fn to_json(&self) -> LanguageJson {
        LanguageJson {
            alphabet: self.alphabet.names(),
            depth: self.depth(),
            levels: self.levels[1..].iter().map(|lv| lv.iter().map(|w| self.alphabet.render(w)).collect()).collect(),
        }
    }

    /// First level (and smallest differing word) where two languages differ.
    pub fn first_divergence(&self, other: &FiniteLanguage) -> Option<(usize, Word)> {
        let n = self.depth().min(other.depth());
        (1..=n).find_map(|k| {
            let a = &self.levels[k];
            let b = &other.levels[k];
            a.symmetric_difference(b).next().map(|w| (k, w.clone()))
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LanguageJson {
    pub alphabet: Vec<String>,
    pub depth: usize,
    pub levels: Vec<Vec<String>>,
}

impl LanguageJson {
    pub fn resolve(&self) -> Result<FiniteLanguage, LanguageError> {
        let alphabet = Alphabet::from_names(&self.alphabet)?;
        if self.levels.len() != self.depth {
            return Err(LanguageError::NotFactorial(format!("{} levels for depth {}", self.levels.len(), self.depth)));
        }
        let levels = self
            .levels
            .iter()
            .map(|lv| lv.iter().map(|s| alphabet.parse(s)).collect::<Result<BTreeSet<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        FiniteLanguage::from_levels(alphabet, levels)
    }
}

/// Words of length `1..=n` whose cylinders have nonempty interior.
pub fn language_from_iet<M: CodedMap + ?Sized>(map: &M, n: usize) -> Result<FiniteLanguage, LanguageError> {
    if n == 0 {
        return Err(LanguageError::ZeroDepth);
    }
    if let Some(budget) = map.depth_budget() {
        if n > budget {
            return Err(LanguageError::DepthBudgetExceeded(budget));
        }
    }
    let alphabet = map.coding_alphabet().clone();
    let levels = map.engine().language_levels(alphabet.len(), n);
    Ok(FiniteLanguage::from_full_levels(alphabet, levels))
}

/// Factors of length `<= n` read in the cores of the windows.
///
/// The first and last `max(margin, n)` cells of every window only serve as
/// context: a word is collected when it lies entirely inside the core.
pub fn language_from_sequences(
    alphabet: &Alphabet,
    windows: &[Word],
    n: usize,
    margin: usize,
) -> Result<FiniteLanguage, LanguageError> {
    if n == 0 {
        return Err(LanguageError::ZeroDepth);
    }
    let margin = margin.max(n);
    let need = n + 2 * margin;
    let mut levels: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); n + 1];
    levels[0].insert(Vec::new());
    for w in windows {
        if w.len() < need {
            return Err(LanguageError::WindowTooShort { len: w.len(), need });
        }
        let core = &w[margin..w.len() - margin];
        for (k, level) in levels.iter_mut().enumerate().skip(1) {
            level.extend(core.windows(k).map(<[Letter]>::to_vec));
        }
    }
    let lang = FiniteLanguage { alphabet: alphabet.clone(), levels };
    lang.validate()?;
    Ok(lang)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Complexity {
    /// `p[k]` is the number of words of length `k + 1`.
    pub p: Vec<usize>,
    /// `s[k] = p(k + 2) - p(k + 1)`.
    pub s: Vec<i64>,
}

impl Complexity {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\tp\ts\n");
        for (k, p) in self.p.iter().enumerate() {
            match self.s.get(k) {
                Some(s) => out.push_str(&format!("{}\t{}\t{}\n", k + 1, p, s)),
                None => out.push_str(&format!("{}\t{}\t\n", k + 1, p)),
            }
        }
        out
    }
}

pub fn complexity_profile(lang: &FiniteLanguage) -> Complexity {
    let p: Vec<usize> = (1..=lang.depth()).map(|k| lang.level(k).len()).collect();
    let s = p.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect();
    Complexity { p, s }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Classification {
    Weak,
    Neutral,
    Strong,
    LocallyStrongOnly,
    Ordinary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BispecialReport {
    pub word: Word,
    pub arrivals: BTreeSet<Letter>,
    pub departures: BTreeSet<Letter>,
    pub pairs: BTreeSet<(Letter, Letter)>,
    pub classification: Classification,
    /// Subsets `(A', D')` with more than `#A' + #D' - 1` pairs, for non-strong words.
    pub witness: Option<(BTreeSet<Letter>, BTreeSet<Letter>)>,
}

fn subset(items: &[Letter], mask: u32) -> BTreeSet<Letter> {
    items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &l)| l).collect()
}

/// Smallest pair of subsets (by total size, then by bitmask) breaking the local count.
fn locally_strong_witness(
    arrivals: &[Letter],
    departures: &[Letter],
    pairs: &BTreeSet<(Letter, Letter)>,
) -> Option<(BTreeSet<Letter>, BTreeSet<Letter>)> {
    let (na, nd) = (arrivals.len(), departures.len());
    for size in 2..=na + nd {
        for ma in 1u32..(1 << na) {
            let ka = ma.count_ones() as usize;
            if ka >= size {
                continue;
            }
            for md in 1u32..(1 << nd) {
                if md.count_ones() as usize != size - ka {
                    continue;
                }
                let count = pairs
                    .iter()
                    .filter(|(a, b)| {
                        let ia = arrivals.iter().position(|x| x == a).unwrap();
                        let ib = departures.iter().position(|x| x == b).unwrap();
                        ma >> ia & 1 == 1 && md >> ib & 1 == 1
                    })
                    .count();
                if count + 1 > size {
                    return Some((subset(arrivals, ma), subset(departures, md)));
                }
            }
        }
    }
    None
}

/// Report for any word of length `<= N - 2`; non-bispecial words are `Ordinary`.
pub fn bispecial_report(lang: &FiniteLanguage, w: &[Letter]) -> BispecialReport {
    let pairs = lang.extension_pairs(w);
    let arrivals: BTreeSet<Letter> = pairs.iter().map(|p| p.0).collect();
    let departures: BTreeSet<Letter> = pairs.iter().map(|p| p.1).collect();
    let (classification, witness) = if arrivals.len() < 2 || departures.len() < 2 {
        (Classification::Ordinary, None)
    } else {
        let bound = arrivals.len() + departures.len() - 1;
        if pairs.len() > bound {
            (Classification::Strong, None)
        } else {
            let a: Vec<Letter> = arrivals.iter().copied().collect();
            let d: Vec<Letter> = departures.iter().copied().collect();
            match locally_strong_witness(&a, &d, &pairs) {
                Some(wit) => (Classification::LocallyStrongOnly, Some(wit)),
                None if pairs.len() < bound => (Classification::Weak, None),
                None => (Classification::Neutral, None),
            }
        }
    };
    BispecialReport { word: w.to_vec(), arrivals, departures, pairs, classification, witness }
}

/// Every bispecial word of length `<= N - 2`, including ε, shortest first.
pub fn classify_bispecials(lang: &FiniteLanguage) -> Vec<BispecialReport> {
    lang.bispecials().iter().map(|w| bispecial_report(lang, w)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RauzyGraph {
    pub n: usize,
    pub vertices: Vec<Word>,
    /// `(from, to)` vertex indices, one per word of length `n + 1`.
    pub edges: Vec<(usize, usize)>,
    /// The word of length `n + 1` carried by each edge.
    pub edge_words: Vec<Word>,
    /// Component label of each vertex, numbered by first vertex.
    pub component: Vec<usize>,
    pub component_count: usize,
}

impl RauzyGraph {
    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        const COLORS: [&str; 8] = ["black", "red", "blue", "darkgreen", "orange", "purple", "brown", "gray"];
        let mut out = format!("digraph rauzy_{} {{\n", self.n);
        for (i, v) in self.vertices.iter().enumerate() {
            let name = if v.is_empty() { "ε".to_string() } else { alphabet.render(v) };
            out.push_str(&format!(
                "  v{i} [label=\"{name}\", color={}];\n",
                COLORS[self.component[i] % COLORS.len()]
            ));
        }
        for (&(a, b), w) in self.edges.iter().zip(&self.edge_words) {
            out.push_str(&format!("  v{a} -> v{b} [label=\"{}\"];\n", alphabet.render(w)));
        }
        out.push_str("}\n");
        out
    }

    /// Whether the component forms a single directed cycle.
    pub fn is_cycle(&self, comp: usize) -> bool {
        let members: Vec<usize> = (0..self.vertices.len()).filter(|&v| self.component[v] == comp).collect();
        let edges: Vec<&(usize, usize)> = self.edges.iter().filter(|(a, _)| self.component[*a] == comp).collect();
        if edges.len() != members.len() {
            return false;
        }
        let mut indeg = BTreeMap::new();
        let mut outdeg = BTreeMap::new();
        for (a, b) in edges {
            *outdeg.entry(*a).or_insert(0) += 1;
            *indeg.entry(*b).or_insert(0) += 1;
        }
        members.iter().all(|v| indeg.get(v) == Some(&1) && outdeg.get(v) == Some(&1))
    }
}

/// `G_n`: vertices `L_n`, an edge `av -> vb` for each `avb` in `L_(n+1)`.
pub fn rauzy_graph(lang: &FiniteLanguage, n: usize) -> RauzyGraph {
    assert!(n < lang.depth(), "Rauzy graph needs n <= N - 1");
    let vertices: Vec<Word> = lang.level(n).iter().cloned().collect();
    let index: BTreeMap<&Word, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges = Vec::new();
    let mut edge_words = Vec::new();
    for w in lang.level(n + 1) {
        edges.push((index[&w[..n].to_vec()], index[&w[1..].to_vec()]));
        edge_words.push(w.clone());
    }
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = BTreeMap::new();
    let mut component = Vec::with_capacity(vertices.len());
    for v in 0..vertices.len() {
        let r = find(&mut parent, v);
        let next = label.len();
        component.push(*label.entry(r).or_insert(next));
    }
    RauzyGraph { n, vertices, edges, edge_words, component, component_count: label.len() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recurrence {
    RecurrentUpTo(usize),
    /// No word of the language of length `<= N` starts and ends with this word.
    Violation(Word),
}

/// Look for a return of every word of length `<= check_depth` within depth `N`.
pub fn recurrence_report(lang: &FiniteLanguage, check_depth: usize) -> Recurrence {
    for k in 1..=check_depth.min(lang.depth()) {
        for w in lang.level(k) {
            let returns = (k + 1..=lang.depth()).any(|m| lang.level(m).iter().any(|u| u.starts_with(w) && u.ends_with(w)));
            if !returns {
                return Recurrence::Violation(w.clone());
            }
        }
    }
    Recurrence::RecurrentUpTo(check_depth)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComponentKind {
    Periodic,
    Aperiodic,
}

/// One sub-language per component of `G_n`.
pub fn decompose_components(lang: &FiniteLanguage, n: usize) -> Vec<(FiniteLanguage, ComponentKind)> {
    assert!(n >= 1, "components are taken on G_n with n >= 1");
    let g = rauzy_graph(lang, n);
    (0..g.component_count)
        .map(|c| {
            let verts: BTreeSet<&Word> =
                g.vertices.iter().enumerate().filter(|(i, _)| g.component[*i] == c).map(|(_, v)| v).collect();
            let mut levels: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); lang.depth() + 1];
            levels[0].insert(Vec::new());
            for v in &verts {
                for (k, level) in levels.iter_mut().enumerate().take(n).skip(1) {
                    level.extend(v.windows(k).map(<[Letter]>::to_vec));
                }
            }
            for (k, level) in levels.iter_mut().enumerate().skip(n) {
                for w in lang.level(k) {
                    if w.windows(n).all(|f| verts.contains(&f.to_vec())) {
                        level.insert(w.clone());
                    }
                }
            }
            let kind = if g.is_cycle(c) { ComponentKind::Periodic } else { ComponentKind::Aperiodic };
            (FiniteLanguage::from_full_levels(lang.alphabet().clone(), levels), kind)
        })
        .collect()
}

/// Left special words by length and `s(n) = sum (#A(w) - 1)` over `L_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftSpecialProfile {
    /// Number of left special words of each length `0..N-1`.
    pub counts: Vec<usize>,
    /// `sum over w in L_n of (#A(w) - 1)` for `n = 0..N-1`.
    pub weighted: Vec<usize>,
}

impl LeftSpecialProfile {
    /// Left special words stay on finitely many prefix chains: the weighted
    /// count never grows, and bounds the number of chains at every length.
    pub fn holds(&self) -> bool {
        self.weighted.windows(2).all(|w| w[1] <= w[0])
            && self.counts.iter().zip(&self.weighted).all(|(c, w)| c <= w)
    }
}

pub fn left_special_profile(lang: &FiniteLanguage) -> LeftSpecialProfile {
    let mut counts = Vec::new();
    let mut weighted = Vec::new();
    for k in 0..lang.depth() {
        let mut c = 0;
        let mut s = 0;
        for w in lang.level(k) {
            let a = lang.left_extensions(w).len();
            if a > 1 {
                c += 1;
            }
            s += a.saturating_sub(1);
        }
        counts.push(c);
        weighted.push(s);
    }
    LeftSpecialProfile { counts, weighted }
}
