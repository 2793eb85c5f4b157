//! Order conditions on languages: checking, searching, connections, and the
//! induced order on two-sided sequences.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Letter, Word};
use crate::iet::IntervalExchange;
use crate::language::FiniteLanguage;
use crate::par::{self, Execution};
use crate::sequence::Window;

pub const MAX_SEARCH_ALPHABET: usize = 8;
pub const MAX_ALL_FLIPS_ALPHABET: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("alphabet of {0} letters exceeds the search bound")]
    AlphabetTooLarge(usize),
    #[error("windows are not aligned on the same index range")]
    MisalignedWindows,
    #[error("order is not a permutation of the alphabet")]
    NotAPermutation,
}

/// Two total orders on the alphabet, each listed from smallest to largest,
/// and a flip set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderSpec {
    pub order_d: Word,
    pub order_a: Word,
    pub flips: BTreeSet<Letter>,
}

fn ranks(order: &[Letter]) -> Vec<usize> {
    let mut r = vec![usize::MAX; order.len()];
    for (i, &l) in order.iter().enumerate() {
        r[l as usize] = i;
    }
    r
}

fn is_permutation(order: &[Letter], n: usize) -> bool {
    order.len() == n && {
        let mut seen = vec![false; n];
        order.iter().all(|&l| (l as usize) < n && !std::mem::replace(&mut seen[l as usize], true))
    }
}

impl OrderSpec {
    pub fn new(order_d: Word, order_a: Word, flips: BTreeSet<Letter>, n: usize) -> Result<Self, OrderError> {
        if !is_permutation(&order_d, n) || !is_permutation(&order_a, n) || flips.iter().any(|&f| f as usize >= n) {
            return Err(OrderError::NotAPermutation);
        }
        Ok(OrderSpec { order_d, order_a, flips })
    }

    /// The orders of departure and arrival intervals of an interval exchange.
    pub fn from_iet(t: &IntervalExchange) -> Self {
        OrderSpec { order_d: t.order_d().to_vec(), order_a: t.order_a().to_vec(), flips: t.flip_set() }
    }

    /// Parse from strings such as `"132"`, `"231"` and `""`.
    pub fn parse(alphabet: &Alphabet, d: &str, a: &str, flips: &str) -> Result<Self, OrderError> {
        let f = alphabet.parse(flips)?.into_iter().collect();
        OrderSpec::new(alphabet.parse(d)?, alphabet.parse(a)?, f, alphabet.len())
    }

    fn flip_parity(&self, w: &[Letter]) -> bool {
        w.iter().filter(|l| self.flips.contains(l)).count() % 2 == 1
    }

    /// Both orders reversed; the order condition is unchanged.
    pub fn reversed(&self) -> Self {
        let mut d = self.order_d.clone();
        let mut a = self.order_a.clone();
        d.reverse();
        a.reverse();
        OrderSpec { order_d: d, order_a: a, flips: self.flips.clone() }
    }

    /// Representative of `{self, self.reversed()}` with the smaller `orderD`.
    pub fn canonical(&self) -> Self {
        let r = self.reversed();
        if r.order_d < self.order_d {
            r
        } else {
            self.clone()
        }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        let chain = |o: &[Letter], tag: &str| {
            o.iter().map(|&l| alphabet.char_of(l).to_string()).collect::<Vec<_>>().join(&format!("<{tag}"))
        };
        format!(
            "{}, {}, F={}",
            chain(&self.order_d, "D"),
            chain(&self.order_a, "A"),
            alphabet.render_set(self.flips.iter())
        )
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> OrderSpecJson {
        let names = |w: &[Letter]| w.iter().map(|&l| alphabet.char_of(l).to_string()).collect();
        OrderSpecJson {
            order_d: names(&self.order_d),
            order_a: names(&self.order_a),
            flips: names(&self.flips.iter().copied().collect::<Vec<_>>()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSpecJson {
    #[serde(rename = "orderD")]
    pub order_d: Vec<String>,
    #[serde(rename = "orderA")]
    pub order_a: Vec<String>,
    #[serde(default)]
    pub flips: Vec<String>,
}

impl OrderSpecJson {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<OrderSpec, OrderError> {
        let letters = |v: &[String]| v.iter().map(|s| alphabet.letter(s)).collect::<Result<Vec<_>, _>>();
        OrderSpec::new(
            letters(&self.order_d)?,
            letters(&self.order_a)?,
            letters(&self.flips)?.into_iter().collect(),
            alphabet.len(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderVerdict {
    Holds,
    /// `awc` and `bwd` are in the language but `a <_A b` disagrees with `c <_(D,w) d`.
    Counterexample { w: Word, a: Letter, b: Letter, c: Letter, d: Letter },
}

/// Check every bispecial of length `<= N - 2` against `spec`.
pub fn check_order_condition(lang: &FiniteLanguage, spec: &OrderSpec) -> OrderVerdict {
    let ra = ranks(&spec.order_a);
    let rd = ranks(&spec.order_d);
    for w in lang.bispecials() {
        let odd = spec.flip_parity(&w);
        let pairs: Vec<(Letter, Letter)> = lang.extension_pairs(&w).into_iter().collect();
        for &(a, c) in &pairs {
            for &(b, d) in &pairs {
                if a == b || c == d {
                    continue;
                }
                let left = ra[a as usize] < ra[b as usize];
                let right = (rd[c as usize] < rd[d as usize]) != odd;
                if left != right {
                    return OrderVerdict::Counterexample { w: w.clone(), a, b, c, d };
                }
            }
        }
    }
    OrderVerdict::Holds
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionWitness {
    pub w: Word,
    /// Consecutive in `A(w)` under the arrival order.
    pub a: Letter,
    pub a2: Letter,
    /// Consecutive in `D(w)` under the departure order at `w`.
    pub b: Letter,
    pub b2: Letter,
    /// Membership of `awb`, `awb'`, `a'wb`, `a'wb'`.
    pub bits: [bool; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionReport {
    pub witnesses: Vec<ConnectionWitness>,
    /// Set when the order condition fails, in which case witnesses carry no meaning.
    pub warning: Option<String>,
}

pub fn find_connections(lang: &FiniteLanguage, spec: &OrderSpec) -> ConnectionReport {
    let warning = match check_order_condition(lang, spec) {
        OrderVerdict::Holds => None,
        OrderVerdict::Counterexample { w, .. } => Some(format!(
            "order condition fails at {:?}; connections are not meaningful",
            lang.alphabet().render(&w)
        )),
    };
    let ra = ranks(&spec.order_a);
    let rd = ranks(&spec.order_d);
    let mut witnesses = Vec::new();
    for w in lang.bispecials() {
        let odd = spec.flip_parity(&w);
        let pairs = lang.extension_pairs(&w);
        let mut arr: Vec<Letter> = pairs.iter().map(|p| p.0).collect::<BTreeSet<_>>().into_iter().collect();
        let mut dep: Vec<Letter> = pairs.iter().map(|p| p.1).collect::<BTreeSet<_>>().into_iter().collect();
        arr.sort_by_key(|&l| ra[l as usize]);
        dep.sort_by_key(|&l| rd[l as usize]);
        if odd {
            dep.reverse();
        }
        for x in arr.windows(2) {
            for y in dep.windows(2) {
                let (a, a2, b, b2) = (x[0], x[1], y[0], y[1]);
                let bits = [
                    pairs.contains(&(a, b)),
                    pairs.contains(&(a, b2)),
                    pairs.contains(&(a2, b)),
                    pairs.contains(&(a2, b2)),
                ];
                if bits == [true, false, false, true] {
                    witnesses.push(ConnectionWitness { w: w.clone(), a, a2, b, b2, bits });
                }
            }
        }
    }
    ConnectionReport { witnesses, warning }
}

/// All subsets of the alphabet, for small alphabets.
pub fn all_flip_sets(n: usize) -> Result<Vec<BTreeSet<Letter>>, OrderError> {
    if n > MAX_ALL_FLIPS_ALPHABET {
        return Err(OrderError::AlphabetTooLarge(n));
    }
    Ok((0u32..1 << n).map(|m| (0..n as Letter).filter(|&l| m >> l & 1 == 1).collect()).collect())
}

fn permutations(n: usize) -> Vec<Word> {
    fn go(cur: &mut Word, used: &mut Vec<bool>, out: &mut Vec<Word>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for l in 0..used.len() {
            if !used[l] {
                used[l] = true;
                cur.push(l as Letter);
                go(cur, used, out);
                cur.pop();
                used[l] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Linear extensions of `before` (pairs `x` must precede `y`), in lexicographic order.
fn linear_extensions(n: usize, before: &BTreeSet<(Letter, Letter)>) -> Vec<Word> {
    fn go(n: usize, before: &BTreeSet<(Letter, Letter)>, cur: &mut Word, used: &mut Vec<bool>, out: &mut Vec<Word>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for l in 0..n as Letter {
            if used[l as usize] {
                continue;
            }
            let blocked = before.iter().any(|&(x, y)| y == l && !used[x as usize]);
            if blocked {
                continue;
            }
            used[l as usize] = true;
            cur.push(l);
            go(n, before, cur, used, out);
            cur.pop();
            used[l as usize] = false;
        }
    }
    let mut out = Vec::new();
    go(n, before, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Letters occurring in no bispecial of length `<= N - 2`. Flipping them
/// cannot change any departure order used by the order condition.
pub fn inert_letters(lang: &FiniteLanguage) -> BTreeSet<Letter> {
    let used: BTreeSet<Letter> = lang.bispecials().into_iter().flatten().collect();
    lang.alphabet().letters().filter(|l| !used.contains(l)).collect()
}

/// Every order spec (up to simultaneous reversal) under which the order
/// condition holds, for each candidate flip set.
///
/// Flip sets are reduced by removing inert letters before deduplication, so
/// two candidates that cannot be told apart at this depth give one class.
pub fn search_orders(
    lang: &FiniteLanguage,
    flip_sets: &[BTreeSet<Letter>],
    exec: Execution,
) -> Result<Vec<OrderSpec>, OrderError> {
    let n = lang.alphabet().len();
    if n > MAX_SEARCH_ALPHABET {
        return Err(OrderError::AlphabetTooLarge(n));
    }
    let inert = inert_letters(lang);
    let flips: BTreeSet<BTreeSet<Letter>> =
        flip_sets.iter().map(|f| f.difference(&inert).copied().collect()).collect();
    let flips: Vec<BTreeSet<Letter>> = flips.into_iter().collect();
    let bis: Vec<(Word, Vec<(Letter, Letter)>)> =
        lang.bispecials().into_iter().map(|w| { let p = lang.extension_pairs(&w).into_iter().collect(); (w, p) }).collect();

    let found: Vec<Vec<OrderSpec>> = par::map(exec, &permutations(n), |order_d| {
        let rd = ranks(order_d);
        let mut out = Vec::new();
        'flip: for f in &flips {
            let mut before: BTreeSet<(Letter, Letter)> = BTreeSet::new();
            for (w, pairs) in &bis {
                let odd = w.iter().filter(|l| f.contains(l)).count() % 2 == 1;
                for &(a, c) in pairs {
                    for &(b, d) in pairs {
                        if a == b || c == d {
                            continue;
                        }
                        if (rd[c as usize] < rd[d as usize]) != odd {
                            if before.contains(&(b, a)) {
                                continue 'flip;
                            }
                            before.insert((a, b));
                        }
                    }
                }
            }
            for order_a in linear_extensions(n, &before) {
                let spec = OrderSpec { order_d: order_d.clone(), order_a, flips: f.clone() };
                out.push(spec.canonical());
            }
        }
        out
    });
    let classes: BTreeSet<(BTreeSet<Letter>, Word, Word)> =
        found.into_iter().flatten().map(|s| (s.flips, s.order_d, s.order_a)).collect();
    Ok(classes.into_iter().map(|(flips, order_d, order_a)| OrderSpec { order_d, order_a, flips }).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqOrder {
    Less,
    Greater,
    Equal,
    Unresolved,
}

fn smallest_period(w: &[Letter]) -> usize {
    (1..=w.len()).find(|&p| w.iter().zip(&w[p..]).all(|(x, y)| x == y)).unwrap_or(w.len())
}

/// Compare two sequences known on the same window around index 0.
///
/// The first difference at or after index 0 decides with the departure order,
/// the first difference before index 0 with the arrival order; both are
/// reversed when an odd number of flipped letters separates the difference
/// from index 0. Identical windows are `Equal` only when they show a period
/// at least twice on each side of the origin.
pub fn sequence_order(spec: &OrderSpec, x: &Window, y: &Window) -> Result<SeqOrder, OrderError> {
    if x.origin != y.origin || x.letters.len() != y.letters.len() {
        return Err(OrderError::MisalignedWindows);
    }
    let rd = ranks(&spec.order_d);
    let ra = ranks(&spec.order_a);
    let decide = |less: bool, odd: bool| if less != odd { SeqOrder::Less } else { SeqOrder::Greater };
    let mut odd = false;
    for i in 0..x.forward_len() as i64 {
        let (a, b) = (x.at(i).unwrap(), y.at(i).unwrap());
        if a != b {
            return Ok(decide(rd[a as usize] < rd[b as usize], odd));
        }
        odd ^= spec.flips.contains(&a);
    }
    let mut odd = false;
    for j in 1..=x.backward_len() as i64 {
        let (a, b) = (x.at(-j).unwrap(), y.at(-j).unwrap());
        if a != b {
            return Ok(decide(ra[a as usize] < ra[b as usize], odd));
        }
        odd ^= spec.flips.contains(&a);
    }
    let p = smallest_period(&x.letters);
    if x.forward_len() >= 2 * p && x.backward_len() >= 2 * p {
        Ok(SeqOrder::Equal)
    } else {
        Ok(SeqOrder::Unresolved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_reverses_forward_comparison() {
        let a = Alphabet::from_chars("12");
        let spec = OrderSpec::parse(&a, "12", "12", "1").unwrap();
        let x = Window::new(a.parse("11").unwrap(), 0);
        let y = Window::new(a.parse("12").unwrap(), 0);
        assert_eq!(sequence_order(&spec, &x, &y).unwrap(), SeqOrder::Greater);
        let plain = OrderSpec::parse(&a, "12", "12", "").unwrap();
        assert_eq!(sequence_order(&plain, &x, &y).unwrap(), SeqOrder::Less);
    }

    #[test]
    fn identical_windows() {
        let a = Alphabet::from_chars("12");
        let spec = OrderSpec::parse(&a, "12", "21", "").unwrap();
        let short = Window::new(a.parse("1211").unwrap(), 2);
        assert_eq!(sequence_order(&spec, &short, &short).unwrap(), SeqOrder::Unresolved);
        let periodic = Window::new(a.parse("12121212").unwrap(), 4);
        assert_eq!(sequence_order(&spec, &periodic, &periodic).unwrap(), SeqOrder::Equal);
        let other = Window::new(a.parse("1212121").unwrap(), 4);
        assert_eq!(sequence_order(&spec, &periodic, &other).unwrap_err(), OrderError::MisalignedWindows);
    }

    #[test]
    fn canonical_picks_smaller_departure_order() {
        let a = Alphabet::from_chars("123");
        let s = OrderSpec::parse(&a, "231", "132", "").unwrap();
        let c = s.canonical();
        assert_eq!(a.render(&c.order_d), "132");
        assert_eq!(a.render(&c.order_a), "231");
    }
}
