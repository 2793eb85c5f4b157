//! Finite windows of bi-infinite sequences, and finite descriptions of
//! eventually periodic or substitutive bi-infinite sequences.
//!
//! A [`TwoSidedSeq`] is `... left tail | middle | right tail ...`. Index 0 is
//! the first letter of the middle word (or of the right tail when the middle is
//! empty). Periodic tails are written in reading order, left to right; a
//! substitutive tail is the fixed point of its substitution read from the
//! middle outward, so a substitutive left tail appears mirrored.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Letter, Word};
use crate::exactnum::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("periodic tail needs a nonempty word")]
    EmptyPeriod,
    #[error("substitution does not extend its seed {0:?} to an infinite fixed point")]
    NotProlongable(char),
    #[error("substitution is not primitive on the letters it reaches")]
    NotPrimitive,
    #[error("exact frequencies for substitutions on {0} letters must be supplied explicitly")]
    FrequenciesRequired(usize),
    #[error("frequency vector has {got} entries, alphabet has {want}")]
    FrequencyLength { got: usize, want: usize },
}

/// A finite piece of a bi-infinite word, holding indices `-origin .. len - origin`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    pub letters: Word,
    pub origin: usize,
}

impl Window {
    pub fn new(letters: Word, origin: usize) -> Self {
        assert!(origin <= letters.len(), "origin outside the window");
        Window { letters, origin }
    }

    /// Number of available indices at or after 0.
    pub fn forward_len(&self) -> usize {
        self.letters.len() - self.origin
    }

    pub fn backward_len(&self) -> usize {
        self.origin
    }

    /// Letter at signed index `i`, if inside the window.
    pub fn at(&self, i: i64) -> Option<Letter> {
        let j = i + self.origin as i64;
        if j < 0 || j as usize >= self.letters.len() {
            None
        } else {
            Some(self.letters[j as usize])
        }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        let mut s = alphabet.render(&self.letters[..self.origin]);
        s.push('|');
        s.push_str(&alphabet.render(&self.letters[self.origin..]));
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailKind {
    Periodic { word: Word },
    Substitutive { rules: BTreeMap<Letter, Word>, seed: Letter },
}

/// One infinite side of a sequence together with its exact letter frequencies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailDescriptor {
    pub kind: TailKind,
    /// Indexed by letter; entries for letters that never occur are zero.
    pub frequencies: Vec<ExactScalar>,
}

impl TailDescriptor {
    pub fn periodic(word: Word, alphabet_len: usize) -> Result<Self, SequenceError> {
        if word.is_empty() {
            return Err(SequenceError::EmptyPeriod);
        }
        let mut counts = vec![0i64; alphabet_len];
        for &l in &word {
            counts[l as usize] += 1;
        }
        let n = word.len() as i64;
        let frequencies = counts.iter().map(|&c| ExactScalar::ratio(c, n)).collect();
        Ok(TailDescriptor { kind: TailKind::Periodic { word }, frequencies })
    }

    /// Substitutive tail with exact Perron frequencies (computed for two-letter supports).
    pub fn substitutive(
        rules: BTreeMap<Letter, Word>,
        seed: Letter,
        alphabet_len: usize,
        frequencies: Option<Vec<ExactScalar>>,
        alphabet: &Alphabet,
    ) -> Result<Self, SequenceError> {
        let image = rules.get(&seed).ok_or(SequenceError::NotProlongable(alphabet.char_of(seed)))?;
        if image.len() < 2 || image[0] != seed {
            return Err(SequenceError::NotProlongable(alphabet.char_of(seed)));
        }
        let support = reachable(&rules, seed);
        if !is_primitive(&rules, &support) {
            return Err(SequenceError::NotPrimitive);
        }
        let frequencies = match frequencies {
            Some(f) => {
                if f.len() != alphabet_len {
                    return Err(SequenceError::FrequencyLength { got: f.len(), want: alphabet_len });
                }
                f
            }
            None => perron_frequencies(&rules, &support, alphabet_len)?,
        };
        Ok(TailDescriptor { kind: TailKind::Substitutive { rules, seed }, frequencies })
    }

    /// First `n` letters of the fixed point (substitutive) or of the period
    /// repeated (periodic), in the period's own reading order.
    pub fn prefix(&self, n: usize) -> Word {
        match &self.kind {
            TailKind::Periodic { word } => (0..n).map(|i| word[i % word.len()]).collect(),
            TailKind::Substitutive { rules, seed } => fixed_point_prefix(rules, *seed, n),
        }
    }

    pub fn period(&self) -> Option<&Word> {
        match &self.kind {
            TailKind::Periodic { word } => Some(word),
            TailKind::Substitutive { .. } => None,
        }
    }
}

fn reachable(rules: &BTreeMap<Letter, Word>, seed: Letter) -> Vec<Letter> {
    let mut seen = vec![seed];
    let mut i = 0;
    while i < seen.len() {
        if let Some(img) = rules.get(&seen[i]) {
            for &l in img {
                if !seen.contains(&l) {
                    seen.push(l);
                }
            }
        }
        i += 1;
    }
    seen.sort();
    seen
}

fn is_primitive(rules: &BTreeMap<Letter, Word>, support: &[Letter]) -> bool {
    // Every letter of the support must reach every other one.
    support.iter().all(|&a| {
        if !rules.contains_key(&a) {
            return false;
        }
        let r = reachable(rules, a);
        support.iter().all(|b| r.contains(b))
    })
}

pub fn fixed_point_prefix(rules: &BTreeMap<Letter, Word>, seed: Letter, n: usize) -> Word {
    let mut w = vec![seed];
    while w.len() < n {
        let next: Word = w.iter().flat_map(|l| rules[l].iter().copied()).collect();
        assert!(next.len() > w.len(), "substitution does not grow");
        w = next;
    }
    w.truncate(n);
    w
}

fn square_free_split(n: &BigInt) -> (BigInt, u64) {
    // n = k^2 * d with d square-free; n is small in practice (2x2 discriminants).
    let mut k = BigInt::from(1);
    let mut d = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= d {
        let p2 = &p * &p;
        while (&d % &p2).is_zero() {
            d /= &p2;
            k *= &p;
        }
        p += 1;
    }
    let d64 = u64::try_from(&d).expect("discriminant too large");
    (k, d64)
}

fn perron_frequencies(
    rules: &BTreeMap<Letter, Word>,
    support: &[Letter],
    alphabet_len: usize,
) -> Result<Vec<ExactScalar>, SequenceError> {
    let mut freq = vec![ExactScalar::zero(); alphabet_len];
    match support.len() {
        1 => {
            freq[support[0] as usize] = ExactScalar::one();
            Ok(freq)
        }
        2 => {
            let (x, y) = (support[0], support[1]);
            let count = |a: Letter, b: Letter| rules[&b].iter().filter(|&&l| l == a).count() as i64;
            // Incidence matrix [[p, q], [r, s]], column b holds the letter counts of rules[b].
            let (p, q, r, s) = (count(x, x), count(x, y), count(y, x), count(y, y));
            let tr = p + s;
            let disc = BigInt::from((p - s) * (p - s) + 4 * q * r);
            let (k, d) = square_free_split(&disc);
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            let lambda = if d == 1 {
                ExactScalar::from_rational((BigRational::from_integer(BigInt::from(tr)) + BigRational::from_integer(k)) * &half)
            } else {
                ExactScalar::from_parts(
                    BigRational::from_integer(BigInt::from(tr)) * &half,
                    BigRational::from_integer(k) * &half,
                    d,
                )
            };
            // Eigenvector (v1, v2) of the Perron eigenvalue.
            let (v1, v2) = if q != 0 {
                (ExactScalar::one(), (&lambda - ExactScalar::from_int(p)) / ExactScalar::from_int(q))
            } else {
                ((&lambda - ExactScalar::from_int(s)) / ExactScalar::from_int(r), ExactScalar::one())
            };
            let total = &v1 + &v2;
            freq[x as usize] = &v1 / &total;
            freq[y as usize] = &v2 / &total;
            Ok(freq)
        }
        n => Err(SequenceError::FrequenciesRequired(n)),
    }
}

/// `... left | middle | right ...` with index 0 at the start of `middle`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSidedSeq {
    pub left: TailDescriptor,
    pub middle: Word,
    pub right: TailDescriptor,
}

impl TwoSidedSeq {
    /// Letters at indices `-1, -2, ..., -n`.
    pub fn left_outward(&self, n: usize) -> Word {
        match &self.left.kind {
            TailKind::Periodic { word } => {
                let p = word.len();
                (0..n).map(|k| word[(p - 1 - (k % p)) % p]).collect()
            }
            TailKind::Substitutive { .. } => self.left.prefix(n),
        }
    }

    /// Letters at indices `|middle|, |middle|+1, ...` (n of them).
    pub fn right_outward(&self, n: usize) -> Word {
        self.right.prefix(n)
    }

    /// Window of the sequence over indices `from .. to` (exclusive), with origin at index `at`.
    pub fn window_between(&self, from: i64, to: i64, at: i64) -> Window {
        assert!(from <= at && at <= to);
        let m = self.middle.len() as i64;
        let left_need = if from < 0 { (-from) as usize } else { 0 };
        let right_need = if to > m { (to - m) as usize } else { 0 };
        let left = self.left_outward(left_need);
        let right = self.right_outward(right_need);
        let letters: Word = (from..to)
            .map(|i| {
                if i < 0 {
                    left[(-1 - i) as usize]
                } else if i < m {
                    self.middle[i as usize]
                } else {
                    right[(i - m) as usize]
                }
            })
            .collect();
        Window::new(letters, (at - from) as usize)
    }

    /// Window of the shifted sequence `S^m z` over `[-radius, radius)`.
    pub fn shifted_window(&self, m: i64, radius: usize) -> Window {
        let r = radius as i64;
        self.window_between(m - r, m + r, m)
    }

    pub fn letter_at(&self, i: i64) -> Letter {
        self.window_between(i, i + 1, i).letters[0]
    }

    /// Whether both tails are periodic, i.e. the sequence is eventually periodic on both sides.
    pub fn is_eventually_periodic(&self) -> bool {
        matches!(self.left.kind, TailKind::Periodic { .. }) && matches!(self.right.kind, TailKind::Periodic { .. })
    }
}

// JSON forms.

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailJson {
    Periodic {
        word: String,
    },
    Substitutive {
        rules: BTreeMap<String, String>,
        seed: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frequencies: Option<Vec<ExactScalar>>,
    },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TwoSidedJson {
    pub left: TailJson,
    #[serde(default)]
    pub middle: String,
    pub right: TailJson,
}

impl TailJson {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<TailDescriptor, SequenceError> {
        match self {
            TailJson::Periodic { word } => TailDescriptor::periodic(alphabet.parse(word)?, alphabet.len()),
            TailJson::Substitutive { rules, seed, frequencies } => {
                let mut r = BTreeMap::new();
                for (k, v) in rules {
                    r.insert(alphabet.letter(k)?, alphabet.parse(v)?);
                }
                TailDescriptor::substitutive(r, alphabet.letter(seed)?, alphabet.len(), frequencies.clone(), alphabet)
            }
        }
    }

    pub fn from_descriptor(t: &TailDescriptor, alphabet: &Alphabet) -> Self {
        match &t.kind {
            TailKind::Periodic { word } => TailJson::Periodic { word: alphabet.render(word) },
            TailKind::Substitutive { rules, seed } => TailJson::Substitutive {
                rules: rules.iter().map(|(k, v)| (alphabet.char_of(*k).to_string(), alphabet.render(v))).collect(),
                seed: alphabet.char_of(*seed).to_string(),
                frequencies: Some(t.frequencies.clone()),
            },
        }
    }
}

impl TwoSidedJson {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<TwoSidedSeq, SequenceError> {
        Ok(TwoSidedSeq {
            left: self.left.resolve(alphabet)?,
            middle: alphabet.parse(&self.middle)?,
            right: self.right.resolve(alphabet)?,
        })
    }

    pub fn from_seq(z: &TwoSidedSeq, alphabet: &Alphabet) -> Self {
        TwoSidedJson {
            left: TailJson::from_descriptor(&z.left, alphabet),
            middle: alphabet.render(&z.middle),
            right: TailJson::from_descriptor(&z.right, alphabet),
        }
    }
}

/// Least common multiple helper for period bookkeeping.
pub fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib_rules() -> BTreeMap<Letter, Word> {
        let mut r = BTreeMap::new();
        r.insert(0, vec![0, 1]);
        r.insert(1, vec![0]);
        r
    }

    #[test]
    fn fibonacci_prefix() {
        let a = Alphabet::from_chars("12");
        assert_eq!(a.render(&fixed_point_prefix(&fib_rules(), 0, 13)), "1211212112112");
    }

    #[test]
    fn fibonacci_frequencies_are_golden() {
        let a = Alphabet::from_chars("12");
        let t = TailDescriptor::substitutive(fib_rules(), 0, 2, None, &a).unwrap();
        assert_eq!(t.frequencies[0], ExactScalar::quad(-1, 2, 1, 2, 5));
        assert_eq!(t.frequencies[1], ExactScalar::quad(3, 2, -1, 2, 5));
    }

    #[test]
    fn periodic_left_tail_reads_backwards() {
        let a = Alphabet::from_chars("123");
        let z = TwoSidedSeq {
            left: TailDescriptor::periodic(a.parse("332").unwrap(), 3).unwrap(),
            middle: vec![],
            right: TailDescriptor::periodic(a.parse("331").unwrap(), 3).unwrap(),
        };
        let w = z.window_between(-6, 6, 0);
        assert_eq!(a.render(&w.letters), "332332331331");
    }

    #[test]
    fn substitutive_left_tail_is_mirrored() {
        let a = Alphabet::from_chars("123");
        let mut r = BTreeMap::new();
        r.insert(0u8, vec![0u8, 1]);
        r.insert(1u8, vec![0u8]);
        let fib = TailDescriptor::substitutive(r, 0, 3, None, &a).unwrap();
        let z = TwoSidedSeq { left: fib.clone(), middle: vec![2], right: fib };
        let w = z.window_between(-5, 6, 0);
        assert_eq!(a.render(&w.letters), "21121312112");
    }

    #[test]
    fn non_prolongable_seed_rejected() {
        let a = Alphabet::from_chars("12");
        let r = fib_rules();
        assert!(TailDescriptor::substitutive(r, 1, 2, None, &a).is_err());
    }
}
