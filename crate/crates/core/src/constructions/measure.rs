use serde::Serialize;

use super::ConstructionError;
use crate::alphabet::{Alphabet, Letter};
use crate::exactnum::ExactScalar;

/// Shortest window accepted by [`estimate_measure`] unless the caller asks otherwise.
pub const DEFAULT_MIN_WINDOW: usize = 1000;

/// Positive letter weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Measure {
    weights: Vec<ExactScalar>,
}

impl Measure {
    /// Normalise `weights` (one per letter, all positive) to total mass one.
    pub fn new(weights: Vec<ExactScalar>) -> Result<Self, ConstructionError> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_positive()) {
            return Err(ConstructionError::InvalidMeasure);
        }
        let total = weights.iter().try_fold(ExactScalar::zero(), |acc, w| acc.checked_add(w))?;
        let weights = weights.iter().map(|w| w.checked_div(&total)).collect::<Result<_, _>>()?;
        Ok(Measure { weights })
    }

    pub fn weights(&self) -> &[ExactScalar] {
        &self.weights
    }

    pub fn weight(&self, l: Letter) -> &ExactScalar {
        &self.weights[l as usize]
    }
}

/// Letter frequencies of `window`, as exact fractions of its length.
pub fn estimate_measure(alphabet: &Alphabet, window: &[Letter], min_len: usize) -> Result<Measure, ConstructionError> {
    if window.len() < min_len {
        return Err(ConstructionError::WindowTooShort { len: window.len(), need: min_len });
    }
    let mut counts = vec![0i64; alphabet.len()];
    for &l in window {
        counts[l as usize] += 1;
    }
    if let Some(missing) = alphabet.letters().find(|&l| counts[l as usize] == 0) {
        return Err(ConstructionError::MissingLetter(alphabet.char_of(missing)));
    }
    let n = window.len() as i64;
    Measure::new(counts.iter().map(|&c| ExactScalar::ratio(c, n)).collect())
}
