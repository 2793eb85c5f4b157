//! Interval exchange transformations over exact scalars.
//!
//! All maps here are defined on the open interval `(0, total)` minus finitely
//! many endpoints. Evaluation goes through [`PiecewiseMap`], which is shared
//! with grouped codings and truncated blow-ups.

pub mod blowup;
pub mod grouped;
pub mod piecewise;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Letter, Word};
use crate::exactnum::{ExactError, ExactScalar};

pub use blowup::{BasePoint, BlowupError, BlowupOrbit, LazyBlowupMap, Side};
pub use grouped::{grouped_coding_map, CodingScheme};
pub use piecewise::{Coding, Direction, Piece, PieceImage, PiecewiseMap, Step, StepError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IetError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("lengths sum to {lengths} but image lengths sum to {images}")]
    LengthMismatch { lengths: String, images: String },
    #[error("interval of letter {0} has non-positive length")]
    EmptyInterval(char),
    #[error("standard map needs image length equal to length for letter {0}")]
    StandardSlopeViolation(char),
    #[error("invalid map description: {0}")]
    InvalidSpec(String),
    #[error("point lies outside the domain")]
    OutOfDomain,
    #[error("group {0} is not a contiguous block of defining intervals")]
    NonContiguousGroup(char),
    #[error("images of group {0} are not adjacent in the required order")]
    NonContiguousImage(char),
    #[error("group {0} mixes flipped and unflipped letters")]
    MixedFlipGroup(char),
    #[error("orbit depth budget {0} exceeded")]
    DepthBudgetExceeded(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IetKind {
    Standard,
    Affine,
    #[serde(rename = "lazy")]
    LazyGeneralized,
}

/// Input to [`build_iet`]. `image_lengths = None` means "same as lengths".
#[derive(Clone, Debug)]
pub struct IetSpec {
    pub alphabet: Alphabet,
    pub lengths: Vec<ExactScalar>,
    pub image_lengths: Option<Vec<ExactScalar>>,
    pub order_d: Word,
    pub order_a: Word,
    pub flips: BTreeSet<Letter>,
    pub kind: IetKind,
}

#[derive(Clone, Debug)]
pub struct IntervalExchange {
    alphabet: Alphabet,
    lengths: Vec<ExactScalar>,
    image_lengths: Vec<ExactScalar>,
    order_d: Word,
    order_a: Word,
    flips: Vec<bool>,
    kind: IetKind,
    total: ExactScalar,
    left_d: Vec<ExactScalar>,
    left_a: Vec<ExactScalar>,
    map: PiecewiseMap,
}

fn check_permutation(order: &[Letter], n: usize, what: &str) -> Result<(), IetError> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(IetError::InvalidSpec(format!("{what} has {} letters, expected {n}", order.len())));
    }
    for &l in order {
        let i = l as usize;
        if i >= n || seen[i] {
            return Err(IetError::InvalidSpec(format!("{what} is not a permutation of the alphabet")));
        }
        seen[i] = true;
    }
    Ok(())
}

fn prefix_lefts(order: &[Letter], lens: &[ExactScalar]) -> Result<Vec<ExactScalar>, IetError> {
    let mut left = vec![ExactScalar::zero(); lens.len()];
    let mut acc = ExactScalar::zero();
    for &l in order {
        left[l as usize] = acc.clone();
        acc = acc.checked_add(&lens[l as usize])?;
    }
    Ok(left)
}

/// Validate a description and lay out the defining and image intervals.
pub fn build_iet(spec: IetSpec) -> Result<IntervalExchange, IetError> {
    let n = spec.alphabet.len();
    let IetSpec { alphabet, lengths, image_lengths, order_d, order_a, flips, kind } = spec;
    if lengths.len() != n {
        return Err(IetError::InvalidSpec(format!("{} lengths for {n} letters", lengths.len())));
    }
    let image_lengths = image_lengths.unwrap_or_else(|| lengths.clone());
    if image_lengths.len() != n {
        return Err(IetError::InvalidSpec(format!("{} image lengths for {n} letters", image_lengths.len())));
    }
    check_permutation(&order_d, n, "orderD")?;
    check_permutation(&order_a, n, "orderA")?;
    if let Some(&bad) = flips.iter().find(|&&f| f as usize >= n) {
        return Err(IetError::InvalidSpec(format!("flip letter index {bad} outside the alphabet")));
    }
    for l in alphabet.letters() {
        let i = l as usize;
        if !lengths[i].is_positive() || !image_lengths[i].is_positive() {
            return Err(IetError::EmptyInterval(alphabet.char_of(l)));
        }
        if kind == IetKind::Standard && lengths[i] != image_lengths[i] {
            return Err(IetError::StandardSlopeViolation(alphabet.char_of(l)));
        }
    }
    let total = lengths.iter().try_fold(ExactScalar::zero(), |acc, x| acc.checked_add(x))?;
    let image_total = image_lengths.iter().try_fold(ExactScalar::zero(), |acc, x| acc.checked_add(x))?;
    if total.compare(&image_total)? != std::cmp::Ordering::Equal {
        return Err(IetError::LengthMismatch { lengths: total.to_string(), images: image_total.to_string() });
    }
    let left_d = prefix_lefts(&order_d, &lengths)?;
    let left_a = prefix_lefts(&order_a, &image_lengths)?;
    let flips: Vec<bool> = (0..n).map(|i| flips.contains(&(i as Letter))).collect();
    let pieces = (0..n)
        .map(|i| Piece {
            lo: left_d[i].clone(),
            hi: &left_d[i] + &lengths[i],
            letter: i as Letter,
            image: PieceImage::Interval {
                lo: left_a[i].clone(),
                hi: &left_a[i] + &image_lengths[i],
                reversed: flips[i],
            },
        })
        .collect();
    let map = PiecewiseMap::new(pieces, total.clone());
    Ok(IntervalExchange { alphabet, lengths, image_lengths, order_d, order_a, flips, kind, total, left_d, left_a, map })
}

impl IntervalExchange {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn lengths(&self) -> &[ExactScalar] {
        &self.lengths
    }

    pub fn image_lengths(&self) -> &[ExactScalar] {
        &self.image_lengths
    }

    pub fn order_d(&self) -> &[Letter] {
        &self.order_d
    }

    pub fn order_a(&self) -> &[Letter] {
        &self.order_a
    }

    pub fn is_flipped(&self, l: Letter) -> bool {
        self.flips[l as usize]
    }

    pub fn flip_set(&self) -> BTreeSet<Letter> {
        (0..self.flips.len()).filter(|&i| self.flips[i]).map(|i| i as Letter).collect()
    }

    pub fn kind(&self) -> IetKind {
        self.kind
    }

    pub fn total(&self) -> &ExactScalar {
        &self.total
    }

    pub fn interval(&self, l: Letter) -> (ExactScalar, ExactScalar) {
        let lo = self.left_d[l as usize].clone();
        let hi = &lo + &self.lengths[l as usize];
        (lo, hi)
    }

    pub fn image_interval(&self, l: Letter) -> (ExactScalar, ExactScalar) {
        let lo = self.left_a[l as usize].clone();
        let hi = &lo + &self.image_lengths[l as usize];
        (lo, hi)
    }

    /// Signed slope on `I_l`.
    pub fn slope(&self, l: Letter) -> ExactScalar {
        let s = &self.image_lengths[l as usize] / &self.lengths[l as usize];
        if self.flips[l as usize] {
            -s
        } else {
            s
        }
    }

    /// Endpoints `0 = γ_0 < γ_1 < ... < γ_k = total` of the defining intervals.
    pub fn gammas(&self) -> Vec<ExactScalar> {
        let mut v: Vec<ExactScalar> = self.order_d.iter().map(|&l| self.left_d[l as usize].clone()).collect();
        v.push(self.total.clone());
        v
    }

    /// Endpoints `0 = β_0 < ... < β_k = total` of the image intervals.
    pub fn betas(&self) -> Vec<ExactScalar> {
        let mut v: Vec<ExactScalar> = self.order_a.iter().map(|&l| self.left_a[l as usize].clone()).collect();
        v.push(self.total.clone());
        v
    }

    pub fn map(&self) -> &PiecewiseMap {
        &self.map
    }

    pub fn apply(&self, x: &ExactScalar, dir: Direction) -> Result<Step, IetError> {
        self.map.step(x, dir).map_err(step_error)
    }

    pub fn natural_coding(&self, x: &ExactScalar, n_back: usize, n_fwd: usize) -> Result<Coding, IetError> {
        self.map.coding(x, n_back, n_fwd).map_err(step_error)
    }

    pub fn to_json(&self) -> IetJson {
        let names = |w: &[Letter]| w.iter().map(|&l| self.alphabet.char_of(l).to_string()).collect();
        IetJson {
            alphabet: self.alphabet.names(),
            lengths: self.lengths.clone(),
            image_lengths: if self.kind == IetKind::Standard { None } else { Some(self.image_lengths.clone()) },
            order_d: names(&self.order_d),
            order_a: names(&self.order_a),
            flips: names(&self.flip_set().into_iter().collect::<Vec<_>>()),
            kind: self.kind,
        }
    }
}

pub(crate) fn step_error(e: StepError) -> IetError {
    match e {
        StepError::OutOfDomain => IetError::OutOfDomain,
        StepError::NoPreimage => IetError::DepthBudgetExceeded(0),
    }
}

/// Anything whose natural (or grouped) coding can be read off a piecewise map.
pub trait CodedMap {
    fn coding_alphabet(&self) -> &Alphabet;
    fn engine(&self) -> &PiecewiseMap;
    /// Largest coding depth the map can answer exactly, if bounded.
    fn depth_budget(&self) -> Option<usize> {
        None
    }
}

impl CodedMap for IntervalExchange {
    fn coding_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn engine(&self) -> &PiecewiseMap {
        &self.map
    }
}

/// JSON form: `{"alphabet", "lengths", "imageLengths", "orderD", "orderA", "flips", "kind"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IetJson {
    pub alphabet: Vec<String>,
    pub lengths: Vec<ExactScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_lengths: Option<Vec<ExactScalar>>,
    #[serde(rename = "orderD")]
    pub order_d: Vec<String>,
    #[serde(rename = "orderA")]
    pub order_a: Vec<String>,
    #[serde(default)]
    pub flips: Vec<String>,
    pub kind: IetKind,
}

impl IetJson {
    pub fn to_spec(&self) -> Result<IetSpec, IetError> {
        let alphabet = Alphabet::from_names(&self.alphabet)?;
        let letters = |v: &[String]| v.iter().map(|s| alphabet.letter(s)).collect::<Result<Vec<_>, _>>();
        Ok(IetSpec {
            lengths: self.lengths.clone(),
            image_lengths: self.image_lengths.clone(),
            order_d: letters(&self.order_d)?,
            order_a: letters(&self.order_a)?,
            flips: letters(&self.flips)?.into_iter().collect(),
            kind: self.kind,
            alphabet,
        })
    }

    pub fn build(&self) -> Result<IntervalExchange, IetError> {
        build_iet(self.to_spec()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> ExactScalar {
        ExactScalar::quad(3, 2, -1, 2, 5)
    }

    pub(crate) fn sturmian() -> IntervalExchange {
        let a = alpha();
        build_iet(IetSpec {
            alphabet: Alphabet::from_chars("12"),
            lengths: vec![ExactScalar::one() - &a, a],
            image_lengths: None,
            order_d: vec![0, 1],
            order_a: vec![1, 0],
            flips: BTreeSet::new(),
            kind: IetKind::Standard,
        })
        .unwrap()
    }

    #[test]
    fn sturmian_rotation_layout() {
        let t = sturmian();
        assert_eq!(t.image_interval(0), (alpha(), ExactScalar::one()));
        let half = ExactScalar::ratio(1, 2);
        assert_eq!(t.apply(&half, Direction::Forward).unwrap(), Step::Defined(&half + &alpha()));
        let g1 = ExactScalar::one() - alpha();
        assert_eq!(t.apply(&g1, Direction::Forward).unwrap(), Step::Undefined);
        let c = t.natural_coding(&g1, 3, 3).unwrap();
        assert!(c.window.letters.is_empty());
        assert_eq!(c.forward_truncated_at, Some(0));
    }

    #[test]
    fn exaf_slopes() {
        let q = ExactScalar::ratio;
        let t = build_iet(IetSpec {
            alphabet: Alphabet::from_chars("1234"),
            lengths: vec![q(2, 1), q(1, 1), q(7, 2), q(1, 1)],
            image_lengths: Some(vec![q(1, 1), q(2, 1), q(7, 2), q(1, 1)]),
            order_d: vec![0, 1, 2, 3],
            order_a: vec![3, 2, 0, 1],
            flips: BTreeSet::new(),
            kind: IetKind::Affine,
        })
        .unwrap();
        let slopes: Vec<_> = (0..4).map(|l| t.slope(l)).collect();
        assert_eq!(slopes, vec![q(1, 2), q(2, 1), q(1, 1), q(1, 1)]);
    }

    #[test]
    fn standard_slope_violation() {
        let err = build_iet(IetSpec {
            alphabet: Alphabet::from_chars("12"),
            lengths: vec![ExactScalar::one(), ExactScalar::one()],
            image_lengths: Some(vec![ExactScalar::one(), ExactScalar::from_int(2)]),
            order_d: vec![0, 1],
            order_a: vec![1, 0],
            flips: BTreeSet::new(),
            kind: IetKind::Standard,
        })
        .unwrap_err();
        assert_eq!(err, IetError::StandardSlopeViolation('2'));
    }

    #[test]
    fn json_round_trip() {
        let t = sturmian();
        let s = serde_json::to_string(&t.to_json()).unwrap();
        assert!(s.contains("\"orderD\":[\"1\",\"2\"]"));
        let back: IetJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.build().unwrap().gammas(), t.gammas());
    }
}
