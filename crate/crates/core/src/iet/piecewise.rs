//! Finite piecewise-affine partial maps of an interval, the common evaluation
//! engine behind standard, affine, grouped and blown-up interval exchanges.
//!
//! Each piece is an open interval carrying a coding letter. It is sent either
//! affinely onto an open interval, or (for truncated blow-ups) collapsed onto a
//! single point. Endpoints of pieces are points where the map is undefined.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::{Letter, Word};
use crate::exactnum::ExactScalar;
use crate::sequence::Window;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceImage {
    Interval { lo: ExactScalar, hi: ExactScalar, reversed: bool },
    Point(ExactScalar),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: ExactScalar,
    pub hi: ExactScalar,
    pub letter: Letter,
    pub image: PieceImage,
}

impl Piece {
    pub fn slope(&self) -> Option<ExactScalar> {
        match &self.image {
            PieceImage::Interval { lo, hi, reversed } => {
                let s = (hi - lo) / (&self.hi - &self.lo);
                Some(if *reversed { -s } else { s })
            }
            PieceImage::Point(_) => None,
        }
    }

    pub(crate) fn forward(&self, x: &ExactScalar) -> ExactScalar {
        match &self.image {
            PieceImage::Interval { lo, hi, reversed } => {
                let t = (x - &self.lo) * (hi - lo) / (&self.hi - &self.lo);
                if *reversed {
                    hi - t
                } else {
                    lo + t
                }
            }
            PieceImage::Point(q) => q.clone(),
        }
    }

    pub(crate) fn backward(&self, y: &ExactScalar) -> ExactScalar {
        match &self.image {
            PieceImage::Interval { lo, hi, reversed } => {
                let t = if *reversed { hi - y } else { y - lo };
                &self.lo + t * (&self.hi - &self.lo) / (hi - lo)
            }
            PieceImage::Point(_) => unreachable!("collapsed pieces have no inverse"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Defined(ExactScalar),
    /// The point is an endpoint where the map (or its inverse) is undefined.
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepError {
    OutOfDomain,
    /// No piece maps onto the point; happens only at truncation boundaries of blow-ups.
    NoPreimage,
}

/// Result of coding one orbit: letters on `[-back, fwd)` with truncation indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coding {
    pub window: Window,
    /// First index `n >= 0` at which the forward orbit was undefined, if any.
    pub forward_truncated_at: Option<i64>,
    /// Last index `n < 0` at which the backward orbit was undefined, if any.
    pub backward_truncated_at: Option<i64>,
}

#[derive(Clone, Debug)]
enum Seg {
    Open(ExactScalar, ExactScalar),
    Atom(ExactScalar),
}

#[derive(Clone, Debug)]
pub struct PiecewiseMap {
    pieces: Vec<Piece>,
    /// Indices of pieces with interval images, sorted by image left endpoint.
    inverse: Vec<usize>,
    total: ExactScalar,
}

enum Located {
    Inside(usize),
    Boundary,
    Outside,
}

impl PiecewiseMap {
    /// Pieces must be disjoint open intervals inside `(0, total)`; they are sorted here.
    pub fn new(mut pieces: Vec<Piece>, total: ExactScalar) -> Self {
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        for w in pieces.windows(2) {
            assert!(w[0].hi <= w[1].lo, "overlapping pieces");
        }
        let mut inverse: Vec<usize> =
            (0..pieces.len()).filter(|&i| matches!(pieces[i].image, PieceImage::Interval { .. })).collect();
        let img_lo = |i: usize| match &pieces[i].image {
            PieceImage::Interval { lo, .. } => lo.clone(),
            PieceImage::Point(_) => unreachable!(),
        };
        inverse.sort_by_key(|&i| img_lo(i));
        PiecewiseMap { pieces, inverse, total }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn total(&self) -> &ExactScalar {
        &self.total
    }

    fn locate(&self, x: &ExactScalar) -> Located {
        if *x <= ExactScalar::zero() || *x >= self.total {
            return Located::Outside;
        }
        let k = self.pieces.partition_point(|p| p.lo < *x);
        if k == 0 {
            return Located::Boundary;
        }
        let p = &self.pieces[k - 1];
        if *x < p.hi {
            Located::Inside(k - 1)
        } else {
            Located::Boundary
        }
    }

    /// Letter of the piece containing `x`, `None` at endpoints.
    pub fn letter_at(&self, x: &ExactScalar) -> Result<Option<Letter>, StepError> {
        match self.locate(x) {
            Located::Inside(i) => Ok(Some(self.pieces[i].letter)),
            Located::Boundary => Ok(None),
            Located::Outside => Err(StepError::OutOfDomain),
        }
    }

    pub fn forward(&self, x: &ExactScalar) -> Result<Step, StepError> {
        match self.locate(x) {
            Located::Inside(i) => Ok(Step::Defined(self.pieces[i].forward(x))),
            Located::Boundary => Ok(Step::Undefined),
            Located::Outside => Err(StepError::OutOfDomain),
        }
    }

    pub fn backward(&self, y: &ExactScalar) -> Result<Step, StepError> {
        if *y <= ExactScalar::zero() || *y >= self.total {
            return Err(StepError::OutOfDomain);
        }
        let lo_of = |i: usize| match &self.pieces[i].image {
            PieceImage::Interval { lo, .. } => lo,
            PieceImage::Point(_) => unreachable!(),
        };
        let hi_of = |i: usize| match &self.pieces[i].image {
            PieceImage::Interval { hi, .. } => hi,
            PieceImage::Point(_) => unreachable!(),
        };
        let k = self.inverse.partition_point(|&i| lo_of(i) < y);
        if k > 0 {
            let i = self.inverse[k - 1];
            if y < hi_of(i) {
                return Ok(Step::Defined(self.pieces[i].backward(y)));
            }
            if y == hi_of(i) {
                return Ok(Step::Undefined);
            }
        }
        if k < self.inverse.len() && lo_of(self.inverse[k]) == y {
            return Ok(Step::Undefined);
        }
        Err(StepError::NoPreimage)
    }

    pub fn step(&self, x: &ExactScalar, dir: Direction) -> Result<Step, StepError> {
        match dir {
            Direction::Forward => self.forward(x),
            Direction::Backward => self.backward(x),
        }
    }

    /// Natural coding of the orbit of `x` on indices `[-n_back, n_fwd)`.
    pub fn coding(&self, x: &ExactScalar, n_back: usize, n_fwd: usize) -> Result<Coding, StepError> {
        let first = match self.letter_at(x)? {
            Some(l) => l,
            None => {
                return Ok(Coding {
                    window: Window::new(vec![], 0),
                    forward_truncated_at: Some(0),
                    backward_truncated_at: Some(0),
                })
            }
        };
        let mut fwd: Word = Vec::with_capacity(n_fwd);
        let mut forward_truncated_at = None;
        if n_fwd > 0 {
            fwd.push(first);
            let mut y = x.clone();
            for n in 1..n_fwd {
                match self.forward(&y)? {
                    Step::Defined(z) => match self.letter_at(&z)? {
                        Some(l) => {
                            fwd.push(l);
                            y = z;
                        }
                        None => {
                            forward_truncated_at = Some(n as i64);
                            break;
                        }
                    },
                    Step::Undefined => {
                        forward_truncated_at = Some(n as i64);
                        break;
                    }
                }
            }
        }
        let mut back: Word = Vec::with_capacity(n_back);
        let mut backward_truncated_at = None;
        let mut y = x.clone();
        for n in 1..=n_back {
            let prev = match self.backward(&y) {
                Ok(Step::Defined(z)) => z,
                Ok(Step::Undefined) | Err(StepError::NoPreimage) => {
                    backward_truncated_at = Some(-(n as i64));
                    break;
                }
                Err(e) => return Err(e),
            };
            match self.letter_at(&prev)? {
                Some(l) => {
                    back.push(l);
                    y = prev;
                }
                None => {
                    backward_truncated_at = Some(-(n as i64));
                    break;
                }
            }
        }
        back.reverse();
        let origin = back.len();
        back.extend(fwd);
        Ok(Coding { window: Window::new(back, origin), forward_truncated_at, backward_truncated_at })
    }

    fn split_by_pieces(&self, seg: Seg, out: &mut Vec<(usize, Seg)>) {
        match seg {
            Seg::Atom(x) => {
                if let Located::Inside(i) = self.locate(&x) {
                    out.push((i, Seg::Atom(x)));
                }
            }
            Seg::Open(a, b) => {
                let mut k = self.pieces.partition_point(|p| p.hi <= a);
                while k < self.pieces.len() && self.pieces[k].lo < b {
                    let p = &self.pieces[k];
                    let lo = if p.lo > a { p.lo.clone() } else { a.clone() };
                    let hi = if p.hi < b { p.hi.clone() } else { b.clone() };
                    if lo < hi {
                        out.push((k, Seg::Open(lo, hi)));
                    }
                    k += 1;
                }
            }
        }
    }

    fn image_seg(&self, piece: usize, seg: &Seg) -> Seg {
        let p = &self.pieces[piece];
        match (&p.image, seg) {
            (PieceImage::Point(q), _) => Seg::Atom(q.clone()),
            (_, Seg::Atom(x)) => Seg::Atom(p.forward(x)),
            (PieceImage::Interval { reversed, .. }, Seg::Open(a, b)) => {
                let (fa, fb) = (p.forward(a), p.forward(b));
                if *reversed {
                    Seg::Open(fb, fa)
                } else {
                    Seg::Open(fa, fb)
                }
            }
        }
    }

    /// Words of length `1..=depth` whose cylinders have nonempty interior.
    ///
    /// Each word carries the image under `T^(n-1)` of its cylinder, kept as a
    /// union of open intervals plus points that stand for collapsed intervals.
    /// Refining by one letter applies `T` once and intersects with the pieces.
    pub fn language_levels(&self, n_letters: usize, depth: usize) -> Vec<BTreeSet<Word>> {
        let mut levels: Vec<BTreeSet<Word>> = Vec::with_capacity(depth + 1);
        levels.push(std::iter::once(Vec::new()).collect());
        if depth == 0 {
            return levels;
        }
        let mut current: BTreeMap<Word, Vec<(usize, Seg)>> = BTreeMap::new();
        for (i, p) in self.pieces.iter().enumerate() {
            current.entry(vec![p.letter]).or_default().push((i, Seg::Open(p.lo.clone(), p.hi.clone())));
        }
        debug_assert!(current.keys().all(|w| (w[0] as usize) < n_letters));
        levels.push(current.keys().cloned().collect());
        for _ in 2..=depth {
            let mut next: BTreeMap<Word, Vec<(usize, Seg)>> = BTreeMap::new();
            for (w, segs) in &current {
                let mut split = Vec::new();
                for (pi, s) in segs {
                    let img = self.image_seg(*pi, s);
                    self.split_by_pieces(img, &mut split);
                }
                for (pi, s) in split {
                    let mut nw = w.clone();
                    nw.push(self.pieces[pi].letter);
                    next.entry(nw).or_default().push((pi, s));
                }
            }
            levels.push(next.keys().cloned().collect());
            current = next;
        }
        levels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(alpha: ExactScalar) -> PiecewiseMap {
        let one = ExactScalar::one();
        let c = &one - &alpha;
        PiecewiseMap::new(
            vec![
                Piece {
                    lo: ExactScalar::zero(),
                    hi: c.clone(),
                    letter: 0,
                    image: PieceImage::Interval { lo: alpha.clone(), hi: one.clone(), reversed: false },
                },
                Piece {
                    lo: c,
                    hi: one.clone(),
                    letter: 1,
                    image: PieceImage::Interval { lo: ExactScalar::zero(), hi: alpha, reversed: false },
                },
            ],
            one,
        )
    }

    #[test]
    fn rational_rotation_language() {
        let m = rot(ExactScalar::ratio(1, 3));
        let lv = m.language_levels(2, 3);
        let l3: Vec<Word> = lv[3].iter().cloned().collect();
        assert_eq!(l3, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn backward_inverts_forward() {
        let m = rot(ExactScalar::ratio(2, 7));
        let x = ExactScalar::ratio(3, 11);
        let Step::Defined(y) = m.forward(&x).unwrap() else { panic!() };
        assert_eq!(m.backward(&y).unwrap(), Step::Defined(x));
        assert_eq!(m.forward(&ExactScalar::ratio(5, 7)).unwrap(), Step::Undefined);
        assert_eq!(m.forward(&ExactScalar::from_int(2)).unwrap_err(), StepError::OutOfDomain);
    }

    #[test]
    fn collapsed_piece_keeps_its_words() {
        // (0,1) collapses onto 3/2, (1,2) is the identity.
        let m = PiecewiseMap::new(
            vec![
                Piece {
                    lo: ExactScalar::zero(),
                    hi: ExactScalar::one(),
                    letter: 0,
                    image: PieceImage::Point(ExactScalar::ratio(3, 2)),
                },
                Piece {
                    lo: ExactScalar::one(),
                    hi: ExactScalar::from_int(2),
                    letter: 1,
                    image: PieceImage::Interval {
                        lo: ExactScalar::one(),
                        hi: ExactScalar::from_int(2),
                        reversed: false,
                    },
                },
            ],
            ExactScalar::from_int(2),
        );
        let lv = m.language_levels(2, 3);
        assert!(lv[3].contains(&vec![0, 1, 1]));
        assert!(!lv[2].contains(&vec![1, 0]));
        assert_eq!(m.backward(&ExactScalar::ratio(1, 2)).unwrap_err(), StepError::NoPreimage);
    }
}
