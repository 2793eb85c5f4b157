//! Convergence of the wandering-interval length series, and the linear
//! system on log-slopes that makes all of them converge at once.
//!
//! Log-slopes are measured in units of `ln 2`: a letter with log-slope `t`
//! has slope of absolute value `2^t`. Every verdict depends only on signs of
//! linear forms in the log-slopes, so the unit is immaterial there, and it
//! keeps the slopes of integer log-slopes rational.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::alphabet::{Alphabet, Letter};
use crate::exactnum::ExactScalar;
use crate::sequence::{TailDescriptor, TailKind, TwoSidedSeq};

/// Number of letters summed by the floating-point diagnostic trace.
pub const TRACE_TERMS: usize = 10_000;

/// One log-slope per letter, in units of `ln 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaVector(pub Vec<ExactScalar>);

impl ThetaVector {
    pub fn zeros(n: usize) -> Self {
        ThetaVector(vec![ExactScalar::zero(); n])
    }

    pub fn get(&self, l: Letter) -> &ExactScalar {
        &self.0[l as usize]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Average log-slope along a tail with the given letter frequencies.
    pub fn rate(&self, frequencies: &[ExactScalar]) -> Result<ExactScalar, ConstructionError> {
        let mut acc = ExactScalar::zero();
        for (t, f) in self.0.iter().zip(frequencies) {
            acc = acc.checked_add(&t.checked_mul(f)?)?;
        }
        Ok(acc)
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        alphabet
            .letters()
            .map(|l| format!("{}={}", alphabet.char_of(l), self.get(l)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TailVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// Floating-point partial sums, attached to inconclusive verdicts only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericTrace {
    pub terms: usize,
    /// Partial sum of the series after `terms` terms.
    pub partial_sum: f64,
    /// Final Birkhoff sum (the exponent of the last term, in units of `ln 2`).
    pub last_exponent: f64,
    pub min_exponent: f64,
    pub max_exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideReport {
    pub verdict: TailVerdict,
    /// Mean log-slope along the tail.
    pub rate: ExactScalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<NumericTrace>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffReport {
    /// The series `sum_(n>=0) 2^(t(z_0) + ... + t(z_n))`.
    pub right: SideReport,
    /// The series `sum_(n>0) 2^-(t(z_-n) + ... + t(z_-1))`.
    pub left: SideReport,
}

impl BirkhoffReport {
    pub fn both_converge(&self) -> bool {
        self.right.verdict == TailVerdict::Converges && self.left.verdict == TailVerdict::Converges
    }
}

fn trace(letters: &[Letter], theta: &ThetaVector, sign: f64) -> NumericTrace {
    let vals: Vec<f64> = theta.0.iter().map(|t| t.to_f64()).collect();
    let mut s = 0.0;
    let mut sum = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &l in letters {
        s += sign * vals[l as usize];
        sum += s.exp2();
        lo = lo.min(s);
        hi = hi.max(s);
    }
    NumericTrace { terms: letters.len(), partial_sum: sum, last_exponent: s, min_exponent: lo, max_exponent: hi }
}

fn side(
    rate: ExactScalar,
    converge_sign: Ordering,
    letters: impl FnOnce() -> Vec<Letter>,
    tail: &TailDescriptor,
    theta: &ThetaVector,
) -> SideReport {
    let sign = rate.signum().cmp(&0);
    let verdict = if sign == converge_sign {
        TailVerdict::Converges
    } else if sign != Ordering::Equal || matches!(tail.kind, TailKind::Periodic { .. }) {
        // A periodic tail with zero rate has Birkhoff sums bounded below, so terms do not vanish.
        TailVerdict::Diverges
    } else {
        TailVerdict::Inconclusive
    };
    let trace = (verdict == TailVerdict::Inconclusive)
        .then(|| trace(&letters(), theta, if converge_sign == Ordering::Less { 1.0 } else { -1.0 }));
    SideReport { verdict, rate, trace }
}

/// Decide both length series of `z` under the log-slopes `theta`.
pub fn birkhoff_feasibility(z: &TwoSidedSeq, theta: &ThetaVector) -> Result<BirkhoffReport, ConstructionError> {
    let right_rate = theta.rate(&z.right.frequencies)?;
    let left_rate = theta.rate(&z.left.frequencies)?;
    let right = side(
        right_rate,
        Ordering::Less,
        || {
            let mut w = z.middle.clone();
            w.extend(z.right_outward(TRACE_TERMS.saturating_sub(z.middle.len())));
            w.truncate(TRACE_TERMS);
            w
        },
        &z.right,
        theta,
    );
    let left = side(left_rate, Ordering::Greater, || z.left_outward(TRACE_TERMS), &z.left, theta);
    Ok(BirkhoffReport { right, left })
}

/// `coeffs . theta < 0` when strict, `<= 0` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<ExactScalar>,
    pub strict: bool,
}

impl LinearConstraint {
    pub fn render(&self, alphabet: &Alphabet) -> String {
        let mut terms = Vec::new();
        for (l, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("({c})*t{}", alphabet.char_of(l as Letter)));
            }
        }
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        format!("{lhs} {} 0", if self.strict { "<" } else { "<=" })
    }

    fn eval(&self, x: &[ExactScalar]) -> ExactScalar {
        self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Scale so the first nonzero coefficient has absolute value one.
    fn normalised(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            self.coeffs = self.coeffs.iter().map(|c| c / &lead).collect();
        }
        self
    }
}

/// Solve `{c . x < 0 or <= 0}` exactly by Fourier–Motzkin elimination.
/// Returns a solution, preferring small integers coordinate by coordinate.
pub fn fourier_motzkin(system: &[LinearConstraint], n: usize) -> Option<Vec<ExactScalar>> {
    let mut stages: Vec<Vec<LinearConstraint>> = Vec::with_capacity(n + 1);
    let first: BTreeSet<LinearConstraint> = system.iter().cloned().map(LinearConstraint::normalised).collect();
    stages.push(first.into_iter().collect());
    for k in 0..n {
        let cur = stages.last().unwrap();
        let mut next: BTreeSet<LinearConstraint> = BTreeSet::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for c in cur {
            match c.coeffs[k].signum() {
                0 => {
                    next.insert(c.clone());
                }
                s if s > 0 => pos.push(c),
                _ => neg.push(c),
            }
        }
        for p in &pos {
            for q in &neg {
                let (wp, wq) = (-&q.coeffs[k], p.coeffs[k].clone());
                let coeffs: Vec<ExactScalar> =
                    p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| &(&wp * a) + &(&wq * b)).collect();
                next.insert(LinearConstraint { coeffs, strict: p.strict || q.strict }.normalised());
            }
        }
        stages.push(next.into_iter().collect());
    }
    if stages[n].iter().any(|c| c.strict) {
        return None;
    }
    let mut x = vec![ExactScalar::zero(); n];
    for k in (0..n).rev() {
        let mut lower: Option<(ExactScalar, bool)> = None;
        let mut upper: Option<(ExactScalar, bool)> = None;
        for c in &stages[k] {
            let a = &c.coeffs[k];
            if a.is_zero() {
                continue;
            }
            x[k] = ExactScalar::zero();
            let rest = c.eval(&x);
            let bound = -&(&rest / a);
            if a.is_positive() {
                if upper.as_ref().is_none_or(|(u, s)| bound < *u || (bound == *u && c.strict && !s)) {
                    upper = Some((bound, c.strict));
                }
            } else if lower.as_ref().is_none_or(|(l, s)| bound > *l || (bound == *l && c.strict && !s)) {
                lower = Some((bound, c.strict));
            }
        }
        x[k] = pick_between(lower, upper);
    }
    Some(x)
}

/// Smallest integer above (or at, when not strict) `x`.
fn int_above(x: &ExactScalar, strict: bool) -> BigInt {
    let f = x.floor();
    if !strict && ExactScalar::from_bigint(f.clone()) == *x {
        f
    } else {
        f + 1
    }
}

/// Largest integer below (or at, when not strict) `x`.
fn int_below(x: &ExactScalar, strict: bool) -> BigInt {
    let f = x.floor();
    if strict && ExactScalar::from_bigint(f.clone()) == *x {
        f - 1
    } else {
        f
    }
}

/// A value in the interval given by the bounds, preferring 0, then the
/// integer nearest to 0, then dyadic rationals with the smallest denominator.
fn pick_between(lower: Option<(ExactScalar, bool)>, upper: Option<(ExactScalar, bool)>) -> ExactScalar {
    if let (Some((l, _)), Some((u, _))) = (&lower, &upper) {
        if l == u {
            return l.clone();
        }
    }
    let mut scale = BigInt::one();
    for _ in 0..128 {
        let s = ExactScalar::from_bigint(scale.clone());
        let lo = lower.as_ref().map(|(l, strict)| int_above(&(l * &s), *strict));
        let hi = upper.as_ref().map(|(u, strict)| int_below(&(u * &s), *strict));
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                scale *= 2;
                continue;
            }
        }
        let mut pick = BigInt::zero();
        if let Some(l) = lo.filter(|l| l.is_positive()) {
            pick = l;
        } else if let Some(h) = hi.filter(|h| h.is_negative()) {
            pick = h;
        }
        return ExactScalar::from_rational(BigRational::new(pick, scale));
    }
    // Bounds closer than 2^-128: fall back to the exact midpoint.
    let (l, u) = (lower.unwrap().0, upper.unwrap().0);
    &(&l + &u) / &ExactScalar::from_int(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaOutcome {
    Feasible,
    Infeasible,
    BoundaryOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaSearch {
    pub outcome: ThetaOutcome,
    /// Interior point for `Feasible`, a point of the degenerate set for `BoundaryOnly`.
    pub sample: Option<ThetaVector>,
    /// The strict system: one constraint per tail.
    pub system: Vec<LinearConstraint>,
}

/// Look for log-slopes making every tail series of every `z` converge.
///
/// A right tail converges iff its rate is negative, a left tail iff its rate
/// is positive. When that strict system has no solution, substitutive tails
/// are relaxed to allow rate zero (periodic tails stay strict since a zero
/// rate diverges there); a solution of the relaxed system is `BoundaryOnly`.
pub fn theta_search(zs: &[TwoSidedSeq], n_letters: usize) -> ThetaSearch {
    let mut strict_sys = Vec::new();
    let mut relaxed = Vec::new();
    for z in zs {
        for (tail, sign) in [(&z.right, 1), (&z.left, -1)] {
            let coeffs: Vec<ExactScalar> =
                tail.frequencies.iter().map(|f| if sign > 0 { f.clone() } else { -f }).collect();
            let periodic = matches!(tail.kind, TailKind::Periodic { .. });
            strict_sys.push(LinearConstraint { coeffs: coeffs.clone(), strict: true });
            relaxed.push(LinearConstraint { coeffs, strict: periodic });
        }
    }
    if let Some(x) = fourier_motzkin(&strict_sys, n_letters) {
        return ThetaSearch { outcome: ThetaOutcome::Feasible, sample: Some(ThetaVector(x)), system: strict_sys };
    }
    match fourier_motzkin(&relaxed, n_letters) {
        Some(x) => ThetaSearch { outcome: ThetaOutcome::BoundaryOnly, sample: Some(ThetaVector(x)), system: strict_sys },
        None => ThetaSearch { outcome: ThetaOutcome::Infeasible, sample: None, system: strict_sys },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64) -> ExactScalar {
        ExactScalar::from_int(p)
    }

    #[test]
    fn single_strict_inequality_prefers_unit_sample() {
        let sys = [LinearConstraint { coeffs: vec![q(-1), q(0)], strict: true }];
        assert_eq!(fourier_motzkin(&sys, 2).unwrap(), vec![q(1), q(0)]);
    }

    #[test]
    fn contradictory_strict_pair_is_infeasible() {
        let sys = [
            LinearConstraint { coeffs: vec![q(1)], strict: true },
            LinearConstraint { coeffs: vec![q(-1)], strict: true },
        ];
        assert!(fourier_motzkin(&sys, 1).is_none());
        let relaxed: Vec<_> = sys.iter().map(|c| LinearConstraint { strict: false, ..c.clone() }).collect();
        assert_eq!(fourier_motzkin(&relaxed, 1).unwrap(), vec![q(0)]);
    }

    #[test]
    fn narrow_window_gets_dyadic_sample() {
        // 0 < 3x < y: y is chosen first (y = 1), then x must lie in (0, 1/3).
        let sys = [
            LinearConstraint { coeffs: vec![q(3), q(-1)], strict: true },
            LinearConstraint { coeffs: vec![q(-3), q(0)], strict: true },
        ];
        let x = fourier_motzkin(&sys, 2).unwrap();
        assert_eq!(x, vec![ExactScalar::ratio(1, 4), q(1)]);
    }
}
