//! Affine blow-up of one eventually periodic non-recurrent orbit.
//!
//! Every shift `S^m z` gets an interval `J_m` with `|J_0| = 1` and
//! `|J_(m+1)| = 2^t(z_m) |J_m|`. Intervals with `-D <= m < |middle| + D` are
//! kept individually; beyond that, the intervals of each residue class modulo
//! the tail period are merged into one slot whose length is an exact geometric
//! sum. Extra periodic orbits become slots of length one moved with slope ±1.
//! Slots are laid out by the order of their sequences, then adjacent slots
//! that one affine map can serve are merged into defining intervals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::birkhoff::{birkhoff_feasibility, BirkhoffReport, ThetaVector};
use super::ConstructionError;
use crate::alphabet::{Alphabet, Letter, Word};
use crate::exactnum::ExactScalar;
use crate::iet::{build_iet, grouped_coding_map, CodingScheme, IetKind, IetSpec, IntervalExchange};
use crate::order::{sequence_order, OrderSpec, SeqOrder};
use crate::sequence::{TailKind, TwoSidedSeq, Window};

type Span = (ExactScalar, ExactScalar);

/// Default number of individually kept intervals on each side of the orbit.
pub const DEFAULT_AFFINE_DEPTH: usize = 64;

#[derive(Clone, Debug)]
pub struct AffineBlowup {
    /// The affine map, over the base alphabet extended by one letter per extra piece.
    pub iet: IntervalExchange,
    /// Groups the pieces back into the letters of the orbit's alphabet.
    pub scheme: CodingScheme,
    /// Positive factor applied to the log-slopes to make them integers.
    pub theta_scale: BigInt,
    /// Length lost by truncating the orbit. Tails are summed in closed form, so this is exact zero.
    pub truncation_error: ExactScalar,
    pub birkhoff: BirkhoffReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct AffineSummary {
    pub pieces: usize,
    pub natural: bool,
    pub total: ExactScalar,
}

impl AffineBlowup {
    pub fn summary(&self) -> AffineSummary {
        AffineSummary {
            pieces: self.iet.alphabet().len(),
            natural: self.scheme.is_identity(),
            total: self.iet.total().clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SlotKind {
    Atom(i64),
    /// Indices `|middle| + D + r + k p`, `k >= 0`.
    Right(usize),
    /// Indices `-D - 1 - r - k q`, `k >= 0`.
    Left(usize),
    Phase(usize, usize),
}

struct Slot {
    kind: SlotKind,
    letter: Letter,
    len: ExactScalar,
    probes: Vec<Window>,
    /// For tail slots: whether member `k + 1` lies to the right of member `k`.
    increasing: bool,
}

fn pow2(e: i64) -> ExactScalar {
    let one = BigInt::one();
    let r = if e >= 0 {
        BigRational::from_integer(one << e as usize)
    } else {
        BigRational::new(one.clone(), one << (-e) as usize)
    };
    ExactScalar::from_rational(r)
}

fn primitive_root(w: &[Letter]) -> Word {
    let n = w.len();
    let p = (1..=n).find(|&p| n.is_multiple_of(p) && (0..n).all(|i| w[i] == w[i % p])).unwrap_or(n);
    w[..p].to_vec()
}

fn same_cycle(a: &[Letter], b: &[Letter]) -> bool {
    a.len() == b.len() && (0..a.len()).any(|s| (0..a.len()).all(|i| a[(i + s) % a.len()] == b[i]))
}

fn too_coarse(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::TruncationTooCoarse(msg.into())
}

fn periodic_window(w: &[Letter], phase: usize, radius: usize) -> Window {
    let n = w.len() as i64;
    let r = radius as i64;
    let letters = (-r..r).map(|i| w[((phase as i64 + i).rem_euclid(n)) as usize]).collect();
    Window::new(letters, radius)
}

/// Affine map whose coding contains the orbit `z` (both tails periodic) and
/// the given purely periodic orbits, with log-slopes `theta` (units of `ln 2`).
pub fn affine_blowup(
    alphabet: &Alphabet,
    orders: &OrderSpec,
    theta: &ThetaVector,
    z: &TwoSidedSeq,
    periodic_orbits: &[Word],
    depth: usize,
) -> Result<AffineBlowup, ConstructionError> {
    let n = alphabet.len();
    if theta.len() != n {
        return Err(ConstructionError::InvalidOrbit(format!("{} log-slopes for {n} letters", theta.len())));
    }
    if depth == 0 {
        return Err(too_coarse("depth must be at least 1"));
    }
    for l in alphabet.letters() {
        if !theta.get(l).is_rational() {
            return Err(ConstructionError::IrrationalTheta(alphabet.char_of(l)));
        }
    }
    let (vr, vl) = match (&z.right.kind, &z.left.kind) {
        (TailKind::Periodic { word: r }, TailKind::Periodic { word: l }) => (primitive_root(r), primitive_root(l)),
        _ => return Err(too_coarse("substitutive tails need infinitely many affine pieces")),
    };
    let birkhoff = birkhoff_feasibility(z, theta)?;
    if !birkhoff.both_converge() {
        return Err(ConstructionError::DivergentBirkhoffSums(format!(
            "right tail {:?}, left tail {:?}",
            birkhoff.right.verdict, birkhoff.left.verdict
        )));
    }

    // Integer log-slopes.
    let scale = theta.0.iter().fold(BigInt::one(), |acc, t| acc.lcm(t.rational_part().denom()));
    let t: Vec<i64> = theta
        .0
        .iter()
        .map(|x| {
            let v = x.rational_part() * BigRational::from_integer(scale.clone());
            v.to_integer().to_i64().ok_or_else(|| too_coarse("log-slopes too large"))
        })
        .collect::<Result<_, _>>()?;

    let (p, q) = (vr.len(), vl.len());
    let mid = z.middle.len() as i64;
    let d = depth as i64;
    let (lo, hi) = (-d, mid + d);
    let letter = |m: i64| -> Letter {
        if m < 0 {
            let i = (-1 - m) as usize % q;
            vl[q - 1 - i]
        } else if m < mid {
            z.middle[m as usize]
        } else {
            vr[((m - mid) as usize) % p]
        }
    };
    if vr == vl && (0..mid).all(|m| letter(m) == vr[(m as usize) % p]) && (mid as usize).is_multiple_of(p) {
        return Err(ConstructionError::InvalidOrbit("the orbit is periodic".into()));
    }

    // Exponents E(m), |J_m| = 2^E(m), for lo - q <= m <= hi + p.
    let mut exps: BTreeMap<i64, i64> = BTreeMap::new();
    exps.insert(0, 0);
    let (mut e, mut m) = (0i64, 0i64);
    while m < hi + p as i64 {
        e += t[letter(m) as usize];
        m += 1;
        exps.insert(m, e);
    }
    let (mut e, mut m) = (0i64, 0i64);
    while m > lo - q as i64 {
        m -= 1;
        e -= t[letter(m) as usize];
        exps.insert(m, e);
    }
    let len_at = |m: i64| pow2(exps[&m]);
    let sum_r: i64 = vr.iter().map(|&l| t[l as usize]).sum();
    let sum_l: i64 = vl.iter().map(|&l| t[l as usize]).sum();
    let ratio_r = pow2(sum_r);
    let ratio_l = pow2(-sum_l);
    let one = ExactScalar::one();

    // Extra periodic orbits not already carried by a tail.
    let mut extra: Vec<Word> = Vec::new();
    for w in periodic_orbits {
        if w.is_empty() {
            return Err(ConstructionError::InvalidOrbit("empty periodic word".into()));
        }
        let w = primitive_root(w);
        if same_cycle(&w, &vr) || same_cycle(&w, &vl) || extra.iter().any(|x| same_cycle(x, &w)) {
            continue;
        }
        extra.push(w);
    }
    let maxw = extra.iter().map(|w| w.len()).max().unwrap_or(0);
    let radius = (d + mid) as usize + 2 * (p + q + maxw) + 4;

    let shifted = |m: i64| z.shifted_window(m, radius);
    let mut slots: Vec<Slot> = Vec::new();
    for m in lo..hi {
        slots.push(Slot {
            kind: SlotKind::Atom(m),
            letter: letter(m),
            len: len_at(m),
            probes: vec![shifted(m)],
            increasing: true,
        });
    }
    let far_right = |f: i64| {
        let need = (radius as i64 + mid - f).max(3 * p as i64);
        f + (need + p as i64 - 1) / p as i64 * p as i64
    };
    for r in 0..p {
        let f = hi + r as i64;
        let probes = vec![shifted(f), shifted(f + p as i64), shifted(f + 2 * p as i64), shifted(far_right(f))];
        let increasing = order_of(orders, &probes[0], &probes[1])? == SeqOrder::Less;
        let len = &len_at(f) / &(&one - &ratio_r);
        slots.push(Slot { kind: SlotKind::Right(r), letter: letter(f), len, probes, increasing });
    }
    let far_left = |g: i64| {
        let need = (radius as i64 + 1 + g).max(3 * q as i64);
        g - (need + q as i64 - 1) / q as i64 * q as i64
    };
    for r in 0..q {
        let g = lo - 1 - r as i64;
        let probes = vec![shifted(g), shifted(g - q as i64), shifted(g - 2 * q as i64), shifted(far_left(g))];
        let increasing = order_of(orders, &probes[0], &probes[1])? == SeqOrder::Less;
        let len = &len_at(g) / &(&one - &ratio_l);
        slots.push(Slot { kind: SlotKind::Left(r), letter: letter(g), len, probes, increasing });
    }
    for (o, w) in extra.iter().enumerate() {
        for j in 0..w.len() {
            slots.push(Slot {
                kind: SlotKind::Phase(o, j),
                letter: w[j],
                len: one.clone(),
                probes: vec![periodic_window(w, j, radius)],
                increasing: true,
            });
        }
    }

    // Binary insertion by sequence order.
    let mut sorted: Vec<Slot> = Vec::with_capacity(slots.len());
    for s in slots {
        let (mut a, mut b) = (0, sorted.len());
        while a < b {
            let c = (a + b) / 2;
            if compare_slots(orders, &sorted[c], &s)? == SeqOrder::Less {
                a = c + 1;
            } else {
                b = c;
            }
        }
        sorted.insert(a, s);
    }
    let mut starts = Vec::with_capacity(sorted.len());
    let mut acc = ExactScalar::zero();
    for s in &sorted {
        starts.push(acc.clone());
        acc = &acc + &s.len;
    }
    let total = acc;
    let index: BTreeMap<SlotKind, usize> = sorted.iter().enumerate().map(|(i, s)| (s.kind, i)).collect();
    let whole = |k: SlotKind| {
        let i = index[&k];
        (starts[i].clone(), &starts[i] + &sorted[i].len)
    };
    // Member `k` of a tail slot.
    let member = |k: SlotKind, j: usize| -> (ExactScalar, ExactScalar) {
        let i = index[&k];
        let (first, ratio) = match k {
            SlotKind::Right(r) => (hi + r as i64, &ratio_r),
            SlotKind::Left(r) => (lo - 1 - r as i64, &ratio_l),
            _ => unreachable!("members only exist in tail slots"),
        };
        let l0 = len_at(first);
        let rk = ratio.pow_i(j as i64);
        let offset = &(&l0 * &(&one - &rk)) / &(&one - ratio);
        let lj = &l0 * &rk;
        if sorted[i].increasing {
            let a = &starts[i] + &offset;
            let b = &a + &lj;
            (a, b)
        } else {
            let b = &(&starts[i] + &sorted[i].len) - &offset;
            let a = &b - &lj;
            (a, b)
        }
    };

    // Image of every slot, plus the (member, successor) pairs used to check it.
    struct Mapped {
        lo: ExactScalar,
        hi: ExactScalar,
        letter: Letter,
        img: (ExactScalar, ExactScalar),
        reversed: bool,
        slope: ExactScalar,
    }
    let mut mapped = Vec::with_capacity(sorted.len());
    for (i, s) in sorted.iter().enumerate() {
        let reversed = orders.flips.contains(&s.letter);
        let dom = (starts[i].clone(), &starts[i] + &s.len);
        let (img, checks): (Span, Vec<(Span, Span)>) =
            match s.kind {
                SlotKind::Atom(m) => {
                    let next = if m + 1 < hi { whole(SlotKind::Atom(m + 1)) } else { member(SlotKind::Right(0), 0) };
                    (next.clone(), vec![(dom.clone(), next)])
                }
                SlotKind::Right(r) => {
                    let k = SlotKind::Right(r);
                    if r + 1 < p {
                        let nk = SlotKind::Right(r + 1);
                        (whole(nk), vec![(member(k, 0), member(nk, 0)), (member(k, 1), member(nk, 1))])
                    } else {
                        let u0 = SlotKind::Right(0);
                        let (a, b) = whole(u0);
                        let first = member(u0, 0);
                        let img = if sorted[index[&u0]].increasing { (first.1.clone(), b) } else { (a, first.0.clone()) };
                        (img, vec![(member(k, 0), member(u0, 1)), (member(k, 1), member(u0, 2))])
                    }
                }
                SlotKind::Left(r) => {
                    let k = SlotKind::Left(r);
                    if r >= 1 {
                        let nk = SlotKind::Left(r - 1);
                        (whole(nk), vec![(member(k, 0), member(nk, 0)), (member(k, 1), member(nk, 1))])
                    } else {
                        let atom = SlotKind::Atom(lo);
                        let last = SlotKind::Left(q - 1);
                        if index[&atom].abs_diff(index[&last]) != 1 {
                            return Err(too_coarse("the first kept interval is not adjacent to the left tail slot"));
                        }
                        let (a1, b1) = whole(atom);
                        let (a2, b2) = whole(last);
                        let img = (a1.clone().min(a2.clone()), b1.clone().max(b2.clone()));
                        (img, vec![(member(k, 0), (a1, b1)), (member(k, 1), member(last, 0))])
                    }
                }
                SlotKind::Phase(o, j) => {
                    let next = whole(SlotKind::Phase(o, (j + 1) % extra[o].len()));
                    (next.clone(), vec![(dom.clone(), next)])
                }
            };
        let slope = &(&img.1 - &img.0) / &s.len;
        let want = match s.kind {
            SlotKind::Phase(..) => one.clone(),
            _ => pow2(t[s.letter as usize]),
        };
        if slope != want {
            return Err(too_coarse(format!("slot {:?} would need slope {slope}, expected {want}", s.kind)));
        }
        for (from, to) in checks {
            let ends = [&from.0, &from.1].map(|x| {
                let off = &(x - &dom.0) * &slope;
                if reversed {
                    &img.1 - &off
                } else {
                    &img.0 + &off
                }
            });
            let got = if reversed { (ends[1].clone(), ends[0].clone()) } else { (ends[0].clone(), ends[1].clone()) };
            if got != to {
                return Err(too_coarse(format!("slot {:?} does not carry its intervals onto their successors", s.kind)));
            }
        }
        mapped.push(Mapped { lo: dom.0, hi: dom.1, letter: s.letter, img, reversed, slope });
    }

    // Images must tile the domain.
    let mut imgs: Vec<&(ExactScalar, ExactScalar)> = mapped.iter().map(|m| &m.img).collect();
    imgs.sort();
    let mut at = ExactScalar::zero();
    for (a, b) in imgs {
        if *a != at {
            return Err(too_coarse("images overlap or leave a gap"));
        }
        at = b.clone();
    }
    if at != total {
        return Err(too_coarse("images do not cover the domain"));
    }

    // Merge neighbours that one affine map serves.
    let mut pieces: Vec<Mapped> = Vec::new();
    for m in mapped {
        if let Some(prev) = pieces.last_mut() {
            let joins = prev.letter == m.letter
                && prev.reversed == m.reversed
                && prev.slope == m.slope
                && if m.reversed { m.img.1 == prev.img.0 } else { prev.img.1 == m.img.0 };
            if joins {
                prev.hi = m.hi;
                if m.reversed {
                    prev.img.0 = m.img.0;
                } else {
                    prev.img.1 = m.img.1;
                }
                continue;
            }
        }
        pieces.push(m);
    }

    // One letter per piece: the leftmost piece of each letter keeps its name.
    let mut fresh = ('a'..='z').chain('A'..='Z').filter(|c| !alphabet.chars().contains(c));
    let mut extra_chars = Vec::new();
    let mut groups: Vec<Vec<Letter>> = vec![Vec::new(); n];
    let mut piece_letter = Vec::with_capacity(pieces.len());
    for pc in &pieces {
        let g = &mut groups[pc.letter as usize];
        let l = if g.is_empty() {
            pc.letter
        } else {
            let c = fresh.next().ok_or_else(|| too_coarse("too many pieces to name"))?;
            extra_chars.push(c);
            (n + extra_chars.len() - 1) as Letter
        };
        g.push(l);
        piece_letter.push(l);
    }
    if let Some(e) = groups.iter().position(|g| g.is_empty()) {
        return Err(ConstructionError::InvalidOrbit(format!(
            "letter {} occurs in no orbit",
            alphabet.char_of(e as Letter)
        )));
    }
    let pieced = alphabet.extended(&extra_chars);
    let np = pieced.len();
    let mut lengths = vec![ExactScalar::zero(); np];
    let mut image_lengths = vec![ExactScalar::zero(); np];
    for (pc, &l) in pieces.iter().zip(&piece_letter) {
        lengths[l as usize] = &pc.hi - &pc.lo;
        image_lengths[l as usize] = &pc.img.1 - &pc.img.0;
    }
    let order_d: Word = piece_letter.clone();
    let mut by_image: Vec<(ExactScalar, Letter)> =
        pieces.iter().zip(&piece_letter).map(|(pc, &l)| (pc.img.0.clone(), l)).collect();
    by_image.sort();
    let order_a: Word = by_image.into_iter().map(|(_, l)| l).collect();
    let flips = pieces.iter().zip(&piece_letter).filter(|(pc, _)| pc.reversed).map(|(_, &l)| l).collect();
    let iet = build_iet(IetSpec {
        alphabet: pieced,
        lengths,
        image_lengths: Some(image_lengths),
        order_d,
        order_a,
        flips,
        kind: IetKind::Affine,
    })?;
    let scheme = grouped_coding_map(&iet, alphabet.clone(), groups)?;
    Ok(AffineBlowup { iet, scheme, theta_scale: scale, truncation_error: ExactScalar::zero(), birkhoff })
}

fn order_of(orders: &OrderSpec, x: &Window, y: &Window) -> Result<SeqOrder, ConstructionError> {
    match sequence_order(orders, x, y)? {
        s @ (SeqOrder::Less | SeqOrder::Greater) => Ok(s),
        _ => Err(too_coarse("two orbit positions cannot be told apart within the window")),
    }
}

fn compare_slots(orders: &OrderSpec, a: &Slot, b: &Slot) -> Result<SeqOrder, ConstructionError> {
    let mut seen = None;
    for x in &a.probes {
        for y in &b.probes {
            let o = order_of(orders, x, y)?;
            if seen.is_some_and(|s| s != o) {
                return Err(too_coarse(format!("slots {:?} and {:?} interleave", a.kind, b.kind)));
            }
            seen = Some(o);
        }
    }
    Ok(seen.expect("every slot has a probe"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::TailDescriptor;

    fn periodic(a: &Alphabet, left: &str, middle: &str, right: &str) -> TwoSidedSeq {
        TwoSidedSeq {
            left: TailDescriptor::periodic(a.parse(left).unwrap(), a.len()).unwrap(),
            middle: a.parse(middle).unwrap(),
            right: TailDescriptor::periodic(a.parse(right).unwrap(), a.len()).unwrap(),
        }
    }

    fn q(p: i64, d: i64) -> ExactScalar {
        ExactScalar::ratio(p, d)
    }

    #[test]
    fn fake_sturmian_layout() {
        let a = Alphabet::from_chars("12");
        let spec = OrderSpec::parse(&a, "12", "12", "").unwrap();
        let z = periodic(&a, "1", "", "2");
        let theta = ThetaVector(vec![q(1, 1), q(-1, 1)]);
        let out = affine_blowup(&a, &spec, &theta, &z, &[], 8).unwrap();
        assert!(out.scheme.is_identity());
        assert_eq!(out.iet.interval(0), (q(0, 1), q(1, 1)));
        assert_eq!(out.iet.image_interval(0), (q(0, 1), q(2, 1)));
        assert_eq!(out.iet.interval(1), (q(1, 1), q(3, 1)));
        assert_eq!(out.iet.image_interval(1), (q(2, 1), q(3, 1)));
    }

    #[test]
    fn split_skew_layout() {
        let a = Alphabet::from_chars("123");
        let spec = OrderSpec::parse(&a, "132", "213", "").unwrap();
        let z = periodic(&a, "3", "2", "1");
        let theta = ThetaVector(vec![q(-1, 1), q(0, 1), q(1, 1)]);
        let out = affine_blowup(&a, &spec, &theta, &z, &[], 6).unwrap();
        let t = &out.iet;
        assert_eq!(t.interval(0), (q(0, 1), q(2, 1)));
        assert_eq!(t.image_interval(0), (q(1, 1), q(2, 1)));
        assert_eq!(t.interval(2), (q(2, 1), q(3, 1)));
        assert_eq!(t.image_interval(2), (q(2, 1), q(4, 1)));
        assert_eq!(t.interval(1), (q(3, 1), q(4, 1)));
        assert_eq!(t.image_interval(1), (q(0, 1), q(1, 1)));
    }

    #[test]
    fn flat_slopes_diverge() {
        let a = Alphabet::from_chars("12");
        let spec = OrderSpec::parse(&a, "12", "12", "").unwrap();
        let z = periodic(&a, "1", "", "2");
        let err = affine_blowup(&a, &spec, &ThetaVector::zeros(2), &z, &[], 4).unwrap_err();
        assert!(matches!(err, ConstructionError::DivergentBirkhoffSums(_)));
    }

    #[test]
    fn irrational_log_slope_rejected() {
        let a = Alphabet::from_chars("12");
        let spec = OrderSpec::parse(&a, "12", "12", "").unwrap();
        let z = periodic(&a, "1", "", "2");
        let theta = ThetaVector(vec![ExactScalar::sqrt(2), q(-1, 1)]);
        assert_eq!(
            affine_blowup(&a, &spec, &theta, &z, &[], 4).unwrap_err(),
            ConstructionError::IrrationalTheta('1')
        );
    }
}
