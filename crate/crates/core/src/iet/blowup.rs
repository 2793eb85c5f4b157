//! Denjoy-type blow-up of orbits of a standard interval exchange.
//!
//! Every point `p_m` of a declared orbit is replaced by an interval `J_m` of
//! length `2^-|m|`. Points sharing a base position are stacked left to right
//! in the order of their symbolic sequences. Blown intervals are sent affinely
//! onto their successors, everything else moves like the base map.
//!
//! The layout is materialised once, for indices `-D <= m <= D` where `D` is
//! the orbit depth budget. `J_D` is sent onto the single point standing for
//! `p_(D+1)`, so the map is exact for codings that stay within the budget.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::exactnum::ExactScalar;
use crate::iet::{step_error, CodedMap, Coding, Direction, IetError, IntervalExchange, Piece, PieceImage, PiecewiseMap, Step};
use crate::order::{sequence_order, OrderSpec, SeqOrder};
use crate::sequence::TwoSidedSeq;

pub const DEFAULT_MAX_ORBIT_DEPTH: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlowupError {
    #[error("anchor {0} is neither an endpoint of the base map nor a bounded iterate of one")]
    AnchorNotEndpoint(String),
    #[error("inconsistent orbit data: {0}")]
    InconsistentSeed(String),
    #[error(transparent)]
    Iet(#[from] IetError),
}

/// Which one-sided limit of the base map a point follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Exact,
}

impl Side {
    fn mirrored(self, reversed: bool) -> Side {
        match (self, reversed) {
            (Side::Left, true) => Side::Right,
            (Side::Right, true) => Side::Left,
            (s, _) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePoint {
    pub x: ExactScalar,
    pub side: Side,
}

impl BasePoint {
    pub fn new(x: ExactScalar, side: Side) -> Self {
        BasePoint { x, side }
    }
}

/// One non-recurrent orbit: its sequence and the base positions of the
/// middle word and of the first index of each tail.
#[derive(Clone, Debug)]
pub struct BlowupOrbit {
    pub z: TwoSidedSeq,
    /// Base point of each index `0 .. |middle|`.
    pub middle_points: Vec<BasePoint>,
    /// Base point of index `|middle|`; later indices follow the base map.
    pub right_start: BasePoint,
    /// Base point of index `-1`; earlier indices follow the inverse base map.
    pub left_start: BasePoint,
}

#[derive(Clone, Debug)]
pub struct LazyBlowupMap {
    base: IntervalExchange,
    alphabet: Alphabet,
    orders: OrderSpec,
    orbits: Vec<BlowupOrbit>,
    max_orbit_depth: usize,
    base_points: Vec<BTreeMap<i64, BasePoint>>,
    blown: Vec<BTreeMap<i64, (ExactScalar, ExactScalar)>>,
    map: PiecewiseMap,
}

fn in_piece(lo: &ExactScalar, hi: &ExactScalar, x: &ExactScalar, side: Side) -> bool {
    match side {
        Side::Exact => lo < x && x < hi,
        Side::Right => lo <= x && x < hi,
        Side::Left => lo < x && x <= hi,
    }
}

fn base_piece<'a>(base: &'a IntervalExchange, p: &BasePoint) -> Option<&'a Piece> {
    base.map().pieces().iter().find(|pc| in_piece(&pc.lo, &pc.hi, &p.x, p.side))
}

fn step_base(base: &IntervalExchange, p: &BasePoint, dir: Direction) -> Option<BasePoint> {
    match dir {
        Direction::Forward => {
            let pc = base_piece(base, p)?;
            let reversed = matches!(pc.image, PieceImage::Interval { reversed: true, .. });
            Some(BasePoint { x: pc.forward(&p.x), side: p.side.mirrored(reversed) })
        }
        Direction::Backward => base.map().pieces().iter().find_map(|pc| match &pc.image {
            PieceImage::Interval { lo, hi, reversed } if in_piece(lo, hi, &p.x, p.side) => {
                Some(BasePoint { x: pc.backward(&p.x), side: p.side.mirrored(*reversed) })
            }
            _ => None,
        }),
    }
}

fn two_pow_neg(k: u64) -> ExactScalar {
    ExactScalar::from_rational(num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(1) << k))
}

/// Length of `J_m`.
pub fn blown_length(m: i64) -> ExactScalar {
    two_pow_neg(m.unsigned_abs())
}

impl LazyBlowupMap {
    /// Blow up `orbits` of the standard map `base`.
    ///
    /// `alphabet` must extend the base alphabet (base letters keep their
    /// indices) and `orders` must be an order spec over it; the order is used
    /// to stack blown intervals that share a base point.
    pub fn new(
        base: IntervalExchange,
        alphabet: Alphabet,
        orders: OrderSpec,
        orbits: Vec<BlowupOrbit>,
        max_orbit_depth: usize,
    ) -> Result<Self, BlowupError> {
        let nb = base.alphabet().len();
        if alphabet.chars()[..nb.min(alphabet.len())] != *base.alphabet().chars() {
            return Err(BlowupError::InconsistentSeed("alphabet must extend the base alphabet".into()));
        }
        if orders.order_d.len() != alphabet.len() || orders.order_a.len() != alphabet.len() {
            return Err(BlowupError::InconsistentSeed("orders must cover the whole alphabet".into()));
        }
        for l in base.alphabet().letters() {
            if base.is_flipped(l) != orders.flips.contains(&l) {
                return Err(BlowupError::InconsistentSeed(format!(
                    "flip status of {} differs from the base map",
                    alphabet.char_of(l)
                )));
            }
        }
        let d = max_orbit_depth as i64;
        let endpoints: BTreeSet<ExactScalar> = base.gammas().into_iter().chain(base.betas()).collect();
        let show = |p: &BasePoint| format!("{} ({:?})", p.x.approx(6).text, p.side);

        let mut base_points = Vec::with_capacity(orbits.len());
        for (oi, orbit) in orbits.iter().enumerate() {
            let mid = orbit.z.middle.len() as i64;
            if orbit.middle_points.len() as i64 != mid {
                return Err(BlowupError::InconsistentSeed(format!(
                    "orbit {oi}: {} middle points for a middle word of length {mid}",
                    orbit.middle_points.len()
                )));
            }
            if mid > d {
                return Err(BlowupError::InconsistentSeed(format!("orbit {oi}: middle word longer than the depth budget")));
            }
            for anchor in orbit.middle_points.iter().chain([&orbit.right_start, &orbit.left_start]) {
                if !Self::reaches_endpoint(&base, anchor, &endpoints, max_orbit_depth) {
                    return Err(BlowupError::AnchorNotEndpoint(show(anchor)));
                }
            }
            let mut pts = BTreeMap::new();
            for (k, p) in orbit.middle_points.iter().enumerate() {
                pts.insert(k as i64, p.clone());
            }
            let mut cur = orbit.right_start.clone();
            for m in mid..=d + 1 {
                if m > mid {
                    cur = step_base(&base, &cur, Direction::Forward).ok_or_else(|| {
                        BlowupError::InconsistentSeed(format!("orbit {oi}: forward orbit undefined at index {m}"))
                    })?;
                }
                pts.insert(m, cur.clone());
            }
            let mut cur = orbit.left_start.clone();
            for m in (-d - 1..=-1).rev() {
                if m < -1 {
                    cur = step_base(&base, &cur, Direction::Backward).ok_or_else(|| {
                        BlowupError::InconsistentSeed(format!("orbit {oi}: backward orbit undefined at index {m}"))
                    })?;
                }
                pts.insert(m, cur.clone());
            }
            for m in -d..=d {
                let p = &pts[&m];
                let letter = orbit.z.letter_at(m);
                if (letter as usize) < nb {
                    match base_piece(&base, p) {
                        Some(pc) if pc.letter == letter => {}
                        _ => {
                            return Err(BlowupError::InconsistentSeed(format!(
                                "orbit {oi}: letter {} at index {m} does not match base point {}",
                                alphabet.char_of(letter),
                                show(p)
                            )))
                        }
                    }
                } else if !endpoints.contains(&p.x) {
                    return Err(BlowupError::InconsistentSeed(format!(
                        "orbit {oi}: new letter {} at index {m} sits at {}, which is not an endpoint",
                        alphabet.char_of(letter),
                        show(p)
                    )));
                }
            }
            base_points.push(pts);
        }

        // Stack the blown intervals sharing a base point.
        let radius = 2 * max_orbit_depth + 2;
        let mut clusters: BTreeMap<ExactScalar, Vec<(usize, i64)>> = BTreeMap::new();
        for (oi, pts) in base_points.iter().enumerate() {
            for m in -d..=d {
                clusters.entry(pts[&m].x.clone()).or_default().push((oi, m));
            }
        }
        for members in clusters.values_mut() {
            let mut sorted: Vec<(usize, i64)> = Vec::with_capacity(members.len());
            for &(oi, m) in members.iter() {
                let w = orbits[oi].z.shifted_window(m, radius);
                let mut at = sorted.len();
                for (k, &(oj, mj)) in sorted.iter().enumerate() {
                    let v = orbits[oj].z.shifted_window(mj, radius);
                    match sequence_order(&orders, &w, &v).map_err(|e| BlowupError::InconsistentSeed(e.to_string()))? {
                        SeqOrder::Less => {
                            at = k;
                            break;
                        }
                        SeqOrder::Greater => {}
                        SeqOrder::Equal | SeqOrder::Unresolved => {
                            return Err(BlowupError::InconsistentSeed(format!(
                                "cannot order index {m} of orbit {oi} against index {mj} of orbit {oj}"
                            )))
                        }
                    }
                }
                sorted.insert(at, (oi, m));
            }
            *members = sorted;
        }
        let cluster_len: BTreeMap<ExactScalar, ExactScalar> = clusters
            .iter()
            .map(|(x, ms)| (x.clone(), ms.iter().map(|&(_, m)| blown_length(m)).sum()))
            .collect();
        let phi = |x: &ExactScalar| -> ExactScalar { cluster_len.range(..x.clone()).map(|(_, l)| l).sum() };
        let start = |x: &ExactScalar| x + &phi(x);
        let end = |x: &ExactScalar| {
            let s = start(x);
            match cluster_len.get(x) {
                Some(l) => s + l,
                None => s,
            }
        };

        let mut blown: Vec<BTreeMap<i64, (ExactScalar, ExactScalar)>> = vec![BTreeMap::new(); orbits.len()];
        for (x, members) in &clusters {
            let mut s = start(x);
            for &(oi, m) in members {
                let e = &s + &blown_length(m);
                blown[oi].insert(m, (s.clone(), e.clone()));
                s = e;
            }
        }

        let mut pieces = Vec::new();
        for (oi, orbit) in orbits.iter().enumerate() {
            for m in -d..=d {
                let (lo, hi) = blown[oi][&m].clone();
                let letter = orbit.z.letter_at(m);
                let image = if m < d {
                    let (ilo, ihi) = blown[oi][&(m + 1)].clone();
                    PieceImage::Interval { lo: ilo, hi: ihi, reversed: orders.flips.contains(&letter) }
                } else {
                    let p = &base_points[oi][&(d + 1)];
                    let pos = match (cluster_len.contains_key(&p.x), p.side) {
                        (true, Side::Right) => end(&p.x),
                        _ => start(&p.x),
                    };
                    PieceImage::Point(pos)
                };
                pieces.push(Piece { lo, hi, letter, image });
            }
        }

        let mut cuts: BTreeSet<ExactScalar> = base.gammas().into_iter().collect();
        for x in clusters.keys() {
            cuts.insert(x.clone());
            if let Ok(Step::Defined(pre)) = base.map().backward(x) {
                cuts.insert(pre);
            }
        }
        let cuts: Vec<ExactScalar> = cuts.into_iter().collect();
        for w in cuts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let mid = (a + b) / ExactScalar::from_int(2);
            let pc = base_piece(&base, &BasePoint::new(mid, Side::Exact))
                .expect("gap between consecutive cut points lies inside one defining interval");
            let reversed = matches!(pc.image, PieceImage::Interval { reversed: true, .. });
            let (fa, fb) = (pc.forward(a), pc.forward(b));
            let (u, v) = if reversed { (fb, fa) } else { (fa, fb) };
            pieces.push(Piece {
                lo: end(a),
                hi: start(b),
                letter: pc.letter,
                image: PieceImage::Interval { lo: end(&u), hi: start(&v), reversed },
            });
        }
        let total = base.total() + &cluster_len.values().sum::<ExactScalar>();
        let map = PiecewiseMap::new(pieces, total);
        Ok(LazyBlowupMap { base, alphabet, orders, orbits, max_orbit_depth, base_points, blown, map })
    }

    fn reaches_endpoint(base: &IntervalExchange, p: &BasePoint, endpoints: &BTreeSet<ExactScalar>, depth: usize) -> bool {
        if endpoints.contains(&p.x) {
            return true;
        }
        for dir in [Direction::Forward, Direction::Backward] {
            let mut cur = p.clone();
            for _ in 0..depth {
                match step_base(base, &cur, dir) {
                    Some(next) => {
                        if endpoints.contains(&next.x) {
                            return true;
                        }
                        cur = next;
                    }
                    None => break,
                }
            }
        }
        false
    }

    pub fn base(&self) -> &IntervalExchange {
        &self.base
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn orders(&self) -> &OrderSpec {
        &self.orders
    }

    pub fn orbits(&self) -> &[BlowupOrbit] {
        &self.orbits
    }

    pub fn max_orbit_depth(&self) -> usize {
        self.max_orbit_depth
    }

    /// Domain length of the truncated map.
    pub fn total(&self) -> &ExactScalar {
        self.map.total()
    }

    /// Domain length of the untruncated blow-up: each orbit adds `sum 2^-|m| = 3`.
    pub fn closed_form_total(&self) -> ExactScalar {
        self.base.total() + &ExactScalar::from_int(3 * self.orbits.len() as i64)
    }

    /// Total blown length over indices `|m| <= depth` (capped at the budget).
    pub fn blown_length_up_to(&self, depth: usize) -> ExactScalar {
        let d = depth.min(self.max_orbit_depth) as i64;
        let per_orbit: ExactScalar = (-d..=d).map(blown_length).sum();
        per_orbit * ExactScalar::from_int(self.orbits.len() as i64)
    }

    /// `J_m` of orbit `orbit`, if within the budget.
    pub fn blown_interval(&self, orbit: usize, m: i64) -> Option<(ExactScalar, ExactScalar)> {
        self.blown.get(orbit)?.get(&m).cloned()
    }

    /// Base point `p_m` of orbit `orbit` (available for `-D-1 <= m <= D+1`).
    pub fn base_point(&self, orbit: usize, m: i64) -> Option<&BasePoint> {
        self.base_points.get(orbit)?.get(&m)
    }

    pub fn map(&self) -> &PiecewiseMap {
        &self.map
    }

    pub fn apply(&self, x: &ExactScalar, dir: Direction) -> Result<Step, IetError> {
        self.map.step(x, dir).map_err(|e| match step_error(e) {
            IetError::DepthBudgetExceeded(_) => IetError::DepthBudgetExceeded(self.max_orbit_depth),
            other => other,
        })
    }

    pub fn natural_coding(&self, x: &ExactScalar, n_back: usize, n_fwd: usize) -> Result<Coding, IetError> {
        self.map.coding(x, n_back, n_fwd).map_err(step_error)
    }

    fn longest_middle(&self) -> usize {
        self.orbits.iter().map(|o| o.z.middle.len()).max().unwrap_or(0)
    }
}

impl CodedMap for LazyBlowupMap {
    fn coding_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn engine(&self) -> &PiecewiseMap {
        &self.map
    }
    fn depth_budget(&self) -> Option<usize> {
        Some(self.max_orbit_depth.saturating_sub(self.longest_middle()))
    }
}
