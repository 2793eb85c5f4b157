//! Exact arithmetic in Q and in a real quadratic field Q(sqrt d).
//!
//! A scalar is `a + b*sqrt(d)` with rational `a`, `b`. All scalars that meet in
//! one computation must share the same `d`, except that a scalar with `b = 0`
//! is compatible with every field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("discriminant {0} is not square-free")]
    NonSquareFreeDiscriminant(u64),
    #[error("scalars live in different fields: sqrt({0}) and sqrt({1})")]
    MixedDiscriminants(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// Element `a + b*sqrt(d)` of Q(sqrt d). `d = 0` marks a plain rational.
#[derive(Clone, Debug)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    d: u64,
}

/// Unnormalized input to [`normalize`]: `p/q + (bp/bq) sqrt(d)`.
#[derive(Clone, Debug)]
pub struct RawScalar {
    pub p: BigInt,
    pub q: BigInt,
    pub bp: BigInt,
    pub bq: BigInt,
    pub d: u64,
}

pub fn is_square_free(d: u64) -> bool {
    if d == 0 {
        return true;
    }
    let mut k: u64 = 2;
    while k.saturating_mul(k) <= d {
        if d.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Validate and reduce a raw scalar to canonical form.
pub fn normalize(raw: RawScalar) -> Result<ExactScalar, ExactError> {
    if raw.q.is_zero() || raw.bq.is_zero() {
        return Err(ExactError::ZeroDenominator);
    }
    if !is_square_free(raw.d) {
        return Err(ExactError::NonSquareFreeDiscriminant(raw.d));
    }
    let a = BigRational::new(raw.p, raw.q);
    let b = BigRational::new(raw.bp, raw.bq);
    Ok(ExactScalar::from_parts(a, b, raw.d))
}

fn int_sign(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn rat_sign(x: &BigRational) -> i8 {
    int_sign(x.numer())
}

impl ExactScalar {
    /// Build from parts; `d = 1` is folded into the rational part.
    pub fn from_parts(a: BigRational, b: BigRational, d: u64) -> Self {
        debug_assert!(is_square_free(d));
        if d == 1 {
            return ExactScalar { a: a + b, b: BigRational::zero(), d: 0 };
        }
        if d == 0 {
            assert!(b.is_zero(), "rational scalar with nonzero surd part");
        }
        ExactScalar { a, b, d }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar { a: BigRational::from_integer(BigInt::from(n)), b: BigRational::zero(), d: 0 }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        ExactScalar { a: BigRational::from_integer(n), b: BigRational::zero(), d: 0 }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        ExactScalar { a: BigRational::new(p.into(), q.into()), b: BigRational::zero(), d: 0 }
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactScalar { a: r, b: BigRational::zero(), d: 0 }
    }

    /// `p/q + (bp/bq) sqrt(d)`; panics on invalid input, see [`normalize`] for the checked form.
    pub fn quad(p: i64, q: i64, bp: i64, bq: i64, d: u64) -> Self {
        normalize(RawScalar {
            p: p.into(),
            q: q.into(),
            bp: bp.into(),
            bq: bq.into(),
            d,
        })
        .expect("invalid quadratic scalar")
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: u64) -> Self {
        Self::quad(0, 1, 1, 1, d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The field both operands live in, or an error if they disagree.
    fn common_d(&self, other: &Self) -> Result<u64, ExactError> {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => Ok(self.d.max(other.d)),
            (true, false) => {
                if self.d == 0 || self.d == other.d {
                    Ok(other.d)
                } else {
                    Err(ExactError::MixedDiscriminants(self.d, other.d))
                }
            }
            (false, true) => {
                if other.d == 0 || self.d == other.d {
                    Ok(self.d)
                } else {
                    Err(ExactError::MixedDiscriminants(self.d, other.d))
                }
            }
            (false, false) => {
                if self.d == other.d {
                    Ok(self.d)
                } else {
                    Err(ExactError::MixedDiscriminants(self.d, other.d))
                }
            }
        }
    }

    /// Sign of the real number, decided exactly.
    pub fn signum(&self) -> i8 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: compare a^2 with b^2 d.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, ExactError> {
        let d = self.common_d(o)?;
        Ok(ExactScalar { a: &self.a + &o.a, b: &self.b + &o.b, d })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, ExactError> {
        let d = self.common_d(o)?;
        Ok(ExactScalar { a: &self.a - &o.a, b: &self.b - &o.b, d })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, ExactError> {
        let d = self.common_d(o)?;
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &o.a + &self.b * &o.b * dd;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(ExactScalar { a, b, d })
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * dd;
        Ok(ExactScalar { a: &self.a / &norm, b: -(&self.b / &norm), d: self.d })
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ExactError> {
        self.common_d(o)?;
        self.checked_mul(&o.recip()?)
    }

    /// Exact comparison under the embedding with `sqrt(d) > 0`.
    pub fn compare(&self, o: &Self) -> Result<Ordering, ExactError> {
        let diff = self.checked_sub(o)?;
        Ok(diff.signum().cmp(&0))
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow_i(&self, e: i64) -> Self {
        let base = if e < 0 { self.recip().expect("zero to a negative power") } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    pub fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }

    pub fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        // Approximate via integer square root, then correct with exact comparisons.
        let guess = {
            let q = self.a.denom() * self.b.denom();
            let p = self.a.numer() * self.b.denom();
            let r = self.b.numer() * self.a.denom();
            let r2d = &r * &r * BigInt::from(self.d);
            let s = r2d.sqrt();
            let s = if r.is_negative() { -s } else { s };
            (p + s).div_floor(&q)
        };
        let mut n = guess;
        while ExactScalar::from_bigint(n.clone()) > *self {
            n -= 1;
        }
        while ExactScalar::from_bigint(&n + 1) <= *self {
            n += 1;
        }
        n
    }

    /// Lossy conversion for diagnostics and reports only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Decimal rendering truncated toward minus infinity.
    pub fn approx(&self, digits: u32) -> Approximation {
        let digits = digits.max(1);
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = self * &ExactScalar::from_bigint(scale.clone());
        let n = scaled.floor();
        let lower = BigRational::new(n.clone(), scale.clone());
        let upper = BigRational::new(&n + 1, scale.clone());
        let neg = n.is_negative();
        let mag = n.abs();
        let (ip, fp) = mag.div_rem(&scale);
        let frac = format!("{:0>width$}", fp.to_string(), width = digits as usize);
        let text = format!("{}{}.{}", if neg { "-" } else { "" }, ip, frac);
        Approximation { text, digits, lower, upper }
    }
}

/// Decimal approximation together with the half-open interval `[lower, upper)`
/// known to contain the exact value; `upper - lower = 10^-digits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    pub text: String,
    pub digits: u32,
    pub lower: BigRational,
    pub upper: BigRational,
}

pub fn approx(x: &ExactScalar, digits: u32) -> Approximation {
    x.approx(digits)
}

pub fn compare(x: &ExactScalar, y: &ExactScalar) -> Result<Ordering, ExactError> {
    x.compare(y)
}

impl PartialEq for ExactScalar {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b && (self.b.is_zero() || self.d == o.d)
    }
}

impl Eq for ExactScalar {}

#[allow(clippy::non_canonical_partial_ord_impl)]
impl PartialOrd for ExactScalar {
    /// `None` when the two scalars live in different quadratic fields.
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.compare(o).ok()
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, o: &Self) -> Ordering {
        self.compare(o).expect("comparison across different quadratic fields")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a, 'b> $tr<&'b ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &'b ExactScalar) -> ExactScalar {
                self.$checked(o).expect(concat!("exact ", stringify!($m), " failed"))
            }
        }
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                (&self).$m(&o)
            }
        }
        impl<'b> $tr<&'b ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &'b ExactScalar) -> ExactScalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> ExactScalar {
        iter.fold(ExactScalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a ExactScalar> for ExactScalar {
    fn sum<I: Iterator<Item = &'a ExactScalar>>(iter: I) -> ExactScalar {
        iter.fold(ExactScalar::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let b_abs = self.b.abs();
        let surd = if b_abs.is_one() { format!("√{}", self.d) } else { format!("{}·√{}", b_abs, self.d) };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{}", surd)
            } else {
                write!(f, "{}", surd)
            }
        } else {
            let op = if self.b.is_negative() { "-" } else { "+" };
            write!(f, "{} {} {}", self.a, op, surd)
        }
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
}

// JSON form: {"p","q","bp","bq","d"}. Integers that do not fit in i64 are written as strings.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn from_big(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(x.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt, String> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => s.parse::<BigInt>().map_err(|e| format!("bad integer {s:?}: {e}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    p: JsonInt,
    #[serde(default = "one_int")]
    q: JsonInt,
    #[serde(default = "zero_int")]
    bp: JsonInt,
    #[serde(default = "one_int")]
    bq: JsonInt,
    #[serde(default)]
    d: u64,
}

fn one_int() -> JsonInt {
    JsonInt::Small(1)
}

fn zero_int() -> JsonInt {
    JsonInt::Small(0)
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let d = if self.b.is_zero() { 0 } else { self.d };
        ScalarJson {
            p: JsonInt::from_big(self.a.numer()),
            q: JsonInt::from_big(self.a.denom()),
            bp: JsonInt::from_big(self.b.numer()),
            bq: JsonInt::from_big(self.b.denom()),
            d,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = ScalarJson::deserialize(de)?;
        let raw = RawScalar {
            p: j.p.to_big().map_err(D::Error::custom)?,
            q: j.q.to_big().map_err(D::Error::custom)?,
            bp: j.bp.to_big().map_err(D::Error::custom)?,
            bq: j.bq.to_big().map_err(D::Error::custom)?,
            d: j.d,
        };
        if raw.d == 0 && !raw.bp.is_zero() {
            return Err(D::Error::custom("surd coefficient given with d = 0"));
        }
        normalize(raw).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_alpha() -> ExactScalar {
        ExactScalar::quad(3, 2, -1, 2, 5)
    }

    #[test]
    fn normalize_reduces_and_keeps_tag() {
        let x = normalize(RawScalar { p: 2.into(), q: 4.into(), bp: 0.into(), bq: 1.into(), d: 5 }).unwrap();
        assert_eq!(x.rational_part(), &BigRational::new(1.into(), 2.into()));
        assert!(x.surd_part().is_zero());
        assert_eq!(x.discriminant(), 5);
    }

    #[test]
    fn normalize_quadratic_sign() {
        let x = normalize(RawScalar { p: 3.into(), q: 2.into(), bp: (-1).into(), bq: 2.into(), d: 5 }).unwrap();
        assert_eq!(x.signum(), 1);
        assert_eq!(x.surd_part(), &BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn normalize_errors() {
        let zero_den = RawScalar { p: 1.into(), q: 0.into(), bp: 0.into(), bq: 1.into(), d: 0 };
        assert_eq!(normalize(zero_den).unwrap_err(), ExactError::ZeroDenominator);
        let bad_d = RawScalar { p: 1.into(), q: 1.into(), bp: 1.into(), bq: 1.into(), d: 12 };
        assert_eq!(normalize(bad_d).unwrap_err(), ExactError::NonSquareFreeDiscriminant(12));
    }

    #[test]
    fn zero_has_sign_zero() {
        assert_eq!(ExactScalar::quad(0, 1, 0, 1, 5).signum(), 0);
    }

    #[test]
    fn compare_examples() {
        let a = golden_alpha();
        assert_eq!(ExactScalar::ratio(1, 2).compare(&a).unwrap(), Ordering::Greater);
        assert_eq!(a.compare(&a).unwrap(), Ordering::Equal);
        assert_eq!(ExactScalar::zero().compare(&a).unwrap(), Ordering::Less);
        let mixed = ExactScalar::sqrt(2).compare(&ExactScalar::sqrt(3));
        assert_eq!(mixed.unwrap_err(), ExactError::MixedDiscriminants(2, 3));
    }

    #[test]
    fn approx_examples() {
        assert_eq!(golden_alpha().approx(6).text, "0.381966");
        assert_eq!(ExactScalar::ratio(1, 3).approx(3).text, "0.333");
        assert_eq!(ExactScalar::zero().approx(5).text, "0.00000");
        assert_eq!(ExactScalar::ratio(-1, 3).approx(3).text, "-0.334");
        assert_eq!(ExactScalar::from_int(7).approx(2).text, "7.00");
    }

    #[test]
    fn golden_ratio_identities() {
        let a = golden_alpha();
        // alpha^2 - 3 alpha + 1 = 0
        let e = &a * &a - ExactScalar::from_int(3) * &a + ExactScalar::one();
        assert!(e.is_zero());
        let inv = a.recip().unwrap();
        assert_eq!(&inv * &a, ExactScalar::one());
    }

    #[test]
    fn json_roundtrip() {
        let a = golden_alpha();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"p":3,"q":2,"bp":-1,"bq":2,"d":5}"#);
        let back: ExactScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let r: ExactScalar = serde_json::from_str(r#"{"p":7,"q":2}"#).unwrap();
        assert_eq!(r, ExactScalar::ratio(7, 2));
        let huge = ExactScalar::from_int(2).pow_i(-70);
        let back: ExactScalar = serde_json::from_str(&serde_json::to_string(&huge).unwrap()).unwrap();
        assert_eq!(back, huge);
    }

    #[test]
    fn floor_matches_integer_sqrt() {
        // floor(k * sqrt 5) against isqrt(5 k^2) for a range of k.
        for k in -50i64..50 {
            let x = ExactScalar::quad(0, 1, k, 1, 5);
            let expect = {
                let s = BigInt::from(5 * k * k).sqrt();
                if k >= 0 {
                    s
                } else {
                    -s - 1
                }
            };
            assert_eq!(x.floor(), expect, "k = {k}");
        }
    }
}
