//! Outward-rounded interval arithmetic at configurable binary precision.
//!
//! Endpoints are MPFR floats. Every operation rounds its lower endpoint toward
//! -∞ and its upper endpoint toward +∞, with the rounding direction passed per
//! call, so no floating-point environment state is shared between threads.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Round, Special};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigorError {
    #[error("precision of {bits} bits is below the minimum of {min} bits")]
    InvalidPrecision { bits: u32, min: u32 },
    #[error("precision cap of {cap} bits reached")]
    CapReached { cap: u32 },
}

/// Working precision in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 11;
    pub const DEFAULT: Precision = Precision(53);
    pub const DEFAULT_CAP: Precision = Precision(4096);

    pub fn new(bits: u32) -> Result<Self, RigorError> {
        if bits < Self::MIN_BITS {
            return Err(RigorError::InvalidPrecision {
                bits,
                min: Self::MIN_BITS,
            });
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<u32> for Precision {
    type Error = RigorError;
    fn try_from(bits: u32) -> Result<Self, Self::Error> {
        Precision::new(bits)
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.0
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// Doubles the bit count, clamped to `cap`.
pub fn refine_precision(p: Precision, cap: Precision) -> Result<Precision, RigorError> {
    if p >= cap {
        return Err(RigorError::CapReached { cap: cap.0 });
    }
    Ok(Precision(p.0.saturating_mul(2).min(cap.0)))
}

/// Result of a certified sign query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    Unknown,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
            Sign::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

fn round_down<T>(prec: u32, val: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    let (f, _) = Float::with_val_round(prec, val, Round::Down);
    nan_to_zero(f)
}

fn round_up<T>(prec: u32, val: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    let (f, _) = Float::with_val_round(prec, val, Round::Up);
    nan_to_zero(f)
}

// 0·∞ only arises from an exact zero endpoint meeting an infinite one; the
// extended-interval convention is 0.
fn nan_to_zero(f: Float) -> Float {
    if f.is_nan() {
        Float::with_val(f.prec(), 0)
    } else {
        f
    }
}

/// A closed interval `[lower, upper]` with `lower <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl Interval {
    /// Builds an interval from endpoints already rounded outward.
    ///
    /// Panics if either endpoint is NaN or `lo > hi`.
    pub fn from_floats(lo: Float, hi: Float) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN interval endpoint");
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn zero(p: Precision) -> Self {
        Self::from_int(0, p)
    }

    pub fn one(p: Precision) -> Self {
        Self::from_int(1, p)
    }

    pub fn from_int(n: i64, p: Precision) -> Self {
        Interval {
            lo: round_down(p.0, n),
            hi: round_up(p.0, n),
        }
    }

    pub fn from_integer(n: &Integer, p: Precision) -> Self {
        Interval {
            lo: round_down(p.0, n),
            hi: round_up(p.0, n),
        }
    }

    /// Smallest `p`-bit interval containing `q`.
    pub fn from_rational(q: &Rational, p: Precision) -> Self {
        Interval {
            lo: round_down(p.0, q),
            hi: round_up(p.0, q),
        }
    }

    /// Encloses `[lo, hi]` for rationals `lo <= hi`.
    pub fn from_rational_bounds(lo: &Rational, hi: &Rational, p: Precision) -> Self {
        assert!(lo <= hi, "rational bounds out of order");
        Interval {
            lo: round_down(p.0, lo),
            hi: round_up(p.0, hi),
        }
    }

    /// Encloses `[lo, hi]` given as decimal strings; `None` if either fails
    /// to parse or they are out of order.
    pub fn from_decimal_bounds(lo: &str, hi: &str, p: Precision) -> Option<Self> {
        let parse = |s: &str, r: Round| -> Option<Float> {
            let inc = Float::parse(s).ok()?;
            Some(Float::with_val_round(p.0, inc, r).0)
        };
        let lo = parse(lo, Round::Down)?;
        let hi = parse(hi, Round::Up)?;
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Encloses the exact binary value of `x`.
    pub fn from_f64(x: f64, p: Precision) -> Self {
        assert!(x.is_finite(), "non-finite f64 {x}");
        Interval {
            lo: round_down(p.0, x),
            hi: round_up(p.0, x),
        }
    }

    pub fn entire(p: Precision) -> Self {
        Interval {
            lo: Float::with_val(p.0, Special::NegInfinity),
            hi: Float::with_val(p.0, Special::Infinity),
        }
    }

    pub fn prec(&self) -> Precision {
        Precision(self.lo.prec().max(self.hi.prec()))
    }

    pub fn lower(&self) -> &Float {
        &self.lo
    }

    pub fn upper(&self) -> &Float {
        &self.hi
    }

    pub fn lower_f64(&self) -> f64 {
        self.lo.to_f64_round(Round::Down)
    }

    pub fn upper_f64(&self) -> f64 {
        self.hi.to_f64_round(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        if self.lo.is_infinite() || self.hi.is_infinite() {
            return if self.lo.is_infinite() && self.hi.is_infinite() {
                0.0
            } else if self.lo.is_infinite() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        let p = self.prec().0 + 1;
        let mid = Float::with_val(p, &self.lo + &self.hi) / 2u32;
        mid.to_f64()
    }

    /// Upper bound on `upper - lower`.
    pub fn width(&self) -> Float {
        round_up(self.prec().0, &self.hi - &self.lo)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64_round(Round::Up)
    }

    /// Upper bound on `max |x|`.
    pub fn mag(&self) -> Float {
        let a = Float::with_val(self.prec().0, self.lo.abs_ref());
        let b = Float::with_val(self.prec().0, self.hi.abs_ref());
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo <= *q && self.hi >= *q
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && self.hi >= x
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        let p = self.prec().0.max(other.prec().0);
        let lo = if self.lo <= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi >= other.hi { &self.hi } else { &other.hi };
        Interval {
            lo: round_down(p, lo),
            hi: round_up(p, hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let p = self.prec().0.max(other.prec().0);
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        if lo > hi {
            return None;
        }
        Some(Interval {
            lo: round_down(p, lo),
            hi: round_up(p, hi),
        })
    }

    /// Re-rounds both endpoints outward to precision `p`.
    pub fn with_prec(&self, p: Precision) -> Interval {
        Interval {
            lo: round_down(p.0, &self.lo),
            hi: round_up(p.0, &self.hi),
        }
    }

    /// Certified sign: positive iff `lower > 0`, negative iff `upper < 0`.
    pub fn sign(&self) -> Sign {
        if self.lo > 0 {
            Sign::Positive
        } else if self.hi < 0 {
            Sign::Negative
        } else {
            Sign::Unknown
        }
    }

    pub fn add_ref(&self, rhs: &Interval) -> Interval {
        let p = self.prec().0.max(rhs.prec().0);
        Interval {
            lo: round_down(p, &self.lo + &rhs.lo),
            hi: round_up(p, &self.hi + &rhs.hi),
        }
    }

    pub fn sub_ref(&self, rhs: &Interval) -> Interval {
        let p = self.prec().0.max(rhs.prec().0);
        Interval {
            lo: round_down(p, &self.lo - &rhs.hi),
            hi: round_up(p, &self.hi - &rhs.lo),
        }
    }

    pub fn neg_ref(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul_ref(&self, rhs: &Interval) -> Interval {
        let p = self.prec().0.max(rhs.prec().0);
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let d = round_down(p, a * b);
            let u = round_up(p, a * b);
            if lo.as_ref().is_none_or(|l| d < *l) {
                lo = Some(d);
            }
            if hi.as_ref().is_none_or(|h| u > *h) {
                hi = Some(u);
            }
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    /// Division; a divisor containing zero yields the entire line.
    pub fn div_ref(&self, rhs: &Interval) -> Interval {
        let p = self.prec().0.max(rhs.prec().0);
        if rhs.contains_zero() {
            return Interval::entire(Precision(p));
        }
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let d = round_down(p, a / b);
            let u = round_up(p, a / b);
            if lo.as_ref().is_none_or(|l| d < *l) {
                lo = Some(d);
            }
            if hi.as_ref().is_none_or(|h| u > *h) {
                hi = Some(u);
            }
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Interval {
        let p = self.prec().0;
        match q.cmp0() {
            Ordering::Equal => Interval::zero(Precision(p)),
            Ordering::Greater => Interval {
                lo: round_down(p, &self.lo * q),
                hi: round_up(p, &self.hi * q),
            },
            Ordering::Less => Interval {
                lo: round_down(p, &self.hi * q),
                hi: round_up(p, &self.lo * q),
            },
        }
    }

    pub fn div_int(&self, n: u32) -> Interval {
        assert!(n > 0);
        let p = self.prec().0;
        Interval {
            lo: round_down(p, &self.lo / n),
            hi: round_up(p, &self.hi / n),
        }
    }

    pub fn sqr(&self) -> Interval {
        let p = self.prec().0;
        let (a, b) = (&self.lo, &self.hi);
        if *a >= 0 {
            Interval {
                lo: round_down(p, a.square_ref()),
                hi: round_up(p, b.square_ref()),
            }
        } else if *b <= 0 {
            Interval {
                lo: round_down(p, b.square_ref()),
                hi: round_up(p, a.square_ref()),
            }
        } else {
            let m = self.mag();
            Interval {
                lo: Float::with_val(p, 0),
                hi: round_up(p, m.square_ref()),
            }
        }
    }

    /// Encloses `{ eˣ : x ∈ self }`; an upper endpoint beyond the exponent
    /// range gives `+∞`.
    pub fn exp(&self) -> Interval {
        let p = self.prec().0;
        Interval {
            lo: round_down(p, self.lo.exp_ref()),
            hi: round_up(p, self.hi.exp_ref()),
        }
    }

    /// Decimal rendering with `digits` significant digits, rounded outward.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (
            float_to_decimal(&self.lo, digits, Round::Down),
            float_to_decimal(&self.hi, digits, Round::Up),
        )
    }
}

/// Exponential of an interval.
pub fn iexp(x: &Interval) -> Interval {
    x.exp()
}

/// Certified sign of an interval.
pub fn sign_certified(x: &Interval) -> Sign {
    x.sign()
}

/// Interval enclosure of a rational at `p` bits.
pub fn interval_from_rational(q: &Rational, p: Precision) -> Interval {
    Interval::from_rational(q, p)
}

pub(crate) fn float_to_decimal(x: &Float, digits: usize, round: Round) -> String {
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.to_string();
    }
    if x.is_zero() {
        return "0".to_string();
    }
    let s = x.to_string_radix_round(10, Some(digits.max(1)), round);
    normalize_exponent(&s)
}

// rug renders "1.2345e-3"; keep plain notation for moderate exponents.
fn normalize_exponent(s: &str) -> String {
    let Some(epos) = s.find('e') else {
        return s.to_string();
    };
    let (mant, exp) = s.split_at(epos);
    let exp: i64 = exp[1..].parse().unwrap_or(0);
    if !(-8..=8).contains(&exp) {
        return s.to_string();
    }
    let negative = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: String = format!("{int_part}{frac_part}");
    let point = int_part.len() as i64 + exp;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(10);
        let (lo, hi) = self.to_decimal(digits);
        write!(f, "[{lo}, {hi}]")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl $trait<&Interval> for &Interval {
            type Output = Interval;
            fn $method(self, rhs: &Interval) -> Interval {
                self.$impl_fn(rhs)
            }
        }
        impl $trait<Interval> for Interval {
            type Output = Interval;
            fn $method(self, rhs: Interval) -> Interval {
                (&self).$impl_fn(&rhs)
            }
        }
        impl $trait<&Interval> for Interval {
            type Output = Interval;
            fn $method(self, rhs: &Interval) -> Interval {
                (&self).$impl_fn(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        self.neg_ref()
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        self.neg_ref()
    }
}

/// An ordered list of intervals: a box in a real vector space.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalVector(Vec<Interval>);

impl IntervalVector {
    pub fn new(components: Vec<Interval>) -> Self {
        IntervalVector(components)
    }

    pub fn zeros(n: usize, p: Precision) -> Self {
        IntervalVector(vec![Interval::zero(p); n])
    }

    pub fn from_rationals(qs: &[Rational], p: Precision) -> Self {
        IntervalVector(qs.iter().map(|q| Interval::from_rational(q, p)).collect())
    }

    pub fn from_f64s(xs: &[f64], p: Precision) -> Self {
        IntervalVector(xs.iter().map(|&x| Interval::from_f64(x, p)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Interval] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn prec(&self) -> Precision {
        self.0
            .iter()
            .map(|c| c.prec())
            .max()
            .unwrap_or(Precision::DEFAULT)
    }

    /// Appends a component, e.g. lifting `ξ` to `(ξ, 0)`.
    pub fn extended(&self, last: Interval) -> Self {
        let mut c = self.0.clone();
        c.push(last);
        IntervalVector(c)
    }

    /// Encloses `⟨self, q⟩` for an exact rational vector `q`.
    pub fn dot_rational(&self, q: &[Rational]) -> Interval {
        assert_eq!(self.0.len(), q.len(), "dimension mismatch in dot product");
        let p = self.prec();
        self.0
            .iter()
            .zip(q)
            .filter(|(_, qi)| qi.cmp0() != Ordering::Equal)
            .fold(Interval::zero(p), |acc, (x, qi)| acc + x.mul_rational(qi))
    }

    pub fn contains_f64s(&self, xs: &[f64]) -> bool {
        self.0.len() == xs.len() && self.0.iter().zip(xs).all(|(c, &x)| c.contains_f64(x))
    }

    pub fn mid_f64(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid_f64).collect()
    }

    pub fn with_prec(&self, p: Precision) -> Self {
        IntervalVector(self.0.iter().map(|c| c.with_prec(p)).collect())
    }
}

impl std::ops::Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        IntervalVector(iter.into_iter().collect())
    }
}

impl fmt::Display for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" × ")?;
            }
            if let Some(d) = f.precision() {
                write!(f, "{c:.d$}")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        f.write_str(")")
    }
}

/// Upper bound on `ρ^k / k!` times `e^ρ`, for the Taylor remainder.
pub(crate) fn taylor_tail_bound(rho: &Float, k: u32, p: u32) -> Float {
    let mut acc = Float::with_val(p, 1);
    for j in 1..=k {
        acc = round_up(p, &acc * rho);
        acc = round_up(p, &acc / j);
    }
    let e = round_up(p, rho.exp_ref());
    round_up(p, &acc * &e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn dyadic_rationals_are_exact() {
        let p = Precision::new(11).unwrap();
        let half = Interval::from_rational(&q(1, 2), p);
        assert!(half.is_point());
        assert_eq!(half.lower_f64(), 0.5);
        let three_quarters = Interval::from_rational(&q(3, 4), p);
        assert!(three_quarters.is_point());
        assert_eq!(three_quarters.upper_f64(), 0.75);
        let sum = &half + &three_quarters;
        assert!(sum.is_point());
        let prod = &half * &three_quarters;
        assert!(prod.is_point());
        assert_eq!(prod.lower_f64(), 0.375);
    }

    #[test]
    fn one_third_width_bound() {
        let p = Precision::DEFAULT;
        let third = Interval::from_rational(&q(1, 3), p);
        assert!(third.contains_rational(&q(1, 3)));
        assert!(!third.is_point());
        assert!(third.width_f64() <= 2f64.powi(-52));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let p = Precision::DEFAULT;
        let e0 = Interval::zero(p).exp();
        assert!(e0.contains_f64(1.0));
        assert!(e0.width_f64() <= 2f64.powi(-52));
    }

    #[test]
    fn sign_examples() {
        let p = Precision::DEFAULT;
        let iv = |a: f64, b: f64| {
            Interval::from_f64(a, p).hull(&Interval::from_f64(b, p))
        };
        assert_eq!(iv(0.446, 0.827).sign(), Sign::Positive);
        assert_eq!(iv(-0.012, -0.005).sign(), Sign::Negative);
        assert_eq!(iv(-0.001, 0.002).sign(), Sign::Unknown);
    }

    #[test]
    fn refine_precision_doubles_until_cap() {
        let cap = Precision::DEFAULT_CAP;
        assert_eq!(
            refine_precision(Precision::new(11).unwrap(), cap).unwrap().bits(),
            22
        );
        assert_eq!(refine_precision(Precision::DEFAULT, cap).unwrap().bits(), 106);
        assert_eq!(
            refine_precision(Precision::new(3000).unwrap(), cap).unwrap().bits(),
            4096
        );
        assert_eq!(
            refine_precision(cap, cap),
            Err(RigorError::CapReached { cap: 4096 })
        );
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(10).is_err());
        assert!(Precision::new(11).is_ok());
    }

    #[test]
    fn division_by_interval_containing_zero_is_entire() {
        let p = Precision::DEFAULT;
        let one = Interval::one(p);
        let z = Interval::from_f64(-1.0, p).hull(&Interval::from_f64(1.0, p));
        let r = &one / &z;
        assert!(!r.is_finite());
        assert_eq!(r.sign(), Sign::Unknown);
    }

    #[test]
    fn exp_overflow_degrades_to_infinity() {
        let p = Precision::DEFAULT;
        let big = Interval::from_f64(1e300, p).exp();
        assert!(big.upper().is_infinite());
        assert!(big.lower_f64() > 1.0);
    }

    #[test]
    fn mul_with_infinite_and_zero_endpoint() {
        let p = Precision::DEFAULT;
        let r = &Interval::zero(p) * &Interval::entire(p);
        assert!(r.contains_zero());
        assert!(!r.lower().is_nan());
    }

    #[test]
    fn decimal_rendering_is_outward() {
        let p = Precision::DEFAULT;
        let third = Interval::from_rational(&q(1, 3), p);
        let (lo, hi) = third.to_decimal(5);
        assert_eq!(lo, "0.33333");
        assert_eq!(hi, "0.33334");
        let neg = Interval::from_rational(&q(-1, 3), p);
        let (lo, hi) = neg.to_decimal(5);
        assert_eq!(lo, "-0.33334");
        assert_eq!(hi, "-0.33333");
        let small = Interval::from_rational(&q(-12, 1000), p);
        assert_eq!(small.to_decimal(3).0, "-0.0121");
        assert_eq!(small.to_decimal(3).1, "-0.0119");
    }

    #[test]
    fn dot_rational_encloses_exact_value() {
        let p = Precision::DEFAULT;
        let xi = IntervalVector::from_rationals(&[q(1, 3), q(-2, 7)], p);
        let d = xi.dot_rational(&[q(3, 1), q(7, 1)]);
        assert!(d.contains_rational(&q(-1, 1)));
    }
}
