//! Certified fixed-point enclosures of cyclotomic values.
//!
//! Every quantity is a big integer `v` at a binary scale `w` together with an
//! error radius `err` in units of `2^-w`. The radii are propagated by explicit
//! worst-case bounds, so the final rectangles always contain the true value.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;

/// A closed real interval `[lo, hi] * 2^-scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    scale: u32,
}

impl Interval {
    pub fn new(lo: BigInt, hi: BigInt, scale: u32) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, scale }
    }

    pub fn point(v: BigInt, scale: u32) -> Self {
        Interval { lo: v.clone(), hi: v, scale }
    }

    pub fn lo(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi(&self) -> &BigInt {
        &self.hi
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(sign)` when the interval excludes zero.
    pub fn strict_sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    /// Width in units of `2^-scale`.
    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// True when `hi - lo <= 2^-bits`.
    pub fn width_at_most(&self, bits: i64) -> bool {
        let w = self.width_ulps();
        if w.is_zero() {
            return true;
        }
        // w * 2^-scale <= 2^-bits  <=>  w <= 2^(scale - bits)
        let e = self.scale as i64 - bits;
        if e < 0 {
            return false;
        }
        w <= (BigInt::one() << e as usize)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo_f64() <= x && x <= self.hi_f64()
    }

    pub fn lo_f64(&self) -> f64 {
        to_f64(&self.lo, self.scale)
    }

    pub fn hi_f64(&self) -> f64 {
        to_f64(&self.hi, self.scale)
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&(&self.lo + &self.hi), self.scale + 1)
    }

    /// Whether the two intervals share at least one point.
    pub fn overlaps(&self, other: &Interval) -> bool {
        let s = self.scale.max(other.scale);
        let (alo, ahi) = (rescale(&self.lo, self.scale, s), rescale(&self.hi, self.scale, s));
        let (blo, bhi) = (rescale(&other.lo, other.scale, s), rescale(&other.hi, other.scale, s));
        alo <= bhi && blo <= ahi
    }
}

fn rescale(v: &BigInt, from: u32, to: u32) -> BigInt {
    v << (to - from) as usize
}

fn to_f64(v: &BigInt, scale: u32) -> f64 {
    let bits = v.bits();
    if bits > 60 {
        let shift = bits - 60;
        let top = (v >> shift as usize).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - scale as i32)
    } else {
        v.to_f64().unwrap_or(0.0) * 2f64.powi(-(scale as i32))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo_f64(), self.hi_f64())
    }
}

/// A rectangle in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexRect {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexRect {
    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.re.contains_f64(re) && self.im.contains_f64(im)
    }

    pub fn overlaps(&self, other: &ComplexRect) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }
}

impl fmt::Display for ComplexRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

/// Fixed-point value with an error radius, both in units of `2^-w`.
#[derive(Clone, Debug)]
pub(crate) struct Approx {
    pub v: BigInt,
    pub err: BigInt,
}

impl Approx {
    fn neg(self) -> Approx {
        Approx { v: -self.v, err: self.err }
    }
}

fn arctan_inv(x: u32, w: u32) -> Approx {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power: BigInt = (BigInt::one() << w as usize) / &x;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let term = &power / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // each term is off by at most 3 ulps; the alternating tail adds at most 3 more
    Approx { v: sum, err: BigInt::from(3 * (k + 2)) }
}

fn pi_table() -> &'static RwLock<HashMap<u32, Approx>> {
    static T: OnceLock<RwLock<HashMap<u32, Approx>>> = OnceLock::new();
    T.get_or_init(|| RwLock::new(HashMap::new()))
}

/// π at scale `w`, by Machin's formula.
pub(crate) fn pi(w: u32) -> Approx {
    if let Some(p) = pi_table().read().get(&w) {
        return p.clone();
    }
    let a = arctan_inv(5, w);
    let b = arctan_inv(239, w);
    let p = Approx {
        v: a.v * 16 - b.v * 4,
        err: a.err * 16 + b.err * 4,
    };
    pi_table().write().insert(w, p.clone());
    p
}

/// Taylor sums for sin and cos at the exact point `x * 2^-w`, with `|x| < 2^w`.
fn sin_cos_at(x: &BigInt, w: u32) -> (Approx, Approx) {
    let one = BigInt::one() << w as usize;
    let mut sin = x.clone();
    let mut cos = one;
    let mut term = x.clone();
    let mut n: u64 = 1;
    loop {
        term = ((&term * x) >> w as usize) / BigInt::from(n + 1);
        n += 1;
        if term.is_zero() {
            break;
        }
        match n % 4 {
            0 => cos += &term,
            1 => sin += &term,
            2 => cos -= &term,
            _ => sin -= &term,
        }
    }
    let err = BigInt::from(3 * (n + 2));
    (Approx { v: sin, err: err.clone() }, Approx { v: cos, err })
}

/// Enclosures of `(cos θ, sin θ)` for `θ = 2π e / n`, at scale `w`.
pub(crate) fn cos_sin_turn(e: u64, n: u64, w: u32) -> (Approx, Approx) {
    let e = e % n;
    if e == 0 {
        let one = BigInt::one() << w as usize;
        return (
            Approx { v: one, err: BigInt::zero() },
            Approx { v: BigInt::zero(), err: BigInt::zero() },
        );
    }
    // nearest quadrant q, remainder angle π * s with |s| <= 1/4
    let q = (8 * e + n) / (2 * n);
    let s_num = BigInt::from(4 * e as i128 - (q as i128) * (n as i128));
    let s_den = BigInt::from(2 * n);
    let p = pi(w);
    let x = (&p.v * &s_num).div_floor(&s_den);
    let x_err: BigInt = (&p.err * s_num.abs()).div_ceil(&s_den) + 1;
    let (sin, cos) = sin_cos_at(&x, w);
    let sin = Approx { err: sin.err + &x_err, v: sin.v };
    let cos = Approx { err: cos.err + &x_err, v: cos.v };
    match q % 4 {
        0 => (cos, sin),
        1 => (sin.neg(), cos),
        2 => (cos.neg(), sin.neg()),
        3 => (sin, cos.neg()),
        _ => unreachable!(),
    }
}

/// Encloses `Σ num_e cos(2π e/n) / den` and the matching sine sum at scale `w`.
pub(crate) fn enclose_sum(terms: &[(u64, &BigInt)], den: &BigInt, n: u64, w: u32) -> ComplexRect {
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    let mut re_err = BigInt::zero();
    let mut im_err = BigInt::zero();
    for &(e, c) in terms {
        if c.is_zero() {
            continue;
        }
        let (cs, sn) = cos_sin_turn(e, n, w);
        re += c * &cs.v;
        im += c * &sn.v;
        re_err += c.abs() * &cs.err;
        im_err += c.abs() * &sn.err;
    }
    let make = |v: BigInt, err: BigInt| {
        if err.is_zero() && (&v % den).is_zero() {
            Interval::point(v / den, w)
        } else {
            let lo = (&v - &err).div_floor(den);
            let hi = (&v + &err).div_ceil(den);
            Interval::new(lo, hi, w)
        }
    };
    ComplexRect { re: make(re, re_err), im: make(im, im_err) }
}

pub(crate) fn bit_len(v: &BigInt) -> u64 {
    match v.sign() {
        Sign::NoSign => 0,
        _ => v.bits(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_encloses_the_constant() {
        let p = pi(80);
        let lo = Interval::new(&p.v - &p.err, &p.v + &p.err, 80);
        assert!(lo.contains_f64(std::f64::consts::PI));
        assert!(lo.width_at_most(60));
    }

    #[test]
    fn pi_digits_at_high_precision() {
        // 3.14159265358979323846264338327950288419716939937510...
        let w = 400;
        let p = pi(w);
        let scaled: BigInt = (&p.v * BigInt::from(10).pow(50)) >> w as usize;
        let digits = scaled.to_string();
        assert!(digits.starts_with("31415926535897932384626433832795028841971693993751"));
    }

    #[test]
    fn quadrant_reduction_matches_f64() {
        for n in [1u64, 2, 3, 4, 5, 8, 12, 28, 56, 288] {
            for e in 0..n {
                let (c, s) = cos_sin_turn(e, n, 64);
                let th = 2.0 * std::f64::consts::PI * e as f64 / n as f64;
                let ci = Interval::new(&c.v - &c.err, &c.v + &c.err, 64);
                let si = Interval::new(&s.v - &s.err, &s.v + &s.err, 64);
                assert!((ci.mid_f64() - th.cos()).abs() < 1e-12, "cos {e}/{n}");
                assert!((si.mid_f64() - th.sin()).abs() < 1e-12, "sin {e}/{n}");
            }
        }
    }

    #[test]
    fn interval_width_predicate() {
        let i = Interval::new(BigInt::from(0), BigInt::from(4), 10);
        assert!(i.width_at_most(8));
        assert!(!i.width_at_most(9));
    }
}
