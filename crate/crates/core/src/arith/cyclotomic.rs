use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::interval::{bit_len, enclose_sum, ComplexRect};
use super::phi::{cyclotomic_poly, euler_phi, mul_poly, reduce_monic, trim};
use super::{Rational, DEFAULT_MAX_PRECISION};
use crate::error::{Error, Result};

/// An element of ℚ(ζ_N), stored as `Σ num[e] ζ_N^e / den` reduced modulo Φ_N.
///
/// The numerator has no common factor with `den` and `den > 0`, so two
/// elements of the same order are equal exactly when their fields are.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

fn lcm(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic { order: 1, num: Vec::new(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_parts(1, vec![BigInt::from(v)], BigInt::one())
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_parts(1, vec![q.numer().clone()], q.denom().clone())
    }

    /// ζ_n^k, with `k` taken modulo `n`.
    pub fn root_of_unity(n: u64, k: i64) -> Self {
        assert!(n >= 1, "root of unity of order 0");
        let e = k.rem_euclid(n as i64) as usize;
        let mut num = vec![BigInt::zero(); e + 1];
        num[e] = BigInt::one();
        Self::from_parts(n, num, BigInt::one())
    }

    /// Builds `Σ coeffs[e] ζ_n^e` from an arbitrary-length coefficient list.
    pub fn from_coefficients(n: u64, coeffs: &[Rational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Self::from_parts(n, num, den)
    }

    fn from_parts(order: u64, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        assert!(!den.is_zero());
        let phi = cyclotomic_poly(order);
        reduce_monic(&mut num, &phi);
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|c| *c = -std::mem::take(c));
        }
        let mut out = Cyclotomic { order, num, den };
        out.normalize_content();
        out
    }

    fn normalize_content(&mut self) {
        if self.num.is_empty() {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.num.len() == 1 && self.num[0].is_one() && self.den.is_one()
    }

    /// The value as a rational, when it has no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.num.len() {
            0 => Some(Rational::zero()),
            1 => Some(BigRational::new(self.num[0].clone(), self.den.clone())),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.num.len() <= 1
    }

    /// Coefficient of ζ_N^e in the canonical power basis.
    pub fn coefficient(&self, e: usize) -> Rational {
        match self.num.get(e) {
            Some(c) => BigRational::new(c.clone(), self.den.clone()),
            None => Rational::zero(),
        }
    }

    /// Nonzero canonical terms `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> Vec<(u64, Rational)> {
        self.num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e as u64, BigRational::new(c.clone(), self.den.clone())))
            .collect()
    }

    /// Re-expresses the value in ℚ(ζ_m); `m` must be a multiple of the order.
    pub fn lift(&self, m: u64) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(self.order) {
            return Err(Error::InvalidOrder(m));
        }
        Ok(self.lift_unchecked(m))
    }

    fn lift_unchecked(&self, m: u64) -> Self {
        if m == self.order {
            return self.clone();
        }
        let f = (m / self.order) as usize;
        let mut num = vec![BigInt::zero(); self.num.len().saturating_sub(1) * f + 1];
        for (e, c) in self.num.iter().enumerate() {
            num[e * f] = c.clone();
        }
        Self::from_parts(m, num, self.den.clone())
    }

    /// The same value at the smallest order this crate can certify cheaply:
    /// rational values drop to order 1, everything else is returned unchanged.
    pub fn normalized(&self) -> Self {
        match self.as_rational() {
            Some(q) if self.order != 1 => Self::from_rational(&q),
            _ => self.clone(),
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let m = lcm(a.order, b.order);
        (a.lift_unchecked(m), b.lift_unchecked(m))
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = if self.order == other.order {
            (std::borrow::Cow::Borrowed(self), std::borrow::Cow::Borrowed(other))
        } else {
            let (a, b) = Self::common(self, other);
            (std::borrow::Cow::Owned(a), std::borrow::Cow::Owned(b))
        };
        let len = a.num.len().max(b.num.len());
        let mut num = vec![BigInt::zero(); len];
        for (i, c) in a.num.iter().enumerate() {
            num[i] += c * &b.den;
        }
        for (i, c) in b.num.iter().enumerate() {
            if negate {
                num[i] -= c * &a.den;
            } else {
                num[i] += c * &a.den;
            }
        }
        trim(&mut num);
        let mut out = Cyclotomic { order: a.order, num, den: &a.den * &b.den };
        out.normalize_content();
        out
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Cyclotomic { order: lcm(self.order, other.order), ..Self::zero() };
        }
        // rational factors scale without lifting
        if let Some(q) = other.as_rational() {
            if other.order == 1 || other.order == self.order {
                return self.scale(&q);
            }
        }
        if let Some(q) = self.as_rational() {
            if self.order == 1 || self.order == other.order {
                return other.scale(&q);
            }
        }
        let (a, b) = Self::common(self, other);
        let num = mul_poly(&a.num, &b.num);
        Self::from_parts(a.order, num, &a.den * &b.den)
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Cyclotomic { order: self.order, ..Self::zero() };
        }
        let mut out = Cyclotomic {
            order: self.order,
            num: self.num.iter().map(|c| c * q.numer()).collect(),
            den: &self.den * q.denom(),
        };
        out.normalize_content();
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclotomic { order: self.order, ..Self::one() };
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm modulo Φ_N.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Cyclotomic { order: self.order, ..Self::from_rational(&q.recip()) });
        }
        let phi = cyclotomic_poly(self.order);
        let to_q = |v: &[BigInt]| -> Vec<Rational> { v.iter().map(|c| Rational::from(c.clone())).collect() };
        let mut old_r = to_q(&self.num);
        let mut r = to_q(&phi);
        let mut old_s = vec![Rational::one()];
        let mut s: Vec<Rational> = Vec::new();
        while !r.is_empty() {
            let (q, rem) = qpoly_divrem(&old_r, &r);
            let next_s = qpoly_sub(&old_s, &qpoly_mul(&q, &s));
            old_r = std::mem::replace(&mut r, rem);
            old_s = std::mem::replace(&mut s, next_s);
        }
        // old_r is a nonzero constant because Φ_N is irreducible
        debug_assert_eq!(old_r.len(), 1);
        let c = old_r[0].clone();
        let coeffs: Vec<Rational> = old_s.iter().map(|x| x / &c).collect();
        let inv_num = Self::from_coefficients(self.order, &coeffs);
        Ok(inv_num.scale(&Rational::from(self.den.clone())))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Complex conjugate: ζ_N^e ↦ ζ_N^{-e}.
    pub fn conj(&self) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let n = self.order as usize;
        let mut num = vec![BigInt::zero(); n];
        for (e, c) in self.num.iter().enumerate() {
            num[(n - e) % n] += c;
        }
        Self::from_parts(self.order, num, self.den.clone())
    }

    /// `(a + conj a) / 2`.
    pub fn real_part(&self) -> Self {
        (self + &self.conj()).scale(&Rational::new(1.into(), 2.into()))
    }

    /// `(a - conj a) / (2i)`, a real element of ℚ(ζ_lcm(N,4)).
    pub fn imag_part(&self) -> Self {
        let minus_half_i = Self::root_of_unity(4, 3).scale(&Rational::new(1.into(), 2.into()));
        &(self - &self.conj()) * &minus_half_i
    }

    /// A rectangle containing the value under ζ_N ↦ exp(2πi/N), of width at most `2^-precision`.
    pub fn embed(&self, precision: u32) -> ComplexRect {
        let precision = precision.max(16);
        let abs_sum: BigInt = self.num.iter().map(|c| c.abs()).sum();
        let excess = (bit_len(&abs_sum) as i64 - bit_len(&self.den) as i64 + 1).max(0) as u32;
        let w = precision + 40 + excess;
        let terms: Vec<(u64, &BigInt)> = self.num.iter().enumerate().map(|(e, c)| (e as u64, c)).collect();
        enclose_sum(&terms, &self.den, self.order, w)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        let r = self.embed(64);
        (r.re.mid_f64(), r.im.mid_f64())
    }

    pub fn sign_real(&self) -> Result<i8> {
        self.sign_real_within(DEFAULT_MAX_PRECISION)
    }

    pub fn sign_imag(&self) -> Result<i8> {
        self.sign_imag_within(DEFAULT_MAX_PRECISION)
    }

    pub fn sign_real_within(&self, max_bits: u32) -> Result<i8> {
        if (self + &self.conj()).is_zero() {
            return Ok(0);
        }
        self.refine(max_bits, |r| r.re.strict_sign())
    }

    pub fn sign_imag_within(&self, max_bits: u32) -> Result<i8> {
        if (self - &self.conj()).is_zero() {
            return Ok(0);
        }
        self.refine(max_bits, |r| r.im.strict_sign())
    }

    fn refine(&self, max_bits: u32, pick: impl Fn(&ComplexRect) -> Option<i8>) -> Result<i8> {
        let mut bits = 64.min(max_bits.max(16));
        loop {
            if let Some(s) = pick(&self.embed(bits)) {
                return Ok(s);
            }
            if bits >= max_bits {
                return Err(Error::PrecisionExhausted { bits });
            }
            bits = (bits * 2).min(max_bits);
        }
    }
}

fn qpoly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn qpoly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    qpoly_trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![Rational::zero(); rem.len() - db];
    for i in (0..q.len()).rev() {
        let c = &rem[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    rem.truncate(db);
    qpoly_trim(&mut rem);
    qpoly_trim(&mut q);
    (q, rem)
}

fn qpoly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn qpoly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    qpoly_trim(&mut out);
    out
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.num == other.num && self.den == other.den;
        }
        let (a, b) = Self::common(self, other);
        a.num == b.num && a.den == b.den
    }
}

impl Eq for Cyclotomic {}

impl Default for Cyclotomic {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Cyclotomic {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<Rational> for Cyclotomic {
    fn from(q: Rational) -> Self {
        Self::from_rational(&q)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: &Cyclotomic) -> Cyclotomic {
                let f: fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic = $body;
                f(self, rhs)
            }
        }
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: &Cyclotomic) -> Cyclotomic {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b, false));
binop!(Sub, sub, |a, b| a.add_impl(b, true));
binop!(Mul, mul, |a, b| a.mul_impl(b));

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})*z{}^{e}", self.order)?,
            }
        }
        Ok(())
    }
}

fn json_int(v: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("integer literal")
}

fn parse_int(n: &serde_json::Number) -> std::result::Result<BigInt, String> {
    BigInt::from_str(&n.to_string()).map_err(|e| format!("bad integer {n}: {e}"))
}

#[derive(Serialize, Deserialize)]
struct CyclotomicRepr {
    order: u64,
    terms: Vec<(u64, serde_json::Number, serde_json::Number)>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms()
            .into_iter()
            .map(|(e, c)| (e, json_int(c.numer()), json_int(c.denom())))
            .collect();
        CyclotomicRepr { order: self.order, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CyclotomicRepr::deserialize(d)?;
        if repr.order == 0 {
            return Err(D::Error::custom("order must be positive"));
        }
        let mut coeffs = Vec::new();
        for (e, n, dd) in &repr.terms {
            let n = parse_int(n).map_err(D::Error::custom)?;
            let dd = parse_int(dd).map_err(D::Error::custom)?;
            if dd.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            if *e >= repr.order {
                return Err(D::Error::custom("exponent out of range"));
            }
            let e = *e as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rational::zero());
            }
            coeffs[e] += BigRational::new(n, dd);
        }
        Ok(Cyclotomic::from_coefficients(repr.order, &coeffs))
    }
}

/// Degree of ℚ(ζ_N) over ℚ.
pub fn field_degree(order: u64) -> u64 {
    euler_phi(order)
}
