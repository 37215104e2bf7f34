//! Exact scalars: big rationals and elements of cyclotomic fields.

mod cyclotomic;
mod interval;
mod phi;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use cyclotomic::{field_degree, Cyclotomic};
pub use interval::{ComplexRect, Interval};
pub use phi::{cyclotomic_poly, euler_phi};

/// Reduced fraction with a positive denominator.
pub type Rational = BigRational;

/// Largest precision tried by sign queries unless configured otherwise.
pub const DEFAULT_MAX_PRECISION: u32 = 4096;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `[numerator, denominator]` as arbitrary-size JSON integers.
pub fn rational_json(q: &Rational) -> serde_json::Value {
    use std::str::FromStr;
    let n = |v: &BigInt| serde_json::Value::Number(serde_json::Number::from_str(&v.to_string()).expect("integer"));
    serde_json::Value::Array(vec![n(q.numer()), n(q.denom())])
}
