//! Cyclotomic polynomials and integer polynomial helpers.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;

type PhiTable = RwLock<HashMap<u64, Arc<Vec<BigInt>>>>;

fn table() -> &'static PhiTable {
    static TABLE: OnceLock<PhiTable> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            while m.is_multiple_of(q) {
                m /= q;
            }
            out -= out / q;
        }
        q += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Coefficients of Φ_n, lowest degree first. Entries are computed once and shared.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n >= 1);
    if let Some(p) = table().read().get(&n) {
        return p.clone();
    }
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_poly(d);
        poly = div_exact_monic(&poly, &phi_d);
    }
    debug_assert_eq!(poly.len() as u64, euler_phi(n) + 1);
    let poly = Arc::new(poly);
    table().write().entry(n).or_insert(poly).clone()
}

/// Exact quotient of `num` by the monic polynomial `den`.
fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = rem.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Reduces `poly` in place modulo the monic `modulus` and truncates to its degree.
pub fn reduce_monic(poly: &mut Vec<BigInt>, modulus: &[BigInt]) {
    let deg = modulus.len() - 1;
    if poly.len() > deg {
        for i in (deg..poly.len()).rev() {
            if poly[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut poly[i]);
            let base = i - deg;
            for (j, mj) in modulus[..deg].iter().enumerate() {
                if !mj.is_zero() {
                    poly[base + j] -= &c * mj;
                }
            }
        }
        poly.truncate(deg);
    }
    trim(poly);
}

pub fn trim(poly: &mut Vec<BigInt>) {
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
}

pub fn mul_poly(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}
