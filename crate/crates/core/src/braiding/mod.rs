//! Braiding matrices of the minimal models, built from the r-matrix recursion
//! for the two quantum parameters and combined with an explicit phase.

mod matrix;
mod rmatrix;

pub use matrix::CycloMatrix;
pub use rmatrix::{bracket, compatible, r_matrix, r_matrix_primed, RKey, RMatrix, Side};

use serde::Serialize;

use crate::arith::Cyclotomic;
use crate::error::{Error, Result};
use crate::tower::{coset_p, FusionTable};

/// How a braiding matrix is indexed, for `B̃^{a3,a2}_{a4,a1}` with externals `(a4, a3, a2, a1)`.
pub const MATRIX_CONVENTION: &[(&str, &str)] = &[
    ("entry (mu, gamma)", "r(a4, a3, a2, a1)_{mu, gamma}"),
    ("rows mu", "N(a4, a3, mu) N(mu, a2, a1) != 0"),
    ("columns gamma", "N(a4, a2, gamma) N(gamma, a3, a1) != 0"),
    ("P-side matrix", "inverse of the transpose of the Q-side matrix"),
];

/// Exponent `e` of the phase `i^e` multiplying `r'(primed) r(unprimed)`, and
/// whether the half-exponent of the sign factor is an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub exponent: i64,
    pub integral: bool,
}

pub fn phase(primed: &RKey, unprimed: &RKey) -> Phase {
    let (q, k) = (primed, unprimed);
    let s = |v: u32| v as i64;
    let base = -(s(q.m) - 1) * (s(k.n) - 1) - (s(q.n) - 1) * (s(k.m) - 1);
    let alt = (s(k.a) - s(k.b) + s(k.c) - s(k.d)) * (s(q.n) + s(k.m)) + (s(q.a) - s(q.b) + s(q.c) - s(q.d)) * (s(k.n) + s(k.m));
    Phase { exponent: (base + alt).rem_euclid(4), integral: alt % 2 == 0 }
}

/// `i^e r'(primed) r(unprimed)` for a product label `(i', i)` on each leg.
pub fn braiding_element(p: u32, primed: &RKey, unprimed: &RKey) -> Result<Cyclotomic> {
    let rp = r_matrix_primed(p, primed)?.normalized();
    let r = r_matrix(p, unprimed)?.normalized();
    let ph = Cyclotomic::root_of_unity(4, phase(primed, unprimed).exponent);
    Ok((ph * rp * r).normalized())
}

/// Braiding matrix with its row and column labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidingMatrix {
    pub p: u32,
    pub externals: [u32; 4],
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    pub entries: CycloMatrix,
}

impl BraidingMatrix {
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<Vec<serde_json::Value>> = (0..self.entries.rows())
            .map(|i| self.entries.row(i).iter().map(|v| serde_json::to_value(v).expect("serializable")).collect())
            .collect();
        serde_json::json!({
            "p": self.p,
            "externals": self.externals,
            "rows": self.rows,
            "cols": self.cols,
            "entries": entries,
        })
    }
}

/// `B̃` for the coset family `(1, i)` of tower `k`, evaluated at `p = k + 6`.
#[allow(non_snake_case)]
pub fn braiding_matrix_Q(k: u32, a4: u32, a3: u32, a2: u32, a1: u32) -> Result<BraidingMatrix> {
    let table = FusionTable::new(k)?;
    for a in [a4, a3, a2, a1] {
        if !table.modules.contains(&a) {
            return Err(Error::InvalidLabel(format!("{a} is not a coset module index for k = {k}")));
        }
    }
    let p = coset_p(k);
    let rows: Vec<u32> = table.modules.iter().copied().filter(|&mu| table.n(a4, a3, mu) && table.n(mu, a2, a1)).collect();
    let cols: Vec<u32> = table.modules.iter().copied().filter(|&g| table.n(a4, a2, g) && table.n(g, a3, a1)).collect();
    let unit = RKey::new(1, 1, 1, 1, 1, 1);
    let entries = rows
        .iter()
        .map(|&mu| cols.iter().map(|&g| braiding_element(p, &unit, &RKey::new(a4, a3, a2, a1, mu, g))).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(BraidingMatrix { p, externals: [a4, a3, a2, a1], rows, cols, entries: CycloMatrix::from_rows(entries)? })
}

/// `(B̃ᵀ)⁻¹`, the companion matrix on the other side of the coset pair.
#[allow(non_snake_case)]
pub fn braiding_matrix_P(q: &BraidingMatrix) -> Result<BraidingMatrix> {
    let entries = q.entries.transpose().inverse()?;
    Ok(BraidingMatrix { p: q.p, externals: q.externals, rows: q.cols.clone(), cols: q.rows.clone(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::longest_summand_index;

    #[test]
    fn phase_is_trivial_on_the_coset_family() {
        let unit = RKey::new(1, 1, 1, 1, 1, 1);
        for p in 4..=12 {
            let bound = p;
            let odd: Vec<u32> = (1..bound).step_by(2).collect();
            for &a in &odd {
                for &m in &odd {
                    for &n in &odd {
                        for &c in &odd {
                            for &b in &odd {
                                for &d in &odd {
                                    let key = RKey::new(a, m, n, c, b, d);
                                    if key.is_valid(bound) {
                                        assert_eq!(phase(&unit, &key), Phase { exponent: 0, integral: true }, "{key}");
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn phase_on_mixed_labels() {
        let k = RKey::new(2, 2, 2, 2, 1, 3);
        let q = RKey::new(1, 2, 2, 1, 2, 2);
        // base -(1)(1) - (1)(1) = -2, alt (2-1+2-3)(2+2) + (1-2+1-2)(2+2) = -8
        assert_eq!(phase(&q, &k), Phase { exponent: 2, integral: true });
        // alt (2-1+2-2)(1+2) = 3
        let q = RKey::new(1, 1, 1, 1, 1, 1);
        assert!(!phase(&q, &RKey::new(2, 2, 1, 2, 1, 2)).integral);
    }

    #[test]
    fn element_on_coset_family_is_the_unprimed_entry() {
        let unit = RKey::new(1, 1, 1, 1, 1, 1);
        let key = RKey::new(3, 3, 3, 3, 3, 3);
        assert_eq!(braiding_element(8, &unit, &key).unwrap(), r_matrix(8, &key).unwrap());
        assert!(braiding_element(8, &unit, &RKey::new(3, 3, 3, 3, 3, 4)).is_err());
    }

    #[test]
    fn sign_table_at_k2() {
        let t = longest_summand_index(2).unwrap();
        assert_eq!(t, 3);
        let table = [
            ((3, 3, 3), 'r'),
            ((5, 3, 5), 'r'),
            ((5, 5, 7), 'r'),
            ((3, 3, 5), 'i'),
            ((3, 5, 5), 'i'),
            ((5, 3, 3), 'i'),
            ((5, 5, 3), 'i'),
            ((3, 5, 3), 'n'),
            ((5, 5, 5), 'n'),
            ((5, 7, 5), 'n'),
            ((7, 5, 5), 'n'),
        ];
        for ((a, b, c), kind) in table {
            let v = r_matrix(8, &RKey::new(a, b, t, t, t, c)).unwrap();
            match kind {
                'r' => assert_eq!(v.sign_real().unwrap(), 1, "{a},{b},{c}"),
                'i' => assert_eq!(v.sign_imag().unwrap(), 1, "{a},{b},{c}"),
                _ => assert_eq!(v.sign_real().unwrap(), -1, "{a},{b},{c}"),
            }
        }
    }

    #[test]
    fn q_and_p_matrices() {
        let q = braiding_matrix_Q(2, 3, 3, 3, 3).unwrap();
        assert_eq!(q.p, 8);
        assert_eq!(q.rows, vec![1, 3, 5]);
        assert_eq!(q.cols, vec![1, 3, 5]);
        let p = braiding_matrix_P(&q).unwrap();
        assert!(p.entries.transpose().mul(&q.entries).unwrap().is_identity());
        assert!(braiding_matrix_Q(2, 3, 3, 3, 4).is_err());
        let v = q.to_json();
        assert_eq!(v["rows"], serde_json::json!([1, 3, 5]));
        assert_eq!(MATRIX_CONVENTION.len(), 4);
    }

    #[test]
    fn supplementary_k1_values() {
        let cases = [
            ([5, 3, 3, 5, 3, 5], (-0.72, 3.17)),
            ([3, 3, 5, 5, 3, 3], (-0.12, 0.54)),
            ([5, 3, 3, 3, 3, 5], (0.80, 0.0)),
            ([3, 5, 3, 3, 5, 3], (0.22, 0.97)),
        ];
        for (k, (re, im)) in cases {
            let (x, y) = r_matrix(7, &RKey::from(k)).unwrap().to_f64_pair();
            assert!((x - re).abs() < 0.01 && (y - im).abs() < 0.01, "{k:?}: {x} {y}");
        }
    }
}
