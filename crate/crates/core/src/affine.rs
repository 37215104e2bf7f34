//! Affine sl(2) labels, their fusion, and one step of the GKO coset branching
//! `L(1, ε) ⊗ L(m, n) = ⊕_s L(c_{m+2}, h_{(s+1, n+1)}) ⊗ L(m + 1, s)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{rational_json, Rational};
use crate::error::{Error, Result};
use crate::kac::{highest_weight, ModuleSum};

/// Integrable highest weight module `L(level, k)` with `0 <= k <= level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct AffineLabel {
    pub level: u32,
    pub k: u32,
}

impl AffineLabel {
    pub fn new(level: u32, k: u32) -> Result<Self> {
        if level < 1 || k > level {
            return Err(Error::InvalidLabel(format!("L({level},{k}) is not an integrable label")));
        }
        Ok(AffineLabel { level, k })
    }

    /// Conformal weight of the ground states, `k (k + 2) / (4 (level + 2))`.
    pub fn ground_weight(&self) -> Rational {
        let (m, k) = (self.level as i64, self.k as i64);
        crate::arith::rat(k * (k + 2), 4 * (m + 2))
    }
}

impl From<(u32, u32)> for AffineLabel {
    fn from((level, k): (u32, u32)) -> Self {
        AffineLabel { level, k }
    }
}

impl From<AffineLabel> for (u32, u32) {
    fn from(l: AffineLabel) -> Self {
        (l.level, l.k)
    }
}

impl fmt::Display for AffineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.level, self.k)
    }
}

pub fn affine_fusion(m: u32, j: u32, k: u32) -> Result<ModuleSum<AffineLabel>> {
    AffineLabel::new(m, j)?;
    AffineLabel::new(m, k)?;
    let lo = (j + k).saturating_sub(m);
    let hi = j.min(k);
    Ok((lo..=hi).map(|i| AffineLabel { level: m, k: j + k - 2 * i }).collect())
}

/// One summand `L(c_{m+2}, weight) ⊗ label` of a GKO branching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchEntry {
    pub weight: Rational,
    pub label: AffineLabel,
}

impl BranchEntry {
    /// `[h_num, h_den, level, s]`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut row = match rational_json(&self.weight) {
            serde_json::Value::Array(v) => v,
            _ => unreachable!(),
        };
        row.push(self.label.level.into());
        row.push(self.label.k.into());
        serde_json::Value::Array(row)
    }
}

/// Decomposes `L(1, epsilon) ⊗ L(m, n)`, in ascending order of `s`.
pub fn gko_branch(m: u32, epsilon: u32, n: u32) -> Result<Vec<BranchEntry>> {
    if epsilon > 1 {
        return Err(Error::InvalidLabel(format!("L(1,{epsilon}) is not an integrable label")));
    }
    AffineLabel::new(m, n)?;
    let p = m + 2;
    (0..=m + 1)
        .filter(|s| s % 2 == (n + epsilon) % 2)
        .map(|s| {
            Ok(BranchEntry {
                weight: highest_weight(p, s + 1, n + 1)?,
                label: AffineLabel { level: m + 1, k: s },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use num_traits::{Signed, Zero};

    fn al(m: u32, k: u32) -> AffineLabel {
        AffineLabel::new(m, k).unwrap()
    }

    #[test]
    fn fusion_examples() {
        let s = affine_fusion(1, 1, 1).unwrap();
        assert_eq!(s.labels().copied().collect::<Vec<_>>(), vec![al(1, 0)]);
        for k in 0..=5 {
            assert_eq!(affine_fusion(5, 0, k).unwrap().labels().copied().collect::<Vec<_>>(), vec![al(5, k)]);
        }
        let s = affine_fusion(6, 2, 4).unwrap();
        assert_eq!(s.labels().copied().collect::<Vec<_>>(), vec![al(6, 2), al(6, 4), al(6, 6)]);
        assert!(affine_fusion(3, 4, 0).is_err());
    }

    #[test]
    fn fusion_agrees_with_brute_force_truncated_clebsch_gordan() {
        for m in 1..8u32 {
            for j in 0..=m {
                for k in 0..=m {
                    let s = affine_fusion(m, j, k).unwrap();
                    for l in 0..=m {
                        let allowed = l >= j.abs_diff(k) && l <= j + k && (j + k + l) % 2 == 0 && j + k + l <= 2 * m;
                        assert_eq!(s.multiplicity(&al(m, l)), allowed as u32, "m={m} {j}x{k}->{l}");
                    }
                }
            }
        }
    }

    #[test]
    fn branch_examples() {
        let b = gko_branch(1, 0, 0).unwrap();
        assert_eq!(b, vec![
            BranchEntry { weight: rat(0, 1), label: al(2, 0) },
            BranchEntry { weight: rat(1, 2), label: al(2, 2) },
        ]);
        let b = gko_branch(1, 1, 0).unwrap();
        assert_eq!(b, vec![BranchEntry { weight: rat(1, 16), label: al(2, 1) }]);
        let b = gko_branch(6, 0, 0).unwrap();
        assert!(b.contains(&BranchEntry { weight: rat(0, 1), label: al(7, 0) }));
        assert!(b.contains(&BranchEntry { weight: rat(7, 9), label: al(7, 2) }));
        assert_eq!(b[1].to_json().to_string(), "[7,9,7,2]");
        assert!(gko_branch(2, 2, 0).is_err());
        assert!(gko_branch(2, 0, 3).is_err());
    }

    #[test]
    fn ground_weights_are_conserved() {
        for m in 1..12u32 {
            for eps in 0..=1 {
                for n in 0..=m {
                    let entries = gko_branch(m, eps, n).unwrap();
                    let source = AffineLabel { level: 1, k: eps }.ground_weight() + al(m, n).ground_weight();
                    let mut zeros = 0;
                    for e in &entries {
                        assert_eq!(e.label.k % 2, (n + eps) % 2);
                        let gap = &e.weight + e.label.ground_weight() - &source;
                        assert!(gap.is_integer() && !gap.is_negative(), "m={m} eps={eps} n={n}: {gap}");
                        if gap.is_zero() {
                            zeros += 1;
                        }
                    }
                    // the ground space of L(1,1) ⊗ L(m,n) can split over s = n ± 1
                    assert!(zeros >= 1 && zeros <= 1 + eps, "m={m} eps={eps} n={n}");
                }
            }
        }
    }
}
