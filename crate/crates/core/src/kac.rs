//! Kac tables of the unitary minimal models M(p, p+1): central charges,
//! highest weights, labels up to Kac symmetry, and fusion rules.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{rat, Rational};
use crate::error::{Error, Result};

/// A module label `(i', i)` with `1 <= i' <= p` and `1 <= i <= p - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct KacLabel {
    pub i_prime: u32,
    pub i: u32,
}

impl KacLabel {
    pub const VACUUM: KacLabel = KacLabel { i_prime: 1, i: 1 };

    pub fn new(i_prime: u32, i: u32) -> Self {
        KacLabel { i_prime, i }
    }
}

impl From<(u32, u32)> for KacLabel {
    fn from((i_prime, i): (u32, u32)) -> Self {
        KacLabel { i_prime, i }
    }
}

impl From<KacLabel> for (u32, u32) {
    fn from(l: KacLabel) -> Self {
        (l.i_prime, l.i)
    }
}

impl fmt::Display for KacLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i_prime, self.i)
    }
}

/// Formal sum of labels with positive multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSum<L: Ord> {
    terms: BTreeMap<L, u32>,
}

impl<L: Ord> Default for ModuleSum<L> {
    fn default() -> Self {
        ModuleSum { terms: BTreeMap::new() }
    }
}

impl<L: Ord + Clone> ModuleSum<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: L, mult: u32) {
        if mult > 0 {
            *self.terms.entry(label).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, label: &L) -> u32 {
        self.terms.get(label).copied().unwrap_or(0)
    }

    pub fn labels(&self) -> impl Iterator<Item = &L> {
        self.terms.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, u32)> {
        self.terms.iter().map(|(l, &m)| (l, m))
    }

    /// Number of distinct labels.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map<M: Ord + Clone>(&self, f: impl Fn(&L) -> M) -> ModuleSum<M> {
        let mut out = ModuleSum::new();
        for (l, m) in self.iter() {
            out.add(f(l), m);
        }
        out
    }
}

impl<L: Ord + Clone> FromIterator<L> for ModuleSum<L> {
    fn from_iter<I: IntoIterator<Item = L>>(iter: I) -> Self {
        let mut out = ModuleSum::new();
        for l in iter {
            out.add(l, 1);
        }
        out
    }
}

impl<L: Ord + Clone + Serialize> Serialize for ModuleSum<L> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // [[label fields..., multiplicity], ...]
        let rows: Vec<Vec<serde_json::Value>> = self
            .iter()
            .map(|(l, m)| {
                let mut row = match serde_json::to_value(l) {
                    Ok(serde_json::Value::Array(v)) => v,
                    Ok(v) => vec![v],
                    Err(_) => Vec::new(),
                };
                row.push(m.into());
                row
            })
            .collect();
        rows.serialize(s)
    }
}

impl<L: Ord + fmt::Display> fmt::Display for ModuleSum<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (l, m)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if *m == 1 {
                write!(f, "{l}")?;
            } else {
                write!(f, "{m}{l}")?;
            }
        }
        Ok(())
    }
}

fn check_model(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidModel(p as i64));
    }
    Ok(())
}

fn check_label(p: u32, l: KacLabel) -> Result<()> {
    check_model(p)?;
    if l.i_prime < 1 || l.i_prime > p || l.i < 1 || l.i >= p {
        return Err(Error::InvalidLabel(format!("{l} is outside the Kac table of p = {p}")));
    }
    Ok(())
}

/// `c_p = 1 - 6 / (p (p + 1))`.
pub fn central_charge(p: u32) -> Result<Rational> {
    check_model(p)?;
    let p = p as i64;
    Ok(rat(1, 1) - rat(6, p * (p + 1)))
}

pub fn highest_weight(p: u32, i_prime: u32, i: u32) -> Result<Rational> {
    let l = KacLabel::new(i_prime, i);
    check_label(p, l)?;
    let p = p as i64;
    let t = p * i_prime as i64 - (p + 1) * i as i64;
    Ok(rat(t * t - 1, 4 * p * (p + 1)))
}

pub fn label_weight(p: u32, l: KacLabel) -> Result<Rational> {
    highest_weight(p, l.i_prime, l.i)
}

/// The Kac partner `(p + 1 - i', p - i)`.
pub fn partner(p: u32, l: KacLabel) -> KacLabel {
    KacLabel::new(p + 1 - l.i_prime, p - l.i)
}

/// Representative with the smaller `i'`, ties broken by the smaller `i`.
pub fn canonicalize(p: u32, i_prime: u32, i: u32) -> Result<KacLabel> {
    let l = KacLabel::new(i_prime, i);
    check_label(p, l)?;
    Ok(l.min(partner(p, l)))
}

/// All canonical labels in lexicographic order; there are `p (p - 1) / 2` of them.
pub fn enumerate_modules(p: u32) -> Result<Vec<KacLabel>> {
    check_model(p)?;
    let mut out = Vec::with_capacity((p * (p - 1) / 2) as usize);
    for a in 1..=p {
        for b in 1..p {
            let l = KacLabel::new(a, b);
            if l <= partner(p, l) {
                out.push(l);
            }
        }
    }
    Ok(out)
}

fn triangle_parity(a: u32, b: u32, c: u32, bound: u32) -> bool {
    a + b + c < bound && a < b + c && b < a + c && c < a + b && (a + b + c) % 2 == 1
}

/// The admissibility conditions applied to the given representatives as they stand.
pub fn is_admissible(p: u32, a: KacLabel, b: KacLabel, c: KacLabel) -> Result<bool> {
    for l in [a, b, c] {
        check_label(p, l)?;
    }
    Ok(triangle_parity(a.i_prime, b.i_prime, c.i_prime, 2 * (p + 1)) && triangle_parity(a.i, b.i, c.i, 2 * p))
}

/// `N_{A,B}^C`: 1 when some choice of Kac representatives is admissible, else 0.
pub fn fusion_multiplicity(p: u32, a: KacLabel, b: KacLabel, c: KacLabel) -> Result<u32> {
    for x in [a, partner(p, a)] {
        for y in [b, partner(p, b)] {
            for z in [c, partner(p, c)] {
                if is_admissible(p, x, y, z)? {
                    return Ok(1);
                }
            }
        }
    }
    Ok(0)
}

pub fn virasoro_fusion(p: u32, a: KacLabel, b: KacLabel) -> Result<ModuleSum<KacLabel>> {
    check_label(p, a)?;
    check_label(p, b)?;
    let mut out = ModuleSum::new();
    for c in enumerate_modules(p)? {
        out.add(c, fusion_multiplicity(p, a, b, c)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(a: u32, b: u32) -> KacLabel {
        KacLabel::new(a, b)
    }

    #[test]
    fn central_charges() {
        assert_eq!(central_charge(7).unwrap(), rat(25, 28));
        assert_eq!(central_charge(3).unwrap(), rat(1, 2));
        assert_eq!(central_charge(8).unwrap(), rat(11, 12));
        assert_eq!(central_charge(2).unwrap(), rat(0, 1));
        assert_eq!(central_charge(1), Err(Error::InvalidModel(1)));
    }

    #[test]
    fn named_weights() {
        assert_eq!(highest_weight(7, 1, 5).unwrap(), rat(34, 7));
        assert_eq!(highest_weight(7, 1, 1).unwrap(), rat(0, 1));
        assert_eq!(highest_weight(8, 1, 3).unwrap(), rat(5, 4));
        assert!(matches!(highest_weight(7, 8, 1), Err(Error::InvalidLabel(_))));
        assert!(matches!(highest_weight(7, 1, 7), Err(Error::InvalidLabel(_))));
        assert!(matches!(highest_weight(7, 0, 1), Err(Error::InvalidLabel(_))));
    }

    #[test]
    fn canonical_labels() {
        assert_eq!(canonicalize(7, 7, 2).unwrap(), l(1, 5));
        assert_eq!(highest_weight(7, 7, 2).unwrap(), rat(34, 7));
        assert_eq!(canonicalize(7, 1, 3).unwrap(), l(1, 3));
        assert_eq!(canonicalize(8, 8, 4).unwrap(), l(1, 4));
        // tie on i' = (p+1)/2
        assert_eq!(canonicalize(7, 4, 5).unwrap(), l(4, 2));
    }

    #[test]
    fn module_lists() {
        assert_eq!(enumerate_modules(2).unwrap(), vec![l(1, 1)]);
        let ising: Vec<Rational> = enumerate_modules(3).unwrap().iter().map(|&x| label_weight(3, x).unwrap()).collect();
        let mut sorted = ising.clone();
        sorted.sort();
        assert_eq!(sorted, vec![rat(0, 1), rat(1, 16), rat(1, 2)]);
        for p in 2..15 {
            assert_eq!(enumerate_modules(p).unwrap().len() as u32, p * (p - 1) / 2);
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(8, l(1, 3), l(1, 3), l(1, 1)).unwrap());
        assert!(!is_admissible(8, l(1, 3), l(1, 3), l(1, 7)).unwrap());
        for p in 2..10 {
            for x in enumerate_modules(p).unwrap() {
                assert!(is_admissible(p, l(1, 1), x, x).unwrap());
            }
        }
        assert!(is_admissible(8, l(9, 1), l(1, 1), l(1, 1)).is_err());
    }

    #[test]
    fn fusion_examples() {
        let s = virasoro_fusion(8, l(1, 3), l(1, 3)).unwrap();
        assert_eq!(s.labels().copied().collect::<Vec<_>>(), vec![l(1, 1), l(1, 3), l(1, 5)]);
        let s = virasoro_fusion(7, l(1, 1), l(1, 5)).unwrap();
        assert_eq!(s.labels().copied().collect::<Vec<_>>(), vec![l(1, 5)]);
        let s = virasoro_fusion(9, l(1, 7), l(1, 7)).unwrap();
        assert_eq!(s.labels().copied().collect::<Vec<_>>(), vec![l(1, 1), l(1, 3)]);
        assert_eq!(s.to_string(), "(1,1) + (1,3)");
    }

    #[test]
    fn module_sum_json() {
        let s = virasoro_fusion(8, l(1, 3), l(1, 3)).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[1,1,1],[1,3,1],[1,5,1]]");
        let mut t: ModuleSum<u32> = ModuleSum::new();
        t.add(3, 0);
        assert!(t.is_empty());
    }
}
