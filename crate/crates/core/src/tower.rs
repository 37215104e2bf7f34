//! Iterated GKO decompositions of the coset towers.
//!
//! The tower for `k` starts from the two summands `L(3,0)` and `L(3,3)` of the
//! level-3 seed, tensors with `k + 2` copies of `L(1, ·)` and branches each time.
//! A [`BranchPath`] records the Virasoro weight emitted at every step together
//! with the final affine label; sectors group paths by that label.
//!
//! The coset modules of the tower are indexed by odd `i <= k + 5`, the label
//! `(1, i)` of the minimal model `p = k + 6`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::affine::{gko_branch, AffineLabel};
use crate::arith::{rat, rational_json, Rational};
use crate::error::{Error, Result};
use crate::kac::{central_charge, highest_weight, virasoro_fusion, KacLabel, ModuleSum};

/// One Virasoro factor emitted by a branching step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub p: u32,
    pub central_charge: Rational,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPath {
    /// Level-3 summand the path starts from.
    pub seed: AffineLabel,
    pub steps: Vec<PathStep>,
    /// Affine label after each step; the last entry is the terminal label.
    pub labels: Vec<AffineLabel>,
}

impl BranchPath {
    pub fn terminal(&self) -> AffineLabel {
        *self.labels.last().expect("paths have at least one step")
    }

    pub fn last_weight(&self) -> &Rational {
        &self.steps.last().expect("nonempty path").weight
    }

    pub fn to_json(&self) -> serde_json::Value {
        let weights: Vec<_> = self
            .steps
            .iter()
            .map(|s| serde_json::json!({"p": s.p, "c": rational_json(&s.central_charge), "h": rational_json(&s.weight)}))
            .collect();
        serde_json::json!({"seed": self.seed, "weights": weights, "terminal": self.terminal()})
    }
}

/// One tensoring with `L(1, ·)`: branching edges from level `level` to `level + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Layer {
    level: u32,
    central_charge: Rational,
    /// `(n, s) -> h_{(s+1, n+1)}` at `p = level + 2`
    edges: BTreeMap<(u32, u32), Rational>,
    /// number of paths ending at each label of level `level + 1`
    counts: BTreeMap<u32, u64>,
}

/// The tower as a layered graph of affine labels; a path through it is a [`BranchPath`].
///
/// Path counts grow quickly with `k`, so paths are only materialized on request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub k: u32,
    layers: Vec<Layer>,
}

// seed labels at level 3, with the epsilon of their first tensor factor
const SEEDS: [(u32, u32); 2] = [(0, 0), (3, 1)];

/// Builds the tower for `k`, refusing values above `max_k`.
pub fn build_tower(k: u32, max_k: u32) -> Result<Tower> {
    if k > max_k {
        return Err(Error::BoundExceeded { k, max: max_k });
    }
    let mut counts: BTreeMap<u32, u64> = SEEDS.iter().map(|&(n, _)| (n, 1)).collect();
    let mut layers = Vec::new();
    for step in 0..k + 2 {
        let level = 3 + step;
        let layer = next_layer(level, &counts, |n| if step == 0 { SEEDS.iter().find(|s| s.0 == n).map_or(0, |s| s.1) } else { 0 })?;
        counts = layer.counts.clone();
        layers.push(layer);
    }
    Ok(Tower { k, layers })
}

fn next_layer(level: u32, counts: &BTreeMap<u32, u64>, epsilon: impl Fn(u32) -> u32) -> Result<Layer> {
    let mut edges = BTreeMap::new();
    let mut next: BTreeMap<u32, u64> = BTreeMap::new();
    for (&n, &c) in counts {
        for e in gko_branch(level, epsilon(n), n)? {
            *next.entry(e.label.k).or_insert(0) += c;
            edges.insert((n, e.label.k), e.weight);
        }
    }
    Ok(Layer { level, central_charge: central_charge(level + 2)?, edges, counts: next })
}

impl Tower {
    /// Terminal affine level, `k + 5`.
    pub fn terminal_level(&self) -> u32 {
        self.layers.last().map_or(3, |l| l.level + 1)
    }

    /// Indices `i` with a nonempty sector.
    pub fn sectors(&self) -> Vec<u32> {
        self.layers.last().map(|l| l.counts.keys().copied().collect()).unwrap_or_default()
    }

    pub fn sector_size(&self, i: u32) -> u64 {
        self.layers.last().and_then(|l| l.counts.get(&i).copied()).unwrap_or(0)
    }

    pub fn path_count(&self) -> u64 {
        self.layers.last().map_or(0, |l| l.counts.values().sum())
    }

    /// Tensors with one more `L(1, 0)` and regroups.
    pub fn extend(&self) -> Result<Tower> {
        let last = self.layers.last().expect("towers have at least two layers");
        let mut layers = self.layers.clone();
        layers.push(next_layer(last.level + 1, &last.counts, |_| 0)?);
        Ok(Tower { k: self.k + 1, layers })
    }

    /// Distinct last-step weights of sector `i`.
    pub fn terminal_weights(&self, i: u32) -> BTreeSet<Rational> {
        self.grouped(i).into_iter().map(|(_, h, _)| h).collect()
    }

    /// Sector `i` as `[(previous sector j, last weight h, number of paths)]`, the `[j, h]` grouping.
    pub fn grouped(&self, i: u32) -> Vec<(u32, Rational, u64)> {
        let n = self.layers.len();
        let last = &self.layers[n - 1];
        let prev_counts = &self.layers[n - 2].counts;
        last.edges
            .iter()
            .filter(|((_, s), _)| *s == i)
            .filter_map(|((j, _), h)| prev_counts.get(j).map(|&c| (*j, h.clone(), c)))
            .collect()
    }

    /// All paths of sector `i`, in lexicographic order of their label sequences.
    pub fn paths(&self, i: u32) -> Vec<BranchPath> {
        let mut out = Vec::new();
        for &(seed, _) in &SEEDS {
            let mut labels = vec![seed];
            self.walk(0, &mut labels, i, &mut out);
        }
        out
    }

    fn walk(&self, depth: usize, labels: &mut Vec<u32>, target: u32, out: &mut Vec<BranchPath>) {
        if depth == self.layers.len() {
            if *labels.last().unwrap() == target {
                out.push(self.materialize(labels));
            }
            return;
        }
        let n = *labels.last().unwrap();
        let layer = &self.layers[depth];
        for (&(_, s), _) in layer.edges.range((n, 0)..=(n, u32::MAX)) {
            labels.push(s);
            self.walk(depth + 1, labels, target, out);
            labels.pop();
        }
    }

    fn materialize(&self, labels: &[u32]) -> BranchPath {
        let seed = labels[0];
        let steps = self
            .layers
            .iter()
            .zip(labels.windows(2))
            .map(|(layer, w)| PathStep {
                p: layer.level + 2,
                central_charge: layer.central_charge.clone(),
                weight: layer.edges[&(w[0], w[1])].clone(),
            })
            .collect();
        let labels = labels[1..]
            .iter()
            .zip(&self.layers)
            .map(|(&s, layer)| AffineLabel { level: layer.level + 1, k: s })
            .collect();
        BranchPath { seed: AffineLabel { level: 3, k: seed }, steps, labels }
    }

    /// JSON document; with `with_paths` every path is listed, otherwise only the `[j, h]` groups.
    pub fn to_json(&self, with_paths: bool) -> serde_json::Value {
        let sectors: serde_json::Map<String, serde_json::Value> = self
            .sectors()
            .into_iter()
            .map(|i| {
                let groups: Vec<_> = self
                    .grouped(i)
                    .iter()
                    .map(|(j, h, c)| serde_json::json!({"previous": j, "h": rational_json(h), "paths": c}))
                    .collect();
                let mut sector = serde_json::json!({"size": self.sector_size(i), "groups": groups});
                if with_paths {
                    sector["paths"] = self.paths(i).iter().map(BranchPath::to_json).collect();
                }
                (i.to_string(), sector)
            })
            .collect();
        serde_json::json!({
            "schema": "cosetvir/tower/v1",
            "k": self.k,
            "p": self.terminal_level() + 1,
            "central_charge": rational_json(&self.layers.last().expect("layers").central_charge),
            "sectors": sectors,
        })
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = self.k as i64 - 1;
        for i in self.sectors() {
            let terms: Vec<String> = self.grouped(i).iter().map(|(j, h, _)| format!("[{j},{h}]_{sub}")).collect();
            writeln!(f, "U({},{}) = {}", self.k, i, terms.join(" + "))?;
        }
        Ok(())
    }
}

/// Odd indices `i` with `(1, i)` a label of the minimal model `p = k + 6`.
pub fn coset_modules(k: u32) -> Vec<u32> {
    (1..k + 6).step_by(2).collect()
}

pub fn coset_p(k: u32) -> u32 {
    k + 6
}

/// Weight of the minimal-model factor `L(c_{k+6}, h_{(1,i)})` of the coset module `i`.
pub fn coset_weight(k: u32, i: u32) -> Result<Rational> {
    highest_weight(coset_p(k), 1, i)
}

fn check_coset_index(k: u32, i: u32) -> Result<()> {
    if i.is_multiple_of(2) || i == 0 || i >= k + 6 {
        return Err(Error::InvalidLabel(format!("{i} is not a coset module index for k = {k}")));
    }
    Ok(())
}

pub fn coset_fusion(k: u32, i: u32, j: u32) -> Result<ModuleSum<u32>> {
    check_coset_index(k, i)?;
    check_coset_index(k, j)?;
    let p = coset_p(k);
    let full = virasoro_fusion(p, KacLabel::new(1, i), KacLabel::new(1, j))?;
    let mut out = ModuleSum::new();
    for (l, mult) in full.iter() {
        if l.i_prime != 1 {
            return Err(Error::SideConditionFailure(format!(
                "fusion of (1,{i}) and (1,{j}) at p = {p} leaves the (1,.) family: {l}"
            )));
        }
        out.add(l.i, mult);
    }
    Ok(out)
}

/// Coset fusion rules `N_{a,b}^c` for one tower, tabulated once.
#[derive(Clone, Debug)]
pub struct FusionTable {
    pub k: u32,
    pub modules: Vec<u32>,
    allowed: BTreeSet<(u32, u32, u32)>,
}

impl FusionTable {
    pub fn new(k: u32) -> Result<Self> {
        let modules = coset_modules(k);
        let mut allowed = BTreeSet::new();
        for &a in &modules {
            for &b in &modules {
                for c in coset_fusion(k, a, b)?.labels() {
                    allowed.insert((a, b, *c));
                }
            }
        }
        Ok(FusionTable { k, modules, allowed })
    }

    /// `N_{a,b}^c != 0`.
    pub fn n(&self, a: u32, b: u32, c: u32) -> bool {
        self.allowed.contains(&(a, b, c))
    }

    pub fn products(&self, a: u32, b: u32) -> impl Iterator<Item = u32> + '_ {
        self.modules.iter().copied().filter(move |&c| self.n(a, b, c))
    }

    /// Fusion-compatible unordered triples `a <= b <= c`.
    pub fn triples(&self) -> Vec<(u32, u32, u32)> {
        self.allowed.iter().copied().filter(|&(a, b, c)| a <= b && b <= c).collect()
    }
}

/// The index `t` maximizing the number of summands of `t ⊠ t`; ties go to the smaller index.
pub fn longest_summand_index(k: u32) -> Result<u32> {
    let mut best = (0usize, 0u32);
    for i in coset_modules(k) {
        let n = coset_fusion(k, i, i)?.len();
        if n > best.0 {
            best = (n, i);
        }
    }
    Ok(best.1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GriessCheck {
    pub holds: bool,
    /// `h^{(k+6)}_{(1,3)}` and `h^{(k+5)}_{(3,1)}`.
    pub witnesses: (Rational, Rational),
}

/// Checks that `h^{(k+6)}_{(1,3)} + h^{(k+5)}_{(3,1)} = 2` and matches `(k+8)/(k+6) + (k+4)/(k+6)`.
pub fn griess_weight_check(k: u32) -> Result<GriessCheck> {
    if k < 1 {
        return Err(Error::InvalidLabel("griess check needs k >= 1".into()));
    }
    let a = highest_weight(k + 6, 1, 3)?;
    let b = highest_weight(k + 5, 3, 1)?;
    let kk = k as i64;
    let closed_form = a == rat(kk + 8, kk + 6) && b == rat(kk + 4, kk + 6);
    let holds = closed_form && &a + &b == rat(2, 1);
    Ok(GriessCheck { holds, witnesses: (a, b) })
}
