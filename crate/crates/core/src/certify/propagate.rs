//! Relations between the structure constants λ of the coset tower, and a replay
//! of the nonvanishing argument that marks every fusion-compatible λ nonzero.
//!
//! A relation for the quadruple `(a, b, c, d)` compares the two multisets
//! `{λ(c, μ, a) λ(b, d, μ)}_μ` and `{λ(b, β, a) λ(c, d, β)}_β`: both contain the
//! same number of nonzero products. λ is symmetric in its three indices, so
//! triples are stored sorted.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tower::{coset_p, FusionTable};

pub type Triple = [u32; 3];

fn lam(t: &Triple) -> String {
    format!("λ({},{},{})", t[0], t[1], t[2])
}

pub fn triple_key(a: u32, b: u32, c: u32) -> Triple {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Nonzero,
    Zero,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaTriple {
    pub indices: Triple,
    pub status: Status,
    /// Index of the derivation step that decided the status.
    pub provenance: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub quadruple: [u32; 4],
    pub left: Vec<(Triple, Triple)>,
    pub right: Vec<(Triple, Triple)>,
}

pub fn relation(table: &FusionTable, a: u32, b: u32, c: u32, d: u32) -> Relation {
    let left = table
        .modules
        .iter()
        .filter(|&&mu| table.n(c, mu, a) && table.n(b, d, mu))
        .map(|&mu| (triple_key(c, mu, a), triple_key(b, d, mu)))
        .collect();
    let right = table
        .modules
        .iter()
        .filter(|&&be| table.n(b, be, a) && table.n(c, d, be))
        .map(|&be| (triple_key(b, be, a), triple_key(c, d, be)))
        .collect();
    Relation { quadruple: [a, b, c, d], left, right }
}

/// One relation per ordered quadruple with an intermediate on each side.
pub fn generate_relations(k: u32) -> Result<Vec<Relation>> {
    if k < 1 {
        return Err(Error::InvalidLabel("relations need k >= 1".into()));
    }
    let table = FusionTable::new(k)?;
    let ms = &table.modules;
    let mut out = Vec::new();
    for &a in ms {
        for &b in ms {
            for &c in ms {
                for &d in ms {
                    let r = relation(&table, a, b, c, d);
                    if !r.left.is_empty() && !r.right.is_empty() {
                        out.push(r);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Product pairs on each side of a relation, as variable indices.
type IndexedRelation = (Vec<[usize; 2]>, Vec<[usize; 2]>);

/// Finite-domain search over zero/nonzero assignments subject to a set of relations
/// and clauses of the form "not all of these vanish".
struct Solver {
    vars: Vec<Triple>,
    rels: Vec<IndexedRelation>,
    clauses: Vec<Vec<usize>>,
}

const FREE: i8 = -1;

impl Solver {
    fn new(rels: &[Relation], clauses: &[Vec<Triple>]) -> Self {
        let mut set = BTreeSet::new();
        for r in rels {
            for (x, y) in r.left.iter().chain(&r.right) {
                set.insert(*x);
                set.insert(*y);
            }
        }
        set.extend(clauses.iter().flatten().copied());
        let vars: Vec<Triple> = set.into_iter().collect();
        let index: HashMap<Triple, usize> = vars.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let side = |s: &[(Triple, Triple)]| s.iter().map(|(x, y)| [index[x], index[y]]).collect::<Vec<_>>();
        Solver {
            rels: rels.iter().map(|r| (side(&r.left), side(&r.right))).collect(),
            clauses: clauses.iter().map(|c| c.iter().map(|t| index[t]).collect()).collect(),
            vars,
        }
    }

    fn feasible(&self, asg: &[i8]) -> bool {
        let bounds = |side: &[[usize; 2]]| {
            side.iter().fold((0, 0), |(lo, hi), [x, y]| match (asg[*x], asg[*y]) {
                (0, _) | (_, 0) => (lo, hi),
                (1, 1) => (lo + 1, hi + 1),
                _ => (lo, hi + 1),
            })
        };
        self.rels.iter().all(|(l, r)| {
            let (lo1, hi1) = bounds(l);
            let (lo2, hi2) = bounds(r);
            hi1 >= lo2 && hi2 >= lo1
        }) && self.clauses.iter().all(|c| c.iter().any(|&v| asg[v] != 0))
    }

    fn search(&self, asg: &mut Vec<i8>) -> Option<Vec<i8>> {
        if !self.feasible(asg) {
            return None;
        }
        let Some(v) = asg.iter().position(|&x| x == FREE) else {
            return Some(asg.clone());
        };
        for val in [1, 0] {
            asg[v] = val;
            if let Some(s) = self.search(asg) {
                asg[v] = FREE;
                return Some(s);
            }
        }
        asg[v] = FREE;
        None
    }

    /// `None` if the constraints have no solution; otherwise the values shared by all solutions.
    fn forced(&self, known: &BTreeMap<Triple, Status>, hypothesis: &[(Triple, bool)]) -> Option<BTreeMap<Triple, bool>> {
        let mut init: Vec<i8> = self
            .vars
            .iter()
            .map(|t| match known.get(t) {
                Some(Status::Nonzero) => 1,
                Some(Status::Zero) => 0,
                _ => FREE,
            })
            .collect();
        for (t, nz) in hypothesis {
            if let Ok(i) = self.vars.binary_search(t) {
                init[i] = *nz as i8;
            }
        }
        let first = self.search(&mut init.clone())?;
        let free: Vec<usize> = (0..self.vars.len()).filter(|&i| init[i] == FREE).collect();
        let mut seen: Vec<[bool; 2]> = first.iter().map(|&v| [v == 0, v == 1]).collect();
        let mut out = BTreeMap::new();
        for &v in &free {
            if seen[v][0] && seen[v][1] {
                continue;
            }
            let val = first[v];
            let mut alt = init.clone();
            alt[v] = 1 - val;
            match self.search(&mut alt) {
                None => {
                    out.insert(self.vars[v], val == 1);
                }
                Some(s) => {
                    for &w in &free {
                        seen[w][s[w] as usize] = true;
                    }
                }
            }
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Odd,
    Even,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub index: usize,
    pub lemma: String,
    pub statement: String,
    pub side_conditions: Vec<String>,
    pub relations_used: usize,
    pub concluded: Vec<Triple>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Propagation {
    pub k: u32,
    pub p: u32,
    pub m: u32,
    pub branch: Branch,
    pub triples: Vec<LambdaTriple>,
    pub log: Vec<DerivationStep>,
    /// Every fully decided relation has as many nonzero products on each side.
    pub rank_check: bool,
}

impl Propagation {
    pub fn status(&self, a: u32, b: u32, c: u32) -> Status {
        let key = triple_key(a, b, c);
        self.triples.iter().find(|t| t.indices == key).map_or(Status::Unknown, |t| t.status)
    }

    pub fn all_nonzero(&self) -> bool {
        self.triples.iter().all(|t| t.status == Status::Nonzero)
    }

    pub fn undecided(&self) -> Vec<Triple> {
        self.triples.iter().filter(|t| t.status != Status::Nonzero).map(|t| t.indices).collect()
    }
}

struct Replay {
    table: FusionTable,
    known: BTreeMap<Triple, Status>,
    provenance: BTreeMap<Triple, usize>,
    log: Vec<DerivationStep>,
}

impl Replay {
    fn n(&self, a: u32, b: u32, c: u32) -> bool {
        self.table.n(a, b, c)
    }

    fn rel(&self, a: u32, b: u32, c: u32, d: u32) -> Relation {
        relation(&self.table, a, b, c, d)
    }

    fn nonzero(&self, t: &Triple) -> bool {
        self.known.get(t) == Some(&Status::Nonzero)
    }

    fn record(&mut self, lemma: &str, statement: String, side: Vec<String>, rels: usize, concluded: Vec<Triple>) -> Result<()> {
        let index = self.log.len();
        for t in &concluded {
            match self.known.get(t) {
                Some(Status::Zero) => {
                    return Err(Error::SideConditionFailure(format!("{lemma}: conflicting status for {}", lam(t))));
                }
                Some(Status::Nonzero) => {}
                _ => {
                    self.known.insert(*t, Status::Nonzero);
                    self.provenance.insert(*t, index);
                }
            }
        }
        self.log.push(DerivationStep { index, lemma: lemma.into(), statement, side_conditions: side, relations_used: rels, concluded });
        Ok(())
    }

    fn fail(lemma: &str, what: String) -> Error {
        Error::SideConditionFailure(format!("{lemma}: {what}"))
    }

    fn check_fusion(&self, lemma: &str, side: &mut Vec<String>, a: u32, b: u32, c: u32, expect: bool) -> Result<()> {
        let desc = format!("N({a},{b},{c}) = {}", expect as u8);
        if self.n(a, b, c) != expect {
            return Err(Self::fail(lemma, format!("expected {desc}")));
        }
        side.push(desc);
        Ok(())
    }

    /// Refutes the vanishing of `target` under the given relations and clauses.
    fn refute_zero(&mut self, lemma: &str, target: Triple, rels: Vec<Relation>, clauses: Vec<Vec<Triple>>, side: Vec<String>) -> Result<()> {
        let solver = Solver::new(&rels, &clauses);
        if solver.forced(&self.known, &[(target, false)]).is_some() {
            return Err(Self::fail(lemma, format!("{} = 0 is consistent with {} relations", lam(&target), rels.len())));
        }
        self.record(lemma, format!("{} = 0 is contradictory", lam(&target)), side, rels.len(), vec![target])
    }

    /// Marks everything the relations force to be nonzero.
    fn propagate(&mut self, lemma: &str, statement: &str, rels: Vec<Relation>, side: Vec<String>) -> Result<Vec<Triple>> {
        let solver = Solver::new(&rels, &[]);
        let forced = solver
            .forced(&self.known, &[])
            .ok_or_else(|| Self::fail(lemma, "the relations admit no assignment extending the known statuses".into()))?;
        let concluded: Vec<Triple> = forced.into_iter().filter(|(_, nz)| *nz).map(|(t, _)| t).collect();
        self.record(lemma, statement.into(), side, rels.len(), concluded.clone())?;
        Ok(concluded)
    }
}

/// Replays the nonvanishing argument for tower `k`.
pub fn propagate_nonvanishing(k: u32) -> Result<Propagation> {
    if k < 1 {
        return Err(Error::InvalidLabel("propagation needs k >= 1".into()));
    }
    let table = FusionTable::new(k)?;
    let p = coset_p(k);
    let ms = table.modules.clone();
    let top = *ms.last().expect("modules are nonempty");
    let m = p - 2;
    let all: Vec<Triple> = table.triples().into_iter().map(|(a, b, c)| [a, b, c]).collect();
    let mut r = Replay { table, known: BTreeMap::new(), provenance: BTreeMap::new(), log: Vec::new() };

    let vac: Vec<Triple> = ms.iter().map(|&i| triple_key(1, i, i)).collect();
    let side = ms.iter().map(|&i| format!("N(1,{i},{i}) = 1")).collect();
    r.record("vacuum", "λ(1,i,i) is nonzero for every i".into(), side, 0, vac)?;

    let alternation = ms.iter().all(|&i| {
        ms.iter().all(|&j| {
            ms.iter().all(|&l| {
                let rel = r.rel(1, i, j, l);
                rel.left.len() == rel.right.len() && rel.left.len() <= 1
            })
        })
    });
    if !alternation {
        return Err(Replay::fail("alternation", "a vacuum quadruple has more than one product on a side".into()));
    }
    r.record("alternation", "λ is symmetric in its indices; vacuum quadruples have one product per side".into(), vec![], 0, vec![])?;

    // λ(3, i, i+2) by contradiction, for increasing i
    for t in 1..(top - 1) / 2 {
        let (lo, hi) = (2 * t + 1, 2 * t + 3);
        if !r.n(3, lo, hi) {
            continue;
        }
        let below: Vec<u32> = ms.iter().copied().filter(|&i| i <= lo).collect();
        let mut rels = Vec::new();
        for &x in &below {
            for &y in &below {
                for &z in ms.iter().filter(|&&z| z >= hi) {
                    rels.push(r.rel(3, x, y, z));
                }
            }
        }
        let exits: Vec<Triple> = below
            .iter()
            .flat_map(|&a| below.iter().map(move |&b| (a, b)))
            .flat_map(|(a, b)| ms.iter().map(move |&c| (a, b, c)))
            .filter(|&(a, b, c)| c > lo && r.n(a, b, c))
            .map(|(a, b, c)| triple_key(a, b, c))
            .collect();
        let side = vec![format!("N(3,{lo},{hi}) = 1"), format!("U^1 + ... + U^{lo} is not closed under fusion")];
        r.refute_zero("three-step", triple_key(3, lo, hi), rels, vec![exits], side)?;
    }

    let branch = if m % 2 == 1 {
        let prods: Vec<u32> = r.table.products(m, m).collect();
        if prods != [1, 3] {
            return Err(Error::ParityBranchUnavailable(format!("m = {m} is odd but U^{m} x U^{m} = {prods:?}")));
        }
        Branch::Odd
    } else {
        if r.n(m + 1, m + 1, 3) {
            return Err(Error::ParityBranchUnavailable(format!("m = {m} is even but N({0},{0},3) = 1", m + 1)));
        }
        Branch::Even
    };

    match branch {
        Branch::Odd => {
            r.record(
                "odd-closure",
                format!("λ({m},{m},3) is nonzero, else U^1 + U^{m} would be a closed subalgebra"),
                vec![format!("U^{m} x U^{m} = U^1 + U^3")],
                0,
                vec![triple_key(m, m, 3)],
            )?;
            let rels = ms.iter().filter(|&&i| i >= 3).map(|&i| r.rel(m, i, m, i - 2)).collect();
            r.propagate("odd-top", &format!("λ(a,b,{m}) is nonzero"), rels, vec![])?;
            if let Some(t) = all.iter().find(|t| t.contains(&m) && !r.nonzero(t)) {
                return Err(Replay::fail("odd-top", format!("{} is not covered", lam(t))));
            }
            let mut rels = Vec::new();
            for &i in &ms {
                for &j in &ms {
                    if r.n(i, j, 3) {
                        rels.push(r.rel(m, m, i, j));
                    }
                }
            }
            r.propagate("odd-three", "λ(a,b,3) is nonzero", rels, vec![])?;
        }
        Branch::Even => {
            let mut side = Vec::new();
            r.check_fusion("even-five", &mut side, m + 1, m + 1, 3, false)?;
            let rels = ms.iter().filter(|&&i| i >= 3).map(|&i| r.rel(3, 3, i, i)).collect();
            let got = r.propagate("even-five", "λ(i,i,5) is nonzero", rels, side)?;
            for t in ms.iter().filter(|&&i| r.n(i, i, 5)).map(|&i| triple_key(i, i, 5)) {
                if !r.nonzero(&t) {
                    return Err(Replay::fail("even-five", format!("{} not forced (got {got:?})", lam(&t))));
                }
            }

            let mut side = Vec::new();
            let mut rels = Vec::new();
            for &i in ms.iter().filter(|&&i| ms.contains(&(i + 4))) {
                r.check_fusion("even-five-shift", &mut side, i, i + 4, 1, false)?;
                r.check_fusion("even-five-shift", &mut side, i, i + 4, 3, false)?;
                r.check_fusion("even-five-shift", &mut side, 3, i + 4, i.saturating_sub(2), false)?;
                r.check_fusion("even-five-shift", &mut side, 3, i + 4, i, false)?;
                rels.push(r.rel(3, 3, i, i + 4));
            }
            r.propagate("even-five-shift", "λ(i,i+4,5) is nonzero", rels, side)?;
            for t in ms.iter().filter(|&&i| r.n(i, i + 4, 5)).map(|&i| triple_key(i, i + 4, 5)) {
                if !r.nonzero(&t) {
                    return Err(Replay::fail("even-five-shift", format!("{} not forced", lam(&t))));
                }
            }

            let cls: Vec<u32> = ms.iter().copied().filter(|&i| i == 1 || i % 4 == 1).collect();
            let exits: Vec<Triple> = cls
                .iter()
                .flat_map(|&a| cls.iter().map(move |&b| (a, b)))
                .flat_map(|(a, b)| ms.iter().map(move |&c| (a, b, c)))
                .filter(|&(a, b, c)| !cls.contains(&c) && r.n(a, b, c))
                .map(|(a, b, c)| triple_key(a, b, c))
                .collect();
            let mut rels = Vec::new();
            for &i in ms.iter().filter(|&&i| ms.contains(&(i + 2))) {
                rels.push(r.rel(3, 3, i, i + 2));
                rels.push(r.rel(3, 5, i, i + 2));
            }
            for &x in ms.iter().filter(|&&x| x % 4 == 3) {
                for &a in &cls[1..] {
                    for &b in &cls[1..] {
                        rels.push(r.rel(5, x, a, b));
                    }
                }
            }
            for h in [triple_key(3, 3, 3), triple_key(5, 5, 3)] {
                let side = vec!["U^1 + U^5 + U^9 + ... is not closed under fusion".into()];
                r.refute_zero("even-three", h, rels.clone(), vec![exits.clone()], side)?;
            }

            for tt in (5..top).step_by(2) {
                if !r.n(tt + 2, tt + 2, 3) {
                    continue;
                }
                let mut rels = vec![r.rel(3, 3, tt, tt + 2), r.rel(3, 5, tt + 2, tt + 2)];
                if ms.contains(&(tt + 4)) {
                    rels.push(r.rel(3, 3, tt + 2, tt + 4));
                }
                let side = vec![format!("N({0},{0},3) = 1", tt + 2)];
                r.refute_zero("even-diagonal", triple_key(tt + 2, tt + 2, 3), rels, vec![], side)?;
            }
        }
    }

    for &i in &ms {
        if r.n(i, i, 3) && !r.nonzero(&triple_key(i, i, 3)) {
            return Err(Replay::fail("diagonal", format!("λ({i},{i},3) is not established")));
        }
    }

    for pp in (3..=top).step_by(2) {
        let mut rels = Vec::new();
        for &i in &ms {
            for &j in &ms {
                if r.n(i, j, pp + 2) {
                    rels.push(r.rel(3, pp, i, j));
                }
            }
        }
        r.propagate("recursion", &format!("λ(i,j,{}) is nonzero", pp + 2), rels, vec![])?;
    }

    let triples: Vec<LambdaTriple> = all
        .iter()
        .map(|t| LambdaTriple {
            indices: *t,
            status: r.known.get(t).copied().unwrap_or(Status::Unknown),
            provenance: r.provenance.get(t).copied(),
        })
        .collect();
    let rank_check = rank_rule_holds(k, &r.known)?;
    Ok(Propagation { k, p, m, branch, triples, log: r.log, rank_check })
}

/// Post-hoc check of every generated relation whose triples are all decided.
pub fn rank_rule_holds(k: u32, statuses: &BTreeMap<Triple, Status>) -> Result<bool> {
    let value = |t: &Triple| match statuses.get(t) {
        Some(Status::Nonzero) => Some(true),
        Some(Status::Zero) => Some(false),
        _ => None,
    };
    let count = |side: &[(Triple, Triple)]| -> Option<usize> {
        let mut n = 0;
        for (x, y) in side {
            if value(x)? && value(y)? {
                n += 1;
            }
        }
        Some(n)
    };
    for rel in generate_relations(k)? {
        if let (Some(l), Some(rr)) = (count(&rel.left), count(&rel.right)) {
            if l != rr {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
