use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::arith::Cyclotomic;
use crate::error::{Error, Result};

/// Which of the two quantum parameters an engine is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `x = exp(2πi (p+1)/p)`, labels `1..=p-1`, values in ℚ(ζ_{4p}).
    Unprimed,
    /// `y = exp(2πi p/(p+1))`, labels `1..=p`, values in ℚ(ζ_{4(p+1)}).
    Primed,
}

/// Indices of `r(a, m, n, c)_{b, d}`: `b` sits between `m` and `n` on the path
/// `a - m - b - n - c`, and `d` between `n` and `m` on `a - n - d - m - c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 6]", into = "[u32; 6]")]
pub struct RKey {
    pub a: u32,
    pub m: u32,
    pub n: u32,
    pub c: u32,
    pub b: u32,
    pub d: u32,
}

impl RKey {
    pub fn new(a: u32, m: u32, n: u32, c: u32, b: u32, d: u32) -> Self {
        RKey { a, m, n, c, b, d }
    }

    pub fn as_array(&self) -> [u32; 6] {
        [self.a, self.m, self.n, self.c, self.b, self.d]
    }

    /// Whether all four vertices of the key are compatible for labels below `bound`.
    pub fn is_valid(&self, bound: u32) -> bool {
        let ok = |x, y, z| compatible(bound, x, y, z);
        ok(self.a, self.m, self.b) && ok(self.b, self.n, self.c) && ok(self.a, self.n, self.d) && ok(self.d, self.m, self.c)
    }
}

impl From<[u32; 6]> for RKey {
    fn from(v: [u32; 6]) -> Self {
        RKey::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }
}

impl From<RKey> for [u32; 6] {
    fn from(k: RKey) -> Self {
        k.as_array()
    }
}

impl fmt::Display for RKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r({},{},{},{})_{{{},{}}}", self.a, self.m, self.n, self.c, self.b, self.d)
    }
}

/// su(2)-type fusion vertex for labels in `1..bound`.
pub fn compatible(bound: u32, x: u32, y: u32, z: u32) -> bool {
    let in_range = |v: u32| v >= 1 && v < bound;
    in_range(x) && in_range(y) && in_range(z) && x.abs_diff(y) < z && z < x + y && (x + y + z) % 2 == 1 && x + y + z < 2 * bound
}

/// Memoized evaluator of the r-matrix entries for one `p` and one side.
#[derive(Debug)]
pub struct RMatrix {
    p: u32,
    side: Side,
    bound: u32,
    order: u64,
    /// exponent `u` with `x^{1/4} = ζ_order^u`
    unit: i64,
    inv_brackets: Vec<Cyclotomic>,
    memo: RwLock<HashMap<RKey, Cyclotomic>>,
}

type Registry = RwLock<HashMap<(u32, Side), Arc<RMatrix>>>;

fn registry() -> &'static Registry {
    static R: OnceLock<Registry> = OnceLock::new();
    R.get_or_init(|| RwLock::new(HashMap::new()))
}

impl RMatrix {
    pub fn new(p: u32, side: Side) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidModel(p as i64));
        }
        let (bound, order, unit) = match side {
            Side::Unprimed => (p, 4 * p as u64, p as i64 + 1),
            Side::Primed => (p + 1, 4 * (p as u64 + 1), p as i64),
        };
        let mut engine = RMatrix { p, side, bound, order, unit, inv_brackets: Vec::new(), memo: RwLock::new(HashMap::new()) };
        engine.inv_brackets = (0..bound)
            .map(|l| if l == 0 { Ok(Cyclotomic::zero()) } else { engine.bracket(l as i64).inverse() })
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::ZeroDenominator)?;
        Ok(engine)
    }

    /// Process-wide engine for `(p, side)`, sharing its memo table.
    pub fn shared(p: u32, side: Side) -> Result<Arc<RMatrix>> {
        if let Some(e) = registry().read().get(&(p, side)) {
            return Ok(e.clone());
        }
        let engine = Arc::new(RMatrix::new(p, side)?);
        Ok(registry().write().entry((p, side)).or_insert(engine).clone())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Labels run over `1..label_bound()`.
    pub fn label_bound(&self) -> u32 {
        self.bound
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `x^{k/4}`.
    pub fn quarter_power(&self, k: i64) -> Cyclotomic {
        Cyclotomic::root_of_unity(self.order, k * self.unit)
    }

    /// `[l] = x^{l/2} - x^{-l/2}`.
    pub fn bracket(&self, l: i64) -> Cyclotomic {
        self.quarter_power(2 * l) - self.quarter_power(-2 * l)
    }

    fn check(&self, key: &RKey) -> Result<()> {
        if key.is_valid(self.bound) {
            Ok(())
        } else {
            Err(Error::InvalidKey(format!("{key} is not fusion compatible for p = {} ({:?})", self.p, self.side)))
        }
    }

    pub fn value(&self, key: &RKey) -> Result<Cyclotomic> {
        self.check(key)?;
        self.eval(key, None, true)
    }

    /// Evaluates with the `choice`-th admissible intermediate (`a1` or `c1`) at the top step.
    pub fn value_with_choice(&self, key: &RKey, choice: usize) -> Result<Cyclotomic> {
        self.check(key)?;
        self.eval(key, Some(choice), true)
    }

    /// Evaluation without reading or writing the memo table.
    pub fn value_uncached(&self, key: &RKey) -> Result<Cyclotomic> {
        self.check(key)?;
        self.eval(key, None, false)
    }

    /// Number of admissible intermediates available to the top recursion step.
    pub fn choice_count(&self, key: &RKey) -> usize {
        match self.step(key) {
            Step::SplitM => self.split_m_candidates(key).len(),
            Step::SplitN => self.split_n_candidates(key).len(),
            _ => 1,
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().len()
    }

    fn step(&self, key: &RKey) -> Step {
        if key.m == 1 || key.n == 1 {
            Step::Trivial
        } else if key.m == 2 && key.n == 2 {
            Step::Base
        } else if key.m > 2 {
            Step::SplitM
        } else {
            Step::SplitN
        }
    }

    fn split_m_candidates(&self, k: &RKey) -> Vec<u32> {
        (1..self.bound).filter(|&a1| compatible(self.bound, k.a, 2, a1) && compatible(self.bound, a1, k.m - 1, k.b)).collect()
    }

    fn split_n_candidates(&self, k: &RKey) -> Vec<u32> {
        (1..self.bound).filter(|&c1| compatible(self.bound, k.b, 2, c1) && compatible(self.bound, c1, k.n - 1, k.c)).collect()
    }

    fn eval(&self, key: &RKey, choice: Option<usize>, use_memo: bool) -> Result<Cyclotomic> {
        if use_memo && choice.is_none() {
            if let Some(v) = self.memo.read().get(key) {
                return Ok(v.clone());
            }
        }
        let v = match self.step(key) {
            // structure forces b = a, d = c (m = 1) or b = c, d = a (n = 1)
            Step::Trivial => Cyclotomic::one(),
            Step::Base => self.base(key)?,
            Step::SplitM => {
                let cands = self.split_m_candidates(key);
                let a1 = pick(&cands, choice, key)?;
                let mut acc = Cyclotomic::zero();
                for d1 in 1..self.bound {
                    let left = RKey::new(key.a, 2, key.n, d1, a1, key.d);
                    let right = RKey::new(a1, key.m - 1, key.n, key.c, key.b, d1);
                    if left.is_valid(self.bound) && right.is_valid(self.bound) {
                        acc = acc + self.eval(&left, None, use_memo)? * self.eval(&right, None, use_memo)?;
                    }
                }
                acc
            }
            Step::SplitN => {
                let cands = self.split_n_candidates(key);
                let c1 = pick(&cands, choice, key)?;
                let mut acc = Cyclotomic::zero();
                for d1 in 1..self.bound {
                    let left = RKey::new(key.a, key.m, 2, c1, key.b, d1);
                    let right = RKey::new(d1, key.m, key.n - 1, key.c, c1, key.d);
                    if left.is_valid(self.bound) && right.is_valid(self.bound) {
                        acc = acc + self.eval(&left, None, use_memo)? * self.eval(&right, None, use_memo)?;
                    }
                }
                acc
            }
        };
        if use_memo && choice.is_none() {
            self.memo.write().entry(*key).or_insert_with(|| v.clone());
        }
        Ok(v)
    }

    /// The `m = n = 2` entries.
    fn base(&self, key: &RKey) -> Result<Cyclotomic> {
        let l = key.c;
        if key.a == l + 2 || key.a + 2 == l {
            // b = d = (a + c) / 2 by structure
            return Ok(self.quarter_power(1));
        }
        // a = c = l, b and d are l ± 1
        let s: i64 = if key.b == l + 1 { 1 } else { -1 };
        let inv_l = self.inv_brackets.get(l as usize).filter(|v| !v.is_zero()).ok_or(Error::ZeroDenominator)?;
        if key.b == key.d {
            let li = l as i64;
            let v = self.quarter_power(-1 - 2 * s * li) * self.bracket(1) * inv_l;
            Ok(if s > 0 { -v } else { v })
        } else {
            Ok(self.quarter_power(-1) * self.bracket(l as i64 + s) * inv_l)
        }
    }

    /// Writes the memo table as a versioned JSON cache file.
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let mut entries: Vec<(RKey, Cyclotomic)> = self.memo.read().iter().map(|(k, v)| (*k, v.clone())).collect();
        entries.sort_by_key(|e| e.0);
        let file = CacheFile { schema: CACHE_SCHEMA.into(), version: CACHE_VERSION, p: self.p, side: self.side, entries };
        let text = serde_json::to_string(&file).map_err(|e| Error::Cache(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }

    /// Loads a cache file after recomputing a sample of its entries; returns the number of entries loaded.
    pub fn load_cache(&self, path: &Path) -> Result<usize> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        let file: CacheFile = serde_json::from_str(&text).map_err(|e| Error::Cache(format!("unreadable cache: {e}")))?;
        if file.schema != CACHE_SCHEMA || file.version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported cache format {} v{}", file.schema, file.version)));
        }
        if file.p != self.p || file.side != self.side {
            return Err(Error::Cache(format!("cache is for p = {} ({:?})", file.p, file.side)));
        }
        if file.entries.iter().any(|(k, _)| !k.is_valid(self.bound)) {
            return Err(Error::Cache("cache contains an invalid key".into()));
        }
        let fresh = RMatrix::new(self.p, self.side)?;
        let stride = (file.entries.len() / CACHE_SAMPLES).max(1);
        for (key, value) in file.entries.iter().step_by(stride).take(CACHE_SAMPLES) {
            if fresh.value(key)? != *value {
                return Err(Error::Cache(format!("cached value of {key} does not verify")));
            }
        }
        let mut memo = self.memo.write();
        for (key, value) in &file.entries {
            memo.entry(*key).or_insert_with(|| value.clone());
        }
        Ok(file.entries.len())
    }
}

const CACHE_SCHEMA: &str = "cosetvir/rcache";
const CACHE_VERSION: u32 = 1;
const CACHE_SAMPLES: usize = 8;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: String,
    version: u32,
    p: u32,
    side: Side,
    entries: Vec<(RKey, Cyclotomic)>,
}

enum Step {
    Trivial,
    Base,
    SplitM,
    SplitN,
}

fn pick(cands: &[u32], choice: Option<usize>, key: &RKey) -> Result<u32> {
    match choice {
        None => cands.first().copied(),
        Some(i) => cands.get(i).copied(),
    }
    .ok_or_else(|| Error::InvalidKey(format!("{key} has no admissible intermediate")))
}

/// `r(a, m, n, c)_{b, d}` for the unprimed parameter.
pub fn r_matrix(p: u32, key: &RKey) -> Result<Cyclotomic> {
    RMatrix::shared(p, Side::Unprimed)?.value(key)
}

/// `r'(a, m, n, c)_{b, d}`, the same recursion for the primed parameter.
pub fn r_matrix_primed(p: u32, key: &RKey) -> Result<Cyclotomic> {
    RMatrix::shared(p, Side::Primed)?.value(key)
}

/// `[l]` for the unprimed parameter at `p`.
pub fn bracket(p: u32, l: i64) -> Result<Cyclotomic> {
    Ok(RMatrix::shared(p, Side::Unprimed)?.bracket(l))
}
