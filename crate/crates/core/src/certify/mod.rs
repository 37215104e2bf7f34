//! Uniqueness certificates: the nonvanishing replay for λ together with exact
//! evaluation of the braiding entries that force `λ² = 1`.

mod propagate;

pub use propagate::{
    generate_relations, propagate_nonvanishing, rank_rule_holds, relation, triple_key, Branch, DerivationStep, LambdaTriple,
    Propagation, Relation, Status, Triple,
};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{Cyclotomic, DEFAULT_MAX_PRECISION};
use crate::braiding::{braiding_matrix_P, braiding_matrix_Q, r_matrix, RKey};
use crate::error::{Error, Result};
use crate::tower::{coset_modules, coset_p, longest_summand_index, FusionTable};

pub const CERTIFICATE_SCHEMA: &str = "cosetvir/certificate/v1";
pub const DEFAULT_MAX_K: u32 = 8;

/// A braiding entry whose nonvanishing the certificate needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Requirement {
    /// `(a, b, c)` for the entry `r(a, b, t, t)_{t, c}`; absent for supplementary entries.
    pub triple: Option<Triple>,
    pub key: RKey,
}

/// Entries `r(a, b, t, t)_{t, c}` over non-vacuum `a, b, c` with
/// `N(a,b,t) N(t,t,t) N(a,t,c) N(c,b,t) != 0`.
pub fn lambda_square_requirements(k: u32) -> Result<Vec<Requirement>> {
    let table = FusionTable::new(k)?;
    let t = longest_summand_index(k)?;
    let nv: Vec<u32> = table.modules.iter().copied().filter(|&i| i != 1).collect();
    let mut out = Vec::new();
    if !table.n(t, t, t) {
        return Ok(out);
    }
    for &a in &nv {
        for &b in &nv {
            for &c in &nv {
                if table.n(a, b, t) && table.n(a, t, c) && table.n(c, b, t) {
                    out.push(Requirement { triple: Some([a, b, c]), key: RKey::new(a, b, t, t, t, c) });
                }
            }
        }
    }
    Ok(out)
}

/// Additional entries checked for the first tower, where the two non-vacuum
/// modules are `(1,5)` of weight 34/7 and `(1,3)` of weight 9/7.
pub fn supplementary_requirements(k: u32) -> Vec<Requirement> {
    if k != 1 {
        return Vec::new();
    }
    [[5, 3, 3, 5, 3, 5], [3, 3, 5, 5, 3, 3], [5, 3, 3, 3, 3, 5], [3, 5, 3, 3, 5, 3]]
        .into_iter()
        .map(|v| Requirement { triple: None, key: RKey::from(v) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementRecord {
    pub requirement: Requirement,
    pub value: Cyclotomic,
    pub is_zero: bool,
    pub sign_re: Option<i8>,
    pub sign_im: Option<i8>,
    /// Set when the value was replaced by zero on request.
    pub zeroed: bool,
}

impl ElementRecord {
    pub fn to_json(&self) -> Value {
        let (re, im) = self.value.to_f64_pair();
        json!({
            "triple": self.requirement.triple,
            "key": self.requirement.key,
            "value": self.value,
            "approx": [format!("{re:.12}"), format!("{im:.12}")],
            "is_zero": self.is_zero,
            "sign_re": self.sign_re,
            "sign_im": self.sign_im,
            "zeroed": self.zeroed,
        })
    }
}

fn evaluate(p: u32, req: &Requirement, zeroed: bool, max_bits: u32, reasons: &parking_lot::Mutex<Vec<String>>) -> Result<ElementRecord> {
    let value = if zeroed { Cyclotomic::zero() } else { r_matrix(p, &req.key)? };
    let sign = |s: Result<i8>, part: &str| match s {
        Ok(v) => Some(v),
        Err(e) => {
            reasons.lock().push(format!("{part} sign of {} undecided: {e}", req.key));
            None
        }
    };
    let sign_re = sign(value.sign_real_within(max_bits), "real");
    let sign_im = sign(value.sign_imag_within(max_bits), "imaginary");
    Ok(ElementRecord { requirement: req.clone(), is_zero: value.is_zero(), value, sign_re, sign_im, zeroed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixCheck {
    pub externals: [u32; 4],
    pub size: usize,
    /// `Pᵀ Q = 1` with `P` the computed companion matrix.
    pub inverse_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    pub triple: Triple,
    /// `λ(a,b,t) λ(t,t,t) = λ(a,t,c) λ(b,t,c)`, hence `λ² = 1` after normalization.
    pub equation: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaReport {
    pub matrices: Vec<MatrixCheck>,
    pub conclusions: Vec<Conclusion>,
    pub failures: Vec<String>,
}

impl SigmaReport {
    pub fn consistent(&self) -> bool {
        self.failures.is_empty() && self.matrices.iter().all(|m| m.inverse_verified) && self.conclusions.iter().all(|c| c.holds)
    }
}

/// Checks the constant assignment `λ = 1` against every braiding matrix the
/// requirements live in, and which `λ² = 1` conclusions the elements support.
pub fn sigma_report(k: u32, elements: &[ElementRecord]) -> Result<SigmaReport> {
    let t = longest_summand_index(k)?;
    let table = FusionTable::new(k)?;
    let mut externals: Vec<[u32; 4]> = Vec::new();
    for e in elements {
        if let Some([a, b, _]) = e.requirement.triple {
            if !externals.contains(&[a, b, t, t]) {
                externals.push([a, b, t, t]);
            }
        }
    }
    let checks: Vec<std::result::Result<MatrixCheck, String>> = externals
        .par_iter()
        .map(|&[a4, a3, a2, a1]| {
            let q = braiding_matrix_Q(k, a4, a3, a2, a1).map_err(|e| format!("{:?}: {e}", [a4, a3, a2, a1]))?;
            let p = braiding_matrix_P(&q).map_err(|e| format!("inverting {:?}: {e}", [a4, a3, a2, a1]))?;
            let ok = p.entries.transpose().mul(&q.entries).map(|m| m.is_identity()).unwrap_or(false);
            Ok(MatrixCheck { externals: [a4, a3, a2, a1], size: q.rows.len(), inverse_verified: ok })
        })
        .collect();
    let mut matrices = Vec::new();
    let mut failures = Vec::new();
    for c in checks {
        match c {
            Ok(m) => matrices.push(m),
            Err(e) => failures.push(e),
        }
    }
    let conclusions = elements
        .iter()
        .filter_map(|e| e.requirement.triple.map(|tr| (tr, e)))
        .map(|([a, b, c], e)| {
            let fused = table.n(a, b, t) && table.n(t, t, t) && table.n(a, t, c) && table.n(b, t, c);
            Conclusion {
                triple: [a, b, c],
                equation: format!("λ({a},{b},{t}) λ({t},{t},{t}) = λ({a},{t},{c}) λ({b},{t},{c})"),
                holds: fused && !e.is_zero,
            }
        })
        .collect();
    Ok(SigmaReport { matrices, conclusions, failures })
}

/// True when every matrix inverts exactly and every requirement yields its conclusion.
pub fn verify_sigma_consistency(k: u32) -> Result<bool> {
    let reasons = parking_lot::Mutex::new(Vec::new());
    let p = coset_p(k);
    let elements = lambda_square_requirements(k)?
        .iter()
        .map(|r| evaluate(p, r, false, DEFAULT_MAX_PRECISION, &reasons))
        .collect::<Result<Vec<_>>>()?;
    Ok(sigma_report(k, &elements)?.consistent())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Unique,
    Inconclusive(Vec<String>),
}

impl Verdict {
    pub fn is_unique(&self) -> bool {
        matches!(self, Verdict::Unique)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Unique => "UNIQUE",
            Verdict::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub max_k: u32,
    pub max_precision_bits: u32,
    /// Required triples whose elements are replaced by zero.
    pub zeroed: Vec<Triple>,
    /// Required or supplementary elements, named by key, replaced by zero.
    pub zeroed_keys: Vec<RKey>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { max_k: DEFAULT_MAX_K, max_precision_bits: DEFAULT_MAX_PRECISION, zeroed: Vec::new(), zeroed_keys: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub k: u32,
    pub p: u32,
    pub modules: Vec<u32>,
    pub t: u32,
    pub propagation: std::result::Result<Propagation, Error>,
    pub elements: Vec<ElementRecord>,
    pub supplementary: Vec<ElementRecord>,
    pub sigma: SigmaReport,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn nonzero_count(&self) -> usize {
        self.elements.iter().filter(|e| !e.is_zero).count()
    }

    pub fn triples(&self) -> Vec<Triple> {
        self.elements.iter().filter_map(|e| e.requirement.triple).collect()
    }

    pub fn to_json(&self) -> Value {
        let (m, branch, derivation, lambda, rank_check, propagation_error) = match &self.propagation {
            Ok(p) => (
                json!(p.m),
                json!(p.branch),
                json!(p.log),
                json!(p.triples),
                json!(p.rank_check),
                Value::Null,
            ),
            Err(e) => (Value::Null, Value::Null, json!([]), json!([]), Value::Null, json!({"category": e.category(), "message": e.to_string()})),
        };
        let reasons = match &self.verdict {
            Verdict::Unique => Vec::new(),
            Verdict::Inconclusive(r) => r.clone(),
        };
        json!({
            "schema": CERTIFICATE_SCHEMA,
            "k": self.k,
            "p": self.p,
            "modules": self.modules,
            "t": self.t,
            "m": m,
            "branch": branch,
            "derivation": derivation,
            "propagation_error": propagation_error,
            "lambda": lambda,
            "rank_check": rank_check,
            "elements": self.elements.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
            "supplementary": self.supplementary.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
            "sigma": self.sigma,
            "verdict": self.verdict.label(),
            "reasons": reasons,
        })
    }
}

/// Assembles the certificate for tower `k`. Only bound and input errors are returned
/// as errors; every other failure is recorded as a reason for an inconclusive verdict.
pub fn certify(k: u32, opts: &CertifyOptions) -> Result<Certificate> {
    if k < 1 {
        return Err(Error::InvalidLabel("certificates need k >= 1".into()));
    }
    if k > opts.max_k {
        return Err(Error::BoundExceeded { k, max: opts.max_k });
    }
    if opts.max_precision_bits < 64 {
        return Err(Error::InvalidConfig(format!("max precision {} is below 64 bits", opts.max_precision_bits)));
    }
    let p = coset_p(k);
    let t = longest_summand_index(k)?;
    let requirements = lambda_square_requirements(k)?;
    for z in &opts.zeroed {
        if !requirements.iter().any(|r| r.triple == Some(*z)) {
            return Err(Error::InvalidLabel(format!("{z:?} is not a required triple for k = {k}")));
        }
    }

    let supplements = supplementary_requirements(k);
    for z in &opts.zeroed_keys {
        if !requirements.iter().chain(&supplements).any(|r| r.key == *z) {
            return Err(Error::InvalidLabel(format!("{z} is not a required element for k = {k}")));
        }
    }
    let is_zeroed = |r: &Requirement| r.triple.is_some_and(|tr| opts.zeroed.contains(&tr)) || opts.zeroed_keys.contains(&r.key);

    let propagation = propagate_nonvanishing(k);
    let notes = parking_lot::Mutex::new(Vec::new());
    let bits = opts.max_precision_bits;
    let elements: Vec<ElementRecord> = requirements
        .par_iter()
        .map(|r| evaluate(p, r, is_zeroed(r), bits, &notes))
        .collect::<Result<_>>()?;
    let supplementary: Vec<ElementRecord> =
        supplements.par_iter().map(|r| evaluate(p, r, is_zeroed(r), bits, &notes)).collect::<Result<_>>()?;
    let sigma = sigma_report(k, &elements)?;

    let mut reasons = Vec::new();
    match &propagation {
        Ok(prop) => {
            if !prop.all_nonzero() {
                reasons.push(format!("nonvanishing not established for {:?}", prop.undecided()));
            }
            if !prop.rank_check {
                reasons.push("rank rule violated by the final assignment".into());
            }
        }
        Err(e) => reasons.push(format!("propagation: {e}")),
    }
    for e in elements.iter().chain(&supplementary) {
        if e.is_zero {
            match e.requirement.triple {
                Some(tr) => reasons.push(format!("required element {tr:?} = {} vanishes", e.requirement.key)),
                None => reasons.push(format!("supplementary element {} vanishes", e.requirement.key)),
            }
        }
    }
    reasons.extend(sigma.failures.iter().cloned());
    for m in sigma.matrices.iter().filter(|m| !m.inverse_verified) {
        reasons.push(format!("matrix {:?} failed the inverse check", m.externals));
    }
    if elements.is_empty() {
        reasons.push("no required elements".into());
    }
    let mut notes = notes.into_inner();
    notes.sort();
    reasons.extend(notes);
    let verdict = if reasons.is_empty() { Verdict::Unique } else { Verdict::Inconclusive(reasons) };

    Ok(Certificate { k, p, modules: coset_modules(k), t, propagation, elements, supplementary, sigma, verdict })
}

/// Triples of `elements` grouped by the sign pattern `(sign_re, sign_im)`.
pub fn sign_table(cert: &Certificate) -> BTreeMap<(i8, i8), Vec<Triple>> {
    let mut out: BTreeMap<(i8, i8), Vec<Triple>> = BTreeMap::new();
    for e in &cert.elements {
        if let (Some(tr), Some(re), Some(im)) = (e.requirement.triple, e.sign_re, e.sign_im) {
            out.entry((re, im)).or_default().push(tr);
        }
    }
    out
}
