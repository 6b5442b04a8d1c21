//! k-compatibility, the index of incompatibility and compatibility stacks of
//! concrete observable sets.
//!
//! Observables `A₁,…,A_n` on `H` are k-compatible iff the symmetrized
//! observables `Ã_i = I^{⊗(k−1)} ⊙ A_i` on `H^{⊗k}` have a joint observable
//! with effects in `Sym(k, L(H))`. For `k ≥ n` the symmetrized product joint
//! is an explicit witness and no search is run.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{
    solve_with, Certificate, FeasibilityProblem, FeasibilityReport, SolverConfig, Verdict,
};
use crate::observable::{product_joint, Observable, ObservableSet};
use crate::operator::HermitianOperator;
use crate::stacks::{CompatibilityStack, Subset, MAX_VERTICES};
use crate::symmetry::{symmetrize_observable, symmetrizer};

/// Default cap on `d^k`.
pub const DEFAULT_DIM_CAP: usize = 16;

/// Decides whether `set` is k-compatible.
pub fn is_k_compatible(
    set: &ObservableSet,
    k: usize,
    config: &SolverConfig,
) -> Result<FeasibilityReport> {
    is_k_compatible_capped(set, k, config, DEFAULT_DIM_CAP)
}

pub fn is_k_compatible_capped(
    set: &ObservableSet,
    k: usize,
    config: &SolverConfig,
    dim_cap: usize,
) -> Result<FeasibilityReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("copy count must be >= 1".into()));
    }
    let d = set.space_dim();
    d.checked_pow(k as u32)
        .filter(|&dim| dim <= dim_cap)
        .ok_or(Error::CapExceeded {
            what: "multi-copy dimension d^k",
            value: d.saturating_pow(k as u32),
            cap: dim_cap,
        })?;
    if k >= set.len() {
        return Ok(FeasibilityReport::constructive(multi_copy_product_joint(
            set, k,
        )?));
    }
    let targets = set
        .members()
        .iter()
        .map(|a| symmetrize_observable(a, k))
        .collect::<Result<Vec<_>>>()?;
    solve_with(&FeasibilityProblem::symmetric(targets, k)?, config)
}

/// `Σ_k(A₁(x₁) ⊗ … ⊗ A_n(x_n) ⊗ I^{⊗(k−n)})` for `k ≥ n`: a symmetric joint
/// of the `Ã_i` on `H^{⊗k}`.
pub fn multi_copy_product_joint(set: &ObservableSet, k: usize) -> Result<Observable> {
    let n = set.len();
    if k < n {
        return Err(Error::InvalidArgument(format!(
            "product joint needs k >= {n}, got {k}"
        )));
    }
    let joint = product_joint(set)?;
    let pad = HermitianOperator::identity(set.space_dim().pow((k - n) as u32));
    let effects = joint
        .effects()
        .iter()
        .map(|e| Ok(symmetrizer(k, &e.tensor(&pad))?.into_op()))
        .collect::<Result<Vec<_>>>()?;
    Observable::joint(joint.factors(), effects)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub k: usize,
    pub report: FeasibilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub index: usize,
    /// Reports for `k = 1..=index`.
    pub per_k: Vec<LevelReport>,
}

/// Smallest `k` for which `set` is k-compatible, searched upwards from 1.
pub fn index_of_incompatibility(set: &ObservableSet, config: &SolverConfig) -> Result<IndexResult> {
    let mut per_k = Vec::new();
    for k in 1..=set.len() {
        let report = is_k_compatible(set, k, config)?;
        let verdict = report.verdict;
        per_k.push(LevelReport { k, report });
        match verdict {
            Verdict::Feasible => return Ok(IndexResult { index: k, per_k }),
            Verdict::Infeasible => {}
            Verdict::Undecided => {
                return Err(Error::Undecided(format!(
                    "k = {k}: residual {:.3e} after {} iterations",
                    per_k[k - 1].report.residual,
                    per_k[k - 1].report.iterations
                )))
            }
        }
    }
    unreachable!("k = n is always feasible")
}

/// Source of k-compatibility verdicts for subsets of a fixed observable set.
pub trait CompatibilityOracle: Sync {
    /// Verdict for the members `subset` (indices into the set) at `k` copies.
    fn decide(&self, set: &ObservableSet, subset: &[usize], k: usize) -> Result<FeasibilityReport>;
}

/// Decides every query numerically via [`is_k_compatible`].
#[derive(Debug, Clone, Default)]
pub struct SolverOracle {
    pub config: SolverConfig,
}

impl SolverOracle {
    pub fn new(config: SolverConfig) -> Self {
        SolverOracle { config }
    }
}

impl CompatibilityOracle for SolverOracle {
    fn decide(&self, set: &ObservableSet, subset: &[usize], k: usize) -> Result<FeasibilityReport> {
        is_k_compatible(&set.subset(subset)?, k, &self.config)
    }
}

/// Where a stack membership came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Decided by an oracle query.
    Solved,
    /// Forced by already known verdicts (subset monotonicity from below,
    /// subadditivity or `k ≥ |S|` from above, monotonicity in `k`).
    Implied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub k: usize,
    pub member: bool,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

/// Per-subset membership records, keyed by comma-joined member names.
pub type Provenance = BTreeMap<String, Vec<ProvenanceEntry>>;

#[derive(Debug, Clone)]
pub struct BuiltStack {
    pub stack: CompatibilityStack,
    pub provenance: Provenance,
    /// Number of oracle queries made.
    pub queries: usize,
}

impl BuiltStack {
    pub fn to_json(&self) -> serde_json::Value {
        self.stack.to_json(Some(
            serde_json::to_value(&self.provenance).expect("provenance json"),
        ))
    }
}

fn members(s: Subset) -> Vec<usize> {
    (0..32).filter(|&i| s >> i & 1 == 1).collect()
}

/// Index of every non-empty subset of `set`, queried in increasing subset
/// size. Known indices of smaller subsets bound each new one: it is at least
/// the index of any subset and at most `idx(A) + idx(B)` over splits; only the
/// levels strictly between those bounds reach the oracle. Subsets of equal
/// size are independent and run in parallel.
pub fn build_stack(set: &ObservableSet, oracle: &dyn CompatibilityOracle) -> Result<BuiltStack> {
    let n = set.len();
    if n > MAX_VERTICES {
        return Err(Error::InvalidArgument(format!(
            "stacks support at most {MAX_VERTICES} observables"
        )));
    }
    let full: Subset = (1 << n) - 1;
    let cache: RwLock<HashMap<Subset, usize>> = RwLock::new(HashMap::new());
    let mut provenance = Provenance::new();
    let mut queries = 0;
    for size in 1..=n {
        let layer: Vec<Subset> = (1..=full)
            .filter(|s| s.count_ones() as usize == size)
            .collect();
        let results = layer
            .par_iter()
            .map(|&s| {
                let (lo, hi) = {
                    let known = cache.read().expect("index cache");
                    bounds(s, &known)
                };
                let mut entries = Vec::new();
                let mut index = hi;
                let mut asked = 0;
                for k in 1..lo {
                    entries.push(ProvenanceEntry {
                        k,
                        member: false,
                        source: Source::Implied,
                        certificate: None,
                    });
                }
                for k in lo..hi {
                    asked += 1;
                    let report = oracle.decide(set, &members(s), k)?;
                    let entry = |member| ProvenanceEntry {
                        k,
                        member,
                        source: Source::Solved,
                        certificate: Some(report.certificate),
                    };
                    match report.verdict {
                        Verdict::Feasible => {
                            entries.push(entry(true));
                            index = k;
                            break;
                        }
                        Verdict::Infeasible => entries.push(entry(false)),
                        Verdict::Undecided => {
                            return Err(Error::Undecided(format!(
                                "subset {{{}}} at k = {k}: residual {:.3e}",
                                label(set, s),
                                report.residual
                            )))
                        }
                    }
                }
                let first_implied = entries.len() + 1;
                for k in first_implied..=n {
                    entries.push(ProvenanceEntry {
                        k,
                        member: true,
                        source: Source::Implied,
                        certificate: None,
                    });
                }
                Ok((s, index, entries, asked))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut known = cache.write().expect("index cache");
        for (s, index, entries, asked) in results {
            known.insert(s, index);
            provenance.insert(label(set, s), entries);
            queries += asked;
        }
    }
    let known = cache.into_inner().expect("index cache");
    let stack = CompatibilityStack::from_index(set.names().to_vec(), |s| known[&s])?;
    Ok(BuiltStack {
        stack,
        provenance,
        queries,
    })
}

fn label(set: &ObservableSet, s: Subset) -> String {
    members(s)
        .iter()
        .map(|&i| set.names()[i].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

/// `(lo, hi)` with `lo ≤ idx(s) ≤ hi` from the indices of proper subsets.
fn bounds(s: Subset, known: &HashMap<Subset, usize>) -> (usize, usize) {
    let size = s.count_ones() as usize;
    if size == 1 {
        return (1, 1);
    }
    let mut lo = 1;
    let mut hi = size;
    let mut a = (s - 1) & s;
    while a != 0 {
        let b = s & !a;
        lo = lo.max(known[&a]);
        hi = hi.min(known[&a] + known[&b]);
        a = (a - 1) & s;
    }
    (lo, hi)
}
