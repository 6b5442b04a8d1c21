//! Joint-observable feasibility: given targets `B₁,…,B_n` on a common space,
//! look for an observable `G` on `Ω₁×…×Ω_n` whose marginals are the targets.
//!
//! The search runs Dykstra's alternating projections between the product of
//! PSD cones and the affine set of effect tuples with the prescribed
//! marginals. Effects are stored as real coordinates over an HS-orthonormal
//! basis of Hermitian operators; in symmetric mode the basis spans
//! `Sym(k, L(H))`, so every iterate is permutation invariant by construction.
//!
//! The affine constraints act identically on every coordinate, so their
//! projector is a small `E×E` matrix (`E` = joint outcome count) assembled
//! once per problem.
//!
//! Verdicts are three-valued. `Feasible` carries a witness that has been
//! re-validated from scratch. `Infeasible` means the residual stalled above
//! [`SolverConfig::tol_infeas`]; alternating projections give no dual
//! certificate, so this is a heuristic label.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observable::{product_indices, Observable};
use crate::operator::{traceless_basis, HermitianOperator, Matrix};
use crate::symmetry::{integer_root, sym_basis, symmetrizer, TOL_SYM};

/// Default iteration budget.
pub const DEFAULT_BUDGET: usize = 20_000;
/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "KCOMPAT_BUDGET";

/// Solver tolerances and limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub budget: usize,
    /// Cap on the joint outcome count `∏|Ω_i|`.
    pub max_outcomes: usize,
    /// Residual below which a witness is extracted and validated.
    pub tol_probe: f64,
    /// Per-effect HS tolerance on marginal equalities for a witness.
    pub tol_marg: f64,
    /// Residual floor for an `Infeasible` verdict.
    pub tol_infeas: f64,
    /// Iterations between stagnation checks.
    pub stagnation_window: usize,
    /// Relative residual decrease per window below which the run has stalled.
    pub stagnation_rel: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            budget: DEFAULT_BUDGET,
            max_outcomes: 64,
            tol_probe: 1e-8,
            tol_marg: 1e-7,
            tol_infeas: 1e-4,
            stagnation_window: 500,
            stagnation_rel: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn with_budget(budget: usize) -> Self {
        SolverConfig {
            budget,
            ..Default::default()
        }
    }

    /// Defaults, with the budget taken from `KCOMPAT_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        let mut config = SolverConfig::default();
        if let Ok(raw) = std::env::var(BUDGET_ENV) {
            config.budget = raw.trim().parse().map_err(|_| {
                Error::Parse(format!("{BUDGET_ENV}={raw:?} is not an iteration count"))
            })?;
        }
        Ok(config)
    }
}

/// Targets whose joint observable is sought. With `copies = Some(k)` the
/// targets act on `H^{⊗k}` and the joint is restricted to `Sym(k, L(H))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityProblem {
    space_dim: usize,
    targets: Vec<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    copies: Option<usize>,
}

impl FeasibilityProblem {
    pub fn new(targets: Vec<Observable>) -> Result<Self> {
        let first = targets.first().ok_or_else(|| {
            Error::InvalidArgument("feasibility problem needs at least one target".into())
        })?;
        let space_dim = first.space_dim();
        for t in &targets {
            if t.space_dim() != space_dim {
                return Err(Error::DimensionMismatch {
                    expected: space_dim,
                    found: t.space_dim(),
                });
            }
        }
        Ok(FeasibilityProblem {
            space_dim,
            targets,
            copies: None,
        })
    }

    /// Targets on `H^{⊗k}`, joint restricted to symmetric effects.
    pub fn symmetric(targets: Vec<Observable>, k: usize) -> Result<Self> {
        let mut problem = Self::new(targets)?;
        problem.set_copies(k)?;
        Ok(problem)
    }

    fn set_copies(&mut self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::InvalidArgument("copy count must be >= 1".into()));
        }
        integer_root(self.space_dim, k).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "space dimension {} is not a {k}-th power",
                self.space_dim
            ))
        })?;
        self.copies = Some(k);
        Ok(())
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn targets(&self) -> &[Observable] {
        &self.targets
    }

    pub fn copies(&self) -> Option<usize> {
        self.copies
    }

    pub fn outcome_count(&self) -> usize {
        self.targets.iter().map(Observable::len).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Feasible => "Feasible",
            Verdict::Infeasible => "Infeasible",
            Verdict::Undecided => "Undecided",
        };
        f.write_str(s)
    }
}

/// What backs a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// A re-validated numerical witness.
    Witness,
    /// A closed-form joint observable.
    Constructive,
    /// Residual stagnation above the infeasibility floor.
    Stagnation,
    /// Closed-form criterion.
    Analytic,
    /// Budget exhausted without a decision.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub residual: f64,
    pub iterations: usize,
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Observable>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    /// A `Feasible` report backed by a closed-form joint observable.
    pub fn constructive(witness: Observable) -> Self {
        FeasibilityReport {
            verdict: Verdict::Feasible,
            residual: 0.0,
            iterations: 0,
            certificate: Certificate::Constructive,
            witness: Some(witness),
        }
    }

    /// A verdict from a closed-form criterion, without witness.
    pub fn analytic(feasible: bool) -> Self {
        FeasibilityReport {
            verdict: if feasible {
                Verdict::Feasible
            } else {
                Verdict::Infeasible
            },
            residual: 0.0,
            iterations: 0,
            certificate: Certificate::Analytic,
            witness: None,
        }
    }
}

/// Plain joint-observable search.
pub fn solve(problem: &FeasibilityProblem, budget: usize) -> Result<FeasibilityReport> {
    let mut plain = problem.clone();
    plain.copies = None;
    solve_with(&plain, &SolverConfig::with_budget(budget))
}

/// Joint-observable search restricted to `Sym(k, L(H))`.
pub fn solve_symmetric(
    problem: &FeasibilityProblem,
    k: usize,
    budget: usize,
) -> Result<FeasibilityReport> {
    let mut sym = problem.clone();
    sym.set_copies(k)?;
    solve_with(&sym, &SolverConfig::with_budget(budget))
}

/// Runs the solver in the mode recorded on the problem.
pub fn solve_with(
    problem: &FeasibilityProblem,
    config: &SolverConfig,
) -> Result<FeasibilityReport> {
    Solver::new(problem, config)?.run()
}

/// Independent check of a candidate joint: positivity, normalization and
/// every marginal within `tol_marg`.
pub fn check_witness(
    problem: &FeasibilityProblem,
    witness: &Observable,
    tol_marg: f64,
) -> Result<bool> {
    if !witness.validate().is_ok() || witness.factor_count() != problem.targets.len() {
        return Ok(false);
    }
    for (i, target) in problem.targets.iter().enumerate() {
        let marginal = witness.marginal(i)?;
        if marginal.outcomes() != target.outcomes() {
            return Ok(false);
        }
        for (m, t) in marginal.effects().iter().zip(target.effects()) {
            if m.hs_distance(t) > tol_marg {
                return Ok(false);
            }
        }
    }
    if let Some(k) = problem.copies {
        for e in witness.effects() {
            if symmetrizer(k, e)?.op().hs_distance(e) > TOL_SYM * 10.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct Basis {
    dim: usize,
    elements: Vec<Matrix>,
}

impl Basis {
    fn new(problem: &FeasibilityProblem) -> Result<Self> {
        let dim = problem.space_dim;
        let ops: Vec<HermitianOperator> = match problem.copies {
            Some(k) if k > 1 => {
                let d = integer_root(dim, k).expect("checked at construction");
                sym_basis(d, k)?.into_iter().map(|s| s.into_op()).collect()
            }
            _ => {
                let mut ops =
                    vec![HermitianOperator::identity(dim).scale(1.0 / (dim as f64).sqrt())];
                if dim >= 2 {
                    ops.extend(traceless_basis(dim)?);
                }
                ops
            }
        };
        Ok(Basis {
            dim,
            elements: ops
                .into_iter()
                .map(HermitianOperator::into_matrix)
                .collect(),
        })
    }

    fn len(&self) -> usize {
        self.elements.len()
    }

    fn coords(&self, a: &HermitianOperator, out: &mut [f64]) {
        let entries = a.matrix().as_slice();
        for (c, b) in out.iter_mut().zip(&self.elements) {
            *c = b
                .as_slice()
                .iter()
                .zip(entries)
                .map(|(x, y)| (x.conj() * y).re)
                .sum();
        }
    }

    fn operator(&self, coords: &[f64]) -> HermitianOperator {
        let mut m = Matrix::zeros(self.dim);
        for (&c, b) in coords.iter().zip(&self.elements) {
            if c != 0.0 {
                m = &m + &b.scale(c.into());
            }
        }
        HermitianOperator::symmetrized(m)
    }
}

struct Solver<'a> {
    problem: &'a FeasibilityProblem,
    config: &'a SolverConfig,
    basis: Basis,
    outcomes: usize,
    /// Projector onto the row space of the marginal constraint matrix.
    row_projector: Vec<f64>,
    /// A point of the affine set (the classical joint), coordinate form.
    anchor: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a FeasibilityProblem, config: &'a SolverConfig) -> Result<Self> {
        let outcomes = problem.outcome_count();
        if outcomes > config.max_outcomes {
            return Err(Error::CapExceeded {
                what: "joint outcome count",
                value: outcomes,
                cap: config.max_outcomes,
            });
        }
        for t in &problem.targets {
            let report = t.validate();
            if !report.is_ok() {
                return Err(Error::InvalidObservable(
                    report
                        .violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; "),
                ));
            }
            if let Some(k) = problem.copies {
                for e in t.effects() {
                    if symmetrizer(k, e)?.op().hs_distance(e) > TOL_SYM {
                        return Err(Error::InvalidArgument(
                            "symmetric mode needs targets in Sym(k, L(H))".into(),
                        ));
                    }
                }
            }
        }
        let basis = Basis::new(problem)?;
        let sizes: Vec<usize> = problem.targets.iter().map(Observable::len).collect();
        let joint = product_indices(sizes.iter().copied());
        let row_projector = row_space_projector(&constraint_rows(&sizes, &joint), outcomes);
        let anchor = classical_joint(problem, &sizes, &joint, &basis);
        Ok(Solver {
            problem,
            config,
            basis,
            outcomes,
            row_projector,
            anchor,
        })
    }

    fn project_affine(&self, x: &[f64], out: &mut [f64]) {
        let m = self.basis.len();
        let e = self.outcomes;
        let mut diff = vec![0.0; e];
        for c in 0..m {
            for o in 0..e {
                diff[o] = x[o * m + c] - self.anchor[o * m + c];
            }
            for o in 0..e {
                let row = &self.row_projector[o * e..(o + 1) * e];
                let p: f64 = row.iter().zip(&diff).map(|(a, b)| a * b).sum();
                out[o * m + c] = x[o * m + c] - p;
            }
        }
    }

    fn project_cone(&self, x: &[f64], out: &mut [f64]) {
        let m = self.basis.len();
        for o in 0..self.outcomes {
            let op = self.basis.operator(&x[o * m..(o + 1) * m]).psd_project();
            self.basis.coords(&op, &mut out[o * m..(o + 1) * m]);
        }
    }

    fn run(&self) -> Result<FeasibilityReport> {
        let m = self.basis.len();
        let e = self.outcomes;
        let mut x = vec![0.0; e * m];
        let init = HermitianOperator::identity(self.basis.dim).scale(1.0 / e as f64);
        for o in 0..e {
            self.basis.coords(&init, &mut x[o * m..(o + 1) * m]);
        }
        let mut y = vec![0.0; e * m];
        let mut z = vec![0.0; e * m];
        let mut q = vec![0.0; e * m];
        let mut window_start = f64::INFINITY;
        let mut residual = f64::INFINITY;
        for it in 0..self.config.budget {
            self.project_affine(&x, &mut y);
            residual = distance(&x, &y);
            if residual < self.config.tol_probe {
                if let Some(witness) = self.extract(&x)? {
                    return Ok(FeasibilityReport {
                        verdict: Verdict::Feasible,
                        residual,
                        iterations: it,
                        certificate: Certificate::Witness,
                        witness: Some(witness),
                    });
                }
            }
            if it > 0 && it % self.config.stagnation_window == 0 {
                let decrease = (window_start - residual) / window_start;
                if residual > self.config.tol_infeas && decrease < self.config.stagnation_rel {
                    return Ok(FeasibilityReport {
                        verdict: Verdict::Infeasible,
                        residual,
                        iterations: it,
                        certificate: Certificate::Stagnation,
                        witness: None,
                    });
                }
                window_start = residual;
            } else if it == 0 {
                window_start = residual;
            }
            for i in 0..z.len() {
                z[i] = y[i] + q[i];
            }
            self.project_cone(&z, &mut x);
            for i in 0..q.len() {
                q[i] = z[i] - x[i];
            }
        }
        Ok(FeasibilityReport {
            verdict: Verdict::Undecided,
            residual,
            iterations: self.config.budget,
            certificate: Certificate::Budget,
            witness: None,
        })
    }

    /// Renormalizes a PSD iterate to an exact POVM, `W = S^{-1/2} X S^{-1/2}`
    /// with `S = Σ X`, and validates it.
    fn extract(&self, x: &[f64]) -> Result<Option<Observable>> {
        let m = self.basis.len();
        let effects: Vec<HermitianOperator> = (0..self.outcomes)
            .map(|o| self.basis.operator(&x[o * m..(o + 1) * m]).psd_project())
            .collect();
        let mut sum = HermitianOperator::zeros(self.basis.dim);
        for eff in &effects {
            sum += eff;
        }
        if sum.min_eigenvalue() <= 0.0 {
            return Ok(None);
        }
        let root = sum.spectral_map(|v| 1.0 / v.sqrt()).into_matrix();
        let mut normalized = Vec::with_capacity(effects.len());
        for eff in &effects {
            let w = HermitianOperator::symmetrized(eff.matrix().conjugate_by(&root));
            normalized.push(match self.problem.copies {
                Some(k) if k > 1 => symmetrizer(k, &w)?.into_op(),
                _ => w,
            });
        }
        let factors = self
            .problem
            .targets
            .iter()
            .map(|t| t.outcomes().to_vec())
            .collect();
        let witness = Observable::joint(factors, normalized)?;
        Ok(check_witness(self.problem, &witness, self.config.tol_marg)?.then_some(witness))
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One 0/1 row per `(target i, outcome x)`: the joint outcomes whose `i`-th
/// component is `x`.
fn constraint_rows(sizes: &[usize], joint: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for (i, &size) in sizes.iter().enumerate() {
        for x in 0..size {
            rows.push(
                joint
                    .iter()
                    .map(|o| if o[i] == x { 1.0 } else { 0.0 })
                    .collect(),
            );
        }
    }
    rows
}

/// `QᵀQ` for an orthonormal basis `Q` of the span of `rows` (Gram–Schmidt).
fn row_space_projector(rows: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for _ in 0..2 {
            for u in &q {
                let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-10 {
            q.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    let mut p = vec![0.0; n * n];
    for u in &q {
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] += u[i] * u[j];
            }
        }
    }
    p
}

/// `G₀(o) = Σ_i B_i(o_i)/∏_{j≠i}|Ω_j| − (n−1)I/∏|Ω|`, which has the target
/// marginals (though it need not be positive).
fn classical_joint(
    problem: &FeasibilityProblem,
    sizes: &[usize],
    joint: &[Vec<usize>],
    basis: &Basis,
) -> Vec<f64> {
    let n = sizes.len();
    let total: usize = sizes.iter().product();
    let m = basis.len();
    let shift =
        HermitianOperator::identity(problem.space_dim).scale((n as f64 - 1.0) / total as f64);
    let mut out = vec![0.0; joint.len() * m];
    for (o, idx) in joint.iter().enumerate() {
        let mut acc = -&shift;
        for (i, t) in problem.targets.iter().enumerate() {
            acc += &t.effects()[idx[i]].scale(sizes[i] as f64 / total as f64);
        }
        basis.coords(&acc, &mut out[o * m..(o + 1) * m]);
    }
    out
}

/// Outcome of [`threshold_bisect`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Midpoint of the final bracket.
    pub threshold: f64,
    /// Final `[feasible, infeasible]` bracket.
    pub bracket: (f64, f64),
    pub evaluations: Vec<Evaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub t: f64,
    pub verdict: Verdict,
    pub iterations: usize,
    pub residual: f64,
}

impl Threshold {
    pub fn total_iterations(&self) -> usize {
        self.evaluations.iter().map(|e| e.iterations).sum()
    }
}

/// Locates the feasible/infeasible transition of `family` on `[lo, hi]` by
/// bisection on solver verdicts, until the bracket is at most `2·tol` wide.
///
/// The family must be feasible at `lo` and infeasible at `hi`. An `Undecided`
/// verdict is retried once with twice the budget; a second `Undecided`
/// aborts.
pub fn threshold_bisect<F>(
    family: F,
    lo: f64,
    hi: f64,
    tol: f64,
    config: &SolverConfig,
) -> Result<Threshold>
where
    F: Fn(f64) -> Result<FeasibilityProblem>,
{
    if tol.is_nan() || tol < 1e-4 {
        return Err(Error::InvalidArgument(format!(
            "bisection tolerance {tol} below 1e-4"
        )));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "empty bracket [{lo}, {hi}]"
        )));
    }
    let mut evaluations = Vec::new();
    let mut decide = |t: f64| -> Result<Verdict> {
        let problem = family(t)?;
        let mut report = solve_with(&problem, config)?;
        let mut iterations = report.iterations;
        if report.verdict == Verdict::Undecided {
            let retry = SolverConfig {
                budget: config.budget * 2,
                ..config.clone()
            };
            report = solve_with(&problem, &retry)?;
            iterations += report.iterations;
        }
        evaluations.push(Evaluation {
            t,
            verdict: report.verdict,
            iterations,
            residual: report.residual,
        });
        match report.verdict {
            Verdict::Undecided => Err(Error::Undecided(format!(
                "t = {t}: residual {:.3e} after retry with budget {}",
                report.residual,
                config.budget * 2
            ))),
            v => Ok(v),
        }
    };
    let at_lo = decide(lo)?;
    let at_hi = decide(hi)?;
    if at_lo != Verdict::Feasible || at_hi != Verdict::Infeasible {
        return Err(Error::NonMonotone {
            lo,
            hi,
            detail: format!("{at_lo} at lo, {at_hi} at hi"),
        });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 2.0 * tol {
        let mid = 0.5 * (a + b);
        match decide(mid)? {
            Verdict::Feasible => a = mid,
            _ => b = mid,
        }
    }
    Ok(Threshold {
        threshold: 0.5 * (a + b),
        bracket: (a, b),
        evaluations,
    })
}
