//! Finite-outcome observables (POVMs), joint observables on product outcome
//! sets, marginals and the constructive joints used for k-compatibility.
//!
//! Outcome labels are strings. A joint observable on `Ω₁×…×Ω_n` carries its
//! factor outcome lists and labels its outcomes `x₁|x₂|…|x_n` in row-major
//! order (last factor fastest).

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{tensor_all, HermitianOperator};

/// Positivity tolerance used by [`Observable::validate`].
pub const TOL_PSD: f64 = 1e-9;
/// Normalization tolerance (HS norm of `Σ A(x) − I`) used by [`Observable::validate`].
pub const TOL_NORM: f64 = 1e-9;

/// Separator between components of a product outcome label.
pub const PRODUCT_SEPARATOR: char = '|';

/// A map from a finite outcome set to effects on a common Hilbert space.
///
/// Construction only checks shapes. Positivity and normalization are reported
/// by [`Observable::validate`], since the type also carries candidate effect
/// lists coming out of numerical iterations.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObservableJson", into = "ObservableJson")]
pub struct Observable {
    space_dim: usize,
    outcomes: Vec<String>,
    effects: Vec<HermitianOperator>,
    factors: Option<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
struct ObservableJson {
    space_dim: usize,
    outcomes: Vec<String>,
    effects: Vec<HermitianOperator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<Vec<String>>>,
}

impl TryFrom<ObservableJson> for Observable {
    type Error = Error;
    fn try_from(json: ObservableJson) -> Result<Self> {
        match json.factors {
            Some(factors) => {
                let obs = Observable::joint(factors, json.effects)?;
                if obs.outcomes != json.outcomes {
                    return Err(Error::Parse(
                        "joint outcome labels do not match the factor structure".into(),
                    ));
                }
                obs.check_space_dim(json.space_dim)?;
                Ok(obs)
            }
            None => {
                let obs = Observable::new(json.outcomes, json.effects)?;
                obs.check_space_dim(json.space_dim)?;
                Ok(obs)
            }
        }
    }
}

impl From<Observable> for ObservableJson {
    fn from(obs: Observable) -> Self {
        ObservableJson {
            space_dim: obs.space_dim,
            outcomes: obs.outcomes,
            effects: obs.effects,
            factors: obs.factors,
        }
    }
}

impl Observable {
    pub fn new<S: Into<String>>(
        outcomes: impl IntoIterator<Item = S>,
        effects: Vec<HermitianOperator>,
    ) -> Result<Self> {
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        check_labels(&outcomes)?;
        let space_dim = check_effects(outcomes.len(), &effects)?;
        Ok(Self {
            space_dim,
            outcomes,
            effects,
            factors: None,
        })
    }

    /// Joint observable on the product of `factors`, with `effects` listed in
    /// row-major order of the product.
    pub fn joint(factors: Vec<Vec<String>>, effects: Vec<HermitianOperator>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidObservable(
                "joint needs at least one factor".into(),
            ));
        }
        for f in &factors {
            check_labels(f)?;
        }
        let outcomes = product_labels(&factors);
        let space_dim = check_effects(outcomes.len(), &effects)?;
        Ok(Self {
            space_dim,
            outcomes,
            effects,
            factors: Some(factors),
        })
    }

    fn check_space_dim(&self, declared: usize) -> Result<()> {
        if declared != self.space_dim {
            return Err(Error::DimensionMismatch {
                expected: declared,
                found: self.space_dim,
            });
        }
        Ok(())
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Factor outcome lists; a plain observable is its own single factor.
    pub fn factors(&self) -> Vec<Vec<String>> {
        match &self.factors {
            Some(f) => f.clone(),
            None => vec![self.outcomes.clone()],
        }
    }

    pub fn factor_count(&self) -> usize {
        self.factors.as_ref().map_or(1, Vec::len)
    }

    pub fn is_joint(&self) -> bool {
        self.factors.is_some()
    }

    pub fn position(&self, outcome: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o == outcome)
            .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))
    }

    pub fn effect(&self, outcome: &str) -> Result<&HermitianOperator> {
        Ok(&self.effects[self.position(outcome)?])
    }

    /// Same outcomes and factor structure with new effects.
    pub fn with_effects(&self, effects: Vec<HermitianOperator>) -> Result<Self> {
        let space_dim = check_effects(self.outcomes.len(), &effects)?;
        Ok(Self {
            space_dim,
            outcomes: self.outcomes.clone(),
            effects,
            factors: self.factors.clone(),
        })
    }

    /// Applies `f` to every effect, keeping labels.
    pub fn map_effects(&self, f: impl Fn(&HermitianOperator) -> HermitianOperator) -> Result<Self> {
        self.with_effects(self.effects.iter().map(f).collect())
    }

    /// `Σ_x A(x)`.
    pub fn effect_sum(&self) -> HermitianOperator {
        sum_ops(self.space_dim, &self.effects)
    }

    /// Checks positivity and normalization.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (label, effect) in self.outcomes.iter().zip(&self.effects) {
            let min = effect.min_eigenvalue();
            if min < -TOL_PSD {
                violations.push(Violation::NotPositive {
                    outcome: label.clone(),
                    min_eigenvalue: min,
                });
            }
        }
        let deviation = self
            .effect_sum()
            .hs_distance(&HermitianOperator::identity(self.space_dim));
        if deviation > TOL_NORM {
            violations.push(Violation::NotNormalized { deviation });
        }
        ValidationReport { violations }
    }

    /// `A(X) = Σ_{x∈X} A(x)`.
    pub fn effect_of_subset<'a>(
        &self,
        subset: impl IntoIterator<Item = &'a str>,
    ) -> Result<HermitianOperator> {
        let mut seen = HashSet::new();
        let mut acc = HermitianOperator::zeros(self.space_dim);
        for label in subset {
            let idx = self.position(label)?;
            if seen.insert(idx) {
                acc += &self.effects[idx];
            }
        }
        Ok(acc)
    }

    /// The `i`-th marginal of a joint observable (zero-based).
    pub fn marginal(&self, i: usize) -> Result<Observable> {
        let factors = self.factors();
        let n = factors.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let target = &factors[i];
        let mut effects = vec![HermitianOperator::zeros(self.space_dim); target.len()];
        for (label, effect) in self.outcomes.iter().zip(&self.effects) {
            let parts: Vec<&str> = if n == 1 {
                vec![label.as_str()]
            } else {
                label.split(PRODUCT_SEPARATOR).collect()
            };
            if parts.len() != n {
                return Err(Error::InvalidObservable(format!(
                    "outcome `{label}` does not have {n} components"
                )));
            }
            let slot = target
                .iter()
                .position(|x| x == parts[i])
                .ok_or_else(|| Error::UnknownOutcome(parts[i].to_string()))?;
            effects[slot] += effect;
        }
        Observable::new(target.clone(), effects)
    }

    /// All marginals, in factor order.
    pub fn marginals(&self) -> Result<Vec<Observable>> {
        (0..self.factor_count()).map(|i| self.marginal(i)).collect()
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("space_dim", &self.space_dim)
            .field("outcomes", &self.outcomes)
            .finish_non_exhaustive()
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidObservable("outcome set is empty".into()));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if l.contains(PRODUCT_SEPARATOR) {
            return Err(Error::InvalidObservable(format!(
                "outcome `{l}` contains the reserved separator `{PRODUCT_SEPARATOR}`"
            )));
        }
        if !seen.insert(l) {
            return Err(Error::InvalidObservable(format!("duplicate outcome `{l}`")));
        }
    }
    Ok(())
}

fn check_effects(count: usize, effects: &[HermitianOperator]) -> Result<usize> {
    if effects.len() != count {
        return Err(Error::InvalidObservable(format!(
            "{} outcomes but {} effects",
            count,
            effects.len()
        )));
    }
    let dim = effects[0].dim();
    for e in effects {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: e.dim(),
            });
        }
    }
    Ok(dim)
}

pub(crate) fn sum_ops<'a>(
    dim: usize,
    ops: impl IntoIterator<Item = &'a HermitianOperator>,
) -> HermitianOperator {
    let mut acc = HermitianOperator::zeros(dim);
    for op in ops {
        acc += op;
    }
    acc
}

/// Row-major product labels `x₁|…|x_n` (a single factor keeps its labels).
pub fn product_labels(factors: &[Vec<String>]) -> Vec<String> {
    if factors.len() == 1 {
        return factors[0].clone();
    }
    product_indices(factors.iter().map(Vec::len))
        .into_iter()
        .map(|idx| {
            idx.iter()
                .enumerate()
                .map(|(f, &i)| factors[f][i].as_str())
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect()
}

/// Row-major enumeration of multi-indices for the given factor sizes.
pub fn product_indices(sizes: impl IntoIterator<Item = usize>) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = sizes.into_iter().collect();
    let mut out = vec![Vec::new()];
    for &size in &sizes {
        let mut next = Vec::with_capacity(out.len() * size);
        for prefix in &out {
            for i in 0..size {
                let mut p = prefix.clone();
                p.push(i);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// One violated observable condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotPositive {
        outcome: String,
        min_eigenvalue: f64,
    },
    NotNormalized {
        deviation: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotPositive {
                outcome,
                min_eigenvalue,
            } => write!(f, "effect `{outcome}` has eigenvalue {min_eigenvalue:e}"),
            Violation::NotNormalized { deviation } => {
                write!(f, "effects sum to identity only within {deviation:e}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Ordered, non-empty collection of observables on a common Hilbert space,
/// each with a display name.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    names: Vec<String>,
    members: Vec<Observable>,
}

impl ObservableSet {
    /// Names default to `A`, `B`, `C`, ….
    pub fn new(members: Vec<Observable>) -> Result<Self> {
        let names = default_names(members.len());
        Self::named(names, members)
    }

    pub fn named<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        members: Vec<Observable>,
    ) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if members.is_empty() {
            return Err(Error::InvalidArgument(
                "observable set must be non-empty".into(),
            ));
        }
        if names.len() != members.len() {
            return Err(Error::InvalidArgument(format!(
                "{} names for {} observables",
                names.len(),
                members.len()
            )));
        }
        let d = members[0].space_dim();
        for m in &members {
            if m.space_dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.space_dim(),
                });
            }
        }
        Ok(Self { names, members })
    }

    pub fn members(&self) -> &[Observable] {
        &self.members
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn space_dim(&self) -> usize {
        self.members[0].space_dim()
    }

    /// Sub-collection picked by member indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<ObservableSet> {
        let mut names = Vec::with_capacity(indices.len());
        let mut members = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                });
            }
            names.push(self.names[i].clone());
            members.push(self.members[i].clone());
        }
        ObservableSet::named(names, members)
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'A' + i as u8) as char).to_string()
            } else {
                format!("V{i}")
            }
        })
        .collect()
}

/// Wire format for observable sets: `{"names": [...], "observables": [...]}`
/// (names optional); a bare array of observables is also accepted.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ObservableSetJson {
    Named {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
        observables: Vec<Observable>,
    },
    Bare(Vec<Observable>),
}

impl Serialize for ObservableSet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ObservableSetJson::Named {
            names: Some(self.names.clone()),
            observables: self.members.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ObservableSet {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let json = ObservableSetJson::deserialize(deserializer)?;
        let set = match json {
            ObservableSetJson::Named {
                names: Some(names),
                observables,
            } => ObservableSet::named(names, observables),
            ObservableSetJson::Named {
                names: None,
                observables,
            }
            | ObservableSetJson::Bare(observables) => ObservableSet::new(observables),
        };
        set.map_err(serde::de::Error::custom)
    }
}

/// `G(x₁,…,x_n) = A₁(x₁) ⊗ … ⊗ A_n(x_n)` on `H^{⊗n}`; a one-member set
/// yields the member itself.
pub fn product_joint(set: &ObservableSet) -> Result<Observable> {
    let members = set.members();
    if members.len() == 1 {
        return Ok(members[0].clone());
    }
    let factors: Vec<Vec<String>> = members.iter().map(|m| m.outcomes().to_vec()).collect();
    let effects = product_indices(members.iter().map(Observable::len))
        .into_iter()
        .map(|idx| {
            tensor_all(
                idx.iter()
                    .enumerate()
                    .map(|(f, &i)| &members[f].effects()[i]),
            )
        })
        .collect();
    Observable::joint(factors, effects)
}

/// Effect-wise convex combination of observables sharing outcomes and dimension.
pub fn mix(observables: &[Observable], weights: &[f64]) -> Result<Observable> {
    if observables.is_empty() || observables.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} observables with {} weights",
            observables.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(Error::InvalidArgument(
            "weights must be non-negative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "weights sum to {total}, not 1"
        )));
    }
    let first = &observables[0];
    for o in &observables[1..] {
        if o.outcomes() != first.outcomes() {
            return Err(Error::InvalidArgument(
                "observables have different outcome sets".into(),
            ));
        }
        if o.space_dim() != first.space_dim() {
            return Err(Error::DimensionMismatch {
                expected: first.space_dim(),
                found: o.space_dim(),
            });
        }
    }
    let effects = (0..first.len())
        .map(|x| {
            let mut acc = HermitianOperator::zeros(first.space_dim());
            for (o, &w) in observables.iter().zip(weights) {
                acc += &o.effects()[x].scale(w);
            }
            acc
        })
        .collect();
    first.with_effects(effects)
}

/// `G(x₁,…,x_n) = G₁(x₁,…,x_m) ⊗ G₃(x_{m+1},…,x_n)`: joins a k₁-copy joint and
/// a k₂-copy joint of disjoint sets into a (k₁+k₂)-copy joint of their union.
pub fn combine_disjoint_joints(g1: &Observable, g3: &Observable) -> Result<Observable> {
    let mut factors = g1.factors();
    factors.extend(g3.factors());
    let mut effects = Vec::with_capacity(g1.len() * g3.len());
    for a in g1.effects() {
        for b in g3.effects() {
            effects.push(a.tensor(b));
        }
    }
    Observable::joint(factors, effects)
}
