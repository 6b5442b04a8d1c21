//! Closed-form qubit results for the orthogonal noisy spin observables
//! `X_a(±1) = ½(I ± aσx)`, `Y_b`, `Z_c`.
//!
//! - pairwise and triple compatibility criteria,
//! - the two-copy joint built by randomly measuring one sharp spin on the
//!   first copy and a pairwise joint of the other two on the second,
//! - the two-parameter family of symmetric joints on `{±1}³` covariant under
//!   the octahedral rotations, its `M/P/Q` operator algebra, and the resulting
//!   two-copy threshold `√3/2`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compat::{is_k_compatible, multi_copy_product_joint, CompatibilityOracle};
use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityReport, SolverConfig};
use crate::observable::{Observable, ObservableSet};
use crate::operator::{sigma_x, sigma_y, sigma_z, HermitianOperator, Matrix};

/// Outcome labels of a spin observable, `+1` first.
pub const SPIN_OUTCOMES: [&str; 2] = ["+1", "-1"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn sigma(self) -> HermitianOperator {
        match self {
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(Error::Parse(format!("unknown axis `{s}`"))),
        }
    }
}

fn check_unit(name: &str, t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} = {t} outside [0, 1]"
        )))
    }
}

/// `½(I ± t σ_axis)` with outcomes `+1`, `-1`.
pub fn noisy_spin(axis: Axis, t: f64) -> Result<Observable> {
    check_unit("noise parameter", t)?;
    Ok(spin_observable(&axis.sigma(), t))
}

/// `½(I ± t·s)` for any traceless `s` with `s² = I`; no range check.
fn spin_observable(s: &HermitianOperator, t: f64) -> Observable {
    let i = HermitianOperator::identity(2);
    Observable::new(
        SPIN_OUTCOMES,
        vec![(&i + &s.scale(t)).scale(0.5), (&i - &s.scale(t)).scale(0.5)],
    )
    .expect("two distinct labels")
}

/// Slack on the closed-form inequalities, so exact boundary points such as
/// `(4/5, 3/5)` survive rounding.
pub const TOL_BOUNDARY: f64 = 1e-12;

/// `X_a` and `Y_b` are compatible iff `a² + b² ≤ 1`.
pub fn busch_pair_compatible(a: f64, b: f64) -> Result<bool> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    Ok(a * a + b * b <= 1.0 + TOL_BOUNDARY)
}

/// `X_a`, `Y_b` and `Z_c` are compatible iff `a² + b² + c² ≤ 1`.
pub fn busch_triple_compatible(a: f64, b: f64, c: f64) -> Result<bool> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    check_unit("c", c)?;
    Ok(a * a + b * b + c * c <= 1.0 + TOL_BOUNDARY)
}

/// Noise parameters `(a, b, c)` of `X_a`, `Y_b`, `Z_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisySpinTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl NoisySpinTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        check_unit("a", a)?;
        check_unit("b", b)?;
        check_unit("c", c)?;
        Ok(NoisySpinTriple { a, b, c })
    }

    pub fn uniform(a: f64) -> Result<Self> {
        Self::new(a, a, a)
    }

    pub fn params(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// `{X_a, Y_b, Z_c}` named `X`, `Y`, `Z`.
    pub fn observables(&self) -> ObservableSet {
        let members = Axis::ALL
            .iter()
            .zip(self.params())
            .map(|(&axis, t)| spin_observable(&axis.sigma(), t))
            .collect();
        ObservableSet::named(["X", "Y", "Z"], members).expect("common dimension")
    }
}

/// Weights and angles of the random-measurement construction. The angles are
/// named `ang_a`, `ang_b`, `ang_c` for the pairwise joints on `(X, Y)`,
/// `(Y, Z)` and `(X, Z)` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub ang_a: f64,
    pub ang_b: f64,
    pub ang_c: f64,
}

impl MixingParams {
    pub fn new(lambdas: [f64; 3], angles: [f64; 3]) -> Result<Self> {
        if lambdas.iter().any(|&l| !(0.0..=1.0).contains(&l))
            || (lambdas.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidArgument(format!(
                "{lambdas:?} is not a probability vector"
            )));
        }
        if angles
            .iter()
            .any(|&g| !(0.0..=std::f64::consts::FRAC_PI_2).contains(&g))
        {
            return Err(Error::InvalidArgument(format!(
                "angles {angles:?} outside [0, π/2]"
            )));
        }
        Ok(MixingParams {
            lambda1: lambdas[0],
            lambda2: lambdas[1],
            lambda3: lambdas[2],
            ang_a: angles[0],
            ang_b: angles[1],
            ang_c: angles[2],
        })
    }

    /// Equal weights, all angles `π/4`.
    pub fn balanced() -> Self {
        Self::new([1.0 / 3.0; 3], [FRAC_PI_4; 3]).expect("valid")
    }

    /// Largest `(a, b, c)` reached by the construction:
    ///
    /// ```text
    /// a = λ₁ + λ₂ cos(ang_c) + λ₃ sin(ang_a)
    /// b = λ₁ sin(ang_b) + λ₂ + λ₃ cos(ang_a)
    /// c = λ₁ cos(ang_b) + λ₂ sin(ang_c) + λ₃
    /// ```
    pub fn bounds(&self) -> [f64; 3] {
        let (l1, l2, l3) = (self.lambda1, self.lambda2, self.lambda3);
        [
            l1 + l2 * self.ang_c.cos() + l3 * self.ang_a.sin(),
            l1 * self.ang_b.sin() + l2 + l3 * self.ang_a.cos(),
            l1 * self.ang_b.cos() + l2 * self.ang_c.sin() + l3,
        ]
    }
}

/// Whether `triple` lies below the construction's bounds (so is certified
/// 2-compatible).
pub fn mixing_bound_feasible(triple: &NoisySpinTriple, params: &MixingParams) -> bool {
    triple
        .params()
        .iter()
        .zip(params.bounds())
        .all(|(&t, bound)| t <= bound + TOL_BOUNDARY)
}

/// Joint of `½(I + x p σi)`, `½(I + y q σj)` with `p² + q² ≤ 1`:
/// `G(x, y) = ¼(I + x p σi + y q σj)`.
pub fn busch_pair_joint(i: Axis, p: f64, j: Axis, q: f64) -> Result<Observable> {
    if i == j {
        return Err(Error::InvalidArgument(
            "pair joint needs two different axes".into(),
        ));
    }
    check_unit("p", p)?;
    check_unit("q", q)?;
    if p * p + q * q > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "({p}, {q}) is outside the unit disc"
        )));
    }
    let (si, sj) = (i.sigma(), j.sigma());
    let id = HermitianOperator::identity(2);
    let mut effects = Vec::with_capacity(4);
    for x in [1.0, -1.0] {
        for y in [1.0, -1.0] {
            effects.push((&(&id + &si.scale(x * p)) + &sj.scale(y * q)).scale(0.25));
        }
    }
    Observable::joint(vec![outcome_labels(), outcome_labels()], effects)
}

fn outcome_labels() -> Vec<String> {
    SPIN_OUTCOMES.iter().map(|s| s.to_string()).collect()
}

fn sign(index: usize) -> f64 {
    if index == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The two-copy joint of the random-measurement construction,
///
/// `G(x,y,z) = λ₁ X(x)⊗G²³(y,z) + λ₂ Y(y)⊗G¹³(x,z) + λ₃ Z(z)⊗G¹²(x,y)`
///
/// with pairwise joints `G¹²` of `(X_{sin ang_a}, Y_{cos ang_a})`, `G²³` of
/// `(Y_{sin ang_b}, Z_{cos ang_b})` and `G¹³` of `(X_{cos ang_c},
/// Z_{sin ang_c})`, followed by classical noise on each outcome so the copy
/// average of the marginals is exactly `(a, b, c)` = `triple`.
///
/// The result is not symmetric; `Σ₂` of each effect is a symmetric joint of
/// the `I ⊙ A_i`.
pub fn mixing_joint_observable(
    triple: &NoisySpinTriple,
    params: &MixingParams,
) -> Result<Observable> {
    if !mixing_bound_feasible(triple, params) {
        return Err(Error::InvalidArgument(format!(
            "{:?} exceeds the construction's bounds {:?}",
            triple.params(),
            params.bounds()
        )));
    }
    let (sa, ca) = params.ang_a.sin_cos();
    let (sb, cb) = params.ang_b.sin_cos();
    let (sc, cc) = params.ang_c.sin_cos();
    let g12 = busch_pair_joint(Axis::X, sa, Axis::Y, ca.min(1.0))?;
    let g23 = busch_pair_joint(Axis::Y, sb, Axis::Z, cb.min(1.0))?;
    let g13 = busch_pair_joint(Axis::X, cc, Axis::Z, sc.min(1.0))?;
    let sharp: Vec<Observable> = Axis::ALL
        .iter()
        .map(|&a| spin_observable(&a.sigma(), 1.0))
        .collect();
    let bounds = params.bounds();
    // flip each outcome with probability (1 − t/bound)/2
    let keep: Vec<f64> = triple
        .params()
        .iter()
        .zip(bounds)
        .map(|(&t, b)| if b > 0.0 { (t / b).min(1.0) } else { 1.0 })
        .collect();
    let raw = |x: usize, y: usize, z: usize| -> HermitianOperator {
        let t1 = sharp[0].effects()[x]
            .tensor(&g23.effects()[2 * y + z])
            .scale(params.lambda1);
        let t2 = sharp[1].effects()[y]
            .tensor(&g13.effects()[2 * x + z])
            .scale(params.lambda2);
        let t3 = sharp[2].effects()[z]
            .tensor(&g12.effects()[2 * x + y])
            .scale(params.lambda3);
        &(&t1 + &t2) + &t3
    };
    let channel = |r: f64, out: usize, inp: usize| 0.5 * (1.0 + r * sign(out) * sign(inp));
    let mut effects = Vec::with_capacity(8);
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let mut acc = HermitianOperator::zeros(4);
                for xi in 0..2 {
                    for yi in 0..2 {
                        for zi in 0..2 {
                            let w = channel(keep[0], x, xi)
                                * channel(keep[1], y, yi)
                                * channel(keep[2], z, zi);
                            if w != 0.0 {
                                acc += &raw(xi, yi, zi).scale(w);
                            }
                        }
                    }
                }
                effects.push(acc);
            }
        }
    }
    Observable::joint(vec![outcome_labels(); 3], effects)
}

/// Parameters of the covariant symmetric two-copy family, constrained to
/// `α, β ≥ 0`, `α + β ≤ 3/8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovariantParams {
    pub alpha: f64,
    pub beta: f64,
}

impl CovariantParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = CovariantParams { alpha, beta };
        if !p.in_polytope() {
            return Err(Error::InvalidArgument(format!(
                "(α, β) = ({alpha}, {beta}) outside α, β ≥ 0, α + β ≤ 3/8"
            )));
        }
        Ok(p)
    }

    /// Unchecked, for probing outside the polytope.
    pub fn unchecked(alpha: f64, beta: f64) -> Self {
        CovariantParams { alpha, beta }
    }

    pub fn in_polytope(&self) -> bool {
        self.alpha >= 0.0 && self.beta >= 0.0 && self.alpha + self.beta <= 0.375 + 1e-15
    }
}

/// Vertices of the parameter polytope.
pub fn covariant_polytope_vertices() -> [CovariantParams; 3] {
    [
        CovariantParams::unchecked(0.0, 0.0),
        CovariantParams::unchecked(0.375, 0.0),
        CovariantParams::unchecked(0.0, 0.375),
    ]
}

/// Cube vertices `{±1}³` in joint-outcome order (`+1` first, last axis fastest).
pub fn cube_vertices() -> Vec<[i8; 3]> {
    let mut out = Vec::with_capacity(8);
    for x in [1, -1] {
        for y in [1, -1] {
            for z in [1, -1] {
                out.push([x, y, z]);
            }
        }
    }
    out
}

fn u_dot_sigma(u: [f64; 3]) -> HermitianOperator {
    &(&sigma_x().scale(u[0]) + &sigma_y().scale(u[1])) + &sigma_z().scale(u[2])
}

fn sigma_dot_sigma() -> HermitianOperator {
    let mut acc = HermitianOperator::zeros(4);
    for s in [sigma_x(), sigma_y(), sigma_z()] {
        acc += &s.tensor(&s);
    }
    acc
}

/// `[(4(α+β)−1)/16]·[u·σ⊗u·σ − Σ σ⊗σ] + [(α−β)/(4√3)]·(u·σ⊗I + I⊗u·σ) + I⊗I/8`.
pub fn covariant_effect(params: &CovariantParams, u: [i8; 3]) -> HermitianOperator {
    let (alpha, beta) = (params.alpha, params.beta);
    let us = u_dot_sigma([u[0] as f64, u[1] as f64, u[2] as f64]);
    let id = HermitianOperator::identity(2);
    let quadratic = &us.tensor(&us) - &sigma_dot_sigma();
    let linear = &us.tensor(&id) + &id.tensor(&us);
    let c2 = (4.0 * (alpha + beta) - 1.0) / 16.0;
    let c1 = (alpha - beta) / (4.0 * 3f64.sqrt());
    &(&quadratic.scale(c2) + &linear.scale(c1)) + &HermitianOperator::identity(4).scale(0.125)
}

/// The covariant family as an observable on `{±1}³` over `H^{⊗2}`.
pub fn covariant_observable(params: &CovariantParams) -> Result<Observable> {
    if !params.in_polytope() {
        return Err(Error::InvalidArgument(format!(
            "{params:?} outside the parameter polytope"
        )));
    }
    let effects = cube_vertices()
        .into_iter()
        .map(|u| covariant_effect(params, u))
        .collect();
    Observable::joint(vec![outcome_labels(); 3], effects)
}

/// `a = 4(α − β)/√3`: the noise parameter of every marginal of the family.
pub fn covariant_marginal_noise(params: &CovariantParams) -> f64 {
    4.0 * (params.alpha - params.beta) / 3f64.sqrt()
}

/// Largest marginal noise parameter over the polytope, with its maximizer.
/// The objective is linear, so the maximum sits at a vertex.
pub fn two_copy_threshold_analytic() -> (f64, CovariantParams) {
    covariant_polytope_vertices()
        .into_iter()
        .map(|p| (covariant_marginal_noise(&p), p))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("three vertices")
}

/// `M₀..M₅` for `n = (1,1,1)/√3` and the projections `P±`, `Q±`.
#[derive(Debug, Clone)]
pub struct MpqOperators {
    pub m: [HermitianOperator; 6],
    pub p_plus: HermitianOperator,
    pub p_minus: HermitianOperator,
    pub q_plus: HermitianOperator,
    pub q_minus: HermitianOperator,
}

pub fn mpq_operators() -> MpqOperators {
    let r = 1.0 / 3f64.sqrt();
    let ns = u_dot_sigma([r, r, r]);
    let id = HermitianOperator::identity(2);
    let (sx, sy, sz) = (sigma_x(), sigma_y(), sigma_z());
    let m0 = HermitianOperator::identity(4);
    let m1 = ns.tensor(&ns);
    let m2 = sigma_dot_sigma().scale(1.0 / 3.0);
    let m3 = &ns.tensor(&id) + &id.tensor(&ns);
    let m4 = &ns.tensor(&id) - &id.tensor(&ns);
    // sum of antisymmetric products; Hermitian as a whole
    let m5 = {
        let pairs = [(&sx, &sy), (&sy, &sz), (&sz, &sx)];
        let mut acc = Matrix::zeros(4);
        for (a, b) in pairs {
            let ab = a.matrix().kron(b.matrix());
            let ba = b.matrix().kron(a.matrix());
            acc = &acc + &(&ab - &ba);
        }
        HermitianOperator::symmetrized(acc)
    };
    let p_plus = (&(&m0 + &m1) + &m3).scale(0.25);
    let p_minus = (&(&m0 + &m1) - &m3).scale(0.25);
    let q_plus = (&m0 - &m2.scale(3.0)).scale(0.25);
    let q_minus = (&(&m0 - &m1.scale(2.0)) + &m2.scale(3.0)).scale(0.25);
    MpqOperators {
        m: [m0, m1, m2, m3, m4, m5],
        p_plus,
        p_minus,
        q_plus,
        q_minus,
    }
}

impl MpqOperators {
    pub fn projections(&self) -> [&HermitianOperator; 4] {
        [&self.p_plus, &self.p_minus, &self.q_plus, &self.q_minus]
    }
}

/// A rotation of the cube together with an `SU(2)` lift `g̃`; it acts on
/// `H^{⊗2}` by `U = g̃ ⊗ g̃`.
#[derive(Debug, Clone)]
pub struct GroupElement {
    /// Signed permutation matrix acting on `{±1}³`.
    pub rotation: [[i8; 3]; 3],
    pub lift: Matrix,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            rotation: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            lift: Matrix::identity(2),
        }
    }

    /// Quarter turn about `axis` with lift `e^{−i(π/4)σ_axis}`.
    pub fn quarter_turn(axis: Axis) -> Self {
        let rotation = match axis {
            Axis::X => [[1, 0, 0], [0, 0, -1], [0, 1, 0]],
            Axis::Y => [[0, 0, 1], [0, 1, 0], [-1, 0, 0]],
            Axis::Z => [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
        };
        let c = FRAC_PI_4.cos();
        let lift = &Matrix::identity(2).scale(c.into())
            + &axis.sigma().matrix().scale(Complex64::new(0.0, -c));
        GroupElement { rotation, lift }
    }

    pub fn act(&self, u: [i8; 3]) -> [i8; 3] {
        let mut out = [0; 3];
        for (i, row) in self.rotation.iter().enumerate() {
            out[i] = row.iter().zip(u).map(|(r, x)| r * x).sum();
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let mut rotation = [[0i8; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3)
                    .map(|m| self.rotation[i][m] * other.rotation[m][j])
                    .sum();
            }
        }
        GroupElement {
            rotation,
            lift: &self.lift * &other.lift,
        }
    }

    /// `U(g) = g̃ ⊗ g̃`.
    pub fn two_copy_unitary(&self) -> Matrix {
        self.lift.kron(&self.lift)
    }
}

/// The three quarter turns about the coordinate axes.
pub fn octahedral_generators() -> Vec<GroupElement> {
    Axis::ALL
        .iter()
        .map(|&a| GroupElement::quarter_turn(a))
        .collect()
}

/// Closure of `generators` under composition, deduplicated by rotation
/// (lifts differing by sign act identically on `H^{⊗2}`).
pub fn generate_group(generators: &[GroupElement]) -> Vec<GroupElement> {
    let mut group = vec![GroupElement::identity()];
    let mut frontier = 0;
    while frontier < group.len() {
        let current = group[frontier].clone();
        for g in generators {
            let next = g.compose(&current);
            if !group.iter().any(|h| h.rotation == next.rotation) {
                group.push(next);
            }
        }
        frontier += 1;
    }
    group
}

fn vertex_position(u: [i8; 3]) -> usize {
    cube_vertices()
        .iter()
        .position(|&v| v == u)
        .expect("cube vertex")
}

fn check_cube_joint(obs: &Observable) -> Result<()> {
    if obs.len() != 8 || obs.space_dim() != 4 {
        return Err(Error::InvalidArgument(
            "expected an observable on {±1}³ over two qubits".into(),
        ));
    }
    Ok(())
}

/// `G(g.u) = U(g) G(u) U(g)*` for every `g` in `group` and every vertex `u`,
/// within `tol` in HS norm.
pub fn is_covariant(obs: &Observable, group: &[GroupElement], tol: f64) -> Result<bool> {
    check_cube_joint(obs)?;
    for g in group {
        let u_g = g.two_copy_unitary();
        for u in cube_vertices() {
            let lhs = &obs.effects()[vertex_position(g.act(u))];
            let rhs = obs.effects()[vertex_position(u)].conjugate_by(&u_g);
            if lhs.hs_distance(&rhs) > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Covariance of the family under the three generating quarter turns.
pub fn covariance_generator_check(params: &CovariantParams) -> Result<bool> {
    is_covariant(
        &covariant_observable(params)?,
        &octahedral_generators(),
        1e-10,
    )
}

/// `Ĝ(u) = (1/#G) Σ_g U(g)* G(g.u) U(g)` over the listed group elements.
pub fn covariantize(obs: &Observable, group: &[GroupElement]) -> Result<Observable> {
    check_cube_joint(obs)?;
    if group.is_empty() {
        return Err(Error::InvalidArgument("empty group".into()));
    }
    let effects = cube_vertices()
        .into_iter()
        .map(|u| {
            let mut acc = HermitianOperator::zeros(4);
            for g in group {
                let u_star = g.two_copy_unitary().adjoint();
                acc += &obs.effects()[vertex_position(g.act(u))].conjugate_by(&u_star);
            }
            acc.scale(1.0 / group.len() as f64)
        })
        .collect();
    obs.with_effects(effects)
}

/// Oracle for subsets of `{X_a, Y_b, Z_c}`: the pair and triple criteria at
/// `k = 1`, the `√3/2` threshold for the equal-noise triple at `k = 2`, the
/// product joint for `k ≥ |S|`, and the numerical solver otherwise.
#[derive(Debug, Clone)]
pub struct QubitAnalyticOracle {
    pub triple: NoisySpinTriple,
    pub config: SolverConfig,
}

impl QubitAnalyticOracle {
    pub fn new(triple: NoisySpinTriple) -> Self {
        QubitAnalyticOracle {
            triple,
            config: SolverConfig::default(),
        }
    }
}

impl CompatibilityOracle for QubitAnalyticOracle {
    fn decide(&self, set: &ObservableSet, subset: &[usize], k: usize) -> Result<FeasibilityReport> {
        let params = self.triple.params();
        let sub = set.subset(subset)?;
        if k >= subset.len() {
            return Ok(FeasibilityReport::constructive(multi_copy_product_joint(
                &sub, k,
            )?));
        }
        if k == 1 {
            let norm2: f64 = subset.iter().map(|&i| params[i] * params[i]).sum();
            return Ok(FeasibilityReport::analytic(norm2 <= 1.0 + TOL_BOUNDARY));
        }
        let (threshold, _) = two_copy_threshold_analytic();
        let equal = params.iter().all(|&t| t == params[0]);
        if k == 2 && subset.len() == 3 && equal {
            return Ok(FeasibilityReport::analytic(
                params[0] <= threshold + TOL_BOUNDARY,
            ));
        }
        is_k_compatible(&sub, k, &self.config)
    }
}
