//! Permutation action on `H^{⊗k}`, the symmetrizer channel `Σ_k`, the
//! symmetric product `⊙` and an orthonormal basis of `Sym(k, L(H))`.
//!
//! Permutation unitaries are materialized over the computational product
//! basis; `Σ_k` averages over all `k!` permutations.

use itertools::Itertools;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::operator::{tensor_all, traceless_basis, HermitianOperator, Matrix};

/// Tolerance for membership in `Sym(k, L(H))`.
pub const TOL_SYM: f64 = 1e-10;

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    (0..k).permutations(k).collect()
}

/// Integer `d` with `d^k = dim`, if any.
pub fn integer_root(dim: usize, k: usize) -> Option<usize> {
    if k == 0 {
        return None;
    }
    let guess = (dim as f64).powf(1.0 / k as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&d| d >= 1 && d.checked_pow(k as u32) == Some(dim))
}

fn base_dim(dim: usize, k: usize) -> Result<usize> {
    integer_root(dim, k)
        .ok_or_else(|| Error::InvalidArgument(format!("dimension {dim} is not a {k}-th power")))
}

/// `σ(p)` on `H^{⊗k}`: `σ(p)(ψ₁⊗…⊗ψ_k) = ψ_{p⁻¹(1)}⊗…⊗ψ_{p⁻¹(k)}`.
#[derive(Debug, Clone)]
pub struct PermutationUnitary {
    k: usize,
    d: usize,
    perm: Vec<usize>,
    /// `index_map[input] = output` basis index.
    index_map: Vec<usize>,
}

impl PermutationUnitary {
    /// `perm[m]` is the image of slot `m` (zero-based).
    pub fn new(d: usize, perm: Vec<usize>) -> Result<Self> {
        let k = perm.len();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if k == 0 || sorted != (0..k).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation"
            )));
        }
        let mut inverse = vec![0; k];
        for (m, &pm) in perm.iter().enumerate() {
            inverse[pm] = m;
        }
        let dim = d.pow(k as u32);
        let index_map = (0..dim)
            .map(|input| {
                let digits = to_digits(input, d, k);
                let out: Vec<usize> = (0..k).map(|m| digits[inverse[m]]).collect();
                from_digits(&out, d)
            })
            .collect();
        Ok(Self {
            k,
            d,
            perm,
            index_map,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn dim(&self) -> usize {
        self.index_map.len()
    }

    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim());
        for (input, &output) in self.index_map.iter().enumerate() {
            m.set(output, input, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// `σ(p) a σ(p)*`.
    pub fn conjugate(&self, a: &HermitianOperator) -> HermitianOperator {
        let n = self.dim();
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(self.index_map[r], self.index_map[c], a.get(r, c));
            }
        }
        HermitianOperator::symmetrized(out)
    }

    pub fn base_dim(&self) -> usize {
        self.d
    }
}

fn to_digits(mut index: usize, d: usize, k: usize) -> Vec<usize> {
    let mut digits = vec![0; k];
    for slot in (0..k).rev() {
        digits[slot] = index % d;
        index /= d;
    }
    digits
}

fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Element of `Sym(k, L(H))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    k: usize,
    d: usize,
    op: HermitianOperator,
}

impl SymmetricOperator {
    /// Checks `Σ_k(op) = op` within [`TOL_SYM`].
    pub fn new(k: usize, op: HermitianOperator) -> Result<Self> {
        let d = base_dim(op.dim(), k)?;
        let sym = symmetrize_raw(k, d, &op)?;
        let drift = sym.hs_distance(&op);
        if drift > TOL_SYM {
            return Err(Error::InvalidArgument(format!(
                "operator is not permutation symmetric (drift {drift:e})"
            )));
        }
        Ok(Self { k, d, op })
    }

    /// Any operator on `H` is trivially in `Sym(1, L(H))`.
    pub fn single(op: HermitianOperator) -> Self {
        Self {
            k: 1,
            d: op.dim(),
            op,
        }
    }

    pub fn identity(d: usize, k: usize) -> Self {
        Self {
            k,
            d,
            op: HermitianOperator::identity(d.pow(k as u32)),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base_dim(&self) -> usize {
        self.d
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }
}

fn symmetrize_raw(k: usize, d: usize, a: &HermitianOperator) -> Result<HermitianOperator> {
    let perms = permutations(k);
    let mut acc = HermitianOperator::zeros(a.dim());
    for p in &perms {
        acc += &PermutationUnitary::new(d, p.clone())?.conjugate(a);
    }
    Ok(acc.scale(1.0 / perms.len() as f64))
}

/// `Σ_k(a) = (1/k!) Σ_p σ(p) a σ(p)*`. The base dimension is inferred from
/// `a.dim() = d^k`.
pub fn symmetrizer(k: usize, a: &HermitianOperator) -> Result<SymmetricOperator> {
    let d = base_dim(a.dim(), k)?;
    Ok(SymmetricOperator {
        k,
        d,
        op: symmetrize_raw(k, d, a)?,
    })
}

/// `a ⊙ b = Σ_{k₁+k₂}(a ⊗ b)`.
pub fn sym_product(a: &SymmetricOperator, b: &SymmetricOperator) -> Result<SymmetricOperator> {
    if a.d != b.d {
        return Err(Error::DimensionMismatch {
            expected: a.d,
            found: b.d,
        });
    }
    symmetrizer(a.k + b.k, &a.op.tensor(&b.op))
}

/// `A₁ ⊙ … ⊙ A_k` for operators on `H`.
pub fn sym_product_all(ops: &[HermitianOperator]) -> Result<SymmetricOperator> {
    if ops.is_empty() {
        return Err(Error::InvalidArgument("empty symmetric product".into()));
    }
    symmetrizer(ops.len(), &tensor_all(ops))
}

/// `(1/k!) Σ_p tr[A₁B_{p(1)}]⋯tr[A_kB_{p(k)}]`, which equals
/// `⟨A₁⊙…⊙A_k, B₁⊙…⊙B_k⟩_HS`.
pub fn hs_sym_formula(a: &[HermitianOperator], b: &[HermitianOperator]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let k = a.len();
    let mut traces = vec![vec![0.0; k]; k];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            traces[i][j] = ai.hs_inner(bj)?;
        }
    }
    let perms = permutations(k);
    let total: f64 = perms
        .iter()
        .map(|p| (0..k).map(|i| traces[i][p[i]]).product::<f64>())
        .sum();
    Ok(total / perms.len() as f64)
}

/// `I^{⊗(k−1)} ⊙ a` for an operator `a` on `H`.
pub fn symmetrize_effect(a: &HermitianOperator, k: usize) -> Result<HermitianOperator> {
    if k == 0 {
        return Err(Error::InvalidArgument("copy count must be >= 1".into()));
    }
    if k == 1 {
        return Ok(a.clone());
    }
    let padded = HermitianOperator::identity(a.dim().pow((k - 1) as u32)).tensor(a);
    Ok(symmetrizer(k, &padded)?.into_op())
}

/// `Ã(x) = I^{⊗(k−1)} ⊙ A(x)` for every outcome; `k = 1` returns the input.
pub fn symmetrize_observable(obs: &Observable, k: usize) -> Result<Observable> {
    if k == 1 {
        return Ok(obs.clone());
    }
    let effects = obs
        .effects()
        .iter()
        .map(|e| symmetrize_effect(e, k))
        .collect::<Result<Vec<_>>>()?;
    obs.with_effects(effects)
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Multi-indices `(j₁,…,j_D)` with `Σ j_r = total`, in lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Orthonormal basis of `Sym(k, L(H))` for `dim H = d`:
///
/// `c · I^{⊗(k−j)} ⊙ T₁^{⊙j₁} ⊙ … ⊙ T_D^{⊙j_D}` over `0 ≤ j ≤ k`,
/// `j₁+…+j_D = j`, with `T_r` from [`traceless_basis`] and
/// `c = (C(k,j) · j!/(j₁!⋯j_D!))^{1/2} · d^{(j−k)/2}`.
///
/// Elements come in lexicographic order of `(j, j₁, …, j_D)`; the family has
/// `C(k + d² − 1, k)` members.
pub fn sym_basis(d: usize, k: usize) -> Result<Vec<SymmetricOperator>> {
    if d < 2 || k < 1 {
        return Err(Error::InvalidArgument(format!(
            "sym_basis needs d >= 2 and k >= 1, got d={d}, k={k}"
        )));
    }
    let ts = traceless_basis(d)?;
    let identity = HermitianOperator::identity(d);
    let mut basis = Vec::new();
    for j in 0..=k {
        for js in compositions(j, ts.len()) {
            let mut factors: Vec<&HermitianOperator> = vec![&identity; k - j];
            for (t, &count) in ts.iter().zip(&js) {
                factors.extend(std::iter::repeat_n(t, count));
            }
            let multinomial = factorial(j) / js.iter().map(|&x| factorial(x)).product::<f64>();
            let coeff = (binomial(k, j) * multinomial).sqrt()
                * (d as f64).powf((j as f64 - k as f64) / 2.0);
            let sym = symmetrizer(k, &tensor_all(factors))?;
            basis.push(SymmetricOperator {
                k,
                d,
                op: sym.op.scale(coeff),
            });
        }
    }
    Ok(basis)
}

/// Symmetric two-copy joint of two two-outcome observables:
/// `G̃(x, y) = ½(A₁(x)⊗A₂(y) + A₂(y)⊗A₁(x))`.
pub fn symmetric_two_copy_joint(a1: &Observable, a2: &Observable) -> Result<Observable> {
    if a1.len() != 2 || a2.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected two-outcome observables, got {} and {} outcomes",
            a1.len(),
            a2.len()
        )));
    }
    if a1.space_dim() != a2.space_dim() {
        return Err(Error::DimensionMismatch {
            expected: a1.space_dim(),
            found: a2.space_dim(),
        });
    }
    let mut effects = Vec::with_capacity(4);
    for e1 in a1.effects() {
        for e2 in a2.effects() {
            effects.push((&e1.tensor(e2) + &e2.tensor(e1)).scale(0.5));
        }
    }
    Observable::joint(
        vec![a1.outcomes().to_vec(), a2.outcomes().to_vec()],
        effects,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{sigma_x, sigma_y, sigma_z};

    fn noisy(op: &HermitianOperator, t: f64) -> Observable {
        let i = HermitianOperator::identity(2);
        Observable::new(
            ["+1", "-1"],
            vec![
                (&i + &op.scale(t)).scale(0.5),
                (&i - &op.scale(t)).scale(0.5),
            ],
        )
        .unwrap()
    }

    #[test]
    fn permutation_action_on_product_states() {
        // p = (0→1, 1→2, 2→0): slot m receives ψ_{p⁻¹(m)}
        let u = PermutationUnitary::new(2, vec![1, 2, 0]).unwrap();
        // |0⟩⊗|0⟩⊗|1⟩ (index 1) → slots (ψ₃, ψ₁, ψ₂) = |1⟩|0⟩|0⟩ (index 4)
        let m = u.matrix();
        assert_eq!(m.get(4, 1), Complex64::new(1.0, 0.0));
        let prod = &m * &m.adjoint();
        assert!(prod.max_abs_diff(&Matrix::identity(8)) < 1e-15);
    }

    #[test]
    fn sigma2_on_decomposable() {
        let a = sigma_x();
        let b = sigma_y();
        let s = symmetrizer(2, &a.tensor(&b)).unwrap();
        let expected = (&a.tensor(&b) + &b.tensor(&a)).scale(0.5);
        assert!(s.op().hs_distance(&expected) < 1e-15);
    }

    #[test]
    fn sigma_k_unital() {
        for k in 1..=3 {
            let id = HermitianOperator::identity(2usize.pow(k as u32));
            assert!(symmetrizer(k, &id).unwrap().op().hs_distance(&id) < 1e-15);
        }
    }

    #[test]
    fn symmetrizer_rejects_bad_dimension() {
        assert!(symmetrizer(2, &HermitianOperator::identity(3)).is_err());
    }

    #[test]
    fn identity_sym_sigma_x() {
        let i = SymmetricOperator::single(HermitianOperator::identity(2));
        let x = SymmetricOperator::single(sigma_x());
        let p = sym_product(&i, &x).unwrap();
        let expected = (&HermitianOperator::identity(2).tensor(&sigma_x())
            + &sigma_x().tensor(&HermitianOperator::identity(2)))
            .scale(0.5);
        assert!(p.op().hs_distance(&expected) < 1e-15);
    }

    #[test]
    fn tilde_x_effects() {
        let a = 0.6;
        let tilde = symmetrize_observable(&noisy(&sigma_x(), a), 2).unwrap();
        let i = HermitianOperator::identity(2);
        let ii = i.tensor(&i);
        let cross = &i.tensor(&sigma_x()) + &sigma_x().tensor(&i);
        for (effect, sign) in tilde.effects().iter().zip([1.0, -1.0]) {
            let expected = (&ii.scale(2.0) + &cross.scale(sign * a)).scale(0.25);
            assert!(effect.hs_distance(&expected) < 1e-15);
        }
    }

    #[test]
    fn hs_sym_formula_small_cases() {
        let a = sigma_x();
        let b = sigma_z();
        let k1 = hs_sym_formula(std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
        assert!((k1 - a.hs_inner(&b).unwrap()).abs() < 1e-15);
        let i = HermitianOperator::identity(2);
        let k2 = hs_sym_formula(&[i.clone(), i.clone()], &[i.clone(), i.clone()]).unwrap();
        assert!((k2 - 4.0).abs() < 1e-15);
        assert!(hs_sym_formula(std::slice::from_ref(&i), &[i.clone(), i.clone()]).is_err());
    }

    #[test]
    fn sym_basis_sizes() {
        assert_eq!(sym_basis(2, 1).unwrap().len(), 4);
        assert_eq!(sym_basis(2, 2).unwrap().len(), 10);
        assert_eq!(sym_basis(2, 3).unwrap().len(), 20);
        assert_eq!(sym_basis(3, 2).unwrap().len(), 45);
    }

    #[test]
    fn sym_basis_k1_is_identity_and_paulis() {
        let basis = sym_basis(2, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (j, j₁, j₂, j₃) ascending: (0,0,0,0), (1,0,0,1), (1,0,1,0), (1,1,0,0)
        let expected = [
            HermitianOperator::identity(2).scale(s),
            sigma_z().scale(s),
            sigma_y().scale(s),
            sigma_x().scale(s),
        ];
        for (b, e) in basis.iter().zip(&expected) {
            assert!(b.op().hs_distance(e) < 1e-14);
        }
    }

    #[test]
    fn two_copy_joint_of_coins() {
        let coin = noisy(&sigma_z(), 0.0);
        let g = symmetric_two_copy_joint(&coin, &coin).unwrap();
        let quarter = HermitianOperator::identity(4).scale(0.25);
        for e in g.effects() {
            assert!(e.hs_distance(&quarter) < 1e-15);
        }
    }

    #[test]
    fn two_copy_joint_sharp_xy() {
        let x = noisy(&sigma_x(), 1.0);
        let y = noisy(&sigma_y(), 1.0);
        let g = symmetric_two_copy_joint(&x, &y).unwrap();
        let (xp, yp) = (&x.effects()[0], &y.effects()[0]);
        let expected = (&xp.tensor(yp) + &yp.tensor(xp)).scale(0.5);
        assert!(g.effect("+1|+1").unwrap().hs_distance(&expected) < 1e-15);
        let three = Observable::new(
            ["a", "b", "c"],
            vec![HermitianOperator::identity(2).scale(1.0 / 3.0); 3],
        )
        .unwrap();
        assert!(symmetric_two_copy_joint(&x, &three).is_err());
    }

    #[test]
    fn compositions_are_lexicographic() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }
}
