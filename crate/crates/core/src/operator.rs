//! Dense complex operators on finite-dimensional Hilbert spaces.
//!
//! [`Matrix`] is a general square complex matrix stored row-major. It is used
//! for unitaries and intermediate products. [`HermitianOperator`] wraps a
//! matrix that has been checked (and cleaned) to be self-adjoint; effects,
//! states and all operators handed around by the higher modules are of this
//! type.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum entrywise drift |A - A*| absorbed when building a Hermitian operator.
pub const TOL_HERM: f64 = 1e-12;
/// Accuracy target of the eigensolver.
pub const TOL_EIG: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from nested rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "matrix must have dimension >= 1".into(),
            ));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (m, n) = (self.dim, other.dim);
        let dim = m * n;
        let mut out = Matrix::zeros(dim);
        for i in 0..m {
            for j in 0..m {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        out.data[(i * n + k) * dim + j * n + l] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// `tr[self* other]`.
    pub fn hs_inner(&self, other: &Matrix) -> Result<Complex64> {
        check_dims(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise |A - A*|.
    pub fn hermiticity_drift(&self) -> f64 {
        let mut drift = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                drift = drift.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        drift
    }

    /// `u · self · u*`.
    pub fn conjugate_by(&self, u: &Matrix) -> Matrix {
        &(u * self) * &u.adjoint()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

/// Self-adjoint operator.
///
/// Construction symmetrizes `(A + A*)/2` when the drift is at most
/// [`TOL_HERM`] and fails otherwise.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianOperator(Matrix);

impl HermitianOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let drift = matrix.hermiticity_drift();
        if drift > TOL_HERM {
            return Err(Error::NotHermitian { drift });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Takes the Hermitian part of `matrix` without checking the drift.
    pub fn symmetrized(matrix: Matrix) -> Self {
        let adj = matrix.adjoint();
        let half = Complex64::new(0.5, 0.0);
        Self((&matrix + &adj).scale(half))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0.get(i, j)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(Complex64::new(factor, 0.0)))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn tensor(&self, other: &HermitianOperator) -> Self {
        Self(self.0.kron(&other.0))
    }

    /// `tr[self other]`, real for Hermitian operands.
    pub fn hs_inner(&self, other: &HermitianOperator) -> Result<f64> {
        Ok(self.0.hs_inner(&other.0)?.re)
    }

    pub fn hs_norm(&self) -> f64 {
        self.0.hs_norm()
    }

    /// HS distance `‖self − other‖`.
    pub fn hs_distance(&self, other: &HermitianOperator) -> f64 {
        (&self.0 - &other.0).hs_norm()
    }

    /// `u · self · u*` for a unitary `u`.
    pub fn conjugate_by(&self, u: &Matrix) -> Self {
        Self::symmetrized(self.0.conjugate_by(u))
    }

    /// Eigenvalues in ascending order with the matching orthonormal
    /// eigenvectors stored as columns.
    pub fn eigh(&self) -> (Vec<f64>, Matrix) {
        jacobi_eigh(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Nearest PSD operator in HS norm: clip negative eigenvalues to zero.
    pub fn psd_project(&self) -> Self {
        self.spectral_map(|x| x.max(0.0))
    }

    /// Applies `f` to the spectrum: `V diag(f(λ)) V*`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let (values, vectors) = self.eigh();
        let n = self.dim();
        let mut out = Matrix::zeros(n);
        for (k, &lambda) in values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = vectors.get(i, k) * w;
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + vi * vectors.get(j, k).conj());
                }
            }
        }
        Self::symmetrized(out)
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 + &rhs.0)
    }
}

impl AddAssign<&HermitianOperator> for HermitianOperator {
    fn add_assign(&mut self, rhs: &HermitianOperator) {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        for (a, b) in self.0.data.iter_mut().zip(&rhs.0.data) {
            *a += b;
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 - &rhs.0)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

/// Wire format `{"dim": d, "re": [[...]], "im": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        // `+ 0.0` folds negative zeros so output is stable.
        let rows = |f: fn(Complex64) -> f64| {
            (0..m.dim)
                .map(|i| (0..m.dim).map(|j| f(m.get(i, j)) + 0.0).collect())
                .collect()
        };
        MatrixJson {
            dim: m.dim,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;
    fn try_from(json: MatrixJson) -> Result<Self> {
        if json.dim == 0 {
            return Err(Error::Parse("matrix dim must be >= 1".into()));
        }
        if json.re.len() != json.dim || json.im.len() != json.dim {
            return Err(Error::Parse(format!(
                "matrix of dim {} needs {} rows in `re` and `im`",
                json.dim, json.dim
            )));
        }
        let mut m = Matrix::zeros(json.dim);
        for (i, (re, im)) in json.re.iter().zip(&json.im).enumerate() {
            if re.len() != json.dim || im.len() != json.dim {
                return Err(Error::Parse(format!("row {i} has the wrong length")));
            }
            for j in 0..json.dim {
                m.set(i, j, Complex64::new(re[j], im[j]));
            }
        }
        Ok(m)
    }
}

impl From<HermitianOperator> for MatrixJson {
    fn from(h: HermitianOperator) -> Self {
        MatrixJson::from(&h.0)
    }
}

impl TryFrom<MatrixJson> for HermitianOperator {
    type Error = Error;
    fn try_from(json: MatrixJson) -> Result<Self> {
        HermitianOperator::new(Matrix::try_from(json)?)
    }
}

/// Kronecker product of two Hermitian operators.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    a.tensor(b)
}

/// Kronecker product of a list of operators; the empty product is the 1×1 identity.
pub fn tensor_all<'a>(ops: impl IntoIterator<Item = &'a HermitianOperator>) -> HermitianOperator {
    ops.into_iter()
        .fold(HermitianOperator::identity(1), |acc, op| acc.tensor(op))
}

/// Hilbert–Schmidt inner product `tr[a* b]`.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    a.hs_inner(b)
}

pub fn min_eigenvalue(a: &HermitianOperator) -> f64 {
    a.min_eigenvalue()
}

pub fn psd_project(a: &HermitianOperator) -> HermitianOperator {
    a.psd_project()
}

/// Orthonormal basis of the traceless Hermitian operators on `C^d`
/// (generalized Gell-Mann matrices, normalized to `tr[T_r T_s] = δ_rs`).
///
/// Ordering: for each pair `j < k` the symmetric then the antisymmetric
/// off-diagonal element, followed by the `d − 1` diagonal elements. For
/// `d = 2` this gives `σx/√2, σy/√2, σz/√2`.
pub fn traceless_basis(d: usize) -> Result<Vec<HermitianOperator>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "traceless basis needs d >= 2, got {d}"
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = Matrix::zeros(d);
            sym.set(j, k, Complex64::new(s, 0.0));
            sym.set(k, j, Complex64::new(s, 0.0));
            basis.push(HermitianOperator(sym));
            let mut anti = Matrix::zeros(d);
            anti.set(j, k, -I * s);
            anti.set(k, j, I * s);
            basis.push(HermitianOperator(anti));
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = 1.0 / norm;
        }
        diag[l] = -(l as f64) / norm;
        basis.push(HermitianOperator::diagonal(&diag));
    }
    Ok(basis)
}

/// Pauli matrices.
pub fn sigma_x() -> HermitianOperator {
    HermitianOperator(Matrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO }))
}

pub fn sigma_y() -> HermitianOperator {
    HermitianOperator(Matrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    }))
}

pub fn sigma_z() -> HermitianOperator {
    HermitianOperator::diagonal(&[1.0, -1.0])
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
fn jacobi_eigh(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.dim;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    if n == 1 {
        return (vec![m.get(0, 0).re], v);
    }
    let scale = a.hs_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Phase makes the (p, q) entry real, then a real rotation zeroes it.
                let phase = apq / r;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let conj_phase = phase.conj();
                // V acts on columns p, q:
                //   V_pp = c, V_pq = s, V_qp = -s e^{-iφ}, V_qq = c e^{-iφ}
                let vpp = Complex64::new(c, 0.0);
                let vpq = Complex64::new(s, 0.0);
                let vqp = -conj_phase * s;
                let vqq = conj_phase * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, mkp * vpp + mkq * vqp);
                    m.set(k, q, mkp * vpq + mkq * vqq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, vpp.conj() * mpk + vqp.conj() * mqk);
                    m.set(q, k, vpq.conj() * mpk + vqq.conj() * mqk);
                }
                m.set(p, q, ZERO);
                m.set(q, p, ZERO);
                for k in 0..n {
                    let wkp = v.get(k, p);
                    let wkq = v.get(k, q);
                    v.set(k, p, wkp * vpp + wkq * vqp);
                    v.set(k, q, wkp * vpq + wkq * vqq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(n, |i, k| v.get(i, order[k]));
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_plus_z() -> HermitianOperator {
        (&HermitianOperator::identity(2) + &sigma_z()).scale(0.5)
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let i2 = HermitianOperator::identity(2);
        assert_eq!(tensor(&i2, &i2), HermitianOperator::identity(4));
    }

    #[test]
    fn tensor_with_one_dimensional_factor() {
        let a = sigma_y();
        assert_eq!(tensor(&a, &HermitianOperator::identity(1)), a);
        assert_eq!(
            tensor_all([] as [&HermitianOperator; 0]),
            HermitianOperator::identity(1)
        );
    }

    #[test]
    fn sigma_x_tensor_square_spectrum() {
        let xx = tensor(&sigma_x(), &sigma_x());
        let ev = xx.eigenvalues();
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn hs_inner_examples() {
        assert!((hs_inner(&sigma_x(), &sigma_x()).unwrap() - 2.0).abs() < 1e-15);
        assert!(hs_inner(&sigma_x(), &sigma_y()).unwrap().abs() < 1e-15);
        let i4 = HermitianOperator::identity(4);
        assert!((hs_inner(&i4, &i4).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn hs_inner_dimension_mismatch() {
        let err = hs_inner(&sigma_x(), &HermitianOperator::identity(4)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((min_eigenvalue(&HermitianOperator::identity(2)) - 1.0).abs() < TOL_EIG);
        assert!(min_eigenvalue(&half_plus_z()).abs() < TOL_EIG);
        assert!((min_eigenvalue(&sigma_z()) + 1.0).abs() < TOL_EIG);
    }

    #[test]
    fn psd_project_examples() {
        let p = half_plus_z();
        assert!(psd_project(&p).hs_distance(&p) <= 1e-10);
        assert!(psd_project(&sigma_z()).hs_distance(&p) <= 1e-12);
        let zero = HermitianOperator::zeros(3);
        assert_eq!(psd_project(&zero).hs_norm(), 0.0);
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let m = Matrix::from_rows(vec![vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn construction_absorbs_float_noise() {
        let m = Matrix::from_rows(vec![
            vec![ONE, Complex64::new(0.5, 1e-14)],
            vec![Complex64::new(0.5, 0.0), ONE],
        ])
        .unwrap();
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix().hermiticity_drift(), 0.0);
    }

    #[test]
    fn traceless_basis_qubit_is_normalized_paulis() {
        let basis = traceless_basis(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [sigma_x().scale(s), sigma_y().scale(s), sigma_z().scale(s)];
        for (b, e) in basis.iter().zip(&expected) {
            assert!(b.hs_distance(e) < 1e-15);
        }
    }

    #[test]
    fn traceless_basis_gram_and_traces() {
        for d in 2..=5 {
            let basis = traceless_basis(d).unwrap();
            assert_eq!(basis.len(), d * d - 1);
            for (r, a) in basis.iter().enumerate() {
                assert!(a.trace().abs() < 1e-12);
                for (s, b) in basis.iter().enumerate() {
                    let g = hs_inner(a, b).unwrap();
                    let delta = if r == s { 1.0 } else { 0.0 };
                    assert!((g - delta).abs() < 1e-12, "d={d} ({r},{s}) -> {g}");
                }
            }
        }
        assert!(traceless_basis(1).is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let h = sigma_y();
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(
            text,
            r#"{"dim":2,"re":[[0.0,0.0],[0.0,0.0]],"im":[[0.0,-1.0],[1.0,0.0]]}"#
        );
        let back: HermitianOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn json_rejects_non_hermitian() {
        let text = r#"{"dim":2,"re":[[0,1],[0,0]],"im":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<HermitianOperator>(text).is_err());
    }
}
