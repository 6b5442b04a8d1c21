//! Observables beyond the built-in qubit families: qutrit measurements in
//! mutually unbiased bases with white noise, written to and read back from
//! JSON, then checked for k-compatibility. Three copies of a qutrit exceed
//! the default dimension cap of 16.

use kcompat::compat::{index_of_incompatibility, is_k_compatible};
use kcompat::feasibility::SolverConfig;
use kcompat::observable::{Observable, ObservableSet};
use kcompat::operator::{HermitianOperator, Matrix};
use kcompat::Result;
use num_complex::Complex64;

/// Rank-one projections onto the columns of `basis`, mixed with `(1 − t)·I/3`.
fn noisy_basis(basis: &[[Complex64; 3]; 3], t: f64) -> Result<Observable> {
    let id = HermitianOperator::identity(3);
    let effects = basis
        .iter()
        .map(|v| {
            let proj = HermitianOperator::new(Matrix::from_fn(3, |i, j| v[i] * v[j].conj()))?;
            Ok(&proj.scale(t) + &id.scale((1.0 - t) / 3.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Observable::new(["0", "1", "2"], effects)
}

fn main() -> Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let s = 1.0 / 3f64.sqrt();
    let computational = [[one, zero, zero], [zero, one, zero], [zero, zero, one]];
    let fourier = [0, 1, 2].map(|j| [0, 1, 2].map(|i| w.powi(i * j) * s));
    // a second unbiased basis: Fourier columns with a quadratic phase
    let chirp = [0, 1, 2].map(|j| [0, 1, 2].map(|i| w.powi(i * j + i * i) * s));

    let config = SolverConfig::default();
    for t in [0.4, 0.6, 0.8, 1.0] {
        let triple = ObservableSet::named(
            ["Z", "F", "G"],
            vec![
                noisy_basis(&computational, t)?,
                noisy_basis(&fourier, t)?,
                noisy_basis(&chirp, t)?,
            ],
        )?;
        let json = serde_json::to_string(&triple)?;
        let back: ObservableSet = serde_json::from_str(&json)?;
        let pair = back.subset(&[0, 1])?;
        let result = index_of_incompatibility(&pair, &config)?;
        let verdicts: Vec<String> = result
            .per_k
            .iter()
            .map(|l| format!("k={}: {}", l.k, l.report.verdict))
            .collect();
        println!(
            "t = {t}: pair Z, F has index {} ({}); triple at one copy: {}",
            result.index,
            verdicts.join(", "),
            is_k_compatible(&back, 1, &config)?.verdict
        );
    }
    let triple = ObservableSet::new(vec![
        noisy_basis(&computational, 1.0)?,
        noisy_basis(&fourier, 1.0)?,
        noisy_basis(&chirp, 1.0)?,
    ])?;
    match is_k_compatible(&triple, 3, &config) {
        Ok(r) => println!("three copies: {}", r.verdict),
        Err(e) => println!("three copies: {e}"),
    }
    Ok(())
}
