//! Two copies of the state: the largest noise parameter for which
//! `X_t, Y_t, Z_t` are 2-compatible, found two ways. Analytically, by
//! maximizing the marginal sharpness of the covariant family over its
//! parameter triangle; numerically, by bisecting the symmetric two-copy
//! feasibility problem.

use kcompat::feasibility::{threshold_bisect, FeasibilityProblem, SolverConfig};
use kcompat::qubit::{
    covariant_marginal_noise, covariant_observable, noisy_spin, two_copy_threshold_analytic, Axis,
};
use kcompat::symmetry::symmetrize_observable;
use kcompat::Result;

fn main() -> Result<()> {
    let (analytic, best) = two_copy_threshold_analytic();
    println!(
        "analytic: t = {analytic:.12} at alpha = {}, beta = {}",
        best.alpha, best.beta
    );
    println!("sqrt(3)/2 = {:.12}", 3f64.sqrt() / 2.0);

    let joint = covariant_observable(&best)?;
    println!(
        "optimal covariant joint: {} outcomes on dimension {}, valid = {}, marginal t = {:.12}",
        joint.len(),
        joint.space_dim(),
        joint.validate().is_ok(),
        covariant_marginal_noise(&best)
    );

    let family = |t: f64| {
        let targets = Axis::ALL
            .iter()
            .map(|&a| symmetrize_observable(&noisy_spin(a, t)?, 2))
            .collect::<Result<Vec<_>>>()?;
        FeasibilityProblem::symmetric(targets, 2)
    };
    let found = threshold_bisect(family, 0.0, 1.0, 1e-3, &SolverConfig::default())?;
    println!(
        "numerical: t = {:.5}, bracket [{:.5}, {:.5}], {} iterations",
        found.threshold,
        found.bracket.0,
        found.bracket.1,
        found.total_iterations()
    );
    for e in &found.evaluations {
        println!(
            "  t = {:.6}  {:<10}  residual {:.2e}",
            e.t,
            e.verdict.to_string(),
            e.residual
        );
    }
    Ok(())
}
