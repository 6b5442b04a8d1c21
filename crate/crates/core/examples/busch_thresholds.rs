//! Locates the one-copy joint measurability thresholds of noisy orthogonal
//! spin observables by bisection and compares them with the Busch values.
//!
//! ```text
//! cargo run --release --example busch_thresholds
//! ```

use kcompat::feasibility::{solve, threshold_bisect, FeasibilityProblem, SolverConfig};
use kcompat::qubit::{busch_pair_compatible, noisy_spin, Axis};
use kcompat::Result;

fn family(axes: &'static [Axis]) -> impl Fn(f64) -> Result<FeasibilityProblem> {
    move |t| {
        FeasibilityProblem::new(
            axes.iter()
                .map(|&a| noisy_spin(a, t))
                .collect::<Result<_>>()?,
        )
    }
}

fn main() -> Result<()> {
    let config = SolverConfig::default();

    // a few single verdicts first
    for (a, b) in [(0.6, 0.7), (0.6, 0.8), (0.7, 0.8)] {
        let problem =
            FeasibilityProblem::new(vec![noisy_spin(Axis::X, a)?, noisy_spin(Axis::Y, b)?])?;
        let report = solve(&problem, config.budget)?;
        println!(
            "X_{a} and Y_{b}: {} after {} iterations (criterion says {})",
            report.verdict,
            report.iterations,
            if busch_pair_compatible(a, b)? {
                "compatible"
            } else {
                "incompatible"
            }
        );
    }

    let cases: [(&str, &'static [Axis], f64); 2] = [
        ("{X_t, Y_t}", &[Axis::X, Axis::Y], 0.5f64.sqrt()),
        ("{X_t, Y_t, Z_t}", &Axis::ALL, 1.0 / 3f64.sqrt()),
    ];
    for (name, axes, exact) in cases {
        let found = threshold_bisect(family(axes), 0.0, 1.0, 1e-3, &config)?;
        println!(
            "{name}: threshold {:.5} in [{:.5}, {:.5}], exact {exact:.5}, {} solves / {} iterations",
            found.threshold,
            found.bracket.0,
            found.bracket.1,
            found.evaluations.len(),
            found.total_iterations()
        );
    }
    Ok(())
}
