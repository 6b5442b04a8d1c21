//! Explicit joint observables: tensor products, disjoint unions and the
//! mixing construction, each checked against the symmetric two-copy
//! feasibility problem.

use kcompat::compat::{is_k_compatible, multi_copy_product_joint};
use kcompat::feasibility::{check_witness, FeasibilityProblem, SolverConfig};
use kcompat::observable::{combine_disjoint_joints, ObservableSet};
use kcompat::qubit::{
    busch_pair_joint, mixing_joint_observable, noisy_spin, Axis, MixingParams, NoisySpinTriple,
};
use kcompat::symmetry::{symmetrize_observable, symmetrizer};
use kcompat::Result;

fn two_copy_problem(set: &ObservableSet) -> Result<FeasibilityProblem> {
    let targets = set
        .members()
        .iter()
        .map(|m| symmetrize_observable(m, 2))
        .collect::<Result<Vec<_>>>()?;
    FeasibilityProblem::symmetric(targets, 2)
}

fn main() -> Result<()> {
    // sharp X and Y: incompatible, but one copy each suffices
    let sharp = ObservableSet::named(
        ["X", "Y"],
        vec![noisy_spin(Axis::X, 1.0)?, noisy_spin(Axis::Y, 1.0)?],
    )?;
    let product = multi_copy_product_joint(&sharp, 2)?;
    println!(
        "sharp X, Y: symmetrized product joint valid for two copies: {}",
        check_witness(&two_copy_problem(&sharp)?, &product, 1e-10)?
    );

    // a compatible pair on one copy plus a third observable on another
    let joint_xz = busch_pair_joint(Axis::X, 0.8, Axis::Z, 0.6)?;
    let y = noisy_spin(Axis::Y, 1.0)?;
    let union = combine_disjoint_joints(&joint_xz, &y)?
        .map_effects(|g| symmetrizer(2, g).unwrap().into_op())?;
    let set = ObservableSet::named(
        ["X", "Z", "Y"],
        vec![noisy_spin(Axis::X, 0.8)?, noisy_spin(Axis::Z, 0.6)?, y],
    )?;
    println!(
        "X_0.8, Z_0.6 jointly, Y sharp separately: two-copy witness valid: {}",
        check_witness(&two_copy_problem(&set)?, &union, 1e-10)?
    );

    // random choice of which observable to measure alone
    let e = (1.0 + 2f64.sqrt()) / 3.0;
    let triple = NoisySpinTriple::uniform(e)?;
    let params = MixingParams::balanced();
    let mixing = mixing_joint_observable(&triple, &params)?
        .map_effects(|g| symmetrizer(2, g).unwrap().into_op())?;
    println!(
        "mixing construction at a = {e:.6} (bounds {:?}): witness valid: {}",
        params.bounds(),
        check_witness(&two_copy_problem(&triple.observables())?, &mixing, 1e-9)?
    );

    // the solver agrees
    let report = is_k_compatible(&triple.observables(), 2, &SolverConfig::default())?;
    println!(
        "solver on the same triple: {} after {} iterations, residual {:.1e}",
        report.verdict, report.iterations, report.residual
    );
    Ok(())
}
