//! The octahedrally covariant two-copy joint observables of `X, Y, Z`:
//! positivity over the parameter triangle, the rotation group, covariance,
//! and the spectral projections used to analyze the family.

use kcompat::qubit::{
    covariance_generator_check, covariant_effect, covariant_marginal_noise, covariant_observable,
    covariant_polytope_vertices, covariantize, cube_vertices, generate_group, is_covariant,
    mixing_joint_observable, mpq_operators, octahedral_generators, CovariantParams, MixingParams,
    NoisySpinTriple,
};
use kcompat::symmetry::symmetrizer;
use kcompat::Result;

fn main() -> Result<()> {
    println!("vertices of the parameter triangle:");
    for p in covariant_polytope_vertices() {
        let min_eig = cube_vertices()
            .into_iter()
            .map(|u| covariant_effect(&p, u).min_eigenvalue())
            .fold(f64::INFINITY, f64::min);
        println!(
            "  alpha = {:.3}, beta = {:.3}: marginal t = {:+.6}, smallest effect eigenvalue {min_eig:.2e}",
            p.alpha,
            p.beta,
            covariant_marginal_noise(&p)
        );
    }
    let outside = CovariantParams::unchecked(0.3, 0.2);
    let min_eig = cube_vertices()
        .into_iter()
        .map(|u| covariant_effect(&outside, u).min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    println!("  outside (0.3, 0.2): smallest eigenvalue {min_eig:.4}");

    let group = generate_group(&octahedral_generators());
    println!(
        "\nrotation group generated by quarter turns: {} elements",
        group.len()
    );
    let p = CovariantParams::new(0.25, 0.05)?;
    println!(
        "generator covariance at {p:?}: {}",
        covariance_generator_check(&p)?
    );
    println!(
        "full-group covariance: {}",
        is_covariant(&covariant_observable(&p)?, &group, 1e-10)?
    );

    // averaging a lopsided mixing joint over the group
    let params = MixingParams::new([0.5, 0.3, 0.2], [0.3, 0.9, 1.1])?;
    let t = params.bounds().into_iter().fold(f64::INFINITY, f64::min);
    let mixing = mixing_joint_observable(&NoisySpinTriple::uniform(t)?, &params)?
        .map_effects(|g| symmetrizer(2, g).expect("two-qubit effect").into_op())?;
    println!(
        "\nmixing joint at t = {t:.4} covariant: {}; after averaging: {}",
        is_covariant(&mixing, &group, 1e-10)?,
        is_covariant(&covariantize(&mixing, &group)?, &group, 1e-10)?
    );

    let ops = mpq_operators();
    println!("\nspectral projections (trace, rank-one check):");
    for (name, proj) in ["P+", "P-", "Q+", "Q-"].iter().zip(ops.projections()) {
        let square = proj.matrix() * proj.matrix();
        println!(
            "  {name}: trace {:.3}, |P^2 - P| = {:.1e}",
            proj.trace(),
            square.max_abs_diff(proj.matrix())
        );
    }
    Ok(())
}
