//! The symmetrizer on `k` copies, the symmetric product and an orthonormal
//! basis of the symmetric operators.

use kcompat::operator::{sigma_x, sigma_y, sigma_z, HermitianOperator};
use kcompat::symmetry::{
    hs_sym_formula, sym_basis, sym_product, sym_product_all, symmetrizer, SymmetricOperator,
};
use kcompat::Result;

fn main() -> Result<()> {
    let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
    let id = HermitianOperator::identity(2);

    // X ⊗ Z is not symmetric; its symmetrization is ½(X⊗Z + Z⊗X)
    let xz = x.tensor(&z);
    let sym = symmetrizer(2, &xz)?;
    let expected = (&xz + &z.tensor(&x)).scale(0.5);
    println!(
        "Σ₂(X⊗Z) = ½(X⊗Z + Z⊗X): error {:.1e}",
        sym.op().hs_distance(&expected)
    );
    println!(
        "Σ₂ idempotent: error {:.1e}",
        symmetrizer(2, sym.op())?.op().hs_distance(sym.op())
    );

    // I ⊙ X is the two-copy version of X used for 2-compatibility
    let ix = sym_product(
        &SymmetricOperator::single(id.clone()),
        &SymmetricOperator::single(x.clone()),
    )?;
    println!("I ⊙ X eigenvalues: {:?}", rounded(ix.op().eigenvalues()));

    let a = [x.clone(), y.clone(), z.clone()];
    let b = [z.clone(), x.clone(), y.clone()];
    let direct = sym_product_all(&a)?
        .op()
        .hs_inner(sym_product_all(&b)?.op())?;
    println!(
        "⟨X⊙Y⊙Z, Z⊙X⊙Y⟩ = {direct:.6} (permanent formula: {:.6})",
        hs_sym_formula(&a, &b)?
    );

    for k in 1..=3 {
        let basis = sym_basis(2, k)?;
        let mut worst: f64 = 0.0;
        for (i, p) in basis.iter().enumerate() {
            for (j, q) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.op().hs_inner(q.op())? - target).abs());
            }
        }
        println!(
            "qubit, k = {k}: {} basis elements, Gram error {worst:.1e}",
            basis.len()
        );
    }
    Ok(())
}

fn rounded(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| (x * 1e9).round() / 1e9).collect()
}
