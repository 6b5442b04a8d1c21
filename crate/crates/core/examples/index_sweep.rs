//! Index of incompatibility of `{X_a, Y_a, Z_a}` as a function of `a`,
//! printed as CSV and as a coarse text plot. Grid points are solved in
//! parallel.

use kcompat::compat::index_of_incompatibility;
use kcompat::feasibility::SolverConfig;
use kcompat::qubit::NoisySpinTriple;
use kcompat::Result;
use rayon::prelude::*;

fn main() -> Result<()> {
    let config = SolverConfig::default();
    let grid: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
    let rows = grid
        .par_iter()
        .map(|&a| {
            let set = NoisySpinTriple::uniform(a)?.observables();
            Ok((a, index_of_incompatibility(&set, &config)?.index))
        })
        .collect::<Result<Vec<_>>>()?;

    println!("a,index");
    for (a, index) in &rows {
        println!("{a},{index}");
    }
    println!();
    for level in (1..=3).rev() {
        let line: String = rows
            .iter()
            .map(|&(_, i)| if i >= level { '#' } else { ' ' })
            .collect();
        println!("{level} |{line}");
    }
    println!("  +{}", "-".repeat(rows.len()));
    println!("   0{}1", " ".repeat(rows.len() - 2));
    Ok(())
}
