//! Builds the compatibility stack of `{X_a, Y_b, Z_c}` for six parameter
//! choices, one per three-vertex stack shape, and shows where each verdict
//! came from.

use kcompat::compat::{build_stack, Source};
use kcompat::qubit::{NoisySpinTriple, QubitAnalyticOracle};
use kcompat::stacks::edge_index;
use kcompat::Result;

fn main() -> Result<()> {
    let e = (1.0 + 2f64.sqrt()) / 3.0;
    let cases = [
        ("a", [1.0 / 3f64.sqrt(); 3]),
        ("b", [0.5f64.sqrt(); 3]),
        ("c", [0.8, 0.8, 0.6]),
        ("d", [0.8, 1.0, 0.6]),
        ("e", [e; 3]),
        ("f", [1.0; 3]),
    ];
    for (label, [a, b, c]) in cases {
        let triple = NoisySpinTriple::new(a, b, c)?;
        let built = build_stack(&triple.observables(), &QubitAnalyticOracle::new(triple))?;
        let stack = &built.stack;
        println!(
            "({label}) a = {a:.4}, b = {b:.4}, c = {c:.4}: {} oracle queries",
            built.queries
        );
        for s in 1..=stack.full() {
            let members = stack.subset_label(s).join("");
            if members.len() < 2 {
                continue;
            }
            let index = edge_index(stack, s)?.index;
            let sources: Vec<String> = built.provenance[&stack.subset_label(s).join(",")]
                .iter()
                .map(|p| {
                    let how = match p.source {
                        Source::Solved => "solved",
                        Source::Implied => "implied",
                    };
                    format!("k={} {} {how}", p.k, if p.member { "yes" } else { "no" })
                })
                .collect();
            println!("    {members:<3} index {index}   [{}]", sources.join("; "));
        }
    }
    Ok(())
}
