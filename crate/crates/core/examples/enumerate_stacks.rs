//! Enumerates all compatibility stacks on up to five vertices, up to
//! relabeling, and prints the four-vertex summary table.

use kcompat::stacks::{
    bulk_index, canonicalize, enumerate_stacks, index_two_pairs, reciprocal_rule_check, summary_csv,
};
use kcompat::Result;

fn main() -> Result<()> {
    for n in 1..=5 {
        let start = std::time::Instant::now();
        let stacks = enumerate_stacks(n)?;
        println!("n = {n}: {} stacks ({:.1?})", stacks.len(), start.elapsed());
    }

    println!("\nthree vertices (index of A, B, AB, C, AC, BC, ABC):");
    for s in enumerate_stacks(3)? {
        println!("  {:?}", canonicalize(&s)?.code);
    }

    let four = enumerate_stacks(4)?;
    println!("\nfour vertices by bulk index and number of index-2 pairs:");
    print!("{}", summary_csv(&four, 4)?);

    let all_reciprocal = four
        .iter()
        .map(reciprocal_rule_check)
        .collect::<Result<Vec<_>>>()?;
    println!(
        "\nreciprocal-pair rule holds on all: {}",
        all_reciprocal.iter().all(|&b| b)
    );
    let widest = four
        .iter()
        .max_by_key(|s| (bulk_index(s).unwrap(), index_two_pairs(s)))
        .unwrap();
    println!(
        "\nstack with the largest bulk index:\n{}",
        serde_json::to_string_pretty(&widest.to_json(None))?
    );
    Ok(())
}
