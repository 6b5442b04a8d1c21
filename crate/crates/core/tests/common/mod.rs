//! Helpers shared by the integration tests: random operators and states,
//! independent marginal and statistics computations, and a brute-force stack
//! predicate.

#![allow(dead_code)]

use kcompat::observable::Observable;
use kcompat::operator::{sigma_x, sigma_y, sigma_z, HermitianOperator, Matrix};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hermitian matrix with entries uniform in [-1, 1] (real and imaginary parts).
pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> HermitianOperator {
    let raw = Matrix::from_fn(d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HermitianOperator::symmetrized(raw)
}

/// Random positive semidefinite `B B*`.
pub fn random_psd(rng: &mut impl Rng, d: usize) -> HermitianOperator {
    let b = Matrix::from_fn(d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HermitianOperator::symmetrized(&b * &b.adjoint())
}

/// Random density matrix of dimension `d`.
pub fn random_state(rng: &mut impl Rng, d: usize) -> HermitianOperator {
    let p = random_psd(rng, d);
    let tr = p.trace();
    p.scale(1.0 / tr)
}

/// Random Bloch vector with norm at most `r`.
pub fn random_bloch(rng: &mut impl Rng, r: f64) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v.map(|x| x * r);
        }
    }
}

pub fn bloch_op(c0: f64, v: [f64; 3]) -> HermitianOperator {
    let s = &(&sigma_x().scale(v[0]) + &sigma_y().scale(v[1])) + &sigma_z().scale(v[2]);
    &HermitianOperator::identity(2).scale(c0) + &s
}

/// Random two-outcome qubit observable `{E, I − E}`.
pub fn random_two_outcome(rng: &mut impl Rng) -> Observable {
    let c0: f64 = rng.gen_range(0.0..1.0);
    let v = random_bloch(rng, c0.min(1.0 - c0));
    let e = bloch_op(c0, v);
    let rest = &HermitianOperator::identity(2) - &e;
    Observable::new(["0", "1"], vec![e, rest]).unwrap()
}

/// `tr[ρ^{⊗k} M]`.
pub fn product_expectation(rho: &HermitianOperator, k: usize, m: &HermitianOperator) -> f64 {
    let mut state = rho.clone();
    for _ in 1..k {
        state = state.tensor(rho);
    }
    state.hs_inner(m).unwrap()
}

/// Marginal effects of factor `i` of a joint observable, summed directly over
/// the row-major product enumeration.
pub fn direct_marginal(g: &Observable, i: usize) -> Vec<HermitianOperator> {
    let sizes: Vec<usize> = g.factors().iter().map(Vec::len).collect();
    let mut out = vec![HermitianOperator::zeros(g.space_dim()); sizes[i]];
    for (flat, effect) in g.effects().iter().enumerate() {
        let mut rem = flat;
        let mut digit = 0;
        for (f, &size) in sizes.iter().enumerate().rev() {
            if f == i {
                digit = rem % size;
            }
            rem /= size;
        }
        out[digit] += effect;
    }
    out
}

/// `½(I ⊗ E + E ⊗ I)` on two qubits.
pub fn two_copy_sym(e: &HermitianOperator) -> HermitianOperator {
    let id = HermitianOperator::identity(e.dim());
    (&id.tensor(e) + &e.tensor(&id)).scale(0.5)
}

pub fn max_dist(a: &[HermitianOperator], b: &[HermitianOperator]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.hs_distance(y))
        .fold(0.0, f64::max)
}

/// Levels as membership tables indexed by subset mask (index 0 unused).
pub type Levels = Vec<Vec<bool>>;

/// Direct evaluation of the three stack conditions.
pub fn brute_force_stack(n: usize, levels: &Levels) -> bool {
    let full = (1usize << n) - 1;
    let in_level = |k: usize, s: usize| levels[k - 1][s];
    // downward closure per level
    for k in 1..=n {
        for a in 1..=full {
            for b in 1..=full {
                if b & !a == 0 && in_level(k, a) && !in_level(k, b) {
                    return false;
                }
            }
        }
    }
    // singletons at level 1, everything at level n
    if (0..n).any(|v| !in_level(1, 1 << v)) || (1..=full).any(|s| !in_level(n, s)) {
        return false;
    }
    // unions
    for k in 1..=n {
        for l in 1..=n {
            for a in 1..=full {
                for b in 1..=full {
                    if in_level(k, a) && in_level(l, b) && !in_level((k + l).min(n), a | b) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

pub fn levels_to_edges(levels: &Levels) -> Vec<Vec<u32>> {
    levels
        .iter()
        .map(|l| (1..l.len()).filter(|&s| l[s]).map(|s| s as u32).collect())
        .collect()
}

pub fn vertex_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| ((b'A' + i as u8) as char).to_string())
        .collect()
}
