//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use itertools::Itertools;
use kcompat::cli;
use kcompat::compat::{build_stack, is_k_compatible};
use kcompat::feasibility::{
    check_witness, threshold_bisect, FeasibilityProblem, SolverConfig, Verdict,
};
use kcompat::observable::{combine_disjoint_joints, product_joint, Observable, ObservableSet};
use kcompat::operator::{HermitianOperator, Matrix};
use kcompat::qubit::{
    busch_pair_joint, covariance_generator_check, covariant_effect, covariant_observable,
    cube_vertices, mixing_joint_observable, mpq_operators, noisy_spin, two_copy_threshold_analytic,
    Axis, CovariantParams, MixingParams, NoisySpinTriple, QubitAnalyticOracle,
};
use kcompat::stacks::{canonicalize, enumerate_stacks, validate_stack, CompatibilityStack, Subset};
use kcompat::symmetry::{
    hs_sym_formula, sym_basis, sym_product_all, symmetrize_observable, symmetrizer,
};
use rand::Rng;

use common::*;

// Tolerances and limits, fixed here.
const THRESHOLD_TOL: f64 = 2e-3;
const BISECT_TOL: f64 = 1e-3;
const ANALYTIC_TOL: f64 = 1e-12;
const SYM_TOL: f64 = 1e-10;
const SYM_FORMULA_TOL: f64 = 1e-9;
const GRAM_TOL: f64 = 1e-9;
const COVARIANT_TOL: f64 = 1e-10;
const MPQ_TOL: f64 = 1e-12;
const MARGINAL_TOL: f64 = 1e-10;
const MIXING_TOL: f64 = 1e-9;

const LIMIT_ENUM: Duration = Duration::from_secs(10);
const LIMIT_PAIR: Duration = Duration::from_secs(60);
const LIMIT_TRIPLE: Duration = Duration::from_secs(120);
const LIMIT_TWO_COPY: Duration = Duration::from_secs(600);
const LIMIT_SYMMETRY: Duration = Duration::from_secs(30);

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

// The six three-vertex stacks as level edge lists, bits A = 1, B = 2, C = 4.
const SINGLES: [Subset; 3] = [1, 2, 4];
const PAIRS: [Subset; 3] = [3, 5, 6];

fn three_vertex_stack(
    names: &[&str; 3],
    level1_pairs: &[Subset],
    triple_index: usize,
) -> CompatibilityStack {
    let mut e1: Vec<Subset> = SINGLES.iter().chain(level1_pairs).copied().collect();
    let mut e2: Vec<Subset> = SINGLES.iter().chain(&PAIRS).copied().collect();
    if triple_index == 1 {
        e1.push(7);
    }
    if triple_index <= 2 {
        e2.push(7);
    }
    let names = names.iter().map(|s| s.to_string()).collect();
    CompatibilityStack::new(names, vec![e1, e2, (1..=7).collect()]).unwrap()
}

/// (a)..(f): all index 1; pairs index 1 and triple 2; pairs AC, BC at index 1;
/// only AC at index 1; pairs index 2 and triple 2; pairs index 2 and triple 3.
fn reference_stacks(names: &[&str; 3]) -> Vec<(char, CompatibilityStack)> {
    vec![
        ('a', three_vertex_stack(names, &PAIRS, 1)),
        ('b', three_vertex_stack(names, &PAIRS, 2)),
        ('c', three_vertex_stack(names, &[5, 6], 2)),
        ('d', three_vertex_stack(names, &[5], 2)),
        ('e', three_vertex_stack(names, &[], 2)),
        ('f', three_vertex_stack(names, &[], 3)),
    ]
}

fn criterion_1() -> Check {
    let three = enumerate_stacks(3).map_err(err)?;
    ensure(three.len() == 6, || {
        format!("n=3 gave {} stacks", three.len())
    })?;
    let got: BTreeSet<Vec<u8>> = three
        .iter()
        .map(|s| canonicalize(s).unwrap().code)
        .collect();
    let want: BTreeSet<Vec<u8>> = reference_stacks(&["A", "B", "C"])
        .iter()
        .map(|(_, s)| {
            assert!(validate_stack(s).is_valid());
            canonicalize(s).unwrap().code
        })
        .collect();
    ensure(got == want, || {
        "n=3 stacks differ from the six reference shapes".into()
    })?;

    let four = enumerate_stacks(4).map_err(err)?;
    ensure(four.len() == 34, || {
        format!("n=4 gave {} stacks", four.len())
    })?;
    // rows: bulk index 1..4; columns: number of index-2 pairs 0..6
    const TABLE: [[usize; 7]; 4] = [
        [1, 0, 0, 0, 0, 0, 0],
        [5, 3, 3, 4, 2, 1, 1],
        [0, 0, 0, 3, 2, 3, 5],
        [0, 0, 0, 0, 0, 0, 1],
    ];
    let mut table = [[0usize; 7]; 4];
    for s in &four {
        let bulk = (1..=4).find(|&k| s.level(k).contains(15)).unwrap();
        let pairs = (1..16u32)
            .filter(|m| m.count_ones() == 2 && !s.level(1).contains(*m) && s.level(2).contains(*m))
            .count();
        table[bulk - 1][pairs] += 1;
    }
    ensure(table == TABLE, || format!("n=4 table {table:?}"))?;
    Ok("6 and 34 stacks, table matches".into())
}

fn pair_family(t: f64) -> kcompat::Result<FeasibilityProblem> {
    FeasibilityProblem::new(vec![noisy_spin(Axis::X, t)?, noisy_spin(Axis::Y, t)?])
}

fn triple_family(t: f64, k: usize) -> kcompat::Result<FeasibilityProblem> {
    let targets = Axis::ALL
        .iter()
        .map(|&a| symmetrize_observable(&noisy_spin(a, t)?, k))
        .collect::<kcompat::Result<Vec<_>>>()?;
    if k == 1 {
        FeasibilityProblem::new(targets)
    } else {
        FeasibilityProblem::symmetric(targets, k)
    }
}

fn bisect(family: impl Fn(f64) -> kcompat::Result<FeasibilityProblem>, expected: f64) -> Check {
    let found =
        threshold_bisect(family, 0.0, 1.0, BISECT_TOL, &SolverConfig::default()).map_err(err)?;
    let diff = (found.threshold - expected).abs();
    ensure(diff <= THRESHOLD_TOL, || {
        format!(
            "threshold {} vs {expected} (|Δ| = {diff:.2e})",
            found.threshold
        )
    })?;
    Ok(format!(
        "threshold {:.5} (|Δ| = {diff:.1e}, {} solver iterations)",
        found.threshold,
        found.total_iterations()
    ))
}

fn criterion_2() -> Check {
    bisect(pair_family, 0.5f64.sqrt())
}

fn criterion_3() -> Check {
    bisect(|t| triple_family(t, 1), 1.0 / 3f64.sqrt())
}

fn criterion_4() -> Check {
    let expected = 3f64.sqrt() / 2.0;
    let (analytic, at) = two_copy_threshold_analytic();
    ensure((analytic - expected).abs() <= ANALYTIC_TOL, || {
        format!("analytic maximum {analytic} at {at:?}")
    })?;
    let numeric = bisect(|t| triple_family(t, 2), expected)?;
    Ok(format!("analytic {analytic:.15}; numerical {numeric}"))
}

fn criterion_5() -> Check {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let args = [
        "kcompat",
        "sweep",
        "triple:xyz:index",
        "--grid",
        "0.05:0.95:0.05",
    ];
    let code = cli::run(args, &mut out, &mut errs);
    ensure(code == 0, || {
        format!("sweep exited {code}: {}", String::from_utf8_lossy(&errs))
    })?;
    let text = String::from_utf8(out).map_err(err)?;
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let mut count = 0;
    for record in rows.records() {
        let record = record.map_err(err)?;
        let a: f64 = record[0].parse().map_err(err)?;
        let index: usize = record[1].parse().map_err(err)?;
        let expected = if a <= 0.55 + 1e-9 {
            1
        } else if a <= 0.85 + 1e-9 {
            2
        } else {
            3
        };
        ensure(index == expected, || {
            format!("a = {a}: index {index}, expected {expected}")
        })?;
        count += 1;
    }
    ensure(count == 19, || format!("{count} rows"))?;
    Ok("19 grid points, steps between 0.55/0.60 and 0.85/0.90".into())
}

fn criterion_6() -> Check {
    let e = (1.0 + 2f64.sqrt()) / 3.0;
    let s3 = 1.0 / 3f64.sqrt();
    let s2 = 0.5f64.sqrt();
    let cases = [
        ('a', [s3, s3, s3]),
        ('b', [s2, s2, s2]),
        ('c', [0.8, 0.8, 0.6]),
        ('d', [0.8, 1.0, 0.6]),
        ('e', [e, e, e]),
        ('f', [1.0, 1.0, 1.0]),
    ];
    let reference: BTreeMap<char, CompatibilityStack> =
        reference_stacks(&["X", "Y", "Z"]).into_iter().collect();
    for (label, [a, b, c]) in cases {
        let triple = NoisySpinTriple::new(a, b, c).map_err(err)?;
        let built =
            build_stack(&triple.observables(), &QubitAnalyticOracle::new(triple)).map_err(err)?;
        ensure(built.stack == reference[&label], || {
            format!(
                "case ({label}): index vector {:?}",
                built.stack.index_vector()
            )
        })?;
    }
    // the mixed cases at two copies: an explicit witness G_XZ(x,z) ⊗ Y(y),
    // symmetrized, for both; the solver alone for (c)
    let mut solver_notes = Vec::new();
    for (label, [a, b, c]) in [('c', [0.8, 0.8, 0.6]), ('d', [0.8, 1.0, 0.6])] {
        let set = NoisySpinTriple::new(a, b, c).map_err(err)?.observables();
        let targets = set
            .members()
            .iter()
            .map(|m| symmetrize_observable(m, 2))
            .collect::<kcompat::Result<Vec<_>>>()
            .map_err(err)?;
        let problem = FeasibilityProblem::symmetric(targets, 2).map_err(err)?;

        let gxz = busch_pair_joint(Axis::X, a, Axis::Z, c).map_err(err)?;
        let y = noisy_spin(Axis::Y, b).map_err(err)?;
        let mut effects = Vec::new();
        for x in 0..2 {
            for yy in 0..2 {
                for z in 0..2 {
                    let raw = gxz.effects()[2 * x + z].tensor(&y.effects()[yy]);
                    effects.push(symmetrizer(2, &raw).map_err(err)?.into_op());
                }
            }
        }
        let witness = Observable::joint(vec![y.outcomes().to_vec(); 3], effects).map_err(err)?;
        ensure(
            check_witness(&problem, &witness, MIXING_TOL).map_err(err)?,
            || format!("case ({label}): explicit two-copy witness rejected"),
        )?;

        let report = is_k_compatible(&set, 2, &SolverConfig::default()).map_err(err)?;
        if label == 'c' {
            ensure(report.verdict == Verdict::Feasible, || {
                format!(
                    "case ({label}) at two copies: solver says {}",
                    report.verdict
                )
            })?;
            let ok =
                check_witness(&problem, report.witness.as_ref().unwrap(), 1e-7).map_err(err)?;
            ensure(ok, || format!("case ({label}): solver witness rejected"))?;
        }
        solver_notes.push(format!(
            "({label}) solver {} at residual {:.1e}",
            report.verdict, report.residual
        ));
    }
    // case (e): the mixing construction, symmetrized, has marginals ½(I⊗A + A⊗I)
    let triple = NoisySpinTriple::uniform(e).map_err(err)?;
    let raw = mixing_joint_observable(&triple, &MixingParams::balanced()).map_err(err)?;
    let sym = raw
        .map_effects(|g| symmetrizer(2, g).unwrap().into_op())
        .map_err(err)?;
    ensure(sym.validate().is_ok(), || {
        "mixing joint is not an observable".into()
    })?;
    let mut worst: f64 = 0.0;
    for (i, axis) in Axis::ALL.iter().enumerate() {
        let target: Vec<HermitianOperator> = noisy_spin(*axis, e)
            .map_err(err)?
            .effects()
            .iter()
            .map(two_copy_sym)
            .collect();
        worst = worst.max(max_dist(&direct_marginal(&sym, i), &target));
    }
    ensure(worst < MIXING_TOL, || {
        format!("mixing marginal error {worst:.2e}")
    })?;
    Ok(format!(
        "six stacks reproduced; two-copy witnesses for (c), (d); {}; mixing witness error {worst:.1e}",
        solver_notes.join(", ")
    ))
}

fn criterion_7() -> Check {
    let mut rng = rng(7);
    let mut worst_sym: f64 = 0.0;
    for k in 2..=3 {
        let dim = 2usize.pow(k as u32);
        let id = HermitianOperator::identity(dim);
        worst_sym = worst_sym.max(symmetrizer(k, &id).map_err(err)?.op().hs_distance(&id));
        for _ in 0..50 {
            let a = random_hermitian(&mut rng, dim);
            let b = random_hermitian(&mut rng, dim);
            let sa = symmetrizer(k, &a).map_err(err)?.into_op();
            let ssa = symmetrizer(k, &sa).map_err(err)?.into_op();
            worst_sym = worst_sym.max(ssa.hs_distance(&sa));
            let sb = symmetrizer(k, &b).map_err(err)?.into_op();
            let lhs = sa.hs_inner(&b).map_err(err)?;
            let rhs = a.hs_inner(&sb).map_err(err)?;
            worst_sym = worst_sym.max((lhs - rhs).abs());
        }
    }
    ensure(worst_sym < SYM_TOL, || {
        format!("symmetrizer error {worst_sym:.2e}")
    })?;

    let mut worst_formula: f64 = 0.0;
    for k in 1..=3 {
        for d in [2, 3] {
            for _ in 0..10 {
                let a: Vec<_> = (0..k).map(|_| random_hermitian(&mut rng, d)).collect();
                let b: Vec<_> = (0..k).map(|_| random_hermitian(&mut rng, d)).collect();
                let direct = sym_product_all(&a)
                    .map_err(err)?
                    .op()
                    .hs_inner(sym_product_all(&b).map_err(err)?.op())
                    .map_err(err)?;
                let formula = hs_sym_formula(&a, &b).map_err(err)?;
                worst_formula = worst_formula.max((direct - formula).abs());
            }
        }
    }
    ensure(worst_formula < SYM_FORMULA_TOL, || {
        format!("formula error {worst_formula:.2e}")
    })?;

    let mut worst_gram: f64 = 0.0;
    for (k, size) in [(1, 4), (2, 10), (3, 20)] {
        let basis = sym_basis(2, k).map_err(err)?;
        ensure(basis.len() == size, || {
            format!("k={k}: {} basis elements", basis.len())
        })?;
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let g = x.op().hs_inner(y.op()).map_err(err)?;
                let delta = if i == j { 1.0 } else { 0.0 };
                worst_gram = worst_gram.max((g - delta).abs());
            }
        }
    }
    ensure(worst_gram < GRAM_TOL, || {
        format!("Gram error {worst_gram:.2e}")
    })?;
    Ok(format!(
        "symmetrizer {worst_sym:.1e}, formula {worst_formula:.1e}, Gram {worst_gram:.1e}"
    ))
}

fn criterion_8() -> Check {
    let mut rng = rng(8);
    let id4 = HermitianOperator::identity(4);
    let mut worst_marginal: f64 = 0.0;
    for sample in 0..200 {
        let (alpha, beta) = loop {
            let (x, y) = (rng.gen_range(0.0..0.375), rng.gen_range(0.0..0.375));
            if x + y <= 0.375 {
                break (x, y);
            }
        };
        let p = CovariantParams::new(alpha, beta).map_err(err)?;
        let mut sum = HermitianOperator::zeros(4);
        for u in cube_vertices() {
            let e = covariant_effect(&p, u);
            let m = e.min_eigenvalue();
            ensure(m >= -COVARIANT_TOL, || {
                format!("sample {sample}: eigenvalue {m:e} at {u:?}")
            })?;
            sum += &e;
        }
        ensure(sum.hs_distance(&id4) < COVARIANT_TOL, || {
            format!("sample {sample}: effects do not sum to I")
        })?;

        let a = 4.0 * (alpha - beta) / 3f64.sqrt();
        let g = covariant_observable(&p).map_err(err)?;
        for (i, axis) in Axis::ALL.iter().enumerate() {
            let target: Vec<HermitianOperator> = [1.0, -1.0]
                .iter()
                .map(|s| {
                    two_copy_sym(
                        &(&HermitianOperator::identity(2) + &axis.sigma().scale(s * a)).scale(0.5),
                    )
                })
                .collect();
            worst_marginal = worst_marginal.max(max_dist(&direct_marginal(&g, i), &target));
        }
        ensure(covariance_generator_check(&p).map_err(err)?, || {
            format!("sample {sample}: generator covariance fails")
        })?;
    }
    ensure(worst_marginal < COVARIANT_TOL, || {
        format!("marginal error {worst_marginal:.2e}")
    })?;

    let ops = mpq_operators();
    let [m0, m1, m2, m3, _, _] = &ops.m;
    let mul = |x: &HermitianOperator, y: &HermitianOperator| x.matrix() * y.matrix();
    let dist = |x: &Matrix, y: &HermitianOperator| x.max_abs_diff(y.matrix());
    let table = [
        (
            "M2·M2",
            dist(&mul(m2, m2), &(m0 - &m2.scale(2.0)).scale(1.0 / 3.0)),
        ),
        ("M3·M3", dist(&mul(m3, m3), &(m0 + m1).scale(2.0))),
        ("M1·M3", dist(&mul(m1, m3), m3)),
        ("M2·M3", dist(&mul(m2, m3), &m3.scale(1.0 / 3.0))),
    ];
    let mut worst_mpq: f64 = 0.0;
    for m in &ops.m {
        worst_mpq = worst_mpq.max(dist(&mul(m0, m), m));
    }
    for (name, d) in table {
        ensure(d < MPQ_TOL, || format!("{name} off by {d:e}"))?;
        worst_mpq = worst_mpq.max(d);
    }
    let projections = ops.projections();
    let mut total = HermitianOperator::zeros(4);
    for (i, p) in projections.iter().enumerate() {
        worst_mpq = worst_mpq.max((p.trace() - 1.0).abs());
        for (j, q) in projections.iter().enumerate() {
            let expected = if i == j {
                (*p).clone()
            } else {
                HermitianOperator::zeros(4)
            };
            worst_mpq = worst_mpq.max(dist(&mul(p, q), &expected));
        }
        total += p;
    }
    worst_mpq = worst_mpq.max(total.hs_distance(&id4));
    ensure(worst_mpq < MPQ_TOL, || {
        format!("projection identities off by {worst_mpq:e}")
    })?;
    Ok(format!(
        "200 samples; marginal error {worst_marginal:.1e}; products {worst_mpq:.1e}"
    ))
}

/// Worst statistics mismatch between the joint's marginals and the targets,
/// with `copy_of[i]` the copy each factor acts on.
fn marginal_statistics_error(
    g: &Observable,
    targets: &[Observable],
    copies: usize,
    copy_of: &[usize],
    rng: &mut impl Rng,
) -> f64 {
    let id = HermitianOperator::identity(2);
    let mut worst: f64 = 0.0;
    for (i, target) in targets.iter().enumerate() {
        let marginal = direct_marginal(g, i);
        // operator form: target effect on its copy, identity elsewhere
        let embedded: Vec<HermitianOperator> = target
            .effects()
            .iter()
            .map(|e| {
                let mut acc = if copy_of[i] == 0 {
                    e.clone()
                } else {
                    id.clone()
                };
                for c in 1..copies {
                    acc = acc.tensor(if c == copy_of[i] { e } else { &id });
                }
                acc
            })
            .collect();
        worst = worst.max(max_dist(&marginal, &embedded));
        for _ in 0..20 {
            let rho = random_state(rng, 2);
            for (m, e) in marginal.iter().zip(target.effects()) {
                let lhs = product_expectation(&rho, copies, m);
                let rhs = rho.hs_inner(e).unwrap();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

fn criterion_9() -> Check {
    let mut rng = rng(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let members: Vec<Observable> = (0..3).map(|_| random_two_outcome(&mut rng)).collect();
        let g = product_joint(&ObservableSet::new(members.clone()).map_err(err)?).map_err(err)?;
        worst = worst.max(marginal_statistics_error(
            &g,
            &members,
            3,
            &[0, 1, 2],
            &mut rng,
        ));

        let pair: Vec<Observable> = (0..2).map(|_| random_two_outcome(&mut rng)).collect();
        let g1 = product_joint(&ObservableSet::new(pair.clone()).map_err(err)?).map_err(err)?;
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let radius: f64 = rng.gen_range(0.0..1.0);
        let (p, q) = (radius * theta.cos(), radius * theta.sin());
        let g3 = busch_pair_joint(Axis::X, p, Axis::Z, q).map_err(err)?;
        let combined = combine_disjoint_joints(&g1, &g3).map_err(err)?;
        let mut targets = pair;
        targets.push(noisy_spin(Axis::X, p).map_err(err)?);
        targets.push(noisy_spin(Axis::Z, q).map_err(err)?);
        worst = worst.max(marginal_statistics_error(
            &combined,
            &targets,
            3,
            &[0, 1, 2, 2],
            &mut rng,
        ));
    }
    ensure(worst < MARGINAL_TOL, || {
        format!("marginal error {worst:.2e}")
    })?;
    Ok(format!("40 witnesses, worst error {worst:.1e}"))
}

fn to_levels(n: usize, stack: &CompatibilityStack) -> Levels {
    (1..=n)
        .map(|k| {
            (0..1usize << n)
                .map(|s| s > 0 && stack.level(k).contains(s as Subset))
                .collect()
        })
        .collect()
}

fn agree(n: usize, levels: &Levels) -> std::result::Result<(), String> {
    let stack = CompatibilityStack::new(vertex_names(n), levels_to_edges(levels)).map_err(err)?;
    let fast = validate_stack(&stack).is_valid();
    let brute = brute_force_stack(n, levels);
    ensure(fast == brute, || {
        format!(
            "n={n}: validator {fast}, brute force {brute} on {:?}",
            levels_to_edges(levels)
        )
    })
}

fn criterion_10() -> Check {
    let v = || vec!["A".to_string(), "B".to_string(), "C".to_string()];
    let singles_pairs: Vec<Subset> = vec![1, 2, 4, 3, 5, 6];
    // an index-1 pair beside an index-1 singleton, whole set only at level 3
    let chain_only = CompatibilityStack::new(
        v(),
        vec![vec![1, 2, 4, 3], singles_pairs.clone(), (1..=7).collect()],
    )
    .map_err(err)?;
    // all pairs at index 1, whole set only at level 3
    let late_whole = CompatibilityStack::new(
        v(),
        vec![singles_pairs.clone(), singles_pairs, (1..=7).collect()],
    )
    .map_err(err)?;
    for (name, s) in [("first", &chain_only), ("second", &late_whole)] {
        let report = validate_stack(s);
        ensure(!report.is_valid() && report.cites("S3"), || {
            format!("{name} impossible configuration not rejected via S3")
        })?;
    }

    let mut enumerated = 0;
    for n in 1..=4 {
        for s in enumerate_stacks(n).map_err(err)? {
            ensure(validate_stack(&s).is_valid(), || {
                format!("enumerated stack rejected: {s:?}")
            })?;
            enumerated += 1;
        }
    }

    // every level sequence for n ≤ 3
    let mut candidates = 0usize;
    for n in 1..=3usize {
        let subsets = (1usize << n) - 1;
        let bits = subsets * n;
        for code in 0u64..(1 << bits) {
            let levels: Levels = (0..n)
                .map(|k| {
                    (0..=subsets)
                        .map(|s| s > 0 && code >> (k * subsets + s - 1) & 1 == 1)
                        .collect()
                })
                .collect();
            agree(n, &levels)?;
            candidates += 1;
        }
    }

    // n = 4: relabelings of every valid stack and all their one-bit mutations,
    // plus random nested level sequences
    let mut rng = rng(10);
    for s in enumerate_stacks(4).map_err(err)? {
        for perm in (0..4usize).permutations(4) {
            let base = to_levels(4, &s.permuted(&perm).map_err(err)?);
            agree(4, &base)?;
            candidates += 1;
            for k in 0..4 {
                for m in 1..16 {
                    let mut mutated = base.clone();
                    mutated[k][m] = !mutated[k][m];
                    agree(4, &mutated)?;
                    candidates += 1;
                }
            }
        }
    }
    for _ in 0..20_000 {
        let index: Vec<usize> = (0..16).map(|_| rng.gen_range(1..=4)).collect();
        let levels: Levels = (1..=4)
            .map(|k| (0..16).map(|s| s > 0 && index[s] <= k).collect())
            .collect();
        agree(4, &levels)?;
        candidates += 1;
    }
    Ok(format!(
        "both impossible configurations cite S3; {enumerated} enumerated stacks valid; {candidates} candidates agree"
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("stack enumeration", Some(LIMIT_ENUM), criterion_1),
        ("pair threshold", Some(LIMIT_PAIR), criterion_2),
        ("triple threshold", Some(LIMIT_TRIPLE), criterion_3),
        ("two-copy threshold", Some(LIMIT_TWO_COPY), criterion_4),
        ("index step function", None, criterion_5),
        ("three-vertex realizations", None, criterion_6),
        ("symmetry algebra", Some(LIMIT_SYMMETRY), criterion_7),
        ("covariant family", None, criterion_8),
        ("constructive witnesses", None, criterion_9),
        ("stack validator", None, criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.1?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} {name}: PASS ({elapsed:.2?}) {detail}",
                i + 1
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "criterion {:>2} {name}: FAIL ({elapsed:.2?}) {detail}",
                    i + 1
                );
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
