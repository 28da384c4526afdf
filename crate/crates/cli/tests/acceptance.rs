//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use flatfoliate::exactgeom::{
    configuration_index, format_rational, radial_filling_degree_scheduled, rational, winding_degree_2d, Rational,
};
use flatfoliate::fixtures;
use flatfoliate::localformula::{
    direct_vertex_expectation, factorial, parallel_vertex_expectation, permutation_sign, vertex_weight,
    within_parallel_bound, ChamberChain, CrossingConfiguration,
};
use flatfoliate::toruslab::overlay::torus_overlay;
use flatfoliate::toruslab::{
    build_region, cayley_ball, check_neighborhood, decay_experiment, default_v0, folner_box, folner_ratio,
    n2_geometric_vertex_expectations, run_torus, standard_generators, BranchOrder, HolonomyPair, LabOptions,
};
use flatfoliate::triangulations::{
    assemble_triangulation, kuhn_face_label_sets, kuhn_triangulation, staircase_label_sets, staircase_triangulation,
    two_square_fixture, Face,
};
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_flatfoliate"))
        .args(["torus-decay", "--L", "2,3,4,6,8"])
        .env_remove("FLATFOLIATE_RETRY_BUDGET")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let values: Vec<&str> = rows.iter().filter_map(|r| r.rsplit(',').next()).collect();
    let pass = out.status.success()
        && rows.len() == 5
        && values.iter().all(|v| *v == "0/1")
        && elapsed < Duration::from_secs(300);
    outcome(pass, format!("formula_value column {values:?} in {:.2}s", elapsed.as_secs_f64()))
}

/// Σ over chains with the sign(σ) factor stripped back out, divided by n!.
fn unsigned_weight(cc: &CrossingConfiguration) -> Rational {
    let mut sum = Rational::zero();
    for chain in ChamberChain::all(cc) {
        let e = direct_vertex_expectation(&chain, cc).expect("generic crossing");
        sum += e * Rational::from_integer(BigInt::from(permutation_sign(chain.sigma())));
    }
    sum / Rational::from_integer(factorial(cc.n()))
}

fn criterion_2() -> Outcome {
    let pair = HolonomyPair::rotations();
    let v0 = default_v0();
    let two = Rational::from_integer(BigInt::from(2));
    let mut integral = Vec::new();
    let mut mutant_caught = Vec::new();
    let mut unsigned_integral = true;
    for l in [2, 3, 4, 6, 8] {
        let run = run_torus(&pair, &v0, l, &LabOptions::default()).expect("rotation run");
        let sum: Rational = run.configurations().iter().map(|c| vertex_weight(c).unwrap()).sum();
        integral.push((&sum * &two).is_integer());
        if l <= 4 {
            let unsigned: Rational = run.configurations().iter().map(unsigned_weight).sum();
            unsigned_integral &= (unsigned * &two).is_integer();
        }

        let opts = LabOptions { branch_order: BranchOrder::Lattice, ..LabOptions::default() };
        let mutant = run_torus(&pair, &v0, l, &opts).expect("mutant run");
        let msum: Rational = mutant.configurations().iter().map(|c| vertex_weight(c).unwrap()).sum();
        mutant_caught.push(!(msum * &two).is_integer());
    }
    let pass = integral.iter().all(|&b| b) && mutant_caught.iter().any(|&b| b);
    outcome(
        pass,
        format!(
            "2Σw integral {integral:?}; lattice-order mutant non-integral {mutant_caught:?}; \
             unsigned chain aggregation integral={unsigned_integral}, so integrality alone cannot flag that variant"
        ),
    )
}

fn criterion_3() -> Outcome {
    let recs = decay_experiment(&HolonomyPair::rotations(), &default_v0(), &[2, 4, 8]).expect("decay");
    let (b2, b4, b8) = (&recs[0].bound, &recs[1].bound, &recs[2].bound);
    let pass = *b8 <= b4 / rational(2, 1) && *b4 <= b2 / rational(3, 2);
    outcome(
        pass,
        format!("bounds {} {} {}", format_rational(b2), format_rational(b4), format_rational(b8)),
    )
}

fn criterion_4() -> Outcome {
    let configs = fixtures::type_one_configurations(240, 4, 404);
    let mut bad = 0;
    for cc in &configs {
        let sum: Rational = ChamberChain::all(cc).iter().map(|ch| direct_vertex_expectation(ch, cc).unwrap()).sum();
        if sum != vertex_weight(cc).unwrap() * Rational::from_integer(factorial(cc.n())) {
            bad += 1;
        }
    }
    let ns: Vec<usize> = configs.iter().map(|c| c.n()).unique().sorted().collect();
    outcome(bad == 0 && configs.len() >= 200, format!("{} configurations, n ∈ {ns:?}, {bad} mismatches", configs.len()))
}

fn criterion_5() -> Outcome {
    let configs = fixtures::type_two_configurations(120, 4, 505);
    let bad = configs
        .iter()
        .filter(|cc| {
            !ChamberChain::all(cc).iter().all(|ch| direct_vertex_expectation(ch, cc).unwrap().is_zero())
        })
        .count();
    outcome(bad == 0 && configs.len() >= 100, format!("{} type II fixtures, {bad} nonzero", configs.len()))
}

fn criterion_6() -> Outcome {
    let triples = fixtures::circle_triples(1000, 606);
    let winding_bad = triples
        .iter()
        .filter(|t| configuration_index(t).map(i64::from).ok() != winding_degree_2d(t).ok())
        .count();
    let mut radial_cases = 0;
    let mut radial_bad = 0;
    for n in 2..=4 {
        for t in fixtures::generic_tuples(n, 100, 610 + n as u64) {
            radial_cases += 1;
            let a = configuration_index(&t).map(i64::from);
            if a.is_err() || a != radial_filling_degree_scheduled(&t, 32) {
                radial_bad += 1;
            }
        }
    }
    outcome(
        winding_bad == 0 && radial_bad == 0,
        format!("winding {winding_bad}/{} disagree, radial filling {radial_bad}/{radial_cases} disagree", triples.len()),
    )
}

fn criterion_7() -> Outcome {
    let two = Rational::from_integer(BigInt::from(2));
    let mut checked = 0;
    let mut bad = 0;
    for l in [2, 4] {
        let run = run_torus(&HolonomyPair::rotations(), &default_v0(), l, &LabOptions::default()).expect("run");
        for c in &run.crossings {
            checked += 1;
            let [a, b] = n2_geometric_vertex_expectations(c).expect("geometric oracle");
            if a + b != vertex_weight(&c.configuration).unwrap() * &two {
                bad += 1;
            }
        }
    }
    outcome(bad == 0 && checked > 0, format!("{checked} crossings, {bad} disagree"))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let subsets = |max: usize| -> Vec<Vec<usize>> { (1..=max + 1).flat_map(|r| (0..=max).combinations(r)).collect() };
    let mut faces = 0;
    for k in 0..=4 {
        for m in 0..=4 {
            let t = staircase_triangulation(k, m);
            if t.simplices().len() != binomial(k + m, k) {
                failures.push(format!("staircase {k},{m} count"));
            }
            for rows in subsets(k) {
                for cols in subsets(m) {
                    faces += 1;
                    let face = Face::Product { rows: rows.clone(), cols: cols.clone() };
                    let ok = t.restrict_to_face(&face).map(|f| f.simplex_label_sets() == staircase_label_sets(&rows, &cols));
                    if ok != Ok(true) {
                        failures.push(format!("staircase {k},{m} face {rows:?}x{cols:?}"));
                    }
                }
            }
        }
    }
    for n in 1..=5 {
        let low: Vec<bool> = (0..n).map(|i| i % 2 == 1).collect();
        let high: Vec<bool> = low.iter().map(|b| !b).collect();
        let t = kuhn_triangulation(n, &low, &high).expect("antipodal marks");
        let unit = Rational::new(BigInt::from(1), factorial(n));
        if BigInt::from(t.simplices().len()) != factorial(n) || !t.simplices().iter().all(|s| t.simplex_volume(s) == Some(unit.clone())) {
            failures.push(format!("kuhn {n} counts/volumes"));
        }
        for fixed in (0..n).map(|_| [None, Some(false), Some(true)]).multi_cartesian_product() {
            faces += 1;
            let ok = t
                .restrict_to_face(&Face::Cube { fixed: fixed.clone() })
                .map(|f| f.simplex_label_sets() == kuhn_face_label_sets(&low, &fixed));
            if ok != Ok(true) {
                failures.push(format!("kuhn {n} face {fixed:?}"));
            }
        }
    }
    match assemble_triangulation(&two_square_fixture()) {
        Ok(a) if a.no_new_vertices && a.complex.audit().facets_ok != Some(false) => {}
        other => failures.push(format!("two squares: {:?}", other.map(|a| a.complex.audit()))),
    }
    let torus = build_region(2, 0)
        .and_then(|r| torus_overlay(&r, 3))
        .and_then(|o| assemble_triangulation(&o.cells));
    match torus {
        Ok(a) if a.no_new_vertices && a.complex.euler_characteristic() == 0 && a.complex.every_facet_shared_twice() => {}
        other => failures.push(format!("torus overlay: {:?}", other.map(|a| a.complex.audit()))),
    }
    outcome(failures.is_empty(), format!("{faces} face restrictions; failures {failures:?}"))
}

fn criterion_9() -> Outcome {
    let ratios_ok = (2..=16).all(|l| folner_ratio(&folner_box(l), &[1, 0]) == Ok(rational(2, l)));
    let sizes: Vec<usize> = (0..=2).map(|t| cayley_ball(&standard_generators(2), t).len()).collect();
    let nbhd = (1..=4).all(check_neighborhood);
    outcome(
        ratios_ok && sizes == [1, 5, 13] && nbhd,
        format!("ratios 2/L: {ratios_ok}, ball sizes {sizes:?}, neighborhood T=1..4: {nbhd}"),
    )
}

fn criterion_10() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    let mut worst = Rational::zero();
    for (n, q, k, count) in [(2, 3, 1, 8), (2, 3, 2, 8), (2, 4, 2, 8), (2, 4, 3, 6), (3, 4, 1, 10), (3, 5, 1, 10)] {
        for fam in fixtures::parallel_families(n, q, k, count, 1000 + (100 * n + 10 * q + k) as u64) {
            cases += 1;
            let id: Vec<usize> = (0..n).collect();
            let v = parallel_vertex_expectation(&fam, &id).expect("generic family");
            if !within_parallel_bound(&v, k, n) {
                bad += 1;
            }
            worst = worst.max(v.abs());
        }
    }
    outcome(bad == 0 && cases >= 50, format!("{cases} families, {bad} exceed the bound, max |value| {}", format_rational(&worst)))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact vanishing", criterion_1),
        ("integrality and mutation check", criterion_2),
        ("bound decay", criterion_3),
        ("chain aggregation identity", criterion_4),
        ("type II cancellation", criterion_5),
        ("oracle agreement", criterion_6),
        ("geometric arbitration", criterion_7),
        ("triangulation counts and coherence", criterion_8),
        ("Folner numerics", criterion_9),
        ("parallel-averaging bound", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {:<36} {} ({:.2}s) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
