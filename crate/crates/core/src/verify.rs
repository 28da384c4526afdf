//! Invariant suites behind `flatfoliate verify`. Each check runs a fixed,
//! seeded batch and reports how many cases it covered and the first few
//! failures.

use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::Error;
use crate::exactgeom::{
    configuration_index, format_rational, radial_filling_degree_scheduled, rational, winding_degree_2d, RayVector,
    Rational,
};
use crate::fixtures;
use crate::localformula::{
    cancellation_audit, direct_vertex_expectation, factorial, formula_report, parallel_vertex_expectation,
    vertex_weight, within_parallel_bound, ChamberChain, CrossingConfiguration,
};
use crate::toruslab::{
    self, build_region_with_budget, cayley_ball, check_neighborhood, folner_box, folner_ratio, holonomy_at,
    n2_geometric_vertex_expectations, standard_generators, HolonomyPair, LabOptions, TorusRun,
};
use crate::triangulations::{
    assemble_triangulation, incompatible_cube_fixture, kuhn_face_label_sets, kuhn_triangulation,
    staircase_label_sets, staircase_triangulation, two_square_fixture, Face,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    ExactGeom,
    LocalFormula,
    Triangulations,
    TorusLab,
    All,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::ExactGeom => "exactgeom",
            Scope::LocalFormula => "localformula",
            Scope::Triangulations => "triangulations",
            Scope::TorusLab => "toruslab",
            Scope::All => "all",
        }
    }
}

impl FromStr for Scope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        [Scope::ExactGeom, Scope::LocalFormula, Scope::Triangulations, Scope::TorusLab, Scope::All]
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown scope {s}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub scope: &'static str,
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// First few failure descriptions.
    pub examples: Vec<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const SHOWN: usize = 5;

struct Tally {
    scope: &'static str,
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(scope: &'static str, name: &'static str) -> Self {
        Self { scope, name, cases: 0, failures: Vec::new() }
    }

    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    fn finish(self) -> Check {
        Check {
            scope: self.scope,
            name: self.name,
            cases: self.cases,
            failures: self.failures.len(),
            examples: self.failures.into_iter().take(SHOWN).collect(),
        }
    }
}

pub fn run(scope: Scope, opts: &LabOptions) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(scope, Scope::ExactGeom | Scope::All) {
        out.extend(exactgeom_checks(opts.retry_budget));
    }
    if matches!(scope, Scope::LocalFormula | Scope::All) {
        out.extend(localformula_checks());
    }
    if matches!(scope, Scope::Triangulations | Scope::All) {
        out.extend(triangulation_checks(opts));
    }
    if matches!(scope, Scope::TorusLab | Scope::All) {
        out.extend(toruslab_checks(opts));
    }
    out
}

fn show(t: &[RayVector]) -> String {
    format!("{t:?}")
}

pub fn exactgeom_checks(probe_budget: usize) -> Vec<Check> {
    const S: &str = "exactgeom";
    let mut winding = Tally::new(S, "index_matches_winding");
    for t in fixtures::circle_triples(1000, 1) {
        let a = configuration_index(&t).map(i64::from);
        let b = winding_degree_2d(&t);
        winding.case(a.is_ok() && a == b, || format!("{}: index {a:?}, winding {b:?}", show(&t)));
    }

    let mut radial = Tally::new(S, "index_matches_radial_filling");
    let mut antisym = Tally::new(S, "index_antisymmetric");
    for n in 2..=4 {
        for t in fixtures::generic_tuples(n, 100, 10 + n as u64) {
            let a = configuration_index(&t).map(i64::from);
            let b = radial_filling_degree_scheduled(&t, probe_budget);
            radial.case(a.is_ok() && a == b, || format!("{}: index {a:?}, filling {b:?}", show(&t)));
            let mut s = t.clone();
            s.swap(0, 1);
            let c = configuration_index(&s).map(i64::from);
            antisym.case(matches!((&a, &c), (Ok(x), Ok(y)) if *x == -*y), || show(&t));
        }
    }

    let mut scaling = Tally::new(S, "index_scale_invariant");
    let mut r = fixtures::rng(20);
    for t in fixtures::generic_tuples(3, 100, 21) {
        let scaled: Vec<RayVector> = t
            .iter()
            .map(|v| {
                let c = rational(r.random_range(1..=9), r.random_range(1..=9));
                RayVector::new(v.to_rationals().into_iter().map(|x| x * &c).collect()).expect("nonzero")
            })
            .collect();
        scaling.case(
            scaled == t && configuration_index(&scaled) == configuration_index(&t),
            || show(&t),
        );
    }

    let mut hemi = Tally::new(S, "hemisphere_index_zero");
    for n in 2..=4 {
        for t in fixtures::hemisphere_tuples(n, 50, 30 + n as u64) {
            hemi.case(configuration_index(&t) == Ok(0), || show(&t));
        }
    }
    vec![winding.finish(), radial.finish(), antisym.finish(), scaling.finish(), hemi.finish()]
}

/// Σ over all chains of the direct expectation, minus n!·vertex_weight.
pub fn chain_sum_defect(cc: &CrossingConfiguration) -> Result<Rational, Error> {
    let mut sum = Rational::zero();
    for chain in ChamberChain::all(cc) {
        sum += direct_vertex_expectation(&chain, cc)?;
    }
    Ok(sum - vertex_weight(cc)? * Rational::from_integer(factorial(cc.n())))
}

pub fn localformula_checks() -> Vec<Check> {
    const S: &str = "localformula";
    let mut agg = Tally::new(S, "chain_sum_equals_weight");
    for cc in fixtures::type_one_configurations(200, 4, 5) {
        let d = chain_sum_defect(&cc);
        agg.case(matches!(&d, Ok(x) if x.is_zero()), || format!("{cc:?}: {d:?}"));
    }

    let mut type_two = Tally::new(S, "type_two_expectation_zero");
    for cc in fixtures::type_two_configurations(100, 4, 6) {
        let all_zero = ChamberChain::all(&cc)
            .iter()
            .map(|ch| direct_vertex_expectation(ch, &cc))
            .collect::<Result<Vec<_>, _>>();
        type_two.case(matches!(&all_zero, Ok(v) if v.iter().all(Zero::is_zero)), || format!("{cc:?}"));
    }

    let mut cancel = Tally::new(S, "cancellation_audit_matches");
    for cc in fixtures::type_one_configurations(40, 3, 7) {
        for chain in ChamberChain::all(&cc) {
            let a = cancellation_audit(&chain, &cc);
            cancel.case(matches!(&a, Ok(x) if x.cancels()), || format!("{cc:?} σ={:?}", chain.sigma()));
        }
    }

    let mut parallel = Tally::new(S, "parallel_bound");
    for (n, q, k, count) in [(2, 3, 2, 15), (2, 4, 2, 15), (3, 4, 1, 10), (3, 5, 1, 10)] {
        for fam in fixtures::parallel_families(n, q, k, count, 40 + (n * 10 + q) as u64) {
            let id: Vec<usize> = (0..n).collect();
            let e = parallel_vertex_expectation(&fam, &id);
            parallel.case(matches!(&e, Ok(v) if within_parallel_bound(v, k, n)), || {
                format!("n={n} N={q} k={k}: {:?}", e.as_ref().map(format_rational))
            });
        }
    }

    let mut sound = Tally::new(S, "bound_soundness");
    let pool = fixtures::type_one_configurations(120, 4, 8);
    for n in 2..=3 {
        let same_n: Vec<CrossingConfiguration> = pool.iter().filter(|c| c.n() == n).cloned().collect();
        for chunk in same_n.chunks(6) {
            let r = formula_report(chunk, n);
            sound.case(matches!(&r, Ok(r) if r.formula_value.abs() <= r.bound), || format!("n={n}: {r:?}"));
        }
    }
    vec![agg.finish(), type_two.finish(), cancel.finish(), parallel.finish(), sound.finish()]
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn nonempty_subsets(max: usize) -> Vec<Vec<usize>> {
    (1..=max + 1).flat_map(|r| (0..=max).combinations(r)).collect()
}

pub fn triangulation_checks(opts: &LabOptions) -> Vec<Check> {
    const S: &str = "triangulations";
    let mut stair = Tally::new(S, "staircase_counts_and_volumes");
    let mut stair_faces = Tally::new(S, "staircase_face_coherence");
    for k in 0..=4 {
        for m in 0..=4 {
            let t = staircase_triangulation(k, m);
            let a = t.audit();
            let vol = Rational::new(BigInt::from(1), factorial(k) * factorial(m));
            stair.case(
                t.simplices().len() == binomial(k + m, k)
                    && a.total_volume == Some(vol)
                    && (k + m == 0 || a.facets_ok == Some(true)),
                || format!("k={k} m={m}: {a:?}"),
            );
            for rows in nonempty_subsets(k) {
                for cols in nonempty_subsets(m) {
                    let face = Face::Product { rows: rows.clone(), cols: cols.clone() };
                    let ok = t
                        .restrict_to_face(&face)
                        .map(|f| f.simplex_label_sets() == staircase_label_sets(&rows, &cols))
                        .unwrap_or(false);
                    stair_faces.case(ok, || format!("k={k} m={m} face {rows:?}x{cols:?}"));
                }
            }
        }
    }

    let mut kuhn = Tally::new(S, "kuhn_counts_and_volumes");
    let mut kuhn_faces = Tally::new(S, "kuhn_face_coherence");
    let mut r = fixtures::rng(50);
    for n in 1..=5 {
        let low_marks: Vec<Vec<bool>> = vec![vec![false; n], (0..n).map(|_| r.random_bool(0.5)).collect()];
        for low in low_marks {
            let high: Vec<bool> = low.iter().map(|b| !b).collect();
            let Ok(t) = kuhn_triangulation(n, &low, &high) else {
                kuhn.case(false, || format!("n={n}: construction failed"));
                continue;
            };
            let unit = Rational::new(BigInt::from(1), factorial(n));
            let vols_ok = t.simplices().iter().all(|s| t.simplex_volume(s) == Some(unit.clone()));
            let facets_ok = n > 4 || t.audit().facets_ok == Some(true);
            kuhn.case(BigInt::from(t.simplices().len()) == factorial(n) && vols_ok && facets_ok, || {
                format!("n={n} marks {low:?}")
            });
            for fixed in (0..n).map(|_| [None, Some(false), Some(true)]).multi_cartesian_product() {
                let face = Face::Cube { fixed: fixed.clone() };
                let ok = t
                    .restrict_to_face(&face)
                    .map(|f| f.simplex_label_sets() == kuhn_face_label_sets(&low, &fixed))
                    .unwrap_or(false);
                kuhn_faces.case(ok, || format!("n={n} marks {low:?} face {fixed:?}"));
            }
        }
    }

    let mut assembly = Tally::new(S, "assembly_valid_without_new_vertices");
    let two = assemble_triangulation(&two_square_fixture());
    assembly.case(
        matches!(&two, Ok(a) if a.no_new_vertices && a.complex.simplices().len() == 4 && a.complex.vertices().len() == 6),
        || format!("two squares: {two:?}"),
    );
    let torus = build_region_with_budget(2, opts.schedule_index, opts.retry_budget)
        .and_then(|region| toruslab::overlay::torus_overlay(&region, 3))
        .and_then(|overlay| assemble_triangulation(&overlay.cells));
    assembly.case(
        matches!(&torus, Ok(a) if a.no_new_vertices
            && a.complex.euler_characteristic() == 0
            && a.complex.every_facet_shared_twice()),
        || format!("torus overlay: {:?}", torus.as_ref().map(|a| a.complex.audit())),
    );
    let bad = assemble_triangulation(&incompatible_cube_fixture());
    assembly.case(matches!(bad, Err(Error::FaceMismatch(_))), || format!("incompatible cubes: {bad:?}"));

    vec![stair.finish(), stair_faces.finish(), kuhn.finish(), kuhn_faces.finish(), assembly.finish()]
}

/// Per-crossing geometric expectations minus 2·vertex_weight, for every crossing of a run.
pub fn arbitration_defects(run: &TorusRun) -> Vec<(usize, Result<Rational, Error>)> {
    run.crossings
        .iter()
        .map(|c| {
            let d = n2_geometric_vertex_expectations(c).and_then(|[a, b]| {
                Ok(a + b - vertex_weight(&c.configuration)? * Rational::from_integer(BigInt::from(2)))
            });
            (c.id, d)
        })
        .collect()
}

pub fn toruslab_checks(opts: &LabOptions) -> Vec<Check> {
    const S: &str = "toruslab";
    let pair = HolonomyPair::rotations();
    let v0 = toruslab::default_v0();
    let runs: Vec<(i64, Result<TorusRun, Error>)> =
        [2, 3, 4].into_iter().map(|l| (l, toruslab::run_torus(&pair, &v0, l, opts))).collect();

    let mut vanish = Tally::new(S, "exact_vanishing");
    let mut integral = Tally::new(S, "integrality");
    let mut sound = Tally::new(S, "bound_soundness");
    let mut arbit = Tally::new(S, "geometric_arbitration");
    for (l, run) in &runs {
        match run {
            Ok(run) => {
                let v = &run.report.formula_value;
                vanish.case(v.is_zero(), || format!("L={l}: {}", format_rational(v)));
                integral.case(run.is_integral(), || format!("L={l}: {}", format_rational(v)));
                sound.case(v.abs() <= run.report.bound, || format!("L={l}"));
                if *l != 3 {
                    for (id, d) in arbitration_defects(run) {
                        arbit.case(matches!(&d, Ok(x) if x.is_zero()), || format!("L={l} crossing {id}: {d:?}"));
                    }
                }
            }
            Err(e) => {
                for t in [&mut vanish, &mut integral, &mut sound, &mut arbit] {
                    t.case(false, || format!("L={l}: {e}"));
                }
            }
        }
    }

    let mut folner = Tally::new(S, "folner_ratio_two_over_l");
    let mut boundary = Tally::new(S, "boundary_ratio_decay");
    let mut last_ratio: Option<Rational> = None;
    let mut crossing_counts = Vec::new();
    for l in 2..=16i64 {
        let f = folner_ratio(&folner_box(l), &[1, 0]);
        folner.case(f == Ok(rational(2, l)), || format!("L={l}: {f:?}"));
        match build_region_with_budget(l, opts.schedule_index, opts.retry_budget) {
            Ok(region) => {
                let ratio = rational(region.n_boundary() as i64, region.n_inner() as i64);
                let decreasing = last_ratio.as_ref().is_none_or(|p| ratio < *p);
                boundary.case(
                    region.n_inner() == (l * l) as usize && ratio <= rational(10, l) && decreasing,
                    || format!("L={l}: N={} N∂={}", region.n_inner(), region.n_boundary()),
                );
                last_ratio = Some(ratio);
                crossing_counts.push((l, region.crossing_sites().len()));
            }
            Err(e) => boundary.case(false, || format!("L={l}: {e}")),
        }
    }

    let mut scaling = Tally::new(S, "crossing_count_scaling");
    for l in [2, 4, 8] {
        let x = |l: i64| crossing_counts.iter().find(|(m, _)| *m == l).map(|(_, x)| *x);
        let ok = matches!((x(l), x(2 * l)), (Some(a), Some(b)) if a > 0 && b <= 5 * a);
        scaling.case(ok, || format!("L={l}: {:?} -> {:?}", x(l), x(2 * l)));
    }

    let mut homo = Tally::new(S, "holonomy_homomorphism");
    let mut r = fixtures::rng(60);
    for _ in 0..100 {
        let g = (r.random_range(-6..=6), r.random_range(-6..=6));
        let h = (r.random_range(-6..=6), r.random_range(-6..=6));
        let lhs = &holonomy_at(&pair, g) * &holonomy_at(&pair, h);
        homo.case(lhs == holonomy_at(&pair, (g.0 + h.0, g.1 + h.1)), || format!("{g:?} {h:?}"));
    }

    let mut cayley = Tally::new(S, "cayley_balls_and_neighborhood");
    for (t, size) in [(0, 1), (1, 5), (2, 13)] {
        let n = cayley_ball(&standard_generators(2), t).len();
        cayley.case(n == size, || format!("T={t}: {n} elements"));
    }
    cayley.case(!check_neighborhood(0), || "T=0 reported a neighbourhood".into());
    for t in 1..=3 {
        cayley.case(check_neighborhood(t), || format!("T={t}"));
    }

    vec![
        vanish.finish(),
        integral.finish(),
        sound.finish(),
        arbit.finish(),
        folner.finish(),
        boundary.finish(),
        scaling.finish(),
        homo.finish(),
        cayley.finish(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        for check in run(Scope::All, &LabOptions::default()) {
            assert!(check.passed(), "{check:?}");
            assert!(check.cases > 0, "{}", check.name);
        }
    }

    #[test]
    fn lattice_order_fails_torus_checks() {
        let opts = LabOptions { branch_order: crate::toruslab::BranchOrder::Lattice, ..Default::default() };
        let failed: Vec<&str> = toruslab_checks(&opts).iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        assert!(failed.contains(&"integrality"), "{failed:?}");
        assert!(failed.contains(&"geometric_arbitration"), "{failed:?}");
    }

    #[test]
    fn scope_names_round_trip() {
        for s in [Scope::ExactGeom, Scope::LocalFormula, Scope::Triangulations, Scope::TorusLab, Scope::All] {
            assert_eq!(s.name().parse::<Scope>().unwrap(), s);
        }
        assert!("nope".parse::<Scope>().is_err());
    }
}
