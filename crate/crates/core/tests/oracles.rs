//! Cross-checks of the exact predicates against independent computations.

use flatfoliate::exactgeom::{
    configuration_index, radial_filling_degree_scheduled, winding_degree_2d, RayVector,
};
use flatfoliate::fixtures;
use flatfoliate::localformula::{
    essential_tuples, factorial, vertex_weight, ChamberChain, CrossingConfiguration, SheetId,
};
use flatfoliate::verify::chain_sum_defect;
use num_traits::Zero;

#[test]
fn index_agrees_with_winding_on_circle_triples() {
    let triples = fixtures::circle_triples(1000, 101);
    let disagreements: Vec<_> = triples
        .iter()
        .filter(|t| configuration_index(t).map(i64::from).ok() != winding_degree_2d(t).ok())
        .collect();
    assert!(disagreements.is_empty(), "{disagreements:?}");
}

#[test]
fn index_agrees_with_radial_filling() {
    for n in 2..=4 {
        for t in fixtures::generic_tuples(n, 100, 200 + n as u64) {
            let a = configuration_index(&t).unwrap() as i64;
            let b = radial_filling_degree_scheduled(&t, 32).unwrap();
            assert_eq!(a, b, "{t:?}");
        }
    }
}

/// Brute force: the tuple (r_j, a₁, …, aₙ) spans the origin iff the linear
/// system Σ λᵢ pᵢ = 0 has a strictly positive solution, found here by
/// solving for the coefficients with λ₀ = 1 in floating point.
fn spans_by_solving(t: &[RayVector]) -> bool {
    let n = t[0].dim();
    let col = |i: usize| -> Vec<f64> { t[i].coords().iter().map(|c| c.to_string().parse().unwrap()).collect() };
    // Σ_{i≥1} λᵢ pᵢ = −p₀
    let mut a: Vec<Vec<f64>> = (0..n).map(|r| (1..=n).map(|c| col(c)[r]).collect()).collect();
    let mut b: Vec<f64> = col(0).iter().map(|x| -x).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    (0..n).all(|i| b[i] / a[i][i] > 1e-12)
}

#[test]
fn essential_tuples_are_exactly_the_spanning_ones() {
    for cc in fixtures::type_one_configurations(150, 4, 300) {
        let found: Vec<usize> = essential_tuples(&cc).unwrap().iter().map(|e| e.j).collect();
        let expected: Vec<usize> = (0..cc.k())
            .filter(|&j| {
                let mut t = vec![cc.regular()[j].clone()];
                t.extend(cc.bordered().iter().cloned());
                spans_by_solving(&t)
            })
            .collect();
        assert_eq!(found, expected, "{cc:?}");
    }
}

#[test]
fn chain_sums_match_weights() {
    for cc in fixtures::type_one_configurations(200, 4, 400) {
        assert!(chain_sum_defect(&cc).unwrap().is_zero(), "{cc:?}");
    }
}

/// Vertex weight recomputed from its definition: average over all
/// (n+1)-tuples drawn from the chain σ = id, sheets taken uniformly.
#[test]
fn identity_chain_average_equals_weight() {
    for cc in fixtures::type_one_configurations(60, 3, 500) {
        let id: Vec<usize> = (0..cc.n()).collect();
        let chain = ChamberChain::new(&cc, &id).unwrap();
        let mut total = 0i64;
        let mut count = 0i64;
        let mut stack = vec![Vec::<SheetId>::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == cc.n() + 1 {
                let rays: Vec<RayVector> = prefix.iter().map(|&s| cc.ray(s).clone()).collect();
                total += configuration_index(&rays).unwrap() as i64;
                count += 1;
                continue;
            }
            for &s in &chain.sheets()[prefix.len()] {
                let mut next = prefix.clone();
                next.push(s);
                stack.push(next);
            }
        }
        let avg = flatfoliate::exactgeom::rational(total, count);
        let expected = vertex_weight(&cc).unwrap();
        assert_eq!(avg, expected, "{cc:?}");
    }
}

#[test]
fn type_two_chains_vanish() {
    for cc in fixtures::type_two_configurations(100, 4, 600) {
        for chain in ChamberChain::all(&cc) {
            let e = flatfoliate::localformula::direct_vertex_expectation(&chain, &cc).unwrap();
            assert!(e.is_zero(), "{cc:?} σ={:?}", chain.sigma());
        }
    }
}

#[test]
fn chain_count_is_factorial() {
    let cc: CrossingConfiguration = fixtures::type_one_configurations(2, 2, 7).remove(1);
    assert_eq!(num_bigint::BigInt::from(ChamberChain::all(&cc).len()), factorial(cc.n()));
}
