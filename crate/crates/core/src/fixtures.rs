//! Deterministic pseudorandom fixtures for the oracle sweeps, the identity
//! checks and the verification suites. Every generator is driven by a
//! seeded ChaCha8 stream, so a seed always reproduces the same fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactgeom::{is_antipodally_generic, RayVector};
use crate::localformula::CrossingConfiguration;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational point of the unit circle, (q²−p², 2pq)/(q²+p²) up to signs
/// and a coordinate swap.
pub fn circle_point(rng: &mut impl Rng) -> RayVector {
    let q: i64 = rng.random_range(1..=24);
    let p: i64 = rng.random_range(0..=24);
    let (mut x, mut y) = (q * q - p * p, 2 * p * q);
    if x == 0 && y == 0 {
        x = 1;
    }
    if rng.random_bool(0.5) {
        std::mem::swap(&mut x, &mut y);
    }
    if rng.random_bool(0.5) {
        x = -x;
    }
    if rng.random_bool(0.5) {
        y = -y;
    }
    RayVector::from_ints(&[x, y]).expect("nonzero")
}

/// Integer vector with entries in [−bound, bound], never zero.
pub fn small_ray(rng: &mut impl Rng, n: usize, bound: i64) -> RayVector {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.random_range(-bound..=bound)).collect();
        if v.iter().any(|&c| c != 0) {
            return RayVector::from_ints(&v).expect("nonzero");
        }
    }
}

fn random_ray(rng: &mut impl Rng, n: usize, bound: i64) -> RayVector {
    if n == 2 && rng.random_bool(0.5) {
        circle_point(rng)
    } else {
        small_ray(rng, n, bound)
    }
}

/// Antipodally generic triples of rational circle points.
pub fn circle_triples(count: usize, seed: u64) -> Vec<Vec<RayVector>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t: Vec<RayVector> = (0..3).map(|_| circle_point(&mut r)).collect();
        if is_antipodally_generic(&t) {
            out.push(t);
        }
    }
    out
}

/// Antipodally generic (n+1)-tuples in ℤⁿ. About half are built to
/// positively span the origin, the rest are unconstrained.
pub fn generic_tuples(n: usize, count: usize, seed: u64) -> Vec<Vec<RayVector>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut t: Vec<RayVector> = (0..n).map(|_| small_ray(&mut r, n, 5)).collect();
        if r.random_bool(0.5) {
            // last point = −Σ cᵢ·vᵢ with positive cᵢ
            let mut last = vec![0i64; n];
            for v in &t {
                let c: i64 = r.random_range(1..=3);
                for (acc, x) in last.iter_mut().zip(v.coords()) {
                    *acc -= c * i64::try_from(x).expect("small entry");
                }
            }
            match RayVector::from_ints(&last) {
                Ok(v) => t.push(v),
                Err(_) => continue,
            }
        } else {
            t.push(small_ray(&mut r, n, 5));
        }
        if is_antipodally_generic(&t) {
            out.push(t);
        }
    }
    out
}

/// Points lying in one open hemisphere: every point has positive dot
/// product with a random direction.
pub fn hemisphere_tuples(n: usize, count: usize, seed: u64) -> Vec<Vec<RayVector>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dir = small_ray(&mut r, n, 4);
        let t: Vec<RayVector> = (0..=n)
            .filter_map(|_| {
                let v = small_ray(&mut r, n, 5);
                let d: num_bigint::BigInt = v.dot(&dir);
                match d.sign() {
                    num_bigint::Sign::Plus => Some(v),
                    num_bigint::Sign::Minus => Some(v.antipode()),
                    num_bigint::Sign::NoSign => None,
                }
            })
            .collect();
        if t.len() == n + 1 && is_antipodally_generic(&t) {
            out.push(t);
        }
    }
    out
}

/// A crossing configuration with `m` bordered and `k` regular sheets whose
/// points are antipodally generic, entries bounded by 5.
pub fn generic_configuration(rng: &mut impl Rng, n: usize, m: usize, k: usize) -> CrossingConfiguration {
    generic_configuration_bounded(rng, n, m, k, 5)
}

fn generic_configuration_bounded(rng: &mut impl Rng, n: usize, m: usize, k: usize, bound: i64) -> CrossingConfiguration {
    loop {
        let pts: Vec<RayVector> = (0..m + k).map(|_| random_ray(rng, n, bound)).collect();
        if is_antipodally_generic(&pts) {
            let (b, r) = pts.split_at(m);
            return CrossingConfiguration::new(n, b.to_vec(), r.to_vec()).expect("valid counts");
        }
    }
}

/// Type I configurations with n ∈ {2, 3} and 1 ≤ k ≤ `max_k`.
pub fn type_one_configurations(count: usize, max_k: usize, seed: u64) -> Vec<CrossingConfiguration> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let n = 2 + i % 2;
            let k = r.random_range(1..=max_k);
            generic_configuration(&mut r, n, n, k)
        })
        .collect()
}

/// Type II configurations: n ∈ {2, 3}, fewer than n bordered sheets.
pub fn type_two_configurations(count: usize, max_k: usize, seed: u64) -> Vec<CrossingConfiguration> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let n = 2 + i % 2;
            let m = r.random_range(0..n);
            let k = r.random_range(1..=max_k);
            generic_configuration(&mut r, n, m, k)
        })
        .collect()
}

/// Families of `quasisections` type I configurations sharing n and k whose
/// union is antipodally generic.
pub fn parallel_families(n: usize, quasisections: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<CrossingConfiguration>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let family: Vec<CrossingConfiguration> =
            (0..quasisections).map(|_| generic_configuration_bounded(&mut r, n, n, k, 40)).collect();
        let union: Vec<RayVector> = family.iter().flat_map(|c| c.points()).collect();
        if is_antipodally_generic(&union) {
            out.push(family);
        }
    }
    out
}
