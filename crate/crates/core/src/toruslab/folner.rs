//! Følner sets and Cayley balls in ℤᵈ.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::exactgeom::{rational, Rational};

pub type LatticeSet = BTreeSet<Vec<i64>>;

/// Φ = [0, L)² ∩ ℤ².
pub fn folner_box(l: i64) -> LatticeSet {
    (0..l).flat_map(|i| (0..l).map(move |j| vec![i, j])).collect()
}

/// |gΦ Δ Φ| / |Φ|.
pub fn folner_ratio(phi: &LatticeSet, g: &[i64]) -> Result<Rational> {
    if phi.is_empty() {
        return Err(Error::EmptySet);
    }
    let shifted: LatticeSet = phi
        .iter()
        .map(|p| {
            if p.len() != g.len() {
                return Err(Error::DimensionMismatch { expected: p.len(), found: g.len() });
            }
            Ok(p.iter().zip(g).map(|(a, b)| a + b).collect())
        })
        .collect::<Result<_>>()?;
    let diff = shifted.symmetric_difference(phi).count();
    Ok(rational(diff as i64, phi.len() as i64))
}

/// ±e₁, …, ±e_d.
pub fn standard_generators(d: usize) -> Vec<Vec<i64>> {
    (0..d)
        .flat_map(|i| {
            [1, -1].map(|s| {
                let mut e = vec![0; d];
                e[i] = s;
                e
            })
        })
        .collect()
}

/// All nonzero vectors in {−1, 0, 1}²: the eight neighbours of a square.
pub fn king_generators() -> Vec<Vec<i64>> {
    (-1..=1)
        .flat_map(|i| (-1..=1).map(move |j| vec![i, j]))
        .filter(|v| v != &vec![0, 0])
        .collect()
}

/// Elements of word length at most `t` in the given generators.
pub fn cayley_ball(generators: &[Vec<i64>], t: usize) -> LatticeSet {
    let d = generators.first().map_or(0, Vec::len);
    let origin = vec![0; d];
    let mut seen: LatticeSet = [origin.clone()].into();
    let mut queue = VecDeque::from([(origin, 0)]);
    while let Some((p, depth)) = queue.pop_front() {
        if depth == t {
            continue;
        }
        for g in generators {
            let q: Vec<i64> = p.iter().zip(g).map(|(a, b)| a + b).collect();
            if seen.insert(q.clone()) {
                queue.push_back((q, depth + 1));
            }
        }
    }
    seen
}

/// Whether F = [0,1]² lies in the interior of ⋃_{g ∈ ball} (g + F).
///
/// The squares touching F are exactly the translates by {−1,0,1}², and a
/// neighbourhood of each corner of F meets all four squares at that corner,
/// so the condition is that the ball contains the whole 3×3 block.
pub fn square_in_interior(ball: &LatticeSet) -> bool {
    (-1..=1).all(|i| (-1..=1).all(|j| ball.contains(&vec![i, j])))
}

/// Neighbourhood check for the unit square with the ball of radius `t` in
/// the eight-neighbour generating set.
pub fn check_neighborhood(t: usize) -> bool {
    square_in_interior(&cayley_ball(&king_generators(), t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        assert_eq!(folner_ratio(&folner_box(5), &[1, 0]).unwrap(), rational(2, 5));
        assert_eq!(folner_ratio(&folner_box(5), &[0, 0]).unwrap(), rational(0, 1));
        let single: LatticeSet = [vec![3, 4]].into();
        assert_eq!(folner_ratio(&single, &[0, 1]).unwrap(), rational(2, 1));
        assert_eq!(folner_ratio(&LatticeSet::new(), &[1, 0]), Err(Error::EmptySet));
    }

    #[test]
    fn ball_sizes() {
        let gens = standard_generators(2);
        assert_eq!(cayley_ball(&gens, 0).len(), 1);
        assert_eq!(cayley_ball(&gens, 1).len(), 5);
        assert_eq!(cayley_ball(&gens, 2).len(), 13);
    }

    #[test]
    fn neighborhood_examples() {
        assert!(!check_neighborhood(0));
        assert!(check_neighborhood(1));
        assert!(check_neighborhood(2));
        // the plus-shaped ball misses the diagonal squares at radius 1
        assert!(!square_in_interior(&cayley_ball(&standard_generators(2), 1)));
        assert!(square_in_interior(&cayley_ball(&standard_generators(2), 2)));
    }
}
