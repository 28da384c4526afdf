//! Commuting SL(2, ℚ) holonomy of a flat bundle over the 2-torus.

use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::{format_rational, rational, RayVector, Rational};

/// Exact 2×2 matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2(pub [Rational; 4]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

impl Mat2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Mat2([a, b, c, d])
    }

    /// Matrix from `(numerator, denominator)` entries, row-major.
    pub fn from_fracs(e: [(i64, i64); 4]) -> Self {
        Mat2(e.map(|(p, q)| rational(p, q)))
    }

    pub fn identity() -> Self {
        Mat2([Rational::one(), Rational::zero(), Rational::zero(), Rational::one()])
    }

    pub fn det(&self) -> Rational {
        let [a, b, c, d] = &self.0;
        a * d - b * c
    }

    /// Exact inverse; `None` for singular matrices.
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let [a, b, c, d] = &self.0;
        Some(Mat2([d / &det, -b / &det, -c / &det, a / &det]))
    }

    /// `self^e`, negative exponents through the inverse.
    pub fn pow(&self, e: i64) -> Option<Mat2> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Mat2::identity();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        Some(acc)
    }

    pub fn apply(&self, v: &[Rational; 2]) -> [Rational; 2] {
        let [a, b, c, d] = &self.0;
        [a * &v[0] + b * &v[1], c * &v[0] + d * &v[1]]
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
}

/// Images of the two generators of π₁(T²) = ℤ².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolonomyPair {
    a: Mat2,
    b: Mat2,
}

impl HolonomyPair {
    pub fn new(a: Mat2, b: Mat2) -> Result<Self> {
        for m in [&a, &b] {
            let det = m.det();
            if !det.is_one() {
                return Err(Error::NotUnimodular(format_rational(&det)));
            }
        }
        if &a * &b != &b * &a {
            return Err(Error::NonCommuting);
        }
        Ok(Self { a, b })
    }

    /// Rotations with cosines 3/5 and 5/13.
    pub fn rotations() -> Self {
        Self::new(
            Mat2::from_fracs([(3, 5), (-4, 5), (4, 5), (3, 5)]),
            Mat2::from_fracs([(5, 13), (-12, 13), (12, 13), (5, 13)]),
        )
        .expect("commuting rotations")
    }

    /// diag(2, 1/2) and diag(3, 1/3). Every sheet ray stays in the open
    /// positive quadrant, so every index vanishes.
    pub fn diagonal() -> Self {
        Self::new(
            Mat2::from_fracs([(2, 1), (0, 1), (0, 1), (1, 2)]),
            Mat2::from_fracs([(3, 1), (0, 1), (0, 1), (1, 3)]),
        )
        .expect("commuting diagonal pair")
    }

    /// Shears by 1 and 2. Distinct lifts share sheet rays, so genericity fails.
    pub fn unipotent() -> Self {
        Self::new(
            Mat2::from_fracs([(1, 1), (1, 1), (0, 1), (1, 1)]),
            Mat2::from_fracs([(1, 1), (2, 1), (0, 1), (1, 1)]),
        )
        .expect("commuting unipotent pair")
    }

    pub fn identity() -> Self {
        Self { a: Mat2::identity(), b: Mat2::identity() }
    }

    pub fn a(&self) -> &Mat2 {
        &self.a
    }
    pub fn b(&self) -> &Mat2 {
        &self.b
    }
}

/// ρ(i, j) = Aⁱ·Bʲ.
pub fn holonomy_at(pair: &HolonomyPair, g: (i64, i64)) -> Mat2 {
    let a = pair.a.pow(g.0).expect("unimodular");
    let b = pair.b.pow(g.1).expect("unimodular");
    &a * &b
}

/// ρ(g)⁻¹·v₀, the fiber point contributed by the lift x̃ + g.
pub fn sheet_ray(pair: &HolonomyPair, g: (i64, i64), v0: &RayVector) -> RayVector {
    let v = v0.to_rationals();
    let w = holonomy_at(pair, (-g.0, -g.1)).apply(&[v[0].clone(), v[1].clone()]);
    RayVector::new(w.to_vec()).expect("invertible image of a nonzero vector")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holonomy_examples() {
        let p = HolonomyPair::rotations();
        assert_eq!(holonomy_at(&p, (0, 0)), Mat2::identity());
        assert_eq!(holonomy_at(&p, (1, 1)), p.a() * p.b());
        assert_eq!(
            holonomy_at(&p, (-1, 0)),
            Mat2::from_fracs([(3, 5), (4, 5), (-4, 5), (3, 5)])
        );
    }

    #[test]
    fn sheet_ray_examples() {
        let p = HolonomyPair::rotations();
        let v0 = RayVector::from_ints(&[1, 0]).unwrap();
        assert_eq!(sheet_ray(&p, (0, 0), &v0), v0);
        assert_eq!(sheet_ray(&p, (1, 0), &v0), RayVector::from_fracs(&[(3, 5), (-4, 5)]).unwrap());
        assert_eq!(sheet_ray(&p, (0, 1), &v0), RayVector::from_fracs(&[(5, 13), (-12, 13)]).unwrap());
    }

    #[test]
    fn constructor_checks() {
        let rot = Mat2::from_fracs([(3, 5), (-4, 5), (4, 5), (3, 5)]);
        let shear = Mat2::from_fracs([(1, 1), (1, 1), (0, 1), (1, 1)]);
        assert_eq!(HolonomyPair::new(rot.clone(), shear), Err(Error::NonCommuting));
        let scale = Mat2::from_fracs([(2, 1), (0, 1), (0, 1), (1, 1)]);
        assert_eq!(HolonomyPair::new(rot, scale), Err(Error::NotUnimodular("2/1".into())));
    }
}
