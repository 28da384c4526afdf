//! Exact spherical geometry on rays.
//!
//! A point of the sphere S^{n-1} is stored as a ray: a nonzero vector modulo
//! positive scaling, kept in its primitive integer form. Every predicate here
//! is a sign of an integer determinant, so no square roots or rounding ever
//! enter the index computations. The only floating-point code is the planar
//! winding oracle, which is gated by an integrality tolerance.

use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// Builds `p/q` as an exact rational. Panics if `q == 0`.
pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `p/q` with `q > 0`, including integers (`3/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Returns the primitive integer vector pointing in the same direction as
/// `coords`: denominators are cleared, the gcd of the numerators is divided
/// out, and signs are kept (the direction is never flipped).
pub fn canonicalize(coords: &[Rational]) -> Result<Vec<BigInt>> {
    if coords.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let lcm = coords
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<BigInt> = coords
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let gcd = scaled
        .iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c));
    Ok(scaled.into_iter().map(|c| c / &gcd).collect())
}

/// A point of S^{n-1} represented by a nonzero vector up to positive scaling.
///
/// Equality is equality of directions: two rays are equal iff one is a
/// positive multiple of the other.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RayVector {
    coords: Vec<BigInt>,
}

impl RayVector {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: coords.len() });
        }
        Ok(Self { coords: canonicalize(&coords)? })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_fracs(coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(p, q)| rational(p, q)).collect())
    }

    pub fn from_bigints(coords: Vec<BigInt>) -> Result<Self> {
        Self::new(coords.into_iter().map(Rational::from_integer).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Primitive integer representative.
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.coords.iter().cloned().map(Rational::from_integer).collect()
    }

    pub fn antipode(&self) -> RayVector {
        RayVector { coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn is_antipodal_to(&self, other: &RayVector) -> bool {
        self.coords.len() == other.coords.len()
            && self.coords.iter().zip(&other.coords).all(|(a, b)| a == &-b)
    }

    pub fn dot(&self, other: &RayVector) -> BigInt {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Debug for RayVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.iter().join(", "))
    }
}

/// Position of the origin relative to the convex hull of n+1 rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanVerdict {
    Interior,
    Exterior,
    Degenerate,
}

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn check_dims<'a>(vs: impl IntoIterator<Item = &'a RayVector>, n: usize) -> Result<()> {
    for v in vs {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
        }
    }
    Ok(())
}

fn det_of(vs: &[&RayVector]) -> BigInt {
    // det of the matrix with the vectors as columns equals det with them as rows
    let rows: Vec<Vec<BigInt>> = vs.iter().map(|v| v.coords.clone()).collect();
    determinant(&rows)
}

/// Sign of det[v_1 | ... | v_n]; invariant under positive rescaling of any column.
pub fn orientation_sign(vs: &[RayVector]) -> Result<i8> {
    let n = vs.len();
    check_dims(vs, n)?;
    let refs: Vec<&RayVector> = vs.iter().collect();
    Ok(sign_of(&det_of(&refs)))
}

/// Signed cofactors λ_i = (-1)^i det(tuple with entry i removed).
///
/// They satisfy Σ λ_i p_i = 0, so the origin is a positive combination of
/// the tuple exactly when all λ_i are nonzero and share one sign.
pub fn signed_cofactors(tuple: &[RayVector]) -> Result<Vec<BigInt>> {
    if tuple.len() < 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: tuple.len() });
    }
    let n = tuple.len() - 1;
    check_dims(tuple, n)?;
    Ok((0..=n)
        .map(|i| {
            let minor: Vec<&RayVector> =
                tuple.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).collect();
            let d = det_of(&minor);
            if i % 2 == 1 {
                -d
            } else {
                d
            }
        })
        .collect())
}

pub fn spans_origin(tuple: &[RayVector]) -> Result<SpanVerdict> {
    let lambdas = signed_cofactors(tuple)?;
    Ok(verdict_of(&lambdas))
}

fn verdict_of(lambdas: &[BigInt]) -> SpanVerdict {
    let signs: Vec<i8> = lambdas.iter().map(sign_of).collect();
    if signs.contains(&0) {
        SpanVerdict::Degenerate
    } else if signs.iter().all_equal() {
        SpanVerdict::Interior
    } else {
        SpanVerdict::Exterior
    }
}

fn has_repeat(tuple: &[RayVector]) -> bool {
    tuple.iter().tuple_combinations().any(|(a, b)| a == b)
}

/// Degree of the geodesic filling ∂Δ^n → S^{n-1} of an ordered n+1 tuple.
///
/// Returns the common sign of the signed cofactors when the origin is interior
/// to the hull, 0 when it is exterior or when the tuple repeats a point.
pub fn configuration_index(tuple: &[RayVector]) -> Result<i8> {
    let lambdas = signed_cofactors(tuple)?;
    if has_repeat(tuple) {
        return Ok(0);
    }
    match verdict_of(&lambdas) {
        SpanVerdict::Interior => Ok(sign_of(&lambdas[0])),
        SpanVerdict::Exterior => Ok(0),
        SpanVerdict::Degenerate => {
            let which = lambdas.iter().position(Zero::is_zero).unwrap_or(0);
            Err(Error::DegenerateConfiguration(format!(
                "determinant without point {which} is 0 for tuple {tuple:?}"
            )))
        }
    }
}

/// True iff every n-subset of the points is linearly independent.
pub fn is_antipodally_generic(points: &[RayVector]) -> bool {
    let Some(first) = points.first() else {
        return true;
    };
    let n = first.dim();
    if points.iter().any(|p| p.dim() != n) {
        return false;
    }
    points
        .iter()
        .combinations(n)
        .all(|subset| !det_of(&subset).is_zero())
}

fn to_f64_pair(a: &BigInt, b: &BigInt) -> (f64, f64) {
    let bits = a.bits().max(b.bits());
    if bits <= 1000 {
        return (a.to_f64().unwrap_or(0.0), b.to_f64().unwrap_or(0.0));
    }
    let shift = bits - 1000;
    ((a >> shift).to_f64().unwrap_or(0.0), (b >> shift).to_f64().unwrap_or(0.0))
}

/// Integrality tolerance of the floating-point winding oracle.
pub const WINDING_TOLERANCE: f64 = 1e-6;

/// Winding number about the origin of the closed loop of shortest arcs
/// through planar rays, taken in order.
pub fn winding_degree_2d(points: &[RayVector]) -> Result<i64> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "winding loop needs at least 3 points, got {}",
            points.len()
        )));
    }
    check_dims(points, 2)?;
    let m = points.len();
    let mut total = 0.0f64;
    for i in 0..m {
        let j = (i + 1) % m;
        let (p, q) = (points[i].coords(), points[j].coords());
        let cross = &p[0] * &q[1] - &p[1] * &q[0];
        let dot = &p[0] * &q[0] + &p[1] * &q[1];
        if cross.is_zero() && dot.is_negative() {
            return Err(Error::AntipodalPair(i, j));
        }
        let (c, d) = to_f64_pair(&cross, &dot);
        total += c.atan2(d);
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > WINDING_TOLERANCE {
        return Err(Error::DegenerateConfiguration(format!(
            "winding sum {turns} is not within tolerance of an integer"
        )));
    }
    Ok(rounded as i64)
}

/// Signed count of the boundary faces of the radially projected simplex
/// that the open ray through `probe` crosses.
///
/// Face i (the tuple with entry i removed) carries the boundary orientation
/// (-1)^i; its crossing contributes that sign times the orientation of the
/// face's own columns. Faces with vanishing determinant project onto a
/// lower-dimensional set and cannot be crossed by a generic probe.
pub fn radial_filling_degree(tuple: &[RayVector], probe: &RayVector) -> Result<i64> {
    if tuple.len() < 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: tuple.len() });
    }
    let n = tuple.len() - 1;
    check_dims(tuple.iter().chain(std::iter::once(probe)), n)?;

    // The probe must avoid the span of every (n-1)-subset: those spans carry
    // the codimension-two faces of the filling.
    for subset in tuple.iter().combinations(n - 1) {
        let mut cols: Vec<&RayVector> = vec![probe];
        cols.extend(subset);
        if det_of(&cols).is_zero() {
            return Err(Error::NonGenericProbe);
        }
    }

    let mut degree = 0i64;
    for i in 0..=n {
        let face: Vec<&RayVector> =
            tuple.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).collect();
        let face_sign = sign_of(&det_of(&face));
        if face_sign == 0 {
            continue;
        }
        // Cramer: probe = Σ μ_j face_j with sign(μ_j) = sign(det with column j replaced) * face_sign
        let inside = (0..n).all(|j| {
            let mut cols = face.clone();
            cols[j] = probe;
            sign_of(&det_of(&cols)) * face_sign > 0
        });
        if inside {
            let orient = if i % 2 == 0 { 1 } else { -1 };
            degree += orient * face_sign as i64;
        }
    }
    Ok(degree)
}

/// Deterministic probe schedule: (1,1,…,1), (1,2,4,…), (1,3,9,…), …
pub fn probe_schedule(n: usize, index: usize) -> RayVector {
    let base = BigInt::from(index as u64 + 1);
    let mut coords = Vec::with_capacity(n);
    let mut c = BigInt::one();
    for _ in 0..n {
        coords.push(c.clone());
        c *= &base;
    }
    RayVector::from_bigints(coords).expect("probe is nonzero")
}

/// Runs [`radial_filling_degree`] over the probe schedule until a generic probe is found.
pub fn radial_filling_degree_scheduled(tuple: &[RayVector], budget: usize) -> Result<i64> {
    let n = tuple.len().saturating_sub(1);
    for index in 0..budget {
        match radial_filling_degree(tuple, &probe_schedule(n, index)) {
            Err(Error::NonGenericProbe) => continue,
            other => return other,
        }
    }
    Err(Error::GenericityExhausted {
        stage: "probe".into(),
        detail: format!("no generic probe within {budget} attempts"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ray(c: &[(i64, i64)]) -> RayVector {
        RayVector::from_fracs(c).unwrap()
    }

    fn e1() -> RayVector {
        ray(&[(1, 1), (0, 1)])
    }
    fn e2() -> RayVector {
        ray(&[(0, 1), (1, 1)])
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(&[rational(2, 3), rational(4, 3)]).unwrap();
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(2)]);
        let c = canonicalize(&[rational(1, 1), rational(2, 1)]).unwrap();
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(2)]);
        let c = canonicalize(&[rational(-2, 1), rational(-4, 1)]).unwrap();
        assert_eq!(c, vec![BigInt::from(-1), BigInt::from(-2)]);
        assert_eq!(canonicalize(&[rational(0, 1), rational(0, 5)]), Err(Error::ZeroVector));
    }

    #[test]
    fn ray_equality_is_positive_scaling() {
        assert_eq!(ray(&[(2, 3), (4, 3)]), ray(&[(1, 1), (2, 1)]));
        assert_ne!(ray(&[(1, 1), (2, 1)]), ray(&[(-1, 1), (-2, 1)]));
        assert!(ray(&[(1, 1), (2, 1)]).is_antipodal_to(&ray(&[(-3, 1), (-6, 1)])));
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation_sign(&[e1(), e2()]).unwrap(), 1);
        assert_eq!(orientation_sign(&[e2(), e1()]).unwrap(), -1);
        assert_eq!(orientation_sign(&[e1(), ray(&[(2, 1), (0, 1)])]).unwrap(), 0);
        assert!(matches!(
            orientation_sign(&[e1(), ray(&[(1, 1), (0, 1), (0, 1)])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m: Vec<Vec<BigInt>> = [[2, -1, 3], [0, 4, 1], [5, 2, -2]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        // 2(-8-2) +1(0-5) + 3(0-20) = -20 - 5 - 60
        assert_eq!(determinant(&m), BigInt::from(-85));
        let z: Vec<Vec<BigInt>> = vec![
            vec![0.into(), 1.into()],
            vec![0.into(), 2.into()],
        ];
        assert!(determinant(&z).is_zero());
    }

    #[test]
    fn spans_origin_examples() {
        let c = ray(&[(-3, 5), (-4, 5)]);
        assert_eq!(spans_origin(&[e1(), e2(), c.clone()]).unwrap(), SpanVerdict::Interior);
        // λ = (3/5, 4/5, 1) ∝ (1/4, 1/3, 5/12) in the unit-norm representatives
        let l = signed_cofactors(&[e1(), e2(), ray(&[(-3, 1), (-4, 1)])]).unwrap();
        assert_eq!(l, vec![BigInt::from(3), BigInt::from(4), BigInt::from(1)]);
        assert_eq!(
            spans_origin(&[e1(), e2(), ray(&[(3, 5), (4, 5)])]).unwrap(),
            SpanVerdict::Exterior
        );
        assert_eq!(spans_origin(&[e1(), e1(), e2()]).unwrap(), SpanVerdict::Degenerate);
    }

    #[test]
    fn configuration_index_examples() {
        let p = ray(&[(-3, 5), (4, 5)]);
        let q = ray(&[(-3, 5), (-4, 5)]);
        assert_eq!(configuration_index(&[e1(), p.clone(), q.clone()]).unwrap(), 1);
        assert_eq!(configuration_index(&[p.clone(), e1(), q.clone()]).unwrap(), -1);
        let hemi = [e1(), ray(&[(3, 5), (4, 5)]), ray(&[(4, 5), (3, 5)])];
        assert_eq!(configuration_index(&hemi).unwrap(), 0);
        assert_eq!(configuration_index(&[e1(), e1(), q.clone()]).unwrap(), 0);
        let anti = [e1(), ray(&[(-1, 1), (0, 1)]), e2()];
        assert!(matches!(
            configuration_index(&anti),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn antipodal_genericity_examples() {
        assert!(is_antipodally_generic(&[e1(), e2(), ray(&[(-3, 5), (-4, 5)])]));
        assert!(!is_antipodally_generic(&[e1(), ray(&[(-1, 1), (0, 1)])]));
        assert!(!is_antipodally_generic(&[e1(), ray(&[(2, 1), (0, 1)])]));
    }

    #[test]
    fn winding_examples() {
        let p = ray(&[(-3, 5), (4, 5)]);
        let q = ray(&[(-3, 5), (-4, 5)]);
        assert_eq!(winding_degree_2d(&[e1(), p.clone(), q.clone()]).unwrap(), 1);
        assert_eq!(winding_degree_2d(&[e1(), q, p]).unwrap(), -1);
        let hemi = [e1(), ray(&[(3, 5), (4, 5)]), ray(&[(4, 5), (3, 5)])];
        assert_eq!(winding_degree_2d(&hemi).unwrap(), 0);
        let anti = [e1(), ray(&[(-1, 1), (0, 1)]), e2()];
        assert_eq!(winding_degree_2d(&anti), Err(Error::AntipodalPair(0, 1)));
    }

    #[test]
    fn radial_filling_examples() {
        let t = [e1(), ray(&[(-3, 5), (4, 5)]), ray(&[(-3, 5), (-4, 5)])];
        assert_eq!(radial_filling_degree(&t, &ray(&[(1, 1), (1, 1)])).unwrap(), 1);
        assert_eq!(radial_filling_degree(&t, &ray(&[(-1, 1), (-1, 1)])).unwrap(), 1);
        let hemi = [e1(), ray(&[(3, 5), (4, 5)]), ray(&[(4, 5), (3, 5)])];
        assert_eq!(radial_filling_degree(&hemi, &ray(&[(0, 1), (-1, 1)])).unwrap(), 0);
        // probe along a vertex ray meets a codimension-two face (a vertex, for n = 2)
        assert_eq!(radial_filling_degree(&t, &e1()), Err(Error::NonGenericProbe));
    }

    #[test]
    fn probe_schedule_values() {
        assert_eq!(probe_schedule(3, 0), RayVector::from_ints(&[1, 1, 1]).unwrap());
        assert_eq!(probe_schedule(3, 1), RayVector::from_ints(&[1, 2, 4]).unwrap());
        assert_eq!(probe_schedule(4, 2), RayVector::from_ints(&[1, 3, 9, 27]).unwrap());
    }
}
