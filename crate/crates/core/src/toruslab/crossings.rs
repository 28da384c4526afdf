//! Crossing configurations of π(∂Q) and the two-dimensional geometric
//! check of the chamber-chain sign convention.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::holonomy::{sheet_ray, HolonomyPair};
use super::region::{Lattice, Point, QuasisectionRegion};
use crate::error::{Error, Result};
use crate::exactgeom::{configuration_index, rational, RayVector, Rational};
use crate::exec::Execution;
use crate::localformula::CrossingConfiguration;

/// How the two bordered sheets at a crossing are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchOrder {
    /// a₁ is the branch whose tangent t₁ has det[t₁, t₂] > 0.
    #[default]
    Oriented,
    /// Lexicographically smaller lift first, ignoring orientation.
    /// Deliberately wrong; used to confirm the integrality and arbitration
    /// checks catch a missing orientation sign.
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusCrossing {
    pub id: usize,
    pub position: Point,
    /// Lift on a family-1 edge and that edge's counterclockwise tangent.
    pub g_h: Lattice,
    pub tangent_h: Point,
    pub ray_h: RayVector,
    /// Lift on a family-2 edge and its tangent.
    pub g_v: Lattice,
    pub tangent_v: Point,
    pub ray_v: RayVector,
    pub regular_lifts: Vec<Lattice>,
    pub configuration: CrossingConfiguration,
}

fn cross(a: &Point, b: &Point) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn left_normal(t: &Point) -> Point {
    [-t[1].clone(), t[0].clone()]
}

impl TorusCrossing {
    /// True when the family-1 branch comes first in the bordered order.
    pub fn horizontal_first(&self, order: BranchOrder) -> bool {
        match order {
            BranchOrder::Oriented => cross(&self.tangent_h, &self.tangent_v).is_positive(),
            BranchOrder::Lattice => self.g_h < self.g_v,
        }
    }

    fn configure(&mut self, order: BranchOrder) -> Result<()> {
        let bordered = if self.horizontal_first(order) {
            vec![self.ray_h.clone(), self.ray_v.clone()]
        } else {
            vec![self.ray_v.clone(), self.ray_h.clone()]
        };
        let regular = self.configuration.regular().to_vec();
        self.configuration = CrossingConfiguration::new(2, bordered, regular)?;
        Ok(())
    }

    /// The same sheets with the two branch tangents exchanged, which
    /// reverses the local orientation and hence the bordered order.
    pub fn mirrored(&self) -> Result<TorusCrossing> {
        let mut m = self.clone();
        std::mem::swap(&mut m.tangent_h, &mut m.tangent_v);
        m.configure(BranchOrder::Oriented)?;
        Ok(m)
    }
}

/// Starting rays tried after the requested one: (1, 1/p) for primes p ≥ 7.
pub fn v0_schedule(count: usize) -> Vec<RayVector> {
    let mut primes = Vec::new();
    let mut p = 7i64;
    while primes.len() < count {
        if (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            primes.push(p);
        }
        p += 1;
    }
    primes
        .into_iter()
        .map(|p| RayVector::new(vec![rational(1, 1), rational(1, p)]).expect("nonzero"))
        .collect()
}

fn crossings_for(
    region: &QuasisectionRegion,
    pair: &HolonomyPair,
    v0: &RayVector,
    order: BranchOrder,
    exec: Execution,
) -> Result<Option<Vec<TorusCrossing>>> {
    let (gx, gy) = region.lattice_window();
    let lattice: Vec<Lattice> = gx.flat_map(|i| gy.clone().map(move |j| (i, j))).collect();
    let rays: BTreeMap<Lattice, RayVector> = lattice
        .iter()
        .copied()
        .zip(exec.map(&lattice, |&g| sheet_ray(pair, g, v0)))
        .collect();

    let sites = region.crossing_sites();
    let indices: Vec<usize> = (0..sites.len()).collect();
    let built = exec.try_map(&indices, |&id| -> Result<Option<TorusCrossing>> {
        let site = &sites[id];
        let ray = |g: &Lattice| rays.get(g).cloned().ok_or_else(|| Error::InvalidInput(format!("lift {g:?} outside window")));
        let regular: Vec<RayVector> = site.regular.iter().map(ray).collect::<Result<_>>()?;
        let (edge_h, g_h) = site.horizontal;
        let (edge_v, g_v) = site.vertical;
        let mut crossing = TorusCrossing {
            id,
            position: site.position.clone(),
            g_h,
            tangent_h: region.tangent(edge_h),
            ray_h: ray(&g_h)?,
            g_v,
            tangent_v: region.tangent(edge_v),
            ray_v: ray(&g_v)?,
            regular_lifts: site.regular.clone(),
            configuration: CrossingConfiguration::new(2, vec![ray(&g_h)?, ray(&g_v)?], regular)?,
        };
        crossing.configure(order)?;
        Ok(crossing.configuration.is_generic().then_some(crossing))
    })?;
    Ok(built.into_iter().collect())
}

/// All crossings of π(∂Q) with their sheet configurations. Starts from
/// `v0` and moves along [`v0_schedule`] until every configuration is
/// antipodally generic, trying at most `budget` starting rays. Returns the
/// starting ray actually used.
pub fn boundary_crossings_with(
    region: &QuasisectionRegion,
    pair: &HolonomyPair,
    v0: &RayVector,
    budget: usize,
    order: BranchOrder,
    exec: Execution,
) -> Result<(RayVector, Vec<TorusCrossing>)> {
    if v0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: v0.dim() });
    }
    let budget = budget.max(1);
    let candidates = std::iter::once(v0.clone()).chain(v0_schedule(budget - 1));
    for candidate in candidates {
        if let Some(list) = crossings_for(region, pair, &candidate, order, exec)? {
            return Ok((candidate, list));
        }
    }
    Err(Error::GenericityExhausted {
        stage: "v0".into(),
        detail: format!("no antipodally generic starting ray among {budget} tried"),
    })
}

pub fn boundary_crossings(region: &QuasisectionRegion, pair: &HolonomyPair, v0: &RayVector) -> Result<Vec<TorusCrossing>> {
    boundary_crossings_with(region, pair, v0, super::DEFAULT_RETRY_BUDGET, BranchOrder::Oriented, Execution::default())
        .map(|(_, c)| c)
}

/// Point y with n₁·y = a and n₂·y = b.
fn chamber_point(n1: &Point, n2: &Point, a: i64, b: i64) -> Point {
    let det = cross(n1, n2);
    let (a, b) = (Rational::from_integer(BigInt::from(a)), Rational::from_integer(BigInt::from(b)));
    [(&a * &n2[1] - &b * &n1[1]) / &det, (&n1[0] * &b - &n2[0] * &a) / &det]
}

/// Expected vertex index for each of the two chamber chains at a crossing,
/// with the three cells around the dual vertex taken counterclockwise in
/// the plane rather than in chain order. The first value belongs to the
/// chain that first adds bordered sheet a₁ of the crossing's configuration.
pub fn n2_geometric_vertex_expectations(crossing: &TorusCrossing) -> Result<[Rational; 2]> {
    let n_h = left_normal(&crossing.tangent_h);
    let n_v = left_normal(&crossing.tangent_v);
    if cross(&n_h, &n_v).is_zero() {
        return Err(Error::DegenerateConfiguration("branch tangents are parallel".into()));
    }
    let regular = crossing.configuration.regular();
    let all_inside: Vec<&RayVector> = regular.iter().chain([&crossing.ray_h, &crossing.ray_v]).collect();
    let c0: Vec<&RayVector> = regular.iter().collect();
    let p0 = chamber_point(&n_h, &n_v, -1, -1);
    let p2 = chamber_point(&n_h, &n_v, 1, 1);

    let chain_value = |h_first: bool| -> Result<Rational> {
        let (mid_point, extra) = if h_first {
            (chamber_point(&n_h, &n_v, 1, -1), &crossing.ray_h)
        } else {
            (chamber_point(&n_h, &n_v, -1, 1), &crossing.ray_v)
        };
        let mid: Vec<&RayVector> = regular.iter().chain([extra]).collect();
        let d1 = [&mid_point[0] - &p0[0], &mid_point[1] - &p0[1]];
        let d2 = [&p2[0] - &p0[0], &p2[1] - &p0[1]];
        let cells: [&Vec<&RayVector>; 3] = if cross(&d1, &d2).is_positive() {
            [&c0, &mid, &all_inside]
        } else {
            [&c0, &all_inside, &mid]
        };
        let mut total = 0i64;
        for a in cells[0] {
            for b in cells[1] {
                for c in cells[2] {
                    total += configuration_index(&[(*a).clone(), (*b).clone(), (*c).clone()])? as i64;
                }
            }
        }
        let count = cells.iter().map(|c| c.len() as i64).product::<i64>();
        Ok(rational(total, count))
    };

    let h_is_a1 = crossing.configuration.bordered()[0] == crossing.ray_h;
    let first = chain_value(h_is_a1)?;
    let second = chain_value(!h_is_a1)?;
    Ok([first, second])
}
