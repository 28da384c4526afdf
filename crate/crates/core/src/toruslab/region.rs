//! Sheared parallelogram quasisection regions and their genericity audits.
//!
//! A region is Q = {c + s·u + t·w : |s|, |t| ≤ h} with u = (1, ε₁),
//! w = (ε₂, 1) and c the center of the Følner box [0, L]². Most geometry
//! is done in the (s, t) frame, where Q is the square [−h, h]² and ℤ²
//! becomes the lattice spanned by φ(e₁), φ(e₂).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::{format_rational, rational, Rational};

pub type Point = [Rational; 2];
pub type Lattice = (i64, i64);

/// Shear and margin of a parallelogram region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shear {
    pub eps1: Rational,
    pub eps2: Rational,
    pub delta: Rational,
}

impl Shear {
    /// Entry `index` of the deterministic retry schedule:
    /// ε₁ = 1/(97 + 2·index), ε₂ = 1/(103 + 4·index), δ = 1/101.
    pub fn scheduled(index: usize) -> Self {
        let i = index as i64;
        Shear { eps1: rational(1, 97 + 2 * i), eps2: rational(1, 103 + 4 * i), delta: rational(1, 101) }
    }
}

/// Edges of ∂Q, traversed counterclockwise. Bottom and top run along u
/// (family 1), right and left along w (family 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryEdge {
    Bottom,
    Right,
    Top,
    Left,
}

impl BoundaryEdge {
    pub const ALL: [BoundaryEdge; 4] = [BoundaryEdge::Bottom, BoundaryEdge::Right, BoundaryEdge::Top, BoundaryEdge::Left];

    pub fn family(self) -> u8 {
        match self {
            BoundaryEdge::Bottom | BoundaryEdge::Top => 1,
            BoundaryEdge::Right | BoundaryEdge::Left => 2,
        }
    }

    /// Side of the fixed local coordinate: t = sign·h for family 1, s = sign·h for family 2.
    fn sign(self) -> i64 {
        match self {
            BoundaryEdge::Bottom | BoundaryEdge::Left => -1,
            BoundaryEdge::Top | BoundaryEdge::Right => 1,
        }
    }
}

/// A transverse double point of π(∂Q) with the lattice data above it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingSite {
    /// Point of the torus, in [0, 1)².
    pub position: Point,
    /// Family-1 branch: its edge and the lift g_h with position + g_h on that edge.
    pub horizontal: (BoundaryEdge, Lattice),
    /// Family-2 branch.
    pub vertical: (BoundaryEdge, Lattice),
    /// Lifts landing in the open interior of Q, sorted.
    pub regular: Vec<Lattice>,
}

/// Projection of a corner of Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerSite {
    pub position: Point,
    pub lift: Lattice,
    pub regular: Vec<Lattice>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasisectionRegion {
    l: i64,
    schedule_index: usize,
    shear: Shear,
    center: Point,
    half: Rational,
    det: Rational,
    crossings: Vec<CrossingSite>,
    corners: Vec<CornerSite>,
    n_inner: usize,
    n_boundary: usize,
}

fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("coordinate fits in i64")
}

fn ceil_i64(r: &Rational) -> i64 {
    r.ceil().to_integer().to_i64().expect("coordinate fits in i64")
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

impl QuasisectionRegion {
    /// Region for box size `l` and the given shear, or the first failed audit.
    pub fn with_shear(l: i64, shear: Shear, schedule_index: usize) -> std::result::Result<Self, String> {
        if l < 2 {
            return Err(format!("box size {l} below 2"));
        }
        let det = Rational::one() - &shear.eps1 * &shear.eps2;
        if det.is_zero() {
            return Err("edge families are parallel".into());
        }
        if det.is_negative() {
            return Err("shear reverses orientation".into());
        }
        let half_l = rational(l, 2);
        let center = [half_l.clone(), half_l.clone()];
        let mut region = QuasisectionRegion {
            l,
            schedule_index,
            shear,
            center,
            half: Rational::zero(),
            det,
            crossings: Vec::new(),
            corners: Vec::new(),
            n_inner: 0,
            n_boundary: 0,
        };
        // smallest h with [0, L]² ⊆ Q, plus the margin
        let mut h = Rational::zero();
        for (x, y) in [(0, 0), (l, 0), (0, l), (l, l)] {
            let [s, t] = region.local(&[int(x), int(y)]);
            h = h.max(s.abs()).max(t.abs());
        }
        region.half = h + &region.shear.delta;

        region.check_parallel_overlaps()?;
        region.crossings = region.find_crossings()?;
        if region.crossings.is_empty() {
            return Err("boundary families do not cross".into());
        }
        let distinct: BTreeSet<&Point> = region.crossings.iter().map(|c| &c.position).collect();
        if distinct.len() != region.crossings.len() {
            return Err("two crossings project to the same torus point".into());
        }
        region.corners = region.find_corners()?;
        let (inner, boundary) = region.count_squares();
        if inner != (l * l) as usize {
            return Err(format!("{inner} inner squares instead of {}", l * l));
        }
        region.n_inner = inner;
        region.n_boundary = boundary;
        Ok(region)
    }

    pub fn l(&self) -> i64 {
        self.l
    }
    pub fn schedule_index(&self) -> usize {
        self.schedule_index
    }
    pub fn shear(&self) -> &Shear {
        &self.shear
    }
    /// Half side h of Q in the (s, t) frame.
    pub fn half_side(&self) -> &Rational {
        &self.half
    }
    /// Basepoint a: the center of Q.
    pub fn basepoint(&self) -> &Point {
        &self.center
    }
    pub fn crossing_sites(&self) -> &[CrossingSite] {
        &self.crossings
    }
    pub fn corner_sites(&self) -> &[CornerSite] {
        &self.corners
    }
    /// 𝐍: unit squares g + [0,1]² contained in Q.
    pub fn n_inner(&self) -> usize {
        self.n_inner
    }
    /// 𝐍∂: unit squares meeting Q without being contained in it.
    pub fn n_boundary(&self) -> usize {
        self.n_boundary
    }

    pub fn u(&self) -> Point {
        [Rational::one(), self.shear.eps1.clone()]
    }
    pub fn w(&self) -> Point {
        [self.shear.eps2.clone(), Rational::one()]
    }

    /// Counterclockwise unit tangent of an edge.
    pub fn tangent(&self, edge: BoundaryEdge) -> Point {
        let [a, b] = match edge {
            BoundaryEdge::Bottom | BoundaryEdge::Top => self.u(),
            BoundaryEdge::Right | BoundaryEdge::Left => self.w(),
        };
        match edge {
            BoundaryEdge::Bottom | BoundaryEdge::Right => [a, b],
            BoundaryEdge::Top | BoundaryEdge::Left => [-a, -b],
        }
    }

    /// Inward normal of an edge: its tangent turned a quarter left.
    pub fn inward_normal(&self, edge: BoundaryEdge) -> Point {
        let [a, b] = self.tangent(edge);
        [-b, a]
    }

    /// Corners counterclockwise from c − h·u − h·w.
    pub fn vertices(&self) -> [Point; 4] {
        let h = &self.half;
        [(-1, -1), (1, -1), (1, 1), (-1, 1)].map(|(a, b)| self.world(&(h * int(a)), &(h * int(b))))
    }

    /// (s, t) frame coordinates of a world vector (no translation).
    pub fn frame(&self, v: &Point) -> Point {
        let (e1, e2) = (&self.shear.eps1, &self.shear.eps2);
        [(&v[0] - e2 * &v[1]) / &self.det, (&v[1] - e1 * &v[0]) / &self.det]
    }

    /// (s, t) coordinates of a world point.
    pub fn local(&self, p: &Point) -> Point {
        self.frame(&[&p[0] - &self.center[0], &p[1] - &self.center[1]])
    }

    pub fn world(&self, s: &Rational, t: &Rational) -> Point {
        let (e1, e2) = (&self.shear.eps1, &self.shear.eps2);
        [&self.center[0] + s + e2 * t, &self.center[1] + e1 * s + t]
    }

    fn lattice_frame(&self, g: Lattice) -> Point {
        self.frame(&[int(g.0), int(g.1)])
    }

    /// Integer translates g that can carry a point of [0,1)² into Q.
    pub fn lattice_window(&self) -> (std::ops::RangeInclusive<i64>, std::ops::RangeInclusive<i64>) {
        let vs = self.vertices();
        let xs = vs.iter().map(|v| &v[0]);
        let ys = vs.iter().map(|v| &v[1]);
        let (x0, x1) = (xs.clone().min().unwrap(), xs.max().unwrap());
        let (y0, y1) = (ys.clone().min().unwrap(), ys.max().unwrap());
        (floor_i64(x0) - 1..=ceil_i64(x1), floor_i64(y0) - 1..=ceil_i64(y1))
    }

    /// Regular and boundary lifts of a torus point.
    pub fn lifts(&self, x: &Point) -> (Vec<Lattice>, Vec<Lattice>) {
        let base = self.local(x);
        let (gx, gy) = self.lattice_window();
        let phi = [self.lattice_frame((1, 0)), self.lattice_frame((0, 1))];
        let f = |r: &Rational| r.to_f64().expect("finite");
        let (bs, bt) = (f(&base[0]), f(&base[1]));
        let (p1, p2) = ([f(&phi[0][0]), f(&phi[0][1])], [f(&phi[1][0]), f(&phi[1][1])]);
        let h = f(&self.half);
        let mut regular = Vec::new();
        let mut boundary = Vec::new();
        for i in gx {
            for j in gy.clone() {
                // floating-point filter; exact arithmetic only near ∂Q
                let s = bs + i as f64 * p1[0] + j as f64 * p2[0];
                let t = bt + i as f64 * p1[1] + j as f64 * p2[1];
                let m = s.abs().max(t.abs());
                if m < h - 1e-9 {
                    regular.push((i, j));
                    continue;
                }
                if m > h + 1e-9 {
                    continue;
                }
                let (ri, rj) = (int(i), int(j));
                let es = &base[0] + &ri * &phi[0][0] + &rj * &phi[1][0];
                let et = &base[1] + &ri * &phi[0][1] + &rj * &phi[1][1];
                let m = es.abs().max(et.abs());
                if m < self.half {
                    regular.push((i, j));
                } else if m == self.half {
                    boundary.push((i, j));
                }
            }
        }
        (regular, boundary)
    }

    fn translation_bound(&self) -> i64 {
        let two_h = &self.half * int(2);
        let ex = &two_h * (Rational::one() + self.shear.eps2.abs());
        let ey = &two_h * (Rational::one() + self.shear.eps1.abs());
        ceil_i64(&ex.max(ey))
    }

    fn translations(&self) -> impl Iterator<Item = (Lattice, Point)> + '_ {
        let r = self.translation_bound();
        (-r..=r).flat_map(move |i| (-r..=r).map(move |j| ((i, j), self.lattice_frame((i, j)))))
    }

    /// Parallel edges of one family must never overlap after translation.
    fn check_parallel_overlaps(&self) -> std::result::Result<(), String> {
        let h = &self.half;
        let two_h = h * int(2);
        for (d, fd) in self.translations() {
            for a in [-1, 1] {
                for b in [-1, 1] {
                    if d == (0, 0) && a == b {
                        continue;
                    }
                    // family 1 lines t = a·h; family 2 lines s = a·h
                    if h * int(a) + &fd[1] == h * int(b) && fd[0].abs() <= two_h {
                        return Err(format!("family-1 edges overlap under translation {d:?}"));
                    }
                    if h * int(a) + &fd[0] == h * int(b) && fd[1].abs() <= two_h {
                        return Err(format!("family-2 edges overlap under translation {d:?}"));
                    }
                }
            }
        }
        Ok(())
    }

    fn torus_point(p: &Point) -> (Point, Lattice) {
        let g = (floor_i64(&p[0]), floor_i64(&p[1]));
        ([&p[0] - int(g.0), &p[1] - int(g.1)], g)
    }

    fn find_crossings(&self) -> std::result::Result<Vec<CrossingSite>, String> {
        let h = &self.half;
        let mut out = Vec::new();
        // d = 0 only meets at the corners of Q itself
        for (d, fd) in self.translations().filter(|(d, _)| *d != (0, 0)) {
            for horizontal in [BoundaryEdge::Bottom, BoundaryEdge::Top] {
                for vertical in [BoundaryEdge::Left, BoundaryEdge::Right] {
                    // (s₁, ±h) on the family-1 edge equals (±h, t₂) on the family-2 edge plus φ(d)
                    let s1 = h * int(vertical.sign()) + &fd[0];
                    let t2 = h * int(horizontal.sign()) - &fd[1];
                    if s1.abs() > *h || t2.abs() > *h {
                        continue;
                    }
                    if s1.abs() == *h || t2.abs() == *h {
                        return Err(format!("boundary crosses itself at a corner under translation {d:?}"));
                    }
                    let p = self.world(&(h * int(vertical.sign())), &t2);
                    let (x, g_v) = Self::torus_point(&p);
                    let g_h = (g_v.0 + d.0, g_v.1 + d.1);
                    let (regular, boundary) = self.lifts(&x);
                    if boundary.len() != 2 {
                        return Err(format!(
                            "{} boundary lifts over crossing ({}, {})",
                            boundary.len(),
                            format_rational(&x[0]),
                            format_rational(&x[1])
                        ));
                    }
                    out.push(CrossingSite { position: x, horizontal: (horizontal, g_h), vertical: (vertical, g_v), regular });
                }
            }
        }
        out.sort_by(|a, b| a.position.cmp(&b.position));
        Ok(out)
    }

    fn find_corners(&self) -> std::result::Result<Vec<CornerSite>, String> {
        self.vertices()
            .iter()
            .map(|v| {
                let (x, lift) = Self::torus_point(v);
                let (regular, boundary) = self.lifts(&x);
                if boundary.len() != 1 {
                    return Err(format!("corner projection meets {} boundary lifts", boundary.len()));
                }
                Ok(CornerSite { position: x, lift, regular })
            })
            .collect()
    }

    fn square_state(&self, g: Lattice) -> (bool, bool) {
        let corners: Vec<Point> = [(0, 0), (1, 0), (1, 1), (0, 1)]
            .iter()
            .map(|&(a, b)| [int(g.0 + a), int(g.1 + b)])
            .collect();
        let contained = corners.iter().all(|p| {
            let [s, t] = self.local(p);
            s.abs() <= self.half && t.abs() <= self.half
        });
        if contained {
            return (true, true);
        }
        // separating axes: the two square normals and the two parallelogram normals
        let q = self.vertices();
        let axes: [Point; 4] = [
            [Rational::one(), Rational::zero()],
            [Rational::zero(), Rational::one()],
            [-self.shear.eps1.clone(), Rational::one()],
            [Rational::one(), -self.shear.eps2.clone()],
        ];
        let separated = axes.iter().any(|a| {
            let proj = |p: &Point| &a[0] * &p[0] + &a[1] * &p[1];
            let (s0, s1) = min_max(corners.iter().map(proj));
            let (q0, q1) = min_max(q.iter().map(proj));
            s1 < q0 || q1 < s0
        });
        (!separated, false)
    }

    fn count_squares(&self) -> (usize, usize) {
        let (gx, gy) = self.lattice_window();
        let mut inner = 0;
        let mut boundary = 0;
        for i in gx {
            for j in gy.clone() {
                match self.square_state((i, j)) {
                    (true, true) => inner += 1,
                    (true, false) => boundary += 1,
                    _ => {}
                }
            }
        }
        (inner, boundary)
    }
}

fn min_max(it: impl Iterator<Item = Rational>) -> (Rational, Rational) {
    let v: Vec<Rational> = it.collect();
    (v.iter().min().unwrap().clone(), v.iter().max().unwrap().clone())
}

/// Region for box size `l`, starting at `schedule_index` of the shear
/// schedule and retrying up to `budget` entries.
pub fn build_region_with_budget(l: i64, schedule_index: usize, budget: usize) -> Result<QuasisectionRegion> {
    if l < 2 {
        return Err(Error::InvalidInput(format!("box size {l} below 2")));
    }
    let mut last = String::from("empty retry budget");
    for index in schedule_index..schedule_index + budget.max(1) {
        match QuasisectionRegion::with_shear(l, Shear::scheduled(index), index) {
            Ok(region) => return Ok(region),
            Err(reason) => last = format!("schedule {index}: {reason}"),
        }
    }
    Err(Error::GenericityExhausted { stage: "shear".into(), detail: last })
}
