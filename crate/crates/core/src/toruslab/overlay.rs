//! Dual complex of the overlay of π(∂Q) with a G×G grid on the torus.
//!
//! The arrangement is computed exactly. Faces are traced through the
//! rotation system at each vertex, each face d gets ν(d) = i + M·deg(Q, d)
//! with i its grid cell, and every 4-valent arrangement vertex becomes a
//! Cube² cell of the dual complex whose vertices are the four faces around
//! it. The projected corners of Q are 2-valent and produce no cell.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::region::{Point, QuasisectionRegion};
use crate::error::{Error, Result};
use crate::exactgeom::{rational, Rational};
use crate::triangulations::{nu_numbering, ProductCell};

#[derive(Debug, Clone)]
pub struct TorusOverlay {
    pub grid: usize,
    pub m: i64,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    /// ν of each face, indexed by face id; face `i` is labeled `d{i}`.
    pub face_nu: Vec<i64>,
    pub cells: Vec<ProductCell>,
}

impl TorusOverlay {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

#[derive(Debug, Clone)]
enum Curve {
    /// Edge of ∂Q traversed counterclockwise, so Q lies on its left.
    Boundary,
    /// Grid line y = r/G traversed in +x.
    Row(usize),
    /// Grid line x = c/G traversed in +y.
    Column(usize),
}

#[derive(Debug, Clone)]
struct Segment {
    start: Point,
    dir: Point,
    curve: Curve,
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn cross(a: &Point, b: &Point) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("small coordinate")
}

fn wrap(p: &Point) -> Point {
    [&p[0] - p[0].floor(), &p[1] - p[1].floor()]
}

fn at(s: &Segment, lambda: &Rational) -> Point {
    [&s.start[0] + lambda * &s.dir[0], &s.start[1] + lambda * &s.dir[1]]
}

fn bbox(s: &Segment) -> (Point, Point) {
    let end = at(s, &int(1));
    (
        [s.start[0].clone().min(end[0].clone()), s.start[1].clone().min(end[1].clone())],
        [s.start[0].clone().max(end[0].clone()), s.start[1].clone().max(end[1].clone())],
    )
}

/// Counterclockwise angular order of nonzero direction vectors.
fn angle_cmp(a: &Point, b: &Point) -> Ordering {
    let upper = |v: &Point| v[1].is_positive() || (v[1].is_zero() && v[0].is_positive());
    match (upper(a), upper(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => {
            let c = cross(a, b);
            if c.is_positive() {
                Ordering::Less
            } else if c.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
    }
}

struct HalfEdge {
    from: usize,
    dir: Point,
    twin: usize,
    /// (grid cell, covering degree) of the face on the left.
    left: (usize, i64),
}

/// Builds the overlay for a generic region with a `grid`×`grid` cell grid.
pub fn torus_overlay(region: &QuasisectionRegion, grid: usize) -> Result<TorusOverlay> {
    if grid < 2 {
        return Err(Error::InvalidInput(format!("grid size {grid} below 2")));
    }
    let g = grid as i64;
    let mut segments = Vec::new();
    let vs = region.vertices();
    for i in 0..4 {
        let (a, b) = (&vs[i], &vs[(i + 1) % 4]);
        segments.push(Segment { start: a.clone(), dir: [&b[0] - &a[0], &b[1] - &a[1]], curve: Curve::Boundary });
    }
    for r in 0..grid {
        segments.push(Segment { start: [int(0), rational(r as i64, g)], dir: [int(1), int(0)], curve: Curve::Row(r) });
        segments.push(Segment { start: [rational(r as i64, g), int(0)], dir: [int(0), int(1)], curve: Curve::Column(r) });
    }

    // split parameters along each segment
    let mut cuts: Vec<Vec<Rational>> = vec![vec![int(0), int(1)]; segments.len()];
    for (ai, a) in segments.iter().enumerate() {
        let (amin, amax) = bbox(a);
        for (bi, b) in segments.iter().enumerate() {
            let denom = cross(&a.dir, &b.dir);
            if denom.is_zero() {
                continue;
            }
            let (bmin, bmax) = bbox(b);
            let lo = [floor_i64(&(&amin[0] - &bmax[0])), floor_i64(&(&amin[1] - &bmax[1]))];
            let hi = [floor_i64(&(&amax[0] - &bmin[0])) + 1, floor_i64(&(&amax[1] - &bmin[1])) + 1];
            for dx in lo[0]..=hi[0] {
                for dy in lo[1]..=hi[1] {
                    if ai == bi {
                        continue;
                    }
                    let r = [&b.start[0] + int(dx) - &a.start[0], &b.start[1] + int(dy) - &a.start[1]];
                    let lambda = cross(&r, &b.dir) / &denom;
                    let mu = cross(&r, &a.dir) / &denom;
                    let unit = |x: &Rational| !x.is_negative() && *x <= int(1);
                    if unit(&lambda) && unit(&mu) {
                        cuts[ai].push(lambda);
                    }
                }
            }
        }
    }

    let mut vertex_ids: BTreeMap<Point, usize> = BTreeMap::new();
    let mut vertex_id = |p: &Point| {
        let n = vertex_ids.len();
        *vertex_ids.entry(wrap(p)).or_insert(n)
    };
    let mut half_edges: Vec<HalfEdge> = Vec::new();
    let m = g * g + 1;
    for (si, seg) in segments.iter().enumerate() {
        let mut ls = cuts[si].clone();
        ls.sort();
        ls.dedup();
        for w in ls.windows(2) {
            let (p, q) = (at(seg, &w[0]), at(seg, &w[1]));
            let mid = wrap(&at(seg, &((&w[0] + &w[1]) / int(2))));
            let cell_of = |row: i64, col: i64| (row.rem_euclid(g) * g + col.rem_euclid(g)) as usize;
            let row = floor_i64(&(&mid[1] * int(g)));
            let col = floor_i64(&(&mid[0] * int(g)));
            let (regular, boundary) = region.lifts(&mid);
            let k = regular.len() as i64;
            let (left, right) = match seg.curve {
                Curve::Boundary => {
                    if boundary.len() != 1 {
                        return Err(Error::InvalidInput("boundary piece overlaps another lift".into()));
                    }
                    ((cell_of(row, col), k + 1), (cell_of(row, col), k))
                }
                Curve::Row(r) => {
                    if !boundary.is_empty() {
                        return Err(Error::InvalidInput("grid piece runs along the boundary".into()));
                    }
                    ((cell_of(r as i64, col), k), (cell_of(r as i64 - 1, col), k))
                }
                Curve::Column(c) => {
                    if !boundary.is_empty() {
                        return Err(Error::InvalidInput("grid piece runs along the boundary".into()));
                    }
                    ((cell_of(row, c as i64 - 1), k), (cell_of(row, c as i64), k))
                }
            };
            let (a, b) = (vertex_id(&p), vertex_id(&q));
            let n = half_edges.len();
            let back = [-seg.dir[0].clone(), -seg.dir[1].clone()];
            half_edges.push(HalfEdge { from: a, dir: seg.dir.clone(), twin: n + 1, left });
            half_edges.push(HalfEdge { from: b, dir: back, twin: n, left: right });
        }
    }
    let vertex_count = vertex_ids.len();

    // rotation system: outgoing half-edges counterclockwise at each vertex
    let mut around: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    for (i, h) in half_edges.iter().enumerate() {
        around[h.from].push(i);
    }
    for list in &mut around {
        list.sort_by(|&x, &y| angle_cmp(&half_edges[x].dir, &half_edges[y].dir));
        if list.windows(2).any(|w| angle_cmp(&half_edges[w[0]].dir, &half_edges[w[1]].dir) == Ordering::Equal) {
            return Err(Error::InvalidInput("two arrangement edges leave a vertex in the same direction".into()));
        }
    }
    let position: BTreeMap<usize, (usize, usize)> = around
        .iter()
        .enumerate()
        .flat_map(|(v, list)| list.iter().enumerate().map(move |(k, &h)| (h, (v, k))))
        .collect();
    // next half-edge around the face on the left: clockwise neighbour of the twin
    let next = |h: usize| {
        let t = half_edges[h].twin;
        let (v, k) = position[&t];
        let list = &around[v];
        list[(k + list.len() - 1) % list.len()]
    };

    let mut face_of = vec![usize::MAX; half_edges.len()];
    let mut face_data: Vec<(usize, i64)> = Vec::new();
    for start in 0..half_edges.len() {
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = face_data.len();
        face_data.push(half_edges[start].left);
        let mut h = start;
        loop {
            if half_edges[h].left != half_edges[start].left {
                return Err(Error::InvalidInput(format!("face {id} mixes grid cells or covering degrees")));
            }
            face_of[h] = id;
            h = next(h);
            if h == start {
                break;
            }
        }
    }
    let face_nu = nu_numbering(&face_data, m, grid * grid)?;

    let mut cells = Vec::new();
    for (v, list) in around.iter().enumerate() {
        match list.len() {
            2 => continue,
            4 => {}
            k => return Err(Error::InvalidInput(format!("arrangement vertex {v} has valence {k}"))),
        }
        let faces: Vec<usize> = list.iter().map(|&h| face_of[h]).collect();
        // faces counterclockwise become square corners 00, 10, 11, 01
        let by_bits = [faces[0], faces[1], faces[3], faces[2]];
        let labels = by_bits.iter().map(|f| format!("d{f}")).collect();
        let nus = by_bits.iter().map(|&f| face_nu[f]).collect();
        cells.push(ProductCell::new(2, 0, labels, nus)?);
    }

    Ok(TorusOverlay {
        grid,
        m,
        vertices: vertex_count,
        edges: half_edges.len() / 2,
        faces: face_data.len(),
        face_nu,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toruslab::build_region;
    use crate::triangulations::assemble_triangulation;

    #[test]
    fn l2_overlay_is_a_torus() {
        let region = build_region(2, 0).unwrap();
        let overlay = torus_overlay(&region, 3).unwrap();
        assert_eq!(overlay.euler_characteristic(), 0);
        let assembly = assemble_triangulation(&overlay.cells).unwrap();
        assert!(assembly.no_new_vertices);
        assert_eq!(assembly.complex.vertices().len(), overlay.faces);
        assert_eq!(assembly.complex.euler_characteristic(), 0);
        assert!(assembly.complex.every_facet_shared_twice());
    }
}
