//! Triangulations without new vertices: staircase triangulations of
//! Δ^k × Δ^m, symmetric (Kuhn) triangulations of marked cubes, their face
//! restrictions, and the ν-driven triangulation of product cells
//! Cube^k × Δ^{n-k} assembled into one complex.
//!
//! Complexes are stored abstractly: labeled vertices plus maximal simplices
//! as sorted vertex-index lists. The staircase, Kuhn and product-cell
//! constructions also attach their standard rational realization, used only
//! by [`SimplicialComplex::audit`].

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::Rational;
use crate::localformula::factorial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub label: String,
    pub coords: Option<Vec<Rational>>,
    pub nu: Option<i64>,
}

impl Vertex {
    pub fn labeled(label: impl Into<String>) -> Self {
        Self { label: label.into(), coords: None, nu: None }
    }
}

/// Underlying cell a complex triangulates, when it is one of the standard ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellShape {
    /// Δ^k × Δ^m with vertices labeled `"i,j"`.
    Product { k: usize, m: usize },
    /// The n-cube with vertices labeled by bit strings.
    Cube { n: usize },
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<Vertex>,
    simplices: Vec<Vec<usize>>,
    shape: CellShape,
}

/// Summary of the checks run on a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexAudit {
    pub vertices: usize,
    pub simplices: usize,
    pub dimension: Option<usize>,
    pub euler_characteristic: i64,
    /// Σ of realized simplex volumes, when every vertex is realized.
    pub total_volume: Option<Rational>,
    /// Every simplex has nonzero volume, interior facets separate their two
    /// simplices, and unshared facets lie on the hull boundary.
    pub facets_ok: Option<bool>,
}

impl SimplicialComplex {
    pub fn new(vertices: Vec<Vertex>, simplices: Vec<Vec<usize>>, shape: CellShape) -> Result<Self> {
        let labels: BTreeSet<&str> = vertices.iter().map(|v| v.label.as_str()).collect();
        if labels.len() != vertices.len() {
            return Err(Error::InvalidInput("duplicate vertex labels".into()));
        }
        let mut canon = Vec::with_capacity(simplices.len());
        for s in simplices {
            let sorted: Vec<usize> = s.iter().copied().sorted().collect();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("simplex {s:?} repeats a vertex")));
            }
            if sorted.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidInput(format!("simplex {s:?} has an unknown vertex")));
            }
            canon.push(sorted);
        }
        canon.sort();
        canon.dedup();
        Ok(Self { vertices, simplices: canon, shape })
    }

    /// Builds a complex from simplices given by vertex labels.
    pub fn from_labeled(vertices: Vec<Vertex>, simplices: &[Vec<String>], shape: CellShape) -> Result<Self> {
        let index: BTreeMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.label.as_str(), i)).collect();
        let mut idx = Vec::with_capacity(simplices.len());
        for s in simplices {
            let mut ids = Vec::with_capacity(s.len());
            for l in s {
                ids.push(*index
                    .get(l.as_str())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown vertex label {l}")))?);
            }
            idx.push(ids);
        }
        Self::new(vertices, idx, shape)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }
    pub fn shape(&self) -> CellShape {
        self.shape
    }

    pub fn vertex_labels(&self) -> BTreeSet<String> {
        self.vertices.iter().map(|v| v.label.clone()).collect()
    }

    /// Maximal simplices as label sets; two complexes triangulate a cell the
    /// same way iff these agree.
    pub fn simplex_label_sets(&self) -> BTreeSet<BTreeSet<String>> {
        self.simplices
            .iter()
            .map(|s| s.iter().map(|&i| self.vertices[i].label.clone()).collect())
            .collect()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len()).max().map(|l| l - 1)
    }

    /// Alternating count of all faces of all maximal simplices.
    pub fn euler_characteristic(&self) -> i64 {
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in &self.simplices {
            for r in 1..=s.len() {
                for f in s.iter().copied().combinations(r) {
                    faces.insert(f);
                }
            }
        }
        faces
            .iter()
            .map(|f| if f.len() % 2 == 1 { 1 } else { -1 })
            .sum()
    }

    /// Every codimension-one face lies in exactly two maximal simplices, as
    /// in a triangulated closed manifold.
    pub fn every_facet_shared_twice(&self) -> bool {
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for s in &self.simplices {
            for pos in 0..s.len() {
                let mut f = s.clone();
                f.remove(pos);
                *count.entry(f).or_default() += 1;
            }
        }
        count.values().all(|&c| c == 2)
    }

    fn realized(&self) -> Option<Vec<&Vec<Rational>>> {
        self.vertices.iter().map(|v| v.coords.as_ref()).collect()
    }

    /// Volume of a maximal simplex in the attached realization.
    pub fn simplex_volume(&self, simplex: &[usize]) -> Option<Rational> {
        let pts = self.realized()?;
        let d = pts.first()?.len();
        if simplex.len() != d + 1 {
            return None;
        }
        let det = edge_determinant(simplex.iter().map(|&i| pts[i]).collect::<Vec<_>>().as_slice());
        Some(det.abs() / Rational::from_integer(factorial(d)))
    }

    pub fn audit(&self) -> ComplexAudit {
        let mut audit = ComplexAudit {
            vertices: self.vertices.len(),
            simplices: self.simplices.len(),
            dimension: self.dimension(),
            euler_characteristic: self.euler_characteristic(),
            total_volume: None,
            facets_ok: None,
        };
        if let Some(pts) = self.realized() {
            let vols: Option<Vec<Rational>> = self.simplices.iter().map(|s| self.simplex_volume(s)).collect();
            if let Some(vols) = vols {
                let nonzero = vols.iter().all(|v| !v.is_zero());
                audit.total_volume = Some(vols.into_iter().fold(Rational::zero(), |a, v| a + v));
                audit.facets_ok = Some(nonzero && self.facets_separate(&pts));
            }
        }
        audit
    }

    fn facets_separate(&self, pts: &[&Vec<Rational>]) -> bool {
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for s in &self.simplices {
            for (pos, &opp) in s.iter().enumerate() {
                let mut f = s.clone();
                f.remove(pos);
                facets.entry(f).or_default().push(opp);
            }
        }
        facets.iter().all(|(f, opps)| {
            let side = |p: &Vec<Rational>| {
                let mut cols: Vec<&Vec<Rational>> = f.iter().map(|&i| pts[i]).collect();
                cols.push(p);
                sign_of_rational(&edge_determinant(&cols))
            };
            match opps.as_slice() {
                [a, b] => side(pts[*a]) * side(pts[*b]) < 0,
                [a] => {
                    // boundary facet: every vertex of the hull lies weakly on the simplex's side
                    let s = side(pts[*a]);
                    pts.iter().all(|p| side(p) * s >= 0)
                }
                _ => false,
            }
        })
    }

    /// Restriction to a face of the underlying cell.
    pub fn restrict_to_face(&self, face: &Face) -> Result<SimplicialComplex> {
        let (keep, dim) = self.face_vertices(face)?;
        let kept: Vec<usize> = (0..self.vertices.len()).filter(|i| keep.contains(&self.vertices[*i].label)).collect();
        let remap: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let simplices: Vec<Vec<usize>> = self
            .simplices
            .iter()
            .map(|s| s.iter().filter_map(|i| remap.get(i).copied()).collect::<Vec<_>>())
            .filter(|s| s.len() == dim + 1)
            .collect();
        let vertices = kept.iter().map(|&i| self.vertices[i].clone()).collect();
        let shape = match (self.shape, face) {
            (CellShape::Product { .. }, Face::Product { rows, cols }) => {
                CellShape::Product { k: rows.len() - 1, m: cols.len() - 1 }
            }
            (CellShape::Cube { .. }, Face::Cube { fixed }) => {
                CellShape::Cube { n: fixed.iter().filter(|f| f.is_none()).count() }
            }
            _ => CellShape::Other,
        };
        SimplicialComplex::new(vertices, simplices, shape)
    }

    fn face_vertices(&self, face: &Face) -> Result<(BTreeSet<String>, usize)> {
        match (self.shape, face) {
            (CellShape::Product { k, m }, Face::Product { rows, cols }) => {
                let ok = |xs: &Vec<usize>, max: usize| {
                    !xs.is_empty() && xs.iter().all(|&x| x <= max) && xs.windows(2).all(|w| w[0] < w[1])
                };
                if !ok(rows, k) || !ok(cols, m) {
                    return Err(Error::NotAFace(format!("{rows:?} x {cols:?} in Δ^{k} x Δ^{m}")));
                }
                let labels = rows.iter().cartesian_product(cols).map(|(i, j)| grid_label(*i, *j)).collect();
                Ok((labels, rows.len() + cols.len() - 2))
            }
            (CellShape::Cube { n }, Face::Cube { fixed }) => {
                if fixed.len() != n {
                    return Err(Error::NotAFace(format!("{} coordinates for a {n}-cube", fixed.len())));
                }
                let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
                let labels = (0..1usize << free.len())
                    .map(|mask| {
                        let bits: Vec<bool> = (0..n)
                            .map(|i| match fixed[i] {
                                Some(b) => b,
                                None => mask >> free.iter().position(|&f| f == i).unwrap() & 1 == 1,
                            })
                            .collect();
                        bit_label(&bits)
                    })
                    .collect();
                Ok((labels, free.len()))
            }
            (_, Face::Vertices(labels)) => {
                let all = self.vertex_labels();
                if labels.is_empty() || !labels.iter().all(|l| all.contains(l)) {
                    return Err(Error::NotAFace(format!("{labels:?}")));
                }
                let set: BTreeSet<String> = labels.iter().cloned().collect();
                let dim = self
                    .simplices
                    .iter()
                    .map(|s| s.iter().filter(|&&i| set.contains(&self.vertices[i].label)).count())
                    .max()
                    .unwrap_or(1)
                    .saturating_sub(1);
                Ok((set, dim))
            }
            (shape, face) => Err(Error::NotAFace(format!("{face:?} does not apply to {shape:?}"))),
        }
    }
}

/// A face of a standard cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Face {
    /// F_1 × F_2 with F_1 ⊆ {0..k}, F_2 ⊆ {0..m}, both strictly increasing.
    Product { rows: Vec<usize>, cols: Vec<usize> },
    /// Cube face: `Some(b)` fixes a coordinate, `None` leaves it free.
    Cube { fixed: Vec<Option<bool>> },
    /// Any vertex subset, given by labels.
    Vertices(Vec<String>),
}

fn sign_of_rational(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// det[p_1 - p_0, …, p_d - p_0] for d+1 points in ℝ^d.
fn edge_determinant(points: &[&Vec<Rational>]) -> Rational {
    let base = points[0];
    let mut m: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();
    let d = m.len();
    let mut det = Rational::one();
    for c in 0..d {
        let Some(piv) = (c..d).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        let p = m[c][c].clone();
        det *= &p;
        for r in c + 1..d {
            let f = &m[r][c] / &p;
            if f.is_zero() {
                continue;
            }
            for j in c..d {
                let v = &m[c][j] * &f;
                m[r][j] -= v;
            }
        }
    }
    det
}

pub fn grid_label(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

pub fn bit_label(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Monotone lattice paths from (0,0) to (k,m), as vertex sequences of grid indices.
pub fn monotone_paths(k: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    (0..k + m)
        .combinations(k)
        .map(|right_steps| {
            let mut path = vec![(0, 0)];
            let (mut i, mut j) = (0, 0);
            for step in 0..k + m {
                if right_steps.contains(&step) {
                    i += 1;
                } else {
                    j += 1;
                }
                path.push((i, j));
            }
            path
        })
        .collect()
}

fn unit(dim: usize, axis: Option<usize>) -> Vec<Rational> {
    (0..dim)
        .map(|i| if Some(i) == axis { Rational::one() } else { Rational::zero() })
        .collect()
}

/// Staircase triangulation of Δ^k × Δ^m: one (k+m)-simplex per monotone path.
pub fn staircase_triangulation(k: usize, m: usize) -> SimplicialComplex {
    let mut vertices = Vec::new();
    for i in 0..=k {
        for j in 0..=m {
            // Δ^k realized as {0, e_1, …, e_k}, likewise Δ^m, in ℝ^{k+m}
            let mut coords = unit(k, i.checked_sub(1));
            coords.extend(unit(m, j.checked_sub(1)));
            vertices.push(Vertex { label: grid_label(i, j), coords: Some(coords), nu: None });
        }
    }
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    let simplices = monotone_paths(k, m)
        .into_iter()
        .map(|p| p.into_iter().map(|(i, j)| idx(i, j)).collect())
        .collect();
    SimplicialComplex::new(vertices, simplices, CellShape::Product { k, m }).expect("valid staircase")
}

/// Staircase triangulation of the product face `rows × cols` with inherited
/// orders, as label sets in the parent grid.
pub fn staircase_label_sets(rows: &[usize], cols: &[usize]) -> BTreeSet<BTreeSet<String>> {
    monotone_paths(rows.len() - 1, cols.len() - 1)
        .into_iter()
        .map(|p| p.into_iter().map(|(a, b)| grid_label(rows[a], cols[b])).collect())
        .collect()
}

/// Chains from `start` to its antipode in the cube on the `free` coordinates,
/// one per order of flipping them.
fn cube_paths(start: &[bool], free: &[usize]) -> Vec<Vec<Vec<bool>>> {
    free.iter()
        .copied()
        .permutations(free.len())
        .map(|order| {
            let mut v = start.to_vec();
            let mut path = vec![v.clone()];
            for axis in order {
                v[axis] = !v[axis];
                path.push(v.clone());
            }
            path
        })
        .collect()
}

/// Symmetric triangulation of the n-cube with marked antipodal pair
/// (`low`, `high`): the reflection sending `low` to the origin carries it to
/// the simplices 0 ≤ x_{j_1} ≤ … ≤ x_{j_n} ≤ 1.
pub fn kuhn_triangulation(n: usize, low: &[bool], high: &[bool]) -> Result<SimplicialComplex> {
    if low.len() != n || high.len() != n || low.iter().zip(high).any(|(a, b)| a == b) {
        return Err(Error::NotAntipodal);
    }
    let vertices: Vec<Vertex> = (0..1usize << n)
        .map(|mask| {
            let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let coords = bits.iter().map(|&b| Rational::from_integer(BigInt::from(b as u8))).collect();
            Vertex { label: bit_label(&bits), coords: Some(coords), nu: None }
        })
        .collect();
    let simplices: Vec<Vec<String>> = cube_paths(low, &(0..n).collect::<Vec<_>>())
        .into_iter()
        .map(|p| p.iter().map(|b| bit_label(b)).collect())
        .collect();
    SimplicialComplex::from_labeled(vertices, &simplices, CellShape::Cube { n })
}

/// Kuhn triangulation with the standard marks (0…0, 1…1).
pub fn kuhn_standard(n: usize) -> SimplicialComplex {
    kuhn_triangulation(n, &vec![false; n], &vec![true; n]).expect("standard marks are antipodal")
}

/// Kuhn triangulation of a cube face with the induced marks: the face
/// vertices closest to `low` and to its antipode.
pub fn kuhn_face_label_sets(low: &[bool], fixed: &[Option<bool>]) -> BTreeSet<BTreeSet<String>> {
    let start: Vec<bool> = low.iter().zip(fixed).map(|(&l, f)| f.unwrap_or(l)).collect();
    let free: Vec<usize> = (0..low.len()).filter(|&i| fixed[i].is_none()).collect();
    cube_paths(&start, &free)
        .into_iter()
        .map(|p| p.iter().map(|b| bit_label(b)).collect())
        .collect()
}

/// ν(d) = i + M·deg(Q, d) for each cell d, given as (C-cell index, covering degree).
pub fn nu_numbering(cells: &[(usize, i64)], m: i64, c_cells: usize) -> Result<Vec<i64>> {
    if m <= c_cells as i64 {
        return Err(Error::MTooSmall { m, cells: c_cells });
    }
    cells
        .iter()
        .map(|&(i, deg)| {
            if i >= c_cells {
                Err(Error::InvalidInput(format!("cell index {i} out of range for {c_cells} cells")))
            } else {
                Ok(i as i64 + m * deg)
            }
        })
        .collect()
}

/// A cell Cube^k × Δ^s of the dual complex with its ν values.
///
/// Vertex (bits, j) is stored at position `j * 2^k + bits`, where bit a of
/// `bits` is cube coordinate a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCell {
    pub cube_dim: usize,
    pub simplex_dim: usize,
    pub labels: Vec<String>,
    pub nu: Vec<i64>,
}

impl ProductCell {
    pub fn new(cube_dim: usize, simplex_dim: usize, labels: Vec<String>, nu: Vec<i64>) -> Result<Self> {
        let count = (1usize << cube_dim) * (simplex_dim + 1);
        if labels.len() != count || nu.len() != count {
            return Err(Error::InvalidInput(format!(
                "Cube^{cube_dim} x Δ^{simplex_dim} needs {count} labels and ν values"
            )));
        }
        if labels.iter().collect::<BTreeSet<_>>().len() != count {
            return Err(Error::InvalidInput("product cell repeats a vertex label".into()));
        }
        Ok(Self { cube_dim, simplex_dim, labels, nu })
    }

    pub fn position(&self, bits: usize, j: usize) -> usize {
        j * (1 << self.cube_dim) + bits
    }

    fn realization(&self, bits: usize, j: usize) -> Vec<Rational> {
        let mut c: Vec<Rational> = (0..self.cube_dim)
            .map(|a| Rational::from_integer(BigInt::from((bits >> a & 1) as u8)))
            .collect();
        c.extend(unit(self.simplex_dim, j.checked_sub(1)));
        c
    }

    fn describe(&self) -> String {
        format!("Cube^{} x Δ^{} [{}]", self.cube_dim, self.simplex_dim, self.labels.join(" "))
    }

    /// Unique ν-extremal antipodal pair on the cube factor (as bit masks).
    fn marked_pair(&self) -> Result<(usize, usize)> {
        let k = self.cube_dim;
        let full = (1usize << k) - 1;
        let mut pair = None;
        for j in 0..=self.simplex_dim {
            let vals: Vec<i64> = (0..=full).map(|b| self.nu[self.position(b, j)]).collect();
            let min = *vals.iter().min().unwrap();
            let max = *vals.iter().max().unwrap();
            let lows: Vec<usize> = (0..=full).filter(|&b| vals[b] == min).collect();
            let highs: Vec<usize> = (0..=full).filter(|&b| vals[b] == max).collect();
            if lows.len() != 1 || highs.len() != 1 {
                return Err(Error::AmbiguousNu(format!(
                    "extremes of ν not unique on cubical face {j} of {}",
                    self.describe()
                )));
            }
            if lows[0] ^ highs[0] != full {
                return Err(Error::AmbiguousNu(format!(
                    "ν extremes on cubical face {j} of {} are not antipodal",
                    self.describe()
                )));
            }
            match pair {
                None => pair = Some((lows[0], highs[0])),
                Some(p) if p != (lows[0], highs[0]) => {
                    return Err(Error::AmbiguousNu(format!(
                        "cubical faces of {} mark different pairs",
                        self.describe()
                    )))
                }
                _ => {}
            }
        }
        Ok(pair.expect("at least one cubical face"))
    }
}

/// Kuhn-triangulate the cube factor at its ν-marked pair, then staircase
/// triangulate each Δ^k × Δ^s with both factors ordered by ν.
pub fn triangulate_product_cell(cell: &ProductCell) -> Result<SimplicialComplex> {
    let k = cell.cube_dim;
    let s = cell.simplex_dim;
    let (low, _) = if k > 0 { cell.marked_pair()? } else { (0, 0) };

    let mut order: Vec<usize> = (0..=s).collect();
    if k > 0 {
        order.sort_by_key(|&j| cell.nu[cell.position(low, j)]);
        let nus: Vec<i64> = order.iter().map(|&j| cell.nu[cell.position(low, j)]).collect();
        if nus.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::AmbiguousNu(format!(
                "ν does not order the simplex factor of {}",
                cell.describe()
            )));
        }
    }

    let low_bits: Vec<bool> = (0..k).map(|a| low >> a & 1 == 1).collect();
    let chains = cube_paths(&low_bits, &(0..k).collect::<Vec<_>>());
    let to_mask = |bits: &Vec<bool>| bits.iter().enumerate().fold(0usize, |m, (a, &b)| m | (b as usize) << a);

    let mut simplices = Vec::new();
    for chain in &chains {
        let masks: Vec<usize> = chain.iter().map(to_mask).collect();
        for path in monotone_paths(k, s) {
            let simplex: Vec<usize> = path.iter().map(|&(a, b)| cell.position(masks[a], order[b])).collect();
            if k > 0 && simplex.iter().map(|&p| cell.nu[p]).collect::<BTreeSet<_>>().len() != simplex.len() {
                return Err(Error::AmbiguousNu(format!(
                    "repeated ν inside a simplex of {}",
                    cell.describe()
                )));
            }
            simplices.push(simplex);
        }
    }

    let vertices = (0..=s)
        .flat_map(|j| (0..1usize << k).map(move |b| (b, j)))
        .map(|(b, j)| {
            let p = cell.position(b, j);
            Vertex { label: cell.labels[p].clone(), coords: Some(cell.realization(b, j)), nu: Some(cell.nu[p]) }
        })
        .collect();
    SimplicialComplex::new(vertices, simplices, CellShape::Other)
}

/// Union of the per-cell triangulations, checked to agree on every shared face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    pub complex: SimplicialComplex,
    /// Number of cell pairs whose shared faces were compared.
    pub shared_faces_checked: usize,
    /// Vertex set of the output equals the union of the input cells' vertices.
    pub no_new_vertices: bool,
}

pub fn assemble_triangulation(cells: &[ProductCell]) -> Result<Assembly> {
    let pieces: Vec<SimplicialComplex> = cells.iter().map(triangulate_product_cell).collect::<Result<_>>()?;
    let label_sets: Vec<BTreeSet<BTreeSet<String>>> = pieces.iter().map(|p| p.simplex_label_sets()).collect();
    let vertex_sets: Vec<BTreeSet<String>> = cells.iter().map(|c| c.labels.iter().cloned().collect()).collect();

    let induced = |simplices: &BTreeSet<BTreeSet<String>>, shared: &BTreeSet<String>| {
        let cuts: BTreeSet<BTreeSet<String>> = simplices
            .iter()
            .map(|s| s.intersection(shared).cloned().collect::<BTreeSet<String>>())
            .filter(|s| !s.is_empty())
            .collect();
        let top = cuts.iter().map(|s| s.len()).max().unwrap_or(0);
        cuts.into_iter().filter(|s| s.len() == top).collect::<BTreeSet<_>>()
    };

    let mut checked = 0;
    for a in 0..cells.len() {
        for b in a + 1..cells.len() {
            let shared: BTreeSet<String> = vertex_sets[a].intersection(&vertex_sets[b]).cloned().collect();
            if shared.len() < 2 {
                continue;
            }
            checked += 1;
            if induced(&label_sets[a], &shared) != induced(&label_sets[b], &shared) {
                return Err(Error::FaceMismatch(format!(
                    "cells {a} and {b} on {{{}}}",
                    shared.iter().join(", ")
                )));
            }
        }
    }

    let mut nus: BTreeMap<String, i64> = BTreeMap::new();
    for c in cells {
        for (l, &v) in c.labels.iter().zip(&c.nu) {
            nus.entry(l.clone()).or_insert(v);
        }
    }
    let vertices: Vec<Vertex> = nus
        .iter()
        .map(|(l, &v)| Vertex { label: l.clone(), coords: None, nu: Some(v) })
        .collect();
    let simplices: Vec<Vec<String>> = label_sets
        .iter()
        .flat_map(|sets| sets.iter().map(|s| s.iter().cloned().collect::<Vec<_>>()))
        .collect();
    let complex = SimplicialComplex::from_labeled(vertices, &simplices, CellShape::Other)?;
    let input: BTreeSet<String> = vertex_sets.into_iter().flatten().collect();
    let no_new_vertices = complex.vertex_labels() == input;
    Ok(Assembly { complex, shared_faces_checked: checked, no_new_vertices })
}

/// Two unit squares sharing an edge, with ν = x + 3y on the 3×2 vertex grid.
pub fn two_square_fixture() -> Vec<ProductCell> {
    let label = |x: usize, y: usize| format!("p{x}{y}");
    let nu = |x: usize, y: usize| (x + 3 * y) as i64;
    (0..2)
        .map(|x0| {
            let mut labels = Vec::new();
            let mut nus = Vec::new();
            for bits in 0..4usize {
                let (x, y) = (x0 + (bits & 1), bits >> 1);
                labels.push(label(x, y));
                nus.push(nu(x, y));
            }
            ProductCell::new(2, 0, labels, nus).expect("fixture cell")
        })
        .collect()
}

/// Two unit cubes sharing the face x = 1 whose ν values disagree on that
/// face, so their symmetric triangulations cut it along crossing diagonals.
pub fn incompatible_cube_fixture() -> Vec<ProductCell> {
    let label = |x: usize, y: usize, z: usize| format!("q{x}{y}{z}");
    let cube = |x0: usize, nu: &dyn Fn(usize, usize, usize) -> i64| {
        let mut labels = Vec::new();
        let mut nus = Vec::new();
        for bits in 0..8usize {
            let (x, y, z) = (x0 + (bits & 1), bits >> 1 & 1, bits >> 2 & 1);
            labels.push(label(x, y, z));
            nus.push(nu(x, y, z));
        }
        ProductCell::new(3, 0, labels, nus).expect("fixture cell")
    };
    let left = cube(0, &|x, y, z| (x + y + z) as i64);
    // marks (1,1,0) and (2,0,1): the induced diagonal on x = 1 is (1,1,0)-(1,0,1)
    let right = cube(1, &|x, y, z| {
        let flipped = (x - 1) + (1 - y) + z;
        flipped as i64 + 10
    });
    vec![left, right]
}
