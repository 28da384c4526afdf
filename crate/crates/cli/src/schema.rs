//! JSON payloads crossing the process boundary. Every rational travels as a
//! "p/q" string; every payload carries a versioned `schema` tag.

use anyhow::{bail, ensure, Context, Result};
use flatfoliate::exactgeom::{format_rational, RayVector, Rational};
use flatfoliate::localformula::CrossingConfiguration;
use flatfoliate::toruslab::{HolonomyPair, Mat2, TorusCrossing};
use flatfoliate::triangulations::{CellShape, ComplexAudit, ProductCell, SimplicialComplex, Vertex};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

pub const CONFIGURATION: &str = "flatfoliate.configuration/1";
pub const CROSSINGS: &str = "flatfoliate.crossings/1";
pub const EXPERIMENT: &str = "flatfoliate.experiment/1";
pub const CELLS: &str = "flatfoliate.cells/1";
pub const COMPLEX: &str = "flatfoliate.complex/1";
pub const VERIFY: &str = "flatfoliate.verify/1";

/// Parses "p/q" (q > 0) or a bare integer "p".
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().with_context(|| format!("bad numerator in {s:?}"))?;
    let q: BigInt = q.parse().with_context(|| format!("bad denominator in {s:?}"))?;
    ensure!(q.is_positive(), "denominator of {s:?} must be positive");
    Ok(Rational::new(p, q))
}

pub fn parse_vector(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

pub fn parse_ray(v: &[String]) -> Result<RayVector> {
    RayVector::new(parse_vector(v)?).with_context(|| format!("ray {v:?}"))
}

pub fn ray_strings(r: &RayVector) -> Vec<String> {
    r.coords().iter().map(|c| format!("{c}/1")).collect()
}

fn check_schema(found: &str, expected: &str) -> Result<()> {
    ensure!(found == expected, "schema {found:?} where {expected:?} was expected");
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationFile {
    pub schema: String,
    pub n: usize,
    pub bordered: Vec<Vec<String>>,
    pub regular: Vec<Vec<String>>,
}

impl ConfigurationFile {
    pub fn validate(&self) -> Result<()> {
        check_schema(&self.schema, CONFIGURATION)
    }

    /// Bordered points followed by regular points.
    pub fn tuple(&self) -> Result<Vec<RayVector>> {
        self.validate()?;
        let pts: Vec<RayVector> = self.bordered.iter().chain(&self.regular).map(|v| parse_ray(v)).collect::<Result<_>>()?;
        ensure!(pts.len() == self.n + 1, "{} points given, an index needs n+1 = {}", pts.len(), self.n + 1);
        ensure!(pts.iter().all(|p| p.dim() == self.n), "every point must have {} coordinates", self.n);
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingEntry {
    pub id: usize,
    pub bordered: Vec<Vec<String>>,
    pub regular: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingListFile {
    pub schema: String,
    pub n: usize,
    pub crossings: Vec<CrossingEntry>,
}

impl CrossingListFile {
    pub fn from_torus(crossings: &[TorusCrossing]) -> Self {
        let entry = |c: &TorusCrossing| CrossingEntry {
            id: c.id,
            bordered: c.configuration.bordered().iter().map(ray_strings).collect(),
            regular: c.configuration.regular().iter().map(ray_strings).collect(),
        };
        Self { schema: CROSSINGS.into(), n: 2, crossings: crossings.iter().map(entry).collect() }
    }

    pub fn configurations(&self) -> Result<Vec<(usize, CrossingConfiguration)>> {
        check_schema(&self.schema, CROSSINGS)?;
        self.crossings
            .iter()
            .map(|c| {
                let rays = |vs: &[Vec<String>]| vs.iter().map(|v| parse_ray(v)).collect::<Result<Vec<_>>>();
                let cc = CrossingConfiguration::new(self.n, rays(&c.bordered)?, rays(&c.regular)?)
                    .with_context(|| format!("crossing {}", c.id))?;
                Ok((c.id, cc))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomyEntry {
    pub a: [String; 4],
    pub b: [String; 4],
}

impl HolonomyEntry {
    pub fn pair(&self) -> Result<HolonomyPair> {
        let m = |e: &[String; 4]| -> Result<Mat2> {
            let v = parse_vector(e)?;
            Ok(Mat2::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()))
        };
        HolonomyPair::new(m(&self.a)?, m(&self.b)?).context("holonomy")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default)]
    pub holonomy: Option<HolonomyEntry>,
    #[serde(default)]
    pub v0: Option<Vec<String>>,
    #[serde(default, rename = "L")]
    pub l: Option<Vec<i64>>,
    #[serde(default)]
    pub schedule: Option<usize>,
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_schema(&self.schema, EXPERIMENT)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellEntry {
    pub cube_dim: usize,
    pub simplex_dim: usize,
    pub labels: Vec<String>,
    pub nu: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellsFile {
    pub schema: String,
    pub cells: Vec<CellEntry>,
}

impl CellsFile {
    pub fn from_cells(cells: &[ProductCell]) -> Self {
        let cells = cells
            .iter()
            .map(|c| CellEntry {
                cube_dim: c.cube_dim,
                simplex_dim: c.simplex_dim,
                labels: c.labels.clone(),
                nu: c.nu.clone(),
            })
            .collect();
        Self { schema: CELLS.into(), cells }
    }

    pub fn cells(&self) -> Result<Vec<ProductCell>> {
        check_schema(&self.schema, CELLS)?;
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                ProductCell::new(c.cube_dim, c.simplex_dim, c.labels.clone(), c.nu.clone())
                    .with_context(|| format!("cell {i}"))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeEntry {
    Product { k: usize, m: usize },
    Cube { n: usize },
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditEntry {
    pub vertices: usize,
    pub simplices: usize,
    pub dimension: Option<usize>,
    pub euler_characteristic: i64,
    pub total_volume: Option<String>,
    pub facets_ok: Option<bool>,
    /// Per-cell triangulations agree on shared faces (assembly only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces_compatible: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_new_vertices: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_surface: Option<bool>,
}

impl From<&ComplexAudit> for AuditEntry {
    fn from(a: &ComplexAudit) -> Self {
        AuditEntry {
            vertices: a.vertices,
            simplices: a.simplices,
            dimension: a.dimension,
            euler_characteristic: a.euler_characteristic,
            total_volume: a.total_volume.as_ref().map(format_rational),
            facets_ok: a.facets_ok,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub schema: String,
    pub shape: ShapeEntry,
    pub vertices: Vec<VertexEntry>,
    /// Maximal simplices as vertex labels.
    pub simplices: Vec<Vec<String>>,
    pub audit: AuditEntry,
}

impl ComplexFile {
    pub fn from_complex(c: &SimplicialComplex) -> Self {
        let shape = match c.shape() {
            CellShape::Product { k, m } => ShapeEntry::Product { k, m },
            CellShape::Cube { n } => ShapeEntry::Cube { n },
            CellShape::Other => ShapeEntry::Other,
        };
        let vertices = c
            .vertices()
            .iter()
            .map(|v| VertexEntry {
                label: v.label.clone(),
                coords: v.coords.as_ref().map(|cs| cs.iter().map(format_rational).collect()),
                nu: v.nu,
            })
            .collect();
        let simplices = c
            .simplices()
            .iter()
            .map(|s| s.iter().map(|&i| c.vertices()[i].label.clone()).collect())
            .collect();
        Self { schema: COMPLEX.into(), shape, vertices, simplices, audit: AuditEntry::from(&c.audit()) }
    }

    pub fn complex(&self) -> Result<SimplicialComplex> {
        check_schema(&self.schema, COMPLEX)?;
        let shape = match self.shape {
            ShapeEntry::Product { k, m } => CellShape::Product { k, m },
            ShapeEntry::Cube { n } => CellShape::Cube { n },
            ShapeEntry::Other => CellShape::Other,
        };
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                Ok(Vertex {
                    label: v.label.clone(),
                    coords: v.coords.as_ref().map(|c| parse_vector(c)).transpose()?,
                    nu: v.nu,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SimplicialComplex::from_labeled(vertices, &self.simplices, shape)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub scope: String,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub scope: String,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
}

/// Parses a comma-separated list of box sizes; the empty string is the empty list.
pub fn parse_l_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().with_context(|| format!("bad box size {t:?}")))
        .collect()
}

pub fn parse_marks(s: &str, n: usize) -> Result<Vec<bool>> {
    ensure!(s.len() == n, "marks {s:?} must have {n} bits");
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => bail!("marks {s:?} must be a 0/1 string"),
        })
        .collect()
}
