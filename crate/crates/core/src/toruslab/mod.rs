//! Desk-scale instance over the 2-torus: commuting holonomy, sheared
//! parallelogram quasisections, crossing extraction, exact Euler
//! evaluation and the bound-decay experiment.

mod crossings;
mod folner;
mod holonomy;
pub mod overlay;
mod region;

pub use crossings::{
    boundary_crossings, boundary_crossings_with, n2_geometric_vertex_expectations, v0_schedule, BranchOrder,
    TorusCrossing,
};
pub use folner::{
    cayley_ball, check_neighborhood, folner_box, folner_ratio, king_generators, square_in_interior,
    standard_generators, LatticeSet,
};
pub use holonomy::{holonomy_at, sheet_ray, HolonomyPair, Mat2};
pub use region::{
    build_region_with_budget, BoundaryEdge, CornerSite, CrossingSite, Lattice, Point, QuasisectionRegion, Shear,
};

use crate::error::{Error, Result};
use crate::exactgeom::{RayVector, Rational};
use crate::exec::Execution;
use crate::localformula::{euler_number_with, sullivan_bound, CrossingConfiguration, EulerReport};

/// Retry budget shared by the shear, starting-ray and probe schedules.
pub const DEFAULT_RETRY_BUDGET: usize = 32;

/// Knobs of a torus run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabOptions {
    pub schedule_index: usize,
    pub retry_budget: usize,
    pub branch_order: BranchOrder,
    pub execution: Execution,
}

impl Default for LabOptions {
    fn default() -> Self {
        Self {
            schedule_index: 0,
            retry_budget: DEFAULT_RETRY_BUDGET,
            branch_order: BranchOrder::Oriented,
            execution: Execution::default(),
        }
    }
}

pub fn build_region(l: i64, schedule_index: usize) -> Result<QuasisectionRegion> {
    build_region_with_budget(l, schedule_index, DEFAULT_RETRY_BUDGET)
}

/// Everything computed for one box size.
#[derive(Debug, Clone)]
pub struct TorusRun {
    pub region: QuasisectionRegion,
    /// Starting ray after genericity retries.
    pub v0: RayVector,
    pub crossings: Vec<TorusCrossing>,
    pub report: EulerReport,
}

impl TorusRun {
    pub fn configurations(&self) -> Vec<CrossingConfiguration> {
        self.crossings.iter().map(|c| c.configuration.clone()).collect()
    }

    /// 2·Σ vertex weights is an integer.
    pub fn is_integral(&self) -> bool {
        self.report.formula_value.is_integer()
    }
}

/// Fewest and most sheets over any point of the torus: the regular count
/// only changes across π(∂Q), and every complementary region has a crossing
/// or a corner projection on its boundary.
fn sheet_extremes(region: &QuasisectionRegion) -> (usize, usize) {
    let crossing_k = region.crossing_sites().iter().map(|c| c.regular.len());
    let corner_k = region.corner_sites().iter().map(|c| c.regular.len());
    let k_min = crossing_k.clone().chain(corner_k.clone()).min().unwrap_or(0);
    let k_max = crossing_k.map(|k| k + 2).chain(corner_k.map(|k| k + 1)).max().unwrap_or(0);
    (k_min, k_max)
}

pub fn run_torus(pair: &HolonomyPair, v0: &RayVector, l: i64, opts: &LabOptions) -> Result<TorusRun> {
    let region = build_region_with_budget(l, opts.schedule_index, opts.retry_budget)?;
    let (v0, crossings) =
        boundary_crossings_with(&region, pair, v0, opts.retry_budget, opts.branch_order, opts.execution)?;
    let configs: Vec<CrossingConfiguration> = crossings.iter().map(|c| c.configuration.clone()).collect();
    let formula_value = euler_number_with(&configs, 2, opts.execution)?;
    let (k_min, k_max) = sheet_extremes(&region);
    let bound = sullivan_bound(crossings.len() as i64, k_min as i64, k_max as i64, 2)?;
    let report = EulerReport {
        formula_value,
        bound,
        crossings: crossings.len(),
        k_min,
        k_max,
        n_inner: Some(region.n_inner()),
        n_boundary: Some(region.n_boundary()),
    };
    Ok(TorusRun { region, v0, crossings, report })
}

pub fn euler_estimate(pair: &HolonomyPair, v0: &RayVector, l: i64) -> Result<EulerReport> {
    run_torus(pair, v0, l, &LabOptions::default()).map(|r| r.report)
}

/// One row of the decay experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayRecord {
    pub l: i64,
    pub n_inner: usize,
    pub n_boundary: usize,
    pub crossings: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub bound: Rational,
    pub formula_value: Rational,
}

impl From<(i64, &EulerReport)> for DecayRecord {
    fn from((l, r): (i64, &EulerReport)) -> Self {
        DecayRecord {
            l,
            n_inner: r.n_inner.unwrap_or(0),
            n_boundary: r.n_boundary.unwrap_or(0),
            crossings: r.crossings,
            k_min: r.k_min,
            k_max: r.k_max,
            bound: r.bound.clone(),
            formula_value: r.formula_value.clone(),
        }
    }
}

pub fn decay_experiment_with(
    pair: &HolonomyPair,
    v0: &RayVector,
    ls: &[i64],
    opts: &LabOptions,
) -> Result<Vec<DecayRecord>> {
    if ls.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!("box sizes {ls:?} are not strictly ascending")));
    }
    opts.execution
        .try_map(ls, |&l| run_torus(pair, v0, l, opts).map(|run| DecayRecord::from((l, &run.report))))
}

pub fn decay_experiment(pair: &HolonomyPair, v0: &RayVector, ls: &[i64]) -> Result<Vec<DecayRecord>> {
    decay_experiment_with(pair, v0, ls, &LabOptions::default())
}

/// Default starting ray (1, 0).
pub fn default_v0() -> RayVector {
    RayVector::from_ints(&[1, 0]).expect("nonzero")
}
