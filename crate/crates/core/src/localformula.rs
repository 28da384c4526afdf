//! The local formula: essential tuples at n-fold crossings, vertex weights,
//! the Euler number as a sum of weights, the Sullivan-type bound, and the
//! averaging oracles that the weights are derived from.
//!
//! The averaging oracles enumerate the finite probability spaces exactly;
//! nothing here samples.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::{configuration_index, is_antipodally_generic, Rational, RayVector};
use crate::exec::Execution;

/// Sheets over a point where the boundary of the quasisection crosses itself:
/// `m` bordered sheets in orientation order and `k >= 1` regular sheets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingConfiguration {
    n: usize,
    bordered: Vec<RayVector>,
    regular: Vec<RayVector>,
}

impl CrossingConfiguration {
    pub fn new(n: usize, bordered: Vec<RayVector>, regular: Vec<RayVector>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("fiber dimension n = {n} is below 2")));
        }
        if regular.is_empty() {
            return Err(Error::InvalidInput("a crossing needs at least one regular sheet".into()));
        }
        if bordered.len() > n {
            return Err(Error::TypeMismatch(format!(
                "{} bordered sheets exceed n = {n}",
                bordered.len()
            )));
        }
        for v in bordered.iter().chain(&regular) {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
            }
        }
        Ok(Self { n, bordered, regular })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn bordered(&self) -> &[RayVector] {
        &self.bordered
    }
    pub fn regular(&self) -> &[RayVector] {
        &self.regular
    }
    /// Number of regular sheets.
    pub fn k(&self) -> usize {
        self.regular.len()
    }
    /// Number of bordered sheets.
    pub fn m(&self) -> usize {
        self.bordered.len()
    }
    pub fn is_type_one(&self) -> bool {
        self.m() == self.n
    }

    pub fn points(&self) -> Vec<RayVector> {
        self.bordered.iter().chain(&self.regular).cloned().collect()
    }

    pub fn is_generic(&self) -> bool {
        is_antipodally_generic(&self.points())
    }

    pub fn ray(&self, id: SheetId) -> &RayVector {
        match id {
            SheetId::Bordered(i) => &self.bordered[i],
            SheetId::Regular(j) => &self.regular[j],
        }
    }

    fn require_type_one(&self) -> Result<()> {
        if self.is_type_one() {
            Ok(())
        } else {
            Err(Error::TypeMismatch(format!(
                "type II crossing: {} bordered sheets, n = {}",
                self.m(),
                self.n
            )))
        }
    }

}

/// Identifies a sheet over a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SheetId {
    Bordered(usize),
    Regular(usize),
}

impl SheetId {
    pub fn is_regular(self) -> bool {
        matches!(self, SheetId::Regular(_))
    }
}

/// Sign of a permutation of `0..len`.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let inversions = perm
        .iter()
        .tuple_combinations()
        .filter(|(a, b)| a > b)
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    perm.len() == n && perm.iter().sorted().copied().eq(0..n)
}

/// The n+1 cells around one vertex created from a crossing, as increasing
/// sheet-availability sets S_0 ⊆ … ⊆ S_n.
///
/// Step i adds the bordered branch `sigma[i-1]`. For a type II crossing
/// (m < n) the steps naming a missing branch add nothing: those walls are
/// cell walls, not sheet borders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberChain {
    sigma: Vec<usize>,
    sheets: Vec<Vec<SheetId>>,
}

impl ChamberChain {
    pub fn new(cc: &CrossingConfiguration, sigma: &[usize]) -> Result<Self> {
        let n = cc.n();
        if !is_permutation(sigma, n) {
            return Err(Error::InvalidInput(format!("{sigma:?} is not a permutation of 0..{n}")));
        }
        let mut current: Vec<SheetId> = (0..cc.k()).map(SheetId::Regular).collect();
        let mut sheets = vec![current.clone()];
        for &b in sigma {
            if b < cc.m() {
                current.push(SheetId::Bordered(b));
            }
            sheets.push(current.clone());
        }
        Ok(Self { sigma: sigma.to_vec(), sheets })
    }

    /// All n! chains of a crossing, in lexicographic order of σ.
    pub fn all(cc: &CrossingConfiguration) -> Vec<ChamberChain> {
        (0..cc.n())
            .permutations(cc.n())
            .map(|sigma| Self::new(cc, &sigma).expect("generated permutation"))
            .collect()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }
    pub fn sheets(&self) -> &[Vec<SheetId>] {
        &self.sheets
    }
    pub fn sign(&self) -> i8 {
        permutation_sign(&self.sigma)
    }

    /// Number of ordered tuples (s_0, …, s_n) with s_i ∈ S_i.
    pub fn tuple_count(&self) -> BigInt {
        self.sheets.iter().map(|s| BigInt::from(s.len())).product()
    }

    fn tuples(&self) -> impl Iterator<Item = Vec<SheetId>> + '_ {
        self.sheets.iter().map(|s| s.iter().copied()).multi_cartesian_product()
    }
}

fn has_repeated_sheet(t: &[SheetId]) -> bool {
    t.iter().tuple_combinations().any(|(a, b)| a == b)
}

fn tuple_index(cc: &CrossingConfiguration, t: &[SheetId]) -> Result<i8> {
    if has_repeated_sheet(t) {
        return Ok(0);
    }
    let rays: Vec<RayVector> = t.iter().map(|&id| cc.ray(id).clone()).collect();
    configuration_index(&rays)
}

/// One spanning tuple (r_j, a_1, …, a_n) and its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EssentialTuple {
    pub j: usize,
    pub sign: i8,
}

pub fn essential_tuples(cc: &CrossingConfiguration) -> Result<Vec<EssentialTuple>> {
    cc.require_type_one()?;
    let mut out = Vec::new();
    for (j, r) in cc.regular().iter().enumerate() {
        let mut tuple = Vec::with_capacity(cc.n() + 1);
        tuple.push(r.clone());
        tuple.extend(cc.bordered().iter().cloned());
        let sign = configuration_index(&tuple)?;
        if sign != 0 {
            out.push(EssentialTuple { j, sign });
        }
    }
    Ok(out)
}

/// k(k+1)⋯(k+n).
pub fn rising_factorial(k: usize, n: usize) -> BigInt {
    (0..=n).map(|i| BigInt::from(k + i)).product()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// (NC₊ − NC₋) / (k(k+1)⋯(k+n)).
pub fn vertex_weight(cc: &CrossingConfiguration) -> Result<Rational> {
    let net: i64 = essential_tuples(cc)?.iter().map(|e| e.sign as i64).sum();
    Ok(Rational::new(BigInt::from(net), rising_factorial(cc.k(), cc.n())))
}

/// Expected index at the vertex carried by `chain`: uniform sheet choices
/// over the cells, cells taken in chain order, corrected by sign(σ).
pub fn direct_vertex_expectation(chain: &ChamberChain, cc: &CrossingConfiguration) -> Result<Rational> {
    let mut total = 0i64;
    for t in chain.tuples() {
        total += tuple_index(cc, &t)? as i64;
    }
    Ok(Rational::new(BigInt::from(total * chain.sign() as i64), chain.tuple_count()))
}

/// Classification of all ordered tuples at one chain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CancellationAudit {
    /// Tuples repeating a sheet; each has index 0.
    pub repetition: usize,
    /// Pairs of repetition-free tuples with two or more regular entries,
    /// matched by swapping the first two regular entries.
    pub matched_pairs: usize,
    /// Repetition-free tuples with exactly one regular entry.
    pub single_regular: usize,
    /// Single-regular tuples that span the origin.
    pub essential: usize,
    pub repetition_sum: i64,
    pub matched_sum: i64,
    /// Σ index over single-regular tuples, in chain order (without sign(σ)).
    pub essential_sum: i64,
    /// The swap is an involution on the matched class and negates the index.
    pub matching_ok: bool,
}

impl CancellationAudit {
    /// Non-essential classes contribute nothing.
    pub fn cancels(&self) -> bool {
        self.repetition_sum == 0 && self.matched_sum == 0 && self.matching_ok
    }
}

fn swap_first_two_regular(t: &[SheetId]) -> Option<Vec<SheetId>> {
    let mut positions = t.iter().positions(|s| s.is_regular());
    let a = positions.next()?;
    let b = positions.next()?;
    let mut out = t.to_vec();
    out.swap(a, b);
    Some(out)
}

pub fn cancellation_audit(chain: &ChamberChain, cc: &CrossingConfiguration) -> Result<CancellationAudit> {
    let mut audit = CancellationAudit { matching_ok: true, ..Default::default() };
    let mut matched = 0usize;
    for t in chain.tuples() {
        let index = tuple_index(cc, &t)? as i64;
        if has_repeated_sheet(&t) {
            audit.repetition += 1;
            audit.repetition_sum += index;
            continue;
        }
        let regulars = t.iter().filter(|s| s.is_regular()).count();
        if regulars >= 2 {
            matched += 1;
            audit.matched_sum += index;
            let partner = swap_first_two_regular(&t).expect("two regular entries");
            let in_chain = partner.iter().zip(chain.sheets()).all(|(s, set)| set.contains(s));
            let back = swap_first_two_regular(&partner);
            let partner_index = tuple_index(cc, &partner)? as i64;
            if !in_chain || back.as_deref() != Some(&t[..]) || partner_index != -index || partner == t {
                audit.matching_ok = false;
            }
        } else {
            audit.single_regular += 1;
            audit.essential_sum += index;
            if index != 0 {
                audit.essential += 1;
            }
        }
    }
    if matched % 2 == 1 {
        audit.matching_ok = false;
    }
    audit.matched_pairs = matched / 2;
    Ok(audit)
}

/// n! · Σ_X vertex_weight(X).
pub fn euler_number(crossings: &[CrossingConfiguration], n: usize) -> Result<Rational> {
    euler_number_with(crossings, n, Execution::default())
}

pub fn euler_number_with(crossings: &[CrossingConfiguration], n: usize, exec: Execution) -> Result<Rational> {
    for cc in crossings {
        if cc.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: cc.n() });
        }
    }
    let weights = exec.try_map(crossings, vertex_weight)?;
    // Ascending crossing order; the exact sum does not depend on it.
    let sum = weights.into_iter().fold(Rational::zero(), |acc, w| acc + w);
    Ok(sum * Rational::from_integer(factorial(n)))
}

/// n!·𝒳·𝐊 / (𝐤(𝐤+1)⋯(𝐤+n)).
pub fn sullivan_bound(crossings: i64, k_min: i64, k_max: i64, n: usize) -> Result<Rational> {
    if crossings < 0 {
        return Err(Error::InvalidCounts(format!("negative crossing count {crossings}")));
    }
    if k_min < 1 {
        return Err(Error::InvalidCounts(format!("k_min = {k_min} must be at least 1")));
    }
    if k_max < k_min {
        return Err(Error::InvalidCounts(format!("k_max = {k_max} below k_min = {k_min}")));
    }
    let numer = factorial(n) * BigInt::from(crossings) * BigInt::from(k_max);
    Ok(Rational::new(numer, rising_factorial(k_min as usize, n)))
}

/// Formula value, bound, and the counts they were computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerReport {
    pub formula_value: Rational,
    pub bound: Rational,
    pub crossings: usize,
    pub k_min: usize,
    pub k_max: usize,
    /// Inner fundamental domains, when the report comes from a quasisection region.
    pub n_inner: Option<usize>,
    /// Boundary fundamental domains, when the report comes from a quasisection region.
    pub n_boundary: Option<usize>,
}

/// Report for a bare crossing list, with 𝐤 and 𝐊 read off the crossings themselves.
pub fn formula_report(crossings: &[CrossingConfiguration], n: usize) -> Result<EulerReport> {
    let formula_value = euler_number(crossings, n)?;
    let k_min = crossings.iter().map(|c| c.k()).min().unwrap_or(1);
    let k_max = crossings.iter().map(|c| c.k()).max().unwrap_or(1);
    let bound = sullivan_bound(crossings.len() as i64, k_min as i64, k_max as i64, n)?;
    Ok(EulerReport {
        formula_value,
        bound,
        crossings: crossings.len(),
        k_min,
        k_max,
        n_inner: None,
        n_boundary: None,
    })
}

/// Outcome tallies of the N-parallel averaging at one chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelAudit {
    pub expectation: Rational,
    pub outcomes: BigInt,
    /// Σ index over outcomes with two or more regular entries.
    pub multi_regular_sum: i64,
    /// Number of outcomes with exactly one regular entry.
    pub single_regular: BigInt,
}

/// Expected index at a chain when N parallel quasisections are colored
/// injectively onto the n+1 cells and each cell then picks a sheet of its
/// quasisection uniformly.
pub fn parallel_vertex_expectation(configs: &[CrossingConfiguration], sigma: &[usize]) -> Result<Rational> {
    Ok(parallel_audit(configs, sigma)?.expectation)
}

pub fn parallel_audit(configs: &[CrossingConfiguration], sigma: &[usize]) -> Result<ParallelAudit> {
    let first = configs
        .first()
        .ok_or(Error::TooFewQuasisections { needed: 1, got: 0 })?;
    let n = first.n();
    if configs.len() < n + 1 {
        return Err(Error::TooFewQuasisections { needed: n + 1, got: configs.len() });
    }
    if configs
        .iter()
        .any(|c| c.n() != n || c.k() != first.k() || c.m() != first.m())
    {
        return Err(Error::InvalidInput(
            "parallel quasisections must share the bordered and regular structure".into(),
        ));
    }
    let union: Vec<RayVector> = configs.iter().flat_map(|c| c.points()).collect();
    if !is_antipodally_generic(&union) {
        return Err(Error::DegenerateConfiguration(
            "union of parallel configurations is not antipodally generic".into(),
        ));
    }
    let chains: Vec<ChamberChain> = configs
        .iter()
        .map(|c| ChamberChain::new(c, sigma))
        .collect::<Result<_>>()?;
    let sign = chains[0].sign() as i64;
    let per_coloring = chains[0].tuple_count();

    let mut total = 0i64;
    let mut multi = 0i64;
    let mut single = BigInt::zero();
    let mut colorings = 0u64;
    for coloring in (0..configs.len()).permutations(n + 1) {
        colorings += 1;
        let cells = coloring
            .iter()
            .enumerate()
            .map(|(cell, &q)| chains[q].sheets()[cell].iter().map(move |&s| (q, s)))
            .multi_cartesian_product();
        for t in cells {
            let rays: Vec<RayVector> = t.iter().map(|&(q, s)| configs[q].ray(s).clone()).collect();
            let index = configuration_index(&rays)? as i64;
            total += index;
            if t.iter().filter(|(_, s)| s.is_regular()).count() >= 2 {
                multi += index;
            } else {
                single += 1;
            }
        }
    }
    let outcomes = per_coloring * BigInt::from(colorings);
    Ok(ParallelAudit {
        expectation: Rational::new(BigInt::from(total * sign), outcomes.clone()),
        outcomes,
        multi_regular_sum: multi,
        single_regular: single,
    })
}

/// |value| ≤ k / (k(k+1)⋯(k+n)).
pub fn within_parallel_bound(value: &Rational, k: usize, n: usize) -> bool {
    value.abs() <= Rational::new(BigInt::from(k), rising_factorial(k, n))
}
