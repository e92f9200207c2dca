//! Exact properties of a Kronecker product of star graphs, computed from the
//! constituent stars alone. Nothing here materializes the full graph.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::DegreeDistribution;
use crate::sparse::{self, SparseError, SparseMatrix};

/// Largest factor count for which subset products are enumerated.
pub const MAX_ENUMERATED_FACTORS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("a design needs at least one factor")]
    NoFactors,
    #[error("a star needs at least 2 points, got {0}")]
    TooFewPoints(u64),
    #[error("remove_loop requires a self-loop on every factor")]
    RemoveWithoutLoops,
    #[error("factors mix loop placements ({0}); enable mixed loops to allow this")]
    MixedLoops(String),
    #[error("unknown loop placement `{0}` (expected none, center or leaf)")]
    UnknownPlacement(String),
    #[error("triangle numerator {numerator} is not divisible by 6")]
    TriangleNumerator { numerator: BigUint },
    #[error("power-law exponent undefined: {0}")]
    UndefinedAlpha(&'static str),
    #[error("{0} factors is too many to enumerate subset products (max {MAX_ENUMERATED_FACTORS})")]
    TooManyFactors(usize),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

pub type Result<T> = std::result::Result<T, DesignError>;

/// Where a star carries its self-loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopPlacement {
    None,
    /// On the center vertex, index 0.
    Center,
    /// On the last point vertex, index m̂.
    Leaf,
}

impl fmt::Display for LoopPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoopPlacement::None => "none",
            LoopPlacement::Center => "center",
            LoopPlacement::Leaf => "leaf",
        })
    }
}

impl FromStr for LoopPlacement {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(LoopPlacement::None),
            "center" => Ok(LoopPlacement::Center),
            "leaf" => Ok(LoopPlacement::Leaf),
            _ => Err(DesignError::UnknownPlacement(s.to_string())),
        }
    }
}

/// One constituent star: `m_hat` points around a center, optional self-loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactorSpec {
    m_hat: u64,
    #[serde(rename = "loop")]
    placement: LoopPlacement,
}

impl FactorSpec {
    pub fn new(m_hat: u64, placement: LoopPlacement) -> Result<Self> {
        if m_hat < 2 {
            return Err(DesignError::TooFewPoints(m_hat));
        }
        Ok(FactorSpec { m_hat, placement })
    }

    pub fn star(m_hat: u64) -> Result<Self> {
        Self::new(m_hat, LoopPlacement::None)
    }

    pub fn m_hat(&self) -> u64 {
        self.m_hat
    }

    pub fn placement(&self) -> LoopPlacement {
        self.placement
    }

    pub fn vertices(&self) -> u64 {
        self.m_hat + 1
    }

    pub fn loop_vertex(&self) -> Option<u64> {
        match self.placement {
            LoopPlacement::None => None,
            LoopPlacement::Center => Some(0),
            LoopPlacement::Leaf => Some(self.m_hat),
        }
    }
}

/// Adjacency matrix of the star, center at vertex 0.
pub fn star_matrix(f: &FactorSpec) -> SparseMatrix {
    let m = f.m_hat as usize;
    let spokes = (1..=m).flat_map(|k| [(0, k, 1), (k, 0, 1)]);
    let diagonal = f.loop_vertex().map(|v| (v as usize, v as usize, 1));
    SparseMatrix::from_triples(m + 1, m + 1, spokes.chain(diagonal))
        .expect("star triples are in range and unique")
}

/// Ordered list of stars plus the global self-loop policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDesign {
    factors: Vec<FactorSpec>,
    remove_loop: bool,
    #[serde(default)]
    mixed_loops: bool,
}

impl GraphDesign {
    /// Requires every factor to share one loop placement.
    pub fn new(factors: Vec<FactorSpec>, remove_loop: bool) -> Result<Self> {
        Self::build(factors, remove_loop, false)
    }

    /// Allows factors with different loop placements.
    pub fn with_mixed_loops(factors: Vec<FactorSpec>, remove_loop: bool) -> Result<Self> {
        Self::build(factors, remove_loop, true)
    }

    fn build(factors: Vec<FactorSpec>, remove_loop: bool, mixed_loops: bool) -> Result<Self> {
        if factors.is_empty() {
            return Err(DesignError::NoFactors);
        }
        if let Some(f) = factors.iter().find(|f| f.m_hat < 2) {
            return Err(DesignError::TooFewPoints(f.m_hat));
        }
        if !mixed_loops {
            let first = factors[0].placement;
            if factors.iter().any(|f| f.placement != first) {
                let kinds: Vec<String> = factors.iter().map(|f| f.placement.to_string()).collect();
                return Err(DesignError::MixedLoops(kinds.join(",")));
            }
        }
        if remove_loop && factors.iter().any(|f| f.placement == LoopPlacement::None) {
            return Err(DesignError::RemoveWithoutLoops);
        }
        Ok(GraphDesign {
            factors,
            remove_loop,
            mixed_loops,
        })
    }

    /// Convenience for loop-free or uniformly looped designs.
    pub fn uniform(m_hats: &[u64], placement: LoopPlacement, remove_loop: bool) -> Result<Self> {
        let factors = m_hats
            .iter()
            .map(|&m| FactorSpec::new(m, placement))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors, remove_loop)
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn remove_loop(&self) -> bool {
        self.remove_loop
    }

    pub fn mixed_loops(&self) -> bool {
        self.mixed_loops
    }

    pub fn m_hats(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.m_hat).collect()
    }

    /// The full product has a diagonal entry only if every factor has one.
    pub fn has_global_loop(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.placement != LoopPlacement::None)
    }

    pub fn is_loop_free(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.placement == LoopPlacement::None)
    }

    /// Index of the vertex carrying the single global self-loop.
    pub fn global_loop_vertex(&self) -> Option<BigUint> {
        let mut index = BigUint::zero();
        for f in &self.factors {
            index = index * f.vertices() + f.loop_vertex()?;
        }
        Some(index)
    }

    pub fn star_matrices(&self) -> Vec<SparseMatrix> {
        self.factors.iter().map(star_matrix).collect()
    }

    /// Same design restricted to the factors in `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<GraphDesign> {
        let factors = self.factors[range].to_vec();
        let remove = self.remove_loop
            && factors.iter().all(|f| f.placement != LoopPlacement::None);
        Self::build(factors, remove, self.mixed_loops)
    }
}

/// Per-factor quantities measured on the factor's own matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorStats {
    pub vertices: u64,
    pub nnz: u64,
    pub wedge_sum: u64,
    pub distribution: DegreeDistribution,
    /// Row nnz of the vertex carrying a self-loop, counting the loop once.
    pub loop_degree: Option<u64>,
}

impl FactorStats {
    /// Works for any square factor with at most one diagonal entry.
    pub fn measure(a: &SparseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(SparseError::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            }
            .into());
        }
        let loop_degree = a
            .diagonal_entries()
            .next()
            .map(|v| a.row_nnz()[v] as u64);
        Ok(FactorStats {
            vertices: a.rows() as u64,
            nnz: a.nnz() as u64,
            wedge_sum: sparse::closed_wedge_sum(a)?,
            distribution: sparse::degrees(a),
            loop_degree,
        })
    }
}

fn factor_stats(d: &GraphDesign) -> Result<Vec<FactorStats>> {
    d.factors
        .iter()
        .map(|f| FactorStats::measure(&star_matrix(f)))
        .collect()
}

pub fn predict_vertices(d: &GraphDesign) -> BigUint {
    d.factors.iter().map(|f| BigUint::from(f.vertices())).product()
}

fn edges_from(stats: &[FactorStats], d: &GraphDesign) -> BigUint {
    let total: BigUint = stats.iter().map(|s| BigUint::from(s.nnz)).product();
    if d.remove_loop {
        total - 1u32
    } else {
        total
    }
}

pub fn predict_edges(d: &GraphDesign) -> Result<BigUint> {
    Ok(edges_from(&factor_stats(d)?, d))
}

fn loop_degree_from(stats: &[FactorStats]) -> Option<BigUint> {
    stats
        .iter()
        .map(|s| s.loop_degree.map(BigUint::from))
        .product()
}

/// Degree of the global loop vertex in the product, counting the loop once.
/// `None` when the product has no diagonal entry.
pub fn loop_vertex_degree(d: &GraphDesign) -> Result<Option<BigUint>> {
    Ok(loop_degree_from(&factor_stats(d)?))
}

fn distribution_from(stats: &[FactorStats], d: &GraphDesign) -> DegreeDistribution {
    let mut dist = stats
        .iter()
        .skip(1)
        .fold(stats[0].distribution.clone(), |acc, s| acc.kron(&s.distribution));
    if d.remove_loop {
        let dv = loop_degree_from(stats).expect("remove_loop implies a global loop");
        let moved = dist.shift_one_down(&dv);
        debug_assert!(moved, "loop vertex degree must be present");
    }
    dist
}

pub fn predict_degree_distribution(d: &GraphDesign) -> Result<DegreeDistribution> {
    Ok(distribution_from(&factor_stats(d)?, d))
}

fn triangles_from(stats: &[FactorStats]) -> Result<BigUint> {
    let s: BigUint = stats.iter().map(|f| BigUint::from(f.wedge_sum)).product();
    // A global self-loop at v contributes 3·d_v − 2 degenerate closed walks
    // (v,v,v), (v,v,j), (i,v,v), (v,k,v) whether or not it is later removed.
    let numerator = match loop_degree_from(stats) {
        Some(dv) => {
            let degenerate = dv * 3u32 - 2u32;
            if s < degenerate {
                return Err(DesignError::TriangleNumerator { numerator: s });
            }
            s - degenerate
        }
        None => s,
    };
    let (q, r) = numerator.div_rem(&BigUint::from(6u32));
    if !r.is_zero() {
        return Err(DesignError::TriangleNumerator { numerator });
    }
    Ok(q)
}

/// Triangles among distinct vertices. Self-loops never form triangles, so the
/// count is the same whether or not the global loop is removed.
pub fn predict_triangles(d: &GraphDesign) -> Result<BigUint> {
    triangles_from(&factor_stats(d)?)
}

/// `α = log n(1) / log d_max`, kept as the exact pair of log arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub n1: BigUint,
    pub d_max: BigUint,
    /// Floating evaluation, for display only.
    pub value: f64,
}

impl AlphaReport {
    /// α = 1 exactly iff n(1) = d_max.
    pub fn is_exactly_one(&self) -> bool {
        self.n1 == self.d_max
    }
}

/// Natural log of an arbitrarily large integer.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value fits f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn power_law_alpha(dist: &DegreeDistribution) -> Result<AlphaReport> {
    let n1 = dist.count(&BigUint::one());
    if n1.is_zero() {
        return Err(DesignError::UndefinedAlpha("no vertex has degree 1"));
    }
    let d_max = dist.max_degree().cloned().unwrap_or_default();
    if d_max <= BigUint::one() {
        return Err(DesignError::UndefinedAlpha("maximum degree is 1"));
    }
    let value = big_ln(&n1) / big_ln(&d_max);
    Ok(AlphaReport { n1, d_max, value })
}

/// Whether all subset products of the m̂ values are distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerLawValidity {
    pub subset_products_unique: bool,
    /// Up to a few products reached by more than one subset.
    pub collisions: Vec<BigUint>,
    pub loop_free: bool,
}

impl PowerLawValidity {
    /// A pure power law needs distinct subset products and no self-loops.
    pub fn is_valid(&self) -> bool {
        self.subset_products_unique && self.loop_free
    }
}

pub fn validate_power_law(d: &GraphDesign) -> Result<PowerLawValidity> {
    let n = d.factors.len();
    if n > MAX_ENUMERATED_FACTORS {
        return Err(DesignError::TooManyFactors(n));
    }
    let mut products: Vec<BigUint> = vec![BigUint::one()];
    for f in &d.factors {
        let scaled: Vec<BigUint> = products.iter().map(|p| p * f.m_hat).collect();
        products.extend(scaled);
    }
    let mut seen = HashSet::with_capacity(products.len());
    let mut collisions = Vec::new();
    for p in products {
        if !seen.insert(p.clone()) && collisions.len() < 8 && !collisions.contains(&p) {
            collisions.push(p);
        }
    }
    Ok(PowerLawValidity {
        subset_products_unique: collisions.is_empty(),
        collisions,
        loop_free: d.is_loop_free(),
    })
}

/// Every predicted property of the full graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub vertices: BigUint,
    /// Stored adjacency entries after any loop removal.
    pub edges: BigUint,
    pub triangles: BigUint,
    pub distribution: DegreeDistribution,
    pub alpha: Option<AlphaReport>,
    pub loop_vertex_degree: Option<BigUint>,
    pub power_law: PowerLawValidity,
    /// Self-loops left in the graph: 1 if a global loop exists and is kept.
    pub self_loops: u64,
}

impl DesignReport {
    pub fn power_law_valid(&self) -> bool {
        self.power_law.is_valid()
    }
}

pub fn design_report(d: &GraphDesign) -> Result<DesignReport> {
    let stats = factor_stats(d)?;
    let distribution = distribution_from(&stats, d);
    let loop_vertex_degree = loop_degree_from(&stats);
    let self_loops = u64::from(loop_vertex_degree.is_some() && !d.remove_loop);
    Ok(DesignReport {
        vertices: predict_vertices(d),
        edges: edges_from(&stats, d),
        triangles: triangles_from(&stats)?,
        alpha: power_law_alpha(&distribution).ok(),
        loop_vertex_degree,
        power_law: validate_power_law(d)?,
        distribution,
        self_loops,
    })
}
