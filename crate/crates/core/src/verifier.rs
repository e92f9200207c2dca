//! Measures generated shards and compares them with the design prediction.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::design::{DesignError, DesignReport, GraphDesign};
use crate::distribution::DegreeDistribution;
use crate::generator::{GenerateError, Manifest};

/// Default bound on distinct edges for in-memory triangle measurement.
pub const DEFAULT_TRIANGLE_EDGE_BOUND: u64 = 50_000_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}:{line}: vertex {index} is out of range for {vertex_count} vertices", path.display())]
    OutOfRange {
        path: PathBuf,
        line: usize,
        index: u64,
        vertex_count: BigUint,
    },
    #[error("{edges} edges exceeds the triangle-counting bound of {bound}")]
    TriangleBound { edges: u64, bound: u64 },
    #[error("manifest design does not match the configured design")]
    DesignMismatch,
    #[error("manifest records an incomplete run (failed shards: {0:?})")]
    IncompleteRun(Vec<usize>),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Clone)]
pub struct MeasureOptions {
    pub count_triangles: bool,
    pub triangle_edge_bound: u64,
    /// Shard ids are 1-based.
    pub one_based: bool,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            count_triangles: false,
            triangle_edge_bound: DEFAULT_TRIANGLE_EDGE_BOUND,
            one_based: false,
        }
    }
}

/// Properties measured from edge shards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalStats {
    pub vertices_touched: BigUint,
    /// Lines read, duplicates included.
    pub edge_count: BigUint,
    /// Row nnz of distinct entries; isolated vertices appear at degree 0.
    pub distribution: DegreeDistribution,
    /// `None` when triangle counting was not requested.
    pub triangles: Option<BigUint>,
    /// `Σ (A A .* A)` over off-diagonal entries; equals 6·triangles when symmetric.
    pub closed_wedges: Option<BigUint>,
    pub self_loops: u64,
    pub duplicate_edges: u64,
    /// Distinct entries `(i, j)` with no matching `(j, i)`.
    pub asymmetric_entries: u64,
}

fn parse_shard(path: &Path, vertex_count: &BigUint, one_based: bool) -> Result<Vec<(u64, u64)>> {
    let file = File::open(path).map_err(|source| VerifyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let limit = vertex_count.to_u64();
    let mut edges = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| VerifyError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| VerifyError::Parse {
            path: path.to_path_buf(),
            line: lineno,
            message,
        };
        let mut fields = line.split('\t');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected two tab-separated ids, got `{line}`")));
        };
        let mut ids = [0u64; 2];
        for (slot, text) in ids.iter_mut().zip([a, b]) {
            let raw: u64 = text
                .parse()
                .map_err(|_| parse_err(format!("`{text}` is not a vertex id")))?;
            let id = if one_based {
                raw.checked_sub(1)
                    .ok_or_else(|| parse_err("vertex id 0 in a 1-based shard".to_string()))?
            } else {
                raw
            };
            if limit.is_some_and(|n| id >= n) {
                return Err(VerifyError::OutOfRange {
                    path: path.to_path_buf(),
                    line: lineno,
                    index: id,
                    vertex_count: vertex_count.clone(),
                });
            }
            *slot = id;
        }
        edges.push((ids[0], ids[1]));
    }
    Ok(edges)
}

/// Reads every shard and measures the graph they describe. Shard order and
/// line order do not affect the result.
pub fn measure(
    shards: &[PathBuf],
    vertex_count: &BigUint,
    options: &MeasureOptions,
) -> Result<EmpiricalStats> {
    let parts = shards
        .par_iter()
        .map(|p| parse_shard(p, vertex_count, options.one_based))
        .collect::<Result<Vec<_>>>()?;
    let mut edges: Vec<(u64, u64)> = parts.into_iter().flatten().collect();
    let edge_count = BigUint::from(edges.len());
    edges.par_sort_unstable();
    let before = edges.len();
    edges.dedup();
    let duplicate_edges = (before - edges.len()) as u64;
    let self_loops = edges.iter().filter(|(a, b)| a == b).count() as u64;
    let asymmetric_entries = edges
        .par_iter()
        .filter(|&&(a, b)| edges.binary_search(&(b, a)).is_err())
        .count() as u64;

    let mut endpoints: Vec<u64> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    endpoints.par_sort_unstable();
    endpoints.dedup();
    let vertices_touched = BigUint::from(endpoints.len());

    let mut distribution = DegreeDistribution::new();
    let mut rows_with_entries = 0u64;
    for run in edges.chunk_by(|x, y| x.0 == y.0) {
        distribution.add(BigUint::from(run.len()), BigUint::from(1u32));
        rows_with_entries += 1;
    }
    let isolated = vertex_count - BigUint::from(rows_with_entries).min(vertex_count.clone());
    distribution.add(BigUint::zero(), isolated);

    let (closed_wedges, triangles) = if options.count_triangles {
        if edges.len() as u64 > options.triangle_edge_bound {
            return Err(VerifyError::TriangleBound {
                edges: edges.len() as u64,
                bound: options.triangle_edge_bound,
            });
        }
        let s = closed_wedge_count(&edges);
        (Some(BigUint::from(s)), Some(BigUint::from(s / 6)))
    } else {
        (None, None)
    };

    Ok(EmpiricalStats {
        vertices_touched,
        edge_count,
        distribution,
        triangles,
        closed_wedges,
        self_loops,
        duplicate_edges,
        asymmetric_entries,
    })
}

/// Compressed adjacency lists keyed by a sorted, deduplicated vertex list.
struct Adjacency {
    ids: Vec<u64>,
    ptr: Vec<usize>,
    nbrs: Vec<u64>,
}

impl Adjacency {
    /// `pairs` must be sorted and contain no duplicates.
    fn from_sorted(pairs: &[(u64, u64)]) -> Self {
        let mut ids = Vec::new();
        let mut ptr = vec![0];
        let mut nbrs = Vec::with_capacity(pairs.len());
        for run in pairs.chunk_by(|x, y| x.0 == y.0) {
            ids.push(run[0].0);
            nbrs.extend(run.iter().map(|e| e.1));
            ptr.push(nbrs.len());
        }
        Adjacency { ids, ptr, nbrs }
    }

    fn list(&self, v: u64) -> &[u64] {
        match self.ids.binary_search(&v) {
            Ok(i) => &self.nbrs[self.ptr[i]..self.ptr[i + 1]],
            Err(_) => &[],
        }
    }
}

/// Ordered triples `(i, k, j)` of pairwise distinct vertices with entries
/// `(i, k)`, `(k, j)` and `(i, j)`, computed by wedge intersection.
fn closed_wedge_count(sorted_edges: &[(u64, u64)]) -> u64 {
    let off: Vec<(u64, u64)> = sorted_edges.iter().copied().filter(|(a, b)| a != b).collect();
    let out = Adjacency::from_sorted(&off);
    let mut rev: Vec<(u64, u64)> = off.iter().map(|&(a, b)| (b, a)).collect();
    rev.par_sort_unstable();
    let inc = Adjacency::from_sorted(&rev);
    off.par_iter()
        .map(|&(i, j)| {
            // k with (i, k) and (k, j)
            let (oi, ij) = (out.list(i), inc.list(j));
            let (small, large) = if oi.len() <= ij.len() { (oi, ij) } else { (ij, oi) };
            small
                .iter()
                .filter(|&&k| k != i && k != j && large.binary_search(&k).is_ok())
                .count() as u64
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCheck {
    pub field: &'static str,
    pub predicted: String,
    pub measured: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionMismatch {
    pub degree: BigUint,
    pub predicted: BigUint,
    pub measured: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<FieldCheck>,
    pub distribution_mismatches: Vec<DistributionMismatch>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.distribution_mismatches.is_empty()
    }

    pub fn failed_fields(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.field).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "check\t{}\tpredicted={}\tmeasured={}\t{}",
                c.field,
                c.predicted,
                c.measured,
                if c.pass { "PASS" } else { "FAIL" }
            )?;
        }
        for m in &self.distribution_mismatches {
            writeln!(
                f,
                "mismatch\tdegree={}\tpredicted={}\tmeasured={}",
                m.degree, m.predicted, m.measured
            )?;
        }
        writeln!(f, "result\t{}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

fn check<T: PartialEq + ToString>(field: &'static str, predicted: T, measured: T) -> FieldCheck {
    FieldCheck {
        field,
        pass: predicted == measured,
        predicted: predicted.to_string(),
        measured: measured.to_string(),
    }
}

/// Field-by-field exact comparison. Mismatches are report content.
pub fn diff(predicted: &DesignReport, measured: &EmpiricalStats) -> VerificationReport {
    let mut checks = vec![
        check("vertices", &predicted.vertices, &measured.vertices_touched),
        check("edges", &predicted.edges, &measured.edge_count),
        check("self_loops", predicted.self_loops, measured.self_loops),
        check("duplicate_edges", 0, measured.duplicate_edges),
        check("asymmetric_entries", 0, measured.asymmetric_entries),
    ];
    if let Some(t) = &measured.triangles {
        checks.push(check("triangles", &predicted.triangles, t));
    }

    let (p, m) = (&predicted.distribution, &measured.distribution);
    let mut degrees: Vec<&BigUint> = p.iter().chain(m.iter()).map(|(d, _)| d).collect();
    degrees.sort();
    degrees.dedup();
    let distribution_mismatches = degrees
        .into_iter()
        .filter_map(|d| {
            let (pc, mc) = (p.count(d), m.count(d));
            (pc != mc).then(|| DistributionMismatch {
                degree: d.clone(),
                predicted: pc,
                measured: mc,
            })
        })
        .collect();
    VerificationReport {
        checks,
        distribution_mismatches,
    }
}

/// Reads the manifest in `dir`, checks it belongs to `design`, and measures
/// its shards.
pub fn measure_run(
    design: &GraphDesign,
    dir: &Path,
    count_triangles: bool,
) -> Result<(Manifest, EmpiricalStats)> {
    let manifest = Manifest::read(dir)?;
    if &manifest.design != design {
        return Err(VerifyError::DesignMismatch);
    }
    if !manifest.complete {
        let failed = manifest
            .shards
            .iter()
            .filter(|s| s.status != crate::generator::ShardStatus::Complete)
            .map(|s| s.worker_id)
            .collect();
        return Err(VerifyError::IncompleteRun(failed));
    }
    let options = MeasureOptions {
        count_triangles,
        one_based: manifest.one_based,
        ..MeasureOptions::default()
    };
    let vertices = crate::design::predict_vertices(design);
    let stats = measure(&manifest.shard_paths(dir), &vertices, &options)?;
    Ok((manifest, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_shard(dir: &Path, name: &str, lines: &[&str]) -> PathBuf {
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        path
    }

    #[test]
    fn empty_shard_set() {
        let stats = measure(&[], &BigUint::from(7u32), &MeasureOptions::default()).unwrap();
        assert_eq!(stats.distribution.to_u64_pairs(), vec![(0, 7)]);
        assert!(stats.edge_count.is_zero());
    }

    #[test]
    fn counts_loops_duplicates_and_asymmetry() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_shard(dir.path(), "a.tsv", &["0\t1", "1\t0", "2\t2"]);
        let b = write_shard(dir.path(), "b.tsv", &["0\t1", "1\t2"]);
        let stats = measure(&[a, b], &BigUint::from(4u32), &MeasureOptions::default()).unwrap();
        assert_eq!(stats.edge_count, BigUint::from(5u32));
        assert_eq!(stats.duplicate_edges, 1);
        assert_eq!(stats.self_loops, 1);
        assert_eq!(stats.asymmetric_entries, 1);
        assert_eq!(stats.vertices_touched, BigUint::from(3u32));
        // rows: 0 -> {1}, 1 -> {0, 2}, 2 -> {2}, 3 -> {}
        assert_eq!(stats.distribution.to_u64_pairs(), vec![(0, 1), (1, 2), (2, 1)]);
    }

    #[test]
    fn one_based_input() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_shard(dir.path(), "a.tsv", &["1\t2", "2\t1"]);
        let opts = MeasureOptions {
            one_based: true,
            ..MeasureOptions::default()
        };
        let stats = measure(std::slice::from_ref(&a), &BigUint::from(2u32), &opts).unwrap();
        assert_eq!(stats.distribution.to_u64_pairs(), vec![(1, 2)]);
        let zero = write_shard(dir.path(), "z.tsv", &["0\t1"]);
        assert!(matches!(
            measure(&[zero], &BigUint::from(2u32), &opts),
            Err(VerifyError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn malformed_lines_report_position() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write_shard(dir.path(), "bad.tsv", &["0\t1", "1 0"]);
        let err = measure(&[bad], &BigUint::from(2u32), &MeasureOptions::default()).unwrap_err();
        assert!(matches!(err, VerifyError::Parse { line: 2, .. }));
        assert!(err.to_string().contains("bad.tsv:2"));

        let extra = write_shard(dir.path(), "extra.tsv", &["0\t1\t1"]);
        assert!(measure(&[extra], &BigUint::from(2u32), &MeasureOptions::default()).is_err());

        let range = write_shard(dir.path(), "range.tsv", &["0\t5"]);
        assert!(matches!(
            measure(&[range], &BigUint::from(5u32), &MeasureOptions::default()),
            Err(VerifyError::OutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn triangle_bound_refuses() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_shard(dir.path(), "a.tsv", &["0\t1", "1\t0"]);
        let opts = MeasureOptions {
            count_triangles: true,
            triangle_edge_bound: 1,
            ..MeasureOptions::default()
        };
        assert!(matches!(
            measure(&[a], &BigUint::from(2u32), &opts),
            Err(VerifyError::TriangleBound { edges: 2, bound: 1 })
        ));
    }

    #[test]
    fn wedge_count_on_small_graphs() {
        // triangle plus pendant, both directions, with a self-loop that must be ignored
        let mut edges = vec![(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0), (2, 3), (3, 2), (3, 3)];
        edges.sort_unstable();
        assert_eq!(closed_wedge_count(&edges), 6);
        let mut k4: Vec<(u64, u64)> = (0..4)
            .flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        k4.sort_unstable();
        assert_eq!(closed_wedge_count(&k4), 24);
    }
}
