//! Communication-free parallel materialization.
//!
//! The factor chain is split into a left product `B` and a right product `C`.
//! `B`'s column-major triples are cut into contiguous, near-equal chunks and
//! each worker emits `B_p ⊗ C` for its chunk. A worker only reads the shared
//! plan, so shards can be produced in any order on any number of threads.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{self, DesignError, GraphDesign};
use crate::sparse::{self, IncidencePair, SparseError, SparseMatrix, Triple};

/// Bytes accounted per emitted edge in the per-worker memory estimate.
pub const BYTES_PER_EDGE: u64 = 16;
/// Bytes accounted per stored triple of `C`.
pub const BYTES_PER_TRIPLE: u64 = 24;
/// Default bound on the number of incidence rows written.
pub const DEFAULT_INCIDENCE_BOUND: u64 = 10_000_000;
/// Default bound on the vertex count of an in-memory materialization.
pub const DEFAULT_MATERIALIZE_BOUND: u64 = 5_000_000;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const INCIDENCE_MANIFEST_FILE: &str = "incidence_manifest.json";
pub const MANIFEST_FORMAT: &str = "krongraph-shards/1";

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error("split index {split} must be in 1..={factors}")]
    InvalidSplit { split: usize, factors: usize },
    #[error("at least one worker is required")]
    NoWorkers,
    #[error("{workers} workers but B has only {triples} triples")]
    TooManyWorkers { workers: usize, triples: u64 },
    #[error("per-worker memory estimate {estimate} bytes exceeds budget {budget} bytes")]
    MemoryBudget { estimate: u64, budget: u64 },
    #[error("graph with {0} vertices does not fit 64-bit vertex ids")]
    IndexOverflow(BigUint),
    #[error("worker {worker} out of range (plan has {workers})")]
    InvalidWorker { worker: usize, workers: usize },
    #[error("edge sink failed: {0}")]
    Sink(#[source] io::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("manifest {path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{edges} edges exceeds the configured bound of {bound}")]
    ScaleGuard { edges: BigUint, bound: u64 },
    #[error("shards {failed:?} failed; partial run recorded in {}", manifest.display())]
    Incomplete {
        failed: Vec<usize>,
        manifest: PathBuf,
    },
}

pub type Result<T> = std::result::Result<T, GenerateError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> GenerateError + '_ {
    move |source| GenerateError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Receives edges from a worker.
pub trait EdgeSink {
    fn push(&mut self, src: u64, dst: u64) -> io::Result<()>;
}

impl EdgeSink for Vec<(u64, u64)> {
    fn push(&mut self, src: u64, dst: u64) -> io::Result<()> {
        Vec::push(self, (src, dst));
        Ok(())
    }
}

impl<S: EdgeSink + ?Sized> EdgeSink for &mut S {
    fn push(&mut self, src: u64, dst: u64) -> io::Result<()> {
        (**self).push(src, dst)
    }
}

/// Counts edges and folds them into an order-sensitive checksum.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CountingSink {
    pub edges: u64,
    pub checksum: u64,
}

impl EdgeSink for CountingSink {
    fn push(&mut self, src: u64, dst: u64) -> io::Result<()> {
        self.edges += 1;
        self.checksum = self
            .checksum
            .rotate_left(5)
            .wrapping_add(src.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ dst);
        Ok(())
    }
}

/// Writes `src\tdst\n` lines, optionally shifted to 1-based ids.
pub struct TsvSink<W: Write> {
    out: W,
    offset: u64,
    buf: itoa::Buffer,
}

impl<W: Write> TsvSink<W> {
    pub fn new(out: W, one_based: bool) -> Self {
        TsvSink {
            out,
            offset: u64::from(one_based),
            buf: itoa::Buffer::new(),
        }
    }

    pub fn into_inner(self) -> W {
        self.out
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}

impl<W: Write> EdgeSink for TsvSink<W> {
    fn push(&mut self, src: u64, dst: u64) -> io::Result<()> {
        self.out.write_all(self.buf.format(src + self.offset).as_bytes())?;
        self.out.write_all(b"\t")?;
        self.out.write_all(self.buf.format(dst + self.offset).as_bytes())?;
        self.out.write_all(b"\n")
    }
}

/// A contiguous range of `B`'s column-major triples owned by one worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerChunk {
    pub worker_id: usize,
    /// Half-open range into `B`'s triples.
    pub start: usize,
    pub end: usize,
    /// Smallest column in the range.
    pub col_base: usize,
}

impl WorkerChunk {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, triple: usize) -> bool {
        (self.start..self.end).contains(&triple)
    }

    /// `B_p`: this chunk's triples with `col_base` subtracted from every column.
    pub fn local_matrix(&self, b: &SparseMatrix) -> Result<SparseMatrix> {
        let triples = &b.triples()[self.start..self.end];
        let width = triples.last().map_or(1, |t| t.col - self.col_base + 1);
        Ok(SparseMatrix::from_triples(
            b.rows(),
            width,
            triples
                .iter()
                .map(|t| (t.row, t.col - self.col_base, t.value)),
        )?)
    }
}

/// Splits `n` items into `parts` contiguous chunks whose sizes differ by at most one.
pub fn partition(n: usize, parts: usize) -> Vec<(usize, usize)> {
    let (base, extra) = (n / parts, n % parts);
    let mut start = 0;
    (0..parts)
        .map(|p| {
            let len = base + usize::from(p < extra);
            let range = (start, start + len);
            start += len;
            range
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PlanOptions {
    /// Upper bound on the per-worker memory estimate, in bytes.
    pub memory_budget: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct GenPlan {
    design: GraphDesign,
    split_index: usize,
    b: SparseMatrix,
    c: SparseMatrix,
    chunks: Vec<WorkerChunk>,
    /// Positions of the global diagonal entry in `B` and `C`, when it is removed.
    removed_loop: Option<(usize, usize)>,
    memory_estimate: u64,
}

fn nnz_product(design: &GraphDesign, range: std::ops::Range<usize>) -> BigUint {
    design.factors()[range]
        .iter()
        .map(|f| BigUint::from(2 * f.m_hat() + u64::from(f.loop_vertex().is_some())))
        .product()
}

/// Default split: the largest prefix `B` for which `C` still fits the budget.
pub fn default_split(design: &GraphDesign, memory_budget: Option<u64>) -> usize {
    let n = design.factors().len();
    if n == 1 {
        return 1;
    }
    let budget = BigUint::from(memory_budget.unwrap_or(u64::MAX));
    (1..n)
        .rev()
        .find(|&s| nnz_product(design, s..n) * BYTES_PER_TRIPLE <= budget)
        .unwrap_or(n - 1)
}

/// Builds the B/C split and assigns `workers` chunks of `B`'s triples.
///
/// `split_index` leading factors form `B`. It may equal the factor count, in
/// which case `C` is the 1×1 identity.
pub fn plan(
    design: &GraphDesign,
    split_index: usize,
    workers: usize,
    options: &PlanOptions,
) -> Result<GenPlan> {
    let n = design.factors().len();
    if split_index == 0 || split_index > n {
        return Err(GenerateError::InvalidSplit {
            split: split_index,
            factors: n,
        });
    }
    if workers == 0 {
        return Err(GenerateError::NoWorkers);
    }
    let vertices = design::predict_vertices(design);
    if vertices.to_u64().is_none() {
        return Err(GenerateError::IndexOverflow(vertices));
    }

    // Check sizes before materializing B.
    let b_nnz = nnz_product(design, 0..split_index);
    let c_nnz = nnz_product(design, split_index..n);
    let b_triples = b_nnz.to_u64().unwrap_or(u64::MAX);
    if workers as u64 > b_triples {
        return Err(GenerateError::TooManyWorkers {
            workers,
            triples: b_triples,
        });
    }
    let max_chunk = b_nnz.clone() / workers + u32::from(b_nnz.clone() % workers != BigUint::ZERO);
    let estimate = (max_chunk * &c_nnz * BYTES_PER_EDGE).to_u64().unwrap_or(u64::MAX);
    if let Some(budget) = options.memory_budget {
        if estimate > budget {
            return Err(GenerateError::MemoryBudget { estimate, budget });
        }
    }

    let mats = design.star_matrices();
    let b = sparse::kron_all(&mats[..split_index])?;
    let c = sparse::kron_all(&mats[split_index..])?;

    let chunks = partition(b.nnz(), workers)
        .into_iter()
        .enumerate()
        .map(|(worker_id, (start, end))| WorkerChunk {
            worker_id,
            start,
            end,
            col_base: b.triples()[start].col,
        })
        .collect();

    let removed_loop = if design.remove_loop() {
        let diag = |m: &SparseMatrix| m.diagonal_entries().next().and_then(|v| m.position(v, v));
        match (diag(&b), diag(&c)) {
            (Some(pb), Some(pc)) => Some((pb, pc)),
            _ => unreachable!("remove_loop implies a diagonal entry in every factor"),
        }
    } else {
        None
    };

    Ok(GenPlan {
        design: design.clone(),
        split_index,
        b,
        c,
        chunks,
        removed_loop,
        memory_estimate: estimate,
    })
}

impl GenPlan {
    pub fn design(&self) -> &GraphDesign {
        &self.design
    }

    pub fn split_index(&self) -> usize {
        self.split_index
    }

    pub fn workers(&self) -> usize {
        self.chunks.len()
    }

    pub fn b(&self) -> &SparseMatrix {
        &self.b
    }

    pub fn c(&self) -> &SparseMatrix {
        &self.c
    }

    pub fn chunks(&self) -> &[WorkerChunk] {
        &self.chunks
    }

    /// Per-worker memory estimate in bytes: largest chunk · nnz(C) edges.
    pub fn memory_estimate(&self) -> u64 {
        self.memory_estimate
    }

    pub fn vertices(&self) -> u64 {
        (self.b.rows() as u64) * (self.c.rows() as u64)
    }

    /// Total edges the plan emits.
    pub fn total_edges(&self) -> u64 {
        (self.b.nnz() as u64) * (self.c.nnz() as u64) - u64::from(self.removed_loop.is_some())
    }

    /// Worker whose chunk contains the removed self-loop.
    pub fn loop_owner(&self) -> Option<usize> {
        let (pb, _) = self.removed_loop?;
        self.chunks.iter().position(|ch| ch.contains(pb))
    }

    /// Edges worker `p` emits: chunk length · nnz(C), minus the removed loop.
    pub fn chunk_edges(&self, worker_id: usize) -> u64 {
        let ch = &self.chunks[worker_id];
        ch.len() as u64 * self.c.nnz() as u64 - u64::from(self.loop_owner() == Some(worker_id))
    }

    /// Global id of the removed loop edge in the unremoved enumeration.
    fn removed_edge_id(&self) -> Option<u64> {
        self.removed_loop
            .map(|(pb, pc)| pb as u64 * self.c.nnz() as u64 + pc as u64)
    }

    /// Id of the first edge emitted by `worker_id` in the concatenated output.
    pub fn first_edge_id(&self, worker_id: usize) -> u64 {
        let raw = self.chunks[worker_id].start as u64 * self.c.nnz() as u64;
        match self.removed_edge_id() {
            Some(l) if l < raw => raw - 1,
            _ => raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSummary {
    pub worker_id: usize,
    pub edges: u64,
    pub loop_skipped: bool,
}

#[inline]
fn global_edge(tb: &Triple, tc: &Triple, m_c: u64) -> (u64, u64) {
    (
        tb.row as u64 * m_c + tc.row as u64,
        tb.col as u64 * m_c + tc.col as u64,
    )
}

/// Emits `B_p ⊗ C` for one worker: chunk triples outer, `C`'s column-major
/// triples inner. Depends only on the plan and the worker id.
pub fn generate_chunk<S: EdgeSink>(
    plan: &GenPlan,
    worker_id: usize,
    mut sink: S,
) -> Result<ChunkSummary> {
    let chunk = plan
        .chunks
        .get(worker_id)
        .ok_or(GenerateError::InvalidWorker {
            worker: worker_id,
            workers: plan.workers(),
        })?;
    let m_c = plan.c.rows() as u64;
    let c_triples = plan.c.triples();
    let skip = plan.removed_loop.filter(|&(pb, _)| chunk.contains(pb));
    let mut edges = 0u64;
    for (pos, tb) in plan.b.triples()[chunk.start..chunk.end]
        .iter()
        .enumerate()
        .map(|(i, t)| (chunk.start + i, t))
    {
        match skip {
            Some((pb, pc)) if pb == pos => {
                for (cpos, tc) in c_triples.iter().enumerate() {
                    if cpos != pc {
                        let (s, d) = global_edge(tb, tc, m_c);
                        sink.push(s, d).map_err(GenerateError::Sink)?;
                        edges += 1;
                    }
                }
            }
            _ => {
                for tc in c_triples {
                    let (s, d) = global_edge(tb, tc, m_c);
                    sink.push(s, d).map_err(GenerateError::Sink)?;
                }
                edges += c_triples.len() as u64;
            }
        }
    }
    Ok(ChunkSummary {
        worker_id,
        edges,
        loop_skipped: skip.is_some(),
    })
}

/// Same edges as [`generate_chunk`] for one worker, built through the
/// rebased `B_p ⊗ C` submatrix and shifted back to global columns.
pub fn chunk_via_submatrix(plan: &GenPlan, worker_id: usize) -> Result<Vec<(u64, u64)>> {
    let chunk = plan.chunks.get(worker_id).ok_or(GenerateError::InvalidWorker {
        worker: worker_id,
        workers: plan.workers(),
    })?;
    let local = sparse::kron(&chunk.local_matrix(&plan.b)?, &plan.c)?;
    let col_shift = (chunk.col_base * plan.c.cols()) as u64;
    let loop_vertex = plan.removed_loop.map(|(pb, pc)| {
        let (tb, tc) = (plan.b.triples()[pb], plan.c.triples()[pc]);
        global_edge(&tb, &tc, plan.c.rows() as u64)
    });
    Ok(local
        .triples()
        .iter()
        .map(|t| (t.row as u64, t.col as u64 + col_shift))
        .filter(|e| Some(*e) != loop_vertex)
        .collect())
}

#[derive(Debug, Clone, Default)]
pub struct GenerateOptions {
    /// Physical threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub one_based: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShardStatus {
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardRecord {
    pub worker_id: usize,
    pub file: String,
    pub triple_start: usize,
    pub triple_end: usize,
    pub edges: u64,
    pub loop_skipped: bool,
    pub status: ShardStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Run record written next to the shards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub design: GraphDesign,
    pub split_index: usize,
    pub workers: usize,
    pub one_based: bool,
    /// Decimal strings; these can exceed 64 bits in principle.
    pub vertices: String,
    pub predicted_edges: String,
    pub loop_removed: bool,
    pub loop_owner: Option<usize>,
    pub shards: Vec<ShardRecord>,
    pub total_edges: u64,
    pub complete: bool,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Manifest> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|source| GenerateError::Manifest { path, source })
    }

    fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn shard_paths(&self, dir: &Path) -> Vec<PathBuf> {
        self.shards.iter().map(|s| dir.join(&s.file)).collect()
    }
}

fn pad_width(workers: usize) -> usize {
    (workers.saturating_sub(1)).to_string().len().max(4)
}

pub fn shard_file_name(worker_id: usize, workers: usize) -> String {
    format!("edges_{:0w$}.tsv", worker_id, w = pad_width(workers))
}

fn write_shard(plan: &GenPlan, worker_id: usize, path: &Path, one_based: bool) -> Result<ChunkSummary> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut sink = TsvSink::new(BufWriter::with_capacity(1 << 20, file), one_based);
    let summary = generate_chunk(plan, worker_id, &mut sink)?;
    sink.flush().map_err(io_err(path))?;
    Ok(summary)
}

fn run_pool<T, F>(threads: Option<usize>, job: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

/// Runs every chunk on `threads` threads, each into its own sink from
/// `make_sink`. Summaries come back in worker order.
pub fn generate_with<S, F>(plan: &GenPlan, threads: Option<usize>, make_sink: F) -> Result<Vec<ChunkSummary>>
where
    S: EdgeSink,
    F: Fn(usize) -> S + Sync,
{
    run_pool(threads, || {
        (0..plan.workers())
            .into_par_iter()
            .map(|p| generate_chunk(plan, p, make_sink(p)))
            .collect()
    })
}

/// Runs every chunk, one shard file per worker, then writes the manifest.
pub fn generate_all(plan: &GenPlan, out: &Path, options: &GenerateOptions) -> Result<Manifest> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let workers = plan.workers();
    let records: Vec<ShardRecord> = run_pool(options.threads, || {
        plan.chunks
            .par_iter()
            .map(|chunk| {
                let file = shard_file_name(chunk.worker_id, workers);
                let path = out.join(&file);
                let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
                    write_shard(plan, chunk.worker_id, &path, options.one_based)
                }));
                let (summary, error) = match outcome {
                    Ok(Ok(s)) => (Some(s), None),
                    Ok(Err(e)) => (None, Some(e.to_string())),
                    Err(_) => (None, Some("worker panicked".to_string())),
                };
                ShardRecord {
                    worker_id: chunk.worker_id,
                    file,
                    triple_start: chunk.start,
                    triple_end: chunk.end,
                    edges: summary.map_or(0, |s| s.edges),
                    loop_skipped: summary.is_some_and(|s| s.loop_skipped),
                    status: if error.is_none() {
                        ShardStatus::Complete
                    } else {
                        ShardStatus::Failed
                    },
                    error,
                }
            })
            .collect()
    });
    let failed: Vec<usize> = records
        .iter()
        .filter(|r| r.status == ShardStatus::Failed)
        .map(|r| r.worker_id)
        .collect();
    let manifest = Manifest {
        format: MANIFEST_FORMAT.to_string(),
        design: plan.design.clone(),
        split_index: plan.split_index,
        workers,
        one_based: options.one_based,
        vertices: plan.vertices().to_string(),
        predicted_edges: plan.total_edges().to_string(),
        loop_removed: plan.removed_loop.is_some(),
        loop_owner: plan.loop_owner(),
        total_edges: records.iter().map(|r| r.edges).sum(),
        complete: failed.is_empty(),
        shards: records,
    };
    let path = manifest.write(out)?;
    if failed.is_empty() {
        Ok(manifest)
    } else {
        Err(GenerateError::Incomplete {
            failed,
            manifest: path,
        })
    }
}

/// Incidence pair of the designed graph, edges numbered in generation order
/// (`B` triple outer, `C` triple inner) with the removed loop dropped.
pub fn incidence(plan: &GenPlan) -> Result<IncidencePair> {
    let full = sparse::incidence_pair(&plan.b)?.kron(&sparse::incidence_pair(&plan.c)?)?;
    let Some(removed) = plan.removed_edge_id() else {
        return Ok(full);
    };
    let removed = removed as usize;
    let renumber = |m: &SparseMatrix| -> Result<SparseMatrix> {
        let rows = m.rows() - 1;
        let kept = m.triples().iter().filter(|t| t.row != removed).map(|t| {
            let row = if t.row > removed { t.row - 1 } else { t.row };
            (row, t.col, t.value)
        });
        Ok(SparseMatrix::from_triples(rows.max(1), m.cols(), kept)?)
    };
    Ok(IncidencePair {
        e_out: renumber(&full.e_out)?,
        e_in: renumber(&full.e_in)?,
    })
}

#[derive(Debug, Clone)]
pub struct IncidenceOptions {
    pub max_edges: u64,
    pub one_based: bool,
}

impl Default for IncidenceOptions {
    fn default() -> Self {
        IncidenceOptions {
            max_edges: DEFAULT_INCIDENCE_BOUND,
            one_based: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceShard {
    pub worker_id: usize,
    pub out_file: String,
    pub in_file: String,
    pub first_edge: u64,
    pub edges: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceManifest {
    pub format: String,
    pub design: GraphDesign,
    pub split_index: usize,
    pub workers: usize,
    pub one_based: bool,
    pub vertices: String,
    pub shards: Vec<IncidenceShard>,
    pub total_edges: u64,
}

/// Writes `(edge id, vertex id)` rows for `E_out` and `E_in`, split along the
/// same worker chunks as the edge shards.
pub fn generate_incidence(
    plan: &GenPlan,
    out: &Path,
    options: &IncidenceOptions,
) -> Result<IncidenceManifest> {
    let edges = plan.total_edges();
    if edges > options.max_edges {
        return Err(GenerateError::ScaleGuard {
            edges: edges.into(),
            bound: options.max_edges,
        });
    }
    fs::create_dir_all(out).map_err(io_err(out))?;
    let pair = incidence(plan)?;
    let endpoints = pair.endpoints();
    let w = pad_width(plan.workers());
    let mut shards = Vec::with_capacity(plan.workers());
    for p in 0..plan.workers() {
        let first = plan.first_edge_id(p);
        let count = plan.chunk_edges(p);
        let out_file = format!("incidence_out_{p:0w$}.tsv");
        let in_file = format!("incidence_in_{p:0w$}.tsv");
        for (name, side) in [(&out_file, 0usize), (&in_file, 1)] {
            let path = out.join(name);
            let file = File::create(&path).map_err(io_err(&path))?;
            let mut sink = TsvSink::new(BufWriter::new(file), options.one_based);
            for e in first..first + count {
                let (s, d) = endpoints[e as usize];
                let v = if side == 0 { s } else { d };
                sink.push(e, v as u64).map_err(io_err(&path))?;
            }
            sink.flush().map_err(io_err(&path))?;
        }
        shards.push(IncidenceShard {
            worker_id: p,
            out_file,
            in_file,
            first_edge: first,
            edges: count,
        });
    }
    let manifest = IncidenceManifest {
        format: "krongraph-incidence/1".to_string(),
        design: plan.design.clone(),
        split_index: plan.split_index,
        workers: plan.workers(),
        one_based: options.one_based,
        vertices: plan.vertices().to_string(),
        total_edges: shards.iter().map(|s| s.edges).sum(),
        shards,
    };
    let path = out.join(INCIDENCE_MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(manifest)
}

/// Full adjacency of a desk-scale design with the global loop removed if
/// requested. Used as the oracle for generation and verification.
pub fn materialize(design: &GraphDesign, max_vertices: u64) -> Result<SparseMatrix> {
    let vertices = design::predict_vertices(design);
    if vertices > BigUint::from(max_vertices) {
        return Err(GenerateError::ScaleGuard {
            edges: vertices,
            bound: max_vertices,
        });
    }
    let full = sparse::kron_all(&design.star_matrices())?;
    Ok(match design.global_loop_vertex() {
        Some(v) if design.remove_loop() => {
            let v = v.to_usize().expect("bounded above");
            full.without_entry(v, v)
        }
        _ => full,
    })
}
