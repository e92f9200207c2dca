//! Brute-force oracles shared by the integration tests. None of these use the
//! library's closed forms; they work on explicit dense or edge-list graphs.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use krongraph::{GraphDesign, LoopPlacement, SparseMatrix};
use rand::Rng;

/// Dense star: center 0 joined to points 1..=m, plus an optional self-loop.
pub fn dense_star(m: usize, placement: LoopPlacement) -> Vec<Vec<u64>> {
    let mut a = vec![vec![0u64; m + 1]; m + 1];
    for j in 1..=m {
        a[0][j] = 1;
        a[j][0] = 1;
    }
    match placement {
        LoopPlacement::None => {}
        LoopPlacement::Center => a[0][0] = 1,
        LoopPlacement::Leaf => a[m][m] = 1,
    }
    a
}

/// Textbook dense Kronecker product.
pub fn dense_kron(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut out = vec![vec![0u64; ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            if a[i][j] == 0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn dense_matmul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0u64; m]; n];
    for i in 0..n {
        for p in 0..k {
            if a[i][p] != 0 {
                for j in 0..m {
                    out[i][j] += a[i][p] * b[p][j];
                }
            }
        }
    }
    out
}

/// Dense adjacency of the design built factor by factor, loop removed if asked.
pub fn dense_design(d: &GraphDesign) -> Vec<Vec<u64>> {
    let mut a = vec![vec![1u64]];
    for f in d.factors() {
        a = dense_kron(&a, &dense_star(f.m_hat() as usize, f.placement()));
    }
    if d.remove_loop() {
        let n = a.len();
        let loops: Vec<usize> = (0..n).filter(|&i| a[i][i] != 0).collect();
        // Only the all-loop-vertex product keeps a diagonal entry.
        assert!(loops.len() <= 1, "more than one diagonal entry");
        for v in loops {
            a[v][v] = 0;
        }
    }
    a
}

pub fn dense_edges(a: &[Vec<u64>]) -> BTreeSet<(u64, u64)> {
    let mut s = BTreeSet::new();
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x != 0 {
                s.insert((i as u64, j as u64));
            }
        }
    }
    s
}

/// Row-nnz histogram of an edge set over `n` vertices, including degree 0.
pub fn degree_histogram(n: usize, edges: &BTreeSet<(u64, u64)>) -> BTreeMap<u64, u64> {
    let mut deg = vec![0u64; n];
    for &(i, _) in edges {
        deg[i as usize] += 1;
    }
    let mut h = BTreeMap::new();
    for d in deg {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

/// Counts unordered triples {i, j, k} of distinct vertices that are pairwise
/// adjacent, using bitset rows. Ignores the diagonal.
pub fn brute_triangles(n: usize, edges: &BTreeSet<(u64, u64)>) -> u64 {
    let words = n.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; n];
    for &(i, j) in edges {
        if i != j {
            rows[i as usize][j as usize / 64] |= 1 << (j % 64);
        }
    }
    let mut count = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            if rows[i][j / 64] >> (j % 64) & 1 == 0 {
                continue;
            }
            // k > j adjacent to both
            let (jw, jb) = (j / 64, j % 64);
            let above_j = if jb == 63 { 0 } else { !((1u64 << (jb + 1)) - 1) };
            count += u64::from((rows[i][jw] & rows[j][jw] & above_j).count_ones());
            for w in (jw + 1)..words {
                count += u64::from((rows[i][w] & rows[j][w]).count_ones());
            }
        }
    }
    count
}

/// Triangles by the cubic triple loop on a dense matrix, for tiny graphs.
pub fn cubic_triangles(a: &[Vec<u64>]) -> u64 {
    let n = a.len();
    let mut t = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if a[i][j] != 0 && a[j][k] != 0 && a[i][k] != 0 {
                    t += 1;
                }
            }
        }
    }
    t
}

pub fn sparse_to_edges(m: &SparseMatrix) -> BTreeSet<(u64, u64)> {
    m.triples()
        .iter()
        .map(|t| (t.row as u64, t.col as u64))
        .collect()
}

/// Random design with at most `max_factors` stars of at most `max_m` points,
/// uniform loop placement and random loop removal.
pub fn random_design<R: Rng>(rng: &mut R, max_factors: usize, max_m: u64) -> GraphDesign {
    let n = rng.gen_range(1..=max_factors);
    let m: Vec<u64> = (0..n).map(|_| rng.gen_range(2..=max_m)).collect();
    let placement = match rng.gen_range(0..3) {
        0 => LoopPlacement::None,
        1 => LoopPlacement::Center,
        _ => LoopPlacement::Leaf,
    };
    let remove = placement != LoopPlacement::None && rng.gen_bool(0.5);
    GraphDesign::uniform(&m, placement, remove).expect("valid random design")
}

/// Edge list of a star with an optional self-loop.
pub fn star_edges(m: u64, placement: LoopPlacement) -> Vec<(u64, u64)> {
    let mut e: Vec<(u64, u64)> = (1..=m).flat_map(|j| [(0, j), (j, 0)]).collect();
    match placement {
        LoopPlacement::None => {}
        LoopPlacement::Center => e.push((0, 0)),
        LoopPlacement::Leaf => e.push((m, m)),
    }
    e
}

/// Vertex count and edge set of a design, built by pairing edge lists factor
/// by factor. Scales to ~10^5 edges where the dense oracle does not.
pub fn oracle_edges(d: &GraphDesign) -> (u64, BTreeSet<(u64, u64)>) {
    let mut n = 1u64;
    let mut edges = vec![(0u64, 0u64)];
    for f in d.factors() {
        let k = f.m_hat() + 1;
        let fe = star_edges(f.m_hat(), f.placement());
        edges = edges
            .iter()
            .flat_map(|&(i, j)| fe.iter().map(move |&(a, b)| (i * k + a, j * k + b)))
            .collect();
        n *= k;
    }
    let mut set: BTreeSet<_> = edges.into_iter().collect();
    if d.remove_loop() {
        let loops: Vec<_> = set.iter().filter(|(i, j)| i == j).copied().collect();
        assert!(loops.len() <= 1, "more than one diagonal entry");
        for l in loops {
            set.remove(&l);
        }
    }
    (n, set)
}
