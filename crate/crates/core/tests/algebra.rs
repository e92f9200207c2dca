mod common;

use std::collections::BTreeSet;

use common::{cubic_triangles, dense_kron, dense_matmul};
use krongraph::sparse::{
    closed_wedge_sum, degrees, ewise_mult, incidence_pair, kron, matmul, triangle_count,
};
use krongraph::SparseMatrix;
use proptest::prelude::*;

fn to_sparse(d: &[Vec<u64>]) -> SparseMatrix {
    let triples = d.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(move |(j, &x)| (i, j, x))
    });
    SparseMatrix::from_triples(d.len(), d[0].len(), triples).unwrap()
}

fn dense(rows: usize, cols: usize, max: u64) -> impl Strategy<Value = Vec<Vec<u64>>> {
    proptest::collection::vec(proptest::collection::vec(0..=max, cols), rows)
}

fn any_dense(max_dim: usize, max: u64) -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| dense(r, c, max))
}

/// Symmetric 0/1 matrix with empty diagonal.
fn simple_graph(max_n: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::ANY, n * (n - 1) / 2).prop_map(move |bits| {
            let mut a = vec![vec![0u64; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        a[i][j] = 1;
                        a[j][i] = 1;
                    }
                    k += 1;
                }
            }
            a
        })
    })
}

/// Symmetric 0/1 matrix that may carry diagonal entries.
fn loopy_graph(max_n: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    simple_graph(max_n).prop_flat_map(|a| {
        let n = a.len();
        proptest::collection::vec(proptest::bool::ANY, n).prop_map(move |diag| {
            let mut a = a.clone();
            for (i, d) in diag.into_iter().enumerate() {
                a[i][i] = u64::from(d);
            }
            a
        })
    })
}

fn brute_closed_wedges(a: &[Vec<u64>]) -> u64 {
    let n = a.len();
    let mut s = 0;
    for i in 0..n {
        for j in 0..n {
            if a[i][j] == 0 {
                continue;
            }
            for k in 0..n {
                s += a[i][k] * a[k][j] * a[i][j];
            }
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kron_matches_dense_definition(a in any_dense(4, 3), b in any_dense(4, 3)) {
        let k = kron(&to_sparse(&a), &to_sparse(&b)).unwrap();
        prop_assert_eq!(k.to_dense(), dense_kron(&a, &b));
    }

    #[test]
    fn kron_nnz_is_multiplicative(a in any_dense(5, 2), b in any_dense(5, 2)) {
        let (sa, sb) = (to_sparse(&a), to_sparse(&b));
        prop_assert_eq!(kron(&sa, &sb).unwrap().nnz(), sa.nnz() * sb.nnz());
    }

    #[test]
    fn kron_is_associative(a in any_dense(3, 2), b in any_dense(3, 2), c in any_dense(3, 2)) {
        let (a, b, c) = (to_sparse(&a), to_sparse(&b), to_sparse(&c));
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn mixed_product_property(
        (a, c) in (1..=3usize, 1..=3usize, 1..=3usize)
            .prop_flat_map(|(r, k, c)| (dense(r, k, 3), dense(k, c, 3))),
        (b, d) in (1..=3usize, 1..=3usize, 1..=3usize)
            .prop_flat_map(|(r, k, c)| (dense(r, k, 3), dense(k, c, 3))),
    ) {
        let (a, b, c, d) = (to_sparse(&a), to_sparse(&b), to_sparse(&c), to_sparse(&d));
        let left = matmul(&kron(&a, &b).unwrap(), &kron(&c, &d).unwrap()).unwrap();
        let right = kron(&matmul(&a, &c).unwrap(), &matmul(&b, &d).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn matmul_matches_dense(
        (a, b) in (1..=5usize, 1..=5usize, 1..=5usize)
            .prop_flat_map(|(r, k, c)| (dense(r, k, 4), dense(k, c, 4)))
    ) {
        let p = matmul(&to_sparse(&a), &to_sparse(&b)).unwrap();
        prop_assert_eq!(p.to_dense(), dense_matmul(&a, &b));
    }

    #[test]
    fn closed_wedges_agree_three_ways(a in loopy_graph(8)) {
        let s = to_sparse(&a);
        let via_products: u64 = ewise_mult(&matmul(&s, &s).unwrap(), &s)
            .unwrap()
            .value_sum()
            .unwrap();
        let masked = closed_wedge_sum(&s).unwrap();
        prop_assert_eq!(masked, via_products);
        prop_assert_eq!(masked, brute_closed_wedges(&a));
    }

    #[test]
    fn triangle_count_matches_cubic_loop(a in simple_graph(8)) {
        prop_assert_eq!(triangle_count(&to_sparse(&a)).unwrap(), cubic_triangles(&a));
    }

    #[test]
    fn wedge_sum_is_multiplicative_under_kron(a in loopy_graph(5), b in loopy_graph(5)) {
        let (sa, sb) = (to_sparse(&a), to_sparse(&b));
        let k = kron(&sa, &sb).unwrap();
        prop_assert_eq!(
            closed_wedge_sum(&k).unwrap(),
            closed_wedge_sum(&sa).unwrap() * closed_wedge_sum(&sb).unwrap()
        );
    }

    #[test]
    fn incidence_reconstructs_adjacency(a in loopy_graph(7)) {
        let s = to_sparse(&a);
        prop_assume!(s.nnz() > 0);
        let pair = incidence_pair(&s).unwrap();
        prop_assert_eq!(pair.edges(), s.nnz());
        prop_assert_eq!(pair.adjacency().unwrap(), s);
    }

    #[test]
    fn incidence_kron_reconstructs_kron(a in loopy_graph(4), b in loopy_graph(4)) {
        let (sa, sb) = (to_sparse(&a), to_sparse(&b));
        prop_assume!(sa.nnz() > 0 && sb.nnz() > 0);
        let pair = incidence_pair(&sa).unwrap().kron(&incidence_pair(&sb).unwrap()).unwrap();
        prop_assert_eq!(pair.adjacency().unwrap(), kron(&sa, &sb).unwrap());
    }

    #[test]
    fn degree_distribution_sums(a in loopy_graph(8)) {
        let s = to_sparse(&a);
        let d = degrees(&s);
        prop_assert_eq!(d.total_vertices(), (a.len() as u64).into());
        prop_assert_eq!(d.total_entries(), (s.nnz() as u64).into());
        let dk = degrees(&kron(&s, &s).unwrap());
        prop_assert_eq!(dk, d.kron(&d));
    }

    #[test]
    fn transpose_is_an_involution(a in any_dense(6, 3)) {
        let s = to_sparse(&a);
        prop_assert_eq!(s.transpose().transpose(), s.clone());
        let t: BTreeSet<_> = s.transpose().triples().iter().map(|t| (t.col, t.row)).collect();
        let o: BTreeSet<_> = s.triples().iter().map(|t| (t.row, t.col)).collect();
        prop_assert_eq!(t, o);
    }
}
