//! Independent oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use reconlab_core::matrix::SymmetricMatrix;

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        _ => (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != c)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// All permutations of `0..n` as image vectors, by Heap's algorithm.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k % 2 == 0 { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

fn delete(m: &[Vec<f64>], i: usize) -> Vec<Vec<f64>> {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|&(c, _)| c != i)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

/// `σ M σᵗ` with `(σMσᵗ)[σ(i)][σ(j)] = M[i][j]`.
fn relabel(m: &[Vec<f64>], sigma: &[usize]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[sigma[i]][sigma[j]] = m[i][j];
        }
    }
    out
}

/// Enumerates every family `(σ_1, …, σ_n)` and returns whether any of them
/// maps each deleted submatrix of `a` exactly onto that of `b`.
pub fn brute_force_hypomorphic(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    let n = a.len();
    let perms = all_perms(n - 1);
    let deck_a: Vec<_> = (0..n).map(|i| delete(a, i)).collect();
    let deck_b: Vec<_> = (0..n).map(|i| delete(b, i)).collect();
    let total = perms.len().pow(n as u32);
    (0..total).any(|mut code| {
        (0..n).all(|i| {
            let sigma = &perms[code % perms.len()];
            code /= perms.len();
            relabel(&deck_a[i], sigma) == deck_b[i]
        })
    })
}

/// Hypomorphism with the per-index choices made separately: for each `i`, some
/// permutation maps the `i`-th deleted submatrix of `a` onto that of `b`.
pub fn per_index_hypomorphic(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    let n = a.len();
    let perms = all_perms(n - 1);
    (0..n).all(|i| {
        let (x, y) = (delete(a, i), delete(b, i));
        perms.iter().any(|p| relabel(&x, p) == y)
    })
}

/// Every labelled simple graph on `n` vertices as a 0/1 matrix.
pub fn all_graphs(n: usize) -> Vec<Vec<Vec<f64>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    (0..1usize << pairs.len())
        .map(|mask| {
            let mut m = vec![vec![0.0; n]; n];
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    m[i][j] = 1.0;
                    m[j][i] = 1.0;
                }
            }
            m
        })
        .collect()
}

/// One representative per isomorphism class, by minimal relabelled matrix.
pub fn graph_classes(n: usize) -> Vec<Vec<Vec<f64>>> {
    let perms = all_perms(n);
    let key = |m: &Vec<Vec<f64>>| -> Vec<u8> {
        perms
            .iter()
            .map(|p| relabel(m, p).iter().flatten().map(|&x| x as u8).collect::<Vec<u8>>())
            .min()
            .unwrap()
    };
    let mut seen = std::collections::BTreeMap::new();
    for g in all_graphs(n) {
        seen.entry(key(&g)).or_insert(g);
    }
    seen.into_values().collect()
}

pub fn sym(rows: Vec<Vec<f64>>) -> SymmetricMatrix {
    SymmetricMatrix::new(rows).unwrap()
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector(rng: &mut impl Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

pub fn columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    m.column_iter().map(|c| c.into_owned()).collect()
}
