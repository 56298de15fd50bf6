//! Hypomorphisms between symmetric matrices: verification, per-index
//! backtracking search, and graph-derived test pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph6::Graph6Record;
use crate::matrix::{deck, eigen_sorted, perm_similarity, Permutation, SymmetricMatrix};

/// Tolerance for exact (0/1 or otherwise exactly representable) inputs.
pub const EXACT_TOL: f64 = 1e-12;

/// Largest order accepted by [`find_hypomorphism`].
pub const DEFAULT_SEARCH_CAP: usize = 9;

/// Relative tolerance used when pruning on eigenvalues. Loose on purpose:
/// pruning may only reject, and roundoff must never reject a true match.
const EIGEN_PRUNE_TOL: f64 = 1e-9;

/// One permutation `σ_i` of degree `n - 1` per deleted index `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypomorphism {
    sigmas: Vec<Permutation>,
}

impl Hypomorphism {
    pub fn new(sigmas: Vec<Permutation>) -> Result<Self> {
        let n = sigmas.len();
        if n < 3 {
            return Err(Error::DegenerateOrder { n, min: 3 });
        }
        if let Some(bad) = sigmas.iter().find(|s| s.degree() != n - 1) {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                found: bad.degree(),
            });
        }
        Ok(Self { sigmas })
    }

    /// All-identity hypomorphism of order `n`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![Permutation::identity(n.saturating_sub(1)); n])
    }

    pub fn n(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.sigmas
    }

    /// Image lists, the wire form used in pair JSON.
    pub fn to_images(&self) -> Vec<Vec<usize>> {
        self.sigmas.iter().map(|s| s.image().to_vec()).collect()
    }

    pub fn from_images(images: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(
            images
                .into_iter()
                .map(Permutation::new)
                .collect::<Result<_>>()?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypomorphyCertificate {
    pub valid: bool,
    /// Largest entrywise deviation `max_i max|B_i - σ_i A_i σ_iᵗ|`.
    pub worst_residual: f64,
    /// First index whose residual exceeds the tolerance.
    pub failing_index: Option<usize>,
    pub tol: f64,
}

fn check_orders(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    if a.n() < 3 {
        return Err(Error::DegenerateOrder { n: a.n(), min: 3 });
    }
    Ok(())
}

/// Checks `B_i = σ_i A_i σ_iᵗ` for every `i` to within `tol`.
pub fn verify_hypomorphism(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    tol: f64,
) -> Result<HypomorphyCertificate> {
    check_orders(a, b)?;
    if sigma.n() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: sigma.n(),
        });
    }
    let deck_a = deck(a)?;
    let deck_b = deck(b)?;
    let mut worst_residual = 0.0_f64;
    let mut failing_index = None;
    for (i, ((ai, bi), s)) in deck_a.iter().zip(&deck_b).zip(sigma.sigmas()).enumerate() {
        let residual = perm_similarity(ai, s)?.max_abs_diff(bi);
        worst_residual = worst_residual.max(residual);
        if residual > tol && failing_index.is_none() {
            failing_index = Some(i);
        }
    }
    Ok(HypomorphyCertificate {
        valid: worst_residual <= tol,
        worst_residual,
        failing_index,
        tol,
    })
}

/// Searches for a hypomorphism with `B = Σ(A)` at [`EXACT_TOL`].
///
/// Each `σ_i` is found independently; the result is the lexicographically
/// first valid permutation per index, so it is deterministic even though the
/// indices are searched in parallel.
pub fn find_hypomorphism(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<Option<Hypomorphism>> {
    find_hypomorphism_with(a, b, EXACT_TOL, DEFAULT_SEARCH_CAP)
}

pub fn find_hypomorphism_with(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    tol: f64,
    cap: usize,
) -> Result<Option<Hypomorphism>> {
    check_orders(a, b)?;
    if a.n() > cap {
        return Err(Error::SearchTooLarge { n: a.n(), cap });
    }
    let deck_a = deck(a)?;
    let deck_b = deck(b)?;
    let found: Vec<Option<Permutation>> = deck_a
        .par_iter()
        .zip(deck_b.par_iter())
        .map(|(ai, bi)| find_similarity(ai, bi, tol))
        .collect();
    match found.into_iter().collect::<Option<Vec<_>>>() {
        Some(sigmas) => Ok(Some(Hypomorphism::new(sigmas)?)),
        None => Ok(None),
    }
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn all_close(x: &[f64], y: &[f64], tol: f64) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| close(*p, *q, tol))
}

/// Per-vertex signature: diagonal entry and sorted off-diagonal row.
fn vertex_signature(m: &SymmetricMatrix, v: usize) -> (f64, Vec<f64>) {
    let row = (0..m.n()).filter(|&k| k != v).map(|k| m.get(v, k)).collect();
    (m.get(v, v), sorted(row))
}

/// Lexicographically first permutation `σ` with `σ A σᵗ = B` within `tol`.
pub fn find_similarity(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> Option<Permutation> {
    let m = a.n();
    if b.n() != m {
        return None;
    }
    // whole-matrix invariants
    let row_sums = |x: &SymmetricMatrix| {
        sorted((0..m).map(|i| (0..m).map(|j| x.get(i, j)).sum()).collect())
    };
    if !all_close(&row_sums(a), &row_sums(b), tol * m as f64) {
        return None;
    }
    let eig_tol = EIGEN_PRUNE_TOL * a.scale().max(b.scale()) * m as f64;
    if !all_close(&eigen_sorted(a).values, &eigen_sorted(b).values, eig_tol) {
        return None;
    }

    let sig_a: Vec<_> = (0..m).map(|v| vertex_signature(a, v)).collect();
    let sig_b: Vec<_> = (0..m).map(|v| vertex_signature(b, v)).collect();
    let candidates: Vec<Vec<usize>> = sig_a
        .iter()
        .map(|(da, ra)| {
            (0..m)
                .filter(|&w| {
                    let (db, rb) = &sig_b[w];
                    close(*da, *db, tol) && all_close(ra, rb, tol)
                })
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }

    let mut image = vec![usize::MAX; m];
    let mut used = vec![false; m];
    if extend(a, b, tol, &candidates, 0, &mut image, &mut used) {
        Some(Permutation::new(image).expect("search builds a bijection"))
    } else {
        None
    }
}

fn extend(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    tol: f64,
    candidates: &[Vec<usize>],
    v: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if v == image.len() {
        return true;
    }
    for &w in &candidates[v] {
        if used[w] {
            continue;
        }
        let consistent = (0..v).all(|u| close(b.get(w, image[u]), a.get(v, u), tol));
        if !consistent {
            continue;
        }
        image[v] = w;
        used[w] = true;
        if extend(a, b, tol, candidates, v + 1, image, used) {
            return true;
        }
        used[w] = false;
    }
    image[v] = usize::MAX;
    false
}

/// A test pair `A = adj(G)`, `B = τAτᵗ` with the hypomorphism search result.
#[derive(Debug, Clone)]
pub struct GeneratedPair {
    pub a: SymmetricMatrix,
    pub b: SymmetricMatrix,
    pub sigma: Option<Hypomorphism>,
}

impl GeneratedPair {
    pub fn is_hypomorphic(&self) -> bool {
        self.sigma.is_some()
    }
}

pub fn gen_pair(graph: &Graph6Record, tau: &Permutation) -> Result<GeneratedPair> {
    if tau.degree() != graph.order() {
        return Err(Error::DimensionMismatch {
            expected: graph.order(),
            found: tau.degree(),
        });
    }
    let a = graph.adjacency_matrix()?;
    let b = perm_similarity(&a, tau)?;
    let sigma = find_hypomorphism(&a, &b)?;
    Ok(GeneratedPair { a, b, sigma })
}
