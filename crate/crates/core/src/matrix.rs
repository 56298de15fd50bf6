//! Dense symmetric matrices and the primitives everything else is built on:
//! decks, shifted determinants, sorted eigensystems, permutation similarity
//! and principal-minor multisets.
//!
//! Indices are 0-based throughout. The all-ones matrix `J` and vector `1`
//! come from [`SymmetricMatrix::ones`] and [`ones_vector`].

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative symmetry tolerance; the absolute bound is `SYM_TOL * max(1, max|a_ij|)`.
pub const SYM_TOL: f64 = 1e-10;

/// A dense real symmetric matrix of order `n >= 1`.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    data: DMatrix<f64>,
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricMatrix")
            .field("n", &self.n())
            .field("entries", &self.rows())
            .finish()
    }
}

impl SymmetricMatrix {
    /// Builds a matrix from row-major entries, rejecting asymmetric input.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DegenerateOrder { n: 0, min: 1 });
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Wraps an existing square matrix after checking symmetry and finiteness.
    pub fn from_dmatrix(data: DMatrix<f64>) -> Result<Self> {
        let n = data.nrows();
        if n == 0 {
            return Err(Error::DegenerateOrder { n: 0, min: 1 });
        }
        if data.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.ncols(),
            });
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {bad}")));
        }
        let max_abs = data.amax();
        let tol = SYM_TOL * max_abs.max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let deviation = (data[(i, j)] - data[(j, i)]).abs();
                if deviation > tol {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self { data })
    }

    /// Builds a matrix from a function of the upper triangle, mirroring it.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateOrder { n: 0, min: 1 });
        }
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self::from_dmatrix(data)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    /// The all-ones matrix `J = 1ᵗ1`.
    pub fn ones(n: usize) -> Self {
        Self {
            data: DMatrix::from_element(n, n, 1.0),
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self {
            data: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Row-major copy of the entries.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.data.row(i).iter().copied().collect())
            .collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.amax()
    }

    /// `max(1, max|a_ij|)`, the scale used by relative tolerances.
    pub fn scale(&self) -> f64 {
        self.max_abs_entry().max(1.0)
    }

    /// `A - λI + tJ`.
    pub fn shifted(&self, lambda: f64, t: f64) -> Self {
        let n = self.n();
        let mut data = self.data.add_scalar(t);
        for i in 0..n {
            data[(i, i)] -= lambda;
        }
        Self { data }
    }

    /// `A + tJ`.
    pub fn plus_ones(&self, t: f64) -> Self {
        self.shifted(0.0, t)
    }

    /// `A + λI`.
    pub fn plus_identity(&self, lambda: f64) -> Self {
        self.shifted(-lambda, 0.0)
    }

    pub fn negated(&self) -> Self {
        Self {
            data: -&self.data,
        }
    }

    /// The principal submatrix with row and column `k` removed.
    pub fn without(&self, k: usize) -> Self {
        Self {
            data: self.data.clone().remove_row(k).remove_column(k),
        }
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        SymmetricEigen::new(self.data.clone())
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Entrywise maximum of `|self - other|`.
    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        (&self.data - &other.data).amax()
    }
}

/// The all-ones vector of length `n`.
pub fn ones_vector(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0)
}

/// The list of `n` principal submatrices with row/column `i` deleted.
pub fn deck(a: &SymmetricMatrix) -> Result<Vec<SymmetricMatrix>> {
    if a.n() < 2 {
        return Err(Error::DegenerateOrder { n: a.n(), min: 2 });
    }
    Ok((0..a.n()).map(|i| a.without(i)).collect())
}

/// Determinant through partial-pivot LU. A structurally singular matrix gives 0.
pub fn determinant(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// `det(A - λI + tJ)`.
pub fn shifted_det(a: &SymmetricMatrix, lambda: f64, t: f64) -> f64 {
    determinant(a.shifted(lambda, t).as_matrix())
}

/// Full eigensystem with eigenvalues in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
}

impl EigenData {
    pub fn lowest(&self) -> f64 {
        *self.values.last().expect("eigensystem is never empty")
    }

    pub fn lowest_vector(&self) -> &DVector<f64> {
        self.vectors.last().expect("eigensystem is never empty")
    }

    /// `λ_{n-1} - λ_n`, or infinity for order 1.
    pub fn lowest_gap(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            f64::INFINITY
        } else {
            self.values[n - 2] - self.values[n - 1]
        }
    }
}

/// Sorted eigensystem of a symmetric matrix.
///
/// Each eigenvector is oriented so that its first entry of largest magnitude
/// is positive, which makes the output a deterministic function of the input.
pub fn eigen_sorted(a: &SymmetricMatrix) -> EigenData {
    let eig = SymmetricEigen::new(a.as_matrix().clone());
    let n = a.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| orient(eig.eigenvectors.column(k).into_owned()))
        .collect();
    EigenData { values, vectors }
}

/// Flips `v` so that its first largest-magnitude entry is positive.
pub fn orient(mut v: DVector<f64>) -> DVector<f64> {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = k;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
    v
}

/// A permutation of `{0, …, degree-1}`, mapping position `k` to `image[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &k in &image {
            if k >= image.len() || seen[k] {
                return Err(Error::InvalidPermutation(format!(
                    "{image:?} is not a bijection on 0..{}",
                    image.len()
                )));
            }
            seen[k] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(degree: usize) -> Self {
        Self {
            image: (0..degree).collect(),
        }
    }

    /// Transposition of `a` and `b`.
    pub fn swap(degree: usize, a: usize, b: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..degree).collect();
        if a >= degree || b >= degree {
            return Err(Error::InvalidPermutation(format!(
                "swap({a}, {b}) out of range for degree {degree}"
            )));
        }
        image.swap(a, b);
        Ok(Self { image })
    }

    /// `k ↦ k + shift (mod degree)`.
    pub fn rotation(degree: usize, shift: usize) -> Self {
        Self {
            image: (0..degree).map(|k| (k + shift) % degree.max(1)).collect(),
        }
    }

    /// `k ↦ -k (mod degree)`.
    pub fn reflection(degree: usize) -> Self {
        Self {
            image: (0..degree).map(|k| (degree - k) % degree.max(1)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, k: usize) -> usize {
        self.image[k]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (k, &v) in self.image.iter().enumerate() {
            inv[v] = k;
        }
        Self { image: inv }
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self {
            image: other.image.iter().map(|&k| self.image[k]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &v)| k == v)
    }

    /// All permutations of the given degree in lexicographic order.
    pub fn all(degree: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..degree).collect();
        let mut out = vec![Self {
            image: current.clone(),
        }];
        while next_lexicographic(&mut current) {
            out.push(Self {
                image: current.clone(),
            });
        }
        out
    }
}

fn next_lexicographic(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `τ A τᵗ`, i.e. the matrix `B` with `B[τ(i)][τ(j)] = A[i][j]`.
pub fn perm_similarity(a: &SymmetricMatrix, tau: &Permutation) -> Result<SymmetricMatrix> {
    if tau.degree() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: tau.degree(),
        });
    }
    let n = a.n();
    let mut data = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            data[(tau.apply(i), tau.apply(j))] = a.get(i, j);
        }
    }
    Ok(SymmetricMatrix { data })
}

/// Determinants of the deck, sorted ascending.
pub fn majors_multiset(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    let mut majors: Vec<f64> = deck(a)?
        .iter()
        .map(|m| determinant(m.as_matrix()))
        .collect();
    majors.sort_by(f64::total_cmp);
    Ok(majors)
}
