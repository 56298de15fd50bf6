//! Presentations `U` of positive semidefinite matrices (`UᵗU = A`), good
//! position, the projection `u₀` of the origin onto `aff U`, and the
//! J-perturbation family `A + tJ` it induces.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{determinant, eigen_sorted, ones_vector, SymmetricMatrix};

/// Relative PSD / PD threshold: `TOL_REL * max(1, max|a_ij|)`.
pub const TOL_REL: f64 = 1e-10;

/// Singular values below `RANK_REL * σ_max` count as zero.
pub const RANK_REL: f64 = 1e-10;

/// Minimum entry of `(A + λI)⁻¹1` required by the λ₀ certificate.
pub const POS_MARGIN: f64 = 1e-12;

fn psd_tol(a: &SymmetricMatrix) -> f64 {
    TOL_REL * a.scale()
}

/// An ordered set of column vectors; column `i` is `u_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    columns: DMatrix<f64>,
}

impl Presentation {
    pub fn from_matrix(columns: DMatrix<f64>) -> Self {
        Self { columns }
    }

    /// Builds a presentation from a list of vectors of equal length.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = cols.first() else {
            return Err(Error::InvalidInput("presentation needs at least one vector".into()));
        };
        let dim = first.len();
        if let Some(bad) = cols.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self {
            columns: DMatrix::from_fn(dim, cols.len(), |r, c| cols[c][r]),
        })
    }

    pub fn from_vectors(cols: &[DVector<f64>]) -> Result<Self> {
        let raw: Vec<Vec<f64>> = cols.iter().map(|c| c.iter().copied().collect()).collect();
        Self::from_columns(&raw)
    }

    /// Number of vectors.
    pub fn n(&self) -> usize {
        self.columns.ncols()
    }

    /// Dimension of the space the vectors live in.
    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.columns.column(i).into_owned()
    }

    pub fn vectors(&self) -> Vec<DVector<f64>> {
        (0..self.n()).map(|i| self.vector(i)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.columns.column(i).iter().copied().collect())
            .collect()
    }

    /// `UᵗU`, built from pairwise dot products so it is exactly symmetric.
    pub fn gram(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_upper_fn(self.n(), |i, j| {
            self.columns.column(i).dot(&self.columns.column(j))
        })
        .expect("Gram matrices are symmetric")
    }

    /// The presentation with vector `i` removed.
    pub fn without(&self, i: usize) -> Presentation {
        Self {
            columns: self.columns.clone().remove_column(i),
        }
    }

    /// Applies `x ↦ Qx` to every vector.
    pub fn transformed(&self, q: &DMatrix<f64>) -> Presentation {
        Self {
            columns: q * &self.columns,
        }
    }
}

/// `U = Λ^{1/2} Qᵗ` from `A = QΛQᵗ`. Eigenvalues with `|λ| ≤ psdTol` are
/// treated as zero so rounding noise does not add a spurious dimension.
pub fn factor_presentation(a: &SymmetricMatrix) -> Result<Presentation> {
    let eig = eigen_sorted(a);
    let lowest = eig.lowest();
    if lowest < -psd_tol(a) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: lowest,
        });
    }
    let n = a.n();
    let floor = psd_tol(a);
    let mut u = DMatrix::zeros(n, n);
    for (k, (value, vector)) in eig.values.iter().zip(&eig.vectors).enumerate() {
        let root = if *value <= floor { 0.0 } else { value.sqrt() };
        for c in 0..n {
            u[(k, c)] = root * vector[c];
        }
    }
    Ok(Presentation { columns: u })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositionVerdict {
    RankNotNMinus1,
    KernelSignMixed,
    Good,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodPositionReport {
    pub rank: usize,
    /// Kernel vector with unit 1-norm, oriented to have positive sum.
    pub kernel_vector: Option<Vec<f64>>,
    pub is_good: bool,
    pub reason: PositionVerdict,
}

/// Numerical rank from singular values with threshold `RANK_REL * σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_REL * top).count()
}

/// Certifies good position through the rank / positive-kernel criterion.
pub fn good_position_report(a: &SymmetricMatrix) -> Result<GoodPositionReport> {
    let eig = eigen_sorted(a);
    if eig.lowest() < -psd_tol(a) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: eig.lowest(),
        });
    }
    let n = a.n();
    // singular values of a symmetric matrix are |eigenvalues|
    let top = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rank = eig
        .values
        .iter()
        .filter(|v| top > 0.0 && v.abs() > RANK_REL * top)
        .count();
    if rank + 1 != n {
        return Ok(GoodPositionReport {
            rank,
            kernel_vector: None,
            is_good: false,
            reason: PositionVerdict::RankNotNMinus1,
        });
    }
    let mut alpha = eig.lowest_vector().clone();
    if alpha.sum() < 0.0 {
        alpha.neg_mut();
    }
    let norm1: f64 = alpha.iter().map(|x| x.abs()).sum();
    alpha /= norm1;
    let positive = alpha.iter().all(|&x| x > 0.0);
    Ok(GoodPositionReport {
        rank,
        kernel_vector: Some(alpha.iter().copied().collect()),
        is_good: positive,
        reason: if positive {
            PositionVerdict::Good
        } else {
            PositionVerdict::KernelSignMixed
        },
    })
}

/// Orthonormal basis (as columns) of the span of the columns of `m`.
pub fn span_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let rank = numerical_rank(m);
    if rank == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    // nalgebra does not promise sorted singular values
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    DMatrix::from_columns(&order[..rank].iter().map(|&k| u.column(k)).collect::<Vec<_>>())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `α_i = vol conv{0, u_1, …, û_i, …, u_n}`, normalized to unit sum.
pub fn volume_eigenvector(u: &Presentation) -> Result<DVector<f64>> {
    let report = good_position_report(&u.gram())?;
    if !report.is_good {
        return Err(Error::BadPosition(format!("{:?} (rank {})", report.reason, report.rank)));
    }
    let n = u.n();
    let basis = span_basis(u.matrix());
    if basis.ncols() != n - 1 {
        return Err(Error::BadPosition(format!(
            "span has dimension {} instead of {}",
            basis.ncols(),
            n - 1
        )));
    }
    let coords = basis.transpose() * u.matrix();
    let simplex = factorial(n - 1);
    let mut alpha = DVector::from_fn(n, |i, _| {
        determinant(&coords.clone().remove_column(i)).abs() / simplex
    });
    let total = alpha.sum();
    alpha /= total;
    Ok(alpha)
}

/// `u₀` and the J-coefficient `t = (s² - 2s)‖u₀‖²` at path parameter `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationPath {
    pub u0: DVector<f64>,
    pub u0_norm_sq: f64,
    pub s: f64,
    pub t: f64,
}

impl PerturbationPath {
    /// Same `u₀`, moved to parameter `s`.
    pub fn at(&self, s: f64) -> Self {
        Self {
            u0: self.u0.clone(),
            u0_norm_sq: self.u0_norm_sq,
            s,
            t: (s * s - 2.0 * s) * self.u0_norm_sq,
        }
    }
}

fn require_pd(a: &SymmetricMatrix) -> Result<Cholesky<f64, Dyn>> {
    let lowest = eigen_sorted(a).lowest();
    if lowest <= psd_tol(a) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lowest,
        });
    }
    Cholesky::new(a.as_matrix().clone()).ok_or(Error::NotPositiveDefinite {
        min_eigenvalue: lowest,
    })
}

/// `A⁻¹1` for positive definite `A`.
pub fn inverse_ones(a: &SymmetricMatrix) -> Result<DVector<f64>> {
    Ok(require_pd(a)?.solve(&ones_vector(a.n())))
}

/// Orthogonal projection of the origin onto `aff U`:
/// `u₀ = U A⁻¹1 / (1ᵗA⁻¹1)`, `‖u₀‖² = 1 / (1ᵗA⁻¹1)`.
pub fn project_origin(u: &Presentation) -> Result<PerturbationPath> {
    let x = inverse_ones(&u.gram())?;
    let u0_norm_sq = 1.0 / x.sum();
    let u0 = u.matrix() * x * u0_norm_sq;
    Ok(PerturbationPath {
        u0,
        u0_norm_sq,
        s: 0.0,
        t: 0.0,
    })
}

/// The alternative closed form `u₀ = ‖u₀‖² (Uᵗ)⁻¹1`, for square `U`.
pub fn u0_via_transpose_inverse(u: &Presentation) -> Result<DVector<f64>> {
    if u.dim() != u.n() {
        return Err(Error::DimensionMismatch {
            expected: u.n(),
            found: u.dim(),
        });
    }
    let a = u.gram();
    let norm_sq = 1.0 / inverse_ones(&a)?.sum();
    let y = u
        .matrix()
        .transpose()
        .lu()
        .solve(&ones_vector(u.n()))
        .ok_or(Error::NotPositiveDefinite { min_eigenvalue: 0.0 })?;
    Ok(y * norm_sq)
}

/// `{u_i - s u₀}`, a presentation of `A + (s² - 2s)‖u₀‖² J`.
pub fn perturb_presentation(u: &Presentation, s: f64) -> Result<Presentation> {
    let path = project_origin(u)?;
    let mut cols = u.matrix().clone();
    for mut c in cols.column_iter_mut() {
        c.axpy(-s, &path.u0, 1.0);
    }
    Ok(Presentation { columns: cols })
}

/// `t(λ) = -1 / (1ᵗ(A + λI)⁻¹1)`.
pub fn t_of_lambda(a: &SymmetricMatrix, lambda: f64) -> Result<f64> {
    Ok(-1.0 / inverse_ones(&a.plus_identity(lambda))?.sum())
}

/// Smallest entry of `(A + λI)⁻¹1`, or `None` when `A + λI` is not PD.
pub fn positivity_margin(a: &SymmetricMatrix, lambda: f64) -> Option<f64> {
    inverse_ones(&a.plus_identity(lambda)).ok().map(|x| x.min())
}

fn positive_at(a: &SymmetricMatrix, lambda: f64) -> bool {
    positivity_margin(a, lambda).is_some_and(|m| m >= POS_MARGIN)
}

/// Positivity at `λ`, `2λ` and `10λ`.
pub fn lambda0_certified(a: &SymmetricMatrix, lambda: f64) -> bool {
    [1.0, 2.0, 10.0].iter().all(|k| positive_at(a, k * lambda))
}

const MAX_DOUBLINGS: usize = 128;
const BISECTION_STEPS: usize = 40;

/// A λ₀ with `(A + λI)⁻¹1` strictly positive for the sampled `λ ≥ λ₀`.
///
/// Starts at `‖A‖ + 1`, doubles until the certificate holds, then bisects
/// back toward the last failing value. Not minimal.
pub fn lambda0_search(a: &SymmetricMatrix) -> f64 {
    let mut hi = a.operator_norm() + 1.0;
    let mut lo = None;
    for _ in 0..MAX_DOUBLINGS {
        if lambda0_certified(a, hi) {
            break;
        }
        lo = Some(hi);
        hi *= 2.0;
    }
    if let Some(mut lo) = lo {
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let between = (1..4).all(|k| positive_at(a, mid + (hi - mid) * k as f64 / 4.0));
            if between && lambda0_certified(a, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    hi
}

/// Both sides of the interior-projection criterion, computed separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Per1Report {
    /// `u₀` has strictly positive barycentric weights over `U`.
    pub cond2: bool,
    /// `A⁻¹1` is strictly positive.
    pub cond3: bool,
    pub inverse_ones: Vec<f64>,
    pub barycentric_weights: Vec<f64>,
}

pub fn per1_report(a: &SymmetricMatrix) -> Result<Per1Report> {
    let x = inverse_ones(a)?;
    let u = factor_presentation(a)?;
    let path = project_origin(&u)?;
    let w = u
        .matrix()
        .clone()
        .lu()
        .solve(&path.u0)
        .ok_or(Error::NotPositiveDefinite { min_eigenvalue: 0.0 })?;
    let affine = (w.sum() - 1.0).abs() <= 1e-9;
    Ok(Per1Report {
        cond2: affine && w.iter().all(|&v| v > 0.0),
        cond3: x.iter().all(|&v| v > 0.0),
        inverse_ones: x.iter().copied().collect(),
        barycentric_weights: w.iter().copied().collect(),
    })
}
