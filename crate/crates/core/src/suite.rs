//! Seeded batch runner for the presentation and solid-angle invariants.
//!
//! Each instance draws its own RNG from `(seed, index)`, so results do not
//! depend on scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{eigen_sorted, SymmetricMatrix};
use crate::presentation::{
    factor_presentation, good_position_report, lambda0_certified, lambda0_search,
    numerical_rank, per1_report, perturb_presentation, project_origin, t_of_lambda,
    u0_via_transpose_inverse, volume_eigenvector, Presentation,
};
use crate::solid_angle::{
    angle_fraction, cone_contains, monte_carlo_fraction, noise_band, partition_check, sub_seed,
    Cone, Method,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteTolerances {
    /// Scale-relative bound on Gram, projection and perturbation residuals.
    pub resid: f64,
    /// Scale-relative bound on eigenvalue-type residuals (`‖Aα‖`, `λ_n`).
    pub eig: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self {
            resid: 1e-9,
            eig: 1e-9,
        }
    }
}

/// Monte Carlo budget per estimate inside the suite.
pub const SUITE_SAMPLES: u64 = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantTally {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    /// Soft findings that do not fail the suite.
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub instance: usize,
    pub invariant: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySuiteReport {
    pub seed: u64,
    pub count: usize,
    pub tolerances: SuiteTolerances,
    pub invariants: Vec<InvariantTally>,
    /// First few failures, for diagnosis.
    pub failures: Vec<SuiteFailure>,
    pub pass: bool,
}

const MAX_LISTED_FAILURES: usize = 20;

enum Outcome {
    Pass,
    Fail(String),
    Flag,
}

type Findings = Vec<(&'static str, Outcome)>;

fn check(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail())
    }
}

fn record(out: &mut Findings, name: &'static str, result: Result<Outcome>) {
    out.push((
        name,
        result.unwrap_or_else(|e| Outcome::Fail(format!("error: {e}"))),
    ));
}

pub fn verify_geometry_suite(seed: u64, count: usize) -> GeometrySuiteReport {
    verify_geometry_suite_with(seed, count, &SuiteTolerances::default())
}

pub fn verify_geometry_suite_with(
    seed: u64,
    count: usize,
    tol: &SuiteTolerances,
) -> GeometrySuiteReport {
    let per_instance: Vec<Findings> = (0..count)
        .into_par_iter()
        .map(|i| run_instance(seed, i, tol))
        .collect();

    let mut invariants: Vec<InvariantTally> = Vec::new();
    let mut failures = Vec::new();
    let mut pass = count > 0;
    for (instance, findings) in per_instance.into_iter().enumerate() {
        for (name, outcome) in findings {
            let idx = match invariants.iter().position(|t| t.name == name) {
                Some(k) => k,
                None => {
                    invariants.push(InvariantTally {
                        name: name.to_string(),
                        checked: 0,
                        passed: 0,
                        flagged: 0,
                    });
                    invariants.len() - 1
                }
            };
            let tally = &mut invariants[idx];
            tally.checked += 1;
            match outcome {
                Outcome::Pass => tally.passed += 1,
                Outcome::Flag => {
                    tally.passed += 1;
                    tally.flagged += 1;
                }
                Outcome::Fail(detail) => {
                    pass = false;
                    if failures.len() < MAX_LISTED_FAILURES {
                        failures.push(SuiteFailure {
                            instance,
                            invariant: name.to_string(),
                            detail,
                        });
                    }
                }
            }
        }
    }
    GeometrySuiteReport {
        seed,
        count,
        tolerances: *tol,
        invariants,
        failures,
        pass,
    }
}

fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn gaussian_vector(rng: &mut impl Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for (k, mut col) in q.column_iter_mut().enumerate() {
        if r[(k, k)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// `A = WᵗW + shift·I` for Gaussian `W`.
pub fn random_pd(rng: &mut impl Rng, n: usize, shift: f64) -> SymmetricMatrix {
    Presentation::from_matrix(gaussian_matrix(rng, n, n))
        .gram()
        .plus_identity(shift)
}

/// `n` vectors in `ℝ^{n-1}` with `Σ α_i u_i = 0` for the given `α`.
///
/// The Gram matrix has rank `n - 1` and kernel spanned by `α`.
pub fn presentation_with_kernel(rng: &mut impl Rng, alpha: &[f64]) -> Presentation {
    let n = alpha.len();
    let mut cols: Vec<DVector<f64>> = (0..n - 1).map(|_| gaussian_vector(rng, n - 1)).collect();
    let mut last = DVector::zeros(n - 1);
    for (c, &w) in cols.iter().zip(alpha) {
        last -= c * w;
    }
    cols.push(last / alpha[n - 1]);
    Presentation::from_vectors(&cols).expect("equal dimensions")
}

/// Weights in `[0.2, 1]`, with the first one negated when `mixed`.
fn random_kernel(rng: &mut impl Rng, n: usize, mixed: bool) -> Vec<f64> {
    let mut alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    if mixed {
        alpha[0] = -alpha[0];
    }
    alpha
}

/// Good position read straight off the definition: the origin has unique,
/// strictly positive affine weights over `U`, and `U` spans `n - 1` dims.
pub fn good_position_by_definition(u: &Presentation) -> bool {
    let n = u.n();
    if numerical_rank(u.matrix()) + 1 != n {
        return false;
    }
    let m = u.matrix().clone().insert_row(u.dim(), 1.0);
    if numerical_rank(&m) != n {
        return false;
    }
    let mut rhs = DVector::zeros(u.dim() + 1);
    rhs[u.dim()] = 1.0;
    let Ok(w) = m.clone().svd(true, true).solve(&rhs, 1e-14) else {
        return false;
    };
    let residual = (&m * &w - &rhs).amax();
    residual <= 1e-8 && w.iter().all(|&x| x > 0.0)
}

fn run_instance(seed: u64, index: usize, tol: &SuiteTolerances) -> Findings {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, index as u64));
    let n = rng.random_range(3..=8usize);
    let mut out = Findings::new();
    presentation_invariants(&mut rng, n, index, tol, &mut out);
    solid_angle_invariants(&mut rng, index, &mut out);
    out
}

fn presentation_invariants(
    rng: &mut ChaCha8Rng,
    n: usize,
    index: usize,
    tol: &SuiteTolerances,
    out: &mut Findings,
) {
    // factor residual on a random Gram matrix
    let a = Presentation::from_matrix(gaussian_matrix(rng, n, n)).gram();
    record(out, "factor_residual", (|| {
        let err = factor_presentation(&a)?.gram().max_abs_diff(&a);
        Ok(check(err <= tol.resid * a.scale(), || format!("residual {err:e}")))
    })());

    // rank n-1 instances, alternately with positive and mixed-sign kernels
    let mixed = index % 2 == 1;
    let alpha = random_kernel(rng, n, mixed);
    let base = presentation_with_kernel(rng, &alpha);
    let g = base.gram();
    record(out, "lemma1_equivalence", (|| {
        let report = good_position_report(&g)?;
        let direct = good_position_by_definition(&factor_presentation(&g)?);
        Ok(check(report.is_good == direct && direct == !mixed, || {
            format!("report {} definition {} mixed {mixed}", report.is_good, direct)
        }))
    })());
    if !mixed {
        record(out, "lemma2_volume_kernel", (|| {
            let vol = volume_eigenvector(&base)?;
            let residual = (g.as_matrix() * &vol).amax();
            let expected = DVector::from_column_slice(&alpha) / alpha.iter().sum::<f64>();
            let drift = (&vol - expected).amax();
            Ok(check(
                residual <= tol.eig * g.scale() && vol.min() > 0.0 && drift <= 1e-8,
                || format!("‖Aα‖ {residual:e}, min {:e}, drift {drift:e}", vol.min()),
            ))
        })());
    }

    // projection of the origin and the J-perturbation on a PD instance
    let a = random_pd(rng, n, 0.25);
    let scale = a.scale();
    let u = match factor_presentation(&a) {
        Ok(u) => u,
        Err(e) => {
            out.push(("u0_residual", Outcome::Fail(format!("error: {e}"))));
            return;
        }
    };
    record(out, "u0_residual", (|| {
        let path = project_origin(&u)?;
        let worst = u
            .vectors()
            .iter()
            .map(|ui| path.u0.dot(&(ui - &path.u0)).abs())
            .fold(0.0, f64::max);
        let norm_gap = (path.u0.norm_squared() - path.u0_norm_sq).abs();
        Ok(check(
            worst <= tol.resid * scale && norm_gap <= tol.resid * scale,
            || format!("(u0, ui - u0) up to {worst:e}, norm gap {norm_gap:e}"),
        ))
    })());
    record(out, "u0_two_routes", (|| {
        let path = project_origin(&u)?;
        let alt = u0_via_transpose_inverse(&u)?;
        let gap = (&path.u0 - alt).amax();
        Ok(check(gap <= 0.1 * tol.resid * scale, || format!("routes differ by {gap:e}")))
    })());
    record(out, "perturbation_gram", (|| {
        let norm_sq = project_origin(&u)?.u0_norm_sq;
        let mut worst = 0.0_f64;
        for s in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            let expected = a.plus_ones((s * s - 2.0 * s) * norm_sq);
            worst = worst.max(perturb_presentation(&u, s)?.gram().max_abs_diff(&expected));
        }
        Ok(check(worst <= tol.resid * scale, || format!("Gram law off by {worst:e}")))
    })());
    record(out, "pd_boundary", (|| {
        let norm_sq = project_origin(&u)?.u0_norm_sq;
        let above = eigen_sorted(&a.plus_ones(-norm_sq + 1e-4 * norm_sq)).lowest();
        let at = eigen_sorted(&a.plus_ones(-norm_sq)).lowest();
        Ok(check(above > 0.0 && at <= 10.0 * tol.eig * scale, || {
            format!("λ_n above {above:e}, at boundary {at:e}")
        }))
    })());
    record(out, "t_of_lambda_projection", (|| {
        let lambda = rng.random_range(0.1..3.0);
        let t = t_of_lambda(&a, lambda)?;
        let other = -project_origin(&factor_presentation(&a.plus_identity(lambda))?)?.u0_norm_sq;
        let gap = (t - other).abs();
        Ok(check(t < 0.0 && gap <= 0.1 * tol.resid * t.abs().max(1.0), || {
            format!("t {t} vs -‖u0‖² {other}")
        }))
    })());
    record(out, "t_of_lambda_monotone", (|| {
        let grid = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
        let ts = grid
            .iter()
            .map(|&l| t_of_lambda(&a, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(check(ts.windows(2).all(|w| w[1] < w[0]), || format!("{ts:?}")))
    })());
    let indefinite = SymmetricMatrix::from_dmatrix({
        let w = gaussian_matrix(rng, n, n);
        (&w + w.transpose()) * 0.5
    });
    record(out, "t_of_lambda_monotone_indefinite", (|| {
        let m = indefinite?;
        let start = m.operator_norm() + 0.5;
        let ts = (0..7)
            .map(|k| t_of_lambda(&m, start * 2f64.powi(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(if ts.windows(2).all(|w| w[1] < w[0]) {
            Outcome::Pass
        } else {
            Outcome::Flag
        })
    })());
    record(out, "lambda0_certified", (|| {
        let m = SymmetricMatrix::from_dmatrix({
            let w = gaussian_matrix(rng, n, n);
            (&w + w.transpose()) * 0.5
        })?;
        let l0 = lambda0_search(&m);
        Ok(check(lambda0_certified(&m, l0), || format!("λ0 = {l0}")))
    })());
    record(out, "per1_equivalence", (|| {
        let m = random_pd(rng, n, 0.05);
        let r = per1_report(&m)?;
        let boundary = good_position_report(&m.plus_ones(t_of_lambda(&m, 0.0)?))?;
        Ok(check(r.cond2 == r.cond3 && boundary.is_good == r.cond3, || {
            format!("cond2 {} cond3 {} s=1 good {}", r.cond2, r.cond3, boundary.is_good)
        }))
    })());
}

fn origin_cone(gens: &DMatrix<f64>, ambient: Option<usize>) -> Result<Cone> {
    Cone::new(
        DVector::zeros(gens.nrows()),
        gens.column_iter().map(|c| c.into_owned()).collect(),
        ambient,
    )
}

fn solid_angle_invariants(rng: &mut ChaCha8Rng, index: usize, out: &mut Findings) {
    let seed = rng.random::<u64>();
    let d = 2 + index % 2;

    let gens = gaussian_matrix(rng, d, d);
    record(out, "cone_contains", (|| {
        let cone = origin_cone(&gens, None)?;
        let coef = DVector::from_fn(d, |_, _| rng.random_range(0.1..1.0));
        let inside = &gens * &coef;
        let mut flipped = coef.clone();
        flipped[0] = -flipped[0];
        let outside = &gens * flipped;
        Ok(check(
            cone_contains(&cone, &inside)? && !cone_contains(&cone, &outside)?,
            || "membership wrong".into(),
        ))
    })());
    record(out, "congruence_invariance", (|| {
        let cone = origin_cone(&gens, None)?;
        let q = random_orthogonal(rng, d);
        let before = angle_fraction(&cone, 1, seed)?.fraction;
        let after = angle_fraction(&cone.transformed(&q), 1, seed)?.fraction;
        Ok(check((before - after).abs() <= 1e-12, || format!("{before} vs {after}")))
    })());
    record(out, "exact_vs_monte_carlo", (|| {
        let cone = origin_cone(&gens, None)?;
        let exact = angle_fraction(&cone, 1, seed)?;
        let mc = monte_carlo_fraction(&cone, SUITE_SAMPLES, seed)?;
        let band = noise_band([&exact, &mc]);
        Ok(check(
            matches!(exact.method, Method::Exact2D | Method::Exact3D)
                && (exact.fraction - mc.fraction).abs() <= band,
            || format!("exact {} mc {} ± {}", exact.fraction, mc.fraction, mc.std_error),
        ))
    })());
    record(out, "half_ball_bound", (|| {
        let cone = origin_cone(&gens, None)?;
        let exact = angle_fraction(&cone, 1, seed)?.fraction;
        let high = origin_cone(&gaussian_matrix(rng, 4, 4), None)?;
        // cones close to half the ball need more samples to clear 4σ
        let mut mc = angle_fraction(&high, SUITE_SAMPLES, seed)?;
        for (k, boost) in [16, 256].into_iter().enumerate() {
            if 0.5 - mc.fraction > 4.0 * mc.std_error {
                break;
            }
            mc = angle_fraction(&high, boost * SUITE_SAMPLES, sub_seed(seed, k as u64 + 1))?;
        }
        Ok(check(exact < 0.5 && mc.fraction <= 0.5 - 4.0 * mc.std_error, || {
            format!("exact {exact}, d=4 {} ± {}", mc.fraction, mc.std_error)
        }))
    })());
    record(out, "zero_law", (|| {
        let flat = origin_cone(&gaussian_matrix(rng, 3, 2), Some(3))?;
        let est = angle_fraction(&flat, SUITE_SAMPLES, seed)?;
        Ok(check(est.fraction == 0.0, || format!("fraction {}", est.fraction)))
    })());
    record(out, "determinism", (|| {
        let cone = origin_cone(&gaussian_matrix(rng, 4, 4), None)?;
        let first = angle_fraction(&cone, 5_000, seed)?;
        let second = angle_fraction(&cone, 5_000, seed)?;
        Ok(check(first == second, || "estimates differ".into()))
    })());
    record(out, "partition_exact", (|| {
        let m = 3 + index % 2;
        let alpha = random_kernel(rng, m, false);
        let u = presentation_with_kernel(rng, &alpha);
        let report = partition_check(&u, 1, seed)?;
        Ok(check(
            report.ok && (report.sum_fraction - 1.0).abs() <= 1e-9,
            || format!("sum {}", report.sum_fraction),
        ))
    })());
}
