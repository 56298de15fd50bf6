//! End-to-end numerical checks of the determinant identities and the
//! lowest-eigenspace theorem on hypomorphic pairs.
//!
//! Every verifier first re-checks the hypomorphism itself and refuses to run
//! when it fails, unless [`Gate::force`] is set (used for negative controls).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypomorphism::{verify_hypomorphism, HypomorphyCertificate, Hypomorphism, EXACT_TOL};
use crate::matrix::{eigen_sorted, shifted_det, SymmetricMatrix};
use crate::presentation::{
    factor_presentation, good_position_report, inverse_ones, lambda0_search, t_of_lambda,
    volume_eigenvector,
};

/// Relative tolerance for determinant identities over a grid.
pub const DET_TOL: f64 = 1e-8;
/// Absolute tolerance for `|t_A - t_B|` (scaled by `max(1, |t_A|)`).
pub const T_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    /// Tolerance passed to [`verify_hypomorphism`].
    pub tol: f64,
    /// Run the check even when the hypomorphism does not verify.
    pub force: bool,
}

impl Default for Gate {
    fn default() -> Self {
        Self {
            tol: EXACT_TOL,
            force: false,
        }
    }
}

impl Gate {
    pub fn forced() -> Self {
        Self {
            force: true,
            ..Self::default()
        }
    }

    fn check(
        &self,
        a: &SymmetricMatrix,
        b: &SymmetricMatrix,
        sigma: &Hypomorphism,
    ) -> Result<HypomorphyCertificate> {
        let cert = verify_hypomorphism(a, b, sigma, self.tol)?;
        if !cert.valid && !self.force {
            return Err(Error::NotHypomorphic {
                index: cert.failing_index,
                residual: cert.worst_residual,
            });
        }
        Ok(cert)
    }
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Nine evenly spaced points on `[-4, 4]`.
pub fn default_grid() -> Vec<f64> {
    linspace(-4.0, 4.0, 9)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetPoint {
    pub lambda: f64,
    pub t: f64,
    pub det_a: f64,
    pub det_b: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TutteReport {
    pub grid: Vec<DetPoint>,
    pub max_abs_diff: f64,
    /// Largest `|det|` encountered.
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
    pub hypomorphism: HypomorphyCertificate,
}

fn det_grid(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    lambdas: &[f64],
    ts: &[f64],
) -> Vec<DetPoint> {
    let pairs: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| lambdas.iter().map(move |&l| (l, t)))
        .collect();
    pairs
        .par_iter()
        .map(|&(lambda, t)| {
            let det_a = shifted_det(a, lambda, t);
            let det_b = shifted_det(b, lambda, t);
            DetPoint {
                lambda,
                t,
                det_a,
                det_b,
                diff: det_a - det_b,
            }
        })
        .collect()
}

fn det_scale(points: &[DetPoint]) -> f64 {
    points
        .iter()
        .fold(0.0_f64, |m, p| m.max(p.det_a.abs()).max(p.det_b.abs()))
}

/// `det(B - λI + tJ) = det(A - λI + tJ)` on a `(λ, t)` grid.
pub fn verify_tutte(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    lambdas: &[f64],
    ts: &[f64],
    gate: &Gate,
) -> Result<TutteReport> {
    verify_tutte_with(a, b, sigma, lambdas, ts, gate, DET_TOL)
}

pub fn verify_tutte_with(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    lambdas: &[f64],
    ts: &[f64],
    gate: &Gate,
    tol: f64,
) -> Result<TutteReport> {
    let hypomorphism = gate.check(a, b, sigma)?;
    let grid = det_grid(a, b, lambdas, ts);
    let max_abs_diff = grid.iter().fold(0.0_f64, |m, p| m.max(p.diff.abs()));
    let scale = det_scale(&grid);
    Ok(TutteReport {
        pass: max_abs_diff <= tol * scale.max(1.0),
        grid,
        max_abs_diff,
        scale,
        tol,
        hypomorphism,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eq1Point {
    pub lambda: f64,
    pub t: f64,
    /// `det(A + tJ - λI) - det(B + tJ - λI)`
    pub f: f64,
    /// The same difference at `λ = 0`.
    pub f_at_zero: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eq1Report {
    pub points: Vec<Eq1Point>,
    pub max_residual: f64,
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
    pub hypomorphism: HypomorphyCertificate,
}

/// At fixed `t`, the determinant difference of the shifted pair does not
/// depend on `λ` because the two decks have equal majors.
pub fn verify_eq1(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    lambdas: &[f64],
    ts: &[f64],
    gate: &Gate,
) -> Result<Eq1Report> {
    verify_eq1_with(a, b, sigma, lambdas, ts, gate, DET_TOL)
}

pub fn verify_eq1_with(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    lambdas: &[f64],
    ts: &[f64],
    gate: &Gate,
    tol: f64,
) -> Result<Eq1Report> {
    let hypomorphism = gate.check(a, b, sigma)?;
    let grid = det_grid(a, b, lambdas, ts);
    let anchors = det_grid(a, b, &[0.0], ts);
    let scale = det_scale(&grid).max(det_scale(&anchors));
    let points: Vec<Eq1Point> = grid
        .iter()
        .map(|p| {
            let anchor = anchors
                .iter()
                .find(|q| q.t == p.t)
                .expect("one anchor per t");
            Eq1Point {
                lambda: p.lambda,
                t: p.t,
                f: p.diff,
                f_at_zero: anchor.diff,
                residual: (p.diff - anchor.diff).abs(),
            }
        })
        .collect();
    let max_residual = points.iter().fold(0.0_f64, |m, p| m.max(p.residual));
    Ok(Eq1Report {
        pass: max_residual <= tol * scale.max(1.0),
        points,
        max_residual,
        scale,
        tol,
        hypomorphism,
    })
}

/// `|cos ∠(x, y)|`.
pub fn abs_cosine(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
    let nx: f64 = x.iter().map(|p| p * p).sum::<f64>().sqrt();
    let ny: f64 = y.iter().map(|p| p * p).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        0.0
    } else {
        (dot / (nx * ny)).abs()
    }
}

/// Relative alignment tolerance for eigenvectors: `|cos| ≥ 1 - ALIGN_TOL`.
pub const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Main2Report {
    pub kernel_a: Vec<f64>,
    pub kernel_b: Vec<f64>,
    pub alignment: f64,
    /// Volume vector of a presentation of `A`.
    pub volume_vector_a: Vec<f64>,
    /// `|cos|` between `kernel_a` and `volume_vector_a`.
    pub volume_alignment: f64,
    pub align_tol: f64,
    pub pass: bool,
    pub hypomorphism: HypomorphyCertificate,
}

/// Hypomorphic matrices in good position share their kernel.
pub fn verify_main2(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    gate: &Gate,
) -> Result<Main2Report> {
    let hypomorphism = gate.check(a, b, sigma)?;
    let kernel = |m: &SymmetricMatrix, name: &str| -> Result<Vec<f64>> {
        let report = good_position_report(m)?;
        match (report.is_good, report.kernel_vector) {
            (true, Some(k)) => Ok(k),
            _ => Err(Error::BadPosition(format!(
                "{name}: {:?} (rank {})",
                report.reason, report.rank
            ))),
        }
    };
    let kernel_a = kernel(a, "A")?;
    let kernel_b = kernel(b, "B")?;
    let volume = volume_eigenvector(&factor_presentation(a)?)?;
    let volume_vector_a: Vec<f64> = volume.iter().copied().collect();
    let alignment = abs_cosine(&kernel_a, &kernel_b);
    let volume_alignment = abs_cosine(&kernel_a, &volume_vector_a);
    Ok(Main2Report {
        pass: alignment >= 1.0 - ALIGN_TOL && volume_alignment >= 1.0 - ALIGN_TOL,
        kernel_a,
        kernel_b,
        alignment,
        volume_vector_a,
        volume_alignment,
        align_tol: ALIGN_TOL,
        hypomorphism,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TAgreementReport {
    pub lambda: f64,
    pub lambda0_a: f64,
    pub lambda0_b: f64,
    pub t_a: f64,
    pub t_b: f64,
    /// `1ᵗ(A + λI)⁻¹1`
    pub inverse_sum_a: f64,
    pub inverse_sum_b: f64,
    pub abs_diff: f64,
    pub tol: f64,
    /// `A + λI + t_A J` is in good position.
    pub good_position_a: bool,
    pub good_position_b: bool,
    pub pass: bool,
    pub hypomorphism: HypomorphyCertificate,
}

/// The unique `t` putting `A + λI + tJ` in good position is the same for
/// both members of a hypomorphic pair.
pub fn verify_main1_t_agreement(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    lambda: f64,
    gate: &Gate,
) -> Result<TAgreementReport> {
    let hypomorphism = gate.check(a, b, sigma)?;
    let lambda0_a = lambda0_search(a);
    let lambda0_b = lambda0_search(b);
    let lambda0 = lambda0_a.max(lambda0_b);
    if lambda < lambda0 {
        return Err(Error::LambdaTooSmall { lambda, lambda0 });
    }
    let inverse_sum_a = inverse_ones(&a.plus_identity(lambda))?.sum();
    let inverse_sum_b = inverse_ones(&b.plus_identity(lambda))?.sum();
    let t_a = t_of_lambda(a, lambda)?;
    let t_b = t_of_lambda(b, lambda)?;
    let abs_diff = (t_a - t_b).abs();
    let good = |m: &SymmetricMatrix, t: f64| {
        good_position_report(&m.shifted(-lambda, t)).is_ok_and(|r| r.is_good)
    };
    Ok(TAgreementReport {
        lambda,
        lambda0_a,
        lambda0_b,
        t_a,
        t_b,
        inverse_sum_a,
        inverse_sum_b,
        abs_diff,
        tol: T_TOL,
        good_position_a: good(a, t_a),
        good_position_b: good(b, t_b),
        pass: abs_diff <= T_TOL * t_a.abs().max(1.0),
        hypomorphism,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTolerances {
    /// `|λ_n(A+tJ) - λ_n(B+tJ)| ≤ eig_rel * scale`
    pub eig_rel: f64,
    /// `λ_{n-1} - λ_n > gap_rel * scale` on both sides
    pub gap_rel: f64,
    /// `|cos| ≥ 1 - align`
    pub align: f64,
}

impl Default for MainTolerances {
    fn default() -> Self {
        Self {
            eig_rel: 1e-9,
            gap_rel: 1e-8,
            align: ALIGN_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainSample {
    pub t: f64,
    pub lambda_n_a: f64,
    pub lambda_n_b: f64,
    pub eigengap_a: f64,
    pub eigengap_b: f64,
    pub eigvec_alignment: f64,
    /// `max(1, max |eigenvalue|)` over both matrices.
    pub scale: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MainStatus {
    Pass,
    Fail,
    /// The image of `t(λ)` was narrower than the resolution floor even
    /// after widening the λ range.
    IntervalCollapsed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainTheoremReport {
    pub lambda0: f64,
    pub lambda_grid: Vec<f64>,
    /// `t(λ)` on `lambda_grid`; diagnostics for the interval construction.
    pub t_of_lambda: Vec<f64>,
    pub t_interval: (f64, f64),
    pub samples: Vec<MainSample>,
    pub tolerances: MainTolerances,
    pub status: MainStatus,
    pub pass: bool,
    pub hypomorphism: HypomorphyCertificate,
}

const LAMBDA_GRID_POINTS: usize = 16;
const INTERVAL_FLOOR: f64 = 1e-12;
const MAX_WIDENINGS: usize = 4;

/// 16 geometrically spaced points on `[lo, hi]`, `0 < lo < hi`.
pub fn geometric_grid(lo: f64, hi: f64) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (LAMBDA_GRID_POINTS - 1) as f64);
    (0..LAMBDA_GRID_POINTS)
        .map(|k| lo * ratio.powi(k as i32))
        .collect()
}

/// For `t` in the image of `t(λ)` on `λ ≥ λ₀`, the lowest eigenvalues and
/// eigenvectors of `A + tJ` and `B + tJ` coincide and are simple.
pub fn verify_main_theorem(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    n_t_samples: usize,
    gate: &Gate,
) -> Result<MainTheoremReport> {
    verify_main_theorem_with(a, b, sigma, n_t_samples, gate, &MainTolerances::default())
}

pub fn verify_main_theorem_with(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    n_t_samples: usize,
    gate: &Gate,
    tol: &MainTolerances,
) -> Result<MainTheoremReport> {
    let hypomorphism = gate.check(a, b, sigma)?;
    let lambda0 = lambda0_search(a).max(lambda0_search(b));

    let mut hi = 4.0 * lambda0 + 1.0;
    let mut lambda_grid = geometric_grid(lambda0, hi);
    let mut ts = lambda_grid
        .iter()
        .map(|&l| t_of_lambda(a, l))
        .collect::<Result<Vec<_>>>()?;
    let mut widenings = 0;
    let interval = |ts: &[f64]| {
        let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    while {
        let (lo, hi) = interval(&ts);
        hi - lo < INTERVAL_FLOOR
    } && widenings < MAX_WIDENINGS
    {
        hi *= 16.0;
        lambda_grid = geometric_grid(lambda0, hi);
        ts = lambda_grid
            .iter()
            .map(|&l| t_of_lambda(a, l))
            .collect::<Result<Vec<_>>>()?;
        widenings += 1;
    }
    let t_interval = interval(&ts);
    if t_interval.1 - t_interval.0 < INTERVAL_FLOOR {
        return Ok(MainTheoremReport {
            lambda0,
            lambda_grid,
            t_of_lambda: ts,
            t_interval,
            samples: vec![],
            tolerances: *tol,
            status: MainStatus::IntervalCollapsed,
            pass: false,
            hypomorphism,
        });
    }

    let (lo, width) = (t_interval.0, t_interval.1 - t_interval.0);
    let sample_ts: Vec<f64> = (0..n_t_samples)
        .map(|k| lo + width * (k + 1) as f64 / (n_t_samples + 1) as f64)
        .collect();
    let samples: Vec<MainSample> = sample_ts
        .par_iter()
        .map(|&t| lowest_eigen_sample(a, b, t, tol))
        .collect();
    let pass = !samples.is_empty() && samples.iter().all(|s| s.ok);
    Ok(MainTheoremReport {
        lambda0,
        lambda_grid,
        t_of_lambda: ts,
        t_interval,
        samples,
        tolerances: *tol,
        status: if pass { MainStatus::Pass } else { MainStatus::Fail },
        pass,
        hypomorphism,
    })
}

fn lowest_eigen_sample(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    t: f64,
    tol: &MainTolerances,
) -> MainSample {
    let ea = eigen_sorted(&a.plus_ones(t));
    let eb = eigen_sorted(&b.plus_ones(t));
    let scale = ea
        .values
        .iter()
        .chain(&eb.values)
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    let alignment = abs_cosine(ea.lowest_vector().as_slice(), eb.lowest_vector().as_slice());
    let (gap_a, gap_b) = (ea.lowest_gap(), eb.lowest_gap());
    let ok = (ea.lowest() - eb.lowest()).abs() <= tol.eig_rel * scale
        && gap_a > tol.gap_rel * scale
        && gap_b > tol.gap_rel * scale
        && alignment >= 1.0 - tol.align;
    MainSample {
        t,
        lambda_n_a: ea.lowest(),
        lambda_n_b: eb.lowest(),
        eigengap_a: gap_a,
        eigengap_b: gap_b,
        eigvec_alignment: alignment,
        scale,
        ok,
    }
}

/// Experimental mirror for the highest eigenspace: runs the lowest-eigenspace
/// check on `(-A, -B)` and maps back, so `t` refers to `A + tJ` and the
/// `lambda_n_*` fields hold `λ_1`.
pub fn verify_highest_eigenspace(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    sigma: &Hypomorphism,
    n_t_samples: usize,
    gate: &Gate,
) -> Result<MainTheoremReport> {
    let mut report = verify_main_theorem(&a.negated(), &b.negated(), sigma, n_t_samples, gate)?;
    report.t_interval = (-report.t_interval.1, -report.t_interval.0);
    report.t_of_lambda.iter_mut().for_each(|t| *t = -*t);
    for s in &mut report.samples {
        s.t = -s.t;
        s.lambda_n_a = -s.lambda_n_a;
        s.lambda_n_b = -s.lambda_n_b;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherencePoint {
    pub lambda: f64,
    pub t: f64,
    /// Lowest eigenvalue of `A + λI + t(λ)J`; zero in exact arithmetic.
    pub lowest_eigenvalue: f64,
    pub scale: f64,
    pub is_good: bool,
}

/// Checks that `A + λI + t(λ)J` is singular and in good position.
pub fn coherence_point(a: &SymmetricMatrix, lambda: f64) -> Result<CoherencePoint> {
    let t = t_of_lambda(a, lambda)?;
    let m = a.shifted(-lambda, t);
    let lowest = eigen_sorted(&m).lowest();
    Ok(CoherencePoint {
        lambda,
        t,
        lowest_eigenvalue: lowest,
        scale: m.scale(),
        is_good: good_position_report(&m)?.is_good,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph6::Graph6Record;
    use crate::hypomorphism::find_hypomorphism;
    use crate::matrix::{perm_similarity, Permutation};

    fn c6_pair() -> (SymmetricMatrix, SymmetricMatrix, Hypomorphism) {
        let a = Graph6Record::cycle(6).adjacency_matrix().unwrap();
        let b = perm_similarity(&a, &Permutation::new(vec![2, 0, 5, 1, 3, 4]).unwrap()).unwrap();
        let sigma = find_hypomorphism(&a, &b).unwrap().unwrap();
        (a, b, sigma)
    }

    #[test]
    fn grids() {
        assert_eq!(default_grid(), vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        let g = geometric_grid(1.0, 5.0);
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 1.0);
        assert!((g[15] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn identical_pair_is_exact() {
        let a = Graph6Record::cycle(5).adjacency_matrix().unwrap();
        let id = Hypomorphism::identity(5).unwrap();
        let r = verify_tutte(&a, &a, &id, &default_grid(), &default_grid(), &Gate::default()).unwrap();
        assert_eq!(r.max_abs_diff, 0.0);
        assert!(r.pass);
        let r = verify_eq1(&a, &a, &id, &default_grid(), &default_grid(), &Gate::default()).unwrap();
        assert!(r.points.iter().all(|p| p.f == 0.0));
        let r = verify_main1_t_agreement(&a, &a, &id, lambda0_search(&a), &Gate::default()).unwrap();
        assert_eq!(r.abs_diff, 0.0);
        let r = verify_main_theorem(&a, &a, &id, 5, &Gate::default()).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn gate_rejects_forged_sigma() {
        let i3 = SymmetricMatrix::identity(3);
        let k3 = Graph6Record::complete(3).adjacency_matrix().unwrap();
        let id = Hypomorphism::identity(3).unwrap();
        let g = default_grid();
        assert!(matches!(
            verify_eq1(&i3, &k3, &id, &g, &g, &Gate::default()),
            Err(Error::NotHypomorphic { index: Some(0), .. })
        ));
        assert!(matches!(
            verify_tutte(&i3, &k3, &id, &g, &g, &Gate::default()),
            Err(Error::NotHypomorphic { .. })
        ));
        assert!(matches!(
            verify_main_theorem(&i3, &k3, &id, 3, &Gate::default()),
            Err(Error::NotHypomorphic { .. })
        ));
    }

    #[test]
    fn tutte_on_relabelled_hexagon() {
        let (a, b, sigma) = c6_pair();
        assert_ne!(a, b);
        let r = verify_tutte(&a, &b, &sigma, &default_grid(), &default_grid(), &Gate::default()).unwrap();
        assert!(r.pass, "{} vs {}", r.max_abs_diff, r.scale);
        assert_eq!(r.grid.len(), 81);
    }

    #[test]
    fn perturbed_control_fails_when_forced() {
        let (a, b, sigma) = c6_pair();
        let mut rows = b.rows();
        rows[2][2] += 1e-3;
        let broken = SymmetricMatrix::new(rows).unwrap();
        let g = default_grid();
        assert!(matches!(
            verify_tutte(&a, &broken, &sigma, &g, &g, &Gate::default()),
            Err(Error::NotHypomorphic { .. })
        ));
        let r = verify_tutte(&a, &broken, &sigma, &g, &g, &Gate::forced()).unwrap();
        assert!(!r.hypomorphism.valid);
        assert!(!r.pass);
    }

    #[test]
    fn main2_examples() {
        let tri = SymmetricMatrix::new(vec![
            vec![1.0, -0.5, -0.5],
            vec![-0.5, 1.0, -0.5],
            vec![-0.5, -0.5, 1.0],
        ])
        .unwrap();
        let id = Hypomorphism::identity(3).unwrap();
        let r = verify_main2(&tri, &tri, &id, &Gate::default()).unwrap();
        assert!(r.pass);
        assert!(r.kernel_a.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));

        let i3 = SymmetricMatrix::identity(3);
        assert!(matches!(
            verify_main2(&i3, &i3, &id, &Gate::default()),
            Err(Error::BadPosition(_))
        ));
    }

    #[test]
    fn t_agreement_rejects_small_lambda() {
        let (a, b, sigma) = c6_pair();
        let l0 = lambda0_search(&a).max(lambda0_search(&b));
        assert!(matches!(
            verify_main1_t_agreement(&a, &b, &sigma, 0.5 * l0, &Gate::default()),
            Err(Error::LambdaTooSmall { .. })
        ));
        let r = verify_main1_t_agreement(&a, &b, &sigma, l0 + 1.0, &Gate::default()).unwrap();
        assert!(r.pass && r.good_position_a && r.good_position_b);
        assert!(r.abs_diff <= 1e-10);
    }

    #[test]
    fn coherence_at_t_of_lambda() {
        let (a, _, _) = c6_pair();
        let l0 = lambda0_search(&a);
        for lambda in [l0, 2.0 * l0] {
            let p = coherence_point(&a, lambda).unwrap();
            assert!(p.lowest_eigenvalue.abs() <= 1e-9 * p.scale);
            assert!(p.is_good);
        }
    }

    #[test]
    fn highest_eigenspace_mirror() {
        let (a, b, sigma) = c6_pair();
        let r = verify_highest_eigenspace(&a, &b, &sigma, 6, &Gate::default()).unwrap();
        assert!(r.pass);
        assert!(r.t_interval.0 > 0.0);
        for s in &r.samples {
            let top = eigen_sorted(&a.plus_ones(s.t)).values[0];
            assert!((top - s.lambda_n_a).abs() < 1e-9);
        }
    }
}
