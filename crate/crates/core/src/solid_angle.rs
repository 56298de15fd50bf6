//! Angles `∠(u, U) = {Σ α_i (u_i - u) : α_i ≥ 0}` as simplicial cones and
//! their norms: the volume of the cone inside the unit ball.
//!
//! Norms are reported as a fraction of the unit-ball volume of a declared
//! ambient dimension `d`, which defaults to the dimension of the span of the
//! generators. A cone whose span is smaller than `d` has norm exactly zero.
//! For `d ≤ 3` closed forms are used; above that the fraction is the hit
//! rate of uniformly random directions, which equals the ball fraction
//! because the cone is invariant under positive scaling.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::{good_position_report, span_basis, Presentation};

/// Coefficients down to `-COEF_TOL` count as nonnegative.
pub const COEF_TOL: f64 = 1e-12;

/// Relative distance from the span above which a vector is outside it.
pub const SPAN_TOL: f64 = 1e-10;

/// Strictness verdicts require a gap of this many combined standard errors.
pub const SIGMA_MARGIN: f64 = 4.0;

/// Allowance for rounding in closed-form estimates, which carry no sampling error.
pub const EXACT_NOISE: f64 = 1e-12;

/// Samples per parallel chunk; each chunk draws from its own ChaCha stream.
const CHUNK: u64 = 1 << 16;

/// Volume of the unit ball in `d` dimensions, `π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let (mut v, start) = if d % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    apex: DVector<f64>,
    generators: Vec<DVector<f64>>,
    ambient_dim: Option<usize>,
}

impl Cone {
    pub fn new(
        apex: DVector<f64>,
        generators: Vec<DVector<f64>>,
        ambient_dim: Option<usize>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput("a cone needs at least one generator".into()));
        }
        let m = apex.len();
        if let Some(g) = generators.iter().find(|g| g.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: g.len(),
            });
        }
        if let Some(d) = ambient_dim {
            if d == 0 || d > m {
                return Err(Error::InvalidInput(format!(
                    "ambient dimension {d} must lie in 1..={m}"
                )));
            }
        }
        Ok(Self {
            apex,
            generators,
            ambient_dim,
        })
    }

    /// `∠(apex, points)`: generators `p - apex`, ambient dimension from the span.
    pub fn at(apex: &DVector<f64>, points: &[DVector<f64>]) -> Result<Self> {
        Self::new(
            apex.clone(),
            points.iter().map(|p| p - apex).collect(),
            None,
        )
    }

    pub fn with_ambient_dim(mut self, d: Option<usize>) -> Result<Self> {
        self.ambient_dim = d;
        Self::new(self.apex, self.generators, self.ambient_dim)
    }

    pub fn apex(&self) -> &DVector<f64> {
        &self.apex
    }

    pub fn generators(&self) -> &[DVector<f64>] {
        &self.generators
    }

    pub fn declared_ambient_dim(&self) -> Option<usize> {
        self.ambient_dim
    }

    pub fn generator_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.generators)
    }

    /// Applies the linear map `q` to apex and generators.
    pub fn transformed(&self, q: &DMatrix<f64>) -> Cone {
        Cone {
            apex: q * &self.apex,
            generators: self.generators.iter().map(|g| q * g).collect(),
            ambient_dim: self.ambient_dim,
        }
    }
}

/// Orthonormal coordinates on the span of a simplicial cone.
#[derive(Debug, Clone)]
struct ConeFrame {
    basis: DMatrix<f64>,
    /// Generators in span coordinates (columns).
    coords: DMatrix<f64>,
    /// Maps span coordinates to generator coefficients.
    solve: DMatrix<f64>,
}

impl ConeFrame {
    fn new(cone: &Cone) -> Result<Self> {
        let g = cone.generator_matrix();
        let basis = span_basis(&g);
        let k = cone.generators.len();
        let rank = basis.ncols();
        if rank < k {
            return Err(Error::NonSimplicialCone {
                generators: k,
                rank,
            });
        }
        let coords = basis.transpose() * &g;
        let solve = coords.clone().try_inverse().ok_or(Error::NonSimplicialCone {
            generators: k,
            rank,
        })?;
        Ok(Self {
            basis,
            coords,
            solve,
        })
    }

    fn span_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Generator coefficients of `x`, or `None` when `x` is off the span.
    fn coefficients(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let local = self.basis.transpose() * x;
        let off_span = (x - &self.basis * &local).norm();
        if off_span > SPAN_TOL * x.norm() {
            return None;
        }
        Some(&self.solve * local)
    }
}

/// Whether the vector `x` lies in the cone spanned by the generators.
pub fn cone_contains(cone: &Cone, x: &DVector<f64>) -> Result<bool> {
    if x.len() != cone.apex.len() {
        return Err(Error::DimensionMismatch {
            expected: cone.apex.len(),
            found: x.len(),
        });
    }
    let frame = ConeFrame::new(cone)?;
    Ok(frame
        .coefficients(x)
        .is_some_and(|alpha| alpha.iter().all(|&a| a >= -COEF_TOL)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    MonteCarlo,
    Exact1D,
    Exact2D,
    Exact3D,
    /// Generators span less than the ambient dimension.
    ZeroMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolidAngleEstimate {
    /// Share of the unit ball of dimension `ambient_dim`.
    pub fraction: f64,
    /// `fraction * Vol(B_d)`.
    pub abs_norm: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub method: Method,
    pub ambient_dim: usize,
}

impl SolidAngleEstimate {
    fn exact(fraction: f64, d: usize, method: Method, seed: u64) -> Self {
        Self {
            fraction,
            abs_norm: fraction * unit_ball_volume(d),
            std_error: 0.0,
            samples: 0,
            seed,
            method,
            ambient_dim: d,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method != Method::MonteCarlo
    }
}

/// `sqrt(Σ σ_i²)` for independent estimates.
pub fn combined_std_error<'a>(estimates: impl IntoIterator<Item = &'a SolidAngleEstimate>) -> f64 {
    estimates
        .into_iter()
        .map(|e| e.std_error * e.std_error)
        .sum::<f64>()
        .sqrt()
}

/// Noise band for comparing estimates: `4σ` plus rounding slack.
pub fn noise_band<'a>(estimates: impl IntoIterator<Item = &'a SolidAngleEstimate>) -> f64 {
    SIGMA_MARGIN * combined_std_error(estimates) + EXACT_NOISE
}

/// Norm of the cone as a fraction of the unit ball.
pub fn angle_fraction(cone: &Cone, samples: u64, seed: u64) -> Result<SolidAngleEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let frame = ConeFrame::new(cone)?;
    let d = cone.ambient_dim.unwrap_or(frame.span_dim());
    if frame.span_dim() > d {
        return Err(Error::InvalidInput(format!(
            "generators span dimension {} exceeds the ambient dimension {d}",
            frame.span_dim()
        )));
    }
    if frame.span_dim() < d {
        return Ok(SolidAngleEstimate::exact(0.0, d, Method::ZeroMeasure, seed));
    }
    let unit: Vec<DVector<f64>> = frame
        .coords
        .column_iter()
        .map(|c| c.normalize())
        .collect();
    match d {
        1 => Ok(SolidAngleEstimate::exact(0.5, d, Method::Exact1D, seed)),
        2 => {
            let cross = unit[0][0] * unit[1][1] - unit[0][1] * unit[1][0];
            let angle = cross.abs().atan2(unit[0].dot(&unit[1]));
            Ok(SolidAngleEstimate::exact(angle / (2.0 * PI), d, Method::Exact2D, seed))
        }
        3 => {
            let det = unit[0].dot(&unit[1].cross(&unit[2]));
            let denom =
                1.0 + unit[0].dot(&unit[1]) + unit[1].dot(&unit[2]) + unit[2].dot(&unit[0]);
            let omega = 2.0 * det.abs().atan2(denom);
            Ok(SolidAngleEstimate::exact(omega / (4.0 * PI), d, Method::Exact3D, seed))
        }
        _ => Ok(sample_fraction(&frame, samples, seed)),
    }
}

/// Monte Carlo estimate regardless of dimension, for cross-checking closed forms.
pub fn monte_carlo_fraction(cone: &Cone, samples: u64, seed: u64) -> Result<SolidAngleEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let frame = ConeFrame::new(cone)?;
    let d = cone.ambient_dim.unwrap_or(frame.span_dim());
    if frame.span_dim() < d {
        return Ok(SolidAngleEstimate::exact(0.0, d, Method::ZeroMeasure, seed));
    }
    Ok(sample_fraction(&frame, samples, seed))
}

fn sample_fraction(frame: &ConeFrame, samples: u64, seed: u64) -> SolidAngleEstimate {
    let k = frame.span_dim();
    // row-major copy of the coefficient solver for the hot loop
    let solve: Vec<f64> = (0..k)
        .flat_map(|r| (0..k).map(move |c| (r, c)))
        .map(|(r, c)| frame.solve[(r, c)])
        .collect();
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let len = CHUNK.min(samples - chunk * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut z = vec![0.0; k];
            let mut hits = 0u64;
            for _ in 0..len {
                for zi in z.iter_mut() {
                    *zi = rng.sample(StandardNormal);
                }
                let inside = solve
                    .chunks_exact(k)
                    .all(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() >= 0.0);
                hits += u64::from(inside);
            }
            hits
        })
        .sum();
    let fraction = hits as f64 / samples as f64;
    SolidAngleEstimate {
        fraction,
        abs_norm: fraction * unit_ball_volume(k),
        std_error: (fraction * (1.0 - fraction) / samples as f64).sqrt(),
        samples,
        seed,
        method: Method::MonteCarlo,
        ambient_dim: k,
    }
}

/// Independent sub-seed for the `k`-th estimate of a multi-cone check.
pub fn sub_seed(seed: u64, k: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Difference exceeds the noise band in the predicted direction.
    Strict,
    /// Within the noise band.
    Inconclusive,
    /// Difference exceeds the noise band in the wrong direction.
    Violated,
}

fn verdict(diff: f64, noise: f64) -> Verdict {
    if diff > noise {
        Verdict::Strict
    } else if diff < -noise {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub inner: SolidAngleEstimate,
    pub outer: SolidAngleEstimate,
    /// `inner ≤ outer` up to the noise band.
    pub holds: bool,
}

/// `∠(u, U) ⊆ ∠(u, V)` implies `|∠(u, U)| ≤ |∠(u, V)|`.
pub fn monotonicity_check(
    inner: &Cone,
    outer: &Cone,
    samples: u64,
    seed: u64,
) -> Result<MonotonicityReport> {
    if inner.apex.len() != outer.apex.len() {
        return Err(Error::DimensionMismatch {
            expected: outer.apex.len(),
            found: inner.apex.len(),
        });
    }
    let apex_gap = (&inner.apex - &outer.apex).norm();
    if apex_gap > SPAN_TOL * inner.apex.norm().max(1.0) {
        return Err(Error::PreconditionViolated(format!(
            "cones have different apexes (distance {apex_gap:e})"
        )));
    }
    for (k, g) in inner.generators.iter().enumerate() {
        if !cone_contains(outer, g)? {
            return Err(Error::NotNested { generator: k });
        }
    }
    let inner_est = angle_fraction(inner, samples, sub_seed(seed, 0))?;
    let outer_est = angle_fraction(outer, samples, sub_seed(seed, 1))?;
    let noise = noise_band([&inner_est, &outer_est]);
    Ok(MonotonicityReport {
        holds: inner_est.fraction <= outer_est.fraction + noise,
        inner: inner_est,
        outer: outer_est,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `|∠(u, U)|`
    pub lhs: SolidAngleEstimate,
    /// `|∠(v, U)|`
    pub rhs: SolidAngleEstimate,
    /// Coefficients of `v - u` over the generators `u_i - u`.
    pub interior_weights: Vec<f64>,
    pub strict: bool,
    pub verdict: Verdict,
}

fn point_dims(u: &DVector<f64>, points: &[DVector<f64>], v: &DVector<f64>) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    for p in points.iter().chain(std::iter::once(v)) {
        if p.len() != u.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: p.len(),
            });
        }
    }
    Ok(())
}

/// Moving the apex from `u` to `v` in the interior of `conv({u} ∪ U)`
/// strictly increases the norm.
pub fn comparison_check(
    u: &DVector<f64>,
    points: &[DVector<f64>],
    v: &DVector<f64>,
    samples: u64,
    seed: u64,
) -> Result<ComparisonReport> {
    point_dims(u, points, v)?;
    let at_u = Cone::at(u, points)?;
    let frame = ConeFrame::new(&at_u)?;
    let weights = frame.coefficients(&(v - u)).ok_or_else(|| {
        Error::PreconditionViolated("v is not in the affine hull of {u} ∪ U".into())
    })?;
    let total: f64 = weights.sum();
    if !(weights.iter().all(|&a| a > 0.0) && total < 1.0) {
        return Err(Error::PreconditionViolated(format!(
            "v is not interior to conv({{u}} ∪ U): weights {:?}, sum {total}",
            weights.as_slice()
        )));
    }
    let lhs = angle_fraction(&at_u, samples, sub_seed(seed, 0))?;
    let rhs = angle_fraction(&Cone::at(v, points)?, samples, sub_seed(seed, 1))?;
    let verdict = verdict(rhs.fraction - lhs.fraction, noise_band([&lhs, &rhs]));
    Ok(ComparisonReport {
        lhs,
        rhs,
        interior_weights: weights.iter().copied().collect(),
        strict: verdict == Verdict::Strict,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    /// `|∠(u, U)|`
    pub at_u: SolidAngleEstimate,
    /// `|∠(v, U)|`
    pub at_v: SolidAngleEstimate,
    /// `|∠(v', U)|` with `v' = u + (1 - sqrt(‖v-u‖²/‖u₀‖² + 1)) u₀`, a congruent angle.
    pub at_v_prime: SolidAngleEstimate,
    /// `at_v` and `at_v_prime` agree within the noise band.
    pub congruent: bool,
    pub strict: bool,
    pub verdict: Verdict,
}

/// Orthogonal displacement of the apex off `span(U - u)` strictly
/// decreases the norm.
///
/// Both angles are measured in the dimension of their own span, which is
/// the dimension in which `∠(v, U)` is congruent to `∠(v', U)`.
pub fn displacement_check(
    u: &DVector<f64>,
    points: &[DVector<f64>],
    v: &DVector<f64>,
    samples: u64,
    seed: u64,
) -> Result<DisplacementReport> {
    point_dims(u, points, v)?;
    let at_u_cone = Cone::at(u, points)?;
    ConeFrame::new(&at_u_cone)?;
    let offset = u - v;
    if offset.norm() <= EXACT_NOISE * u.norm().max(1.0) {
        return Err(Error::PreconditionViolated("u and v coincide".into()));
    }
    for (i, g) in at_u_cone.generators.iter().enumerate() {
        let dot = offset.dot(g);
        if dot.abs() > 1e-9 * (offset.norm() * g.norm()).max(1.0) {
            return Err(Error::PreconditionViolated(format!(
                "(u - v, u - u_{i}) = {dot:e} is not zero"
            )));
        }
    }
    // projection of u onto aff U, relative to u
    let gens = Presentation::from_vectors(&at_u_cone.generators)?;
    let gram = gens.gram();
    let x = crate::presentation::inverse_ones(&gram)?;
    let weights = &x / x.sum();
    if !weights.iter().all(|&w| w > 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "projection of u is not interior to conv U: weights {:?}",
            weights.as_slice()
        )));
    }
    let u0 = gens.matrix() * &weights;
    let u0_norm_sq = u0.norm_squared();
    let shift = 1.0 - (offset.norm_squared() / u0_norm_sq + 1.0).sqrt();
    let v_prime = u + &u0 * shift;

    let at_u = angle_fraction(&at_u_cone, samples, sub_seed(seed, 0))?;
    let at_v = angle_fraction(&Cone::at(v, points)?, samples, sub_seed(seed, 1))?;
    let at_v_prime = angle_fraction(&Cone::at(&v_prime, points)?, samples, sub_seed(seed, 2))?;
    let congruent = (at_v.fraction - at_v_prime.fraction).abs() <= noise_band([&at_v, &at_v_prime]) + 1e-9;
    let verdict = verdict(at_u.fraction - at_v.fraction, noise_band([&at_u, &at_v]));
    Ok(DisplacementReport {
        at_u,
        at_v,
        at_v_prime,
        congruent,
        strict: verdict == Verdict::Strict,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    /// Fractions of `∠(0, U ∖ {u_i})`, one per `i`.
    pub fractions: Vec<SolidAngleEstimate>,
    pub sum_fraction: f64,
    pub combined_std_error: f64,
    pub ok: bool,
}

/// For `U` in good position the cones `∠(0, U ∖ {u_i})` tile the ball of
/// `span U`, so their fractions sum to one.
pub fn partition_check(u: &Presentation, samples: u64, seed: u64) -> Result<PartitionReport> {
    let report = good_position_report(&u.gram())?;
    if !report.is_good {
        return Err(Error::BadPosition(format!(
            "{:?} (rank {})",
            report.reason, report.rank
        )));
    }
    let origin = DVector::zeros(u.dim());
    let fractions = (0..u.n())
        .map(|i| {
            let cone = Cone::at(&origin, &u.without(i).vectors())?;
            angle_fraction(&cone, samples, sub_seed(seed, i as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let sum_fraction = fractions.iter().map(|e| e.fraction).sum::<f64>();
    let combined = combined_std_error(&fractions);
    let ok = (sum_fraction - 1.0).abs() <= SIGMA_MARGIN * combined + 1e-9;
    Ok(PartitionReport {
        fractions,
        sum_fraction,
        combined_std_error: combined,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn cone(gens: &[&[f64]]) -> Cone {
        let dim = gens[0].len();
        Cone::new(DVector::zeros(dim), gens.iter().map(|g| v(g)).collect(), None).unwrap()
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn containment_examples() {
        let quadrant = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(cone_contains(&quadrant, &v(&[1.0, 1.0])).unwrap());
        assert!(!cone_contains(&quadrant, &v(&[-1.0, 1.0])).unwrap());
        assert!(cone_contains(&quadrant, &v(&[0.0, 0.0])).unwrap());
        // off the span of a planar cone in 3D
        let flat = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert!(!cone_contains(&flat, &v(&[1.0, 1.0, 1e-3])).unwrap());
        let dependent = cone(&[&[1.0, 0.0], &[2.0, 0.0]]);
        assert!(matches!(
            cone_contains(&dependent, &v(&[1.0, 0.0])),
            Err(Error::NonSimplicialCone { generators: 2, rank: 1 })
        ));
    }

    #[test]
    fn closed_form_anchors() {
        let q = angle_fraction(&cone(&[&[1.0, 0.0], &[0.0, 1.0]]), 1, 0).unwrap();
        assert_eq!(q.method, Method::Exact2D);
        assert!((q.fraction - 0.25).abs() < 1e-15);
        assert!((q.abs_norm - PI / 4.0).abs() < 1e-15);

        let o = angle_fraction(&cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]), 1, 0)
            .unwrap();
        assert_eq!(o.method, Method::Exact3D);
        assert!((o.fraction - 0.125).abs() < 1e-15);
        assert!((o.abs_norm - PI / 6.0).abs() < 1e-15);

        let e = angle_fraction(&cone(&[&[1.0, 0.0], &[1.0, 1.0]]), 1, 0).unwrap();
        assert!((e.fraction - 0.125).abs() < 1e-15);
    }

    #[test]
    fn zero_law_and_rays() {
        let flat = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).with_ambient_dim(Some(3)).unwrap();
        let e = angle_fraction(&flat, 10, 0).unwrap();
        assert_eq!(e.method, Method::ZeroMeasure);
        assert_eq!(e.fraction, 0.0);
        let ray = angle_fraction(&cone(&[&[0.0, 2.0]]), 10, 0).unwrap();
        assert_eq!(ray.method, Method::Exact1D);
        assert_eq!(ray.fraction, 0.5);
        assert!(angle_fraction(&cone(&[&[1.0, 0.0], &[0.0, 1.0]]), 0, 0).is_err());
    }

    #[test]
    fn cone_construction_errors() {
        assert!(Cone::new(v(&[0.0, 0.0]), vec![], None).is_err());
        assert!(Cone::new(v(&[0.0, 0.0]), vec![v(&[1.0])], None).is_err());
        assert!(Cone::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])], Some(3)).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic_and_close() {
        let octant = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let a = monte_carlo_fraction(&octant, 200_000, 7).unwrap();
        let b = monte_carlo_fraction(&octant, 200_000, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.fraction - 0.125).abs() <= 4.0 * a.std_error);
        let c = monte_carlo_fraction(&octant, 200_000, 8).unwrap();
        assert_ne!(a.fraction, c.fraction);
    }

    #[test]
    fn monotonicity_examples() {
        let inner = cone(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let outer = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = monotonicity_check(&inner, &outer, 1000, 1).unwrap();
        assert!(r.holds);
        assert!((r.inner.fraction - 0.125).abs() < 1e-15);
        assert!(monotonicity_check(&outer, &outer, 1000, 1).unwrap().holds);
        assert!(matches!(
            monotonicity_check(&outer, &inner, 1000, 1),
            Err(Error::NotNested { generator: 1 })
        ));
    }

    #[test]
    fn planar_comparison() {
        let r = comparison_check(
            &v(&[0.0, 0.0]),
            &[v(&[1.0, 0.0]), v(&[0.0, 1.0])],
            &v(&[0.25, 0.25]),
            1,
            0,
        )
        .unwrap();
        assert!((r.lhs.fraction - 0.25).abs() < 1e-15);
        assert!((r.rhs.fraction - (-0.6f64).acos() / (2.0 * PI)).abs() < 1e-12);
        assert!(r.strict);
        assert_eq!(r.verdict, Verdict::Strict);
    }

    #[test]
    fn comparison_preconditions() {
        let pts = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let origin = v(&[0.0, 0.0]);
        for bad in [[0.6, 0.6], [-0.1, 0.5], [0.0, 0.5]] {
            assert!(matches!(
                comparison_check(&origin, &pts, &v(&bad), 1, 0),
                Err(Error::PreconditionViolated(_))
            ));
        }
        // near the apex the gain vanishes into rounding noise
        let r = comparison_check(&origin, &pts, &v(&[1e-15, 1e-15]), 1, 0).unwrap();
        assert_ne!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn displacement_example() {
        let pts = [v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])];
        let origin = v(&[0.0, 0.0, 0.0]);
        let r = displacement_check(&origin, &pts, &v(&[0.0, 0.0, 1.0]), 1, 0).unwrap();
        assert!((r.at_u.fraction - 0.25).abs() < 1e-15);
        assert!((r.at_v.fraction - 1.0 / 6.0).abs() < 1e-12);
        assert!((r.at_v_prime.fraction - 1.0 / 6.0).abs() < 1e-12);
        assert!(r.congruent && r.strict);

        assert!(matches!(
            displacement_check(&origin, &pts, &origin, 1, 0),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            displacement_check(&origin, &pts, &v(&[1.0, 0.0, 1.0]), 1, 0),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn partition_of_triangle() {
        let s = 3f64.sqrt() / 2.0;
        let u = Presentation::from_columns(&[vec![1.0, 0.0], vec![-0.5, s], vec![-0.5, -s]]).unwrap();
        let r = partition_check(&u, 1, 0).unwrap();
        assert!(r.ok);
        for f in &r.fractions {
            assert!((f.fraction - 1.0 / 3.0).abs() < 1e-12);
        }
        let bad = Presentation::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(partition_check(&bad, 1, 0), Err(Error::BadPosition(_))));
    }
}
