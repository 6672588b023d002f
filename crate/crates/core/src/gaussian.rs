//! The Gaussian parameter space `𝓘 = Ω × P_n` with the flat product metric,
//! the Fisher metric of the univariate normal family, and the `E2` lower
//! bound for monotone paths.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{self, EnergyError, SignalCurve};
use crate::geometry::{self, GeometryError, ManifoldSpec};
use crate::mesh::PolylinePath;
use crate::sampling;

/// Tolerance for a coordinate sequence to count as monotone.
pub const MONO_EPS: f64 = 1e-12;

/// Absolute slack on `E2 ≥ ⅓‖q − p‖₃³`.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

/// Smallest accepted quadrature node count.
pub const MIN_QUAD_POINTS: usize = 200;

/// Half-width of the quadrature window in units of σ.
pub const QUAD_HALF_WIDTH: f64 = 12.0;

/// Seed of the random convex combinations used by the hull probe.
pub const HULL_SEED: u64 = 0x5eed_4a11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("sigma must be > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("need at least {MIN_QUAD_POINTS} quadrature points, got {0}")]
    TooFewQuadPoints(usize),
    #[error("covariance is {rows}x{cols}, expected {n}x{n}")]
    CovarianceShape { rows: usize, cols: usize, n: usize },
    #[error("covariance is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected a path in a gaussian_param manifold, got {0}")]
    WrongManifold(&'static str),
}

pub type Result<T, E = GaussianError> = std::result::Result<T, E>;

/// A Gaussian `N(μ, Σ)` as a point of `ℝⁿ × P_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussParamPoint {
    mu: Vec<f64>,
    sigma: DMatrix<f64>,
}

impl GaussParamPoint {
    pub fn new(mu: Vec<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let n = mu.len();
        if sigma.nrows() != n || sigma.ncols() != n {
            return Err(GaussianError::CovarianceShape { rows: sigma.nrows(), cols: sigma.ncols(), n });
        }
        let scale = sigma.abs().max().max(1.0);
        if (&sigma - sigma.transpose()).abs().max() > 1e-12 * scale {
            return Err(GaussianError::NotSymmetric);
        }
        geometry::validate_point(&ManifoldSpec::Spd { n }, &geometry::pack_symmetric(&sigma))?;
        Ok(GaussParamPoint { mu, sigma })
    }

    /// Decodes the `gaussian_param` chart: mean, then packed covariance.
    pub fn from_chart(n: usize, coords: &[f64]) -> Result<Self> {
        let expected = n + n * (n + 1) / 2;
        if coords.len() != expected {
            return Err(GaussianError::DimensionMismatch(coords.len(), expected));
        }
        let sigma = geometry::unpack_symmetric(n, &coords[n..])?;
        GaussParamPoint::new(coords[..n].to_vec(), sigma)
    }

    pub fn to_chart(&self) -> Vec<f64> {
        let mut out = self.mu.clone();
        out.extend(geometry::pack_symmetric(&self.sigma));
        out
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }
}

/// Fisher metric components at `(μ, σ)` for the univariate normal family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherTensor {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl FisherTensor {
    pub fn is_positive_definite(&self) -> bool {
        self.g11 > 0.0 && self.g22 > 0.0 && self.g11 * self.g22 - self.g12 * self.g12 > 0.0
    }
}

/// Numerical `g₂₂` next to the two closed forms it is compared with:
/// `2√2 / (σ²√π)` and the classical `2 / σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G22Comparison {
    pub g22_numeric: f64,
    pub g22_paper: f64,
    pub g22_classical: f64,
}

impl G22Comparison {
    pub fn new(sigma: f64, g22_numeric: f64) -> Self {
        let s2 = sigma * sigma;
        G22Comparison {
            g22_numeric,
            g22_paper: 2.0 * 2f64.sqrt() / (s2 * PI.sqrt()),
            g22_classical: 2.0 / s2,
        }
    }

    /// Name of the closed form nearest to the numerical value.
    pub fn closest(&self) -> &'static str {
        if (self.g22_numeric - self.g22_classical).abs() <= (self.g22_numeric - self.g22_paper).abs() {
            "classical"
        } else {
            "stated"
        }
    }
}

/// `g_ij = −∫ f ∂ᵢ∂ⱼ log f dx` for `f = N(μ, σ²)`, integrated with the
/// trapezoid rule on `quad_points` nodes over `[μ − 12σ, μ + 12σ]`.
///
/// The integrand decays like a Gaussian, so the truncated trapezoid rule
/// converges geometrically in the node count.
pub fn fisher_metric_numeric(mu: f64, sigma: f64, quad_points: usize) -> Result<FisherTensor> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(GaussianError::NonPositiveSigma(sigma));
    }
    if quad_points < MIN_QUAD_POINTS {
        return Err(GaussianError::TooFewQuadPoints(quad_points));
    }
    let lo = mu - QUAD_HALF_WIDTH * sigma;
    let h = 2.0 * QUAD_HALF_WIDTH * sigma / (quad_points - 1) as f64;
    let s2 = sigma * sigma;
    let norm = 1.0 / (2.0 * PI * s2).sqrt();
    let (mut g11, mut g12, mut g22) = (0.0, 0.0, 0.0);
    for i in 0..quad_points {
        let u = lo + h * i as f64 - mu;
        let w = if i == 0 || i + 1 == quad_points { 0.5 } else { 1.0 };
        let f = norm * (-u * u / (2.0 * s2)).exp();
        // Second derivatives of log f in (μ, σ).
        let d_mm = -1.0 / s2;
        let d_ms = -2.0 * u / (s2 * sigma);
        let d_ss = 1.0 / s2 - 3.0 * u * u / (s2 * s2);
        g11 -= w * f * d_mm;
        g12 -= w * f * d_ms;
        g22 -= w * f * d_ss;
    }
    Ok(FisherTensor { g11: g11 * h, g12: g12 * h, g22: g22 * h })
}

/// `‖x − y‖_p` in the flat chart of `ℝⁿ × P_n`.
pub fn product_metric_distance(x: &GaussParamPoint, y: &GaussParamPoint, p: f64) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(GaussianError::DimensionMismatch(x.dim(), y.dim()));
    }
    if !(p >= 1.0) {
        return Err(GeometryError::InvalidNormOrder(p).into());
    }
    Ok(geometry::lp_distance(&x.to_chart(), &y.to_chart(), p))
}

/// Per-coordinate monotonicity of a sequence of chart points.
pub fn monotone_coordinates<P: AsRef<[f64]>>(points: &[P]) -> Vec<bool> {
    let dim = points.first().map_or(0, |p| p.as_ref().len());
    (0..dim)
        .map(|c| {
            let diffs = || points.windows(2).map(|w| w[1].as_ref()[c] - w[0].as_ref()[c]);
            diffs().all(|d| d >= -MONO_EPS) || diffs().all(|d| d <= MONO_EPS)
        })
        .collect()
}

/// Outcome of checking `E2 ≥ ⅓‖q − p‖₃³` on a path in `𝓘`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBoundReport {
    pub monotone: bool,
    pub monotone_coords: Vec<bool>,
    pub hull_ok: bool,
    pub e2: f64,
    pub lower_bound: f64,
    pub satisfied: bool,
    /// Monotonicity and hull containment both hold, so `satisfied` is implied.
    pub hypotheses_hold: bool,
    pub n_samples: usize,
}

/// Checks the hypotheses and conclusion of the `E2` lower bound on a path in
/// a `gaussian_param` manifold.
///
/// The hull test validates all pairwise midpoints of (up to 64 evenly spaced)
/// samples and 1000 seeded random convex combinations. `P_n` is convex and `Ω`
/// is a box, so the hull lies in `𝓘` exactly when the samples do; the probe
/// confirms this numerically.
pub fn check_gaussian_lower_bound(path: &PolylinePath) -> Result<GaussianBoundReport> {
    let m = path.manifold();
    if !matches!(m, ManifoldSpec::GaussianParam { .. }) {
        return Err(GaussianError::WrongManifold(m.kind_name()));
    }
    let samples = path.samples();
    let monotone_coords = monotone_coordinates(samples);
    let monotone = monotone_coords.iter().all(|&b| b);
    let points: Vec<&[f64]> = samples.iter().map(|s| &s[..]).collect();
    let hull_ok = sampling::hull_probe(&points, HULL_SEED, |x| geometry::validate_point(m, x).is_ok());
    let report = energy::curve_energy(&SignalCurve::new(path.clone())?);
    let lower_bound = geometry::lp_distance(path.end(), path.start(), 3.0).powi(3) / 3.0;
    Ok(GaussianBoundReport {
        monotone,
        monotone_coords,
        hull_ok,
        e2: report.e2,
        lower_bound,
        satisfied: report.e2 >= lower_bound - LOWER_BOUND_SLACK,
        hypotheses_hold: monotone && hull_ok,
        n_samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AmbientPoint;
    use crate::mesh;
    use proptest::prelude::*;

    fn box1() -> ManifoldSpec {
        ManifoldSpec::gaussian_param(1, vec![[-10.0, 10.0]]).unwrap()
    }

    fn straight(m: ManifoldSpec, p: &[f64], q: &[f64], k: usize) -> PolylinePath {
        let samples = (0..=k)
            .map(|i| {
                let t = i as f64 / k as f64;
                AmbientPoint(p.iter().zip(q).map(|(a, b)| a + t * (b - a)).collect())
            })
            .collect();
        PolylinePath::uniform(m, samples).unwrap()
    }

    #[test]
    fn fisher_examples() {
        let t = fisher_metric_numeric(0.0, 1.0, 401).unwrap();
        assert!((t.g11 - 1.0).abs() < 1e-8);
        let t = fisher_metric_numeric(5.0, 2.0, 401).unwrap();
        assert!(t.g12.abs() < 1e-10);
        assert!((t.g11 - 0.25).abs() < 1e-8 * 0.25);
    }

    #[test]
    fn g22_oracle_picks_classical() {
        for sigma in [0.5, 1.0, 2.0] {
            let t = fisher_metric_numeric(0.0, sigma, 401).unwrap();
            let cmp = G22Comparison::new(sigma, t.g22);
            assert!((cmp.g22_numeric - cmp.g22_classical).abs() < 1e-8 * cmp.g22_classical);
            assert!((cmp.g22_numeric - cmp.g22_paper).abs() > 0.1 * cmp.g22_classical);
            assert_eq!(cmp.closest(), "classical");
        }
    }

    #[test]
    fn fisher_errors() {
        assert_eq!(fisher_metric_numeric(0.0, 0.0, 401), Err(GaussianError::NonPositiveSigma(0.0)));
        assert_eq!(fisher_metric_numeric(0.0, 1.0, 100), Err(GaussianError::TooFewQuadPoints(100)));
    }

    #[test]
    fn quadrature_doubling_is_stable() {
        let a = fisher_metric_numeric(0.0, 1.0, 401).unwrap();
        let b = fisher_metric_numeric(0.0, 1.0, 801).unwrap();
        assert!((a.g11 - b.g11).abs() < 1e-10);
        assert!((a.g12 - b.g12).abs() < 1e-10);
        assert!((a.g22 - b.g22).abs() < 1e-10);
    }

    #[test]
    fn product_distance_examples() {
        let one = |m: f64, v: f64| GaussParamPoint::new(vec![m], DMatrix::from_element(1, 1, v)).unwrap();
        assert_eq!(product_metric_distance(&one(0.0, 1.0), &one(0.0, 1.0), 2.0).unwrap(), 0.0);
        assert_eq!(product_metric_distance(&one(0.0, 1.0), &one(3.0, 1.0), 2.0).unwrap(), 3.0);
        let d = product_metric_distance(&one(0.0, 1.0), &one(1.0, 2.0), 3.0).unwrap();
        assert!((d - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let two = GaussParamPoint::new(vec![0.0, 0.0], DMatrix::identity(2, 2)).unwrap();
        assert_eq!(product_metric_distance(&one(0.0, 1.0), &two, 2.0), Err(GaussianError::DimensionMismatch(1, 2)));
    }

    #[test]
    fn point_validation() {
        assert_eq!(
            GaussParamPoint::new(vec![0.0, 0.0], DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0])),
            Err(GaussianError::NotSymmetric)
        );
        assert!(GaussParamPoint::new(vec![0.0, 0.0], DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
        let p = GaussParamPoint::new(vec![1.0, -1.0], DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap();
        assert_eq!(GaussParamPoint::from_chart(2, &p.to_chart()).unwrap(), p);
    }

    #[test]
    fn straight_segment_bound() {
        let path = straight(box1(), &[0.0, 1.0], &[3.0, 2.0], 1000);
        let r = check_gaussian_lower_bound(&path).unwrap();
        assert!(r.monotone && r.hull_ok && r.hypotheses_hold);
        assert!((r.lower_bound - 28.0 / 3.0).abs() < 1e-12);
        assert!((r.e2 - 10f64.powf(1.5) / 3.0).abs() < 1e-9);
        assert!(r.satisfied);
    }

    #[test]
    fn staircase_bound() {
        // μ first, then σ²: each leg is axis aligned.
        let samples = [[0.0, 1.0], [1.5, 1.0], [3.0, 1.0], [3.0, 1.5], [3.0, 2.0]];
        let path = PolylinePath::uniform(box1(), samples.iter().map(|&s| AmbientPoint::from(s)).collect()).unwrap();
        let r = check_gaussian_lower_bound(&path).unwrap();
        // ρ = 3 + 1 = 4 along the staircase, so E2 = 4³/3; the bound is (27 + 1)/3.
        assert!((r.e2 - 64.0 / 3.0).abs() < 1e-12);
        assert!((r.lower_bound - 28.0 / 3.0).abs() < 1e-12);
        assert!(r.satisfied && r.hypotheses_hold && r.e2 - r.lower_bound > 0.0);
    }

    #[test]
    fn non_monotone_detected() {
        let samples = [[0.0, 1.0], [2.0, 1.2], [1.0, 1.5]];
        let path = PolylinePath::uniform(box1(), samples.iter().map(|&s| AmbientPoint::from(s)).collect()).unwrap();
        let r = check_gaussian_lower_bound(&path).unwrap();
        assert_eq!(r.monotone_coords, vec![false, true]);
        assert!(!r.hypotheses_hold);
    }

    #[test]
    fn wrong_manifold() {
        let path = straight(ManifoldSpec::Euclidean { dim: 2 }, &[0.0, 0.0], &[1.0, 1.0], 3);
        assert_eq!(check_gaussian_lower_bound(&path), Err(GaussianError::WrongManifold("euclidean")));
    }

    #[test]
    fn degenerate_path_rejected() {
        let samples = [[0.0, 1.0], [1.0, 1.0], [0.0, 1.0]];
        let path = PolylinePath::uniform(box1(), samples.iter().map(|&s| AmbientPoint::from(s)).collect()).unwrap();
        assert_eq!(
            check_gaussian_lower_bound(&path),
            Err(GaussianError::Energy(EnergyError::EndpointsCoincide))
        );
    }

    #[test]
    fn product_distance_matches_geometry() {
        let m = box1();
        let spec = crate::geometry::product_manifold(vec![
            ManifoldSpec::Euclidean { dim: 1 },
            ManifoldSpec::Spd { n: 1 },
        ])
        .unwrap();
        let x = GaussParamPoint::from_chart(1, &[0.3, 1.7]).unwrap();
        let y = GaussParamPoint::from_chart(1, &[-2.0, 0.4]).unwrap();
        let d = product_metric_distance(&x, &y, 2.0).unwrap();
        let g = geometry::distance(&spec, &x.to_chart(), &y.to_chart(), 2.0).unwrap();
        assert!((d - g).abs() < 1e-12);
        assert!((d - geometry::distance(&m, &x.to_chart(), &y.to_chart(), 2.0).unwrap()).abs() < 1e-12);
        assert!((mesh::arc_length(&straight(m, &x.to_chart(), &y.to_chart(), 1)) - d).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn fisher_positive_definite(log_sigma in (0.1f64).ln()..(10.0f64).ln(), mu in -5.0f64..5.0) {
            let t = fisher_metric_numeric(mu, log_sigma.exp(), 401).unwrap();
            prop_assert!(t.is_positive_definite());
        }
    }
}
