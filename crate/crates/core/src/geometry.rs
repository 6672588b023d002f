//! Ambient manifolds, their distance functions and tangent norms.
//!
//! Every manifold is described by a [`ManifoldSpec`] and points are stored as
//! flat coordinate vectors in a fixed chart. The charts are:
//!
//! | kind | chart | dimension |
//! |------|-------|-----------|
//! | `euclidean` | standard coordinates | `dim` |
//! | `shell` | ambient `ℝ³` coordinates | 3 |
//! | `unit_sphere` | ambient `ℝ³` coordinates | 3 |
//! | `spd` | packed upper triangle (see below) | `n(n+1)/2` |
//! | `gaussian_param` | mean followed by packed covariance | `n + n(n+1)/2` |
//! | `fisher_half_plane` | `(μ, σ)` with `σ > 0` | 2 |
//! | `product` | concatenation of the factor charts | sum |
//!
//! Symmetric matrices are packed row by row over the upper triangle, with the
//! off-diagonal entries multiplied by `√2`. With that scaling the Euclidean
//! norm of the packed vector equals the Frobenius norm `√tr(AᵀA)`, so flat
//! `L²` distances in the chart are distances for the trace inner product.

use std::f64::consts::SQRT_2;
use std::ops::Deref;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum eigenvalue accepted for a positive definite matrix.
pub const SPD_EPS: f64 = 1e-10;

/// Allowed deviation of `|x|` from 1 for points of the unit sphere.
pub const SPHERE_TOL: f64 = 1e-9;

/// Dσ² coefficient of the Fisher metric of the univariate normal family,
/// `ds² = (dμ² + 2 dσ²) / σ²`. The value is the one reproduced by the
/// quadrature in [`crate::gaussian::fisher_metric_numeric`].
pub const FISHER_SIGMA_COEFF: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point outside manifold: {constraint}")]
    Outside { constraint: String },
    #[error("{0}")]
    InvalidSpec(String),
    #[error("a product manifold needs at least 2 factors, got {0}")]
    TooFewFactors(usize),
    #[error("L^{p} distance is not supported on {kind}")]
    NormUnsupported { kind: &'static str, p: f64 },
    #[error("invalid norm order {0}; expected p >= 1")]
    InvalidNormOrder(f64),
    #[error("the chord leaves the shell (min |x|^2 = {min_sq} <= a = {a}); use a mesh geodesic")]
    ChordLeavesShell { min_sq: f64, a: f64 },
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

/// A point in the chart of some manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientPoint(pub Vec<f64>);

impl Deref for AmbientPoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for AmbientPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for AmbientPoint {
    fn from(coords: Vec<f64>) -> Self {
        AmbientPoint(coords)
    }
}

impl<const N: usize> From<[f64; N]> for AmbientPoint {
    fn from(coords: [f64; N]) -> Self {
        AmbientPoint(coords.to_vec())
    }
}

/// Description of an ambient Riemannian manifold.
///
/// Construct through the checked constructors or deserialize from JSON; both
/// paths enforce the invariants (`0 < a < b`, `n >= 1`, nonempty boxes, at
/// least two product factors).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub enum ManifoldSpec {
    Euclidean { dim: usize },
    /// `{ v ∈ ℝ³ : a < |v|² < b }` with the induced metric.
    SphericalShell { a: f64, b: f64 },
    UnitSphere,
    Spd { n: usize },
    /// `Ω × P_n` with `Ω` an open axis-aligned box.
    GaussianParam { n: usize, domain_box: Vec<[f64; 2]> },
    FisherHalfPlane,
    Product { factors: Vec<ManifoldSpec> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SpecRepr {
    Euclidean {
        dim: usize,
    },
    Shell {
        a: f64,
        b: f64,
    },
    UnitSphere,
    Spd {
        n: usize,
    },
    GaussianParam {
        n: usize,
        #[serde(rename = "box")]
        domain_box: Vec<[f64; 2]>,
    },
    FisherHalfPlane,
    Product {
        factors: Vec<ManifoldSpec>,
    },
}

impl TryFrom<SpecRepr> for ManifoldSpec {
    type Error = GeometryError;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        match repr {
            SpecRepr::Euclidean { dim } => ManifoldSpec::euclidean(dim),
            SpecRepr::Shell { a, b } => ManifoldSpec::shell(a, b),
            SpecRepr::UnitSphere => Ok(ManifoldSpec::UnitSphere),
            SpecRepr::Spd { n } => ManifoldSpec::spd(n),
            SpecRepr::GaussianParam { n, domain_box } => ManifoldSpec::gaussian_param(n, domain_box),
            SpecRepr::FisherHalfPlane => Ok(ManifoldSpec::FisherHalfPlane),
            SpecRepr::Product { factors } => product_manifold(factors),
        }
    }
}

impl From<ManifoldSpec> for SpecRepr {
    fn from(spec: ManifoldSpec) -> Self {
        match spec {
            ManifoldSpec::Euclidean { dim } => SpecRepr::Euclidean { dim },
            ManifoldSpec::SphericalShell { a, b } => SpecRepr::Shell { a, b },
            ManifoldSpec::UnitSphere => SpecRepr::UnitSphere,
            ManifoldSpec::Spd { n } => SpecRepr::Spd { n },
            ManifoldSpec::GaussianParam { n, domain_box } => SpecRepr::GaussianParam { n, domain_box },
            ManifoldSpec::FisherHalfPlane => SpecRepr::FisherHalfPlane,
            ManifoldSpec::Product { factors } => SpecRepr::Product { factors },
        }
    }
}

impl ManifoldSpec {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeometryError::InvalidSpec("euclidean dimension must be >= 1".into()));
        }
        Ok(ManifoldSpec::Euclidean { dim })
    }

    pub fn shell(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 < a && a < b) {
            return Err(GeometryError::InvalidSpec(format!(
                "shell requires 0 < a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(ManifoldSpec::SphericalShell { a, b })
    }

    pub fn spd(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GeometryError::InvalidSpec("spd requires n >= 1".into()));
        }
        Ok(ManifoldSpec::Spd { n })
    }

    pub fn gaussian_param(n: usize, domain_box: Vec<[f64; 2]>) -> Result<Self> {
        if n == 0 {
            return Err(GeometryError::InvalidSpec("gaussian_param requires n >= 1".into()));
        }
        if domain_box.len() != n {
            return Err(GeometryError::InvalidSpec(format!(
                "gaussian_param box has {} intervals, expected {n}",
                domain_box.len()
            )));
        }
        if let Some([lo, hi]) = domain_box.iter().find(|[lo, hi]| !(lo < hi)) {
            return Err(GeometryError::InvalidSpec(format!("empty box interval [{lo}, {hi}]")));
        }
        Ok(ManifoldSpec::GaussianParam { n, domain_box })
    }

    /// Short name used in error messages and reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ManifoldSpec::Euclidean { .. } => "euclidean",
            ManifoldSpec::SphericalShell { .. } => "shell",
            ManifoldSpec::UnitSphere => "unit_sphere",
            ManifoldSpec::Spd { .. } => "spd",
            ManifoldSpec::GaussianParam { .. } => "gaussian_param",
            ManifoldSpec::FisherHalfPlane => "fisher_half_plane",
            ManifoldSpec::Product { .. } => "product",
        }
    }

    /// Number of chart coordinates.
    pub fn chart_dim(&self) -> usize {
        match self {
            ManifoldSpec::Euclidean { dim } => *dim,
            ManifoldSpec::SphericalShell { .. } | ManifoldSpec::UnitSphere => 3,
            ManifoldSpec::Spd { n } => packed_len(*n),
            ManifoldSpec::GaussianParam { n, .. } => n + packed_len(*n),
            ManifoldSpec::FisherHalfPlane => 2,
            ManifoldSpec::Product { factors } => factors.iter().map(ManifoldSpec::chart_dim).sum(),
        }
    }

    /// True when the chart is a flat open subset of `ℝᴺ` with the Euclidean
    /// metric, so every `L^p` distance is defined.
    pub fn is_flat(&self) -> bool {
        match self {
            ManifoldSpec::Euclidean { .. } | ManifoldSpec::Spd { .. } | ManifoldSpec::GaussianParam { .. } => true,
            ManifoldSpec::Product { factors } => factors.iter().all(ManifoldSpec::is_flat),
            _ => false,
        }
    }

    /// Splits a product chart vector into factor slices.
    pub fn split<'a>(&self, coords: &'a [f64]) -> Vec<&'a [f64]> {
        match self {
            ManifoldSpec::Product { factors } => {
                let mut out = Vec::with_capacity(factors.len());
                let mut offset = 0;
                for f in factors {
                    let d = f.chart_dim();
                    out.push(&coords[offset..offset + d]);
                    offset += d;
                }
                out
            }
            _ => vec![coords],
        }
    }
}

fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Builds a product manifold; the chart is the concatenation of factor charts.
pub fn product_manifold(factors: Vec<ManifoldSpec>) -> Result<ManifoldSpec> {
    if factors.len() < 2 {
        return Err(GeometryError::TooFewFactors(factors.len()));
    }
    Ok(ManifoldSpec::Product { factors })
}

/// Packs a symmetric matrix into the scaled upper-triangle chart.
pub fn pack_symmetric(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(packed_len(n));
    for i in 0..n {
        for j in i..n {
            if i == j {
                out.push(m[(i, j)]);
            } else {
                out.push(0.5 * (m[(i, j)] + m[(j, i)]) * SQRT_2);
            }
        }
    }
    out
}

/// Inverse of [`pack_symmetric`].
pub fn unpack_symmetric(n: usize, packed: &[f64]) -> Result<DMatrix<f64>> {
    check_dim(packed_len(n), packed)?;
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let v = if i == j { packed[k] } else { packed[k] / SQRT_2 };
            m[(i, j)] = v;
            m[(j, i)] = v;
            k += 1;
        }
    }
    Ok(m)
}

/// `tr(AᵀB)`, the inner product behind the `P_n` and configuration metrics.
pub fn trace_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a.transpose() * b).trace()
}

fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(GeometryError::DimensionMismatch { expected, got: x.len() });
    }
    Ok(())
}

fn outside(constraint: impl Into<String>) -> GeometryError {
    GeometryError::Outside { constraint: constraint.into() }
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn check_spd(n: usize, packed: &[f64]) -> Result<()> {
    let m = unpack_symmetric(n, packed)?;
    let min_eig = SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_eig > SPD_EPS) {
        return Err(outside(format!("minimum eigenvalue {min_eig} <= spd_eps {SPD_EPS}")));
    }
    Ok(())
}

/// Checks that `x` lies strictly inside `m`.
pub fn validate_point(m: &ManifoldSpec, x: &[f64]) -> Result<()> {
    check_dim(m.chart_dim(), x)?;
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(outside(format!("coordinate {i} is not finite")));
    }
    match m {
        ManifoldSpec::Euclidean { .. } => Ok(()),
        ManifoldSpec::SphericalShell { a, b } => {
            let r2 = norm_sq(x);
            if r2 <= *a {
                Err(outside(format!("|x|^2 = {r2} is not > a = {a}")))
            } else if r2 >= *b {
                Err(outside(format!("|x|^2 = {r2} is not < b = {b}")))
            } else {
                Ok(())
            }
        }
        ManifoldSpec::UnitSphere => {
            let r = norm_sq(x).sqrt();
            if (r - 1.0).abs() > SPHERE_TOL {
                Err(outside(format!("|x| = {r} is not 1")))
            } else {
                Ok(())
            }
        }
        ManifoldSpec::Spd { n } => check_spd(*n, x),
        ManifoldSpec::GaussianParam { n, domain_box } => {
            for (i, (mu, [lo, hi])) in x[..*n].iter().zip(domain_box).enumerate() {
                if !(lo < mu && mu < hi) {
                    return Err(outside(format!("mean coordinate {i} = {mu} not inside ({lo}, {hi})")));
                }
            }
            check_spd(*n, &x[*n..])
        }
        ManifoldSpec::FisherHalfPlane => {
            if x[1] > 0.0 {
                Ok(())
            } else {
                Err(outside(format!("sigma = {} is not > 0", x[1])))
            }
        }
        ManifoldSpec::Product { factors } => {
            for (k, (f, part)) in factors.iter().zip(m.split(x)).enumerate() {
                validate_point(f, part).map_err(|e| match e {
                    GeometryError::Outside { constraint } => outside(format!("factor {k}: {constraint}")),
                    other => other,
                })?;
            }
            Ok(())
        }
    }
}

/// `‖x − y‖_p` of two coordinate vectors. `p = ∞` gives the max norm.
pub fn lp_distance(x: &[f64], y: &[f64], p: f64) -> f64 {
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p == 1.0 {
        diffs.sum()
    } else if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Smallest `|x + t(y − x)|²` over `t ∈ [0, 1]`.
fn chord_min_norm_sq(x: &[f64], y: &[f64]) -> f64 {
    let d: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let dd = norm_sq(&d);
    if dd == 0.0 {
        return norm_sq(x);
    }
    let t = (-x.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / dd).clamp(0.0, 1.0);
    x.iter().zip(&d).map(|(a, b)| (a + t * b).powi(2)).sum()
}

/// True when the straight segment between two shell points stays in the shell.
pub fn chord_in_shell(a: f64, x: &[f64], y: &[f64]) -> bool {
    chord_min_norm_sq(x, y) > a
}

/// Distance between two points of `m`.
///
/// Flat kinds return the chart `L^p` distance. The unit sphere returns the
/// great-circle distance and ignores `p`. The shell returns the chord length
/// (`p = 2` only), which is the intrinsic distance exactly when the chord
/// stays inside the shell; otherwise [`GeometryError::ChordLeavesShell`] is
/// returned and callers should use a mesh geodesic instead. Products with
/// curved factors aggregate factor distances as `√Σ dₖ²` and support `p = 2`
/// only.
pub fn distance(m: &ManifoldSpec, x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(GeometryError::InvalidNormOrder(p));
    }
    check_dim(m.chart_dim(), x)?;
    check_dim(m.chart_dim(), y)?;
    if m.is_flat() {
        return Ok(lp_distance(x, y, p));
    }
    match m {
        ManifoldSpec::UnitSphere => {
            let cos = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / (norm_sq(x) * norm_sq(y)).sqrt();
            Ok(cos.clamp(-1.0, 1.0).acos())
        }
        ManifoldSpec::SphericalShell { a, .. } => {
            if p != 2.0 {
                return Err(GeometryError::NormUnsupported { kind: m.kind_name(), p });
            }
            let min_sq = chord_min_norm_sq(x, y);
            if min_sq <= *a {
                return Err(GeometryError::ChordLeavesShell { min_sq, a: *a });
            }
            Ok(lp_distance(x, y, 2.0))
        }
        ManifoldSpec::Product { factors } => {
            if p != 2.0 {
                return Err(GeometryError::NormUnsupported { kind: m.kind_name(), p });
            }
            let mut total = 0.0;
            for ((f, xs), ys) in factors.iter().zip(m.split(x)).zip(m.split(y)) {
                total += distance(f, xs, ys, 2.0)?.powi(2);
            }
            Ok(total.sqrt())
        }
        _ => Err(GeometryError::NormUnsupported { kind: m.kind_name(), p }),
    }
}

/// Riemannian norm of a tangent vector `v` at `x`.
///
/// Flat, shell, sphere and product charts use the Euclidean norm of the
/// flattened vector, which is also the trace-metric norm `√tr(MᵀM)` when the
/// vector stacks the columns of a matrix `M`. The Fisher half-plane uses
/// `√(v_μ² + c·v_σ²) / σ` with `c` = [`FISHER_SIGMA_COEFF`].
pub fn tangent_norm(m: &ManifoldSpec, x: &[f64], v: &[f64]) -> Result<f64> {
    check_dim(m.chart_dim(), x)?;
    check_dim(m.chart_dim(), v)?;
    match m {
        ManifoldSpec::FisherHalfPlane => {
            let sigma = x[1];
            Ok((v[0] * v[0] + FISHER_SIGMA_COEFF * v[1] * v[1]).sqrt() / sigma)
        }
        ManifoldSpec::Product { factors } => {
            let mut total = 0.0;
            for ((f, xs), vs) in factors.iter().zip(m.split(x)).zip(m.split(v)) {
                total += tangent_norm(f, xs, vs)?.powi(2);
            }
            Ok(total.sqrt())
        }
        _ => Ok(norm_sq(v).sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(dim: usize) -> ManifoldSpec {
        ManifoldSpec::euclidean(dim).unwrap()
    }

    #[test]
    fn shell_membership() {
        let s = ManifoldSpec::shell(1.0, 4.0).unwrap();
        assert!(validate_point(&s, &[1.5, 0.0, 0.0]).is_ok());
        let err = validate_point(&s, &[1.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, GeometryError::Outside { ref constraint } if constraint.contains("> a")));
        assert!(validate_point(&s, &[2.0, 0.0, 0.0]).is_err());
        assert_eq!(
            validate_point(&s, &[1.5, 0.0]),
            Err(GeometryError::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn spd_membership() {
        let spd = ManifoldSpec::spd(2).unwrap();
        // [[1,2],[2,1]] has eigenvalues 3 and -1.
        let bad = pack_symmetric(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]));
        assert!(validate_point(&spd, &bad).is_err());
        let good = pack_symmetric(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        assert!(validate_point(&spd, &good).is_ok());
        let boundary = pack_symmetric(&DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        assert!(validate_point(&spd, &boundary).is_err());
    }

    #[test]
    fn gaussian_param_membership() {
        let g = ManifoldSpec::gaussian_param(1, vec![[-1.0, 1.0]]).unwrap();
        assert!(validate_point(&g, &[0.0, 1.0]).is_ok());
        assert!(validate_point(&g, &[1.0, 1.0]).is_err());
        assert!(validate_point(&g, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn spec_invariants() {
        assert!(ManifoldSpec::shell(2.0, 1.0).is_err());
        assert!(ManifoldSpec::shell(0.0, 1.0).is_err());
        assert!(ManifoldSpec::spd(0).is_err());
        assert!(ManifoldSpec::gaussian_param(1, vec![]).is_err());
        assert!(ManifoldSpec::gaussian_param(1, vec![[1.0, 1.0]]).is_err());
        assert_eq!(product_manifold(vec![e(1)]), Err(GeometryError::TooFewFactors(1)));
    }

    #[test]
    fn spec_json() {
        let s: ManifoldSpec = serde_json::from_str(r#"{"kind":"shell","a":1.0,"b":4.0}"#).unwrap();
        assert_eq!(s, ManifoldSpec::shell(1.0, 4.0).unwrap());
        let p: ManifoldSpec = serde_json::from_str(
            r#"{"kind":"product","factors":[{"kind":"euclidean","dim":3},{"kind":"spd","n":2}]}"#,
        )
        .unwrap();
        assert_eq!(p.chart_dim(), 6);
        let g: ManifoldSpec =
            serde_json::from_str(r#"{"kind":"gaussian_param","n":2,"box":[[-1,1],[-2,2]]}"#).unwrap();
        assert_eq!(g.chart_dim(), 5);
        let back = serde_json::to_string(&g).unwrap();
        assert!(back.contains(r#""kind":"gaussian_param""#) && back.contains(r#""box""#));
        let f: ManifoldSpec = serde_json::from_str(r#"{"kind":"fisher_half_plane"}"#).unwrap();
        assert_eq!(f, ManifoldSpec::FisherHalfPlane);
        assert!(serde_json::from_str::<ManifoldSpec>(r#"{"kind":"shell","a":4.0,"b":1.0}"#).is_err());
        assert!(serde_json::from_str::<ManifoldSpec>(r#"{"kind":"product","factors":[]}"#).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&e(2), &[0.0, 0.0], &[3.0, 4.0], 2.0).unwrap(), 5.0);
        let d3 = distance(&e(3), &[0.0; 3], &[1.0; 3], 3.0).unwrap();
        assert!((d3 - 3f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let pi = distance(&ManifoldSpec::UnitSphere, &[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], 2.0).unwrap();
        assert!((pi - std::f64::consts::PI).abs() < 1e-15);
        assert!(matches!(
            distance(&ManifoldSpec::FisherHalfPlane, &[0.0, 1.0], &[0.0, 2.0], 2.0),
            Err(GeometryError::NormUnsupported { .. })
        ));
        assert!(matches!(distance(&e(1), &[0.0], &[1.0], 0.5), Err(GeometryError::InvalidNormOrder(_))));
    }

    #[test]
    fn shell_chord_distance() {
        let s = ManifoldSpec::shell(1.0, 4.0).unwrap();
        let d = distance(&s, &[1.5, 0.0, 0.0], &[0.0, 1.5, 0.0], 2.0).unwrap();
        assert!((d - 1.5 * SQRT_2).abs() < 1e-15);
        // Antipodal chord goes through the hole.
        assert!(matches!(
            distance(&s, &[1.5, 0.0, 0.0], &[-1.5, 0.0, 0.0], 2.0),
            Err(GeometryError::ChordLeavesShell { .. })
        ));
        assert!(matches!(
            distance(&s, &[1.5, 0.0, 0.0], &[0.0, 1.5, 0.0], 3.0),
            Err(GeometryError::NormUnsupported { .. })
        ));
    }

    #[test]
    fn product_examples() {
        let r1 = product_manifold(vec![e(1), e(1)]).unwrap();
        assert_eq!(r1.chart_dim(), 2);
        assert_eq!(distance(&r1, &[0.0, 0.0], &[3.0, 4.0], 2.0).unwrap(), 5.0);
        let shells = product_manifold(vec![ManifoldSpec::shell(1.0, 4.0).unwrap(); 2]).unwrap();
        assert_eq!(shells.chart_dim(), 6);
        let r22 = product_manifold(vec![e(2), e(2)]).unwrap();
        assert_eq!(distance(&r22, &[0.0; 4], &[3.0, 0.0, 0.0, 4.0], 2.0).unwrap(), 5.0);
    }

    #[test]
    fn tangent_norm_examples() {
        assert_eq!(tangent_norm(&e(3), &[0.0; 3], &[1.0, 2.0, 2.0]).unwrap(), 3.0);
        let r33 = product_manifold(vec![e(3), e(3)]).unwrap();
        let n = tangent_norm(&r33, &[0.0; 6], &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]).unwrap();
        assert!((n - 5f64.sqrt()).abs() < 1e-15);
        // A 3x2 matrix of ones: tr(MᵀM) = 6, and the column-stacked vector has the same norm.
        let m = DMatrix::from_element(3, 2, 1.0);
        assert_eq!(trace_inner(&m, &m), 6.0);
        let shells = product_manifold(vec![ManifoldSpec::shell(1.0, 4.0).unwrap(); 2]).unwrap();
        let n = tangent_norm(&shells, &[1.5, 0.0, 0.0, 0.0, 1.5, 0.0], m.as_slice()).unwrap();
        assert!((n - 6f64.sqrt()).abs() < 1e-15);
        let f = tangent_norm(&ManifoldSpec::FisherHalfPlane, &[0.0, 2.0], &[1.0, 1.0]).unwrap();
        assert!((f - (3.0f64).sqrt() / 2.0).abs() < 1e-15);
        assert!(tangent_norm(&e(3), &[0.0; 3], &[1.0]).is_err());
    }

    #[test]
    fn packed_chart_norm_is_frobenius() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        let packed = pack_symmetric(&m);
        assert_eq!(packed.len(), 6);
        assert!((norm_sq(&packed) - trace_inner(&m, &m)).abs() < 1e-12);
        assert!((unpack_symmetric(3, &packed).unwrap() - m).abs().max() < 1e-15);
    }

    fn shell_point() -> impl Strategy<Value = Vec<f64>> {
        (1.05f64..1.95, 0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th, ph)| {
            vec![r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]
        })
    }

    fn sphere_point() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, 3)
            .prop_filter("nonzero", |v| norm_sq(v) > 1e-3)
            .prop_map(|v| {
                let r = norm_sq(&v).sqrt();
                v.iter().map(|c| c / r).collect()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn symmetric_and_triangle_flat(
            x in prop::collection::vec(-10.0f64..10.0, 4),
            y in prop::collection::vec(-10.0f64..10.0, 4),
            z in prop::collection::vec(-10.0f64..10.0, 4),
            p in 1.0f64..6.0,
        ) {
            let m = e(4);
            let dxy = distance(&m, &x, &y, p).unwrap();
            prop_assert_eq!(dxy, distance(&m, &y, &x, p).unwrap());
            let dxz = distance(&m, &x, &z, p).unwrap();
            let dyz = distance(&m, &y, &z, p).unwrap();
            prop_assert!(dxz <= dxy + dyz + 1e-12);
        }

        #[test]
        fn lp_nesting(
            x in prop::collection::vec(-10.0f64..10.0, 5),
            y in prop::collection::vec(-10.0f64..10.0, 5),
            p in 1.0f64..4.0,
            dq in 0.0f64..4.0,
        ) {
            let m = e(5);
            let q = p + dq;
            prop_assert!(distance(&m, &x, &y, p).unwrap() >= distance(&m, &x, &y, q).unwrap() - 1e-12);
        }

        #[test]
        fn sphere_metric_axioms(x in sphere_point(), y in sphere_point(), z in sphere_point()) {
            let m = ManifoldSpec::UnitSphere;
            let dxy = distance(&m, &x, &y, 2.0).unwrap();
            prop_assert_eq!(dxy, distance(&m, &y, &x, 2.0).unwrap());
            let dxz = distance(&m, &x, &z, 2.0).unwrap();
            let dyz = distance(&m, &y, &z, 2.0).unwrap();
            prop_assert!(dxz <= dxy + dyz + 1e-12);
        }

        #[test]
        fn shell_distance_symmetric(x in shell_point(), y in shell_point()) {
            let m = ManifoldSpec::shell(1.0, 4.0).unwrap();
            match (distance(&m, &x, &y, 2.0), distance(&m, &y, &x, 2.0)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "asymmetric result {:?}", other),
            }
        }

        #[test]
        fn product_aggregates_factors(
            x in shell_point(), y in shell_point(),
            u in prop::collection::vec(-5.0f64..5.0, 2),
            w in prop::collection::vec(-5.0f64..5.0, 2),
        ) {
            let shell = ManifoldSpec::shell(1.0, 4.0).unwrap();
            prop_assume!(chord_in_shell(1.0, &x, &y));
            let m = product_manifold(vec![shell.clone(), e(2)]).unwrap();
            let xs: Vec<f64> = x.iter().chain(&u).copied().collect();
            let ys: Vec<f64> = y.iter().chain(&w).copied().collect();
            let d = distance(&m, &xs, &ys, 2.0).unwrap();
            let expect = (distance(&shell, &x, &y, 2.0).unwrap().powi(2)
                + distance(&e(2), &u, &w, 2.0).unwrap().powi(2)).sqrt();
            prop_assert!((d - expect).abs() <= 1e-12);
        }
    }
}
