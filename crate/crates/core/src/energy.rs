//! 1-energy and 2-energy of signals, the classical comparison energies, and
//! the signal transforms that relate them.
//!
//! For a curve with `A = γ(0)` the distance `ρ(A, ·)` along the curve is the
//! cumulative arc length `s`, so `E_k = ∫ s^k ds`. Each polyline segment
//! contributes its exact integral, which keeps the upper bounds `ρ(p,q)^{k+1}`
//! and the lower bound of [`crate::gaussian`] exact at the discrete level.
//!
//! Surfaces use the face-mean rule: a face contributes its area times the
//! `k`-th power of the mean of its three vertex distances to `A`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{self, MeshError, PolylinePath, TriMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("the curve is closed: its endpoints coincide")]
    EndpointsCoincide,
    #[error("the path has zero length")]
    DegeneratePath,
    #[error("the source set A is empty")]
    EmptySources,
    #[error("vertex {0} belongs to both A and B")]
    OverlappingSets(usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("the grid must start at 0, starts at {0}")]
    GridNotAtZero(f64),
    #[error("invalid grid [{0}, {1}]")]
    BadGrid(f64, f64),
    #[error("no letters given")]
    EmptyList,
}

pub type Result<T, E = EnergyError> = std::result::Result<T, E>;

/// Energies of a signal together with the upper bounds they are checked
/// against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e1: f64,
    pub e2: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub satisfied: [bool; 2],
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_faces: Option<usize>,
}

impl EnergyReport {
    fn new(e1: f64, e2: f64, bound1: f64, bound2: f64, n_samples: usize, n_faces: Option<usize>) -> Self {
        EnergyReport { e1, e2, bound1, bound2, satisfied: [e1 <= bound1, e2 <= bound2], n_samples, n_faces }
    }

    pub fn all_satisfied(&self) -> bool {
        self.satisfied.iter().all(|&s| s)
    }
}

/// A 1-dimensional signal with `A = γ(0)` and `B = γ(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalCurve {
    path: PolylinePath,
}

impl SignalCurve {
    pub fn new(path: PolylinePath) -> Result<Self> {
        if path.start() == path.end() {
            return Err(EnergyError::EndpointsCoincide);
        }
        if mesh::arc_length(&path) <= 0.0 {
            return Err(EnergyError::DegeneratePath);
        }
        Ok(SignalCurve { path })
    }

    pub fn path(&self) -> &PolylinePath {
        &self.path
    }
}

/// `(∫ s ds, ∫ s² ds)` over consecutive segments of the given lengths, with
/// the arc-length parameter starting at `offset`. Zero-length segments are
/// allowed and contribute nothing.
pub fn arc_energy_integrals(segment_lengths: &[f64], offset: f64) -> (f64, f64) {
    let mut s = offset;
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    for &ds in segment_lengths {
        let mid = s + 0.5 * ds;
        e1 += mid * ds;
        e2 += (mid * mid + ds * ds / 12.0) * ds;
        s += ds;
    }
    (e1, e2)
}

/// `E1 = ∫ ρ(A,τ) ds`, `E2 = ∫ ρ(A,τ)² ds` along the curve, with bounds
/// `ρ(p,q)²` and `ρ(p,q)³` where `ρ(p,q)` is the arc length.
pub fn curve_energy(sig: &SignalCurve) -> EnergyReport {
    let lengths = sig.path.segment_lengths();
    let (e1, e2) = arc_energy_integrals(lengths, 0.0);
    let rho = mesh::arc_length(&sig.path);
    EnergyReport::new(e1, e2, rho * rho, rho * rho * rho, sig.path.samples().len(), None)
}

/// A 2-dimensional signal: the mesh's source set plays `A`, `targets` plays `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRegion {
    mesh: TriMesh,
    targets: Vec<usize>,
}

impl SignalRegion {
    pub fn new(mesh: TriMesh, targets: Vec<usize>) -> Result<Self> {
        if mesh.sources().is_empty() {
            return Err(EnergyError::EmptySources);
        }
        if let Some(&v) = targets.iter().find(|t| mesh.sources().contains(t)) {
            return Err(EnergyError::OverlappingSets(v));
        }
        for &t in &targets {
            if t >= mesh.vertices().len() {
                return Err(MeshError::VertexIndex(t).into());
            }
        }
        Ok(SignalRegion { mesh, targets })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

/// Region energies with bounds `diam·vol` and `diam²·vol` from the same mesh.
pub fn region_energy(sig: &SignalRegion) -> Result<EnergyReport> {
    let m = &sig.mesh;
    let dist = mesh::geodesic_distance_field(m, m.sources())?;
    let areas = mesh::face_areas(m);
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    for (f, area) in m.faces().iter().zip(&areas) {
        let mean = (dist[f[0]] + dist[f[1]] + dist[f[2]]) / 3.0;
        e1 += area * mean;
        e2 += area * mean * mean;
    }
    let vol = mesh::mesh_area(m);
    let diam = mesh::mesh_diameter(m);
    Ok(EnergyReport::new(e1, e2, diam * vol, diam * diam * vol, m.vertices().len(), Some(m.faces().len())))
}

/// Sum of the letters' energies, `(ΣE1, ΣE2)`.
pub fn word_energy(letters: &[EnergyReport]) -> Result<(f64, f64)> {
    if letters.is_empty() {
        return Err(EnergyError::EmptyList);
    }
    Ok(letters.iter().fold((0.0, 0.0), |(a, b), r| (a + r.e1, b + r.e2)))
}

/// Samples of a function on a uniform grid over `[x0, x1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionTable {
    pub x0: f64,
    pub x1: f64,
    pub values: Vec<f64>,
}

impl FunctionTable {
    pub fn new(x0: f64, x1: f64, values: Vec<f64>) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && x1 > x0) {
            return Err(EnergyError::BadGrid(x0, x1));
        }
        Ok(FunctionTable { x0, x1, values })
    }

    /// Tabulates `f` at `samples` uniformly spaced points.
    pub fn sample(x0: f64, x1: f64, samples: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let table = FunctionTable::new(x0, x1, Vec::new())?;
        let values = (0..samples).map(|i| f(table.x_at_count(i, samples))).collect();
        Ok(FunctionTable { values, ..table })
    }

    fn x_at_count(&self, i: usize, count: usize) -> f64 {
        if count <= 1 || i + 1 == count {
            return if i == 0 { self.x0 } else { self.x1 };
        }
        self.x0 + (self.x1 - self.x0) * i as f64 / (count - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_at_count(i, self.values.len())
    }

    pub fn step(&self) -> f64 {
        (self.x1 - self.x0) / (self.values.len() - 1) as f64
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.values.len() < needed {
            return Err(EnergyError::TooFewSamples { needed, got: self.values.len() });
        }
        Ok(())
    }
}

fn trapezoid(h: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    let mut sum = 0.0;
    for (i, v) in values.enumerate() {
        sum += if i == 0 || i + 1 == n { 0.5 * v } else { v };
    }
    sum * h
}

/// Second-order finite-difference derivative on the grid.
pub fn derivative(table: &FunctionTable) -> Result<Vec<f64>> {
    table.require(3)?;
    let f = &table.values;
    let n = f.len();
    let h = table.step();
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h));
    for i in 1..n - 1 {
        d.push((f[i + 1] - f[i - 1]) / (2.0 * h));
    }
    d.push((3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h));
    Ok(d)
}

/// `E_Riem(f) = ½ ∫ (1 + f′²) dx`.
pub fn riemannian_energy(table: &FunctionTable) -> Result<f64> {
    let d = derivative(table)?;
    Ok(trapezoid(table.step(), d.iter().map(|v| 0.5 * (1.0 + v * v))))
}

/// `E_sp(f) = ∫ f² dx`.
pub fn sp_energy(table: &FunctionTable) -> Result<f64> {
    table.require(2)?;
    Ok(trapezoid(table.step(), table.values.iter().map(|v| v * v)))
}

/// `F(x) = ∫₀ˣ f`, by cumulative trapezoid. The grid must start at 0.
pub fn antiderivative_transform(table: &FunctionTable) -> Result<FunctionTable> {
    table.require(2)?;
    if table.x0 != 0.0 {
        return Err(EnergyError::GridNotAtZero(table.x0));
    }
    let h = table.step();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(table.values.len());
    out.push(0.0);
    for w in table.values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    Ok(FunctionTable { values: out, ..table.clone() })
}

/// `L(x) = √(∫₀ˣ |f′(t)| dt)`, with the integral taken as the cumulative
/// variation of the samples.
///
/// This is the square root of the total variation of `f`, not of the arc
/// length `∫ √(1 + f′²)` of its graph; the two differ unless `f` is constant.
pub fn sqrt_arclength_transform(table: &FunctionTable) -> Result<FunctionTable> {
    table.require(3)?;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(table.values.len());
    out.push(0.0);
    for w in table.values.windows(2) {
        acc += (w[1] - w[0]).abs();
        out.push(acc.sqrt());
    }
    Ok(FunctionTable { values: out, ..table.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AmbientPoint, ManifoldSpec};
    use crate::mesh::{rectangle_grid, triangulate_sphere};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn r2() -> ManifoldSpec {
        ManifoldSpec::Euclidean { dim: 2 }
    }

    fn curve(points: Vec<Vec<f64>>) -> SignalCurve {
        let dim = points[0].len();
        let path = PolylinePath::uniform(ManifoldSpec::Euclidean { dim }, points.into_iter().map(AmbientPoint).collect())
            .unwrap();
        SignalCurve::new(path).unwrap()
    }

    fn segment(k: usize) -> SignalCurve {
        curve((0..=k).map(|i| vec![i as f64 / k as f64, 0.0]).collect())
    }

    #[test]
    fn straight_segment_energies() {
        let r = curve_energy(&segment(10_000));
        assert!((r.e1 - 0.5).abs() < 1e-6);
        assert!((r.e2 - 1.0 / 3.0).abs() < 1e-6);
        assert_eq!(r.satisfied, [true, true]);
        // Exact per-segment integration makes a single chord exact too.
        let one = curve_energy(&segment(1));
        assert!((one.e2 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn half_circle_energies() {
        let k = 10_000;
        let r = curve_energy(&curve(
            (0..=k).map(|i| {
                let t = PI * i as f64 / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        ));
        assert!((r.e1 - PI * PI / 2.0).abs() < 1e-4);
        assert!((r.e2 - PI.powi(3) / 3.0).abs() < 1e-4);
        assert!((r.bound1 - PI * PI).abs() < 1e-4);
        assert!(r.all_satisfied());
    }

    #[test]
    fn closed_curve_rejected() {
        let path =
            PolylinePath::uniform(r2(), vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]].into_iter().map(AmbientPoint).collect())
                .unwrap();
        assert_eq!(SignalCurve::new(path), Err(EnergyError::EndpointsCoincide));
    }

    #[test]
    fn rectangle_region() {
        let g = rectangle_grid([-1.0, 1.0], [0.0, 1.0], 0.05).unwrap();
        let mesh = g.mesh.with_sources(g.top.clone()).unwrap();
        let r = region_energy(&SignalRegion::new(mesh, g.bottom).unwrap()).unwrap();
        assert!((r.e1 - 1.0).abs() < 0.02);
        assert!((r.e2 - 2.0 / 3.0).abs() / (2.0 / 3.0) < 0.02);
        assert!(r.all_satisfied());
    }

    #[test]
    fn region_all_sources() {
        let g = rectangle_grid([0.0, 1.0], [0.0, 1.0], 0.25).unwrap();
        let all: Vec<usize> = (0..g.mesh.vertices().len()).collect();
        let r = region_energy(&SignalRegion::new(g.mesh.with_sources(all).unwrap(), vec![]).unwrap()).unwrap();
        assert_eq!((r.e1, r.e2), (0.0, 0.0));
    }

    #[test]
    fn region_set_errors() {
        let g = rectangle_grid([0.0, 1.0], [0.0, 1.0], 0.5).unwrap();
        assert_eq!(SignalRegion::new(g.mesh.clone(), vec![0]), Err(EnergyError::EmptySources));
        let m = g.mesh.with_sources(vec![0, 1]).unwrap();
        assert_eq!(SignalRegion::new(m, vec![1]), Err(EnergyError::OverlappingSets(1)));
    }

    #[test]
    fn sphere_region_bound() {
        let m = triangulate_sphere(2).unwrap();
        let a = m.marks().0.unwrap();
        let r = region_energy(&SignalRegion::new(m.with_sources(vec![a]).unwrap(), vec![]).unwrap()).unwrap();
        assert!(r.e1 <= r.bound1 && r.e2 <= r.bound2);
    }

    #[test]
    fn word_energy_examples() {
        let g = rectangle_grid([-1.0, 1.0], [0.0, 1.0], 0.05).unwrap();
        let mesh = g.mesh.with_sources(g.top).unwrap();
        let rect = region_energy(&SignalRegion::new(mesh, vec![]).unwrap()).unwrap();
        assert_eq!(word_energy(std::slice::from_ref(&rect)).unwrap(), (rect.e1, rect.e2));
        let (e1, _) = word_energy(&[rect.clone(), rect.clone()]).unwrap();
        assert!((e1 - 2.0).abs() / 2.0 < 0.04);
        let zero = EnergyReport::new(0.0, 0.0, 0.0, 0.0, 2, None);
        assert_eq!(word_energy(&[zero.clone(), zero]).unwrap(), (0.0, 0.0));
        assert_eq!(word_energy(&[]), Err(EnergyError::EmptyList));
    }

    #[test]
    fn report_json_shape() {
        let r = curve_energy(&segment(2));
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["e1", "e2", "bound1", "bound2", "satisfied", "n_samples"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v.get("n_faces").is_none());
    }

    #[test]
    fn riemannian_energy_examples() {
        let c = FunctionTable::sample(0.0, 3.0, 31, |_| 2.5).unwrap();
        assert!((riemannian_energy(&c).unwrap() - 1.5).abs() < 1e-15);
        let id = FunctionTable::sample(0.0, 3.0, 31, |x| x).unwrap();
        assert!((riemannian_energy(&id).unwrap() - 3.0).abs() < 1e-9);
        let two = FunctionTable::new(0.0, 3.0, vec![0.0, 1.0]).unwrap();
        assert_eq!(riemannian_energy(&two), Err(EnergyError::TooFewSamples { needed: 3, got: 2 }));
    }

    #[test]
    fn sp_energy_examples() {
        let one = FunctionTable::sample(0.0, 3.0, 11, |_| 1.0).unwrap();
        assert!((sp_energy(&one).unwrap() - 3.0).abs() < 1e-15);
        let id = FunctionTable::sample(0.0, 1.0, 10_000, |x| x).unwrap();
        assert!((sp_energy(&id).unwrap() - 1.0 / 3.0).abs() < 1e-6);
        let zero = FunctionTable::sample(0.0, 1.0, 5, |_| 0.0).unwrap();
        assert_eq!(sp_energy(&zero).unwrap(), 0.0);
        assert!(sp_energy(&FunctionTable::new(0.0, 1.0, vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn antiderivative_examples() {
        let one = FunctionTable::sample(0.0, 3.0, 31, |_| 1.0).unwrap();
        let f = antiderivative_transform(&one).unwrap();
        assert!(f.values.iter().enumerate().all(|(i, &v)| (v - f.x(i)).abs() < 1e-13));
        let lin = FunctionTable::sample(0.0, 1.0, 2001, |x| 2.0 * x).unwrap();
        let f = antiderivative_transform(&lin).unwrap();
        assert!(f.values.iter().enumerate().all(|(i, &v)| (v - f.x(i).powi(2)).abs() < 1e-6));
        let zero = FunctionTable::sample(0.0, 1.0, 5, |_| 0.0).unwrap();
        assert!(antiderivative_transform(&zero).unwrap().values.iter().all(|&v| v == 0.0));
        let shifted = FunctionTable::sample(1.0, 2.0, 5, |_| 1.0).unwrap();
        assert_eq!(antiderivative_transform(&shifted), Err(EnergyError::GridNotAtZero(1.0)));
    }

    #[test]
    fn antiderivative_recovers_f() {
        let f = FunctionTable::sample(0.0, 3.0, 3001, |x| (2.0 * x).sin() + x).unwrap();
        let big_f = antiderivative_transform(&f).unwrap();
        let h = big_f.step();
        for i in 0..big_f.values.len() - 1 {
            let fd = (big_f.values[i + 1] - big_f.values[i]) / h;
            assert!((fd - f.values[i]).abs() < 3.0 * h);
        }
    }

    #[test]
    fn sqrt_arclength_examples() {
        let id = FunctionTable::sample(0.0, 3.0, 10_001, |x| x).unwrap();
        let l = sqrt_arclength_transform(&id).unwrap();
        assert!(l.values.iter().enumerate().all(|(i, &v)| (v - l.x(i).sqrt()).abs() < 1e-9));
        assert!((sp_energy(&l).unwrap() - 4.5).abs() < 1e-3);
        let c = FunctionTable::sample(0.0, 3.0, 101, |_| 7.0).unwrap();
        let l = sqrt_arclength_transform(&c).unwrap();
        assert!(l.values.iter().all(|&v| v == 0.0));
        assert_eq!(sp_energy(&l).unwrap(), 0.0);
        // Monotone: ∫₀³ (f(x) − f(0)) dx for f = x³/9 is 3⁴/36.
        let cubic = FunctionTable::sample(0.0, 3.0, 10_001, |x| x.powi(3) / 9.0).unwrap();
        let l = sqrt_arclength_transform(&cubic).unwrap();
        assert!((sp_energy(&l).unwrap() - 81.0 / 36.0).abs() < 1e-3);
    }

    #[test]
    fn scaling_law_exact_for_powers_of_two() {
        let base: Vec<Vec<f64>> = vec![vec![0.0, 0.0, 0.0], vec![0.3, 0.1, 0.2], vec![0.5, 0.7, 0.2], vec![1.1, 0.9, 0.6]];
        let r = curve_energy(&curve(base.clone()));
        for alpha in [0.5, 2.0, 8.0] {
            let scaled = curve_energy(&curve(base.iter().map(|p| p.iter().map(|c| c * alpha).collect()).collect()));
            assert_eq!(scaled.e1, r.e1 * alpha * alpha);
            assert_eq!(scaled.e2, r.e2 * alpha * alpha * alpha);
        }
    }

    fn random_curve() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (2usize..4, 2usize..40).prop_flat_map(|(dim, k)| {
            prop::collection::vec(prop::collection::vec(0.001f64..1.0, dim), k).prop_map(move |steps| {
                let mut p = vec![0.0; dim];
                let mut out = vec![p.clone()];
                for s in steps {
                    for (c, d) in p.iter_mut().zip(&s) {
                        *c += d;
                    }
                    out.push(p.clone());
                }
                out
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn upper_bounds_hold(points in random_curve()) {
            let r = curve_energy(&curve(points));
            prop_assert!(r.e1 <= r.bound1 + 1e-9 * r.bound1);
            prop_assert!(r.e2 <= r.bound2 + 1e-9 * r.bound2);
            prop_assert!(r.all_satisfied());
        }

        #[test]
        fn additive_under_concatenation(points in random_curve()) {
            let sig = curve(points);
            let lengths = sig.path().segment_lengths();
            let half = lengths.len() / 2;
            let (a1, a2) = arc_energy_integrals(&lengths[..half], 0.0);
            let s_half: f64 = lengths[..half].iter().sum();
            let (b1, b2) = arc_energy_integrals(&lengths[half..], s_half);
            let whole = curve_energy(&sig);
            prop_assert!((whole.e1 - (a1 + b1)).abs() <= 1e-12 * whole.e1.max(1.0));
            prop_assert!((whole.e2 - (a2 + b2)).abs() <= 1e-12 * whole.e2.max(1.0));
        }

        #[test]
        fn scaling_law(points in random_curve(), alpha in 0.01f64..100.0) {
            let r = curve_energy(&curve(points.clone()));
            let scaled: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|c| c * alpha).collect()).collect();
            let s = curve_energy(&curve(scaled));
            prop_assert!((s.e1 - r.e1 * alpha.powi(2)).abs() <= 1e-12 * s.e1);
            prop_assert!((s.e2 - r.e2 * alpha.powi(3)).abs() <= 1e-12 * s.e2);
        }
    }
}
