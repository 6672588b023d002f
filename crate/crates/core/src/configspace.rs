//! Ordered configuration spaces `C_n(M)` with the product metric, path
//! energies in them, and checks of the energy inequalities for moving
//! particles.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{self, EnergyError, EnergyReport, SignalCurve};
use crate::gaussian::monotone_coordinates;
use crate::geometry::{self, AmbientPoint, GeometryError, ManifoldSpec};
use crate::mesh::{MeshError, PolylinePath};
use crate::sampling::{self, SamplingError, MAX_REJECTIONS};

/// Minimum chart distance between two particles of a configuration.
pub const COLLISION_EPS: f64 = 1e-9;

/// Interior points checked on each chord between consecutive configurations.
pub const CHORD_CHECKS: usize = 32;

/// Relative slack on `E_k ≥ E_k^(j)`.
pub const COMPONENT_SLACK: f64 = 1e-12;

/// Absolute slack on `E2 ≥ ⅓‖B − A‖₃³`.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

/// Seed of the hull probe used by [`check_config_bounds`].
pub const HULL_SEED: u64 = 0xc0f1_6a11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("a configuration needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("point {index} is not in the manifold: {source}")]
    InvalidPoint { index: usize, source: GeometryError },
    #[error("points {i} and {j} collide (gap {gap} <= {COLLISION_EPS})")]
    Collision { i: usize, j: usize, gap: f64 },
    #[error("configuration {step} has {got} points, expected {expected}")]
    ParticleCount { step: usize, expected: usize, got: usize },
    #[error("configuration {step}: {source}")]
    InvalidConfiguration { step: usize, source: Box<ConfigError> },
    #[error("a path needs at least 2 configurations, got {0}")]
    TooFewConfigs(usize),
    #[error("params must increase strictly from 0 to 1")]
    BadParams,
    #[error("the path starts and ends at the same configuration")]
    SameEndpoints,
    #[error("step {step}: points {i} and {j} collide inside the chord (gap {gap})")]
    MidChordCollision { step: usize, i: usize, j: usize, gap: f64 },
    #[error("step {step}: particle {particle} leaves the manifold along its chord")]
    ChordLeavesManifold { step: usize, particle: usize },
    #[error("particle index {index} out of range for {n} particles")]
    ParticleOutOfRange { index: usize, n: usize },
}

pub type Result<T, E = ConfigError> = std::result::Result<T, E>;

/// Ordered tuple of pairwise distinct points of a factor manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    manifold: ManifoldSpec,
    points: Vec<AmbientPoint>,
}

fn gap(x: &[f64], y: &[f64]) -> f64 {
    geometry::lp_distance(x, y, 2.0)
}

fn check_collisions<P: AsRef<[f64]>>(points: &[P]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let g = gap(points[i].as_ref(), points[j].as_ref());
            if !(g > COLLISION_EPS) {
                return Err(ConfigError::Collision { i, j, gap: g });
            }
        }
    }
    Ok(())
}

/// Validates every point and the pairwise collision margin.
pub fn make_configuration(m: &ManifoldSpec, pts: Vec<AmbientPoint>) -> Result<Configuration> {
    if pts.len() < 2 {
        return Err(ConfigError::TooFewPoints(pts.len()));
    }
    for (index, p) in pts.iter().enumerate() {
        geometry::validate_point(m, p).map_err(|source| ConfigError::InvalidPoint { index, source })?;
    }
    check_collisions(&pts)?;
    Ok(Configuration { manifold: m.clone(), points: pts })
}

impl Configuration {
    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn points(&self) -> &[AmbientPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest pairwise chart distance.
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.min(gap(&self.points[i], &self.points[j]));
            }
        }
        best
    }

    /// Concatenated chart coordinates, a point of `M × … × M`.
    pub fn flatten(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p.iter().copied()).collect()
    }

    /// The product manifold `Mⁿ` that contains this configuration.
    pub fn product_spec(&self) -> ManifoldSpec {
        geometry::product_manifold(vec![self.manifold.clone(); self.points.len()]).expect("n >= 2")
    }
}

/// Polyline in `C_n(M)` through configurations at increasing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigPathRepr", into = "ConfigPathRepr")]
pub struct ConfigPath {
    manifold: ManifoldSpec,
    params: Vec<f64>,
    configs: Vec<Configuration>,
}

#[derive(Serialize, Deserialize)]
struct ConfigPathRepr {
    manifold: ManifoldSpec,
    n: usize,
    params: Vec<f64>,
    configs: Vec<Vec<AmbientPoint>>,
}

impl TryFrom<ConfigPathRepr> for ConfigPath {
    type Error = ConfigError;

    fn try_from(r: ConfigPathRepr) -> Result<Self> {
        if let Some((step, c)) = r.configs.iter().enumerate().find(|(_, c)| c.len() != r.n) {
            return Err(ConfigError::ParticleCount { step, expected: r.n, got: c.len() });
        }
        ConfigPath::new(r.manifold, r.params, r.configs)
    }
}

impl From<ConfigPath> for ConfigPathRepr {
    fn from(p: ConfigPath) -> Self {
        ConfigPathRepr {
            n: p.particles(),
            manifold: p.manifold,
            params: p.params,
            configs: p.configs.into_iter().map(|c| c.points).collect(),
        }
    }
}

fn lerp(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + t * (b - a)).collect()
}

impl ConfigPath {
    /// Validates every configuration and every chord between consecutive
    /// ones: each particle's chord must stay in `M` (exactly for shells,
    /// radially projected for the sphere) and the particles must keep their
    /// collision margin at [`CHORD_CHECKS`] interior points, and along the
    /// whole chord when particles move on straight lines.
    pub fn new(manifold: ManifoldSpec, params: Vec<f64>, configs: Vec<Vec<AmbientPoint>>) -> Result<Self> {
        if configs.len() < 2 {
            return Err(ConfigError::TooFewConfigs(configs.len()));
        }
        let increasing = params.windows(2).all(|w| w[0] < w[1]);
        if params.len() != configs.len() || !increasing || params[0] != 0.0 || params[params.len() - 1] != 1.0 {
            return Err(ConfigError::BadParams);
        }
        let n = configs[0].len();
        let mut built = Vec::with_capacity(configs.len());
        for (step, pts) in configs.into_iter().enumerate() {
            if pts.len() != n {
                return Err(ConfigError::ParticleCount { step, expected: n, got: pts.len() });
            }
            let c = make_configuration(&manifold, pts)
                .map_err(|e| ConfigError::InvalidConfiguration { step, source: Box::new(e) })?;
            built.push(c);
        }
        if built[0].points == built[built.len() - 1].points {
            return Err(ConfigError::SameEndpoints);
        }
        for (step, w) in built.windows(2).enumerate() {
            check_chord(&manifold, step, &w[0], &w[1])?;
        }
        Ok(ConfigPath { manifold, params, configs: built })
    }

    /// Path with uniformly spaced parameters.
    pub fn uniform(manifold: ManifoldSpec, configs: Vec<Vec<AmbientPoint>>) -> Result<Self> {
        let k = configs.len().saturating_sub(1).max(1);
        let mut params: Vec<f64> = (0..configs.len()).map(|i| i as f64 / k as f64).collect();
        if let Some(last) = params.last_mut() {
            *last = 1.0;
        }
        ConfigPath::new(manifold, params, configs)
    }

    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn particles(&self) -> usize {
        self.configs[0].len()
    }

    /// The path as a polyline in the product manifold `Mⁿ`.
    pub fn flattened(&self) -> Result<PolylinePath> {
        let spec = self.configs[0].product_spec();
        let samples = self.configs.iter().map(|c| AmbientPoint(c.flatten())).collect();
        Ok(PolylinePath::new(spec, self.params.clone(), samples)?)
    }

    /// Trajectory of particle `j` (0-based).
    pub fn component(&self, j: usize) -> Result<Vec<&AmbientPoint>> {
        let n = self.particles();
        if j >= n {
            return Err(ConfigError::ParticleOutOfRange { index: j, n });
        }
        Ok(self.configs.iter().map(|c| &c.points[j]).collect())
    }

    /// Same path with particle labels reordered: particle `k` of the result
    /// is particle `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let configs = self
            .configs
            .iter()
            .map(|c| perm.iter().map(|&k| c.points[k].clone()).collect())
            .collect();
        ConfigPath::new(self.manifold.clone(), self.params.clone(), configs)
    }
}

fn check_chord(m: &ManifoldSpec, step: usize, from: &Configuration, to: &Configuration) -> Result<()> {
    if let ManifoldSpec::SphericalShell { a, .. } = m {
        for (particle, (x, y)) in from.points.iter().zip(&to.points).enumerate() {
            if !geometry::chord_in_shell(*a, x, y) {
                return Err(ConfigError::ChordLeavesManifold { step, particle });
            }
        }
    }
    for s in 1..=CHORD_CHECKS {
        let t = s as f64 / (CHORD_CHECKS + 1) as f64;
        let mut mid: Vec<Vec<f64>> = from.points.iter().zip(&to.points).map(|(x, y)| lerp(x, y, t)).collect();
        if matches!(m, ManifoldSpec::UnitSphere) {
            for p in &mut mid {
                let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                p.iter_mut().for_each(|c| *c /= r);
            }
        }
        for (particle, p) in mid.iter().enumerate() {
            if geometry::validate_point(m, p).is_err() {
                return Err(ConfigError::ChordLeavesManifold { step, particle });
            }
        }
        if let Err(ConfigError::Collision { i, j, gap }) = check_collisions(&mid) {
            return Err(ConfigError::MidChordCollision { step, i, j, gap });
        }
    }
    if matches!(m, ManifoldSpec::UnitSphere) {
        return Ok(());
    }
    // Straight chords: the closest approach of each pair is found exactly.
    let n = from.points.len();
    for i in 0..n {
        for j in i + 1..n {
            let p0: Vec<f64> = from.points[i].iter().zip(from.points[j].iter()).map(|(a, b)| a - b).collect();
            let p1: Vec<f64> = to.points[i].iter().zip(to.points[j].iter()).map(|(a, b)| a - b).collect();
            let v: Vec<f64> = p1.iter().zip(&p0).map(|(a, b)| a - b).collect();
            let vv: f64 = v.iter().map(|c| c * c).sum();
            let t = if vv > 0.0 { (-p0.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / vv).clamp(0.0, 1.0) } else { 0.0 };
            let gap = geometry::lp_distance(&lerp(&p0, &p1, t), &vec![0.0; p0.len()], 2.0);
            if !(gap > COLLISION_EPS) {
                return Err(ConfigError::MidChordCollision { step, i, j, gap });
            }
        }
    }
    Ok(())
}

/// `E1`, `E2` of the path in the product metric, with bounds `ρ(A,B)²` and
/// `ρ(A,B)³` where `ρ(A,B)` is the length of the path.
pub fn config_path_energy(path: &ConfigPath) -> Result<EnergyReport> {
    Ok(energy::curve_energy(&SignalCurve::new(path.flattened()?)?))
}

/// Curve energies `(E1^(j), E2^(j))` of particle `j` (0-based) alone, measured
/// along its own trajectory.
pub fn component_energies(path: &ConfigPath, j: usize) -> Result<(f64, f64)> {
    let traj = path.component(j)?;
    let mut lengths = Vec::with_capacity(traj.len() - 1);
    for w in traj.windows(2) {
        lengths.push(geometry::distance(&path.manifold, w[0], w[1], 2.0)?);
    }
    Ok(energy::arc_energy_integrals(&lengths, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentCheck {
    pub particle: usize,
    pub e1: f64,
    pub e2: f64,
    /// `[E1 ≥ E1^(j), E2 ≥ E2^(j)]`.
    pub ok: [bool; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCheck {
    pub monotone: bool,
    pub hull_ok: bool,
    pub lower_bound: f64,
    pub satisfied: bool,
    pub hypotheses_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigBoundReport {
    pub energy: EnergyReport,
    /// `[E1 ≤ ρ(A,B)², E2 ≤ ρ(A,B)³]`.
    pub upper_ok: [bool; 2],
    pub components: Vec<ComponentCheck>,
    pub components_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<LowerBoundCheck>,
}

impl ConfigBoundReport {
    /// All evaluated verdicts hold. The lower bound only counts when its
    /// hypotheses were verified.
    pub fn all_ok(&self) -> bool {
        let lower = self.lower.as_ref().is_none_or(|l| !l.hypotheses_hold || l.satisfied);
        self.upper_ok.iter().all(|&b| b) && self.components_ok && lower
    }
}

/// Evaluates the upper bounds, the per-particle comparisons and, when
/// `check_lower` is set, the lower bound `E2 ≥ ⅓‖B − A‖₃³` together with its
/// monotonicity and hull hypotheses.
pub fn check_config_bounds(path: &ConfigPath, check_lower: bool) -> Result<ConfigBoundReport> {
    let energy = config_path_energy(path)?;
    let upper_ok = energy.satisfied;
    let mut components = Vec::with_capacity(path.particles());
    for j in 0..path.particles() {
        let (e1, e2) = component_energies(path, j)?;
        let ok = [
            energy.e1 >= e1 - COMPONENT_SLACK * e1.max(1.0),
            energy.e2 >= e2 - COMPONENT_SLACK * e2.max(1.0),
        ];
        components.push(ComponentCheck { particle: j, e1, e2, ok });
    }
    let components_ok = components.iter().all(|c| c.ok.iter().all(|&b| b));
    let lower = if check_lower {
        let flat: Vec<Vec<f64>> = path.configs.iter().map(Configuration::flatten).collect();
        let monotone = monotone_coordinates(&flat).iter().all(|&b| b);
        let refs: Vec<&[f64]> = flat.iter().map(Vec::as_slice).collect();
        let dim = path.manifold.chart_dim();
        let hull_ok = sampling::hull_probe(&refs, HULL_SEED, |x| {
            let pts: Vec<AmbientPoint> = x.chunks(dim).map(|c| AmbientPoint(c.to_vec())).collect();
            make_configuration(&path.manifold, pts).is_ok()
        });
        let lower_bound = geometry::lp_distance(&flat[flat.len() - 1], &flat[0], 3.0).powi(3) / 3.0;
        Some(LowerBoundCheck {
            monotone,
            hull_ok,
            lower_bound,
            satisfied: energy.e2 >= lower_bound - LOWER_BOUND_SLACK,
            hypotheses_hold: monotone && hull_ok,
        })
    } else {
        None
    };
    Ok(ConfigBoundReport { energy, upper_ok, components, components_ok, lower })
}

/// Seeded random path of `n` particles with `steps` segments in a Euclidean
/// cube or a shell.
///
/// Every configuration keeps a collision margin of at least
/// `10 · COLLISION_EPS`. In monotone mode each particle moves from its start
/// to a nearby end point with every coordinate following its own random
/// increasing schedule, so each coordinate function is monotone.
pub fn random_config_path(m: &ManifoldSpec, n: usize, seed: u64, steps: usize, monotone: bool) -> Result<ConfigPath> {
    if !matches!(m, ManifoldSpec::Euclidean { .. } | ManifoldSpec::SphericalShell { .. }) {
        return Err(SamplingError::Unsupported(m.kind_name()).into());
    }
    if n < 2 {
        return Err(ConfigError::TooFewPoints(n));
    }
    let steps = steps.max(1);
    let mut rng = sampling::rng_for(seed, 0);
    let delta = sampling::step_scale(m);
    let margin = 10.0 * COLLISION_EPS;
    let mut rejections = 0usize;
    let reject = |rejections: &mut usize| -> Result<()> {
        *rejections += 1;
        if *rejections >= MAX_REJECTIONS {
            Err(SamplingError::Exhausted(*rejections).into())
        } else {
            Ok(())
        }
    };
    loop {
        let start: Vec<Vec<f64>> = (0..n).map(|_| sampling::sample_point(m, &mut rng)).collect::<Result<_, _>>()?;
        if check_collisions(&start).is_err() || min_gap(&start) < margin {
            reject(&mut rejections)?;
            continue;
        }
        let configs = if monotone {
            monotone_configs(m, &start, steps, delta, &mut rng)
        } else {
            match walk_configs(m, &start, steps, delta, margin, &mut rng) {
                Some(c) => c,
                None => {
                    reject(&mut rejections)?;
                    continue;
                }
            }
        };
        if configs.iter().any(|c| min_gap(c) < margin) {
            reject(&mut rejections)?;
            continue;
        }
        let pts = configs.into_iter().map(|c| c.into_iter().map(AmbientPoint).collect()).collect();
        match ConfigPath::uniform(m.clone(), pts) {
            Ok(path) => return Ok(path),
            Err(_) => reject(&mut rejections)?,
        }
    }
}

fn min_gap(points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(gap(&points[i], &points[j]));
        }
    }
    best
}

fn monotone_configs<R: Rng>(
    m: &ManifoldSpec,
    start: &[Vec<f64>],
    steps: usize,
    delta: f64,
    rng: &mut R,
) -> Vec<Vec<Vec<f64>>> {
    let reach = delta * (steps as f64).sqrt();
    let ends: Vec<Vec<f64>> = start.iter().map(|p| p.iter().map(|c| c + rng.gen_range(-reach..reach)).collect()).collect();
    let dim = m.chart_dim();
    let schedules: Vec<Vec<Vec<f64>>> = (0..start.len())
        .map(|_| (0..dim).map(|_| sampling::increasing_schedule(steps + 1, rng)).collect())
        .collect();
    (0..=steps)
        .map(|i| {
            start
                .iter()
                .zip(&ends)
                .zip(&schedules)
                .map(|((p, q), sched)| (0..dim).map(|c| p[c] + (q[c] - p[c]) * sched[c][i]).collect())
                .collect()
        })
        .collect()
}

fn walk_configs<R: Rng>(
    m: &ManifoldSpec,
    start: &[Vec<f64>],
    steps: usize,
    delta: f64,
    margin: f64,
    rng: &mut R,
) -> Option<Vec<Vec<Vec<f64>>>> {
    let mut current = start.to_vec();
    let mut out = vec![current.clone()];
    let mut tries = 0;
    while out.len() <= steps {
        let next: Vec<Vec<f64>> =
            current.iter().map(|p| p.iter().map(|c| c + rng.gen_range(-delta..delta)).collect()).collect();
        let ok = current.iter().zip(&next).all(|(x, y)| sampling::step_ok(m, x, y)) && min_gap(&next) >= margin;
        if ok {
            current = next;
            out.push(current.clone());
        } else {
            tries += 1;
            if tries > 1000 {
                return None;
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shell() -> ManifoldSpec {
        ManifoldSpec::shell(1.0, 4.0).unwrap()
    }

    fn pts(v: &[[f64; 3]]) -> Vec<AmbientPoint> {
        v.iter().map(|&p| AmbientPoint::from(p)).collect()
    }

    #[test]
    fn configuration_checks() {
        assert!(make_configuration(&shell(), pts(&[[1.5, 0.0, 0.0], [0.0, 1.5, 0.0]])).is_ok());
        assert_eq!(
            make_configuration(&shell(), pts(&[[1.5, 0.0, 0.0], [1.5, 0.0, 0.0]])),
            Err(ConfigError::Collision { i: 0, j: 1, gap: 0.0 })
        );
        let near = make_configuration(&shell(), pts(&[[1.5, 0.0, 0.0], [1.5 + 1e-12, 0.0, 0.0]]));
        assert!(matches!(near, Err(ConfigError::Collision { i: 0, j: 1, .. })));
        assert!(matches!(
            make_configuration(&shell(), pts(&[[1.5, 0.0, 0.0], [0.5, 0.0, 0.0]])),
            Err(ConfigError::InvalidPoint { index: 1, .. })
        ));
        assert_eq!(make_configuration(&shell(), pts(&[[1.5, 0.0, 0.0]])), Err(ConfigError::TooFewPoints(1)));
    }

    fn two_particle_translation(k: usize) -> ConfigPath {
        // Both particles move by a unit chord along y, far from the inner sphere.
        let configs = (0..=k)
            .map(|i| {
                let t = i as f64 / k as f64;
                pts(&[[1.5, -0.5 + t, 0.0], [0.0, -0.5 + t, 1.5]])
            })
            .collect();
        ConfigPath::uniform(shell(), configs).unwrap()
    }

    #[test]
    fn translation_energies() {
        let path = two_particle_translation(100);
        let r = config_path_energy(&path).unwrap();
        let l = 2f64.sqrt();
        assert!((r.e1 - l * l / 2.0).abs() < 1e-6);
        assert!((r.e2 - l.powi(3) / 3.0).abs() < 1e-6);
        assert!(r.all_satisfied());
        for j in 0..2 {
            let (e1, e2) = component_energies(&path, j).unwrap();
            assert!((e1 - 0.5).abs() < 1e-6 && (e2 - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn single_mover() {
        let k = 50;
        let configs = (0..=k)
            .map(|i| {
                let t = 0.8 * i as f64 / k as f64;
                pts(&[[1.5, t, 0.0], [0.0, 0.0, 1.5]])
            })
            .collect();
        let path = ConfigPath::uniform(shell(), configs).unwrap();
        let r = config_path_energy(&path).unwrap();
        let (e1, e2) = component_energies(&path, 0).unwrap();
        assert!((r.e1 - e1).abs() < 1e-12 && (r.e2 - e2).abs() < 1e-12);
        assert!((e1 - 0.32).abs() < 1e-6 && (e2 - 0.8f64.powi(3) / 3.0).abs() < 1e-6);
        assert_eq!(component_energies(&path, 1).unwrap(), (0.0, 0.0));
        let report = check_config_bounds(&path, false).unwrap();
        assert!(report.all_ok());
        assert!((report.components[0].e1 - report.energy.e1).abs() < 1e-12);
        assert_eq!(component_energies(&path, 2), Err(ConfigError::ParticleOutOfRange { index: 2, n: 2 }));
    }

    #[test]
    fn crossing_particles_rejected() {
        // Particles swap places along the same line, meeting at the midpoint.
        let configs = vec![pts(&[[1.5, -0.2, 0.0], [1.5, 0.2, 0.0]]), pts(&[[1.5, 0.2, 0.0], [1.5, -0.2, 0.0]])];
        assert!(matches!(ConfigPath::uniform(shell(), configs), Err(ConfigError::MidChordCollision { step: 0, .. })));
    }

    #[test]
    fn chord_through_hole_rejected() {
        let configs = vec![pts(&[[1.5, 0.0, 0.0], [0.0, 0.0, 1.5]]), pts(&[[-1.5, 0.0, 0.0], [0.0, 0.0, 1.5]])];
        assert!(matches!(
            ConfigPath::uniform(shell(), configs),
            Err(ConfigError::ChordLeavesManifold { step: 0, particle: 0 })
        ));
    }

    #[test]
    fn path_json() {
        let json = r#"{"manifold":{"kind":"shell","a":1.0,"b":4.0},"n":2,"params":[0,1],
            "configs":[[[1.5,0,0],[0,1.5,0]],[[1.5,0.1,0],[0,1.5,0.1]]]}"#;
        let p: ConfigPath = serde_json::from_str(json).unwrap();
        assert_eq!(p.particles(), 2);
        let back: ConfigPath = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let wrong_n = json.replace(r#""n":2"#, r#""n":3"#);
        assert!(serde_json::from_str::<ConfigPath>(&wrong_n).is_err());
    }

    #[test]
    fn random_paths() {
        let a = random_config_path(&shell(), 3, 9, 10, true).unwrap();
        let b = random_config_path(&shell(), 3, 9, 10, true).unwrap();
        assert_eq!(a, b);
        let flat: Vec<Vec<f64>> = a.configs().iter().map(Configuration::flatten).collect();
        assert!(monotone_coordinates(&flat).iter().all(|&x| x));
        for c in a.configs() {
            assert!(c.min_gap() >= 10.0 * COLLISION_EPS);
        }
        let w = random_config_path(&shell(), 5, 4, 20, false).unwrap();
        assert_eq!(w.configs().len(), 21);
        let e = random_config_path(&ManifoldSpec::Euclidean { dim: 2 }, 4, 1, 5, false).unwrap();
        assert_eq!(e.particles(), 4);
        assert!(random_config_path(&ManifoldSpec::Spd { n: 2 }, 2, 0, 3, false).is_err());
    }

    #[test]
    fn bounds_on_random_monotone_path() {
        for seed in 0..20 {
            let p = random_config_path(&shell(), 3, seed, 15, true).unwrap();
            let r = check_config_bounds(&p, true).unwrap();
            assert!(r.all_ok(), "seed {seed}: {r:?}");
            let lower = r.lower.unwrap();
            assert!(lower.monotone);
            if lower.hypotheses_hold {
                assert!(lower.satisfied);
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let p = random_config_path(&shell(), 3, 5, 12, false).unwrap();
        let q = p.permuted(&[2, 0, 1]).unwrap();
        let (ep, eq) = (config_path_energy(&p).unwrap(), config_path_energy(&q).unwrap());
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
        assert!(rel(ep.e1, eq.e1) && rel(ep.e2, eq.e2));
        assert_eq!(component_energies(&q, 0).unwrap(), component_energies(&p, 2).unwrap());
        assert_eq!(component_energies(&q, 1).unwrap(), component_energies(&p, 0).unwrap());
    }
}
