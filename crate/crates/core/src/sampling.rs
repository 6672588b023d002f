//! Seeded generators for test corpora and the convex-hull probe.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::geometry::{self, AmbientPoint, ManifoldSpec};
use crate::mesh::{MeshError, PolylinePath};

/// Rejections allowed before a generator gives up.
pub const MAX_REJECTIONS: usize = 100_000;

/// Samples whose pairwise midpoints are probed by [`hull_probe`].
pub const HULL_PAIR_SAMPLES: usize = 64;

/// Random convex combinations probed by [`hull_probe`].
pub const HULL_RANDOM_COMBINATIONS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("sampling gave up after {0} rejections")]
    Exhausted(usize),
    #[error("cannot sample from {0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

pub type Result<T, E = SamplingError> = std::result::Result<T, E>;

/// Deterministic generator for `(seed, stream)`; distinct streams are
/// independent, so parallel work can own one stream per task.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Probes whether the convex hull of `points` lies in the set described by
/// `accept`: every pairwise midpoint of up to [`HULL_PAIR_SAMPLES`] evenly
/// spaced points, then [`HULL_RANDOM_COMBINATIONS`] random combinations of
/// two to four points with exponential weights.
pub fn hull_probe(points: &[&[f64]], seed: u64, mut accept: impl FnMut(&[f64]) -> bool) -> bool {
    let n = points.len();
    if n == 0 {
        return true;
    }
    if !points.iter().all(|p| accept(p)) {
        return false;
    }
    let dim = points[0].len();
    let picked: Vec<usize> = if n <= HULL_PAIR_SAMPLES {
        (0..n).collect()
    } else {
        (0..HULL_PAIR_SAMPLES).map(|i| i * (n - 1) / (HULL_PAIR_SAMPLES - 1)).collect()
    };
    let mut buf = vec![0.0; dim];
    for (a, &i) in picked.iter().enumerate() {
        for &j in &picked[a + 1..] {
            for (b, (x, y)) in buf.iter_mut().zip(points[i].iter().zip(points[j])) {
                *b = 0.5 * (x + y);
            }
            if !accept(&buf) {
                return false;
            }
        }
    }
    if n < 2 {
        return true;
    }
    let mut rng = rng_for(seed, 0);
    for _ in 0..HULL_RANDOM_COMBINATIONS {
        let k = rng.gen_range(2..=4.min(n));
        let idx = sample_indices(&mut rng, n, k);
        let weights: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = weights.iter().sum();
        buf.iter_mut().for_each(|b| *b = 0.0);
        for (i, w) in idx.iter().zip(&weights) {
            for (b, x) in buf.iter_mut().zip(points[i]) {
                *b += w / total * x;
            }
        }
        if !accept(&buf) {
            return false;
        }
    }
    true
}

/// Uniform point of a Euclidean cube `[-1, 1]^dim` or a shell.
pub fn sample_point<R: Rng>(m: &ManifoldSpec, rng: &mut R) -> Result<Vec<f64>> {
    match m {
        ManifoldSpec::Euclidean { dim } => Ok((0..*dim).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        ManifoldSpec::SphericalShell { a, b } => {
            let r = b.sqrt();
            for _ in 0..MAX_REJECTIONS {
                let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-r..r)).collect();
                let r2: f64 = p.iter().map(|c| c * c).sum();
                if *a < r2 && r2 < *b {
                    return Ok(p);
                }
            }
            Err(SamplingError::Exhausted(MAX_REJECTIONS))
        }
        ManifoldSpec::UnitSphere => loop {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r: f64 = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            if r > 1e-3 && r <= 1.0 {
                return Ok(p.iter().map(|c| c / r).collect());
            }
        },
        other => Err(SamplingError::Unsupported(other.kind_name())),
    }
}

/// Typical step length for random walks in `m`.
pub fn step_scale(m: &ManifoldSpec) -> f64 {
    match m {
        ManifoldSpec::SphericalShell { a, b } => 0.05 * (b.sqrt() - a.sqrt()),
        _ => 0.1,
    }
}

/// True when the straight step from `x` to `y` stays in `m`.
pub fn step_ok(m: &ManifoldSpec, x: &[f64], y: &[f64]) -> bool {
    if geometry::validate_point(m, y).is_err() {
        return false;
    }
    match m {
        ManifoldSpec::SphericalShell { a, .. } => geometry::chord_in_shell(*a, x, y),
        _ => true,
    }
}

/// Random polyline with `steps` segments in a Euclidean space or a shell.
///
/// In monotone mode every coordinate moves in one direction, fixed per
/// coordinate for the whole path. Paths that run out of room are restarted.
pub fn random_curve<R: Rng>(m: &ManifoldSpec, steps: usize, monotone: bool, rng: &mut R) -> Result<PolylinePath> {
    let dim = m.chart_dim();
    let delta = step_scale(m);
    let mut rejections = 0;
    'restart: loop {
        let mut current = sample_point(m, rng)?;
        let signs: Vec<f64> = (0..dim).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let mut points = vec![AmbientPoint(current.clone())];
        while points.len() <= steps {
            let next: Vec<f64> = current
                .iter()
                .zip(&signs)
                .map(|(c, s)| if monotone { c + s * rng.gen_range(0.0..delta) } else { c + rng.gen_range(-delta..delta) })
                .collect();
            if next != current && step_ok(m, &current, &next) {
                current = next;
                points.push(AmbientPoint(current.clone()));
                continue;
            }
            rejections += 1;
            if rejections >= MAX_REJECTIONS {
                return Err(SamplingError::Exhausted(rejections));
            }
            if monotone {
                continue 'restart;
            }
        }
        return Ok(PolylinePath::uniform(m.clone(), points)?);
    }
}

/// Sorted uniforms in `(0, 1)` framed by 0 and 1: a random increasing
/// schedule of length `count`.
pub fn increasing_schedule<R: Rng>(count: usize, rng: &mut R) -> Vec<f64> {
    let mut inner: Vec<f64> = (0..count.saturating_sub(2)).map(|_| rng.gen::<f64>()).collect();
    inner.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(count);
    out.push(0.0);
    out.extend(inner);
    out.push(1.0);
    out
}

/// Random path in `𝓘 = (−5, 5)ⁿ × P_n` whose chart coordinates are each
/// monotone, moving from `p` to `q` along independent random schedules.
/// Covariances have diagonals in `[1, 2]` and off-diagonals in
/// `[−0.3, 0.3]`, so every intermediate matrix stays positive definite.
pub fn random_gaussian_path<R: Rng>(n: usize, steps: usize, rng: &mut R) -> Result<PolylinePath> {
    let m = ManifoldSpec::gaussian_param(n, vec![[-5.0, 5.0]; n]).expect("valid box");
    let endpoint = |rng: &mut R| -> Vec<f64> {
        let mut mean: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let mut cov = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            cov[(i, i)] = rng.gen_range(1.0..2.0);
            for j in i + 1..n {
                let v = rng.gen_range(-0.3..0.3) / (n as f64 - 1.0).max(1.0);
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        mean.extend(geometry::pack_symmetric(&cov));
        mean
    };
    let p = endpoint(rng);
    let q = endpoint(rng);
    let schedules: Vec<Vec<f64>> = (0..p.len()).map(|_| increasing_schedule(steps + 1, rng)).collect();
    let samples = (0..=steps)
        .map(|i| AmbientPoint(p.iter().zip(&q).zip(&schedules).map(|((a, b), s)| a + (b - a) * s[i]).collect()))
        .collect();
    Ok(PolylinePath::uniform(m, samples)?)
}
