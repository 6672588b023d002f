//! Graph metrics, embedding predicates, the relative ratio variance `ṽ = v∘r`
//! and a multi-start local search that minimizes it.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configspace::{self, ConfigError, Configuration, COLLISION_EPS};
use crate::geometry::{self, AmbientPoint, GeometryError, ManifoldSpec};
use crate::sampling::{self, SamplingError, MAX_REJECTIONS};

/// Coefficient of the `β / d²` collision barrier used during search only.
pub const BARRIER_BETA: f64 = 1e-8;

/// Relative step of the central-difference gradient.
pub const GRADIENT_STEP: f64 = 1e-6;

/// Sufficient-decrease constant of the backtracking line search.
const ARMIJO_C: f64 = 1e-4;

/// Halvings tried before a line search gives up.
const MAX_BACKTRACKS: usize = 60;

/// Proposals per annealing round.
const ANNEAL_PROPOSALS: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("a graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edge {edge} refers to vertex {vertex}, but the graph has {n} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {0} is a loop")]
    SelfLoop(usize),
    #[error("edge {edge} repeats the pair ({i}, {j})")]
    DuplicateEdge { edge: usize, i: usize, j: usize },
    #[error("edge {edge} has weight {weight}; weights must be positive and finite")]
    BadWeight { edge: usize, weight: f64 },
    #[error("the graph has no edges")]
    NoEdges,
    #[error("the graph is not connected")]
    Disconnected,
    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("ratio {index} is {value}; ratios must be positive")]
    NonPositiveRatio { index: usize, value: f64 },
    #[error("the ratio vector is empty")]
    EmptyRatios,
    #[error("edge {edge} joins coincident points")]
    EdgeCollision { edge: usize },
    #[error("the objective is not finite")]
    NonFinite,
    #[error("restart {0} found no feasible starting configuration")]
    InfeasibleStart(usize),
    #[error("cannot {op} on {kind}")]
    Unsupported { op: &'static str, kind: &'static str },
    #[error("scale factor {0} must be positive and finite")]
    BadScale(f64),
    #[error("at least one restart is required")]
    NoRestarts,
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Simple connected graph with positive edge weights. The edge list order is
/// the fixed enumeration of edges used by ratio vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl TryFrom<GraphRepr> for WeightedGraph {
    type Error = GraphError;

    fn try_from(r: GraphRepr) -> Result<Self> {
        WeightedGraph::new(r.n, r.edges)
    }
}

impl From<WeightedGraph> for GraphRepr {
    fn from(g: WeightedGraph) -> Self {
        GraphRepr { n: g.n, edges: g.edges }
    }
}

impl WeightedGraph {
    /// Validates the edge list. Endpoints are stored with `i < j`; the order
    /// of the list is kept.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(GraphError::TooFewVertices(n));
        }
        if edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        let mut seen = HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (edge, &(a, b, w)) in edges.iter().enumerate() {
            for vertex in [a, b] {
                if vertex >= n {
                    return Err(GraphError::VertexOutOfRange { edge, vertex, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(edge));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(GraphError::BadWeight { edge, weight: w });
            }
            let (i, j) = (a.min(b), a.max(b));
            if !seen.insert((i, j)) {
                return Err(GraphError::DuplicateEdge { edge, i, j });
            }
            normalized.push((i, j, w));
        }
        let g = WeightedGraph { n, edges: normalized };
        if g.metric(true).iter().flatten().any(|d| d.is_infinite()) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    /// Unweighted graph from vertex pairs.
    pub fn unit(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        WeightedGraph::new(n, pairs.iter().map(|&(i, j)| (i, j, 1.0)).collect())
    }

    pub fn complete(n: usize) -> Result<Self> {
        let pairs: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        WeightedGraph::unit(n, &pairs)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedGraph::unit(n, &pairs)
    }

    pub fn path(n: usize) -> Result<Self> {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        WeightedGraph::unit(n, &pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn mean_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum::<f64>() / self.edges.len() as f64
    }

    /// Same graph with the edge enumeration reordered: edge `k` of the result
    /// is edge `perm[k]` of `self`.
    pub fn reorder_edges(&self, perm: &[usize]) -> Result<Self> {
        WeightedGraph::new(self.n, perm.iter().map(|&k| self.edges[k]).collect())
    }

    fn metric(&self, unit: bool) -> Vec<Vec<f64>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, w) in &self.edges {
            let w = if unit { 1.0 } else { w };
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        (0..self.n)
            .map(|s| {
                let mut dist = vec![f64::INFINITY; self.n];
                let mut done = vec![false; self.n];
                dist[s] = 0.0;
                for _ in 0..self.n {
                    let Some(u) = (0..self.n).filter(|&v| !done[v] && dist[v].is_finite()).min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
                    else {
                        break;
                    };
                    done[u] = true;
                    for &(v, w) in &adj[u] {
                        dist[v] = dist[v].min(dist[u] + w);
                    }
                }
                dist
            })
            .collect()
    }
}

/// All-pairs shortest-path distances; with `unit` set every edge counts 1,
/// giving hop counts.
pub fn graph_metric(g: &WeightedGraph, unit: bool) -> Vec<Vec<f64>> {
    g.metric(unit)
}

fn check_images(g: &WeightedGraph, m: &ManifoldSpec, f: &[AmbientPoint]) -> Result<()> {
    if f.len() != g.n {
        return Err(GraphError::PointCount { expected: g.n, got: f.len() });
    }
    for p in f {
        geometry::validate_point(m, p)?;
    }
    Ok(())
}

/// True when `d_M(f(x), f(y))` matches the hop distance within `tol` for every
/// pair of vertices.
pub fn is_isometric_embedding(g: &WeightedGraph, f: &[AmbientPoint], m: &ManifoldSpec, tol: f64) -> Result<bool> {
    check_images(g, m, f)?;
    let d = graph_metric(g, true);
    for i in 0..g.n {
        for j in i + 1..g.n {
            if (geometry::distance(m, &f[i], &f[j], 2.0)? - d[i][j]).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True when every edge maps to a pair at distance 1 within `tol`.
pub fn is_quasi_isometric_embedding(g: &WeightedGraph, f: &[AmbientPoint], m: &ManifoldSpec, tol: f64) -> Result<bool> {
    check_images(g, m, f)?;
    for &(i, j, _) in &g.edges {
        if (geometry::distance(m, &f[i], &f[j], 2.0)? - 1.0).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Positive ratios `r_k = d_M(x_i, x_j) / W(e_k)` in edge order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatioVector(Vec<f64>);

impl RatioVector {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(GraphError::EmptyRatios);
        }
        if let Some(index) = r.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(GraphError::NonPositiveRatio { index, value: r[index] });
        }
        Ok(RatioVector(r))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

fn ratios_of(g: &WeightedGraph, m: &ManifoldSpec, points: &[AmbientPoint]) -> Result<Vec<f64>> {
    g.edges
        .iter()
        .enumerate()
        .map(|(edge, &(i, j, w))| {
            let d = geometry::distance(m, &points[i], &points[j], 2.0)?;
            if d <= 0.0 {
                return Err(GraphError::EdgeCollision { edge });
            }
            Ok(d / w)
        })
        .collect()
}

pub fn ratio_vector(g: &WeightedGraph, x: &Configuration) -> Result<RatioVector> {
    if x.len() != g.n {
        return Err(GraphError::PointCount { expected: g.n, got: x.len() });
    }
    RatioVector::new(ratios_of(g, x.manifold(), x.points())?)
}

/// Sums run over the sorted ratios, so the value does not depend on the edge
/// enumeration even in floating point.
fn variance_unchecked(r: &[f64]) -> f64 {
    let mut r = r.to_vec();
    r.sort_by(f64::total_cmp);
    let m = r.len() as f64;
    let sum: f64 = r.iter().sum();
    let mean = sum / m;
    let num: f64 = r.iter().map(|x| (x - mean).powi(2)).sum();
    num / (sum * sum / (m * m))
}

/// `v(r) = Σ (r_i − r̄)² / ((Σ r_i)² / m²)`.
pub fn ratio_variance(r: &RatioVector) -> f64 {
    variance_unchecked(&r.0)
}

/// `ṽ(X) = v(r(X))`.
pub fn relative_ratio_variance(g: &WeightedGraph, x: &Configuration) -> Result<f64> {
    Ok(ratio_variance(&ratio_vector(g, x)?))
}

/// Multiplies every point by `alpha`; only Euclidean spaces have dilations.
pub fn scale_configuration(x: &Configuration, alpha: f64) -> Result<Configuration> {
    if !matches!(x.manifold(), ManifoldSpec::Euclidean { .. }) {
        return Err(GraphError::Unsupported { op: "scale", kind: x.manifold().kind_name() });
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(GraphError::BadScale(alpha));
    }
    let pts = x.points().iter().map(|p| AmbientPoint(p.iter().map(|c| alpha * c).collect())).collect();
    Ok(configspace::make_configuration(x.manifold(), pts)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedOptions {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub tol_obj: f64,
    /// Follow each stalled descent with rounds of simulated annealing.
    pub anneal: bool,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions { seed: 0, restarts: 20, max_iters: 5000, step_init: 0.1, tol_obj: 1e-14, anneal: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResult {
    pub objective: f64,
    pub points: Vec<AmbientPoint>,
    pub ratios: Vec<f64>,
    /// Descent iterations of the winning restart.
    pub iterations: usize,
    pub restarts: usize,
    pub best_restart: usize,
    /// Final objective of every restart, in restart order.
    pub restart_objectives: Vec<f64>,
    pub seed: u64,
}

impl EmbedResult {
    pub fn config(&self, m: &ManifoldSpec) -> Result<Configuration> {
        Ok(configspace::make_configuration(m, self.points.clone())?)
    }
}

/// The search problem for one graph in one manifold: coordinates are the
/// flattened chart points.
struct Problem<'a> {
    g: &'a WeightedGraph,
    m: &'a ManifoldSpec,
    dim: usize,
    scale: f64,
}

impl Problem<'_> {
    fn split<'x>(&self, x: &'x [f64]) -> impl Iterator<Item = &'x [f64]> {
        x.chunks(self.dim)
    }

    /// `ṽ` at `x`, or `None` when `x` is not a valid configuration.
    fn objective(&self, x: &[f64]) -> Option<f64> {
        self.evaluate(x).map(|(v, _)| v)
    }

    /// `(ṽ, ṽ + barrier)`.
    fn evaluate(&self, x: &[f64]) -> Option<(f64, f64)> {
        let pts: Vec<&[f64]> = self.split(x).collect();
        let mut barrier = 0.0;
        for i in 0..pts.len() {
            if geometry::validate_point(self.m, pts[i]).is_err() {
                return None;
            }
            for j in i + 1..pts.len() {
                let gap = geometry::lp_distance(pts[i], pts[j], 2.0);
                if !(gap > COLLISION_EPS) {
                    return None;
                }
                barrier += BARRIER_BETA * (self.scale / gap).powi(2);
            }
        }
        let mut r = Vec::with_capacity(self.g.edges.len());
        for &(i, j, w) in &self.g.edges {
            r.push(geometry::distance(self.m, pts[i], pts[j], 2.0).ok()? / w);
        }
        let v = variance_unchecked(&r);
        v.is_finite().then_some((v, v + barrier))
    }

    fn search_value(&self, x: &[f64]) -> Option<f64> {
        self.evaluate(x).map(|(_, s)| s)
    }

    /// Central differences; on the sphere each probe is pulled back radially,
    /// which yields the tangential gradient.
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let h = GRADIENT_STEP * self.scale;
        let mut grad = vec![0.0; x.len()];
        let sphere = matches!(self.m, ManifoldSpec::UnitSphere);
        let probe_at = |k: usize, delta: f64| {
            let mut probe = x.to_vec();
            probe[k] += delta;
            if sphere {
                let p = &mut probe[k / self.dim * self.dim..(k / self.dim + 1) * self.dim];
                let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                p.iter_mut().for_each(|c| *c /= r);
            }
            self.search_value(&probe)
        };
        for k in 0..x.len() {
            let up = probe_at(k, h);
            let down = probe_at(k, -h);
            grad[k] = match (up, down) {
                (Some(u), Some(d)) => (u - d) / (2.0 * h),
                _ => return None,
            };
        }
        Some(grad)
    }

    /// Maps `x` back onto the feasible set and, in Euclidean space, fixes the
    /// translation and dilation gauge: centroid at the origin and mean edge
    /// ratio 1.
    fn project(&self, x: &mut [f64]) {
        match self.m {
            ManifoldSpec::UnitSphere => {
                for p in x.chunks_mut(self.dim) {
                    let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if r > 0.0 {
                        p.iter_mut().for_each(|c| *c /= r);
                    }
                }
            }
            ManifoldSpec::SphericalShell { a, b } => {
                let (lo, hi) = (a.sqrt(), b.sqrt());
                let margin = 1e-3 * (hi - lo);
                for p in x.chunks_mut(self.dim) {
                    let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let target = r.clamp(lo + margin, hi - margin);
                    if r > 0.0 && target != r {
                        p.iter_mut().for_each(|c| *c *= target / r);
                    }
                }
            }
            ManifoldSpec::Euclidean { .. } => {
                let n = x.len() / self.dim;
                for c in 0..self.dim {
                    let mean = (0..n).map(|i| x[i * self.dim + c]).sum::<f64>() / n as f64;
                    (0..n).for_each(|i| x[i * self.dim + c] -= mean);
                }
                let pts: Vec<&[f64]> = x.chunks(self.dim).collect();
                let mean_ratio = self
                    .g
                    .edges
                    .iter()
                    .map(|&(i, j, w)| geometry::lp_distance(pts[i], pts[j], 2.0) / w)
                    .sum::<f64>()
                    / self.g.edges.len() as f64;
                if mean_ratio > 0.0 && mean_ratio.is_finite() {
                    x.iter_mut().for_each(|c| *c /= mean_ratio);
                }
            }
            _ => {}
        }
    }

    fn initial<R: Rng>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let mut x = Vec::with_capacity(self.g.n * self.dim);
        for _ in 0..self.g.n {
            match self.m {
                ManifoldSpec::Euclidean { dim } => {
                    let radius = self.g.mean_weight() * (self.g.n as f64).powf(1.0 / *dim as f64);
                    let p = loop {
                        let p: Vec<f64> = (0..*dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        if p.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
                            break p;
                        }
                    };
                    x.extend(p.iter().map(|c| c * radius));
                }
                _ => x.extend(sampling::sample_point(self.m, rng)?),
            }
        }
        Ok(x)
    }
}

struct RestartOutcome {
    objective: f64,
    x: Vec<f64>,
    iterations: usize,
}

fn descend(p: &Problem, x: &mut Vec<f64>, opts: &EmbedOptions, best: &mut RestartOutcome, iterations: &mut usize) {
    let mut step = opts.step_init * p.scale;
    let Some(mut f) = p.search_value(x) else { return };
    while *iterations < opts.max_iters && best.objective > opts.tol_obj {
        *iterations += 1;
        let Some(grad) = p.gradient(x) else { return };
        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_BACKTRACKS {
            let mut cand: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - t * g).collect();
            p.project(&mut cand);
            if let Some((v, s)) = p.evaluate(&cand) {
                let moved: f64 = cand.iter().zip(x.iter()).map(|(a, b)| (a - b).powi(2)).sum();
                if s <= f - ARMIJO_C / t * moved && s < f {
                    accepted = Some((cand, v, s));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, v, s)) = accepted else { return };
        *x = cand;
        f = s;
        step = (2.0 * t).min(1e3 * p.scale);
        if v < best.objective {
            best.objective = v;
            best.x = x.clone();
            best.iterations = *iterations;
        }
    }
}

fn anneal<R: Rng>(p: &Problem, x: &mut Vec<f64>, rng: &mut R, best: &mut RestartOutcome) {
    let Some(mut f) = p.objective(x) else { return };
    let t0 = f.max(1e-12);
    for k in 0..ANNEAL_PROPOSALS {
        let temp = t0 * (1.0 - k as f64 / ANNEAL_PROPOSALS as f64);
        let width = 0.05 * p.scale * (1.0 - k as f64 / ANNEAL_PROPOSALS as f64) + 1e-6 * p.scale;
        let mut cand: Vec<f64> = x.iter().map(|c| c + rng.gen_range(-width..width)).collect();
        p.project(&mut cand);
        let Some(v) = p.objective(&cand) else { continue };
        if v < f || (temp > 0.0 && rng.gen::<f64>() < (-(v - f) / temp).exp()) {
            *x = cand;
            f = v;
            if v < best.objective {
                best.objective = v;
                best.x = x.clone();
            }
        }
    }
}

fn run_restart(p: &Problem, opts: &EmbedOptions, restart: usize) -> Result<RestartOutcome> {
    let mut rng = sampling::rng_for(opts.seed, restart as u64);
    let mut x = None;
    for _ in 0..MAX_REJECTIONS {
        let mut cand = p.initial(&mut rng)?;
        p.project(&mut cand);
        if p.evaluate(&cand).is_some() {
            x = Some(cand);
            break;
        }
    }
    let mut x = x.ok_or(GraphError::InfeasibleStart(restart))?;
    let objective = p.objective(&x).ok_or(GraphError::NonFinite)?;
    let mut best = RestartOutcome { objective, x: x.clone(), iterations: 0 };
    let mut iterations = 0;
    descend(p, &mut x, opts, &mut best, &mut iterations);
    if opts.anneal {
        for _ in 0..3 {
            if best.objective <= opts.tol_obj || iterations >= opts.max_iters {
                break;
            }
            x = best.x.clone();
            anneal(p, &mut x, &mut rng, &mut best);
            x = best.x.clone();
            descend(p, &mut x, opts, &mut best, &mut iterations);
        }
    }
    Ok(best)
}

/// Minimizes `ṽ` over configurations of `g.n` points in `m` by multi-start
/// projected gradient descent.
///
/// Each restart draws its start from its own stream of `opts.seed`, runs
/// central-difference gradient descent with backtracking on `ṽ` plus a small
/// collision barrier, and projects every iterate back onto `m` (radially for
/// spheres and shells, gauge-normalized for Euclidean space). The reported
/// objective is `ṽ` without the barrier, and it is the best value seen at any
/// accepted iterate, including the start. Restarts run in parallel; the
/// result does not depend on scheduling.
///
/// In Euclidean space `ṽ` is invariant under translations and dilations, so
/// the returned points are normalized to centroid 0 and mean edge ratio 1.
pub fn minimize_ratio_variance(g: &WeightedGraph, m: &ManifoldSpec, opts: &EmbedOptions) -> Result<EmbedResult> {
    match m {
        ManifoldSpec::Euclidean { dim } if *dim >= 1 => {}
        ManifoldSpec::UnitSphere | ManifoldSpec::SphericalShell { .. } => {}
        other => return Err(GraphError::Unsupported { op: "embed", kind: other.kind_name() }),
    }
    if opts.restarts == 0 {
        return Err(GraphError::NoRestarts);
    }
    let scale = match m {
        ManifoldSpec::Euclidean { .. } => g.mean_weight(),
        ManifoldSpec::SphericalShell { b, .. } => b.sqrt(),
        _ => 1.0,
    };
    let problem = Problem { g, m, dim: m.chart_dim(), scale };
    let outcomes: Vec<RestartOutcome> =
        (0..opts.restarts).into_par_iter().map(|r| run_restart(&problem, opts, r)).collect::<Result<_>>()?;
    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    let points: Vec<AmbientPoint> = best.x.chunks(problem.dim).map(|c| AmbientPoint(c.to_vec())).collect();
    let ratios = ratios_of(g, m, &points)?;
    Ok(EmbedResult {
        objective: best.objective,
        points,
        ratios,
        iterations: best.iterations,
        restarts: opts.restarts,
        best_restart,
        restart_objectives: outcomes.iter().map(|o| o.objective).collect(),
        seed: opts.seed,
    })
}
