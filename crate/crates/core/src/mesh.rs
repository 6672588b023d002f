//! Discretized 1- and 2-dimensional signals.
//!
//! Curves are polylines whose segments are measured with the ambient distance
//! (`p = 2`). Surfaces are triangle meshes with chord-length edges; intrinsic
//! distances on them come from first-order fast marching, which converges to
//! the geodesic distance under refinement.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, AmbientPoint, GeometryError, ManifoldSpec};

/// Faces with a Heron area below this are reported as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-14;

/// Vertices this close to `(±1, 0, 0)` are snapped onto it by
/// [`triangulate_sphere`].
pub const SNAP_TOL: f64 = 1e-9;

/// Relative slack of the eccentricity pruning in [`mesh_diameter`].
pub const DIAMETER_SLACK: f64 = 0.02;

/// Largest subdivision level accepted by [`triangulate_sphere`].
pub const MAX_SUBDIVISIONS: u32 = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("sample {index} is not a point of the manifold: {source}")]
    InvalidSample { index: usize, source: GeometryError },
    #[error("a path needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("params and samples differ in length ({params} vs {samples})")]
    ParamCount { params: usize, samples: usize },
    #[error("params must increase strictly from 0 to 1")]
    BadParams,
    #[error("sample {0} coincides with the next sample")]
    RepeatedSample(usize),
    #[error("face {face} references vertex {vertex}, but there are only {count} vertices")]
    FaceIndex { face: usize, vertex: usize, count: usize },
    #[error("face {0} repeats a vertex")]
    RepeatedFaceVertex(usize),
    #[error("vertex index {0} out of range")]
    VertexIndex(usize),
    #[error("marked points a and b must differ")]
    MarksEqual,
    #[error("the mesh edge graph is disconnected")]
    Disconnected,
    #[error("the mesh has no vertices")]
    Empty,
    #[error("source set is empty")]
    EmptySources,
    #[error("at most {MAX_SUBDIVISIONS} subdivisions are supported, got {0}")]
    SubdivisionLimit(u32),
    #[error("grid step {0} is not a positive divisor-compatible length")]
    BadGridStep(f64),
}

pub type Result<T, E = MeshError> = std::result::Result<T, E>;

/// Length of the straight segment between two samples.
///
/// Kinds without a closed-form distance (the Fisher half-plane) fall back to
/// the tangent norm of the difference at the segment midpoint.
pub fn segment_length(m: &ManifoldSpec, x: &[f64], y: &[f64]) -> Result<f64, GeometryError> {
    match geometry::distance(m, x, y, 2.0) {
        Err(GeometryError::NormUnsupported { .. }) => {
            let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
            let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
            geometry::tangent_norm(m, &mid, &diff)
        }
        other => other,
    }
}

/// Ordered samples `γ(t₀), …, γ(t_K)` of a path with `t₀ = 0`, `t_K = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathRepr", into = "PathRepr")]
pub struct PolylinePath {
    manifold: ManifoldSpec,
    params: Vec<f64>,
    samples: Vec<AmbientPoint>,
    segment_lengths: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PathRepr {
    manifold: ManifoldSpec,
    params: Vec<f64>,
    samples: Vec<AmbientPoint>,
}

impl TryFrom<PathRepr> for PolylinePath {
    type Error = MeshError;

    fn try_from(r: PathRepr) -> Result<Self> {
        PolylinePath::new(r.manifold, r.params, r.samples)
    }
}

impl From<PolylinePath> for PathRepr {
    fn from(p: PolylinePath) -> Self {
        PathRepr { manifold: p.manifold, params: p.params, samples: p.samples }
    }
}

impl PolylinePath {
    pub fn new(manifold: ManifoldSpec, params: Vec<f64>, samples: Vec<AmbientPoint>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(MeshError::TooFewSamples(samples.len()));
        }
        if params.len() != samples.len() {
            return Err(MeshError::ParamCount { params: params.len(), samples: samples.len() });
        }
        let increasing = params.windows(2).all(|w| w[0] < w[1]);
        if !increasing || params[0] != 0.0 || params[params.len() - 1] != 1.0 {
            return Err(MeshError::BadParams);
        }
        for (index, s) in samples.iter().enumerate() {
            geometry::validate_point(&manifold, s).map_err(|source| MeshError::InvalidSample { index, source })?;
        }
        let mut segment_lengths = Vec::with_capacity(samples.len() - 1);
        for (i, w) in samples.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(MeshError::RepeatedSample(i));
            }
            let len = segment_length(&manifold, &w[0], &w[1])?;
            if len <= 0.0 {
                return Err(MeshError::RepeatedSample(i));
            }
            segment_lengths.push(len);
        }
        Ok(PolylinePath { manifold, params, samples, segment_lengths })
    }

    /// Path with uniformly spaced parameters `tᵢ = i / K`.
    pub fn uniform(manifold: ManifoldSpec, samples: Vec<AmbientPoint>) -> Result<Self> {
        let k = samples.len().saturating_sub(1).max(1);
        let mut params: Vec<f64> = (0..samples.len()).map(|i| i as f64 / k as f64).collect();
        if let Some(last) = params.last_mut() {
            *last = 1.0;
        }
        PolylinePath::new(manifold, params, samples)
    }

    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn samples(&self) -> &[AmbientPoint] {
        &self.samples
    }

    pub fn segment_lengths(&self) -> &[f64] {
        &self.segment_lengths
    }

    pub fn start(&self) -> &AmbientPoint {
        &self.samples[0]
    }

    pub fn end(&self) -> &AmbientPoint {
        &self.samples[self.samples.len() - 1]
    }
}

pub fn arc_length(path: &PolylinePath) -> f64 {
    path.segment_lengths.iter().sum()
}

/// Arc length from `γ(0)` to every sample; the last entry equals
/// [`arc_length`] bit for bit.
pub fn cumulative_arclength(path: &PolylinePath) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.samples.len());
    let mut s = 0.0;
    out.push(s);
    for len in &path.segment_lengths {
        s += len;
        out.push(s);
    }
    out
}

/// Triangulated surface in an ambient manifold.
///
/// `a` and `b` are the marked points of a 2-dimensional path; `sources` is the
/// vertex set standing for the subset `A` that distances are measured from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeshRepr", into = "MeshRepr")]
pub struct TriMesh {
    manifold: ManifoldSpec,
    vertices: Vec<AmbientPoint>,
    faces: Vec<[usize; 3]>,
    a: Option<usize>,
    b: Option<usize>,
    sources: Vec<usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    vertex_faces: Vec<Vec<usize>>,
    edge_count: usize,
}

#[derive(Serialize, Deserialize)]
struct MeshRepr {
    manifold: ManifoldSpec,
    vertices: Vec<AmbientPoint>,
    faces: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<usize>,
    #[serde(default)]
    sources: Vec<usize>,
}

impl TryFrom<MeshRepr> for TriMesh {
    type Error = MeshError;

    fn try_from(r: MeshRepr) -> Result<Self> {
        TriMesh::new(r.manifold, r.vertices, r.faces)?.with_marks(r.a, r.b)?.with_sources(r.sources)
    }
}

impl From<TriMesh> for MeshRepr {
    fn from(m: TriMesh) -> Self {
        MeshRepr {
            manifold: m.manifold,
            vertices: m.vertices,
            faces: m.faces,
            a: m.a,
            b: m.b,
            sources: m.sources,
        }
    }
}

impl TriMesh {
    /// Validates faces and connectivity and caches the weighted edge graph.
    pub fn new(manifold: ManifoldSpec, vertices: Vec<AmbientPoint>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(MeshError::Empty);
        }
        for (index, v) in vertices.iter().enumerate() {
            geometry::validate_point(&manifold, v).map_err(|source| MeshError::InvalidSample { index, source })?;
        }
        let count = vertices.len();
        let mut edges: HashMap<(usize, usize), f64> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&vertex) = f.iter().find(|&&v| v >= count) {
                return Err(MeshError::FaceIndex { face: fi, vertex, count });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::RepeatedFaceVertex(fi));
            }
            for (u, v) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                let key = (u.min(v), u.max(v));
                if let std::collections::hash_map::Entry::Vacant(e) = edges.entry(key) {
                    e.insert(segment_length(&manifold, &vertices[u], &vertices[v])?);
                }
            }
        }
        let mut keys: Vec<_> = edges.into_iter().collect();
        keys.sort_by(|x, y| x.0.cmp(&y.0));
        let mut adjacency = vec![Vec::new(); count];
        for &((u, v), w) in &keys {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        let mut vertex_faces = vec![Vec::new(); count];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                vertex_faces[v].push(fi);
            }
        }
        let mesh = TriMesh {
            manifold,
            vertices,
            faces,
            vertex_faces,
            a: None,
            b: None,
            sources: Vec::new(),
            adjacency,
            edge_count: keys.len(),
        };
        if !mesh.is_connected() {
            return Err(MeshError::Disconnected);
        }
        Ok(mesh)
    }

    pub fn with_marks(mut self, a: Option<usize>, b: Option<usize>) -> Result<Self> {
        for idx in [a, b].into_iter().flatten() {
            self.check_index(idx)?;
        }
        if a.is_some() && a == b {
            return Err(MeshError::MarksEqual);
        }
        self.a = a;
        self.b = b;
        Ok(self)
    }

    pub fn with_sources(mut self, sources: Vec<usize>) -> Result<Self> {
        for &s in &sources {
            self.check_index(s)?;
        }
        self.sources = sources;
        Ok(self)
    }

    fn check_index(&self, idx: usize) -> Result<()> {
        if idx >= self.vertices.len() {
            return Err(MeshError::VertexIndex(idx));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == self.vertices.len()
    }

    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn vertices(&self) -> &[AmbientPoint] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn marks(&self) -> (Option<usize>, Option<usize>) {
        (self.a, self.b)
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbours of `v` with their edge lengths.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Every undirected edge once, as `(u, v, length)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |(v, _)| u < *v).map(move |&(v, w)| (u, v, w)))
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Queued {
    dist: f64,
    vertex: usize,
}

impl Eq for Queued {}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arrival time at `C` of a plane wave that reached `A` at `ta` and `B` at
/// `tb`, for the triangle with `|CA| = b`, `|CB| = a`, `|AB| = c`. `None` when
/// the wave would reach `C` from outside the triangle.
fn triangle_update(ta: f64, tb: f64, a: f64, b: f64, c: f64) -> Option<f64> {
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    // Gram matrix of the edge vectors CA, CB and its inverse.
    let (g11, g12, g22) = (b * b, a * b * cos, a * a);
    let det = g11 * g22 - g12 * g12;
    if !(det > 1e-12 * g11 * g22) {
        return None;
    }
    let (q11, q12, q22) = (g22 / det, -g12 / det, g11 / det);
    let alpha = q11 + 2.0 * q12 + q22;
    let beta = (q11 + q12) * ta + (q12 + q22) * tb;
    let gamma = q11 * ta * ta + 2.0 * q12 * ta * tb + q22 * tb * tb - 1.0;
    let disc = beta * beta - alpha * gamma;
    if disc < 0.0 {
        return None;
    }
    let t = (beta + disc.sqrt()) / alpha;
    let (ra, rb) = (ta - t, tb - t);
    let w = (q11 * ra + q12 * rb, q12 * ra + q22 * rb);
    let slack = 1e-12 * t.abs().max(1.0);
    (t >= ta.max(tb) && w.0 <= slack && w.1 <= slack).then_some(t)
}

/// First-order fast marching from `sources` with edge fallbacks, so that
/// `d(v) ≤ d(u) + |uv|` holds on every edge.
fn fast_marching(mesh: &TriMesh, sources: &[usize]) -> Vec<f64> {
    let n = mesh.vertices.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Queued { dist: 0.0, vertex: s });
    }
    while let Some(Queued { dist: d, vertex: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in &mesh.adjacency[u] {
            if !done[v] && d + w < dist[v] {
                dist[v] = d + w;
                heap.push(Queued { dist: d + w, vertex: v });
            }
        }
        for &fi in &mesh.vertex_faces[u] {
            let f = mesh.faces[fi];
            for k in 0..3 {
                let (v, x) = (f[k], f[(k + 1) % 3]);
                let y = f[(k + 2) % 3];
                let other = if x == u { y } else if y == u { x } else { continue };
                if done[v] || !done[other] {
                    continue;
                }
                let b = edge_len(mesh, v, u);
                let a = edge_len(mesh, v, other);
                let c = edge_len(mesh, u, other);
                if let Some(t) = triangle_update(d, dist[other], a, b, c) {
                    if t < dist[v] {
                        dist[v] = t;
                        heap.push(Queued { dist: t, vertex: v });
                    }
                }
            }
        }
    }
    dist
}

/// Discrete geodesic distance from the vertex set `sources` to every vertex.
///
/// Each triangle propagates a plane wave from its two earlier vertices to the
/// third; edges propagate as a fallback. The field is zero exactly on
/// `sources` and changes by at most the edge length across every edge.
pub fn geodesic_distance_field(mesh: &TriMesh, sources: &[usize]) -> Result<Vec<f64>> {
    if sources.is_empty() {
        return Err(MeshError::EmptySources);
    }
    for &s in sources {
        mesh.check_index(s)?;
    }
    Ok(fast_marching(mesh, sources))
}

/// Numerically stable Heron formula for a triangle with the given side lengths.
pub fn heron_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * q.max(0.0).sqrt()
}

fn edge_len(mesh: &TriMesh, u: usize, v: usize) -> f64 {
    mesh.adjacency[u]
        .iter()
        .find(|(w, _)| *w == v)
        .map(|&(_, len)| len)
        .expect("face edge missing from adjacency")
}

/// Area of every face from its chord edge lengths.
pub fn face_areas(mesh: &TriMesh) -> Vec<f64> {
    mesh.faces
        .iter()
        .map(|&[i, j, k]| heron_area(edge_len(mesh, i, j), edge_len(mesh, j, k), edge_len(mesh, k, i)))
        .collect()
}

/// Indices of faces whose area is below [`DEGENERATE_AREA`].
pub fn degenerate_faces(mesh: &TriMesh) -> Vec<usize> {
    face_areas(mesh)
        .iter()
        .enumerate()
        .filter(|(_, &a)| a < DEGENERATE_AREA)
        .map(|(i, _)| i)
        .collect()
}

/// Total surface area; degenerate faces are logged and still summed.
pub fn mesh_area(mesh: &TriMesh) -> f64 {
    let areas = face_areas(mesh);
    let degenerate = areas.iter().filter(|&&a| a < DEGENERATE_AREA).count();
    if degenerate > 0 {
        log::warn!("{degenerate} degenerate face(s) with area below {DEGENERATE_AREA}");
    }
    areas.iter().sum()
}

/// Largest distance-field value over all single-vertex sources.
///
/// Eccentricities are computed for a shrinking candidate set: after a run from
/// `v`, any `w` with `(ecc(v) + d(v, w)) · (1 + DIAMETER_SLACK)` at most the
/// best eccentricity found so far is dropped. The slack absorbs the small
/// asymmetry and triangle-inequality defects of the discrete distance.
/// Candidates are taken in batches, alternating between the largest upper
/// bound and the smallest lower bound.
pub fn mesh_diameter(mesh: &TriMesh) -> f64 {
    const BATCH: usize = 8;
    let n = mesh.vertices.len();
    let mut upper = vec![f64::INFINITY; n];
    let mut lower = vec![0.0f64; n];
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut best = 0.0f64;
    let mut round = 0usize;
    while remaining > 0 {
        let mut order: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        if round % 2 == 0 {
            order.sort_by(|&x, &y| upper[y].total_cmp(&upper[x]).then(x.cmp(&y)));
        } else {
            order.sort_by(|&x, &y| lower[x].total_cmp(&lower[y]).then(x.cmp(&y)));
        }
        order.truncate(BATCH);
        round += 1;
        let fields: Vec<Vec<f64>> = order.par_iter().map(|&v| fast_marching(mesh, &[v])).collect();
        for (&v, field) in order.iter().zip(&fields) {
            let ecc = field.iter().copied().fold(0.0, f64::max);
            best = best.max(ecc);
            alive[v] = false;
            remaining -= 1;
            for w in 0..n {
                if !alive[w] {
                    continue;
                }
                let d = field[w];
                upper[w] = upper[w].min(ecc + d);
                lower[w] = lower[w].max(d).max(ecc - d);
            }
        }
        for w in 0..n {
            if alive[w] && upper[w] * (1.0 + DIAMETER_SLACK) <= best {
                alive[w] = false;
                remaining -= 1;
            }
        }
    }
    best
}

/// Icosahedron subdivided `subdivisions` times and projected onto the unit
/// sphere, marked with `a = (-1, 0, 0)` and `b = (1, 0, 0)`. The manifold is
/// `ℝ³`; distances are chord lengths.
pub fn triangulate_sphere(subdivisions: u32) -> Result<TriMesh> {
    if subdivisions > MAX_SUBDIVISIONS {
        return Err(MeshError::SubdivisionLimit(subdivisions));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    // Rotate about the y axis so that (phi, 0, 1) lands on the x axis.
    let theta = (1.0f64).atan2(phi);
    let (s, c) = theta.sin_cos();
    let normalize = |p: [f64; 3]| {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / r, p[1] / r, p[2] / r]
    };
    let mut verts: Vec<[f64; 3]> =
        raw.iter().map(|p| normalize([c * p[0] + s * p[2], p[1], -s * p[0] + c * p[2]])).collect();

    for _ in 0..subdivisions {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[i, j, k] in &faces {
            let mut mid = |u: usize, v: usize| -> usize {
                *cache.entry((u.min(v), u.max(v))).or_insert_with(|| {
                    let (p, q) = (verts[u], verts[v]);
                    verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    verts.len() - 1
                })
            };
            let (ij, jk, ki) = (mid(i, j), mid(j, k), mid(k, i));
            next.extend([[i, ij, ki], [j, jk, ij], [k, ki, jk], [ij, jk, ki]]);
        }
        faces = next;
    }

    let mut a = None;
    let mut b = None;
    for (idx, v) in verts.iter_mut().enumerate() {
        for (target, slot) in [(-1.0, &mut a), (1.0, &mut b)] {
            let off = ((v[0] - target).powi(2) + v[1] * v[1] + v[2] * v[2]).sqrt();
            if off < SNAP_TOL {
                *v = [target, 0.0, 0.0];
                *slot = Some(idx);
            }
        }
    }
    let vertices = verts.into_iter().map(AmbientPoint::from).collect();
    TriMesh::new(ManifoldSpec::Euclidean { dim: 3 }, vertices, faces)?.with_marks(a, b)
}

/// Structured grid over a rectangle in `ℝ²`, each cell split along its
/// `(x, y)–(x + h, y + h)` diagonal.
#[derive(Debug, Clone)]
pub struct RectangleGrid {
    pub mesh: TriMesh,
    /// Vertices on `y = y_max`.
    pub top: Vec<usize>,
    /// Vertices on `y = y_min`.
    pub bottom: Vec<usize>,
}

pub fn rectangle_grid(x_range: [f64; 2], y_range: [f64; 2], step: f64) -> Result<RectangleGrid> {
    let [x0, x1] = x_range;
    let [y0, y1] = y_range;
    if !(step > 0.0) || !(x1 > x0) || !(y1 > y0) {
        return Err(MeshError::BadGridStep(step));
    }
    let nx = ((x1 - x0) / step).round().max(1.0) as usize;
    let ny = ((y1 - y0) / step).round().max(1.0) as usize;
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = if j == ny { y1 } else { y0 + (y1 - y0) * j as f64 / ny as f64 };
        for i in 0..=nx {
            let x = if i == nx { x1 } else { x0 + (x1 - x0) * i as f64 / nx as f64 };
            vertices.push(AmbientPoint(vec![x, y]));
        }
    }
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    let top = (0..=nx).map(|i| idx(i, ny)).collect();
    let bottom = (0..=nx).map(|i| idx(i, 0)).collect();
    let mesh = TriMesh::new(ManifoldSpec::Euclidean { dim: 2 }, vertices, faces)?;
    Ok(RectangleGrid { mesh, top, bottom })
}
