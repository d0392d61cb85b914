//! Embedded graph families: Euclidean lattices, hyperbolic tiling patches and
//! random regular graphs.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::separator::{best_sweep_cut, check_alpha};
use crate::analysis::Separation;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Comparison slack for metric checks.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Largest vertex count a generator will build.
pub const MAX_GENERATED_VERTICES: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Coordinates {
    Euclidean { dim: usize, points: Vec<Vec<f64>> },
    /// Polar `(r, θ)` in the Poincaré disk.
    Poincare { points: Vec<(f64, f64)> },
}

impl Coordinates {
    pub fn len(&self) -> usize {
        match self {
            Coordinates::Euclidean { points, .. } => points.len(),
            Coordinates::Poincare { points } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        match self {
            Coordinates::Euclidean { points, .. } => {
                points[u].iter().zip(&points[v]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            }
            Coordinates::Poincare { points } => poincare_distance(points[u], points[v]),
        }
    }

    /// Points in a chart where straight lines are geodesics (Klein model for
    /// the disk), used by sweep cuts.
    fn flat_points(&self) -> Vec<Vec<f64>> {
        match self {
            Coordinates::Euclidean { points, .. } => points.clone(),
            Coordinates::Poincare { points } => points
                .iter()
                .map(|&(r, t)| {
                    let k = 2.0 * r / (1.0 + r * r);
                    vec![k * t.cos(), k * t.sin()]
                })
                .collect(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Coordinates::Euclidean { dim, .. } => *dim,
            Coordinates::Poincare { .. } => 2,
        }
    }
}

/// Hyperbolic distance between polar points of the Poincaré disk.
pub fn poincare_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ax, ay) = (a.0 * a.1.cos(), a.0 * a.1.sin());
    let (bx, by) = (b.0 * b.1.cos(), b.0 * b.1.sin());
    let diff = (ax - bx).powi(2) + (ay - by).powi(2);
    let denom = (1.0 - a.0 * a.0) * (1.0 - b.0 * b.0);
    (1.0 + 2.0 * diff / denom).max(1.0).acosh()
}

#[derive(Clone, Debug)]
pub struct EmbeddedGraph {
    pub graph: Graph,
    pub coordinates: Coordinates,
    /// Bound on the number of vertices in any ball of radius `2w`.
    pub rho: usize,
    /// Bound on edge lengths.
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalityViolation {
    LongEdge { u: usize, v: usize, length: f64 },
    DenseBall { center: usize, count: usize },
    CoordinateCount { expected: usize, found: usize },
}

impl std::fmt::Display for LocalityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocalityViolation::LongEdge { u, v, length } => write!(f, "edge {u}-{v} has length {length}"),
            LocalityViolation::DenseBall { center, count } => {
                write!(f, "ball of radius 2w around {center} holds {count} vertices")
            }
            LocalityViolation::CoordinateCount { expected, found } => {
                write!(f, "expected {expected} coordinates, found {found}")
            }
        }
    }
}

/// Largest number of vertices within `radius` of some vertex.
fn max_ball_count(coords: &Coordinates, radius: f64) -> (usize, usize) {
    let n = coords.len();
    (0..n)
        .map(|c| ((0..n).filter(|&v| coords.distance(c, v) <= radius + METRIC_TOLERANCE).count(), c))
        .max_by_key(|&(count, c)| (count, std::cmp::Reverse(c)))
        .unwrap_or((0, 0))
}

impl EmbeddedGraph {
    /// Checks edge lengths against `w` and ball sizes (centered at every
    /// vertex) against `ρ`.
    pub fn check_locality(&self) -> std::result::Result<(), LocalityViolation> {
        if self.coordinates.len() != self.graph.n() {
            return Err(LocalityViolation::CoordinateCount {
                expected: self.graph.n(),
                found: self.coordinates.len(),
            });
        }
        for &(u, v) in self.graph.edges() {
            let length = self.coordinates.distance(u, v);
            if length > self.w + METRIC_TOLERANCE {
                return Err(LocalityViolation::LongEdge { u, v, length });
            }
        }
        let (count, center) = max_ball_count(&self.coordinates, 2.0 * self.w);
        if count > self.rho {
            return Err(LocalityViolation::DenseBall { center, count });
        }
        Ok(())
    }

    /// The graph with every pair at distance `<= w` joined.
    pub fn nubg_extension(&self) -> EmbeddedGraph {
        let n = self.graph.n();
        let mut edges: Vec<(usize, usize)> = self.graph.edges().to_vec();
        for u in 0..n {
            for v in u + 1..n {
                if self.coordinates.distance(u, v) <= self.w + METRIC_TOLERANCE {
                    edges.push((u, v));
                }
            }
        }
        EmbeddedGraph {
            graph: Graph::from_edges(n, edges).expect("pairs are in range"),
            coordinates: self.coordinates.clone(),
            rho: self.rho,
            w: self.w,
        }
    }

    /// Whether every pair closer than `2σ` is an edge.
    pub fn satisfies_nubg(&self, sigma: f64) -> bool {
        let n = self.graph.n();
        (0..n).all(|u| {
            (u + 1..n).all(|v| self.coordinates.distance(u, v) >= 2.0 * sigma - METRIC_TOLERANCE || self.graph.has_edge(u, v))
        })
    }

    /// `coords v1` sidecar text.
    pub fn coords_text(&self) -> String {
        let mut out = String::new();
        match &self.coordinates {
            Coordinates::Euclidean { dim, points } => {
                let _ = writeln!(out, "coords v1 n={} model=euclidean dim={dim} w={} rho={}", points.len(), self.w, self.rho);
                for p in points {
                    let line: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
                    let _ = writeln!(out, "{}", line.join(" "));
                }
            }
            Coordinates::Poincare { points } => {
                let _ = writeln!(out, "coords v1 n={} model=poincare dim=2 w={} rho={}", points.len(), self.w, self.rho);
                for (r, t) in points {
                    let _ = writeln!(out, "{r} {t}");
                }
            }
        }
        out
    }
}

/// Parses a `coords v1` sidecar into coordinates and `(ρ, w)`.
pub fn parse_coords(text: &str) -> Result<(Coordinates, usize, f64)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty coordinates file"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("coords") || fields.next() != Some("v1") {
        return Err(Error::parse(hline + 1, "expected header `coords v1`"));
    }
    let mut kv = HashMap::new();
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| Error::parse(hline + 1, format!("bad header field {f:?}")))?;
        kv.insert(k, v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| Error::parse(hline + 1, format!("header lacks {k}=")));
    let n: usize = get("n")?.parse().map_err(|_| Error::parse(hline + 1, "bad n"))?;
    let dim: usize = get("dim")?.parse().map_err(|_| Error::parse(hline + 1, "bad dim"))?;
    let w: f64 = get("w")?.parse().map_err(|_| Error::parse(hline + 1, "bad w"))?;
    let rho: usize = get("rho")?.parse().map_err(|_| Error::parse(hline + 1, "bad rho"))?;
    let model = get("model")?;
    let mut points = Vec::with_capacity(n);
    for (i, line) in lines {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::parse(i + 1, format!("bad number {t:?}"))))
            .collect::<Result<_>>()?;
        if vals.len() != dim {
            return Err(Error::parse(i + 1, format!("expected {dim} values, found {}", vals.len())));
        }
        points.push(vals);
    }
    if points.len() != n {
        return Err(Error::parse(hline + 1, format!("header says n={n} but {} points follow", points.len())));
    }
    let coords = match model {
        "euclidean" => Coordinates::Euclidean { dim, points },
        "poincare" if dim == 2 => Coordinates::Poincare { points: points.into_iter().map(|p| (p[0], p[1])).collect() },
        other => return Err(Error::parse(hline + 1, format!("unknown model {other:?}"))),
    };
    Ok((coords, rho, w))
}

/// Lattice points within distance 2 of the origin in `Z^D`.
pub fn grid_rho(dim: usize) -> usize {
    match dim {
        1 => 5,
        2 => 13,
        3 => 33,
        _ => unreachable!("dimension checked by caller"),
    }
}

/// `side^D` lattice with unit edges.
pub fn make_grid(dim: usize, side: usize) -> Result<EmbeddedGraph> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Input(format!("grid dimension must be 1, 2 or 3, got {dim}")));
    }
    if side < 2 {
        return Err(Error::Input(format!("grid side must be at least 2, got {side}")));
    }
    let n = side
        .checked_pow(dim as u32)
        .filter(|&n| n <= MAX_GENERATED_VERTICES)
        .ok_or_else(|| Error::Input(format!("grid {side}^{dim} exceeds {MAX_GENERATED_VERTICES} vertices")))?;
    let mut points = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n * dim);
    for v in 0..n {
        let mut rest = v;
        let mut p = Vec::with_capacity(dim);
        let mut stride = 1;
        for _ in 0..dim {
            let c = rest % side;
            rest /= side;
            if c + 1 < side {
                edges.push((v, v + stride));
            }
            stride *= side;
            p.push(c as f64);
        }
        points.push(p);
    }
    Ok(EmbeddedGraph {
        graph: Graph::from_edges(n, edges)?,
        coordinates: Coordinates::Euclidean { dim, points },
        rho: grid_rho(dim),
        w: 1.0,
    })
}

type Vec3 = [f64; 3];

fn minkowski(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

/// Reflection of `x` across the geodesic through hyperboloid points `a`, `b`.
fn reflect(x: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let normal = [c[0], c[1], -c[2]];
    let k = 2.0 * minkowski(x, &normal) / minkowski(&normal, &normal);
    [x[0] - k * normal[0], x[1] - k * normal[1], x[2] - k * normal[2]]
}

struct VertexIndex {
    cell: f64,
    match_radius: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Vec3>,
}

impl VertexIndex {
    fn key(&self, p: &Vec3) -> (i64, i64) {
        ((p[0] / self.cell).floor() as i64, (p[1] / self.cell).floor() as i64)
    }

    fn find(&self, p: &Vec3) -> Option<usize> {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.buckets.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        let q = &self.points[i];
                        if (q[0] - p[0]).hypot(q[1] - p[1]) < self.match_radius {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, p: Vec3) -> usize {
        if let Some(i) = self.find(&p) {
            return i;
        }
        let i = self.points.len();
        let key = self.key(&p);
        self.buckets.entry(key).or_default().push(i);
        self.points.push(p);
        i
    }
}

/// Edge length of the regular `{p,q}` tiling.
pub fn hyperbolic_edge_length(p: usize, q: usize) -> f64 {
    let pi = std::f64::consts::PI;
    2.0 * ((pi / p as f64).cos() / (pi / q as f64).sin()).acosh()
}

/// Vertices and edges of the `{p,q}` tiling within `rings` layers of tiles
/// around a central tile; layer `k + 1` adds every tile sharing a vertex with
/// layer `k`.
pub fn make_hyperbolic_patch(p: usize, q: usize, rings: usize) -> Result<EmbeddedGraph> {
    if p < 3 || q < 3 || (p - 2) * (q - 2) <= 4 {
        return Err(Error::Input(format!("{{{p},{q}}} is not a hyperbolic tiling; need (p-2)(q-2) > 4")));
    }
    if rings == 0 {
        return Err(Error::Input("need at least one ring".into()));
    }
    let pi = std::f64::consts::PI;
    let edge = hyperbolic_edge_length(p, q);
    let cosh_r = (1.0 / (pi / p as f64).tan()) * (1.0 / (pi / q as f64).tan());
    let sinh_r = (cosh_r * cosh_r - 1.0).sqrt();
    let mut index = VertexIndex {
        cell: edge / 2.0,
        match_radius: edge / 4.0,
        buckets: HashMap::new(),
        points: Vec::new(),
    };
    let center: Vec<Vec3> = (0..p)
        .map(|k| {
            let t = 2.0 * pi * k as f64 / p as f64;
            [sinh_r * t.cos(), sinh_r * t.sin(), cosh_r]
        })
        .collect();
    let mut tiles: Vec<Vec<Vec3>> = Vec::new();
    let mut tile_ids: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut add_tile = |verts: Vec<Vec3>, index: &mut VertexIndex, tiles: &mut Vec<Vec<Vec3>>, tile_ids: &mut Vec<Vec<usize>>| -> Result<Option<usize>> {
        let ids: Vec<usize> = verts.iter().map(|v| index.insert(*v)).collect();
        if index.points.len() > MAX_GENERATED_VERTICES {
            return Err(Error::Input(format!("hyperbolic patch exceeds {MAX_GENERATED_VERTICES} vertices")));
        }
        let mut key = ids.clone();
        key.sort_unstable();
        if seen.contains_key(&key) {
            return Ok(None);
        }
        seen.insert(key, tiles.len());
        tiles.push(verts);
        tile_ids.push(ids);
        Ok(Some(tiles.len() - 1))
    };
    add_tile(center, &mut index, &mut tiles, &mut tile_ids)?;
    let mut frontier = vec![0usize];
    for _ in 1..rings {
        let mut next = Vec::new();
        for &t in &frontier {
            for i in 0..p {
                // Walk around vertex i by alternating reflections across its two edges.
                let mut cur = tiles[t].clone();
                for step in 0..q {
                    let j = if step % 2 == 0 { (i + 1) % p } else { (i + p - 1) % p };
                    let (a, b) = (cur[i], cur[j]);
                    cur = cur.iter().map(|x| reflect(x, &a, &b)).collect();
                    if let Some(id) = add_tile(cur.clone(), &mut index, &mut tiles, &mut tile_ids)? {
                        next.push(id);
                    }
                }
            }
        }
        frontier = next;
    }
    let n = index.points.len();
    let mut edges = Vec::new();
    for ids in &tile_ids {
        for i in 0..p {
            edges.push((ids[i].min(ids[(i + 1) % p]), ids[i].max(ids[(i + 1) % p])));
        }
    }
    let points: Vec<(f64, f64)> = index
        .points
        .iter()
        .map(|v| {
            let (x, y) = (v[0] / (1.0 + v[2]), v[1] / (1.0 + v[2]));
            (x.hypot(y), y.atan2(x))
        })
        .collect();
    let coordinates = Coordinates::Poincare { points };
    let (rho, _) = max_ball_count(&coordinates, 2.0 * edge);
    Ok(EmbeddedGraph { graph: Graph::from_edges(n, edges)?, coordinates, rho, w: edge })
}

/// Uniform simple `degree`-regular graph by the pairing model, rejecting
/// pairings with loops or repeated edges.
pub fn make_random_regular(degree: usize, n: usize, seed: u64) -> Result<Graph> {
    if degree < 3 {
        return Err(Error::Input(format!("degree must be at least 3, got {degree}")));
    }
    if n <= degree || (degree * n) % 2 == 1 {
        return Err(Error::Input(format!("no simple {degree}-regular graph on {n} vertices")));
    }
    if n > MAX_GENERATED_VERTICES {
        return Err(Error::Input(format!("{n} vertices exceeds {MAX_GENERATED_VERTICES}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    for _ in 0..100_000 {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> =
            stubs.chunks(2).map(|pair| (pair[0].min(pair[1]), pair[0].max(pair[1]))).collect();
        if edges.iter().any(|(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Graph::from_edges(n, edges);
    }
    Err(Error::Budget(format!("pairing model found no simple {degree}-regular graph on {n} vertices")))
}

/// Sweep directions used by the geometric cut.
fn sweep_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0]],
        2 => (0..16)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 16.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let mut dirs = Vec::new();
            for a in -1i32..=1 {
                for b in -1i32..=1 {
                    for c in -1i32..=1 {
                        let v = [a as f64, b as f64, c as f64];
                        let first = v.iter().find(|x| **x != 0.0);
                        if first == Some(&1.0) {
                            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                            let mut d: Vec<f64> = v.iter().map(|x| x / norm).collect();
                            d.resize(dim, 0.0);
                            dirs.push(d);
                        }
                    }
                }
            }
            dirs
        }
    }
}

/// Sweeps hyperplanes (geodesics, in the hyperbolic case) across the
/// embedding in several directions and keeps the cheapest valid cut.
pub fn geometric_cut_separator(eg: &EmbeddedGraph, alpha: f64) -> Result<Separation> {
    check_alpha(alpha)?;
    if eg.coordinates.len() != eg.graph.n() {
        return Err(Error::Input(format!(
            "geometric cut needs {} coordinates, found {}",
            eg.graph.n(),
            eg.coordinates.len()
        )));
    }
    Ok(geometric_cut_on(&eg.graph, &eg.coordinates.flat_points(), eg.coordinates.dim(), alpha))
}

/// Geometric cut on a subgraph whose vertex `i` sits at `flat[ids[i]]`.
pub fn geometric_cut_subgraph(sub: &Graph, ids: &[usize], eg: &EmbeddedGraph, alpha: f64) -> Result<Separation> {
    check_alpha(alpha)?;
    let flat = eg.coordinates.flat_points();
    let pts: Vec<Vec<f64>> = ids.iter().map(|&v| flat[v].clone()).collect();
    Ok(geometric_cut_on(sub, &pts, eg.coordinates.dim(), alpha))
}

fn geometric_cut_on(g: &Graph, pts: &[Vec<f64>], dim: usize, alpha: f64) -> Separation {
    let orders: Vec<Vec<usize>> = sweep_directions(dim)
        .iter()
        .map(|dir| {
            let proj: Vec<f64> = pts.iter().map(|p| p.iter().zip(dir).map(|(a, b)| a * b).sum()).collect();
            let mut order: Vec<usize> = (0..g.n()).collect();
            order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)));
            order
        })
        .collect();
    best_sweep_cut(g, &orders, alpha)
}
