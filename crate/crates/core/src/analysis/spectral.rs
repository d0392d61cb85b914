//! Laplacian spectrum estimates and the Cheeger constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::Graph;

const TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct Fiedler {
    pub lambda2: f64,
    pub vector: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn laplacian_mul(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        let s: f64 = g.neighbors(v).iter().map(|&w| x[w]).sum();
        *o = g.degree(v) as f64 * x[v] - s;
    }
}

fn center_and_normalize(x: &mut [f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Second-smallest Laplacian eigenpair by power iteration on `cI - L`, with
/// the constant vector projected out. Meaningful for connected graphs.
pub fn fiedler(g: &Graph, seed: u64) -> Fiedler {
    let n = g.n();
    if n < 2 {
        return Fiedler { lambda2: 0.0, vector: vec![0.0; n], converged: true, iterations: 0 };
    }
    let shift = 2.0 * g.max_degree() as f64 + 1.0;
    let root = super::separator::pseudo_peripheral(g, 0);
    let dist = g.bfs_distances(&[root]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = dist
        .iter()
        .map(|&d| if d == usize::MAX { 0.0 } else { d as f64 } + rng.gen_range(-1e-3..1e-3))
        .collect();
    center_and_normalize(&mut x);
    let mut lx = vec![0.0; n];
    let mut lambda = 0.0;
    for it in 1..=MAX_ITERATIONS {
        laplacian_mul(g, &x, &mut lx);
        lambda = x.iter().zip(&lx).map(|(a, b)| a * b).sum::<f64>();
        let residual =
            x.iter().zip(&lx).map(|(a, b)| (b - lambda * a).powi(2)).sum::<f64>().sqrt();
        if residual < TOLERANCE {
            return Fiedler { lambda2: lambda, vector: x, converged: true, iterations: it };
        }
        for (xi, li) in x.iter_mut().zip(&lx) {
            *xi = shift * *xi - li;
        }
        if center_and_normalize(&mut x) == 0.0 {
            break;
        }
    }
    Fiedler { lambda2: lambda, vector: x, converged: false, iterations: MAX_ITERATIONS }
}

/// Bracket on the edge-expansion constant `min_{|A|<=n/2} |E(A, Ā)| / |A|`.
#[derive(Clone, Debug, Serialize)]
pub struct CheegerEstimate {
    /// Best sweep cut found; an upper bound on the constant.
    pub h_upper: f64,
    /// `λ₂ / 2`; a lower bound when the eigensolver converged.
    pub h_spectral_lower: f64,
    pub lambda2: f64,
    pub converged: bool,
}

pub fn cheeger_estimate(g: &Graph) -> CheegerEstimate {
    let n = g.n();
    if n <= 1 || !g.is_connected() {
        return CheegerEstimate { h_upper: 0.0, h_spectral_lower: 0.0, lambda2: 0.0, converged: true };
    }
    let f = fiedler(g, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f.vector[a].total_cmp(&f.vector[b]).then(a.cmp(&b)));
    let mut best = f64::INFINITY;
    for pass in 0..2 {
        if pass == 1 {
            order.reverse();
        }
        let mut inside = vec![false; n];
        let mut cut = 0isize;
        for (i, &v) in order.iter().take(n / 2).enumerate() {
            for &w in g.neighbors(v) {
                cut += if inside[w] { -1 } else { 1 };
            }
            inside[v] = true;
            best = best.min(cut as f64 / (i + 1) as f64);
        }
    }
    CheegerEstimate {
        h_upper: best,
        h_spectral_lower: (f.lambda2 / 2.0).max(0.0),
        lambda2: f.lambda2,
        converged: f.converged,
    }
}
