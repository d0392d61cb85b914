//! Empirical separability profile: separator size of BFS-grown subgraphs as a
//! function of their size, with a power-law fit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::separator::{exact_separator, heuristic_separator, SeparatorStrategy};

#[derive(Clone, Debug, Serialize)]
pub struct ProfileSample {
    pub r: usize,
    pub s_observed: usize,
    pub subgraph_seed: u64,
    pub root: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparabilityProfile {
    pub samples: Vec<ProfileSample>,
    /// `(r, max observed separator)` per requested size.
    pub per_r_max: Vec<(usize, usize)>,
    /// Fitted exponent `c` in `s(r) ~ C r^c`.
    pub fitted_c: f64,
    pub c_low: f64,
    pub c_high: f64,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct ProfileConfig {
    pub alpha: f64,
    pub strategy: SeparatorStrategy,
    pub samples_per_r: usize,
    pub seed: u64,
    /// Subgraphs up to this size use the exact separator.
    pub exact_max: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { alpha: 0.5, strategy: SeparatorStrategy::BfsLayering, samples_per_r: 4, seed: 0, exact_max: 0 }
    }
}

/// The first `r` vertices reached by BFS from `root` (fewer if the component is smaller).
pub fn bfs_ball(g: &Graph, root: usize, r: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    let mut out = vec![root];
    seen[root] = true;
    let mut head = 0;
    while head < out.len() && out.len() < r {
        let v = out[head];
        head += 1;
        for &w in g.neighbors(v) {
            if !seen[w] && out.len() < r {
                seen[w] = true;
                out.push(w);
            }
        }
    }
    out
}

/// Profile using a caller-supplied separator on each grown subgraph
/// (`separate(subgraph, original_vertex_ids) -> |S|`).
pub fn profile_with<F>(
    g: &Graph,
    r_grid: &[usize],
    samples_per_r: usize,
    seed: u64,
    label: &str,
    mut separate: F,
) -> Result<SeparabilityProfile>
where
    F: FnMut(&Graph, &[usize], u64) -> Result<usize>,
{
    if g.n() == 0 {
        return Err(Error::Input("cannot profile an empty graph".into()));
    }
    if r_grid.is_empty() || r_grid.contains(&0) || samples_per_r == 0 {
        return Err(Error::Input("profile needs positive sizes and at least one sample".into()));
    }
    let mut r_grid = r_grid.to_vec();
    r_grid.sort_unstable();
    r_grid.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut per_r_max = Vec::new();
    for &r in &r_grid {
        let mut worst = 0;
        for _ in 0..samples_per_r {
            let subgraph_seed: u64 = rng.gen();
            let root = ChaCha8Rng::seed_from_u64(subgraph_seed).gen_range(0..g.n());
            let vertices = bfs_ball(g, root, r);
            let sub = g.induced(&vertices);
            // A single vertex has nothing to separate.
            let s = if sub.n() <= 1 { 0 } else { separate(&sub, &vertices, subgraph_seed)? };
            worst = worst.max(s);
            samples.push(ProfileSample { r, s_observed: s, subgraph_seed, root });
        }
        per_r_max.push((r, worst));
    }
    let (fitted_c, c_low, c_high) = fit_exponent(&per_r_max);
    Ok(SeparabilityProfile { samples, per_r_max, fitted_c, c_low, c_high, label: label.to_string() })
}

/// Profile with one of the graph-only strategies.
pub fn separability_profile(g: &Graph, r_grid: &[usize], cfg: &ProfileConfig) -> Result<SeparabilityProfile> {
    profile_with(g, r_grid, cfg.samples_per_r, cfg.seed, &cfg.strategy.to_string(), |sub, _, seed| {
        if sub.n() <= cfg.exact_max {
            Ok(exact_separator(sub, cfg.alpha, cfg.exact_max, u64::MAX)?.size())
        } else {
            Ok(heuristic_separator(sub, cfg.alpha, cfg.strategy, seed)?.size())
        }
    })
}

/// Least-squares slope of `ln s` against `ln r` over points with `s > 0`,
/// with a two-standard-error band. Returns zeros when fewer than two such
/// points exist (a profile of constant-size separators).
pub fn fit_exponent(points: &[(usize, usize)]) -> (f64, f64, f64) {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|&&(r, s)| s > 0 && r > 0).map(|&(r, s)| ((r as f64).ln(), (s as f64).ln())).collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return (0.0, 0.0, 0.0);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    if sxx == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    let se = if pts.len() > 2 {
        let resid = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>();
        (resid / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, slope - 2.0 * se, slope + 2.0 * se)
}

impl SeparabilityProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,s_observed,seed,root\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", s.r, s.s_observed, s.subgraph_seed, s.root));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::test_graphs::*;

    #[test]
    fn path_profile_is_flat() {
        let g = path(1024);
        let p = separability_profile(&g, &[16, 64, 256, 1024], &ProfileConfig::default()).unwrap();
        assert!(p.per_r_max.iter().all(|&(_, s)| s <= 1));
        assert!(p.fitted_c.abs() < 0.15);
    }

    #[test]
    fn grid_profile_is_square_root() {
        let g = grid(32, 32);
        let cfg = ProfileConfig { samples_per_r: 3, seed: 7, ..Default::default() };
        let p = separability_profile(&g, &[64, 128, 256, 512, 1024], &cfg).unwrap();
        assert!((p.fitted_c - 0.5).abs() <= 0.15, "c = {}", p.fitted_c);
        assert!(p.c_low <= p.fitted_c && p.fitted_c <= p.c_high);
    }

    #[test]
    fn deterministic_for_seed() {
        let g = grid(10, 10);
        let cfg = ProfileConfig { seed: 11, ..Default::default() };
        let a = separability_profile(&g, &[10, 50], &cfg).unwrap();
        let b = separability_profile(&g, &[10, 50], &cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn fit_recovers_exact_power() {
        let pts: Vec<(usize, usize)> = [16usize, 64, 256, 1024].iter().map(|&r| (r, (r as f64).sqrt() as usize)).collect();
        let (c, lo, hi) = fit_exponent(&pts);
        assert!((c - 0.5).abs() < 1e-12);
        assert!((hi - lo).abs() < 1e-9);
    }

    #[test]
    fn single_vertex_is_trivial() {
        let p = separability_profile(&Graph::empty(1), &[1], &ProfileConfig::default()).unwrap();
        assert!(p.samples.iter().all(|s| s.s_observed == 0));
        assert_eq!(p.fitted_c, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(separability_profile(&Graph::empty(0), &[4], &ProfileConfig::default()).is_err());
        assert!(separability_profile(&path(4), &[], &ProfileConfig::default()).is_err());
    }

    #[test]
    fn ball_is_connected_prefix() {
        let g = grid(5, 5);
        let ball = bfs_ball(&g, 12, 9);
        assert_eq!(ball.len(), 9);
        assert!(g.induced(&ball).is_connected());
        assert_eq!(bfs_ball(&disjoint_union(&path(3), &path(3)), 0, 10).len(), 3);
    }
}
