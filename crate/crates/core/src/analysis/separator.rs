//! Balanced vertex separators.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::region::Region;

use super::spectral;

/// A partition `V = A ⊔ S ⊔ B` with no `A`–`B` edges and `|A|, |B| <= α|V|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separation {
    pub a: Region,
    pub s: Region,
    pub b: Region,
    pub alpha: f64,
}

impl Separation {
    pub fn size(&self) -> usize {
        self.s.len()
    }
}

/// Largest side size allowed by `alpha` on `n` vertices.
pub fn side_capacity(n: usize, alpha: f64) -> usize {
    (alpha * n as f64 + 1e-9).floor() as usize
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if (0.5..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Input(format!("balance alpha must lie in [1/2, 1), got {alpha}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationViolation {
    NotAPartition { vertex: usize },
    Unbalanced { side: char, size: usize, capacity: usize },
    CrossingEdge { a: usize, b: usize },
}

impl fmt::Display for SeparationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparationViolation::NotAPartition { vertex } => {
                write!(f, "vertex {vertex} is not in exactly one of A, S, B")
            }
            SeparationViolation::Unbalanced { side, size, capacity } => {
                write!(f, "side {side} has {size} vertices, more than {capacity}")
            }
            SeparationViolation::CrossingEdge { a, b } => write!(f, "edge {a}-{b} joins A and B"),
        }
    }
}

/// Checks the three defining properties of an α-separation.
pub fn validate_separation(g: &Graph, sep: &Separation) -> std::result::Result<(), SeparationViolation> {
    let n = g.n();
    let mut side = vec![0u8; n];
    for (tag, set) in [(1u8, &sep.a), (2, &sep.s), (3, &sep.b)] {
        for v in set.iter() {
            if v >= n || side[v] != 0 {
                return Err(SeparationViolation::NotAPartition { vertex: v });
            }
            side[v] = tag;
        }
    }
    if let Some(v) = side.iter().position(|&t| t == 0) {
        return Err(SeparationViolation::NotAPartition { vertex: v });
    }
    let cap = side_capacity(n, sep.alpha);
    for (name, set) in [('A', &sep.a), ('B', &sep.b)] {
        if set.len() > cap {
            return Err(SeparationViolation::Unbalanced { side: name, size: set.len(), capacity: cap });
        }
    }
    for &(u, v) in g.edges() {
        if side[u] == 1 && side[v] == 3 {
            return Err(SeparationViolation::CrossingEdge { a: u, b: v });
        }
        if side[u] == 3 && side[v] == 1 {
            return Err(SeparationViolation::CrossingEdge { a: v, b: u });
        }
    }
    Ok(())
}

/// Minimum-cardinality α-separation by exhaustive search over separator sets
/// of increasing size. Refuses graphs with more than `max_vertices` vertices
/// (at most 32) and gives up after `budget` candidate sets.
pub fn exact_separator(g: &Graph, alpha: f64, max_vertices: usize, budget: u64) -> Result<Separation> {
    check_alpha(alpha)?;
    let n = g.n();
    if n > max_vertices.min(32) {
        return Err(Error::Budget(format!(
            "exact separator limited to {} vertices, graph has {n}",
            max_vertices.min(32)
        )));
    }
    let cap = side_capacity(n, alpha);
    let adj: Vec<u32> =
        (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w))).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut evaluated = 0u64;
    for k in 0..=n {
        let mut s: u32 = if k == 0 { 0 } else { (1u32 << k) - 1 };
        loop {
            evaluated += 1;
            if evaluated > budget {
                return Err(Error::Budget(format!("exact separator exceeded {budget} candidate sets")));
            }
            if let Some((a, b)) = pack_components(&adj, full & !s, cap) {
                let to_region = |m: u32| Region::from_mask(m as u64);
                return Ok(Separation { a: to_region(a), s: to_region(s), b: to_region(b), alpha });
            }
            if k == 0 || k == n {
                break;
            }
            // Gosper's hack: next subset of the same size.
            let c = s & s.wrapping_neg();
            let r = s + c;
            let next = (((r ^ s) >> 2) / c) | r;
            if next > full || next < s {
                break;
            }
            s = next;
        }
    }
    unreachable!("S = V always separates")
}

/// Splits the components of `remaining` into two sides of size `<= cap`.
fn pack_components(adj: &[u32], remaining: u32, cap: usize) -> Option<(u32, u32)> {
    let mut comps = Vec::new();
    let mut left = remaining;
    while left != 0 {
        let seed = left & left.wrapping_neg();
        let mut comp = seed;
        let mut frontier = seed;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = adj[v] & remaining & !comp;
            comp |= new;
            frontier |= new;
        }
        left &= !comp;
        comps.push(comp);
    }
    let total = remaining.count_ones() as usize;
    if total > 2 * cap {
        return None;
    }
    // Subset-sum over component sizes, remembering one witness per reachable sum.
    let mut reach: Vec<Option<u32>> = vec![None; total + 1];
    reach[0] = Some(0);
    for &c in &comps {
        let size = c.count_ones() as usize;
        for sum in (size..=total).rev() {
            if reach[sum].is_none() {
                if let Some(prev) = reach[sum - size] {
                    reach[sum] = Some(prev | c);
                }
            }
        }
    }
    // Prefer the most balanced split.
    let mut best: Option<(usize, u32)> = None;
    for (sum, slot) in reach.iter().enumerate() {
        if let Some(a) = slot {
            if sum <= cap && total - sum <= cap {
                let imbalance = sum.abs_diff(total - sum);
                if best.is_none_or(|(b, _)| imbalance < b) {
                    best = Some((imbalance, *a));
                }
            }
        }
    }
    best.map(|(_, a)| {
        let b = remaining & !a;
        if a.count_ones() >= b.count_ones() {
            (a, b)
        } else {
            (b, a)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparatorStrategy {
    BfsLayering,
    SpectralBisection,
    GeometricCut,
}

impl FromStr for SeparatorStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "bfs_layering" | "bfs" => Ok(SeparatorStrategy::BfsLayering),
            "spectral_bisection" | "spectral" => Ok(SeparatorStrategy::SpectralBisection),
            "geometric_cut" | "geometric" => Ok(SeparatorStrategy::GeometricCut),
            other => Err(Error::Input(format!("unknown separator strategy {other:?}"))),
        }
    }
}

impl fmt::Display for SeparatorStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeparatorStrategy::BfsLayering => "bfs_layering",
            SeparatorStrategy::SpectralBisection => "spectral_bisection",
            SeparatorStrategy::GeometricCut => "geometric_cut",
        })
    }
}

/// Heuristic α-separation. Always valid, never claimed optimal.
///
/// `orderings` lets geometric callers supply their own sweep orders; the
/// generic strategies derive one from the graph.
pub fn heuristic_separator(
    g: &Graph,
    alpha: f64,
    strategy: SeparatorStrategy,
    seed: u64,
) -> Result<Separation> {
    check_alpha(alpha)?;
    let order = match strategy {
        SeparatorStrategy::BfsLayering => bfs_order(g),
        SeparatorStrategy::SpectralBisection => spectral_order(g, seed),
        SeparatorStrategy::GeometricCut => {
            return Err(Error::Input(
                "geometric_cut needs vertex coordinates; use generators::geometric_cut_separator".into(),
            ))
        }
    };
    Ok(best_sweep_cut(g, &[order], alpha))
}

/// Separator selection used by the partitioning routines: exact search on
/// graphs up to `exact_max` vertices, the heuristic strategy above that.
#[derive(Clone, Debug)]
pub struct SeparatorConfig {
    pub alpha: f64,
    pub strategy: SeparatorStrategy,
    pub seed: u64,
    pub exact_max: usize,
}

impl Default for SeparatorConfig {
    fn default() -> Self {
        Self { alpha: 0.5, strategy: SeparatorStrategy::BfsLayering, seed: 0, exact_max: 0 }
    }
}

impl SeparatorConfig {
    pub fn separate(&self, g: &Graph) -> Result<Separation> {
        if g.n() <= self.exact_max.min(24) {
            exact_separator(g, self.alpha, self.exact_max, EXACT_SEPARATOR_BUDGET)
        } else {
            heuristic_separator(g, self.alpha, self.strategy, self.seed)
        }
    }
}

/// Candidate-set budget used when exact search is selected automatically.
pub const EXACT_SEPARATOR_BUDGET: u64 = 1 << 26;

/// Pseudo-peripheral vertex of the component containing `start`.
pub(crate) fn pseudo_peripheral(g: &Graph, start: usize) -> usize {
    let mut v = start;
    let mut ecc = 0;
    for _ in 0..4 {
        let dist = g.bfs_distances(&[v]);
        let (far, d) = dist
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != usize::MAX)
            .max_by_key(|&(i, &d)| (d, std::cmp::Reverse(i)))
            .map(|(i, &d)| (i, d))
            .expect("start is reachable");
        if d <= ecc {
            break;
        }
        ecc = d;
        v = far;
    }
    v
}

/// Components by decreasing size (ties by smallest vertex).
fn components_by_size(g: &Graph) -> Vec<Vec<usize>> {
    let mut comps = g.components();
    comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
    comps
}

/// BFS layering from a pseudo-peripheral vertex, one component after another.
pub fn bfs_order(g: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.n());
    for comp in components_by_size(g) {
        let root = pseudo_peripheral(g, comp[0]);
        let dist = g.bfs_distances(&[root]);
        let mut c = comp;
        c.sort_by_key(|&v| (dist[v], v));
        order.extend(c);
    }
    order
}

/// Fiedler-vector ordering, computed per component.
pub fn spectral_order(g: &Graph, seed: u64) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.n());
    for comp in components_by_size(g) {
        if comp.len() <= 2 {
            order.extend(comp);
            continue;
        }
        let sub = g.induced(&comp);
        let fiedler = spectral::fiedler(&sub, seed);
        let mut local: Vec<usize> = (0..comp.len()).collect();
        local.sort_by(|&a, &b| fiedler.vector[a].total_cmp(&fiedler.vector[b]).then(a.cmp(&b)));
        order.extend(local.into_iter().map(|i| comp[i]));
    }
    order
}

#[derive(Clone, Copy, Debug)]
struct Cut {
    cost: usize,
    imbalance: usize,
    order_index: usize,
    prefix: usize,
    outer: bool,
}

/// Scans every prefix of every ordering; a prefix `P` yields either
/// `(A, S, B) = (P, ∂₊P, rest)` or `(P \ ∂₋P, ∂₋P, V \ P)`. Any overweight side is
/// trimmed into `S`. Returns the cheapest resulting separation after greedy
/// refinement.
pub fn best_sweep_cut(g: &Graph, orders: &[Vec<usize>], alpha: f64) -> Separation {
    let n = g.n();
    let cap = side_capacity(n, alpha);
    let mut best: Option<Cut> = None;
    for (oi, order) in orders.iter().enumerate() {
        debug_assert_eq!(order.len(), n);
        let mut in_prefix = vec![false; n];
        let mut prefix_nbrs = vec![0usize; n];
        let mut outside_nbrs = vec![0usize; n];
        let (mut outer, mut inner) = (0usize, 0usize);
        for i in 0..=n {
            let a_outer = i;
            let b_outer = n - i - outer;
            let cost_outer = outer + a_outer.saturating_sub(cap) + b_outer.saturating_sub(cap);
            let a_inner = i - inner;
            let b_inner = n - i;
            let cost_inner = inner + a_inner.saturating_sub(cap) + b_inner.saturating_sub(cap);
            for (cost, a, b, is_outer) in
                [(cost_outer, a_outer, b_outer, true), (cost_inner, a_inner, b_inner, false)]
            {
                let cand = Cut {
                    cost,
                    imbalance: a.min(cap).abs_diff(b.min(cap)),
                    order_index: oi,
                    prefix: i,
                    outer: is_outer,
                };
                if best.is_none_or(|b| (cand.cost, cand.imbalance) < (b.cost, b.imbalance)) {
                    best = Some(cand);
                }
            }
            if i == n {
                break;
            }
            let x = order[i];
            if prefix_nbrs[x] > 0 {
                outer -= 1;
            }
            in_prefix[x] = true;
            let mut outside = 0;
            for &y in g.neighbors(x) {
                if in_prefix[y] {
                    outside_nbrs[y] -= 1;
                    if outside_nbrs[y] == 0 {
                        inner -= 1;
                    }
                } else {
                    if prefix_nbrs[y] == 0 {
                        outer += 1;
                    }
                    prefix_nbrs[y] += 1;
                    outside += 1;
                }
            }
            outside_nbrs[x] = outside;
            if outside > 0 {
                inner += 1;
            }
        }
    }
    let cut = best.expect("at least one prefix");
    let order = &orders[cut.order_index];
    let mut side = vec![2u8; n]; // 1 = A, 2 = S, 3 = B
    let in_prefix: Vec<bool> = {
        let mut p = vec![false; n];
        for &v in &order[..cut.prefix] {
            p[v] = true;
        }
        p
    };
    for v in 0..n {
        let touches_other = g.neighbors(v).iter().any(|&w| in_prefix[w] != in_prefix[v]);
        side[v] = match (in_prefix[v], cut.outer, touches_other) {
            (true, true, _) => 1,
            (false, true, true) => 2,
            (false, true, false) => 3,
            (true, false, true) => 2,
            (true, false, false) => 1,
            (false, false, _) => 3,
        };
    }
    // Trim overweight sides into S, removing the vertices furthest along the order first.
    let mut counts = [0usize; 4];
    for &s in &side {
        counts[s as usize] += 1;
    }
    for &v in order.iter().rev() {
        if side[v] == 3 && counts[3] > cap {
            side[v] = 2;
            counts[3] -= 1;
            counts[2] += 1;
        }
    }
    for &v in order.iter() {
        if side[v] == 1 && counts[1] > cap {
            side[v] = 2;
            counts[1] -= 1;
            counts[2] += 1;
        }
    }
    refine(g, &mut side, cap);
    let collect = |tag: u8| -> Region { (0..n).filter(|&v| side[v] == tag).collect() };
    Separation { a: collect(1), s: collect(2), b: collect(3), alpha }
}

/// Moves separator vertices that touch only one side onto that side while
/// capacity allows.
fn refine(g: &Graph, side: &mut [u8], cap: usize) {
    let n = g.n();
    let mut counts = [0usize; 4];
    for &s in side.iter() {
        counts[s as usize] += 1;
    }
    loop {
        let mut changed = false;
        for v in 0..n {
            if side[v] != 2 {
                continue;
            }
            let touches_a = g.neighbors(v).iter().any(|&w| side[w] == 1);
            let touches_b = g.neighbors(v).iter().any(|&w| side[w] == 3);
            let target = match (touches_a, touches_b) {
                (true, true) => continue,
                (false, true) => 3,
                (true, false) => 1,
                (false, false) => {
                    if counts[1] <= counts[3] {
                        1
                    } else {
                        3
                    }
                }
            };
            let target = if counts[target as usize] < cap {
                target
            } else if !touches_a && !touches_b {
                let other = 4 - target;
                if counts[other as usize] < cap {
                    other
                } else {
                    continue;
                }
            } else {
                continue;
            };
            side[v] = target;
            counts[2] -= 1;
            counts[target as usize] += 1;
            changed = true;
        }
        if !changed {
            break;
        }
    }
}
