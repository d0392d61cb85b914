//! Tree decompositions: validation, exact treewidth on small graphs and
//! elimination-order heuristics.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeDecomposition {
    /// Sorted vertex bags, one per tree node.
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Largest bag size minus one (`-1` for no bags is reported as 0).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionViolation {
    NotATree { reason: String },
    UnknownVertex { node: usize, vertex: usize },
    /// Property 1: every vertex lies in some bag.
    UncoveredVertex { vertex: usize },
    /// Property 2: every edge lies inside some bag.
    UncoveredEdge { u: usize, v: usize },
    /// Property 3: the bags containing a vertex form a subtree.
    DisconnectedOccurrences { vertex: usize },
}

impl fmt::Display for DecompositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotATree { reason } => write!(f, "decomposition tree invalid: {reason}"),
            Self::UnknownVertex { node, vertex } => write!(f, "bag {node} holds unknown vertex {vertex}"),
            Self::UncoveredVertex { vertex } => write!(f, "vertex {vertex} lies in no bag"),
            Self::UncoveredEdge { u, v } => write!(f, "edge {u}-{v} lies in no bag"),
            Self::DisconnectedOccurrences { vertex } => {
                write!(f, "bags containing vertex {vertex} are not connected in the tree")
            }
        }
    }
}

/// Checks the tree structure, then the three decomposition properties in order.
pub fn validate_tree_decomposition(
    g: &Graph,
    td: &TreeDecomposition,
) -> std::result::Result<(), DecompositionViolation> {
    let nodes = td.bags.len();
    let n = g.n();
    if nodes == 0 {
        return if n == 0 {
            Ok(())
        } else {
            Err(DecompositionViolation::UncoveredVertex { vertex: 0 })
        };
    }
    if td.tree_edges.len() != nodes - 1 {
        return Err(DecompositionViolation::NotATree {
            reason: format!("{} nodes need {} edges, found {}", nodes, nodes - 1, td.tree_edges.len()),
        });
    }
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in &td.tree_edges {
        if a >= nodes || b >= nodes {
            return Err(DecompositionViolation::NotATree { reason: format!("edge {a}-{b} names a missing node") });
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(DecompositionViolation::NotATree { reason: format!("edge {a}-{b} closes a cycle") });
        }
        parent[ra] = rb;
    }
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(DecompositionViolation::UnknownVertex { node: i, vertex: v });
            }
            if occurrences[v].last() != Some(&i) {
                occurrences[v].push(i);
            }
        }
    }
    if let Some(v) = occurrences.iter().position(Vec::is_empty) {
        return Err(DecompositionViolation::UncoveredVertex { vertex: v });
    }
    let bag_sets: Vec<BTreeSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    for &(u, v) in g.edges() {
        if !occurrences[u].iter().any(|&i| bag_sets[i].contains(&v)) {
            return Err(DecompositionViolation::UncoveredEdge { u, v });
        }
    }
    // In a forest, k nodes induce a connected subgraph iff they span k-1 edges.
    let mut internal = vec![0usize; n];
    for &(a, b) in &td.tree_edges {
        for v in bag_sets[a].intersection(&bag_sets[b]) {
            internal[*v] += 1;
        }
    }
    for v in 0..n {
        if internal[v] + 1 != occurrences[v].len() {
            return Err(DecompositionViolation::DisconnectedOccurrences { vertex: v });
        }
    }
    Ok(())
}

/// Decomposition induced by eliminating vertices in `order`.
pub fn decomposition_from_order(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    for &v in order {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        parent[pos[v]] = nbrs.iter().map(|&w| pos[w]).min();
        let mut bag = nbrs.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        for &a in &nbrs {
            adj[a].remove(&v);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
    let mut last_root: Option<usize> = None;
    for (i, p) in parent.iter().enumerate() {
        match p {
            Some(p) => tree_edges.push((i, *p)),
            None => {
                if let Some(r) = last_root {
                    tree_edges.push((r, i));
                }
                last_root = Some(i);
            }
        }
    }
    TreeDecomposition { bags, tree_edges }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EliminationHeuristic {
    MinDegree,
    MinFill,
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy elimination ordering; ties go to the smallest vertex.
pub fn elimination_order(g: &Graph, heuristic: EliminationHeuristic) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut score: Vec<usize> = match heuristic {
        EliminationHeuristic::MinDegree => (0..n).map(|v| adj[v].len()).collect(),
        EliminationHeuristic::MinFill => (0..n).map(|v| fill_in(&adj, v)).collect(),
    };
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (score[v], adj[v].len(), v))
            .expect("vertices remain");
        alive[v] = false;
        order.push(v);
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nbrs {
            adj[a].remove(&v);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[v].clear();
        match heuristic {
            EliminationHeuristic::MinDegree => {
                for &a in &nbrs {
                    score[a] = adj[a].len();
                }
            }
            EliminationHeuristic::MinFill => {
                let mut touched: BTreeSet<usize> = nbrs.iter().copied().collect();
                for &a in &nbrs {
                    touched.extend(adj[a].iter().copied());
                }
                for a in touched {
                    score[a] = fill_in(&adj, a);
                }
            }
        }
    }
    order
}

/// Upper bound from a single greedy elimination heuristic.
pub fn heuristic_treewidth_upper(g: &Graph, heuristic: EliminationHeuristic) -> (usize, TreeDecomposition) {
    let td = decomposition_from_order(g, &elimination_order(g, heuristic));
    (td.width(), td)
}

/// Best of the min-fill, min-degree and BFS-layering elimination orders.
pub fn best_treewidth_upper(g: &Graph) -> (usize, TreeDecomposition) {
    let td = [
        elimination_order(g, EliminationHeuristic::MinFill),
        elimination_order(g, EliminationHeuristic::MinDegree),
        super::separator::bfs_order(g),
    ]
    .iter()
    .map(|order| decomposition_from_order(g, order))
    .min_by_key(TreeDecomposition::width)
    .expect("three candidates");
    (td.width(), td)
}

/// Minor-min-width lower bound: contract a minimum-degree vertex into its
/// lowest-degree neighbour, recording the largest minimum degree seen.
pub fn treewidth_lower_bound(g: &Graph) -> usize {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut lb = 0;
    while alive.len() > 1 {
        let v = *alive.iter().min_by_key(|&&v| (adj[v].len(), v)).expect("nonempty");
        lb = lb.max(adj[v].len());
        alive.remove(&v);
        let nbrs: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
        if let Some(&u) = nbrs.iter().min_by_key(|&&u| (adj[u].len(), u)) {
            for &w in &nbrs {
                adj[w].remove(&v);
                if w != u {
                    adj[w].insert(u);
                    adj[u].insert(w);
                }
            }
        }
    }
    lb
}

fn mask_lower_bound(adj: &[u32], remaining: u32) -> usize {
    let mut adj: Vec<u32> = adj.iter().map(|&a| a & remaining).collect();
    let mut alive = remaining;
    let mut lb = 0;
    while alive.count_ones() > 1 {
        let mut best = None;
        let mut m = alive;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let d = adj[v].count_ones();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        let (d, v) = best.expect("alive nonempty");
        lb = lb.max(d as usize);
        alive &= !(1 << v);
        let nbrs = adj[v];
        adj[v] = 0;
        if nbrs == 0 {
            continue;
        }
        let mut u = usize::MAX;
        let mut ud = u32::MAX;
        let mut m = nbrs;
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            if adj[w].count_ones() < ud {
                ud = adj[w].count_ones();
                u = w;
            }
        }
        let mut m = nbrs;
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            adj[w] &= !(1 << v);
            if w != u {
                adj[w] |= 1 << u;
                adj[u] |= 1 << w;
            }
        }
    }
    lb
}

struct BranchAndBound {
    best_width: usize,
    best_order: Vec<usize>,
    /// Eliminated set -> smallest width with which it has been reached.
    seen: HashMap<u32, usize>,
    nodes: u64,
    budget: u64,
}

impl BranchAndBound {
    fn search(&mut self, adj: &[u32], remaining: u32, order: &mut Vec<usize>, width: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!("exact treewidth exceeded {} search nodes", self.budget)));
        }
        let left = remaining.count_ones() as usize;
        if left <= width + 1 {
            // Any completion keeps the width.
            if width < self.best_width {
                self.best_width = width;
                self.best_order = order.clone();
                let mut m = remaining;
                while m != 0 {
                    self.best_order.push(m.trailing_zeros() as usize);
                    m &= m - 1;
                }
            }
            return Ok(());
        }
        if width.max(mask_lower_bound(adj, remaining)) >= self.best_width {
            return Ok(());
        }
        let eliminated = !remaining;
        match self.seen.get(&eliminated) {
            Some(&w) if w <= width => return Ok(()),
            _ => {
                self.seen.insert(eliminated, width);
            }
        }
        let mut candidates = Vec::new();
        let mut m = remaining;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let nbrs = adj[v] & remaining;
            let simplicial = {
                let mut ok = true;
                let mut k = nbrs;
                while k != 0 {
                    let w = k.trailing_zeros() as usize;
                    k &= k - 1;
                    if (adj[w] | (1 << w)) & nbrs != nbrs {
                        ok = false;
                        break;
                    }
                }
                ok
            };
            if simplicial {
                candidates.clear();
                candidates.push((nbrs.count_ones() as usize, v));
                break;
            }
            candidates.push((nbrs.count_ones() as usize, v));
        }
        candidates.sort_unstable();
        for (deg, v) in candidates {
            let w = width.max(deg);
            if w >= self.best_width {
                continue;
            }
            let nbrs = adj[v] & remaining;
            let mut next = adj.to_vec();
            let mut k = nbrs;
            while k != 0 {
                let a = k.trailing_zeros() as usize;
                k &= k - 1;
                next[a] |= nbrs & !(1 << a);
            }
            order.push(v);
            self.search(&next, remaining & !(1 << v), order, w)?;
            order.pop();
        }
        Ok(())
    }
}

/// Exact treewidth with an optimal decomposition, by branch and bound over
/// elimination orderings. Refuses graphs above `max_vertices` (at most 32)
/// and aborts after `budget` search nodes.
pub fn exact_treewidth(g: &Graph, max_vertices: usize, budget: u64) -> Result<(usize, TreeDecomposition)> {
    let n = g.n();
    if n > max_vertices.min(32) {
        return Err(Error::Budget(format!(
            "exact treewidth limited to {} vertices, graph has {n}",
            max_vertices.min(32)
        )));
    }
    if n == 0 {
        return Ok((0, TreeDecomposition { bags: Vec::new(), tree_edges: Vec::new() }));
    }
    let (_, start) = best_treewidth_upper(g);
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w))).collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut bnb = BranchAndBound {
        best_width: start.width(),
        best_order: Vec::new(),
        seen: HashMap::new(),
        nodes: 0,
        budget,
    };
    bnb.search(&adj, full, &mut Vec::new(), 0)?;
    if bnb.best_order.is_empty() {
        // The heuristic was already optimal.
        return Ok((start.width(), start));
    }
    let td = decomposition_from_order(g, &bnb.best_order);
    debug_assert_eq!(td.width(), bnb.best_width);
    Ok((bnb.best_width, td))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::test_graphs::*;

    /// Independent oracle: minimum over all elimination orders, via the
    /// subset DP `TW(S) = min_v max(TW(S - v), |Q(S - v, v)|)`.
    fn dp_treewidth(g: &Graph) -> usize {
        let n = g.n();
        let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w))).collect();
        // Q(S, v): vertices outside S ∪ {v} reachable from v through S.
        let q = |s: u32, v: usize| -> usize {
            let mut seen = 1u32 << v;
            let mut stack = vec![v];
            let mut count = 0;
            while let Some(x) = stack.pop() {
                let mut m = adj[x] & !seen;
                while m != 0 {
                    let w = m.trailing_zeros() as usize;
                    m &= m - 1;
                    seen |= 1 << w;
                    if s >> w & 1 == 1 {
                        stack.push(w);
                    } else {
                        count += 1;
                    }
                }
            }
            count
        };
        let mut tw = vec![usize::MAX; 1 << n];
        tw[0] = 0;
        for s in 1u32..(1 << n) {
            let mut best = usize::MAX;
            let mut m = s;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                let rest = s & !(1 << v);
                best = best.min(tw[rest as usize].max(q(rest, v)));
            }
            tw[s as usize] = best;
        }
        tw[(1 << n) - 1]
    }

    fn tree_example() -> (Graph, TreeDecomposition) {
        let g = Graph::from_edges(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let bags = vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![1, 4], vec![2, 5], vec![2, 6]];
        let td = TreeDecomposition { bags, tree_edges: vec![(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)] };
        (g, td)
    }

    #[test]
    fn tree_example_is_valid_width_one() {
        let (g, td) = tree_example();
        assert_eq!(validate_tree_decomposition(&g, &td), Ok(()));
        assert_eq!(td.width(), 1);
        assert_eq!(exact_treewidth(&g, 20, u64::MAX).unwrap().0, 1);
    }

    #[test]
    fn validator_reports_each_property() {
        let (g, td) = tree_example();
        let mut missing = td.clone();
        missing.bags[3] = vec![1];
        assert_eq!(
            validate_tree_decomposition(&g, &missing),
            Err(DecompositionViolation::UncoveredVertex { vertex: 4 })
        );
        let mut edge = td.clone();
        edge.bags.push(vec![4]);
        edge.bags[3] = vec![1];
        edge.tree_edges.push((3, 6));
        assert_eq!(validate_tree_decomposition(&g, &edge), Err(DecompositionViolation::UncoveredEdge { u: 1, v: 4 }));
        let mut split = td.clone();
        // Hang {1,3} under {2,5}: vertex 1 now occurs in two separated places.
        split.tree_edges[1] = (4, 2);
        assert_eq!(
            validate_tree_decomposition(&g, &split),
            Err(DecompositionViolation::DisconnectedOccurrences { vertex: 1 })
        );
        let mut cyclic = td.clone();
        cyclic.tree_edges[4] = (2, 3);
        assert!(matches!(validate_tree_decomposition(&g, &cyclic), Err(DecompositionViolation::NotATree { .. })));
    }

    #[test]
    fn known_treewidths() {
        assert_eq!(exact_treewidth(&complete(5), 20, u64::MAX).unwrap().0, 4);
        assert_eq!(exact_treewidth(&cycle(9), 20, u64::MAX).unwrap().0, 2);
        assert_eq!(exact_treewidth(&grid(3, 3), 20, u64::MAX).unwrap().0, 3);
        assert_eq!(exact_treewidth(&grid(4, 4), 20, u64::MAX).unwrap().0, 4);
        assert_eq!(exact_treewidth(&path(1), 20, u64::MAX).unwrap().0, 0);
        assert_eq!(exact_treewidth(&Graph::empty(3), 20, u64::MAX).unwrap().0, 0);
    }

    #[test]
    fn exact_matches_dp_oracle() {
        for seed in 0..40u64 {
            let n = 5 + (seed as usize % 7);
            let g = random_graph(n, 0.25 + 0.1 * (seed % 4) as f64, seed);
            let (w, td) = exact_treewidth(&g, 20, u64::MAX).unwrap();
            validate_tree_decomposition(&g, &td).unwrap();
            assert_eq!(td.width(), w);
            assert_eq!(w, dp_treewidth(&g), "seed {seed}");
            assert!(treewidth_lower_bound(&g) <= w);
            assert!(best_treewidth_upper(&g).0 >= w);
            for h in [EliminationHeuristic::MinDegree, EliminationHeuristic::MinFill] {
                assert!(heuristic_treewidth_upper(&g, h).0 >= w);
            }
        }
    }

    #[test]
    fn budgets() {
        assert!(matches!(exact_treewidth(&grid(5, 5), 20, u64::MAX), Err(Error::Budget(_))));
        assert!(matches!(exact_treewidth(&random_graph(18, 0.5, 1), 20, 3), Err(Error::Budget(_))));
    }

    #[test]
    fn heuristic_is_valid_on_larger_graphs() {
        for g in [grid(12, 12), disjoint_union(&complete(5), &cycle(8)), random_graph(60, 0.08, 4)] {
            let (_, td) = best_treewidth_upper(&g);
            validate_tree_decomposition(&g, &td).unwrap();
            assert!(treewidth_lower_bound(&g) <= td.width());
        }
        assert!(best_treewidth_upper(&grid(12, 12)).0 <= 13);
    }

    #[test]
    fn spec_examples() {
        assert_eq!(exact_treewidth(&path(6), 20, u64::MAX).unwrap().0, 1);
        assert_eq!(exact_treewidth(&cycle(6), 20, u64::MAX).unwrap().0, 2);
        assert_eq!(heuristic_treewidth_upper(&grid(3, 3), EliminationHeuristic::MinFill).0, 3);
        let g = grid(3, 3);
        let trivial = TreeDecomposition { bags: vec![(0..9).collect()], tree_edges: vec![] };
        assert_eq!(validate_tree_decomposition(&g, &trivial), Ok(()));
        assert_eq!(trivial.width(), 8);
        let (_, td) = tree_example();
        let mut deleted = td.clone();
        deleted.bags.remove(5);
        deleted.tree_edges.pop();
        assert_eq!(
            validate_tree_decomposition(&tree_example().0, &deleted),
            Err(DecompositionViolation::UncoveredVertex { vertex: 6 })
        );
    }

    #[test]
    fn heuristics_exact_on_trees() {
        let mut rng = 12345u64;
        let edges: Vec<(usize, usize)> = (1..50)
            .map(|v| {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((rng >> 33) as usize % v, v)
            })
            .collect();
        let tree = Graph::from_edges(50, edges).unwrap();
        for h in [EliminationHeuristic::MinDegree, EliminationHeuristic::MinFill] {
            let (ub, td) = heuristic_treewidth_upper(&tree, h);
            validate_tree_decomposition(&tree, &td).unwrap();
            assert_eq!(ub, 1);
        }
    }
}
