//! Simple undirected graphs and the connectivity graph of a code.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::region::Region;

/// Undirected simple graph. Adjacency lists are sorted and agree with the
/// sorted edge census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    max_degree: usize,
}

/// The connectivity graph is an ordinary graph on the qubits.
pub type ConnectivityGraph = Graph;

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], edges: Vec::new(), max_degree: 0 }
    }

    /// Duplicate edges are merged; self-loops and out-of-range endpoints are errors.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { adj, edges: list, max_degree })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// δ, the maximum vertex degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges = vertices.iter().enumerate().flat_map(|(i, &v)| {
            let local = &local;
            self.adj[v].iter().filter_map(move |&w| {
                let j = local[w];
                (j != usize::MAX && i < j).then_some((i, j))
            })
        });
        Graph::from_edges(vertices.len(), edges.collect::<Vec<_>>()).expect("induced edges are valid")
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// BFS distances from a set of sources (`usize::MAX` for unreachable).
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Serializes to the `graph v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph v1 n={}\n", self.n());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson { n: self.n(), edges: self.edges.iter().map(|&(u, v)| [u, v]).collect() })
            .expect("plain struct serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Parses a graph from the `graph v1` text format or its JSON form.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        let g: GraphJson = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        return Graph::from_edges(g.n, g.edges.into_iter().map(|[u, v]| (u, v)));
    }
    let mut n = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if n.is_none() {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("graph") || parts.next() != Some("v1") {
                return Err(Error::parse(lineno, "expected `graph v1 n=<n>` header"));
            }
            let count = parts
                .next()
                .and_then(|p| p.strip_prefix("n="))
                .and_then(|p| p.parse::<usize>().ok())
                .ok_or_else(|| Error::parse(lineno, "header is missing n=<count>"))?;
            n = Some(count);
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad vertex {t:?}"))))
            .collect::<Result<_>>()?;
        let [u, v] = nums[..] else {
            return Err(Error::parse(lineno, "expected two vertex indices"));
        };
        let count = n.expect("header parsed");
        if u >= count || v >= count || u == v {
            return Err(Error::parse(lineno, format!("invalid edge {u} {v}")));
        }
        edges.push((u, v));
    }
    let n = n.ok_or_else(|| Error::parse(1, "empty graph file"))?;
    Graph::from_edges(n, edges)
}

/// Connectivity graph: qubits are adjacent iff some generator acts on both.
pub fn build_connectivity(code: &StabilizerCode) -> ConnectivityGraph {
    let supports: Vec<Vec<usize>> = code.generators().iter().map(|g| g.support()).collect();
    graph_from_supports(code.n(), &supports)
}

/// Clique on each support set.
pub fn graph_from_supports(n: usize, supports: &[Vec<usize>]) -> Graph {
    let edges = supports.iter().flat_map(|s| {
        s.iter().enumerate().flat_map(move |(i, &u)| s[i + 1..].iter().map(move |&v| (u, v)))
    });
    Graph::from_edges(n, edges.collect::<Vec<_>>()).expect("supports are in range")
}

/// `∂₊U`: vertices outside `U` adjacent to some vertex of `U`.
pub fn outer_boundary(g: &Graph, u: &Region) -> Result<Region> {
    u.check_within(g.n())?;
    let mut mark = vec![false; g.n()];
    for v in u.iter() {
        mark[v] = true;
    }
    let mut out = vec![false; g.n()];
    for v in u.iter() {
        for &w in g.neighbors(v) {
            if !mark[w] {
                out[w] = true;
            }
        }
    }
    Ok((0..g.n()).filter(|&v| out[v]).collect())
}

/// `∂₋U = ∂₊(V \ U)`, always a subset of `U`.
pub fn inner_boundary(g: &Graph, u: &Region) -> Result<Region> {
    u.check_within(g.n())?;
    outer_boundary(g, &u.complement(g.n()))
}

/// True iff no edge joins two distinct regions. Regions must be pairwise disjoint.
pub fn are_decoupled(g: &Graph, regions: &[Region]) -> Result<bool> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, r) in regions.iter().enumerate() {
        r.check_within(g.n())?;
        for v in r.iter() {
            if owner[v] != usize::MAX {
                return Err(Error::Input(format!("regions {} and {i} overlap at vertex {v}", owner[v])));
            }
            owner[v] = i;
        }
    }
    Ok(g.edges().iter().all(|&(u, v)| owner[u] == usize::MAX || owner[v] == usize::MAX || owner[u] == owner[v]))
}
