//! Simple undirected graphs with bit-mask adjacency, the edge-list file
//! format, and vertex maps between a pattern and a host.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

/// Largest vertex count representable by the single-word adjacency masks.
pub const MAX_VERTICES: usize = 64;

/// Subset of vertices as a bit mask; bit `v` set means vertex `v` is present.
pub type VertexSet = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing `p <n> <m>` header")]
    MissingHeader,
    #[error("header declares {declared} edge lines but {found} were given")]
    EdgeCount { declared: usize, found: usize },
    #[error("graph has {0} vertices; at most {MAX_VERTICES} are supported")]
    TooLarge(usize),
    #[error("vertex {vertex} out of range for a graph on {order} vertices")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
}

/// Simple undirected graph on vertices `0..order`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<VertexSet>,
}

impl Graph {
    /// Edgeless graph on `order` vertices.
    pub fn empty(order: usize) -> Result<Self, GraphError> {
        if order > MAX_VERTICES {
            return Err(GraphError::TooLarge(order));
        }
        Ok(Graph {
            adj: vec![0; order],
        })
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(order)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let order = self.order();
        for w in [u, v] {
            if w >= order {
                return Err(GraphError::VertexOutOfRange { vertex: w, order });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    #[inline]
    pub fn all_vertices(&self) -> VertexSet {
        full_set(self.order())
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order())
            .flat_map(move |u| members(self.adj[u] & !full_set(u + 1)).map(move |v| (u, v)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Subgraph induced by `subset`; vertex `i` of the result is the `i`-th
    /// smallest member of `subset`.
    pub fn induced_subgraph(&self, subset: VertexSet) -> Result<InducedSubgraph, GraphError> {
        let order = self.order();
        if subset & !self.all_vertices() != 0 {
            let vertex = members(subset & !self.all_vertices())
                .next()
                .unwrap_or(order);
            return Err(GraphError::VertexOutOfRange { vertex, order });
        }
        let original: Vec<usize> = members(subset).collect();
        let adj = original
            .iter()
            .map(|&u| {
                let mut mask = 0;
                for (j, &w) in original.iter().enumerate() {
                    if self.has_edge(u, w) {
                        mask |= 1 << j;
                    }
                }
                mask
            })
            .collect();
        Ok(InducedSubgraph {
            graph: Graph { adj },
            original,
        })
    }

    /// Parses the edge-list format: optional `c` comment lines, one
    /// `p <n> <m>` header, then exactly `m` lines `e <u> <v>` (1-based).
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut graph: Option<Graph> = None;
        let mut declared = 0;
        let mut found = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| GraphError::Parse { line, message };
            let mut tokens = raw.split_whitespace();
            let Some(tag) = tokens.next() else { continue };
            match tag {
                "c" => continue,
                "p" => {
                    if graph.is_some() {
                        return Err(err("duplicate header".into()));
                    }
                    let n = parse_field(tokens.next(), line, "vertex count")?;
                    declared = parse_field(tokens.next(), line, "edge count")?;
                    if tokens.next().is_some() {
                        return Err(err("trailing tokens after header".into()));
                    }
                    graph = Some(Graph::empty(n).map_err(|e| err(e.to_string()))?);
                }
                "e" => {
                    let Some(g) = graph.as_mut() else {
                        return Err(err("edge line before header".into()));
                    };
                    let u: usize = parse_field(tokens.next(), line, "endpoint")?;
                    let v: usize = parse_field(tokens.next(), line, "endpoint")?;
                    if tokens.next().is_some() {
                        return Err(err("trailing tokens after edge".into()));
                    }
                    if u == 0 || v == 0 || u > g.order() || v > g.order() {
                        return Err(err(format!("vertex index out of range 1..={}", g.order())));
                    }
                    if u == v {
                        return Err(err(format!("self-loop on vertex {u}")));
                    }
                    g.add_edge(u - 1, v - 1).map_err(|e| err(e.to_string()))?;
                    found += 1;
                }
                other => return Err(err(format!("unknown line type `{other}`"))),
            }
        }
        let graph = graph.ok_or(GraphError::MissingHeader)?;
        if found != declared {
            return Err(GraphError::EdgeCount { declared, found });
        }
        Ok(graph)
    }

    /// Writes the edge-list format with edges in lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p {} {}", self.order(), self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("order", &self.order())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

fn parse_field<T: std::str::FromStr>(
    token: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, GraphError> {
    let token = token.ok_or_else(|| GraphError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| GraphError::Parse {
        line,
        message: format!("invalid {what} `{token}`"),
    })
}

/// An induced subgraph together with the host index of each of its vertices.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the vertex of the parent graph that became vertex `i`.
    pub original: Vec<usize>,
}

impl InducedSubgraph {
    /// Index in the subgraph of parent vertex `v`, if present.
    pub fn local_index(&self, v: usize) -> Option<usize> {
        self.original.binary_search(&v).ok()
    }
}

/// A partial map from pattern vertices to host vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexMap {
    images: Vec<Option<usize>>,
}

impl VertexMap {
    /// The map with empty domain over a pattern of `pattern_order` vertices.
    pub fn new(pattern_order: usize) -> Self {
        VertexMap {
            images: vec![None; pattern_order],
        }
    }

    /// Total map `u -> images[u]`.
    pub fn total(images: &[usize]) -> Self {
        VertexMap {
            images: images.iter().map(|&v| Some(v)).collect(),
        }
    }

    pub fn from_pairs(pattern_order: usize, pairs: &[(usize, usize)]) -> Self {
        let mut map = VertexMap::new(pattern_order);
        for &(u, v) in pairs {
            map.set(u, v);
        }
        map
    }

    pub fn pattern_order(&self) -> usize {
        self.images.len()
    }

    pub fn set(&mut self, u: usize, v: usize) {
        self.images[u] = Some(v);
    }

    pub fn get(&self, u: usize) -> Option<usize> {
        self.images.get(u).copied().flatten()
    }

    pub fn domain(&self) -> VertexSet {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_some())
            .fold(0, |m, (u, _)| m | 1 << u)
    }

    pub fn is_total(&self) -> bool {
        self.images.iter().all(Option::is_some)
    }

    /// `(u, f(u))` for every `u` in the domain, by increasing `u`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter_map(|(u, v)| v.map(|v| (u, v)))
    }

    /// Host vertices hit by the map.
    pub fn image(&self) -> VertexSet {
        self.pairs().fold(0, |m, (_, v)| m | 1 << v)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = 0u64;
        for (_, v) in self.pairs() {
            if seen >> v & 1 == 1 {
                return false;
            }
            seen |= 1 << v;
        }
        true
    }

    /// The gluing `self ⊕ other`: defined when the maps agree on their
    /// common domain, and then equal to their union.
    pub fn glue(&self, other: &VertexMap) -> Option<VertexMap> {
        if self.pattern_order() != other.pattern_order() {
            return None;
        }
        let mut out = self.clone();
        for (u, v) in other.pairs() {
            match out.images[u] {
                Some(w) if w != v => return None,
                _ => out.images[u] = Some(v),
            }
        }
        Some(out)
    }
}

/// Whether `f` maps every edge of `pattern` onto an edge of `host`, and is
/// additionally injective when `require_injective` is set. Maps that are
/// not total on the pattern, or that leave the host, are rejected.
pub fn is_homomorphism(
    pattern: &Graph,
    host: &Graph,
    f: &VertexMap,
    require_injective: bool,
) -> bool {
    if f.pattern_order() != pattern.order() || !f.is_total() {
        return false;
    }
    if f.pairs().any(|(_, v)| v >= host.order()) {
        return false;
    }
    if require_injective && !f.is_injective() {
        return false;
    }
    pattern.edges().all(|(u, w)| {
        let (a, b) = (f.get(u).unwrap(), f.get(w).unwrap());
        a != b && host.has_edge(a, b)
    })
}

#[inline]
pub fn full_set(n: usize) -> VertexSet {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Members of a vertex set in increasing order.
#[inline]
pub fn members(mut set: VertexSet) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

pub fn set_from(vertices: &[usize]) -> VertexSet {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

/// Named small graphs used throughout the tests and generators.
pub mod named {
    use super::Graph;

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n).unwrap();
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    /// Path on `k` vertices `0 - 1 - ... - (k-1)`.
    pub fn path(k: usize) -> Graph {
        let mut g = Graph::empty(k).unwrap();
        for u in 1..k {
            g.add_edge(u - 1, u).unwrap();
        }
        g
    }

    pub fn cycle(k: usize) -> Graph {
        let mut g = path(k);
        if k >= 3 {
            g.add_edge(k - 1, 0).unwrap();
        }
        g
    }

    /// Star `K_{1,leaves}` with center `0`.
    pub fn star(leaves: usize) -> Graph {
        let mut g = Graph::empty(leaves + 1).unwrap();
        for v in 1..=leaves {
            g.add_edge(0, v).unwrap();
        }
        g
    }

    /// `rows x cols` grid, vertex `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Graph {
        let mut g = Graph::empty(rows * cols).unwrap();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.add_edge(v, v + 1).unwrap();
                }
                if r + 1 < rows {
                    g.add_edge(v, v + cols).unwrap();
                }
            }
        }
        g
    }
}
