//! Exact tree and path decompositions of small pattern graphs, nice tree
//! decompositions, and the balanced `L ⊎ S ⊎ R` split used by the
//! meet-in-the-middle counters.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{full_set, members, Graph, VertexSet};

/// Default cap on the pattern order accepted by the exact searches.
pub const DEFAULT_PATTERN_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error(
        "pattern has {order} vertices, above the exact-search limit of {limit}; \
         supply a decomposition file instead"
    )]
    PatternTooLarge { order: usize, limit: usize },
    #[error("invalid decomposition: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn invalid(msg: impl Into<String>) -> DecompError {
    DecompError::Invalid(msg.into())
}

fn check_limit(pattern: &Graph, limit: usize) -> Result<(), DecompError> {
    if pattern.order() > limit {
        Err(DecompError::PatternTooLarge {
            order: pattern.order(),
            limit,
        })
    } else {
        Ok(())
    }
}

/// A tree decomposition: bags of pattern vertices on the nodes of a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<VertexSet>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<VertexSet>, edges: Vec<(usize, usize)>) -> Self {
        TreeDecomposition { bags, edges }
    }

    pub fn bags(&self) -> &[VertexSet] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one (zero for decompositions of empty graphs).
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.count_ones() as usize)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Checks the tree shape and the three decomposition properties.
    pub fn validate(&self, pattern: &Graph) -> Result<(), DecompError> {
        let n = self.bags.len();
        if n == 0 {
            return Err(invalid("no nodes"));
        }
        if self.edges.len() != n - 1 {
            return Err(invalid(format!(
                "{} tree edges for {} nodes; a tree needs {}",
                self.edges.len(),
                n,
                n - 1
            )));
        }
        if let Some(&(a, b)) = self
            .edges
            .iter()
            .find(|&&(a, b)| a >= n || b >= n || a == b)
        {
            return Err(invalid(format!("bad tree edge {a}-{b}")));
        }
        let adj = self.adjacency();
        if connected_within(&adj, &vec![true; n]).is_none() {
            return Err(invalid("tree is not connected"));
        }
        let everything = pattern.all_vertices();
        if let Some(i) = self.bags.iter().position(|&b| b & !everything != 0) {
            return Err(invalid(format!("bag of node {i} has a non-pattern vertex")));
        }
        let covered = self.bags.iter().fold(0, |m, &b| m | b);
        if covered != everything {
            let v = members(everything & !covered).next().unwrap();
            return Err(invalid(format!("vertex {v} occurs in no bag")));
        }
        for (u, v) in pattern.edges() {
            let pair = 1 << u | 1 << v;
            if !self.bags.iter().any(|&b| b & pair == pair) {
                return Err(invalid(format!("edge {u}-{v} is contained in no bag")));
            }
        }
        for v in 0..pattern.order() {
            let holds: Vec<bool> = self.bags.iter().map(|&b| b >> v & 1 == 1).collect();
            if connected_within(&adj, &holds) != Some(true) {
                return Err(invalid(format!(
                    "nodes containing vertex {v} do not form a subtree"
                )));
            }
        }
        Ok(())
    }

    /// Parses `td <nodes> <width+1>`, `b <id> <v...>`, `t <id> <id>` lines
    /// (all indices 1-based; `c` lines are comments).
    pub fn parse(text: &str, pattern_order: usize) -> Result<Self, DecompError> {
        let mut header: Option<(usize, usize)> = None;
        let mut bags: Vec<Option<VertexSet>> = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| DecompError::Parse { line, message };
            let mut tokens = raw.split_whitespace();
            let Some(tag) = tokens.next() else { continue };
            let mut numbers = || -> Result<Vec<usize>, DecompError> {
                tokens
                    .by_ref()
                    .map(|t| t.parse().map_err(|_| err(format!("invalid number `{t}`"))))
                    .collect()
            };
            match tag {
                "c" => {}
                "td" => {
                    let nums = numbers()?;
                    if header.is_some() || nums.len() != 2 {
                        return Err(err("expected a single `td <nodes> <width+1>`".into()));
                    }
                    header = Some((nums[0], nums[1]));
                    bags = vec![None; nums[0]];
                }
                "b" => {
                    let nums = numbers()?;
                    if header.is_none() {
                        return Err(err("bag before header".into()));
                    }
                    let (&id, vertices) = nums
                        .split_first()
                        .ok_or_else(|| err("missing node id".into()))?;
                    if id == 0 || id > bags.len() {
                        return Err(err(format!("node id {id} out of range")));
                    }
                    if bags[id - 1].is_some() {
                        return Err(err(format!("node {id} has two bags")));
                    }
                    let mut bag = 0;
                    for &v in vertices {
                        if v == 0 || v > pattern_order {
                            return Err(err(format!("vertex {v} out of range")));
                        }
                        bag |= 1 << (v - 1);
                    }
                    bags[id - 1] = Some(bag);
                }
                "t" => {
                    let nums = numbers()?;
                    if header.is_none() {
                        return Err(err("tree edge before header".into()));
                    }
                    if nums.len() != 2 || nums.iter().any(|&x| x == 0 || x > bags.len()) {
                        return Err(err("expected `t <node> <node>` with valid ids".into()));
                    }
                    edges.push((nums[0] - 1, nums[1] - 1));
                }
                other => return Err(err(format!("unknown line type `{other}`"))),
            }
        }
        let (_, declared) = header.ok_or_else(|| invalid("missing `td` header"))?;
        let bags: Vec<VertexSet> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| invalid(format!("node {} has no bag", i + 1))))
            .collect::<Result<_, _>>()?;
        let td = TreeDecomposition::new(bags, edges);
        let largest = td
            .bags
            .iter()
            .map(|b| b.count_ones() as usize)
            .max()
            .unwrap_or(0);
        if largest != declared {
            return Err(invalid(format!(
                "header declares largest bag {declared}, found {largest}"
            )));
        }
        Ok(td)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let largest = self.bags.iter().map(|b| b.count_ones()).max().unwrap_or(0);
        writeln!(out, "td {} {}", self.bags.len(), largest).unwrap();
        for (i, &bag) in self.bags.iter().enumerate() {
            write!(out, "b {}", i + 1).unwrap();
            for v in members(bag) {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            writeln!(out, "t {} {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

/// Returns `None` when the nodes flagged in `keep` are empty, otherwise
/// whether they induce a connected subgraph of the tree.
fn connected_within(adj: &[Vec<usize>], keep: &[bool]) -> Option<bool> {
    let start = keep.iter().position(|&k| k)?;
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if keep[y] && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    Some(keep.iter().zip(&seen).all(|(&k, &s)| !k || s))
}

/// Vertices outside `eliminated ∪ {v}` reachable from `v` through paths
/// whose interior lies in `eliminated`: the neighbours of `v` in the filled
/// graph at the moment it is eliminated.
fn elimination_neighbors(pattern: &Graph, eliminated: VertexSet, v: usize) -> VertexSet {
    let mut reached = 1u64 << v;
    let mut frontier = pattern.neighbors(v);
    let mut outside = 0;
    while frontier != 0 {
        outside |= frontier & !eliminated;
        let inner = frontier & eliminated & !reached;
        reached |= frontier;
        frontier = 0;
        for w in members(inner) {
            frontier |= pattern.neighbors(w) & !reached;
        }
    }
    outside & !(1 << v)
}

/// Minimises `max_step cost(prefix, v)` over all vertex orderings by dynamic
/// programming over prefix sets; returns the optimum and the lexicographically
/// smallest ordering attaining it.
fn optimal_ordering(k: usize, cost: impl Fn(VertexSet, usize) -> usize) -> (usize, Vec<usize>) {
    let full = full_set(k);
    let mut best = vec![0usize; 1 << k];
    for set in (0..full).rev() {
        let mut b = usize::MAX;
        for v in members(full & !set) {
            let next = set | 1 << v;
            b = b.min(cost(set, v).max(best[next as usize]));
        }
        best[set as usize] = b;
    }
    let mut order = Vec::with_capacity(k);
    let mut set = 0;
    while set != full {
        let target = best[set as usize];
        let v = members(full & !set)
            .find(|&v| cost(set, v).max(best[(set | 1 << v) as usize]) == target)
            .expect("an optimal step always exists");
        order.push(v);
        set |= 1 << v;
    }
    (best[0], order)
}

/// Minimum-width tree decomposition, by exact search over elimination
/// orderings (ties broken by the lexicographically smallest ordering).
pub fn tree_decomposition(pattern: &Graph) -> Result<TreeDecomposition, DecompError> {
    tree_decomposition_with_limit(pattern, DEFAULT_PATTERN_LIMIT)
}

pub fn tree_decomposition_with_limit(
    pattern: &Graph,
    limit: usize,
) -> Result<TreeDecomposition, DecompError> {
    check_limit(pattern, limit)?;
    let k = pattern.order();
    if k == 0 {
        return Ok(TreeDecomposition::new(vec![0], Vec::new()));
    }
    let (_, order) = optimal_ordering(k, |set, v| {
        elimination_neighbors(pattern, set, v).count_ones() as usize
    });
    Ok(decomposition_from_elimination(pattern, &order))
}

/// Width of the decomposition induced by an elimination ordering.
pub fn elimination_width(pattern: &Graph, order: &[usize]) -> usize {
    let mut set = 0;
    let mut width = 0;
    for &v in order {
        width = width.max(elimination_neighbors(pattern, set, v).count_ones() as usize);
        set |= 1 << v;
    }
    width
}

/// One node per vertex, bag `{v} ∪ N⁺(v)`, parent the earliest-eliminated
/// vertex of `N⁺(v)`; component roots are chained together.
pub fn decomposition_from_elimination(pattern: &Graph, order: &[usize]) -> TreeDecomposition {
    let k = order.len();
    let mut position = vec![0; pattern.order()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut bags = Vec::with_capacity(k);
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    let mut roots = Vec::new();
    let mut set = 0;
    for (i, &v) in order.iter().enumerate() {
        let higher = elimination_neighbors(pattern, set, v);
        bags.push(higher | 1 << v);
        match members(higher).map(|w| position[w]).min() {
            Some(parent) => edges.push((i, parent)),
            None => roots.push(i),
        }
        set |= 1 << v;
    }
    for pair in roots.windows(2) {
        edges.push((pair[0], pair[1]));
    }
    TreeDecomposition::new(bags, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce { child: usize, vertex: usize },
    Forget { child: usize, vertex: usize },
    Join { left: usize, right: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NiceNode {
    pub bag: VertexSet,
    pub kind: NodeKind,
}

impl NiceNode {
    pub fn children(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match self.kind {
            NodeKind::Leaf => (None, None),
            NodeKind::Introduce { child, .. } | NodeKind::Forget { child, .. } => {
                (Some(child), None)
            }
            NodeKind::Join { left, right } => (Some(left), Some(right)),
        };
        a.into_iter().chain(b)
    }
}

/// Rooted binary decomposition with leaf / introduce / forget / join nodes.
/// Children always precede their parents in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
}

impl NiceTreeDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.count_ones() as usize)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn forget_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Forget { .. }))
            .count()
    }

    /// Longest root-to-leaf path, counted in nodes.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            depth[i] = 1 + node.children().map(|c| depth[c]).max().unwrap_or(0);
        }
        depth[self.root]
    }

    /// Drops the node kinds, keeping bags and tree edges.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.children().map(move |c| (c, i)))
            .collect();
        TreeDecomposition::new(bags, edges)
    }

    /// Checks every node-kind rule plus the underlying decomposition properties.
    pub fn validate(&self, pattern: &Graph) -> Result<(), DecompError> {
        if self.root >= self.nodes.len() {
            return Err(invalid("root out of range"));
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for c in node.children() {
                if c >= i {
                    return Err(invalid(format!("node {i} has child {c} out of order")));
                }
                parents[c] += 1;
            }
            match node.kind {
                NodeKind::Leaf => {}
                NodeKind::Join { left, right } => {
                    if left == right
                        || self.nodes[left].bag != node.bag
                        || self.nodes[right].bag != node.bag
                    {
                        return Err(invalid(format!("join node {i} has mismatched bags")));
                    }
                }
                NodeKind::Introduce { child, vertex } => {
                    let below = self.nodes[child].bag;
                    if below >> vertex & 1 == 1 || below | 1 << vertex != node.bag {
                        return Err(invalid(format!("introduce node {i} is malformed")));
                    }
                }
                NodeKind::Forget { child, vertex } => {
                    let below = self.nodes[child].bag;
                    if node.bag >> vertex & 1 == 1 || node.bag | 1 << vertex != below {
                        return Err(invalid(format!("forget node {i} is malformed")));
                    }
                }
            }
        }
        for (i, &p) in parents.iter().enumerate() {
            let expected = usize::from(i != self.root);
            if p != expected {
                return Err(invalid(format!("node {i} has {p} parents")));
            }
        }
        self.to_tree_decomposition().validate(pattern)?;
        let expected = pattern.order() - self.nodes[self.root].bag.count_ones() as usize;
        if self.forget_count() != expected {
            return Err(invalid(format!(
                "{} forget nodes, expected {expected}",
                self.forget_count()
            )));
        }
        Ok(())
    }

    /// The decomposition-file form, with the root and node kinds recorded
    /// as comment lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("c root {}\n", self.root + 1);
        for (i, node) in self.nodes.iter().enumerate() {
            let kind = match node.kind {
                NodeKind::Leaf => "leaf".to_string(),
                NodeKind::Introduce { vertex, .. } => format!("introduce {}", vertex + 1),
                NodeKind::Forget { vertex, .. } => format!("forget {}", vertex + 1),
                NodeKind::Join { .. } => "join".to_string(),
            };
            writeln!(out, "c node {} {}", i + 1, kind).unwrap();
        }
        out + &self.to_tree_decomposition().to_text()
    }
}

/// Converts a valid tree decomposition into a nice one of the same width.
/// The root is the first node whose bag holds the smallest pattern vertex.
pub fn make_nice(
    td: &TreeDecomposition,
    pattern: &Graph,
) -> Result<NiceTreeDecomposition, DecompError> {
    td.validate(pattern)?;
    let root = if pattern.order() == 0 {
        0
    } else {
        td.bags.iter().position(|&b| b & 1 == 1).unwrap()
    };
    let adj = td.adjacency();
    let mut nodes = Vec::new();
    let top = build_nice(td, &adj, root, usize::MAX, &mut nodes);
    Ok(NiceTreeDecomposition { nodes, root: top })
}

fn build_nice(
    td: &TreeDecomposition,
    adj: &[Vec<usize>],
    node: usize,
    parent: usize,
    out: &mut Vec<NiceNode>,
) -> usize {
    let bag = td.bags[node];
    let mut branches = Vec::new();
    for &child in adj[node].iter().filter(|&&c| c != parent) {
        let mut cur = build_nice(td, adj, child, node, out);
        let mut cur_bag = td.bags[child];
        for v in members(cur_bag & !bag) {
            cur_bag &= !(1 << v);
            out.push(NiceNode {
                bag: cur_bag,
                kind: NodeKind::Forget {
                    child: cur,
                    vertex: v,
                },
            });
            cur = out.len() - 1;
        }
        for v in members(bag & !cur_bag) {
            cur_bag |= 1 << v;
            out.push(NiceNode {
                bag: cur_bag,
                kind: NodeKind::Introduce {
                    child: cur,
                    vertex: v,
                },
            });
            cur = out.len() - 1;
        }
        branches.push(cur);
    }
    let Some((&first, rest)) = branches.split_first() else {
        out.push(NiceNode {
            bag,
            kind: NodeKind::Leaf,
        });
        return out.len() - 1;
    };
    let mut cur = first;
    for &other in rest {
        out.push(NiceNode {
            bag,
            kind: NodeKind::Join {
                left: cur,
                right: other,
            },
        });
        cur = out.len() - 1;
    }
    cur
}

/// Exact tree decomposition followed by [`make_nice`].
pub fn nice_decomposition(pattern: &Graph) -> Result<NiceTreeDecomposition, DecompError> {
    nice_decomposition_with_limit(pattern, DEFAULT_PATTERN_LIMIT)
}

pub fn nice_decomposition_with_limit(
    pattern: &Graph,
    limit: usize,
) -> Result<NiceTreeDecomposition, DecompError> {
    make_nice(&tree_decomposition_with_limit(pattern, limit)?, pattern)
}

/// Partition `V(F) = L ⊎ S ⊎ R` with no edge between `L` and `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSplit {
    pub left: VertexSet,
    pub separator: VertexSet,
    pub right: VertexSet,
    /// Bound on `|S|` that the split guarantees.
    pub budget: usize,
    /// Exact pathwidth of the pattern.
    pub pathwidth: usize,
    /// Vertex ordering of minimum vertex separation the split was cut from.
    pub ordering: Vec<usize>,
}

impl PathSplit {
    /// `L⁺ = L ∪ S`.
    pub fn left_plus(&self) -> VertexSet {
        self.left | self.separator
    }

    /// `R⁺ = R ∪ S`.
    pub fn right_plus(&self) -> VertexSet {
        self.right | self.separator
    }

    pub fn validate(&self, pattern: &Graph) -> Result<(), DecompError> {
        let k = pattern.order();
        let (l, s, r) = (self.left, self.separator, self.right);
        if l & s != 0 || l & r != 0 || s & r != 0 || l | s | r != pattern.all_vertices() {
            return Err(invalid("L, S, R do not partition the pattern"));
        }
        if s.count_ones() as usize > self.budget {
            return Err(invalid(format!(
                "|S| = {} exceeds budget {}",
                s.count_ones(),
                self.budget
            )));
        }
        if 2 * l.count_ones() as usize > k || 2 * r.count_ones() as usize > k {
            return Err(invalid("a side has more than k/2 vertices"));
        }
        if let Some(u) = members(l).find(|&u| pattern.neighbors(u) & r != 0) {
            return Err(invalid(format!("vertex {u} of L has a neighbour in R")));
        }
        Ok(())
    }

    /// Comment lines describing the split (1-based vertices).
    pub fn to_text(&self) -> String {
        let list = |set: VertexSet| {
            members(set)
                .map(|v| format!(" {}", v + 1))
                .collect::<String>()
        };
        format!(
            "c pathwidth {}\nc budget {}\nc split L{}\nc split S{}\nc split R{}\n",
            self.pathwidth,
            self.budget,
            list(self.left),
            list(self.separator),
            list(self.right)
        )
    }
}

/// Prefix vertices with a neighbour outside the prefix.
fn boundary(pattern: &Graph, prefix: VertexSet) -> VertexSet {
    members(prefix)
        .filter(|&u| pattern.neighbors(u) & !prefix != 0)
        .fold(0, |m, u| m | 1 << u)
}

/// Exact pathwidth (vertex separation number) and the lexicographically
/// smallest ordering attaining it.
pub fn pathwidth_ordering(
    pattern: &Graph,
    limit: usize,
) -> Result<(usize, Vec<usize>), DecompError> {
    check_limit(pattern, limit)?;
    Ok(optimal_ordering(pattern.order(), |set, v| {
        boundary(pattern, set | 1 << v).count_ones() as usize
    }))
}

/// Vertex separation of a given ordering.
pub fn vertex_separation(pattern: &Graph, order: &[usize]) -> usize {
    let mut prefix = 0;
    let mut best = 0;
    for &v in order {
        prefix |= 1 << v;
        best = best.max(boundary(pattern, prefix).count_ones() as usize);
    }
    best
}

/// Path decomposition with bags `{v_i} ∪ ∂{v_1..v_(i-1)}`.
pub fn path_decomposition(pattern: &Graph) -> Result<TreeDecomposition, DecompError> {
    path_decomposition_with_limit(pattern, DEFAULT_PATTERN_LIMIT)
}

pub fn path_decomposition_with_limit(
    pattern: &Graph,
    limit: usize,
) -> Result<TreeDecomposition, DecompError> {
    let (_, order) = pathwidth_ordering(pattern, limit)?;
    if order.is_empty() {
        return Ok(TreeDecomposition::new(vec![0], Vec::new()));
    }
    let mut prefix = 0;
    let mut bags = Vec::with_capacity(order.len());
    for &v in &order {
        bags.push(boundary(pattern, prefix) | 1 << v);
        prefix |= 1 << v;
    }
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    Ok(TreeDecomposition::new(bags, edges))
}

pub fn path_split(pattern: &Graph) -> Result<PathSplit, DecompError> {
    path_split_with_limit(pattern, DEFAULT_PATTERN_LIMIT)
}

/// Cuts an optimal vertex-separation ordering after `⌈k/2⌉` vertices:
/// `S` is the boundary of that prefix, `L` the rest of the prefix, `R` the
/// suffix. When `k` is odd and the boundary is empty, the last prefix vertex
/// moves into `S` so that both sides stay within `k/2`.
pub fn path_split_with_limit(pattern: &Graph, limit: usize) -> Result<PathSplit, DecompError> {
    let (pathwidth, ordering) = pathwidth_ordering(pattern, limit)?;
    let k = pattern.order();
    let cut = k.div_ceil(2);
    let prefix = ordering[..cut].iter().fold(0u64, |m, &v| m | 1 << v);
    let mut separator = boundary(pattern, prefix);
    if separator == 0 && k % 2 == 1 {
        separator = 1 << ordering[cut - 1];
    }
    let split = PathSplit {
        left: prefix & !separator,
        separator,
        right: pattern.all_vertices() & !prefix,
        budget: pathwidth.max(separator.count_ones() as usize),
        pathwidth,
        ordering,
    };
    debug_assert!(split.validate(pattern).is_ok());
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::graph::set_from;

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        fn go(cur: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left.is_empty() {
                out.push(cur.clone());
                return;
            }
            for i in 0..left.len() {
                let v = left.remove(i);
                cur.push(v);
                go(cur, left, out);
                cur.pop();
                left.insert(i, v);
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), &mut (0..k).collect(), &mut out);
        out
    }

    #[test]
    fn forest_has_width_one() {
        let tree = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let td = tree_decomposition(&tree).unwrap();
        td.validate(&tree).unwrap();
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn c4_width_matches_exhaustive_orders() {
        let c4 = cycle(4);
        let brute = permutations(4)
            .iter()
            .map(|o| elimination_width(&c4, o))
            .min()
            .unwrap();
        assert_eq!(brute, 2);
        assert_eq!(tree_decomposition(&c4).unwrap().width(), 2);
    }

    #[test]
    fn clique_width() {
        assert_eq!(tree_decomposition(&complete(4)).unwrap().width(), 3);
    }

    #[test]
    fn single_vertex_and_empty_pattern() {
        let k1 = Graph::empty(1).unwrap();
        let nice = nice_decomposition(&k1).unwrap();
        nice.validate(&k1).unwrap();
        assert_eq!(nice.width(), 0);
        let k0 = Graph::empty(0).unwrap();
        nice_decomposition(&k0).unwrap().validate(&k0).unwrap();
    }

    #[test]
    fn pattern_limit_is_enforced() {
        let big = path(17);
        assert!(matches!(
            tree_decomposition(&big),
            Err(DecompError::PatternTooLarge {
                order: 17,
                limit: 16
            })
        ));
        assert!(path_split(&big).is_err());
        assert!(tree_decomposition_with_limit(&big, 17).is_ok());
    }

    #[test]
    fn single_bag_k3_becomes_a_leaf() {
        let k3 = complete(3);
        let td = TreeDecomposition::new(vec![0b111], vec![]);
        let nice = make_nice(&td, &k3).unwrap();
        nice.validate(&k3).unwrap();
        assert_eq!(nice.len(), 1);
        assert_eq!(nice.node(nice.root()).kind, NodeKind::Leaf);
        assert_eq!(nice.width(), 2);
    }

    #[test]
    fn p4_forget_count() {
        let p4 = path(4);
        let nice = nice_decomposition(&p4).unwrap();
        nice.validate(&p4).unwrap();
        assert_eq!(nice.width(), 1);
        let root_bag = nice.node(nice.root()).bag.count_ones() as usize;
        assert_eq!(nice.forget_count(), 4 - root_bag);
    }

    #[test]
    fn make_nice_rejects_invalid_input() {
        let p3 = path(3);
        let missing_edge = TreeDecomposition::new(vec![0b011, 0b100], vec![(0, 1)]);
        let err = make_nice(&missing_edge, &p3).unwrap_err();
        assert!(err.to_string().contains("edge 1-2"), "{err}");
        let broken = TreeDecomposition::new(vec![0b011, 0b110, 0b001], vec![(0, 1), (1, 2)]);
        let err = make_nice(&broken, &p3).unwrap_err();
        assert!(err.to_string().contains("subtree"), "{err}");
    }

    #[test]
    fn p4_split_matches_exhaustive_pathwidth() {
        let p4 = path(4);
        let brute = permutations(4)
            .iter()
            .map(|o| vertex_separation(&p4, o))
            .min()
            .unwrap();
        let split = path_split(&p4).unwrap();
        split.validate(&p4).unwrap();
        assert_eq!(split.pathwidth, brute);
        assert_eq!(split.pathwidth, 1);
        assert_eq!(split.left, set_from(&[0]));
        assert_eq!(split.separator, set_from(&[1]));
        assert_eq!(split.right, set_from(&[2, 3]));
    }

    #[test]
    fn k2_and_star_splits() {
        let k2 = complete(2);
        path_split(&k2).unwrap().validate(&k2).unwrap();
        let star = star(4);
        let split = path_split(&star).unwrap();
        split.validate(&star).unwrap();
        assert!(split.separator.count_ones() <= 1);
        let centered = PathSplit {
            left: set_from(&[1, 2]),
            separator: set_from(&[0]),
            right: set_from(&[3, 4]),
            budget: 1,
            pathwidth: 1,
            ordering: vec![],
        };
        centered.validate(&star).unwrap();
    }

    #[test]
    fn edgeless_odd_pattern_needs_budget_one() {
        let three = Graph::empty(3).unwrap();
        let split = path_split(&three).unwrap();
        split.validate(&three).unwrap();
        assert_eq!(split.pathwidth, 0);
        assert_eq!(split.budget, 1);
    }

    #[test]
    fn file_round_trip() {
        let c5 = cycle(5);
        let td = tree_decomposition(&c5).unwrap();
        let parsed = TreeDecomposition::parse(&td.to_text(), 5).unwrap();
        assert_eq!(parsed, td);
        let nice = nice_decomposition(&c5).unwrap();
        let parsed = TreeDecomposition::parse(&nice.to_text(), 5).unwrap();
        assert_eq!(parsed, nice.to_tree_decomposition());
        assert!(TreeDecomposition::parse("td 1 2\nb 1 1 9\n", 3).is_err());
        assert!(TreeDecomposition::parse("td 1 3\nb 1 1 2\n", 3).is_err());
    }

    #[test]
    fn path_decomposition_is_valid() {
        for g in [path(6), cycle(6), grid(2, 3), star(5), complete(4)] {
            let pd = path_decomposition(&g).unwrap();
            pd.validate(&g).unwrap();
            let (pw, _) = pathwidth_ordering(&g, 16).unwrap();
            assert_eq!(pd.width(), pw);
        }
    }

    mod random {
        use super::*;
        use crate::gen::random_graph;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        #[test]
        fn treewidth_equals_exhaustive_minimum() {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..120 {
                let k = rng.gen_range(1..=7);
                let p = rng.gen_range(0.2..0.9);
                let g = random_graph(k, p, &mut rng);
                let brute = permutations(k)
                    .iter()
                    .map(|o| elimination_width(&g, o))
                    .min()
                    .unwrap();
                let td = tree_decomposition(&g).unwrap();
                td.validate(&g).unwrap();
                assert_eq!(td.width(), brute, "{g:?}");
                let nice = make_nice(&td, &g).unwrap();
                nice.validate(&g).unwrap();
                assert_eq!(nice.width(), td.width());
            }
        }

        #[test]
        fn path_split_invariants_hold() {
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            for _ in 0..500 {
                let k = rng.gen_range(1..=8);
                let p = rng.gen_range(0.1..0.9);
                let g = random_graph(k, p, &mut rng);
                let split = path_split(&g).unwrap();
                split.validate(&g).unwrap();
                assert_eq!(vertex_separation(&g, &split.ordering), split.pathwidth);
                if k <= 6 {
                    let brute = permutations(k)
                        .iter()
                        .map(|o| vertex_separation(&g, o))
                        .min()
                        .unwrap();
                    assert_eq!(split.pathwidth, brute);
                }
            }
        }
    }
}
