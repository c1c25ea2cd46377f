//! Seeded instance generators for tests, benchmarks and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::decomp::tree_decomposition;
use crate::graph::{named, Graph};

/// Erdős–Rényi `G(n, p)`.
pub fn random_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n).expect("order within limits");
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Uniform labelled tree on `k` vertices via a random Prüfer sequence.
pub fn random_tree<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Graph {
    let mut g = Graph::empty(k).expect("order within limits");
    if k < 2 {
        return g;
    }
    let code: Vec<usize> = (0..k - 2).map(|_| rng.gen_range(0..k)).collect();
    let mut degree = vec![1usize; k];
    for &c in &code {
        degree[c] += 1;
    }
    for &c in &code {
        let leaf = (0..k).find(|&v| degree[v] == 1).unwrap();
        g.add_edge(leaf, c).unwrap();
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
    g.add_edge(rest[0], rest[1]).unwrap();
    g
}

/// Random pattern on `k` vertices with treewidth at most `max_width`
/// (rejection sampling over `G(k, p)`).
pub fn random_pattern<R: Rng + ?Sized>(k: usize, p: f64, max_width: usize, rng: &mut R) -> Graph {
    loop {
        let g = random_graph(k, p, rng);
        if tree_decomposition(&g)
            .map(|td| td.width())
            .unwrap_or(usize::MAX)
            <= max_width
        {
            return g;
        }
    }
}

/// Applies a uniformly random relabelling of the vertices.
pub fn shuffle_labels<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Graph {
    let mut perm: Vec<usize> = (0..g.order()).collect();
    perm.shuffle(rng);
    let edges: Vec<(usize, usize)> = g.edges().map(|(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(g.order(), &edges).unwrap()
}

/// Pattern families understood by the benchmark configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternFamily {
    Path,
    Cycle,
    Tree,
    Grid,
}

impl std::str::FromStr for PatternFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(PatternFamily::Path),
            "cycle" => Ok(PatternFamily::Cycle),
            "tree" => Ok(PatternFamily::Tree),
            "grid" => Ok(PatternFamily::Grid),
            other => Err(format!("unknown pattern family `{other}`")),
        }
    }
}

impl PatternFamily {
    /// Member of the family on `k` vertices. Grids are `2 x k/2` ladders and
    /// need even `k`; cycles need `k >= 3`.
    pub fn build<R: Rng + ?Sized>(self, k: usize, rng: &mut R) -> Result<Graph, String> {
        match self {
            PatternFamily::Path => Ok(named::path(k)),
            PatternFamily::Cycle if k >= 3 => Ok(named::cycle(k)),
            PatternFamily::Cycle => Err(format!("cycle needs at least 3 vertices, got {k}")),
            PatternFamily::Tree => Ok(random_tree(k, rng)),
            PatternFamily::Grid if k.is_multiple_of(2) && k > 0 => Ok(named::grid(2, k / 2)),
            PatternFamily::Grid => Err(format!("grid needs an even positive size, got {k}")),
        }
    }
}
