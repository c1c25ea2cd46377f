//! Homomorphism counts: bag tables bottom-up over the nice decomposition,
//! or a streamed walk of the homomorphism formula.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::{CountError, CountStats};
use crate::circuit::{with_inserted, Context, RestrictionAnchor, StreamingCircuit};
use crate::decomp::{NiceTreeDecomposition, NodeKind};
use crate::graph::{members, Graph, VertexSet};

/// How a single homomorphism count is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HomRoute {
    /// Tables when they are small, the streamed formula otherwise.
    #[default]
    Auto,
    Dp,
    Stream,
}

/// Table entries above which [`HomRoute::Auto`] switches to streaming.
pub const TABLE_BUDGET: u128 = 1 << 20;

impl HomRoute {
    /// Route chosen for a host of `n` allowed vertices.
    pub fn resolve(self, ntd: &NiceTreeDecomposition, n: usize) -> HomRoute {
        match self {
            HomRoute::Auto => {
                let per_bag = (n.max(1) as u128).saturating_pow(ntd.width() as u32 + 1);
                if per_bag.saturating_mul(ntd.len() as u128) <= TABLE_BUDGET {
                    HomRoute::Dp
                } else {
                    HomRoute::Stream
                }
            }
            route => route,
        }
    }
}

type Table = HashMap<Vec<usize>, BigUint>;

/// Bag-table dynamic programme over the nice decomposition.
pub(crate) fn hom_dp(ctx: &Context<'_>) -> (BigUint, usize) {
    let ntd = ctx.ntd;
    let mut tables: Vec<Option<Table>> = vec![None; ntd.len()];
    let mut peak = 0;
    let mut live = 0;
    for id in 0..ntd.len() {
        let bag = ctx.bag(id);
        let table: Table = match ntd.node(id).kind {
            NodeKind::Leaf => ctx
                .assignments(&bag)
                .into_iter()
                .map(|psi| (psi, BigUint::from(1u32)))
                .collect(),
            NodeKind::Introduce { child, vertex } => {
                let child_table = tables[child].take().unwrap();
                live -= child_table.len();
                let child_bag = ctx.bag(child);
                let pos = bag.iter().position(|&w| w == vertex).unwrap();
                let mut t = Table::new();
                for (psi, c) in child_table {
                    for v in members(ctx.candidates(vertex)) {
                        if ctx.extends(&child_bag, &psi, vertex, v) {
                            t.insert(with_inserted(&psi, pos, v), c.clone());
                        }
                    }
                }
                t
            }
            NodeKind::Forget { child, vertex } => {
                let child_table = tables[child].take().unwrap();
                live -= child_table.len();
                let pos = ctx.bag(child).iter().position(|&w| w == vertex).unwrap();
                let mut t = Table::new();
                for (mut psi, c) in child_table {
                    psi.remove(pos);
                    *t.entry(psi).or_default() += c;
                }
                t
            }
            NodeKind::Join { left, right } => {
                let a = tables[left].take().unwrap();
                let b = tables[right].take().unwrap();
                live -= a.len() + b.len();
                let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                small
                    .into_iter()
                    .filter_map(|(psi, x)| large.get(&psi).map(|y| (psi, x * y)))
                    .collect()
            }
        };
        live += table.len();
        peak = peak.max(live);
        tables[id] = Some(table);
    }
    let total = tables[ntd.root()]
        .take()
        .map(|t| t.into_values().sum())
        .unwrap_or_else(BigUint::zero);
    (total, peak)
}

/// `hom_g(F, G[allowed])`, or the unanchored count when `anchor` is `None`.
pub(crate) fn hom_count(
    pattern: &Graph,
    host: &Graph,
    ntd: &NiceTreeDecomposition,
    anchor: Option<&RestrictionAnchor>,
    allowed: VertexSet,
    route: HomRoute,
) -> Result<(BigUint, CountStats), CountError> {
    let n = (allowed & host.all_vertices()).count_ones() as usize;
    let mut stats = CountStats {
        hom_evaluations: 1,
        ..CountStats::default()
    };
    match route.resolve(ntd, n) {
        HomRoute::Stream => {
            let sc = StreamingCircuit::with_restrictions(pattern, host, ntd, anchor, allowed)?;
            let (value, s) = sc.count_at_ones();
            stats.gate_visits = s.gate_visits;
            stats.peak_depth = s.peak_depth;
            Ok((value, stats))
        }
        _ => {
            let ctx = Context::new(pattern, host, ntd, anchor, allowed)?;
            let (value, peak) = hom_dp(&ctx);
            stats.peak_table_entries = peak;
            Ok((value, stats))
        }
    }
}
