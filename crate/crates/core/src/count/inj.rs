//! Injective homomorphism counts via a balanced split `V(F) = L ⊎ S ⊎ R`.
//!
//! For a fixed injective anchor `g : S → V(G)` and `Q ⊆ V(G) ∖ g(S)` with
//! `|Q| = |L|`, the weight `α_g^L(Q) = inj_g(F[L ∪ S], G[Q ∪ g(S)])` equals
//! `Σ_{X ⊆ Q} (-1)^{|Q|-|X|} hom_g(F[L ∪ S], G[X ∪ g(S)])`: a homomorphism
//! that fixes `S` and sends the `|L|` free vertices onto all of `Q` is
//! injective. Because no edge joins `L` and `R`, `inj_g(F, G)` is the
//! disjoint sum of the left and right weight families, and `inj(F, G)` sums
//! that over anchors.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use super::hom::{hom_count, HomRoute};
use super::{Algorithm, CountError, CountOptions, CountResult, CountStats};
use crate::circuit::RestrictionAnchor;
use crate::decomp::{
    nice_decomposition_with_limit, path_split_with_limit, NiceTreeDecomposition, PathSplit,
};
use crate::graph::{members, Graph, VertexMap, VertexSet};
use crate::lattice::{
    disjoint_sum, submasks, zeta_trimmed, SetFunction, SubsetsOfSize, WeightedFamily,
};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `L ∪ S`.
    Left,
    /// `R ∪ S`.
    Right,
}

/// Injective maps `S → V(G)` that preserve the edges of `F[S]`, in
/// lexicographic order of their images along increasing `S`.
pub fn anchors(pattern: &Graph, host: &Graph, separator: VertexSet) -> Vec<VertexMap> {
    let s: Vec<usize> = members(separator).collect();
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(s.len());
    fn go(
        pattern: &Graph,
        host: &Graph,
        s: &[usize],
        images: &mut Vec<usize>,
        out: &mut Vec<VertexMap>,
    ) {
        let i = images.len();
        if i == s.len() {
            let pairs: Vec<(usize, usize)> =
                s.iter().copied().zip(images.iter().copied()).collect();
            out.push(VertexMap::from_pairs(pattern.order(), &pairs));
            return;
        }
        for v in 0..host.order() {
            if images.contains(&v) {
                continue;
            }
            let ok = (0..i).all(|j| !pattern.has_edge(s[i], s[j]) || host.has_edge(v, images[j]));
            if ok {
                images.push(v);
                go(pattern, host, s, images, out);
                images.pop();
            }
        }
    }
    go(pattern, host, &s, &mut images, &mut out);
    out
}

/// One side of the split as a standalone pattern with its decomposition.
struct SidePlan {
    graph: Graph,
    ntd: NiceTreeDecomposition,
    /// Original index of each local vertex.
    original: Vec<usize>,
    /// Number of side vertices outside `S`.
    free: usize,
}

impl SidePlan {
    fn new(
        pattern: &Graph,
        split: &PathSplit,
        side: Side,
        limit: usize,
    ) -> Result<Self, CountError> {
        let mask = match side {
            Side::Left => split.left_plus(),
            Side::Right => split.right_plus(),
        };
        let induced = pattern
            .induced_subgraph(mask)
            .expect("side lies inside the pattern");
        let ntd = nice_decomposition_with_limit(&induced.graph, limit)?;
        Ok(SidePlan {
            free: (mask & !split.separator).count_ones() as usize,
            graph: induced.graph,
            ntd,
            original: induced.original,
        })
    }

    fn anchor(&self, g: &VertexMap) -> RestrictionAnchor {
        let mut local = VertexMap::new(self.graph.order());
        for (i, &u) in self.original.iter().enumerate() {
            if let Some(v) = g.get(u) {
                local.set(i, v);
            }
        }
        RestrictionAnchor::new(local)
    }

    /// `hom_g(F[side], G[X ∪ g(S)])`.
    fn hom(
        &self,
        host: &Graph,
        anchor: &RestrictionAnchor,
        x: VertexSet,
        image: VertexSet,
        route: HomRoute,
        stats: &mut CountStats,
    ) -> Result<BigUint, CountError> {
        let (h, s) = hom_count(&self.graph, host, &self.ntd, Some(anchor), x | image, route)?;
        *stats = stats.merge(s);
        Ok(h)
    }

    /// `α_g(M)` by inclusion-exclusion over `Y ⊆ M`.
    fn alpha(
        &self,
        host: &Graph,
        anchor: &RestrictionAnchor,
        m: VertexSet,
        image: VertexSet,
        route: HomRoute,
        stats: &mut CountStats,
    ) -> Result<BigInt, CountError> {
        let size = m.count_ones();
        let mut total = BigInt::zero();
        for y in submasks(m) {
            let h = BigInt::from(self.hom(host, anchor, y, image, route, stats)?);
            if (size - y.count_ones()).is_multiple_of(2) {
                total += h;
            } else {
                total -= h;
            }
        }
        Ok(total)
    }

    /// `Q ↦ α_g(Q)` for every `Q ⊆ V(G) ∖ g(S)` of size `free`.
    fn table(
        &self,
        host: &Graph,
        g: &VertexMap,
        route: HomRoute,
        stats: &mut CountStats,
    ) -> Result<SetFunction, CountError> {
        let image = g.image();
        let ground = host.all_vertices() & !image;
        let anchor = self.anchor(g);
        let q = self.free;
        let mut gamma = SetFunction::new(host.order())
            .with_ground(ground)
            .with_support_bound(q);
        let mut entries = 0;
        for size in 0..=q.min(ground.count_ones() as usize) {
            for x in SubsetsOfSize::new(ground, size) {
                let h = BigInt::from(self.hom(host, &anchor, x, image, route, stats)?);
                gamma.set(x, if (q - size).is_multiple_of(2) { h } else { -h })?;
                entries += 1;
            }
        }
        stats.peak_set_entries = stats.peak_set_entries.max(entries);
        Ok(zeta_trimmed(&gamma, q)?)
    }
}

fn check_anchor(g: &VertexMap) -> Result<(), CountError> {
    if g.is_injective() {
        Ok(())
    } else {
        Err(CountError::AnchorNotInjective)
    }
}

/// `Q ↦ inj_g(F[side], G[Q ∪ g(S)])` over `Q ⊆ V(G) ∖ g(S)` with
/// `|Q| = |side| - |S|`, from homomorphism counts on induced hosts and one
/// trimmed zeta transform.
pub fn inj_table(
    pattern: &Graph,
    host: &Graph,
    split: &PathSplit,
    side: Side,
    g: &VertexMap,
) -> Result<SetFunction, CountError> {
    check_anchor(g)?;
    let plan = SidePlan::new(pattern, split, side, pattern.order().max(1))?;
    plan.table(host, g, HomRoute::Auto, &mut CountStats::default())
}

fn family(table: &SetFunction, host: &Graph, cardinality: usize) -> WeightedFamily {
    let mut fam = WeightedFamily::new(host.order(), cardinality);
    for (q, w) in table.iter() {
        let w = w.to_biguint().expect("injective counts are nonnegative");
        fam.insert(q, w).expect("table sets have the side's size");
    }
    fam
}

/// The weighted families `(𝓛_g, 𝓡_g)` of the split for anchor `g`; only
/// nonzero weights are kept.
pub fn mitm_families(
    pattern: &Graph,
    host: &Graph,
    split: &PathSplit,
    g: &VertexMap,
) -> Result<(WeightedFamily, WeightedFamily), CountError> {
    check_anchor(g)?;
    let limit = pattern.order().max(1);
    let left = SidePlan::new(pattern, split, Side::Left, limit)?;
    let right = SidePlan::new(pattern, split, Side::Right, limit)?;
    let mut stats = CountStats::default();
    Ok((
        family(
            &left.table(host, g, HomRoute::Auto, &mut stats)?,
            host,
            left.free,
        ),
        family(
            &right.table(host, g, HomRoute::Auto, &mut stats)?,
            host,
            right.free,
        ),
    ))
}

type Partial = Result<(BigUint, CountStats), CountError>;

fn combine(a: Partial, b: Partial) -> Partial {
    let (x, s) = a?;
    let (y, t) = b?;
    Ok((x + y, s.merge(t)))
}

/// `inj(F, G) = Σ_g 𝓛_g ⊠ 𝓡_g`.
pub fn count_inj_mitm(pattern: &Graph, host: &Graph) -> Result<CountResult, CountError> {
    count_inj_mitm_with(pattern, host, &CountOptions::default())
}

pub fn count_inj_mitm_with(
    pattern: &Graph,
    host: &Graph,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    let split = path_split_with_limit(pattern, opts.pattern_limit)?;
    let left = SidePlan::new(pattern, &split, Side::Left, opts.pattern_limit)?;
    let right = SidePlan::new(pattern, &split, Side::Right, opts.pattern_limit)?;
    let gs = anchors(pattern, host, split.separator);
    let (value, stats) = par::map_reduce(
        opts.execution,
        &gs,
        |g| -> Partial {
            let mut stats = CountStats {
                anchors: 1,
                ..CountStats::default()
            };
            let a = family(
                &left.table(host, g, opts.hom_route, &mut stats)?,
                host,
                left.free,
            );
            if a.is_empty() {
                return Ok((BigUint::zero(), stats));
            }
            let b = family(
                &right.table(host, g, opts.hom_route, &mut stats)?,
                host,
                right.free,
            );
            Ok((disjoint_sum(&a, &b)?, stats))
        },
        || Ok((BigUint::zero(), CountStats::default())),
        combine,
    )?;
    Ok(CountResult {
        value,
        algorithm: Algorithm::Mitm,
        stats,
    })
}

/// `inj(F, G)` in polynomial space:
/// `Σ_g Σ_{X, |X| ≤ min(|L|,|R|)} (-1)^{|X|} (Σ_{M ⊇ X} α_g^L(M)) (Σ_{N ⊇ X} α_g^R(N))`
/// with every `α` recomputed from homomorphism counts when needed.
pub fn count_inj_polyspace(pattern: &Graph, host: &Graph) -> Result<CountResult, CountError> {
    count_inj_polyspace_with(pattern, host, &CountOptions::default())
}

pub fn count_inj_polyspace_with(
    pattern: &Graph,
    host: &Graph,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    let split = path_split_with_limit(pattern, opts.pattern_limit)?;
    let left = SidePlan::new(pattern, &split, Side::Left, opts.pattern_limit)?;
    let right = SidePlan::new(pattern, &split, Side::Right, opts.pattern_limit)?;
    let gs = anchors(pattern, host, split.separator);
    let route = opts.hom_route;
    let (value, stats) = par::map_reduce(
        opts.execution,
        &gs,
        |g| -> Result<(BigInt, CountStats), CountError> {
            let mut stats = CountStats {
                anchors: 1,
                ..CountStats::default()
            };
            let image = g.image();
            let ground = host.all_vertices() & !image;
            let (la, ra) = (left.anchor(g), right.anchor(g));
            let upper = |plan: &SidePlan,
                         anchor: &RestrictionAnchor,
                         x: VertexSet,
                         stats: &mut CountStats|
             -> Result<BigInt, CountError> {
                let mut sum = BigInt::zero();
                let extra = plan.free - x.count_ones() as usize;
                for rest in SubsetsOfSize::new(ground & !x, extra) {
                    sum += plan.alpha(host, anchor, x | rest, image, route, stats)?;
                }
                Ok(sum)
            };
            let mut total = BigInt::zero();
            for size in 0..=left.free.min(right.free) {
                for x in SubsetsOfSize::new(ground, size) {
                    let a = upper(&left, &la, x, &mut stats)?;
                    if a.is_zero() {
                        continue;
                    }
                    let b = upper(&right, &ra, x, &mut stats)?;
                    if size % 2 == 0 {
                        total += a * b;
                    } else {
                        total -= a * b;
                    }
                }
            }
            Ok((total, stats))
        },
        || Ok((BigInt::zero(), CountStats::default())),
        |a, b| {
            let (x, s) = a?;
            let (y, t) = b?;
            Ok((x + y, s.merge(t)))
        },
    )?;
    Ok(CountResult {
        value: value
            .to_biguint()
            .expect("the alternating sum counts injective homomorphisms"),
        algorithm: Algorithm::Polyspace,
        stats,
    })
}

/// `inj(F, G) = Σ_{W ⊆ V(G)} (-1)^{|W|} hom(F, G[V(G) ∖ W])` for
/// `|V(F)| = |V(G)|`.
pub fn count_inj_equal_size(pattern: &Graph, host: &Graph) -> Result<CountResult, CountError> {
    count_inj_equal_size_with(pattern, host, &CountOptions::default())
}

pub fn count_inj_equal_size_with(
    pattern: &Graph,
    host: &Graph,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    if pattern.order() != host.order() {
        return Err(CountError::SizeMismatch {
            pattern: pattern.order(),
            host: host.order(),
        });
    }
    let ntd = nice_decomposition_with_limit(pattern, opts.pattern_limit)?;
    let all = host.all_vertices();
    let deletions: Vec<VertexSet> = submasks(all).collect();
    let (value, stats) = par::map_reduce(
        opts.execution,
        &deletions,
        |&w| -> Result<(BigInt, CountStats), CountError> {
            let (h, s) = hom_count(pattern, host, &ntd, None, all & !w, HomRoute::Dp)?;
            let h = BigInt::from(h);
            Ok((if w.count_ones() % 2 == 0 { h } else { -h }, s))
        },
        || Ok((BigInt::zero(), CountStats::default())),
        |a, b| {
            let (x, s) = a?;
            let (y, t) = b?;
            Ok((x + y, s.merge(t)))
        },
    )?;
    Ok(CountResult {
        value: value
            .to_biguint()
            .expect("the alternating sum counts injective homomorphisms"),
        algorithm: Algorithm::EqualSize,
        stats,
    })
}

/// `aut(F) = inj(F, F)`.
pub fn count_aut(pattern: &Graph) -> Result<CountResult, CountError> {
    count_aut_with(pattern, &CountOptions::default())
}

pub fn count_aut_with(pattern: &Graph, opts: &CountOptions) -> Result<CountResult, CountError> {
    count_inj_equal_size_with(pattern, pattern, opts)
}

/// `sub(F, G) = inj(F, G) / aut(F)`, with `inj` by `algorithm`.
pub fn count_sub(
    pattern: &Graph,
    host: &Graph,
    algorithm: Algorithm,
) -> Result<CountResult, CountError> {
    count_sub_with(pattern, host, algorithm, &CountOptions::default())
}

pub fn count_sub_with(
    pattern: &Graph,
    host: &Graph,
    algorithm: Algorithm,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    let inj = match algorithm {
        Algorithm::Mitm => count_inj_mitm_with(pattern, host, opts)?,
        Algorithm::Polyspace => count_inj_polyspace_with(pattern, host, opts)?,
        Algorithm::EqualSize => count_inj_equal_size_with(pattern, host, opts)?,
        other => {
            return Err(CountError::Unsupported {
                quantity: super::Quantity::Sub,
                algorithm: other,
            })
        }
    };
    let aut = count_aut_with(pattern, opts)?;
    let (value, rem) = inj.value.div_rem(&aut.value);
    if !rem.is_zero() {
        return Err(CountError::NotDivisible {
            inj: inj.value,
            aut: aut.value,
        });
    }
    Ok(CountResult {
        value,
        algorithm,
        stats: inj.stats.merge(aut.stats),
    })
}
