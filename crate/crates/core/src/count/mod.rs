//! Exact counters for `hom`, `inj`, `sub` and `aut`.
//!
//! * `hom(F, G)` by bag tables ([`count_hom_dp`]) or by evaluating the
//!   homomorphism formula at all-ones label by label ([`count_hom_stream`]).
//! * `inj(F, G)` by meet in the middle over a balanced path split
//!   ([`count_inj_mitm`]), by the same sum rearranged to keep only
//!   polynomial space ([`count_inj_polyspace`]), or by inclusion-exclusion
//!   over host vertex deletions when both graphs have the same order
//!   ([`count_inj_equal_size`]).
//! * `aut(F) = inj(F, F)` and `sub(F, G) = inj(F, G) / aut(F)`.

mod hom;
mod inj;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::circuit::{CircuitError, RestrictionAnchor, StreamingCircuit};
use crate::decomp::{DecompError, NiceTreeDecomposition, DEFAULT_PATTERN_LIMIT};
use crate::graph::Graph;
use crate::lattice::LatticeError;
use crate::oracle::OracleError;
use crate::par::Execution;

pub use hom::{HomRoute, TABLE_BUDGET};
pub use inj::{
    anchors, count_aut, count_aut_with, count_inj_equal_size, count_inj_equal_size_with,
    count_inj_mitm, count_inj_mitm_with, count_inj_polyspace, count_inj_polyspace_with, count_sub,
    count_sub_with, inj_table, mitm_families, Side,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    Decomposition(#[from] DecompError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("pattern has {pattern} vertices but host has {host}; equal orders are required")]
    SizeMismatch { pattern: usize, host: usize },
    #[error("inj = {inj} is not divisible by aut = {aut}")]
    NotDivisible { inj: BigUint, aut: BigUint },
    #[error("algorithm `{algorithm}` cannot count {quantity}")]
    Unsupported {
        quantity: Quantity,
        algorithm: Algorithm,
    },
    #[error("anchor is not injective")]
    AnchorNotInjective,
}

/// Counting algorithm tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dp,
    Stream,
    Mitm,
    Polyspace,
    EqualSize,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Dp,
        Algorithm::Stream,
        Algorithm::Mitm,
        Algorithm::Polyspace,
        Algorithm::EqualSize,
        Algorithm::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dp => "dp",
            Algorithm::Stream => "stream",
            Algorithm::Mitm => "mitm",
            Algorithm::Polyspace => "polyspace",
            Algorithm::EqualSize => "equal-size",
            Algorithm::Brute => "brute",
        }
    }

    /// Whether the algorithm can produce `quantity`.
    pub fn supports(self, quantity: Quantity) -> bool {
        use Algorithm::*;
        match quantity {
            Quantity::Hom => matches!(self, Dp | Stream | Brute),
            Quantity::Inj | Quantity::Sub => matches!(self, Mitm | Polyspace | EqualSize | Brute),
            Quantity::Aut => matches!(self, Mitm | Polyspace | EqualSize | Brute),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Hom,
    Inj,
    Sub,
    Aut,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Hom => "hom",
            Quantity::Inj => "inj",
            Quantity::Sub => "sub",
            Quantity::Aut => "aut",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hom" => Ok(Quantity::Hom),
            "inj" => Ok(Quantity::Inj),
            "sub" => Ok(Quantity::Sub),
            "aut" => Ok(Quantity::Aut),
            _ => Err(format!("unknown quantity `{s}`")),
        }
    }
}

/// Work counters. Sums add up across anchors; peaks take the maximum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountStats {
    /// Anchor maps `g` visited.
    pub anchors: u64,
    /// Individual homomorphism counts computed.
    pub hom_evaluations: u64,
    /// Formula gates entered by streamed evaluations.
    pub gate_visits: u64,
    /// Deepest stack of open gates in a streamed evaluation.
    pub peak_depth: usize,
    /// Largest number of live bag-table entries in one homomorphism count.
    pub peak_table_entries: usize,
    /// Largest set-indexed table held at once.
    pub peak_set_entries: usize,
}

impl CountStats {
    pub fn merge(self, other: CountStats) -> CountStats {
        CountStats {
            anchors: self.anchors + other.anchors,
            hom_evaluations: self.hom_evaluations + other.hom_evaluations,
            gate_visits: self.gate_visits + other.gate_visits,
            peak_depth: self.peak_depth.max(other.peak_depth),
            peak_table_entries: self.peak_table_entries.max(other.peak_table_entries),
            peak_set_entries: self.peak_set_entries.max(other.peak_set_entries),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub value: BigUint,
    pub algorithm: Algorithm,
    pub stats: CountStats,
}

/// Knobs shared by the counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Parallelism over anchors and deletion sets.
    pub execution: Execution,
    /// Route of each homomorphism count inside the `inj` counters.
    pub hom_route: HomRoute,
    /// Largest pattern the exact decomposition searches accept.
    pub pattern_limit: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            execution: Execution::Parallel,
            hom_route: HomRoute::Auto,
            pattern_limit: DEFAULT_PATTERN_LIMIT,
        }
    }
}

/// `hom(F, G)` by bag tables.
pub fn count_hom_dp(
    pattern: &Graph,
    host: &Graph,
    ntd: &NiceTreeDecomposition,
) -> Result<CountResult, CountError> {
    let (value, stats) =
        hom::hom_count(pattern, host, ntd, None, host.all_vertices(), HomRoute::Dp)?;
    Ok(CountResult {
        value,
        algorithm: Algorithm::Dp,
        stats,
    })
}

/// `hom(F, G) = P_G(1, .., 1)` by a depth-first walk of the formula.
pub fn count_hom_stream(
    pattern: &Graph,
    host: &Graph,
    ntd: &NiceTreeDecomposition,
) -> Result<CountResult, CountError> {
    let (value, stats) = hom::hom_count(
        pattern,
        host,
        ntd,
        None,
        host.all_vertices(),
        HomRoute::Stream,
    )?;
    Ok(CountResult {
        value,
        algorithm: Algorithm::Stream,
        stats,
    })
}

/// `hom_g(F, G)`: homomorphisms agreeing with the anchor, by the restricted
/// formula evaluated at all-ones.
pub fn count_hom_anchored(
    pattern: &Graph,
    host: &Graph,
    ntd: &NiceTreeDecomposition,
    anchor: &RestrictionAnchor,
) -> Result<CountResult, CountError> {
    let sc = StreamingCircuit::restricted(pattern, host, ntd, anchor)?;
    let (value, s) = sc.count_at_ones();
    Ok(CountResult {
        value,
        algorithm: Algorithm::Stream,
        stats: CountStats {
            hom_evaluations: 1,
            gate_visits: s.gate_visits,
            peak_depth: s.peak_depth,
            ..CountStats::default()
        },
    })
}

/// Dispatches `quantity` to `algorithm`. `ntd` overrides the decomposition
/// used by the homomorphism counters.
pub fn count(
    quantity: Quantity,
    algorithm: Algorithm,
    pattern: &Graph,
    host: &Graph,
    ntd: Option<&NiceTreeDecomposition>,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    if !algorithm.supports(quantity) {
        return Err(CountError::Unsupported {
            quantity,
            algorithm,
        });
    }
    let brute = |value: BigUint| CountResult {
        value,
        algorithm: Algorithm::Brute,
        stats: CountStats::default(),
    };
    let decomposition = || -> Result<NiceTreeDecomposition, CountError> {
        match ntd {
            Some(d) => Ok(d.clone()),
            None => Ok(crate::decomp::nice_decomposition_with_limit(
                pattern,
                opts.pattern_limit,
            )?),
        }
    };
    use crate::oracle;
    match (quantity, algorithm) {
        (Quantity::Hom, Algorithm::Dp) => count_hom_dp(pattern, host, &decomposition()?),
        (Quantity::Hom, Algorithm::Stream) => count_hom_stream(pattern, host, &decomposition()?),
        (Quantity::Hom, _) => Ok(brute(oracle::brute_hom(pattern, host, None)?)),
        (Quantity::Inj, Algorithm::Mitm) => count_inj_mitm_with(pattern, host, opts),
        (Quantity::Inj, Algorithm::Polyspace) => count_inj_polyspace_with(pattern, host, opts),
        (Quantity::Inj, Algorithm::EqualSize) => count_inj_equal_size_with(pattern, host, opts),
        (Quantity::Inj, _) => Ok(brute(oracle::brute_inj(pattern, host, None)?)),
        (Quantity::Sub, Algorithm::Brute) => Ok(brute(oracle::brute_sub(pattern, host)?)),
        (Quantity::Sub, _) => count_sub_with(pattern, host, algorithm, opts),
        (Quantity::Aut, Algorithm::Brute) => Ok(brute(oracle::brute_aut(pattern)?)),
        (Quantity::Aut, Algorithm::EqualSize) => count_aut_with(pattern, opts),
        (Quantity::Aut, _) => {
            let mut r = count(Quantity::Inj, algorithm, pattern, pattern, ntd, opts)?;
            r.algorithm = algorithm;
            Ok(r)
        }
    }
}
