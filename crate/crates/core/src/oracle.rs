//! Exhaustive reference counters. Deliberately naive and independent of
//! [`crate::count`]: every candidate map is generated and every pattern edge
//! checked.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::graph::{Graph, VertexMap};

/// Largest number of candidate maps the oracle will enumerate.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{candidates} candidate maps exceed the enumeration limit of {ENUMERATION_LIMIT}")]
    TooLarge { candidates: u128 },
    #[error("inj = {inj} is not divisible by aut = {aut}")]
    NotDivisible { inj: BigUint, aut: BigUint },
    #[error("anchor is defined for {anchor} vertices, pattern has {pattern}")]
    AnchorMismatch { anchor: usize, pattern: usize },
}

fn free_vertices(pattern: &Graph, anchor: Option<&VertexMap>) -> Result<Vec<usize>, OracleError> {
    if let Some(a) = anchor {
        if a.pattern_order() != pattern.order() {
            return Err(OracleError::AnchorMismatch {
                anchor: a.pattern_order(),
                pattern: pattern.order(),
            });
        }
    }
    Ok((0..pattern.order())
        .filter(|&u| anchor.and_then(|a| a.get(u)).is_none())
        .collect())
}

fn edges_preserved(edges: &[(usize, usize)], host: &Graph, images: &[usize]) -> bool {
    edges.iter().all(|&(u, v)| {
        let (a, b) = (images[u], images[v]);
        a < host.order() && b < host.order() && host.has_edge(a, b)
    })
}

fn enumerate(
    pattern: &Graph,
    host: &Graph,
    anchor: Option<&VertexMap>,
    injective: bool,
) -> Result<BigUint, OracleError> {
    let free = free_vertices(pattern, anchor)?;
    let n = host.order() as u128;
    let candidates = if injective {
        (0..free.len() as u128).fold(1u128, |acc, i| acc.saturating_mul(n.saturating_sub(i)))
    } else {
        (0..free.len()).fold(1u128, |acc, _| acc.saturating_mul(n))
    };
    if candidates > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge { candidates });
    }
    let mut images = vec![0usize; pattern.order()];
    if let Some(a) = anchor {
        for (u, v) in a.pairs() {
            images[u] = v;
        }
    }
    let edges: Vec<(usize, usize)> = pattern.edges().collect();
    let injective_ok = |images: &[usize]| {
        let mut seen = 0u128;
        images.iter().all(|&v| {
            let fresh = v < 128 && seen >> v & 1 == 0;
            seen |= 1u128 << v.min(127);
            fresh
        })
    };
    let mut count = BigUint::zero();
    let n = host.order();
    if n == 0 && !free.is_empty() {
        return Ok(count);
    }
    // Odometer over the free vertices.
    let mut digits = vec![0usize; free.len()];
    loop {
        for (i, &u) in free.iter().enumerate() {
            images[u] = digits[i];
        }
        if edges_preserved(&edges, host, &images) && (!injective || injective_ok(&images)) {
            count += 1u32;
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(count);
            }
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// `hom(F, G)`, or `hom_g(F, G)` when anchored.
pub fn brute_hom(
    pattern: &Graph,
    host: &Graph,
    anchor: Option<&VertexMap>,
) -> Result<BigUint, OracleError> {
    enumerate(pattern, host, anchor, false)
}

/// `inj(F, G)`, or `inj_g(F, G)` when anchored.
pub fn brute_inj(
    pattern: &Graph,
    host: &Graph,
    anchor: Option<&VertexMap>,
) -> Result<BigUint, OracleError> {
    enumerate(pattern, host, anchor, true)
}

pub fn brute_aut(pattern: &Graph) -> Result<BigUint, OracleError> {
    brute_inj(pattern, pattern, None)
}

/// `sub(F, G) = inj(F, G) / aut(F)`, checked to divide exactly.
pub fn brute_sub(pattern: &Graph, host: &Graph) -> Result<BigUint, OracleError> {
    let inj = brute_inj(pattern, host, None)?;
    let aut = brute_aut(pattern)?;
    let (q, r) = inj.div_rem(&aut);
    if !r.is_zero() {
        return Err(OracleError::NotDivisible { inj, aut });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn n(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn hom_examples() {
        assert_eq!(brute_hom(&complete(2), &complete(3), None).unwrap(), n(6));
        assert_eq!(brute_hom(&cycle(4), &complete(3), None).unwrap(), n(18));
        assert_eq!(brute_hom(&complete(3), &cycle(4), None).unwrap(), n(0));
    }

    #[test]
    fn inj_examples() {
        assert_eq!(brute_inj(&path(3), &cycle(4), None).unwrap(), n(8));
        assert_eq!(brute_inj(&complete(2), &complete(2), None).unwrap(), n(2));
        for k in 1..=4 {
            for hn in k..=6 {
                let mut rng = ChaCha8Rng::seed_from_u64((k * 10 + hn) as u64);
                let f = crate::gen::random_graph(k, 0.5, &mut rng);
                let ff: u64 = (hn - k + 1..=hn).map(|x| x as u64).product();
                assert_eq!(brute_inj(&f, &complete(hn), None).unwrap(), n(ff));
            }
        }
    }

    #[test]
    fn sub_examples() {
        assert_eq!(brute_sub(&complete(3), &complete(4)).unwrap(), n(4));
        assert_eq!(brute_sub(&path(3), &cycle(4)).unwrap(), n(4));
        assert_eq!(brute_sub(&cycle(4), &cycle(4)).unwrap(), n(1));
    }

    #[test]
    fn anchored() {
        let a = VertexMap::from_pairs(2, &[(0, 0)]);
        assert_eq!(
            brute_hom(&complete(2), &complete(3), Some(&a)).unwrap(),
            n(2)
        );
        let b = VertexMap::from_pairs(3, &[(1, 0)]);
        assert_eq!(brute_hom(&path(3), &cycle(4), Some(&b)).unwrap(), n(4));
        assert_eq!(brute_inj(&path(3), &cycle(4), Some(&b)).unwrap(), n(2));
    }

    #[test]
    fn guards() {
        assert!(matches!(
            brute_hom(&path(10), &complete(10), None),
            Err(OracleError::TooLarge { .. })
        ));
        assert!(brute_inj(&path(3), &Graph::empty(2).unwrap(), None)
            .unwrap()
            .is_zero());
        assert_eq!(
            brute_hom(&Graph::empty(0).unwrap(), &complete(3), None).unwrap(),
            n(1)
        );
    }

    #[test]
    fn sub_in_complete_host() {
        // C(n, k) * k! / aut(F)
        for f in [path(3), cycle(4), star(3), complete(3)] {
            let k = f.order() as u64;
            let aut = brute_aut(&f).unwrap();
            for hn in [4u64, 5, 6] {
                let choose: u64 = (hn - k + 1..=hn).product::<u64>() / (1..=k).product::<u64>();
                let fact: u64 = (1..=k).product();
                let expect = n(choose * fact) / &aut;
                assert_eq!(brute_sub(&f, &complete(hn as usize)).unwrap(), expect);
            }
        }
    }
}
