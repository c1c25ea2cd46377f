//! Integer set functions on the subset lattice of host vertices: zeta
//! transforms (naive and trimmed), down-closures, and disjoint sums.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{full_set, members, VertexSet, MAX_VERTICES};

/// Largest universe the `O(3^n)` naive transform accepts.
pub const NAIVE_ZETA_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("universe of {0} elements is too large for the naive zeta transform")]
    UniverseTooLarge(usize),
    #[error("set function has no declared support bound")]
    NoSupportBound,
    #[error("set of size {size} exceeds the support bound {bound}")]
    OutsideSupport { size: usize, bound: usize },
    #[error("set {0:#b} is not contained in the ground set")]
    OutsideGround(VertexSet),
    #[error("family member {set:#b} has size {size}, expected {expected}")]
    WrongCardinality {
        set: VertexSet,
        size: usize,
        expected: usize,
    },
    #[error("families live on universes of {0} and {1} elements")]
    UniverseMismatch(usize, usize),
}

/// `f : 2^ground -> Z`, stored sparsely; absent sets map to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunction {
    universe_size: usize,
    ground: VertexSet,
    support_bound: Option<usize>,
    entries: BTreeMap<VertexSet, BigInt>,
}

impl SetFunction {
    /// The zero function on subsets of `{0, .., universe_size - 1}`.
    pub fn new(universe_size: usize) -> Self {
        assert!(universe_size <= MAX_VERTICES);
        SetFunction {
            universe_size,
            ground: full_set(universe_size),
            support_bound: None,
            entries: BTreeMap::new(),
        }
    }

    /// Restricts the domain to subsets of `ground`.
    pub fn with_ground(mut self, ground: VertexSet) -> Self {
        assert_eq!(ground & !full_set(self.universe_size), 0);
        self.ground = ground;
        self
    }

    /// Declares that `f(X) = 0` whenever `|X| > bound`.
    pub fn with_support_bound(mut self, bound: usize) -> Self {
        self.support_bound = Some(bound);
        self
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn ground(&self) -> VertexSet {
        self.ground
    }

    pub fn support_bound(&self) -> Option<usize> {
        self.support_bound
    }

    pub fn set(&mut self, x: VertexSet, value: BigInt) -> Result<(), LatticeError> {
        if x & !self.ground != 0 {
            return Err(LatticeError::OutsideGround(x));
        }
        let size = x.count_ones() as usize;
        if let Some(bound) = self.support_bound {
            if size > bound {
                return Err(LatticeError::OutsideSupport { size, bound });
            }
        }
        if value.is_zero() {
            self.entries.remove(&x);
        } else {
            self.entries.insert(x, value);
        }
        Ok(())
    }

    pub fn get(&self, x: VertexSet) -> BigInt {
        self.entries.get(&x).cloned().unwrap_or_default()
    }

    /// Nonzero entries in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexSet, &BigInt)> {
        self.entries.iter().map(|(&x, v)| (x, v))
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }
}

/// Every submask of `set`, including `set` and the empty set.
pub fn submasks(set: VertexSet) -> impl Iterator<Item = VertexSet> {
    let mut next = Some(set);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & set)
        };
        Some(cur)
    })
}

/// All subsets of `ground` with exactly `size` elements, in increasing
/// order of their masks restricted to `ground`.
pub fn subsets_of_size(ground: VertexSet, size: usize) -> Vec<VertexSet> {
    SubsetsOfSize::new(ground, size).collect()
}

/// Lazy form of [`subsets_of_size`], holding `O(size)` state.
#[derive(Debug, Clone)]
pub struct SubsetsOfSize {
    elems: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl SubsetsOfSize {
    pub fn new(ground: VertexSet, size: usize) -> Self {
        let elems: Vec<usize> = members(ground).collect();
        SubsetsOfSize {
            done: size > elems.len(),
            idx: (0..size).collect(),
            elems,
        }
    }
}

impl Iterator for SubsetsOfSize {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        if self.done {
            return None;
        }
        let (n, size) = (self.elems.len(), self.idx.len());
        let out = self.idx.iter().fold(0, |m, &i| m | 1 << self.elems[i]);
        match (0..size).rev().find(|&p| self.idx[p] != p + n - size) {
            None => self.done = true,
            Some(pos) => {
                self.idx[pos] += 1;
                for p in pos + 1..size {
                    self.idx[p] = self.idx[p - 1] + 1;
                }
            }
        }
        Some(out)
    }
}

/// `fζ(S) = Σ_{X ⊆ S} f(X)` for every `S ⊆ ground`, by direct summation.
pub fn zeta_naive(f: &SetFunction) -> Result<SetFunction, LatticeError> {
    let n = f.ground.count_ones() as usize;
    if n > NAIVE_ZETA_LIMIT {
        return Err(LatticeError::UniverseTooLarge(n));
    }
    let mut out = SetFunction::new(f.universe_size).with_ground(f.ground);
    for s in submasks(f.ground) {
        let total: BigInt = submasks(s).filter_map(|x| f.entries.get(&x)).sum();
        out.set(s, total)?;
    }
    Ok(out)
}

/// `fζ(Q)` for every `Q ⊆ ground` with `|Q| = target`, for `f` supported on
/// sets of size at most its declared bound. Runs a Yates pass per element
/// over the table of sets with at most `target` elements only.
pub fn zeta_trimmed(f: &SetFunction, target: usize) -> Result<SetFunction, LatticeError> {
    f.support_bound.ok_or(LatticeError::NoSupportBound)?;
    let mut table: HashMap<VertexSet, BigInt> = HashMap::new();
    for size in 0..=target {
        for x in subsets_of_size(f.ground, size) {
            table.insert(x, f.get(x));
        }
    }
    for j in members(f.ground) {
        let bit = 1u64 << j;
        let with_j: Vec<VertexSet> = table.keys().copied().filter(|x| x & bit != 0).collect();
        for x in with_j {
            let below = table[&(x & !bit)].clone();
            if !below.is_zero() {
                *table.get_mut(&x).unwrap() += below;
            }
        }
    }
    let mut out = SetFunction::new(f.universe_size).with_ground(f.ground);
    for q in subsets_of_size(f.ground, target) {
        out.set(q, table.remove(&q).unwrap_or_default())?;
    }
    Ok(out)
}

/// Family of equal-size subsets with nonnegative integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedFamily {
    universe_size: usize,
    cardinality: usize,
    members: BTreeMap<VertexSet, BigUint>,
}

impl WeightedFamily {
    pub fn new(universe_size: usize, cardinality: usize) -> Self {
        WeightedFamily {
            universe_size,
            cardinality,
            members: BTreeMap::new(),
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Adds `set` with `weight`, replacing any earlier weight.
    pub fn insert(&mut self, set: VertexSet, weight: BigUint) -> Result<(), LatticeError> {
        let size = set.count_ones() as usize;
        if size != self.cardinality {
            return Err(LatticeError::WrongCardinality {
                set,
                size,
                expected: self.cardinality,
            });
        }
        if set & !full_set(self.universe_size) != 0 {
            return Err(LatticeError::OutsideGround(set));
        }
        self.members.insert(set, weight);
        Ok(())
    }

    pub fn weight(&self, set: VertexSet) -> Option<&BigUint> {
        self.members.get(&set)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexSet, &BigUint)> {
        self.members.iter().map(|(&s, w)| (s, w))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Scales every weight by `factor`.
    pub fn scaled(&self, factor: &BigUint) -> Self {
        let mut out = self.clone();
        for w in out.members.values_mut() {
            *w *= factor;
        }
        out
    }
}

/// `↓A`: every subset of some member.
pub fn down_closure(family: &WeightedFamily) -> BTreeSet<VertexSet> {
    let mut closure: BTreeSet<VertexSet> = BTreeSet::new();
    let mut stack: Vec<VertexSet> = family.members.keys().copied().collect();
    while let Some(x) = stack.pop() {
        if closure.insert(x) {
            for v in members(x) {
                let y = x & !(1 << v);
                if !closure.contains(&y) {
                    stack.push(y);
                }
            }
        }
    }
    closure
}

/// `X ↦ Σ_{A ∈ family, A ⊇ X} weight(A)` over the down-closure, one
/// element at a time; `O(n · |↓family|)` additions.
fn superset_sums(family: &WeightedFamily) -> HashMap<VertexSet, BigInt> {
    let mut table: HashMap<VertexSet, BigInt> = down_closure(family)
        .into_iter()
        .map(|x| (x, BigInt::zero()))
        .collect();
    for (set, w) in family.iter() {
        *table.get_mut(&set).unwrap() = BigInt::from(w.clone());
    }
    for j in 0..family.universe_size {
        let bit = 1u64 << j;
        let without: Vec<VertexSet> = table
            .keys()
            .copied()
            .filter(|x| x & bit == 0 && table.contains_key(&(x | bit)))
            .collect();
        for x in without {
            let above = table[&(x | bit)].clone();
            if !above.is_zero() {
                *table.get_mut(&x).unwrap() += above;
            }
        }
    }
    table
}

/// `A ⊠ B = Σ_{A, B disjoint} α(A) β(B)`, computed as
/// `Σ_X (-1)^{|X|} â(X) b̂(X)` over `X ∈ ↓A ∩ ↓B`, where `â`, `b̂` are the
/// superset sums of the weights.
pub fn disjoint_sum(a: &WeightedFamily, b: &WeightedFamily) -> Result<BigUint, LatticeError> {
    if a.universe_size != b.universe_size {
        return Err(LatticeError::UniverseMismatch(
            a.universe_size,
            b.universe_size,
        ));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(BigUint::zero());
    }
    let up_a = superset_sums(a);
    let up_b = superset_sums(b);
    let (small, large) = if up_a.len() <= up_b.len() {
        (&up_a, &up_b)
    } else {
        (&up_b, &up_a)
    };
    let mut total = BigInt::zero();
    for (x, va) in small {
        if let Some(vb) = large.get(x) {
            let term = va * vb;
            if x.count_ones() % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    debug_assert!(!total.is_negative());
    Ok(total
        .to_biguint()
        .expect("disjoint sums of nonnegative weights are nonnegative"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_disjoint_sum(a: &WeightedFamily, b: &WeightedFamily) -> BigUint {
        let mut total = BigUint::zero();
        for (x, wa) in a.iter() {
            for (y, wb) in b.iter() {
                if x & y == 0 {
                    total += wa * wb;
                }
            }
        }
        total
    }

    fn random_function(rng: &mut ChaCha8Rng, n: usize, bound: usize) -> SetFunction {
        let mut f = SetFunction::new(n).with_support_bound(bound);
        for size in 0..=bound.min(n) {
            for x in subsets_of_size(full_set(n), size) {
                if rng.gen_bool(0.6) {
                    f.set(x, BigInt::from(rng.gen_range(-20i64..=20))).unwrap();
                }
            }
        }
        f
    }

    fn random_family(rng: &mut ChaCha8Rng, n: usize) -> WeightedFamily {
        let card = rng.gen_range(0..=n.min(4));
        let mut fam = WeightedFamily::new(n, card);
        for x in subsets_of_size(full_set(n), card) {
            if rng.gen_bool(0.4) {
                fam.insert(x, BigUint::from(rng.gen_range(1u32..50)))
                    .unwrap();
            }
        }
        fam
    }

    #[test]
    fn zeta_of_empty_indicator_is_constant() {
        let mut f = SetFunction::new(4);
        f.set(0, BigInt::from(1)).unwrap();
        let z = zeta_naive(&f).unwrap();
        for s in submasks(0b1111) {
            assert_eq!(z.get(s), BigInt::from(1));
        }
    }

    #[test]
    fn zeta_of_singleton_indicator() {
        let mut f = SetFunction::new(4);
        f.set(0b0100, BigInt::from(1)).unwrap();
        let z = zeta_naive(&f).unwrap();
        for s in submasks(0b1111) {
            assert_eq!(z.get(s), BigInt::from((s >> 2 & 1) as i64));
        }
    }

    #[test]
    fn zeta_naive_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_function(&mut rng, 4, 4);
        let z = zeta_naive(&f).unwrap();
        for s in 0..16u64 {
            let mut expect = BigInt::zero();
            for x in 0..16u64 {
                if x & !s == 0 {
                    expect += f.get(x);
                }
            }
            assert_eq!(z.get(s), expect);
        }
    }

    #[test]
    fn naive_guard() {
        let f = SetFunction::new(25);
        assert_eq!(zeta_naive(&f), Err(LatticeError::UniverseTooLarge(25)));
    }

    #[test]
    fn trimmed_requires_bound() {
        assert_eq!(
            zeta_trimmed(&SetFunction::new(3), 1),
            Err(LatticeError::NoSupportBound)
        );
        let mut f = SetFunction::new(3).with_support_bound(1);
        assert!(f.set(0b11, BigInt::from(1)).is_err());
    }

    #[test]
    fn trimmed_on_singletons_sums_members() {
        let mut f = SetFunction::new(6).with_support_bound(1);
        for v in 0..6 {
            f.set(1 << v, BigInt::from(v as i64 * 3 + 1)).unwrap();
        }
        let z = zeta_trimmed(&f, 3).unwrap();
        assert_eq!(z.nonzero_count(), 20);
        for (q, val) in z.iter() {
            let expect: i64 = members(q).map(|v| v as i64 * 3 + 1).sum();
            assert_eq!(*val, BigInt::from(expect));
        }
    }

    #[test]
    fn trimmed_with_full_bound_equals_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 6;
        let f = random_function(&mut rng, n, n);
        let naive = zeta_naive(&f).unwrap();
        for target in 0..=n {
            let trimmed = zeta_trimmed(&f, target).unwrap();
            for q in subsets_of_size(full_set(n), target) {
                assert_eq!(trimmed.get(q), naive.get(q));
            }
        }
    }

    #[test]
    fn trimmed_matches_naive_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            let bound = rng.gen_range(0..=4.min(n));
            let ground = full_set(n) & rng.gen::<u64>() | 1;
            let mut f = SetFunction::new(n)
                .with_ground(ground)
                .with_support_bound(bound);
            for (x, v) in random_function(&mut rng, n, bound).iter() {
                if x & !ground == 0 {
                    f.set(x, v.clone()).unwrap();
                }
            }
            let target = rng.gen_range(bound..=n.min(bound + 2));
            let naive = zeta_naive(&f).unwrap();
            let trimmed = zeta_trimmed(&f, target).unwrap();
            for q in subsets_of_size(ground, target) {
                assert_eq!(trimmed.get(q), naive.get(q));
            }
        }
    }

    #[test]
    fn down_closure_examples() {
        let mut a = WeightedFamily::new(3, 2);
        a.insert(0b011, BigUint::from(1u32)).unwrap();
        assert_eq!(
            down_closure(&a).into_iter().collect::<Vec<_>>(),
            vec![0, 0b001, 0b010, 0b011]
        );
        assert!(down_closure(&WeightedFamily::new(3, 1)).is_empty());
        let mut b = WeightedFamily::new(3, 1);
        b.insert(0b001, BigUint::from(1u32)).unwrap();
        b.insert(0b010, BigUint::from(1u32)).unwrap();
        assert_eq!(
            down_closure(&b).into_iter().collect::<Vec<_>>(),
            vec![0, 0b001, 0b010]
        );
    }

    #[test]
    fn disjoint_sum_examples() {
        let one = BigUint::from(1u32);
        let mut a = WeightedFamily::new(3, 1);
        a.insert(0b001, one.clone()).unwrap();
        let mut b = WeightedFamily::new(3, 1);
        b.insert(0b010, one.clone()).unwrap();
        assert_eq!(disjoint_sum(&a, &b).unwrap(), one);

        let mut both = WeightedFamily::new(3, 1);
        both.insert(0b001, one.clone()).unwrap();
        both.insert(0b010, one.clone()).unwrap();
        assert_eq!(disjoint_sum(&both, &both).unwrap(), BigUint::from(2u32));

        assert_eq!(
            disjoint_sum(&a, &WeightedFamily::new(4, 1)),
            Err(LatticeError::UniverseMismatch(3, 4))
        );
        assert!(WeightedFamily::new(3, 1).insert(0b11, one).is_err());
    }

    #[test]
    fn disjoint_sum_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let n = rng.gen_range(1..=10);
            let a = random_family(&mut rng, n);
            let b = random_family(&mut rng, n);
            let fast = disjoint_sum(&a, &b).unwrap();
            assert_eq!(fast, naive_disjoint_sum(&a, &b));
            assert_eq!(fast, disjoint_sum(&b, &a).unwrap());
            let two = BigUint::from(2u32);
            assert_eq!(disjoint_sum(&a.scaled(&two), &b).unwrap(), fast * two);
        }
    }

    #[test]
    fn subsets_of_size_counts() {
        assert_eq!(subsets_of_size(0b11111, 2).len(), 10);
        assert_eq!(subsets_of_size(0b101, 0), vec![0]);
        assert!(subsets_of_size(0b1, 2).is_empty());
        assert_eq!(subsets_of_size(0b1010, 1), vec![0b0010, 0b1000]);
    }
}
