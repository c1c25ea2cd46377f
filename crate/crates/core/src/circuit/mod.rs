//! The homomorphism polynomial `P_G = Σ_{φ ∈ HOM(F,G)} Π_u x_{φ(u)}` as an
//! arithmetic circuit over a nice tree decomposition of the pattern.
//!
//! Every internal gate is named by a [`GateLabel`] `⟨τ, U_τ, S, ψ⟩`:
//! a decomposition node, its bag, a multiset of host vertices and a
//! homomorphism `ψ : F[U_τ] → G` whose image multiset is `S`. The gate
//! computes the sum over extensions of `ψ` to the vertices forgotten below
//! `τ` of the product of their image variables:
//!
//! * leaf: the constant one;
//! * join: the product of the two children with the same `ψ`;
//! * introduce `u`: the child with `ψ` restricted to the smaller bag;
//! * forget `u`: `Σ_{v ∈ Y} f(child, ψ[u ↦ v]) · x_v` where `Y` is the set of
//!   host vertices adjacent to the images of every bag neighbour of `u`
//!   (an empty sum when `Y` is empty).
//!
//! The root sums, over all homomorphisms `ψ` of the root bag, the root gate
//! times `Π_{u ∈ U_r} x_{ψ(u)}`.
//!
//! [`build_circuit`] materialises this as a [`Circuit`]; [`stream`] walks the
//! same formula label by label without storing it.

pub mod stream;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::decomp::{DecompError, NiceTreeDecomposition, NodeKind};
use crate::graph::{members, Graph, VertexMap, VertexSet};

pub use stream::{Child, Combine, NodeRef, StreamStats, StreamingCircuit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error(transparent)]
    Decomposition(#[from] DecompError),
    #[error("invalid gate label: {0}")]
    InvalidLabel(String),
    #[error("child index {index} out of range for a gate with {count} children")]
    ChildOutOfRange { index: usize, count: usize },
    #[error("anchor is defined on {anchor} pattern vertices but the pattern has {pattern}")]
    AnchorMismatch { anchor: usize, pattern: usize },
    #[error("gate {gate} refers to child {child} that is not built before it")]
    BadWiring { gate: usize, child: usize },
}

/// Fixed images `g : S → V(G)` for an anchor set `S ⊆ V(F)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RestrictionAnchor {
    map: VertexMap,
}

impl RestrictionAnchor {
    pub fn new(map: VertexMap) -> Self {
        RestrictionAnchor { map }
    }

    /// No restriction at all.
    pub fn empty(pattern_order: usize) -> Self {
        RestrictionAnchor {
            map: VertexMap::new(pattern_order),
        }
    }

    pub fn from_pairs(pattern_order: usize, pairs: &[(usize, usize)]) -> Self {
        RestrictionAnchor::new(VertexMap::from_pairs(pattern_order, pairs))
    }

    pub fn anchor_set(&self) -> VertexSet {
        self.map.domain()
    }

    pub fn get(&self, u: usize) -> Option<usize> {
        self.map.get(u)
    }

    pub fn map(&self) -> &VertexMap {
        &self.map
    }

    /// Whether `g` maps every pattern edge inside `S` to a host edge. An
    /// inconsistent anchor simply yields the zero polynomial.
    pub fn preserves_edges(&self, pattern: &Graph, host: &Graph) -> bool {
        let s = self.anchor_set();
        members(s).all(|u| {
            members(pattern.neighbors(u) & s).all(|w| {
                let (a, b) = (self.map.get(u).unwrap(), self.map.get(w).unwrap());
                a < host.order() && b < host.order() && host.has_edge(a, b)
            })
        })
    }
}

/// `⟨τ, U_τ, S, ψ⟩`. Field order gives the canonical ordering: node id, then
/// the sorted bag, then the sorted image multiset, then `ψ` listed along the
/// sorted bag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateLabel {
    pub node: usize,
    pub bag: Vec<usize>,
    pub image: Vec<usize>,
    pub psi: Vec<usize>,
}

impl GateLabel {
    pub fn new(node: usize, bag: Vec<usize>, psi: Vec<usize>) -> Self {
        let mut image = psi.clone();
        image.sort_unstable();
        GateLabel {
            node,
            bag,
            image,
            psi,
        }
    }

    pub fn image_of(&self, u: usize) -> Option<usize> {
        self.bag.iter().position(|&w| w == u).map(|i| self.psi[i])
    }
}

/// Pattern, host, decomposition and restrictions shared by the explicit
/// builder and the streaming walker.
#[derive(Clone, Copy)]
pub(crate) struct Context<'a> {
    pub pattern: &'a Graph,
    pub host: &'a Graph,
    pub ntd: &'a NiceTreeDecomposition,
    pub anchor: Option<&'a RestrictionAnchor>,
    /// Host vertices the homomorphisms may use.
    pub allowed: VertexSet,
}

impl<'a> Context<'a> {
    pub fn new(
        pattern: &'a Graph,
        host: &'a Graph,
        ntd: &'a NiceTreeDecomposition,
        anchor: Option<&'a RestrictionAnchor>,
        allowed: VertexSet,
    ) -> Result<Self, CircuitError> {
        ntd.validate(pattern)?;
        if let Some(a) = anchor {
            if a.map.pattern_order() != pattern.order() {
                return Err(CircuitError::AnchorMismatch {
                    anchor: a.map.pattern_order(),
                    pattern: pattern.order(),
                });
            }
        }
        Ok(Context {
            pattern,
            host,
            ntd,
            anchor,
            allowed: allowed & host.all_vertices(),
        })
    }

    pub fn bag(&self, node: usize) -> Vec<usize> {
        members(self.ntd.node(node).bag).collect()
    }

    /// Host vertices `u` may take.
    pub fn candidates(&self, u: usize) -> VertexSet {
        match self.anchor.and_then(|a| a.get(u)) {
            Some(v) if v < 64 => self.allowed & 1 << v,
            Some(_) => 0,
            None => self.allowed,
        }
    }

    /// Whether `u ↦ v` is compatible with `ψ` on the rest of the bag.
    pub fn extends(&self, bag: &[usize], psi: &[usize], u: usize, v: usize) -> bool {
        let nbrs = self.pattern.neighbors(u);
        bag.iter()
            .zip(psi)
            .all(|(&w, &pw)| w == u || nbrs >> w & 1 == 0 || self.host.has_edge(pw, v))
    }

    /// `Y` of a forget node: candidates for `u` compatible with `ψ`.
    pub fn forget_choices(&self, bag: &[usize], psi: &[usize], u: usize) -> VertexSet {
        members(self.candidates(u))
            .filter(|&v| self.extends(bag, psi, u, v))
            .fold(0, |m, v| m | 1 << v)
    }

    /// Whether `ψ` along `bag` is an admissible homomorphism of `F[bag]`.
    pub fn admissible(&self, bag: &[usize], psi: &[usize]) -> bool {
        bag.len() == psi.len()
            && bag.iter().zip(psi).enumerate().all(|(i, (&u, &v))| {
                self.candidates(u) >> v & 1 == 1 && self.extends(&bag[..i], &psi[..i], u, v)
            })
    }

    /// All admissible `ψ` on `bag`, extending one vertex at a time.
    pub fn assignments(&self, bag: &[usize]) -> Vec<Vec<usize>> {
        let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
        for (i, &u) in bag.iter().enumerate() {
            let mut next = Vec::new();
            for psi in &partial {
                for v in members(self.candidates(u)) {
                    if self.extends(&bag[..i], psi, u, v) {
                        let mut ext = psi.clone();
                        ext.push(v);
                        next.push(ext);
                    }
                }
            }
            partial = next;
        }
        partial
    }

    /// Step 1 of the child oracle: the label must name a real gate.
    pub fn check_label(&self, label: &GateLabel) -> Result<(), CircuitError> {
        let bad = |m: &str| Err(CircuitError::InvalidLabel(m.to_string()));
        if label.node >= self.ntd.len() {
            return bad("node out of range");
        }
        if label.bag != self.bag(label.node) {
            return bad("bag does not match the decomposition node");
        }
        let mut image = label.psi.clone();
        image.sort_unstable();
        if image != label.image {
            return bad("multiset is not the image of psi");
        }
        if label
            .psi
            .iter()
            .any(|&v| v >= 64 || self.allowed >> v & 1 == 0)
        {
            return bad("psi leaves the host");
        }
        if !self.admissible(&label.bag, &label.psi) {
            return bad("psi is not an admissible homomorphism of the bag");
        }
        Ok(())
    }
}

/// Insert `v` at position `pos` of `psi`.
pub(crate) fn with_inserted(psi: &[usize], pos: usize, v: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(psi.len() + 1);
    out.extend_from_slice(&psi[..pos]);
    out.push(v);
    out.extend_from_slice(&psi[pos..]);
    out
}

/// Algebra the circuit can be evaluated in.
pub trait Semiring {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn var(&self, v: usize) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// Evaluation at `x_v = 1` for every `v`; yields `hom(F, G)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllOnes;

impl Semiring for AllOnes {
    type Elem = BigUint;
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn var(&self, _: usize) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
}

/// Monomial as the sorted multiset of its variables.
pub type Monomial = Vec<usize>;
/// Sparse polynomial with natural-number coefficients.
pub type Polynomial = BTreeMap<Monomial, BigUint>;

/// Full symbolic expansion; only sensible for small instances.
#[derive(Debug, Clone, Copy, Default)]
pub struct Symbolic;

impl Semiring for Symbolic {
    type Elem = Polynomial;
    fn zero(&self) -> Polynomial {
        Polynomial::new()
    }
    fn one(&self) -> Polynomial {
        Polynomial::from([(Vec::new(), BigUint::one())])
    }
    fn var(&self, v: usize) -> Polynomial {
        Polynomial::from([(vec![v], BigUint::one())])
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let mut out = a.clone();
        for (m, c) in b {
            *out.entry(m.clone()).or_default() += c;
        }
        out
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let mut out = Polynomial::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let mut m = ma.clone();
                m.extend_from_slice(mb);
                m.sort_unstable();
                *out.entry(m).or_default() += ca * cb;
            }
        }
        out
    }
}

/// Smallest and largest formal degree of the monomials a gate can produce
/// (`None` for the structural zero).
#[derive(Debug, Clone, Copy, Default)]
pub struct DegreeRange;

impl Semiring for DegreeRange {
    type Elem = Option<(usize, usize)>;
    fn zero(&self) -> Self::Elem {
        None
    }
    fn one(&self) -> Self::Elem {
        Some((0, 0))
    }
    fn var(&self, _: usize) -> Self::Elem {
        Some((1, 1))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        match (a, b) {
            (None, x) | (x, None) => *x,
            (Some((a0, a1)), Some((b0, b1))) => Some(((*a0).min(*b0), (*a1).max(*b1))),
        }
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        match (a, b) {
            (Some((a0, a1)), Some((b0, b1))) => Some((a0 + b0, a1 + b1)),
            _ => None,
        }
    }
}

pub type GateId = usize;

/// Gate kinds; constants are only ever the one. An empty sum is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    One,
    Var(usize),
    Sum(Vec<GateId>),
    Product(GateId, GateId),
}

/// Explicit arithmetic circuit with `+` gates of any fan-in and `×` gates of
/// fan-in two. Gates are stored children-first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    root: GateId,
    num_vars: usize,
    labels: BTreeMap<GateLabel, Option<GateId>>,
}

impl Circuit {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn root(&self) -> GateId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Gate of every label reached during a shared-mode build (`None` for
    /// labels simplified away as zero). Empty for formulas and
    /// hand-built circuits.
    pub fn labels(&self) -> &BTreeMap<GateLabel, Option<GateId>> {
        &self.labels
    }

    /// Children lists of every gate.
    pub fn child_ids(&self, gate: GateId) -> Vec<GateId> {
        match &self.gates[gate] {
            Gate::One | Gate::Var(_) => Vec::new(),
            Gate::Sum(c) => c.clone(),
            Gate::Product(a, b) => vec![*a, *b],
        }
    }

    pub fn evaluate<S: Semiring>(&self, sr: &S) -> S::Elem {
        let mut values: Vec<S::Elem> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match gate {
                Gate::One => sr.one(),
                Gate::Var(v) => sr.var(*v),
                Gate::Sum(c) => c.iter().fold(sr.zero(), |acc, &g| sr.add(&acc, &values[g])),
                Gate::Product(a, b) => sr.mul(&values[*a], &values[*b]),
            };
            values.push(v);
        }
        values.swap_remove(self.root)
    }

    /// `P(1, .., 1)`.
    pub fn evaluate_at_ones(&self) -> BigUint {
        self.evaluate(&AllOnes)
    }

    /// Largest formal degree (`None` if the circuit is the structural zero).
    pub fn degree(&self) -> Option<usize> {
        self.evaluate(&DegreeRange).map(|(_, hi)| hi)
    }

    pub fn degree_range(&self) -> Option<(usize, usize)> {
        self.evaluate(&DegreeRange)
    }

    /// Number of gates reading each gate.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.gates.len()];
        for g in 0..self.gates.len() {
            for c in self.child_ids(g) {
                deg[c] += 1;
            }
        }
        deg
    }

    /// Whether every non-root gate feeds exactly one gate.
    pub fn is_formula(&self) -> bool {
        self.out_degrees()
            .iter()
            .enumerate()
            .all(|(g, &d)| if g == self.root { d == 0 } else { d == 1 })
    }

    /// Debug dump: `g <id> sum <children..>`, `g <id> prod <a> <b>`,
    /// `g <id> x <host vertex, 1-based>`, `g <id> one`, then `root <id>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::One => writeln!(out, "g {id} one"),
                Gate::Var(v) => writeln!(out, "g {id} x {}", v + 1),
                Gate::Sum(c) => {
                    write!(out, "g {id} sum").unwrap();
                    c.iter().for_each(|c| write!(out, " {c}").unwrap());
                    writeln!(out)
                }
                Gate::Product(a, b) => writeln!(out, "g {id} prod {a} {b}"),
            }
            .unwrap();
        }
        writeln!(out, "root {}", self.root).unwrap();
        out
    }
}

/// Hand assembly of small circuits.
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    num_vars: usize,
}

impl CircuitBuilder {
    pub fn new(num_vars: usize) -> Self {
        CircuitBuilder {
            gates: Vec::new(),
            num_vars,
        }
    }

    fn push(&mut self, gate: Gate) -> GateId {
        self.gates.push(gate);
        self.gates.len() - 1
    }

    pub fn one(&mut self) -> GateId {
        self.push(Gate::One)
    }

    pub fn var(&mut self, v: usize) -> GateId {
        self.num_vars = self.num_vars.max(v + 1);
        self.push(Gate::Var(v))
    }

    pub fn sum(&mut self, children: Vec<GateId>) -> GateId {
        self.push(Gate::Sum(children))
    }

    pub fn product(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Product(a, b))
    }

    pub fn finish(self, root: GateId) -> Result<Circuit, CircuitError> {
        for (gate, g) in self.gates.iter().enumerate() {
            let kids: Vec<GateId> = match g {
                Gate::Sum(c) => c.clone(),
                Gate::Product(a, b) => vec![*a, *b],
                _ => Vec::new(),
            };
            if let Some(&child) = kids.iter().find(|&&c| c >= gate) {
                return Err(CircuitError::BadWiring { gate, child });
            }
        }
        if root >= self.gates.len() {
            return Err(CircuitError::BadWiring {
                gate: root,
                child: root,
            });
        }
        Ok(Circuit {
            gates: self.gates,
            root,
            num_vars: self.num_vars,
            labels: BTreeMap::new(),
        })
    }
}

/// Whether labels are shared (a circuit) or every use gets its own copy
/// (a formula).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BuildMode {
    #[default]
    Shared,
    Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub mode: BuildMode,
    /// Drop zero subcircuits (empty forget sums and everything they poison).
    pub simplify_zeros: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            mode: BuildMode::Shared,
            simplify_zeros: true,
        }
    }
}

struct Builder<'a> {
    ctx: Context<'a>,
    opts: BuildOptions,
    gates: Vec<Gate>,
    memo: HashMap<GateLabel, Option<GateId>>,
    vars: Vec<Option<GateId>>,
    one: Option<GateId>,
}

impl Builder<'_> {
    fn push(&mut self, gate: Gate) -> GateId {
        self.gates.push(gate);
        self.gates.len() - 1
    }

    fn shared(&self) -> bool {
        self.opts.mode == BuildMode::Shared
    }

    fn var(&mut self, v: usize) -> GateId {
        if self.shared() {
            if let Some(id) = self.vars[v] {
                return id;
            }
        }
        let id = self.push(Gate::Var(v));
        self.vars[v] = Some(id);
        id
    }

    fn one(&mut self) -> GateId {
        if self.shared() {
            if let Some(id) = self.one {
                return id;
            }
        }
        let id = self.push(Gate::One);
        self.one = Some(id);
        id
    }

    fn product(&mut self, a: Option<GateId>, b: Option<GateId>) -> Option<GateId> {
        Some(self.push(Gate::Product(a?, b?)))
    }

    fn sum(&mut self, terms: Vec<Option<GateId>>) -> Option<GateId> {
        let kids: Vec<GateId> = terms.into_iter().flatten().collect();
        if kids.is_empty() && self.opts.simplify_zeros {
            None
        } else {
            Some(self.push(Gate::Sum(kids)))
        }
    }

    fn label_gate(&mut self, node: usize, psi: Vec<usize>) -> Option<GateId> {
        let bag = self.ctx.bag(node);
        let label = GateLabel::new(node, bag.clone(), psi);
        if self.shared() {
            if let Some(&id) = self.memo.get(&label) {
                return id;
            }
        }
        let psi = &label.psi;
        let id = match self.ctx.ntd.node(node).kind {
            NodeKind::Leaf => Some(self.one()),
            NodeKind::Introduce { child, vertex } => {
                let pos = bag.iter().position(|&w| w == vertex).unwrap();
                let mut restricted = psi.clone();
                restricted.remove(pos);
                self.label_gate(child, restricted)
            }
            NodeKind::Join { left, right } => {
                let a = self.label_gate(left, psi.clone());
                let b = self.label_gate(right, psi.clone());
                self.product(a, b)
            }
            NodeKind::Forget { child, vertex } => {
                let child_bag = self.ctx.bag(child);
                let pos = child_bag.iter().position(|&w| w == vertex).unwrap();
                let choices = self.ctx.forget_choices(&bag, psi, vertex);
                let mut terms = Vec::new();
                for v in members(choices) {
                    let sub = self.label_gate(child, with_inserted(psi, pos, v));
                    let x = self.var(v);
                    terms.push(self.product(sub, Some(x)));
                }
                self.sum(terms)
            }
        };
        if self.shared() {
            self.memo.insert(label, id);
        }
        id
    }
}

/// Builds `P_G` for pattern `F` over host `G`.
pub fn build_circuit(
    pattern: &Graph,
    host: &Graph,
    ntd: &NiceTreeDecomposition,
) -> Result<Circuit, CircuitError> {
    build_circuit_with(pattern, host, ntd, None, BuildOptions::default())
}

/// Builds `P_G^g`: only homomorphisms that agree with the anchor on its set.
pub fn build_restricted_circuit(
    pattern: &Graph,
    host: &Graph,
    ntd: &NiceTreeDecomposition,
    anchor: &RestrictionAnchor,
) -> Result<Circuit, CircuitError> {
    build_circuit_with(pattern, host, ntd, Some(anchor), BuildOptions::default())
}

pub fn build_circuit_with(
    pattern: &Graph,
    host: &Graph,
    ntd: &NiceTreeDecomposition,
    anchor: Option<&RestrictionAnchor>,
    opts: BuildOptions,
) -> Result<Circuit, CircuitError> {
    let ctx = Context::new(pattern, host, ntd, anchor, host.all_vertices())?;
    let mut b = Builder {
        ctx,
        opts,
        gates: Vec::new(),
        memo: HashMap::new(),
        vars: vec![None; host.order()],
        one: None,
    };
    let root_node = ntd.root();
    let mut terms = Vec::new();
    for psi in stream::RootAssignments::new(&ctx) {
        let mut acc = b.label_gate(root_node, psi.clone());
        for &v in &psi {
            let x = b.var(v);
            acc = b.product(acc, Some(x));
        }
        terms.push(acc);
    }
    let root = match b.sum(terms) {
        Some(id) => id,
        None => b.push(Gate::Sum(Vec::new())),
    };
    let labels = if b.shared() {
        b.memo.into_iter().collect()
    } else {
        BTreeMap::new()
    };
    Ok(prune(Circuit {
        gates: b.gates,
        root,
        num_vars: host.order(),
        labels,
    }))
}

/// Drops gates the root does not read (left behind when a product partner
/// simplified to zero) and renumbers the rest.
fn prune(c: Circuit) -> Circuit {
    let mut reachable = vec![false; c.gates.len()];
    reachable[c.root] = true;
    for g in (0..c.gates.len()).rev() {
        if reachable[g] {
            for child in c.child_ids(g) {
                reachable[child] = true;
            }
        }
    }
    let mut new_id = vec![usize::MAX; c.gates.len()];
    let mut gates = Vec::new();
    for (g, gate) in c.gates.into_iter().enumerate() {
        if !reachable[g] {
            continue;
        }
        new_id[g] = gates.len();
        gates.push(match gate {
            Gate::Sum(kids) => Gate::Sum(kids.into_iter().map(|k| new_id[k]).collect()),
            Gate::Product(a, b) => Gate::Product(new_id[a], new_id[b]),
            other => other,
        });
    }
    let labels = c
        .labels
        .into_iter()
        .map(|(label, id)| (label, id.filter(|&g| reachable[g]).map(|g| new_id[g])))
        .collect();
    Circuit {
        gates,
        root: new_id[c.root],
        num_vars: c.num_vars,
        labels,
    }
}

#[cfg(test)]
mod tests;
