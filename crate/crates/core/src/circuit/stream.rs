//! Label-level access to the homomorphism formula: a gate's children are
//! recomputed from its label on demand, so the formula is never stored.
//!
//! Children come in the canonical order (lexicographic on the child labels).
//! For forget gates that is ascending order of the new image `v`; for the
//! root it is by sorted image multiset, then by `ψ`.

use num_bigint::BigUint;

use super::{
    with_inserted, AllOnes, CircuitError, Context, GateLabel, RestrictionAnchor, Semiring,
};
use crate::decomp::{NiceTreeDecomposition, NodeKind};
use crate::graph::{members, Graph, VertexSet};

/// A gate of the implicit formula: the root aggregation or a labelled gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    Root,
    Gate(GateLabel),
}

/// How a gate combines its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// The constant one; no children.
    One,
    Sum,
    Product,
}

/// The `i`-th child of a gate together with the host variables its value is
/// multiplied by before being combined (`x_v` under a forget gate, the
/// image product under the root, nothing elsewhere).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Child {
    pub label: GateLabel,
    pub multipliers: Vec<usize>,
}

/// Resource counters of one depth-first evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamStats {
    /// Gates entered, counting repeats.
    pub gate_visits: u64,
    /// Longest stack of open gates.
    pub peak_depth: usize,
}

/// Homomorphisms `ψ` of the root bag in canonical order, with `O(|bag|)`
/// state: sorted image multisets in lexicographic order (combinations with
/// repetition), each expanded into its distinct arrangements.
pub(crate) struct RootAssignments<'c, 'a> {
    ctx: &'c Context<'a>,
    bag: Vec<usize>,
    hosts: Vec<usize>,
    multiset: Vec<usize>,
    current: Vec<usize>,
    state: RootState,
}

#[derive(PartialEq, Eq)]
enum RootState {
    Start,
    Running,
    Done,
}

impl<'c, 'a> RootAssignments<'c, 'a> {
    pub fn new(ctx: &'c Context<'a>) -> Self {
        RootAssignments {
            ctx,
            bag: ctx.bag(ctx.ntd.root()),
            hosts: members(ctx.allowed).collect(),
            multiset: Vec::new(),
            current: Vec::new(),
            state: RootState::Start,
        }
    }

    fn advance_raw(&mut self) -> Option<Vec<usize>> {
        let m = self.bag.len();
        match self.state {
            RootState::Done => return None,
            RootState::Start => {
                if m > 0 && self.hosts.is_empty() {
                    self.state = RootState::Done;
                    return None;
                }
                self.multiset = vec![0; m];
                self.state = RootState::Running;
            }
            RootState::Running => {
                if next_permutation(&mut self.current) {
                    return Some(self.current.clone());
                }
                let top = self.hosts.len() - 1;
                let Some(i) = (0..m).rev().find(|&i| self.multiset[i] < top) else {
                    self.state = RootState::Done;
                    return None;
                };
                let next = self.multiset[i] + 1;
                self.multiset[i..].iter_mut().for_each(|x| *x = next);
            }
        }
        self.current = self.multiset.iter().map(|&i| self.hosts[i]).collect();
        if m == 0 {
            // The single empty assignment.
            self.state = RootState::Done;
        }
        Some(self.current.clone())
    }
}

impl Iterator for RootAssignments<'_, '_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        loop {
            let psi = self.advance_raw()?;
            if self.ctx.admissible(&self.bag, &psi) {
                return Some(psi);
            }
        }
    }
}

/// Next lexicographic arrangement of a multiset; false after the last one.
fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let Some(i) = (0..a.len() - 1).rev().find(|&i| a[i] < a[i + 1]) else {
        return false;
    };
    let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// Lazily enumerated children of one gate.
enum Cursor<'c, 'a> {
    Listed(std::vec::IntoIter<Child>),
    Forget {
        child: usize,
        child_bag: Vec<usize>,
        pos: usize,
        psi: Vec<usize>,
        choices: VertexSet,
    },
    Root {
        node: usize,
        bag: Vec<usize>,
        inner: RootAssignments<'c, 'a>,
    },
}

impl Cursor<'_, '_> {
    fn next(&mut self) -> Option<Child> {
        match self {
            Cursor::Listed(it) => it.next(),
            Cursor::Forget {
                child,
                child_bag,
                pos,
                psi,
                choices,
            } => {
                if *choices == 0 {
                    return None;
                }
                let v = choices.trailing_zeros() as usize;
                *choices &= *choices - 1;
                Some(Child {
                    label: GateLabel::new(*child, child_bag.clone(), with_inserted(psi, *pos, v)),
                    multipliers: vec![v],
                })
            }
            Cursor::Root { node, bag, inner } => inner.next().map(|psi| Child {
                label: GateLabel::new(*node, bag.clone(), psi.clone()),
                multipliers: psi,
            }),
        }
    }
}

/// The homomorphism formula of `(F, G)` accessed through gate labels only.
pub struct StreamingCircuit<'a> {
    ctx: Context<'a>,
}

impl<'a> StreamingCircuit<'a> {
    pub fn new(
        pattern: &'a Graph,
        host: &'a Graph,
        ntd: &'a NiceTreeDecomposition,
    ) -> Result<Self, CircuitError> {
        Self::with_restrictions(pattern, host, ntd, None, host.all_vertices())
    }

    pub fn restricted(
        pattern: &'a Graph,
        host: &'a Graph,
        ntd: &'a NiceTreeDecomposition,
        anchor: &'a RestrictionAnchor,
    ) -> Result<Self, CircuitError> {
        Self::with_restrictions(pattern, host, ntd, Some(anchor), host.all_vertices())
    }

    /// Restricts images to `allowed`, which is the same as working over the
    /// induced host `G[allowed]` without relabelling it.
    pub fn with_restrictions(
        pattern: &'a Graph,
        host: &'a Graph,
        ntd: &'a NiceTreeDecomposition,
        anchor: Option<&'a RestrictionAnchor>,
        allowed: VertexSet,
    ) -> Result<Self, CircuitError> {
        Ok(StreamingCircuit {
            ctx: Context::new(pattern, host, ntd, anchor, allowed)?,
        })
    }

    pub fn combine(&self, node: &NodeRef) -> Result<Combine, CircuitError> {
        match node {
            NodeRef::Root => Ok(Combine::Sum),
            NodeRef::Gate(label) => {
                self.ctx.check_label(label)?;
                Ok(match self.ctx.ntd.node(label.node).kind {
                    NodeKind::Leaf => Combine::One,
                    NodeKind::Join { .. } => Combine::Product,
                    NodeKind::Introduce { .. } | NodeKind::Forget { .. } => Combine::Sum,
                })
            }
        }
    }

    fn cursor(&self, node: &NodeRef) -> Result<Cursor<'_, 'a>, CircuitError> {
        let label = match node {
            NodeRef::Root => {
                let root = self.ctx.ntd.root();
                return Ok(Cursor::Root {
                    node: root,
                    bag: self.ctx.bag(root),
                    inner: RootAssignments::new(&self.ctx),
                });
            }
            NodeRef::Gate(label) => label,
        };
        self.ctx.check_label(label)?;
        let psi = &label.psi;
        let listed = |children: Vec<Child>| Ok(Cursor::Listed(children.into_iter()));
        match self.ctx.ntd.node(label.node).kind {
            NodeKind::Leaf => listed(Vec::new()),
            NodeKind::Join { left, right } => listed(vec![
                Child {
                    label: GateLabel::new(left, label.bag.clone(), psi.clone()),
                    multipliers: Vec::new(),
                },
                Child {
                    label: GateLabel::new(right, label.bag.clone(), psi.clone()),
                    multipliers: Vec::new(),
                },
            ]),
            NodeKind::Introduce { child, vertex } => {
                let pos = label.bag.iter().position(|&w| w == vertex).unwrap();
                let mut bag = label.bag.clone();
                let mut restricted = psi.clone();
                bag.remove(pos);
                restricted.remove(pos);
                listed(vec![Child {
                    label: GateLabel::new(child, bag, restricted),
                    multipliers: Vec::new(),
                }])
            }
            NodeKind::Forget { child, vertex } => {
                let child_bag = self.ctx.bag(child);
                let pos = child_bag.iter().position(|&w| w == vertex).unwrap();
                Ok(Cursor::Forget {
                    child,
                    child_bag,
                    pos,
                    psi: psi.clone(),
                    choices: self.ctx.forget_choices(&label.bag, psi, vertex),
                })
            }
        }
    }

    /// Number of children of a gate. For the root this walks all root
    /// assignments once.
    pub fn child_count(&self, node: &NodeRef) -> Result<usize, CircuitError> {
        if let NodeRef::Gate(label) = node {
            self.ctx.check_label(label)?;
            match self.ctx.ntd.node(label.node).kind {
                NodeKind::Leaf => return Ok(0),
                NodeKind::Introduce { .. } => return Ok(1),
                NodeKind::Join { .. } => return Ok(2),
                NodeKind::Forget { vertex, .. } => {
                    let y = self.ctx.forget_choices(&label.bag, &label.psi, vertex);
                    return Ok(y.count_ones() as usize);
                }
            }
        }
        let mut cursor = self.cursor(node)?;
        let mut count = 0;
        while cursor.next().is_some() {
            count += 1;
        }
        Ok(count)
    }

    /// The `index`-th child in canonical order.
    pub fn child_at(&self, node: &NodeRef, index: usize) -> Result<Child, CircuitError> {
        let mut cursor = self.cursor(node)?;
        let mut seen = 0;
        while let Some(child) = cursor.next() {
            if seen == index {
                return Ok(child);
            }
            seen += 1;
        }
        Err(CircuitError::ChildOutOfRange { index, count: seen })
    }

    /// All children in canonical order, produced lazily.
    pub fn children(
        &self,
        node: &NodeRef,
    ) -> Result<impl Iterator<Item = Child> + '_, CircuitError> {
        let mut cursor = self.cursor(node)?;
        Ok(std::iter::from_fn(move || cursor.next()))
    }

    /// Depth-first evaluation with an explicit stack. Only the open path of
    /// gates and one partial value per open gate are held at any time.
    pub fn evaluate<S: Semiring>(&self, sr: &S) -> (S::Elem, StreamStats) {
        struct Frame<'c, 'a, E> {
            combine: Combine,
            cursor: Cursor<'c, 'a>,
            acc: E,
            pending: Vec<usize>,
        }
        let open = |node: NodeRef, combine: Combine| {
            let cursor = self
                .cursor(&node)
                .expect("labels generated by the walk are valid");
            let acc = match combine {
                Combine::Product | Combine::One => sr.one(),
                Combine::Sum => sr.zero(),
            };
            Frame {
                combine,
                cursor,
                acc,
                pending: Vec::new(),
            }
        };
        let mut stats = StreamStats {
            gate_visits: 1,
            peak_depth: 1,
        };
        let mut stack = vec![open(NodeRef::Root, Combine::Sum)];
        loop {
            let top = stack.last_mut().unwrap();
            if let Some(child) = top.cursor.next() {
                top.pending = child.multipliers;
                let combine = match self.ctx.ntd.node(child.label.node).kind {
                    NodeKind::Leaf => Combine::One,
                    NodeKind::Join { .. } => Combine::Product,
                    _ => Combine::Sum,
                };
                stack.push(open(NodeRef::Gate(child.label), combine));
                stats.gate_visits += 1;
                stats.peak_depth = stats.peak_depth.max(stack.len());
                continue;
            }
            let done = stack.pop().unwrap();
            let Some(parent) = stack.last_mut() else {
                return (done.acc, stats);
            };
            let mut value = done.acc;
            for &v in &parent.pending {
                value = sr.mul(&value, &sr.var(v));
            }
            parent.acc = match parent.combine {
                Combine::Sum => sr.add(&parent.acc, &value),
                Combine::Product | Combine::One => sr.mul(&parent.acc, &value),
            };
        }
    }

    /// `P(1, .., 1) = hom(F, G)` (restricted to the anchor and allowed set).
    pub fn count_at_ones(&self) -> (BigUint, StreamStats) {
        self.evaluate(&AllOnes)
    }

    /// Every label reached from the root, in walk order (with repeats).
    pub fn walk_labels(&self) -> Vec<GateLabel> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeRef> = vec![NodeRef::Root];
        while let Some(node) = stack.pop() {
            let kids: Vec<Child> = self.children(&node).expect("valid walk").collect();
            for child in kids.into_iter().rev() {
                out.push(child.label.clone());
                stack.push(NodeRef::Gate(child.label));
            }
        }
        out
    }
}
