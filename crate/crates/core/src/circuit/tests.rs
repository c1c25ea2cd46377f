use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::decomp::nice_decomposition;
use crate::gen::{random_graph, random_pattern};
use crate::graph::named::*;

fn ones(f: &Graph, g: &Graph) -> BigUint {
    let ntd = nice_decomposition(f).unwrap();
    build_circuit(f, g, &ntd).unwrap().evaluate_at_ones()
}

/// Every map `V(F) → V(G)`, kept when it preserves edges; the monomial of
/// each kept map.
fn brute_monomials(f: &Graph, g: &Graph) -> Polynomial {
    let (k, n) = (f.order(), g.order());
    let mut out = Polynomial::new();
    let total = n.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let phi: Vec<usize> = (0..k)
            .map(|_| {
                let v = c % n;
                c /= n;
                v
            })
            .collect();
        if f.edges().all(|(u, w)| g.has_edge(phi[u], phi[w])) {
            let mut m = phi.clone();
            m.sort_unstable();
            *out.entry(m).or_default() += 1u32;
        }
    }
    out
}

fn random_instance(rng: &mut ChaCha8Rng, max_k: usize, max_n: usize) -> (Graph, Graph) {
    let k = rng.gen_range(1..=max_k);
    let n = rng.gen_range(1..=max_n);
    let p = [0.3, 0.5, 0.8][rng.gen_range(0..3)];
    (random_pattern(k, p, 2, rng), random_graph(n, p, rng))
}

#[test]
fn evaluation_examples() {
    assert_eq!(ones(&complete(2), &complete(3)), BigUint::from(6u32));
    assert_eq!(ones(&complete(3), &complete(2)), BigUint::zero());
    let f = complete(2);
    let ntd = nice_decomposition(&f).unwrap();
    let c = build_circuit(&f, &complete(2), &ntd).unwrap();
    let expect = Polynomial::from([(vec![0, 1], BigUint::from(2u32))]);
    assert_eq!(c.evaluate(&Symbolic), expect);
}

#[test]
fn restricted_examples() {
    let f = complete(2);
    let ntd = nice_decomposition(&f).unwrap();
    let g = complete(3);
    let a = RestrictionAnchor::from_pairs(2, &[(0, 0)]);
    assert_eq!(
        build_restricted_circuit(&f, &g, &ntd, &a)
            .unwrap()
            .evaluate_at_ones(),
        BigUint::from(2u32)
    );

    let p3 = path(3);
    let ntd3 = nice_decomposition(&p3).unwrap();
    let c4 = cycle(4);
    let total = RestrictionAnchor::from_pairs(3, &[(0, 0), (1, 1), (2, 2)]);
    assert_eq!(
        build_restricted_circuit(&p3, &c4, &ntd3, &total)
            .unwrap()
            .evaluate_at_ones(),
        BigUint::from(1u32)
    );
    let broken = RestrictionAnchor::from_pairs(3, &[(0, 0), (1, 2)]);
    assert!(!broken.preserves_edges(&p3, &c4));
    assert!(build_restricted_circuit(&p3, &c4, &ntd3, &broken)
        .unwrap()
        .evaluate_at_ones()
        .is_zero());

    let wrong = RestrictionAnchor::empty(5);
    assert!(matches!(
        build_restricted_circuit(&p3, &c4, &ntd3, &wrong),
        Err(CircuitError::AnchorMismatch { .. })
    ));
}

#[test]
fn invalid_decomposition_rejected() {
    let ntd = nice_decomposition(&path(3)).unwrap();
    assert!(matches!(
        build_circuit(&complete(3), &complete(3), &ntd),
        Err(CircuitError::Decomposition(_))
    ));
}

#[test]
fn symbolic_expansion_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..150 {
        let (f, g) = random_instance(&mut rng, 4, 5);
        let ntd = nice_decomposition(&f).unwrap();
        let expect = brute_monomials(&f, &g);
        for opts in [
            BuildOptions::default(),
            BuildOptions {
                mode: BuildMode::Formula,
                simplify_zeros: true,
            },
            BuildOptions {
                mode: BuildMode::Shared,
                simplify_zeros: false,
            },
        ] {
            let c = build_circuit_with(&f, &g, &ntd, None, opts).unwrap();
            assert_eq!(c.evaluate(&Symbolic), expect, "{f:?} -> {g:?}");
        }
        let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
        assert_eq!(sc.evaluate(&Symbolic).0, expect);
    }
}

#[test]
fn degree_is_homogeneous() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..150 {
        let (f, g) = random_instance(&mut rng, 5, 6);
        let ntd = nice_decomposition(&f).unwrap();
        let c = build_circuit(&f, &g, &ntd).unwrap();
        if let Some(range) = c.degree_range() {
            assert_eq!(range, (f.order(), f.order()));
        } else {
            assert!(c.evaluate_at_ones().is_zero());
        }
        let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
        // Streaming never simplifies, so only the nonzero case is pinned.
        if let Some(range) = c.degree_range() {
            assert_eq!(sc.evaluate(&DegreeRange).0, Some(range));
        }
    }
}

#[test]
fn gate_count_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..200 {
        let (f, g) = random_instance(&mut rng, 5, 8);
        let ntd = nice_decomposition(&f).unwrap();
        let c = build_circuit(&f, &g, &ntd).unwrap();
        let t = ntd.width() as u32;
        let n = g.order() as u128;
        let bound = 4 * ntd.len() as u128 * n.pow(t + 1) * (t as u128 + 1).pow(t + 1);
        assert!((c.len() as u128) <= bound.max(4), "{} > {bound}", c.len());
    }
}

#[test]
fn formula_mode_is_a_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..40 {
        let (f, g) = random_instance(&mut rng, 4, 5);
        let ntd = nice_decomposition(&f).unwrap();
        let opts = BuildOptions {
            mode: BuildMode::Formula,
            simplify_zeros: true,
        };
        let c = build_circuit_with(&f, &g, &ntd, None, opts).unwrap();
        assert!(c.is_formula());
        assert_eq!(c.evaluate_at_ones(), ones(&f, &g));
    }
}

#[test]
fn streaming_walk_reproduces_gate_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..80 {
        let (f, g) = random_instance(&mut rng, 4, 5);
        let ntd = nice_decomposition(&f).unwrap();
        let opts = BuildOptions {
            mode: BuildMode::Shared,
            simplify_zeros: false,
        };
        let c = build_circuit_with(&f, &g, &ntd, None, opts).unwrap();
        let explicit: BTreeSet<GateLabel> = c.labels().keys().cloned().collect();
        let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
        let walked: BTreeSet<GateLabel> = sc.walk_labels().into_iter().collect();
        assert_eq!(walked, explicit);
        assert!(c.labels().values().all(|id| id.is_some()));
    }
}

#[test]
fn streaming_counts_match_explicit() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..100 {
        let (f, g) = random_instance(&mut rng, 5, 7);
        let ntd = nice_decomposition(&f).unwrap();
        let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
        let (value, stats) = sc.count_at_ones();
        assert_eq!(value, ones(&f, &g));
        assert!(stats.peak_depth <= ntd.depth() + 2);
    }
}

#[test]
fn child_counts_by_node_kind() {
    let f = path(3);
    let g = star(3);
    let ntd = nice_decomposition(&f).unwrap();
    let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
    let ctx = Context::new(&f, &g, &ntd, None, g.all_vertices()).unwrap();
    let mut saw_three = false;
    for node in 0..ntd.len() {
        let bag = ctx.bag(node);
        for psi in ctx.assignments(&bag) {
            let label = NodeRef::Gate(GateLabel::new(node, bag.clone(), psi.clone()));
            let count = sc.child_count(&label).unwrap();
            match ntd.node(node).kind {
                NodeKind::Leaf => assert_eq!(count, 0),
                NodeKind::Join { .. } => assert_eq!(count, 2),
                NodeKind::Introduce { .. } => assert_eq!(count, 1),
                NodeKind::Forget { vertex, .. } => {
                    // Y by definition: v adjacent to the image of every bag
                    // neighbour of the forgotten vertex.
                    let y: Vec<usize> = (0..g.order())
                        .filter(|&v| {
                            bag.iter()
                                .zip(&psi)
                                .all(|(&w, &pw)| !f.has_edge(w, vertex) || g.has_edge(pw, v))
                        })
                        .collect();
                    assert_eq!(count, y.len());
                    saw_three |= count == 3;
                    for (i, &v) in y.iter().enumerate() {
                        let child = sc.child_at(&label, i).unwrap();
                        assert_eq!(child.multipliers, vec![v]);
                        assert_eq!(child.label.image_of(vertex), Some(v));
                        for (&w, &pw) in bag.iter().zip(&psi) {
                            assert_eq!(child.label.image_of(w), Some(pw));
                        }
                    }
                    assert!(matches!(
                        sc.child_at(&label, count),
                        Err(CircuitError::ChildOutOfRange { .. })
                    ));
                }
            }
        }
    }
    assert!(saw_three);
}

#[test]
fn canonical_child_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..30 {
        let (f, g) = random_instance(&mut rng, 4, 5);
        let ntd = nice_decomposition(&f).unwrap();
        let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
        let mut stack = vec![NodeRef::Root];
        while let Some(node) = stack.pop() {
            let kids: Vec<GateLabel> = sc.children(&node).unwrap().map(|c| c.label).collect();
            assert!(kids.windows(2).all(|w| w[0] < w[1]), "{kids:?}");
            stack.extend(kids.into_iter().map(NodeRef::Gate));
        }
    }
}

#[test]
fn invalid_labels_fail() {
    let f = path(3);
    let g = cycle(4);
    let ntd = nice_decomposition(&f).unwrap();
    let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
    let root = ntd.root();
    let bag: Vec<usize> = members(ntd.node(root).bag).collect();
    let bad = [
        GateLabel::new(ntd.len(), bag.clone(), vec![0; bag.len()]),
        GateLabel::new(root, vec![], vec![]),
        GateLabel::new(root, bag.clone(), vec![9; bag.len()]),
        GateLabel {
            node: root,
            bag: bag.clone(),
            image: vec![3; bag.len()],
            psi: vec![0; bag.len()],
        },
    ];
    for label in bad {
        let node = NodeRef::Gate(label);
        assert!(matches!(
            sc.child_count(&node),
            Err(CircuitError::InvalidLabel(_))
        ));
        assert!(matches!(
            sc.child_at(&node, 0),
            Err(CircuitError::InvalidLabel(_))
        ));
    }
    if bag.len() == 2 && f.has_edge(bag[0], bag[1]) {
        // Both ends of an edge on one host vertex is not a homomorphism.
        let node = NodeRef::Gate(GateLabel::new(root, bag.clone(), vec![0, 0]));
        assert!(sc.child_count(&node).is_err());
    }
}

#[test]
fn root_order_and_count() {
    let f = complete(2);
    let g = path(3);
    let ntd = nice_decomposition(&f).unwrap();
    let sc = StreamingCircuit::new(&f, &g, &ntd).unwrap();
    let kids: Vec<Child> = sc.children(&NodeRef::Root).unwrap().collect();
    assert_eq!(kids.len(), sc.child_count(&NodeRef::Root).unwrap());
    let images: Vec<Vec<usize>> = kids.iter().map(|c| c.label.image.clone()).collect();
    assert!(images.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn empty_pattern() {
    let f = Graph::empty(0).unwrap();
    let g = complete(3);
    assert_eq!(ones(&f, &g), BigUint::from(1u32));
    let ntd = nice_decomposition(&f).unwrap();
    assert_eq!(
        StreamingCircuit::new(&f, &g, &ntd)
            .unwrap()
            .count_at_ones()
            .0,
        BigUint::from(1u32)
    );
}

#[test]
fn single_vertex_pattern() {
    let f = Graph::empty(1).unwrap();
    for n in 0..5 {
        let g = random_graph(n, 0.5, &mut ChaCha8Rng::seed_from_u64(n as u64));
        assert_eq!(ones(&f, &g), BigUint::from(n));
    }
}

#[test]
fn builder_and_dump() {
    let mut b = CircuitBuilder::new(2);
    let x = b.var(0);
    let y = b.var(1);
    let one = b.one();
    let p = b.product(x, y);
    let s = b.sum(vec![p, one]);
    let c = b.finish(s).unwrap();
    assert_eq!(
        c.dump(),
        "g 0 x 1\ng 1 x 2\ng 2 one\ng 3 prod 0 1\ng 4 sum 3 2\nroot 4\n"
    );
    assert_eq!(c.degree_range(), Some((0, 2)));
    assert_eq!(c.out_degrees(), vec![1, 1, 1, 1, 0]);

    let mut b = CircuitBuilder::new(1);
    let x = b.var(0);
    b.sum(vec![x, 5]);
    assert!(matches!(
        b.finish(1),
        Err(CircuitError::BadWiring { gate: 1, child: 5 })
    ));
}
