//! Randomized detection of a multilinear monomial in a circuit, and the
//! resulting subgraph-existence test.
//!
//! Each trial substitutes `x_v ↦ r_v (e_{w_0} + e_{w_v})` in the group
//! algebra `GF(2^ℓ)[Z_2^m]` with uniform group elements `w_0, w_v`, and
//! additionally multiplies every input of every sum gate by a uniform nonzero
//! field scalar. A monomial with a repeated variable contains a factor
//! `(e_a + e_b)^2 = 0`, so non-multilinear terms always vanish and a nonzero
//! result proves a multilinear term exists. The edge scalars keep even
//! integer coefficients from cancelling in characteristic two.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{build_circuit, Circuit, CircuitError, Gate};
use crate::decomp::{nice_decomposition_with_limit, DecompError, DEFAULT_PATTERN_LIMIT};
use crate::gf::{AlgebraError, Field, GroupAlgebraElement};
use crate::graph::Graph;
use crate::par::{self, Execution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectError {
    #[error("circuit has degree {degree}, above the bound {bound}")]
    DegreeExceeded { degree: usize, bound: usize },
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Decomposition(#[from] DecompError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionConfig {
    pub trials: u32,
    /// `ℓ`; `None` picks `⌈log₂ k⌉ + 3`.
    pub field_exp: Option<u32>,
    /// Group dimension is `k + extra_dims`.
    pub extra_dims: u32,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            trials: 8,
            field_exp: None,
            extra_dims: 2,
            seed: 0,
            execution: Execution::Parallel,
        }
    }
}

impl DetectionConfig {
    pub fn with_seed(seed: u64) -> Self {
        DetectionConfig {
            seed,
            ..Self::default()
        }
    }

    /// Field exponent actually used for degree bound `k`.
    pub fn field_exp_for(&self, k: usize) -> u32 {
        self.field_exp
            .unwrap_or_else(|| (k.max(1) as u64).next_power_of_two().trailing_zeros() + 3)
    }
}

/// Answer plus per-trial statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub found: bool,
    pub trials: u32,
    /// Trials whose evaluation was nonzero.
    pub successes: u32,
    pub group_dims: u32,
    pub field_exp: u32,
    pub circuit_gates: usize,
}

impl Detection {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Whether `circuit`, of degree at most `k`, has a multilinear monomial in
/// its expansion. Never reports one that is absent.
pub fn detect_multilinear(
    circuit: &Circuit,
    k: usize,
    cfg: &DetectionConfig,
) -> Result<Detection, DetectError> {
    if cfg.trials == 0 {
        return Err(DetectError::NoTrials);
    }
    let degree = circuit.degree();
    if let Some(d) = degree.filter(|&d| d > k) {
        return Err(DetectError::DegreeExceeded {
            degree: d,
            bound: k,
        });
    }
    let dims = k as u32 + cfg.extra_dims;
    let field_exp = cfg.field_exp_for(k);
    // Validate the parameters once, outside the trial loop.
    GroupAlgebraElement::zero(dims, field_exp)?;
    let trials: Vec<u32> = (0..cfg.trials).collect();
    let outcomes = par::map(cfg.execution, &trials, |&t| {
        degree.is_some() && run_trial(circuit, dims, field_exp, cfg.seed, t)
    });
    let successes = outcomes.iter().filter(|&&ok| ok).count() as u32;
    Ok(Detection {
        found: successes > 0,
        trials: cfg.trials,
        successes,
        group_dims: dims,
        field_exp,
        circuit_gates: circuit.len(),
    })
}

fn nonzero_scalar(rng: &mut ChaCha8Rng, field: &Field) -> u32 {
    rng.gen_range(1..field.size())
}

fn run_trial(circuit: &Circuit, dims: u32, field_exp: u32, seed: u64, trial: u32) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let field = Field::get(field_exp).expect("checked by caller");
    let group = |rng: &mut ChaCha8Rng| rng.gen_range(0..1u32 << dims);
    let w0 = group(&mut rng);
    let vars: Vec<GroupAlgebraElement> = (0..circuit.num_vars())
        .map(|_| {
            let wv = group(&mut rng);
            let r = nonzero_scalar(&mut rng, field);
            let mut e = GroupAlgebraElement::basis(dims, field_exp, w0, r).unwrap();
            e.add_assign(&GroupAlgebraElement::basis(dims, field_exp, wv, r).unwrap());
            e
        })
        .collect();

    let gates = circuit.gates();
    let mut last_use = vec![0; gates.len()];
    for g in 0..gates.len() {
        for c in circuit.child_ids(g) {
            last_use[c] = g;
        }
    }
    let mut values: Vec<Option<GroupAlgebraElement>> = vec![None; gates.len()];
    for (g, gate) in gates.iter().enumerate() {
        let value = match gate {
            Gate::One => GroupAlgebraElement::one(dims, field_exp).unwrap(),
            Gate::Var(v) => vars[*v].clone(),
            Gate::Sum(children) => {
                let mut acc = GroupAlgebraElement::zero(dims, field_exp).unwrap();
                for &c in children {
                    let s = nonzero_scalar(&mut rng, field);
                    acc.add_assign(&values[c].as_ref().unwrap().scale(s));
                }
                acc
            }
            Gate::Product(a, b) => values[*a]
                .as_ref()
                .unwrap()
                .mul(values[*b].as_ref().unwrap())
                .unwrap(),
        };
        values[g] = Some(value);
        for c in circuit.child_ids(g) {
            if last_use[c] == g && c != circuit.root() {
                values[c] = None;
            }
        }
    }
    !values[circuit.root()].as_ref().unwrap().is_zero()
}

/// Decides (with one-sided error) whether `host` contains a subgraph
/// isomorphic to `pattern`.
pub fn find_subgraph(
    pattern: &Graph,
    host: &Graph,
    cfg: &DetectionConfig,
) -> Result<Detection, DetectError> {
    find_subgraph_with_limit(pattern, host, cfg, DEFAULT_PATTERN_LIMIT)
}

pub fn find_subgraph_with_limit(
    pattern: &Graph,
    host: &Graph,
    cfg: &DetectionConfig,
    limit: usize,
) -> Result<Detection, DetectError> {
    let ntd = nice_decomposition_with_limit(pattern, limit)?;
    find_subgraph_with(pattern, host, &ntd, cfg)
}

/// As [`find_subgraph`] with a caller-supplied nice decomposition.
pub fn find_subgraph_with(
    pattern: &Graph,
    host: &Graph,
    ntd: &crate::decomp::NiceTreeDecomposition,
    cfg: &DetectionConfig,
) -> Result<Detection, DetectError> {
    let circuit = build_circuit(pattern, host, ntd)?;
    detect_multilinear(&circuit, pattern.order(), cfg)
}
