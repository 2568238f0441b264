//! Gibbs measures on voting profiles.
//!
//! Three interaction structures share one [`ModelSpec`]:
//!
//! * mean-field: density `∝ exp((β/2n) Σ_i Σ_j ⟨φ(x_i), φ(x_j)⟩)`, the double
//!   sum including `i = j`;
//! * matching: `n` independent pairs `(X_i, Y_i)`, density
//!   `∝ exp(β Σ_i ⟨φ(x_i), φ(y_i)⟩)`;
//! * general graph: density `∝ exp(−2β Σ_{i∼j} d_τ(x_i, x_j))`.
//!
//! [`energy`] returns the exponent of the unnormalized density.

mod condorcet;
mod exact;
mod glauber;
mod magnetization;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::perm::{dot_i8, embed, kendall_tau, num_pairs, PermTable, Permutation};

pub use condorcet::{condorcet_probability, CondorcetMethod, MCMC_REPLICAS};
pub use exact::{enumerate_exact, sample_matching_exact, ExactDistribution, MatchingSampler, ENUMERATION_LIMIT};
pub use glauber::{glauber_step, run_chain, Chain, ChainConfig, ChainSample, Scan};
pub(crate) use sampling::{estimate_from_units, profile_mean, sampled_units, Moments};
pub use sampling::BURN_IN_SWEEPS;
pub use magnetization::{
    magnetization_dp, magnetization_summary, MagnetizationLaw, MagnetizationSummary, LAW_MAX_VOTERS,
    SUMMARY_MAX_VOTERS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    MeanField,
    Matching,
    GeneralGraph,
}

/// Which Gibbs measure to use, with its parameters.
///
/// For [`ModelKind::Matching`], `n` counts pairs, so there are `2n` voters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    kind: ModelKind,
    q: usize,
    n: usize,
    beta: f64,
    edges: Vec<(usize, usize)>,
}

impl ModelSpec {
    pub fn mean_field(q: usize, n: usize, beta: f64) -> Result<Self> {
        Self::validate(q, n, beta)?;
        Ok(Self { kind: ModelKind::MeanField, q, n, beta, edges: Vec::new() })
    }

    pub fn matching(q: usize, pairs: usize, beta: f64) -> Result<Self> {
        Self::validate(q, pairs, beta)?;
        Ok(Self { kind: ModelKind::Matching, q, n: pairs, beta, edges: Vec::new() })
    }

    pub fn graph(q: usize, n: usize, beta: f64, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::validate(q, n, beta)?;
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(argument(format!("edge ({a},{b}) references a voter outside 0..{n}")));
            }
            if a == b {
                return Err(argument(format!("self-loop at voter {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(argument(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Self { kind: ModelKind::GeneralGraph, q, n, beta, edges })
    }

    fn validate(q: usize, n: usize, beta: f64) -> Result<()> {
        if q < 3 {
            return Err(argument(format!("need q >= 3 candidates, got {q}")));
        }
        if n == 0 {
            return Err(argument("need at least one voter"));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(argument(format!("β must be finite and non-negative, got {beta}")));
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Voters for mean-field and graph models, pairs for matching.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Total number of rankings in a profile (`2n` for matching).
    pub fn num_voters(&self) -> usize {
        match self.kind {
            ModelKind::Matching => 2 * self.n,
            _ => self.n,
        }
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::validate(self.q, self.n, beta)?;
        Ok(Self { beta, ..self.clone() })
    }
}

/// One joint configuration of all voters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    Votes(Vec<Permutation>),
    Pairs(Vec<(Permutation, Permutation)>),
}

impl Profile {
    /// All rankings in voter order. Pairs are interleaved as
    /// `X₁, Y₁, X₂, Y₂, …`.
    pub fn flatten(&self) -> Vec<&Permutation> {
        match self {
            Profile::Votes(v) => v.iter().collect(),
            Profile::Pairs(p) => p.iter().flat_map(|(x, y)| [x, y]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Profile::Votes(v) => v.len(),
            Profile::Pairs(p) => 2 * p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn from_indices(spec: &ModelSpec, table: &PermTable, idx: &[u32]) -> Profile {
        let get = |k: u32| table.perm(k as usize).clone();
        match spec.kind {
            ModelKind::Matching => {
                Profile::Pairs(idx.chunks(2).map(|c| (get(c[0]), get(c[1]))).collect())
            }
            _ => Profile::Votes(idx.iter().map(|&k| get(k)).collect()),
        }
    }

    pub(crate) fn to_indices(&self, spec: &ModelSpec) -> Result<Vec<u32>> {
        check_shape(spec, self)?;
        let table = PermTable::get(spec.q)?;
        Ok(self.flatten().iter().map(|p| table.index_of(p) as u32).collect())
    }
}

pub(crate) fn check_shape(spec: &ModelSpec, p: &Profile) -> Result<()> {
    let ok_kind = matches!(
        (spec.kind, p),
        (ModelKind::Matching, Profile::Pairs(_)) | (ModelKind::MeanField | ModelKind::GeneralGraph, Profile::Votes(_))
    );
    if !ok_kind {
        return Err(argument(format!("{:?} model needs a {} profile", spec.kind, if spec.kind == ModelKind::Matching { "paired" } else { "flat" })));
    }
    if p.len() != spec.num_voters() {
        return Err(argument(format!("profile has {} rankings, model expects {}", p.len(), spec.num_voters())));
    }
    if p.flatten().iter().any(|r| r.q() != spec.q) {
        return Err(argument(format!("every ranking must be over {} candidates", spec.q)));
    }
    Ok(())
}

/// Exponent of the unnormalized density of `p` under `spec`.
pub fn energy(spec: &ModelSpec, p: &Profile) -> Result<f64> {
    check_shape(spec, p)?;
    let beta = spec.beta;
    match spec.kind {
        ModelKind::MeanField => {
            let mut sum = vec![0i64; num_pairs(spec.q)];
            for r in p.flatten() {
                for (s, &e) in sum.iter_mut().zip(embed(r).entries()) {
                    *s += e as i64;
                }
            }
            let sq: i64 = sum.iter().map(|x| x * x).sum();
            Ok(beta / (2.0 * spec.n as f64) * sq as f64)
        }
        ModelKind::Matching => {
            let Profile::Pairs(pairs) = p else { unreachable!() };
            let total: i64 = pairs.iter().map(|(x, y)| dot_i8(embed(x).entries(), embed(y).entries())).sum();
            Ok(beta * total as f64)
        }
        ModelKind::GeneralGraph => {
            let votes = p.flatten();
            let mut total = 0usize;
            for &(a, b) in &spec.edges {
                total += kendall_tau(votes[a], votes[b])?;
            }
            Ok(-2.0 * beta * total as f64)
        }
    }
}

/// Mean-field exponent from integer pair sums, used by exact methods.
#[inline]
pub(crate) fn mean_field_exponent(beta: f64, n: usize, sum: &[i64]) -> f64 {
    let sq: i64 = sum.iter().map(|x| x * x).sum();
    beta / (2.0 * n as f64) * sq as f64
}
