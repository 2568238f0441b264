//! Exact distributions by brute force, and the exact matching sampler.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::{ModelKind, ModelSpec, Profile};
use crate::error::{argument, Error, Result};
use crate::numeric::logsumexp;
use crate::perm::{dot_i8, factorial, num_pairs, to_nae_coords, PermTable};

/// Largest number of profiles (or matching pair atoms) enumerated exactly.
pub const ENUMERATION_LIMIT: u128 = 20_000_000;

/// Probability of every profile of a small model.
///
/// Profiles are indexed in mixed radix `q!`, voter 0 least significant, with
/// each digit an index into [`PermTable::get`]`(q)`. Matching profiles use
/// the interleaved voter order `X₁, Y₁, X₂, Y₂, …`.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    spec: ModelSpec,
    log_z: f64,
    probs: Vec<f64>,
}

fn profile_count(spec: &ModelSpec) -> Result<usize> {
    let per = factorial(spec.q());
    let mut total: u128 = 1;
    for _ in 0..spec.num_voters() {
        total = total.saturating_mul(per);
    }
    if total > ENUMERATION_LIMIT {
        return Err(Error::Capacity { what: "profiles", requested: total, limit: ENUMERATION_LIMIT });
    }
    Ok(total as usize)
}

/// Enumerates every profile of `spec` and its exact probability.
pub fn enumerate_exact(spec: &ModelSpec) -> Result<ExactDistribution> {
    let count = profile_count(spec)?;
    let table = PermTable::get(spec.q())?;
    let m = table.len();
    let k = num_pairs(spec.q());
    let voters = spec.num_voters();
    let beta = spec.beta();

    let mut dots = vec![0i64; m * m];
    for a in 0..m {
        for b in 0..m {
            dots[a * m + b] = dot_i8(table.embedding(a), table.embedding(b));
        }
    }

    let mut digits = vec![0usize; voters];
    let mut exps = Vec::with_capacity(count);
    let mut sum = vec![0i64; k];
    for idx in 0..count {
        if idx > 0 {
            let mut v = 0;
            loop {
                digits[v] += 1;
                if digits[v] < m {
                    break;
                }
                digits[v] = 0;
                v += 1;
            }
        }
        let e = match spec.kind() {
            ModelKind::MeanField => {
                sum.iter_mut().for_each(|s| *s = 0);
                for &d in &digits {
                    for (s, &x) in sum.iter_mut().zip(table.embedding(d)) {
                        *s += x as i64;
                    }
                }
                super::mean_field_exponent(beta, spec.n(), &sum)
            }
            ModelKind::Matching => {
                let t: i64 = digits.chunks(2).map(|c| dots[c[0] * m + c[1]]).sum();
                beta * t as f64
            }
            ModelKind::GeneralGraph => {
                // −2β d_τ = −β (C(q,2) − ⟨φa, φb⟩)
                let t: i64 = spec.edges().iter().map(|&(a, b)| k as i64 - dots[digits[a] * m + digits[b]]).sum();
                -beta * t as f64
            }
        };
        exps.push(e);
    }
    let log_z = logsumexp(&exps);
    let probs = exps.into_iter().map(|e| (e - log_z).exp()).collect();
    Ok(ExactDistribution { spec: spec.clone(), log_z, probs })
}

impl ExactDistribution {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// `log Z` for the unnormalized density `exp(energy)`.
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// `log Z − N log q!`, zero when `β = 0`.
    pub fn log_z_ratio(&self) -> f64 {
        self.log_z - self.spec.num_voters() as f64 * (factorial(self.spec.q()) as f64).ln()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Ranking indices of profile `idx`, voter 0 first.
    pub fn indices(&self, idx: usize) -> Vec<u32> {
        let m = factorial(self.spec.q()) as usize;
        let mut rest = idx;
        (0..self.spec.num_voters())
            .map(|_| {
                let d = rest % m;
                rest /= m;
                d as u32
            })
            .collect()
    }

    /// Mixed-radix index of a profile given by ranking indices.
    pub fn index_of(&self, indices: &[u32]) -> usize {
        let m = factorial(self.spec.q()) as usize;
        indices.iter().rev().fold(0usize, |acc, &d| acc * m + d as usize)
    }

    pub fn profile(&self, idx: usize) -> Profile {
        let table = PermTable::get(self.spec.q()).expect("q validated at construction");
        Profile::from_indices(&self.spec, table, &self.indices(idx))
    }

    /// `Σ_x P(x) f(x)` with `f` reading ranking indices.
    pub fn expectation<F: FnMut(&[u32]) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = crate::numeric::NeumaierSum::new();
        self.for_each(|p, digits| {
            if p > 0.0 {
                acc.add(p * f(digits));
            }
        });
        acc.total()
    }

    /// Visits every profile in index order with its probability.
    pub fn for_each<F: FnMut(f64, &[u32])>(&self, mut f: F) {
        let m = factorial(self.spec.q()) as usize;
        let voters = self.spec.num_voters();
        let mut digits = vec![0u32; voters];
        for (idx, &p) in self.probs.iter().enumerate() {
            if idx > 0 {
                let mut v = 0;
                loop {
                    digits[v] += 1;
                    if (digits[v] as usize) < m {
                        break;
                    }
                    digits[v] = 0;
                    v += 1;
                }
            }
            f(p, &digits);
        }
    }

    /// Law of `m = Σ φ̃(x_i)` (three candidates only).
    pub fn magnetization_law(&self) -> Result<super::MagnetizationLaw> {
        if self.spec.q() != 3 {
            return Err(argument("magnetization law needs q = 3"));
        }
        let table = PermTable::get(3)?;
        let mut map = std::collections::BTreeMap::new();
        for (idx, &p) in self.probs.iter().enumerate() {
            let mut s = [0i32; 3];
            for d in self.indices(idx) {
                let e = table.embedding(d as usize);
                for c in 0..3 {
                    s[c] += e[c] as i32;
                }
            }
            *map.entry(to_nae_coords(s)).or_insert(0.0) += p;
        }
        Ok(super::MagnetizationLaw::from_parts(
            self.spec.num_voters(),
            self.spec.beta(),
            map,
            self.log_z_ratio(),
        ))
    }
}

/// Independent draws of matching pairs from the `(q!)²`-atom joint law
/// `∝ exp(β⟨φ(x), φ(y)⟩)`.
#[derive(Clone, Debug)]
pub struct MatchingSampler {
    spec: ModelSpec,
    table: &'static PermTable,
    atoms: WeightedIndex<f64>,
}

impl MatchingSampler {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        if spec.kind() != ModelKind::Matching {
            return Err(argument(format!("exact pair sampler needs a matching model, got {:?}", spec.kind())));
        }
        let table = PermTable::get(spec.q())?;
        let m = table.len();
        let atoms = (m as u128) * (m as u128);
        if atoms > ENUMERATION_LIMIT {
            return Err(Error::Capacity { what: "pair atoms", requested: atoms, limit: ENUMERATION_LIMIT });
        }
        let k = num_pairs(spec.q()) as f64;
        let mut w = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let d = dot_i8(table.embedding(a), table.embedding(b)) as f64;
                // Shift by the largest exponent, βC(q,2), to stay in range.
                w.push((spec.beta() * (d - k)).exp());
            }
        }
        let atoms = WeightedIndex::new(w).map_err(|e| argument(format!("pair weights: {e}")))?;
        Ok(Self { spec: spec.clone(), table, atoms })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// One `(X, Y)` pair as ranking indices.
    #[inline]
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        let m = self.table.len();
        let a = self.atoms.sample(rng);
        ((a / m) as u32, (a % m) as u32)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Profile {
        let idx: Vec<u32> = (0..self.spec.n())
            .flat_map(|_| {
                let (x, y) = self.sample_pair(rng);
                [x, y]
            })
            .collect();
        Profile::from_indices(&self.spec, self.table, &idx)
    }

    /// Draws a profile and writes `Σ_i φ(X_i) + φ(Y_i)` into `sum`.
    pub fn sample_magnetization<R: Rng + ?Sized>(&self, rng: &mut R, sum: &mut [i64]) {
        sum.iter_mut().for_each(|s| *s = 0);
        for _ in 0..self.spec.n() {
            let (x, y) = self.sample_pair(rng);
            let (ex, ey) = (self.table.embedding(x as usize), self.table.embedding(y as usize));
            for k in 0..sum.len() {
                sum[k] += (ex[k] + ey[k]) as i64;
            }
        }
    }
}

/// One exact draw from a matching model.
pub fn sample_matching_exact<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Result<Profile> {
    Ok(MatchingSampler::new(spec)?.sample(rng))
}
