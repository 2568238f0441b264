//! Glauber dynamics: resample one voter at a time from its conditional law.
//!
//! The conditional law of a voter given the rest is always an inversion
//! tilt:
//!
//! | model       | `λ` for voter `i`                  |
//! |-------------|------------------------------------|
//! | mean-field  | `(β/n) Σ_{j≠i} φ(x_j)`             |
//! | matching    | `β φ(partner)`                     |
//! | graph       | `β Σ_{j∼i} φ(x_j)`                 |
//!
//! Constants that do not depend on `x_i` (the diagonal mean-field term and
//! the `C(q,2)` offset from converting `d_τ` to inner products) are dropped.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelSpec, Profile};
use crate::error::{argument, Result};
use crate::perm::{num_pairs, PermTable};
use crate::tilt::sample_index_scaled;

/// Voter selection rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scan {
    /// A uniformly random voter at every step.
    #[default]
    Random,
    /// Voters `0, 1, …, N−1` in turn.
    Systematic,
}

/// Chain schedule, counted in sweeps of `N` single-voter steps where `N` is
/// the number of rankings in a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Sweeps run after burn-in.
    pub sweeps: usize,
    /// Sweeps discarded before recording.
    pub burn_in: usize,
    /// Record the state after every `thinning`-th sweep.
    pub thinning: usize,
    pub scan: Scan,
    /// Keep full profiles in the output, not only magnetizations.
    pub keep_profiles: bool,
}

impl ChainConfig {
    /// Burn-in of 200 sweeps and one recorded state per sweep.
    pub fn new(sweeps: usize) -> Self {
        Self { sweeps, burn_in: 200, thinning: 1, scan: Scan::Random, keep_profiles: false }
    }
}

/// One recorded state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSample {
    /// Sweeps completed since the end of burn-in.
    pub sweep: usize,
    /// `Σ_i φ(x_i)` in lexicographic pair order.
    pub magnetization: Vec<i64>,
    pub profile: Option<Profile>,
}

/// A running Glauber chain.
pub struct Chain {
    spec: ModelSpec,
    table: &'static PermTable,
    state: Vec<u32>,
    sum: Vec<i64>,
    field: Vec<i64>,
    neighbors: Vec<Vec<usize>>,
    scratch: Vec<f64>,
    cursor: usize,
    scale: f64,
}

impl Chain {
    /// Starts from `init`, or from independent uniform rankings.
    pub fn new<R: Rng + ?Sized>(spec: &ModelSpec, init: Option<&Profile>, rng: &mut R) -> Result<Self> {
        let table = PermTable::get(spec.q())?;
        let state = match init {
            Some(p) => p.to_indices(spec)?,
            None => (0..spec.num_voters()).map(|_| rng.gen_range(0..table.len()) as u32).collect(),
        };
        let k = num_pairs(spec.q());
        let mut sum = vec![0i64; k];
        for &s in &state {
            for (a, &e) in sum.iter_mut().zip(table.embedding(s as usize)) {
                *a += e as i64;
            }
        }
        let neighbors = if spec.kind() == ModelKind::GeneralGraph {
            let mut adj = vec![Vec::new(); spec.n()];
            for &(a, b) in spec.edges() {
                adj[a].push(b);
                adj[b].push(a);
            }
            adj
        } else {
            Vec::new()
        };
        let scale = match spec.kind() {
            ModelKind::MeanField => spec.beta() / spec.n() as f64,
            _ => spec.beta(),
        };
        Ok(Self {
            spec: spec.clone(),
            table,
            state,
            sum,
            field: vec![0; k],
            neighbors,
            scratch: Vec::with_capacity(table.len()),
            cursor: 0,
            scale,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Current rankings as indices into [`PermTable::get`]`(q)`.
    pub fn state(&self) -> &[u32] {
        &self.state
    }

    pub fn profile(&self) -> Profile {
        Profile::from_indices(&self.spec, self.table, &self.state)
    }

    /// `Σ_i φ(x_i)` in lexicographic pair order.
    pub fn magnetization(&self) -> &[i64] {
        &self.sum
    }

    /// Resamples voter `i` from its conditional law.
    pub fn resample<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) {
        let table = self.table;
        let old = self.state[i] as usize;
        match self.spec.kind() {
            ModelKind::MeanField => {
                for ((f, &s), &e) in self.field.iter_mut().zip(&self.sum).zip(table.embedding(old)) {
                    *f = s - e as i64;
                }
            }
            ModelKind::Matching => {
                let partner = self.state[i ^ 1] as usize;
                for (f, &e) in self.field.iter_mut().zip(table.embedding(partner)) {
                    *f = e as i64;
                }
            }
            ModelKind::GeneralGraph => {
                self.field.iter_mut().for_each(|f| *f = 0);
                for &j in &self.neighbors[i] {
                    for (f, &e) in self.field.iter_mut().zip(table.embedding(self.state[j] as usize)) {
                        *f += e as i64;
                    }
                }
            }
        }
        let new = sample_index_scaled(table, &self.field, self.scale, &mut self.scratch, rng);
        if new != old {
            let (eo, en) = (table.embedding(old), table.embedding(new));
            for k in 0..self.sum.len() {
                self.sum[k] += (en[k] - eo[k]) as i64;
            }
            self.state[i] = new as u32;
        }
    }

    /// One single-voter update, choosing the voter by `scan`.
    pub fn step<R: Rng + ?Sized>(&mut self, scan: Scan, rng: &mut R) {
        let n = self.state.len();
        let i = match scan {
            Scan::Random => rng.gen_range(0..n),
            Scan::Systematic => {
                let i = self.cursor;
                self.cursor = (self.cursor + 1) % n;
                i
            }
        };
        self.resample(i, rng);
    }

    /// `N` single-voter updates.
    pub fn sweep<R: Rng + ?Sized>(&mut self, scan: Scan, rng: &mut R) {
        for _ in 0..self.state.len() {
            self.step(scan, rng);
        }
    }

    /// Runs `config`, calling `visit` on every recorded state.
    pub fn run<R, F>(&mut self, config: &ChainConfig, rng: &mut R, mut visit: F) -> Result<()>
    where
        R: Rng + ?Sized,
        F: FnMut(usize, &Chain),
    {
        if config.sweeps == 0 {
            return Err(argument("a chain needs at least one sweep"));
        }
        if config.thinning == 0 {
            return Err(argument("thinning must be at least one sweep"));
        }
        for _ in 0..config.burn_in {
            self.sweep(config.scan, rng);
        }
        for s in 1..=config.sweeps {
            self.sweep(config.scan, rng);
            if s % config.thinning == 0 {
                visit(s, self);
            }
        }
        Ok(())
    }
}

/// Returns `p` with voter `i` resampled from its conditional law.
pub fn glauber_step<R: Rng + ?Sized>(spec: &ModelSpec, p: &Profile, i: usize, rng: &mut R) -> Result<Profile> {
    let mut chain = Chain::new(spec, Some(p), rng)?;
    if i >= spec.num_voters() {
        return Err(argument(format!("voter {i} out of range 0..{}", spec.num_voters())));
    }
    chain.resample(i, rng);
    Ok(chain.profile())
}

/// Runs a chain from a uniform random start and collects the recorded states.
pub fn run_chain<R: Rng + ?Sized>(spec: &ModelSpec, config: &ChainConfig, rng: &mut R) -> Result<Vec<ChainSample>> {
    let mut chain = Chain::new(spec, None, rng)?;
    let mut out = Vec::with_capacity(config.sweeps / config.thinning.max(1));
    chain.run(config, rng, |sweep, c| {
        out.push(ChainSample {
            sweep,
            magnetization: c.magnetization().to_vec(),
            profile: config.keep_profiles.then(|| c.profile()),
        });
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_beta_resample_is_uniform() {
        let spec = ModelSpec::mean_field(3, 3, 0.0).unwrap();
        let p = Profile::Votes(vec![Permutation::identity(3); 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 6];
        let draws = 60_000;
        let mut chain = Chain::new(&spec, Some(&p), &mut rng).unwrap();
        for _ in 0..draws {
            chain.resample(0, &mut rng);
            counts[chain.state()[0] as usize] += 1;
        }
        let sd = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 / 6.0).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn matching_copies_partner_at_large_beta() {
        let spec = ModelSpec::matching(3, 1, 30.0).unwrap();
        let x = Permutation::from_one_line(&[3, 1, 2]).unwrap();
        let p = Profile::Pairs(vec![(x.clone(), Permutation::identity(3))]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let out = glauber_step(&spec, &p, 1, &mut rng).unwrap();
            let Profile::Pairs(v) = out else { panic!() };
            assert_eq!(v[0].1, x);
            assert_eq!(v[0].0, x);
        }
    }

    #[test]
    fn magnetization_is_tracked() {
        let spec = ModelSpec::graph(4, 5, 0.7, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut chain = Chain::new(&spec, None, &mut rng).unwrap();
        for _ in 0..500 {
            chain.step(Scan::Random, &mut rng);
        }
        let mut direct = vec![0i64; 6];
        for r in chain.profile().flatten() {
            for (d, &e) in direct.iter_mut().zip(crate::perm::embed(r).entries()) {
                *d += e as i64;
            }
        }
        assert_eq!(direct, chain.magnetization());
    }

    #[test]
    fn run_chain_is_deterministic() {
        let spec = ModelSpec::mean_field(3, 20, 0.9).unwrap();
        let mut cfg = ChainConfig::new(30);
        cfg.burn_in = 5;
        cfg.thinning = 3;
        let a = run_chain(&spec, &cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = run_chain(&spec, &cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        cfg.sweeps = 0;
        assert!(run_chain(&spec, &cfg, &mut ChaCha8Rng::seed_from_u64(11)).is_err());
    }

    #[test]
    fn systematic_scan_visits_every_voter() {
        let spec = ModelSpec::mean_field(3, 4, 50.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let init = Profile::Votes(vec![Permutation::identity(3); 4]);
        let mut chain = Chain::new(&spec, Some(&init), &mut rng).unwrap();
        chain.sweep(Scan::Systematic, &mut rng);
        assert_eq!(chain.state(), &[0, 0, 0, 0]);
    }
}
