//! Drawing profiles for Monte Carlo estimates.
//!
//! Matching models are sampled exactly, in chunks of [`CHUNK`] draws on
//! independent streams. Mean-field and graph models run [`MCMC_REPLICAS`]
//! Glauber chains from uniform starts; each discards [`BURN_IN_SWEEPS`] sweeps
//! and then records one state per sweep. Either way the draws come in
//! independent units, merged in unit order.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Chain, MatchingSampler, ModelKind, ModelSpec, Scan, MCMC_REPLICAS};
use crate::error::{argument, Result};
use crate::numeric::NeumaierSum;
use crate::perm::PermTable;
use crate::stats::{stream_rng, Estimate, Method, CHUNK};

/// Glauber sweeps discarded before recording.
pub const BURN_IN_SWEEPS: usize = 200;

/// Visits `samples` profiles (ranking indices, matching pairs interleaved)
/// and returns the per-unit states with the draws each saw.
pub(crate) fn sampled_units<S, I, V>(
    spec: &ModelSpec,
    samples: u64,
    seed: u64,
    init: I,
    visit: V,
) -> Result<(Method, Vec<(S, u64)>)>
where
    S: Send,
    I: Fn() -> S + Sync,
    V: Fn(&mut S, &[u32], &mut ChaCha8Rng) + Sync,
{
    if samples == 0 {
        return Err(argument("Monte Carlo needs at least one sample"));
    }
    PermTable::get(spec.q())?;
    match spec.kind() {
        ModelKind::Matching => {
            let sampler = MatchingSampler::new(spec)?;
            let chunks = samples.div_ceil(CHUNK);
            let units = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = stream_rng(seed, c);
                    let mut state = init();
                    let count = CHUNK.min(samples - c * CHUNK);
                    let mut idx = vec![0u32; spec.num_voters()];
                    for _ in 0..count {
                        for pair in idx.chunks_mut(2) {
                            let (x, y) = sampler.sample_pair(&mut rng);
                            pair[0] = x;
                            pair[1] = y;
                        }
                        visit(&mut state, &idx, &mut rng);
                    }
                    (state, count)
                })
                .collect();
            Ok((Method::MonteCarlo, units))
        }
        ModelKind::MeanField | ModelKind::GeneralGraph => {
            let replicas = MCMC_REPLICAS.min(samples);
            let per = samples.div_ceil(replicas);
            let units = (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(seed, r);
                    let mut chain = Chain::new(spec, None, &mut rng).expect("validated spec");
                    for _ in 0..BURN_IN_SWEEPS {
                        chain.sweep(Scan::Random, &mut rng);
                    }
                    let mut state = init();
                    for _ in 0..per {
                        chain.sweep(Scan::Random, &mut rng);
                        visit(&mut state, chain.state(), &mut rng);
                    }
                    (state, per)
                })
                .collect();
            Ok((Method::Mcmc, units))
        }
    }
}

/// Running sums of one scalar per draw.
#[derive(Clone, Debug, Default)]
pub(crate) struct Moments {
    pub sum: NeumaierSum,
    pub sum_sq: NeumaierSum,
    pub ties: u64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }
}

/// Mean of a per-draw scalar. Independent draws use the sample variance;
/// Glauber replicas use the spread of replica means.
pub(crate) fn estimate_from_units(method: Method, units: &[(Moments, u64)]) -> Estimate {
    let draws: u64 = units.iter().map(|u| u.1).sum();
    let ties = units.iter().map(|u| u.0.ties).sum();
    let n = draws as f64;
    let mut s = NeumaierSum::new();
    let mut s2 = NeumaierSum::new();
    for (m, _) in units {
        s.merge(&m.sum);
        s2.merge(&m.sum_sq);
    }
    let mean = s.total() / n;
    let var_of_mean = match method {
        Method::Mcmc => {
            let r = units.len() as f64;
            if units.len() > 1 {
                let spread: NeumaierSum =
                    units.iter().map(|(m, c)| (m.sum.total() / *c as f64 - mean).powi(2)).collect();
                spread.total() / (r - 1.0) / r
            } else {
                0.0
            }
        }
        _ => {
            if draws > 1 {
                ((s2.total() - n * mean * mean) / (n - 1.0)).max(0.0) / n
            } else {
                0.0
            }
        }
    };
    Estimate { value: mean, std_error: var_of_mean.sqrt(), method, samples: draws, ties_broken: ties }
}

/// Mean of `f` over sampled profiles; `f` returns the value and the number
/// of coin-broken ties.
pub(crate) fn profile_mean<F>(spec: &ModelSpec, samples: u64, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&[u32], &mut ChaCha8Rng) -> (f64, u64) + Sync,
{
    let (method, units) = sampled_units(spec, samples, seed, Moments::default, |m, idx, rng| {
        let (x, t) = f(idx, rng);
        m.push(x);
        m.ties += t;
    })?;
    Ok(estimate_from_units(method, &units))
}
