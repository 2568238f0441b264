//! Seeding and Monte Carlo estimators.
//!
//! Work is split into fixed-size chunks; chunk `c` draws from the ChaCha8
//! stream `c` of the master seed. Chunk results are combined in chunk order,
//! so estimates do not depend on the number of worker threads.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::NeumaierSum;

/// How an estimate was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Exact magnetization sum (three-candidate mean-field model).
    ExactDp,
    /// Exact enumeration of all profiles.
    ExactEnum,
    /// Independent exact draws.
    MonteCarlo,
    /// Glauber dynamics replicas; the standard error comes from the spread
    /// of per-replica means.
    Mcmc,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExactDp => "exact-dp",
            Method::ExactEnum => "exact-enum",
            Method::MonteCarlo => "mc",
            Method::Mcmc => "mcmc",
        })
    }
}

/// A probability or mean with its standard error (zero for exact methods).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    /// Draws used; zero for exact methods.
    pub samples: u64,
    /// Majority ties resolved by a fair coin.
    pub ties_broken: u64,
}

impl Estimate {
    pub fn exact(value: f64, method: Method) -> Self {
        Self { value, std_error: 0.0, method, samples: 0, ties_broken: 0 }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.method, Method::ExactDp | Method::ExactEnum)
    }

    /// `|value − target| / std_error`, or infinity for an exact miss.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// RNG for work item `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws per chunk in [`mc_mean`].
pub const CHUNK: u64 = 1024;

/// Outcome of one Monte Carlo trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trial {
    pub value: f64,
    pub ties_broken: u64,
}

/// Mean of `samples` i.i.d. trials with the usual standard error.
///
/// `init` builds per-chunk scratch state; `trial` runs one draw.
pub fn mc_mean<S, I, T>(samples: u64, seed: u64, init: I, trial: T) -> Estimate
where
    I: Fn() -> S + Sync,
    T: Fn(&mut S, &mut ChaCha8Rng) -> Trial + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(NeumaierSum, NeumaierSum, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let mut state = init();
            let count = CHUNK.min(samples - c * CHUNK);
            let (mut s, mut s2, mut ties) = (NeumaierSum::new(), NeumaierSum::new(), 0);
            for _ in 0..count {
                let t = trial(&mut state, &mut rng);
                s.add(t.value);
                s2.add(t.value * t.value);
                ties += t.ties_broken;
            }
            (s, s2, ties)
        })
        .collect();
    let (mut s, mut s2, mut ties) = (NeumaierSum::new(), NeumaierSum::new(), 0);
    for (a, b, t) in &parts {
        s.merge(a);
        s2.merge(b);
        ties += t;
    }
    let n = samples as f64;
    let mean = s.total() / n;
    let var = if samples > 1 { ((s2.total() - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Estimate { value: mean, std_error: (var / n).sqrt(), method: Method::MonteCarlo, samples, ties_broken: ties }
}

/// Mean over independent replicas, each returning `(mean, draws, ties)`;
/// the standard error is the spread of replica means over `√replicas`.
pub fn replica_mean<F>(replicas: u64, seed: u64, run: F) -> Estimate
where
    F: Fn(u64, &mut ChaCha8Rng) -> (f64, u64, u64) + Sync,
{
    let parts: Vec<(f64, u64, u64)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            run(r, &mut rng)
        })
        .collect();
    let r = replicas as f64;
    let mean = parts.iter().map(|p| p.0).collect::<NeumaierSum>().total() / r;
    let var = if replicas > 1 {
        parts.iter().map(|p| (p.0 - mean).powi(2)).collect::<NeumaierSum>().total() / (r - 1.0)
    } else {
        0.0
    };
    Estimate {
        value: mean,
        std_error: (var / r).sqrt(),
        method: Method::Mcmc,
        samples: parts.iter().map(|p| p.1).sum(),
        ties_broken: parts.iter().map(|p| p.2).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn mc_mean_of_fair_coin() {
        let e = mc_mean(100_000, 3, || (), |_, rng| Trial { value: rng.gen_bool(0.5) as u8 as f64, ties_broken: 0 });
        assert!(e.z_score(0.5) < 4.0);
        assert!((e.std_error - 0.5 / (100_000f64).sqrt()).abs() < 1e-4);
        assert_eq!(e.samples, 100_000);
    }

    #[test]
    fn mc_mean_is_independent_of_thread_count() {
        let f = || mc_mean(10_000, 42, || (), |_, rng| Trial { value: rng.gen::<f64>(), ties_broken: 0 });
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f);
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(f);
        assert_eq!(one, four);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = stream_rng(1, 0).gen();
        let b: u64 = stream_rng(1, 1).gen();
        assert_ne!(a, b);
    }

    #[test]
    fn exact_z_score() {
        let e = Estimate::exact(0.5, Method::ExactEnum);
        assert_eq!(e.z_score(0.5), 0.0);
        assert!(e.z_score(0.4).is_infinite());
    }
}
