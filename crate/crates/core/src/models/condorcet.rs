//! Probability that pairwise majority produces a Condorcet winner.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::profile_mean;
use super::{enumerate_exact, magnetization_summary, MatchingSampler, ModelKind, ModelSpec};
use crate::error::{argument, Error, Result};
use crate::perm::{condorcet_winner, num_pairs, PermTable};
use crate::stats::{mc_mean, Estimate, Method, Trial};

/// How to compute a Condorcet probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CondorcetMethod {
    /// Exact magnetization sum: three-candidate mean-field, odd `n`.
    ExactDp,
    /// Exact enumeration of all profiles: odd voter count.
    ExactEnum,
    /// Sampling: independent exact draws for matching models, Glauber
    /// replicas otherwise.
    MonteCarlo { samples: u64 },
}

/// Glauber replicas used by Monte Carlo estimates for mean-field and graph
/// models.
pub const MCMC_REPLICAS: u64 = 16;

/// Signs of majority on each pair. Ties go to a fair coin; returns the
/// number of ties.
pub(crate) fn majority_outcome<R: Rng + ?Sized>(sum: &[i64], out: &mut [i8], rng: &mut R) -> u64 {
    let mut ties = 0;
    for (o, &s) in out.iter_mut().zip(sum) {
        *o = match s.signum() {
            1 => 1,
            -1 => -1,
            _ => {
                ties += 1;
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
    }
    ties
}

/// Condorcet-winner probability under `spec`.
///
/// `seed` drives Monte Carlo methods and is ignored by exact ones.
pub fn condorcet_probability(spec: &ModelSpec, method: CondorcetMethod, seed: u64) -> Result<Estimate> {
    let k = num_pairs(spec.q());
    match method {
        CondorcetMethod::ExactDp => {
            if spec.n().is_multiple_of(2) {
                return Err(Error::Tie { pair: 0, voters: spec.n() });
            }
            let s = magnetization_summary(spec)?;
            Ok(Estimate::exact(s.p_condorcet.expect("odd n"), Method::ExactDp))
        }
        CondorcetMethod::ExactEnum => {
            let voters = spec.num_voters();
            if voters.is_multiple_of(2) {
                return Err(Error::Tie { pair: 0, voters });
            }
            let d = enumerate_exact(spec)?;
            let table = PermTable::get(spec.q())?;
            let mut sum = vec![0i64; k];
            let mut out = vec![0i8; k];
            let p = d.expectation(|idx| {
                sum.iter_mut().for_each(|s| *s = 0);
                for &i in idx {
                    for (s, &e) in sum.iter_mut().zip(table.embedding(i as usize)) {
                        *s += e as i64;
                    }
                }
                for (o, &s) in out.iter_mut().zip(&sum) {
                    *o = s.signum() as i8;
                }
                condorcet_winner(&out).expect("valid length").is_some() as u8 as f64
            });
            Ok(Estimate::exact(p, Method::ExactEnum))
        }
        CondorcetMethod::MonteCarlo { samples } => {
            if samples == 0 {
                return Err(argument("Monte Carlo needs at least one sample"));
            }
            match spec.kind() {
                ModelKind::Matching => {
                    let sampler = MatchingSampler::new(spec)?;
                    Ok(mc_mean(
                        samples,
                        seed,
                        || (vec![0i64; k], vec![0i8; k]),
                        |(sum, out), rng| {
                            sampler.sample_magnetization(rng, sum);
                            let ties = majority_outcome(sum, out, rng);
                            let win = condorcet_winner(out).expect("valid length").is_some();
                            Trial { value: win as u8 as f64, ties_broken: ties }
                        },
                    ))
                }
                ModelKind::MeanField | ModelKind::GeneralGraph => {
                    mcmc_condorcet(spec, samples, seed)
                }
            }
        }
    }
}

/// Glauber estimate from [`MCMC_REPLICAS`] chains.
fn mcmc_condorcet(spec: &ModelSpec, samples: u64, seed: u64) -> Result<Estimate> {
    let table = PermTable::get(spec.q())?;
    let k = num_pairs(spec.q());
    profile_mean(spec, samples, seed, |idx, rng| {
        let mut sum = vec![0i64; k];
        for &i in idx {
            for (s, &e) in sum.iter_mut().zip(table.embedding(i as usize)) {
                *s += e as i64;
            }
        }
        let mut out = vec![0i8; k];
        let ties = majority_outcome(&sum, &mut out, rng);
        (condorcet_winner(&out).expect("valid length").is_some() as u8 as f64, ties)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_voters_uniform() {
        let spec = ModelSpec::mean_field(3, 3, 0.0).unwrap();
        let dp = condorcet_probability(&spec, CondorcetMethod::ExactDp, 0).unwrap();
        let en = condorcet_probability(&spec, CondorcetMethod::ExactEnum, 0).unwrap();
        assert!((dp.value - 17.0 / 18.0).abs() < 1e-14);
        assert!((en.value - 17.0 / 18.0).abs() < 1e-14);
        assert_eq!(dp.std_error, 0.0);
    }

    #[test]
    fn exact_methods_reject_even_counts() {
        let spec = ModelSpec::mean_field(3, 4, 0.2).unwrap();
        assert!(matches!(condorcet_probability(&spec, CondorcetMethod::ExactDp, 0), Err(Error::Tie { .. })));
        assert!(matches!(condorcet_probability(&spec, CondorcetMethod::ExactEnum, 0), Err(Error::Tie { .. })));
    }

    #[test]
    fn dp_requires_mean_field_three() {
        let spec = ModelSpec::mean_field(4, 3, 0.2).unwrap();
        assert!(condorcet_probability(&spec, CondorcetMethod::ExactDp, 0).is_err());
    }

    #[test]
    fn mcmc_agrees_with_exact_small() {
        let spec = ModelSpec::mean_field(3, 5, 0.5).unwrap();
        let exact = condorcet_probability(&spec, CondorcetMethod::ExactEnum, 0).unwrap();
        let mc = condorcet_probability(&spec, CondorcetMethod::MonteCarlo { samples: 40_000 }, 1).unwrap();
        assert!(mc.z_score(exact.value) < 4.0, "{mc:?} vs {}", exact.value);
    }

    #[test]
    fn majority_tie_break_counts() {
        let mut rng = crate::stats::stream_rng(0, 0);
        let mut out = [0i8; 3];
        assert_eq!(majority_outcome(&[0, 2, -1], &mut out, &mut rng), 1);
        assert_eq!(&out[1..], &[1, -1]);
    }
}
