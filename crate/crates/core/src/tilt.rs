//! The inversion tilt model `P_λ(π) ∝ exp⟨λ, φ(π)⟩` on rankings.
//!
//! Every quantity is computed by exhaustive enumeration over the `q!`
//! rankings, so `q` is capped at [`ENUMERATION_CAP`](crate::perm::ENUMERATION_CAP).
//!
//! ```
//! use correlated_voters::tilt::{cgf, log_partition, TiltParams};
//!
//! let t = TiltParams::zero(4);
//! assert!((log_partition(&t).unwrap() - 24f64.ln()).abs() < 1e-12);
//! assert_eq!(cgf(&t).unwrap(), 0.0);
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::numeric::NeumaierSum;
use crate::perm::{factorial, num_pairs, PermTable, Permutation};

/// Natural parameter of the tilt, indexed by pairs in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltParams {
    q: usize,
    lambda: Vec<f64>,
}

impl TiltParams {
    pub fn new(q: usize, lambda: Vec<f64>) -> Result<Self> {
        if q < 2 {
            return Err(argument(format!("need q >= 2, got {q}")));
        }
        if lambda.len() != num_pairs(q) {
            return Err(argument(format!(
                "λ has length {}, expected C({q},2) = {}",
                lambda.len(),
                num_pairs(q)
            )));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(argument("λ entries must be finite"));
        }
        Ok(Self { q, lambda })
    }

    pub fn zero(q: usize) -> Self {
        Self { q, lambda: vec![0.0; num_pairs(q)] }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn norm_sq(&self) -> f64 {
        self.lambda.iter().map(|x| x * x).sum()
    }
}

#[inline]
fn dot_f(lambda: &[f64], v: &[i8]) -> f64 {
    lambda.iter().zip(v).map(|(&l, &x)| l * x as f64).sum()
}

fn log_weights(t: &TiltParams) -> Result<(&'static PermTable, Vec<f64>)> {
    let table = PermTable::get(t.q)?;
    let w = (0..table.len()).map(|k| dot_f(&t.lambda, table.embedding(k))).collect();
    Ok((table, w))
}

fn normalized(log_w: &[f64]) -> (Vec<f64>, f64) {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|&x| (x - max).exp()).collect();
    let total: NeumaierSum = w.iter().copied().collect();
    let total = total.total();
    (w.into_iter().map(|x| x / total).collect(), max + total.ln())
}

/// `log Σ_π exp⟨λ, φ(π)⟩`.
pub fn log_partition(t: &TiltParams) -> Result<f64> {
    let (_, lw) = log_weights(t)?;
    Ok(crate::numeric::logsumexp(&lw))
}

/// The cumulant generating function `Ψ(λ) = log Z(λ) − log q!`.
pub fn cgf(t: &TiltParams) -> Result<f64> {
    Ok(log_partition(t)? - (factorial(t.q) as f64).ln())
}

/// `E_λ[φ(π)]`, which is also `∇Ψ(λ)`.
pub fn mean_vector(t: &TiltParams) -> Result<Vec<f64>> {
    let (table, lw) = log_weights(t)?;
    let (w, _) = normalized(&lw);
    let k = table.num_pairs();
    let mut acc = vec![NeumaierSum::default(); k];
    for (idx, &p) in w.iter().enumerate() {
        for (a, &e) in acc.iter_mut().zip(table.embedding(idx)) {
            a.add(p * e as f64);
        }
    }
    Ok(acc.iter().map(NeumaierSum::total).collect())
}

/// `Cov_λ[φ(π)]` as a row-major `C(q,2) × C(q,2)` matrix.
pub fn covariance(t: &TiltParams) -> Result<Vec<f64>> {
    let (table, lw) = log_weights(t)?;
    let (w, _) = normalized(&lw);
    let k = table.num_pairs();
    let mean = mean_vector(t)?;
    let mut second = vec![0.0; k * k];
    for (idx, &p) in w.iter().enumerate() {
        let e = table.embedding(idx);
        for a in 0..k {
            for b in 0..k {
                second[a * k + b] += p * (e[a] * e[b]) as f64;
            }
        }
    }
    for a in 0..k {
        for b in 0..k {
            second[a * k + b] -= mean[a] * mean[b];
        }
    }
    Ok(second)
}

/// An exact categorical draw from `P_λ`.
pub fn sample<R: Rng + ?Sized>(t: &TiltParams, rng: &mut R) -> Result<Permutation> {
    let sampler = TiltSampler::new(t)?;
    Ok(sampler.table.perm(sampler.sample_index(rng)).clone())
}

/// `2Ψ(λ)/‖λ‖²`, the sub-Gaussian ratio along `λ`.
///
/// It is at most `q − 1` for every `λ`; near `λ = 0` it approaches the
/// Rayleigh quotient of the covariance of `φ` under the uniform law, whose
/// maximum is `(q+1)/3`.
pub fn subgaussian_ratio(t: &TiltParams) -> Result<f64> {
    let n2 = t.norm_sq();
    if n2 == 0.0 {
        return Err(argument("sub-Gaussian ratio is undefined at λ = 0"));
    }
    Ok(2.0 * cgf(t)? / n2)
}

/// Seed for [`cgf_probe`] sweeps.
pub const PROBE_SEED: u64 = 0x0c9f_4000;

/// Result of a random sweep of the sub-Gaussian ratio for one `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgfProbe {
    pub q: usize,
    pub draws: usize,
    pub radius: f64,
    /// `q − 1`, a proven bound on the ratio.
    pub proven_bound: f64,
    /// `(q+1)/3`, the conjectured sharp bound.
    pub conjectured_bound: f64,
    /// Largest `2Ψ/‖λ‖²` over the random draws.
    pub max_random_ratio: f64,
    /// Ratio at `±ε·u` for `u` a unit top eigenvector of the uniform
    /// covariance and `ε = 10⁻⁴`; the larger of the two.
    pub small_lambda_ratio: f64,
    /// Draws with `Ψ(λ) > (q−1)‖λ‖²/2`.
    pub proven_violations: usize,
    /// Draws with ratio above `(q+1)/3 + 10⁻⁶`.
    pub conjecture_exceedances: usize,
}

impl CgfProbe {
    /// The observed supremum, including the small-`λ` points.
    pub fn sup_ratio(&self) -> f64 {
        self.max_random_ratio.max(self.small_lambda_ratio)
    }
}

/// Evaluates the sub-Gaussian ratio at `draws` random `λ` with uniform
/// direction and radius uniform on `(0, radius]`, plus two points near the
/// origin along a top eigenvector of the uniform covariance. Draw `i` uses
/// stream `i` of `seed`.
pub fn cgf_probe(q: usize, draws: usize, radius: f64, seed: u64) -> Result<CgfProbe> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(argument(format!("radius must be positive, got {radius}")));
    }
    let table = PermTable::get(q)?;
    let k = num_pairs(q);
    let ln_qf = (factorial(q) as f64).ln();
    let ratio = |lambda: &[f64]| {
        let lw: Vec<f64> = (0..table.len()).map(|i| dot_f(lambda, table.embedding(i))).collect();
        let n2: f64 = lambda.iter().map(|x| x * x).sum();
        let psi = if lw.iter().all(|x| x.abs() < 0.5) {
            // Near the origin Ψ is second order; avoid cancelling log q!.
            let m: NeumaierSum = lw.iter().map(|x| x.exp_m1()).collect();
            (m.total() / lw.len() as f64).ln_1p()
        } else {
            crate::numeric::logsumexp(&lw) - ln_qf
        };
        2.0 * psi / n2
    };
    let ratios: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::stats::stream_rng(seed, i as u64);
            let mut d: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = radius * (1.0 - rng.gen::<f64>());
            d.iter_mut().for_each(|x| *x *= r / n);
            ratio(&d)
        })
        .collect();
    // Candidate 0 against every other candidate spans a top eigenvector.
    let eps = 1e-4 / ((q - 1) as f64).sqrt();
    let u: Vec<f64> = crate::perm::pairs(q).map(|(i, _)| if i == 0 { eps } else { 0.0 }).collect();
    let neg: Vec<f64> = u.iter().map(|x| -x).collect();
    let small = ratio(&u).max(ratio(&neg));
    let proven = (q - 1) as f64;
    let conj = (q + 1) as f64 / 3.0;
    Ok(CgfProbe {
        q,
        draws,
        radius,
        proven_bound: proven,
        conjectured_bound: conj,
        max_random_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        small_lambda_ratio: small,
        proven_violations: ratios.iter().filter(|&&r| r > proven).count(),
        conjecture_exceedances: ratios.iter().filter(|&&r| r > conj + 1e-6).count(),
    })
}

/// Precomputed cumulative weights for repeated draws from one tilt.
pub struct TiltSampler {
    table: &'static PermTable,
    cumulative: Vec<f64>,
}

impl TiltSampler {
    pub fn new(t: &TiltParams) -> Result<Self> {
        let (table, lw) = log_weights(t)?;
        let (w, _) = normalized(&lw);
        let mut acc = 0.0;
        let cumulative = w
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self { table, cumulative })
    }

    /// Index into [`PermTable::get`]`(q)` of one draw.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let last = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * last;
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }

    pub fn table(&self) -> &'static PermTable {
        self.table
    }
}

/// One draw from the tilt `λ = scale·field`, as an index into `table`.
/// `scratch` is reused across calls; this is the inner loop of Glauber
/// dynamics.
pub(crate) fn sample_index_scaled<R: Rng + ?Sized>(
    table: &PermTable,
    field: &[i64],
    scale: f64,
    scratch: &mut Vec<f64>,
    rng: &mut R,
) -> usize {
    scratch.clear();
    let mut max = f64::NEG_INFINITY;
    for k in 0..table.len() {
        let e = table.embedding(k);
        let x = scale * field.iter().zip(e).map(|(&f, &s)| f * s as i64).sum::<i64>() as f64;
        max = max.max(x);
        scratch.push(x);
    }
    let mut acc = 0.0;
    for x in scratch.iter_mut() {
        acc += (*x - max).exp();
        *x = acc;
    }
    let u = rng.gen::<f64>() * acc;
    scratch.partition_point(|&c| c <= u).min(scratch.len() - 1)
}

/// Exponent `⟨λ, φ(π)⟩` for one ranking.
pub fn log_weight(t: &TiltParams, p: &Permutation) -> Result<f64> {
    if p.q() != t.q {
        return Err(argument("ranking and tilt disagree on q"));
    }
    let e = crate::perm::embed(p);
    Ok(dot_f(&t.lambda, e.entries()))
}
