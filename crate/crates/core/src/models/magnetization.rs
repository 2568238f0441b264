//! Exact law of the magnetization `m = Σ_i φ̃(X_i)` in the three-candidate
//! mean-field model.
//!
//! The density depends on a profile only through `m`, so
//! `Q(m) ∝ #{x ∈ NAE₃ⁿ : Σ x_i = m} · exp((β/2n)‖m‖²)`.
//!
//! Two routines compute with this:
//!
//! * [`magnetization_dp`] builds the full law by `n`-step convolution over the
//!   six `NAE₃` increments. The support has `Θ(n³)` points, so this is capped
//!   at [`LAW_MAX_VOTERS`].
//! * [`magnetization_summary`] computes `log Z`, the covariance and the
//!   Condorcet probability without materialising the law, up to
//!   [`SUMMARY_MAX_VOTERS`]. Writing `m = k₁u₁ + k₂u₂ + k₃u₃` with
//!   `u₁ = (−1,1,1)`, `u₂ = (1,−1,1)`, `u₃ = (1,1,−1)`, the i.i.d. walk `k`
//!   moves one coordinate by `±1` per step; conditioning on the number `N` of
//!   steps spent on coordinates 2 and 3, the coordinates `k₁`, `u = k₂ + k₃`
//!   and `v = k₂ − k₃` are independent simple random walks of lengths
//!   `n − N`, `N` and `N`. The weight `‖m‖² = (u − k₁)² + 2k₁² + 2v²`
//!   separates `v`, which leaves an `O(n³)` sum.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelSpec};
use crate::error::{argument, Error, Result};
use crate::numeric::{logsumexp, LogFactorials, NeumaierSum};
use crate::perm::NaeVector;

/// Largest voter count for [`magnetization_dp`].
pub const LAW_MAX_VOTERS: usize = 64;

/// Largest voter count for [`magnetization_summary`].
pub const SUMMARY_MAX_VOTERS: usize = 5000;

/// Exact law of `m = Σ φ̃(X_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationLaw {
    n: usize,
    beta: f64,
    #[serde(with = "atoms")]
    weights: BTreeMap<[i32; 3], f64>,
    log_z_ratio: f64,
}

/// Weights as a list of `(m, probability)` pairs; JSON map keys must be
/// strings.
mod atoms {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &BTreeMap<[i32; 3], f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(w.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<[i32; 3], f64>, D::Error> {
        Ok(Vec::<([i32; 3], f64)>::deserialize(d)?.into_iter().collect())
    }
}

fn check_spec(spec: &ModelSpec) -> Result<()> {
    if spec.kind() != ModelKind::MeanField || spec.q() != 3 {
        return Err(argument(format!(
            "magnetization methods need the three-candidate mean-field model, got {:?} with q = {}",
            spec.kind(),
            spec.q()
        )));
    }
    Ok(())
}

/// Full law of `m` by convolution.
///
/// ```
/// use correlated_voters::models::{magnetization_dp, ModelSpec};
///
/// let law = magnetization_dp(&ModelSpec::mean_field(3, 1, 0.7).unwrap()).unwrap();
/// assert_eq!(law.weights().len(), 6);
/// assert!(law.weights().values().all(|&p| (p - 1.0 / 6.0).abs() < 1e-15));
/// ```
pub fn magnetization_dp(spec: &ModelSpec) -> Result<MagnetizationLaw> {
    check_spec(spec)?;
    let n = spec.n();
    if n > LAW_MAX_VOTERS {
        return Err(Error::Capacity {
            what: "voters for the full magnetization law",
            requested: n as u128,
            limit: LAW_MAX_VOTERS as u128,
        });
    }
    let steps: Vec<[i32; 3]> = NaeVector::all().iter().map(|v| v.entries().map(i32::from)).collect();
    let mut law: HashMap<[i32; 3], f64> = HashMap::from([([0, 0, 0], 1.0)]);
    for _ in 0..n {
        let mut next: HashMap<[i32; 3], f64> = HashMap::with_capacity(law.len() * 3);
        for (m, &p) in &law {
            for s in &steps {
                let key = [m[0] + s[0], m[1] + s[1], m[2] + s[2]];
                *next.entry(key).or_insert(0.0) += p / 6.0;
            }
        }
        law = next;
    }
    let beta = spec.beta();
    let sorted: BTreeMap<[i32; 3], f64> = law.into_iter().collect();
    let logs: Vec<f64> = sorted
        .iter()
        .map(|(m, &p)| p.ln() + beta / (2.0 * n as f64) * norm_sq(m) as f64)
        .collect();
    let log_z_ratio = logsumexp(&logs);
    let weights = sorted.keys().zip(&logs).map(|(&m, &l)| (m, (l - log_z_ratio).exp())).collect();
    Ok(MagnetizationLaw { n, beta, weights, log_z_ratio })
}

fn norm_sq(m: &[i32; 3]) -> i64 {
    m.iter().map(|&x| (x as i64) * (x as i64)).sum()
}

impl MagnetizationLaw {
    pub(crate) fn from_parts(n: usize, beta: f64, weights: BTreeMap<[i32; 3], f64>, log_z_ratio: f64) -> Self {
        Self { n, beta, weights, log_z_ratio }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Probability of each reachable `m`, in `φ̃` coordinates.
    pub fn weights(&self) -> &BTreeMap<[i32; 3], f64> {
        &self.weights
    }

    pub fn prob(&self, m: [i32; 3]) -> f64 {
        self.weights.get(&m).copied().unwrap_or(0.0)
    }

    /// `log Z − n log 6`.
    pub fn log_z_ratio(&self) -> f64 {
        self.log_z_ratio
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.values().copied().collect::<NeumaierSum>().total()
    }

    /// `E[m]`.
    pub fn mean(&self) -> [f64; 3] {
        let mut acc = [NeumaierSum::new(); 3];
        for (m, &p) in &self.weights {
            for c in 0..3 {
                acc[c].add(p * m[c] as f64);
            }
        }
        acc.map(|a| a.total())
    }

    /// Covariance of `m/√n`.
    pub fn covariance(&self) -> [[f64; 3]; 3] {
        let mean = self.mean();
        let mut acc = [[NeumaierSum::new(); 3]; 3];
        for (m, &p) in &self.weights {
            for a in 0..3 {
                for b in 0..3 {
                    acc[a][b].add(p * (m[a] as f64) * (m[b] as f64));
                }
            }
        }
        let n = self.n as f64;
        let mut out = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                out[a][b] = (acc[a][b].total() - mean[a] * mean[b]) / n;
            }
        }
        out
    }

    /// Probability that pairwise majority has a Condorcet winner, i.e. the
    /// sign pattern of `m` lies in `NAE₃`. Requires odd `n`.
    pub fn condorcet_probability(&self) -> Result<f64> {
        if self.n.is_multiple_of(2) {
            return Err(Error::Tie { pair: 0, voters: self.n });
        }
        let mut acc = NeumaierSum::new();
        for (m, &p) in &self.weights {
            let all_pos = m.iter().all(|&x| x > 0);
            let all_neg = m.iter().all(|&x| x < 0);
            if !(all_pos || all_neg) {
                acc.add(p);
            }
        }
        Ok(acc.total())
    }
}

/// Exact summary statistics of the three-candidate mean-field model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationSummary {
    pub n: usize,
    pub beta: f64,
    /// `log Z − n log 6`.
    pub log_z_ratio: f64,
    /// Covariance of `m/√n` in `φ̃` coordinates.
    pub covariance: [[f64; 3]; 3],
    /// Probability of a Condorcet winner; `None` for even `n`, where
    /// pairwise ties have positive probability.
    pub p_condorcet: Option<f64>,
}

/// Terms below `best − PRUNE` (natural log) are skipped. With at most
/// `n³/6 ≈ 10¹¹` terms at the voter cap the neglected mass is below
/// `10⁻¹⁵` relative.
const PRUNE: f64 = 60.0;

#[derive(Clone, Copy, Default)]
struct Acc {
    scale: f64,
    z: NeumaierSum,
    k1_sq: NeumaierSum,
    d_sq: NeumaierSum,
    cross: NeumaierSum,
    v_sq: NeumaierSum,
    paradox: NeumaierSum,
}

impl Acc {
    fn empty() -> Self {
        Self { scale: f64::NEG_INFINITY, ..Default::default() }
    }

    fn rescale(&mut self, new_scale: f64) {
        if self.scale == f64::NEG_INFINITY {
            self.scale = new_scale;
            return;
        }
        let f = (self.scale - new_scale).exp();
        for s in [&mut self.z, &mut self.k1_sq, &mut self.d_sq, &mut self.cross, &mut self.v_sq, &mut self.paradox] {
            *s = [s.total() * f].into_iter().collect();
        }
        self.scale = new_scale;
    }
}

/// Log-probabilities of a simple random walk of `len` steps at positions
/// `−len, −len+2, …, len`.
fn walk_log_probs(lf: &LogFactorials, len: usize) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    (0..=len).map(|j| lf.ln_choose(len, j) - len as f64 * ln2).collect()
}

/// Exact `log Z`, covariance and Condorcet probability in `O(n³)` time and
/// `O(n)` memory per worker.
pub fn magnetization_summary(spec: &ModelSpec) -> Result<MagnetizationSummary> {
    check_spec(spec)?;
    let n = spec.n();
    if n > SUMMARY_MAX_VOTERS {
        return Err(Error::Capacity {
            what: "voters for the magnetization summary",
            requested: n as u128,
            limit: SUMMARY_MAX_VOTERS as u128,
        });
    }
    let beta = spec.beta();
    let nf = n as f64;
    let lf = LogFactorials::new(n);
    let (ln13, ln23) = ((1.0f64 / 3.0).ln(), (2.0f64 / 3.0).ln());

    let per_n = |big_n: usize, floor: f64| -> Acc {
        let m_len = n - big_n;
        let lbase = lf.ln_choose(n, big_n) + big_n as f64 * ln23 + m_len as f64 * ln13;
        let wn = walk_log_probs(&lf, big_n);
        let wm = walk_log_probs(&lf, m_len);
        let pos = |j: usize, len: usize| 2 * j as i64 - len as i64;

        // Tilted law of v, its second moment and P(|v| < c).
        let a: Vec<f64> = wn
            .iter()
            .enumerate()
            .map(|(j, &l)| {
                let v = pos(j, big_n) as f64;
                l + beta / nf * v * v
            })
            .collect();
        let ls = logsumexp(&a);
        let pv: Vec<f64> = a.iter().map(|&x| (x - ls).exp()).collect();
        let v2: f64 = pv.iter().enumerate().map(|(j, &p)| p * (pos(j, big_n) as f64).powi(2)).sum();
        // inside[c] = P(|v| < c) for c = 0..=big_n + 1.
        let mut inside = vec![0.0; big_n + 2];
        {
            let mut by_abs = vec![0.0; big_n + 1];
            for (j, &p) in pv.iter().enumerate() {
                by_abs[pos(j, big_n).unsigned_abs() as usize] += p;
            }
            let mut c = NeumaierSum::new();
            for k in 0..=big_n {
                inside[k] = c.total();
                c.add(by_abs[k]);
            }
            inside[big_n + 1] = c.total();
        }
        let p_inside = |c: usize| if c > big_n { 1.0 } else { inside[c] };

        // Envelope of G(u) = log b(N,u) + (β/n)u², a bound for the u-part of a term.
        let g: Vec<f64> = wn
            .iter()
            .enumerate()
            .map(|(j, &l)| {
                let u = pos(j, big_n) as f64;
                l + beta / nf * u * u
            })
            .collect();
        // env[r] = max over |u| ≥ r of G(u), for r over the attainable |u|.
        let mut env_by_abs = vec![f64::NEG_INFINITY; big_n + 1];
        for (j, &x) in g.iter().enumerate() {
            let r = pos(j, big_n).unsigned_abs() as usize;
            env_by_abs[r] = env_by_abs[r].max(x);
        }
        for r in (0..big_n).rev() {
            env_by_abs[r] = env_by_abs[r].max(env_by_abs[r + 1]);
        }

        let mut acc = Acc::empty();
        let mut best = floor;
        let mut row = Vec::with_capacity(big_n + 1);
        for (i, &lk) in wm.iter().enumerate() {
            let k1 = pos(i, m_len);
            let k1f = k1 as f64;
            let r0 = lbase + ls + lk + beta / nf * k1f * k1f;
            let need = best - PRUNE - r0 - beta / nf * k1f * k1f;
            if env_by_abs[0] < need {
                continue;
            }
            // Largest |u| whose envelope still clears the threshold.
            let reach = env_by_abs.partition_point(|&e| e >= need).saturating_sub(1);
            let j_lo = (big_n - reach.min(big_n)) / 2;
            let j_hi = (big_n + reach.min(big_n)) / 2;
            row.clear();
            let mut row_max = f64::NEG_INFINITY;
            for j in j_lo..=j_hi {
                let u = pos(j, big_n);
                let d = (u - k1) as f64;
                let t = r0 + wn[j] + beta / (2.0 * nf) * d * d;
                row_max = row_max.max(t);
                row.push(t);
            }
            if row_max == f64::NEG_INFINITY {
                continue;
            }
            best = best.max(row_max);
            if row_max > acc.scale {
                acc.rescale(row_max);
            }
            let p_in = p_inside(k1.unsigned_abs() as usize);
            let (mut z, mut d_sq, mut cross, mut para) = (0.0, 0.0, 0.0, 0.0);
            for (off, &t) in row.iter().enumerate() {
                let w = (t - acc.scale).exp();
                let u = pos(j_lo + off, big_n);
                let d = (u - k1) as f64;
                z += w;
                d_sq += w * d * d;
                cross += w * d * k1f;
                if (k1 > 0 && u > k1) || (k1 < 0 && u < k1) {
                    para += w;
                }
            }
            acc.z.add(z);
            acc.k1_sq.add(z * k1f * k1f);
            acc.d_sq.add(d_sq);
            acc.cross.add(cross);
            acc.v_sq.add(z * v2);
            acc.paradox.add(para * p_in);
        }
        acc
    };

    // A genuine term, used as the pruning floor for every N.
    let floor = {
        let n0 = (2 * n) / 3;
        let m0 = n - n0;
        let wn = walk_log_probs(&lf, n0);
        let wm = walk_log_probs(&lf, m0);
        let lbase = lf.ln_choose(n, n0) + n0 as f64 * ln23 + m0 as f64 * ln13;
        let a: Vec<f64> = wn
            .iter()
            .enumerate()
            .map(|(j, &l)| {
                let v = (2 * j as i64 - n0 as i64) as f64;
                l + beta / nf * v * v
            })
            .collect();
        let (ju, ik) = (n0 / 2, m0 / 2);
        let u = (2 * ju as i64 - n0 as i64) as f64;
        let k1 = (2 * ik as i64 - m0 as i64) as f64;
        lbase + logsumexp(&a) + wm[ik] + wn[ju] + beta / (2.0 * nf) * (2.0 * k1 * k1 + (u - k1).powi(2))
    };

    let parts: Vec<Acc> = (0..=n).into_par_iter().map(|big_n| per_n(big_n, floor)).collect();
    let scale = parts.iter().map(|a| a.scale).fold(f64::NEG_INFINITY, f64::max);
    let mut tot = Acc { scale, ..Acc::default() };
    for p in &parts {
        if p.scale == f64::NEG_INFINITY {
            continue;
        }
        let f = (p.scale - scale).exp();
        tot.z.add(p.z.total() * f);
        tot.k1_sq.add(p.k1_sq.total() * f);
        tot.d_sq.add(p.d_sq.total() * f);
        tot.cross.add(p.cross.total() * f);
        tot.v_sq.add(p.v_sq.total() * f);
        tot.paradox.add(p.paradox.total() * f);
    }
    let z = tot.z.total();
    let e = |s: &NeumaierSum| s.total() / z / nf;
    let (ek1, ed, ecross, ev) = (e(&tot.k1_sq), e(&tot.d_sq), e(&tot.cross), e(&tot.v_sq));
    // m₁ = u − k₁, m₂ = k₁ − v, m₃ = k₁ + v; odd moments of v vanish.
    let covariance = [
        [ed, ecross, ecross],
        [ecross, ek1 + ev, ek1 - ev],
        [ecross, ek1 - ev, ek1 + ev],
    ];
    let p_condorcet = (n % 2 == 1).then(|| 1.0 - tot.paradox.total() / z);
    Ok(MagnetizationSummary { n, beta, log_z_ratio: scale + z.ln(), covariance, p_condorcet })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_sums_to_one_and_respects_parity() {
        for n in [2, 5, 8] {
            let law = magnetization_dp(&ModelSpec::mean_field(3, n, 0.6).unwrap()).unwrap();
            assert!((law.total_mass() - 1.0).abs() < 1e-12);
            for m in law.weights().keys() {
                assert!(m.iter().all(|&x| (x - n as i32).rem_euclid(2) == 0));
            }
        }
    }

    #[test]
    fn three_voter_condorcet_at_zero_beta() {
        let law = magnetization_dp(&ModelSpec::mean_field(3, 3, 0.0).unwrap()).unwrap();
        assert!((law.condorcet_probability().unwrap() - 17.0 / 18.0).abs() < 1e-14);
        let even = magnetization_dp(&ModelSpec::mean_field(3, 4, 0.0).unwrap()).unwrap();
        assert!(matches!(even.condorcet_probability(), Err(Error::Tie { .. })));
    }

    #[test]
    fn summary_matches_full_law() {
        for n in [1, 4, 5, 9, 14, 21] {
            for beta in [0.0, 0.5, 1.0, 1.6] {
                let spec = ModelSpec::mean_field(3, n, beta).unwrap();
                let law = magnetization_dp(&spec).unwrap();
                let sum = magnetization_summary(&spec).unwrap();
                assert!(
                    (law.log_z_ratio() - sum.log_z_ratio).abs() < 1e-11 * law.log_z_ratio().abs().max(1.0),
                    "n={n} β={beta}: {} vs {}",
                    law.log_z_ratio(),
                    sum.log_z_ratio
                );
                let (c1, c2) = (law.covariance(), sum.covariance);
                for a in 0..3 {
                    for b in 0..3 {
                        assert!((c1[a][b] - c2[a][b]).abs() < 1e-10, "n={n} β={beta} ({a},{b})");
                    }
                }
                if n % 2 == 1 {
                    let p = law.condorcet_probability().unwrap();
                    assert!((p - sum.p_condorcet.unwrap()).abs() < 1e-12);
                } else {
                    assert!(sum.p_condorcet.is_none());
                }
            }
        }
    }

    #[test]
    fn summary_reference_values() {
        // Independent brute-force values over 6⁵ profiles.
        let s = magnetization_summary(&ModelSpec::mean_field(3, 5, 0.5).unwrap()).unwrap();
        assert!((s.log_z_ratio - 0.98916591254679).abs() < 1e-12);
        assert!((s.p_condorcet.unwrap() - 0.96507603370791).abs() < 1e-12);
    }

    #[test]
    fn wrong_model_is_rejected() {
        assert!(magnetization_dp(&ModelSpec::mean_field(4, 3, 0.1).unwrap()).is_err());
        assert!(magnetization_dp(&ModelSpec::matching(3, 3, 0.1).unwrap()).is_err());
        assert!(matches!(
            magnetization_dp(&ModelSpec::mean_field(3, 65, 0.1).unwrap()),
            Err(Error::Capacity { .. })
        ));
    }
}
