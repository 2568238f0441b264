//! Mean-field variational problem for three candidates, its Gaussian
//! high-temperature limit, and the covariance structure for general `q`.
//!
//! For three candidates the free energy per voter is the maximum over
//! `λ ∈ ℝ³` of
//!
//! ```text
//! Φ(s(λ)) = (β/2)‖s‖² − ⟨λ, s⟩ + log 2 + log(cosh a + cosh b + cosh c),
//! a = λ₁+λ₂−λ₃,  b = λ₁−λ₂+λ₃,  c = −λ₁+λ₂+λ₃,
//! ```
//!
//! where `s(λ)` is the mean of the tilt on `NAE₃`. Critical points satisfy
//! `λ = β s(λ)`, where `Φ = −(β/2)‖s‖² + log 2 + log(cosh a + cosh b + cosh c)`.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::perm::{num_pairs, pairs};

/// Critical inverse temperature of the three-candidate mean-field model.
pub const BETA_CRITICAL: f64 = 0.75;

/// Seed for the random directions in the start battery.
pub const START_SEED: u64 = 0x5eed_0003;

/// `(sinh/cosh weights)` for `a, b, c`, scaled by `e^{−max(|a|,|b|,|c|)}`
/// so nothing overflows.
fn scaled_terms(l: [f64; 3]) -> ([f64; 3], [f64; 3], f64) {
    let x = [l[0] + l[1] - l[2], l[0] - l[1] + l[2], -l[0] + l[1] + l[2]];
    let m = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut sh = [0.0; 3];
    let mut ch = [0.0; 3];
    for k in 0..3 {
        let (p, q) = ((x[k] - m).exp(), (-x[k] - m).exp());
        sh[k] = 0.5 * (p - q);
        ch[k] = 0.5 * (p + q);
    }
    (sh, ch, m)
}

/// Mean of `x ∈ NAE₃` under weights `∝ e^{⟨λ,x⟩}`.
pub fn s_of_lambda(lambda: [f64; 3]) -> [f64; 3] {
    let (sh, ch, _) = scaled_terms(lambda);
    let d = ch[0] + ch[1] + ch[2];
    [(sh[0] + sh[1] - sh[2]) / d, (sh[0] - sh[1] + sh[2]) / d, (-sh[0] + sh[1] + sh[2]) / d]
}

/// `log Σ_{x∈NAE₃} e^{⟨λ,x⟩} = log 2 + log(cosh a + cosh b + cosh c)`.
pub fn nae_log_partition(lambda: [f64; 3]) -> f64 {
    let (_, ch, m) = scaled_terms(lambda);
    std::f64::consts::LN_2 + m + (ch[0] + ch[1] + ch[2]).ln()
}

/// Covariance of `x ∈ NAE₃` under the tilt, the Jacobian of [`s_of_lambda`].
pub fn nae_covariance(lambda: [f64; 3]) -> Matrix3<f64> {
    let s = s_of_lambda(lambda);
    // Atoms ±u_k with u₁ = (1,1,−1), u₂ = (1,−1,1), u₃ = (−1,1,1) pair with a, b, c.
    let u = [[1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]];
    let (_, ch, _) = scaled_terms(lambda);
    let d = ch[0] + ch[1] + ch[2];
    let mut m = Matrix3::zeros();
    for k in 0..3 {
        // x xᵀ is the same for ±u_k, with total weight cosh/Σcosh.
        let w = ch[k] / d;
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += w * u[k][i] * u[k][j];
            }
        }
    }
    let sv = Vector3::from(s);
    m - sv * sv.transpose()
}

/// `Φ(s(λ))`: the mean-field objective at the mean of the tilt `λ`. At a
/// fixed point `λ = βs` it reduces to
/// `−(β/2)‖s‖² + log 2 + log(cosh a + cosh b + cosh c)`.
pub fn phi_objective(lambda: [f64; 3], beta: f64) -> f64 {
    let s = s_of_lambda(lambda);
    let ss: f64 = s.iter().map(|x| x * x).sum();
    let ls: f64 = lambda.iter().zip(&s).map(|(l, x)| l * x).sum();
    0.5 * beta * ss - ls + nae_log_partition(lambda)
}

/// Solution family, up to coordinate permutations and `λ ↦ −λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `λ = 0`.
    TrivialZero,
    /// `λ₁ = λ₂ = λ₃ ≠ 0`.
    Type1AllEqual,
    /// `λ₁ = 0`, `λ₂ = −λ₃`.
    Type2ZeroPair,
    /// `λ₁ = λ₂` with `λ₃` of the opposite sign.
    Type3TwoEqualOppositeSign,
    /// Converged but matching none of the above.
    Unknown,
}

/// Relative tolerance for equal coordinates after normalizing by `‖λ‖`.
pub const FAMILY_TOL: f64 = 1e-8;
/// Coordinates below this are zero.
pub const ZERO_TOL: f64 = 1e-10;

/// Classifies `λ` into a [`Family`].
pub fn classify(lambda: [f64; 3]) -> Family {
    if lambda.iter().all(|x| x.abs() < ZERO_TOL) {
        return Family::TrivialZero;
    }
    let norm = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
    let l = lambda.map(|x| x / norm);
    let eq = |a: f64, b: f64| (a - b).abs() < FAMILY_TOL;
    if eq(l[0], l[1]) && eq(l[1], l[2]) {
        return Family::Type1AllEqual;
    }
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        if l[i].abs() < FAMILY_TOL && eq(l[j], -l[k]) {
            return Family::Type2ZeroPair;
        }
    }
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        if eq(l[i], l[j]) && l[i] * l[k] < 0.0 {
            return Family::Type3TwoEqualOppositeSign;
        }
    }
    Family::Unknown
}

/// A converged solution of `λ = β s(λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfSolution {
    pub lambda: [f64; 3],
    pub s: [f64; 3],
    pub beta: f64,
    pub family: Family,
    pub objective: f64,
    /// `‖λ − β s(λ)‖`.
    pub residual: f64,
    pub iterations: usize,
}

impl MfSolution {
    fn from_lambda(lambda: [f64; 3], beta: f64, iterations: usize) -> Self {
        let s = s_of_lambda(lambda);
        Self {
            lambda,
            s,
            beta,
            family: classify(lambda),
            objective: phi_objective(lambda, beta),
            residual: residual(lambda, beta),
            iterations,
        }
    }
}

fn residual(lambda: [f64; 3], beta: f64) -> f64 {
    let s = s_of_lambda(lambda);
    (0..3).map(|k| (lambda[k] - beta * s[k]).powi(2)).sum::<f64>().sqrt()
}

/// Fixed-point solver settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Step `λ ← (1−γ)λ + γβs(λ)`.
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Finish with Newton steps on `λ − βs(λ)` (Jacobian `I − βΣ_λ`).
    pub newton: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { damping: 0.5, tolerance: 1e-12, max_iterations: 100_000, newton: true }
    }
}

/// Solves `λ = β s(λ)` from `start` with default options.
pub fn solve_fixed_point(beta: f64, start: [f64; 3]) -> Result<MfSolution> {
    solve_fixed_point_with(beta, start, &SolverOptions::default())
}

/// Damped fixed-point iteration, polished by Newton's method.
///
/// The damped map has the same fixed points as `λ ↦ βs(λ)` but converges
/// only linearly, with rate approaching one near `β = 3/4`; Newton steps
/// take the residual from about `1e−9` to rounding level.
pub fn solve_fixed_point_with(beta: f64, start: [f64; 3], opts: &SolverOptions) -> Result<MfSolution> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(argument(format!("β must be finite and non-negative, got {beta}")));
    }
    if start.iter().any(|x| !x.is_finite()) {
        return Err(argument("start must be finite"));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(argument("damping must lie in (0, 1]"));
    }
    let g = opts.damping;
    let mut l = start;
    let mut iterations = 0;
    let switch = if opts.newton { opts.tolerance.max(1e-9) } else { opts.tolerance };
    while iterations < opts.max_iterations {
        let r = residual(l, beta);
        if r < switch {
            break;
        }
        let s = s_of_lambda(l);
        for k in 0..3 {
            l[k] = (1.0 - g) * l[k] + g * beta * s[k];
        }
        iterations += 1;
    }
    if opts.newton {
        for _ in 0..50 {
            if residual(l, beta) < opts.tolerance * 1e-2 {
                break;
            }
            let s = s_of_lambda(l);
            let f = Vector3::new(l[0] - beta * s[0], l[1] - beta * s[1], l[2] - beta * s[2]);
            let j = Matrix3::identity() - nae_covariance(l) * beta;
            let Some(step) = j.lu().solve(&f) else { break };
            let next = [l[0] - step[0], l[1] - step[1], l[2] - step[2]];
            if residual(next, beta) >= residual(l, beta) {
                break;
            }
            l = next;
            iterations += 1;
        }
    }
    let r = residual(l, beta);
    if r < opts.tolerance {
        Ok(MfSolution::from_lambda(l, beta, iterations))
    } else {
        Err(Error::NonConvergence { iterations, residual: r, last: l })
    }
}

/// Starting points used by [`find_global_max`]: `t·(1,1,1)`, `t·(0,1,−1)`,
/// `t·(1,1,−1)` and `t·d` for a random unit `d`, for `t ∈ {0.1, 0.5, 1, 2}`.
pub fn start_battery() -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut out = Vec::new();
    for t in [0.1, 0.5, 1.0, 2.0] {
        out.push([t, t, t]);
        out.push([0.0, t, -t]);
        out.push([t, t, -t]);
        let d: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(d.map(|x| t * x / n));
    }
    out
}

/// The 12 images of `λ` under coordinate permutations and sign.
pub fn orbit(lambda: [f64; 3]) -> Vec<[f64; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out: Vec<[f64; 3]> = Vec::new();
    for sign in [1.0, -1.0] {
        for p in PERMS {
            let img = [sign * lambda[p[0]], sign * lambda[p[1]], sign * lambda[p[2]]];
            if !out.iter().any(|o| (0..3).all(|k| (o[k] - img[k]).abs() < 1e-9)) {
                out.push(img);
            }
        }
    }
    out
}

/// Direction of the invariant line or plane on which each family lives.
pub fn family_direction(family: Family) -> Option<[f64; 3]> {
    match family {
        Family::Type1AllEqual => Some([1.0, 1.0, 1.0]),
        Family::Type2ZeroPair => Some([0.0, 1.0, -1.0]),
        Family::Type3TwoEqualOppositeSign => Some([1.0, 1.0, -1.0]),
        Family::TrivialZero | Family::Unknown => None,
    }
}

/// Solves from `2·d` for the family's direction `d`. The iteration keeps
/// the symmetry of the start, so the result lies in the family's closure:
/// for `β ≤ 3` the only point with `λ₁ = λ₂ = λ₃` is the origin.
pub fn solve_family(beta: f64, family: Family) -> Result<MfSolution> {
    let d = family_direction(family).ok_or_else(|| argument(format!("no start direction for {family:?}")))?;
    solve_fixed_point(beta, d.map(|x| 2.0 * x))
}

/// Every converged solution from the start battery, one per start.
pub fn solve_battery(beta: f64) -> Vec<MfSolution> {
    start_battery().into_iter().filter_map(|s| solve_fixed_point(beta, s).ok()).collect()
}

/// Global maximizers of `Φ`: the symmetry orbit of the best solution found
/// from [`start_battery`]. Below `β = 3/4` this is the zero solution.
pub fn find_global_max(beta: f64) -> Result<Vec<MfSolution>> {
    let sols = solve_battery(beta);
    let top = sols
        .iter()
        .map(|s| s.objective)
        .fold(f64::NEG_INFINITY, f64::max);
    // Near β = 3/4 the landscape is flat and off-manifold starts can stop at
    // points that tie the best to rounding; prefer a classified one.
    let best = sols
        .iter()
        .filter(|s| s.objective >= top - 1e-12)
        .min_by_key(|s| (s.family == Family::Unknown) as u8)
        .ok_or(Error::NonConvergence { iterations: 0, residual: f64::NAN, last: [0.0; 3] })?;
    let mut out: Vec<MfSolution> = orbit(best.lambda)
        .into_iter()
        .map(|l| MfSolution::from_lambda(l, beta, best.iterations))
        .collect();
    out.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite"));
    Ok(out)
}

/// Limit of `Cov(m/√n)` for `β < 3/4`, in `φ̃` coordinates:
/// `(4β² − 15β + 9)⁻¹ [[9−4β, −3, −3], [−3, 9−4β, −3], [−3, −3, 9−4β]]`.
pub fn sigma_beta(beta: f64) -> Result<Matrix3<f64>> {
    if !(beta >= 0.0) {
        return Err(argument(format!("β must be non-negative, got {beta}")));
    }
    if beta >= BETA_CRITICAL {
        return Err(Error::Domain(format!("Σ_β is defined only for β < 3/4, got {beta}")));
    }
    let d = 4.0 * beta * beta - 15.0 * beta + 9.0;
    let a = (9.0 - 4.0 * beta) / d;
    let b = -3.0 / d;
    Ok(Matrix3::new(a, b, b, b, a, b, b, b, a))
}

/// `Σ₀`, the covariance of a uniform `φ̃(π)`.
pub fn sigma_zero() -> Matrix3<f64> {
    sigma_beta(0.0).expect("β = 0 is in range")
}

/// `lim (log Z_n − n log 6) = ½ log(det Σ_β / det Σ₀)` for `β < 3/4`.
pub fn log_z_limit(beta: f64) -> Result<f64> {
    let s = sigma_beta(beta)?;
    Ok(0.5 * (s.determinant() / sigma_zero().determinant()).ln())
}

fn check_q(q: usize) -> Result<()> {
    if !(3..=12).contains(&q) {
        return Err(argument(format!("covariance structure is provided for 3 ≤ q ≤ 12, got {q}")));
    }
    Ok(())
}

/// `E[φ(π)φ(π)ᵀ]` for uniform `π`, built from the pair-overlap rules.
pub fn covariance_matrix(q: usize) -> Result<DMatrix<f64>> {
    check_q(q)?;
    let p: Vec<(usize, usize)> = pairs(q).collect();
    let k = num_pairs(q);
    Ok(DMatrix::from_fn(k, k, |r, c| {
        let ((i, j), (a, b)) = (p[r], p[c]);
        if r == c {
            1.0
        } else if i == a || j == b {
            1.0 / 3.0
        } else if j == a || i == b {
            -1.0 / 3.0
        } else {
            0.0
        }
    }))
}

/// Eigenvalues of [`covariance_matrix`] grouped as `(value, multiplicity)`,
/// largest first.
pub fn eigen_summary(q: usize) -> Result<Vec<(f64, usize)>> {
    let m = covariance_matrix(q)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in ev {
        match out.last_mut() {
            Some((c, k)) if (*c - v).abs() < 1e-8 => {
                *c = (*c * *k as f64 + v) / (*k + 1) as f64;
                *k += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    Ok(out)
}

/// Second-order test at `λ = 0` for the general-`q` mean-field problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianCriterion {
    /// Largest eigenvalue of `βΣ² − Σ`.
    pub max_eigenvalue: f64,
    /// `β λ_max(Σ) > 1`, i.e. `β > 3/(q+1)`.
    pub low_temperature: bool,
}

pub fn hessian_criterion(beta: f64, q: usize) -> Result<HessianCriterion> {
    let s = covariance_matrix(q)?;
    let h = &s * &s * beta - &s;
    let max_eigenvalue = SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lmax = SymmetricEigen::new(s).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(HessianCriterion { max_eigenvalue, low_temperature: beta * lmax > 1.0 })
}
