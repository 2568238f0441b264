//! Asymptotic Condorcet-winner probabilities in closed form.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::meanfield::BETA_CRITICAL;

/// Points closer than this to `β = 3/4` count as critical.
pub const CRITICAL_TOL: f64 = 1e-12;

fn acos_checked(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("arccos argument {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// `E[sgn(Y₁) sgn(Y₂)] = 1 − 2 arccos(ρ)/π` for a centred Gaussian pair with
/// covariance `sigma`.
pub fn gaussian_sign_corr(sigma: [[f64; 2]; 2]) -> Result<f64> {
    let [[a, b], [c, d]] = sigma;
    if ![a, b, c, d].iter().all(|x| x.is_finite()) || a <= 0.0 || d <= 0.0 {
        return Err(argument("covariance needs finite entries and positive variances"));
    }
    if (b - c).abs() > 1e-12 * (1.0 + b.abs()) {
        return Err(argument("covariance must be symmetric"));
    }
    let rho = b / (a * d).sqrt();
    if rho.abs() > 1.0 + 1e-12 {
        return Err(argument(format!("correlation {rho} outside [-1, 1]")));
    }
    Ok(1.0 - 2.0 * acos_checked(rho)? / PI)
}

/// Limit probability of a Condorcet winner in the three-candidate
/// mean-field model: `(3/2π) arccos(3/(4β−9))` below `β = 3/4` and 1 above.
pub fn guilbaud_meanfield(beta: f64) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(argument(format!("β must be finite and non-negative, got {beta}")));
    }
    if (beta - BETA_CRITICAL).abs() < CRITICAL_TOL {
        return Err(Error::Domain("no closed form at the critical point β = 3/4".into()));
    }
    if beta > BETA_CRITICAL {
        return Ok(1.0);
    }
    Ok(1.5 / PI * acos_checked(3.0 / (4.0 * beta - 9.0))?)
}

/// Limit probability of a Condorcet winner in the three-candidate matching
/// model (voters in interacting pairs).
pub fn guilbaud_matching(beta: f64) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(argument(format!("β must be finite and non-negative, got {beta}")));
    }
    // Divide through by e^{3β} so large β stays finite.
    let e = |k: f64| (k * beta - 3.0 * beta).exp();
    let sh3 = 0.5 * (1.0 - e(-6.0));
    let ch3 = 0.5 * (1.0 + e(-6.0));
    let sh1 = 0.5 * (e(1.0) - e(-1.0));
    let ch1 = 0.5 * (e(1.0) + e(-1.0));
    let den = 3.0 * (ch3 + 2.0 * ch1);
    let a = (sh3 + 2.0 * sh1) / den;
    let b = (3.0 * sh3 + 2.0 * sh1) / den;
    Ok(1.5 / PI * acos_checked((-1.0 / 3.0 - a) / (1.0 + b))?)
}

/// Which closed form a sweep evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepModel {
    MeanField,
    Matching,
}

impl fmt::Display for SweepModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepModel::MeanField => "meanfield",
            SweepModel::Matching => "matching",
        })
    }
}

impl std::str::FromStr for SweepModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "meanfield" | "mean-field" => Ok(SweepModel::MeanField),
            "matching" => Ok(SweepModel::Matching),
            _ => Err(argument(format!("unknown model '{s}', expected meanfield or matching"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub beta: f64,
    pub value: f64,
    pub model: SweepModel,
}

pub fn evaluate(model: SweepModel, beta: f64) -> Result<f64> {
    match model {
        SweepModel::MeanField => guilbaud_meanfield(beta),
        SweepModel::Matching => guilbaud_matching(beta),
    }
}

/// Evaluates `model` on each grid point. Errors name the offending index.
pub fn sweep(model: SweepModel, grid: &[f64]) -> Result<Vec<SweepPoint>> {
    grid.iter()
        .enumerate()
        .map(|(i, &beta)| {
            evaluate(model, beta)
                .map(|value| SweepPoint { beta, value, model })
                .map_err(|e| annotate(e, i, beta))
        })
        .collect()
}

fn annotate(e: Error, i: usize, beta: f64) -> Error {
    let at = format!("grid point {i} (β = {beta})");
    match e {
        Error::Domain(m) => Error::Domain(format!("{at}: {m}")),
        Error::Argument(m) => Error::Argument(format!("{at}: {m}")),
        other => other,
    }
}

/// `β₀ + i·step` for `i = 0, 1, …` while within `end` (inclusive up to a
/// relative slack of `1e−9` steps).
pub fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if ![start, end, step].iter().all(|x| x.is_finite()) || step <= 0.0 || end < start {
        return Err(argument(format!("bad grid {start}:{end}:{step}")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(argument("grid has more than 10⁷ points"));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Location and value of the maximum of [`guilbaud_matching`].
pub fn matching_peak() -> (f64, f64) {
    golden_max(|b| guilbaud_matching(b).expect("finite β"), 0.05, 2.0, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GUILBAUD: f64 = 0.9122601719540891;

    #[test]
    fn sign_corr_examples() {
        assert_eq!(gaussian_sign_corr([[1.0, 0.0], [0.0, 1.0]]).unwrap(), 0.0);
        assert!((gaussian_sign_corr([[2.0, 2.0], [2.0, 2.0]]).unwrap() - 1.0).abs() < 1e-15);
        let r = gaussian_sign_corr([[1.0, -1.0 / 3.0], [-1.0 / 3.0, 1.0]]).unwrap();
        assert!((r + 0.2163).abs() < 1e-4);
        assert!((0.75 * (1.0 - r) - guilbaud_meanfield(0.0).unwrap()).abs() < 1e-12);
        assert!(gaussian_sign_corr([[0.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(gaussian_sign_corr([[1.0, 2.0], [2.0, 1.0]]).is_err());
    }

    #[test]
    fn meanfield_values() {
        assert!((guilbaud_meanfield(0.0).unwrap() - GUILBAUD).abs() < 1e-15);
        let v = guilbaud_meanfield(0.5).unwrap();
        assert!((v - 1.5 / PI * (-3.0f64 / 7.0).acos()).abs() < 1e-15);
        assert!((guilbaud_meanfield(0.75 - 1e-9).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(guilbaud_meanfield(0.9).unwrap(), 1.0);
        assert!(matches!(guilbaud_meanfield(0.75), Err(Error::Domain(_))));
        assert!(guilbaud_meanfield(-0.1).is_err());
    }

    #[test]
    fn matching_values() {
        assert!((guilbaud_matching(0.0).unwrap() - GUILBAUD).abs() < 1e-14);
        assert!((guilbaud_matching(50.0).unwrap() - guilbaud_matching(0.0).unwrap()).abs() < 1e-9);
        assert!(guilbaud_matching(1e6).unwrap().is_finite());
        assert!((guilbaud_matching(0.2).unwrap() - 0.92364838578523).abs() < 1e-12);
        assert!((guilbaud_matching(1.5).unwrap() - 0.91725440430283).abs() < 1e-12);
    }

    #[test]
    fn peak() {
        let (b, v) = matching_peak();
        assert!((b - 0.5 * (1.0 + 3f64.sqrt()).ln()).abs() < 1e-6);
        assert!((v - 0.929).abs() < 1e-3);
        let h = 1e-4;
        let d = (guilbaud_matching(b + h).unwrap() - guilbaud_matching(b - h).unwrap()) / (2.0 * h);
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn sweeps() {
        assert!(sweep(SweepModel::MeanField, &[]).unwrap().is_empty());
        let g = grid(0.0, 0.7, 0.01).unwrap();
        assert_eq!(g.len(), 71);
        let pts = sweep(SweepModel::MeanField, &g).unwrap();
        assert!(pts.windows(2).all(|w| w[0].value < w[1].value));
        let err = sweep(SweepModel::MeanField, &[0.5, 0.75]).unwrap_err().to_string();
        assert!(err.contains("grid point 1"), "{err}");
        assert_eq!(grid(0.0, 0.74, 0.01).unwrap().len(), 75);
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }
}
