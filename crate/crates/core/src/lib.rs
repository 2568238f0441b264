//! Gibbs-measure models of correlated voters over rankings.
//!
//! Voters rank `q` candidates. A ranking is embedded as the `±1` vector of
//! its pairwise comparisons ([`perm::embed`]), and the voter models are
//! exponential families in those vectors: a mean-field model with a phase
//! transition at `β = 3/4` (for `q = 3`), a perfect-matching model, and
//! models on arbitrary graphs ([`models`]).
//!
//! The crate provides exact oracles (enumeration, the magnetization sum),
//! samplers (Glauber dynamics, exact pair draws), the mean-field variational
//! solver ([`meanfield`]), closed-form limits of the Condorcet probability
//! ([`closed_forms`]) and tools to evaluate IIA constitutions
//! ([`elections`]).
//!
//! ```
//! use correlated_voters::models::{condorcet_probability, CondorcetMethod, ModelSpec};
//!
//! let spec = ModelSpec::mean_field(3, 3, 0.0).unwrap();
//! let p = condorcet_probability(&spec, CondorcetMethod::ExactEnum, 0).unwrap();
//! assert!((p.value - 17.0 / 18.0).abs() < 1e-12);
//! ```

pub mod closed_forms;
pub mod elections;
pub mod error;
pub mod meanfield;
pub mod models;
pub mod numeric;
pub mod perm;
pub mod stats;
pub mod tilt;

pub use error::{Error, Result};
