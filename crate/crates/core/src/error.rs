use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the operation's domain of definition
    /// (mismatched sizes, malformed vectors, wrong model kind, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested exact computation exceeds a documented size cap.
    #[error("capacity exceeded: {what} = {requested} > {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    /// A well-formed input for which the quantity is undefined
    /// (critical temperature, intransitive vector, ...).
    #[error("outside domain: {0}")]
    Domain(String),

    /// A majority vote was tied and no tie-breaking source was supplied.
    #[error("majority tie on pair {pair} with {voters} voters; exact methods need an odd voter count")]
    Tie { pair: usize, voters: usize },

    /// A fixed-point iteration failed to reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, last iterate {last:?})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: [f64; 3],
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
