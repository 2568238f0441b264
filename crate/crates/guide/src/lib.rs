//! The chapters of `book/` as modules, so that `cargo test` compiles and
//! runs every Rust snippet in them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/rankings.md")]
pub mod rankings {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/sampling.md")]
pub mod sampling {}

#[doc = include_str!("../../../book/src/meanfield.md")]
pub mod meanfield {}

#[doc = include_str!("../../../book/src/closed_forms.md")]
pub mod closed_forms {}

#[doc = include_str!("../../../book/src/elections.md")]
pub mod elections {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
