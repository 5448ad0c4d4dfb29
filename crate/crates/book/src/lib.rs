//! Compiles the guide's Rust snippets as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/engine.md")]
pub mod engine {}
#[doc = include_str!("../../../book/src/valuations.md")]
pub mod valuations {}
#[doc = include_str!("../../../book/src/behavior.md")]
pub mod behavior {}
#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}
#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
