//! Simulation and exact counting for the displacement gift exchange.
//!
//! Each player in turn either opens a wrapped gift or steals an opened one.
//! A victim must act at once, so a steal sets off a chain that runs until
//! somebody opens. A gift stolen in the current chain is locked until the
//! chain ends. After the last gift is opened, seat 1 may swap with anyone.
//!
//! ```
//! use giftex::counting::trajectory_count;
//!
//! assert_eq!(trajectory_count(5).unwrap().to_string(), "1248000");
//! ```
//!
//! Modules:
//! - [`engine`]: game state, legal moves, rounds and the final swap.
//! - [`valuation`]: valuation matrices and appearance signals.
//! - [`beliefs`]: quality posteriors and certainty equivalents.
//! - [`behavior`]: social costs, frustration, adaptive steal odds, biased selection.
//! - [`strategies`]: the six decision rules.
//! - [`counting`]: trajectory counts, closed form and dynamic program.
//! - [`harness`]: the factorial experiment.
//! - [`audit`]: invariant checks over whole games.

pub mod audit;
pub mod behavior;
pub mod beliefs;
pub mod counting;
pub mod engine;
mod error;
pub mod harness;
pub mod strategies;
pub mod valuation;

pub use error::{Error, Result};
