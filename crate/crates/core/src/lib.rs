//! Learning in structured Stackelberg games over finite context sets.
//!
//! Exact rational arithmetic is used everywhere: games, strategies, LP
//! solutions and dimension values are all `BigRational`.

pub mod decision_list;
pub mod dims;
pub mod distributional;
pub mod error;
pub mod game;
pub mod hypothesis;
pub mod lp;
pub mod online;
pub mod polytope;
pub mod presets;
pub mod rational;

pub use error::{Error, Result};
pub use game::{best_response, leader_utility_mixed, MixedStrategy, StackelbergGame};
pub use rational::Rational;
