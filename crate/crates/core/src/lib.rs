//! Compound conditionals over a finite Boolean algebra of events.
//!
//! A basic conditional `[a|b]` is true where `a ∧ b` holds, false where
//! `¬a ∧ b` holds and void elsewhere. Compound terms built with `~`, `&` and
//! `v` are evaluated as conditional random quantities with exact rational
//! values, and their previsions form a probability on the algebra of
//! conditionals.

pub mod algebra;
pub mod betting;
pub mod cli;
pub mod event;
pub mod laws;
pub mod model;
pub mod parse;
pub mod prevision;
pub mod probability;
pub mod rational;
pub mod sample;
pub mod term;

pub use event::{Event, WorldSpace};
pub use prevision::{PrevisionEngine, RandomQuantity};
pub use probability::ConditionalProbability;
pub use rational::Rational;
pub use term::CondTerm;
