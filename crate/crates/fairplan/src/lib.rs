//! FOND planning and reactive synthesis for LTL/LTLf goals under three
//! environment assumptions: none, stochastic fairness (almost-sure
//! enforcement) and state-action fairness.
//!
//! The pipeline compiles goals to deterministic Rabin word automata,
//! forms the synchronous product with an explicit-state domain and solves
//! the resulting Rabin game. Stochastic fairness is handled separately by
//! end-component analysis on transition supports. The crate also ships a
//! generator for a family of planning instances derived from alternating
//! Turing machines, used as end-to-end stress fixtures.

pub mod automata;
pub mod domain;
pub mod games;
pub mod hardgen;
pub mod logic;
pub mod par;
pub mod pipeline;
pub mod stochastic;

pub use domain::{Domain, DomainLasso, PolicyMachine, RabinGame};
pub use logic::{Dialect, Formula, Lasso, Letter};
