//! Quantitative runtime verification with symbolic weighted automata.
//!
//! Specifications (discrete-time STL or symbolic regular expressions) are
//! translated into symbolic automata whose guards are interval predicates.
//! Weighting each edge by the distance from the current sample to its guard
//! and running a shortest-path style recursion in an idempotent semiring
//! gives the distance of a trace to the language of the specification.

pub mod automaton;
pub mod distance;
pub mod exec;
pub mod fixtures;
pub mod gen;
pub mod monitor;
pub mod predicate;
pub mod semiring;
pub mod spec;
pub mod suites;
pub mod syntax;
