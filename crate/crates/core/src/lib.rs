//! Combinatorial decision dags and the distinction calculus around them.
//!
//! Programs over fixed-length bit strings are viewed as partitions of their
//! input space. From there the crate measures them (logical and Shannon
//! entropy), realizes them as decision trees (exact optimal and greedy),
//! compares them (pattern predicates, syntax/semantics distances) and grows
//! them at random. The [`codd`] module adds the higher-order layer: decision
//! dags that consume bit-string encodings of other dags, together with K and
//! S combinators and a pattern-based memoization rewrite.

pub mod bits;
pub mod cli;
pub mod codd;
pub mod dtree;
mod error;
pub mod growth;
pub mod partitions;
pub mod pattern;
pub mod rational;
pub mod seed;
pub mod stats;
pub mod synsem;

pub use bits::BitString;
pub use error::{Error, ErrorCategory, Result};
pub use partitions::{Distribution, InputSpace, Partition};
pub use rational::Rational;
