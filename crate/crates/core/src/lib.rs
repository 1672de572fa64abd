//! Exact computations in Thompson's group F and the first Grigorchuk group.
//!
//! Elements of F are canonical breakpoint lists with dyadic coordinates
//! ([`thompson::PlHomeo`]). On top of that the crate provides mixed words
//! (words with constants), oscillation regions, constructive inequality
//! solvers, the relations metric on marked groups, Britton reduction in
//! HNN extensions of F, and the Grigorchuk group word problem.

pub mod dyadic;
pub mod grigorchuk;
pub mod group;
pub mod hnn;
pub mod interval;
pub mod limits;
pub mod parse;
pub mod solvers;
pub mod thompson;
pub mod words;

pub use dyadic::{Dyadic, Rational};
pub use group::Group;
pub use interval::{Interval, IntervalSet};
pub use thompson::{generator_x, iota, partition_map, PlError, PlHomeo};
pub use parse::{parse_word, SymbolTable};
pub use words::{Letter, MixedWord, ReducedForm, VarLetter, WordError};
pub use grigorchuk::{GrigWord, Vertex};
pub use hnn::{HnnWord, MembershipOracle, Verdict};
pub use limits::{Backend, Distance, MarkedTuple};
pub use solvers::{Certificate, SolverError};
