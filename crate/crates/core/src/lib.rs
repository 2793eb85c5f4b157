//! Symbolic languages of interval exchange transformations, computed exactly.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`] provides exact arithmetic in Q and Q(sqrt d);
//! * [`iet`] builds standard, affine and lazily blown-up interval exchanges and codes orbits;
//! * [`language`] holds finite-depth factorial languages and their combinatorics;
//! * [`order`] checks and searches order conditions on the alphabet;
//! * [`constructions`] rebuilds maps from languages and tests Birkhoff-sum feasibility;
//! * [`corpus`] ships named fixtures with their expected analysis results.

pub mod alphabet;
pub mod constructions;
pub mod corpus;
pub mod exactnum;
pub mod iet;
pub mod language;
pub mod order;
pub mod par;
pub mod sequence;

pub use alphabet::{Alphabet, Letter, Word};
pub use exactnum::ExactScalar;
