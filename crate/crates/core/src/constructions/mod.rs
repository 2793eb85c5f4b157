//! Building maps back from languages, and the Birkhoff-sum side conditions
//! that decide whether a blow-up can be made affine.

mod affine;
mod birkhoff;
mod denjoy;
mod measure;
mod splitting;
mod standard;
mod ttrok;

use thiserror::Error;

use crate::exactnum::ExactError;
use crate::iet::{BlowupError, IetError};
use crate::language::LanguageError;
use crate::order::OrderError;
use crate::sequence::SequenceError;

pub use affine::{affine_blowup, AffineBlowup, AffineSummary, DEFAULT_AFFINE_DEPTH};
pub use birkhoff::{
    birkhoff_feasibility, fourier_motzkin, theta_search, BirkhoffReport, LinearConstraint, NumericTrace,
    SideReport, TailVerdict, ThetaOutcome, ThetaSearch, ThetaVector, TRACE_TERMS,
};
pub use denjoy::{denjoy_blowup, BasePointJson, BlowupOrbitJson};
pub use measure::{estimate_measure, Measure, DEFAULT_MIN_WINDOW};
pub use splitting::{splitting_check, SplitVerdict, SplittingSpec};
pub use standard::{standard_from_language, VerificationReport};
pub use ttrok::{default_omega, ttrok_language, TtrokLanguage};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("letter {0} never occurs in the window")]
    MissingLetter(char),
    #[error("window of length {len} is shorter than the required {need}")]
    WindowTooShort { len: usize, need: usize },
    #[error("measure weights must be positive and one per letter")]
    InvalidMeasure,
    #[error("order condition fails: {0}")]
    OrderConditionFails(String),
    #[error("language is not recurrent: {0:?} never comes back")]
    NonRecurrentInput(String),
    #[error("Birkhoff sums do not converge: {0}")]
    DivergentBirkhoffSums(String),
    #[error("truncation cannot produce finitely many affine pieces: {0}")]
    TruncationTooCoarse(String),
    #[error("log-slope of letter {0} is irrational, so its slope cannot be represented exactly")]
    IrrationalTheta(char),
    #[error("invalid orbit: {0}")]
    InvalidOrbit(String),
    #[error("no nested chain of bispecial words: {0}")]
    NoBispecialChain(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Iet(#[from] IetError),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}
