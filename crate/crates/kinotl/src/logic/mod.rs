//! Truncated-LTL formulas over hyperrectangle predicates and their
//! quantitative (robustness) semantics.
//!
//! Formulas are built from region-membership predicates with boolean
//! connectives and the unbounded temporal operators `F` (eventually) and
//! `G` (always), evaluated over finite sampled trajectories. Robustness is
//! a signed distance: positive means the trajectory satisfies the formula,
//! negative measures how badly it misses.
//!
//! Monitoring is incremental: each tree node carries a [`RobustnessState`]
//! (one value per subformula) and extending the trajectory by one sampled
//! edge segment folds the new samples into that state without revisiting
//! the whole prefix.

mod formula;
mod monitor;
mod parser;

pub use formula::{Formula, Predicate, PredicateKind};
pub use monitor::{CompiledFormula, RobustnessState};
pub use parser::{parse_formula, RegionTable};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown region `{0}` in formula")]
    UnknownRegion(String),
    #[error("predicate dimension {predicate} does not match state dimension {state}")]
    DimensionMismatch { predicate: usize, state: usize },
    #[error("robustness update over an empty segment")]
    EmptySegment,
}

/// Caps robustness at zero, keeping only the violation part.
#[inline]
pub fn capped(robustness: f64) -> f64 {
    robustness.min(0.0)
}
