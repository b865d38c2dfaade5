//! Dense linear algebra, matrix exponentials and a small simplex solver.

mod discretize;
mod lp;
mod matrix;

pub use discretize::{expm, zoh_discretize};
pub use lp::{
    solve_lp, solve_lp_min_geq, ConstraintSense, LpProblem, LpResult, LpStatus, Sense,
    FEASIBILITY_TOL, OPTIMALITY_TOL,
};
pub use matrix::{dot, Matrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("data length {len} does not match a {}x{} matrix", expected.0, expected.1)]
    Shape {
        expected: (usize, usize),
        len: usize,
    },
    #[error("row {row} has {len} entries, expected {expected}")]
    Ragged {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("sample time must be positive and finite, got {0}")]
    SampleTime(f64),
    #[error("LP dimension mismatch: objective {objective}, constraints {rows}x{cols}, rhs {rhs}")]
    LpDimension {
        objective: usize,
        rows: usize,
        cols: usize,
        rhs: usize,
    },
    #[error("LP data contains non-finite values")]
    NonFiniteLp,
    #[error("simplex breakdown: {0}")]
    LpBreakdown(&'static str),
}
