//! Finitely determined maximal admissible sets (MAS).
//!
//! A MAS is stored as `H_x x + H_v v <= scale * h` (or `>=`), one row per
//! retained prediction-time constraint plus the tightened steady-state rows.

mod build;
mod export;
mod representation;
mod robust;
mod system;

pub use build::{
    build_dynamic_mas_pair, build_dynamic_representation, build_mas_for_output, build_static_mas,
    is_redundant, prediction_row, BuildOptions, Output, DEFAULT_MAX_INDEX, REDUNDANCY_TOL,
};
pub use export::write_mas_csv;
pub use representation::{
    contains, select_dynamic_mas, select_dynamic_side, shrink_for_disturbance, DynamicMasPair,
    MasCase, MasRepresentation, MasSelection, Orientation, RowTag, Shrunk, MEMBERSHIP_TOL,
};
pub use robust::{
    build_robust_dynamic_pair, build_robust_mas, build_robust_mas_polytopic,
    build_robust_mas_vertexwise, build_robust_polytopic_capped, RobustConstraint, RobustMethod,
    DEFAULT_MAX_DEPTH, DEFAULT_MAX_ROWS,
};
pub use system::{pll_continuous, ConstraintSet, DiscreteLtiSystem, UncertainSystem, DC_GAIN_TOL};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MasError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("system is not asymptotically stable (spectral radius {spectral_radius})")]
    Unstable { spectral_radius: f64 },
    #[error("DC gain from v to y_tr is {gain}, expected 1")]
    DcGain { gain: f64 },
    #[error("constraint set has no rows")]
    EmptyConstraints,
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("reference used for construction must be non-zero")]
    ZeroReference,
    #[error("no constant input satisfies the tightened steady-state constraints")]
    InfeasibleSteadyState,
    #[error("partially constructed set is empty; constraints are inconsistent")]
    InfeasibleConstraints,
    #[error("set is not finitely determined within {cap} prediction steps")]
    NotFinitelyDetermined { cap: usize },
    #[error("disturbance margins leave an empty set")]
    EmptyAfterShrink,
    #[error("robust construction exceeded {limit} rows")]
    RowLimit { limit: usize },
    #[error("uncertain system needs at least one vertex")]
    NoVertices,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
