//! Scalar reference governor with a dynamic overshoot constraint.
//!
//! Each step picks the largest `kappa in [0, 1]` such that
//! `v = v_prev + kappa (r - v_prev)` keeps `(x, v)` inside both the dynamic
//! MAS selected for the current `(r, y_tr)` and the static MAS.

use std::sync::Arc;

use thiserror::Error;

use crate::mas::{
    select_dynamic_mas, select_dynamic_side, DynamicMasPair, MasCase, MasRepresentation,
    Orientation, MEMBERSHIP_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GovernorError {
    #[error("dynamic MAS has state dimension {dynamic}, static MAS has {static_dim}")]
    Dimension { dynamic: usize, static_dim: usize },
    #[error("dynamic MAS pair representations disagree on state dimension")]
    PairDimension,
    #[error("initial reference must be finite")]
    NonFinite,
}

/// Half-width of the band around `r`, relative to `|r|`, in which `y_tr`
/// counts as touching the reference. Relative so that scaling `(r, x, v)`
/// never changes a decision.
pub const TIE_TOL: f64 = 1e-9;

/// Per-row step size: `min(n/d, 1)` if `n > 0, d > 0`; `1` if `n > 0, d <= 0`;
/// `0` if `n <= 0`.
pub fn kappa_row(n: f64, d: f64) -> f64 {
    if n > 0.0 {
        if d > 0.0 {
            (n / d).min(1.0)
        } else {
            1.0
        }
    } else {
        0.0
    }
}

/// Largest admissible `kappa` against `rep` at the given orientation and
/// scale, and whether `(x, v_prev)` itself lies in the set up to a relative
/// tolerance of `MEMBERSHIP_TOL`.
pub fn kappa_against(
    rep: &MasRepresentation,
    orientation: Orientation,
    scale: f64,
    x: &[f64],
    v_prev: f64,
    r: f64,
) -> (f64, bool) {
    let n_x = rep.state_dim();
    let sign = match orientation {
        Orientation::Le => 1.0,
        Orientation::Ge => -1.0,
    };
    let step = r - v_prev;
    let mut kappa = 1.0_f64;
    let mut feasible = true;
    for (row, &h) in rep.coeffs().row_iter().zip(rep.h()) {
        let lhs = crate::numerics::dot(&row[..n_x], x) + row[n_x] * v_prev;
        let n = sign * (scale * h - lhs);
        let d = sign * row[n_x] * step;
        // Tolerance proportional to the terms of the row, so that scaling
        // `(x, v_prev, r)` together never changes the verdict.
        let size = (scale * h).abs()
            + row[..n_x]
                .iter()
                .zip(x)
                .map(|(c, e)| (c * e).abs())
                .sum::<f64>()
            + (row[n_x] * v_prev).abs();
        let tol = MEMBERSHIP_TOL * size;
        let k_row = if n < -tol {
            feasible = false;
            0.0
        } else if n <= 0.0 {
            // On the boundary up to round-off: moving is allowed only away
            // from it, as the exact LP would decide.
            if d > 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            kappa_row(n, d)
        };
        kappa = kappa.min(k_row);
    }
    (kappa, feasible)
}

/// Output of one governor step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GovernorDecision {
    pub v: f64,
    pub kappa_tr: f64,
    pub kappa_st: f64,
    pub kappa_star: f64,
    /// `None` for filters that do not consult a dynamic MAS.
    pub mas_case: Option<MasCase>,
    /// Whether `(x, v_prev)` satisfied every consulted set.
    pub feasible: bool,
}

/// Anything that maps `(x, r, y_tr)` to an applied reference.
pub trait ReferenceFilter {
    fn step(&mut self, x: &[f64], r: f64, y_tr: f64) -> GovernorDecision;
    fn reset(&mut self, v_prev: f64);
    fn v_prev(&self) -> f64;
}

/// Reference governor with a dynamic constraint (RG-DC).
#[derive(Clone, Debug)]
pub struct GovernorState {
    v_prev: f64,
    pair: Arc<DynamicMasPair>,
    static_mas: Option<Arc<MasRepresentation>>,
    epsilon: f64,
}

impl GovernorState {
    pub fn new(
        pair: Arc<DynamicMasPair>,
        static_mas: Option<Arc<MasRepresentation>>,
        v_init: f64,
    ) -> Result<Self, GovernorError> {
        if pair.minus.state_dim() != pair.plus.state_dim() {
            return Err(GovernorError::PairDimension);
        }
        if let Some(st) = &static_mas {
            if st.state_dim() != pair.state_dim() {
                return Err(GovernorError::Dimension {
                    dynamic: pair.state_dim(),
                    static_dim: st.state_dim(),
                });
            }
        }
        if !v_init.is_finite() {
            return Err(GovernorError::NonFinite);
        }
        let epsilon = pair.epsilon();
        Ok(Self {
            v_prev: v_init,
            pair,
            static_mas,
            epsilon,
        })
    }

    pub fn pair(&self) -> &DynamicMasPair {
        &self.pair
    }

    pub fn static_mas(&self) -> Option<&MasRepresentation> {
        self.static_mas.as_deref()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `kappa_tr` against the dynamic MAS chosen by the sign table, with the
    /// selected case.
    pub fn rg_dc_kappa(&self, x: &[f64], r: f64, y_tr: f64) -> (f64, MasCase) {
        let (kappa, _, case) = self.dynamic_part(x, r, y_tr);
        (kappa, case)
    }

    // Inside the tie band the `<=` side is tried first; the `>=` side is used
    // only if it admits `(x, v_prev)` where the `<=` side does not. This keeps
    // round-off in a touching `y_tr` from reporting a spurious infeasibility.
    fn dynamic_part(&self, x: &[f64], r: f64, y_tr: f64) -> (f64, bool, MasCase) {
        let eval = |below: bool| {
            let sel = select_dynamic_side(&self.pair, r, below);
            let (kappa, feasible) =
                kappa_against(sel.rep, sel.orientation, sel.scale, x, self.v_prev, r);
            (kappa, feasible, sel.case)
        };
        if (y_tr - r).abs() > TIE_TOL * r.abs() {
            let sel = select_dynamic_mas(&self.pair, r, y_tr);
            return eval(sel.orientation == Orientation::Le);
        }
        let le = eval(true);
        if le.1 {
            return le;
        }
        let ge = eval(false);
        if ge.1 {
            ge
        } else {
            le
        }
    }

    /// `kappa_st` against the static MAS; 1 when none is configured.
    pub fn rg_static_kappa(&self, x: &[f64], r: f64) -> f64 {
        self.static_part(x, r).0
    }

    fn static_part(&self, x: &[f64], r: f64) -> (f64, bool) {
        match &self.static_mas {
            Some(st) => kappa_against(st, Orientation::Le, 1.0, x, self.v_prev, r),
            None => (1.0, true),
        }
    }

    pub fn govern_step(&mut self, x: &[f64], r: f64, y_tr: f64) -> GovernorDecision {
        let (kappa_tr, feas_tr, case) = self.dynamic_part(x, r, y_tr);
        let (kappa_st, feas_st) = self.static_part(x, r);
        let kappa_star = kappa_tr.min(kappa_st);
        let v = self.v_prev + kappa_star * (r - self.v_prev);
        self.v_prev = v;
        GovernorDecision {
            v,
            kappa_tr,
            kappa_st,
            kappa_star,
            mas_case: Some(case),
            feasible: feas_tr && feas_st,
        }
    }
}

impl ReferenceFilter for GovernorState {
    fn step(&mut self, x: &[f64], r: f64, y_tr: f64) -> GovernorDecision {
        self.govern_step(x, r, y_tr)
    }

    fn reset(&mut self, v_prev: f64) {
        self.v_prev = v_prev;
    }

    fn v_prev(&self) -> f64 {
        self.v_prev
    }
}

/// Applies the reference unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct Passthrough {
    v_prev: f64,
}

impl ReferenceFilter for Passthrough {
    fn step(&mut self, _x: &[f64], r: f64, _y_tr: f64) -> GovernorDecision {
        self.v_prev = r;
        GovernorDecision {
            v: r,
            kappa_tr: 1.0,
            kappa_st: 1.0,
            kappa_star: 1.0,
            mas_case: None,
            feasible: true,
        }
    }

    fn reset(&mut self, v_prev: f64) {
        self.v_prev = v_prev;
    }

    fn v_prev(&self) -> f64 {
        self.v_prev
    }
}
