use std::fmt;

use crate::numerics::{dot, solve_lp, LpProblem, LpResult, Matrix};

use super::MasError;

/// Slack allowed when testing membership, relative to `1 + |bound|`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `H z <= scale * h`
    Le,
    /// `H z >= scale * h`
    Ge,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Le => Orientation::Ge,
            Orientation::Ge => Orientation::Le,
        }
    }
}

/// Provenance of a MAS row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RowTag {
    /// Prediction time; `None` for the tightened steady-state rows.
    pub time: Option<usize>,
    /// Row of the constraint matrix `S` the inequality came from.
    pub source_row: usize,
}

impl RowTag {
    pub fn steady_state(source_row: usize) -> Self {
        Self {
            time: None,
            source_row,
        }
    }

    pub fn at(time: usize, source_row: usize) -> Self {
        Self {
            time: Some(time),
            source_row,
        }
    }

    pub fn is_steady_state(&self) -> bool {
        self.time.is_none()
    }
}

/// Finite representation `H_x x + H_v v (<= | >=) scale * h`.
#[derive(Clone, Debug, PartialEq)]
pub struct MasRepresentation {
    /// `[H_x | H_v]`, one row per inequality.
    coeffs: Matrix,
    h: Vec<f64>,
    tags: Vec<RowTag>,
    admissibility_index: usize,
    epsilon: f64,
    orientation: Orientation,
}

impl MasRepresentation {
    pub(crate) fn from_parts(
        coeffs: Matrix,
        h: Vec<f64>,
        tags: Vec<RowTag>,
        admissibility_index: usize,
        epsilon: f64,
        orientation: Orientation,
    ) -> Self {
        debug_assert_eq!(coeffs.rows(), h.len());
        debug_assert_eq!(coeffs.rows(), tags.len());
        Self {
            coeffs,
            h,
            tags,
            admissibility_index,
            epsilon,
            orientation,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.coeffs.cols() - 1
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `[H_x | H_v]`.
    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.coeffs.row(i)
    }

    pub fn h_x(&self) -> Matrix {
        self.coeffs
            .submatrix(0, 0, self.coeffs.rows(), self.state_dim())
    }

    pub fn h_v(&self) -> Vec<f64> {
        self.coeffs.col(self.state_dim())
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn tags(&self) -> &[RowTag] {
        &self.tags
    }

    pub fn steady_state_rows(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.tags[i].is_steady_state())
            .collect()
    }

    pub fn admissibility_index(&self) -> usize {
        self.admissibility_index
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Orientation the representation was constructed in.
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Per-row slack `scale*h - H z` (`<=`) or `H z - scale*h` (`>=`);
    /// non-negative entries are satisfied rows.
    pub fn slacks(&self, orientation: Orientation, scale: f64, x: &[f64], v: f64) -> Vec<f64> {
        assert_eq!(x.len(), self.state_dim(), "state dimension mismatch");
        let n = self.state_dim();
        self.coeffs
            .row_iter()
            .zip(&self.h)
            .map(|(row, &h)| {
                let lhs = dot(&row[..n], x) + row[n] * v;
                match orientation {
                    Orientation::Le => scale * h - lhs,
                    Orientation::Ge => lhs - scale * h,
                }
            })
            .collect()
    }

    /// Constraint matrix and RHS of the set in `<=` form at `scale`.
    pub fn as_le_system(&self, orientation: Orientation, scale: f64) -> (Matrix, Vec<f64>) {
        match orientation {
            Orientation::Le => (
                self.coeffs.clone(),
                self.h.iter().map(|h| scale * h).collect(),
            ),
            Orientation::Ge => (
                self.coeffs.scale(-1.0),
                self.h.iter().map(|h| -scale * h).collect(),
            ),
        }
    }

    /// Representation with rows removed where `keep` is false.
    pub fn retain_rows(&self, keep: &[bool]) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.retain_rows(keep);
        let pick = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .zip(keep)
                .filter(|(_, k)| **k)
                .map(|(x, _)| *x)
                .collect()
        };
        Self {
            coeffs,
            h: pick(&self.h),
            tags: self
                .tags
                .iter()
                .zip(keep)
                .filter(|(_, k)| **k)
                .map(|(t, _)| *t)
                .collect(),
            ..self.clone()
        }
    }
}

/// Membership of `(x, v)` in the set given by `rep`, `orientation` and `scale`.
pub fn contains(
    rep: &MasRepresentation,
    orientation: Orientation,
    scale: f64,
    x: &[f64],
    v: f64,
) -> bool {
    rep.slacks(orientation, scale, x, v)
        .iter()
        .zip(rep.h())
        .all(|(s, h)| *s >= -MEMBERSHIP_TOL * (1.0 + (scale * h).abs()))
}

/// The two constant representations that describe the dynamic MAS for every
/// reference value.
///
/// `minus` is built at `r = 1` with `y_tr <= 1` and steady state `v <= 1 - eps`.
/// `plus` is built at `r = -1` with `y_tr <= -1` and steady state
/// `v <= -(1 + eps)`. Both store `h` so that the set is `H z <= r h`.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicMasPair {
    pub minus: MasRepresentation,
    pub plus: MasRepresentation,
}

impl DynamicMasPair {
    pub fn state_dim(&self) -> usize {
        self.minus.state_dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.minus.epsilon()
    }

    /// The representation with more rows (`minus` on ties).
    pub fn larger(&self) -> &MasRepresentation {
        if self.plus.len() > self.minus.len() {
            &self.plus
        } else {
            &self.minus
        }
    }
}

/// Which of the four sign combinations of `(r, y_tr - r)` is active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MasCase {
    /// `r > 0`, `y_tr <= r`
    One,
    /// `r > 0`, `y_tr > r`
    Two,
    /// `r < 0`, `y_tr <= r`
    Three,
    /// `r < 0`, `y_tr > r`
    Four,
    /// `r = 0`
    Zero,
}

impl MasCase {
    /// 1..=4, or 0 for the zero-reference case.
    pub fn code(self) -> u8 {
        match self {
            MasCase::One => 1,
            MasCase::Two => 2,
            MasCase::Three => 3,
            MasCase::Four => 4,
            MasCase::Zero => 0,
        }
    }
}

impl fmt::Display for MasCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MasSelection<'a> {
    pub rep: &'a MasRepresentation,
    pub orientation: Orientation,
    pub scale: f64,
    pub case: MasCase,
}

impl MasSelection<'_> {
    pub fn contains(&self, x: &[f64], v: f64) -> bool {
        contains(self.rep, self.orientation, self.scale, x, v)
    }
}

/// Picks the representation, inequality direction and RHS scale for the
/// current reference `r` and tracking output `y_tr`.
///
/// A tie `y_tr == r` counts as `y_tr <= r`.
pub fn select_dynamic_mas(pair: &DynamicMasPair, r: f64, y_tr: f64) -> MasSelection<'_> {
    select_dynamic_side(pair, r, y_tr <= r)
}

/// The selection for a given side of the reference: `below` means
/// `y_tr <= r`.
pub fn select_dynamic_side(pair: &DynamicMasPair, r: f64, below: bool) -> MasSelection<'_> {
    let orientation = if below {
        Orientation::Le
    } else {
        Orientation::Ge
    };
    let (rep, case) = if r > 0.0 {
        if below {
            (&pair.minus, MasCase::One)
        } else {
            (&pair.plus, MasCase::Two)
        }
    } else if r < 0.0 {
        if below {
            (&pair.plus, MasCase::Three)
        } else {
            (&pair.minus, MasCase::Four)
        }
    } else {
        (pair.larger(), MasCase::Zero)
    };
    MasSelection {
        rep,
        orientation,
        scale: r,
        case,
    }
}

/// Result of shrinking a representation by per-row margins.
#[derive(Clone, Debug)]
pub struct Shrunk {
    pub rep: MasRepresentation,
    /// Rows whose bound changed sign, so the origin no longer satisfies them.
    pub flagged_rows: Vec<usize>,
}

/// Tightens every row bound by a non-negative margin (support-function form of
/// set subtraction). Margins are in the units of the stored `h`, evaluated at
/// scale 1 in the representation's own orientation.
pub fn shrink_for_disturbance(
    rep: &MasRepresentation,
    row_margins: &[f64],
) -> Result<Shrunk, MasError> {
    if row_margins.len() != rep.len() {
        return Err(MasError::Dimension(format!(
            "{} margins for {} rows",
            row_margins.len(),
            rep.len()
        )));
    }
    if row_margins.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
        return Err(MasError::Dimension(
            "disturbance margins must be finite and non-negative".into(),
        ));
    }
    let sign = match rep.orientation {
        Orientation::Le => 1.0,
        Orientation::Ge => -1.0,
    };
    let mut flagged_rows = Vec::new();
    let h: Vec<f64> = rep
        .h
        .iter()
        .zip(row_margins)
        .enumerate()
        .map(|(i, (&h, &m))| {
            let shrunk = h - sign * m;
            if sign * h >= 0.0 && sign * shrunk < 0.0 {
                flagged_rows.push(i);
            }
            shrunk
        })
        .collect();
    let out = MasRepresentation { h, ..rep.clone() };

    let (m, n) = out.as_le_system(out.orientation, 1.0);
    let probe = LpProblem::max_le(vec![0.0; m.cols()], m, n);
    if solve_lp(&probe)? == LpResult::Infeasible {
        return Err(MasError::EmptyAfterShrink);
    }
    Ok(Shrunk {
        rep: out,
        flagged_rows,
    })
}
