use crate::numerics::{solve_lp, solve_lp_min_geq, LpProblem, LpResult, Matrix};

use super::representation::{DynamicMasPair, MasRepresentation, Orientation, RowTag};
use super::system::{ConstraintSet, DiscreteLtiSystem};
use super::MasError;

/// A row is redundant if its LP bound is within `1e-9 * (1 + |d|)` of `d`.
pub const REDUNDANCY_TOL: f64 = 1e-9;
/// Default cap on the admissibility index.
pub const DEFAULT_MAX_INDEX: usize = 10_000;

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub max_index: usize,
    /// Run the final pass that removes rows made redundant by later rows.
    pub prune: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_index: DEFAULT_MAX_INDEX,
            prune: true,
        }
    }
}

/// Which output a constraint acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Tracking,
    Constrained,
}

/// Output map `(C, D)` selected by `output`.
pub(crate) fn output_map(sys: &DiscreteLtiSystem, output: Output) -> (Matrix, Vec<f64>) {
    match output {
        Output::Tracking => (
            Matrix::row_vector(sys.c_tr()).expect("finite C_tr"),
            vec![0.0],
        ),
        Output::Constrained => (sys.c_st().clone(), sys.d_st().to_vec()),
    }
}

/// Coefficients of `s_row * y(t)` as a function of `(x, v)` for constant `v`:
/// `(s_row C A^t, s_row (C (I - A^t)(I - A)^{-1} B + D))`.
pub fn prediction_row(
    sys: &DiscreteLtiSystem,
    output: Output,
    s_row: &[f64],
    t: usize,
) -> (Vec<f64>, f64) {
    let (c, d) = output_map(sys, output);
    assert_eq!(s_row.len(), c.rows(), "constraint row width mismatch");
    let sc = c.vec_mul(s_row);
    let sd: f64 = s_row.iter().zip(&d).map(|(s, d)| s * d).sum();
    let mut coeff_x = sc.clone();
    for _ in 0..t {
        coeff_x = sys.a().vec_mul(&coeff_x);
    }
    let gain = sys.steady_state_gain();
    let coeff_v = dot(&sc, gain) - dot(&coeff_x, gain) + sd;
    (coeff_x, coeff_v)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::numerics::dot(a, b)
}

/// Rows accumulated during construction, all in one orientation.
pub(crate) struct Partial {
    pub coeffs: Matrix,
    pub bounds: Vec<f64>,
    pub tags: Vec<RowTag>,
    pub orientation: Orientation,
}

impl Partial {
    pub fn new(dim: usize, orientation: Orientation) -> Self {
        Self {
            coeffs: Matrix::zeros(0, dim),
            bounds: Vec::new(),
            tags: Vec::new(),
            orientation,
        }
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn push(&mut self, coeffs: &[f64], bound: f64, tag: RowTag) -> Result<(), MasError> {
        self.coeffs.push_row(coeffs)?;
        self.bounds.push(bound);
        self.tags.push(tag);
        Ok(())
    }

    /// Whether an identical row with the same bound is already present.
    pub fn has_row(&self, coeffs: &[f64], bound: f64) -> bool {
        self.coeffs.row_iter().zip(&self.bounds).any(|(r, &b)| {
            b == bound
                && r.iter()
                    .zip(coeffs)
                    .all(|(a, c)| (a - c).abs() <= 1e-12 * (1.0 + c.abs()))
        })
    }

    pub fn redundant(&self, candidate: &[f64], bound: f64) -> Result<bool, MasError> {
        redundant_in(
            &self.coeffs,
            &self.bounds,
            self.orientation,
            candidate,
            bound,
        )
    }

    /// Adds the tightened steady-state rows `g_i v (<= | >=) bound_i`.
    pub fn push_steady_state(&mut self, gains: &[f64], bounds: &[f64]) -> Result<(), MasError> {
        let dim = self.coeffs.cols();
        let scale = gains.iter().fold(0.0_f64, |a, g| a.max(g.abs()));
        for (i, (&g, &b)) in gains.iter().zip(bounds).enumerate() {
            if g.abs() <= 1e-9 * (1.0 + scale) {
                // 0 (<= | >=) b holds trivially or never.
                let ok = match self.orientation {
                    Orientation::Le => b >= 0.0,
                    Orientation::Ge => b <= 0.0,
                };
                if !ok {
                    return Err(MasError::InfeasibleSteadyState);
                }
                continue;
            }
            let mut row = vec![0.0; dim];
            row[dim - 1] = g;
            self.push(&row, b, RowTag::steady_state(i))?;
        }
        if self.len() > 0 {
            let zero = vec![0.0; dim];
            let (m, n) = self.as_le();
            let probe = LpProblem::max_le(zero, m, n);
            if solve_lp(&probe)? == LpResult::Infeasible {
                return Err(MasError::InfeasibleSteadyState);
            }
        }
        Ok(())
    }

    fn as_le(&self) -> (Matrix, Vec<f64>) {
        match self.orientation {
            Orientation::Le => (self.coeffs.clone(), self.bounds.clone()),
            Orientation::Ge => (
                self.coeffs.scale(-1.0),
                self.bounds.iter().map(|b| -b).collect(),
            ),
        }
    }

    /// Removes prediction rows implied by the remaining rows.
    pub fn prune(&mut self) -> Result<(), MasError> {
        let m = self.len();
        let mut keep = vec![true; m];
        for i in 0..m {
            if self.tags[i].is_steady_state() {
                continue;
            }
            let mut others = Matrix::zeros(0, self.coeffs.cols());
            let mut bounds = Vec::with_capacity(m);
            for j in (0..m).filter(|&j| j != i && keep[j]) {
                others.push_row(self.coeffs.row(j))?;
                bounds.push(self.bounds[j]);
            }
            if redundant_in(
                &others,
                &bounds,
                self.orientation,
                self.coeffs.row(i),
                self.bounds[i],
            )? {
                keep[i] = false;
            }
        }
        self.coeffs.retain_rows(&keep);
        let mut k = keep.iter();
        self.bounds.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        self.tags.retain(|_| *k.next().unwrap());
        Ok(())
    }

    pub fn into_representation(
        self,
        admissibility_index: usize,
        epsilon: f64,
        h_scale: f64,
    ) -> MasRepresentation {
        let h = self.bounds.iter().map(|b| b / h_scale).collect();
        MasRepresentation::from_parts(
            self.coeffs,
            h,
            self.tags,
            admissibility_index,
            epsilon,
            self.orientation,
        )
    }
}

/// Partial sets with more `<=` rows than this use the working-set check.
const WORKING_SET_MIN_ROWS: usize = 400;
/// Half-width of the bounding box added to working-set LPs.
const WORKING_SET_BOX: f64 = 1e9;
/// Rows seeded into, and added per round to, the working set.
const WORKING_SET_BATCH: usize = 8;

/// Redundancy of `c z (<= | >=) d` against `M z (<= | >=) N`.
///
/// `<=`: `max c z s.t. M z <= N` must not exceed `d`.
/// `>=`: `min c z s.t. M z >= N` must not fall below `d`.
fn redundant_in(
    m: &Matrix,
    n: &[f64],
    orientation: Orientation,
    c: &[f64],
    d: f64,
) -> Result<bool, MasError> {
    let tol = REDUNDANCY_TOL * (1.0 + d.abs());
    if orientation == Orientation::Le && m.rows() > WORKING_SET_MIN_ROWS {
        return redundant_working_set(m, n, c, d, tol);
    }
    let result = match orientation {
        Orientation::Le => solve_lp(&LpProblem::max_le(c.to_vec(), m.clone(), n.to_vec()))?,
        Orientation::Ge => solve_lp_min_geq(&LpProblem::min_ge(c.to_vec(), m.clone(), n.to_vec()))?,
    };
    match result {
        LpResult::Optimal { value, .. } => Ok(match orientation {
            Orientation::Le => value <= d + tol,
            Orientation::Ge => value >= d - tol,
        }),
        LpResult::Unbounded => Ok(false),
        LpResult::Infeasible => Err(MasError::InfeasibleConstraints),
    }
}

/// Row-generation form of the `<=` check for large row counts.
///
/// The LP is solved over a small subset of rows inside a large box. A
/// relaxed optimum at or below `d` proves redundancy; an optimum that
/// satisfies every row proves the opposite. Otherwise the most violated rows
/// join the subset and the LP is solved again.
fn redundant_working_set(
    m: &Matrix,
    n: &[f64],
    c: &[f64],
    d: f64,
    tol: f64,
) -> Result<bool, MasError> {
    let dim = m.cols();
    let norms: Vec<f64> = m
        .row_iter()
        .map(|r| crate::numerics::dot(r, r).sqrt().max(f64::MIN_POSITIVE))
        .collect();

    let mut work = Matrix::zeros(0, dim);
    let mut work_rhs = Vec::new();
    let mut in_work = vec![false; m.rows()];
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        work.push_row(&e)?;
        e[j] = -1.0;
        work.push_row(&e)?;
        work_rhs.extend([WORKING_SET_BOX, WORKING_SET_BOX]);
    }
    let mut aligned: Vec<(usize, f64)> = m
        .row_iter()
        .enumerate()
        .map(|(i, r)| (i, crate::numerics::dot(r, c) / norms[i]))
        .collect();
    aligned.sort_by(|a, b| b.1.total_cmp(&a.1));
    for &(i, _) in aligned.iter().take(WORKING_SET_BATCH) {
        work.push_row(m.row(i))?;
        work_rhs.push(n[i]);
        in_work[i] = true;
    }

    loop {
        let lp = LpProblem::max_le(c.to_vec(), work.clone(), work_rhs.clone());
        let (z, value) = match solve_lp(&lp)? {
            LpResult::Optimal { optimizer, value } => (optimizer, value),
            LpResult::Infeasible => return Err(MasError::InfeasibleConstraints),
            LpResult::Unbounded => {
                return Err(crate::numerics::NumericsError::LpBreakdown(
                    "boxed working-set LP reported unbounded",
                )
                .into())
            }
        };
        if value <= d + tol {
            return Ok(true);
        }
        let mut violated: Vec<(usize, f64)> = m
            .row_iter()
            .enumerate()
            .filter(|(i, _)| !in_work[*i])
            .filter_map(|(i, r)| {
                let excess = crate::numerics::dot(r, &z) - n[i];
                let slack_tol = crate::numerics::FEASIBILITY_TOL * (1.0 + n[i].abs());
                (excess > slack_tol).then_some((i, excess / norms[i]))
            })
            .collect();
        if violated.is_empty() {
            return Ok(false);
        }
        violated.sort_by(|a, b| b.1.total_cmp(&a.1));
        for &(i, _) in violated.iter().take(WORKING_SET_BATCH) {
            work.push_row(m.row(i))?;
            work_rhs.push(n[i]);
            in_work[i] = true;
        }
    }
}

/// Whether `candidate . (x, v) (<= | >=) bound` is implied by the set
/// `H z (<= | >=) rhs_scale * h`.
pub fn is_redundant(
    partial: &MasRepresentation,
    orientation: Orientation,
    rhs_scale: f64,
    candidate: &[f64],
    bound: f64,
) -> Result<bool, MasError> {
    if candidate.len() != partial.state_dim() + 1 {
        return Err(MasError::Dimension(format!(
            "candidate has {} coefficients, expected {}",
            candidate.len(),
            partial.state_dim() + 1
        )));
    }
    let n: Vec<f64> = partial.h().iter().map(|h| rhs_scale * h).collect();
    redundant_in(partial.coeffs(), &n, orientation, candidate, bound)
}

fn check_epsilon(epsilon: f64) -> Result<(), MasError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(MasError::Epsilon(epsilon))
    }
}

/// Builds the MAS of `S y (<= | >=) s` on the chosen output.
///
/// Steady-state rows are tightened toward the interior: `s - eps |s|` for
/// `<=` and `s + eps |s|` for `>=`. Prediction rows for `t = 0, 1, ...` are
/// added unless redundant; construction stops at the first `t` whose rows
/// are all redundant, giving `j* = t - 1`. The stored `h` is the bound itself.
pub fn build_mas_for_output(
    sys: &DiscreteLtiSystem,
    output: Output,
    constraints: &ConstraintSet,
    orientation: Orientation,
    epsilon: f64,
    opts: BuildOptions,
) -> Result<MasRepresentation, MasError> {
    let (partial, j_star) = build_partial(sys, output, constraints, orientation, epsilon, opts)?;
    Ok(partial.into_representation(j_star, epsilon, 1.0))
}

fn build_partial(
    sys: &DiscreteLtiSystem,
    output: Output,
    constraints: &ConstraintSet,
    orientation: Orientation,
    epsilon: f64,
    opts: BuildOptions,
) -> Result<(Partial, usize), MasError> {
    check_epsilon(epsilon)?;
    if constraints.is_empty() {
        return Err(MasError::EmptyConstraints);
    }
    let (c, d) = output_map(sys, output);
    if constraints.matrix().cols() != c.rows() {
        return Err(MasError::Dimension(format!(
            "constraint matrix has {} columns but the output has {} entries",
            constraints.matrix().cols(),
            c.rows()
        )));
    }
    let n = sys.order();
    let s = constraints.matrix();
    let sc = s.matmul(&c);
    let sd = s.mul_vec(&d);
    let gain = sys.steady_state_gain();

    let ss_gains: Vec<f64> = (0..s.rows())
        .map(|i| dot(sc.row(i), gain) + sd[i])
        .collect();
    let tightened: Vec<f64> = constraints
        .bound()
        .iter()
        .map(|&b| match orientation {
            Orientation::Le => b - epsilon * b.abs(),
            Orientation::Ge => b + epsilon * b.abs(),
        })
        .collect();

    let mut partial = Partial::new(n + 1, orientation);
    partial.push_steady_state(&ss_gains, &tightened)?;

    // rows[i] = S_i C A^t, advanced one step per iteration.
    let mut rows: Vec<Vec<f64>> = (0..s.rows()).map(|i| sc.row(i).to_vec()).collect();
    let mut j_star = None;
    for t in 0..=opts.max_index {
        let mut all_redundant = true;
        for (i, cx) in rows.iter().enumerate() {
            let cv = ss_gains[i] - dot(cx, gain);
            let mut cand = cx.clone();
            cand.push(cv);
            let bound = constraints.bound()[i];
            if !partial.redundant(&cand, bound)? {
                all_redundant = false;
                partial.push(&cand, bound, RowTag::at(t, i))?;
            }
        }
        if all_redundant {
            j_star = Some(t.saturating_sub(1));
            break;
        }
        for cx in rows.iter_mut() {
            *cx = sys.a().vec_mul(cx);
        }
    }
    let j_star = j_star.ok_or(MasError::NotFinitelyDetermined {
        cap: opts.max_index,
    })?;
    if opts.prune {
        partial.prune()?;
    }
    Ok((partial, j_star))
}

/// Static MAS `O_inf,st` for `S y_st <= s`.
pub fn build_static_mas(
    sys: &DiscreteLtiSystem,
    constraints: &ConstraintSet,
    epsilon: f64,
) -> Result<MasRepresentation, MasError> {
    build_mas_for_output(
        sys,
        Output::Constrained,
        constraints,
        Orientation::Le,
        epsilon,
        BuildOptions::default(),
    )
}

/// Dynamic-constraint MAS for `y_tr <= r` (`Le`) or `y_tr >= r` (`Ge`),
/// stored with `h = bound / r` so that the set reads `H z (<= | >=) r h`.
pub fn build_dynamic_representation(
    sys: &DiscreteLtiSystem,
    r: f64,
    orientation: Orientation,
    epsilon: f64,
    opts: BuildOptions,
) -> Result<MasRepresentation, MasError> {
    if r == 0.0 || !r.is_finite() {
        return Err(MasError::ZeroReference);
    }
    let constraints = ConstraintSet::new(Matrix::from_rows(&[[1.0]])?, vec![r])?;
    let (partial, j_star) = build_partial(
        sys,
        Output::Tracking,
        &constraints,
        orientation,
        epsilon,
        opts,
    )?;
    Ok(partial.into_representation(j_star, epsilon, r))
}

/// The `(H^-, h^-)` and `(H^+, h^+)` representations, built at `r = 1` and
/// `r = -1` respectively, both for `y_tr <= r`.
pub fn build_dynamic_mas_pair(
    sys: &DiscreteLtiSystem,
    epsilon: f64,
) -> Result<DynamicMasPair, MasError> {
    let opts = BuildOptions::default();
    Ok(DynamicMasPair {
        minus: build_dynamic_representation(sys, 1.0, Orientation::Le, epsilon, opts)?,
        plus: build_dynamic_representation(sys, -1.0, Orientation::Le, epsilon, opts)?,
    })
}
