//! Dense two-phase simplex for small linear programs with free variables.
//!
//! Problems are normalized to `max c^T z  s.t.  M z <= N` with `z` free, the
//! free variables are split as `z = p - q` with `p, q >= 0`, and one slack per
//! row is added. The solver keeps the condensed dictionary (basic variables
//! expressed in terms of the nonbasic ones), so a pivot costs `O(rows * 2n)`
//! rather than `O(rows^2)`. Phase one uses a single auxiliary variable.

use super::{Matrix, NumericsError};

/// Absolute + relative feasibility tolerance on `M z <= N`.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Reduced-cost tolerance for declaring optimality.
pub const OPTIMALITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintSense {
    /// `M z <= N`
    Le,
    /// `M z >= N`
    Ge,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Matrix,
    pub rhs: Vec<f64>,
    pub sense: Sense,
    pub constraint_sense: ConstraintSense,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        constraints: Matrix,
        rhs: Vec<f64>,
        sense: Sense,
        constraint_sense: ConstraintSense,
    ) -> Self {
        Self {
            objective,
            constraints,
            rhs,
            sense,
            constraint_sense,
        }
    }

    /// `max c^T z  s.t.  M z <= N`.
    pub fn max_le(objective: Vec<f64>, constraints: Matrix, rhs: Vec<f64>) -> Self {
        Self::new(
            objective,
            constraints,
            rhs,
            Sense::Maximize,
            ConstraintSense::Le,
        )
    }

    /// `min c^T z  s.t.  M z >= N`.
    pub fn min_ge(objective: Vec<f64>, constraints: Matrix, rhs: Vec<f64>) -> Self {
        Self::new(
            objective,
            constraints,
            rhs,
            Sense::Minimize,
            ConstraintSense::Ge,
        )
    }

    fn check_dims(&self) -> Result<(), NumericsError> {
        let m = &self.constraints;
        if self.objective.len() != m.cols() || self.rhs.len() != m.rows() {
            return Err(NumericsError::LpDimension {
                objective: self.objective.len(),
                rows: m.rows(),
                cols: m.cols(),
                rhs: self.rhs.len(),
            });
        }
        if self
            .objective
            .iter()
            .chain(&self.rhs)
            .any(|v| !v.is_finite())
        {
            return Err(NumericsError::NonFiniteLp);
        }
        Ok(())
    }

    /// True if `z` satisfies every row within the feasibility tolerance.
    pub fn is_feasible(&self, z: &[f64]) -> bool {
        self.constraints.row_iter().zip(&self.rhs).all(|(row, &n)| {
            let lhs = super::dot(row, z);
            let tol = FEASIBILITY_TOL * (1.0 + n.abs());
            match self.constraint_sense {
                ConstraintSense::Le => lhs <= n + tol,
                ConstraintSense::Ge => lhs >= n - tol,
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { optimizer: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn status(&self) -> LpStatus {
        match self {
            LpResult::Optimal { .. } => LpStatus::Optimal,
            LpResult::Infeasible => LpStatus::Infeasible,
            LpResult::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimizer(&self) -> Option<&[f64]> {
        match self {
            LpResult::Optimal { optimizer, .. } => Some(optimizer),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpResult::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    fn map_optimal(self, f: impl FnOnce(Vec<f64>, f64) -> (Vec<f64>, f64)) -> Self {
        match self {
            LpResult::Optimal { optimizer, value } => {
                let (optimizer, value) = f(optimizer, value);
                LpResult::Optimal { optimizer, value }
            }
            other => other,
        }
    }
}

/// Solves an LP in any of the four sense combinations.
///
/// Minimization negates the objective; `>=` rows are negated into `<=` rows.
pub fn solve_lp(problem: &LpProblem) -> Result<LpResult, NumericsError> {
    problem.check_dims()?;
    let sign = match problem.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let c: Vec<f64> = problem.objective.iter().map(|v| sign * v).collect();
    let result = match problem.constraint_sense {
        ConstraintSense::Le => max_le(&c, &problem.constraints, &problem.rhs)?,
        ConstraintSense::Ge => {
            let m = problem.constraints.scale(-1.0);
            let n: Vec<f64> = problem.rhs.iter().map(|v| -v).collect();
            max_le(&c, &m, &n)?
        }
    };
    Ok(result.map_optimal(|z, f| (z, sign * f)))
}

/// Solves `min c^T z  s.t.  M z >= N` by reflection.
///
/// With `z = -w` the problem becomes `-max c^T w  s.t.  M w <= -N`, so the
/// minimizer is the negated maximizer of the `<=` form on the negated RHS.
pub fn solve_lp_min_geq(problem: &LpProblem) -> Result<LpResult, NumericsError> {
    assert!(
        problem.sense == Sense::Minimize && problem.constraint_sense == ConstraintSense::Ge,
        "solve_lp_min_geq expects a minimize / >= problem"
    );
    problem.check_dims()?;
    let neg_rhs: Vec<f64> = problem.rhs.iter().map(|v| -v).collect();
    let result = max_le(&problem.objective, &problem.constraints, &neg_rhs)?;
    Ok(result.map_optimal(|w, f| (w.into_iter().map(|v| -v).collect(), -f)))
}

/// `max c^T z  s.t.  M z <= N`, `z` free.
fn max_le(c: &[f64], m: &Matrix, n: &[f64]) -> Result<LpResult, NumericsError> {
    let nvars = m.cols();
    let nrows = m.rows();
    if nrows == 0 {
        return Ok(if c.iter().all(|v| v.abs() <= OPTIMALITY_TOL) {
            LpResult::Optimal {
                optimizer: vec![0.0; nvars],
                value: 0.0,
            }
        } else {
            LpResult::Unbounded
        });
    }

    let mut dict = Dictionary::new(m, n);
    let needs_phase_one = n.iter().any(|&b| b < -FEASIBILITY_TOL * (1.0 + b.abs()));
    if needs_phase_one && !dict.phase_one()? {
        return Ok(LpResult::Infeasible);
    }

    let mut full_c = vec![0.0; dict.total_vars];
    full_c[..nvars].copy_from_slice(c);
    for j in 0..nvars {
        full_c[nvars + j] = -c[j];
    }
    dict.set_objective(&full_c);
    if !dict.optimize()? {
        return Ok(LpResult::Unbounded);
    }

    let values = dict.variable_values();
    let optimizer: Vec<f64> = (0..nvars).map(|j| values[j] - values[nvars + j]).collect();
    let value = super::dot(c, &optimizer);
    Ok(LpResult::Optimal { optimizer, value })
}

/// Condensed simplex dictionary: `x_B = b - A x_N`, `obj = obj0 + c^T x_N`.
struct Dictionary {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    obj0: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Structural (split) variables, slacks, and possibly the auxiliary.
    total_vars: usize,
    bland: bool,
    rhs_scale: f64,
}

impl Dictionary {
    fn new(m: &Matrix, n: &[f64]) -> Self {
        let nvars = m.cols();
        let rows = m.rows();
        let cols = 2 * nvars;
        let mut a = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..nvars {
                let v = m[(i, j)];
                a[i * cols + j] = v;
                a[i * cols + nvars + j] = -v;
            }
        }
        Self {
            rows,
            cols,
            a,
            b: n.to_vec(),
            cost: vec![0.0; cols],
            obj0: 0.0,
            basic: (cols..cols + rows).collect(),
            nonbasic: (0..cols).collect(),
            total_vars: cols + rows,
            bland: false,
            rhs_scale: n.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    /// Runs phase one; returns false if the constraints are infeasible.
    fn phase_one(&mut self) -> Result<bool, NumericsError> {
        let aux = self.total_vars;
        self.total_vars += 1;
        // Append the auxiliary column with coefficient -1 in every row.
        let new_cols = self.cols + 1;
        let mut a = vec![0.0; self.rows * new_cols];
        for i in 0..self.rows {
            a[i * new_cols..i * new_cols + self.cols]
                .copy_from_slice(&self.a[i * self.cols..(i + 1) * self.cols]);
            a[i * new_cols + self.cols] = -1.0;
        }
        self.a = a;
        self.cols = new_cols;
        self.nonbasic.push(aux);
        self.cost = vec![0.0; new_cols];
        self.cost[new_cols - 1] = -1.0;
        self.obj0 = 0.0;

        let leave = (0..self.rows)
            .min_by(|&i, &j| self.b[i].total_cmp(&self.b[j]))
            .expect("phase one needs rows");
        self.pivot(leave, new_cols - 1);
        if !self.optimize()? {
            return Err(NumericsError::LpBreakdown("phase one unbounded"));
        }
        if self.obj0 < -FEASIBILITY_TOL * (1.0 + self.rhs_scale) {
            return Ok(false);
        }

        // Drive the auxiliary out of the basis if it stayed there degenerate.
        if let Some(row) = self.basic.iter().position(|&v| v == aux) {
            let col = (0..self.cols)
                .filter(|&j| self.nonbasic[j] != aux)
                .max_by(|&j, &k| self.at(row, j).abs().total_cmp(&self.at(row, k).abs()))
                .ok_or(NumericsError::LpBreakdown(
                    "no column to pivot auxiliary out",
                ))?;
            if self.at(row, col).abs() <= PIVOT_TOL {
                return Err(NumericsError::LpBreakdown(
                    "auxiliary variable stuck in basis",
                ));
            }
            self.pivot(row, col);
        }
        let col = self
            .nonbasic
            .iter()
            .position(|&v| v == aux)
            .expect("auxiliary is nonbasic");
        self.drop_column(col);
        self.total_vars -= 1;
        Ok(true)
    }

    fn drop_column(&mut self, col: usize) {
        let new_cols = self.cols - 1;
        let mut a = Vec::with_capacity(self.rows * new_cols);
        for i in 0..self.rows {
            let row = &self.a[i * self.cols..(i + 1) * self.cols];
            a.extend_from_slice(&row[..col]);
            a.extend_from_slice(&row[col + 1..]);
        }
        self.a = a;
        self.cols = new_cols;
        self.nonbasic.remove(col);
        self.cost.remove(col);
    }

    /// Expresses `full_c^T x` in terms of the current nonbasic variables.
    fn set_objective(&mut self, full_c: &[f64]) {
        self.cost = vec![0.0; self.cols];
        self.obj0 = 0.0;
        for (j, &v) in self.nonbasic.iter().enumerate() {
            self.cost[j] += full_c[v];
        }
        for (i, &v) in self.basic.iter().enumerate() {
            let cv = full_c[v];
            if cv == 0.0 {
                continue;
            }
            self.obj0 += cv * self.b[i];
            for j in 0..self.cols {
                self.cost[j] -= cv * self.a[i * self.cols + j];
            }
        }
    }

    /// Maximizes the current objective. Returns false if unbounded.
    fn optimize(&mut self) -> Result<bool, NumericsError> {
        let limit = 200 * (self.rows + self.cols) + 1000;
        let mut streak = 0;
        for _ in 0..limit {
            let Some(enter) = self.entering() else {
                return Ok(true);
            };
            let Some(leave) = self.leaving(enter) else {
                return Ok(false);
            };
            let step = self.b[leave].max(0.0) / self.at(leave, enter);
            if step <= 1e-14 {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(leave, enter);
        }
        Err(NumericsError::LpBreakdown("iteration limit reached"))
    }

    fn entering(&self) -> Option<usize> {
        let eligible = (0..self.cols).filter(|&j| self.cost[j] > OPTIMALITY_TOL);
        if self.bland {
            eligible.min_by_key(|&j| self.nonbasic[j])
        } else {
            eligible.max_by(|&j, &k| self.cost[j].total_cmp(&self.cost[k]))
        }
    }

    fn leaving(&self, enter: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, enter);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.b[i].max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                    let better = if tie {
                        if self.bland {
                            self.basic[i] < self.basic[bi]
                        } else {
                            a > self.at(bi, enter)
                        }
                    } else {
                        ratio < br
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let cols = self.cols;
        let piv = self.a[r * cols + e];
        let inv = 1.0 / piv;
        // Row r: solve for the entering variable.
        self.b[r] *= inv;
        for j in 0..cols {
            if j != e {
                self.a[r * cols + j] *= inv;
            }
        }
        self.a[r * cols + e] = inv;
        let (br, row_r) = (self.b[r], self.a[r * cols..(r + 1) * cols].to_vec());

        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + e];
            if f == 0.0 {
                continue;
            }
            self.b[i] -= f * br;
            let row = &mut self.a[i * cols..(i + 1) * cols];
            for j in 0..cols {
                if j != e {
                    row[j] -= f * row_r[j];
                }
            }
            row[e] = -f * inv;
        }

        let ce = self.cost[e];
        if ce != 0.0 {
            self.obj0 += ce * br;
            for (j, c) in self.cost.iter_mut().enumerate().take(cols) {
                if j != e {
                    *c -= ce * row_r[j];
                }
            }
            self.cost[e] = -ce * inv;
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[e]);
    }

    fn variable_values(&self) -> Vec<f64> {
        let mut vals = vec![0.0; self.total_vars];
        for (i, &v) in self.basic.iter().enumerate() {
            vals[v] = self.b[i];
        }
        vals
    }
}
