#![allow(dead_code)]

use rgdc::mas::{ConstraintSet, DiscreteLtiSystem, UncertainSystem};
use rgdc::numerics::{solve_lp, LpProblem, LpResult, Matrix};

pub const TS: f64 = 1e-4;

pub fn pll() -> DiscreteLtiSystem {
    DiscreteLtiSystem::pll(100.0, 200.0, TS).unwrap()
}

pub fn slew_box() -> ConstraintSet {
    ConstraintSet::symmetric_box(1, 100.0).unwrap()
}

/// `x(t+1) = rho R(theta) x + B v`, `y_tr = x1`, `y_st = x`, with `B`
/// chosen for unit DC gain.
pub fn rotation_system(rho: f64, theta: f64) -> DiscreteLtiSystem {
    let (s, c) = theta.sin_cos();
    let a = Matrix::from_rows(&[[rho * c, -rho * s], [rho * s, rho * c]]).unwrap();
    // First entry of (I - A)^{-1} [0, 1].
    let det = (1.0 - rho * c).powi(2) + (rho * s).powi(2);
    let g0 = -rho * s / det;
    DiscreteLtiSystem::new(
        a,
        vec![0.0, 1.0 / g0],
        vec![1.0, 0.0],
        Matrix::identity(2),
        vec![0.0, 0.0],
        1.0,
    )
    .unwrap()
}

pub fn rotation_family() -> UncertainSystem {
    UncertainSystem::new(
        vec![rotation_system(0.7, 0.2), rotation_system(0.7, 0.5)],
        0,
    )
    .unwrap()
}

/// `max c^T z` over `M z <= N`, or `None` if unbounded.
pub fn lp_max(c: &[f64], m: &Matrix, n: &[f64]) -> Option<f64> {
    match solve_lp(&LpProblem::max_le(c.to_vec(), m.clone(), n.to_vec())).unwrap() {
        LpResult::Optimal { value, .. } => Some(value),
        LpResult::Unbounded => None,
        LpResult::Infeasible => panic!("empty set"),
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Largest `kappa in [0, 1]` keeping `(x, v_prev + kappa (r - v_prev))` in
/// the set, by a one-variable LP.
pub fn kappa_by_lp(
    rep: &rgdc::mas::MasRepresentation,
    orientation: rgdc::mas::Orientation,
    scale: f64,
    x: &[f64],
    v_prev: f64,
    r: f64,
) -> f64 {
    let (m, n) = rep.as_le_system(orientation, scale);
    let nx = x.len();
    let mut a = Matrix::zeros(0, 1);
    let mut b = Vec::new();
    for (row, &rhs) in m.row_iter().zip(&n) {
        let fixed: f64 =
            row[..nx].iter().zip(x).map(|(c, e)| c * e).sum::<f64>() + row[nx] * v_prev;
        a.push_row(&[row[nx] * (r - v_prev)]).unwrap();
        b.push(rhs - fixed);
    }
    a.push_row(&[1.0]).unwrap();
    b.push(1.0);
    a.push_row(&[-1.0]).unwrap();
    b.push(0.0);
    match solve_lp(&LpProblem::max_le(vec![1.0], a, b)).unwrap() {
        LpResult::Optimal { value, .. } => value,
        other => panic!("kappa LP not optimal: {other:?}"),
    }
}

/// Largest `kappa` on a grid of step `1 / cells` whose constant input keeps
/// the plant's simulated output on the admissible side for `steps` samples,
/// with the tightened steady-state requirement included.
#[allow(clippy::too_many_arguments)]
pub fn kappa_by_grid(
    sys: &DiscreteLtiSystem,
    x: &[f64],
    v_prev: f64,
    r: f64,
    below: bool,
    eps: f64,
    steps: usize,
    cells: usize,
) -> f64 {
    let admissible = |kappa: f64| {
        let v = v_prev + kappa * (r - v_prev);
        let ss_ok = if below {
            v <= r - eps * r.abs()
        } else {
            v >= r + eps * r.abs()
        };
        if !ss_ok {
            return false;
        }
        let mut z = x.to_vec();
        for _ in 0..steps {
            let y = sys.y_tr(&z);
            let ok = if below { y <= r } else { y >= r };
            if !ok {
                return false;
            }
            z = sys.step(&z, v);
        }
        true
    };
    (0..=cells)
        .rev()
        .map(|i| i as f64 / cells as f64)
        .find(|&k| admissible(k))
        .unwrap_or(0.0)
}
