//! Closed-loop simulation and the experiments built on it.

mod bode;
mod reference;
mod trace;

pub use bode::{
    bode_window, linear_magnitude_db, log_spaced, nonlinear_bode, write_bode_csv, BodeOptions,
    BodePoint,
};
pub use reference::ReferenceSignal;
pub use trace::SimulationTrace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::governor::ReferenceFilter;
use crate::mas::DiscreteLtiSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
}

/// Runs `steps` samples of the loop: at sample `k` the filter sees `x(k)`,
/// `r(k Ts)` and `y_tr(k)`, then `x(k+1) = A x(k) + B v(k)`.
pub fn simulate<F: ReferenceFilter + ?Sized>(
    sys: &DiscreteLtiSystem,
    filter: &mut F,
    reference: &ReferenceSignal,
    x0: &[f64],
    steps: usize,
) -> Result<SimulationTrace, SimError> {
    if steps == 0 {
        return Err(SimError::Config(
            "simulation needs at least one step".into(),
        ));
    }
    if x0.len() != sys.order() {
        return Err(SimError::Config(format!(
            "initial state has {} entries, system order is {}",
            x0.len(),
            sys.order()
        )));
    }
    let mut trace = SimulationTrace::with_capacity(steps);
    let mut x = x0.to_vec();
    for k in 0..steps {
        let t = k as f64 * sys.ts();
        let r = reference.value_at(t);
        let y_tr = sys.y_tr(&x);
        let d = filter.step(&x, r, y_tr);
        trace.push(t, r, &x, y_tr, sys.y_st(&x, d.v), &d);
        x = sys.step(&x, d.v);
    }
    Ok(trace)
}

/// Piecewise-constant reference given as `(time, level)` steps.
pub fn multi_step_experiment<F: ReferenceFilter + ?Sized>(
    sys: &DiscreteLtiSystem,
    filter: &mut F,
    steps: &[(f64, f64)],
    x0: &[f64],
    n_samples: usize,
) -> Result<SimulationTrace, SimError> {
    let reference = ReferenceSignal::steps(steps.to_vec())?;
    simulate(sys, filter, &reference, x0, n_samples)
}

/// Setup of the random-initial-condition experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub n_runs: usize,
    /// Uniform range of each state component.
    pub state_ranges: Vec<(f64, f64)>,
    /// Uniform range of the initial applied reference `v(-1)`.
    pub v0_range: (f64, f64),
    pub amplitude: f64,
    pub omega: f64,
    pub steps: usize,
    pub seed: u64,
}

impl ConvergenceConfig {
    /// 50 runs with `x1 in [-2, 2]`, `x2 in [-200, 200]`, `v0 in [-1, 1]`,
    /// driven by `sin(100 t)`.
    pub fn pll_default(seed: u64) -> Self {
        Self {
            n_runs: 50,
            state_ranges: vec![(-2.0, 2.0), (-200.0, 200.0)],
            v0_range: (-1.0, 1.0),
            amplitude: 1.0,
            omega: 100.0,
            steps: 10_000,
            seed,
        }
    }
}

/// Initial condition of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialCondition {
    pub x0: Vec<f64>,
    pub v0: f64,
}

/// Draws the initial conditions in run order from a seeded ChaCha stream.
pub fn draw_initial_conditions(cfg: &ConvergenceConfig) -> Vec<InitialCondition> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.n_runs)
        .map(|_| {
            let x0 = cfg
                .state_ranges
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect();
            let v0 = rng.random_range(cfg.v0_range.0..=cfg.v0_range.1);
            InitialCondition { x0, v0 }
        })
        .collect()
}

/// Runs every initial condition against the same sinusoid. `make_filter`
/// receives `v(-1)`. Results are in run order regardless of scheduling.
pub fn convergence_experiment<F, M>(
    sys: &DiscreteLtiSystem,
    make_filter: M,
    cfg: &ConvergenceConfig,
) -> Result<Vec<(InitialCondition, SimulationTrace)>, SimError>
where
    F: ReferenceFilter,
    M: Fn(f64) -> F + Sync,
{
    if cfg.state_ranges.len() != sys.order() {
        return Err(SimError::Config(format!(
            "{} state ranges for a system of order {}",
            cfg.state_ranges.len(),
            sys.order()
        )));
    }
    let reference = ReferenceSignal::sinusoid(cfg.amplitude, cfg.omega)?;
    draw_initial_conditions(cfg)
        .into_par_iter()
        .map(|ic| {
            let mut filter = make_filter(ic.v0);
            let trace = simulate(sys, &mut filter, &reference, &ic.x0, cfg.steps)?;
            Ok((ic, trace))
        })
        .collect()
}

/// Largest spread `max_i y_i(k) - min_i y_i(k)` of `y_tr` across traces over
/// the final `fraction` of the samples.
pub fn final_window_spread(traces: &[SimulationTrace], fraction: f64) -> f64 {
    let Some(first) = traces.first() else {
        return 0.0;
    };
    let n = first.len();
    let start = n - ((fraction * n as f64).round() as usize).min(n);
    (start..n)
        .map(|k| {
            let (lo, hi) = traces
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                    (lo.min(t.y_tr[k]), hi.max(t.y_tr[k]))
                });
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Overshoot of `y_tr` past `r_final`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overshoot {
    pub value: f64,
    /// True when `r_final = 0` and `value` is absolute rather than relative.
    pub absolute: bool,
}

/// `max(0, max y - r) / r` for `r > 0`, `max(0, r - min y) / |r|` for
/// `r < 0`; for `r = 0` the larger absolute excursion, flagged.
pub fn overshoot_metric(trace: &SimulationTrace, r_final: f64) -> Overshoot {
    let max_y = trace.y_tr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_y = trace.y_tr.iter().copied().fold(f64::INFINITY, f64::min);
    if r_final > 0.0 {
        Overshoot {
            value: (max_y - r_final).max(0.0) / r_final,
            absolute: false,
        }
    } else if r_final < 0.0 {
        Overshoot {
            value: (r_final - min_y).max(0.0) / -r_final,
            absolute: false,
        }
    } else {
        Overshoot {
            value: max_y.abs().max(min_y.abs()),
            absolute: true,
        }
    }
}
