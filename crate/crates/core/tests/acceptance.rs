//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p rgdc --test acceptance`. The process fails if a
//! criterion fails that is not listed in `EXPECTED_FAILURES`, or if a listed
//! criterion unexpectedly passes.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgdc::governor::{GovernorState, Passthrough};
use rgdc::mas::{
    build_dynamic_mas_pair, build_robust_dynamic_pair, build_robust_mas, build_static_mas,
    contains, select_dynamic_mas, ConstraintSet, DynamicMasPair, MasRepresentation, Orientation,
    RobustConstraint, RobustMethod, UncertainSystem,
};
use rgdc::numerics::{solve_lp, solve_lp_min_geq, LpProblem, LpResult, Matrix};
use rgdc::simkit::{
    linear_magnitude_db, log_spaced, multi_step_experiment, nonlinear_bode, overshoot_metric,
    simulate, BodeOptions, ReferenceSignal, SimulationTrace,
};

const EPS_GRID: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];
const EPS: f64 = 1e-3;

const STATIC_INDEX: usize = 130;
const DYNAMIC_INDEX: usize = 342;
const INDEX_REL_TOL: f64 = 0.05;
const MAS_RUNTIME: Duration = Duration::from_secs(30);

const OVERSHOOT_TOL: f64 = 1e-8;
const UNGOVERNED_OVERSHOOT: f64 = 0.309;
const UNGOVERNED_OVERSHOOT_TOL: f64 = 0.01;

const SWITCH_TIME: f64 = 0.208;
const SETTLE_WINDOW: f64 = 0.5;

const SLEW_LIMIT: f64 = 100.0;
const ROBUST_SAMPLES: usize = 2000;
const ROBUST_STEPS: usize = 10_000;

const HOMOGENEITY_ALPHAS: [f64; 3] = [0.5, 2.0, 10.0];
const HOMOGENEITY_REL_TOL: f64 = 1e-9;
const HOMOGENEITY_KAPPA_TOL: f64 = 1e-6;

const PROPERTY_SAMPLES: usize = 1000;
const LP_TOL: f64 = 1e-8;
const SCALING_TOL: f64 = 1e-12;

const BODE_POINTS: usize = 100;
const BODE_RUNTIME: Duration = Duration::from_secs(300);
const GOVERNED_PEAK_DB: f64 = 0.5;
const RESONANCE_DB: f64 = 3.67;
const RESONANCE_TOL_DB: f64 = 0.1;
const RESONANCE_BAND: (f64, f64) = (110.0, 135.0);
const ROLL_OFF_FROM: f64 = 600.0;
const ROLL_OFF_AGREEMENT_DB: f64 = 1.0;

const KAPPA_LP_TOL: f64 = 1e-9;
const KAPPA_GRID_STEP: usize = 1000;
const KAPPA_GRID_TOL: f64 = 2e-3;
const KAPPA_STATES: usize = 1000;
const KAPPA_SCENARIOS: usize = 100;

/// Criteria known to fail, with the measured shortfall documented alongside
/// the project notes.
const EXPECTED_FAILURES: [u32; 1] = [8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn pair_at(eps: f64) -> Arc<DynamicMasPair> {
    Arc::new(build_dynamic_mas_pair(&common::pll(), eps).unwrap())
}

fn index_ok(j: usize, target: usize) -> bool {
    (j as f64 - target as f64).abs() <= INDEX_REL_TOL * target as f64
}

fn criterion_1() -> Outcome {
    let sys = common::pll();
    let mut found = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut at_1e4 = None;
    for eps in EPS_GRID {
        let t0 = Instant::now();
        let rep = build_static_mas(&sys, &common::slew_box(), eps).unwrap();
        slowest = slowest.max(t0.elapsed());
        found.push((eps, rep.admissibility_index()));
        if eps == 1e-4 {
            at_1e4 = Some(rep.admissibility_index());
        }
    }
    let exact: Vec<f64> = found
        .iter()
        .filter(|(_, j)| *j == STATIC_INDEX)
        .map(|(e, _)| *e)
        .collect();
    let pass =
        (!exact.is_empty() || index_ok(at_1e4.unwrap(), STATIC_INDEX)) && slowest < MAS_RUNTIME;
    outcome(
        pass,
        format!(
            "static j* by eps {found:?}; exact match at eps {exact:?}; slowest build {slowest:.2?}"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut found = Vec::new();
    let mut slowest = Duration::ZERO;
    for eps in EPS_GRID {
        let t0 = Instant::now();
        let p = pair_at(eps);
        slowest = slowest.max(t0.elapsed());
        found.push((
            eps,
            p.minus.admissibility_index(),
            p.plus.admissibility_index(),
        ));
    }
    let exact: Vec<f64> = found
        .iter()
        .filter(|(_, a, b)| *a == DYNAMIC_INDEX && *b == DYNAMIC_INDEX)
        .map(|(e, _, _)| *e)
        .collect();
    let near = found
        .iter()
        .find(|(e, _, _)| *e == 1e-4)
        .map(|(_, a, b)| index_ok(*a, DYNAMIC_INDEX) && index_ok(*b, DYNAMIC_INDEX))
        .unwrap();
    outcome(
        (!exact.is_empty() || near) && slowest < MAS_RUNTIME,
        format!(
            "(eps, j*-, j*+) {found:?}; exact match at eps {exact:?}; slowest pair {slowest:.2?}"
        ),
    )
}

fn criterion_3(pair: &Arc<DynamicMasPair>) -> Outcome {
    let sys = common::pll();
    let r = ReferenceSignal::Constant(1.0);
    let mut g = GovernorState::new(pair.clone(), None, 0.0).unwrap();
    let governed = simulate(&sys, &mut g, &r, &[0.0, 0.0], 10_000).unwrap();
    let free = simulate(&sys, &mut Passthrough::default(), &r, &[0.0, 0.0], 10_000).unwrap();
    let og = overshoot_metric(&governed, 1.0).value;
    let ou = overshoot_metric(&free, 1.0).value;
    outcome(
        og <= OVERSHOOT_TOL && (ou - UNGOVERNED_OVERSHOOT).abs() <= UNGOVERNED_OVERSHOOT_TOL,
        format!("governed overshoot {og:.3e}, ungoverned {ou:.4}"),
    )
}

fn criterion_4(pair: &Arc<DynamicMasPair>) -> Outcome {
    let sys = common::pll();
    let steps = [(0.0, 1.0), (0.1, -1.0), (0.2, 1.0), (SWITCH_TIME, 0.2)];
    let r_final = steps.last().unwrap().1;
    let mut g = GovernorState::new(pair.clone(), None, 0.0).unwrap();
    let tr = multi_step_experiment(&sys, &mut g, &steps, &[0.0, 0.0], 10_000).unwrap();
    let k_switch = (SWITCH_TIME / common::TS).round() as usize;
    let held: Vec<usize> = (0..tr.len())
        .filter(|&k| !tr.feasible[k] && tr.kappa_star[k] == 0.0)
        .collect();
    let tol = 2.0 * EPS * r_final.abs();
    let settled_from =
        (k_switch..tr.len()).find(|&k| tr.v[k..].iter().all(|v| (v - r_final).abs() <= tol));
    let settle = settled_from.map(|k| (k - k_switch) as f64 * common::TS);
    let pass = held.iter().any(|&k| k >= k_switch) && settle.is_some_and(|s| s <= SETTLE_WINDOW);
    let first = held
        .first()
        .map_or("none".to_string(), |&k| format!("{:.4} s", tr.t[k]));
    let settle = settle.map_or("never".to_string(), |s| format!("{s:.4} s"));
    outcome(
        pass,
        format!(
            "{} held samples (first at t = {first}); v within {tol:.1e} of r from {settle} after the switch",
            held.len()
        ),
    )
}

fn sample_in(
    rng: &mut ChaCha8Rng,
    rep: &MasRepresentation,
    half_widths: &[f64; 3],
) -> (Vec<f64>, f64) {
    loop {
        let z: Vec<f64> = half_widths
            .iter()
            .map(|&w| rng.random_range(-w..w))
            .collect();
        if rep
            .slacks(Orientation::Le, 1.0, &z[..2], z[2])
            .iter()
            .all(|s| *s >= 0.0)
        {
            return (z[..2].to_vec(), z[2]);
        }
    }
}

fn criterion_5() -> Outcome {
    let usys = UncertainSystem::pll(100.0, &[160.0, 240.0], 200.0, common::TS).unwrap();
    let nominal = usys.nominal();
    let t0 = Instant::now();
    let rpair = Arc::new(build_robust_dynamic_pair(&usys, EPS, RobustMethod::Vertexwise).unwrap());
    let slew = ConstraintSet::symmetric_box(1, SLEW_LIMIT).unwrap();
    let rst = Arc::new(
        build_robust_mas(
            &usys,
            &RobustConstraint::Static(slew.clone()),
            EPS,
            RobustMethod::Vertexwise,
        )
        .unwrap(),
    );
    let build_time = t0.elapsed();
    let npair = build_dynamic_mas_pair(nominal, EPS).unwrap();
    let nst = build_static_mas(nominal, &slew, EPS).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut contained = true;
    let mut strict = (0, 0);
    for (robust, nom, hw, slot) in [
        (&rpair.minus, &npair.minus, [1.5, 150.0, 1.5], 0),
        (&*rst, &nst, [1.5, 100.0, 1.5], 1),
    ] {
        for _ in 0..ROBUST_SAMPLES {
            let (x, v) = sample_in(&mut rng, robust, &hw);
            contained &= contains(nom, Orientation::Le, 1.0, &x, v);
            let (x, v) = sample_in(&mut rng, nom, &hw);
            if !contains(robust, Orientation::Le, 1.0, &x, v) {
                if slot == 0 {
                    strict.0 += 1;
                } else {
                    strict.1 += 1;
                }
            }
        }
    }

    let mut sims = Vec::new();
    let mut sims_ok = true;
    for g_vco in [160.0, 240.0] {
        let plant = rgdc::mas::DiscreteLtiSystem::pll(100.0, g_vco, common::TS).unwrap();
        for steps in [vec![(0.0, 1.0)], vec![(0.0, 1.0), (0.3, -0.5), (0.6, 0.7)]] {
            let mut g = GovernorState::new(rpair.clone(), Some(rst.clone()), 0.0).unwrap();
            let tr =
                multi_step_experiment(&plant, &mut g, &steps, &[0.0, 0.0], ROBUST_STEPS).unwrap();
            let over = step_overshoot(&tr);
            let slew_max = tr.x.iter().fold(0.0f64, |m, x| m.max(x[1].abs()));
            sims_ok &= over <= OVERSHOOT_TOL && slew_max <= SLEW_LIMIT * (1.0 + 1e-9);
            sims.push(format!(
                "G_VCO {g_vco}: overshoot {over:.1e}, max slew {slew_max:.3}"
            ));
        }
    }
    outcome(
        contained && strict.0 > 0 && strict.1 > 0 && sims_ok,
        format!(
            "robust rows {}/{}, built in {build_time:.2?}; robust samples inside nominal: {contained}; \
             nominal samples outside robust: {}/{} (tracking/slew); {}",
            rpair.minus.len(),
            rst.len(),
            strict.0,
            strict.1,
            sims.join("; ")
        ),
    )
}

/// Largest excursion of `y_tr` past the active level, over every constant
/// segment, relative to that level.
fn step_overshoot(tr: &SimulationTrace) -> f64 {
    let mut worst = 0.0f64;
    let mut start = 0;
    for k in 1..=tr.len() {
        if k == tr.len() || tr.r[k] != tr.r[start] {
            let r = tr.r[start];
            let y0 = tr.y_tr[start];
            for &y in &tr.y_tr[start..k] {
                let past = if y0 <= r { y - r } else { r - y };
                if r != 0.0 {
                    worst = worst.max(past / r.abs());
                }
            }
            start = k;
        }
    }
    worst
}

fn criterion_6(pair: &Arc<DynamicMasPair>) -> Outcome {
    let sys = common::pll();
    let steps = vec![
        (0.0, 0.8),
        (0.04, -0.5),
        (0.09, 1.3),
        (0.15, 0.0),
        (0.2, -1.1),
    ];
    let x0 = [0.2, -15.0];
    let v0 = 0.1;
    let run = |alpha: f64| {
        let r = ReferenceSignal::steps(steps.clone()).unwrap().scaled(alpha);
        let x: Vec<f64> = x0.iter().map(|e| alpha * e).collect();
        let mut g = GovernorState::new(pair.clone(), None, alpha * v0).unwrap();
        simulate(&sys, &mut g, &r, &x, 3000).unwrap()
    };
    let base = run(1.0);
    let peak = |s: &[f64]| s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst_rel = 0.0f64;
    let mut worst_kappa = 0.0f64;
    let mut cases_equal = true;
    for alpha in HOMOGENEITY_ALPHAS {
        let tr = run(alpha);
        for (a, b) in [(&tr.y_tr, &base.y_tr), (&tr.v, &base.v)] {
            let p = peak(b);
            for (x, y) in a.iter().zip(b.iter()) {
                worst_rel = worst_rel.max((x - alpha * y).abs() / (alpha * y.abs().max(p)));
            }
        }
        for k in 0..tr.len() {
            worst_kappa = worst_kappa.max((tr.kappa_star[k] - base.kappa_star[k]).abs());
        }
        cases_equal &= tr.mas_case == base.mas_case && tr.feasible == base.feasible;
    }
    outcome(
        worst_rel <= HOMOGENEITY_REL_TOL && worst_kappa <= HOMOGENEITY_KAPPA_TOL && cases_equal,
        format!(
            "alpha {HOMOGENEITY_ALPHAS:?}: worst relative trace error {worst_rel:.2e}, \
             worst kappa difference {worst_kappa:.2e}, case and feasibility sequences equal: {cases_equal}"
        ),
    )
}

fn random_lp(rng: &mut ChaCha8Rng) -> (Vec<f64>, Matrix, Vec<f64>) {
    let n = rng.random_range(2..=4);
    let mut m = Matrix::zeros(0, n);
    let mut b = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            m.push_row(&e).unwrap();
            b.push(10.0);
        }
    }
    for _ in 0..rng.random_range(1..12) {
        let row: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        m.push_row(&row).unwrap();
        b.push(rng.random_range(0.1..5.0));
    }
    let c = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (c, m, b)
}

fn optimum(r: LpResult) -> Option<(Vec<f64>, f64)> {
    match r {
        LpResult::Optimal { optimizer, value } => Some((optimizer, value)),
        _ => None,
    }
}

fn close_vec(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

fn criterion_7(pair: &Arc<DynamicMasPair>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut failures = [0usize; 4];

    for _ in 0..PROPERTY_SAMPLES {
        let (c, m, n) = random_lp(&mut rng);
        let gamma = rng.random_range(0.01..100.0);
        let base = optimum(solve_lp(&LpProblem::max_le(c.clone(), m.clone(), n.clone())).unwrap());
        let scaled_rhs: Vec<f64> = n.iter().map(|v| gamma * v).collect();
        let scaled =
            optimum(solve_lp(&LpProblem::max_le(c.clone(), m.clone(), scaled_rhs)).unwrap());
        let ok = match (&base, scaled) {
            (Some((z, f)), Some((zg, fg))) => {
                let zs: Vec<f64> = z.iter().map(|v| gamma * v).collect();
                close_vec(&zg, &zs, LP_TOL)
                    && (fg - gamma * f).abs() <= LP_TOL * (1.0 + (gamma * f).abs())
            }
            _ => false,
        };
        failures[0] += usize::from(!ok);

        let neg: Vec<f64> = n.iter().map(|v| -v).collect();
        let refl = optimum(solve_lp_min_geq(&LpProblem::min_ge(c, m, neg)).unwrap());
        let ok = match (&base, refl) {
            (Some((z, f)), Some((zm, fm))) => {
                let zn: Vec<f64> = z.iter().map(|v| -v).collect();
                close_vec(&zm, &zn, LP_TOL) && (fm + f).abs() <= LP_TOL * (1.0 + f.abs())
            }
            _ => false,
        };
        failures[1] += usize::from(!ok);
    }

    let rep_for = |r: f64| if r > 0.0 { &pair.minus } else { &pair.plus };
    for _ in 0..PROPERTY_SAMPLES {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let r1: f64 = sign * rng.random_range(0.05..20.0);
        let r2: f64 = sign * rng.random_range(0.05..20.0);
        let k = r1 / r2;
        let rep = rep_for(r2);
        let x = [
            rng.random_range(-1.5..1.5) * r2.abs(),
            rng.random_range(-150.0..150.0) * r2.abs(),
        ];
        let v = rng.random_range(-1.5..1.5) * r2.abs();
        let s2 = rep.slacks(Orientation::Le, r2, &x, v);
        let s1 = rep.slacks(Orientation::Le, r1, &[k * x[0], k * x[1]], k * v);
        let ok = rep
            .coeffs()
            .row_iter()
            .zip(rep.h())
            .zip(s1.iter().zip(&s2))
            .all(|((row, h), (a, b))| {
                let size = (row[0] * k * x[0]).abs()
                    + (row[1] * k * x[1]).abs()
                    + (row[2] * k * v).abs()
                    + (r1 * h).abs();
                (a - k * b).abs() <= SCALING_TOL * (1.0 + size)
            });
        failures[2] += usize::from(!ok);
    }

    let mut nest_checked = 0;
    while nest_checked < PROPERTY_SAMPLES {
        let mut r1: f64 = rng.random_range(-5.0..5.0);
        let mut r2: f64 = rng.random_range(-5.0..5.0);
        if r1 > r2 {
            std::mem::swap(&mut r1, &mut r2);
        }
        if r1.abs() < 1e-3 || r2.abs() < 1e-3 {
            continue;
        }
        let w = r1.abs().max(r2.abs());
        let x = [
            rng.random_range(-1.5..1.5) * w,
            rng.random_range(-150.0..150.0) * w,
        ];
        let v = rng.random_range(-1.5..1.5) * w;
        if !rep_for(r1)
            .slacks(Orientation::Le, r1, &x, v)
            .iter()
            .all(|s| *s >= 0.0)
        {
            continue;
        }
        nest_checked += 1;
        failures[3] += usize::from(!contains(rep_for(r2), Orientation::Le, r2, &x, v));
    }
    for (r1, r2) in [(0.5, 1.0), (-1.0, 0.5), (-2.0, -1.0)] {
        let (m1, n1) = rep_for(r1).as_le_system(Orientation::Le, r1);
        let (m2, n2) = rep_for(r2).as_le_system(Orientation::Le, r2);
        for (row, &bound) in m2.row_iter().zip(&n2) {
            match common::lp_max(row, &m1, &n1) {
                Some(f) if f <= bound + 1e-9 * (1.0 + bound.abs()) => {}
                _ => failures[3] += 1,
            }
        }
    }
    outcome(
        failures.iter().all(|f| *f == 0),
        format!(
            "failures over {PROPERTY_SAMPLES} samples each: LP scaling {}, LP reflection {}, \
             set scaling {}, nesting {} (sampling plus LP)",
            failures[0], failures[1], failures[2], failures[3]
        ),
    )
}

fn criterion_8(pair: &Arc<DynamicMasPair>) -> Outcome {
    let sys = common::pll();
    let omegas = log_spaced(10.0, 1000.0, BODE_POINTS);
    let t0 = Instant::now();
    let governed = nonlinear_bode(
        &sys,
        || GovernorState::new(pair.clone(), None, 0.0).unwrap(),
        &omegas,
        1.0,
        &BodeOptions::default(),
    )
    .unwrap();
    let elapsed = t0.elapsed();
    let linear: Vec<f64> = omegas
        .iter()
        .map(|&w| linear_magnitude_db(&sys, w))
        .collect();
    let gov_max = governed
        .iter()
        .map(|p| p.magnitude_db)
        .fold(f64::NEG_INFINITY, f64::max);
    let (i_peak, lin_peak) =
        linear
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |a, (i, v)| if v > a.1 { (i, v) } else { a },
            );
    let w_peak = omegas[i_peak];
    let worst_gap = governed
        .iter()
        .zip(&linear)
        .filter(|(p, _)| p.omega > ROLL_OFF_FROM)
        .map(|(p, l)| (p.omega, p.magnitude_db - l))
        .fold(
            (0.0, 0.0f64),
            |a, (w, d)| if d.abs() > a.1.abs() { (w, d) } else { a },
        );
    let checks = [
        elapsed < BODE_RUNTIME,
        gov_max <= GOVERNED_PEAK_DB,
        (lin_peak - RESONANCE_DB).abs() <= RESONANCE_TOL_DB
            && w_peak >= RESONANCE_BAND.0
            && w_peak <= RESONANCE_BAND.1,
        worst_gap.1.abs() <= ROLL_OFF_AGREEMENT_DB,
    ];
    outcome(
        checks.iter().all(|c| *c),
        format!(
            "{BODE_POINTS} points in {elapsed:.1?}; governed max {gov_max:.3} dB; ungoverned peak \
             {lin_peak:.3} dB at {w_peak:.1} rad/s; largest governed-minus-linear gap above \
             {ROLL_OFF_FROM} rad/s {:.2} dB at {:.1} rad/s",
            worst_gap.1, worst_gap.0
        ),
    )
}

fn criterion_9(pair: &Arc<DynamicMasPair>) -> Outcome {
    let sys = common::pll();
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut worst_lp = 0.0f64;
    let mut states = 0;
    while states < KAPPA_STATES {
        let r: f64 = rng.random_range(-2.0..2.0);
        if r.abs() < 0.05 {
            continue;
        }
        let x = [rng.random_range(-2.5..2.5), rng.random_range(-150.0..150.0)];
        let v = rng.random_range(-2.5..2.5);
        let sel = select_dynamic_mas(pair, r, x[0]);
        if !sel
            .rep
            .slacks(sel.orientation, r, &x, v)
            .iter()
            .all(|s| *s > 0.0)
        {
            continue;
        }
        states += 1;
        let g = GovernorState::new(pair.clone(), None, v).unwrap();
        let (k, _) = g.rg_dc_kappa(&x, r, x[0]);
        let lp = common::kappa_by_lp(sel.rep, sel.orientation, r, &x, v, r);
        worst_lp = worst_lp.max((k - lp).abs());
    }

    let mut worst_grid = 0.0f64;
    let mut scenarios = 0;
    while scenarios < KAPPA_SCENARIOS {
        let v_prev: f64 = rng.random_range(-1.0..1.0);
        let r: f64 = rng.random_range(-2.0..2.0);
        if r.abs() < 0.05 {
            continue;
        }
        let x = sys.steady_state(v_prev);
        let sel = select_dynamic_mas(pair, r, x[0]);
        if !sel.contains(&x, v_prev) {
            continue;
        }
        scenarios += 1;
        let g = GovernorState::new(pair.clone(), None, v_prev).unwrap();
        let (k, _) = g.rg_dc_kappa(&x, r, x[0]);
        let below = sel.orientation == Orientation::Le;
        let grid = common::kappa_by_grid(&sys, &x, v_prev, r, below, EPS, 5000, KAPPA_GRID_STEP);
        worst_grid = worst_grid.max((k - grid).abs());
    }
    outcome(
        worst_lp <= KAPPA_LP_TOL && worst_grid <= KAPPA_GRID_TOL,
        format!(
            "worst |kappa - LP| {worst_lp:.2e} over {KAPPA_STATES} states; worst |kappa - grid| \
             {worst_grid:.2e} over {KAPPA_SCENARIOS} step scenarios"
        ),
    )
}

fn main() {
    let pair = pair_at(EPS);
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(|| criterion_3(&pair))),
        (4, Box::new(|| criterion_4(&pair))),
        (5, Box::new(criterion_5)),
        (6, Box::new(|| criterion_6(&pair))),
        (7, Box::new(|| criterion_7(&pair))),
        (8, Box::new(|| criterion_8(&pair))),
        (9, Box::new(|| criterion_9(&pair))),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in &criteria {
        let t0 = Instant::now();
        let o = run();
        let expected_fail = EXPECTED_FAILURES.contains(id);
        let tag = match (o.pass, expected_fail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as known failure)",
        };
        println!("criterion {id}: {tag} [{:.1?}] {}", t0.elapsed(), o.detail);
        if o.pass == expected_fail {
            unexpected.push(*id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
