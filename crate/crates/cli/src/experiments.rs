use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use rgdc::governor::{GovernorState, Passthrough, ReferenceFilter};
use rgdc::mas::{
    build_dynamic_mas_pair, build_robust_dynamic_pair, build_robust_mas, build_static_mas,
    write_mas_csv, DiscreteLtiSystem, DynamicMasPair, MasRepresentation, RobustConstraint,
    UncertainSystem,
};
use rgdc::simkit::{
    convergence_experiment, final_window_spread, linear_magnitude_db, log_spaced, nonlinear_bode,
    simulate, write_bode_csv, ReferenceSignal, SimulationTrace,
};

use crate::manifest;
use crate::scenario::{Experiment, Scenario, SystemSpec};

/// Files written and one-line results, in order.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

struct Outputs<'a> {
    dir: &'a Path,
    stem: String,
    report: Report,
}

impl Outputs<'_> {
    fn write(
        &mut self,
        suffix: &str,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.dir.join(format!("{}{suffix}.csv", self.stem));
        let file =
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.report.files.push(path);
        Ok(())
    }

    fn note(&mut self, line: String) {
        self.report.lines.push(line);
    }
}

/// Runs `experiment` and writes its CSVs and manifest into the output dir.
pub fn run(scenario: &mut Scenario, experiment: Experiment) -> Result<Report> {
    scenario.experiment = Some(experiment);
    scenario.check_for(experiment)?;
    let sys = scenario.build_system()?;
    resolve_initial_state(scenario, &sys)?;
    let dir = scenario.output_dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut out = Outputs {
        dir: &dir,
        stem: format!("{experiment}_{}", scenario.name),
        report: Report::default(),
    };
    match experiment {
        Experiment::Mas => mas(scenario, &sys, &mut out)?,
        Experiment::Simulate | Experiment::Multistep => single_run(scenario, &sys, &mut out)?,
        Experiment::Bode => bode(scenario, &sys, &mut out)?,
        Experiment::Robust => robust(scenario, &sys, &mut out)?,
        Experiment::Converge => converge(scenario, &sys, &mut out)?,
    }
    let mut notes: Vec<String> = out.report.lines.clone();
    notes.extend(
        out.report
            .files
            .iter()
            .filter_map(|p| p.file_name())
            .map(|f| format!("output: {}", f.to_string_lossy())),
    );
    let path = dir.join(format!("run_manifest_{}.toml", out.stem));
    fs::write(&path, manifest::render(scenario, &notes)?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    out.report.files.push(path);
    Ok(out.report)
}

/// Fills `x0` with zeros and `v0` with `y_tr(x0)` when absent, so the
/// manifest records the values actually used.
fn resolve_initial_state(scenario: &mut Scenario, sys: &DiscreteLtiSystem) -> Result<()> {
    let x0 = scenario
        .simulation
        .x0
        .get_or_insert_with(|| vec![0.0; sys.order()]);
    anyhow::ensure!(
        x0.len() == sys.order(),
        "simulation.x0 has {} entries, system order is {}",
        x0.len(),
        sys.order()
    );
    let y0 = sys.y_tr(x0);
    scenario.simulation.v0.get_or_insert(y0);
    Ok(())
}

fn nominal_sets(
    scenario: &Scenario,
    sys: &DiscreteLtiSystem,
) -> Result<(Arc<DynamicMasPair>, Option<Arc<MasRepresentation>>)> {
    let pair = build_dynamic_mas_pair(sys, scenario.epsilon)?;
    let st = match scenario.constraint_set(sys)? {
        Some(cs) => Some(Arc::new(build_static_mas(sys, &cs, scenario.epsilon)?)),
        None => None,
    };
    Ok((Arc::new(pair), st))
}

fn mas(scenario: &Scenario, sys: &DiscreteLtiSystem, out: &mut Outputs) -> Result<()> {
    let (pair, st) = nominal_sets(scenario, sys)?;
    if let Some(st) = &st {
        out.write("", |w| write_mas_csv(st, w))?;
        out.note(set_summary("static", st));
    }
    out.write("_minus", |w| write_mas_csv(&pair.minus, w))?;
    out.write("_plus", |w| write_mas_csv(&pair.plus, w))?;
    out.note(set_summary("dynamic minus", &pair.minus));
    out.note(set_summary("dynamic plus", &pair.plus));
    Ok(())
}

fn set_summary(label: &str, rep: &MasRepresentation) -> String {
    format!(
        "{label}: j* = {}, {} rows ({} steady-state)",
        rep.admissibility_index(),
        rep.len(),
        rep.steady_state_rows().len()
    )
}

fn filter_for(
    scenario: &Scenario,
    pair: &Arc<DynamicMasPair>,
    st: &Option<Arc<MasRepresentation>>,
    v0: f64,
) -> Result<Box<dyn ReferenceFilter>> {
    if scenario.simulation.governed {
        Ok(Box::new(GovernorState::new(pair.clone(), st.clone(), v0)?))
    } else {
        let mut p = Passthrough::default();
        p.reset(v0);
        Ok(Box::new(p))
    }
}

fn single_run(scenario: &Scenario, sys: &DiscreteLtiSystem, out: &mut Outputs) -> Result<()> {
    let reference = scenario.reference_signal()?;
    let (pair, st) = nominal_sets(scenario, sys)?;
    let sim = &scenario.simulation;
    let x0 = sim.x0.clone().unwrap_or_default();
    let mut filter = filter_for(scenario, &pair, &st, sim.v0.unwrap_or(0.0))?;
    let trace = simulate(sys, filter.as_mut(), &reference, &x0, sim.steps)?;
    out.write("", |w| trace.write_csv(w))?;
    out.note(trace_summary(&trace, &reference));
    Ok(())
}

fn trace_summary(trace: &SimulationTrace, reference: &ReferenceSignal) -> String {
    let infeasible = trace.feasible.iter().filter(|f| !**f).count();
    let shape = match segment_overshoot(trace, reference) {
        Some(os) => format!("largest overshoot {os:.6}"),
        None => format!(
            "peak |y_tr| {:.6}",
            trace.y_tr.iter().fold(0.0_f64, |m, y| m.max(y.abs()))
        ),
    };
    format!(
        "{} samples, {shape}, {infeasible} infeasible samples",
        trace.len()
    )
}

/// Largest excursion of `y_tr` past the level of each constant stretch of a
/// piecewise-constant reference, measured away from the side `y_tr` starts
/// the stretch on. `None` for sinusoids.
fn segment_overshoot(trace: &SimulationTrace, reference: &ReferenceSignal) -> Option<f64> {
    if matches!(reference, ReferenceSignal::Sinusoid { .. }) {
        return None;
    }
    let mut worst = 0.0_f64;
    let mut start = 0;
    while start < trace.len() {
        let level = trace.r[start];
        let end = (start..trace.len())
            .find(|&k| trace.r[k] != level)
            .unwrap_or(trace.len());
        let below = trace.y_tr[start] <= level;
        for &y in &trace.y_tr[start..end] {
            worst = worst.max(if below { y - level } else { level - y });
        }
        start = end;
    }
    Some(worst)
}

fn bode(scenario: &Scenario, sys: &DiscreteLtiSystem, out: &mut Outputs) -> Result<()> {
    let b = &scenario.bode;
    let omegas = log_spaced(b.omega_min, b.omega_max, b.points);
    let opts = b.options();
    let points = if scenario.simulation.governed {
        let (pair, st) = nominal_sets(scenario, sys)?;
        nonlinear_bode(
            sys,
            || GovernorState::new(pair.clone(), st.clone(), 0.0).expect("sets share one plant"),
            &omegas,
            b.amplitude,
            &opts,
        )?
    } else {
        nonlinear_bode(sys, Passthrough::default, &omegas, b.amplitude, &opts)?
    };
    out.write("", |w| write_bode_csv(&points, w))?;
    out.write("_linear", |w| {
        writeln!(w, "omega_rad_s,magnitude_db")?;
        for &omega in &omegas {
            writeln!(w, "{omega:?},{:?}", linear_magnitude_db(sys, omega))?;
        }
        Ok(())
    })?;
    let peak = points
        .iter()
        .max_by(|a, b| a.magnitude_db.total_cmp(&b.magnitude_db))
        .expect("at least one frequency");
    out.note(format!(
        "{} frequencies, peak {:.4} dB at {:.4} rad/s",
        points.len(),
        peak.magnitude_db,
        peak.omega
    ));
    Ok(())
}

fn robust(scenario: &Scenario, sys: &DiscreteLtiSystem, out: &mut Outputs) -> Result<()> {
    let SystemSpec::Pll { g_lp, g_vco, ts } = scenario.system else {
        unreachable!("checked before the run");
    };
    let u = scenario
        .uncertainty
        .as_ref()
        .expect("checked before the run");
    let method = u.method.into();
    let usys = UncertainSystem::pll(g_lp, &[u.g_vco.0, u.g_vco.1], g_vco, ts)?;
    let pair = Arc::new(build_robust_dynamic_pair(&usys, scenario.epsilon, method)?);
    let cs = scenario.constraint_set(sys)?;
    let st = match &cs {
        Some(cs) => Some(Arc::new(build_robust_mas(
            &usys,
            &RobustConstraint::Static(cs.clone()),
            scenario.epsilon,
            method,
        )?)),
        None => None,
    };
    out.write("_minus", |w| write_mas_csv(&pair.minus, w))?;
    out.write("_plus", |w| write_mas_csv(&pair.plus, w))?;
    out.note(set_summary("robust minus", &pair.minus));
    out.note(set_summary("robust plus", &pair.plus));
    if let Some(st) = &st {
        out.write("_static", |w| write_mas_csv(st, w))?;
        out.note(set_summary("robust static", st));
    }

    let reference = scenario.reference_signal()?;
    let sim = &scenario.simulation;
    let x0 = sim.x0.clone().unwrap_or_default();
    let mut gains = vec![u.g_vco.0, g_vco, u.g_vco.1];
    gains.dedup();
    let mut rows = Vec::new();
    for g in gains {
        let plant = DiscreteLtiSystem::pll(g_lp, g, ts)?;
        let mut filter = filter_for(scenario, &pair, &st, sim.v0.unwrap_or(0.0))?;
        let trace = simulate(&plant, filter.as_mut(), &reference, &x0, sim.steps)?;
        out.write(&format!("_g_vco_{g}"), |w| trace.write_csv(w))?;
        let violation = cs.as_ref().map(|cs| {
            trace
                .y_st
                .iter()
                .flat_map(|y| {
                    (0..cs.len()).map(move |i| {
                        let row = cs.matrix().row(i);
                        row.iter().zip(y).map(|(s, y)| s * y).sum::<f64>() - cs.bound()[i]
                    })
                })
                .fold(f64::NEG_INFINITY, f64::max)
        });
        out.note(format!("g_vco {g}: {}", trace_summary(&trace, &reference)));
        let os = segment_overshoot(&trace, &reference).unwrap_or(f64::NAN);
        rows.push((g, os, violation, trace));
    }
    out.write("", |w| {
        let constrained = cs.is_some();
        write!(w, "g_vco,overshoot")?;
        if constrained {
            write!(w, ",max_constraint_excess")?;
        }
        writeln!(w, ",infeasible_samples")?;
        for (g, os, violation, trace) in &rows {
            write!(w, "{g:?},{os:?}")?;
            if let Some(v) = violation {
                write!(w, ",{v:?}")?;
            }
            writeln!(w, ",{}", trace.feasible.iter().filter(|f| !**f).count())?;
        }
        Ok(())
    })?;
    Ok(())
}

fn converge(scenario: &Scenario, sys: &DiscreteLtiSystem, out: &mut Outputs) -> Result<()> {
    let cfg = scenario.convergence.config(scenario.seed);
    let runs = if scenario.simulation.governed {
        let (pair, st) = nominal_sets(scenario, sys)?;
        convergence_experiment(
            sys,
            |v0| GovernorState::new(pair.clone(), st.clone(), v0).expect("sets share one plant"),
            &cfg,
        )?
    } else {
        convergence_experiment(
            sys,
            |v0| {
                let mut p = Passthrough::default();
                p.reset(v0);
                p
            },
            &cfg,
        )?
    };
    out.write("", |w| {
        for (i, (_, trace)) in runs.iter().enumerate() {
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            let text = String::from_utf8(buf).expect("CSV is ASCII");
            let mut lines = text.lines();
            let header = lines.next().unwrap_or_default();
            if i == 0 {
                writeln!(w, "run,{header}")?;
            }
            for line in lines {
                writeln!(w, "{i},{line}")?;
            }
        }
        Ok(())
    })?;
    out.write("_initial", |w| {
        write!(w, "run")?;
        for j in 1..=sys.order() {
            write!(w, ",x0_{j}")?;
        }
        writeln!(w, ",v0")?;
        for (i, (ic, _)) in runs.iter().enumerate() {
            write!(w, "{i}")?;
            for x in &ic.x0 {
                write!(w, ",{x:?}")?;
            }
            writeln!(w, ",{:?}", ic.v0)?;
        }
        Ok(())
    })?;
    let traces: Vec<SimulationTrace> = runs.into_iter().map(|(_, t)| t).collect();
    let infeasible = traces
        .iter()
        .filter(|t| t.feasible.iter().any(|f| !f))
        .count();
    out.note(format!(
        "{} runs, final-window spread {:.3e}, {} runs with infeasible samples",
        traces.len(),
        final_window_spread(&traces, 0.2),
        infeasible
    ));
    Ok(())
}
