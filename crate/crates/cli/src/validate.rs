//! Pre-flight checks on a scenario. Failures are reported, never raised.

use rgdc::mas::{DiscreteLtiSystem, DC_GAIN_TOL};

use crate::scenario::{Scenario, SystemSpec};

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// One `name: PASS|FAIL (detail)` line per check, then a summary line.
pub fn report(s: &Scenario) -> String {
    let mut checks = Vec::new();

    match s.discrete_a() {
        Ok(a) => match a.spectral_radius() {
            Ok(rho) => checks.push(Check {
                name: "stability",
                pass: rho < 1.0,
                detail: format!("spectral radius {rho:.9}"),
            }),
            Err(e) => checks.push(Check {
                name: "stability",
                pass: false,
                detail: e.to_string(),
            }),
        },
        Err(e) => checks.push(Check {
            name: "stability",
            pass: false,
            detail: format!("{e:#}"),
        }),
    }

    let sys = s.build_system_unchecked();
    checks.push(match &sys {
        Ok(sys) => {
            let g = sys.dc_gain();
            Check {
                name: "dc gain",
                pass: (g - 1.0).abs() <= DC_GAIN_TOL,
                detail: format!("gain {g:.12}"),
            }
        }
        Err(e) => Check {
            name: "dc gain",
            pass: false,
            detail: format!("{e:#}"),
        },
    });

    checks.push(Check {
        name: "epsilon",
        pass: s.epsilon > 0.0 && s.epsilon < 1.0,
        detail: format!("epsilon {}", s.epsilon),
    });

    if let (Ok(sys), Some(_)) = (&sys, &s.constraints) {
        checks.push(match s.constraint_set(sys) {
            Ok(cs) => Check {
                name: "constraints",
                pass: true,
                detail: format!("{} rows", cs.map_or(0, |c| c.len())),
            },
            Err(e) => Check {
                name: "constraints",
                pass: false,
                detail: format!("{e:#}"),
            },
        });
    }

    if let (Some(u), SystemSpec::Pll { g_lp, ts, .. }) = (&s.uncertainty, &s.system) {
        for g in [u.g_vco.0, u.g_vco.1] {
            let (pass, detail) = match DiscreteLtiSystem::pll(*g_lp, g, *ts) {
                Ok(v) => (true, format!("spectral radius {:.9}", v.spectral_radius())),
                Err(e) => (false, e.to_string()),
            };
            checks.push(Check {
                name: if g == u.g_vco.0 {
                    "vertex low"
                } else {
                    "vertex high"
                },
                pass,
                detail: format!("g_vco {g}: {detail}"),
            });
        }
    }

    let mut out = String::new();
    for c in &checks {
        out.push_str(&format!(
            "{}: {} ({})\n",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        out.push_str("all checks passed\n");
    } else {
        out.push_str(&format!("{failed} check(s) failed\n"));
    }
    out
}
