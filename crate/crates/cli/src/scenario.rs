//! Scenario files: TOML with nested tables, one file per run.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rgdc::mas::{ConstraintSet, DiscreteLtiSystem, RobustMethod};
use rgdc::numerics::{zoh_discretize, Matrix};
use rgdc::simkit::{BodeOptions, ConvergenceConfig, ReferenceSignal};
use serde::{Deserialize, Serialize};

pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Mas,
    Simulate,
    Multistep,
    Bode,
    Robust,
    Converge,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mas => "mas",
            Self::Simulate => "simulate",
            Self::Multistep => "multistep",
            Self::Bode => "bode",
            Self::Robust => "robust",
            Self::Converge => "converge",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSpec>,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub bode: BodeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<UncertaintySpec>,
    #[serde(default)]
    pub convergence: ConvergenceSpec,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Plant description. `continuous` matrices are discretized by zero-order
/// hold at `ts`; `discrete` matrices are used as given.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Pll {
        #[serde(default = "default_g_lp")]
        g_lp: f64,
        #[serde(default = "default_g_vco")]
        g_vco: f64,
        #[serde(default = "default_ts")]
        ts: f64,
    },
    Continuous(MatrixSystem),
    Discrete(MatrixSystem),
}

fn default_g_lp() -> f64 {
    100.0
}

fn default_g_vco() -> f64 {
    200.0
}

fn default_ts() -> f64 {
    1e-4
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSystem {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c_tr: Vec<f64>,
    #[serde(default)]
    pub c_st: Vec<Vec<f64>>,
    #[serde(default)]
    pub d_st: Vec<f64>,
    pub ts: f64,
}

/// `matrix * y_st <= bound`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub matrix: Vec<Vec<f64>>,
    pub bound: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    Constant {
        level: f64,
    },
    /// `[time, level]` pairs.
    Steps {
        steps: Vec<(f64, f64)>,
    },
    Sinusoid {
        amplitude: f64,
        omega: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Initial plant state, zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Initial applied reference `v(-1)`, `y_tr(0)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default = "yes")]
    pub governed: bool,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            steps: default_steps(),
            x0: None,
            v0: None,
            governed: true,
        }
    }
}

fn default_steps() -> usize {
    10_000
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BodeSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub amplitude: f64,
    pub discard_fraction: f64,
    pub min_periods: f64,
    pub settle_multiple: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

impl Default for BodeSpec {
    fn default() -> Self {
        let opts = BodeOptions::default();
        Self {
            omega_min: 10.0,
            omega_max: 1000.0,
            points: 100,
            amplitude: 1.0,
            discard_fraction: opts.discard_fraction,
            min_periods: opts.min_periods,
            settle_multiple: opts.settle_multiple,
            horizon: opts.horizon,
        }
    }
}

impl BodeSpec {
    pub fn options(&self) -> BodeOptions {
        BodeOptions {
            discard_fraction: self.discard_fraction,
            min_periods: self.min_periods,
            settle_multiple: self.settle_multiple,
            horizon: self.horizon,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustMethodSpec {
    Vertexwise,
    Polytopic,
}

impl From<RobustMethodSpec> for RobustMethod {
    fn from(m: RobustMethodSpec) -> Self {
        match m {
            RobustMethodSpec::Vertexwise => RobustMethod::Vertexwise,
            RobustMethodSpec::Polytopic => RobustMethod::Polytopic,
        }
    }
}

/// VCO gain interval of the PLL; the nominal gain is `system.g_vco`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintySpec {
    pub g_vco: (f64, f64),
    #[serde(default = "default_method")]
    pub method: RobustMethodSpec,
}

fn default_method() -> RobustMethodSpec {
    RobustMethodSpec::Vertexwise
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub runs: usize,
    pub state_ranges: Vec<(f64, f64)>,
    pub v0_range: (f64, f64),
    pub amplitude: f64,
    pub omega: f64,
    pub steps: usize,
}

impl Default for ConvergenceSpec {
    fn default() -> Self {
        let d = ConvergenceConfig::pll_default(0);
        Self {
            runs: d.n_runs,
            state_ranges: d.state_ranges,
            v0_range: d.v0_range,
            amplitude: d.amplitude,
            omega: d.omega,
            steps: d.steps,
        }
    }
}

impl ConvergenceSpec {
    pub fn config(&self, seed: u64) -> ConvergenceConfig {
        ConvergenceConfig {
            n_runs: self.runs,
            state_ranges: self.state_ranges.clone(),
            v0_range: self.v0_range,
            amplitude: self.amplitude,
            omega: self.omega,
            steps: self.steps,
            seed,
        }
    }
}

/// Command-line values that replace those in the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid scenario {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
        if let Some(eps) = o.epsilon {
            self.epsilon = eps;
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
    }

    /// Discrete plant, with stability and unit DC gain enforced.
    pub fn build_system(&self) -> Result<DiscreteLtiSystem> {
        let (a, b, c_tr, c_st, d_st, ts) = self.system_parts()?;
        Ok(DiscreteLtiSystem::new(a, b, c_tr, c_st, d_st, ts)?)
    }

    /// State matrix after discretization, before any check other than shape.
    pub fn discrete_a(&self) -> Result<Matrix> {
        Ok(self.system_parts()?.0)
    }

    /// Plant without the stability and DC gain checks.
    pub fn build_system_unchecked(&self) -> Result<DiscreteLtiSystem> {
        let (a, b, c_tr, c_st, d_st, ts) = self.system_parts()?;
        Ok(DiscreteLtiSystem::new_unchecked(
            a, b, c_tr, c_st, d_st, ts,
        )?)
    }

    #[allow(clippy::type_complexity)]
    fn system_parts(&self) -> Result<(Matrix, Vec<f64>, Vec<f64>, Matrix, Vec<f64>, f64)> {
        match &self.system {
            SystemSpec::Pll { g_lp, g_vco, ts } => {
                let (a_c, b_c) = rgdc::mas::pll_continuous(*g_lp, *g_vco);
                let (a, b) = zoh_discretize(&a_c, &b_c, *ts)?;
                Ok((
                    a,
                    b.col(0),
                    vec![1.0, 0.0],
                    Matrix::from_rows(&[[0.0, 1.0]])?,
                    vec![0.0],
                    *ts,
                ))
            }
            SystemSpec::Continuous(m) => {
                let a_c = matrix_from(&m.a, "system.a")?;
                let b_c = Matrix::column(&m.b)?;
                let (a, b) = zoh_discretize(&a_c, &b_c, m.ts)?;
                Ok((
                    a,
                    b.col(0),
                    m.c_tr.clone(),
                    c_st_from(m)?,
                    m.d_st.clone(),
                    m.ts,
                ))
            }
            SystemSpec::Discrete(m) => Ok((
                matrix_from(&m.a, "system.a")?,
                m.b.clone(),
                m.c_tr.clone(),
                c_st_from(m)?,
                m.d_st.clone(),
                m.ts,
            )),
        }
    }

    /// Static constraint set, checked against the plant's constrained outputs.
    pub fn constraint_set(&self, sys: &DiscreteLtiSystem) -> Result<Option<ConstraintSet>> {
        let Some(spec) = &self.constraints else {
            return Ok(None);
        };
        let m = matrix_from(&spec.matrix, "constraints.matrix")?;
        if m.cols() != sys.constrained_outputs() {
            bail!(
                "constraints.matrix has {} columns but the plant has {} constrained outputs",
                m.cols(),
                sys.constrained_outputs()
            );
        }
        Ok(Some(ConstraintSet::new(m, spec.bound.clone())?))
    }

    pub fn reference_signal(&self) -> Result<ReferenceSignal> {
        let spec = self
            .reference
            .as_ref()
            .context("this experiment needs a [reference] table")?;
        Ok(match spec {
            ReferenceSpec::Constant { level } => ReferenceSignal::constant(*level)?,
            ReferenceSpec::Steps { steps } => ReferenceSignal::steps(steps.clone())?,
            ReferenceSpec::Sinusoid { amplitude, omega } => {
                ReferenceSignal::sinusoid(*amplitude, *omega)?
            }
        })
    }

    /// Checks the fields the chosen experiment depends on.
    pub fn check_for(&self, experiment: Experiment) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            bail!("epsilon must lie in (0, 1), got {}", self.epsilon);
        }
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            bail!("name must be non-empty and use only letters, digits, '_' and '-'");
        }
        match experiment {
            Experiment::Simulate => {
                self.reference_signal()?;
            }
            Experiment::Multistep => {
                if !matches!(self.reference, Some(ReferenceSpec::Steps { .. })) {
                    bail!("multistep needs reference.kind = \"steps\"");
                }
                self.reference_signal()?;
            }
            Experiment::Robust => {
                self.reference_signal()?;
                let u = self
                    .uncertainty
                    .as_ref()
                    .context("robust needs an [uncertainty] table")?;
                if !matches!(self.system, SystemSpec::Pll { .. }) {
                    bail!("robust needs system.kind = \"pll\"");
                }
                if !(u.g_vco.0 > 0.0 && u.g_vco.0 <= u.g_vco.1) {
                    bail!(
                        "uncertainty.g_vco must be an interval of positive gains, got [{}, {}]",
                        u.g_vco.0,
                        u.g_vco.1
                    );
                }
            }
            Experiment::Bode => {
                let b = &self.bode;
                if !(b.omega_min > 0.0 && b.omega_min <= b.omega_max) || b.points == 0 {
                    bail!("bode needs 0 < omega_min <= omega_max and points >= 1");
                }
            }
            Experiment::Mas | Experiment::Converge => {}
        }
        Ok(())
    }
}

fn matrix_from(rows: &[Vec<f64>], field: &str) -> Result<Matrix> {
    Matrix::from_rows(rows).with_context(|| format!("{field} is not a rectangular matrix"))
}

fn c_st_from(m: &MatrixSystem) -> Result<Matrix> {
    if m.c_st.is_empty() {
        Ok(Matrix::zeros(0, m.a.len()))
    } else {
        matrix_from(&m.c_st, "system.c_st")
    }
}
