use super::SimError;

/// Reference signal `r(t)`, `t` in seconds.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceSignal {
    Constant(f64),
    /// `(time, level)` pairs with strictly increasing times; the level is 0
    /// before the first step.
    Steps(Vec<(f64, f64)>),
    /// `amplitude * sin(omega * t)`.
    Sinusoid {
        amplitude: f64,
        omega: f64,
    },
}

impl ReferenceSignal {
    pub fn constant(level: f64) -> Result<Self, SimError> {
        if !level.is_finite() {
            return Err(SimError::Config("reference level must be finite".into()));
        }
        Ok(Self::Constant(level))
    }

    pub fn steps(steps: Vec<(f64, f64)>) -> Result<Self, SimError> {
        if steps.iter().any(|(t, l)| !t.is_finite() || !l.is_finite()) {
            return Err(SimError::Config(
                "step times and levels must be finite".into(),
            ));
        }
        if steps.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SimError::Config(
                "step times must be strictly increasing".into(),
            ));
        }
        Ok(Self::Steps(steps))
    }

    pub fn sinusoid(amplitude: f64, omega: f64) -> Result<Self, SimError> {
        if !(omega > 0.0 && omega.is_finite()) || !amplitude.is_finite() {
            return Err(SimError::Config(format!(
                "sinusoid needs finite amplitude and omega > 0, got omega = {omega}"
            )));
        }
        Ok(Self::Sinusoid { amplitude, omega })
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Self::Constant(l) => *l,
            Self::Steps(steps) => steps
                .iter()
                .take_while(|(ts, _)| t >= ts - 1e-12 * (1.0 + ts.abs()))
                .last()
                .map_or(0.0, |(_, l)| *l),
            Self::Sinusoid { amplitude, omega } => amplitude * (omega * t).sin(),
        }
    }

    /// The same signal with every level multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        match self {
            Self::Constant(l) => Self::Constant(alpha * l),
            Self::Steps(steps) => Self::Steps(steps.iter().map(|(t, l)| (*t, alpha * l)).collect()),
            Self::Sinusoid { amplitude, omega } => Self::Sinusoid {
                amplitude: alpha * amplitude,
                omega: *omega,
            },
        }
    }

    /// Largest `|r(t)|` the signal can take.
    pub fn sup_abs(&self) -> f64 {
        match self {
            Self::Constant(l) => l.abs(),
            Self::Steps(steps) => steps.iter().fold(0.0, |m, (_, l)| f64::max(m, l.abs())),
            Self::Sinusoid { amplitude, .. } => amplitude.abs(),
        }
    }
}
