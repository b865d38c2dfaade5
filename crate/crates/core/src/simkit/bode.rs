use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;

use crate::governor::ReferenceFilter;
use crate::mas::DiscreteLtiSystem;

use super::{simulate, ReferenceSignal, SimError};

/// One frequency of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodePoint {
    pub omega: f64,
    pub amplitude: f64,
    pub sup_output: f64,
    /// `20 log10(sup_output / amplitude)`.
    pub magnitude_db: f64,
}

/// Simulation window used per frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodeOptions {
    /// Leading share of the horizon treated as transient.
    pub discard_fraction: f64,
    /// Minimum horizon in periods of the input.
    pub min_periods: f64,
    /// Minimum horizon in multiples of the settling time `4 / sigma`.
    pub settle_multiple: f64,
    /// Fixed horizon in seconds, replacing the rule above.
    pub horizon: Option<f64>,
}

impl Default for BodeOptions {
    fn default() -> Self {
        Self {
            discard_fraction: 0.6,
            min_periods: 50.0,
            settle_multiple: 2.0,
            horizon: None,
        }
    }
}

/// `n` points from `lo` to `hi`, equally spaced in `log10`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
                .collect()
        }
    }
}

/// Total samples and the index where measurement starts.
///
/// The window after the discarded transient is trimmed from the front to a
/// whole number of input periods.
pub fn bode_window(
    sys: &DiscreteLtiSystem,
    omega: f64,
    opts: &BodeOptions,
) -> Result<(usize, usize), SimError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(SimError::Config(format!(
            "omega must be positive, got {omega}"
        )));
    }
    let ts = sys.ts();
    let period = 2.0 * PI / omega;
    let horizon = match opts.horizon {
        Some(h) => h,
        None => {
            let sigma = -sys.spectral_radius().ln() / ts;
            (opts.min_periods * period).max(opts.settle_multiple * 4.0 / sigma)
        }
    };
    let total = (horizon / ts).ceil() as usize;
    let kept = total - (opts.discard_fraction * total as f64).floor() as usize;
    let periods = (kept as f64 * ts / period).floor();
    if periods < 1.0 {
        return Err(SimError::Config(format!(
            "measurement window of {:.3e} s is shorter than one period ({:.3e} s)",
            kept as f64 * ts,
            period
        )));
    }
    let window = ((periods * period / ts).round() as usize).min(kept);
    Ok((total, total - window))
}

/// Sup-norm frequency response of the closed loop driven by
/// `amplitude * sin(omega t)` from `x = 0`, one simulation per frequency.
pub fn nonlinear_bode<F, M>(
    sys: &DiscreteLtiSystem,
    make_filter: M,
    omegas: &[f64],
    amplitude: f64,
    opts: &BodeOptions,
) -> Result<Vec<BodePoint>, SimError>
where
    F: ReferenceFilter,
    M: Fn() -> F + Sync,
{
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(SimError::Config(format!(
            "amplitude must be positive, got {amplitude}"
        )));
    }
    omegas
        .par_iter()
        .map(|&omega| {
            let (total, start) = bode_window(sys, omega, opts)?;
            let reference = ReferenceSignal::sinusoid(amplitude, omega)?;
            let mut filter = make_filter();
            let x0 = vec![0.0; sys.order()];
            let trace = simulate(sys, &mut filter, &reference, &x0, total)?;
            let sup_output = trace.y_tr[start..]
                .iter()
                .fold(0.0_f64, |m, y| m.max(y.abs()));
            Ok(BodePoint {
                omega,
                amplitude,
                sup_output,
                magnitude_db: 20.0 * (sup_output / amplitude).log10(),
            })
        })
        .collect()
}

/// `|C_tr (e^{j omega Ts} I - A)^{-1} B|` in dB.
pub fn linear_magnitude_db(sys: &DiscreteLtiSystem, omega: f64) -> f64 {
    let n = sys.order();
    let z = Complex::from_polar(1.0, omega * sys.ts());
    let m = DMatrix::from_fn(n, n, |i, j| {
        let a = Complex::new(sys.a()[(i, j)], 0.0);
        if i == j {
            z - a
        } else {
            -a
        }
    });
    let b = DVector::from_fn(n, |i, _| Complex::new(sys.b()[i], 0.0));
    let w = m
        .lu()
        .solve(&b)
        .expect("e^{j omega Ts} is not an eigenvalue of a stable A");
    let g: Complex<f64> = sys.c_tr().iter().zip(w.iter()).map(|(c, wi)| wi * *c).sum();
    20.0 * g.norm().log10()
}

/// CSV with header `omega_rad_s,amplitude,sup_output,magnitude_db`.
pub fn write_bode_csv<W: Write>(points: &[BodePoint], mut out: W) -> io::Result<()> {
    writeln!(out, "omega_rad_s,amplitude,sup_output,magnitude_db")?;
    for p in points {
        writeln!(
            out,
            "{:?},{:?},{:?},{:?}",
            p.omega, p.amplitude, p.sup_output, p.magnitude_db
        )?;
    }
    Ok(())
}
