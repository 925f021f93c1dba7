//! Fixed-step splitting integration.
//!
//! One step of size `h` applies the scheme's factors in order, replacing
//! coordinate `i` by its frozen flow over the (possibly complex) time
//! `c * h`. The state is carried in complex arithmetic between steps; real
//! parts are taken when a grid point is recorded.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scheme::Scheme;
use crate::systems::OdeSystem;

/// States on a uniform grid `t_j = j T / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Largest imaginary component seen at a recorded grid point.
    pub max_imag: f64,
    /// Set when the imaginary part exceeded the warning threshold.
    pub imag_warning: bool,
    pub label: String,
    pub n: usize,
    pub horizon: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Drop the imaginary part after every full step.
    pub project_real_each_step: bool,
    /// Relative size of the imaginary part (against the state norm) above
    /// which a warning is logged.
    pub imag_warn_threshold: f64,
    /// Record every `record_every`-th grid point.
    pub record_every: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            project_real_each_step: false,
            imag_warn_threshold: 1e-6,
            record_every: 1,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.imag_warn_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "imag_warn_threshold must be positive".into(),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument(
                "record_every must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn check_compatible(sys: &dyn OdeSystem, scheme: &Scheme) -> Result<()> {
    if scheme.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: scheme.dim(),
        });
    }
    if scheme.has_complex_coefficients() && !sys.analytic_time() {
        return Err(Error::ComplexTimeUnsupported(sys.name().into()));
    }
    Ok(())
}

fn apply_factors(sys: &dyn OdeSystem, scheme: &Scheme, h: f64, u: &mut [Complex64]) -> Result<()> {
    for (idx, f) in scheme.factors().iter().enumerate() {
        let v = sys.frozen_eval(f.coord, u, f.coeff * h)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Overflow {
                factor: idx,
                coord: f.coord,
            });
        }
        u[f.coord - 1] = v;
    }
    Ok(())
}

/// Advances `u` in place by one step of size `h`.
pub fn step(sys: &dyn OdeSystem, scheme: &Scheme, h: f64, u: &mut [Complex64]) -> Result<()> {
    check_compatible(sys, scheme)?;
    if u.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: u.len(),
        });
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive, got {h}"
        )));
    }
    apply_factors(sys, scheme, h, u)
}

/// Runs `n` steps of size `horizon / n` from the real state `u0`.
pub fn integrate(
    sys: &dyn OdeSystem,
    scheme: &Scheme,
    horizon: f64,
    n: usize,
    u0: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_compatible(sys, scheme)?;
    opts.validate()?;
    if u0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: u0.len(),
        });
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "final time must be positive, got {horizon}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "step count must be at least 1".into(),
        ));
    }

    let h = horizon / n as f64;
    let mut u: Vec<Complex64> = u0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let recorded = n / opts.record_every;
    let mut times = Vec::with_capacity(recorded);
    let mut states = Vec::with_capacity(recorded);
    let mut max_imag: f64 = 0.0;
    let mut imag_warning = false;

    for k in 1..=n {
        apply_factors(sys, scheme, h, &mut u).map_err(|e| Error::AtStep {
            step: k,
            source: Box::new(e),
        })?;
        if opts.project_real_each_step {
            for v in u.iter_mut() {
                v.im = 0.0;
            }
        }
        if k % opts.record_every == 0 {
            let imag = u.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
            max_imag = max_imag.max(imag);
            let norm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if !imag_warning && imag > opts.imag_warn_threshold * norm.max(f64::MIN_POSITIVE) {
                imag_warning = true;
                log::warn!(
                    "{}: imaginary part {imag:e} at t={} exceeds {:e} of the state norm",
                    scheme.label(),
                    k as f64 * h,
                    opts.imag_warn_threshold
                );
            }
            times.push(k as f64 * h);
            states.push(u.iter().map(|v| v.re).collect());
        }
    }

    Ok(Trajectory {
        times,
        states,
        max_imag,
        imag_warning,
        label: scheme.label().into(),
        n,
        horizon,
    })
}
