//! ODE systems described by their vector field and per-coordinate frozen
//! flows.
//!
//! The frozen flow of coordinate `i` solves the scalar problem obtained by
//! holding every other coordinate fixed. The three closed-form systems accept
//! complex states and complex times; [`NumericFallback`] integrates the scalar
//! problem with fixed-step RK4 and is restricted to real arguments.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{expm1, phi};

/// An autonomous ODE `u' = F(u)` together with its frozen coordinate flows.
///
/// Coordinates are 1-based in [`OdeSystem::frozen_eval`] to match
/// [`crate::scheme::Factor`].
pub trait OdeSystem: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> &str;

    /// Named parameters, in a fixed order.
    fn params(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    /// Writes `F(u)` into `out`.
    fn vector_field(&self, u: &[f64], out: &mut [f64]);

    /// Value of the frozen flow of coordinate `coord` after time `s`,
    /// starting from `u` with all other coordinates held at their values in
    /// `u`.
    fn frozen_eval(&self, coord: usize, u: &[Complex64], s: Complex64) -> Result<Complex64>;

    /// True if every frozen map accepts complex time and complex states.
    fn analytic_time(&self) -> bool;

    /// Initial state used by the reference experiment, if any.
    fn default_initial_state(&self) -> Option<Vec<f64>> {
        None
    }

    /// Final time used by the reference experiment, if any.
    fn default_horizon(&self) -> Option<f64> {
        None
    }
}

fn check_coord(coord: usize, dim: usize, u: &[Complex64]) -> Result<()> {
    if u.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: u.len(),
        });
    }
    if coord == 0 || coord > dim {
        return Err(Error::InvalidArgument(format!(
            "coordinate {coord} outside 1..={dim}"
        )));
    }
    Ok(())
}

fn finite_param(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.to_string(),
            reason: "must be finite".into(),
        })
    }
}

/// Predator-prey model `x' = x(alpha - beta y)`, `y' = y(delta x - tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LotkaVolterra {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub tau: f64,
}

impl LotkaVolterra {
    pub fn new(alpha: f64, beta: f64, delta: f64, tau: f64) -> Result<Self> {
        finite_param("alpha", alpha)?;
        finite_param("beta", beta)?;
        finite_param("delta", delta)?;
        finite_param("tau", tau)?;
        Ok(Self {
            alpha,
            beta,
            delta,
            tau,
        })
    }
}

impl Default for LotkaVolterra {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.02,
            delta: 0.01,
            tau: 0.1,
        }
    }
}

impl OdeSystem for LotkaVolterra {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "lotka-volterra"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
            ("tau", self.tau),
        ]
    }

    fn vector_field(&self, u: &[f64], out: &mut [f64]) {
        let (x, y) = (u[0], u[1]);
        out[0] = x * (self.alpha - self.beta * y);
        out[1] = y * (self.delta * x - self.tau);
    }

    fn frozen_eval(&self, coord: usize, u: &[Complex64], s: Complex64) -> Result<Complex64> {
        check_coord(coord, 2, u)?;
        let (x, y) = (u[0], u[1]);
        Ok(match coord {
            1 => x * (s * (-y * self.beta + self.alpha)).exp(),
            _ => y * (s * (x * self.delta - self.tau)).exp(),
        })
    }

    fn analytic_time(&self) -> bool {
        true
    }

    fn default_initial_state(&self) -> Option<Vec<f64>> {
        Some(vec![100.0, 10.0])
    }

    fn default_horizon(&self) -> Option<f64> {
        Some(100.0)
    }
}

/// Van der Pol oscillator `x' = y`, `y' = (1 - x^2) y - x`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VanDerPol;

impl VanDerPol {
    pub fn new() -> Self {
        Self
    }
}

impl OdeSystem for VanDerPol {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "van-der-pol"
    }

    fn vector_field(&self, u: &[f64], out: &mut [f64]) {
        let (x, y) = (u[0], u[1]);
        out[0] = y;
        out[1] = (1.0 - x * x) * y - x;
    }

    fn frozen_eval(&self, coord: usize, u: &[Complex64], s: Complex64) -> Result<Complex64> {
        check_coord(coord, 2, u)?;
        let (x, y) = (u[0], u[1]);
        Ok(match coord {
            1 => x + s * y,
            _ => {
                // y e^{sa} + b s phi(sa), a = 1 - x^2, b = -x
                let a = -x * x + 1.0;
                let w = s * a;
                y * w.exp() - x * s * phi(w)
            }
        })
    }

    fn analytic_time(&self) -> bool {
        true
    }

    fn default_initial_state(&self) -> Option<Vec<f64>> {
        Some(vec![-0.2, 0.0])
    }

    fn default_horizon(&self) -> Option<f64> {
        Some(25.0)
    }
}

/// Lorenz system `x' = alpha (y - x)`, `y' = x (rho - z) - y`,
/// `z' = x y - beta z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorenz {
    pub alpha: f64,
    pub rho: f64,
    pub beta: f64,
}

impl Lorenz {
    pub fn new(alpha: f64, rho: f64, beta: f64) -> Result<Self> {
        finite_param("alpha", alpha)?;
        finite_param("rho", rho)?;
        finite_param("beta", beta)?;
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if v == 0.0 {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    reason: "decay rate must be nonzero".into(),
                });
            }
        }
        Ok(Self { alpha, rho, beta })
    }
}

impl Default for Lorenz {
    fn default() -> Self {
        Self {
            alpha: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
        }
    }
}

impl OdeSystem for Lorenz {
    fn dim(&self) -> usize {
        3
    }

    fn name(&self) -> &str {
        "lorenz"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("rho", self.rho),
            ("beta", self.beta),
        ]
    }

    fn vector_field(&self, u: &[f64], out: &mut [f64]) {
        let (x, y, z) = (u[0], u[1], u[2]);
        out[0] = self.alpha * (y - x);
        out[1] = x * (self.rho - z) - y;
        out[2] = x * y - self.beta * z;
    }

    fn frozen_eval(&self, coord: usize, u: &[Complex64], s: Complex64) -> Result<Complex64> {
        check_coord(coord, 3, u)?;
        let (x, y, z) = (u[0], u[1], u[2]);
        // Each frozen equation is w' = k (target - w): w(s) = w + (target - w)(1 - e^{-ks}).
        let relax = |w: Complex64, target: Complex64, k: f64| w - (target - w) * expm1(-s * k);
        Ok(match coord {
            1 => relax(x, y, self.alpha),
            2 => relax(y, x * (-z + self.rho), 1.0),
            _ => relax(z, x * y / self.beta, self.beta),
        })
    }

    fn analytic_time(&self) -> bool {
        true
    }

    fn default_initial_state(&self) -> Option<Vec<f64>> {
        Some(vec![1.0, 1.0, 1.0])
    }

    fn default_horizon(&self) -> Option<f64> {
        Some(20.0)
    }
}

/// A system whose frozen flows are computed by fixed-step RK4 on the scalar
/// frozen equation. Real arguments only.
pub struct NumericFallback<F> {
    dim: usize,
    substeps: usize,
    field: F,
    name: String,
}

impl<F> NumericFallback<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(field: F, dim: usize, substeps: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if substeps == 0 {
            return Err(Error::InvalidArgument("substeps must be at least 1".into()));
        }
        Ok(Self {
            dim,
            substeps,
            field,
            name: "numeric-fallback".into(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }
}

impl<F> OdeSystem for NumericFallback<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn vector_field(&self, u: &[f64], out: &mut [f64]) {
        (self.field)(u, out)
    }

    fn frozen_eval(&self, coord: usize, u: &[Complex64], s: Complex64) -> Result<Complex64> {
        check_coord(coord, self.dim, u)?;
        if s.im != 0.0 || u.iter().any(|v| v.im != 0.0) {
            return Err(Error::ComplexTimeUnsupported(self.name.clone()));
        }
        let i = coord - 1;
        let mut state: Vec<f64> = u.iter().map(|v| v.re).collect();
        let mut out = vec![0.0; self.dim];
        let mut rate = |w: f64, state: &mut [f64]| {
            state[i] = w;
            (self.field)(state, &mut out);
            out[i]
        };
        let h = s.re / self.substeps as f64;
        let mut w = state[i];
        for _ in 0..self.substeps {
            let k1 = rate(w, &mut state);
            let k2 = rate(w + 0.5 * h * k1, &mut state);
            let k3 = rate(w + 0.5 * h * k2, &mut state);
            let k4 = rate(w + h * k3, &mut state);
            w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        Ok(Complex64::new(w, 0.0))
    }

    fn analytic_time(&self) -> bool {
        false
    }
}

/// Names accepted by [`by_name`].
pub const SYSTEM_NAMES: &[&str] = &["lotka-volterra", "van-der-pol", "lorenz"];

/// Builds one of the closed-form systems by name, overriding default
/// parameters with `key=value` pairs.
pub fn by_name(name: &str, overrides: &[(&str, f64)]) -> Result<Box<dyn OdeSystem>> {
    let unknown = |key: &str| Error::InvalidParameter {
        name: key.to_string(),
        reason: format!("not a parameter of `{name}`"),
    };
    match name {
        "lotka-volterra" => {
            let mut p = LotkaVolterra::default();
            for &(k, v) in overrides {
                match k {
                    "alpha" => p.alpha = v,
                    "beta" => p.beta = v,
                    "delta" => p.delta = v,
                    "tau" => p.tau = v,
                    _ => return Err(unknown(k)),
                }
            }
            Ok(Box::new(LotkaVolterra::new(
                p.alpha, p.beta, p.delta, p.tau,
            )?))
        }
        "van-der-pol" => match overrides.first() {
            Some(&(k, _)) => Err(unknown(k)),
            None => Ok(Box::new(VanDerPol)),
        },
        "lorenz" => {
            let mut p = Lorenz::default();
            for &(k, v) in overrides {
                match k {
                    "alpha" => p.alpha = v,
                    "rho" => p.rho = v,
                    "beta" => p.beta = v,
                    _ => return Err(unknown(k)),
                }
            }
            Ok(Box::new(Lorenz::new(p.alpha, p.rho, p.beta)?))
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}
