//! Dormand-Prince 5(4) reference integrator.
//!
//! Steps are accepted on the 5th-order solution with the classical
//! `safety * err^(-1/5)` controller. Output grid times are hit exactly by
//! shortening the step that would cross them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::systems::OdeSystem;

pub const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

pub const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// 5th-order weights (equal to the last row of `A`, so the pair is FSAL).
pub const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Embedded 4th-order weights.
pub const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkOptions {
    pub rtol: f64,
    pub atol: f64,
    /// `None` selects the starting step automatically.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    pub safety: f64,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            initial_step: None,
            max_steps: 10_000_000,
            safety: 0.9,
        }
    }
}

impl RkOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument(
                "max_steps must be at least 1".into(),
            ));
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(
                    "initial step must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Scratch space for one Dormand-Prince step.
struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl Stages {
    fn new(dim: usize) -> Self {
        Self {
            k: core::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    /// Computes stages 2..=7 given `k[0] = F(y)`; writes the 5th-order
    /// solution to `y5` and returns the scaled error norm.
    fn advance(
        &mut self,
        sys: &dyn OdeSystem,
        y: &[f64],
        h: f64,
        y5: &mut [f64],
        opts: &RkOptions,
    ) -> f64 {
        let dim = y.len();
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            if s == 6 {
                y5.copy_from_slice(&self.tmp);
            }
            sys.vector_field(&self.tmp, &mut self.k[s]);
        }
        let mut sum = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for s in 0..7 {
                e += (B5[s] - B4[s]) * self.k[s][i];
            }
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let r = h * e / scale;
            sum += r * r;
        }
        (sum / dim as f64).sqrt()
    }
}

/// One fixed Dormand-Prince step of size `h`, returning the 5th-order
/// solution.
pub fn dopri5_step(sys: &dyn OdeSystem, y: &[f64], h: f64) -> Vec<f64> {
    let mut st = Stages::new(y.len());
    sys.vector_field(y, &mut st.k[0]);
    let mut out = vec![0.0; y.len()];
    st.advance(sys, y, h, &mut out, &RkOptions::default());
    out
}

fn initial_step(sys: &dyn OdeSystem, y: &[f64], f0: &[f64], horizon: f64, opts: &RkOptions) -> f64 {
    // Hairer-Norsett-Wanner starting step heuristic.
    let dim = y.len();
    let scale: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let rms = |v: &[f64]| {
        (v.iter()
            .zip(&scale)
            .map(|(a, s)| (a / s) * (a / s))
            .sum::<f64>()
            / dim as f64)
            .sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, f)| a + h0 * f).collect();
    let mut f1 = vec![0.0; dim];
    sys.vector_field(&y1, &mut f1);
    let df: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&df) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(horizon)
}

/// Integrates `u' = F(u)` from `u0` at time 0 and returns the states at
/// `grid`, which must be nondecreasing times in `(0, horizon]`.
pub fn rk45_solve(
    sys: &dyn OdeSystem,
    horizon: f64,
    grid: &[f64],
    u0: &[f64],
    opts: &RkOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let dim = sys.dim();
    if u0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: u0.len(),
        });
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "final time must be positive, got {horizon}"
        )));
    }
    let mut prev = 0.0;
    for &g in grid {
        if !(g > 0.0 && g <= horizon && g >= prev) {
            return Err(Error::InvalidArgument(format!(
                "grid time {g} is not nondecreasing in (0, {horizon}]"
            )));
        }
        prev = g;
    }

    let mut st = Stages::new(dim);
    let mut y = u0.to_vec();
    let mut y5 = vec![0.0; dim];
    sys.vector_field(&y, &mut st.k[0]);
    let mut t = 0.0;
    let mut h = match opts.initial_step {
        Some(h) => h,
        None => initial_step(sys, &y, &st.k[0], horizon, opts),
    };
    let mut steps = 0usize;
    let mut states = Vec::with_capacity(grid.len());

    for &target in grid {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::NonConvergence {
                    max_steps: opts.max_steps,
                    t,
                });
            }
            steps += 1;
            let remaining = target - t;
            let landing = h >= remaining;
            let h_try = if landing { remaining } else { h };
            let err = st.advance(sys, &y, h_try, &mut y5, opts);
            if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
                if h_try < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::ReferenceOverflow { t });
                }
                h = 0.2 * h_try;
                continue;
            }
            if err <= 1.0 {
                t = if landing { target } else { t + h_try };
                y.copy_from_slice(&y5);
                st.k.swap(0, 6);
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (opts.safety * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                let proposed = h_try * fac;
                // a shortened landing step should not shrink the next one
                h = if landing { proposed.max(h) } else { proposed };
            } else {
                let fac = (opts.safety * err.powf(-0.2)).clamp(0.2, 1.0);
                h = h_try * fac;
            }
        }
        states.push(y.clone());
    }

    Ok(Trajectory {
        times: grid.to_vec(),
        states,
        max_imag: 0.0,
        imag_warning: false,
        label: "rk45".into(),
        n: grid.len(),
        horizon,
    })
}

/// The positive uniform grid `t_j = j * horizon / n`, `j = 1..=n`, computed
/// exactly as the splitting integrator computes its times.
pub fn uniform_grid(horizon: f64, n: usize) -> Vec<f64> {
    let h = horizon / n as f64;
    (1..=n).map(|j| j as f64 * h).collect()
}
