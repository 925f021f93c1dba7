//! Numerical order checks.
//!
//! The algebraic order of a two-operator scheme is measured by replacing the
//! two generators with random dense matrices and comparing the factor product
//! with the exact exponential of their sum. The global order on an ODE is the
//! slope of RMSE against the step count.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Mul;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorOptions};
use crate::metrics::rmse;
use crate::rk45::{rk45_solve, uniform_grid, RkOptions};
use crate::scheme::Scheme;
use crate::systems::OdeSystem;

/// Errors at or below this are treated as roundoff.
pub const PRECISION_FLOOR: f64 = 1e-14;

/// RMSE window used by [`empirical_global_order`].
pub const DEFAULT_RMSE_WINDOW: (f64, f64) = (1e-9, 1e-1);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n, "expected {n}x{n} entries");
        Self {
            n,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(m: &Matrix) -> Matrix {
    let n = m.size();
    let norm = m.norm1();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale(Complex64::new(2f64.powi(-squarings), 0.0));
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=60 {
        term = (&term * &a).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.frobenius() <= 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Two random generators standing in for the coordinate operators.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    pub m1: Matrix,
    pub m2: Matrix,
    pub seed: u64,
}

impl MatrixPair {
    /// Entries uniform in `[-1, 1]` from SplitMix64 seeded with `seed`:
    /// each draw is `2 * (next_u64() >> 11) * 2^-53 - 1`, filling `m1` then
    /// `m2` in row-major order.
    pub fn random(d: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::from_seed(seed.to_le_bytes());
        let mut draw = |count: usize| -> Vec<f64> {
            (0..count)
                .map(|_| 2.0 * ((rng.next_u64() >> 11) as f64 * 2f64.powi(-53)) - 1.0)
                .collect()
        };
        let e1 = draw(d * d);
        let e2 = draw(d * d);
        Self {
            m1: Matrix::from_real(d, &e1),
            m2: Matrix::from_real(d, &e2),
            seed,
        }
    }

    pub fn new(m1: Matrix, m2: Matrix) -> Self {
        assert_eq!(m1.size(), m2.size(), "matrix sizes differ");
        Self { m1, m2, seed: 0 }
    }

    fn generator(&self, coord: usize) -> &Matrix {
        if coord == 1 {
            &self.m1
        } else {
            &self.m2
        }
    }
}

/// Frobenius distance between the factor product of `s` (first factor
/// applied first) and `exp(t (M1 + M2))`.
pub fn scheme_matrix_error(pair: &MatrixPair, s: &Scheme, t: f64) -> Result<f64> {
    if s.dim() != 2 {
        return Err(Error::InvalidScheme(
            "matrix order checks need a two-operator scheme".into(),
        ));
    }
    let n = pair.m1.size();
    let mut product = Matrix::identity(n);
    for f in s.factors() {
        let e = expm(&pair.generator(f.coord).scale(f.coeff * t));
        product = &e * &product;
    }
    let exact = expm(&pair.m1.add(&pair.m2).scale(Complex64::new(t, 0.0)));
    Ok(product.sub(&exact).frobenius())
}

/// Least-squares slope of `ys` against `xs`.
pub fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `log(error)` against `log(t)`; about `p + 1` for a scheme of
/// algebraic order `p`. Points at or below [`PRECISION_FLOOR`] are left out
/// of the fit.
pub fn local_order_slope(pair: &MatrixPair, s: &Scheme, t_values: &[f64]) -> Result<f64> {
    if t_values.len() < 4 {
        return Err(Error::InvalidArgument(
            "need at least four t values for a slope fit".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &t in t_values {
        let e = scheme_matrix_error(pair, s, t)?;
        if e > PRECISION_FLOOR {
            xs.push(t.ln());
            ys.push(e.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::PrecisionFloor {
            floor: PRECISION_FLOOR,
        });
    }
    Ok(lsq_slope(&xs, &ys))
}

/// `count` geometrically spaced values `2^lo ..= 2^hi`.
pub fn log2_range(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 2f64.powf(lo + (hi - lo) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Fit range `t in 2^lo_exp ..= 2^hi_exp` and slope tolerance for
/// certifying a declared order with random `d = 3` matrix pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificationWindow {
    pub lo_exp: f64,
    pub hi_exp: f64,
    pub points: usize,
    pub tolerance: f64,
}

impl CertificationWindow {
    pub fn t_values(&self) -> Vec<f64> {
        log2_range(self.lo_exp, self.hi_exp, self.points)
    }
}

/// The window for a declared order. Each range keeps the errors between the
/// roundoff floor and the start of the pre-asymptotic regime for entries in
/// `[-1, 1]`. Orders of 10 and above have errors too close to roundoff in
/// double precision for the fit to be reliable.
pub fn certification_window(order: u32) -> CertificationWindow {
    let (lo_exp, hi_exp, tolerance) = match order {
        0..=3 => (-10.0, -3.0, 0.3),
        4 => (-8.0, -3.0, 0.3),
        5..=6 => (-3.5, -0.5, 0.3),
        7..=8 => (-1.5, 0.5, 0.5),
        _ => (1.5, 3.0, 0.5),
    };
    CertificationWindow {
        lo_exp,
        hi_exp,
        points: 9,
        tolerance,
    }
}

/// One seed's outcome in [`certify_order`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeedCertification {
    pub seed: u64,
    /// Measured slope, or the fit error (for example the precision floor).
    pub slope: Result<f64>,
    pub expected: f64,
    pub tolerance: f64,
}

impl SeedCertification {
    pub fn passed(&self) -> bool {
        matches!(self.slope, Ok(m) if (m - self.expected).abs() <= self.tolerance)
    }
}

/// Measures the local slope of `s` for each seed using its
/// [`certification_window`].
pub fn certify_order(s: &Scheme, seeds: &[u64]) -> Result<Vec<SeedCertification>> {
    if s.dim() != 2 {
        return Err(Error::InvalidScheme(
            "matrix order checks need a two-operator scheme".into(),
        ));
    }
    let window = certification_window(s.declared_order());
    let ts = window.t_values();
    Ok(seeds
        .iter()
        .map(|&seed| SeedCertification {
            seed,
            slope: local_order_slope(&MatrixPair::random(3, seed), s, &ts),
            expected: f64::from(s.declared_order() + 1),
            tolerance: window.tolerance,
        })
        .collect())
}

/// RMSE of a splitting run against the RK45 reference, per step count.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalOrderFit {
    pub points: Vec<(usize, f64)>,
    /// Points that fell inside the RMSE window and entered the fit.
    pub used: Vec<(usize, f64)>,
    pub order: f64,
}

/// Empirical global order: negated slope of `log RMSE` against `log n`,
/// using only step counts whose RMSE falls in [`DEFAULT_RMSE_WINDOW`].
pub fn empirical_global_order(
    sys: &dyn OdeSystem,
    scheme: &Scheme,
    horizon: f64,
    u0: &[f64],
    n_values: &[usize],
) -> Result<f64> {
    empirical_global_order_fit(sys, scheme, horizon, u0, n_values, DEFAULT_RMSE_WINDOW)
        .map(|f| f.order)
}

/// [`empirical_global_order`] with an explicit RMSE window, returning all
/// measured points.
pub fn empirical_global_order_fit(
    sys: &dyn OdeSystem,
    scheme: &Scheme,
    horizon: f64,
    u0: &[f64],
    n_values: &[usize],
    window: (f64, f64),
) -> Result<GlobalOrderFit> {
    let mut points = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let grid = uniform_grid(horizon, n);
        let reference = rk45_solve(sys, horizon, &grid, u0, &RkOptions::default())?;
        let split = integrate(sys, scheme, horizon, n, u0, &IntegratorOptions::default())?;
        points.push((n, rmse(&split, &reference)?));
    }
    let used: Vec<(usize, f64)> = points
        .iter()
        .copied()
        .filter(|&(_, e)| e >= window.0 && e <= window.1)
        .collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData {
            usable: used.len(),
            needed: 3,
        });
    }
    let xs: Vec<f64> = used.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|&(_, e)| e.ln()).collect();
    Ok(GlobalOrderFit {
        order: -lsq_slope(&xs, &ys),
        points,
        used,
    })
}
