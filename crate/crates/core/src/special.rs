//! Complex elementary functions that stay accurate near zero.

use num_complex::Complex64;

/// Below this modulus [`phi`] switches to its Taylor series.
pub const PHI_SERIES_THRESHOLD: f64 = 1e-4;

/// `exp(w) - 1` without cancellation for small `|w|`.
pub fn expm1(w: Complex64) -> Complex64 {
    let (x, y) = (w.re, w.im);
    if y == 0.0 {
        return Complex64::new(x.exp_m1(), 0.0);
    }
    let half = (0.5 * y).sin();
    // exp(x) cos(y) - 1 = expm1(x) cos(y) - 2 sin^2(y/2)
    let re = x.exp_m1() * y.cos() - 2.0 * half * half;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// `(exp(w) - 1) / w`, continued by its limit 1 at `w = 0`.
pub fn phi(w: Complex64) -> Complex64 {
    if w.norm() >= PHI_SERIES_THRESHOLD {
        expm1(w) / w
    } else {
        // 1 + w/2 + w^2/6 + w^3/24 + w^4/120 + w^5/720
        let c = [
            1.0 / 720.0,
            1.0 / 120.0,
            1.0 / 24.0,
            1.0 / 6.0,
            1.0 / 2.0,
            1.0,
        ];
        c.iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * w + k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_branches_agree_at_threshold() {
        for angle in [0.0, 0.7, 1.9, 3.0, -2.2] {
            let w = Complex64::from_polar(PHI_SERIES_THRESHOLD, angle);
            let direct = expm1(w) / w;
            let c = [1.0 / 720.0, 1.0 / 120.0, 1.0 / 24.0, 1.0 / 6.0, 0.5, 1.0];
            let series = c
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * w + k);
            assert!((direct - series).norm() <= 1e-15, "angle {angle}");
        }
    }

    #[test]
    fn phi_limits() {
        assert_eq!(phi(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        let w = Complex64::new(1.0, 0.0);
        assert!((phi(w).re - (1f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn expm1_matches_exp_away_from_zero() {
        let w = Complex64::new(0.3, -1.2);
        assert!((expm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
    }
}
