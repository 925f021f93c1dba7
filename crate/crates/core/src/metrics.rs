use alloc::format;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;

/// Root-mean-square of the Euclidean state differences over a shared grid.
pub fn rmse(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} grid points",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::GridMismatch("empty trajectories".into()));
    }
    for (j, (&ta, &tb)) in a.times.iter().zip(&b.times).enumerate() {
        if (ta - tb).abs() > 1e-12 * ta.abs().max(tb.abs()) {
            return Err(Error::GridMismatch(format!(
                "time {ta} vs {tb} at index {j}"
            )));
        }
    }
    let mut sum = 0.0;
    for (ua, ub) in a.states.iter().zip(&b.states) {
        if ua.len() != ub.len() {
            return Err(Error::DimensionMismatch {
                expected: ua.len(),
                got: ub.len(),
            });
        }
        sum += ua
            .iter()
            .zip(ub)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>();
    }
    Ok((sum / a.len() as f64).sqrt())
}
