//! Scalar fixed-point iteration with oscillation damping.

use crate::error::{CoreError, Result};
use crate::{lit, Scalar};

/// Iterates `x <- f(x)` until the residual `|f(x) - x|` drops below `tol`.
///
/// If two successive steps point in opposite directions the update is
/// under-relaxed by 0.5, which kills the period-2 oscillation a contraction
/// with negative slope produces. Non-finite iterates abort immediately:
/// continuing can only produce NaN soup, so they are reported as convergence
/// failures carrying the offending values.
pub fn damped_fixed_point<T, F>(mut f: F, x0: T, tol: T, max_iter: usize) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let half = lit::<T>(0.5);
    let mut x = x0;
    let mut prev_x = x0;
    let mut prev_step = T::zero();
    for _ in 0..max_iter {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(CoreError::convergence(format!(
                "iterate became non-finite: last two iterates {x}, {fx}"
            )));
        }
        let step = fx - x;
        if step.abs() < tol {
            return Ok(fx);
        }
        let damp = prev_step * step < T::zero();
        prev_x = x;
        x = if damp { x + half * step } else { fx };
        prev_step = step;
    }
    Err(CoreError::convergence(format!(
        "no fixed point after {max_iter} iterations: last two iterates {prev_x}, {x}"
    )))
}
