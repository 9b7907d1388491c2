//! Classical fixed-step fourth-order Runge-Kutta on small real state vectors.
//!
//! Fixed steps are deliberate: the scaled mean-field system is non-stiff, and
//! a fixed grid makes the convergence-order test exact and the output
//! bit-reproducible.

use crate::{lit, Scalar};

/// One RK4 step of `dy/dt = f(t, y)` from `(t, y)` with step `h`.
pub fn rk4_step<T, const N: usize, F>(f: &mut F, t: T, y: &[T; N], h: T) -> [T; N]
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let sixth = T::one() / lit::<T>(6.0);

    let k1 = f(t, y);
    let k2 = f(t + half * h, &offset(y, &k1, half * h));
    let k3 = f(t + half * h, &offset(y, &k2, half * h));
    let k4 = f(t + h, &offset(y, &k3, h));

    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + h * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
    out
}

fn offset<T: Scalar, const N: usize>(y: &[T; N], k: &[T; N], s: T) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + s * k[i];
    }
    out
}

/// Integrates `n_steps` fixed steps from `(t0, y0)`, returning the endpoint.
pub fn integrate_endpoint<T, const N: usize, F>(
    f: &mut F,
    t0: T,
    y0: [T; N],
    h: T,
    n_steps: usize,
) -> [T; N]
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let mut y = y0;
    for k in 0..n_steps {
        // t = t0 + k*h recomputed per step: no accumulated addition error
        let t = t0 + lit::<T>(k as f64) * h;
        y = rk4_step(f, t, &y, h);
    }
    y
}
