//! Optical response of a driven cavity containing a membrane whose coupling to
//! the field is quadratic in displacement (membrane at a node or antinode).
//!
//! A strong pump fixes the working point; a weak probe detuned by `delta` reads
//! out the first-order response. Quadratic coupling exchanges phonon pairs with
//! the field, which carves a narrow two-phonon transparency dip into the broad
//! absorption profile near `delta = 2*omega_m*sqrt(1+2*alpha)`.
//!
//! The crate has two independent routes to the same answer:
//!
//! * [`response`]: closed-form first-order coefficients `c_plus`, `c_minus`
//!   obtained by linearizing the mean-field equations around the steady state.
//! * [`oracle`]: direct fixed-step integration of the nonlinear five-variable
//!   mean-field ODE system, with harmonic extraction of the same coefficients.
//!
//! [`params`] derives rates and the self-consistent steady state from a lab
//! description in SI units; [`sweep`] evaluates detuning grids and measures the
//! dip (position, depth, width against the interference-free envelope).

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

pub mod error;
pub mod oracle;
pub mod params;
pub mod response;
pub mod rk4;
pub mod solve;
pub mod sweep;

pub use error::CoreError;

/// Floating-point scalar the physics is generic over.
///
/// `f64` is the working precision for SI-scale runs: the response denominator
/// mixes magnitudes across ~30 decades there. `f32` is adequate for
/// dimensionless (desk-scale) work and is covered by smoke tests.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Complex amplitude at working precision.
pub type C64 = Complex<f64>;
/// Single-precision complex amplitude, for dimensionless smoke use.
pub type C32 = Complex<f32>;

/// Reduced Planck constant, J s (CODATA 2018, exact SI definition).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact SI definition).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s (exact SI definition).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Shorthand for lifting an `f64` literal into the generic scalar type.
///
/// Panics only if `T` cannot represent finite `f64` values at all, which no
/// sensible `Scalar` impl does; precision loss (`f32`) is fine and intended.
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("scalar type must admit f64 constants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lit_round_trips_in_f64() {
        let x: f64 = lit(HBAR);
        assert_eq!(x, HBAR);
    }

    #[test]
    fn lit_narrows_to_f32() {
        let x: f32 = lit(1.5);
        assert_eq!(x, 1.5f32);
    }
}
