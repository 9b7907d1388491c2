//! First-order probe response in the resolved-sideband linearization.
//!
//! Everything downstream of the steady state is algebra: the probe
//! coefficients c+ and c- share one denominator d(delta), and the
//! transmitted quadratures come from eps_T = 2*kappa*c+. The coefficients
//! are reported per unit probe amplitude, so nothing here depends on the
//! probe power.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::params::{DerivedRates, PhysicalConfig, SteadyState};
use crate::{lit, Scalar};

/// The projection of (config, rates, steady state) the response formulas read.
///
/// Fields are public so dimensionless studies can assemble one directly; the
/// formulas are scale-covariant, so feeding rates in units of omega_m with
/// `omega_m = 1` yields c+ and c- in those same units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseParams<T> {
    pub kappa: T,
    pub omega_m: T,
    pub gamma_m: T,
    /// Effective detuning Delta, rad/s.
    pub detuning: T,
    pub alpha: T,
    pub beta: T,
    pub c0: Complex<T>,
    pub eps_c: T,
}

impl<T: Scalar> ResponseParams<T> {
    pub fn new(cfg: &PhysicalConfig<T>, rates: &DerivedRates<T>, steady: &SteadyState<T>) -> Self {
        ResponseParams {
            kappa: rates.kappa,
            omega_m: cfg.omega_m,
            gamma_m: cfg.gamma_m,
            detuning: steady.detuning,
            alpha: steady.alpha,
            beta: steady.beta,
            c0: steady.c0,
            eps_c: rates.eps_c,
        }
    }

    /// Same point with the frequency-shift measure overridden. `with_beta(0)`
    /// switches off the membrane-mediated interference pathway while keeping
    /// the static spring shift, which is how the coupling-free envelope under
    /// a dip is defined.
    pub fn with_beta(self, beta: T) -> Self {
        ResponseParams { beta, ..self }
    }
}

/// One probe detuning's worth of first-order output, per unit probe amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResponse<T> {
    /// Probe-pump detuning delta, rad/s.
    pub delta: T,
    /// Upper-sideband coefficient c+, seconds.
    pub c_plus: Complex<T>,
    /// Lower-sideband coefficient c-, seconds.
    pub c_minus: Complex<T>,
    /// Transmitted probe-frequency field `2*kappa*c_plus`, dimensionless.
    pub eps_t: Complex<T>,
    /// Static output `2*kappa*c0 - eps_c`, sqrt(photons)/s.
    pub eps_out0: Complex<T>,
    /// Probe-frequency output `eps_t - 1`.
    pub eps_out_plus: Complex<T>,
    /// Four-wave-mixing sideband output `2*kappa*c_minus`.
    pub eps_out_minus: Complex<T>,
    /// In-phase quadrature `Re eps_t`.
    pub v_p: T,
    /// Out-of-phase quadrature `Im eps_t`.
    pub v_p_tilde: T,
}

/// Per-delta building blocks shared by the denominator and both coefficients.
struct Factors<T> {
    /// kappa + i(Delta - delta)
    a: Complex<T>,
    /// kappa - i(Delta + delta)
    b: Complex<T>,
    /// gamma_m - i*delta
    c: Complex<T>,
    /// delta^2 - 4*omega_m^2 + 2i*gamma_m*delta - 8*alpha*omega_m^2
    m: Complex<T>,
    /// 2*gamma_m - i*delta
    w2: Complex<T>,
    /// 4*alpha*beta*omega_m^3
    mix: T,
}

fn factors<T: Scalar>(delta: T, p: &ResponseParams<T>) -> Factors<T> {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let om2 = p.omega_m * p.omega_m;
    Factors {
        a: Complex::new(p.kappa, p.detuning - delta),
        b: Complex::new(p.kappa, -(p.detuning + delta)),
        c: Complex::new(p.gamma_m, -delta),
        m: Complex::new(
            delta * delta - four * om2 - lit::<T>(8.0) * p.alpha * om2,
            two * p.gamma_m * delta,
        ),
        w2: Complex::new(two * p.gamma_m, -delta),
        mix: four * p.alpha * p.beta * om2 * p.omega_m,
    }
}

fn denominator_of<T: Scalar>(f: &Factors<T>, p: &ResponseParams<T>) -> Complex<T> {
    let coupling = (f.w2 * f.mix).scale(lit::<T>(2.0) * p.detuning);
    f.a * f.b * f.c * f.m + coupling
}

/// Shared denominator of both sideband coefficients:
/// `[k+i(D-d)][k-i(D+d)](g-id)(d^2-4w^2+2igd-8aw^2) + 8Dabw^3(2g-id)`.
pub fn denominator_d<T: Scalar>(delta: T, p: &ResponseParams<T>) -> Complex<T> {
    denominator_of(&factors(delta, p), p)
}

fn coefficients<T: Scalar>(delta: T, p: &ResponseParams<T>) -> Result<(Complex<T>, Complex<T>)> {
    let f = factors(delta, p);
    let d = denominator_of(&f, p);
    if !(d.re.is_finite() && d.im.is_finite()) || d.norm_sqr() == T::zero() {
        return Err(CoreError::numerical(format!(
            "response denominator degenerate at delta = {delta}: d = {d}"
        )));
    }
    // c+ numerator shares the mechanical factor with d
    let i = Complex::new(T::zero(), T::one());
    let plus = (f.b * f.c * f.m - i * f.w2.scale(f.mix)) / d;
    let photons = p.c0.norm_sqr();
    if photons == T::zero() {
        return Err(CoreError::domain(
            "lower sideband phase undefined without a pump: |c0| = 0",
        ));
    }
    let phase = p.c0 * p.c0 / photons;
    let minus = -(i * phase * f.w2.conj()).scale(f.mix) / d.conj();
    Ok((plus, minus))
}

/// Upper-sideband coefficient c+ per unit probe amplitude.
pub fn probe_plus_coefficient<T: Scalar>(delta: T, p: &ResponseParams<T>) -> Result<Complex<T>> {
    coefficients(delta, p).map(|(plus, _)| plus)
}

/// Lower-sideband coefficient c- per unit conjugate probe amplitude.
pub fn probe_minus_coefficient<T: Scalar>(delta: T, p: &ResponseParams<T>) -> Result<Complex<T>> {
    coefficients(delta, p).map(|(_, minus)| minus)
}

/// Full input-output assembly at one probe detuning.
pub fn total_output_field<T: Scalar>(delta: T, p: &ResponseParams<T>) -> Result<ProbeResponse<T>> {
    let (c_plus, c_minus) = coefficients(delta, p)?;
    let two_kappa = lit::<T>(2.0) * p.kappa;
    let one = Complex::new(T::one(), T::zero());
    let eps_out_plus = c_plus.scale(two_kappa) - one;
    // built from eps_out_plus so eps_t = eps_out_plus + 1 holds bit for bit
    let eps_t = eps_out_plus + one;
    Ok(ProbeResponse {
        delta,
        c_plus,
        c_minus,
        eps_t,
        eps_out0: p.c0.scale(two_kappa) - Complex::new(p.eps_c, T::zero()),
        eps_out_plus,
        eps_out_minus: c_minus.scale(two_kappa),
        v_p: eps_t.re,
        v_p_tilde: eps_t.im,
    })
}

/// Empty-cavity transmission `2*kappa/(kappa + i(Delta - delta))`, the g = 0
/// limit of eps_T.
pub fn baseline_response<T: Scalar>(delta: T, detuning: T, kappa: T) -> Complex<T> {
    Complex::new(kappa, detuning - delta)
        .finv()
        .scale(lit::<T>(2.0) * kappa)
}
