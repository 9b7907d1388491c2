//! Experiment description, derived rates, and the zeroth-order working point.
//!
//! Everything here is SI. The chain is: [`PhysicalConfig`] (what the lab
//! knows) -> [`derive_rates`] (decay, coupling, drive amplitudes, occupation)
//! -> [`steady_state_given_detuning`] / [`steady_state_self_consistent`]
//! (pump-dressed working point `c0`, displacement variance `X0`, and the
//! dimensionless knobs `alpha`, `beta` the response formulas consume).

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::solve::damped_fixed_point;
use crate::{lit, Scalar, HBAR, K_B, SPEED_OF_LIGHT};

/// Cavity decay specification: geometry or the rate directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityDecay<T> {
    /// Finesse F; decay follows as `pi*c/(2*F*L)`.
    Finesse(T),
    /// Amplitude decay rate kappa, rad/s.
    Kappa(T),
}

/// Quadratic coupling specification: membrane reflectivity or the constant directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling<T> {
    /// Membrane intensity reflectivity `r_c` in `[0, 1)`.
    Reflectivity(T),
    /// Coupling constant g, rad/(s m^2). Zero switches the membrane off.
    Fixed(T),
}

/// Which detuning the config pins down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detuning<T> {
    /// Effective detuning Delta (includes the coupling-induced shift), rad/s.
    Effective(T),
    /// Bare cavity-pump detuning `omega_0 - omega_c`, rad/s; the effective
    /// value then follows from the self-consistency loop.
    Bare(T),
}

/// Lab-facing description of the experiment, SI units throughout.
///
/// The two either-or choices of the problem (decay via finesse or rate,
/// coupling via reflectivity or override) are structural here; a config layer
/// that reads optional keys is responsible for rejecting both-or-neither.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig<T> {
    /// Coupling-laser wavelength, m.
    pub wavelength: T,
    /// Cavity length L, m.
    pub cavity_length: T,
    /// Membrane mass, kg.
    pub mass: T,
    /// Mechanical angular frequency, rad/s.
    pub omega_m: T,
    /// Mechanical damping rate, 1/s.
    pub gamma_m: T,
    pub cavity_decay: CavityDecay<T>,
    pub coupling: Coupling<T>,
    /// Pump power, W.
    pub pump_power: T,
    /// Probe power, W. Only the ODE oracle consumes it.
    pub probe_power: T,
    /// Environment temperature, K.
    pub temperature: T,
    pub detuning: Detuning<T>,
}

impl<T: Scalar> PhysicalConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            (self.wavelength, "wavelength"),
            (self.cavity_length, "cavity_length"),
            (self.mass, "mass"),
            (self.omega_m, "omega_m"),
            (self.pump_power, "pump_power"),
            (self.temperature, "temperature"),
        ];
        for (v, name) in pos {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(CoreError::domain(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        if self.gamma_m < T::zero() || !self.gamma_m.is_finite() {
            return Err(CoreError::domain(format!(
                "gamma_m must be non-negative, got {}",
                self.gamma_m
            )));
        }
        if self.probe_power < T::zero() || !self.probe_power.is_finite() {
            return Err(CoreError::domain(format!(
                "probe_power must be non-negative, got {}",
                self.probe_power
            )));
        }
        match self.cavity_decay {
            CavityDecay::Finesse(f) if !(f > T::zero()) => {
                return Err(CoreError::domain(format!("finesse must be positive, got {f}")))
            }
            CavityDecay::Kappa(k) if !(k > T::zero()) => {
                return Err(CoreError::domain(format!("kappa must be positive, got {k}")))
            }
            _ => {}
        }
        match self.coupling {
            Coupling::Reflectivity(r) if !(r >= T::zero() && r < T::one()) => {
                return Err(CoreError::domain(format!(
                    "coupling formula singular at unit reflectivity: need 0 <= r_c < 1, got {r}"
                )))
            }
            Coupling::Fixed(g) if g < T::zero() || !g.is_finite() => {
                return Err(CoreError::domain(format!("g override must be non-negative, got {g}")))
            }
            _ => {}
        }
        match self.detuning {
            Detuning::Effective(d) | Detuning::Bare(d) if !d.is_finite() => {
                Err(CoreError::domain(format!("detuning must be finite, got {d}")))
            }
            _ => Ok(()),
        }
    }
}

/// Secondary quantities derived from a [`PhysicalConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates<T> {
    /// Optical angular frequency `2*pi*c/lambda`, rad/s.
    pub omega_c: T,
    /// Cavity amplitude decay, rad/s.
    pub kappa: T,
    /// Quadratic coupling constant, rad/(s m^2).
    pub g: T,
    /// Pump drive amplitude `sqrt(2*kappa*P_c/(hbar*omega_c))`, sqrt(photons)/s.
    pub eps_c: T,
    /// Probe drive amplitude, same convention. The probe's own optical
    /// frequency differs from omega_c by parts in 1e10, so omega_c is used.
    pub eps_p: T,
    /// Mean thermal phonon occupation of the mechanical mode.
    pub n_th: T,
    /// Mechanical quality factor `omega_m/gamma_m` (infinite when gamma_m = 0).
    pub quality: T,
}

/// Self-consistent zeroth-order solution: the pump-dressed working point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState<T> {
    /// Steady intracavity amplitude `c0 = eps_c/(kappa + i*Delta)`.
    pub c0: Complex<T>,
    /// `|c0|^2`.
    pub photon_number: T,
    /// Steady part of the displacement second moment, m^2.
    pub x0: T,
    /// Steady part of the momentum second moment, kg^2 m^2/s^2.
    pub y0: T,
    /// Steady symmetrized cross moment; identically zero.
    pub z0: T,
    /// Radiation-pressure to mechanical energy ratio `hbar*g*|c0|^2/(m*omega_m^2)`.
    pub alpha: T,
    /// Cavity frequency-shift measure `g*X0/omega_m`.
    pub beta: T,
    /// Effective detuning Delta this state is evaluated at, rad/s.
    pub detuning: T,
}

/// Bose-Einstein occupation `1/(exp(hbar*omega/(k_B T)) - 1)`.
///
/// Uses the expm1 route: at lab scales `hbar*omega/(k_B T)` is ~1e-7 and the
/// naive exponential would cancel catastrophically. `T = 0` short-circuits to
/// zero occupation.
pub fn thermal_occupation<T: Scalar>(omega_m: T, temperature: T) -> Result<T> {
    if !(omega_m > T::zero()) {
        return Err(CoreError::domain(format!("omega_m must be positive, got {omega_m}")));
    }
    if temperature < T::zero() || !temperature.is_finite() {
        return Err(CoreError::domain(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    let x = lit::<T>(HBAR) * omega_m / (lit::<T>(K_B) * temperature);
    Ok(x.exp_m1().recip())
}

/// Cavity amplitude decay from length and finesse: `pi*c/(2*F*L)`.
pub fn cavity_decay_from_finesse<T: Scalar>(cavity_length: T, finesse: T) -> Result<T> {
    if !(cavity_length > T::zero()) || !(finesse > T::zero()) {
        return Err(CoreError::domain(format!(
            "cavity decay needs positive length and finesse, got L={cavity_length}, F={finesse}"
        )));
    }
    Ok(T::PI() * lit::<T>(SPEED_OF_LIGHT) / (lit::<T>(2.0) * finesse * cavity_length))
}

/// Quadratic coupling constant from cavity geometry and membrane reflectivity:
/// `8*pi^2*c/(L*lambda^2*sqrt(2*(1-r_c)))`.
pub fn coupling_constant_from_geometry<T: Scalar>(
    cavity_length: T,
    wavelength: T,
    reflectivity: T,
) -> Result<T> {
    if !(cavity_length > T::zero()) || !(wavelength > T::zero()) {
        return Err(CoreError::domain(format!(
            "coupling constant needs positive geometry, got L={cavity_length}, lambda={wavelength}"
        )));
    }
    if !(reflectivity >= T::zero() && reflectivity < T::one()) {
        return Err(CoreError::domain(format!(
            "coupling formula singular at unit reflectivity: need 0 <= r_c < 1, got {reflectivity}"
        )));
    }
    let two = lit::<T>(2.0);
    let eight = lit::<T>(8.0);
    let pi2 = T::PI() * T::PI();
    let root = (two * (T::one() - reflectivity)).sqrt();
    Ok(eight * pi2 * lit::<T>(SPEED_OF_LIGHT) / (cavity_length * wavelength * wavelength * root))
}

/// Drive amplitude `sqrt(2*kappa*P/(hbar*omega))` in sqrt(photons)/s.
pub fn drive_amplitude<T: Scalar>(kappa: T, power: T, omega: T) -> Result<T> {
    if !(kappa > T::zero()) || !(omega > T::zero()) {
        return Err(CoreError::domain(format!(
            "drive amplitude needs positive kappa and omega, got {kappa}, {omega}"
        )));
    }
    if power < T::zero() {
        return Err(CoreError::domain(format!("power must be non-negative, got {power}")));
    }
    Ok((lit::<T>(2.0) * kappa * power / (lit::<T>(HBAR) * omega)).sqrt())
}

/// Derives every secondary rate from a validated config.
pub fn derive_rates<T: Scalar>(cfg: &PhysicalConfig<T>) -> Result<DerivedRates<T>> {
    cfg.validate()?;
    let omega_c = lit::<T>(2.0) * T::PI() * lit::<T>(SPEED_OF_LIGHT) / cfg.wavelength;
    let kappa = match cfg.cavity_decay {
        CavityDecay::Finesse(f) => cavity_decay_from_finesse(cfg.cavity_length, f)?,
        CavityDecay::Kappa(k) => k,
    };
    let g = match cfg.coupling {
        Coupling::Reflectivity(r) => {
            coupling_constant_from_geometry(cfg.cavity_length, cfg.wavelength, r)?
        }
        Coupling::Fixed(g) => g,
    };
    Ok(DerivedRates {
        omega_c,
        kappa,
        g,
        eps_c: drive_amplitude(kappa, cfg.pump_power, omega_c)?,
        eps_p: drive_amplitude(kappa, cfg.probe_power, omega_c)?,
        n_th: thermal_occupation(cfg.omega_m, cfg.temperature)?,
        quality: if cfg.gamma_m > T::zero() {
            cfg.omega_m / cfg.gamma_m
        } else {
            T::infinity()
        },
    })
}

/// Steady state at a prescribed effective detuning Delta.
///
/// All outputs are mutually consistent by construction: only `c0` feeds
/// `alpha`, and only `alpha` feeds `X0`, so no iteration is needed once Delta
/// is fixed. The momentum moment is purely thermal, `Y0 = (1+2n)*m*hbar*omega_m/2`,
/// while the displacement moment is stiffened by the coupling:
/// `X0 = Y0/(m^2*omega_m^2*(1+2*alpha))`.
pub fn steady_state_given_detuning<T: Scalar>(
    cfg: &PhysicalConfig<T>,
    rates: &DerivedRates<T>,
    detuning: T,
) -> Result<SteadyState<T>> {
    if !detuning.is_finite() {
        return Err(CoreError::domain(format!("detuning must be finite, got {detuning}")));
    }
    let two = lit::<T>(2.0);
    let c0 = Complex::new(rates.kappa, detuning).finv().scale(rates.eps_c);
    let photon_number = c0.norm_sqr();
    let m_om2 = cfg.mass * cfg.omega_m * cfg.omega_m;
    let alpha = lit::<T>(HBAR) * rates.g * photon_number / m_om2;
    let y0 = (T::one() + two * rates.n_th) * cfg.mass * lit::<T>(HBAR) * cfg.omega_m / two;
    let x0 = y0 / (cfg.mass * m_om2 * (T::one() + two * alpha));
    let beta = rates.g * x0 / cfg.omega_m;
    Ok(SteadyState {
        c0,
        photon_number,
        x0,
        y0,
        z0: T::zero(),
        alpha,
        beta,
        detuning,
    })
}

/// Steady state honoring the config's detuning mode.
///
/// Effective mode is a passthrough to [`steady_state_given_detuning`]. Bare
/// mode closes the loop `Delta = (omega_0 - omega_c) + beta(Delta)*omega_m`
/// by damped fixed-point iteration from `Delta = omega_0 - omega_c`,
/// converging to `1e-10*omega_m` (or a few ulps at low precision) within 200
/// iterations.
pub fn steady_state_self_consistent<T: Scalar>(
    cfg: &PhysicalConfig<T>,
    rates: &DerivedRates<T>,
) -> Result<SteadyState<T>> {
    match cfg.detuning {
        Detuning::Effective(d) => steady_state_given_detuning(cfg, rates, d),
        Detuning::Bare(bare) => {
            let tol = lit::<T>(1e-10).max(lit::<T>(8.0) * T::epsilon()) * cfg.omega_m;
            let step = |d: T| match steady_state_given_detuning(cfg, rates, d) {
                Ok(ss) => bare + ss.beta * cfg.omega_m,
                Err(_) => T::nan(), // caught as non-finite by the solver
            };
            let converged = damped_fixed_point(step, bare, tol, 200)?;
            steady_state_given_detuning(cfg, rates, converged)
        }
    }
}
