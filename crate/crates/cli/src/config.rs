//! JSON run configuration. The file names every physical input in SI with an
//! explicit unit suffix; frequencies accept either a `*_rad_s` or a `*_hz`
//! spelling, exactly one per quantity, and hz values are multiplied by 2*pi
//! at load time so the rest of the program only ever sees angular rates.

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use quad_eit_core::params::{CavityDecay, Coupling, Detuning, PhysicalConfig};

use crate::CliError;

/// On-disk schema, one file per run. Unknown keys are rejected so a typo
/// cannot silently fall back to a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub wavelength_m: f64,
    pub cavity_length_m: f64,
    pub mass_kg: f64,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_m_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_m_hz: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_m_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_m_hz: Option<f64>,

    /// Cavity decay: `finesse` derives kappa from the geometry, the other two
    /// spellings set it directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finesse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_hz: Option<f64>,

    /// Quadratic coupling: `reflectivity` derives g from the membrane, the
    /// override spellings (rad/s/m^2 or Hz/m^2) set it directly. Zero is
    /// legal and turns the membrane off.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflectivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_override_rad_s_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_override_hz_m2: Option<f64>,

    pub pump_power_w: f64,
    #[serde(default)]
    pub probe_power_w: f64,
    pub temperature_k: f64,

    pub detuning: DetuningConfig,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,

    /// Probe detuning used by `verify`, in units of omega_m. Defaults to the
    /// two-phonon resonance 2*sqrt(1+2*alpha) of the solved operating point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_delta_over_omega_m: Option<f64>,

    /// Default output path; the --out flag wins when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningConfig {
    pub mode: DetuningMode,
    /// Detuning over omega_m; `effective` pins Delta, `bare` pins Delta_0 and
    /// lets the solver find the membrane-shifted working point.
    pub value_over_omega_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningMode {
    Effective,
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub from_over_omega_m: f64,
    pub to_over_omega_m: f64,
    pub points: usize,
}

/// Command-line flags shared by every subcommand. Sweep flags override the
/// config's `sweep` block field by field.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    pub config: PathBuf,
    /// Output file (stdout if neither this nor the config's `out` is set).
    /// For `verify` this names the --dump-trajectory CSV; the report itself
    /// always prints to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sweep start, delta/omega_m
    #[arg(long)]
    pub from: Option<f64>,
    /// Sweep end, delta/omega_m
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of sweep grid points
    #[arg(long)]
    pub points: Option<usize>,
    /// verify only: also write the coarse-probe trajectory as CSV
    #[arg(long)]
    pub dump_trajectory: bool,
}

/// A fully resolved run: validated physics plus the merged command options.
#[derive(Debug, Clone)]
pub struct Run {
    pub physical: PhysicalConfig<f64>,
    pub sweep: Option<SweepWindow>,
    pub probe_delta_over_omega_m: Option<f64>,
    pub out: Option<PathBuf>,
    pub dump_trajectory: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepWindow {
    pub from_over_omega_m: f64,
    pub to_over_omega_m: f64,
    pub points: usize,
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn frequency(
    quantity: &str,
    rad_key: &str,
    rad: Option<f64>,
    hz_key: &str,
    hz: Option<f64>,
) -> Result<f64, CliError> {
    match (rad, hz) {
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v * TAU),
        (None, None) => Err(CliError::Config(format!(
            "missing {quantity}: set {rad_key} or {hz_key}"
        ))),
        (Some(_), Some(_)) => Err(CliError::Config(format!(
            "{rad_key} and {hz_key} are mutually exclusive; set exactly one"
        ))),
    }
}

impl RunConfig {
    /// Converts to core units and runs the core validation, so a bad file is
    /// rejected at parse time rather than mid-command.
    pub fn to_physical(&self) -> Result<PhysicalConfig<f64>, CliError> {
        let omega_m = frequency(
            "mechanical frequency",
            "omega_m_rad_s",
            self.omega_m_rad_s,
            "omega_m_hz",
            self.omega_m_hz,
        )?;
        let gamma_m = frequency(
            "mechanical damping",
            "gamma_m_rad_s",
            self.gamma_m_rad_s,
            "gamma_m_hz",
            self.gamma_m_hz,
        )?;

        let cavity_decay = match (self.finesse, self.kappa_rad_s, self.kappa_hz) {
            (Some(f), None, None) => CavityDecay::Finesse(f),
            (None, Some(k), None) => CavityDecay::Kappa(k),
            (None, None, Some(k)) => CavityDecay::Kappa(k * TAU),
            (None, None, None) => {
                return Err(CliError::Config(
                    "missing cavity decay: set finesse, kappa_rad_s, or kappa_hz".into(),
                ))
            }
            _ => {
                return Err(CliError::Config(
                    "finesse, kappa_rad_s, and kappa_hz are mutually exclusive; set exactly one"
                        .into(),
                ))
            }
        };

        let coupling = match (self.reflectivity, self.g_override_rad_s_m2, self.g_override_hz_m2) {
            (Some(r), None, None) => Coupling::Reflectivity(r),
            (None, Some(g), None) => Coupling::Fixed(g),
            (None, None, Some(g)) => Coupling::Fixed(g * TAU),
            (None, None, None) => {
                return Err(CliError::Config(
                    "missing coupling: set reflectivity, g_override_rad_s_m2, or g_override_hz_m2"
                        .into(),
                ))
            }
            _ => {
                return Err(CliError::Config(
                    "reflectivity, g_override_rad_s_m2, and g_override_hz_m2 are mutually \
                     exclusive; set exactly one"
                        .into(),
                ))
            }
        };

        let detuning_value = self.detuning.value_over_omega_m * omega_m;
        let detuning = match self.detuning.mode {
            DetuningMode::Effective => Detuning::Effective(detuning_value),
            DetuningMode::Bare => Detuning::Bare(detuning_value),
        };

        let cfg = PhysicalConfig {
            wavelength: self.wavelength_m,
            cavity_length: self.cavity_length_m,
            mass: self.mass_kg,
            omega_m,
            gamma_m,
            cavity_decay,
            coupling,
            pump_power: self.pump_power_w,
            probe_power: self.probe_power_w,
            temperature: self.temperature_k,
            detuning,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Merges the config with the command-line flags. A sweep window may come
    /// entirely from the file, entirely from flags, or field by field, but
    /// must end up complete or absent.
    pub fn assemble(self, args: &CommonArgs) -> Result<Run, CliError> {
        let physical = self.to_physical()?;
        let from = args.from.or(self.sweep.map(|s| s.from_over_omega_m));
        let to = args.to.or(self.sweep.map(|s| s.to_over_omega_m));
        let points = args.points.or(self.sweep.map(|s| s.points));
        let sweep = match (from, to, points) {
            (Some(f), Some(t), Some(p)) => Some(SweepWindow {
                from_over_omega_m: f,
                to_over_omega_m: t,
                points: p,
            }),
            (None, None, None) => None,
            _ => {
                return Err(CliError::Config(
                    "incomplete sweep window: need all of from, to, and points \
                     (config `sweep` block or --from/--to/--points)"
                        .into(),
                ))
            }
        };
        Ok(Run {
            physical,
            sweep,
            probe_delta_over_omega_m: self.probe_delta_over_omega_m,
            out: args.out.clone().or(self.out),
            dump_trajectory: args.dump_trajectory,
        })
    }
}
