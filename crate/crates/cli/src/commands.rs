//! The five commands behind the binary. Each resolves the operating point
//! from the config, runs the relevant core routine, and writes a
//! fixed-format table or CSV.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use quad_eit_core::oracle::{
    integrate_mean_field_from, nondimensionalize, response_params_from, scaled_displacement,
    verify_against_analytic_from, DimensionlessParams, VerifyPoint, SETTLE_CYCLES,
    STEPS_PER_CYCLE, WINDOW_CYCLES,
};
use quad_eit_core::params::{
    derive_rates, steady_state_self_consistent, DerivedRates, SteadyState,
};
use quad_eit_core::response::ResponseParams;
use quad_eit_core::sweep::{find_dip, run_sweep, SweepResult, SweepSpec};
use quad_eit_core::HBAR;

use crate::config::Run;
use crate::CliError;

pub const SWEEP_HEADER: &str = "delta_over_omega_m, v_p, v_p_tilde, abs_eps_T, \
                                re_eps_out_minus, im_eps_out_minus, baseline_v_p, baseline_v_p_tilde";
pub const BASELINE_HEADER: &str = "delta_over_omega_m, v_p, v_p_tilde";
pub const TRAJECTORY_HEADER: &str = "tau, re_c, im_c, u, v, w";

/// 12 significant digits everywhere: enough that reruns are byte-comparable
/// without dragging float noise into the files.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn cnum(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{} {sign} {} i", num(z.re), num(z.im.abs()))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn solve(run: &Run) -> Result<(DerivedRates<f64>, SteadyState<f64>), CliError> {
    let rates = derive_rates(&run.physical)?;
    let steady = steady_state_self_consistent(&run.physical, &rates)?;
    Ok((rates, steady))
}

pub fn steady(run: &Run) -> Result<(), CliError> {
    let (rates, ss) = solve(run)?;
    let cfg = &run.physical;
    let om = cfg.omega_m;
    let u0 = scaled_displacement(cfg, &ss);
    let v0 = ss.y0 / (cfg.mass * HBAR * om);
    let g_t = HBAR * rates.g / (cfg.mass * om * om);
    let mut w = sink(run.out.as_deref())?;
    writeln!(w, "Delta  = {} rad/s  (Delta/omega_m = {})", num(ss.detuning), num(ss.detuning / om))?;
    writeln!(w, "c0     = {}  (dimensionless field amplitude)", cnum(ss.c0))?;
    writeln!(w, "|c0|^2 = {} photons", num(ss.photon_number))?;
    writeln!(w, "alpha  = {}", num(ss.alpha))?;
    writeln!(w, "beta   = {}", num(ss.beta))?;
    writeln!(w, "X0     = {} m^2  (u0 = X0*m*omega_m/hbar = {})", num(ss.x0), num(u0))?;
    writeln!(w, "Y0     = {} kg^2 m^2/s^2  (v0 = Y0/(m*hbar*omega_m) = {})", num(ss.y0), num(v0))?;
    writeln!(w, "n      = {}", num(rates.n_th))?;
    writeln!(w, "kappa  = {} rad/s  (kappa/omega_m = {})", num(rates.kappa), num(rates.kappa / om))?;
    writeln!(w, "g      = {} rad/(s m^2)  (g_t = hbar*g/(m*omega_m^2) = {})", num(rates.g), num(g_t))?;
    w.flush()?;
    Ok(())
}

fn swept(run: &Run) -> Result<SweepResult<f64>, CliError> {
    let window = run.sweep.ok_or_else(|| {
        CliError::Config(
            "this command needs a sweep window (config `sweep` block or --from/--to/--points)"
                .into(),
        )
    })?;
    let (rates, ss) = solve(run)?;
    let params = ResponseParams::new(&run.physical, &rates, &ss);
    let om = run.physical.omega_m;
    let spec = SweepSpec {
        delta_min: window.from_over_omega_m * om,
        delta_max: window.to_over_omega_m * om,
        points: window.points,
        include_baseline: true,
    };
    Ok(run_sweep(&params, &spec)?)
}

fn write_sweep_rows<W: Write>(w: &mut W, sweep: &SweepResult<f64>) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    let om = sweep.params.omega_m;
    for row in &sweep.rows {
        let r = &row.response;
        let b = row.baseline.expect("sweep commands always request the baseline");
        writeln!(
            w,
            "{}, {}, {}, {}, {}, {}, {}, {}",
            num(r.delta / om),
            num(r.v_p),
            num(r.v_p_tilde),
            num(r.eps_t.norm()),
            num(r.eps_out_minus.re),
            num(r.eps_out_minus.im),
            num(b.re),
            num(b.im),
        )?;
    }
    Ok(())
}

pub fn sweep(run: &Run) -> Result<(), CliError> {
    let result = swept(run)?;
    let mut w = sink(run.out.as_deref())?;
    write_sweep_rows(&mut w, &result)?;
    w.flush()?;
    Ok(())
}

pub fn dip(run: &Run) -> Result<(), CliError> {
    let result = swept(run)?;
    let metrics = find_dip(&result)?;
    let om = result.params.omega_m;
    let mut w = sink(run.out.as_deref())?;
    write_sweep_rows(&mut w, &result)?;
    writeln!(
        w,
        "{{\"delta_dip_over_omega_m\": {}, \"fwhm_rad_s\": {}, \"fwhm_hz\": {}, \
         \"depth\": {}, \"predicted_dip_over_omega_m\": {}}}",
        num(metrics.delta_dip / om),
        num(metrics.fwhm),
        num(metrics.fwhm / TAU),
        num(metrics.depth),
        num(metrics.predicted_dip / om),
    )?;
    w.flush()?;
    Ok(())
}

pub fn baseline(run: &Run) -> Result<(), CliError> {
    let result = swept(run)?;
    let om = result.params.omega_m;
    let mut w = sink(run.out.as_deref())?;
    writeln!(w, "{BASELINE_HEADER}")?;
    for row in &result.rows {
        let b = row.baseline.expect("sweep commands always request the baseline");
        writeln!(w, "{}, {}, {}", num(row.response.delta / om), num(b.re), num(b.im))?;
    }
    w.flush()?;
    Ok(())
}

fn verify_line(name: &str, point: &VerifyPoint<f64>) -> String {
    format!(
        "{name} probe eps_p/eps_c = {}: err(c+) = {}, err(c-) = {}, clean separation: {}",
        num(point.probe_ratio),
        num(point.err_plus),
        num(point.err_minus),
        if point.poor_separation { "no" } else { "yes" },
    )
}

pub fn verify(run: &Run) -> Result<(), CliError> {
    let (rates, ss) = solve(run)?;
    let cfg = &run.physical;
    let om = cfg.omega_m;
    let delta_ratio = run
        .probe_delta_over_omega_m
        .unwrap_or_else(|| 2.0 * (1.0 + 2.0 * ss.alpha).sqrt());
    let base = nondimensionalize(cfg, &rates, &ss, delta_ratio * om);
    let u0 = scaled_displacement(cfg, &ss);
    let (rp, y0) = response_params_from(&DimensionlessParams { eps_p_t: 0.0, ..base }, u0)?;
    let report = verify_against_analytic_from(&base, u0)?;

    println!(
        "point: kappa_t = {}, gamma_t = {}, delta_t = {}, g_t = {}, eps_c_t = {}, n = {}",
        num(base.kappa_t),
        num(base.gamma_t),
        num(base.delta_t),
        num(base.g_t),
        num(base.eps_c_t),
        num(base.n_th),
    );
    println!(
        "branch: u0 = {}, Delta_t = {}, alpha = {}, beta = {}",
        num(u0),
        num(rp.detuning),
        num(rp.alpha),
        num(rp.beta),
    );
    println!("analytic c+ = {}", cnum(report.analytic_plus));
    println!("analytic c- = {}", cnum(report.analytic_minus));
    println!("{}", verify_line("coarse", &report.coarse));
    println!("{}", verify_line("fine  ", &report.fine));
    println!(
        "error ratio coarse/fine: c+ = {}, c- = {}",
        num(report.ratio_plus),
        num(report.ratio_minus),
    );

    if run.dump_trajectory {
        let path = run.out.clone().unwrap_or_else(|| PathBuf::from("trajectory.csv"));
        dump_trajectory(&base, y0, report.coarse.probe_ratio, &path)?;
        println!("trajectory written to {}", path.display());
    }

    report.check()?;
    println!("verdict: integrator and analytic response agree within bounds");
    Ok(())
}

/// Re-runs the coarse verification integration and writes the raw state
/// history, so the settling and the beat structure can be inspected offline.
fn dump_trajectory(
    base: &DimensionlessParams<f64>,
    y0: [f64; 5],
    probe_ratio: f64,
    path: &Path,
) -> Result<(), CliError> {
    let probed = DimensionlessParams { eps_p_t: probe_ratio * base.eps_c_t, ..*base };
    let cycle = TAU / base.delta_t;
    let dtau = cycle / STEPS_PER_CYCLE as f64;
    let tau_end = (SETTLE_CYCLES + WINDOW_CYCLES) as f64 * cycle;
    let traj = integrate_mean_field_from(&probed, y0, tau_end, dtau)?;
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for (k, s) in traj.states.iter().enumerate() {
        writeln!(
            w,
            "{}, {}, {}, {}, {}, {}",
            num(traj.tau(k)),
            num(s[0]),
            num(s[1]),
            num(s[2]),
            num(s[3]),
            num(s[4]),
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_print_with_twelve_significant_digits() {
        assert_eq!(num(2.0), "2.00000000000e0");
        assert_eq!(num(-1.2895065175047e-2), "-1.28950651750e-2");
        assert_eq!(num(0.0), "0.00000000000e0");
    }

    #[test]
    fn complex_formatting_keeps_the_sign_readable() {
        assert_eq!(
            cnum(Complex64::new(1.0, -0.5)),
            "1.00000000000e0 - 5.00000000000e-1 i"
        );
        assert_eq!(
            cnum(Complex64::new(-1.0, 0.5)),
            "-1.00000000000e0 + 5.00000000000e-1 i"
        );
    }
}
