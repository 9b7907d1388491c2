//! End-to-end behavior at the two lab parameter sets: the narrow
//! high-finesse dip, temperature scaling, dispersion inversion, and the
//! self-consistency properties of the steady-state layer.

use proptest::prelude::*;
use quad_eit_core::params::{
    derive_rates, steady_state_given_detuning, steady_state_self_consistent, CavityDecay,
    Coupling, Detuning, PhysicalConfig,
};
use quad_eit_core::response::{baseline_response, total_output_field, ResponseParams};
use quad_eit_core::sweep::{dispersion_profile, find_dip, run_sweep, SweepSpec};

const TWO_PI: f64 = std::f64::consts::TAU;

fn set1() -> PhysicalConfig<f64> {
    PhysicalConfig {
        wavelength: 532e-9,
        cavity_length: 0.067,
        mass: 1e-12,
        omega_m: TWO_PI * 1e5,
        gamma_m: 1.0,
        cavity_decay: CavityDecay::Finesse(6940.0),
        coupling: Coupling::Reflectivity(0.42),
        pump_power: 20e-6,
        probe_power: 0.0,
        temperature: 20.0,
        detuning: Detuning::Effective(2.0 * TWO_PI * 1e5),
    }
}

fn set2() -> PhysicalConfig<f64> {
    PhysicalConfig {
        gamma_m: 900.0,
        coupling: Coupling::Reflectivity(0.999),
        pump_power: 10e-6,
        temperature: 100.0,
        ..set1()
    }
}

fn response_at(cfg: &PhysicalConfig<f64>) -> ResponseParams<f64> {
    let rates = derive_rates(cfg).unwrap();
    let ss = steady_state_self_consistent(cfg, &rates).unwrap();
    ResponseParams::new(cfg, &rates, &ss)
}

fn sweep(p: &ResponseParams<f64>, lo: f64, hi: f64, n: usize) -> quad_eit_core::sweep::SweepResult<f64> {
    run_sweep(
        p,
        &SweepSpec {
            delta_min: lo * p.omega_m,
            delta_max: hi * p.omega_m,
            points: n,
            include_baseline: true,
        },
    )
    .unwrap()
}

#[test]
fn high_finesse_set_has_a_hertz_scale_dip() {
    let p = response_at(&set1());
    let om = p.omega_m;
    let s = sweep(&p, 2.0, 2.05, 400_001);
    let dip = find_dip(&s).unwrap();

    assert!((dip.delta_dip / om - 2.025_622_53).abs() < 1e-7);
    assert!((dip.predicted_dip / om - 2.025_625_957_9).abs() < 1e-9);
    assert!((dip.delta_dip - dip.predicted_dip).abs() < 0.01 * om);
    assert!((dip.depth - 1.956_388_06).abs() < 1e-5 * dip.depth);

    // the quoted linewidth is "about 10 Hz" without a stated convention;
    // in rad/s the width lands at 12.76, the /2pi reading at 2.03
    assert!((dip.fwhm - 12.759_84).abs() < 1e-4 * dip.fwhm, "fwhm {}", dip.fwhm);
    let conventions = [dip.fwhm, dip.fwhm / TWO_PI];
    assert!(conventions.iter().any(|w| (5.0..20.0).contains(w)));

    // transmission nearly vanishes at the dip floor
    let floor = total_output_field(dip.delta_dip, &p).unwrap().v_p;
    assert!(floor < 0.1, "dip floor {floor}");
}

#[test]
fn dip_metrics_are_stable_under_grid_refinement() {
    let p = response_at(&set2());
    let om = p.omega_m;
    let coarse = find_dip(&sweep(&p, 2.2, 2.4, 8_001)).unwrap();
    let fine = find_dip(&sweep(&p, 2.2, 2.4, 16_001)).unwrap();
    assert!(
        (coarse.delta_dip - fine.delta_dip).abs() < 1e-4 * om,
        "dip moved {} rad/s",
        (coarse.delta_dip - fine.delta_dip).abs()
    );
    assert!(
        (coarse.fwhm - fine.fwhm).abs() < 0.02 * fine.fwhm,
        "width moved from {} to {}",
        coarse.fwhm,
        fine.fwhm
    );
}

#[test]
fn dip_depth_grows_with_temperature() {
    let mut depths = Vec::new();
    for temperature in [20.0, 60.0, 100.0] {
        let cfg = PhysicalConfig { temperature, ..set1() };
        let p = response_at(&cfg);
        let dip = find_dip(&sweep(&p, 2.02, 2.032, 48_001)).unwrap();
        depths.push(dip.depth);
    }
    assert!(depths[0] < depths[1] && depths[1] < depths[2], "depths {depths:?}");
    let frozen = [1.956_388, 2.184_742, 2.236_964];
    for (got, want) in depths.iter().zip(frozen) {
        assert!((got - want).abs() < 1e-4 * want, "depth {got} vs {want}");
    }
}

#[test]
fn response_tracks_its_envelope_away_from_the_dip() {
    let p = response_at(&set1());
    let s = sweep(&p, 1.9, 2.1, 200_001);
    let dip = find_dip(&s).unwrap();
    let env = p.with_beta(0.0);

    // the interference term has an algebraic 1/delta^2-flavored tail, so the
    // envelope is approached in bands rather than met at a hard boundary;
    // bands measured on this grid with ~25 percent headroom
    let bands = [(10.0, 1e-2), (50.0, 1.2e-3), (200.0, 2.5e-4)];
    let mut worst = [0.0f64; 3];
    for row in &s.rows {
        let d = row.response.delta;
        let gap = (row.response.v_p - total_output_field(d, &env).unwrap().v_p).abs();
        for (slot, (widths, _)) in worst.iter_mut().zip(bands) {
            if (d - dip.delta_dip).abs() > widths * dip.fwhm {
                *slot = slot.max(gap);
            }
        }
    }
    for ((_, bound), got) in bands.iter().zip(worst) {
        assert!(got < *bound, "deviation {got} exceeds {bound}");
    }
}

#[test]
fn decoupled_response_collapses_onto_the_baseline_grid_wide() {
    let cfg = PhysicalConfig { coupling: Coupling::Fixed(0.0), ..set1() };
    let p = response_at(&cfg);
    let s = sweep(&p, 0.0, 4.0, 10_000);
    let mut worst = 0.0f64;
    for row in &s.rows {
        let b = row.baseline.unwrap();
        worst = worst.max((row.response.eps_t - b).norm() / b.norm());
    }
    assert!(worst < 1e-12, "max relative deviation {worst}");
}

#[test]
fn both_sets_invert_the_dispersion_inside_the_dip() {
    for (cfg, lo, hi, n) in [
        (set1(), 2.0251, 2.0261, 20_001),
        (set2(), 2.2, 2.4, 8_001),
    ] {
        let p = response_at(&cfg);
        let om = p.omega_m;
        let s = sweep(&p, lo, hi, n);
        let dip = find_dip(&s).unwrap();
        let disp = dispersion_profile(&s).unwrap();
        let (a_lo, a_hi) = disp
            .anomalous
            .unwrap_or_else(|| panic!("no anomalous window on [{lo}, {hi}]"));
        assert!(
            a_lo < dip.delta_dip && dip.delta_dip < a_hi,
            "anomalous window [{}, {}] misses the dip at {}",
            a_lo / om,
            a_hi / om,
            dip.delta_dip / om
        );

        // slope through the dip: the coupled curve falls where the bare
        // cavity's dispersion rises
        let h = 1e-4 * dip.fwhm;
        let at = |d: f64| total_output_field(d, &p).unwrap().v_p_tilde;
        let slope_full = (at(dip.delta_dip + h) - at(dip.delta_dip - h)) / (2.0 * h);
        let base =
            |d: f64| baseline_response(d, p.detuning, p.kappa).im;
        let slope_base =
            (base(dip.delta_dip + h) - base(dip.delta_dip - h)) / (2.0 * h);
        assert!(
            slope_full * slope_base < 0.0,
            "slopes {slope_full} and {slope_base} agree in sign"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The displacement-momentum moment identity is an algebraic consequence
    /// of the steady state and must hold at machine precision everywhere in
    /// the physical parameter box.
    #[test]
    fn moment_identity_everywhere(
        temperature in 1.0f64..300.0,
        power in 1e-7f64..1e-4,
        reflectivity in 0.0f64..0.9995,
        det in 0.5f64..3.0,
    ) {
        let cfg = PhysicalConfig {
            temperature,
            pump_power: power,
            coupling: Coupling::Reflectivity(reflectivity),
            ..set1()
        };
        let rates = derive_rates(&cfg).unwrap();
        let ss = steady_state_given_detuning(&cfg, &rates, det * cfg.omega_m).unwrap();
        let lhs = ss.x0 * cfg.mass * cfg.mass * cfg.omega_m * cfg.omega_m
            * (1.0 + 2.0 * ss.alpha);
        prop_assert!((lhs - ss.y0).abs() <= 4.0 * f64::EPSILON * ss.y0);
    }

    /// Warming the bath raises the occupation and both second moments and
    /// through them the interference strength, while leaving the optical
    /// spring alone.
    #[test]
    fn warming_strengthens_the_interference_pathway(
        temperature in 1.0f64..150.0,
        factor in 1.1f64..4.0,
        det in 0.5f64..3.0,
    ) {
        let cold_cfg = PhysicalConfig { temperature, ..set1() };
        let hot_cfg = PhysicalConfig { temperature: temperature * factor, ..set1() };
        let delta = det * cold_cfg.omega_m;
        let cold_rates = derive_rates(&cold_cfg).unwrap();
        let hot_rates = derive_rates(&hot_cfg).unwrap();
        let cold = steady_state_given_detuning(&cold_cfg, &cold_rates, delta).unwrap();
        let hot = steady_state_given_detuning(&hot_cfg, &hot_rates, delta).unwrap();
        prop_assert!(hot_rates.n_th > cold_rates.n_th);
        prop_assert!(hot.y0 > cold.y0);
        prop_assert!(hot.x0 > cold.x0);
        prop_assert!(hot.beta > cold.beta);
        prop_assert_eq!(hot.alpha, cold.alpha);
    }

    /// More pump light stiffens the optical spring and squeezes the
    /// displacement variance down.
    #[test]
    fn pumping_harder_stiffens_the_spring(
        power in 1e-7f64..5e-5,
        factor in 1.1f64..4.0,
        det in 0.5f64..3.0,
    ) {
        let weak_cfg = PhysicalConfig { pump_power: power, ..set1() };
        let strong_cfg = PhysicalConfig { pump_power: power * factor, ..set1() };
        let delta = det * weak_cfg.omega_m;
        let weak_rates = derive_rates(&weak_cfg).unwrap();
        let strong_rates = derive_rates(&strong_cfg).unwrap();
        let weak = steady_state_given_detuning(&weak_cfg, &weak_rates, delta).unwrap();
        let strong = steady_state_given_detuning(&strong_cfg, &strong_rates, delta).unwrap();
        prop_assert!(strong.alpha > weak.alpha);
        prop_assert!(strong.x0 < weak.x0);
    }

    /// Solving for the bare detuning that produces a given effective one and
    /// feeding it back recovers that effective detuning.
    #[test]
    fn bare_detuning_round_trip(
        det in 0.5f64..3.0,
        temperature in 5.0f64..200.0,
        reflectivity in 0.0f64..0.9995,
    ) {
        let cfg = PhysicalConfig {
            temperature,
            coupling: Coupling::Reflectivity(reflectivity),
            ..set2()
        };
        let rates = derive_rates(&cfg).unwrap();
        let om = cfg.omega_m;
        let eff = steady_state_given_detuning(&cfg, &rates, det * om).unwrap();
        let bare_cfg = PhysicalConfig {
            detuning: Detuning::Bare(det * om - eff.beta * om),
            ..cfg
        };
        let ss = steady_state_self_consistent(&bare_cfg, &rates).unwrap();
        prop_assert!((ss.detuning - det * om).abs() < 1e-8 * om);
        let bare = det * om - eff.beta * om;
        prop_assert!((ss.detuning - bare - ss.beta * om).abs() < 1e-9 * om);
    }
}
