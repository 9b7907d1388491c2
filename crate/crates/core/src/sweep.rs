//! Detuning sweeps and what gets read off them: dip position, depth, width,
//! and the anomalous-dispersion window.
//!
//! Depth and width are measured against the envelope obtained by forcing
//! beta = 0 with alpha kept, not against the bare-cavity baseline: the
//! coupling shifts the whole absorption profile through alpha, and only the
//! beta-mediated interference carves the dip, so the envelope is the curve
//! the dip actually rides on.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::response::{baseline_response, total_output_field, ProbeResponse, ResponseParams};
use crate::{lit, Scalar};

/// A uniform probe-detuning grid request, bounds in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec<T> {
    pub delta_min: T,
    pub delta_max: T,
    pub points: usize,
    /// Also evaluate the bare-cavity curve per row.
    pub include_baseline: bool,
}

impl<T: Scalar> SweepSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.delta_min.is_finite() || !self.delta_max.is_finite() {
            return Err(CoreError::domain("sweep bounds must be finite"));
        }
        if !(self.delta_min < self.delta_max) {
            return Err(CoreError::domain(format!(
                "sweep needs delta_min < delta_max, got [{}, {}]",
                self.delta_min, self.delta_max
            )));
        }
        if self.points < 2 {
            return Err(CoreError::domain(format!(
                "sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub response: ProbeResponse<T>,
    /// Bare-cavity eps_T at the same delta, when requested.
    pub baseline: Option<Complex<T>>,
}

/// Response evaluated over a grid, carrying the working point it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub params: ResponseParams<T>,
    pub rows: Vec<SweepRow<T>>,
}

/// Dip geometry against the beta = 0 envelope, all frequencies rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipMetrics<T> {
    pub delta_dip: T,
    /// Envelope minus response at the refined dip position; positive.
    pub depth: T,
    /// Full width between the half-depth crossings.
    pub fwhm: T,
    /// Two-phonon resonance `2*omega_m*sqrt(1+2*alpha)`.
    pub predicted_dip: T,
}

pub fn run_sweep<T: Scalar>(
    params: &ResponseParams<T>,
    spec: &SweepSpec<T>,
) -> Result<SweepResult<T>> {
    spec.validate()?;
    let span = spec.delta_max - spec.delta_min;
    let step = span / lit::<T>((spec.points - 1) as f64);
    let mut rows = Vec::with_capacity(spec.points);
    let mut prev = T::neg_infinity();
    for k in 0..spec.points {
        let delta = if k + 1 == spec.points {
            spec.delta_max
        } else {
            spec.delta_min + lit::<T>(k as f64) * step
        };
        if !(delta > prev) {
            return Err(CoreError::domain(format!(
                "grid of {} points over [{}, {}] collapses at index {k}: spacing below precision",
                spec.points, spec.delta_min, spec.delta_max
            )));
        }
        prev = delta;
        rows.push(SweepRow {
            response: total_output_field(delta, params)?,
            baseline: spec
                .include_baseline
                .then(|| baseline_response(delta, params.detuning, params.kappa)),
        });
    }
    Ok(SweepResult { params: *params, rows })
}

fn envelope_v_p<T: Scalar>(delta: T, env: &ResponseParams<T>) -> Result<T> {
    Ok(total_output_field(delta, env)?.v_p)
}

/// Locates the transparency dip on a sweep and measures it.
///
/// The search window is the grid's intersection with half a mechanical
/// frequency either side of the two-phonon resonance. The grid minimum is
/// refined by a parabola through it and its two neighbors; depth compares
/// envelope and response at the refined point; the width comes from linearly
/// interpolated half-depth crossings of envelope minus response.
pub fn find_dip<T: Scalar>(sweep: &SweepResult<T>) -> Result<DipMetrics<T>> {
    let p = &sweep.params;
    let half = lit::<T>(0.5);
    let predicted = lit::<T>(2.0) * p.omega_m * (T::one() + lit::<T>(2.0) * p.alpha).sqrt();
    let lo = predicted - half * p.omega_m;
    let hi = predicted + half * p.omega_m;

    let rows = &sweep.rows;
    let in_window: Vec<usize> = (0..rows.len())
        .filter(|&i| {
            let d = rows[i].response.delta;
            d >= lo && d <= hi
        })
        .collect();
    if in_window.len() < 3 {
        return Err(CoreError::numerical(format!(
            "no dip: grid puts only {} points inside the two-phonon window [{lo}, {hi}]",
            in_window.len()
        )));
    }
    let (first, last) = (in_window[0], *in_window.last().expect("non-empty window"));
    let min_idx = in_window
        .iter()
        .copied()
        .min_by(|&i, &j| {
            rows[i]
                .response
                .v_p
                .partial_cmp(&rows[j].response.v_p)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("non-empty window");
    if min_idx == first || min_idx == last {
        return Err(CoreError::numerical(format!(
            "no dip: minimum of v_p sits on the window edge at delta = {}",
            rows[min_idx].response.delta
        )));
    }

    let d0 = rows[min_idx].response.delta;
    let (ym, y0, yp) = (
        rows[min_idx - 1].response.v_p,
        rows[min_idx].response.v_p,
        rows[min_idx + 1].response.v_p,
    );
    let curvature = ym + yp - lit::<T>(2.0) * y0;
    let delta_dip = if curvature > T::zero() {
        let h = rows[min_idx + 1].response.delta - d0;
        let shift = half * h * (ym - yp) / curvature;
        shift
            .max(rows[min_idx - 1].response.delta - d0)
            .min(rows[min_idx + 1].response.delta - d0)
            + d0
    } else {
        d0
    };

    let env = p.with_beta(T::zero());
    let depth = envelope_v_p(delta_dip, &env)? - total_output_field(delta_dip, p)?.v_p;
    if !(depth > T::zero()) {
        return Err(CoreError::numerical(format!(
            "no dip: response does not drop below its envelope at delta = {delta_dip} (depth {depth})"
        )));
    }

    // dip profile relative to the envelope, on grid rows
    let profile = |i: usize| -> Result<T> {
        let d = rows[i].response.delta;
        Ok(envelope_v_p(d, &env)? - rows[i].response.v_p)
    };
    let target = half * depth;
    if !(profile(min_idx)? > target) {
        return Err(CoreError::numerical(
            "insufficient span: grid too coarse to hold the half-depth level near the dip",
        ));
    }
    let crossing = |mut inside: usize, outward_step: isize| -> Result<T> {
        let mut h_in = profile(inside)?;
        loop {
            let next = inside as isize + outward_step;
            if next < 0 || next as usize >= rows.len() {
                return Err(CoreError::numerical(format!(
                    "insufficient span: half-depth crossing not bracketed before the grid edge at delta = {}",
                    rows[inside].response.delta
                )));
            }
            let out = next as usize;
            let h_out = profile(out)?;
            if h_out <= target {
                let d_in = rows[inside].response.delta;
                let d_out = rows[out].response.delta;
                return Ok(d_in + (h_in - target) / (h_in - h_out) * (d_out - d_in));
            }
            inside = out;
            h_in = h_out;
        }
    };
    let left = crossing(min_idx, -1)?;
    let right = crossing(min_idx, 1)?;

    Ok(DipMetrics {
        delta_dip,
        depth,
        fwhm: right - left,
        predicted_dip: predicted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow<T> {
    pub delta: T,
    pub v_p_tilde: T,
    pub baseline_v_p_tilde: T,
}

/// Out-of-phase quadrature with its bare-cavity reference and the window
/// where the dispersion runs backwards.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionProfile<T> {
    pub rows: Vec<DispersionRow<T>>,
    /// Delta bounds of the longest contiguous run of grid intervals on which
    /// the slope of v_p_tilde opposes the baseline slope; None when the
    /// curves never disagree in direction.
    pub anomalous: Option<(T, T)>,
}

pub fn dispersion_profile<T: Scalar>(sweep: &SweepResult<T>) -> Result<DispersionProfile<T>> {
    let rows: Vec<DispersionRow<T>> = sweep
        .rows
        .iter()
        .map(|row| {
            row.baseline
                .map(|b| DispersionRow {
                    delta: row.response.delta,
                    v_p_tilde: row.response.v_p_tilde,
                    baseline_v_p_tilde: b.im,
                })
                .ok_or_else(|| {
                    CoreError::domain("dispersion profile needs the baseline column in the sweep")
                })
        })
        .collect::<Result<_>>()?;

    let inverted: Vec<bool> = rows
        .windows(2)
        .map(|w| {
            let df = w[1].v_p_tilde - w[0].v_p_tilde;
            let db = w[1].baseline_v_p_tilde - w[0].baseline_v_p_tilde;
            df * db < T::zero()
        })
        .collect();
    let mut best: Option<(usize, usize)> = None;
    let mut run_start = None;
    for (i, &flag) in inverted.iter().enumerate() {
        if flag {
            let start = *run_start.get_or_insert(i);
            if best.map_or(true, |(b0, b1)| i - start > b1 - b0) {
                best = Some((start, i));
            }
        } else {
            run_start = None;
        }
    }
    Ok(DispersionProfile {
        anomalous: best.map(|(i0, i1)| (rows[i0].delta, rows[i1 + 1].delta)),
        rows,
    })
}
