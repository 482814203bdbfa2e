//! Two-state tunneling dynamics and resonance scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::potential::{apply_tilt, extract_well_parameters, PotentialModel};
use crate::wkb::{
    splitting_regularized_form, splitting_turning_form, SplitOptions, SplittingMethod,
    SplittingResult,
};

/// `H = [[E0 + d, -Delta/2], [-Delta/2, E0]]` in the (left, right) basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStateSystem {
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// Energy `hbar omega epsilon` added to the left state.
    pub detuning: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl TwoStateSystem {
    pub fn new(e0: f64, delta: f64, detuning: f64, hbar: f64) -> Result<Self> {
        ensure_finite("E0", e0)?;
        ensure_finite("Delta", delta)?;
        ensure_finite("detuning", detuning)?;
        ensure_positive("hbar", hbar)?;
        if delta < 0.0 {
            return Err(Error::InvalidInput(format!(
                "Delta must be non-negative, got {delta}"
            )));
        }
        Ok(TwoStateSystem {
            e0,
            delta,
            detuning,
            hbar,
        })
    }

    /// Eigenvalue gap `sqrt(Delta^2 + d^2)`.
    pub fn gap(&self) -> f64 {
        self.delta.hypot(self.detuning)
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let mid = self.e0 + 0.5 * self.detuning;
        (mid - 0.5 * self.gap(), mid + 0.5 * self.gap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStateTrajectory {
    pub times: Vec<f64>,
    pub p_right: Vec<f64>,
    pub p_left: Vec<f64>,
    /// `sqrt(Delta^2 + d^2) / hbar`
    pub shuttle_frequency: f64,
}

/// Exact propagation of the two-state system from a localized state.
pub fn evolve_two_state(
    sys: &TwoStateSystem,
    t_max: f64,
    n_steps: usize,
    initial: Initial,
) -> Result<TwoStateTrajectory> {
    let sys = TwoStateSystem::new(sys.e0, sys.delta, sys.detuning, sys.hbar)?;
    ensure_finite("t_max", t_max)?;
    if t_max < 0.0 {
        return Err(Error::InvalidInput(format!(
            "t_max must be non-negative, got {t_max}"
        )));
    }
    if n_steps < 2 {
        return Err(Error::InvalidInput(format!(
            "n_steps must be at least 2, got {n_steps}"
        )));
    }
    let omega = sys.gap();
    // unit vector of the traceless part along (sigma_x, sigma_z)
    let (nx, nz) = if omega > 0.0 {
        (-sys.delta / omega, sys.detuning / omega)
    } else {
        (0.0, 0.0)
    };
    let mut times = Vec::with_capacity(n_steps);
    let mut p_right = Vec::with_capacity(n_steps);
    let mut p_left = Vec::with_capacity(n_steps);
    for k in 0..n_steps {
        let t = t_max * k as f64 / (n_steps - 1) as f64;
        let phase = 0.5 * omega * t / sys.hbar;
        let (s, c) = phase.sin_cos();
        // U = cos - i sin (n . sigma); start amplitude 1 in the initial state
        let (stay_re, stay_im) = match initial {
            Initial::Left => (c, -s * nz),
            Initial::Right => (c, s * nz),
        };
        let hop = s * nx;
        let stay = stay_re * stay_re + stay_im * stay_im;
        let moved = hop * hop;
        times.push(t);
        match initial {
            Initial::Right => {
                p_right.push(stay);
                p_left.push(moved);
            }
            Initial::Left => {
                p_left.push(stay);
                p_right.push(moved);
            }
        }
    }
    Ok(TwoStateTrajectory {
        times,
        p_right,
        p_left,
        shuttle_frequency: omega / sys.hbar,
    })
}

/// Peak transfer `Delta^2 / (Delta^2 + d^2)`.
pub fn max_transfer_probability(delta: f64, detuning: f64) -> Result<f64> {
    ensure_finite("Delta", delta)?;
    ensure_finite("detuning", detuning)?;
    if delta < 0.0 {
        return Err(Error::InvalidInput(format!(
            "Delta must be non-negative, got {delta}"
        )));
    }
    if delta == 0.0 && detuning == 0.0 {
        return Err(Error::Indeterminate(
            "transfer probability is 0/0 for Delta = 0 and zero detuning".into(),
        ));
    }
    let r = delta / delta.hypot(detuning);
    Ok(r * r)
}

/// `Delta` from a detuned gap: `sqrt(gap^2 - d^2)`.
pub fn invert_detuned_splitting(gap: f64, detuning: f64) -> Result<f64> {
    ensure_finite("gap", gap)?;
    ensure_finite("detuning", detuning)?;
    if gap < detuning.abs() {
        return Err(Error::Precondition(format!(
            "gap {gap} is smaller than the detuning energy {}",
            detuning.abs()
        )));
    }
    Ok(((gap - detuning.abs()) * (gap + detuning.abs())).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    /// Linear term `s x` added to the potential.
    Tilt,
    /// Detuning `epsilon` with `Delta_l` held at the base model's value.
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub method: SplittingMethod,
    pub formal: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            method: SplittingMethod::RegularizedForm,
            formal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ScanStatus {
    Ok,
    /// `|epsilon|` outside the resonance window; transfer set to zero.
    OffResonance,
    Error {
        kind: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    /// `s` or `epsilon`, depending on the axis.
    pub x: f64,
    pub n: Option<u32>,
    pub epsilon: Option<f64>,
    #[serde(rename = "Delta_l")]
    pub splitting: Option<f64>,
    #[serde(rename = "Delta_l_eps")]
    pub splitting_eps: Option<f64>,
    pub max_transfer: Option<f64>,
    #[serde(flatten)]
    pub status: ScanStatus,
}

fn wkb_splitting(model: &PotentialModel, l: u32, opts: ScanOptions) -> Result<SplittingResult> {
    let split = SplitOptions {
        formal: opts.formal,
    };
    match opts.method {
        SplittingMethod::TurningPointForm => splitting_turning_form(model, l, split),
        SplittingMethod::RegularizedForm => splitting_regularized_form(model, l, split),
    }
}

fn failed(x: f64, e: Error) -> ScanPoint {
    ScanPoint {
        x,
        n: None,
        epsilon: None,
        splitting: None,
        splitting_eps: None,
        max_transfer: None,
        status: ScanStatus::Error {
            kind: e.kind().to_string(),
            message: e.to_string(),
        },
    }
}

fn tilt_point(base: &PotentialModel, s: f64, l: u32, opts: ScanOptions) -> ScanPoint {
    let model = match apply_tilt(base, s) {
        Ok(m) => m,
        Err(e) => return failed(s, e),
    };
    let (n, eps) = model.well_offset();
    match extract_well_parameters(&model) {
        Err(Error::OutOfRegime(_)) => {
            return ScanPoint {
                x: s,
                n: u32::try_from(n).ok(),
                epsilon: Some(eps),
                splitting: None,
                splitting_eps: None,
                max_transfer: Some(0.0),
                status: ScanStatus::OffResonance,
            }
        }
        Err(e) => return failed(s, e),
        Ok(_) => {}
    }
    match wkb_splitting(&model, l, opts).and_then(|r| {
        let t = max_transfer_probability(r.splitting, r.hbar_omega * r.epsilon)?;
        Ok((r, t))
    }) {
        Ok((r, t)) => ScanPoint {
            x: s,
            n: Some(r.n),
            epsilon: Some(r.epsilon),
            splitting: Some(r.splitting),
            splitting_eps: Some(r.splitting_eps),
            max_transfer: Some(t),
            status: ScanStatus::Ok,
        },
        Err(e) => failed(s, e),
    }
}

fn epsilon_point(base: &SplittingResult, eps: f64) -> ScanPoint {
    let d = base.hbar_omega * eps;
    match max_transfer_probability(base.splitting, d) {
        Ok(t) => ScanPoint {
            x: eps,
            n: Some(base.n),
            epsilon: Some(eps),
            splitting: Some(base.splitting),
            splitting_eps: Some(base.splitting.hypot(d)),
            max_transfer: Some(t),
            status: ScanStatus::Ok,
        },
        Err(e) => failed(eps, e),
    }
}

/// Resonance curve over `values` (tilts or detunings), in input order.
/// Per-point failures are recorded and do not stop the scan.
pub fn resonance_scan(
    base: &PotentialModel,
    axis: ScanAxis,
    values: &[f64],
    l: u32,
    opts: ScanOptions,
) -> Result<Vec<ScanPoint>> {
    match axis {
        ScanAxis::Tilt => Ok(values
            .par_iter()
            .map(|&s| tilt_point(base, s, l, opts))
            .collect()),
        ScanAxis::Epsilon => {
            let reference = wkb_splitting(base, l, opts)?;
            Ok(values
                .par_iter()
                .map(|&e| epsilon_point(&reference, e))
                .collect())
        }
    }
}

/// `n` evenly spaced values covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Local maxima of the transfer curve at or above `threshold`: `(x, transfer)`.
pub fn find_peaks(curve: &[ScanPoint], threshold: f64) -> Vec<(f64, f64)> {
    let y: Vec<f64> = curve
        .iter()
        .map(|p| p.max_transfer.unwrap_or(f64::NAN))
        .collect();
    (0..y.len())
        .filter(|&i| {
            let left = if i > 0 { y[i - 1] } else { f64::NEG_INFINITY };
            let right = if i + 1 < y.len() {
                y[i + 1]
            } else {
                f64::NEG_INFINITY
            };
            // strict on the right so a flat top counts once
            y[i] >= threshold && y[i] >= left && y[i] > right
        })
        .map(|i| (curve[i].x, y[i]))
        .collect()
}

/// Full width at half maximum around the highest point, with linear
/// interpolation of the half-height crossings.
pub fn full_width_half_max(curve: &[ScanPoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter_map(|p| p.max_transfer.filter(|t| t.is_finite()).map(|t| (p.x, t)))
        .collect();
    let (imax, &(_, ymax)) = pts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    let half = 0.5 * ymax;
    let cross = |i: usize, j: usize| {
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[j];
        x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    };
    let left = (1..=imax)
        .rev()
        .find(|&i| pts[i - 1].1 < half)
        .map(|i| cross(i - 1, i))?;
    let right = (imax..pts.len() - 1)
        .find(|&i| pts[i + 1].1 < half)
        .map(|i| cross(i, i + 1))?;
    Some(right - left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Units;

    #[test]
    fn resonant_shuttling_is_complete() {
        let sys = TwoStateSystem::new(0.5, 1e-3, 0.0, 1.0).unwrap();
        let period = 2.0 * std::f64::consts::PI / 1e-3;
        let tr = evolve_two_state(&sys, 3.0 * period, 3001, Initial::Right).unwrap();
        assert!((tr.shuttle_frequency - 1e-3).abs() < 1e-18);
        for (i, t) in tr.times.iter().enumerate() {
            let expect = (1e-3 * t / 2.0).sin().powi(2);
            assert!((tr.p_left[i] - expect).abs() < 1e-12);
            assert!((tr.p_left[i] + tr.p_right[i] - 1.0).abs() < 1e-12);
        }
        let peak = tr.p_left.iter().cloned().fold(0.0, f64::max);
        assert!((peak - 1.0).abs() < 1e-10);
    }

    #[test]
    fn one_linewidth_halves_transfer() {
        let sys = TwoStateSystem::new(0.0, 2e-4, 2e-4, 1.0).unwrap();
        let period = 2.0 * std::f64::consts::PI / sys.gap();
        // sample the half period exactly where the maximum sits
        let tr = evolve_two_state(&sys, period, 3, Initial::Left).unwrap();
        assert!((tr.p_right[1] - 0.5).abs() < 1e-12);
        assert!((max_transfer_probability(2e-4, 2e-4).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            max_transfer_probability(2e-4, 2e-4).unwrap(),
            max_transfer_probability(2e-4, -2e-4).unwrap()
        );
        assert_eq!(max_transfer_probability(2e-4, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn decoupled_states_stay_put() {
        let sys = TwoStateSystem::new(0.0, 0.0, 0.3, 1.0).unwrap();
        let tr = evolve_two_state(&sys, 50.0, 100, Initial::Right).unwrap();
        assert!(tr.p_left.iter().all(|p| *p == 0.0));
        assert!(matches!(
            max_transfer_probability(0.0, 0.0),
            Err(Error::Indeterminate(_))
        ));
        assert_eq!(max_transfer_probability(0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn validation() {
        assert!(TwoStateSystem::new(0.0, -1.0, 0.0, 1.0).is_err());
        let sys = TwoStateSystem::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(evolve_two_state(&sys, 1.0, 1, Initial::Right).is_err());
        assert!(invert_detuned_splitting(1.0, 2.0).is_err());
        assert!((invert_detuned_splitting(5.0, 3.0).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn epsilon_scan_is_lorentzian() {
        let model = PotentialModel::piecewise(3.0, 3.0, Units::natural()).unwrap();
        let opts = ScanOptions {
            formal: true,
            ..ScanOptions::default()
        };
        let reference = splitting_regularized_form(&model, 0, SplitOptions { formal: true })
            .unwrap()
            .splitting;
        let w = reference;
        let values = linspace(-5.0 * w, 5.0 * w, 2001);
        let curve = resonance_scan(&model, ScanAxis::Epsilon, &values, 0, opts).unwrap();
        let fwhm = full_width_half_max(&curve).unwrap();
        assert!((fwhm / (2.0 * w) - 1.0).abs() < 1e-4, "{fwhm}");
        let peaks = find_peaks(&curve, 0.5);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].0.abs() < 1e-12 && (peaks[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tilt_scan_peaks_near_multiples_of_quantum_over_width() {
        let model = PotentialModel::piecewise(3.0, 3.0, Units::natural()).unwrap();
        let opts = ScanOptions {
            formal: true,
            ..ScanOptions::default()
        };
        let spacing = 1.0 / 6.0;
        let coarse =
            resonance_scan(&model, ScanAxis::Tilt, &linspace(-0.05, 0.05, 201), 0, opts).unwrap();
        assert!(coarse.iter().any(|p| p.status == ScanStatus::OffResonance));
        let peaks = find_peaks(&coarse, 0.5);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].0.abs() < 1e-12 && (peaks[0].1 - 1.0).abs() < 1e-12);
        // the next resonance is narrow; scan finely around the expected spot
        let fine = linspace(0.9 * spacing, 1.1 * spacing, 4001);
        let curve = resonance_scan(&model, ScanAxis::Tilt, &fine, 0, opts).unwrap();
        let peaks = find_peaks(&curve, 0.5);
        assert_eq!(peaks.len(), 1, "{peaks:?}");
        assert!((peaks[0].0 / spacing - 1.0).abs() < 0.05);
        assert_eq!(curve.iter().find(|p| p.x == peaks[0].0).unwrap().n, Some(1));
    }
}
