use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::potential::{classical_turning_points, PotentialModel, Units};
use crate::quad;
use crate::special::harmonic_eigenfunction;

use super::SpectrumResult;

/// Right- and left-localized combinations of a doublet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizedStates {
    #[serde(skip)]
    pub x_min: f64,
    #[serde(skip)]
    pub dx: f64,
    #[serde(skip)]
    pub psi_r: Vec<f64>,
    #[serde(skip)]
    pub psi_l: Vec<f64>,
    /// `+1` or `-1` in `psi_R = (psi_+ + sigma psi_-)/sqrt 2`.
    pub sigma: f64,
    /// `int_0^inf psi_R^2`
    pub right_mass: f64,
    /// `int_-inf^0 psi_L^2`
    pub left_mass: f64,
    /// `int_0^inf psi_L psi_R`
    pub overlap: f64,
    /// `(psi_R(0), psi_R'(0), psi_L(0), psi_L'(0))`
    pub value_and_slope_at_0: (f64, f64, f64, f64),
}

impl LocalizedStates {
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }
}

/// `sum f_i g_i dx` over `x > 0`, with half weight on a node at `x = 0`.
fn half_line(x_min: f64, dx: f64, f: &[f64], g: &[f64], right: bool) -> f64 {
    let tol = 1e-9 * dx;
    f.iter()
        .zip(g)
        .enumerate()
        .map(|(i, (a, b))| {
            let x = x_min + i as f64 * dx;
            let w = if x.abs() <= tol {
                0.5
            } else if (x > 0.0) == right {
                1.0
            } else {
                0.0
            };
            w * a * b
        })
        .sum::<f64>()
        * dx
}

/// Value and slope at `x` from the five-point Lagrange interpolant around the
/// nearest node (fourth order in `dx` for the slope).
pub fn interpolate_at(psi: &[f64], x_min: f64, dx: f64, x: f64) -> Result<(f64, f64)> {
    ensure_finite("x", x)?;
    let n = psi.len();
    let i0 = ((x - x_min) / dx).round();
    if n < 5 || i0 < 2.0 || i0 > (n - 3) as f64 {
        return Err(Error::InvalidInput(format!(
            "x = {x} is too close to the grid edge for the stencil"
        )));
    }
    let i0 = i0 as usize;
    let t = (x - (x_min + i0 as f64 * dx)) / dx;
    let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut value = 0.0;
    let mut slope = 0.0;
    for (j, &tj) in nodes.iter().enumerate() {
        let mut denom = 1.0;
        for (m, &tm) in nodes.iter().enumerate() {
            if m != j {
                denom *= tj - tm;
            }
        }
        let mut basis = 1.0;
        let mut dbasis = 0.0;
        for (m, &tm) in nodes.iter().enumerate() {
            if m == j {
                continue;
            }
            dbasis = dbasis * (t - tm) + basis;
            basis *= t - tm;
        }
        let y = psi[i0 + j - 2];
        value += y * basis / denom;
        slope += y * dbasis / denom;
    }
    Ok((value, slope / dx))
}

/// Split the doublet of level `l` into states localized in each well.
pub fn localized_states(spec: &SpectrumResult, l: u32) -> Result<LocalizedStates> {
    let &(lo, hi) = spec
        .pairs
        .get(&l)
        .ok_or_else(|| Error::Pairing(format!("no doublet assigned for level {l}")))?;
    let plus = &spec.eigenvectors[lo];
    let minus = &spec.eigenvectors[hi];
    let combine = |sigma: f64, s: f64| -> Vec<f64> {
        plus.iter()
            .zip(minus)
            .map(|(p, m)| (p + s * sigma * m) * std::f64::consts::FRAC_1_SQRT_2)
            .collect()
    };
    let (x_min, dx) = (spec.x_min, spec.dx);
    let mass_right = |sigma: f64| {
        let r = combine(sigma, 1.0);
        half_line(x_min, dx, &r, &r, true)
    };
    let (m_plus, m_minus) = (mass_right(1.0), mass_right(-1.0));
    let sigma = if m_plus >= m_minus { 1.0 } else { -1.0 };
    let right_mass = m_plus.max(m_minus);
    if right_mass <= 0.9 {
        return Err(Error::Pairing(format!(
            "neither combination of level {l} localizes (right mass {right_mass:.4})"
        )));
    }
    let psi_r = combine(sigma, 1.0);
    let psi_l = combine(sigma, -1.0);
    let left_mass = half_line(x_min, dx, &psi_l, &psi_l, false);
    let overlap = half_line(x_min, dx, &psi_l, &psi_r, true);
    let (r0, r1) = interpolate_at(&psi_r, x_min, dx, 0.0)?;
    let (l0, l1) = interpolate_at(&psi_l, x_min, dx, 0.0)?;
    Ok(LocalizedStates {
        x_min,
        dx,
        psi_r,
        psi_l,
        sigma,
        right_mass,
        left_mass,
        overlap,
        value_and_slope_at_0: (r0, r1, l0, l1),
    })
}

/// `(hbar^2/m) |psi_L(0) psi_R'(0) - psi_R(0) psi_L'(0)|`
pub fn wronskian_splitting(states: &LocalizedStates, units: &Units) -> f64 {
    let (r0, r1, l0, l1) = states.value_and_slope_at_0;
    units.hbar * units.hbar / units.mass * (l0 * r1 - r0 * l1).abs()
}

/// Strict sign changes of `psi` on `interval`, skipping values below
/// `1e-12 max|psi|`.
pub fn node_count(psi: &[f64], x_min: f64, dx: f64, interval: (f64, f64)) -> Result<usize> {
    let (x1, x2) = interval;
    let x_max = x_min + (psi.len().max(1) - 1) as f64 * dx;
    let slack = 1e-9 * dx;
    if !(x1 <= x2 && x1 >= x_min - slack && x2 <= x_max + slack) {
        return Err(Error::InvalidInput(format!(
            "interval [{x1}, {x2}] is not inside the grid [{x_min}, {x_max}]"
        )));
    }
    let floor = 1e-12 * psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let first = ((x1 - x_min) / dx).ceil().max(0.0) as usize;
    let last = (((x2 - x_min) / dx).floor() as usize).min(psi.len() - 1);
    let mut count = 0;
    let mut previous: Option<bool> = None;
    for &v in &psi[first..=last] {
        if v.abs() <= floor {
            continue;
        }
        let positive = v > 0.0;
        if previous.is_some_and(|p| p != positive) {
            count += 1;
        }
        previous = Some(positive);
    }
    Ok(count)
}

/// Amplitudes of the forbidden-region WKB forms fitted to the localized states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForbiddenAmplitudes {
    pub n_r: f64,
    pub n_l: f64,
    /// `2 (hbar/m) |N_L N_R|`
    pub splitting: f64,
    /// Half-width of the fitted window around `x = 0`.
    pub half_width: f64,
}

/// Least-squares fit of `psi_R ~ N_R p^{-1/2} exp(+int_0^x p/hbar)` and
/// `psi_L ~ N_L p^{-1/2} exp(-int_0^x p/hbar)` over the central half of the
/// forbidden region at `energy`.
pub fn fit_forbidden_amplitudes(
    model: &PotentialModel,
    states: &LocalizedStates,
    energy: f64,
) -> Result<ForbiddenAmplitudes> {
    let (x1, x2) = classical_turning_points(model, energy, energy)?;
    let half_width = 0.5 * x1.abs().min(x2);
    let hbar = model.hbar;
    let p = |x: f64| {
        (2.0 * model.mass * (model.value(x) - energy))
            .max(0.0)
            .sqrt()
    };
    let (mut rr, mut ff_r, mut ll, mut ff_l) = (0.0, 0.0, 0.0, 0.0);
    for (i, (&r, &lv)) in states.psi_r.iter().zip(&states.psi_l).enumerate() {
        let x = states.x(i);
        if x.abs() > half_width {
            continue;
        }
        let action = if x == 0.0 {
            0.0
        } else {
            quad::integrate(p, 0.0, x, 0.0, 1e-12)?.value / hbar
        };
        let amp = p(x).sqrt().recip();
        let f_r = amp * action.exp();
        let f_l = amp * (-action).exp();
        rr += r * f_r;
        ff_r += f_r * f_r;
        ll += lv * f_l;
        ff_l += f_l * f_l;
    }
    if ff_r == 0.0 || ff_l == 0.0 {
        return Err(Error::Numerical(
            "forbidden-region fit window holds no grid points".into(),
        ));
    }
    let n_r = rr / ff_r;
    let n_l = ll / ff_l;
    Ok(ForbiddenAmplitudes {
        n_r,
        n_l,
        splitting: 2.0 * hbar / model.mass * (n_l * n_r).abs(),
        half_width,
    })
}

/// `|<psi_R|phi_k>|` with `phi_k` the `k`-th oscillator state centered at `b`.
pub fn harmonic_tail_overlap(model: &PotentialModel, states: &LocalizedStates, k: u32) -> f64 {
    let lho = model.units().l_ho();
    let b = model.geometry.b;
    states
        .psi_r
        .iter()
        .enumerate()
        .map(|(i, v)| v * harmonic_eigenfunction(k, b, lho, states.x(i)))
        .sum::<f64>()
        .abs()
        * states.dx
}
