//! Exact levels of the piecewise-quadratic double well.
//!
//! Each branch of `V_D` is a shifted harmonic well, so the normalizable
//! solutions are parabolic cylinder functions and the eigenvalue condition is
//! continuity of the logarithmic derivative at the kink:
//!
//! `F(nu) = D_nu(z_a) D'_{nu+n+eps}(z_b) + D'_nu(z_a) D_{nu+n+eps}(z_b) = 0`,
//! `z_a = -sqrt(2) alpha / l_ho`, `z_b = -sqrt(2) beta / l_ho`.
//!
//! For wide wells the two roots near `nu = l` follow from the quadratic
//! `d^2 + (r(R-L) + eps) d - R L - eps r L = 0`.

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::logspace::LogValue;
use crate::pcf::{pcf_d, pcf_d_deriv};
use crate::potential::{PotentialModel, Units};
use crate::special::ln_factorial;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Half-width of the bracketing window around `nu = l`.
pub const ROOT_WINDOW: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdParameters {
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
    pub epsilon: f64,
    pub units: Units,
}

impl VdParameters {
    /// `beta` from `(m w^2/2)(beta^2 - alpha^2) = (n + eps) hbar w`.
    pub fn from_alpha(alpha: f64, n: u32, epsilon: f64, units: Units) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        ensure_finite("epsilon", epsilon)?;
        let shift = n as f64 + epsilon;
        if shift < 0.0 {
            return Err(Error::InvalidInput(format!(
                "n + epsilon must be non-negative, got {shift}"
            )));
        }
        let l = units.l_ho();
        let beta = (alpha * alpha + 2.0 * shift * l * l).sqrt();
        Ok(VdParameters {
            alpha,
            beta,
            n,
            epsilon,
            units,
        })
    }

    /// `n` and `epsilon` from the branch positions.
    pub fn from_alpha_beta(alpha: f64, beta: f64, units: Units) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        ensure_positive("beta", beta)?;
        if beta < alpha {
            return Err(Error::InvalidInput(format!(
                "beta must not be smaller than alpha (alpha={alpha}, beta={beta})"
            )));
        }
        let l = units.l_ho();
        let d = (beta * beta - alpha * alpha) / (2.0 * l * l);
        let n = d.round_ties_even();
        Ok(VdParameters {
            alpha,
            beta,
            n: n as u32,
            epsilon: d - n,
            units,
        })
    }

    pub fn model(&self) -> Result<PotentialModel> {
        PotentialModel::piecewise(self.alpha, self.beta, self.units)
    }

    fn arguments(&self) -> (f64, f64) {
        let s = 2f64.sqrt() / self.units.l_ho();
        (-s * self.alpha, -s * self.beta)
    }
}

/// `F(nu)` in sign/log-magnitude form.
pub fn vd_matching_residual(p: &VdParameters, nu: f64) -> Result<LogValue> {
    Ok(residual_with_noise(p, nu)?.0)
}

/// `F(nu)` and an absolute noise level for it.
fn residual_with_noise(p: &VdParameters, nu: f64) -> Result<(LogValue, LogValue)> {
    ensure_finite("nu", nu)?;
    let (za, zb) = p.arguments();
    let nu_b = nu + p.n as f64 + p.epsilon;
    let da = pcf_d(nu, za)?;
    let dpa = pcf_d_deriv(nu, za)?;
    let db = pcf_d(nu_b, zb)?;
    let dpb = pcf_d_deriv(nu_b, zb)?;
    let t1 = da.as_log() * dpb.as_log();
    let t2 = dpa.as_log() * db.as_log();
    let rel = da
        .est_error
        .max(dpa.est_error)
        .max(db.est_error)
        .max(dpb.est_error)
        + 4.0 * f64::EPSILON;
    let noise = t1.abs().add(&t2.abs()).scale(rel);
    Ok((t1.add(&t2), noise))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdLevels {
    pub nu_minus: f64,
    pub nu_plus: f64,
    /// Estimated root uncertainty in `nu` from residual round-off.
    pub resolution: f64,
    /// `(nu_plus - nu_minus) hbar w`
    pub splitting: f64,
}

fn residual_sign(p: &VdParameters, nu: f64) -> Result<f64> {
    Ok(vd_matching_residual(p, nu)?.sign)
}

fn bisect(p: &VdParameters, mut lo: f64, mut hi: f64, mut slo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = residual_sign(p, mid)?;
        if s == 0.0 {
            return Ok(mid);
        }
        if s == slo {
            lo = mid;
            slo = s;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The two roots of `F` flanking level `l`, bisected to machine precision.
pub fn vd_eigenlevels(p: &VdParameters, l: u32) -> Result<VdLevels> {
    let lf = l as f64;
    let lo = lf - ROOT_WINDOW;
    let hi = lf + ROOT_WINDOW;
    let s_lo = residual_sign(p, lo)?;
    let s_hi = residual_sign(p, hi)?;

    // probe the predicted centre first, then fall back to a scan
    let mut probes = Vec::new();
    if let Ok(q) = vd_quadratic_delta(p, l) {
        probes.push(lf + 0.5 * (q.delta_roots.0 + q.delta_roots.1));
    }
    probes.push(lf - 0.5 * p.epsilon);
    probes.push(lf);
    let mut brackets: Option<Vec<(f64, f64, f64)>> = None;
    for c in probes {
        if !(c > lo && c < hi) {
            continue;
        }
        let s_c = residual_sign(p, c)?;
        if s_c != 0.0 && s_c != s_lo && s_c != s_hi {
            brackets = Some(vec![(lo, c, s_lo), (c, hi, s_c)]);
            break;
        }
    }
    if brackets.is_none() {
        let steps = 2000;
        let mut found = Vec::new();
        let mut x0 = lo;
        let mut s0 = s_lo;
        for i in 1..=steps {
            let x1 = lo + (hi - lo) * i as f64 / steps as f64;
            let s1 = residual_sign(p, x1)?;
            if s1 != s0 {
                found.push((x0, x1, s0));
            }
            x0 = x1;
            s0 = s1;
        }
        if found.len() == 2 {
            brackets = Some(found);
        } else {
            return Err(Error::Bracketing(format!(
                "found {} sign change(s) of the matching residual in [{lo}, {hi}]; expected a near-degenerate pair (epsilon = {})",
                found.len(),
                p.epsilon
            )));
        }
    }
    let b = brackets.unwrap();
    let r1 = bisect(p, b[0].0, b[0].1, b[0].2)?;
    let r2 = bisect(p, b[1].0, b[1].1, b[1].2)?;
    let (nu_minus, nu_plus) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    // root noise = residual noise / residual slope, slope from the pair centre
    let gap = nu_plus - nu_minus;
    let (fc, _) = residual_with_noise(p, 0.5 * (nu_minus + nu_plus))?;
    let (_, noise) = residual_with_noise(p, nu_minus)?;
    let resolution = if fc.is_zero() {
        f64::INFINITY
    } else {
        // orders nu and nu + n + eps are only known to their own precision
        let nu_b = nu_minus + p.n as f64 + p.epsilon;
        (noise.ln_abs - fc.ln_abs).exp() * 0.5 * gap
            + 2.0 * f64::EPSILON * (nu_minus.abs() + nu_b.abs())
    };
    if !(resolution < 0.01 * gap) {
        return Err(Error::Numerical(format!(
            "pair splitting {gap:.3e} (in units of hbar w) is below the root resolution {resolution:.1e} of double-precision matching"
        )));
    }
    Ok(VdLevels {
        nu_minus,
        nu_plus,
        resolution,
        splitting: (nu_plus - nu_minus) * p.units.quantum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdSplitting {
    #[serde(rename = "R_l")]
    pub r_l: f64,
    #[serde(rename = "L_l")]
    pub l_l: f64,
    pub ln_r_l: f64,
    pub ln_l_l: f64,
    pub r: f64,
    /// `(d_minus, d_plus)`
    pub delta_roots: (f64, f64),
    pub splitting: f64,
    pub ln_splitting: f64,
}

/// `ln R_l` and `ln L_l`.
pub fn ln_tunneling_factors(p: &VdParameters, l: u32) -> (f64, f64) {
    let lho = p.units.l_ho();
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let ln_r = (2.0 * (p.n + l) as f64 + 1.0) * (2f64.sqrt() * p.beta / lho).ln()
        - half_ln_2pi
        - ln_factorial(l + p.n)
        - (p.beta / lho).powi(2);
    let ln_l = (2.0 * l as f64 + 1.0) * (2f64.sqrt() * p.alpha / lho).ln()
        - half_ln_2pi
        - ln_factorial(l)
        - (p.alpha / lho).powi(2);
    (ln_r, ln_l)
}

/// Roots of the quadratic and `hbar w sqrt(4RL + eps^2 + 2 eps r (R+L) + r^2 (R-L)^2)`.
pub fn vd_quadratic_delta(p: &VdParameters, l: u32) -> Result<VdSplitting> {
    let (ln_r, ln_l) = ln_tunneling_factors(p, l);
    let big_r = LogValue::from_ln(ln_r, 1.0);
    let big_l = LogValue::from_ln(ln_l, 1.0);
    let r = (p.beta - p.alpha) / (p.alpha + p.beta);
    let eps = p.epsilon;

    let r_minus_l = big_r.sub(&big_l);
    let r_plus_l = big_r.add(&big_l);
    let rl = big_r * big_l;
    let disc = rl
        .scale(4.0)
        .add(&LogValue::from_f64(eps * eps))
        .add(&r_plus_l.scale(2.0 * eps * r))
        .add(&(r_minus_l * r_minus_l).scale(r * r));
    if disc.sign < 0.0 {
        return Err(Error::Numerical("negative discriminant".into()));
    }
    let root = disc.sqrt();

    // d^2 + B d + C = 0
    let b = r_minus_l.scale(r).add(&LogValue::from_f64(eps));
    let c = -(rl.add(&big_l.scale(eps * r)));
    let (d_minus, d_plus) = if b.is_zero() {
        let h = root.scale(0.5).value();
        (-h, h)
    } else {
        // q = -(B + sign(B) sqrt(disc)) / 2, roots q and C/q
        let q = -(b.add(&root.scale(b.sign))).scale(0.5);
        let d1 = q.value();
        let d2 = (c * q.recip()).value();
        if d1 < d2 {
            (d1, d2)
        } else {
            (d2, d1)
        }
    };
    let hw = p.units.quantum();
    let ln_splitting = root.ln_abs + hw.ln();
    Ok(VdSplitting {
        r_l: big_r.value(),
        l_l: big_l.value(),
        ln_r_l: ln_r,
        ln_l_l: ln_l,
        r,
        delta_roots: (d_minus, d_plus),
        splitting: ln_splitting.exp(),
        ln_splitting,
    })
}
