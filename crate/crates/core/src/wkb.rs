//! WKB actions, regularized corrections and level-splitting formulas.
//!
//! Two closed forms for the splitting of level `l` are provided:
//!
//! * turning-point form:
//!   `Delta_l = sqrt(g_l g_{l+n}) (hbar w / pi) exp(-int_{-a_l}^{b_l} p/hbar)`
//! * regularized form:
//!   `Delta_l = hbar w sqrt(2) e^{-(I_a+I_b)/hbar} / sqrt(pi (l+n)! l!)
//!    (sqrt(2) a e^{gamma_a}/l_ho)^{l+1/2} (sqrt(2) b e^{gamma_b}/l_ho)^{l+n+1/2}`
//!
//! Both are evaluated through logarithms so that actions of several hundred
//! remain representable.

use crate::error::{ensure_finite, Error, Result};
use crate::potential::{
    classical_turning_points, extract_well_parameters, turning_points, PotentialModel, Units,
    WellParameters, CURVATURE_TOLERANCE,
};
use crate::quad;
use crate::special::ln_factorial;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ACTION_ABS_TOL: f64 = 1e-10;
const GAMMA_TAYLOR_FRACTION: f64 = 1e-4;

/// `ln g_k` with `g_k = sqrt(2 pi)/k! (k+1/2)^{k+1/2} e^{-(k+1/2)}`.
pub fn ln_g_factor(k: u32) -> f64 {
    let h = k as f64 + 0.5;
    0.5 * (2.0 * PI).ln() - ln_factorial(k) + h * h.ln() - h
}

pub fn g_factor(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::InvalidInput(format!(
            "g-factor index must be non-negative, got {k}"
        )));
    }
    Ok(ln_g_factor(k as u32).exp())
}

/// Contribution of a half-interval where `p` vanishes at `turning` like a
/// square root: `int p/hbar` with `y = turning + dir t^2`.
fn half_action(model: &PotentialModel, energy: f64, turning: f64, inner: f64) -> Result<f64> {
    let len = inner - turning;
    if len == 0.0 {
        return Ok(0.0);
    }
    let dir = len.signum();
    let two_m = 2.0 * model.mass;
    let scale = model
        .geometry
        .barrier_height
        .abs()
        .max(energy.abs())
        .max(1e-300);
    // interior check: the radicand must stay positive
    for i in 1..64 {
        let y = turning + len * i as f64 / 64.0;
        if model.value(y) - energy <= 0.0 {
            return Err(Error::NotABarrier(format!(
                "V({y}) <= E = {energy} inside the integration interval"
            )));
        }
    }
    let f = |t: f64| {
        let y = turning + dir * t * t;
        let r = model.value(y) - energy;
        if r <= 0.0 {
            debug_assert!(r > -1e-8 * scale);
            return 0.0;
        }
        2.0 * t * (two_m * r).sqrt()
    };
    let r = quad::integrate(f, 0.0, len.abs().sqrt(), ACTION_ABS_TOL * model.hbar, 1e-13)?;
    Ok(r.value / model.hbar)
}

/// `int_{x1}^{x2} sqrt(2m(V - E))/hbar dy` between two turning points.
pub fn barrier_action(model: &PotentialModel, energy: f64, x1: f64, x2: f64) -> Result<f64> {
    ensure_finite("E", energy)?;
    ensure_finite("x1", x1)?;
    ensure_finite("x2", x2)?;
    if x1 == x2 {
        return Ok(0.0);
    }
    let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let mid = 0.5 * (lo + hi);
    if model.value(mid) <= energy {
        return Err(Error::NotABarrier(format!(
            "V({mid}) <= E = {energy}: no forbidden region"
        )));
    }
    let s = half_action(model, energy, lo, mid)? + half_action(model, energy, hi, mid)?;
    Ok(if x1 < x2 { s } else { -s })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionIntegrals {
    #[serde(rename = "I_a")]
    pub i_a: f64,
    #[serde(rename = "I_b")]
    pub i_b: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

/// `V(x0 + u) - V(x0)` for a minimum at `x0` (linear term dropped).
fn well_difference(c: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for ck in c.iter().skip(2).rev() {
        acc = acc * u + ck;
    }
    acc * u * u
}

/// `(I_a, I_b)`: `int_{-a}^0 sqrt(2m(V - V(-a)))` and `int_0^b sqrt(2m V)`.
pub fn reference_actions(model: &PotentialModel) -> Result<(f64, f64)> {
    let g = &model.geometry;
    let two_m = 2.0 * model.mass;
    let one = |center: f64, width: f64, dir: f64| -> Result<f64> {
        let c = model.taylor_coefficients(center);
        let near = 0.1 * width;
        let base = if dir < 0.0 { 0.0 } else { g.left_min_value };
        let r = quad::integrate(
            |y: f64| {
                // y measured from the minimum toward the barrier
                let dv = if y < near {
                    well_difference(&c, dir * y)
                } else {
                    model.value(center + dir * y) - base
                };
                (two_m * dv.max(0.0)).sqrt()
            },
            0.0,
            width,
            0.0,
            1e-12,
        )?;
        Ok(r.value)
    };
    let i_a = one(-g.a, g.a, 1.0)?;
    let i_b = one(g.b, g.b, -1.0)?;
    // radicand check on a coarse grid
    for i in 1..200 {
        let t = i as f64 / 200.0;
        let ya = -g.a * (1.0 - t);
        let yb = g.b * t;
        let ra = model.value(ya) - g.left_min_value;
        let rb = model.value(yb);
        if ra < -1e-14 || rb < -1e-14 {
            return Err(Error::ModelAssumption(format!(
                "potential dips below a well minimum inside the barrier region (at {ya} or {yb})"
            )));
        }
    }
    Ok((i_a, i_b))
}

fn check_curvatures(model: &PotentialModel) -> Result<()> {
    let g = &model.geometry;
    let mismatch = (g.omega_left / g.omega_right - 1.0).abs();
    if model.is_smooth() && mismatch > CURVATURE_TOLERANCE {
        return Err(Error::ModelAssumption(format!(
            "well curvatures differ by {mismatch:.3e} relative; the 1/y terms do not cancel"
        )));
    }
    Ok(())
}

/// `gamma = int_0^w ( sqrt(m w^2)/sqrt(2 dV(y)) - 1/y ) dy` for one well, with
/// `dV` the rise of `V` from the minimum at distance `y` toward the barrier.
fn gamma_one(model: &PotentialModel, center: f64, width: f64, dir: f64) -> Result<f64> {
    let c = model.taylor_coefficients(center);
    let c2 = c[2];
    if !(c2 > 0.0) {
        return Err(Error::ModelAssumption(
            "well is not quadratic at its minimum".into(),
        ));
    }
    // 1/sqrt(q) - 1 with q = dV/(c2 y^2), written without cancellation
    let integrand = |y: f64| {
        let u = dir * y;
        let dv = if y < 0.1 * width {
            well_difference(&c, u)
        } else {
            let base = model.value(center);
            model.value(center + u) - base
        };
        let q = dv / (c2 * y * y);
        let s = q.sqrt();
        -(q - 1.0) / (s * (1.0 + s)) / y
    };
    // Taylor limit of the integrand: -k/2 + (3k^2/8 - mu/2) y
    let kappa = if c.len() > 3 { dir * c[3] / c2 } else { 0.0 };
    let mu = if c.len() > 4 { c[4] / c2 } else { 0.0 };
    let y0 = GAMMA_TAYLOR_FRACTION * width;
    let head = -0.5 * kappa * y0 + 0.5 * (0.375 * kappa * kappa - 0.5 * mu) * y0 * y0;
    let tail = quad::integrate(integrand, y0, width, 1e-12, 1e-12)?;
    Ok(head + tail.value)
}

/// `(gamma_a, gamma_b)`; exactly zero for the piecewise-quadratic family.
pub fn gamma_corrections(model: &PotentialModel) -> Result<(f64, f64)> {
    if !model.is_smooth() {
        return Ok((0.0, 0.0));
    }
    check_curvatures(model)?;
    let g = &model.geometry;
    let ga = gamma_one(model, -g.a, g.a, 1.0)?;
    let gb = gamma_one(model, g.b, g.b, -1.0)?;
    Ok((ga, gb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingMethod {
    TurningPointForm,
    RegularizedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitOptions {
    /// Apply the formulas to a non-smooth potential anyway.
    pub formal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingComponents {
    pub g_l: f64,
    pub g_l_plus_n: f64,
    /// Present for the regularized form.
    pub actions: Option<ActionIntegrals>,
    /// Dimensionless barrier action, present for the turning-point form.
    pub barrier_action: Option<f64>,
    pub turning_points: Option<(f64, f64)>,
    pub a: f64,
    pub b: f64,
    pub l_ho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingResult {
    pub l: u32,
    pub n: u32,
    pub epsilon: f64,
    pub method: SplittingMethod,
    /// `Delta_l / (2 hbar omega)`
    pub delta_l: f64,
    #[serde(rename = "Delta_l")]
    pub splitting: f64,
    #[serde(rename = "Delta_l_eps")]
    pub splitting_eps: f64,
    /// `ln Delta_l`, useful when `Delta_l` underflows.
    pub ln_splitting: f64,
    pub hbar_omega: f64,
    pub components: SplittingComponents,
}

fn prepare(model: &PotentialModel, opts: SplitOptions) -> Result<WellParameters> {
    if !model.is_smooth() && !opts.formal {
        return Err(Error::ModelAssumption(
            "potential is not differentiable at the barrier top; WKB matching needs a smooth potential (use the formal option to apply the formula anyway)".into(),
        ));
    }
    extract_well_parameters(model)
}

fn finish(
    params: &WellParameters,
    l: u32,
    method: SplittingMethod,
    ln_splitting: f64,
    components: SplittingComponents,
) -> Result<SplittingResult> {
    let hw = params.units.quantum();
    let splitting = ln_splitting.exp();
    if !(splitting > 0.0) || !splitting.is_finite() {
        return Err(Error::Numerical(format!(
            "splitting exp({ln_splitting}) is not representable"
        )));
    }
    let det = splitting_with_detuning(splitting, params.epsilon, &params.units)?;
    Ok(SplittingResult {
        l,
        n: params.n,
        epsilon: params.epsilon,
        method,
        delta_l: splitting / (2.0 * hw),
        splitting,
        splitting_eps: det.splitting_eps,
        ln_splitting,
        hbar_omega: hw,
        components,
    })
}

/// Turning-point form. The left half of the barrier integral uses the left-well
/// level `V(-a) + (l+1/2) hbar w`, which coincides with `E` when `epsilon = 0`.
pub fn splitting_turning_form(
    model: &PotentialModel,
    l: u32,
    opts: SplitOptions,
) -> Result<SplittingResult> {
    let p = prepare(model, opts)?;
    let hw = p.units.quantum();
    turning_points(&p, l)?;
    let e_right = (l as f64 + p.n as f64 + 0.5) * hw;
    let e_left = model.geometry.left_min_value + (l as f64 + 0.5) * hw;
    let (x1, x2) = classical_turning_points(model, e_left, e_right)?;
    let action = if e_left == e_right {
        barrier_action(model, e_right, x1, x2)?
    } else {
        half_action(model, e_left, x1, 0.0)? + half_action(model, e_right, x2, 0.0)?
    };
    let ln_gl = ln_g_factor(l);
    let ln_gln = ln_g_factor(l + p.n);
    let ln_splitting = 0.5 * (ln_gl + ln_gln) + (hw / PI).ln() - action;
    finish(
        &p,
        l,
        SplittingMethod::TurningPointForm,
        ln_splitting,
        SplittingComponents {
            g_l: ln_gl.exp(),
            g_l_plus_n: ln_gln.exp(),
            actions: None,
            barrier_action: Some(action),
            turning_points: Some((x1, x2)),
            a: p.a,
            b: p.b,
            l_ho: p.l_ho(),
        },
    )
}

fn ln_regularized(p: &WellParameters, l: u32, ai: &ActionIntegrals) -> f64 {
    let hw = p.units.quantum();
    let lho = p.l_ho();
    let lf = l as f64;
    let nf = p.n as f64;
    hw.ln() + 0.5 * 2f64.ln()
        - (ai.i_a + ai.i_b) / p.units.hbar
        - 0.5 * (PI.ln() + ln_factorial(l + p.n) + ln_factorial(l))
        + (lf + 0.5) * ((2f64.sqrt() * p.a / lho).ln() + ai.gamma_a)
        + (lf + nf + 0.5) * ((2f64.sqrt() * p.b / lho).ln() + ai.gamma_b)
}

fn action_integrals(model: &PotentialModel) -> Result<ActionIntegrals> {
    let (i_a, i_b) = reference_actions(model)?;
    let (gamma_a, gamma_b) = gamma_corrections(model)?;
    Ok(ActionIntegrals {
        i_a,
        i_b,
        gamma_a,
        gamma_b,
    })
}

/// Regularized form built from the reference actions and gamma corrections.
pub fn splitting_regularized_form(
    model: &PotentialModel,
    l: u32,
    opts: SplitOptions,
) -> Result<SplittingResult> {
    let p = prepare(model, opts)?;
    let ai = action_integrals(model)?;
    let ln_splitting = ln_regularized(&p, l, &ai);
    finish(
        &p,
        l,
        SplittingMethod::RegularizedForm,
        ln_splitting,
        SplittingComponents {
            g_l: ln_g_factor(l).exp(),
            g_l_plus_n: ln_g_factor(l + p.n).exp(),
            actions: Some(ai),
            barrier_action: None,
            turning_points: None,
            a: p.a,
            b: p.b,
            l_ho: p.l_ho(),
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetunedSplitting {
    #[serde(rename = "Delta_l_eps")]
    pub splitting_eps: f64,
    pub delta_minus: f64,
    pub delta_plus: f64,
}

/// `sqrt(Delta^2 + (hbar w eps)^2)` and the roots of `d (d - eps) = (Delta/2 hbar w)^2`.
pub fn splitting_with_detuning(
    splitting: f64,
    epsilon: f64,
    units: &Units,
) -> Result<DetunedSplitting> {
    ensure_finite("Delta_l", splitting)?;
    ensure_finite("epsilon", epsilon)?;
    if splitting < 0.0 {
        return Err(Error::InvalidInput(format!(
            "splitting must be non-negative, got {splitting}"
        )));
    }
    let hw = units.quantum();
    let q = splitting / (2.0 * hw);
    let disc = (0.5 * epsilon).hypot(q);
    // the root of smaller magnitude from the product -q^2
    let (delta_minus, delta_plus) = if epsilon >= 0.0 {
        let plus = 0.5 * epsilon + disc;
        let minus = if plus == 0.0 { 0.0 } else { -q * q / plus };
        (minus, plus)
    } else {
        let minus = 0.5 * epsilon - disc;
        (minus, -q * q / minus)
    };
    Ok(DetunedSplitting {
        splitting_eps: splitting.hypot(hw * epsilon),
        delta_minus,
        delta_plus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassRatio {
    pub l: u32,
    /// `Delta_{2l} / Delta_0` from two regularized-form evaluations.
    pub direct: f64,
    /// `(2ab e^{gamma_a+gamma_b}/l_ho^2)^{2l} / (2l)!`
    pub closed_form: f64,
}

pub fn weierstrass_ratio(
    model: &PotentialModel,
    l: u32,
    opts: SplitOptions,
) -> Result<WeierstrassRatio> {
    let p = prepare(model, opts)?;
    if p.n != 0 {
        return Err(Error::Precondition(format!(
            "the ratio is defined for aligned wells (n = 0), got n = {}",
            p.n
        )));
    }
    let d0 = splitting_regularized_form(model, 0, opts)?;
    let d2l = splitting_regularized_form(model, 2 * l, opts)?;
    let direct = (d2l.ln_splitting - d0.ln_splitting).exp();
    let (ga, gb) = gamma_corrections(model)?;
    let lho = p.l_ho();
    let ln_base = (2.0 * p.a * p.b / (lho * lho)).ln() + ga + gb;
    let closed_form = (2.0 * l as f64 * ln_base - ln_factorial(2 * l)).exp();
    Ok(WeierstrassRatio {
        l,
        direct,
        closed_form,
    })
}
