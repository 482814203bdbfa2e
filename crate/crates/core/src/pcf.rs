//! Parabolic cylinder functions `D_nu(z)` for real order and argument.
//!
//! Three evaluation routes are used:
//!
//! * **Series**: the even/odd Kummer-series split about `z = 0`,
//!   `D_nu(z) = e^{-z^2/4} [c_e M(-nu/2, 1/2, z^2/2) + c_o z M((1-nu)/2, 3/2, z^2/2)]`.
//!   For `z <= 0` the two parts add; for large positive `z` they cancel, so
//!   the series is only used up to `z = 3` on the positive side.
//! * **Integral**: for `z > 3`, the Laplace-type integral for negative order
//!   followed by the forward three-term recurrence in the order, which is
//!   stable in the increasing-order direction for positive argument.
//! * **Asymptotic**: the large-`|z|` expansion with both exponential branches,
//!   optimally truncated, used beyond the switchover radius whenever its
//!   truncation error is negligible.
//!
//! Values are carried in log space so that `D_nu(60) ~ e^{-900}` is still
//! representable through [`PcfValue::ln_abs`].

use crate::error::{Error, Result};
use crate::logspace::LogValue;
use crate::quad;
use crate::special::{cos_pi, rgamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest `|nu|` with advertised accuracy.
pub const MAX_ORDER: f64 = 40.0;
/// Largest `|z|` with advertised accuracy.
pub const MAX_ARGUMENT: f64 = 60.0;

const POSITIVE_SERIES_LIMIT: f64 = 3.0;
const ASYMPTOTIC_ACCEPT: f64 = 1e-13;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcfRegime {
    Series,
    Integral,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcfValue {
    /// Materialized value (may underflow to 0 or overflow to infinity).
    pub value: f64,
    pub ln_abs: f64,
    pub sign: f64,
    pub regime: PcfRegime,
    /// Relative error estimate.
    pub est_error: f64,
}

impl PcfValue {
    fn from_log(v: LogValue, regime: PcfRegime, est_error: f64) -> Self {
        PcfValue {
            value: v.value(),
            ln_abs: v.ln_abs,
            sign: v.sign,
            regime,
            est_error,
        }
    }

    pub fn as_log(&self) -> LogValue {
        LogValue::from_ln(self.ln_abs, self.sign)
    }
}

/// Radius beyond which the asymptotic expansion is considered.
pub fn switchover_radius(nu: f64) -> f64 {
    (2.0 * nu.abs().sqrt() + 4.0).max(8.0)
}

fn check_domain(nu: f64, z: f64) -> Result<()> {
    if !nu.is_finite() || !z.is_finite() {
        return Err(Error::InvalidInput(format!(
            "order and argument must be finite (nu={nu}, z={z})"
        )));
    }
    if nu.abs() > MAX_ORDER || z.abs() > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "D_nu(z) supported for |nu| <= {MAX_ORDER}, |z| <= {MAX_ARGUMENT}; got nu={nu}, z={z}"
        )));
    }
    Ok(())
}

/// `D_nu(z)`.
pub fn pcf_d(nu: f64, z: f64) -> Result<PcfValue> {
    check_domain(nu, z)?;
    eval(nu, z)
}

fn eval(nu: f64, z: f64) -> Result<PcfValue> {
    if z.abs() >= switchover_radius(nu) {
        let v = asymptotic(nu, z);
        if v.est_error <= ASYMPTOTIC_ACCEPT {
            return Ok(v);
        }
    }
    if z <= POSITIVE_SERIES_LIMIT {
        series(nu, z)
    } else {
        integral(nu, z)
    }
}

/// `dD_nu/dz` via `D'_nu(z) = -(z/2) D_nu(z) + nu D_{nu-1}(z)`.
pub fn pcf_d_deriv(nu: f64, z: f64) -> Result<PcfValue> {
    check_domain(nu, z)?;
    let d = eval(nu, z)?;
    let a = d.as_log().scale(-0.5 * z);
    if nu == 0.0 {
        return Ok(PcfValue::from_log(a, d.regime, d.est_error));
    }
    let dm = eval(nu - 1.0, z)?;
    let b = dm.as_log().scale(nu);
    let sum = a.add(&b);
    let est = combine_error(&[(a, d.est_error), (b, dm.est_error)], sum);
    Ok(PcfValue::from_log(sum, d.regime, est))
}

/// Two-branch large-`|z|` expansion; rejects arguments inside the switchover radius.
pub fn pcf_d_asymptotic(nu: f64, z: f64) -> Result<PcfValue> {
    check_domain(nu, z)?;
    let radius = switchover_radius(nu);
    if z.abs() < radius {
        return Err(Error::Domain(format!(
            "asymptotic expansion requires |z| >= {radius} for nu={nu}; got z={z}"
        )));
    }
    Ok(asymptotic(nu, z))
}

/// Kummer-series evaluation regardless of the argument (no cancellation control
/// for large positive `z`). Exposed for cross-validation.
pub fn pcf_d_series(nu: f64, z: f64) -> Result<PcfValue> {
    check_domain(nu, z)?;
    series(nu, z)
}

/// Integral-plus-recurrence evaluation; requires `z > 0`. Exposed for
/// cross-validation.
pub fn pcf_d_integral(nu: f64, z: f64) -> Result<PcfValue> {
    check_domain(nu, z)?;
    if z <= 0.0 {
        return Err(Error::Domain(format!(
            "integral representation requires z > 0, got {z}"
        )));
    }
    integral(nu, z)
}

fn combine_error(parts: &[(LogValue, f64)], total: LogValue) -> f64 {
    if total.is_zero() {
        return 1.0;
    }
    let mut e = 0.0;
    for (v, err) in parts {
        if !v.is_zero() {
            let w = (v.ln_abs - total.ln_abs).exp();
            e += w * (err + 2.0 * f64::EPSILON);
        }
    }
    e
}

struct ScaledSum {
    sum: LogValue,
    /// sum |terms| / |sum|
    condition: f64,
}

/// `M(a, b, x)` for `a + k = (m0 + 2k - frac) / 2`, summed with Kahan
/// compensation and periodic rescaling.
fn kummer(m0: f64, frac: f64, b: f64, x: f64) -> Result<ScaledSum> {
    const BIG: f64 = 1e250;
    let ln_big = BIG.ln();
    let mut scale_ln = 0.0;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut term = 1.0f64;
    let max_iter = (x + 60.0 * x.sqrt() + 500.0) as usize;
    let mut k = 0usize;
    loop {
        // Kahan
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        abs_sum += term.abs();

        let a_k = 0.5 * ((m0 + 2.0 * k as f64) - frac);
        term *= a_k * x / ((b + k as f64) * (k as f64 + 1.0));
        k += 1;
        if term == 0.0 {
            break;
        }
        if k as f64 > x && term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        if k > max_iter {
            return Err(Error::Numerical(format!(
                "Kummer series did not converge (a0={}, b={b}, x={x})",
                0.5 * (m0 - frac)
            )));
        }
        if term.abs() > BIG || sum.abs() > BIG {
            term /= BIG;
            sum /= BIG;
            comp /= BIG;
            abs_sum /= BIG;
            scale_ln += ln_big;
        }
    }
    let mut s = LogValue::from_f64(sum);
    if !s.is_zero() {
        s.ln_abs += scale_ln;
    }
    let condition = if sum == 0.0 {
        f64::INFINITY
    } else {
        abs_sum / sum.abs()
    };
    Ok(ScaledSum { sum: s, condition })
}

fn series(nu: f64, z: f64) -> Result<PcfValue> {
    let m = nu.round();
    let f = nu - m;
    let x = 0.5 * z * z;
    let c_e = PI.sqrt() * (0.5 * nu * 2f64.ln()).exp() * rgamma(0.5 * ((1.0 - m) - f));
    let c_o = -PI.sqrt() * (0.5 * (nu + 1.0) * 2f64.ln()).exp() * rgamma(0.5 * (-m - f));

    let mut parts = Vec::with_capacity(2);
    if c_e != 0.0 {
        let me = kummer(-m, f, 0.5, x)?;
        parts.push((me.sum.scale(c_e), me.condition));
    }
    if c_o != 0.0 && z != 0.0 {
        let mo = kummer(1.0 - m, f, 1.5, x)?;
        parts.push((mo.sum.scale(c_o * z), mo.condition));
    }
    let mut total = LogValue::ZERO;
    for (p, _) in &parts {
        total = total.add(p);
    }
    let mut est = 4e-16;
    if total.is_zero() {
        est = 1.0;
    } else {
        for (p, cond) in &parts {
            let w = (p.ln_abs - total.ln_abs).exp();
            est += 4.0 * f64::EPSILON * w * cond.min(1e300);
        }
    }
    if !total.is_zero() {
        total.ln_abs -= 0.25 * z * z;
    }
    Ok(PcfValue::from_log(total, PcfRegime::Series, est))
}

/// `int_0^inf t^p exp(-t^2/2 - z t) dt` for `p >= 0`, `z > 0`.
fn laplace_moment(p: f64, z: f64) -> Result<(f64, f64)> {
    let ln_g = |t: f64| {
        if t == 0.0 {
            if p == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            p * t.ln() - 0.5 * t * t - z * t
        }
    };
    let peak = if p > 0.0 {
        0.5 * (-z + (z * z + 4.0 * p).sqrt())
    } else {
        0.0
    };
    let ln_peak = ln_g(peak);
    let mut upper = peak + 1.0 / z;
    while ln_g(upper) > ln_peak - 60.0 {
        upper *= 2.0;
    }
    // normalise by the peak to keep the integrand O(1)
    let g = |t: f64| (ln_g(t) - ln_peak).exp();
    let mut value = 0.0;
    let mut err = 0.0;
    let pieces: Vec<(f64, f64)> = if peak > 0.0 {
        vec![(0.0, peak), (peak, upper)]
    } else {
        vec![(0.0, upper)]
    };
    for (a, b) in pieces {
        let r = quad::integrate(g, a, b, 0.0, 1e-14)?;
        value += r.value;
        err += r.abs_error;
    }
    Ok((value * ln_peak.exp(), (err / value).abs()))
}

fn integral(nu: f64, z: f64) -> Result<PcfValue> {
    // e^{z^2/4} D_mu(z) = int_0^inf t^{-mu-1} e^{-t^2/2 - z t} dt / Gamma(-mu), mu <= -1
    let scaled = |mu: f64| -> Result<(f64, f64)> {
        let (j, e) = laplace_moment(-mu - 1.0, z)?;
        Ok((j * rgamma(-mu), e))
    };
    let (value, err) = if nu <= -1.0 {
        scaled(nu)?
    } else {
        let steps = nu.floor() + 2.0;
        let nu0 = nu - steps;
        let (mut prev, e1) = scaled(nu0 - 1.0)?;
        let (mut cur, e2) = scaled(nu0)?;
        let n = steps as usize;
        for j in 0..n {
            let mu = nu0 + j as f64;
            let next = z * cur - mu * prev;
            prev = cur;
            cur = next;
        }
        (cur, e1.max(e2) + 1e-15 * (n as f64 + 1.0))
    };
    let mut v = LogValue::from_f64(value);
    if !v.is_zero() {
        v.ln_abs -= 0.25 * z * z;
    }
    Ok(PcfValue::from_log(v, PcfRegime::Integral, err + 4e-16))
}

/// Optimally truncated asymptotic sum with term ratio `ratio(s) = T_{s+1}/T_s`.
fn truncated_sum(ratio: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut sum = 1.0;
    let mut term = 1.0f64;
    let mut s = 0.0;
    loop {
        let next = term * ratio(s);
        if next == 0.0 {
            return (sum, 0.0);
        }
        if next.abs() >= term.abs() || s > 500.0 {
            return (sum, next.abs() / sum.abs());
        }
        sum += next;
        term = next;
        s += 1.0;
        if term.abs() < 1e-18 * sum.abs() {
            return (sum, term.abs() / sum.abs());
        }
    }
}

fn asymptotic(nu: f64, z: f64) -> PcfValue {
    let x = z.abs();
    let two_x2 = 2.0 * x * x;
    let (sum_a, err_a) =
        truncated_sum(|s| -((-nu + 2.0 * s) * (-nu + 2.0 * s + 1.0)) / ((s + 1.0) * two_x2));
    let ln_x = x.ln();
    let recessive = LogValue::from_ln(-0.25 * x * x + nu * ln_x, 1.0).scale(sum_a);
    if z > 0.0 {
        return PcfValue::from_log(recessive, PcfRegime::Asymptotic, err_a + 4e-16);
    }
    // z < 0: D_nu(-x) ~ cos(pi nu) e^{-x^2/4} x^nu A + sqrt(2 pi)/Gamma(-nu) e^{x^2/4} x^{-nu-1} B
    let b1 = recessive.scale(cos_pi(nu));
    let rg = rgamma(-nu);
    let b2 = if rg == 0.0 {
        LogValue::ZERO
    } else {
        let (sum_b, err_b) =
            truncated_sum(|s| ((nu + 1.0 + 2.0 * s) * (nu + 2.0 + 2.0 * s)) / ((s + 1.0) * two_x2));
        let v = LogValue::from_ln(LN_SQRT_2PI + 0.25 * x * x - (nu + 1.0) * ln_x, 1.0)
            .scale(rg * sum_b);
        return {
            let total = b1.add(&v);
            let est = combine_error(&[(b1, err_a), (v, err_b)], total);
            PcfValue::from_log(total, PcfRegime::Asymptotic, est)
        };
    };
    let total = b1.add(&b2);
    let est = combine_error(&[(b1, err_a)], total);
    PcfValue::from_log(total, PcfRegime::Asymptotic, est)
}
