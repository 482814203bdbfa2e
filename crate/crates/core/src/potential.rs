//! Double-well potential models, unit conventions and well geometry.
//!
//! Every model is presented in a normalized frame: the interior maximum sits
//! at `x = 0`, the lower-lying well (up to an integer number of quanta) is on
//! the right at `x = b`, and energies are shifted so that `V(b) = 0`.

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use serde::{Deserialize, Serialize};

/// Curvature mismatch tolerated between the two minima of a smooth model.
pub const CURVATURE_TOLERANCE: f64 = 1e-3;
/// Largest accepted `|epsilon|`.
pub const EPSILON_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
}

impl Units {
    pub fn new(hbar: f64, mass: f64, omega: f64) -> Result<Self> {
        ensure_positive("hbar", hbar)?;
        ensure_positive("mass", mass)?;
        ensure_positive("omega", omega)?;
        let u = Units { hbar, mass, omega };
        let l = u.l_ho();
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidInput(format!(
                "oscillator length is not finite and positive: {l}"
            )));
        }
        Ok(u)
    }

    pub fn natural() -> Self {
        Units {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
        }
    }

    /// `sqrt(hbar / (m omega))`
    pub fn l_ho(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }

    /// `hbar omega`
    pub fn quantum(&self) -> f64 {
        self.hbar * self.omega
    }
}

fn default_one() -> f64 {
    1.0
}

/// Potential family; parameters are in raw (unshifted) coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialKind {
    /// `(m w^2/2)(x - beta)^2` for `x >= 0`, `(m w^2/2)((x + alpha)^2 + beta^2 - alpha^2)` for `x < 0`.
    PiecewiseQuadratic {
        alpha: f64,
        beta: f64,
        #[serde(default = "default_one")]
        omega: f64,
    },
    /// `lambda (x^2 - eta^2)^2 + s x`
    QuarticTilt {
        lambda: f64,
        eta: f64,
        #[serde(default)]
        s: f64,
    },
    /// `sum_k c_k x^k`, ascending powers.
    Polynomial { coefficients: Vec<f64> },
}

impl PotentialKind {
    fn validate(&self) -> Result<()> {
        match self {
            PotentialKind::PiecewiseQuadratic { alpha, beta, omega } => {
                ensure_positive("alpha", *alpha)?;
                ensure_positive("beta", *beta)?;
                ensure_positive("omega", *omega)?;
                if beta < alpha {
                    return Err(Error::InvalidInput(format!(
                        "piecewise quadratic requires beta >= alpha (got alpha={alpha}, beta={beta})"
                    )));
                }
            }
            PotentialKind::QuarticTilt { lambda, eta, s } => {
                ensure_positive("lambda", *lambda)?;
                ensure_positive("eta", *eta)?;
                ensure_finite("s", *s)?;
            }
            PotentialKind::Polynomial { coefficients } => {
                if coefficients.len() < 4 {
                    return Err(Error::InvalidInput(
                        "a double-well polynomial needs degree >= 3".into(),
                    ));
                }
                for c in coefficients {
                    ensure_finite("polynomial coefficient", *c)?;
                }
                if *coefficients.last().unwrap() == 0.0 {
                    return Err(Error::InvalidInput(
                        "leading polynomial coefficient must be non-zero".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, PotentialKind::PiecewiseQuadratic { .. })
    }
}

/// Cached extrema in the normalized frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub a: f64,
    pub b: f64,
    /// `V(-a)`; `V(b) = 0` by construction.
    pub left_min_value: f64,
    /// `V(0)`
    pub barrier_height: f64,
    pub omega_left: f64,
    pub omega_right: f64,
    /// Raw coordinate of the maximum.
    pub origin: f64,
    /// `+1` when the raw right well is the model right well, `-1` when mirrored.
    pub orientation: f64,
    /// Raw value subtracted to put the right minimum at zero energy.
    pub energy_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    pub kind: PotentialKind,
    pub hbar: f64,
    pub mass: f64,
    /// Extra linear term in raw coordinates.
    pub tilt: f64,
    pub geometry: Geometry,
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| k as f64 * v)
        .collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

impl PotentialModel {
    pub fn new(kind: PotentialKind, hbar: f64, mass: f64) -> Result<Self> {
        Self::with_tilt(kind, hbar, mass, 0.0)
    }

    fn with_tilt(kind: PotentialKind, hbar: f64, mass: f64, tilt: f64) -> Result<Self> {
        ensure_positive("hbar", hbar)?;
        ensure_positive("mass", mass)?;
        ensure_finite("tilt", tilt)?;
        kind.validate()?;
        let mut model = PotentialModel {
            kind,
            hbar,
            mass,
            tilt,
            geometry: Geometry {
                a: 0.0,
                b: 0.0,
                left_min_value: 0.0,
                barrier_height: 0.0,
                omega_left: 0.0,
                omega_right: 0.0,
                origin: 0.0,
                orientation: 1.0,
                energy_offset: 0.0,
            },
        };
        model.geometry = model.locate()?;
        Ok(model)
    }

    pub fn piecewise(alpha: f64, beta: f64, units: Units) -> Result<Self> {
        Self::new(
            PotentialKind::PiecewiseQuadratic {
                alpha,
                beta,
                omega: units.omega,
            },
            units.hbar,
            units.mass,
        )
    }

    pub fn quartic(lambda: f64, eta: f64, s: f64, hbar: f64, mass: f64) -> Result<Self> {
        Self::new(PotentialKind::QuarticTilt { lambda, eta, s }, hbar, mass)
    }

    pub fn is_smooth(&self) -> bool {
        self.kind.is_smooth()
    }

    /// Units with `omega` taken from the right-well curvature.
    pub fn units(&self) -> Units {
        Units {
            hbar: self.hbar,
            mass: self.mass,
            omega: self.geometry.omega_right,
        }
    }

    /// `k`-th derivative of the raw potential (including the extra tilt).
    fn raw_derivative(&self, x: f64, k: usize) -> f64 {
        let t = self.tilt;
        match &self.kind {
            PotentialKind::PiecewiseQuadratic { alpha, beta, omega } => {
                let k2 = 0.5 * self.mass * omega * omega;
                let (shift, offset) = if x >= 0.0 {
                    (-beta, 0.0)
                } else {
                    (*alpha, beta * beta - alpha * alpha)
                };
                let y = x + shift;
                match k {
                    0 => k2 * (y * y + offset) + t * x,
                    1 => 2.0 * k2 * y + t,
                    2 => 2.0 * k2,
                    _ => 0.0,
                }
            }
            PotentialKind::QuarticTilt { lambda, eta, s } => {
                let e2 = eta * eta;
                let st = s + t;
                match k {
                    0 => {
                        let u = x * x - e2;
                        lambda * u * u + st * x
                    }
                    1 => 4.0 * lambda * x * (x * x - e2) + st,
                    2 => lambda * (12.0 * x * x - 4.0 * e2),
                    3 => 24.0 * lambda * x,
                    4 => 24.0 * lambda,
                    _ => 0.0,
                }
            }
            PotentialKind::Polynomial { coefficients } => {
                let mut c = coefficients.clone();
                c[1] += t;
                for _ in 0..k {
                    c = poly_derivative(&c);
                }
                horner(&c, x)
            }
        }
    }

    fn raw(&self, x: f64) -> f64 {
        self.raw_derivative(x, 0)
    }

    fn raw_position(&self, x: f64) -> f64 {
        self.geometry.origin + self.geometry.orientation * x
    }

    /// `V(x)` in the normalized frame; NaN-free for finite `x`.
    pub fn value(&self, x: f64) -> f64 {
        self.raw(self.raw_position(x)) - self.geometry.energy_offset
    }

    /// `d^k V / dx^k` in the normalized frame.
    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        let sign = if k % 2 == 1 {
            self.geometry.orientation
        } else {
            1.0
        };
        if k == 0 {
            return self.value(x);
        }
        sign * self.raw_derivative(self.raw_position(x), k)
    }

    /// Taylor coefficients `V^(k)(x0)/k!` for `k = 1..=degree` (index 0 unused,
    /// set to zero). Differences `V(x0+u) - V(x0)` built from these avoid the
    /// cancellation of evaluating `V` twice.
    pub fn taylor_coefficients(&self, x0: f64) -> Vec<f64> {
        let degree = match &self.kind {
            PotentialKind::PiecewiseQuadratic { .. } => 2,
            PotentialKind::QuarticTilt { .. } => 4,
            PotentialKind::Polynomial { coefficients } => coefficients.len() - 1,
        };
        let mut c = vec![0.0; degree + 1];
        let mut fact = 1.0;
        for (k, ck) in c.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *ck = self.derivative(x0, k) / fact;
        }
        c
    }

    fn raw_critical_points(&self) -> Result<Vec<f64>> {
        let t = self.tilt;
        match &self.kind {
            PotentialKind::PiecewiseQuadratic { alpha, beta, omega } => {
                let k = self.mass * omega * omega;
                let xr = beta - t / k;
                let xl = -alpha - t / k;
                if xr <= 0.0 || xl >= 0.0 {
                    return Err(Error::Shape(format!(
                        "tilt {t} removes a minimum of the piecewise quadratic"
                    )));
                }
                Ok(vec![xl, 0.0, xr])
            }
            PotentialKind::QuarticTilt { lambda, eta, s } => {
                // x^3 - eta^2 x + (s+t)/(4 lambda) = 0
                let p = -eta * eta;
                let q = (s + t) / (4.0 * lambda);
                let disc = 4.0 * p * p * p + 27.0 * q * q;
                if disc >= 0.0 {
                    return Err(Error::Shape(format!(
                        "quartic with tilt {} has a single minimum",
                        s + t
                    )));
                }
                let r = 2.0 * (-p / 3.0).sqrt();
                let phi = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt())
                    .clamp(-1.0, 1.0)
                    .acos()
                    / 3.0;
                let mut roots: Vec<f64> = (0..3)
                    .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
                    .collect();
                for x in roots.iter_mut() {
                    for _ in 0..4 {
                        let d2 = self.raw_derivative(*x, 2);
                        if d2 == 0.0 {
                            break;
                        }
                        let step = self.raw_derivative(*x, 1) / d2;
                        *x -= step;
                    }
                }
                roots.sort_by(|a, b| a.total_cmp(b));
                Ok(roots)
            }
            PotentialKind::Polynomial { coefficients } => {
                let mut c = coefficients.clone();
                c[1] += t;
                let d = poly_derivative(&c);
                let lead = *d.last().unwrap();
                let bound = 1.0
                    + d[..d.len() - 1]
                        .iter()
                        .map(|v| (v / lead).abs())
                        .fold(0.0, f64::max);
                let steps = 20_000;
                let h = 2.0 * bound / steps as f64;
                let f = |x: f64| horner(&d, x);
                let mut roots = Vec::new();
                let mut x0 = -bound;
                let mut f0 = f(x0);
                for i in 1..=steps {
                    let x1 = -bound + i as f64 * h;
                    let f1 = f(x1);
                    if f0 == 0.0 {
                        roots.push(x0);
                    } else if f0 * f1 < 0.0 {
                        let (mut lo, mut hi, mut flo) = (x0, x1, f0);
                        for _ in 0..200 {
                            let mid = 0.5 * (lo + hi);
                            if mid <= lo || mid >= hi {
                                break;
                            }
                            let fm = f(mid);
                            if fm == 0.0 {
                                lo = mid;
                                hi = mid;
                                break;
                            }
                            if (fm < 0.0) == (flo < 0.0) {
                                lo = mid;
                                flo = fm;
                            } else {
                                hi = mid;
                            }
                        }
                        roots.push(0.5 * (lo + hi));
                    }
                    x0 = x1;
                    f0 = f1;
                }
                Ok(roots)
            }
        }
    }

    fn locate(&self) -> Result<Geometry> {
        let crit = self.raw_critical_points()?;
        if crit.len() != 3 {
            return Err(Error::Shape(format!(
                "expected two minima and one maximum, found {} critical points",
                crit.len()
            )));
        }
        let (xl, xm, xr) = (crit[0], crit[1], crit[2]);
        let curv = |x: f64, side: f64| {
            // one-sided second derivative keeps the piecewise kink out of it
            self.raw_derivative(x + side * 1e-300, 2)
        };
        let cl = curv(xl, 0.0);
        let cr = curv(xr, 0.0);
        if self.is_smooth() {
            let cm = self.raw_derivative(xm, 2);
            if !(cl > 0.0 && cr > 0.0 && cm < 0.0) {
                return Err(Error::Shape(
                    "critical points are not ordered minimum, maximum, minimum".into(),
                ));
            }
        }
        let wl = (cl / self.mass).sqrt();
        let wr = (cr / self.mass).sqrt();
        let vl = self.raw(xl);
        let vr = self.raw(xr);
        let quantum = self.hbar * 0.5 * (wl + wr);
        let flip = vl - vr < -0.5 * quantum;
        let (orientation, right, left, omega_left, omega_right) = if flip {
            (-1.0, xl, xr, wr, wl)
        } else {
            (1.0, xr, xl, wl, wr)
        };
        let energy_offset = self.raw(right);
        Ok(Geometry {
            a: (left - xm).abs(),
            b: (right - xm).abs(),
            left_min_value: self.raw(left) - energy_offset,
            barrier_height: self.raw(xm) - energy_offset,
            omega_left,
            omega_right,
            origin: xm,
            orientation,
            energy_offset,
        })
    }

    /// Integer and fractional offset of the left minimum in units of `hbar omega`.
    pub fn well_offset(&self) -> (i64, f64) {
        let d = self.geometry.left_min_value / (self.hbar * self.geometry.omega_right);
        let n = d.round_ties_even();
        (n as i64, d - n)
    }
}

/// `V(x)` in the normalized frame.
pub fn eval_potential(model: &PotentialModel, x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    Ok(model.value(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellParameters {
    pub units: Units,
    pub a: f64,
    pub b: f64,
    pub n: u32,
    pub epsilon: f64,
}

impl WellParameters {
    pub fn l_ho(&self) -> f64 {
        self.units.l_ho()
    }

    /// `hbar omega epsilon`
    pub fn detuning_energy(&self) -> f64 {
        self.units.quantum() * self.epsilon
    }
}

/// Geometry plus `(n, epsilon)` with the regime and single-frequency checks.
pub fn extract_well_parameters(model: &PotentialModel) -> Result<WellParameters> {
    let g = &model.geometry;
    if model.is_smooth() {
        let mismatch = (g.omega_left / g.omega_right - 1.0).abs();
        if mismatch > CURVATURE_TOLERANCE {
            return Err(Error::ModelAssumption(format!(
                "well frequencies differ by {mismatch:.3e} relative (left {}, right {}); the formulas assume a single omega",
                g.omega_left, g.omega_right
            )));
        }
    }
    let (n, epsilon) = model.well_offset();
    if epsilon.abs() > EPSILON_WINDOW {
        return Err(Error::OutOfRegime(format!(
            "detuning epsilon = {epsilon:.6} (n = {n}) exceeds {EPSILON_WINDOW}"
        )));
    }
    Ok(WellParameters {
        units: model.units(),
        a: g.a,
        b: g.b,
        n: n as u32,
        epsilon,
    })
}

/// `V(x) + s x` in the normalized frame, renormalized.
pub fn apply_tilt(model: &PotentialModel, s: f64) -> Result<PotentialModel> {
    ensure_finite("s", s)?;
    if s == 0.0 {
        return Ok(model.clone());
    }
    let raw_tilt = model.tilt + model.geometry.orientation * s;
    PotentialModel::with_tilt(model.kind.clone(), model.hbar, model.mass, raw_tilt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub left: f64,
    pub right: f64,
    pub level_nu: f64,
}

/// Quadratic-well turning points `-a + sqrt(2l+1) l_ho` and `b - sqrt(2l+2n+1) l_ho`.
pub fn turning_points(params: &WellParameters, l: u32) -> Result<TurningPoints> {
    let lho = params.l_ho();
    let nu = l as f64;
    let right = params.b - (2.0 * nu + 2.0 * params.n as f64 + 1.0).sqrt() * lho;
    let left = -params.a + (2.0 * nu + 1.0).sqrt() * lho;
    if !(right > 0.0 && right < params.b) || !(left < 0.0 && left > -params.a) {
        return Err(Error::OutOfRegime(format!(
            "turning points ({left}, {right}) for level {l} fall outside the wells (a={}, b={})",
            params.a, params.b
        )));
    }
    Ok(TurningPoints {
        left,
        right,
        level_nu: nu,
    })
}

fn bisect_monotone(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo < 0.0) == (fhi < 0.0) {
        return Err(Error::Bracketing(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of `V(x) = e_left` on `(-a, 0)` and `V(x) = e_right` on `(0, b)`.
pub fn classical_turning_points(
    model: &PotentialModel,
    e_left: f64,
    e_right: f64,
) -> Result<(f64, f64)> {
    let g = &model.geometry;
    let top = g.barrier_height;
    if e_left >= top || e_right >= top {
        return Err(Error::OutOfRegime(format!(
            "energies ({e_left}, {e_right}) are not below the barrier top {top}"
        )));
    }
    if e_left <= g.left_min_value || e_right <= 0.0 {
        return Err(Error::OutOfRegime(
            "energy lies below a well minimum".into(),
        ));
    }
    let left = bisect_monotone(|x| model.value(x) - e_left, -g.a, 0.0)?;
    let right = bisect_monotone(|x| model.value(x) - e_right, 0.0, g.b)?;
    Ok((left, right))
}

/// Distances from each minimum toward the barrier over which `V` stays within
/// `rel_tol` of its harmonic approximation: `(left, right)`.
pub fn quadratic_extent(model: &PotentialModel, rel_tol: f64) -> (f64, f64) {
    let g = &model.geometry;
    let scan = |center: f64, base: f64, omega: f64, dir: f64, width: f64| {
        let k = 0.5 * model.mass * omega * omega;
        let steps = 2000;
        let mut extent = 0.0;
        for i in 1..=steps {
            let d = width * i as f64 / steps as f64;
            let harm = k * d * d;
            let v = model.value(center + dir * d) - base;
            if (v - harm).abs() > rel_tol * harm {
                break;
            }
            extent = d;
        }
        extent
    };
    (
        scan(-g.a, g.left_min_value, g.omega_left, 1.0, g.a),
        scan(g.b, 0.0, g.omega_right, -1.0, g.b),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pw(alpha: f64, beta: f64) -> PotentialModel {
        PotentialModel::piecewise(alpha, beta, Units::natural()).unwrap()
    }

    #[test]
    fn piecewise_values() {
        let m = pw(2.0, 3.0);
        assert_eq!(eval_potential(&m, 3.0).unwrap(), 0.0);
        assert_eq!(eval_potential(&m, -2.0).unwrap(), 2.5);
        assert_eq!(m.value(0.0), 4.5);
        assert!(!m.is_smooth());
        assert!(eval_potential(&m, f64::NAN).is_err());
    }

    #[test]
    fn quartic_barrier_height() {
        let m = PotentialModel::quartic(1.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(eval_potential(&m, 0.0).unwrap(), 16.0);
    }

    #[test]
    fn symmetric_quartic_extraction() {
        let m = PotentialModel::quartic(0.125, 2.0, 0.0, 1.0, 1.0).unwrap();
        let p = extract_well_parameters(&m).unwrap();
        assert!((p.a - 2.0).abs() < 1e-14 && (p.b - 2.0).abs() < 1e-14);
        assert_eq!(p.n, 0);
        assert!(p.epsilon.abs() < 1e-14);
        assert!((p.units.omega - 2.0).abs() < 1e-14);
    }

    #[test]
    fn piecewise_offsets() {
        let m = pw(2.0, 3.0);
        assert!(matches!(
            extract_well_parameters(&m),
            Err(Error::OutOfRegime(_))
        ));
        assert_eq!(m.well_offset().0, 2);
        assert!((m.well_offset().1 - 0.5).abs() < 1e-15);
        let m = pw(2.0, (4.0f64 + 4.0).sqrt());
        let p = extract_well_parameters(&m).unwrap();
        assert_eq!(p.n, 2);
        assert!(p.epsilon.abs() < 1e-14);
    }

    #[test]
    fn piecewise_rejects_beta_below_alpha() {
        assert!(matches!(
            PotentialModel::piecewise(3.0, 2.0, Units::natural()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn tilt_zero_is_identity() {
        let m = PotentialModel::quartic(0.125, 2.0, 0.0, 1.0, 1.0).unwrap();
        let t = apply_tilt(&m, 0.0).unwrap();
        assert_eq!(t, m);
        assert_eq!(
            extract_well_parameters(&t).unwrap(),
            extract_well_parameters(&m).unwrap()
        );
    }

    #[test]
    fn tilted_piecewise_minima_difference_is_exact() {
        let m = pw(3.0, 3.0);
        let s = 0.01;
        let t = apply_tilt(&m, s).unwrap();
        let expected = -s * 6.0;
        assert!((t.geometry.left_min_value - expected).abs() < 1e-13);
        // curvature is untouched, minima shifted by -s/(m w^2)
        assert!((t.geometry.b - (3.0 - s)).abs() < 1e-13);
        assert!((t.geometry.a - (3.0 + s)).abs() < 1e-13);
    }

    #[test]
    fn tilted_quartic_minima_difference() {
        // reference: exact minima of lambda (x^2-eta^2)^2 + s x from a high-precision cubic solve
        let m = PotentialModel::quartic(0.125, 2.0, 0.0, 1.0, 1.0).unwrap();
        let t = apply_tilt(&m, 0.5).unwrap();
        let diff = t.geometry.left_min_value;
        assert!((diff - 1.996_010_265_980_912_8).abs() < 1e-10, "{diff}");
        assert_eq!(t.well_offset().0, 1);
        // curvatures no longer agree
        assert!(matches!(
            extract_well_parameters(&t),
            Err(Error::ModelAssumption(_))
        ));
    }

    #[test]
    fn strong_tilt_destroys_a_minimum() {
        let m = PotentialModel::quartic(0.125, 2.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(apply_tilt(&m, 5.0), Err(Error::Shape(_))));
        assert!(matches!(
            apply_tilt(&pw(2.0, 2.0), 3.0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn mirrored_frame_puts_lower_well_right() {
        let m = PotentialModel::quartic(0.125, 2.0, 0.0, 1.0, 1.0).unwrap();
        let t = apply_tilt(&m, 0.5).unwrap();
        assert_eq!(t.geometry.orientation, -1.0);
        assert_eq!(apply_tilt(&m, -0.5).unwrap().geometry.orientation, 1.0);
        assert!(t.geometry.left_min_value > 1.9);
        assert!(t.value(t.geometry.b).abs() < 1e-12);
        assert!(t.derivative(t.geometry.b, 1).abs() < 1e-10);
        assert!(t.derivative(-t.geometry.a, 1).abs() < 1e-10);
    }

    #[test]
    fn polynomial_model_matches_quartic() {
        // 0.125 (x^2 - 4)^2 = 2 - x^2 + 0.125 x^4
        let p = PotentialModel::new(
            PotentialKind::Polynomial {
                coefficients: vec![2.0, 0.1, -1.0, 0.0, 0.125],
            },
            1.0,
            1.0,
        )
        .unwrap();
        let q = PotentialModel::quartic(0.125, 2.0, 0.1, 1.0, 1.0).unwrap();
        assert!((p.geometry.a - q.geometry.a).abs() < 1e-10);
        assert!((p.geometry.b - q.geometry.b).abs() < 1e-10);
        assert!((p.geometry.left_min_value - q.geometry.left_min_value).abs() < 1e-10);
        assert!(p.derivative(p.geometry.b, 1).abs() < 1e-12);
    }

    #[test]
    fn polynomial_single_well_is_shape_error() {
        let r = PotentialModel::new(
            PotentialKind::Polynomial {
                coefficients: vec![0.0, 0.0, 1.0, 0.0, 1.0],
            },
            1.0,
            1.0,
        );
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn turning_point_examples() {
        let p = WellParameters {
            units: Units::natural(),
            a: 5.0,
            b: 5.0,
            n: 0,
            epsilon: 0.0,
        };
        assert_eq!(turning_points(&p, 0).unwrap().right, 4.0);
        assert!((turning_points(&p, 1).unwrap().left + 5.0 - 3f64.sqrt()).abs() < 1e-15);
        let p2 = WellParameters { b: 2.0, ..p };
        assert!(matches!(turning_points(&p2, 4), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn classical_turning_points_on_quadratic_branches() {
        let m = pw(5.0, 5.0);
        let (l, r) = classical_turning_points(&m, 0.5, 0.5).unwrap();
        assert!((r - 4.0).abs() < 1e-13);
        assert!((l + 4.0).abs() < 1e-13);
    }

    #[test]
    fn quadratic_extent_of_piecewise_is_full_width() {
        let m = pw(3.0, 3.0);
        let (l, r) = quadratic_extent(&m, 1e-9);
        assert!((l - 3.0).abs() < 1e-9 && (r - 3.0).abs() < 1e-9);
        let q = PotentialModel::quartic(0.125, 2.0, 0.0, 1.0, 1.0).unwrap();
        let (l, r) = quadratic_extent(&q, 0.01);
        assert!(l > 0.0 && l < 2.0 && (l - r).abs() < 1e-9);
    }

    #[test]
    fn kind_deserializes_from_tagged_json() {
        let k: PotentialKind =
            serde_json::from_str(r#"{"kind":"quartic_tilt","lambda":1.0,"eta":2.0}"#).unwrap();
        assert_eq!(
            k,
            PotentialKind::QuarticTilt {
                lambda: 1.0,
                eta: 2.0,
                s: 0.0
            }
        );
        let bad = serde_json::from_str::<PotentialKind>(
            r#"{"kind":"quartic_tilt","lambda":1.0,"eta":2.0,"zeta":1}"#,
        );
        assert!(bad.is_err());
    }
}
