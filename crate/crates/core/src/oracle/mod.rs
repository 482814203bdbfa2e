//! Grid diagonalization of the one-dimensional Hamiltonian, used as an
//! independent reference for the semiclassical splittings.

mod states;
pub mod tridiag;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::potential::PotentialModel;

pub use states::{
    fit_forbidden_amplitudes, harmonic_tail_overlap, interpolate_at, localized_states, node_count,
    wronskian_splitting, ForbiddenAmplitudes, LocalizedStates,
};

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 256;
/// Domain margin beyond each minimum, in oscillator lengths.
pub const DOMAIN_MARGIN: f64 = 8.0;
/// Half-width of the doublet pairing window, in units of `hbar omega`.
pub const PAIRING_WINDOW: f64 = 0.25;

/// Second-order finite-difference Hamiltonian on a uniform grid including
/// both endpoints (Dirichlet beyond them).
#[derive(Debug, Clone, PartialEq)]
pub struct GridHamiltonian {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
    pub diagonal: Vec<f64>,
    pub off_diagonal: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl GridHamiltonian {
    /// Discretize `-hbar^2/2m d^2/dx^2 + v(x)` on `[x_min, x_max]` with `n` points.
    pub fn from_fn(
        v: impl Fn(f64) -> f64,
        domain: (f64, f64),
        n: usize,
        hbar: f64,
        mass: f64,
    ) -> Result<Self> {
        ensure_positive("hbar", hbar)?;
        ensure_positive("mass", mass)?;
        let (x_min, x_max) = domain;
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::Configuration(format!(
                "grid domain [{x_min}, {x_max}] is empty or not finite"
            )));
        }
        if n < MIN_GRID {
            return Err(Error::Configuration(format!(
                "grid size {n} is below the minimum {MIN_GRID}"
            )));
        }
        let dx = (x_max - x_min) / (n - 1) as f64;
        let kinetic = hbar * hbar / (mass * dx * dx);
        let diagonal = (0..n)
            .map(|i| kinetic + v(x_min + i as f64 * dx))
            .collect::<Vec<_>>();
        if diagonal.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidInput(
                "potential is not finite on the grid".into(),
            ));
        }
        Ok(GridHamiltonian {
            x_min,
            x_max,
            n,
            dx,
            diagonal,
            off_diagonal: -0.5 * kinetic,
            hbar,
            mass,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Upper bound on `|H|`, the scale of eigenvalue round-off.
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = tridiag::gershgorin(&self.diagonal, self.off_diagonal);
        lo.abs().max(hi.abs())
    }
}

fn well_lengths(model: &PotentialModel) -> (f64, f64) {
    let g = &model.geometry;
    let len = |w: f64| (model.hbar / (model.mass * w)).sqrt();
    (len(g.omega_left), len(g.omega_right))
}

/// `[-a - 8 l_ho, b + 8 l_ho]` using each well's own oscillator length.
pub fn default_domain(model: &PotentialModel) -> (f64, f64) {
    let (ll, lr) = well_lengths(model);
    let g = &model.geometry;
    (-g.a - DOMAIN_MARGIN * ll, g.b + DOMAIN_MARGIN * lr)
}

/// Grid Hamiltonian of `model` in its normalized frame.
pub fn build_grid_hamiltonian(
    model: &PotentialModel,
    domain: Option<(f64, f64)>,
    n: usize,
) -> Result<GridHamiltonian> {
    let need = default_domain(model);
    let (x_min, x_max) = domain.unwrap_or(need);
    let slack = 1e-12 * (need.1 - need.0);
    if x_min > need.0 + slack || x_max < need.1 - slack {
        return Err(Error::Configuration(format!(
            "domain [{x_min}, {x_max}] must cover [{}, {}] (wells plus {DOMAIN_MARGIN} oscillator lengths)",
            need.0, need.1
        )));
    }
    GridHamiltonian::from_fn(
        |x| model.value(x),
        (x_min, x_max),
        n,
        model.hbar,
        model.mass,
    )
}

/// Lowest eigenpairs. Eigenvectors are normalized with the `dx`-weighted inner
/// product and signed so their first significant value is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub x_min: f64,
    pub dx: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// Level index `l` to `(index_lower, index_upper)`.
    pub pairs: BTreeMap<u32, (usize, usize)>,
}

impl SpectrumResult {
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// `max |<psi_i|psi_j> - delta_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.eigenvectors.iter().enumerate() {
            for (j, v) in self.eigenvectors.iter().enumerate().skip(i) {
                let ip: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() * self.dx;
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - want).abs());
            }
        }
        worst
    }
}

/// Lowest `count` eigenvalues by Sturm bisection and their eigenvectors by
/// inverse iteration.
pub fn eigen_lowest(h: &GridHamiltonian, count: usize) -> Result<SpectrumResult> {
    if count == 0 || count > h.n / 4 {
        return Err(Error::Precondition(format!(
            "count {count} must be between 1 and N/4 = {}",
            h.n / 4
        )));
    }
    let eigenvalues = tridiag::lowest_eigenvalues(&h.diagonal, h.off_diagonal, count);
    let vectors = tridiag::inverse_iteration(&h.diagonal, h.off_diagonal, &eigenvalues)?;
    let scale = h.dx.sqrt().recip();
    let eigenvectors = vectors
        .into_iter()
        .map(|mut v| {
            let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let first = v
                .iter()
                .find(|x| x.abs() > 1e-3 * peak)
                .copied()
                .unwrap_or(1.0);
            let s = if first < 0.0 { -scale } else { scale };
            v.iter_mut().for_each(|x| *x *= s);
            v
        })
        .collect();
    Ok(SpectrumResult {
        x_min: h.x_min,
        dx: h.dx,
        eigenvalues,
        eigenvectors,
        pairs: BTreeMap::new(),
    })
}

/// Nominal doublet energy `(l + n + 1/2 + eps/2) hbar omega`.
pub fn doublet_center(model: &PotentialModel, l: u32) -> f64 {
    let (n, eps) = model.well_offset();
    let quantum = model.hbar * model.geometry.omega_right;
    (l as f64 + n as f64 + 0.5 + 0.5 * eps) * quantum
}

fn window_members(spec: &SpectrumResult, model: &PotentialModel, l: u32) -> Vec<usize> {
    let center = doublet_center(model, l);
    let half = PAIRING_WINDOW * model.hbar * model.geometry.omega_right;
    spec.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, e)| (*e - center).abs() <= half)
        .map(|(i, _)| i)
        .collect()
}

/// The doublet of level `l`: exactly two eigenvalues in the pairing window.
pub fn find_doublet(
    spec: &SpectrumResult,
    model: &PotentialModel,
    l: u32,
) -> Result<(usize, usize)> {
    let members = window_members(spec, model, l);
    match members.as_slice() {
        [i, j] => Ok((*i, *j)),
        _ => Err(Error::Pairing(format!(
            "{} eigenvalues within {PAIRING_WINDOW} hbar omega of {} for level {l}; expected 2",
            members.len(),
            doublet_center(model, l)
        ))),
    }
}

/// Fill `spec.pairs` for every level whose window holds exactly two eigenvalues.
pub fn assign_pairs(spec: &mut SpectrumResult, model: &PotentialModel, max_level: u32) {
    for l in 0..=max_level {
        if let Ok(p) = find_doublet(spec, model, l) {
            spec.pairs.insert(l, p);
        }
    }
}

/// A model's grid Hamiltonian with the spectrum up to a level's pairing window.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub hamiltonian: GridHamiltonian,
    pub spectrum: SpectrumResult,
}

/// Diagonalize `model` on the default domain with every eigenvalue up to the
/// top of the pairing window of `max_level`.
pub fn oracle_spectrum(model: &PotentialModel, max_level: u32, n: usize) -> Result<OracleRun> {
    oracle_spectrum_on(model, max_level, n, None)
}

/// As [`oracle_spectrum`] on an explicit domain (default when `None`).
pub fn oracle_spectrum_on(
    model: &PotentialModel,
    max_level: u32,
    n: usize,
    domain: Option<(f64, f64)>,
) -> Result<OracleRun> {
    let h = build_grid_hamiltonian(model, domain, n)?;
    let top =
        doublet_center(model, max_level) + PAIRING_WINDOW * model.hbar * model.geometry.omega_right;
    let count = tridiag::sturm_count(&h.diagonal, h.off_diagonal, top).max(1);
    let mut spectrum = eigen_lowest(&h, count)?;
    assign_pairs(&mut spectrum, model, max_level);
    Ok(OracleRun {
        hamiltonian: h,
        spectrum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSplitting {
    pub l: u32,
    pub grid_size: usize,
    pub lower: f64,
    pub upper: f64,
    /// Difference of the bisected eigenvalues.
    pub raw_gap: f64,
    /// Gap from the discrete Green identity on the doublet eigenvectors.
    pub refined_gap: f64,
    /// `refined_gap` when `raw_gap` is within reach of eigenvalue round-off,
    /// otherwise `raw_gap`.
    pub gap: f64,
}

/// Gap of the doublet `(i, j)`.
///
/// For eigenvectors `u`, `v` of the tridiagonal matrix, summing
/// `v (T u) - u (T v)` over sites `k >= c` telescopes to
/// `(E_v - E_u) sum_{k>=c} u_k v_k = e (v_{c-1} u_c - u_{c-1} v_c)`,
/// which resolves gaps far below the round-off of the eigenvalues themselves.
pub fn doublet_gap(
    h: &GridHamiltonian,
    spec: &SpectrumResult,
    pair: (usize, usize),
) -> Result<OracleSplitting> {
    let (i, j) = pair;
    let u = &spec.eigenvectors[i];
    let v = &spec.eigenvectors[j];
    let raw_gap = spec.eigenvalues[j] - spec.eigenvalues[i];
    let c = (((0.0 - h.x_min) / h.dx).round() as usize).clamp(1, h.n - 1);
    let flux = h.off_diagonal * (v[c - 1] * u[c] - u[c - 1] * v[c]);
    let overlap: f64 = u[c..].iter().zip(&v[c..]).map(|(a, b)| a * b).sum();
    let refined_gap = (flux / overlap).abs();
    let noise = 4.0 * f64::EPSILON * h.norm_bound();
    let gap = if raw_gap < 1e3 * noise {
        // below round-off the vectors are only trustworthy if they still
        // combine into well-localized states
        let localized = [1.0, -1.0].iter().any(|sign| {
            let right: f64 = u
                .iter()
                .zip(v)
                .enumerate()
                .filter(|(k, _)| h.x(*k) > 0.0)
                .map(|(_, (a, b))| 0.5 * (a + sign * b).powi(2))
                .sum::<f64>()
                * h.dx;
            right > 0.9
        });
        if !localized || !refined_gap.is_finite() {
            return Err(Error::Numerical(format!(
                "doublet gap {raw_gap:.3e} is below the grid's eigenvector resolution"
            )));
        }
        refined_gap
    } else {
        raw_gap
    };
    Ok(OracleSplitting {
        l: 0,
        grid_size: h.n,
        lower: spec.eigenvalues[i],
        upper: spec.eigenvalues[j],
        raw_gap,
        refined_gap,
        gap,
    })
}

/// Doublet gap of level `l` on an `n`-point grid.
pub fn oracle_splitting_with(model: &PotentialModel, l: u32, n: usize) -> Result<OracleSplitting> {
    let run = oracle_spectrum(model, l, n)?;
    let pair = find_doublet(&run.spectrum, model, l)?;
    let mut out = doublet_gap(&run.hamiltonian, &run.spectrum, pair)?;
    out.l = l;
    Ok(out)
}

/// Doublet gap of level `l` at the default grid size.
pub fn oracle_splitting(model: &PotentialModel, l: u32) -> Result<f64> {
    oracle_splitting_with(model, l, DEFAULT_GRID).map(|s| s.gap)
}

/// Second-order Richardson extrapolation from grids `N` and `2N`.
pub fn richardson_extrapolate(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

/// `(e_N - e_2N) / (e_2N - e_4N)`; close to 4 for second-order convergence.
pub fn convergence_ratio(e_n: f64, e_2n: f64, e_4n: f64) -> f64 {
    (e_n - e_2n) / (e_2n - e_4n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Units;

    fn harmonic(n: usize, half_width: f64) -> GridHamiltonian {
        GridHamiltonian::from_fn(|x| 0.5 * x * x, (-half_width, half_width), n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn harmonic_spectrum_has_second_order_error() {
        let h = harmonic(4096, 12.0);
        let spec = eigen_lowest(&h, 5).unwrap();
        for (k, e) in spec.eigenvalues.iter().enumerate() {
            let exact = k as f64 + 0.5;
            // leading error -dx^2/24 <p^4>, <p^4> = 3/4 (2k^2 + 2k + 1)
            let predicted = -h.dx * h.dx / 24.0 * 0.75 * (2.0 * (k * k + k) as f64 + 1.0);
            assert!(((e - exact) / predicted - 1.0).abs() < 0.01, "{k}: {e}");
        }
        assert!(spec.orthonormality_residual() < 1e-8);
    }

    #[test]
    fn richardson_ratio_is_four() {
        let e: Vec<f64> = [512, 1024, 2048]
            .iter()
            .map(|&n| eigen_lowest(&harmonic(n, 10.0), 1).unwrap().eigenvalues[0])
            .collect();
        let r = convergence_ratio(e[0], e[1], e[2]);
        assert!((r - 4.0).abs() < 0.1, "{r}");
        assert!((richardson_extrapolate(e[1], e[2]) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn box_spectrum() {
        let l = std::f64::consts::PI;
        let n = 1024;
        // Dirichlet nodes sit one spacing outside the stored endpoints
        let h = GridHamiltonian::from_fn(|_| 0.0, (0.0, l), n, 1.0, 1.0).unwrap();
        let width = l + 2.0 * h.dx;
        let spec = eigen_lowest(&h, 3).unwrap();
        for (k, e) in spec.eigenvalues.iter().enumerate() {
            let kk = (k + 1) as f64;
            let exact = kk * kk * std::f64::consts::PI.powi(2) / (2.0 * width * width);
            assert!(((e - exact) / exact).abs() < 1e-5, "{k}: {e} vs {exact}");
        }
    }

    #[test]
    fn harmonic_nodes_match_level() {
        let h = harmonic(1024, 10.0);
        let spec = eigen_lowest(&h, 5).unwrap();
        for (k, psi) in spec.eigenvectors.iter().enumerate() {
            assert_eq!(
                node_count(psi, h.x_min, h.dx, (h.x_min, h.x_max)).unwrap(),
                k
            );
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            GridHamiltonian::from_fn(|x| x * x, (-1.0, 1.0), 100, 1.0, 1.0),
            Err(Error::Configuration(_))
        ));
        let model = PotentialModel::piecewise(3.0, 3.0, Units::natural()).unwrap();
        assert!(matches!(
            build_grid_hamiltonian(&model, Some((-8.0, 8.0)), 1024),
            Err(Error::Configuration(_))
        ));
        let h = build_grid_hamiltonian(&model, None, 1024).unwrap();
        assert!(matches!(eigen_lowest(&h, 300), Err(Error::Precondition(_))));
    }

    #[test]
    fn symmetric_double_well_has_doublets() {
        let model = PotentialModel::piecewise(3.0, 3.0, Units::natural()).unwrap();
        let run = oracle_spectrum(&model, 1, 2048).unwrap();
        let s = &run.spectrum;
        assert_eq!(s.pairs.get(&0), Some(&(0, 1)));
        assert_eq!(s.pairs.get(&1), Some(&(2, 3)));
        let g0 = s.eigenvalues[1] - s.eigenvalues[0];
        let g1 = s.eigenvalues[3] - s.eigenvalues[2];
        assert!(g0 < 0.05 && g1 > g0);
        assert!(s.eigenvalues[2] - s.eigenvalues[1] > 0.8);
    }

    #[test]
    fn refined_gap_agrees_with_raw_gap_when_resolvable() {
        let model = PotentialModel::piecewise(3.0, 3.0, Units::natural()).unwrap();
        let s = oracle_splitting_with(&model, 0, 4096).unwrap();
        assert!(
            ((s.refined_gap - s.raw_gap) / s.raw_gap).abs() < 1e-6,
            "{s:?}"
        );
    }

    #[test]
    fn pairing_requires_exactly_two_levels() {
        let model = PotentialModel::piecewise(3.0, 3.0, Units::natural()).unwrap();
        let spec = |values: Vec<f64>| SpectrumResult {
            x_min: 0.0,
            dx: 1.0,
            eigenvectors: vec![vec![]; values.len()],
            eigenvalues: values,
            pairs: BTreeMap::new(),
        };
        assert!(matches!(
            find_doublet(&spec(vec![0.5, 0.6, 0.7]), &model, 0),
            Err(Error::Pairing(_))
        ));
        assert!(matches!(
            find_doublet(&spec(vec![0.1, 1.5]), &model, 0),
            Err(Error::Pairing(_))
        ));
        assert_eq!(
            find_doublet(&spec(vec![0.49, 0.51, 1.5]), &model, 0).unwrap(),
            (0, 1)
        );
    }
}
