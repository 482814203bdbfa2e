use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tunnelsplit::config::{parse_range, OutputFormat, RunConfig};
use tunnelsplit::dynamics::{
    evolve_two_state, find_peaks, full_width_half_max, linspace, max_transfer_probability,
    resonance_scan, Initial, ScanAxis, ScanOptions, TwoStateSystem,
};
use tunnelsplit::exact_vd::{vd_eigenlevels, vd_quadratic_delta, VdParameters};
use tunnelsplit::oracle::{
    doublet_gap, find_doublet, localized_states, oracle_spectrum_on, wronskian_splitting,
    OracleRun, DEFAULT_GRID, MIN_GRID,
};
use tunnelsplit::pcf::{pcf_d, pcf_d_deriv};
use tunnelsplit::potential::{PotentialKind, PotentialModel};
use tunnelsplit::wkb::{
    splitting_regularized_form, splitting_turning_form, SplitOptions, SplittingMethod,
    SplittingResult,
};
use tunnelsplit::Error;

use crate::output::{load_config, Cell, Csv, Failure, Sink};
use crate::{GlobalArgs, MethodChoice, StartWell};

/// Separation `(a + b)/l_ho` below which the semiclassical forms are flagged.
const CLOSE_WELLS: f64 = 10.0;
/// Required clearance of the level below the barrier top, in `hbar omega`.
const BARRIER_CLEARANCE: f64 = 2.0;

fn error_json(e: &Error) -> Value {
    json!({ "kind": e.kind(), "message": e.to_string() })
}

fn method_tag(m: SplittingMethod) -> &'static str {
    match m {
        SplittingMethod::TurningPointForm => "turning_point_form",
        SplittingMethod::RegularizedForm => "regularized_form",
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn sweep_values(range: &str, points: usize) -> Result<Vec<f64>, Failure> {
    let (lo, hi) = parse_range(range)?;
    if points < 2 {
        return Err(Failure::invalid(format!(
            "--points must be at least 2, got {points}"
        )));
    }
    Ok(linspace(lo, hi, points))
}

fn grid_size(cfg: &RunConfig, grid: Option<usize>) -> usize {
    grid.or(cfg.oracle.grid).unwrap_or(DEFAULT_GRID)
}

pub fn split(
    g: &GlobalArgs,
    config: &Path,
    level: u32,
    method: MethodChoice,
    force_formal: bool,
) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let model = cfg.model()?;
    let opts = SplitOptions {
        formal: force_formal,
    };
    let mut results: Vec<SplittingResult> = Vec::new();
    if matches!(method, MethodChoice::Turning | MethodChoice::Both) {
        results.push(splitting_turning_form(&model, level, opts)?);
    }
    if matches!(method, MethodChoice::Regularized | MethodChoice::Both) {
        results.push(splitting_regularized_form(&model, level, opts)?);
    }
    let sink = Sink::new(g, Some(&cfg), OutputFormat::Json);
    if sink.is_csv() {
        let mut t = Csv::new(&[
            "method",
            "l",
            "n",
            "epsilon",
            "Delta_l",
            "Delta_l_eps",
            "ln_Delta_l",
        ]);
        for r in &results {
            t.row(&[
                Cell::Text(method_tag(r.method).into()),
                Cell::Int(r.l.into()),
                Cell::Int(r.n.into()),
                Cell::Num(r.epsilon),
                Cell::Num(r.splitting),
                Cell::Num(r.splitting_eps),
                Cell::Num(r.ln_splitting),
            ]);
        }
        return sink.csv(&t);
    }
    let relative_difference = match results.as_slice() {
        [t, r] => Some((t.ln_splitting - r.ln_splitting).exp_m1()),
        _ => None,
    };
    sink.json(&json!({
        "command": "split",
        "potential": cfg.potential,
        "units": cfg.units,
        "formal": force_formal,
        "results": results,
        "relative_difference": relative_difference,
    }))
}

fn vd_parameters(cfg: &RunConfig, model: &PotentialModel) -> Result<VdParameters, Error> {
    match cfg.potential {
        PotentialKind::PiecewiseQuadratic { alpha, beta, .. } => {
            VdParameters::from_alpha_beta(alpha, beta, model.units())
        }
        _ => Err(Error::Precondition(
            "the exact solution needs a piecewise_quadratic potential".into(),
        )),
    }
}

pub fn exact_vd(
    g: &GlobalArgs,
    config: &Path,
    level: u32,
    eps_range: Option<&str>,
    points: usize,
) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let model = cfg.model()?;
    let base = vd_parameters(&cfg, &model)?;
    let Some(range) = eps_range else {
        let roots = vd_eigenlevels(&base, level)?;
        let closed = vd_quadratic_delta(&base, level)?;
        let sink = Sink::new(g, Some(&cfg), OutputFormat::Json);
        if sink.is_csv() {
            let mut t = Csv::new(&["epsilon", "root_splitting", "closed_form_splitting"]);
            t.numbers(&[base.epsilon, roots.splitting, closed.splitting]);
            return sink.csv(&t);
        }
        let hw = base.units.quantum();
        return sink.json(&json!({
            "command": "exact-vd",
            "level": level,
            "parameters": base,
            "roots": { "method": "matching_roots", "result": roots },
            "closed_form": { "method": "quadratic_closed_form", "result": closed },
            "two_hbar_omega_R_l": 2.0 * hw * closed.r_l,
            "relative_difference": roots.splitting / closed.splitting - 1.0,
        }));
    };
    let values = sweep_values(range, points)?;
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&eps| {
            let out = VdParameters::from_alpha(base.alpha, base.n, eps, base.units).and_then(|p| {
                Ok((
                    vd_eigenlevels(&p, level)?.splitting,
                    vd_quadratic_delta(&p, level)?.splitting,
                ))
            });
            (eps, out)
        })
        .collect();
    let sink = Sink::new(g, Some(&cfg), OutputFormat::Csv);
    if sink.is_csv() {
        let mut t = Csv::new(&["epsilon", "root_splitting", "closed_form_splitting"]);
        for (eps, r) in &rows {
            let (a, b) = match r {
                Ok((a, b)) => (Some(*a), Some(*b)),
                Err(_) => (None, None),
            };
            t.row(&[Cell::Num(*eps), Cell::Opt(a), Cell::Opt(b)]);
        }
        return sink.csv(&t);
    }
    let points: Vec<Value> = rows
        .iter()
        .map(|(eps, r)| match r {
            Ok((a, b)) => json!({
                "epsilon": eps, "root_splitting": a, "closed_form_splitting": b, "status": "ok"
            }),
            Err(e) => json!({ "epsilon": eps, "status": "error", "error": error_json(e) }),
        })
        .collect();
    sink.json(&json!({
        "command": "exact-vd",
        "level": level,
        "alpha": base.alpha,
        "n": base.n,
        "points": points,
    }))
}

/// Detuning with the root and closed-form splittings.
type SweepRow = (f64, Result<(f64, f64), Error>);

fn spectrum_domain(run: &OracleRun) -> (f64, f64) {
    (run.hamiltonian.x_min, run.hamiltonian.x_max)
}

pub fn oracle(
    g: &GlobalArgs,
    config: &Path,
    levels: u32,
    grid: Option<usize>,
    emit_wavefunctions: Option<&Path>,
) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let model = cfg.model()?;
    if levels == 0 {
        return Err(Failure::invalid("--levels must be at least 1"));
    }
    let n = grid_size(&cfg, grid);
    let domain = cfg.oracle.domain;
    let run = oracle_spectrum_on(&model, levels - 1, n, domain)?;
    let coarse_n = n / 2;
    let coarse = if coarse_n >= MIN_GRID {
        Some(oracle_spectrum_on(&model, levels - 1, coarse_n, domain)?)
    } else {
        None
    };
    let mut doublets = Vec::new();
    let mut rows = Vec::new();
    for l in 0..levels {
        let pair = find_doublet(&run.spectrum, &model, l)?;
        let mut fine = doublet_gap(&run.hamiltonian, &run.spectrum, pair)?;
        fine.l = l;
        let richardson = match &coarse {
            Some(c) => {
                let cp = find_doublet(&c.spectrum, &model, l)?;
                let cg = doublet_gap(&c.hamiltonian, &c.spectrum, cp)?.gap;
                let r = c.hamiltonian.dx / run.hamiltonian.dx;
                let extrapolated = fine.gap + (fine.gap - cg) / (r * r - 1.0);
                Some(json!({
                    "coarse_grid": coarse_n,
                    "coarse_gap": cg,
                    "extrapolated_gap": extrapolated,
                    "error_estimate": (fine.gap - extrapolated).abs(),
                }))
            }
            None => None,
        };
        rows.push((
            fine,
            richardson.as_ref().map(|v| v["extrapolated_gap"].as_f64()),
        ));
        doublets.push(json!({
            "l": l,
            "indices": [pair.0, pair.1],
            "method": "oracle",
            "splitting": fine,
            "richardson": richardson,
        }));
    }
    if let Some(path) = emit_wavefunctions {
        let s = &run.spectrum;
        let mut header = vec!["x".to_string()];
        header.extend((0..s.eigenvectors.len()).map(|k| format!("psi_{k}")));
        let refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut t = Csv::new(&refs);
        for i in 0..run.hamiltonian.n {
            let mut line = vec![s.x(i)];
            line.extend(s.eigenvectors.iter().map(|v| v[i]));
            t.numbers(&line);
        }
        let file = Sink::to_path(OutputFormat::Csv, path.to_path_buf());
        file.csv(&t)?;
    }
    let sink = Sink::new(g, Some(&cfg), OutputFormat::Json);
    if sink.is_csv() {
        let mut t = Csv::new(&[
            "l",
            "lower",
            "upper",
            "raw_gap",
            "refined_gap",
            "gap",
            "extrapolated_gap",
        ]);
        for (s, ex) in &rows {
            t.row(&[
                Cell::Int(s.l.into()),
                Cell::Num(s.lower),
                Cell::Num(s.upper),
                Cell::Num(s.raw_gap),
                Cell::Num(s.refined_gap),
                Cell::Num(s.gap),
                Cell::Opt(ex.flatten()),
            ]);
        }
        return sink.csv(&t);
    }
    let (x_min, x_max) = spectrum_domain(&run);
    sink.json(&json!({
        "command": "oracle",
        "grid_size": n,
        "domain": [x_min, x_max],
        "dx": run.hamiltonian.dx,
        "eigenvalues": run.spectrum.eigenvalues,
        "orthonormality_residual": run.spectrum.orthonormality_residual(),
        "doublets": doublets,
    }))
}

#[allow(clippy::too_many_arguments)]
pub fn scan(
    g: &GlobalArgs,
    config: &Path,
    tilt_range: Option<&str>,
    eps_range: Option<&str>,
    points: usize,
    level: u32,
    method: MethodChoice,
    force_formal: bool,
) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let model = cfg.model()?;
    let (axis, range, axis_name) = match (tilt_range, eps_range) {
        (Some(r), None) => (ScanAxis::Tilt, r, "tilt"),
        (None, Some(r)) => (ScanAxis::Epsilon, r, "epsilon"),
        _ => {
            return Err(Failure::invalid(
                "exactly one of --tilt-range and --eps-range is required",
            ))
        }
    };
    let method = match method {
        MethodChoice::Turning => SplittingMethod::TurningPointForm,
        MethodChoice::Regularized => SplittingMethod::RegularizedForm,
        MethodChoice::Both => return Err(Failure::invalid("scan takes a single --method")),
    };
    let values = sweep_values(range, points)?;
    let opts = ScanOptions {
        method,
        formal: force_formal,
    };
    let curve = resonance_scan(&model, axis, &values, level, opts)?;
    let sink = Sink::new(g, Some(&cfg), OutputFormat::Csv);
    if sink.is_csv() {
        let mut t = Csv::new(&["s_or_eps", "Delta_l", "Delta_l_eps", "max_transfer"]);
        for p in &curve {
            t.row(&[
                Cell::Num(p.x),
                Cell::Opt(p.splitting),
                Cell::Opt(p.splitting_eps),
                Cell::Opt(p.max_transfer),
            ]);
        }
        return sink.csv(&t);
    }
    let peaks: Vec<Value> = find_peaks(&curve, 0.5)
        .into_iter()
        .map(|(x, y)| json!({ "s_or_eps": x, "max_transfer": y }))
        .collect();
    sink.json(&json!({
        "command": "scan",
        "axis": axis_name,
        "method": method_tag(method),
        "formal": force_formal,
        "level": level,
        "points": curve,
        "peaks": peaks,
        "fwhm": full_width_half_max(&curve),
    }))
}

#[allow(clippy::too_many_arguments)]
pub fn dynamics(
    g: &GlobalArgs,
    delta: f64,
    epsilon: f64,
    hbar_omega: f64,
    hbar: f64,
    t_max: f64,
    steps: usize,
    initial: StartWell,
) -> Result<(), Failure> {
    if !(hbar_omega.is_finite() && hbar_omega > 0.0) {
        return Err(Failure::invalid(format!(
            "--hbar-omega must be positive, got {hbar_omega}"
        )));
    }
    let detuning = hbar_omega * epsilon;
    let sys = TwoStateSystem::new(0.0, delta, detuning, hbar)?;
    let start = match initial {
        StartWell::Right => Initial::Right,
        StartWell::Left => Initial::Left,
    };
    let tr = evolve_two_state(&sys, t_max, steps, start)?;
    let sink = Sink::new(g, None, OutputFormat::Csv);
    if sink.is_csv() {
        let mut t = Csv::new(&["t", "p_right", "p_left"]);
        for i in 0..tr.times.len() {
            t.numbers(&[tr.times[i], tr.p_right[i], tr.p_left[i]]);
        }
        return sink.csv(&t);
    }
    sink.json(&json!({
        "command": "dynamics",
        "method": "two_state_exact",
        "system": sys,
        "max_transfer": max_transfer_probability(delta, detuning).ok(),
        "trajectory": tr,
    }))
}

#[derive(Serialize)]
struct Row {
    method: &'static str,
    /// Tunneling splitting without detuning, where the method separates it.
    #[serde(rename = "Delta_l")]
    splitting: Option<f64>,
    /// Doublet gap including detuning.
    gap: Option<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
    details: Value,
}

impl Row {
    fn ok(method: &'static str, splitting: Option<f64>, gap: f64, details: Value) -> Self {
        Row {
            method,
            splitting,
            gap: Some(gap),
            status: "ok",
            error: None,
            details,
        }
    }

    fn failed(method: &'static str, e: &Error, status: &'static str) -> Self {
        Row {
            method,
            splitting: None,
            gap: None,
            status,
            error: Some(error_json(e)),
            details: Value::Null,
        }
    }
}

fn wkb_row(model: &PotentialModel, level: u32, opts: SplitOptions, method: SplittingMethod) -> Row {
    let out = match method {
        SplittingMethod::TurningPointForm => splitting_turning_form(model, level, opts),
        SplittingMethod::RegularizedForm => splitting_regularized_form(model, level, opts),
    };
    let tag = method_tag(method);
    match out {
        Ok(r) => Row::ok(tag, Some(r.splitting), r.splitting_eps, to_value(&r)),
        Err(e @ Error::ModelAssumption(_)) if !model.is_smooth() => {
            Row::failed(tag, &e, "not_applicable")
        }
        Err(e) => Row::failed(tag, &e, "error"),
    }
}

pub fn compare(
    g: &GlobalArgs,
    config: &Path,
    level: u32,
    grid: Option<usize>,
    force_formal: bool,
) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let model = cfg.model()?;
    let opts = SplitOptions {
        formal: force_formal,
    };
    let mut rows = vec![
        wkb_row(&model, level, opts, SplittingMethod::TurningPointForm),
        wkb_row(&model, level, opts, SplittingMethod::RegularizedForm),
    ];
    rows.push(match vd_parameters(&cfg, &model) {
        Ok(p) => match (vd_eigenlevels(&p, level), vd_quadratic_delta(&p, level)) {
            (Ok(roots), Ok(closed)) => Row::ok(
                "exact_vd",
                Some(closed.splitting),
                roots.splitting,
                json!({ "roots": roots, "closed_form": closed }),
            ),
            (Err(e), _) | (_, Err(e)) => Row::failed("exact_vd", &e, "error"),
        },
        Err(e) => Row::failed("exact_vd", &e, "not_applicable"),
    });
    let n = grid_size(&cfg, grid);
    let oracle = oracle_spectrum_on(&model, level, n, cfg.oracle.domain).and_then(|run| {
        let pair = find_doublet(&run.spectrum, &model, level)?;
        let mut s = doublet_gap(&run.hamiltonian, &run.spectrum, pair)?;
        s.l = level;
        Ok((run, s))
    });
    match oracle {
        Ok((run, s)) => {
            rows.push(Row::ok("oracle", None, s.gap, to_value(&s)));
            rows.push(match localized_states(&run.spectrum, level) {
                Ok(st) => Row::ok(
                    "wronskian",
                    None,
                    wronskian_splitting(&st, &model.units()),
                    to_value(&st),
                ),
                Err(e) => Row::failed("wronskian", &e, "error"),
            });
        }
        Err(e) => {
            rows.push(Row::failed("oracle", &e, "error"));
            rows.push(Row::failed("wronskian", &e, "error"));
        }
    }

    let mut warnings = Vec::new();
    let units = model.units();
    let geo = &model.geometry;
    let separation = (geo.a + geo.b) / units.l_ho();
    if separation < CLOSE_WELLS {
        warnings.push(json!({
            "code": "wells_close",
            "message": format!("well separation {separation:.3} l_ho is below {CLOSE_WELLS}"),
        }));
    }
    let (n_off, eps) = model.well_offset();
    let level_energy = (level as f64 + n_off as f64 + 0.5 + eps) * units.quantum();
    let clearance = (geo.barrier_height - level_energy) / units.quantum();
    if clearance < BARRIER_CLEARANCE {
        warnings.push(json!({
            "code": "level_near_barrier_top",
            "message": format!("level sits {clearance:.3} hbar omega below the barrier top"),
        }));
    }
    if force_formal && !model.is_smooth() {
        warnings.push(json!({
            "code": "formal_wkb",
            "message": "WKB forms applied to a potential with a kink at the barrier top",
        }));
    }
    for r in rows.iter().filter(|r| r.status == "error") {
        warnings.push(json!({
            "code": "method_failed",
            "message": format!("{} failed", r.method),
            "method": r.method,
        }));
    }

    let mut pairwise = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if let (Some(x), Some(y)) = (a.gap, b.gap) {
                pairwise.push(json!({
                    "a": a.method,
                    "b": b.method,
                    "relative_difference": x / y - 1.0,
                }));
            }
        }
    }

    let sink = Sink::new(g, Some(&cfg), OutputFormat::Json);
    if sink.is_csv() {
        let mut t = Csv::new(&["method", "Delta_l", "gap", "status"]);
        for r in &rows {
            t.row(&[
                Cell::Text(r.method.into()),
                Cell::Opt(r.splitting),
                Cell::Opt(r.gap),
                Cell::Text(r.status.into()),
            ]);
        }
        return sink.csv(&t);
    }
    sink.json(&json!({
        "command": "compare",
        "level": level,
        "grid_size": n,
        "formal": force_formal,
        "methods": rows,
        "pairwise": pairwise,
        "warnings": warnings,
    }))
}

pub fn pcf_eval(g: &GlobalArgs, nu: f64, z: f64) -> Result<(), Failure> {
    let v = pcf_d(nu, z)?;
    let d = pcf_d_deriv(nu, z)?;
    let sink = Sink::new(g, None, OutputFormat::Json);
    if sink.is_csv() {
        let mut t = Csv::new(&["nu", "z", "value", "derivative", "regime"]);
        t.row(&[
            Cell::Num(nu),
            Cell::Num(z),
            Cell::Num(v.value),
            Cell::Num(d.value),
            Cell::Text(to_value(&v.regime).as_str().unwrap_or("").into()),
        ]);
        return sink.csv(&t);
    }
    sink.json(&json!({ "nu": nu, "z": z, "value": v, "derivative": d }))
}
