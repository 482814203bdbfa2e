use proptest::prelude::*;
use tunnelsplit::exact_vd::{vd_quadratic_delta, VdParameters};
use tunnelsplit::potential::*;
use tunnelsplit::wkb::*;

fn quartic(eta: f64) -> PotentialModel {
    PotentialModel::quartic(1.0 / (8.0 * eta * eta), eta, 0.0, 1.0, 1.0).unwrap()
}

const SMOOTH: SplitOptions = SplitOptions { formal: false };
const FORMAL: SplitOptions = SplitOptions { formal: true };

#[test]
fn ground_splitting_decreases_with_separation() {
    let mut last = f64::INFINITY;
    for i in 0..12 {
        let eta = 3.0 + 0.5 * i as f64;
        let r = splitting_regularized_form(&quartic(eta), 0, SMOOTH).unwrap();
        let t = splitting_turning_form(&quartic(eta), 0, SMOOTH).unwrap();
        assert!(r.splitting > 0.0 && t.splitting > 0.0);
        assert!(r.splitting < last, "eta={eta}");
        last = r.splitting;
    }
}

#[test]
fn symmetric_reduction() {
    let m = quartic(6.0);
    let r = splitting_regularized_form(&m, 0, SMOOTH).unwrap();
    let t = splitting_turning_form(&m, 0, SMOOTH).unwrap();
    assert_eq!(r.n, 0);
    assert_eq!(r.components.g_l, r.components.g_l_plus_n);
    let ai = r.components.actions.unwrap();
    assert!((ai.i_a - ai.i_b).abs() < 1e-10 * ai.i_b);
    assert!((ai.gamma_a - ai.gamma_b).abs() < 1e-10);
    assert!((t.splitting / r.splitting - 1.0).abs() < 0.02);
}

#[test]
fn log_space_survives_extreme_parameters() {
    // V_D with beta = 24 gives barrier actions near 290 hbar
    for (l, n) in [(20u32, 0u32), (10, 10), (0, 20)] {
        let p = VdParameters::from_alpha(24.0, n, 0.0, Units::natural()).unwrap();
        let m = p.model().unwrap();
        let r = splitting_regularized_form(&m, l, FORMAL).unwrap();
        let ai = r.components.actions.unwrap();
        assert!(ai.i_a + ai.i_b > 280.0);
        assert!(
            r.ln_splitting.is_finite() && r.ln_splitting < -200.0,
            "{}",
            r.ln_splitting
        );
        if n == 0 {
            let q = vd_quadratic_delta(&p, l).unwrap();
            assert!((q.ln_splitting - r.ln_splitting).abs() < 1e-8, "l={l}");
        }
    }
}

#[test]
fn symmetric_vd_matches_regularized_form() {
    for alpha in [3.0, 4.0, 5.0, 8.0] {
        for l in 0..3u32 {
            let p = VdParameters::from_alpha(alpha, 0, 0.0, Units::natural()).unwrap();
            let q = vd_quadratic_delta(&p, l).unwrap();
            let r = splitting_regularized_form(&p.model().unwrap(), l, FORMAL).unwrap();
            let direct = 2.0 * (q.ln_r_l).exp();
            assert!(
                (r.splitting / direct - 1.0).abs() < 1e-8,
                "alpha={alpha} l={l}"
            );
            assert!((q.splitting / direct - 1.0).abs() < 1e-8);
        }
    }
}

proptest! {
    #[test]
    fn detuning_roots_reproduce_detuned_splitting(
        ln_delta in -300.0f64..-1.0,
        eps in -0.1f64..0.1,
        omega in 0.2f64..5.0,
    ) {
        let units = Units::new(1.0, 1.0, omega).unwrap();
        let delta = ln_delta.exp();
        let d = splitting_with_detuning(delta, eps, &units).unwrap();
        let from_roots = (d.delta_plus - d.delta_minus) * units.quantum();
        prop_assert!((from_roots / d.splitting_eps - 1.0).abs() < 1e-14);
    }

    #[test]
    fn extracted_minima_sit_at_reference_energies(
        lambda in 0.01f64..1.0,
        eta in 1.5f64..4.0,
        s in -0.05f64..0.05,
    ) {
        let m = PotentialModel::quartic(lambda, eta, s, 1.0, 1.0).unwrap();
        let g = m.geometry;
        let (n, eps) = m.well_offset();
        let hw = m.hbar * g.omega_right;
        prop_assert!(eval_potential(&m, g.b).unwrap().abs() < 1e-10 * hw);
        let left = eval_potential(&m, -g.a).unwrap();
        prop_assert!((left - (n as f64 + eps) * hw).abs() < 1e-10 * hw);
        let tilted = apply_tilt(&m, 0.0).unwrap();
        prop_assert_eq!(extract_well_parameters(&tilted), extract_well_parameters(&m));
    }

    #[test]
    fn turning_points_nest(alpha in 4.0f64..12.0, n in 0u32..3, l in 0u32..4) {
        let p = VdParameters::from_alpha(alpha, n, 0.0, Units::natural()).unwrap();
        let params = extract_well_parameters(&p.model().unwrap()).unwrap();
        if let (Ok(lo), Ok(hi)) = (turning_points(&params, l), turning_points(&params, l + 1)) {
            prop_assert!(hi.right < lo.right);
            prop_assert!(hi.left > lo.left);
        }
    }
}
