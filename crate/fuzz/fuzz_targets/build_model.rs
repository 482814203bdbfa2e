//! Random polynomial and piecewise potentials through model construction and
//! the WKB entry points; errors are fine, panics and non-finite results are not.
#![no_main]
use libfuzzer_sys::arbitrary::{self, Arbitrary};
use libfuzzer_sys::fuzz_target;
use tunnelsplit::potential::{extract_well_parameters, PotentialKind, PotentialModel};
use tunnelsplit::wkb::{splitting_regularized_form, splitting_turning_form, SplitOptions};

#[derive(Debug, Arbitrary)]
enum Input {
    Polynomial(Vec<f64>),
    Quartic { lambda: f64, eta: f64, s: f64 },
    Piecewise { alpha: f64, beta: f64 },
}

fuzz_target!(|input: Input| {
    let kind = match input {
        Input::Polynomial(mut c) => {
            c.truncate(9);
            PotentialKind::Polynomial { coefficients: c }
        }
        Input::Quartic { lambda, eta, s } => PotentialKind::QuarticTilt { lambda, eta, s },
        Input::Piecewise { alpha, beta } => PotentialKind::PiecewiseQuadratic {
            alpha,
            beta,
            omega: 1.0,
        },
    };
    let Ok(model) = PotentialModel::new(kind, 1.0, 1.0) else {
        return;
    };
    if extract_well_parameters(&model).is_err() {
        return;
    }
    let opts = SplitOptions { formal: true };
    for r in [
        splitting_turning_form(&model, 0, opts),
        splitting_regularized_form(&model, 0, opts),
    ]
    .into_iter()
    .flatten()
    {
        assert!(r.splitting.is_finite() && r.splitting > 0.0);
    }
});
