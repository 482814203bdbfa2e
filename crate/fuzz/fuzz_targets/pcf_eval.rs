#![no_main]
use libfuzzer_sys::fuzz_target;
use tunnelsplit::pcf::{pcf_d, pcf_d_deriv};

fuzz_target!(|input: (f64, f64)| {
    let (nu, z) = input;
    if let Ok(v) = pcf_d(nu, z) {
        assert!(!v.ln_abs.is_nan());
    }
    let _ = pcf_d_deriv(nu, z);
});
