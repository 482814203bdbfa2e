#![no_main]
use libfuzzer_sys::fuzz_target;
use tunnelsplit::config::RunConfig;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = RunConfig::from_json(data) {
        // a config that validates must also build
        cfg.model().expect("validated config builds a model");
    }
});
