//! Replays the checked-in fuzz seeds for the text parsers.

use std::fs;
use std::path::PathBuf;

use tunnelsplit::config::{parse_range, RunConfig};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter_map(|p| {
            let bytes = fs::read(&p).unwrap();
            String::from_utf8(bytes).ok().map(|s| (p, s))
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds_parse_or_fail_cleanly() {
    let mut accepted = 0;
    for (path, text) in seeds("parse_config") {
        if let Ok(cfg) = RunConfig::from_json(&text) {
            cfg.model()
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn range_seeds_respect_the_contract() {
    for (_, text) in seeds("parse_range") {
        if let Ok((lo, hi)) = parse_range(&text) {
            assert!(lo.is_finite() && hi.is_finite() && lo < hi);
        }
    }
}
