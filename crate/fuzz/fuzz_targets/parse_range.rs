#![no_main]
use libfuzzer_sys::fuzz_target;
use tunnelsplit::config::parse_range;

fuzz_target!(|data: &str| {
    if let Ok((lo, hi)) = parse_range(data) {
        assert!(lo.is_finite() && hi.is_finite() && lo < hi);
    }
});
