#![no_main]

use chdg_cli::config::{parse_config, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(pairs) = parse_config(text) else {
        return;
    };
    // Validation is pure: no files are opened until a run starts.
    if let Ok(cfg) = RunConfig::from_pairs(&pairs) {
        let again = RunConfig::from_pairs(&cfg.resolved()).expect("resolved config re-parses");
        assert_eq!(again.resolved(), cfg.resolved());
    }
});
