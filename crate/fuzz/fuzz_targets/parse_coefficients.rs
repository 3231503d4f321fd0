#![no_main]

use chdg_cli::parse_coefficients;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(records) = parse_coefficients(text, n as usize) {
        assert_eq!(records.len(), n as usize);
        assert!(records.iter().all(|&(c, rho)| c > 0.0 && rho > 0.0));
    }
});
