#![no_main]

use libfuzzer_sys::fuzz_target;
use pasf_core::io::{parse_experiment_config, to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_experiment_config(text) {
        assert!(!cfg.subcommand.is_empty());
        let again = parse_experiment_config(&to_json(&cfg)).expect("written config parses");
        assert_eq!(again, cfg);
    }
});
