#![no_main]

use libfuzzer_sys::fuzz_target;
use pasf_core::io::{parse_search_report_json, to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = parse_search_report_json(text) {
        let again = parse_search_report_json(&to_json(&report)).expect("written report parses");
        assert_eq!(again.status, report.status);
        assert_eq!(again.problem, report.problem);
        let _ = report.certificate();
    }
});
