#![no_main]

use libfuzzer_sys::fuzz_target;
use pasf_core::io::{parse_certificate_json, to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cert) = parse_certificate_json(text) {
        assert_eq!(cert.parts.len(), cert.per_part.len());
        let again = parse_certificate_json(&to_json(&cert)).expect("written certificate parses");
        assert_eq!(again.parts, cert.parts);
    }
});
