//! Frame files: parse, then a written copy must parse back bit for bit.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pasf_core::io::{frame_to_json, parse_frame_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(loaded) = parse_frame_json(text) else {
        return;
    };
    let pair = loaded.pair;
    let again = parse_frame_json(&frame_to_json(&pair)).expect("written frame parses");
    assert!(again.warnings.is_empty());
    let bits = |m: &pasf_core::lp::Matrix| m.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(pair.f()), bits(again.pair.f()));
    assert_eq!(bits(pair.t()), bits(again.pair.t()));
    assert_eq!(pair.p(), again.pair.p());
    assert_eq!(pair.r(), again.pair.r());
    assert_eq!(pair.label(), again.pair.label());
});
