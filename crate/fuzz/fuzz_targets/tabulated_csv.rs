//! Tabulated continuous families; accepted tables feed the interpolating
//! constructor, which must not panic at any parameter in the domain.

#![no_main]

use libfuzzer_sys::fuzz_target;
use pasf_core::continuous::ContinuousPasf;
use pasf_core::io::{parse_tabulated_csv, tabulated_to_csv};
use pasf_core::lp::Exponent;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(table) = parse_tabulated_csv(text) else {
        return;
    };
    if let Ok(csv) = tabulated_to_csv(&table) {
        let again = parse_tabulated_csv(&csv).expect("written table parses");
        assert_eq!(again.alpha.len(), table.alpha.len());
    }
    let p = Exponent::new(2.0).unwrap();
    if let Ok(c) = ContinuousPasf::tabulated(table, p, p, "fuzz") {
        let (lo, hi) = c.domain();
        for k in 0..=4 {
            let _ = c.evaluate(lo + (hi - lo) * f64::from(k) / 4.0);
        }
    }
});
