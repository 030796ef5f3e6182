#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = match std::str::from_utf8(data) {
        Ok(s) => s,
        Err(_) => return,
    };
    if let Ok(f) = ocsp_core::json::parse_coarse_predicate_json(text) {
        let again = ocsp_core::json::coarse_predicate_to_json(&f);
        let reparsed = ocsp_core::json::parse_coarse_predicate_json(&again).expect("round trip");
        assert_eq!(reparsed, f);
    }
});
