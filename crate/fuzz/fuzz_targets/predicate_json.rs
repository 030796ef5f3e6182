#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = match std::str::from_utf8(data) {
        Ok(s) => s,
        Err(_) => return,
    };
    if let Ok(predicate) = ocsp_core::json::parse_predicate_json(text) {
        let again = ocsp_core::json::predicate_to_json(&predicate);
        let reparsed = ocsp_core::json::parse_predicate_json(&again).expect("round trip");
        assert_eq!(reparsed, predicate);
    }
});
