#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = match std::str::from_utf8(data) {
        Ok(s) => s,
        Err(_) => return,
    };
    // Must never panic; accepted inputs must survive a round trip.
    if let Ok(instance) = ocsp_core::json::parse_instance_json(text) {
        let again = ocsp_core::json::instance_to_json(&instance);
        let reparsed = ocsp_core::json::parse_instance_json(&again).expect("round trip");
        assert_eq!(reparsed, instance);
    }
});
