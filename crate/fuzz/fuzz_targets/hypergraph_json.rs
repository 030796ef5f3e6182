#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = match std::str::from_utf8(data) {
        Ok(s) => s,
        Err(_) => return,
    };
    if let Ok(graph) = ocsp_core::json::parse_hypergraph_json(text) {
        let again = ocsp_core::json::hypergraph_to_json(&graph);
        let reparsed = ocsp_core::json::parse_hypergraph_json(&again).expect("round trip");
        assert_eq!(reparsed, graph);
    }
});
