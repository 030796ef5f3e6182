#![no_main]
use libfuzzer_sys::fuzz_target;
use ocsp_core::perm::Permutation;

fuzz_target!(|data: &[u8]| {
    let text = match std::str::from_utf8(data) {
        Ok(s) => s,
        Err(_) => return,
    };
    if let Ok(pi) = text.parse::<Permutation>() {
        let shown = pi.to_string();
        let reparsed: Permutation = shown.parse().expect("round trip");
        assert_eq!(reparsed, pi);
    }
});
