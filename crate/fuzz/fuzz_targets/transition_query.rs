#![no_main]
use gatherplot::request::TransitionRequest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(query) = std::str::from_utf8(data) {
        let _ = TransitionRequest::from_query(query);
    }
});
