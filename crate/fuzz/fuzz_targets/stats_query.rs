#![no_main]
use gatherplot::request::StatsRequest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(query) = std::str::from_utf8(data) {
        let _ = StatsRequest::from_query(query);
    }
});
