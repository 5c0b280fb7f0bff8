#![no_main]
use gatherplot::request::PlotRequest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(query) = std::str::from_utf8(data) else { return };
    if let Ok(req) = PlotRequest::from_query(query) {
        let again = PlotRequest::from_query(&req.to_query()).expect("re-encoded query parses");
        assert_eq!(again, req);
    }
});
