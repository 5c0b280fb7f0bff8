#![no_main]
use gatherplot_core::Value;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(field) = std::str::from_utf8(data) {
        let _ = Value::parse(field);
    }
});
