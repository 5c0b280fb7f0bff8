#![no_main]
use gatherplot_core::Layout;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(layout) = Layout::from_json(text) {
        let json = layout.to_json();
        let again = Layout::from_json(&json).expect("re-encoded layout parses");
        assert_eq!(again.to_json(), json);
    }
});
