#![no_main]
use gatherplot_core::{read_csv, AxisConfig, Canvas, PlotConfig, PlotOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(ds) = read_csv(data) else { return };
    let dims = ds.dimensions();
    if let Some(first) = dims.first() {
        let cfg = PlotConfig::new(
            AxisConfig::gather(&first.name),
            AxisConfig::undefined(),
            Canvas::new(400, 300),
        );
        let _ = gatherplot_core::plot(&ds, &cfg, &PlotOptions::default());
    }
});
