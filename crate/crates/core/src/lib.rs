//! Gatherplot layout engine.
//!
//! Datasets are ingested into typed dimensions, segmented per axis, and laid
//! out so that every data point owns a non-overlapping mark. Layouts can be
//! serialized to JSON, rendered to SVG, and interpolated for animation.

pub mod color;
pub mod json;
pub mod layout;
pub mod model;
pub mod render;
pub mod scales;
pub mod segment;
pub mod stats;
pub mod transitions;

pub use color::{ColorEncoding, ColorScheme, Rgb};
pub use layout::{
    gatherplot, gatherplot_matrix, plot, scatterplot, Allocation, Axis, AxisConfig, AxisTransform, Canvas, FoldState,
    Layout, LayoutError, LayoutMode, PlotConfig, PlotOptions, RequestedMode,
};
pub use model::{read_csv, Dataset, DimensionKind, ModelError, Value};
pub use render::{render_matrix_svg, render_svg, RenderError, Theme};
pub use segment::{Quantizer, SegmentedDomain};
pub use transitions::{interpolate, keyframes, Easing, TransitionPlan};
