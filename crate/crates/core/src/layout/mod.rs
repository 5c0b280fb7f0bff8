//! The gather layout engine.
//!
//! Both axes of a plot are cut into segments ([`segment_axis`]); every
//! (x-segment, y-segment) pair forms a cell, and the points falling in a cell
//! are packed into a stacked group ([`layout_cell`]). Segments that are
//! minimized by axis folding, and axes using a scatter or jitter transform,
//! place marks linearly instead.
//!
//! Pixel coordinates have their origin at the bottom-left of the canvas with
//! y increasing upward. Segment boundaries are whole pixels; mark edges are
//! snapped to a 1/256 px grid so that adjacent marks share exact edges.

mod axis;
mod doc;
mod packing;
mod plot;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{ColorEncoding, Rgb};
use crate::model::{ModelError, PointId};
use crate::segment::{Quantizer, SegmentError, SegmentOrder};

pub use axis::{fold_axis, largest_remainder, segment_axis};
pub use doc::{count_intersections, LayoutDocError};
pub use packing::{
    absolute_mark_size, capacity, fit_count, layout_cell, max_mark_size, select_mode, streamgraph_packing, CellPacking,
};
pub use plot::{
    fold_segment, gatherplot, gatherplot_matrix, plot, scatterplot, Axis, Margins, PlotConfig, PlotOptions,
};

/// Width of a minimized segment, in pixels.
pub const FOLD_W: f64 = 12.0;

/// Corner-radius cap: marks get `min(w, h, CORNER_R) / 2`.
pub const CORNER_R: f64 = 6.0;

/// Cell aspect ratio above which absolute mode becomes streamgraph.
pub const STREAMGRAPH_ASPECT: f64 = 3.0;

pub(crate) const GRID: f64 = 256.0;

pub(crate) fn snap(v: f64) -> f64 {
    (v * GRID).round() / GRID
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error("{axis} axis: every segment is minimized")]
    AllMinimized { axis: Axis },
    #[error("{axis} axis: more than one segment maximized")]
    MultipleMaximized { axis: Axis },
    #[error("{axis} axis: proportional allocation requires the gather transform")]
    ProportionalWithoutGather { axis: Axis },
    #[error("{axis} axis: no segment labeled `{label}`")]
    UnknownSegment { axis: Axis, label: String },
    #[error("{axis} axis: {width} px cannot hold the requested segments")]
    ExtentTooSmall { axis: Axis, width: f64 },
    #[error("cell with {count} points has zero area")]
    ZeroAreaCell { count: usize },
    #[error("no non-empty cells to size marks for")]
    NoMarks,
    #[error("neither axis uses the gather transform; this is a scatterplot")]
    NotAGatherplot,
    #[error("canvas {width}x{height} leaves no room for the plot area")]
    CanvasTooSmall { width: u32, height: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Rect {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn top(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// True when the interiors overlap; shared edges do not count.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.top() && other.y < self.top()
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.x >= self.x && other.right() <= self.right() && other.y >= self.y && other.top() <= self.top()
    }

    pub fn aspect(&self) -> f64 {
        self.w.max(self.h) / self.w.min(self.h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Canvas {
        Canvas { width, height }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldState {
    #[default]
    Normal,
    Minimized,
    Maximized,
}

impl fmt::Display for FoldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FoldState::Normal => "normal",
            FoldState::Minimized => "minimized",
            FoldState::Maximized => "maximized",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binding {
    Dimension(String),
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisTransform {
    Scatter,
    Jitter,
    #[default]
    Gather,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Allocation {
    #[default]
    Uniform,
    /// Segment width proportional to its point count (mosaic layout).
    Proportional,
}

/// How one axis of a plot is bound and transformed.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisConfig {
    pub binding: Binding,
    pub transform: AxisTransform,
    pub allocation: Allocation,
    /// Non-normal fold states by segment label. A maximized entry implies
    /// every other segment is minimized.
    pub folds: BTreeMap<String, FoldState>,
    pub order: SegmentOrder,
    /// Explicit permutation of segment labels (nominal axes only).
    pub explicit_order: Option<Vec<String>>,
    /// Quantization for numeric dimensions; automatic when absent.
    pub bins: Option<Quantizer>,
}

impl AxisConfig {
    pub fn gather(dimension: impl Into<String>) -> AxisConfig {
        AxisConfig {
            binding: Binding::Dimension(dimension.into()),
            ..AxisConfig::undefined()
        }
    }

    pub fn undefined() -> AxisConfig {
        AxisConfig {
            binding: Binding::Undefined,
            transform: AxisTransform::Gather,
            allocation: Allocation::Uniform,
            folds: BTreeMap::new(),
            order: SegmentOrder::Domain,
            explicit_order: None,
            bins: None,
        }
    }

    pub fn with_transform(mut self, transform: AxisTransform) -> AxisConfig {
        self.transform = transform;
        self
    }

    pub fn with_allocation(mut self, allocation: Allocation) -> AxisConfig {
        self.allocation = allocation;
        self
    }

    pub fn with_bins(mut self, bins: Quantizer) -> AxisConfig {
        self.bins = Some(bins);
        self
    }

    pub fn with_fold(mut self, label: impl Into<String>, state: FoldState) -> AxisConfig {
        let label = label.into();
        if state == FoldState::Normal {
            self.folds.remove(&label);
        } else {
            self.folds.insert(label, state);
        }
        self
    }

    pub fn dimension(&self) -> Option<&str> {
        match &self.binding {
            Binding::Dimension(d) => Some(d),
            Binding::Undefined => None,
        }
    }

    pub fn title(&self) -> String {
        self.dimension().unwrap_or("undefined").to_string()
    }

    pub fn validate(&self, axis: Axis) -> Result<(), LayoutError> {
        if self.folds.values().filter(|s| **s == FoldState::Maximized).count() > 1 {
            return Err(LayoutError::MultipleMaximized { axis });
        }
        if self.allocation == Allocation::Proportional && self.transform != AxisTransform::Gather {
            return Err(LayoutError::ProportionalWithoutGather { axis });
        }
        Ok(())
    }
}

/// One segment of an axis with its pixel interval `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSegment {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
    pub state: FoldState,
    pub count: usize,
}

impl AxisSegment {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxisSegments {
    pub segments: Vec<AxisSegment>,
}

impl AxisSegments {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AxisSegment> {
        self.segments.iter()
    }

    /// Pixel range covered by all segments.
    pub fn extent(&self) -> Option<(f64, f64)> {
        Some((self.segments.first()?.lo, self.segments.last()?.hi))
    }

    /// Segment whose interval contains coordinate `v`; the last segment
    /// also claims its upper edge.
    pub fn locate(&self, v: f64) -> Option<usize> {
        let last = self.segments.len().checked_sub(1)?;
        self.segments
            .iter()
            .position(|s| s.lo <= v && v < s.hi)
            .or_else(|| (v == self.segments[last].hi).then_some(last))
    }

    pub fn by_label(&self, label: &str) -> Option<&AxisSegment> {
        self.segments.iter().find(|s| s.label == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestedMode {
    #[default]
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectiveMode {
    Absolute,
    Relative,
    Streamgraph,
}

impl From<RequestedMode> for EffectiveMode {
    fn from(m: RequestedMode) -> EffectiveMode {
        match m {
            RequestedMode::Absolute => EffectiveMode::Absolute,
            RequestedMode::Relative => EffectiveMode::Relative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutMode {
    pub requested: RequestedMode,
    pub effective: EffectiveMode,
    pub auto_switched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkPlacement {
    pub id: PointId,
    /// (x-segment index, y-segment index).
    pub cell: (usize, usize),
    pub rect: Rect,
    pub corner_radius: f64,
    pub fill: Rgb,
}

pub fn corner_radius(w: f64, h: f64) -> f64 {
    w.min(h).min(CORNER_R) / 2.0
}

/// A resolved plot: pixel geometry for every mark plus both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub canvas: Canvas,
    pub mode: LayoutMode,
    pub x_axis: AxisSegments,
    pub y_axis: AxisSegments,
    /// Sorted by point id.
    pub marks: Vec<MarkPlacement>,
    pub color: ColorEncoding,
    pub x_title: String,
    pub y_title: String,
}

impl Layout {
    /// Region of the cell at `(xi, yi)`.
    pub fn cell_rect(&self, xi: usize, yi: usize) -> Option<Rect> {
        let xs = self.x_axis.segments.get(xi)?;
        let ys = self.y_axis.segments.get(yi)?;
        Some(Rect::new(xs.lo, ys.lo, xs.width(), ys.width()))
    }

    pub fn point_ids(&self) -> Vec<PointId> {
        self.marks.iter().map(|m| m.id).collect()
    }

    pub fn mark(&self, id: PointId) -> Option<&MarkPlacement> {
        self.marks
            .binary_search_by_key(&id, |m| m.id)
            .ok()
            .map(|i| &self.marks[i])
    }
}
