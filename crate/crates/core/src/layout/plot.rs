use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::color::{ColorEncoding, ColorScheme, Rgb};
use crate::model::{Dataset, DimensionKind, Domain, PointId, Value};
use crate::scales::Jitter;
use crate::segment::{Membership, SegmentedDomain};

use super::axis::{fold_axis, segment_axis};
use super::packing::{absolute_mark_size, layout_cell, select_mode, streamgraph_packing, CellPacking};
use super::{
    corner_radius, snap, AxisConfig, AxisSegments, AxisTransform, Binding, Canvas, EffectiveMode, FoldState, Layout,
    LayoutError, LayoutMode, MarkPlacement, Rect, RequestedMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// Everything that determines a plot besides the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotConfig {
    pub x: AxisConfig,
    pub y: AxisConfig,
    pub color: Option<String>,
    pub mode: RequestedMode,
    pub canvas: Canvas,
}

impl PlotConfig {
    pub fn new(x: AxisConfig, y: AxisConfig, canvas: Canvas) -> PlotConfig {
        PlotConfig {
            x,
            y,
            color: None,
            mode: RequestedMode::Absolute,
            canvas,
        }
    }

    pub fn with_color(mut self, color: impl Into<String>) -> PlotConfig {
        self.color = Some(color.into());
        self
    }

    pub fn with_mode(mut self, mode: RequestedMode) -> PlotConfig {
        self.mode = mode;
        self
    }

    pub fn axis(&self, axis: Axis) -> &AxisConfig {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }
}

/// Space reserved around the plot area for axes and labels, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Margins {
    pub left: u32,
    pub right: u32,
    pub top: u32,
    pub bottom: u32,
}

impl Default for Margins {
    fn default() -> Margins {
        Margins {
            left: 88,
            right: 12,
            top: 12,
            bottom: 56,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub margins: Margins,
    pub colors: ColorScheme,
    /// Mark size for linearly placed marks when no gathered cell sets one.
    pub scatter_mark_size: f64,
    /// Jitter amplitude; defaults to one mark size.
    pub jitter_amplitude: Option<f64>,
    pub seed: u64,
}

impl Default for PlotOptions {
    fn default() -> PlotOptions {
        PlotOptions {
            margins: Margins::default(),
            colors: ColorScheme::default(),
            scatter_mark_size: 8.0,
            jitter_amplitude: None,
            seed: 0,
        }
    }
}

/// Gather layout of `dataset`. At least one axis must use the gather
/// transform; see [`scatterplot`] otherwise.
pub fn gatherplot(dataset: &Dataset, cfg: &PlotConfig, opts: &PlotOptions) -> Result<Layout, LayoutError> {
    if cfg.x.transform != AxisTransform::Gather && cfg.y.transform != AxisTransform::Gather {
        return Err(LayoutError::NotAGatherplot);
    }
    build(dataset, cfg, opts)
}

/// Layout with scatter or jitter placement on both axes.
pub fn scatterplot(dataset: &Dataset, cfg: &PlotConfig, opts: &PlotOptions) -> Result<Layout, LayoutError> {
    let mut cfg = cfg.clone();
    for axis in [&mut cfg.x, &mut cfg.y] {
        if axis.transform == AxisTransform::Gather {
            axis.transform = AxisTransform::Scatter;
        }
    }
    build(dataset, &cfg, opts)
}

/// [`gatherplot`] when any axis gathers, [`scatterplot`] otherwise.
pub fn plot(dataset: &Dataset, cfg: &PlotConfig, opts: &PlotOptions) -> Result<Layout, LayoutError> {
    build(dataset, cfg, opts)
}

/// Returns `cfg` with one segment of `axis` folded to `state`.
pub fn fold_segment(
    dataset: &Dataset,
    cfg: &PlotConfig,
    axis: Axis,
    label: &str,
    state: FoldState,
) -> Result<PlotConfig, LayoutError> {
    let domain = axis_domain(dataset, cfg.axis(axis))?;
    let folded = fold_axis(cfg.axis(axis), &domain, axis, label, state)?;
    let mut out = cfg.clone();
    match axis {
        Axis::X => out.x = folded,
        Axis::Y => out.y = folded,
    }
    Ok(out)
}

/// Scatterplot-matrix analogue with an extra undefined row and column.
///
/// `dims` are the gather configurations of the dimensions; the result has
/// `dims.len() + 1` rows and columns, index 0 being undefined. Cell `(i, j)`
/// plots `dims[j - 1]` across and `dims[i - 1]` up.
pub fn gatherplot_matrix(
    dataset: &Dataset,
    dims: &[AxisConfig],
    cell: Canvas,
    mode: RequestedMode,
    color: Option<&str>,
    opts: &PlotOptions,
) -> Result<Vec<Vec<Layout>>, LayoutError> {
    let axes: Vec<AxisConfig> = std::iter::once(AxisConfig::undefined())
        .chain(dims.iter().cloned())
        .collect();
    axes.iter()
        .map(|y| {
            axes.iter()
                .map(|x| {
                    let cfg = PlotConfig {
                        x: x.clone(),
                        y: y.clone(),
                        color: color.map(str::to_string),
                        mode,
                        canvas: cell,
                    };
                    gatherplot(dataset, &cfg, opts)
                })
                .collect()
        })
        .collect()
}

pub(crate) fn axis_domain(dataset: &Dataset, cfg: &AxisConfig) -> Result<SegmentedDomain, LayoutError> {
    match &cfg.binding {
        Binding::Undefined => Ok(SegmentedDomain::undefined(dataset.len())),
        Binding::Dimension(name) => {
            let dom = SegmentedDomain::for_dimension(dataset, name, cfg.bins)?;
            Ok(dom.reordered(cfg.order, cfg.explicit_order.as_deref())?)
        }
    }
}

/// Per-point color: stacking key plus fill.
struct Coloring {
    encoding: ColorEncoding,
    keys: Vec<f64>,
    fills: Vec<Rgb>,
}

fn coloring(dataset: &Dataset, color: Option<&str>, scheme: &ColorScheme) -> Result<Coloring, LayoutError> {
    let n = dataset.len();
    let Some(name) = color else {
        return Ok(Coloring {
            encoding: ColorEncoding::None,
            keys: vec![0.0; n],
            fills: vec![scheme.default_fill; n],
        });
    };
    let c = dataset.column_index(name)?;
    let dim = &dataset.dimensions()[c];
    let mut keys = Vec::with_capacity(n);
    let mut fills = Vec::with_capacity(n);
    match (&dim.domain, dim.kind) {
        (Domain::Range { min, max }, DimensionKind::Quantitative) => {
            for v in dataset.column(c) {
                match v.as_number() {
                    Some(x) => {
                        keys.push(x);
                        let t = if max > min { (x - min) / (max - min) } else { 0.5 };
                        fills.push(scheme.continuous(t));
                    }
                    None => {
                        keys.push(f64::INFINITY);
                        fills.push(scheme.missing_fill);
                    }
                }
            }
            Ok(Coloring {
                encoding: ColorEncoding::Continuous,
                keys,
                fills,
            })
        }
        _ => {
            for v in dataset.column(c) {
                match dim.category_index(v) {
                    Some(i) => {
                        keys.push(i as f64);
                        fills.push(scheme.categorical(i));
                    }
                    None => {
                        keys.push(f64::INFINITY);
                        fills.push(scheme.missing_fill);
                    }
                }
            }
            Ok(Coloring {
                encoding: ColorEncoding::Nominal,
                keys,
                fills,
            })
        }
    }
}

/// One axis as seen by the cell layout.
struct AxisPlan<'a> {
    cfg: &'a AxisConfig,
    domain: SegmentedDomain,
    segments: AxisSegments,
    column: Option<usize>,
    salt: u64,
}

impl AxisPlan<'_> {
    fn segment_of(&self, dataset: &Dataset, id: PointId) -> Option<usize> {
        match self.column {
            None => Some(0),
            Some(c) => self.domain.segment_of(dataset.value(id, c)),
        }
    }

    /// Whether marks in segment `i` are packed (true) or placed linearly.
    fn gathers(&self, i: usize) -> bool {
        self.cfg.transform == AxisTransform::Gather && self.segments.segments[i].state != FoldState::Minimized
    }

    fn interval(&self, i: usize) -> (f64, f64) {
        let s = &self.segments.segments[i];
        (s.lo, s.hi)
    }

    /// Linear coordinate of a point inside segment `i`.
    fn linear(&self, dataset: &Dataset, id: PointId, i: usize) -> f64 {
        let (lo, hi) = self.interval(i);
        let value = self.column.map(|c| dataset.value(id, c));
        match (&self.domain.segments[i].membership, value.and_then(Value::as_number)) {
            (Membership::Interval { lo: v0, hi: v1 }, Some(v)) if v1 > v0 => lo + (v - v0) / (v1 - v0) * (hi - lo),
            _ => lo + (hi - lo) / 2.0,
        }
    }

    /// Pixel span `[start, end)` of a linearly placed mark of `size`.
    fn linear_span(&self, dataset: &Dataset, id: PointId, i: usize, size: f64, opts: &PlotOptions) -> (f64, f64) {
        let (lo, hi) = self.interval(i);
        let size = size.min(hi - lo);
        let mut center = self.linear(dataset, id, i);
        if self.cfg.transform == AxisTransform::Jitter {
            let jitter = Jitter {
                amplitude: opts.jitter_amplitude.unwrap_or(size),
                seed: opts.seed ^ self.salt,
                extent: (lo + size / 2.0, hi - size / 2.0),
            };
            center = jitter.apply(id as u64, center);
        }
        let start = (center - size / 2.0).clamp(lo, hi - size);
        let (a, b) = (snap(start), snap(start + size));
        if b > a && a >= lo && b <= hi {
            (a, b)
        } else {
            (start, start + size)
        }
    }
}

fn plan_axis<'a>(
    dataset: &Dataset,
    cfg: &'a AxisConfig,
    axis: Axis,
    extent: (f64, f64),
    salt: u64,
) -> Result<AxisPlan<'a>, LayoutError> {
    let domain = axis_domain(dataset, cfg)?;
    let segments = segment_axis(cfg, &domain, extent, axis)?;
    let column = cfg.dimension().map(|d| dataset.column_index(d)).transpose()?;
    Ok(AxisPlan {
        cfg,
        domain,
        segments,
        column,
        salt,
    })
}

fn build(dataset: &Dataset, cfg: &PlotConfig, opts: &PlotOptions) -> Result<Layout, LayoutError> {
    let m = opts.margins;
    let (w, h) = (cfg.canvas.width, cfg.canvas.height);
    if w <= m.left + m.right || h <= m.top + m.bottom {
        return Err(LayoutError::CanvasTooSmall { width: w, height: h });
    }
    let x_extent = (m.left as f64, (w - m.right) as f64);
    let y_extent = (m.bottom as f64, (h - m.top) as f64);

    let xp = plan_axis(dataset, &cfg.x, Axis::X, x_extent, 0)?;
    let yp = plan_axis(dataset, &cfg.y, Axis::Y, y_extent, 0x9e37_79b9_7f4a_7c15)?;
    let colors = coloring(dataset, cfg.color.as_deref(), &opts.colors)?;

    let mut cells: BTreeMap<(usize, usize), Vec<PointId>> = BTreeMap::new();
    for p in dataset.points() {
        if let (Some(xi), Some(yi)) = (xp.segment_of(dataset, p.id), yp.segment_of(dataset, p.id)) {
            cells.entry((xi, yi)).or_default().push(p.id);
        }
    }
    for members in cells.values_mut() {
        members.sort_by(|&a, &b| colors.keys[a].total_cmp(&colors.keys[b]).then(a.cmp(&b)));
    }

    let cell_rect = |xi: usize, yi: usize| {
        let (x0, x1) = xp.interval(xi);
        let (y0, y1) = yp.interval(yi);
        Rect::new(x0, y0, x1 - x0, y1 - y0)
    };
    let packed: Vec<(Rect, usize)> = cells
        .iter()
        .filter(|((xi, yi), _)| xp.gathers(*xi) && yp.gathers(*yi))
        .map(|(&(xi, yi), members)| (cell_rect(xi, yi), members.len()))
        .collect();

    let (mode, packing) = match packed.iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.x.total_cmp(&a.0.x))) {
        Some((densest, _)) => {
            let mode = select_mode(cfg.mode, densest.aspect());
            let packing = match mode.effective {
                EffectiveMode::Absolute => CellPacking::Absolute {
                    size: absolute_mark_size(&packed)?,
                },
                EffectiveMode::Streamgraph => streamgraph_packing(&packed)?,
                EffectiveMode::Relative => CellPacking::Relative,
            };
            (mode, Some(packing))
        }
        None => (
            LayoutMode {
                requested: cfg.mode,
                effective: cfg.mode.into(),
                auto_switched: false,
            },
            None,
        ),
    };
    let linear_size = match packing {
        Some(CellPacking::Absolute { size }) | Some(CellPacking::Streamgraph { size, .. }) => size,
        _ => opts.scatter_mark_size,
    };

    let mut marks = Vec::with_capacity(dataset.len());
    for (&(xi, yi), members) in &cells {
        let cell = cell_rect(xi, yi);
        let placed: Vec<(PointId, Rect)> = match (xp.gathers(xi), yp.gathers(yi)) {
            (true, true) => layout_cell(cell, members, packing.expect("packed cells imply a packing")),
            (true, false) => members
                .iter()
                .zip(line_spans(cell.x, cell.w, members.len(), packing, linear_size))
                .map(|(&id, (x0, x1))| {
                    let (y0, y1) = yp.linear_span(dataset, id, yi, linear_size, opts);
                    (id, Rect::new(x0, y0, x1 - x0, y1 - y0))
                })
                .collect(),
            (false, true) => members
                .iter()
                .zip(line_spans(cell.y, cell.h, members.len(), packing, linear_size))
                .map(|(&id, (y0, y1))| {
                    let (x0, x1) = xp.linear_span(dataset, id, xi, linear_size, opts);
                    (id, Rect::new(x0, y0, x1 - x0, y1 - y0))
                })
                .collect(),
            (false, false) => members
                .iter()
                .map(|&id| {
                    let (x0, x1) = xp.linear_span(dataset, id, xi, linear_size, opts);
                    let (y0, y1) = yp.linear_span(dataset, id, yi, linear_size, opts);
                    (id, Rect::new(x0, y0, x1 - x0, y1 - y0))
                })
                .collect(),
        };
        marks.extend(placed.into_iter().map(|(id, rect)| MarkPlacement {
            id,
            cell: (xi, yi),
            corner_radius: corner_radius(rect.w, rect.h),
            rect,
            fill: colors.fills[id],
        }));
    }
    marks.sort_by_key(|m| m.id);

    Ok(Layout {
        canvas: cfg.canvas,
        mode,
        x_axis: xp.segments,
        y_axis: yp.segments,
        marks,
        color: colors.encoding,
        x_title: cfg.x.title(),
        y_title: cfg.y.title(),
    })
}

/// Slots for `n` marks stacked along a gathered edge `[start, start + len)`
/// whose other axis is linear: equal slots that tile the edge in relative
/// mode, otherwise at most the global mark size and centered.
fn line_spans(start: f64, len: f64, n: usize, packing: Option<CellPacking>, size: f64) -> Vec<(f64, f64)> {
    let slot = len / n.max(1) as f64;
    let step = match packing {
        Some(CellPacking::Relative) => slot,
        _ => slot.min(size),
    };
    let first = start + (len - step * n as f64) / 2.0;
    let raw: Vec<f64> = (0..=n).map(|i| first.max(start) + i as f64 * step).collect();
    let snapped: Vec<f64> = raw.iter().map(|&v| snap(v)).collect();
    let e = if snapped.windows(2).all(|w| w[1] > w[0]) {
        snapped
    } else {
        raw
    };
    e.windows(2).map(|w| (w[0], w[1])).collect()
}
