//! Plot requests as flat key/value pairs.
//!
//! The same keys serve as URL query parameters and, with dashes, as CLI
//! flags:
//!
//! | key | value |
//! |-----|-------|
//! | `x`, `y` | dimension name or `undefined` |
//! | `x_transform`, `y_transform` | `gather`, `scatter` or `jitter` |
//! | `x_alloc`, `y_alloc` | `uniform` or `proportional` |
//! | `x_order`, `y_order` | `domain` or `count` |
//! | `x_fold`, `y_fold` | `label:state`, repeatable |
//! | `color` | dimension name |
//! | `mode` | `absolute` or `relative` |
//! | `width`, `height` | canvas size in pixels |
//! | `bins` | `dim=width` or `dim=width,origin`, repeatable |
//! | `seed` | jitter seed |
//! | `mark_size` | size of linearly placed marks |
//! | `jitter` | jitter amplitude |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use gatherplot_core::layout::{Allocation, AxisConfig, AxisTransform, Binding, FoldState, LayoutError};
use gatherplot_core::model::Dataset;
use gatherplot_core::segment::{Quantizer, SegmentOrder};
use gatherplot_core::transitions::Easing;
use gatherplot_core::{Axis, Canvas, PlotConfig, PlotOptions, RequestedMode};
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 600;
pub const UNDEFINED: &str = "undefined";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> FieldError {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Every problem found in one request.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct RequestErrors(pub Vec<FieldError>);

impl fmt::Display for RequestErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", e.field, e.message)?;
        }
        Ok(())
    }
}

impl From<FieldError> for RequestErrors {
    fn from(e: FieldError) -> RequestErrors {
        RequestErrors(vec![e])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxisRequest {
    /// `None` is the undefined axis.
    pub dimension: Option<String>,
    pub transform: AxisTransform,
    pub allocation: Allocation,
    pub order: SegmentOrder,
    pub folds: Vec<(String, FoldState)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRequest {
    pub x: AxisRequest,
    pub y: AxisRequest,
    pub color: Option<String>,
    pub mode: RequestedMode,
    pub width: u32,
    pub height: u32,
    /// Bin width and optional origin by dimension.
    pub bins: BTreeMap<String, (f64, Option<f64>)>,
    pub seed: u64,
    pub mark_size: Option<f64>,
    pub jitter: Option<f64>,
}

impl Default for PlotRequest {
    fn default() -> PlotRequest {
        PlotRequest {
            x: AxisRequest::default(),
            y: AxisRequest::default(),
            color: None,
            mode: RequestedMode::Absolute,
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            bins: BTreeMap::new(),
            seed: 0,
            mark_size: None,
            jitter: None,
        }
    }
}

fn parse_transform(v: &str) -> Result<AxisTransform, String> {
    match v {
        "gather" => Ok(AxisTransform::Gather),
        "scatter" => Ok(AxisTransform::Scatter),
        "jitter" => Ok(AxisTransform::Jitter),
        _ => Err(format!("expected gather, scatter or jitter, got `{v}`")),
    }
}

fn parse_allocation(v: &str) -> Result<Allocation, String> {
    match v {
        "uniform" => Ok(Allocation::Uniform),
        "proportional" => Ok(Allocation::Proportional),
        _ => Err(format!("expected uniform or proportional, got `{v}`")),
    }
}

fn parse_order(v: &str) -> Result<SegmentOrder, String> {
    match v {
        "domain" => Ok(SegmentOrder::Domain),
        "count" => Ok(SegmentOrder::CountDescending),
        _ => Err(format!("expected domain or count, got `{v}`")),
    }
}

pub fn parse_mode(v: &str) -> Result<RequestedMode, String> {
    match v {
        "absolute" => Ok(RequestedMode::Absolute),
        "relative" => Ok(RequestedMode::Relative),
        _ => Err(format!("expected absolute or relative, got `{v}`")),
    }
}

pub fn parse_easing(v: &str) -> Result<Easing, String> {
    match v {
        "linear" => Ok(Easing::Linear),
        "cubic-in-out" => Ok(Easing::CubicInOut),
        _ => Err(format!("expected linear or cubic-in-out, got `{v}`")),
    }
}

fn parse_state(v: &str) -> Result<FoldState, String> {
    match v {
        "normal" => Ok(FoldState::Normal),
        "minimized" => Ok(FoldState::Minimized),
        "maximized" => Ok(FoldState::Maximized),
        _ => Err(format!("expected normal, minimized or maximized, got `{v}`")),
    }
}

/// `label:state`; the label may itself contain colons.
fn parse_fold(v: &str) -> Result<(String, FoldState), String> {
    let (label, state) = v
        .rsplit_once(':')
        .ok_or_else(|| format!("expected label:state, got `{v}`"))?;
    Ok((label.to_string(), parse_state(state)?))
}

fn parse_finite(v: &str) -> Result<f64, String> {
    match f64::from_str(v) {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, got `{v}`")),
    }
}

fn parse_positive(v: &str) -> Result<f64, String> {
    match parse_finite(v)? {
        x if x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got `{v}`")),
    }
}

/// `dim=width` or `dim=width,origin`.
fn parse_bins(v: &str) -> Result<(String, (f64, Option<f64>)), String> {
    let (dim, spec) = v
        .rsplit_once('=')
        .ok_or_else(|| format!("expected dim=width[,origin], got `{v}`"))?;
    if dim.is_empty() {
        return Err(format!("missing dimension in `{v}`"));
    }
    let (w, origin) = match spec.split_once(',') {
        Some((w, o)) => (w, Some(parse_finite(o)?)),
        None => (spec, None),
    };
    Ok((dim.to_string(), (parse_positive(w)?, origin)))
}

fn parse_size(v: &str) -> Result<u32, String> {
    match u32::from_str(v) {
        Ok(n) if (1..=20_000).contains(&n) => Ok(n),
        _ => Err(format!("expected an integer in 1..=20000, got `{v}`")),
    }
}

fn dimension(v: &str) -> Option<String> {
    (v != UNDEFINED && !v.is_empty()).then(|| v.to_string())
}

impl PlotRequest {
    /// Parses an `application/x-www-form-urlencoded` query string.
    pub fn from_query(query: &str) -> Result<PlotRequest, RequestErrors> {
        let pairs: Vec<(String, String)> = form_urlencoded::parse(query.as_bytes()).into_owned().collect();
        PlotRequest::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    /// Builds a request from key/value pairs, collecting every error.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<PlotRequest, RequestErrors> {
        let mut req = PlotRequest::default();
        let mut errors = Vec::new();
        for (key, value) in pairs {
            let result: Result<(), String> = (|| {
                match key {
                    "x" => req.x.dimension = dimension(value),
                    "y" => req.y.dimension = dimension(value),
                    "x_transform" => req.x.transform = parse_transform(value)?,
                    "y_transform" => req.y.transform = parse_transform(value)?,
                    "x_alloc" => req.x.allocation = parse_allocation(value)?,
                    "y_alloc" => req.y.allocation = parse_allocation(value)?,
                    "x_order" => req.x.order = parse_order(value)?,
                    "y_order" => req.y.order = parse_order(value)?,
                    "x_fold" => req.x.folds.push(parse_fold(value)?),
                    "y_fold" => req.y.folds.push(parse_fold(value)?),
                    "color" => req.color = dimension(value),
                    "mode" => req.mode = parse_mode(value)?,
                    "width" => req.width = parse_size(value)?,
                    "height" => req.height = parse_size(value)?,
                    "bins" => {
                        let (dim, spec) = parse_bins(value)?;
                        req.bins.insert(dim, spec);
                    }
                    "seed" => {
                        req.seed =
                            u64::from_str(value).map_err(|_| format!("expected an unsigned integer, got `{value}`"))?
                    }
                    "mark_size" => req.mark_size = Some(parse_positive(value)?),
                    "jitter" => req.jitter = Some(parse_positive(value)?),
                    _ => return Err("unknown parameter".to_string()),
                }
                Ok(())
            })();
            if let Err(message) = result {
                errors.push(FieldError::new(key, message));
            }
        }
        if errors.is_empty() {
            Ok(req)
        } else {
            Err(RequestErrors(errors))
        }
    }

    /// Key/value form of the request; [`PlotRequest::from_pairs`] inverts it.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (prefix, axis) in [("x", &self.x), ("y", &self.y)] {
            out.push((
                prefix.to_string(),
                axis.dimension.clone().unwrap_or_else(|| UNDEFINED.to_string()),
            ));
            let transform = match axis.transform {
                AxisTransform::Gather => "gather",
                AxisTransform::Scatter => "scatter",
                AxisTransform::Jitter => "jitter",
            };
            out.push((format!("{prefix}_transform"), transform.to_string()));
            let alloc = match axis.allocation {
                Allocation::Uniform => "uniform",
                Allocation::Proportional => "proportional",
            };
            out.push((format!("{prefix}_alloc"), alloc.to_string()));
            let order = match axis.order {
                SegmentOrder::Domain => "domain",
                SegmentOrder::CountDescending => "count",
            };
            out.push((format!("{prefix}_order"), order.to_string()));
            for (label, state) in &axis.folds {
                out.push((format!("{prefix}_fold"), format!("{label}:{state}")));
            }
        }
        if let Some(c) = &self.color {
            out.push(("color".into(), c.clone()));
        }
        let mode = match self.mode {
            RequestedMode::Absolute => "absolute",
            RequestedMode::Relative => "relative",
        };
        out.push(("mode".into(), mode.into()));
        out.push(("width".into(), self.width.to_string()));
        out.push(("height".into(), self.height.to_string()));
        for (dim, (w, origin)) in &self.bins {
            let spec = match origin {
                Some(o) => format!("{dim}={w},{o}"),
                None => format!("{dim}={w}"),
            };
            out.push(("bins".into(), spec));
        }
        out.push(("seed".into(), self.seed.to_string()));
        if let Some(s) = self.mark_size {
            out.push(("mark_size".into(), s.to_string()));
        }
        if let Some(j) = self.jitter {
            out.push(("jitter".into(), j.to_string()));
        }
        out
    }

    pub fn to_query(&self) -> String {
        form_urlencoded::Serializer::new(String::new())
            .extend_pairs(self.to_pairs())
            .finish()
    }

    /// Checks the request against `dataset` and builds the layout inputs.
    pub fn resolve(&self, dataset: &Dataset) -> Result<(PlotConfig, PlotOptions), RequestErrors> {
        let mut errors = Vec::new();
        let mut check_dim = |field: &str, name: &Option<String>| {
            if let Some(n) = name {
                if dataset.dimension(n).is_err() {
                    errors.push(FieldError::new(field, format!("unknown dimension `{n}`")));
                }
            }
        };
        check_dim("x", &self.x.dimension);
        check_dim("y", &self.y.dimension);
        check_dim("color", &self.color);
        let mut quantizers = BTreeMap::new();
        for (dim, &(w, origin)) in &self.bins {
            match dataset.dimension(dim) {
                Err(_) => errors.push(FieldError::new("bins", format!("unknown dimension `{dim}`"))),
                Ok(d) => {
                    let origin = origin.unwrap_or_else(|| match d.domain {
                        gatherplot_core::model::Domain::Range { min, .. } => (min / w).floor() * w,
                        _ => 0.0,
                    });
                    match Quantizer::new(w, origin) {
                        Ok(q) => {
                            quantizers.insert(dim.clone(), q);
                        }
                        Err(e) => errors.push(FieldError::new("bins", format!("{dim}: {e}"))),
                    }
                }
            }
        }
        if !errors.is_empty() {
            return Err(RequestErrors(errors));
        }
        let axis = |a: &AxisRequest| {
            let mut cfg = AxisConfig::undefined()
                .with_transform(a.transform)
                .with_allocation(a.allocation);
            if let Some(d) = &a.dimension {
                cfg.binding = Binding::Dimension(d.clone());
                if let Some(q) = quantizers.get(d) {
                    cfg = cfg.with_bins(*q);
                }
            }
            cfg.order = a.order;
            for (label, state) in &a.folds {
                cfg = cfg.with_fold(label.clone(), *state);
            }
            cfg
        };
        let mut cfg =
            PlotConfig::new(axis(&self.x), axis(&self.y), Canvas::new(self.width, self.height)).with_mode(self.mode);
        cfg.color = self.color.clone();
        let mut opts = PlotOptions {
            seed: self.seed,
            jitter_amplitude: self.jitter,
            ..PlotOptions::default()
        };
        if let Some(s) = self.mark_size {
            opts.scatter_mark_size = s;
        }
        Ok((cfg, opts))
    }
}

/// Attributes a layout failure to the request field that caused it.
pub fn layout_field_error(e: &LayoutError) -> FieldError {
    let axis_field = |axis: &Axis, suffix: &str| format!("{axis}_{suffix}");
    let field = match e {
        LayoutError::AllMinimized { axis }
        | LayoutError::MultipleMaximized { axis }
        | LayoutError::UnknownSegment { axis, .. } => axis_field(axis, "fold"),
        LayoutError::ProportionalWithoutGather { axis } => axis_field(axis, "alloc"),
        LayoutError::ExtentTooSmall { axis: Axis::X, .. } => "width".into(),
        LayoutError::ExtentTooSmall { axis: Axis::Y, .. } => "height".into(),
        LayoutError::CanvasTooSmall { .. } | LayoutError::ZeroAreaCell { .. } => "width".into(),
        LayoutError::Segment(_) => "bins".into(),
        LayoutError::NotAGatherplot => "x_transform".into(),
        LayoutError::Model(_) | LayoutError::NoMarks => "request".into(),
    };
    FieldError::new(field, e.to_string())
}

/// Overlap statistics request: `x`, `y` and mark size `s` (default 1).
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRequest {
    pub x: Option<String>,
    pub y: Option<String>,
    pub mark_size: f64,
}

impl StatsRequest {
    pub fn from_query(query: &str) -> Result<StatsRequest, RequestErrors> {
        let mut req = StatsRequest {
            x: None,
            y: None,
            mark_size: 1.0,
        };
        let mut errors = Vec::new();
        for (key, value) in form_urlencoded::parse(query.as_bytes()) {
            match key.as_ref() {
                "x" => req.x = dimension(&value),
                "y" => req.y = dimension(&value),
                "s" => match parse_positive(&value) {
                    Ok(s) => req.mark_size = s,
                    Err(m) => errors.push(FieldError::new("s", m)),
                },
                other => errors.push(FieldError::new(other, "unknown parameter")),
            }
        }
        if errors.is_empty() {
            Ok(req)
        } else {
            Err(RequestErrors(errors))
        }
    }
}

/// Transition request: `from` and `to` are URL-encoded [`PlotRequest`]
/// queries, `t` the fraction in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRequest {
    pub from: PlotRequest,
    pub to: PlotRequest,
    pub t: f64,
    pub easing: Easing,
}

impl TransitionRequest {
    pub fn from_query(query: &str) -> Result<TransitionRequest, RequestErrors> {
        let mut from = None;
        let mut to = None;
        let mut t = None;
        let mut easing = Easing::default();
        let mut errors = Vec::new();
        let nested = |field: &str, value: &str, errors: &mut Vec<FieldError>| match PlotRequest::from_query(value) {
            Ok(r) => Some(r),
            Err(RequestErrors(es)) => {
                errors.extend(
                    es.into_iter()
                        .map(|e| FieldError::new(format!("{field}.{}", e.field), e.message)),
                );
                None
            }
        };
        for (key, value) in form_urlencoded::parse(query.as_bytes()) {
            match key.as_ref() {
                "from" => from = nested("from", &value, &mut errors),
                "to" => to = nested("to", &value, &mut errors),
                "t" => match parse_finite(&value) {
                    Ok(v) if (0.0..=1.0).contains(&v) => t = Some(v),
                    _ => errors.push(FieldError::new(
                        "t",
                        format!("expected a number in [0, 1], got `{value}`"),
                    )),
                },
                "easing" => match parse_easing(&value) {
                    Ok(e) => easing = e,
                    Err(m) => errors.push(FieldError::new("easing", m)),
                },
                other => errors.push(FieldError::new(other, "unknown parameter")),
            }
        }
        for (field, present) in [("from", from.is_some()), ("to", to.is_some()), ("t", t.is_some())] {
            if !present
                && !errors
                    .iter()
                    .any(|e| e.field == field || e.field.starts_with(&format!("{field}.")))
            {
                errors.push(FieldError::new(field, "required"));
            }
        }
        match (from, to, t) {
            (Some(from), Some(to), Some(t)) if errors.is_empty() => Ok(TransitionRequest { from, to, t, easing }),
            _ => Err(RequestErrors(errors)),
        }
    }
}
