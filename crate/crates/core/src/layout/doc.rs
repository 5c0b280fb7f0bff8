//! Flat JSON document for layouts:
//! `{canvas, mode, x_axis: [{label, lo, hi, state, count}], y_axis, marks: [{id, x, y, w, h, r, fill}], color, x_title, y_title}`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{ColorEncoding, Rgb};
use crate::json::to_canonical_string;
use crate::model::PointId;

use super::{AxisSegment, AxisSegments, Canvas, Layout, LayoutMode, MarkPlacement, Rect};

#[derive(Debug, Error)]
pub enum LayoutDocError {
    #[error("layout json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("layout json: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkDoc {
    id: PointId,
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    r: f64,
    fill: Rgb,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutDoc {
    canvas: Canvas,
    mode: LayoutMode,
    x_axis: Vec<AxisSegment>,
    y_axis: Vec<AxisSegment>,
    marks: Vec<MarkDoc>,
    #[serde(default)]
    color: ColorEncoding,
    #[serde(default)]
    x_title: String,
    #[serde(default)]
    y_title: String,
}

impl Layout {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = LayoutDoc {
            canvas: self.canvas,
            mode: self.mode,
            x_axis: self.x_axis.segments.clone(),
            y_axis: self.y_axis.segments.clone(),
            marks: self
                .marks
                .iter()
                .map(|m| MarkDoc {
                    id: m.id,
                    x: m.rect.x,
                    y: m.rect.y,
                    w: m.rect.w,
                    h: m.rect.h,
                    r: m.corner_radius,
                    fill: m.fill,
                })
                .collect(),
            color: self.color,
            x_title: self.x_title.clone(),
            y_title: self.y_title.clone(),
        };
        serde_json::to_value(doc).expect("layout documents always serialize")
    }

    /// Canonical JSON: sorted keys, no whitespace.
    pub fn to_json(&self) -> String {
        to_canonical_string(&self.to_json_value())
    }

    /// Decodes and validates a layout document. Mark cells are recovered
    /// from the axis segment containing each mark's center.
    pub fn from_json(text: &str) -> Result<Layout, LayoutDocError> {
        let doc: LayoutDoc = serde_json::from_str(text)?;
        let invalid = |m: String| LayoutDocError::Invalid(m);
        let x_axis = check_axis(doc.x_axis, "x_axis").map_err(invalid)?;
        let y_axis = check_axis(doc.y_axis, "y_axis").map_err(invalid)?;
        let mut seen = HashSet::new();
        let mut marks = Vec::with_capacity(doc.marks.len());
        for m in doc.marks {
            if ![m.x, m.y, m.w, m.h, m.r].iter().all(|v| v.is_finite()) {
                return Err(invalid(format!("mark {}: non-finite geometry", m.id)));
            }
            if m.w <= 0.0 || m.h <= 0.0 || m.r < 0.0 {
                return Err(invalid(format!("mark {}: sizes must be positive", m.id)));
            }
            if !seen.insert(m.id) {
                return Err(invalid(format!("mark {} appears twice", m.id)));
            }
            let rect = Rect::new(m.x, m.y, m.w, m.h);
            let (cx, cy) = rect.center();
            let cell = match (x_axis.locate(cx), y_axis.locate(cy)) {
                (Some(xi), Some(yi)) => (xi, yi),
                _ => return Err(invalid(format!("mark {} lies outside every cell", m.id))),
            };
            marks.push(MarkPlacement {
                id: m.id,
                cell,
                rect,
                corner_radius: m.r,
                fill: m.fill,
            });
        }
        marks.sort_by_key(|m| m.id);
        Ok(Layout {
            canvas: doc.canvas,
            mode: doc.mode,
            x_axis,
            y_axis,
            marks,
            color: doc.color,
            x_title: doc.x_title,
            y_title: doc.y_title,
        })
    }
}

fn check_axis(segments: Vec<AxisSegment>, name: &str) -> Result<AxisSegments, String> {
    for (i, s) in segments.iter().enumerate() {
        if !(s.lo.is_finite() && s.hi.is_finite()) || s.hi < s.lo {
            return Err(format!("{name}[{i}]: bad interval"));
        }
        if i > 0 && segments[i - 1].hi != s.lo {
            return Err(format!("{name}[{i}]: segments must be contiguous"));
        }
    }
    Ok(AxisSegments { segments })
}

/// Number of mark pairs whose rectangles overlap. Sweeps in x order.
pub fn count_intersections(marks: &[MarkPlacement]) -> u64 {
    let mut rects: Vec<Rect> = marks.iter().map(|m| m.rect).collect();
    rects.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut count = 0;
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            if rects[j].x >= rects[i].right() {
                break;
            }
            if rects[i].intersects(&rects[j]) {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{EffectiveMode, FoldState, RequestedMode};

    fn sample() -> Layout {
        let seg = |label: &str, lo: f64, hi: f64| AxisSegment {
            label: label.into(),
            lo,
            hi,
            state: FoldState::Normal,
            count: 1,
        };
        Layout {
            canvas: Canvas::new(200, 100),
            mode: LayoutMode {
                requested: RequestedMode::Absolute,
                effective: EffectiveMode::Absolute,
                auto_switched: false,
            },
            x_axis: AxisSegments {
                segments: vec![seg("a", 0.0, 100.0), seg("b", 100.0, 200.0)],
            },
            y_axis: AxisSegments {
                segments: vec![seg("all", 0.0, 100.0)],
            },
            marks: vec![
                MarkPlacement {
                    id: 0,
                    cell: (0, 0),
                    rect: Rect::new(25.0, 25.0, 50.0, 50.0),
                    corner_radius: 3.0,
                    fill: Rgb(1, 2, 3),
                },
                MarkPlacement {
                    id: 1,
                    cell: (1, 0),
                    rect: Rect::new(125.5, 25.0, 50.0, 50.0),
                    corner_radius: 3.0,
                    fill: Rgb(4, 5, 6),
                },
            ],
            color: ColorEncoding::Nominal,
            x_title: "k".into(),
            y_title: "undefined".into(),
        }
    }

    #[test]
    fn document_shape() {
        let json = sample().to_json();
        assert!(json.starts_with(r##"{"canvas":{"height":100,"width":200},"color":"nominal","marks":[{"fill":"#010203","h":50.0,"id":0,"r":3.0,"w":50.0,"x":25.0,"y":25.0}"##), "{json}");
        assert!(!json.contains(' ') || json.contains("\"undefined\""));
    }

    #[test]
    fn round_trip() {
        let layout = sample();
        let back = Layout::from_json(&layout.to_json()).unwrap();
        assert_eq!(back, layout);
    }

    #[test]
    fn rejects_bad_documents() {
        let good = sample().to_json();
        assert!(Layout::from_json(&good.replace("\"w\":50.0,\"x\":25.0", "\"w\":-1.0,\"x\":25.0")).is_err());
        assert!(Layout::from_json(&good.replace("\"id\":1", "\"id\":0")).is_err());
        assert!(Layout::from_json(&good.replace("\"x\":125.5", "\"x\":525.5")).is_err());
        assert!(Layout::from_json("{}").is_err());
        assert!(Layout::from_json("[1,2").is_err());
    }

    #[test]
    fn intersections_counted() {
        let mut layout = sample();
        assert_eq!(count_intersections(&layout.marks), 0);
        layout.marks[1].rect = Rect::new(60.0, 30.0, 10.0, 10.0);
        assert_eq!(count_intersections(&layout.marks), 1);
    }
}
