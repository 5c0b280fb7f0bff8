//! Interpolation between two layouts of the same dataset.
//!
//! Marks are matched by point id and move along straight lines. Axis
//! intervals interpolate when both layouts carry the same segment labels and
//! switch at the midpoint otherwise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::ColorEncoding;
use crate::layout::{AxisSegment, AxisSegments, Layout, MarkPlacement, Rect};

/// Default animation length used by the explorer client.
pub const DEFAULT_DURATION_MS: u64 = 800;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransitionError {
    #[error("layouts disagree on point ids ({from} vs {to} marks)")]
    IdentityMismatch { from: usize, to: usize },
    #[error("t must lie in [0, 1], got {0}")]
    OutOfRange(f64),
    #[error("frame rate must be positive, got {0}")]
    FrameRate(f64),
    #[error("duration must be positive")]
    Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Easing {
    Linear,
    #[default]
    CubicInOut,
}

impl Easing {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Easing::Linear => t,
            Easing::CubicInOut if t < 0.5 => 4.0 * t * t * t,
            Easing::CubicInOut => {
                let u = -2.0 * t + 2.0;
                1.0 - u * u * u / 2.0
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPlan {
    pub from: Layout,
    pub to: Layout,
    pub duration_ms: u64,
    pub easing: Easing,
}

impl TransitionPlan {
    /// Checks that both layouts hold the same point ids.
    pub fn new(from: Layout, to: Layout, duration_ms: u64, easing: Easing) -> Result<TransitionPlan, TransitionError> {
        if from.marks.len() != to.marks.len() || from.marks.iter().zip(&to.marks).any(|(a, b)| a.id != b.id) {
            return Err(TransitionError::IdentityMismatch {
                from: from.marks.len(),
                to: to.marks.len(),
            });
        }
        Ok(TransitionPlan {
            from,
            to,
            duration_ms,
            easing,
        })
    }
}

// Exact at both ends: (1 - 0)·a + 0·b = a and 0·a + 1·b = b.
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    (1.0 - t) * a + t * b
}

fn lerp_axis(from: &AxisSegments, to: &AxisSegments, t: f64) -> AxisSegments {
    let same = from.len() == to.len() && from.iter().zip(to.iter()).all(|(a, b)| a.label == b.label);
    if !same {
        return if t < 0.5 { from.clone() } else { to.clone() };
    }
    AxisSegments {
        segments: from
            .iter()
            .zip(to.iter())
            .map(|(a, b)| AxisSegment {
                label: a.label.clone(),
                lo: lerp(a.lo, b.lo, t),
                hi: lerp(a.hi, b.hi, t),
                state: if t < 0.5 { a.state } else { b.state },
                count: if t < 0.5 { a.count } else { b.count },
            })
            .collect(),
    }
}

/// Layout at fraction `t` of the transition (easing applied to `t`).
pub fn interpolate(plan: &TransitionPlan, t: f64) -> Result<Layout, TransitionError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(TransitionError::OutOfRange(t));
    }
    let (from, to) = (&plan.from, &plan.to);
    if from.marks.len() != to.marks.len() {
        return Err(TransitionError::IdentityMismatch {
            from: from.marks.len(),
            to: to.marks.len(),
        });
    }
    let e = plan.easing.apply(t);
    let blend_colors = from.color == ColorEncoding::Continuous && to.color == ColorEncoding::Continuous;
    let marks = from
        .marks
        .iter()
        .zip(&to.marks)
        .map(|(a, b)| {
            if a.id != b.id {
                return Err(TransitionError::IdentityMismatch {
                    from: from.marks.len(),
                    to: to.marks.len(),
                });
            }
            let rect = Rect::new(
                lerp(a.rect.x, b.rect.x, e),
                lerp(a.rect.y, b.rect.y, e),
                lerp(a.rect.w, b.rect.w, e),
                lerp(a.rect.h, b.rect.h, e),
            );
            let fill = if blend_colors {
                a.fill.lerp(b.fill, e)
            } else if e < 0.5 {
                a.fill
            } else {
                b.fill
            };
            Ok(MarkPlacement {
                id: a.id,
                cell: if e < 0.5 { a.cell } else { b.cell },
                rect,
                corner_radius: lerp(a.corner_radius, b.corner_radius, e),
                fill,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let late = e >= 0.5;
    Ok(Layout {
        canvas: if late { to.canvas } else { from.canvas },
        mode: if late { to.mode } else { from.mode },
        x_axis: lerp_axis(&from.x_axis, &to.x_axis, e),
        y_axis: lerp_axis(&from.y_axis, &to.y_axis, e),
        marks,
        color: if late { to.color } else { from.color },
        x_title: if late { &to.x_title } else { &from.x_title }.clone(),
        y_title: if late { &to.y_title } else { &from.y_title }.clone(),
    })
}

/// Number of frames for a transition: `ceil(duration · fps / 1000) + 1`.
pub fn frame_count(duration_ms: u64, fps: f64) -> Result<usize, TransitionError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(TransitionError::FrameRate(fps));
    }
    if duration_ms == 0 {
        return Err(TransitionError::Duration);
    }
    Ok((duration_ms as f64 * fps / 1000.0).ceil() as usize + 1)
}

/// Evenly spaced frames from `plan.from` to `plan.to`, both included.
pub fn keyframes(plan: &TransitionPlan, fps: f64) -> Result<Vec<Layout>, TransitionError> {
    let n = frame_count(plan.duration_ms, fps)?;
    (0..n).map(|i| interpolate(plan, i as f64 / (n - 1) as f64)).collect()
}
