//! Deterministic SVG output.
//!
//! Marks become rounded rectangles with id `mark-<point id>`, in point-id
//! order. Each axis segment gets an open bracket spanning its pixel interval
//! and one label; minimized segments also get a strip summarizing the colors
//! of their members.

use std::fmt::Write;

use thiserror::Error;

use crate::color::{ColorScheme, Rgb};
use crate::layout::{AxisSegments, FoldState, Layout};

/// Bracket ends sit this far inside the segment boundaries.
pub const BRACKET_INSET: f64 = 0.5;
const BRACKET_GAP: f64 = 4.0;
const BRACKET_DEPTH: f64 = 6.0;
const STRIP_DEPTH: f64 = 3.0;
/// Estimated glyph advance as a fraction of the font size.
pub const GLYPH_WIDTH: f64 = 0.6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("grid rows differ in length")]
    NonRectangular,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("theme: {0}")]
    Theme(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theme {
    pub colors: ColorScheme,
    pub font_size: f64,
    pub title_font_size: f64,
    pub bracket_stroke: f64,
    pub background: Rgb,
    pub ink: Rgb,
}

impl Default for Theme {
    fn default() -> Theme {
        Theme {
            colors: ColorScheme::default(),
            font_size: 11.0,
            title_font_size: 13.0,
            bracket_stroke: 1.0,
            background: Rgb(0xff, 0xff, 0xff),
            ink: Rgb(0x33, 0x33, 0x33),
        }
    }
}

impl Theme {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.colors.palette.is_empty() {
            return Err(RenderError::Theme("palette is empty".into()));
        }
        if self.colors.ramp.0 == self.colors.ramp.1 {
            return Err(RenderError::Theme("ramp endpoints must differ".into()));
        }
        if !(self.font_size > 0.0 && self.title_font_size > 0.0 && self.bracket_stroke > 0.0) {
            return Err(RenderError::Theme("sizes must be positive".into()));
        }
        Ok(())
    }
}

/// Shortest decimal form; `-0` prints as `0`.
fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
    out
}

/// Estimated rendered width of `text` at `font_size`.
pub fn text_width(text: &str, font_size: f64) -> f64 {
    text.chars().count() as f64 * font_size * GLYPH_WIDTH
}

pub fn render_svg(layout: &Layout, theme: &Theme) -> String {
    let (w, h) = (layout.canvas.width as f64, layout.canvas.height as f64);
    let flip = |y: f64| h - y;
    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif">"#,
        num(w),
        num(h)
    );
    let _ = write!(
        out,
        r#"<rect class="background" x="0" y="0" width="{}" height="{}" fill="{}"/>"#,
        num(w),
        num(h),
        theme.background
    );

    out.push_str(r#"<g class="marks">"#);
    for m in &layout.marks {
        let r = m.corner_radius;
        let _ = write!(
            out,
            r#"<rect id="mark-{}" x="{}" y="{}" width="{}" height="{}" rx="{}" ry="{}" fill="{}"/>"#,
            m.id,
            num(m.rect.x),
            num(flip(m.rect.top())),
            num(m.rect.w),
            num(m.rect.h),
            num(r),
            num(r),
            m.fill
        );
    }
    out.push_str("</g>");

    let plot_left = layout.x_axis.extent().map_or(0.0, |e| e.0);
    let plot_bottom = layout.y_axis.extent().map_or(0.0, |e| e.0);
    x_axis(&mut out, layout, theme, flip(plot_bottom) + BRACKET_GAP, h);
    y_axis(&mut out, layout, theme, plot_left - BRACKET_GAP, h);
    out.push_str("</svg>");
    out
}

/// Member fills of segment `i` in stacking order, run-length encoded.
fn strip_runs(layout: &Layout, axis_is_x: bool, i: usize) -> Vec<(Rgb, usize)> {
    let mut members: Vec<_> = layout
        .marks
        .iter()
        .filter(|m| if axis_is_x { m.cell.0 == i } else { m.cell.1 == i })
        .collect();
    // Along the other axis: cell first, then position.
    members.sort_by(|a, b| {
        if axis_is_x {
            a.cell
                .1
                .cmp(&b.cell.1)
                .then(a.rect.y.total_cmp(&b.rect.y))
                .then(a.rect.x.total_cmp(&b.rect.x))
        } else {
            a.cell
                .0
                .cmp(&b.cell.0)
                .then(a.rect.x.total_cmp(&b.rect.x))
                .then(a.rect.y.total_cmp(&b.rect.y))
        }
    });
    let mut runs: Vec<(Rgb, usize)> = Vec::new();
    for m in members {
        match runs.last_mut() {
            Some((c, n)) if *c == m.fill => *n += 1,
            _ => runs.push((m.fill, 1)),
        }
    }
    runs
}

fn bracket_attrs(theme: &Theme) -> String {
    format!(
        r#"fill="none" stroke="{}" stroke-width="{}""#,
        theme.ink,
        num(theme.bracket_stroke)
    )
}

fn x_axis(out: &mut String, layout: &Layout, theme: &Theme, y0: f64, canvas_h: f64) {
    let axis: &AxisSegments = &layout.x_axis;
    out.push_str(r#"<g class="axis x-axis">"#);
    for seg in axis.iter() {
        let (a, b) = (seg.lo + BRACKET_INSET, seg.hi - BRACKET_INSET);
        let _ = write!(
            out,
            r#"<path class="bracket" data-label="{}" data-state="{}" d="M{} {}V{}H{}V{}" {}/>"#,
            escape(&seg.label),
            seg.state,
            num(a),
            num(y0),
            num(y0 + BRACKET_DEPTH),
            num(b),
            num(y0),
            bracket_attrs(theme)
        );
    }
    for (i, seg) in axis.iter().enumerate().filter(|(_, s)| s.state == FoldState::Minimized) {
        let runs = strip_runs(layout, true, i);
        let total: usize = runs.iter().map(|r| r.1).sum();
        let (a, b) = (seg.lo + BRACKET_INSET, seg.hi - BRACKET_INSET);
        let mut done = 0;
        for (fill, n) in runs {
            let x0 = a + (b - a) * done as f64 / total as f64;
            done += n;
            let x1 = a + (b - a) * done as f64 / total as f64;
            let _ = write!(
                out,
                r#"<rect class="fold-strip" x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                num(x0),
                num(y0 + BRACKET_DEPTH + 1.0),
                num(x1 - x0),
                num(STRIP_DEPTH),
                fill
            );
        }
    }
    // Labels go in the first row where they clear their left neighbour.
    let line = theme.font_size + 2.0;
    let mut row_right: Vec<f64> = Vec::new();
    let base = y0 + BRACKET_DEPTH + STRIP_DEPTH + 1.0 + theme.font_size;
    let mut lowest = base;
    for seg in axis.iter() {
        let cx = (seg.lo + seg.hi) / 2.0;
        let half = text_width(&seg.label, theme.font_size) / 2.0;
        let row = row_right
            .iter()
            .position(|&r| r + 2.0 <= cx - half)
            .unwrap_or(row_right.len());
        if row == row_right.len() {
            row_right.push(f64::NEG_INFINITY);
        }
        row_right[row] = cx + half;
        let y = base + row as f64 * line;
        lowest = lowest.max(y);
        let _ = write!(
            out,
            r#"<text class="tick-label" x="{}" y="{}" text-anchor="middle" font-size="{}" fill="{}">{}</text>"#,
            num(cx),
            num(y),
            num(theme.font_size),
            theme.ink,
            escape(&seg.label)
        );
    }
    if let Some((lo, hi)) = axis.extent() {
        let y = (lowest + theme.title_font_size + 4.0)
            .min(canvas_h - 4.0)
            .max(lowest + 2.0);
        let _ = write!(
            out,
            r#"<text class="axis-title" x="{}" y="{}" text-anchor="middle" font-size="{}" fill="{}">{}</text>"#,
            num((lo + hi) / 2.0),
            num(y),
            num(theme.title_font_size),
            theme.ink,
            escape(&layout.x_title)
        );
    }
    out.push_str("</g>");
}

fn y_axis(out: &mut String, layout: &Layout, theme: &Theme, x0: f64, canvas_h: f64) {
    let flip = |y: f64| canvas_h - y;
    let axis = &layout.y_axis;
    out.push_str(r#"<g class="axis y-axis">"#);
    for seg in axis.iter() {
        let (a, b) = (flip(seg.lo) - BRACKET_INSET, flip(seg.hi) + BRACKET_INSET);
        let _ = write!(
            out,
            r#"<path class="bracket" data-label="{}" data-state="{}" d="M{} {}H{}V{}H{}" {}/>"#,
            escape(&seg.label),
            seg.state,
            num(x0),
            num(a),
            num(x0 - BRACKET_DEPTH),
            num(b),
            num(x0),
            bracket_attrs(theme)
        );
    }
    for (i, seg) in axis.iter().enumerate().filter(|(_, s)| s.state == FoldState::Minimized) {
        let runs = strip_runs(layout, false, i);
        let total: usize = runs.iter().map(|r| r.1).sum();
        let (a, b) = (seg.lo + BRACKET_INSET, seg.hi - BRACKET_INSET);
        let mut done = 0;
        for (fill, n) in runs {
            let y0 = a + (b - a) * done as f64 / total as f64;
            done += n;
            let y1 = a + (b - a) * done as f64 / total as f64;
            let _ = write!(
                out,
                r#"<rect class="fold-strip" x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                num(x0 - BRACKET_DEPTH - 1.0 - STRIP_DEPTH),
                num(flip(y1)),
                num(STRIP_DEPTH),
                num(y1 - y0),
                fill
            );
        }
    }
    // Right-aligned labels; a label that would overlap the one below it
    // moves one column further left.
    let column = axis
        .iter()
        .map(|s| text_width(&s.label, theme.font_size))
        .fold(0.0, f64::max)
        + 4.0;
    let right = x0 - BRACKET_DEPTH - STRIP_DEPTH - 3.0;
    let mut col_top: Vec<f64> = Vec::new();
    let mut leftmost = right;
    for seg in axis.iter() {
        let cy = flip((seg.lo + seg.hi) / 2.0);
        let (top, bottom) = (cy - theme.font_size / 2.0, cy + theme.font_size / 2.0);
        let col = col_top.iter().position(|&t| bottom + 1.0 <= t).unwrap_or(col_top.len());
        if col == col_top.len() {
            col_top.push(f64::INFINITY);
        }
        col_top[col] = top;
        leftmost = leftmost.min(right - col as f64 * column - text_width(&seg.label, theme.font_size));
        let _ = write!(
            out,
            r#"<text class="tick-label" x="{}" y="{}" text-anchor="end" font-size="{}" fill="{}">{}</text>"#,
            num(right - col as f64 * column),
            num(bottom - theme.font_size * 0.2),
            num(theme.font_size),
            theme.ink,
            escape(&seg.label)
        );
    }
    if let Some((lo, hi)) = axis.extent() {
        // Rotated glyphs reach about 0.75 em left of the baseline and
        // 0.25 em right of it.
        let f = theme.title_font_size;
        let cx = (leftmost - 2.0 - 0.25 * f).max(0.75 * f + 1.0);
        let cy = flip((lo + hi) / 2.0);
        let _ = write!(
            out,
            r#"<text class="axis-title" x="{0}" y="{1}" text-anchor="middle" font-size="{2}" fill="{3}" transform="rotate(-90 {0} {1})">{4}</text>"#,
            num(cx),
            num(cy),
            num(theme.title_font_size),
            theme.ink,
            escape(&layout.y_title)
        );
    }
    out.push_str("</g>");
}

const MATRIX_MARGIN: f64 = 24.0;

/// Lays panels out in a grid with the dimension names along the top and
/// left margins. Each panel is the [`render_svg`] document of its layout.
pub fn render_matrix_svg(grid: &[Vec<Layout>], theme: &Theme) -> Result<String, RenderError> {
    let cols = grid.first().map(Vec::len).ok_or(RenderError::EmptyGrid)?;
    if cols == 0 {
        return Err(RenderError::EmptyGrid);
    }
    if grid.iter().any(|row| row.len() != cols) {
        return Err(RenderError::NonRectangular);
    }
    let col_w: Vec<f64> = (0..cols)
        .map(|j| grid.iter().map(|r| r[j].canvas.width as f64).fold(0.0, f64::max))
        .collect();
    let row_h: Vec<f64> = grid
        .iter()
        .map(|r| r.iter().map(|l| l.canvas.height as f64).fold(0.0, f64::max))
        .collect();
    let width = MATRIX_MARGIN + col_w.iter().sum::<f64>();
    let height = MATRIX_MARGIN + row_h.iter().sum::<f64>();
    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif">"#,
        num(width),
        num(height)
    );
    let _ = write!(
        out,
        r#"<rect class="background" x="0" y="0" width="{}" height="{}" fill="{}"/>"#,
        num(width),
        num(height),
        theme.background
    );
    let mut x = MATRIX_MARGIN;
    for (j, w) in col_w.iter().enumerate() {
        let _ = write!(
            out,
            r#"<text class="matrix-label column" x="{}" y="{}" text-anchor="middle" font-size="{}" fill="{}">{}</text>"#,
            num(x + w / 2.0),
            num(MATRIX_MARGIN - 8.0),
            num(theme.title_font_size),
            theme.ink,
            escape(&grid[0][j].x_title)
        );
        x += w;
    }
    let mut y = MATRIX_MARGIN;
    for (i, h) in row_h.iter().enumerate() {
        let (cx, cy) = (MATRIX_MARGIN - 8.0, y + h / 2.0);
        let _ = write!(
            out,
            r#"<text class="matrix-label row" x="{0}" y="{1}" text-anchor="middle" font-size="{2}" fill="{3}" transform="rotate(-90 {0} {1})">{4}</text>"#,
            num(cx),
            num(cy),
            num(theme.title_font_size),
            theme.ink,
            escape(&grid[i][0].y_title)
        );
        y += h;
    }
    let mut y = MATRIX_MARGIN;
    for (i, row) in grid.iter().enumerate() {
        let mut x = MATRIX_MARGIN;
        for (j, layout) in row.iter().enumerate() {
            let _ = write!(
                out,
                r#"<g class="panel" data-row="{i}" data-col="{j}" transform="translate({} {})">"#,
                num(x),
                num(y)
            );
            out.push_str(&render_svg(layout, theme));
            out.push_str("</g>");
            x += col_w[j];
        }
        y += row_h[i];
    }
    out.push_str("</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{
        gatherplot, AxisConfig, AxisSegment, Canvas, EffectiveMode, LayoutMode, PlotConfig, PlotOptions, RequestedMode,
    };
    use crate::model::{Dataset, Value};

    fn empty_layout() -> Layout {
        let ds = Dataset::from_rows(vec!["a".into()], vec![]).unwrap();
        let cfg = PlotConfig::new(AxisConfig::undefined(), AxisConfig::undefined(), Canvas::new(300, 200));
        gatherplot(&ds, &cfg, &PlotOptions::default()).unwrap()
    }

    #[test]
    fn empty_dataset_renders_axes_only() {
        let svg = render_svg(&empty_layout(), &Theme::default());
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>"));
        assert_eq!(svg.matches("id=\"mark-").count(), 0);
        assert_eq!(svg.matches("class=\"bracket\"").count(), 2);
    }

    #[test]
    fn one_bracket_per_segment() {
        let rows = ["a", "b", "c", "d", "a"]
            .iter()
            .map(|s| vec![Value::Text(s.to_string())])
            .collect();
        let ds = Dataset::from_rows(vec!["k".into()], rows).unwrap();
        let cfg = PlotConfig::new(AxisConfig::gather("k"), AxisConfig::undefined(), Canvas::new(400, 300));
        let layout = gatherplot(&ds, &cfg, &PlotOptions::default()).unwrap();
        let svg = render_svg(&layout, &Theme::default());
        let x_part = &svg[svg.find("x-axis").unwrap()..svg.find("y-axis").unwrap()];
        assert_eq!(x_part.matches("class=\"bracket\"").count(), 4);
        assert_eq!(svg.matches("id=\"mark-").count(), 5);
        assert_eq!(svg, render_svg(&layout, &Theme::default()));
    }

    #[test]
    fn labels_are_escaped() {
        let mut layout = empty_layout();
        layout.x_axis.segments[0].label = "<a&b>".into();
        let svg = render_svg(&layout, &Theme::default());
        assert!(svg.contains("&lt;a&amp;b&gt;"));
        assert!(!svg.contains("<a&b>"));
    }

    #[test]
    fn minimized_segments_get_strips() {
        let mut layout = empty_layout();
        layout.x_axis.segments = vec![
            AxisSegment {
                label: "a".into(),
                lo: 72.0,
                hi: 84.0,
                state: FoldState::Minimized,
                count: 0,
            },
            AxisSegment {
                label: "b".into(),
                lo: 84.0,
                hi: 288.0,
                state: FoldState::Normal,
                count: 0,
            },
        ];
        layout.mode = LayoutMode {
            requested: RequestedMode::Absolute,
            effective: EffectiveMode::Absolute,
            auto_switched: false,
        };
        let svg = render_svg(&layout, &Theme::default());
        // No members, so no strip pieces.
        assert_eq!(svg.matches("fold-strip").count(), 0);
    }

    #[test]
    fn matrix_errors() {
        let l = empty_layout();
        assert_eq!(render_matrix_svg(&[], &Theme::default()), Err(RenderError::EmptyGrid));
        assert_eq!(
            render_matrix_svg(&[vec![l.clone(), l.clone()], vec![l.clone()]], &Theme::default()),
            Err(RenderError::NonRectangular)
        );
        let one = render_matrix_svg(&[vec![l.clone()]], &Theme::default()).unwrap();
        assert!(one.contains(&render_svg(&l, &Theme::default())));
        assert_eq!(one.matches("class=\"panel\"").count(), 1);
    }

    #[test]
    fn theme_validation() {
        assert!(Theme::default().validate().is_ok());
        let mut t = Theme::default();
        t.colors.palette.clear();
        assert!(t.validate().is_err());
        let mut t = Theme::default();
        t.colors.ramp.1 = t.colors.ramp.0;
        assert!(t.validate().is_err());
    }
}
