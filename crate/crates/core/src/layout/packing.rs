use crate::model::PointId;

use super::{snap, EffectiveMode, LayoutError, LayoutMode, Rect, RequestedMode, GRID, STREAMGRAPH_ASPECT};

/// Relative requests stay relative; absolute requests switch to streamgraph
/// when the cell aspect ratio (long edge over short edge) exceeds 3.
pub fn select_mode(requested: RequestedMode, cell_aspect: f64) -> LayoutMode {
    let effective = match requested {
        RequestedMode::Relative => EffectiveMode::Relative,
        RequestedMode::Absolute if cell_aspect > STREAMGRAPH_ASPECT => EffectiveMode::Streamgraph,
        RequestedMode::Absolute => EffectiveMode::Absolute,
    };
    LayoutMode {
        requested,
        effective,
        auto_switched: effective == EffectiveMode::Streamgraph,
    }
}

/// How many marks of size `s` fit along `len`. Tolerates the rounding in
/// `len / (len / k)`.
pub fn fit_count(len: f64, s: f64) -> u64 {
    if s <= 0.0 || len <= 0.0 {
        return 0;
    }
    (len / s + 1e-9).floor() as u64
}

/// Square marks of size `s` that fit in a `w` by `h` grid.
pub fn capacity(w: f64, h: f64, s: f64) -> u64 {
    fit_count(w, s) * fit_count(h, s)
}

/// Largest square size that fits `count` marks into a `w` by `h` cell.
///
/// The optimum puts some column count `a` across the width, so it is the best
/// of `min(w / a, h / ceil(count / a))` over `a` in `1..=count`.
pub fn max_mark_size(w: f64, h: f64, count: usize) -> f64 {
    if count == 0 {
        return w.min(h);
    }
    let n = count as u64;
    (1..=n)
        .map(|a| (w / a as f64).min(h / n.div_ceil(a) as f64))
        .fold(0.0, f64::max)
}

/// One mark size for every fully gathered cell: the largest size at which
/// every non-empty cell still holds its members. With equal cells this is
/// the size dictated by the densest cell.
pub fn absolute_mark_size(cells: &[(Rect, usize)]) -> Result<f64, LayoutError> {
    let mut size = f64::INFINITY;
    for &(rect, count) in cells.iter().filter(|(_, c)| *c > 0) {
        if rect.w <= 0.0 || rect.h <= 0.0 {
            return Err(LayoutError::ZeroAreaCell { count });
        }
        size = size.min(max_mark_size(rect.w, rect.h, count));
    }
    if size.is_finite() {
        Ok(size)
    } else {
        Err(LayoutError::NoMarks)
    }
}

/// Streamgraph parameters: `rows` marks along every cell's short edge, with
/// runs along the long edge. `rows` comes from the densest cell.
pub fn streamgraph_packing(cells: &[(Rect, usize)]) -> Result<CellPacking, LayoutError> {
    let occupied: Vec<&(Rect, usize)> = cells.iter().filter(|(_, c)| *c > 0).collect();
    if let Some((_, count)) = occupied.iter().find(|(r, _)| r.w <= 0.0 || r.h <= 0.0) {
        return Err(LayoutError::ZeroAreaCell { count: *count });
    }
    let &&(dense, max_count) = occupied
        .iter()
        .max_by(|a, b| {
            a.1.cmp(&b.1)
                .then(b.0.x.total_cmp(&a.0.x))
                .then(b.0.y.total_cmp(&a.0.y))
        })
        .ok_or(LayoutError::NoMarks)?;
    let rows = ((max_count as f64 / dense.aspect()).sqrt().ceil() as usize).max(1);
    let size = occupied
        .iter()
        .map(|(r, c)| {
            let (long, short) = (r.w.max(r.h), r.w.min(r.h));
            let across = rows.min(*c) as f64;
            let runs = c.div_ceil(rows) as f64;
            (short / across).min(long / runs)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(CellPacking::Streamgraph { rows, size })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellPacking {
    /// Square marks of one global size on a grid matching the cell aspect.
    Absolute { size: f64 },
    /// Equal-area marks tiling the whole cell.
    Relative,
    /// Square marks, `rows` across the short edge.
    Streamgraph { rows: usize, size: f64 },
}

/// `count + 1` snapped edges starting at `start`, `step` apart. Falls back to
/// unsnapped edges if snapping would collapse a mark.
fn edges(start: f64, step: f64, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..=count).map(|i| start + i as f64 * step).collect();
    let snapped: Vec<f64> = raw.iter().map(|&v| snap(v)).collect();
    if snapped.windows(2).all(|w| w[1] > w[0]) {
        snapped
    } else {
        raw
    }
}

/// Edges of `count` equal marks on the grid: the step is rounded down and the
/// start rounded to stay within `[start, start + count * step]`.
fn uniform_edges(start: f64, step: f64, count: usize) -> Vec<f64> {
    let s = (step * GRID).floor() / GRID;
    if s <= 0.0 {
        return (0..=count).map(|i| start + i as f64 * step).collect();
    }
    let end = start + count as f64 * step;
    let mut x0 = (start * GRID).ceil() / GRID;
    if x0 + count as f64 * s > end {
        x0 = (start * GRID).floor() / GRID;
    }
    (0..=count).map(|i| x0 + i as f64 * s).collect()
}

/// Packs `members` (already in stacking order) into `cell`. Marks fill from
/// the bottom-left; rows run left to right.
pub fn layout_cell(cell: Rect, members: &[PointId], packing: CellPacking) -> Vec<(PointId, Rect)> {
    let n = members.len();
    if n == 0 {
        return Vec::new();
    }
    match packing {
        CellPacking::Absolute { size } => {
            let max_cols = fit_count(cell.w, size).max(1) as usize;
            let max_rows = fit_count(cell.h, size).max(1) as usize;
            let want = (n as f64 * cell.w / cell.h).sqrt().ceil() as usize;
            let cols = want.max(n.div_ceil(max_rows)).min(max_cols).min(n).max(1);
            let rows = n.div_ceil(cols);
            let x0 = cell.x + (cell.w - cols as f64 * size) / 2.0;
            let y0 = cell.y + (cell.h - rows as f64 * size) / 2.0;
            let xe = uniform_edges(x0.max(cell.x), size, cols);
            let ye = uniform_edges(y0.max(cell.y), size, rows);
            members
                .iter()
                .enumerate()
                .map(|(i, &id)| {
                    let (r, c) = (i / cols, i % cols);
                    (id, Rect::new(xe[c], ye[r], xe[c + 1] - xe[c], ye[r + 1] - ye[r]))
                })
                .collect()
        }
        CellPacking::Relative => {
            let rows = ((n as f64 * cell.h / cell.w).sqrt().round() as usize).clamp(1, n);
            let (base, extra) = (n / rows, n % rows);
            let per_row: Vec<usize> = (0..rows).map(|r| base + usize::from(r < extra)).collect();
            // Row heights proportional to row populations keep every mark at
            // exactly cell area / n.
            let mut cum = 0;
            let mut ye = vec![snap(cell.y)];
            for &k in &per_row {
                cum += k;
                ye.push(snap(cell.y + cell.h * cum as f64 / n as f64));
            }
            if ye.windows(2).any(|w| w[1] <= w[0]) {
                ye = std::iter::once(cell.y)
                    .chain(per_row.iter().scan(0, |c, &k| {
                        *c += k;
                        Some(cell.y + cell.h * *c as f64 / n as f64)
                    }))
                    .collect();
            }
            let mut out = Vec::with_capacity(n);
            let mut it = members.iter();
            for (r, &k) in per_row.iter().enumerate() {
                let xe = edges(cell.x, cell.w / k as f64, k);
                for c in 0..k {
                    let id = *it.next().expect("row sizes sum to member count");
                    out.push((id, Rect::new(xe[c], ye[r], xe[c + 1] - xe[c], ye[r + 1] - ye[r])));
                }
            }
            out
        }
        CellPacking::Streamgraph { rows, size } => {
            let across = rows.min(n).max(1);
            let runs = n.div_ceil(rows.max(1));
            let horizontal = cell.w >= cell.h;
            let (long_len, short_len) = if horizontal { (cell.w, cell.h) } else { (cell.h, cell.w) };
            let (long0, short0) = if horizontal { (cell.x, cell.y) } else { (cell.y, cell.x) };
            let le = uniform_edges((long0 + (long_len - runs as f64 * size) / 2.0).max(long0), size, runs);
            let se = uniform_edges(
                (short0 + (short_len - across as f64 * size) / 2.0).max(short0),
                size,
                across,
            );
            members
                .iter()
                .enumerate()
                .map(|(i, &id)| {
                    let (run, pos) = (i / rows.max(1), i % rows.max(1));
                    let (l0, l1, s0, s1) = (le[run], le[run + 1], se[pos], se[pos + 1]);
                    let rect = if horizontal {
                        Rect::new(l0, s0, l1 - l0, s1 - s0)
                    } else {
                        Rect::new(s0, l0, s1 - s0, l1 - l0)
                    };
                    (id, rect)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_intersections(rects: &[(PointId, Rect)]) -> bool {
        rects
            .iter()
            .enumerate()
            .all(|(i, a)| rects[i + 1..].iter().all(|b| !a.1.intersects(&b.1)))
    }

    #[test]
    fn mode_rule() {
        assert_eq!(
            select_mode(RequestedMode::Absolute, 1.0).effective,
            EffectiveMode::Absolute
        );
        let m = select_mode(RequestedMode::Absolute, 4.0);
        assert_eq!(m.effective, EffectiveMode::Streamgraph);
        assert!(m.auto_switched);
        assert_eq!(
            select_mode(RequestedMode::Absolute, 3.0).effective,
            EffectiveMode::Absolute
        );
        assert_eq!(
            select_mode(RequestedMode::Relative, 8.0).effective,
            EffectiveMode::Relative
        );
    }

    #[test]
    fn mark_size_examples() {
        let cell = |w, h| Rect::new(0.0, 0.0, w, h);
        assert_eq!(absolute_mark_size(&[(cell(100.0, 100.0), 4)]), Ok(50.0));
        assert_eq!(absolute_mark_size(&[(cell(100.0, 100.0), 1)]), Ok(100.0));
        assert_eq!(absolute_mark_size(&[(cell(200.0, 100.0), 8)]), Ok(50.0));
        // Densest of equal cells decides.
        assert_eq!(
            absolute_mark_size(&[
                (cell(100.0, 100.0), 1),
                (cell(100.0, 100.0), 4),
                (cell(100.0, 100.0), 0)
            ]),
            Ok(50.0)
        );
        assert_eq!(
            absolute_mark_size(&[(cell(0.0, 100.0), 3)]),
            Err(LayoutError::ZeroAreaCell { count: 3 })
        );
        assert_eq!(absolute_mark_size(&[(cell(10.0, 10.0), 0)]), Err(LayoutError::NoMarks));
    }

    #[test]
    fn absolute_grid_example() {
        let rects = layout_cell(
            Rect::new(0.0, 0.0, 100.0, 100.0),
            &[0, 1, 2, 3],
            CellPacking::Absolute { size: 50.0 },
        );
        let origins: Vec<(f64, f64)> = rects.iter().map(|(_, r)| (r.x, r.y)).collect();
        assert_eq!(origins, [(0.0, 0.0), (50.0, 0.0), (0.0, 50.0), (50.0, 50.0)]);
        assert!(rects.iter().all(|(_, r)| r.w == 50.0 && r.h == 50.0));
        assert!(no_intersections(&rects));
    }

    #[test]
    fn absolute_block_is_centered() {
        let cell = Rect::new(10.0, 20.0, 100.0, 100.0);
        let rects = layout_cell(cell, &[0], CellPacking::Absolute { size: 20.0 });
        assert_eq!(rects[0].1, Rect::new(50.0, 60.0, 20.0, 20.0));
    }

    #[test]
    fn absolute_follows_cell_aspect() {
        let ids: Vec<PointId> = (0..8).collect();
        let rects = layout_cell(
            Rect::new(0.0, 0.0, 200.0, 100.0),
            &ids,
            CellPacking::Absolute { size: 50.0 },
        );
        let rows: std::collections::BTreeSet<u64> = rects.iter().map(|(_, r)| r.y.to_bits()).collect();
        assert_eq!(rows.len(), 2);
        assert!(no_intersections(&rects));
    }

    #[test]
    fn relative_tiles_cell() {
        let ids: Vec<PointId> = (0..10).collect();
        let cell = Rect::new(0.0, 0.0, 100.0, 100.0);
        let rects = layout_cell(cell, &ids, CellPacking::Relative);
        let total: f64 = rects.iter().map(|(_, r)| r.area()).sum();
        assert!((total - 10_000.0).abs() < 1e-9);
        // First six stand in for the red subgroup.
        let red: f64 = rects[..6].iter().map(|(_, r)| r.area()).sum();
        // Snapping moves each mark edge by at most half a grid step.
        assert!((red - 6_000.0).abs() <= 100.0 / 256.0, "{red}");
        assert!(no_intersections(&rects));
        assert!(rects.iter().all(|(_, r)| cell.contains(r)));
    }

    #[test]
    fn streamgraph_example() {
        let cell = Rect::new(0.0, 0.0, 300.0, 50.0);
        let packing = streamgraph_packing(&[(cell, 10)]).unwrap();
        assert_eq!(packing, CellPacking::Streamgraph { rows: 2, size: 25.0 });
        let ids: Vec<PointId> = (0..10).collect();
        let rects = layout_cell(cell, &ids, packing);
        let ys: std::collections::BTreeSet<u64> = rects.iter().map(|(_, r)| r.y.to_bits()).collect();
        assert_eq!(ys.len(), 2);
        let min_x = rects.iter().map(|(_, r)| r.x).fold(f64::INFINITY, f64::min);
        let max_x = rects.iter().map(|(_, r)| r.right()).fold(0.0, f64::max);
        assert_eq!((min_x, max_x), (87.5, 212.5));
        assert!(rects.iter().all(|(_, r)| r.w == 25.0 && r.h == 25.0));
        assert!(no_intersections(&rects));
    }

    #[test]
    fn streamgraph_vertical_cells() {
        let cell = Rect::new(0.0, 0.0, 40.0, 400.0);
        let packing = streamgraph_packing(&[(cell, 30)]).unwrap();
        let ids: Vec<PointId> = (0..30).collect();
        let rects = layout_cell(cell, &ids, packing);
        assert!(no_intersections(&rects));
        assert!(rects.iter().all(|(_, r)| cell.contains(r)));
    }

    #[test]
    fn capacity_tolerates_rounding() {
        for a in 1..200u64 {
            let w = 97.0;
            assert_eq!(fit_count(w, w / a as f64), a);
        }
    }
}
