use crate::segment::SegmentedDomain;

use super::{Allocation, Axis, AxisConfig, AxisSegment, AxisSegments, FoldState, LayoutError, FOLD_W};

/// Splits an integer `total` into parts proportional to `weights` whose sum
/// is exactly `total`. Leftover units go to the largest fractional parts,
/// earlier indices first on ties.
pub fn largest_remainder(weights: &[f64], total: i64) -> Vec<i64> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() {
        return Vec::new();
    }
    if sum <= 0.0 {
        return largest_remainder(&vec![1.0; weights.len()], total);
    }
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut parts: Vec<i64> = quotas.iter().map(|q| q.floor() as i64).collect();
    let mut left = total - parts.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left <= 0 {
            break;
        }
        parts[i] += 1;
        left -= 1;
    }
    parts
}

/// Effective fold state of every segment: a maximized segment minimizes all
/// the others.
fn resolve_states(cfg: &AxisConfig, domain: &SegmentedDomain) -> Vec<FoldState> {
    let maximized = domain
        .segments
        .iter()
        .position(|s| cfg.folds.get(&s.label) == Some(&FoldState::Maximized));
    domain
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| match maximized {
            Some(m) if m == i => FoldState::Maximized,
            Some(_) => FoldState::Minimized,
            None => match cfg.folds.get(&s.label) {
                Some(FoldState::Minimized) => FoldState::Minimized,
                _ => FoldState::Normal,
            },
        })
        .collect()
}

/// Assigns each segment a whole-pixel interval of `extent`.
///
/// Minimized segments get [`FOLD_W`]; the rest share what remains, equally
/// under uniform allocation or by point count under proportional allocation.
pub fn segment_axis(
    cfg: &AxisConfig,
    domain: &SegmentedDomain,
    extent: (f64, f64),
    axis: Axis,
) -> Result<AxisSegments, LayoutError> {
    cfg.validate(axis)?;
    if let Some(label) = cfg
        .folds
        .keys()
        .find(|l| !domain.segments.iter().any(|s| &s.label == *l))
    {
        return Err(LayoutError::UnknownSegment {
            axis,
            label: label.clone(),
        });
    }
    let states = resolve_states(cfg, domain);
    if states.is_empty() {
        return Ok(AxisSegments::default());
    }
    if states.iter().all(|s| *s == FoldState::Minimized) {
        return Err(LayoutError::AllMinimized { axis });
    }
    let total = (extent.1 - extent.0).round() as i64;
    let folded = states.iter().filter(|s| **s == FoldState::Minimized).count() as i64;
    let open: Vec<usize> = (0..states.len())
        .filter(|&i| states[i] != FoldState::Minimized)
        .collect();
    let remaining = total - folded * FOLD_W as i64;
    if remaining < open.len() as i64 {
        return Err(LayoutError::ExtentTooSmall {
            axis,
            width: extent.1 - extent.0,
        });
    }
    let weights: Vec<f64> = open
        .iter()
        .map(|&i| match cfg.allocation {
            Allocation::Uniform => 1.0,
            Allocation::Proportional => domain.segments[i].count as f64,
        })
        .collect();
    let mut shares = largest_remainder(&weights, remaining);
    if cfg.allocation == Allocation::Proportional {
        // A populated segment never collapses to zero width.
        for k in 0..shares.len() {
            if shares[k] == 0 && domain.segments[open[k]].count > 0 {
                let donor = (0..shares.len())
                    .max_by_key(|&j| (shares[j], std::cmp::Reverse(j)))
                    .unwrap_or(k);
                if shares[donor] > 1 {
                    shares[donor] -= 1;
                    shares[k] += 1;
                }
            }
        }
    }
    let mut widths = vec![FOLD_W as i64; states.len()];
    for (k, &i) in open.iter().enumerate() {
        widths[i] = shares[k];
    }
    let mut lo = extent.0.round();
    let segments = domain
        .segments
        .iter()
        .zip(states)
        .zip(widths)
        .map(|((seg, state), w)| {
            let hi = lo + w as f64;
            let out = AxisSegment {
                label: seg.label.clone(),
                lo,
                hi,
                state,
                count: seg.count,
            };
            lo = hi;
            out
        })
        .collect();
    Ok(AxisSegments { segments })
}

/// Returns `cfg` with `label` set to `state`.
///
/// Maximizing replaces any earlier maximized segment; setting a segment back
/// to normal removes its entry, so minimize-then-restore is the identity.
pub fn fold_axis(
    cfg: &AxisConfig,
    domain: &SegmentedDomain,
    axis: Axis,
    label: &str,
    state: FoldState,
) -> Result<AxisConfig, LayoutError> {
    if !domain.segments.iter().any(|s| s.label == label) {
        return Err(LayoutError::UnknownSegment {
            axis,
            label: label.to_string(),
        });
    }
    let mut out = cfg.clone();
    if state == FoldState::Maximized {
        out.folds.retain(|_, s| *s != FoldState::Maximized);
    }
    out = out.with_fold(label, state);
    let states = resolve_states(&out, domain);
    if states.iter().all(|s| *s == FoldState::Minimized) {
        return Err(LayoutError::AllMinimized { axis });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Dataset, Value};
    use crate::segment::SegmentedDomain;

    fn nominal(values: &[&str]) -> (Dataset, SegmentedDomain) {
        let rows = values.iter().map(|v| vec![Value::Text(v.to_string())]).collect();
        let ds = Dataset::from_rows(vec!["k".into()], rows).unwrap();
        let dom = SegmentedDomain::categorical(&ds, "k").unwrap();
        (ds, dom)
    }

    fn widths(a: &AxisSegments) -> Vec<f64> {
        a.iter().map(AxisSegment::width).collect()
    }

    #[test]
    fn largest_remainder_sums_exactly() {
        assert_eq!(largest_remainder(&[1.0, 1.0, 1.0], 800), [267, 267, 266]);
        assert_eq!(largest_remainder(&[30.0, 10.0], 400), [300, 100]);
        assert_eq!(largest_remainder(&[0.0, 0.0], 9), [5, 4]);
        assert_eq!(largest_remainder(&[], 9), Vec::<i64>::new());
        let w = [3.0, 7.0, 11.0, 13.0, 1.0];
        assert_eq!(largest_remainder(&w, 997).iter().sum::<i64>(), 997);
    }

    #[test]
    fn uniform_split() {
        let (_, dom) = nominal(&["male", "female", "male"]);
        let a = segment_axis(&AxisConfig::gather("k"), &dom, (0.0, 400.0), Axis::X).unwrap();
        assert_eq!(a.segments[0].lo, 0.0);
        assert_eq!(a.segments[0].hi, 200.0);
        assert_eq!(a.segments[1].lo, 200.0);
        assert_eq!(a.segments[1].hi, 400.0);
    }

    #[test]
    fn proportional_split() {
        let mut values = vec!["a"; 30];
        values.extend(vec!["b"; 10]);
        let (_, dom) = nominal(&values);
        let cfg = AxisConfig::gather("k").with_allocation(Allocation::Proportional);
        let a = segment_axis(&cfg, &dom, (0.0, 400.0), Axis::X).unwrap();
        assert_eq!(widths(&a), [300.0, 100.0]);
    }

    #[test]
    fn proportional_keeps_small_segments_visible() {
        let mut values = vec!["a"; 5000];
        values.push("b");
        let (_, dom) = nominal(&values);
        let cfg = AxisConfig::gather("k").with_allocation(Allocation::Proportional);
        let a = segment_axis(&cfg, &dom, (0.0, 300.0), Axis::X).unwrap();
        assert_eq!(widths(&a), [299.0, 1.0]);
    }

    #[test]
    fn titanic_class_folding() {
        let (_, dom) = nominal(&["first", "second", "third", "crew"]);
        let cfg = AxisConfig::gather("k")
            .with_fold("second", FoldState::Minimized)
            .with_fold("crew", FoldState::Minimized);
        let a = segment_axis(&cfg, &dom, (0.0, 600.0), Axis::X).unwrap();
        assert_eq!(widths(&a), [288.0, FOLD_W, 288.0, FOLD_W]);
        assert_eq!(a.segments[1].state, FoldState::Minimized);
        assert_eq!(a.segments.last().unwrap().hi, 600.0);
    }

    #[test]
    fn maximize_takes_the_rest() {
        let (_, dom) = nominal(&["child", "adult", "senior"]);
        let cfg = fold_axis(&AxisConfig::gather("k"), &dom, Axis::Y, "adult", FoldState::Maximized).unwrap();
        let a = segment_axis(&cfg, &dom, (0.0, 500.0), Axis::Y).unwrap();
        assert_eq!(widths(&a), [FOLD_W, 500.0 - 2.0 * FOLD_W, FOLD_W]);
        let states: Vec<_> = a.iter().map(|s| s.state).collect();
        assert_eq!(
            states,
            [FoldState::Minimized, FoldState::Maximized, FoldState::Minimized]
        );
    }

    #[test]
    fn fold_round_trip_and_errors() {
        let (_, dom) = nominal(&["a", "b", "c"]);
        let base = AxisConfig::gather("k");
        let min = fold_axis(&base, &dom, Axis::X, "b", FoldState::Minimized).unwrap();
        let back = fold_axis(&min, &dom, Axis::X, "b", FoldState::Normal).unwrap();
        assert_eq!(back, base);

        assert!(matches!(
            fold_axis(&base, &dom, Axis::X, "zzz", FoldState::Minimized),
            Err(LayoutError::UnknownSegment { .. })
        ));

        let c1 = fold_axis(&base, &dom, Axis::X, "a", FoldState::Minimized).unwrap();
        let c2 = fold_axis(&c1, &dom, Axis::X, "b", FoldState::Minimized).unwrap();
        assert_eq!(
            fold_axis(&c2, &dom, Axis::X, "c", FoldState::Minimized),
            Err(LayoutError::AllMinimized { axis: Axis::X })
        );
    }

    #[test]
    fn maximize_then_restore_keeps_prior_folds() {
        let (_, dom) = nominal(&["a", "b", "c"]);
        let base = AxisConfig::gather("k").with_fold("c", FoldState::Minimized);
        let max = fold_axis(&base, &dom, Axis::X, "a", FoldState::Maximized).unwrap();
        let max2 = fold_axis(&max, &dom, Axis::X, "b", FoldState::Maximized).unwrap();
        assert_eq!(max2.folds.values().filter(|s| **s == FoldState::Maximized).count(), 1);
        let back = fold_axis(&max2, &dom, Axis::X, "b", FoldState::Normal).unwrap();
        assert_eq!(back, base);
    }

    #[test]
    fn extent_too_small_for_folds() {
        let (_, dom) = nominal(&["a", "b", "c"]);
        let cfg = AxisConfig::gather("k")
            .with_fold("a", FoldState::Minimized)
            .with_fold("b", FoldState::Minimized);
        assert!(matches!(
            segment_axis(&cfg, &dom, (0.0, 24.0), Axis::X),
            Err(LayoutError::ExtentTooSmall { .. })
        ));
    }
}
