//! Gather segmentation of a dimension: one segment per category, or one per
//! quantization bin for continuous data.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Dataset, Dimension, DimensionKind, Domain, ModelError, Value};

/// Upper bound on segments produced by quantization.
pub const MAX_SEGMENTS: usize = 1000;

/// Label of the single segment of an undefined axis.
pub const ALL_LABEL: &str = "all";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bin width must be positive and finite, got {0}")]
    BinWidth(f64),
    #[error("origin must be finite, got {0}")]
    Origin(f64),
    #[error("dimension `{0}` is not numeric")]
    NotNumeric(String),
    #[error("quantization would produce {0} segments (limit {MAX_SEGMENTS})")]
    TooManySegments(usize),
    #[error("segment order: {0}")]
    Order(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Membership {
    /// Every point (undefined axis).
    All,
    Exact {
        value: Value,
    },
    /// Half-open `[lo, hi)`.
    Interval {
        lo: f64,
        hi: f64,
    },
}

impl Membership {
    pub fn contains(&self, value: &Value) -> bool {
        match self {
            Membership::All => true,
            Membership::Exact { value: v } => v == value,
            Membership::Interval { lo, hi } => value.as_number().is_some_and(|x| *lo <= x && x < *hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub label: String,
    pub membership: Membership,
    pub count: usize,
}

/// Equal-width binning `[origin + k·w, origin + (k+1)·w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantizer {
    pub bin_width: f64,
    pub origin: f64,
}

impl Quantizer {
    pub fn new(bin_width: f64, origin: f64) -> Result<Quantizer, SegmentError> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(SegmentError::BinWidth(bin_width));
        }
        if !origin.is_finite() {
            return Err(SegmentError::Origin(origin));
        }
        Ok(Quantizer { bin_width, origin })
    }

    /// Bin width `(max − min)/8` rounded to one significant digit, origin
    /// snapped down to that grid.
    pub fn auto(min: f64, max: f64) -> Quantizer {
        let span = max - min;
        let raw = if span > 0.0 && span.is_finite() {
            span / 8.0
        } else {
            1.0
        };
        let exp = raw.log10().floor() as i32;
        let mut mantissa = (raw / 10f64.powi(exp)).round();
        let mut exp = exp;
        if mantissa >= 10.0 {
            mantissa = 1.0;
            exp += 1;
        }
        let bin_width = decimal(mantissa, exp);
        let k = (min / bin_width).floor();
        let origin = decimal(k * mantissa, exp);
        // `decimal` rounding can land a hair above min.
        let origin = if origin > min { origin - bin_width } else { origin };
        Quantizer { bin_width, origin }
    }

    pub fn lower(&self, k: i64) -> f64 {
        self.origin + k as f64 * self.bin_width
    }

    pub fn bounds(&self, k: i64) -> (f64, f64) {
        (self.lower(k), self.lower(k + 1))
    }

    /// Bin holding `v`, consistent with [`Quantizer::bounds`] even where
    /// floating-point division lands on the wrong side of a boundary.
    pub fn bin_index(&self, v: f64) -> i64 {
        let mut k = ((v - self.origin) / self.bin_width).floor() as i64;
        while v < self.lower(k) {
            k -= 1;
        }
        while v >= self.lower(k + 1) {
            k += 1;
        }
        k
    }

    /// Lower edge of the bin holding `v`.
    pub fn quantize_value(&self, v: f64) -> f64 {
        self.lower(self.bin_index(v))
    }

    /// `center±half` using the fewest decimals that represent the grid.
    pub fn label(&self, k: i64) -> String {
        let (lo, hi) = self.bounds(k);
        let center = lo + (hi - lo) / 2.0;
        let half = self.bin_width / 2.0;
        let digits = decimals_needed(center).max(decimals_needed(half));
        format!("{}±{}", fixed(center, digits), fixed(half, digits))
    }
}

// mantissa · 10^exp, dividing for negative exponents so 0.3 stays 0.3.
fn decimal(mantissa: f64, exp: i32) -> f64 {
    if exp >= 0 {
        mantissa * 10f64.powi(exp)
    } else {
        mantissa / 10f64.powi(-exp)
    }
}

fn decimals_needed(v: f64) -> usize {
    for d in 0..=10usize {
        let scaled = v * 10f64.powi(d as i32);
        if (scaled - scaled.round()).abs() < 1e-6 * scaled.abs().max(1.0) {
            return d;
        }
    }
    10
}

fn fixed(v: f64, digits: usize) -> String {
    let s = format!("{v:.digits$}");
    // Avoid "-0".
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentOrder {
    /// Data order: first appearance for nominal, ascending otherwise.
    #[default]
    Domain,
    /// Most populous first (nominal only).
    CountDescending,
}

/// The segments of one axis before pixel allocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentedDomain {
    /// `None` for an undefined axis.
    pub dimension: Option<Dimension>,
    pub segments: Vec<Segment>,
    pub quantizer: Option<Quantizer>,
}

impl SegmentedDomain {
    /// A single segment holding every point.
    pub fn undefined(point_count: usize) -> SegmentedDomain {
        SegmentedDomain {
            dimension: None,
            segments: vec![Segment {
                label: ALL_LABEL.to_string(),
                membership: Membership::All,
                count: point_count,
            }],
            quantizer: None,
        }
    }

    /// One segment per category, in domain order.
    pub fn categorical(dataset: &Dataset, name: &str) -> Result<SegmentedDomain, SegmentError> {
        let c = dataset.column_index(name)?;
        let dim = dataset.dimensions()[c].clone();
        let values = match &dim.domain {
            Domain::Categories { values } => values.clone(),
            Domain::Range { .. } => {
                // Quantitative columns as categories: every distinct number.
                let mut v: Vec<f64> = dataset.column(c).filter_map(Value::as_number).collect();
                v.sort_by(f64::total_cmp);
                v.dedup_by(|a, b| a.to_bits() == b.to_bits());
                v.into_iter().map(Value::Number).collect()
            }
        };
        let mut segments: Vec<Segment> = values
            .into_iter()
            .map(|v| Segment {
                label: v.label(),
                membership: Membership::Exact { value: v },
                count: 0,
            })
            .collect();
        for v in dataset.column(c) {
            if let Some(s) = segments.iter_mut().find(|s| s.membership.contains(v)) {
                s.count += 1;
            }
        }
        Ok(SegmentedDomain {
            dimension: Some(dim),
            segments,
            quantizer: None,
        })
    }

    /// Gather segmentation for a dimension: quantitative columns are binned
    /// (with `bins`, or the automatic grid), everything else is categorical.
    pub fn for_dimension(
        dataset: &Dataset,
        name: &str,
        bins: Option<Quantizer>,
    ) -> Result<SegmentedDomain, SegmentError> {
        let dim = dataset.dimension(name)?;
        match (bins, &dim.domain) {
            (Some(q), _) => quantize(dataset, name, q.bin_width, q.origin),
            (None, Domain::Range { min, max }) if dim.kind == DimensionKind::Quantitative => {
                let q = Quantizer::auto(*min, *max);
                quantize(dataset, name, q.bin_width, q.origin)
            }
            _ => SegmentedDomain::categorical(dataset, name),
        }
    }

    /// Index of the segment containing `value`.
    pub fn segment_of(&self, value: &Value) -> Option<usize> {
        if value.is_missing()
            && !matches!(
                self.segments.first(),
                Some(Segment {
                    membership: Membership::All,
                    ..
                })
            )
        {
            return None;
        }
        if let (Some(q), Some(x)) = (self.quantizer, value.as_number()) {
            let first = self.segments.first()?;
            let Membership::Interval { lo, .. } = first.membership else {
                return None;
            };
            let k0 = q.bin_index(lo);
            let i = q.bin_index(x) - k0;
            return (0..self.segments.len() as i64).contains(&i).then_some(i as usize);
        }
        self.segments.iter().position(|s| s.membership.contains(value))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.segments.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn is_nominal(&self) -> bool {
        self.dimension
            .as_ref()
            .is_some_and(|d| d.kind == DimensionKind::Nominal)
            && self.quantizer.is_none()
    }

    /// Reorders segments. Only nominal segmentations may be permuted; others
    /// keep the order of the data relation.
    pub fn reordered(&self, order: SegmentOrder, explicit: Option<&[String]>) -> Result<SegmentedDomain, SegmentError> {
        if order == SegmentOrder::Domain && explicit.is_none() {
            return Ok(self.clone());
        }
        if !self.is_nominal() {
            return Err(SegmentError::Order("only nominal axes can be reordered".into()));
        }
        let mut out = self.clone();
        if let Some(labels) = explicit {
            out.segments = crate::model::permute_by_label(&self.segments, labels)
                .ok_or_else(|| SegmentError::Order("explicit order must list every segment exactly once".into()))?;
        } else {
            // Stable: equal counts keep domain order.
            out.segments.sort_by_key(|s| std::cmp::Reverse(s.count));
        }
        Ok(out)
    }
}

impl crate::model::Labeled for Segment {
    fn label_text(&self) -> String {
        self.label.clone()
    }
}

/// Bins a numeric dimension into contiguous equal-width segments covering
/// its observed range.
pub fn quantize(dataset: &Dataset, name: &str, bin_width: f64, origin: f64) -> Result<SegmentedDomain, SegmentError> {
    let q = Quantizer::new(bin_width, origin)?;
    let c = dataset.column_index(name)?;
    let dim = dataset.dimensions()[c].clone();
    let mut values = Vec::new();
    for v in dataset.column(c) {
        match v {
            Value::Number(x) => values.push(*x),
            Value::Text(_) => return Err(SegmentError::NotNumeric(name.to_string())),
            Value::Missing => {}
        }
    }
    let Some((min, max)) = values.iter().fold(None, |acc: Option<(f64, f64)>, &v| {
        Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v))))
    }) else {
        return Ok(SegmentedDomain {
            dimension: Some(dim),
            segments: Vec::new(),
            quantizer: Some(q),
        });
    };
    let k_min = q.bin_index(min);
    let k_max = q.bin_index(max);
    let n = (k_max - k_min + 1) as usize;
    if n > MAX_SEGMENTS {
        return Err(SegmentError::TooManySegments(n));
    }
    let mut segments: Vec<Segment> = (k_min..=k_max)
        .map(|k| {
            let (lo, hi) = q.bounds(k);
            Segment {
                label: q.label(k),
                membership: Membership::Interval { lo, hi },
                count: 0,
            }
        })
        .collect();
    for v in values {
        segments[(q.bin_index(v) - k_min) as usize].count += 1;
    }
    Ok(SegmentedDomain {
        dimension: Some(dim),
        segments,
        quantizer: Some(q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numbers(name: &str, values: impl IntoIterator<Item = f64>) -> Dataset {
        let rows = values.into_iter().map(|v| vec![Value::Number(v)]).collect();
        Dataset::from_rows(vec![name.to_string()], rows).unwrap()
    }

    #[test]
    fn ages_into_decades() {
        let ds = numbers("age", (0..100).map(f64::from));
        let seg = quantize(&ds, "age", 10.0, 0.0).unwrap();
        assert_eq!(seg.segments.len(), 10);
        let i = seg.segment_of(&Value::Number(27.0)).unwrap();
        assert_eq!(seg.segments[i].membership, Membership::Interval { lo: 20.0, hi: 30.0 });
        assert_eq!(seg.segments[i].label, "25±5");
        assert!(seg.segments.iter().all(|s| s.count == 10));
    }

    #[test]
    fn single_value_one_segment() {
        let ds = numbers("v", [7.0]);
        let seg = quantize(&ds, "v", 10.0, 0.0).unwrap();
        assert_eq!(seg.segments.len(), 1);
        assert_eq!(seg.segments[0].membership, Membership::Interval { lo: 0.0, hi: 10.0 });
        assert_eq!(seg.segments[0].count, 1);
    }

    #[test]
    fn bad_bin_width() {
        let ds = numbers("v", [1.0]);
        assert_eq!(quantize(&ds, "v", 0.0, 0.0), Err(SegmentError::BinWidth(0.0)));
        assert_eq!(quantize(&ds, "v", -2.0, 0.0), Err(SegmentError::BinWidth(-2.0)));
        assert!(quantize(&ds, "v", f64::NAN, 0.0).is_err());
    }

    #[test]
    fn label_digits_follow_grid() {
        assert_eq!(Quantizer::new(5.0, 0.0).unwrap().label(4), "22.5±2.5");
        assert_eq!(Quantizer::new(0.1, 0.0).unwrap().label(3), "0.35±0.05");
        assert_eq!(Quantizer::new(200.0, 0.0).unwrap().label(1), "300±100");
        assert_eq!(Quantizer::new(2.0, -2.0).unwrap().label(0), "-1±1");
    }

    #[test]
    fn auto_grid_is_one_significant_digit() {
        let q = Quantizer::auto(0.0, 100.0);
        assert_eq!(q.bin_width, 10.0);
        assert_eq!(q.origin, 0.0);
        let q = Quantizer::auto(9.0, 46.6);
        assert_eq!(q.bin_width, 5.0);
        assert_eq!(q.origin, 5.0);
        let q = Quantizer::auto(0.13, 0.37);
        assert_eq!(q.bin_width, 0.03);
        assert!(q.origin <= 0.13);
        let q = Quantizer::auto(68.0, 455.0);
        assert_eq!(q.bin_width, 50.0);
        assert_eq!(q.origin, 50.0);
        let q = Quantizer::auto(4.0, 4.0);
        assert_eq!(q.bin_width, 1.0);
    }

    #[test]
    fn auto_grid_keeps_segment_count_small() {
        for (lo, hi) in [(0.0, 1.0), (1613.0, 5140.0), (-3.2, 2.9), (8.0, 24.8), (0.001, 0.0093)] {
            let q = Quantizer::auto(lo, hi);
            let n = q.bin_index(hi) - q.bin_index(lo) + 1;
            assert!((5..=14).contains(&n), "{lo}..{hi}: {n} segments with {q:?}");
        }
    }

    #[test]
    fn boundaries_agree_with_bin_index() {
        let q = Quantizer::new(0.1, 0.0).unwrap();
        for k in -50..50 {
            let (lo, hi) = q.bounds(k);
            assert_eq!(q.bin_index(lo), k);
            assert!(q.bin_index(hi) == k + 1);
        }
    }

    #[test]
    fn text_column_rejects_quantize() {
        let ds = Dataset::from_rows(vec!["o".into()], vec![vec![Value::Text("USA".into())]]).unwrap();
        assert_eq!(quantize(&ds, "o", 1.0, 0.0), Err(SegmentError::NotNumeric("o".into())));
    }

    #[test]
    fn too_many_bins() {
        let ds = numbers("v", [0.0, 1.0e6]);
        assert!(matches!(
            quantize(&ds, "v", 1.0, 0.0),
            Err(SegmentError::TooManySegments(_))
        ));
    }

    #[test]
    fn nominal_reordering() {
        let rows = ["a", "b", "b", "c", "c", "c"]
            .iter()
            .map(|s| vec![Value::Text(s.to_string())])
            .collect();
        let ds = Dataset::from_rows(vec!["k".into()], rows).unwrap();
        let seg = SegmentedDomain::categorical(&ds, "k").unwrap();
        assert_eq!(seg.labels(), ["a", "b", "c"]);
        let desc = seg.reordered(SegmentOrder::CountDescending, None).unwrap();
        assert_eq!(desc.labels(), ["c", "b", "a"]);
        let ex = seg
            .reordered(SegmentOrder::Domain, Some(&["b".into(), "a".into(), "c".into()]))
            .unwrap();
        assert_eq!(ex.labels(), ["b", "a", "c"]);
        assert_eq!(ex.segment_of(&Value::Text("a".into())), Some(1));

        let q = quantize(&numbers("v", [1.0, 2.0]), "v", 1.0, 0.0).unwrap();
        assert!(q.reordered(SegmentOrder::CountDescending, None).is_err());
    }

    #[test]
    fn undefined_holds_everything() {
        let seg = SegmentedDomain::undefined(3);
        assert_eq!(seg.segment_of(&Value::Missing), Some(0));
        assert_eq!(seg.segment_of(&Value::Number(2.0)), Some(0));
    }
}
