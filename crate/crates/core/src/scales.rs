//! Visual transformations and the overlap / overplotting metrics.
//!
//! A visual transformation pairs a coordinate function with a mark size.
//! Two points overlap on an axis when their coordinates are strictly closer
//! than the mark size; a pair is overplotted when it overlaps on both axes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScaleError {
    #[error("overlap metrics need a scalar mark size")]
    NonScalarMarkSize,
    #[error("mark size must be positive, got {0}")]
    MarkSize(f64),
    #[error("x and y sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Affine map from a value domain onto a pixel range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearScale {
    pub domain: (f64, f64),
    pub range: (f64, f64),
}

impl LinearScale {
    /// Fits the domain to the observed min/max of `values`.
    pub fn fit(values: &[f64], range: (f64, f64)) -> LinearScale {
        let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        let domain = if min <= max { (min, max) } else { (0.0, 0.0) };
        LinearScale { domain, range }
    }

    pub fn apply(&self, v: f64) -> f64 {
        let (d0, d1) = self.domain;
        let (r0, r1) = self.range;
        if d1 == d0 {
            return r0 + (r1 - r0) / 2.0;
        }
        let t = (v - d0) / (d1 - d0);
        (1.0 - t) * r0 + t * r1
    }
}

/// Maps `values` affinely from their `[min, max]` onto `extent`. A degenerate
/// domain maps every value to the midpoint.
pub fn linear_positions(values: &[f64], extent: (f64, f64)) -> Vec<f64> {
    let scale = LinearScale::fit(values, extent);
    values.iter().map(|&v| scale.apply(v)).collect()
}

/// Deterministic per-point displacement keyed by `(seed, point id)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jitter {
    pub amplitude: f64,
    pub seed: u64,
    /// Displaced coordinates are clamped to this interval.
    pub extent: (f64, f64),
}

impl Jitter {
    /// Offset in `[-amplitude, amplitude]` for one point; independent of the
    /// order points are visited in.
    pub fn offset(&self, id: u64) -> f64 {
        if self.amplitude <= 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng.random_range(-1.0..=1.0) * self.amplitude
    }

    pub fn apply(&self, id: u64, base: f64) -> f64 {
        if self.amplitude <= 0.0 {
            return base;
        }
        let (lo, hi) = (self.extent.0.min(self.extent.1), self.extent.0.max(self.extent.1));
        (base + self.offset(id)).clamp(lo, hi)
    }
}

/// Jitters `base[i]` as point `ids[i]`.
pub fn jitter_positions(base: &[f64], ids: &[u64], jitter: &Jitter) -> Vec<f64> {
    base.iter().zip(ids).map(|(&b, &id)| jitter.apply(id, b)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarkSize {
    Scalar(f64),
    /// One size per point, as produced by a gather layout.
    PerPoint(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Identity,
    Linear(LinearScale),
    /// Category index `i` of `n` maps to the center of the i-th equal band.
    Band {
        count: usize,
        extent: (f64, f64),
    },
}

impl Transform {
    pub fn apply(&self, v: f64) -> f64 {
        match self {
            Transform::Identity => v,
            Transform::Linear(s) => s.apply(v),
            Transform::Band { count, extent } => {
                let n = (*count).max(1) as f64;
                extent.0 + (extent.1 - extent.0) * (v + 0.5) / n
            }
        }
    }
}

/// A coordinate function paired with a mark size.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualTransformation {
    pub transform: Transform,
    pub mark_size: MarkSize,
}

impl VisualTransformation {
    pub fn new(transform: Transform, mark_size: f64) -> VisualTransformation {
        VisualTransformation {
            transform,
            mark_size: MarkSize::Scalar(mark_size),
        }
    }

    fn scalar_size(&self) -> Result<f64, ScaleError> {
        match self.mark_size {
            MarkSize::Scalar(s) if s > 0.0 => Ok(s),
            MarkSize::Scalar(s) => Err(ScaleError::MarkSize(s)),
            MarkSize::PerPoint(_) => Err(ScaleError::NonScalarMarkSize),
        }
    }

    pub fn coordinates(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.transform.apply(v)).collect()
    }
}

/// Number of unordered pairs whose coordinates are strictly closer than the
/// mark size. Sorts once and sweeps, O(n log n + pairs).
pub fn overlap_index(values: &[f64], vt: &VisualTransformation) -> Result<u64, ScaleError> {
    let s = vt.scalar_size()?;
    let mut coords = vt.coordinates(values);
    coords.sort_by(f64::total_cmp);
    let mut count = 0u64;
    let mut hi = 0;
    for i in 0..coords.len() {
        if hi < i + 1 {
            hi = i + 1;
        }
        while hi < coords.len() && coords[hi] - coords[i] < s {
            hi += 1;
        }
        count += (hi - i - 1) as u64;
    }
    Ok(count)
}

/// Quadratic pair scan; reference path for [`overlap_index`].
pub fn overlap_index_pairwise(values: &[f64], vt: &VisualTransformation) -> Result<u64, ScaleError> {
    let s = vt.scalar_size()?;
    let coords = vt.coordinates(values);
    let mut count = 0;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            if (coords[i] - coords[j]).abs() < s {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Number of unordered pairs overlapping on both axes.
pub fn overplotting_index(
    points: &[(f64, f64)],
    tx: &VisualTransformation,
    ty: &VisualTransformation,
) -> Result<u64, ScaleError> {
    let sx = tx.scalar_size()?;
    let sy = ty.scalar_size()?;
    let mut coords: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (tx.transform.apply(x), ty.transform.apply(y)))
        .collect();
    coords.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut count = 0;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            if coords[j].0 - coords[i].0 >= sx {
                break;
            }
            if (coords[j].1 - coords[i].1).abs() < sy {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Convenience over separate x and y sequences.
pub fn overplotting_index_xy(
    xs: &[f64],
    ys: &[f64],
    tx: &VisualTransformation,
    ty: &VisualTransformation,
) -> Result<u64, ScaleError> {
    if xs.len() != ys.len() {
        return Err(ScaleError::LengthMismatch(xs.len(), ys.len()));
    }
    let points: Vec<_> = xs.iter().copied().zip(ys.iter().copied()).collect();
    overplotting_index(&points, tx, ty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ident(s: f64) -> VisualTransformation {
        VisualTransformation::new(Transform::Identity, s)
    }

    #[test]
    fn linear_examples() {
        assert_eq!(linear_positions(&[0.0, 5.0, 10.0], (0.0, 100.0)), [0.0, 50.0, 100.0]);
        assert_eq!(linear_positions(&[4.0, 4.0], (0.0, 100.0)), [50.0, 50.0]);
        assert_eq!(linear_positions(&[2.0], (10.0, 20.0)), [15.0]);
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let base: Vec<f64> = (0..50).map(|i| i as f64 * 3.7).collect();
        let ids: Vec<u64> = (0..50).collect();
        let j = Jitter {
            amplitude: 0.0,
            seed: 9,
            extent: (0.0, 1000.0),
        };
        assert_eq!(jitter_positions(&base, &ids, &j), base);
    }

    #[test]
    fn jitter_bounded_and_deterministic() {
        let base: Vec<f64> = (0..1000).map(|i| 10.0 + (i % 97) as f64 * 5.0).collect();
        let ids: Vec<u64> = (0..1000).collect();
        for seed in [0, 1, 42, u64::MAX] {
            let j = Jitter {
                amplitude: 5.0,
                seed,
                extent: (0.0, 1000.0),
            };
            let a = jitter_positions(&base, &ids, &j);
            let b = jitter_positions(&base, &ids, &j);
            assert_eq!(a, b);
            let worst = a.iter().zip(&base).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(worst <= 5.0, "seed {seed}: {worst}");
            assert!(worst > 0.0);
        }
    }

    #[test]
    fn jitter_is_order_independent() {
        let j = Jitter {
            amplitude: 3.0,
            seed: 7,
            extent: (0.0, 100.0),
        };
        let fwd = jitter_positions(&[50.0, 50.0, 50.0], &[1, 2, 3], &j);
        let rev = jitter_positions(&[50.0, 50.0, 50.0], &[3, 2, 1], &j);
        assert_eq!(fwd[0], rev[2]);
        assert_eq!(fwd[2], rev[0]);
    }

    #[test]
    fn jitter_clamps_to_extent() {
        let j = Jitter {
            amplitude: 50.0,
            seed: 1,
            extent: (0.0, 10.0),
        };
        for id in 0..200 {
            let v = j.apply(id, 5.0);
            assert!((0.0..=10.0).contains(&v));
        }
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_index(&[3.0, 3.0], &ident(1.0)), Ok(1));
        assert_eq!(overlap_index(&[0.0, 10.0, 20.0], &ident(5.0)), Ok(0));
        // Pairs (0,1) and (1,2); |0-2| = 2 is not < 2.
        assert_eq!(overlap_index(&[0.0, 1.0, 2.0, 10.0], &ident(2.0)), Ok(2));
    }

    #[test]
    fn overplotting_examples() {
        let pts = [(0.0, 0.0), (0.0, 5.0), (3.0, 0.0)];
        assert_eq!(overplotting_index(&pts, &ident(1.0), &ident(1.0)), Ok(0));
        assert_eq!(
            overplotting_index(&[(2.0, 2.0), (2.0, 2.0)], &ident(1.0), &ident(1.0)),
            Ok(1)
        );
    }

    #[test]
    fn unique_nominal_values_never_overplot() {
        // Five categories, one point each, on a 500 px band axis.
        let xs: Vec<f64> = (0..5).map(f64::from).collect();
        let ys = vec![0.0; 5];
        let tx = VisualTransformation::new(
            Transform::Band {
                count: 5,
                extent: (0.0, 500.0),
            },
            10.0,
        );
        assert_eq!(overplotting_index_xy(&xs, &ys, &tx, &ident(10.0)), Ok(0));
    }

    #[test]
    fn per_point_sizes_rejected() {
        let vt = VisualTransformation {
            transform: Transform::Identity,
            mark_size: MarkSize::PerPoint(vec![1.0]),
        };
        assert_eq!(overlap_index(&[1.0], &vt), Err(ScaleError::NonScalarMarkSize));
    }

    proptest! {
        #[test]
        fn sweep_matches_pairwise(values in prop::collection::vec(-50.0f64..50.0, 0..60), s in 0.01f64..20.0) {
            let vt = ident(s);
            prop_assert_eq!(overlap_index(&values, &vt), overlap_index_pairwise(&values, &vt));
        }

        #[test]
        fn overlap_monotone_in_size(values in prop::collection::vec(0.0f64..100.0, 0..40), s in 0.1f64..10.0, ds in 0.0f64..10.0) {
            let small = overlap_index(&values, &ident(s)).unwrap();
            let large = overlap_index(&values, &ident(s + ds)).unwrap();
            prop_assert!(small <= large);
        }

        #[test]
        fn overplotting_bounded_by_axes(pts in prop::collection::vec((0.0f64..30.0, 0.0f64..30.0), 0..40), sx in 0.5f64..5.0, sy in 0.5f64..5.0) {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let both = overplotting_index(&pts, &ident(sx), &ident(sy)).unwrap();
            let ox = overlap_index(&xs, &ident(sx)).unwrap();
            let oy = overlap_index(&ys, &ident(sy)).unwrap();
            prop_assert!(both <= ox.min(oy));
        }
    }
}
