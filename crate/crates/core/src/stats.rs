//! Overlap and overplotting indices of a dataset under its plain scatterplot
//! mapping.
//!
//! Quantitative values map to themselves; categorical values map to their
//! category index, so categories sit one unit apart. An undefined axis maps
//! every point to 0. Points missing either coordinate are skipped.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Dataset, DimensionKind, ModelError};
use crate::scales::{overlap_index, overplotting_index, ScaleError, Transform, VisualTransformation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    /// Points with both coordinates present.
    pub points: usize,
    pub mark_size: f64,
    pub overlap_x: u64,
    pub overlap_y: u64,
    pub overplotting: u64,
}

fn coordinates(dataset: &Dataset, dimension: Option<&str>) -> Result<Vec<Option<f64>>, ModelError> {
    let Some(name) = dimension else {
        return Ok(vec![Some(0.0); dataset.len()]);
    };
    let c = dataset.column_index(name)?;
    let dim = &dataset.dimensions()[c];
    Ok(dataset
        .column(c)
        .map(|v| match dim.kind {
            DimensionKind::Quantitative => v.as_number(),
            _ => dim.category_index(v).map(|i| i as f64),
        })
        .collect())
}

/// Indices for the `(x, y)` pairing with square marks of side `mark_size`.
/// `None` stands for an undefined axis.
pub fn dataset_stats(dataset: &Dataset, x: Option<&str>, y: Option<&str>, mark_size: f64) -> Result<Stats, StatsError> {
    let xs = coordinates(dataset, x)?;
    let ys = coordinates(dataset, y)?;
    let points: Vec<(f64, f64)> = xs.into_iter().zip(ys).filter_map(|(a, b)| Some((a?, b?))).collect();
    let vt = VisualTransformation::new(Transform::Identity, mark_size);
    let (px, py): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    Ok(Stats {
        points: points.len(),
        mark_size,
        overlap_x: overlap_index(&px, &vt)?,
        overlap_y: overlap_index(&py, &vt)?,
        overplotting: overplotting_index(&points, &vt, &vt)?,
    })
}
