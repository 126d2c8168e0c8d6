//! Engineering metrics of a height landscape.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{asymmetry, mass_properties};
use crate::mesh::TriMesh;
use crate::oracle::{height_field_with_com, DirectionSet, HeightField};

pub const STEEPNESS_DEFINITION: &str = "mean over kNN graph edges of |h(d_i) - h(d_j)| / arc(d_i, d_j)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub h_range: f64,
    /// Self-righting energy: mean drop `h(d) - h_min` over the sampled directions.
    pub sre: f64,
    pub steepness: f64,
    pub asymmetry: f64,
    pub su_angle_deg: f64,
    pub steepness_definition: String,
}

/// Mean of `h(d) - h_min`; 0 on a flat landscape.
pub fn self_righting_energy(field: &HeightField<'_>) -> f64 {
    if field.is_flat() {
        return 0.0;
    }
    let n = field.h.len() as f64;
    field.h.iter().map(|h| h - field.h_min).sum::<f64>() / n
}

/// Mean edge gradient magnitude; see [`STEEPNESS_DEFINITION`].
pub fn steepness(field: &HeightField<'_>) -> f64 {
    if field.is_flat() {
        return 0.0;
    }
    let dirs = &field.dirs.directions;
    let (mut sum, mut count) = (0.0, 0usize);
    for (i, j) in field.dirs.edges() {
        let arc = dirs[i].angle_to(dirs[j]);
        if arc > 0.0 {
            sum += (field.h[i] - field.h[j]).abs() / arc;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

pub fn compute_metrics(mesh: &TriMesh, dirs: &DirectionSet) -> Result<MetricsReport> {
    let com = mass_properties(mesh)?.com;
    let field = height_field_with_com(mesh, com, dirs)?;
    Ok(metrics_from_field(&field, asymmetry(mesh, com)))
}

pub fn metrics_from_field(field: &HeightField<'_>, asymmetry: f64) -> MetricsReport {
    MetricsReport {
        h_range: field.h_range(),
        sre: self_righting_energy(field),
        steepness: steepness(field),
        asymmetry,
        su_angle_deg: field.stable_unstable_angle_deg(),
        steepness_definition: STEEPNESS_DEFINITION.to_string(),
    }
}

/// Pearson correlation of `h_range` against `sre`.
pub fn tradeoff_correlation(entries: &[MetricsReport]) -> Result<f64> {
    if entries.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: entries.len() });
    }
    let x: Vec<f64> = entries.iter().map(|e| e.h_range).collect();
    let y: Vec<f64> = entries.iter().map(|e| e.sre).collect();
    pearson(&x, &y)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData { needed: 2.max(x.len()), got: y.len().min(x.len()) });
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput("zero variance".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
