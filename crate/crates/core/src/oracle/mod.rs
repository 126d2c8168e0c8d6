//! The equilibrium-count oracle.

pub mod analytic;
mod basins;
mod directions;
mod height;

pub use analytic::{analytic_com, analytic_height, analytic_height_field, AnalyticOracle};
pub use basins::{label_basins, merge_basins, BasinLabeling, MergeRule, MergedBasins, Sink};
pub use directions::{
    fibonacci_sphere, fibonacci_sphere_rotated, DirectionSet, DEFAULT_DIRECTIONS, DEFAULT_KNN, MIN_DIRECTIONS,
};
pub use height::{com_height, height_field, height_field_with_com, HeightField};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

pub const DEFAULT_THRESHOLDS: [f64; 5] = [0.005, 0.01, 0.02, 0.05, 0.10];
pub const DEFAULT_THRESHOLD: f64 = 0.01;

/// Map key used for a threshold fraction.
pub fn threshold_key(t: f64) -> String {
    format!("{t}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcsReport {
    pub raw_basin_count: usize,
    /// Fixpoint-rule class counts.
    pub merged_count_by_threshold: BTreeMap<String, usize>,
    /// Height-ordered single-pass class counts.
    pub single_pass_count_by_threshold: BTreeMap<String, usize>,
    /// Fixpoint count at 1%.
    pub default_ecs: usize,
    pub su_angle_deg: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub h_range: f64,
    /// Landscape constant to round-off; all counts are then reported as 1.
    pub degenerate: bool,
    /// Raw sink heights, ascending.
    pub sink_heights: Vec<f64>,
    /// Height of the lowest sink that lies at least the strictest threshold
    /// above the global minimum, relative to that minimum; 0 if none does.
    pub strict_gap: f64,
}

impl EcsReport {
    pub fn merged_count(&self, threshold: f64) -> Option<usize> {
        self.merged_count_by_threshold.get(&threshold_key(threshold)).copied()
    }

    pub fn single_pass_count(&self, threshold: f64) -> Option<usize> {
        self.single_pass_count_by_threshold.get(&threshold_key(threshold)).copied()
    }

    /// True when every recorded fixpoint count is 1.
    pub fn is_mono_monostatic(&self) -> bool {
        self.merged_count_by_threshold.values().all(|&c| c == 1)
    }
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for &t in thresholds {
        if !(t > 0.0 && t <= 0.5) {
            return Err(Error::Domain { what: "threshold_fraction", value: t });
        }
    }
    Ok(())
}

/// Full pipeline on a mesh: height field, basins, merging at every threshold.
pub fn ecs(mesh: &TriMesh, dirs: &DirectionSet, thresholds: &[f64]) -> Result<EcsReport> {
    check_thresholds(thresholds)?;
    let field = height_field(mesh, dirs)?;
    ecs_from_field(&field, thresholds)
}

/// Report for a constant landscape of height `h`: every count is 1 and the
/// degeneracy flag is set.
pub fn degenerate_report(thresholds: &[f64], h: f64) -> EcsReport {
    let ones: BTreeMap<String, usize> = thresholds.iter().map(|&t| (threshold_key(t), 1)).collect();
    EcsReport {
        raw_basin_count: 1,
        merged_count_by_threshold: ones.clone(),
        single_pass_count_by_threshold: ones,
        default_ecs: 1,
        su_angle_deg: 0.0,
        h_min: h,
        h_max: h,
        h_range: 0.0,
        degenerate: true,
        sink_heights: vec![h],
        strict_gap: 0.0,
    }
}

pub fn ecs_from_field(field: &HeightField<'_>, thresholds: &[f64]) -> Result<EcsReport> {
    check_thresholds(thresholds)?;
    let su_angle_deg = field.stable_unstable_angle_deg();
    let labeling = match label_basins(field) {
        Ok(l) => l,
        Err(Error::DegenerateFlat { .. }) => {
            let mut flat = degenerate_report(thresholds, field.h_min);
            flat.h_max = field.h_max;
            flat.h_range = field.h_range();
            flat.su_angle_deg = su_angle_deg;
            return Ok(flat);
        }
        Err(e) => return Err(e),
    };
    let range = field.h_range();
    let mut merged_count_by_threshold = BTreeMap::new();
    let mut single_pass_count_by_threshold = BTreeMap::new();
    for &t in thresholds {
        let fix = merge_basins(&labeling, range, t, MergeRule::Fixpoint)?;
        let single = merge_basins(&labeling, range, t, MergeRule::SinglePass)?;
        merged_count_by_threshold.insert(threshold_key(t), fix.count());
        single_pass_count_by_threshold.insert(threshold_key(t), single.count());
    }
    let strict = thresholds.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EcsReport {
        raw_basin_count: labeling.basin_count(),
        merged_count_by_threshold,
        single_pass_count_by_threshold,
        default_ecs: merge_basins(&labeling, range, DEFAULT_THRESHOLD, MergeRule::Fixpoint)?.count(),
        su_angle_deg,
        h_min: field.h_min,
        h_max: field.h_max,
        h_range: range,
        degenerate: false,
        sink_heights: labeling.sorted_sink_heights(),
        strict_gap: merge_basins(&labeling, range, strict, MergeRule::SinglePass)?.lowest_gap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{canonical_body, generate_mesh, CanonicalBody, SurfaceSpec};

    #[test]
    fn sphere_is_degenerate_or_single() {
        let dirs = fibonacci_sphere(500, 12).unwrap();
        let flat = HeightField::from_values(&dirs, vec![1.0; 500]).unwrap();
        let r = ecs_from_field(&flat, &DEFAULT_THRESHOLDS).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.default_ecs, 1);
        assert!(r.is_mono_monostatic());
    }

    #[test]
    fn capsule_has_one_equilibrium() {
        let dirs = fibonacci_sphere(DEFAULT_DIRECTIONS, DEFAULT_KNN).unwrap();
        let m = canonical_body(CanonicalBody::Capsule, 32).unwrap();
        let r = ecs(&m, &dirs, &DEFAULT_THRESHOLDS).unwrap();
        assert_eq!(r.default_ecs, 1);
        assert!(!r.degenerate);
    }

    #[test]
    fn counts_do_not_increase_with_threshold() {
        let dirs = fibonacci_sphere(2000, 12).unwrap();
        let m = generate_mesh(&SurfaceSpec::sloan_eta(0.01), 60, 120).unwrap();
        let ts: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64 / 20.0).collect();
        let r = ecs(&m, &dirs, &ts).unwrap();
        let counts: Vec<usize> = ts.iter().map(|&t| r.merged_count(t).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
        assert!(counts[0] <= r.raw_basin_count);
    }

    #[test]
    fn bad_thresholds_rejected() {
        let dirs = fibonacci_sphere(200, 12).unwrap();
        let m = canonical_body(CanonicalBody::Cube, 8).unwrap();
        assert!(ecs(&m, &dirs, &[0.0]).is_err());
        assert!(ecs(&m, &dirs, &[0.7]).is_err());
        assert!(ecs(&m, &dirs, &[]).is_err());
    }

    #[test]
    fn report_json_keys() {
        let dirs = fibonacci_sphere(300, 12).unwrap();
        let m = canonical_body(CanonicalBody::Cube, 8).unwrap();
        let r = ecs(&m, &dirs, &DEFAULT_THRESHOLDS).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for k in ["raw_basin_count", "merged_count_by_threshold", "default_ecs", "su_angle_deg"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["merged_count_by_threshold"].as_object().unwrap().len(), 5);
    }
}
