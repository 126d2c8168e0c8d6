//! The thirteen published mono-monostatic bodies and their reproduction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{asymmetry, convexity_ratio, mass_properties, CONVEXITY_THRESHOLD};
use crate::metrics::{metrics_from_field, pearson, tradeoff_correlation, MetricsReport};
use crate::optimizer::OracleSettings;
use crate::oracle::{ecs_from_field, height_field_with_com, EcsReport};
use crate::surfaces::{generate_mesh, SurfaceFamily, SurfaceSpec};

pub const H_RANGE_TOLERANCE: f64 = 0.002;
pub const RELATIVE_TOLERANCE: f64 = 0.10;
pub const ANGLE_TOLERANCE_DEG: f64 = 10.0;

/// Published metric values of one body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Published {
    pub h_range: f64,
    pub sre: f64,
    pub steepness: f64,
    pub asymmetry: f64,
    pub su_angle_deg: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricCheck {
    pub published: f64,
    pub reproduced: f64,
    /// Absolute difference, or relative to the published value when `relative`.
    pub deviation: f64,
    pub tolerance: f64,
    pub relative: bool,
    pub pass: bool,
}

impl MetricCheck {
    fn absolute(published: f64, reproduced: f64, tolerance: f64) -> Self {
        let deviation = (reproduced - published).abs();
        MetricCheck { published, reproduced, deviation, tolerance, relative: false, pass: deviation <= tolerance }
    }

    fn relative(published: f64, reproduced: f64, tolerance: f64) -> Self {
        let deviation = (reproduced - published).abs() / published.abs();
        MetricCheck { published, reproduced, deviation, tolerance, relative: true, pass: deviation <= tolerance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Fixpoint count 1 at every threshold; the only hard criterion.
    pub ecs_all_one: bool,
    pub convex: bool,
    pub h_range: MetricCheck,
    pub sre: MetricCheck,
    pub asymmetry: MetricCheck,
    pub su_angle: MetricCheck,
    /// All of the above.
    pub all_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reproduced {
    pub metrics: MetricsReport,
    pub ecs: EcsReport,
    pub convexity_ratio: f64,
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub index: usize,
    pub spec: SurfaceSpec,
    /// Where `published` comes from.
    pub source: String,
    pub published: Published,
    pub reproduced: Option<Reproduced>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

impl CatalogEntry {
    pub fn passed(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.all_pass)
    }

    pub fn is_phase(&self) -> bool {
        self.spec.family.is_phase()
    }
}

const TABLE: [(SurfaceFamily, u32, f64, f64, Published); 13] = {
    use SurfaceFamily::{ExtendedPhase as Ph, RadialF3 as F3, RadialF4 as F4};
    const fn p(h_range: f64, sre: f64, steepness: f64, asymmetry: f64, su_angle_deg: f64) -> Published {
        Published { h_range, sre, steepness, asymmetry, su_angle_deg }
    }
    [
        (F3, 1, 0.008, 0.016, p(0.020, 0.010, 0.008, 0.0041, 99.0)),
        (F3, 1, 0.010, 0.011, p(0.024, 0.012, 0.010, 0.0051, 99.0)),
        (F3, 1, 0.005, 0.036, p(0.034, 0.017, 0.013, 0.0060, 92.0)),
        (F3, 1, 0.015, 0.011, p(0.035, 0.018, 0.014, 0.0076, 99.0)),
        (F4, 1, 0.015, 0.062, p(0.039, 0.020, 0.016, 0.0098, 132.0)),
        (Ph, 1, 0.023, 0.234, p(0.051, 0.028, 0.023, 0.0113, 154.0)),
        (F3, 1, 0.023, 0.023, p(0.056, 0.029, 0.023, 0.0118, 98.0)),
        (F3, 1, 0.023, 0.024, p(0.056, 0.030, 0.023, 0.0118, 99.0)),
        (Ph, 2, 0.032, 0.138, p(0.064, 0.035, 0.029, 0.0160, 137.0)),
        (F4, 1, 0.023, 0.129, p(0.066, 0.036, 0.028, 0.0168, 57.0)),
        (F4, 1, 0.023, 0.212, p(0.083, 0.046, 0.035, 0.0211, 124.0)),
        (Ph, 3, 0.052, -0.055, p(0.099, 0.056, 0.047, 0.0259, 143.0)),
        (F4, 1, 0.035, 0.274, p(0.117, 0.067, 0.052, 0.0296, 124.0)),
    ]
};

/// The thirteen bodies, ordered by published asymmetry.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    TABLE
        .iter()
        .enumerate()
        .map(|(i, &(family, harmonic, beta, coeff, published))| CatalogEntry {
            index: i + 1,
            spec: SurfaceSpec::new(family, beta, coeff, harmonic),
            source: "published".into(),
            published,
            reproduced: None,
            verdict: None,
            error: None,
        })
        .collect()
}

/// Parses entry selections such as `1-13`, `6` or `1,3,10-12`.
pub fn parse_entries(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad entry selection `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let (a, b) = match part.split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (part, part),
        };
        let a: usize = a.parse().map_err(|_| bad())?;
        let b: usize = b.parse().map_err(|_| bad())?;
        if a < 1 || b > TABLE.len() || a > b {
            return Err(bad());
        }
        out.extend(a..=b);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn measure(spec: &SurfaceSpec, oracle: &OracleSettings) -> Result<Reproduced> {
    let mesh = generate_mesh(spec, oracle.n_theta, oracle.n_phi)?;
    let mass = mass_properties(&mesh)?;
    let field = height_field_with_com(&mesh, mass.com, &oracle.dirs)?;
    Ok(Reproduced {
        metrics: metrics_from_field(&field, asymmetry(&mesh, mass.com)),
        ecs: ecs_from_field(&field, &oracle.thresholds)?,
        convexity_ratio: convexity_ratio(&mesh)?,
        volume: mass.volume,
    })
}

/// Measures one entry and fills in its verdict. Failures are recorded on
/// the entry.
pub fn reproduce(entry: &CatalogEntry, oracle: &OracleSettings) -> CatalogEntry {
    let mut out = entry.clone();
    match measure(&entry.spec, oracle) {
        Ok(r) => {
            let p = &entry.published;
            let m = &r.metrics;
            let ecs_all_one = r.ecs.is_mono_monostatic();
            let convex = r.convexity_ratio > CONVEXITY_THRESHOLD;
            let h_range = MetricCheck::absolute(p.h_range, m.h_range, H_RANGE_TOLERANCE);
            let sre = MetricCheck::relative(p.sre, m.sre, RELATIVE_TOLERANCE);
            let asym = MetricCheck::relative(p.asymmetry, m.asymmetry, RELATIVE_TOLERANCE);
            let su = MetricCheck::absolute(p.su_angle_deg, m.su_angle_deg, ANGLE_TOLERANCE_DEG);
            let all_pass = ecs_all_one && convex && h_range.pass && sre.pass && asym.pass && su.pass;
            out.verdict = Some(Verdict { ecs_all_one, convex, h_range, sre, asymmetry: asym, su_angle: su, all_pass });
            out.reproduced = Some(r);
            out.error = None;
        }
        Err(e) => {
            out.reproduced = None;
            out.verdict = None;
            out.error = Some(e.to_string());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub reproduced_entries: usize,
    pub ecs_one_entries: usize,
    pub all_pass_entries: usize,
    pub correlation: Option<f64>,
    pub correlation_ok: bool,
    pub sre_ratio: Option<f64>,
    pub sre_ratio_ok: bool,
    pub asymmetry_ratio: Option<f64>,
    pub asymmetry_ratio_ok: bool,
    pub phase_mean_sre: Option<f64>,
    pub radial_mean_sre: Option<f64>,
    pub phase_above_radial: bool,
    /// Steepness non-decreasing when entries are ordered by reproduced h-range.
    pub steepness_monotone: bool,
    /// Steepness against h-range, Pearson.
    pub steepness_correlation: Option<f64>,
    /// Reproduced asymmetry non-decreasing in catalog order.
    pub asymmetry_ordered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub entries: Vec<CatalogEntry>,
    pub aggregate: Aggregate,
}

fn max_over_min(v: &[f64]) -> Option<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    (v.len() >= 2 && min > 0.0).then(|| max / min)
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn aggregate(entries: &[CatalogEntry]) -> Aggregate {
    let done: Vec<(&CatalogEntry, &Reproduced)> =
        entries.iter().filter_map(|e| e.reproduced.as_ref().map(|r| (e, r))).collect();
    let metrics: Vec<MetricsReport> = done.iter().map(|(_, r)| r.metrics.clone()).collect();
    let sre: Vec<f64> = metrics.iter().map(|m| m.sre).collect();
    let asym: Vec<f64> = metrics.iter().map(|m| m.asymmetry).collect();
    let correlation = tradeoff_correlation(&metrics).ok();
    let sre_ratio = max_over_min(&sre);
    let asymmetry_ratio = max_over_min(&asym);
    let phase: Vec<f64> = done.iter().filter(|(e, _)| e.is_phase()).map(|(_, r)| r.metrics.sre).collect();
    let radial: Vec<f64> = done.iter().filter(|(e, _)| !e.is_phase()).map(|(_, r)| r.metrics.sre).collect();
    let (phase_mean_sre, radial_mean_sre) = (mean(&phase), mean(&radial));

    let mut by_range = metrics.clone();
    by_range.sort_by(|a, b| a.h_range.total_cmp(&b.h_range));
    let steepness_monotone = by_range.windows(2).all(|w| w[1].steepness >= w[0].steepness);
    let h: Vec<f64> = metrics.iter().map(|m| m.h_range).collect();
    let st: Vec<f64> = metrics.iter().map(|m| m.steepness).collect();

    Aggregate {
        reproduced_entries: done.len(),
        ecs_one_entries: done.iter().filter(|(_, r)| r.ecs.is_mono_monostatic()).count(),
        all_pass_entries: entries.iter().filter(|e| e.passed()).count(),
        correlation,
        correlation_ok: correlation.is_some_and(|r| r >= 0.99),
        sre_ratio,
        sre_ratio_ok: sre_ratio.is_some_and(|r| (5.5..=7.5).contains(&r)),
        asymmetry_ratio,
        asymmetry_ratio_ok: asymmetry_ratio.is_some_and(|r| (6.0..=8.5).contains(&r)),
        phase_mean_sre,
        radial_mean_sre,
        phase_above_radial: matches!((phase_mean_sre, radial_mean_sre), (Some(p), Some(r)) if p > r),
        steepness_monotone,
        steepness_correlation: pearson(&h, &st).ok(),
        asymmetry_ordered: asym.windows(2).all(|w| w[1] >= w[0]),
    }
}

/// Reproduces every entry in parallel; a failing entry never aborts the batch.
pub fn reproduce_all(entries: &[CatalogEntry], oracle: &OracleSettings) -> CatalogReport {
    let entries: Vec<CatalogEntry> = entries.par_iter().map(|e| reproduce(e, oracle)).collect();
    let aggregate = aggregate(&entries);
    CatalogReport { entries, aggregate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn table_rows() {
        let c = builtin_catalog();
        assert_eq!(c.len(), 13);
        assert_eq!(c[5].spec, SurfaceSpec::extended(0.023, 0.234, 1));
        assert_eq!(c[0].spec, SurfaceSpec::radial_f3(0.008, 0.016));
        assert_eq!(c[8].spec, SurfaceSpec::extended(0.032, 0.138, 2));
        assert_eq!(c[11].spec, SurfaceSpec::extended(0.052, -0.055, 3));
        assert_eq!(c[12].spec, SurfaceSpec::radial_f4(0.035, 0.274));
        assert!(c.windows(2).all(|w| w[1].published.asymmetry >= w[0].published.asymmetry));
        for e in &c {
            e.spec.validate().unwrap();
        }
    }

    #[test]
    fn published_aggregates() {
        // the published columns themselves satisfy the aggregate claims
        let c = builtin_catalog();
        let h: Vec<f64> = c.iter().map(|e| e.published.h_range).collect();
        let s: Vec<f64> = c.iter().map(|e| e.published.sre).collect();
        let a: Vec<f64> = c.iter().map(|e| e.published.asymmetry).collect();
        assert!(pearson(&h, &s).unwrap() > 0.999);
        assert!((max_over_min(&s).unwrap() - 6.7).abs() < 0.1);
        assert!((max_over_min(&a).unwrap() - 7.2).abs() < 0.1);
        let phase: Vec<f64> = c.iter().filter(|e| e.is_phase()).map(|e| e.published.sre).collect();
        assert!((mean(&phase).unwrap() - 0.040).abs() < 0.001);
    }

    #[test]
    fn entry_selection() {
        assert_eq!(parse_entries("1-13").unwrap().len(), 13);
        assert_eq!(parse_entries("6").unwrap(), vec![6]);
        assert_eq!(parse_entries("1,3,10-12,3").unwrap(), vec![1, 3, 10, 11, 12]);
        for bad in ["0", "14", "5-2", "x", ""] {
            assert!(parse_entries(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn checks_and_failures() {
        let c = MetricCheck::relative(0.010, 0.0109, 0.1);
        assert!(c.pass);
        assert!(!MetricCheck::absolute(57.0, 68.0, 10.0).pass);
        let config = RunConfig { directions: 300, n_theta: 16, n_phi: 32, ..RunConfig::default() };
        let oracle = OracleSettings::from_config(&config).unwrap();
        let mut bad = builtin_catalog()[0].clone();
        bad.spec.beta = 0.5;
        let out = reproduce_all(&[bad, builtin_catalog()[1].clone()], &oracle);
        assert!(out.entries[0].error.is_some());
        assert!(out.entries[1].reproduced.is_some());
        assert_eq!(out.aggregate.reproduced_entries, 1);
    }
}
