use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{evaluate_body, BodyEvaluation, OracleSettings};
use crate::oracle::DEFAULT_THRESHOLD;
use crate::surfaces::SurfaceSpec;

/// One row of a beta sweep. Fields are empty when the row failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub ecs: Option<usize>,
    pub single_pass_ecs: Option<usize>,
    pub raw_basin_count: Option<usize>,
    pub convex: Option<bool>,
    pub convexity_ratio: Option<f64>,
    pub h_range: Option<f64>,
    pub degenerate: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_evaluation(e: &BodyEvaluation) -> Self {
        let r = e.ecs.as_ref();
        SweepRow {
            beta: e.spec.beta,
            ecs: r.map(|r| r.default_ecs),
            single_pass_ecs: r.and_then(|r| r.single_pass_count(DEFAULT_THRESHOLD)),
            raw_basin_count: r.map(|r| r.raw_basin_count),
            convex: e.convexity_ratio.map(|_| e.is_convex()),
            convexity_ratio: e.convexity_ratio,
            h_range: r.map(|r| r.h_range),
            degenerate: e.is_degenerate(),
            error: e.error.clone(),
        }
    }
}

/// Runs the full pipeline for `template` at each beta. A failing row is
/// recorded and the sweep continues.
pub fn beta_sweep(template: &SurfaceSpec, betas: &[f64], oracle: &OracleSettings) -> Vec<SweepRow> {
    betas
        .par_iter()
        .map(|&beta| {
            let spec = SurfaceSpec { beta, ..*template };
            SweepRow::from_evaluation(&evaluate_body(&spec, oracle))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn sweep_marks_bad_rows_and_continues() {
        let config = RunConfig { directions: 500, n_theta: 20, n_phi: 40, ..RunConfig::default() };
        let oracle = OracleSettings::from_config(&config).unwrap();
        let rows = beta_sweep(&SurfaceSpec::sloan_eta(0.0), &[0.0, 0.05, 0.4], &oracle);
        assert_eq!(rows.len(), 3);
        assert!(rows[0].degenerate);
        assert_eq!(rows[0].ecs, Some(1));
        assert!(rows[1].ecs.is_some() && rows[1].error.is_none());
        assert!(rows[2].error.is_some());
        assert_eq!(rows[2].ecs, None);
    }
}
