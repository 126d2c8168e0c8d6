use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::geometry::{convexity_ratio, mass_properties, CONVEXITY_THRESHOLD};
use crate::oracle::{analytic_com, degenerate_report, ecs, DirectionSet, EcsReport};
use crate::surfaces::{generate_mesh, SurfaceSpec};
use crate::vec3::Vec3;

/// Objective value assigned to specs with no admissible body.
pub const INADMISSIBLE_PENALTY: f64 = 1e6;
pub const DEFAULT_COM_TOLERANCE: f64 = 1e-7;

/// Direction set, mesh resolution and thresholds used to judge a spec.
#[derive(Clone, Debug)]
pub struct OracleSettings {
    pub dirs: DirectionSet,
    pub n_theta: usize,
    pub n_phi: usize,
    pub thresholds: Vec<f64>,
}

impl OracleSettings {
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        Ok(OracleSettings {
            dirs: config.direction_set()?,
            n_theta: config.n_theta,
            n_phi: config.n_phi,
            thresholds: config.thresholds.clone(),
        })
    }
}

/// Everything measured about one spec at one resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyEvaluation {
    pub spec: SurfaceSpec,
    pub admissible: bool,
    pub error: Option<String>,
    pub ecs: Option<EcsReport>,
    pub convexity_ratio: Option<f64>,
    pub volume: Option<f64>,
    pub mesh_com: Option<Vec3>,
    /// `|com|` from quadrature of the analytic surface.
    pub com_violation: Option<f64>,
}

impl BodyEvaluation {
    pub fn is_convex(&self) -> bool {
        self.convexity_ratio.is_some_and(|r| r > CONVEXITY_THRESHOLD)
    }

    /// Fixpoint count 1 at every evaluated threshold.
    pub fn is_mono_monostatic(&self) -> bool {
        self.ecs.as_ref().is_some_and(EcsReport::is_mono_monostatic)
    }

    pub fn is_degenerate(&self) -> bool {
        self.ecs.as_ref().is_some_and(|r| r.degenerate)
    }

    fn failed(spec: SurfaceSpec, admissible: bool, error: String) -> Self {
        BodyEvaluation {
            spec,
            admissible,
            error: Some(error),
            ecs: None,
            convexity_ratio: None,
            volume: None,
            mesh_com: None,
            com_violation: None,
        }
    }
}

/// Meshes `spec` and runs the oracle, convexity test and analytic COM.
///
/// A spec whose `r^4` is identically 1 is reported as a degenerate sphere
/// without meshing. Failures are recorded, not returned.
pub fn evaluate_body(spec: &SurfaceSpec, oracle: &OracleSettings) -> BodyEvaluation {
    if let Err(e) = spec.validate() {
        return BodyEvaluation::failed(*spec, false, e.to_string());
    }
    if spec.is_sphere() {
        return BodyEvaluation {
            spec: *spec,
            admissible: true,
            error: None,
            ecs: Some(degenerate_report(&oracle.thresholds, 1.0)),
            convexity_ratio: Some(1.0),
            volume: Some(4.0 * std::f64::consts::PI / 3.0),
            mesh_com: Some(Vec3::ZERO),
            com_violation: Some(0.0),
        };
    }
    let mesh = match generate_mesh(spec, oracle.n_theta, oracle.n_phi) {
        Ok(m) => m,
        Err(e) => return BodyEvaluation::failed(*spec, false, e.to_string()),
    };
    let run = || -> Result<BodyEvaluation> {
        let mass = mass_properties(&mesh)?;
        Ok(BodyEvaluation {
            spec: *spec,
            admissible: true,
            error: None,
            ecs: Some(ecs(&mesh, &oracle.dirs, &oracle.thresholds)?),
            convexity_ratio: Some(convexity_ratio(&mesh)?),
            volume: Some(mass.volume),
            mesh_com: Some(mass.com),
            com_violation: Some(analytic_com(spec, 64, 128)?.com.norm()),
        })
    };
    run().unwrap_or_else(|e| BodyEvaluation::failed(*spec, true, e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    /// Multiplies `h_range` to give the convexity penalty weight.
    pub convex_scale: f64,
    /// Multiplies `h_range` to give the COM penalty weight.
    pub com_scale: f64,
    pub com_tolerance: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights { convex_scale: 1e3, com_scale: 1e3, com_tolerance: DEFAULT_COM_TOLERANCE }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub objective: f64,
    /// Height gap between the lowest sink and the next distinct sink height.
    pub gap: f64,
    pub convex_penalty: f64,
    pub com_penalty: f64,
    pub evaluation: BodyEvaluation,
}

/// Gap between the lowest sink and the next distinct sink height, plus
/// constraint penalties.
///
/// Sinks within the strictest configured threshold of the global minimum
/// are not counted as distinct, so mirror-image sink pairs of equal height
/// (which need not be adjacent) do not hide the real gap.
pub fn objective(spec: &SurfaceSpec, oracle: &OracleSettings, weights: &PenaltyWeights) -> ObjectiveBreakdown {
    let evaluation = evaluate_body(spec, oracle);
    let (Some(report), Some(ratio), Some(com)) =
        (&evaluation.ecs, evaluation.convexity_ratio, evaluation.com_violation)
    else {
        return ObjectiveBreakdown {
            objective: INADMISSIBLE_PENALTY,
            gap: f64::NAN,
            convex_penalty: 0.0,
            com_penalty: 0.0,
            evaluation,
        };
    };
    let gap = report.strict_gap;
    let convex_penalty = weights.convex_scale * report.h_range * (CONVEXITY_THRESHOLD - ratio).max(0.0);
    let com_penalty = weights.com_scale * report.h_range * (com - weights.com_tolerance).max(0.0);
    ObjectiveBreakdown { objective: gap + convex_penalty + com_penalty, gap, convex_penalty, com_penalty, evaluation }
}
