//! Parameter search: differential evolution, beta sweeps and feasibility maps.

mod de;
mod feasibility;
mod objective;
mod sweep;

pub use de::{
    differential_evolution, verify_spec, Bounds, DeResult, DeStatus, GenerationRecord, OptimizationProblem,
    Verification, ACCEPT_OBJECTIVE, VERIFY_AZIMUTH_OFFSET,
};
pub use feasibility::{feasibility_map, parse_grid, Component, FeasibilityMap, MapCell, MIN_MAP_CELLS};
pub use objective::{
    evaluate_body, objective, BodyEvaluation, ObjectiveBreakdown, OracleSettings, PenaltyWeights,
    DEFAULT_COM_TOLERANCE, INADMISSIBLE_PENALTY,
};
pub use sweep::{beta_sweep, SweepRow};
