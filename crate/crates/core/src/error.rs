use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Error, Debug)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    /// A surface specification violates a structural invariant.
    #[error("invalid surface spec: {0}")]
    InvalidSpec(String),

    /// The r^4 expression reached zero or below, so the spec has no star-shaped body.
    #[error("non-positive r^4 = {r4:.6e} at theta = {theta:.6}, phi = {phi:.6}")]
    NonPositiveRadius { theta: f64, phi: f64, r4: f64 },

    /// An edge is not shared by exactly two triangles.
    #[error("mesh is not a closed 2-manifold ({bad_edges} bad edges)")]
    OpenMesh { bad_edges: usize },

    /// Signed volume is not positive (inverted winding).
    #[error("mesh has non-positive signed volume {0:.6e}")]
    NegativeVolume(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The height landscape is constant to within round-off.
    #[error("height landscape is flat (range {range:.3e})")]
    DegenerateFlat { range: f64 },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("malformed STL: {0}")]
    Stl(String),

    #[error("malformed argument: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::NonPositiveRadius { .. } => "non_positive_radius",
            Error::OpenMesh { .. } => "open_mesh",
            Error::NegativeVolume(_) => "negative_volume",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::DegenerateFlat { .. } => "degenerate_flat",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::Stl(_) => "stl",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
