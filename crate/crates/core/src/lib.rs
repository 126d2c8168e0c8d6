//! Equilibrium counting, optimization and catalog reproduction for
//! mono-monostatic convex bodies.
//!
//! A body is a [`surfaces::SurfaceSpec`]; [`surfaces::generate_mesh`] turns
//! it into a [`mesh::TriMesh`], and [`oracle::ecs`] counts the stable
//! resting orientations by drainage-basin analysis of the centre-of-mass
//! height over the sphere of gravity directions.

pub mod catalog;
pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod metrics;
pub mod optimizer;
pub mod oracle;
pub mod surfaces;
pub mod unionfind;
pub mod vec3;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use mesh::TriMesh;
pub use surfaces::{SurfaceFamily, SurfaceSpec};
pub use vec3::Vec3;
