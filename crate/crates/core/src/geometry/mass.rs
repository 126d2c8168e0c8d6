use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::vec3::Vec3;

/// Volume and centre of mass of a homogeneous closed body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassProperties {
    pub volume: f64,
    pub com: Vec3,
}

/// Signed-tetrahedron decomposition about the vertex centroid.
///
/// Fails with [`Error::OpenMesh`] unless the mesh is a closed, consistently
/// oriented manifold, and with [`Error::NegativeVolume`] if it is wound inward.
pub fn mass_properties(mesh: &TriMesh) -> Result<MassProperties> {
    mesh.check_closed()?;
    mass_properties_about(mesh, mesh.vertex_centroid())
}

/// Same decomposition with an explicit apex for the tetrahedra. The result
/// does not depend on `reference` for closed meshes; callers that already
/// know the mesh is closed may use this directly.
pub fn mass_properties_about(mesh: &TriMesh, reference: Vec3) -> Result<MassProperties> {
    let mut six_vol = 0.0;
    let mut moment = Vec3::ZERO;
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(t);
        let (a, b, c) = (a - reference, b - reference, c - reference);
        let v6 = a.dot(b.cross(c));
        six_vol += v6;
        moment += (a + b + c) * v6;
    }
    let volume = six_vol / 6.0;
    if volume.is_nan() || volume <= 0.0 {
        return Err(Error::NegativeVolume(volume));
    }
    Ok(MassProperties { volume, com: reference + moment / (4.0 * six_vol) })
}

/// Volume only (no closure check), used for hull meshes built internally.
pub(crate) fn signed_volume(mesh: &TriMesh) -> f64 {
    let r = mesh.vertex_centroid();
    (0..mesh.triangles.len())
        .map(|t| {
            let [a, b, c] = mesh.triangle(t);
            (a - r).dot((b - r).cross(c - r))
        })
        .sum::<f64>()
        / 6.0
}
