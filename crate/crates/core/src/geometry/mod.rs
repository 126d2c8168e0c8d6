//! Mass properties, convex hulls and shape descriptors of closed meshes.

mod hull;
mod mass;

pub use hull::{convex_hull, HULL_EPS_REL};
pub use mass::{mass_properties, mass_properties_about, MassProperties};

use crate::error::Result;
use crate::mesh::TriMesh;
use crate::vec3::Vec3;

/// A body counts as convex when its volume exceeds this fraction of its hull's.
pub const CONVEXITY_THRESHOLD: f64 = 0.999;

/// Dihedral test tolerance, relative to the mesh scale.
const DIHEDRAL_EPS: f64 = 1e-12;

/// Mesh volume divided by the volume of the convex hull of its vertices.
///
/// Meshes that pass the all-edges-convex dihedral test are their own hull,
/// so the ratio is exactly 1 and no hull is built.
pub fn convexity_ratio(mesh: &TriMesh) -> Result<f64> {
    let volume = mass_properties(mesh)?.volume;
    if is_locally_convex(mesh) {
        return Ok(1.0);
    }
    let hull = convex_hull(&mesh.vertices)?;
    let hull_volume = mass::signed_volume(&hull);
    Ok((volume / hull_volume).min(1.0))
}

pub fn is_convex(mesh: &TriMesh) -> Result<bool> {
    Ok(convexity_ratio(mesh)? > CONVEXITY_THRESHOLD)
}

/// True when no edge is reflex: for every edge, the far vertex of each
/// adjacent triangle lies on or below the plane of the other.
pub fn is_locally_convex(mesh: &TriMesh) -> bool {
    use std::collections::HashMap;
    let scale = mesh.vertices.iter().map(|v| v.norm()).fold(0.0_f64, f64::max).max(1.0);
    let mut opposite: HashMap<(u32, u32), u32> = HashMap::with_capacity(mesh.triangles.len() * 3);
    for tri in &mesh.triangles {
        for i in 0..3 {
            opposite.insert((tri[i], tri[(i + 1) % 3]), tri[(i + 2) % 3]);
        }
    }
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let n = mesh.face_normal(t);
        let a = mesh.vertices[tri[0] as usize];
        for i in 0..3 {
            let Some(&far) = opposite.get(&(tri[(i + 1) % 3], tri[i])) else {
                return false;
            };
            if n.dot(mesh.vertices[far as usize] - a) > DIHEDRAL_EPS * scale {
                return false;
            }
        }
    }
    true
}

/// Coefficient of variation of vertex distances from `com`.
pub fn asymmetry(mesh: &TriMesh, com: Vec3) -> f64 {
    let d: Vec<f64> = mesh.vertices.iter().map(|&v| (v - com).norm()).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}
