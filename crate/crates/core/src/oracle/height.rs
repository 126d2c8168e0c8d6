use rayon::prelude::*;

use super::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::mass_properties;
use crate::mesh::TriMesh;
use crate::vec3::Vec3;

/// Height of the centre of mass above the support plane, sampled over a
/// direction set.
#[derive(Clone, Debug)]
pub struct HeightField<'a> {
    pub dirs: &'a DirectionSet,
    pub h: Vec<f64>,
    pub h_min: f64,
    pub h_max: f64,
    /// Index of the lowest sample (first on ties).
    pub argmin: usize,
    /// Index of the highest sample (first on ties).
    pub argmax: usize,
}

impl<'a> HeightField<'a> {
    pub fn from_values(dirs: &'a DirectionSet, h: Vec<f64>) -> Result<Self> {
        if h.len() != dirs.len() {
            return Err(Error::InsufficientData { needed: dirs.len(), got: h.len() });
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateInput("non-finite height".into()));
        }
        let mut argmin = 0;
        let mut argmax = 0;
        for (i, &x) in h.iter().enumerate() {
            if x < h[argmin] {
                argmin = i;
            }
            if x > h[argmax] {
                argmax = i;
            }
        }
        Ok(HeightField { dirs, h_min: h[argmin], h_max: h[argmax], argmin, argmax, h })
    }

    pub fn h_range(&self) -> f64 {
        self.h_max - self.h_min
    }

    /// Flat to round-off: `h_range < 1e-12 max(1, h_max)`.
    pub fn is_flat(&self) -> bool {
        self.h_range() < 1e-12 * self.h_max.abs().max(1.0)
    }

    /// Angle in degrees between the global minimum and global maximum directions.
    pub fn stable_unstable_angle_deg(&self) -> f64 {
        self.dirs.directions[self.argmin].angle_to(self.dirs.directions[self.argmax]).to_degrees()
    }
}

/// `h(d) = c . d - min_v v . d`; the minimizing vertex is the support point.
pub fn com_height(mesh: &TriMesh, com: Vec3, d: Vec3) -> f64 {
    com.dot(d) - support_min(&mesh.vertices, d)
}

fn support_min(vertices: &[Vec3], d: Vec3) -> f64 {
    vertices.iter().map(|v| v.dot(d)).fold(f64::INFINITY, f64::min)
}

/// Height field with the mesh's own centre of mass.
pub fn height_field<'a>(mesh: &TriMesh, dirs: &'a DirectionSet) -> Result<HeightField<'a>> {
    let com = mass_properties(mesh)?.com;
    height_field_with_com(mesh, com, dirs)
}

pub fn height_field_with_com<'a>(mesh: &TriMesh, com: Vec3, dirs: &'a DirectionSet) -> Result<HeightField<'a>> {
    let xs: Vec<f64> = mesh.vertices.iter().map(|v| v.x).collect();
    let ys: Vec<f64> = mesh.vertices.iter().map(|v| v.y).collect();
    let zs: Vec<f64> = mesh.vertices.iter().map(|v| v.z).collect();
    let h = dirs
        .directions
        .par_iter()
        .map(|&d| {
            let mut m = f64::INFINITY;
            for ((x, y), z) in xs.iter().zip(&ys).zip(&zs) {
                m = m.min(x * d.x + y * d.y + z * d.z);
            }
            com.dot(d) - m
        })
        .collect();
    HeightField::from_values(dirs, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fibonacci_sphere;
    use crate::surfaces::{canonical_body, generate_mesh, CanonicalBody, SurfaceSpec};

    #[test]
    fn cube_face_and_corner_heights() {
        let cube = canonical_body(CanonicalBody::Cube, 8).unwrap();
        let h = com_height(&cube, Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0));
        assert!((h - 0.5).abs() < 1e-15);
        let d = Vec3::new(1.0, 1.0, 1.0).normalized();
        let h = com_height(&cube, Vec3::ZERO, d);
        assert!((h - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_height_is_constant() {
        let m = generate_mesh(&SurfaceSpec::sphere(), 100, 200).unwrap();
        let dirs = fibonacci_sphere(5000, 12).unwrap();
        let f = height_field(&m, &dirs).unwrap();
        assert!(f.h_range() < 1e-3);
        assert!((f.h_min - 1.0).abs() < 1e-3);
        assert!(f.h.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn flatness_detection() {
        let dirs = fibonacci_sphere(200, 6).unwrap();
        let f = HeightField::from_values(&dirs, vec![0.7; 200]).unwrap();
        assert!(f.is_flat());
        let mut v = vec![0.7; 200];
        v[3] = 0.71;
        assert!(!HeightField::from_values(&dirs, v).unwrap().is_flat());
    }
}
