//! Closed triangle meshes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{Rotation, Vec3};

/// Triangles with area below this are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// A triangulated surface: shared vertex list plus index triples wound
/// counter-clockwise when seen from outside.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

/// Summary of the edge structure of a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Topology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    /// Undirected edges not shared by exactly two triangles.
    pub non_manifold_edges: usize,
    /// Interior edges traversed in the same direction by both triangles.
    pub inconsistent_edges: usize,
}

impl Topology {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }

    pub fn is_closed_oriented(&self) -> bool {
        self.non_manifold_edges == 0 && self.inconsistent_edges == 0
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Self {
        TriMesh { vertices, triangles }
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]]
    }

    pub fn topology(&self) -> Topology {
        // value: (uses a->b with a < b, uses b->a)
        let mut edges: HashMap<(u32, u32), (u32, u32)> = HashMap::with_capacity(self.triangles.len() * 3 / 2 + 1);
        for tri in &self.triangles {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let e = edges.entry((a.min(b), a.max(b))).or_default();
                if a < b {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        let mut non_manifold = 0;
        let mut inconsistent = 0;
        for &(fwd, back) in edges.values() {
            if fwd + back != 2 {
                non_manifold += 1;
            } else if fwd != 1 {
                inconsistent += 1;
            }
        }
        Topology {
            vertices: self.vertices.len(),
            edges: edges.len(),
            faces: self.triangles.len(),
            non_manifold_edges: non_manifold,
            inconsistent_edges: inconsistent,
        }
    }

    /// Checks the closed, consistently oriented 2-manifold invariant.
    pub fn check_closed(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::OpenMesh { bad_edges: 0 });
        }
        if let Some(bad) = self.triangles.iter().flatten().find(|&&i| i as usize >= self.vertices.len()) {
            return Err(Error::DegenerateInput(format!("vertex index {bad} out of range")));
        }
        let topo = self.topology();
        if topo.is_closed_oriented() {
            Ok(())
        } else {
            Err(Error::OpenMesh { bad_edges: topo.non_manifold_edges + topo.inconsistent_edges })
        }
    }

    pub fn degenerate_triangle_count(&self) -> usize {
        (0..self.triangles.len())
            .filter(|&t| {
                let [a, b, c] = self.triangle(t);
                0.5 * (b - a).cross(c - a).norm() < DEGENERATE_AREA
            })
            .count()
    }

    /// Outward unit normal of triangle `t` from its winding.
    pub fn face_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangle(t);
        let n = (b - a).cross(c - a);
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            Vec3::ZERO
        }
    }

    pub fn translated(&self, t: Vec3) -> TriMesh {
        TriMesh { vertices: self.vertices.iter().map(|&v| v + t).collect(), triangles: self.triangles.clone() }
    }

    pub fn rotated(&self, r: &Rotation) -> TriMesh {
        TriMesh { vertices: self.vertices.iter().map(|&v| r.apply(v)).collect(), triangles: self.triangles.clone() }
    }

    /// Mean of the vertex positions.
    pub fn vertex_centroid(&self) -> Vec3 {
        let mut s = Vec3::ZERO;
        for &v in &self.vertices {
            s += v;
        }
        s / self.vertices.len().max(1) as f64
    }
}
