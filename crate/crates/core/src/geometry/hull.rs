//! Incremental 3-D quickhull.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::vec3::Vec3;

/// Distance tolerance relative to the bounding-box diagonal.
pub const HULL_EPS_REL: f64 = 1e-10;

struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    /// `neighbors[i]` shares the edge `v[i] -> v[(i + 1) % 3]`.
    neighbors: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
    stamp: u64,
}

impl Face {
    fn new(v: [usize; 3], pts: &[Vec3]) -> Face {
        let (a, b, c) = (pts[v[0]], pts[v[1]], pts[v[2]]);
        let n = (b - a).cross(c - a);
        let len = n.norm();
        let normal = if len > 0.0 { n / len } else { Vec3::ZERO };
        Face {
            v,
            normal,
            offset: normal.dot(a),
            neighbors: [usize::MAX; 3],
            outside: Vec::new(),
            alive: true,
            stamp: 0,
        }
    }

    #[inline]
    fn distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    fn edge_slot(&self, a: usize, b: usize) -> Option<usize> {
        (0..3).find(|&i| self.v[i] == a && self.v[(i + 1) % 3] == b)
    }
}

/// Convex hull of a point cloud as a closed, outward-wound mesh containing
/// only the hull vertices.
///
/// Fails with [`Error::DegenerateInput`] for fewer than four points, non-finite
/// coordinates, or (nearly) collinear/coplanar sets.
pub fn convex_hull(points: &[Vec3]) -> Result<TriMesh> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!("convex hull needs at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite())) {
        return Err(Error::DegenerateInput("non-finite point".into()));
    }

    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    let eps = HULL_EPS_REL * (hi - lo).norm();
    if eps == 0.0 {
        return Err(Error::DegenerateInput("all points coincide".into()));
    }

    let simplex = initial_simplex(points, eps)?;
    let mut faces: Vec<Face> = Vec::new();
    {
        let [a, b, c, d] = simplex;
        let tris = [[a, b, c], [a, d, b], [b, d, c], [c, d, a]];
        let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, t) in tris.iter().enumerate() {
            faces.push(Face::new(*t, points));
            for i in 0..3 {
                edge_owner.insert((t[i], t[(i + 1) % 3]), fi);
            }
        }
        for f in faces.iter_mut() {
            for i in 0..3 {
                let (x, y) = (f.v[i], f.v[(i + 1) % 3]);
                f.neighbors[i] = edge_owner[&(y, x)];
            }
        }
    }

    for (i, &p) in points.iter().enumerate() {
        if simplex.contains(&i) {
            continue;
        }
        if let Some(f) = faces.iter_mut().find(|f| f.distance(p) > eps) {
            f.outside.push(i);
        }
    }

    let mut pending: Vec<usize> = (0..faces.len()).collect();
    let mut stamp = 0u64;
    let mut visible: Vec<usize> = Vec::new();
    let mut horizon: Vec<(usize, usize, usize)> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();

    while let Some(fi) = pending.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        let eye = *faces[fi]
            .outside
            .iter()
            .max_by(|&&a, &&b| {
                let fa = faces[fi].distance(points[a]);
                let fb = faces[fi].distance(points[b]);
                fa.total_cmp(&fb)
            })
            .expect("non-empty outside set");
        let eye_p = points[eye];

        stamp += 1;
        visible.clear();
        horizon.clear();
        stack.clear();
        stack.push(fi);
        faces[fi].stamp = stamp;
        while let Some(f) = stack.pop() {
            visible.push(f);
            for i in 0..3 {
                let nb = faces[f].neighbors[i];
                if faces[nb].stamp == stamp {
                    continue;
                }
                if faces[nb].distance(eye_p) > eps {
                    faces[nb].stamp = stamp;
                    stack.push(nb);
                }
            }
        }
        for &f in &visible {
            for i in 0..3 {
                let nb = faces[f].neighbors[i];
                if faces[nb].stamp != stamp {
                    horizon.push((faces[f].v[i], faces[f].v[(i + 1) % 3], nb));
                }
            }
        }

        let first_new = faces.len();
        let mut starting_at: HashMap<usize, usize> = HashMap::with_capacity(horizon.len());
        for &(a, b, nb) in &horizon {
            let nf = faces.len();
            let mut face = Face::new([a, b, eye], points);
            face.neighbors[0] = nb;
            let slot =
                faces[nb].edge_slot(b, a).ok_or_else(|| Error::DegenerateInput("inconsistent hull horizon".into()))?;
            faces[nb].neighbors[slot] = nf;
            faces.push(face);
            if starting_at.insert(a, nf).is_some() {
                return Err(Error::DegenerateInput("non-simple hull horizon".into()));
            }
        }
        for nf in first_new..faces.len() {
            // edge b -> eye borders the new face whose horizon edge starts at b
            let b = faces[nf].v[1];
            let next = *starting_at.get(&b).ok_or_else(|| Error::DegenerateInput("open hull horizon".into()))?;
            faces[nf].neighbors[1] = next;
            faces[next].neighbors[2] = nf;
        }

        let mut orphans = Vec::new();
        for &f in &visible {
            faces[f].alive = false;
            orphans.append(&mut faces[f].outside);
        }
        for p in orphans {
            if p == eye {
                continue;
            }
            let pt = points[p];
            if let Some(nf) = (first_new..faces.len()).find(|&nf| faces[nf].distance(pt) > eps) {
                faces[nf].outside.push(p);
            }
        }
        pending.extend(first_new..faces.len());
    }

    let mut remap = vec![u32::MAX; points.len()];
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for f in faces.iter().filter(|f| f.alive) {
        let mut t = [0u32; 3];
        for (k, &v) in f.v.iter().enumerate() {
            if remap[v] == u32::MAX {
                remap[v] = vertices.len() as u32;
                vertices.push(points[v]);
            }
            t[k] = remap[v];
        }
        triangles.push(t);
    }
    Ok(TriMesh::new(vertices, triangles))
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Result<[usize; 4]> {
    let mut extremes = [0usize; 6];
    for (i, p) in points.iter().enumerate() {
        let coords = [p.x, p.y, p.z];
        for axis in 0..3 {
            let c = |j: usize| -> f64 {
                let q = points[j];
                [q.x, q.y, q.z][axis]
            };
            if coords[axis] < c(extremes[2 * axis]) {
                extremes[2 * axis] = i;
            }
            if coords[axis] > c(extremes[2 * axis + 1]) {
                extremes[2 * axis + 1] = i;
            }
        }
    }
    let mut best = (0.0, 0, 0);
    for &i in &extremes {
        for &j in &extremes {
            let d = (points[i] - points[j]).norm_squared();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (a, b) = (best.1, best.2);
    if best.0.sqrt() <= eps {
        return Err(Error::DegenerateInput("all points coincide".into()));
    }
    let ab = (points[b] - points[a]).normalized();
    let (c, line_dist) = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, (p - points[a]).cross(ab).norm()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty");
    if line_dist <= eps {
        return Err(Error::DegenerateInput("points are collinear".into()));
    }
    let n = (points[b] - points[a]).cross(points[c] - points[a]).normalized();
    let (d, plane_dist) = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, n.dot(p - points[a])))
        .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .expect("non-empty");
    if plane_dist.abs() <= eps {
        return Err(Error::DegenerateInput("points are coplanar".into()));
    }
    // face (a, b, c) must face away from d
    Ok(if plane_dist > 0.0 { [a, c, b, d] } else { [a, b, c, d] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mass::mass_properties;
    use crate::surfaces::{canonical_body, CanonicalBody};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Largest signed distance of any point outside any hull face.
    fn max_outside(hull: &TriMesh, pts: &[Vec3]) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for t in 0..hull.triangles.len() {
            let n = hull.face_normal(t);
            let a = hull.triangle(t)[0];
            for &p in pts {
                worst = worst.max(n.dot(p - a));
            }
        }
        worst
    }

    #[test]
    fn cube_with_interior_point() {
        let cube = canonical_body(CanonicalBody::Cube, 8).unwrap();
        let mut pts = cube.vertices.clone();
        pts.push(Vec3::ZERO);
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 8);
        hull.check_closed().unwrap();
        let v = mass_properties(&hull).unwrap().volume;
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_ball_points_contained() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pts = Vec::new();
        while pts.len() < 100 {
            let p = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if p.norm() <= 1.0 {
                pts.push(p);
            }
        }
        let hull = convex_hull(&pts).unwrap();
        hull.check_closed().unwrap();
        assert!(mass_properties(&hull).unwrap().volume > 0.0);
        assert!(max_outside(&hull, &pts) <= 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        let line: Vec<Vec3> = (0..5).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        assert!(matches!(convex_hull(&line), Err(Error::DegenerateInput(_))));
        let plane: Vec<Vec3> = (0..9).map(|i| Vec3::new((i % 3) as f64, (i / 3) as f64, 0.0)).collect();
        assert!(matches!(convex_hull(&plane), Err(Error::DegenerateInput(_))));
        assert!(convex_hull(&plane[..3]).is_err());
    }

    #[test]
    fn hull_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Vec3> =
            (0..500).map(|_| Vec3::new(rng.gen(), rng.gen::<f64>() * 2.0, rng.gen::<f64>() - 0.5)).collect();
        let h1 = convex_hull(&pts).unwrap();
        let h2 = convex_hull(&h1.vertices).unwrap();
        let v1 = mass_properties(&h1).unwrap().volume;
        let v2 = mass_properties(&h2).unwrap().volume;
        assert!((v1 - v2).abs() < 1e-10);
        assert_eq!(h1.vertices.len(), h2.vertices.len());
    }
}
