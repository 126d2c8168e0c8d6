//! Binary STL.
//!
//! Layout: 80-byte header, little-endian `u32` triangle count, then per
//! triangle a normal and three vertices as `f32` triples and a zero `u16`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::vec3::Vec3;

pub const HEADER_LEN: usize = 80;
pub const RECORD_LEN: usize = 50;

/// Header text: tool name, version and a free-form description.
pub fn header_text(description: &str) -> String {
    format!("monostatic {} {}", env!("CARGO_PKG_VERSION"), description)
}

fn f32s(v: Vec3) -> [f32; 3] {
    [v.x as f32, v.y as f32, v.z as f32]
}

/// Unit normal of the rounded triangle, zero if degenerate.
fn normal32(a: [f32; 3], b: [f32; 3], c: [f32; 3]) -> [f32; 3] {
    let p = |v: [f32; 3]| Vec3::new(v[0] as f64, v[1] as f64, v[2] as f64);
    let n = (p(b) - p(a)).cross(p(c) - p(a));
    let len = n.norm();
    if len > 0.0 {
        f32s(n / len)
    } else {
        [0.0; 3]
    }
}

/// Encodes `mesh`; normals are recomputed from the winding.
pub fn encode_stl(mesh: &TriMesh, description: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 + RECORD_LEN * mesh.triangles.len());
    let mut header = [0u8; HEADER_LEN];
    let text = header_text(description);
    let n = text.len().min(HEADER_LEN);
    header[..n].copy_from_slice(&text.as_bytes()[..n]);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.triangles.len() as u32).to_le_bytes());
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(t).map(f32s);
        for v in [normal32(a, b, c), a, b, c] {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

/// Decodes a binary STL, merging vertices with bit-identical coordinates.
pub fn decode_stl(bytes: &[u8]) -> Result<TriMesh> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(Error::Stl(format!("file too short ({} bytes)", bytes.len())));
    }
    let count = u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap()) as usize;
    let expected = HEADER_LEN + 4 + count * RECORD_LEN;
    if bytes.len() != expected {
        if bytes.starts_with(b"solid") {
            return Err(Error::Stl("ASCII STL is not supported".into()));
        }
        return Err(Error::Stl(format!("{count} triangles need {expected} bytes, file has {}", bytes.len())));
    }
    let mut index: HashMap<[u32; 3], u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(count);
    let f = |o: usize| f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    for t in 0..count {
        let base = HEADER_LEN + 4 + t * RECORD_LEN + 12;
        let mut tri = [0u32; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let o = base + 12 * k;
            let v = [f(o), f(o + 4), f(o + 8)];
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Stl(format!("non-finite vertex in triangle {t}")));
            }
            let key = v.map(f32::to_bits);
            *slot = *index.entry(key).or_insert_with(|| {
                vertices.push(Vec3::new(v[0] as f64, v[1] as f64, v[2] as f64));
                (vertices.len() - 1) as u32
            });
        }
        triangles.push(tri);
    }
    Ok(TriMesh::new(vertices, triangles))
}

pub fn write_stl(mesh: &TriMesh, path: &Path, description: &str) -> Result<()> {
    fs::write(path, encode_stl(mesh, description))?;
    Ok(())
}

pub fn read_stl(path: &Path) -> Result<TriMesh> {
    decode_stl(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{canonical_body, generate_mesh, CanonicalBody, SurfaceSpec};

    #[test]
    fn cube_file_size_and_header() {
        let cube = canonical_body(CanonicalBody::Cube, 8).unwrap();
        let bytes = encode_stl(&cube, "cube");
        assert_eq!(bytes.len(), 684);
        assert!(bytes.starts_with(b"monostatic "));
        assert_eq!(u32::from_le_bytes(bytes[80..84].try_into().unwrap()), 12);
        // attribute bytes are zero
        assert_eq!(&bytes[84 + 48..84 + 50], &[0, 0]);
    }

    #[test]
    fn normals_follow_winding() {
        let cube = canonical_body(CanonicalBody::Cube, 8).unwrap();
        let bytes = encode_stl(&cube, "");
        for t in 0..12 {
            let o = 84 + t * RECORD_LEN;
            let n: Vec<f32> =
                (0..3).map(|k| f32::from_le_bytes(bytes[o + 4 * k..o + 4 * k + 4].try_into().unwrap())).collect();
            let c = cube.triangle(t).iter().fold(Vec3::ZERO, |s, &v| s + v) / 3.0;
            let dot = n[0] as f64 * c.x + n[1] as f64 * c.y + n[2] as f64 * c.z;
            assert!(dot > 0.0);
        }
    }

    #[test]
    fn round_trip_at_f32_precision() {
        let m = generate_mesh(&SurfaceSpec::radial_f3(0.02, 0.03), 12, 24).unwrap();
        let back = decode_stl(&encode_stl(&m, "x")).unwrap();
        assert_eq!(back.triangles.len(), m.triangles.len());
        assert_eq!(back.vertices.len(), m.vertices.len());
        for t in 0..m.triangles.len() {
            for (a, b) in m.triangle(t).iter().zip(back.triangle(t)) {
                assert_eq!([a.x as f32, a.y as f32, a.z as f32], [b.x as f32, b.y as f32, b.z as f32]);
            }
        }
        back.check_closed().unwrap();
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let m = generate_mesh(&SurfaceSpec::sloan_eta(0.05), 16, 32).unwrap();
        let first = encode_stl(&m, "eta");
        let second = encode_stl(&decode_stl(&first).unwrap(), "eta");
        assert_eq!(first, second);
    }

    #[test]
    fn malformed_files_rejected() {
        let cube = canonical_body(CanonicalBody::Cube, 8).unwrap();
        let bytes = encode_stl(&cube, "");
        assert!(decode_stl(&bytes[..100]).is_err());
        assert!(decode_stl(&bytes[..50]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_stl(&extra).is_err());
    }

    #[test]
    fn single_triangle_is_not_closed() {
        let m = TriMesh::new(vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)], vec![[0, 1, 2]]);
        let back = decode_stl(&encode_stl(&m, "tri")).unwrap();
        assert!(matches!(back.check_closed(), Err(Error::OpenMesh { .. })));
    }
}
