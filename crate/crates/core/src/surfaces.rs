//! Analytic surface families and their triangulation.
//!
//! Every family is a star-shaped body about the origin, written as
//! `r^4 = 1 + 4 beta sin(theta) cos(phi - P(theta)) [+ eps f(theta, phi)]`
//! in spherical coordinates (theta from +z). The families differ in the
//! phase profile `P` and in the optional radial term `f`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::vec3::Vec3;

/// Published upper bound on beta for the linear-phase body.
pub const SLOAN_LINEAR_BETA_MAX: f64 = 0.15;
/// Published upper bound on beta for the eta-phase body.
pub const SLOAN_ETA_BETA_MAX: f64 = 0.17;

pub const DEFAULT_N_THETA: usize = 100;
pub const DEFAULT_N_PHI: usize = 200;
pub const MIN_N_THETA: usize = 8;
pub const MIN_N_PHI: usize = 16;

const ANGLE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceFamily {
    /// `P(theta) = 5 theta`.
    SloanLinearPhase,
    /// `P(theta) = eta(theta)`.
    SloanEtaPhase,
    /// `P(theta) = eta + a_k sin(k eta)`.
    ExtendedPhase,
    /// eta phase plus `eps sin^2(theta) cos(2 phi)`.
    RadialF3,
    /// eta phase plus `eps cos(theta) sin(theta) sin(phi)`.
    RadialF4,
}

impl SurfaceFamily {
    pub const ALL: [SurfaceFamily; 5] = [
        SurfaceFamily::SloanLinearPhase,
        SurfaceFamily::SloanEtaPhase,
        SurfaceFamily::ExtendedPhase,
        SurfaceFamily::RadialF3,
        SurfaceFamily::RadialF4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SurfaceFamily::SloanLinearPhase => "sloan-linear-phase",
            SurfaceFamily::SloanEtaPhase => "sloan-eta-phase",
            SurfaceFamily::ExtendedPhase => "extended-phase",
            SurfaceFamily::RadialF3 => "radial-f3",
            SurfaceFamily::RadialF4 => "radial-f4",
        }
    }

    /// Whether `coeff` enters the surface for this family.
    pub fn uses_coeff(self) -> bool {
        matches!(self, SurfaceFamily::ExtendedPhase | SurfaceFamily::RadialF3 | SurfaceFamily::RadialF4)
    }

    pub fn is_phase(self) -> bool {
        matches!(self, SurfaceFamily::ExtendedPhase)
    }

    pub fn is_radial(self) -> bool {
        matches!(self, SurfaceFamily::RadialF3 | SurfaceFamily::RadialF4)
    }
}

impl fmt::Display for SurfaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fam = match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "sloan-linear-phase" | "sloan-linear" | "linear" | "gomboc1" => SurfaceFamily::SloanLinearPhase,
            "sloan-eta-phase" | "sloan-eta" | "eta" | "gomboc2" => SurfaceFamily::SloanEtaPhase,
            "extended-phase" | "extended" | "phase" => SurfaceFamily::ExtendedPhase,
            "radial-f3" | "f3" => SurfaceFamily::RadialF3,
            "radial-f4" | "f4" => SurfaceFamily::RadialF4,
            other => return Err(Error::Parse(format!("unknown surface family `{other}`"))),
        };
        Ok(fam)
    }
}

/// A parameterized body.
///
/// `coeff` is `a_k` for [`SurfaceFamily::ExtendedPhase`] and `eps` for the
/// radial families; it is ignored otherwise. `harmonic` is `k` and only
/// matters for the extended phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub family: SurfaceFamily,
    pub beta: f64,
    pub coeff: f64,
    pub harmonic: u32,
}

impl SurfaceSpec {
    pub fn new(family: SurfaceFamily, beta: f64, coeff: f64, harmonic: u32) -> Self {
        SurfaceSpec { family, beta, coeff, harmonic }
    }

    pub fn sphere() -> Self {
        SurfaceSpec::new(SurfaceFamily::SloanEtaPhase, 0.0, 0.0, 1)
    }

    pub fn sloan_linear(beta: f64) -> Self {
        SurfaceSpec::new(SurfaceFamily::SloanLinearPhase, beta, 0.0, 1)
    }

    pub fn sloan_eta(beta: f64) -> Self {
        SurfaceSpec::new(SurfaceFamily::SloanEtaPhase, beta, 0.0, 1)
    }

    pub fn extended(beta: f64, a_k: f64, k: u32) -> Self {
        SurfaceSpec::new(SurfaceFamily::ExtendedPhase, beta, a_k, k)
    }

    pub fn radial_f3(beta: f64, eps: f64) -> Self {
        SurfaceSpec::new(SurfaceFamily::RadialF3, beta, eps, 1)
    }

    pub fn radial_f4(beta: f64, eps: f64) -> Self {
        SurfaceSpec::new(SurfaceFamily::RadialF4, beta, eps, 1)
    }

    /// Structural checks only; see [`check_admissible`] for `r^4 > 0`.
    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || !self.coeff.is_finite() {
            return Err(Error::InvalidSpec("beta and coeff must be finite".into()));
        }
        if self.beta < 0.0 {
            return Err(Error::InvalidSpec(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.family == SurfaceFamily::ExtendedPhase && !(1..=3).contains(&self.harmonic) {
            return Err(Error::InvalidSpec(format!(
                "harmonic must be 1, 2 or 3 for the extended phase, got {}",
                self.harmonic
            )));
        }
        Ok(())
    }

    /// True when `r^4` is identically 1.
    pub fn is_sphere(&self) -> bool {
        self.beta == 0.0 && (!self.family.is_radial() || self.coeff == 0.0)
    }

    /// Published beta bounds are advisory: exceeding one is reported, not rejected.
    pub fn bound_warnings(&self) -> Vec<String> {
        let bound = match self.family {
            SurfaceFamily::SloanLinearPhase => Some(SLOAN_LINEAR_BETA_MAX),
            SurfaceFamily::SloanEtaPhase => Some(SLOAN_ETA_BETA_MAX),
            _ => None,
        };
        match bound {
            Some(b) if self.beta > b => {
                vec![format!("beta = {} exceeds the published bound {} for {}", self.beta, b, self.family)]
            }
            _ => Vec::new(),
        }
    }

    /// Short human-readable label, e.g. `radial-f3 beta=0.008 eps=0.016`.
    pub fn summary(&self) -> String {
        match self.family {
            SurfaceFamily::ExtendedPhase => {
                format!("{} beta={} a{}={}", self.family, self.beta, self.harmonic, self.coeff)
            }
            SurfaceFamily::RadialF3 | SurfaceFamily::RadialF4 => {
                format!("{} beta={} eps={}", self.family, self.beta, self.coeff)
            }
            _ => format!("{} beta={}", self.family, self.beta),
        }
    }
}

/// Sloan's phase profile `(3 pi / 2)(cos theta - cos^3 theta / 3)`.
pub fn eta(theta: f64) -> Result<f64> {
    if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&theta) {
        return Err(Error::Domain { what: "theta", value: theta });
    }
    Ok(eta_unchecked(theta))
}

#[inline]
fn eta_unchecked(theta: f64) -> f64 {
    let c = theta.cos();
    1.5 * PI * (c - c * c * c / 3.0)
}

/// Phase function `P(theta)` of the family.
pub fn phase(spec: &SurfaceSpec, theta: f64) -> Result<f64> {
    if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&theta) {
        return Err(Error::Domain { what: "theta", value: theta });
    }
    Ok(phase_unchecked(spec, theta))
}

#[inline]
fn phase_unchecked(spec: &SurfaceSpec, theta: f64) -> f64 {
    match spec.family {
        SurfaceFamily::SloanLinearPhase => 5.0 * theta,
        SurfaceFamily::ExtendedPhase => {
            let e = eta_unchecked(theta);
            e + spec.coeff * (spec.harmonic as f64 * e).sin()
        }
        _ => eta_unchecked(theta),
    }
}

/// The family's `r^4` expression. Not checked for sign.
#[inline]
pub fn r4_expression(spec: &SurfaceSpec, theta: f64, phi: f64) -> f64 {
    let st = theta.sin();
    let base = 1.0 + 4.0 * spec.beta * st * (phi - phase_unchecked(spec, theta)).cos();
    match spec.family {
        SurfaceFamily::RadialF3 => base + spec.coeff * st * st * (2.0 * phi).cos(),
        SurfaceFamily::RadialF4 => base + spec.coeff * theta.cos() * st * phi.sin(),
        _ => base,
    }
}

/// Positive fourth root of `r^4`.
pub fn radius(spec: &SurfaceSpec, theta: f64, phi: f64) -> Result<f64> {
    let r4 = r4_expression(spec, theta, phi);
    if r4 > 0.0 && r4.is_finite() {
        Ok(r4.sqrt().sqrt())
    } else {
        Err(Error::NonPositiveRadius { theta, phi, r4 })
    }
}

/// Surface point for any `(theta, phi)`; polar angles outside `[0, pi]`
/// are reflected through the pole so unconstrained optimizers can roam.
pub fn surface_point(spec: &SurfaceSpec, theta: f64, phi: f64) -> Result<Vec3> {
    let (t, p) = wrap_angles(theta, phi);
    Ok(Vec3::from_spherical(t, p) * radius(spec, t, p)?)
}

/// Maps arbitrary `(theta, phi)` to `theta` in `[0, pi]` describing the same direction.
pub fn wrap_angles(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(2.0 * PI);
    let mut p = phi;
    if t > PI {
        t = 2.0 * PI - t;
        p += PI;
    }
    (t, p.rem_euclid(2.0 * PI))
}

/// Checks `r^4 > 0` on the generation grid and on a 4x oversampled grid.
pub fn check_admissible(spec: &SurfaceSpec, n_theta: usize, n_phi: usize) -> Result<()> {
    spec.validate()?;
    for pole in [0.0, PI] {
        radius(spec, pole, 0.0)?;
    }
    for (nt, np) in [(n_theta, n_phi), (4 * n_theta, 4 * n_phi)] {
        for i in 0..nt {
            let theta = PI * (i as f64 + 0.5) / nt as f64;
            for j in 0..np {
                let phi = 2.0 * PI * j as f64 / np as f64;
                radius(spec, theta, phi)?;
            }
        }
    }
    Ok(())
}

/// Triangulates `spec` on a latitude-longitude grid with cell-centred
/// rings `theta_i = pi (i + 1/2) / n_theta` and one apex per pole.
///
/// The result has `n_theta * n_phi + 2` vertices and `2 * n_theta * n_phi`
/// triangles.
pub fn generate_mesh(spec: &SurfaceSpec, n_theta: usize, n_phi: usize) -> Result<TriMesh> {
    if n_theta < MIN_N_THETA {
        return Err(Error::Domain { what: "n_theta", value: n_theta as f64 });
    }
    if n_phi < MIN_N_PHI {
        return Err(Error::Domain { what: "n_phi", value: n_phi as f64 });
    }
    check_admissible(spec, n_theta, n_phi)?;

    let mut rings = Vec::with_capacity(n_theta);
    for i in 0..n_theta {
        let theta = PI * (i as f64 + 0.5) / n_theta as f64;
        let ring = (0..n_phi)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                radius(spec, theta, phi).map(|r| Vec3::from_spherical(theta, phi) * r)
            })
            .collect::<Result<Vec<_>>>()?;
        rings.push(ring);
    }
    let north = Vec3::new(0.0, 0.0, radius(spec, 0.0, 0.0)?);
    let south = Vec3::new(0.0, 0.0, -radius(spec, PI, 0.0)?);
    Ok(ring_mesh(rings, north, south))
}

/// Closes a stack of equal-length vertex rings (ordered north to south,
/// counter-clockwise about +z) with one apex per pole.
fn ring_mesh(rings: Vec<Vec<Vec3>>, north: Vec3, south: Vec3) -> TriMesh {
    let n_rings = rings.len();
    let n_seg = rings[0].len();
    let mut vertices: Vec<Vec3> = rings.into_iter().flatten().collect();
    let n = vertices.len() as u32;
    vertices.push(north);
    vertices.push(south);
    let idx = |i: usize, j: usize| (i * n_seg + j % n_seg) as u32;

    let mut triangles = Vec::with_capacity(2 * n_rings * n_seg);
    for j in 0..n_seg {
        triangles.push([n, idx(0, j), idx(0, j + 1)]);
    }
    for i in 0..n_rings - 1 {
        for j in 0..n_seg {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    for j in 0..n_seg {
        triangles.push([n + 1, idx(n_rings - 1, j + 1), idx(n_rings - 1, j)]);
    }
    TriMesh::new(vertices, triangles)
}

/// Bodies with known equilibrium structure, used to validate the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CanonicalBody {
    Sphere,
    Cube,
    Cylinder,
    Capsule,
}

impl CanonicalBody {
    pub const ALL: [CanonicalBody; 4] =
        [CanonicalBody::Sphere, CanonicalBody::Cube, CanonicalBody::Cylinder, CanonicalBody::Capsule];

    pub fn name(self) -> &'static str {
        match self {
            CanonicalBody::Sphere => "sphere",
            CanonicalBody::Cube => "cube",
            CanonicalBody::Cylinder => "cylinder",
            CanonicalBody::Capsule => "capsule",
        }
    }
}

impl FromStr for CanonicalBody {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CanonicalBody::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown canonical body `{s}`")))
    }
}

/// Builds a validation body centred at the origin.
///
/// * sphere: unit sphere, `resolution x 2 resolution` grid
/// * cube: axis-aligned, side 1 (resolution ignored)
/// * cylinder: radius 0.5, height 1, `4 resolution` sides
/// * capsule: radius 0.5 cylinder of length 1 with hemispherical caps
///   (total height 2)
pub fn canonical_body(kind: CanonicalBody, resolution: usize) -> Result<TriMesh> {
    if resolution < 8 {
        return Err(Error::Domain { what: "resolution", value: resolution as f64 });
    }
    let n_seg = 4 * resolution;
    let ring = |rho: f64, z: f64| -> Vec<Vec3> {
        (0..n_seg)
            .map(|j| {
                let (s, c) = (2.0 * PI * j as f64 / n_seg as f64).sin_cos();
                Vec3::new(rho * c, rho * s, z)
            })
            .collect()
    };
    let mesh = match kind {
        CanonicalBody::Sphere => generate_mesh(&SurfaceSpec::sphere(), resolution, 2 * resolution)?,
        CanonicalBody::Cube => cube(),
        CanonicalBody::Cylinder => {
            ring_mesh(vec![ring(0.5, 0.5), ring(0.5, -0.5)], Vec3::new(0.0, 0.0, 0.5), Vec3::new(0.0, 0.0, -0.5))
        }
        CanonicalBody::Capsule => {
            let m = resolution;
            let mut rings = Vec::with_capacity(2 * m);
            for k in 1..=m {
                let a = 0.5 * PI * k as f64 / m as f64;
                rings.push(ring(0.5 * a.sin(), 0.5 + 0.5 * a.cos()));
            }
            for k in (1..=m).rev() {
                let a = 0.5 * PI * k as f64 / m as f64;
                rings.push(ring(0.5 * a.sin(), -0.5 - 0.5 * a.cos()));
            }
            ring_mesh(rings, Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0))
        }
    };
    Ok(mesh)
}

fn cube() -> TriMesh {
    let h = 0.5;
    let vertices = (0..8)
        .map(|i| {
            let s = |bit: usize| if i & bit != 0 { h } else { -h };
            Vec3::new(s(1), s(2), s(4))
        })
        .collect();
    // bit 0 = x, bit 1 = y, bit 2 = z
    let triangles = vec![
        [0, 2, 3],
        [0, 3, 1], // z-
        [4, 5, 7],
        [4, 7, 6], // z+
        [0, 1, 5],
        [0, 5, 4], // y-
        [2, 6, 7],
        [2, 7, 3], // y+
        [0, 4, 6],
        [0, 6, 2], // x-
        [1, 3, 7],
        [1, 7, 5], // x+
    ];
    TriMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_reference_values() {
        assert!(eta(PI / 2.0).unwrap().abs() < 1e-15);
        assert!((eta(0.0).unwrap() - PI).abs() < 1e-15);
        assert!((eta(PI).unwrap() + PI).abs() < 1e-14);
        assert!(matches!(eta(-0.1), Err(Error::Domain { .. })));
        assert!(eta(3.2).is_err());
    }

    #[test]
    fn eta_is_odd_about_equator() {
        for i in 0..50 {
            let t = 0.03 * i as f64;
            let a = eta(PI / 2.0 - t).unwrap();
            let b = eta(PI / 2.0 + t).unwrap();
            assert!((a + b).abs() < 1e-13);
        }
    }

    #[test]
    fn phase_reference_values() {
        let ext = SurfaceSpec::extended(0.023, 0.234, 1);
        assert!(phase(&ext, PI / 2.0).unwrap().abs() < 1e-15);
        assert!((phase(&ext, 0.0).unwrap() - PI).abs() < 1e-14);
        assert!((phase(&SurfaceSpec::sloan_linear(0.1), 0.2).unwrap() - 1.0).abs() < 1e-15);
        let f4 = SurfaceSpec::radial_f4(0.02, 0.1);
        assert_eq!(phase(&f4, 0.7).unwrap(), eta(0.7).unwrap());
    }

    #[test]
    fn radius_reference_values() {
        for fam in SurfaceFamily::ALL {
            let s = SurfaceSpec::new(fam, 0.0, 0.0, 1);
            assert!((radius(&s, 1.1, 2.3).unwrap() - 1.0).abs() < 1e-15);
        }
        let f4 = SurfaceSpec::radial_f4(0.0, 0.3);
        assert_eq!(radius(&f4, 0.0, 1.7).unwrap(), 1.0);
        // (1 + 4 * 0.05)^(1/4)
        let r = radius(&SurfaceSpec::sloan_eta(0.05), PI / 2.0, 0.0).unwrap();
        assert!((r - 1.2f64.powf(0.25)).abs() < 1e-12);
        assert!((r - 1.046635).abs() < 1e-6);
    }

    #[test]
    fn non_positive_radius_detected() {
        // 1 - 4 * 0.3 < 0 at theta = pi/2, phi = pi
        let s = SurfaceSpec::sloan_eta(0.3);
        assert!(matches!(radius(&s, PI / 2.0, PI), Err(Error::NonPositiveRadius { .. })));
        assert!(matches!(generate_mesh(&s, 16, 32), Err(Error::NonPositiveRadius { .. })));
    }

    #[test]
    fn spec_validation() {
        assert!(SurfaceSpec::sloan_eta(-1.0).validate().is_err());
        assert!(SurfaceSpec::extended(0.02, 0.1, 4).validate().is_err());
        assert!(SurfaceSpec::extended(0.02, 0.1, 3).validate().is_ok());
        assert!(SurfaceSpec::sloan_eta(0.1).bound_warnings().is_empty());
        assert_eq!(SurfaceSpec::sloan_eta(0.2).bound_warnings().len(), 1);
        assert_eq!(SurfaceSpec::sloan_linear(0.16).bound_warnings().len(), 1);
        assert!(SurfaceSpec::extended(0.0, 0.3, 2).is_sphere());
        assert!(!SurfaceSpec::radial_f3(0.0, 0.1).is_sphere());
        assert!(!SurfaceSpec::sloan_eta(0.01).is_sphere());
    }

    #[test]
    fn family_names_round_trip() {
        for fam in SurfaceFamily::ALL {
            assert_eq!(fam.name().parse::<SurfaceFamily>().unwrap(), fam);
        }
        assert_eq!("f3".parse::<SurfaceFamily>().unwrap(), SurfaceFamily::RadialF3);
        assert!("f5".parse::<SurfaceFamily>().is_err());
    }

    #[test]
    fn grid_counts_and_manifold() {
        let m = generate_mesh(&SurfaceSpec::radial_f3(0.02, 0.03), 12, 24).unwrap();
        assert_eq!(m.vertices.len(), 12 * 24 + 2);
        assert_eq!(m.triangles.len(), 2 * 12 * 24);
        let topo = m.topology();
        assert!(topo.is_closed_oriented());
        assert_eq!(topo.euler_characteristic(), 2);
        assert_eq!(m.degenerate_triangle_count(), 0);
    }

    #[test]
    fn sphere_vertices_on_unit_sphere() {
        let m = generate_mesh(&SurfaceSpec::sphere(), 80, 160).unwrap();
        let worst = m.vertices.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn resolution_preconditions() {
        assert!(generate_mesh(&SurfaceSpec::sphere(), 7, 16).is_err());
        assert!(generate_mesh(&SurfaceSpec::sphere(), 8, 15).is_err());
        assert!(canonical_body(CanonicalBody::Cube, 7).is_err());
    }

    #[test]
    fn canonical_bodies_are_closed() {
        for kind in CanonicalBody::ALL {
            let m = canonical_body(kind, 16).unwrap();
            let topo = m.topology();
            assert!(topo.is_closed_oriented(), "{kind:?}");
            assert_eq!(topo.euler_characteristic(), 2, "{kind:?}");
            assert_eq!(m.degenerate_triangle_count(), 0, "{kind:?}");
        }
    }

    #[test]
    fn wrap_angles_preserves_direction() {
        for &(t, p) in &[(-0.3, 1.0), (3.5, 0.2), (7.0, -2.0), (1.0, 9.0)] {
            let (wt, wp) = wrap_angles(t, p);
            assert!((0.0..=PI).contains(&wt));
            let a = Vec3::from_spherical(t, p);
            let b = Vec3::from_spherical(wt, wp);
            assert!((a - b).norm() < 1e-12);
        }
    }
}
