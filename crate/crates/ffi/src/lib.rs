//! C ABI over the `monostatic` crate.
//!
//! Meshes are opaque handles created by `mono_mesh_*` constructors and
//! released with [`mono_mesh_free`]. Every fallible call returns a
//! [`MonoStatus`]; the message of the most recent failure on the calling
//! thread is available from [`mono_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::path::PathBuf;

use monostatic::geometry::{convexity_ratio, mass_properties};
use monostatic::io::{read_stl, write_stl};
use monostatic::metrics::compute_metrics;
use monostatic::oracle::{ecs, fibonacci_sphere, DEFAULT_THRESHOLD};
use monostatic::surfaces::{canonical_body, generate_mesh, CanonicalBody};
use monostatic::{Error, SurfaceFamily, SurfaceSpec, TriMesh};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    Geometry = 4,
    Degenerate = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoFamily {
    SloanLinearPhase = 0,
    SloanEtaPhase = 1,
    ExtendedPhase = 2,
    RadialF3 = 3,
    RadialF4 = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoBody {
    Sphere = 0,
    Cube = 1,
    Cylinder = 2,
    Capsule = 3,
}

/// Opaque triangle mesh.
pub struct MonoMesh {
    mesh: TriMesh,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MonoMass {
    pub volume: f64,
    pub com: [f64; 3],
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonoOracleConfig {
    pub directions: usize,
    pub knn: usize,
    /// Merge threshold as a fraction of the height range.
    pub threshold: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MonoEcsSummary {
    pub raw_basin_count: usize,
    pub ecs: usize,
    pub single_pass_ecs: usize,
    pub h_min: f64,
    pub h_max: f64,
    pub h_range: f64,
    pub su_angle_deg: f64,
    /// Nonzero when the height field is flat and no count is reported.
    pub degenerate: u8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MonoMetrics {
    pub h_range: f64,
    pub sre: f64,
    pub steepness: f64,
    pub asymmetry: f64,
    pub su_angle_deg: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

struct Fail(MonoStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain { .. } | Error::Parse(_) | Error::InsufficientData { .. } => MonoStatus::InvalidArgument,
            Error::InvalidSpec(_) | Error::NonPositiveRadius { .. } => MonoStatus::InvalidSpec,
            Error::OpenMesh { .. } | Error::NegativeVolume(_) | Error::DegenerateInput(_) => MonoStatus::Geometry,
            Error::DegenerateFlat { .. } => MonoStatus::Degenerate,
            Error::Stl(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => MonoStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MonoStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail> + UnwindSafe>(f: F) -> MonoStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            set_error("");
            MonoStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MonoStatus::Panic
        }
    }
}

unsafe fn mesh_ref<'a>(mesh: *const MonoMesh) -> Result<&'a TriMesh, Fail> {
    mesh.as_ref().map(|m| &m.mesh).ok_or_else(|| null("mesh"))
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Fail> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path).to_str().map_err(|_| Fail(MonoStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn store(out: *mut *mut MonoMesh, mesh: TriMesh) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(MonoMesh { mesh }));
    Ok(())
}

fn family(f: MonoFamily) -> SurfaceFamily {
    match f {
        MonoFamily::SloanLinearPhase => SurfaceFamily::SloanLinearPhase,
        MonoFamily::SloanEtaPhase => SurfaceFamily::SloanEtaPhase,
        MonoFamily::ExtendedPhase => SurfaceFamily::ExtendedPhase,
        MonoFamily::RadialF3 => SurfaceFamily::RadialF3,
        MonoFamily::RadialF4 => SurfaceFamily::RadialF4,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mono_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mono_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn mono_oracle_config_default() -> MonoOracleConfig {
    MonoOracleConfig { directions: 5000, knn: 12, threshold: DEFAULT_THRESHOLD }
}

/// Tessellates a surface spec on an `n_theta` x `n_phi` grid.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_generate(
    family_tag: MonoFamily,
    beta: f64,
    coeff: f64,
    harmonic: u32,
    n_theta: usize,
    n_phi: usize,
    out: *mut *mut MonoMesh,
) -> MonoStatus {
    guard(move || {
        let spec = SurfaceSpec::new(family(family_tag), beta, coeff, harmonic);
        spec.validate()?;
        let mesh = generate_mesh(&spec, n_theta, n_phi)?;
        store(out, mesh)
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_canonical(body: MonoBody, resolution: usize, out: *mut *mut MonoMesh) -> MonoStatus {
    guard(move || {
        let kind = match body {
            MonoBody::Sphere => CanonicalBody::Sphere,
            MonoBody::Cube => CanonicalBody::Cube,
            MonoBody::Cylinder => CanonicalBody::Cylinder,
            MonoBody::Capsule => CanonicalBody::Capsule,
        };
        store(out, canonical_body(kind, resolution)?)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_read_stl(path: *const c_char, out: *mut *mut MonoMesh) -> MonoStatus {
    guard(move || {
        let p = path_arg(path)?;
        store(out, read_stl(&p)?)
    })
}

/// # Safety
/// `mesh` must come from a `mono_mesh_*` constructor; `path` and
/// `description` must be NUL-terminated (`description` may be null).
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_write_stl(
    mesh: *const MonoMesh,
    path: *const c_char,
    description: *const c_char,
) -> MonoStatus {
    guard(move || {
        let m = mesh_ref(mesh)?;
        let p = path_arg(path)?;
        let desc = if description.is_null() {
            String::new()
        } else {
            CStr::from_ptr(description).to_string_lossy().into_owned()
        };
        Ok(write_stl(m, &p, &desc)?)
    })
}

/// Releases a mesh; null is ignored.
///
/// # Safety
/// `mesh` must come from a `mono_mesh_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_free(mesh: *mut MonoMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of vertices, 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_vertex_count(mesh: *const MonoMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.vertices.len())
}

/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_triangle_count(mesh: *const MonoMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.triangles.len())
}

/// Copies vertices as `x, y, z` triples; `len` counts doubles.
///
/// # Safety
/// `out` must point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_copy_vertices(mesh: *const MonoMesh, out: *mut f64, len: usize) -> MonoStatus {
    guard(move || {
        let m = mesh_ref(mesh)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 3 * m.vertices.len();
        if len < need {
            return Err(Fail(MonoStatus::BufferTooSmall, format!("need {need} doubles, got {len}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (chunk, v) in dst.chunks_exact_mut(3).zip(&m.vertices) {
            chunk.copy_from_slice(&[v.x, v.y, v.z]);
        }
        Ok(())
    })
}

/// Copies triangles as vertex index triples; `len` counts indices.
///
/// # Safety
/// `out` must point to at least `len` writable `uint32_t`.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_copy_triangles(mesh: *const MonoMesh, out: *mut u32, len: usize) -> MonoStatus {
    guard(move || {
        let m = mesh_ref(mesh)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 3 * m.triangles.len();
        if len < need {
            return Err(Fail(MonoStatus::BufferTooSmall, format!("need {need} indices, got {len}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (chunk, t) in dst.chunks_exact_mut(3).zip(&m.triangles) {
            chunk.copy_from_slice(t);
        }
        Ok(())
    })
}

/// # Safety
/// `mesh` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_mass(mesh: *const MonoMesh, out: *mut MonoMass) -> MonoStatus {
    guard(move || {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let mp = mass_properties(m)?;
        *out = MonoMass { volume: mp.volume, com: [mp.com.x, mp.com.y, mp.com.z] };
        Ok(())
    })
}

/// Volume over convex hull volume.
///
/// # Safety
/// `mesh` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn mono_mesh_convexity_ratio(mesh: *const MonoMesh, out: *mut f64) -> MonoStatus {
    guard(move || {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = convexity_ratio(m)?;
        Ok(())
    })
}

/// Equilibrium count at `config->threshold`; a null `config` uses the defaults.
///
/// # Safety
/// `mesh` must be a live handle, `config` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_ecs(
    mesh: *const MonoMesh,
    config: *const MonoOracleConfig,
    out: *mut MonoEcsSummary,
) -> MonoStatus {
    guard(move || {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cfg = config.as_ref().copied().unwrap_or_else(|| mono_oracle_config_default());
        let dirs = fibonacci_sphere(cfg.directions, cfg.knn)?;
        let report = ecs(m, &dirs, &[cfg.threshold])?;
        *out = MonoEcsSummary {
            raw_basin_count: report.raw_basin_count,
            ecs: report.merged_count(cfg.threshold).unwrap_or(0),
            single_pass_ecs: report.single_pass_count(cfg.threshold).unwrap_or(0),
            h_min: report.h_min,
            h_max: report.h_max,
            h_range: report.h_range,
            su_angle_deg: report.su_angle_deg,
            degenerate: report.degenerate as u8,
        };
        Ok(())
    })
}

/// Height range, self-righting energy, steepness, asymmetry and S-U angle.
///
/// # Safety
/// `mesh` must be a live handle, `config` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_metrics(
    mesh: *const MonoMesh,
    config: *const MonoOracleConfig,
    out: *mut MonoMetrics,
) -> MonoStatus {
    guard(move || {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cfg = config.as_ref().copied().unwrap_or_else(|| mono_oracle_config_default());
        let r = compute_metrics(m, &fibonacci_sphere(cfg.directions, cfg.knn)?)?;
        *out = MonoMetrics {
            h_range: r.h_range,
            sre: r.sre,
            steepness: r.steepness,
            asymmetry: r.asymmetry,
            su_angle_deg: r.su_angle_deg,
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(mono_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn error_mapping() {
        assert_eq!(Fail::from(Error::Parse("x".into())).0, MonoStatus::InvalidArgument);
        assert_eq!(Fail::from(Error::InvalidSpec("x".into())).0, MonoStatus::InvalidSpec);
        assert_eq!(Fail::from(Error::Stl("x".into())).0, MonoStatus::Io);
        assert_eq!(Fail::from(Error::DegenerateFlat { range: 0.0 }).0, MonoStatus::Degenerate);
    }

    #[test]
    fn null_out_rejected() {
        let s = unsafe { mono_mesh_canonical(MonoBody::Cube, 8, ptr::null_mut()) };
        assert_eq!(s, MonoStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(mono_last_error()) };
        assert!(msg.to_str().unwrap().contains("null"));
    }
}
