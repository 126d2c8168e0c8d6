//! Mesh-free height oracle: moments by quadrature, support points by
//! multi-start derivative-free minimization over the parameter domain.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::directions::DirectionSet;
use super::height::HeightField;
use crate::error::{Error, Result};
use crate::geometry::MassProperties;
use crate::surfaces::{check_admissible, radius, surface_point, wrap_angles, SurfaceSpec};
use crate::vec3::Vec3;

pub const DEFAULT_QUAD_THETA: usize = 64;
pub const DEFAULT_QUAD_PHI: usize = 128;
pub const DEFAULT_STARTS: usize = 16;
pub const MIN_STARTS: usize = 8;
const COARSE: usize = 8;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = p1;
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Volume and centre of mass of the star body by tensor-product quadrature:
/// Gauss-Legendre in `cos theta`, trapezoid in `phi`.
///
/// `V = (1/3) int r^3`, `com = (1 / 4V) int r^4 rhat`. The constraint
/// violation is `com.norm()`.
pub fn analytic_com(spec: &SurfaceSpec, order_theta: usize, order_phi: usize) -> Result<MassProperties> {
    spec.validate()?;
    if order_theta < 2 || order_phi < 4 {
        return Err(Error::Domain { what: "quadrature_order", value: order_theta.min(order_phi) as f64 });
    }
    let (mu, wmu) = gauss_legendre(order_theta);
    let dphi = 2.0 * PI / order_phi as f64;
    let mut v = 0.0;
    let mut m = Vec3::ZERO;
    for (&u, &wu) in mu.iter().zip(&wmu) {
        let theta = u.acos();
        for j in 0..order_phi {
            let phi = dphi * j as f64;
            let r = radius(spec, theta, phi)?;
            let r3 = r * r * r;
            let w = wu * dphi;
            v += w * r3;
            m += Vec3::from_spherical(theta, phi) * (w * r3 * r);
        }
    }
    let volume = v / 3.0;
    Ok(MassProperties { volume, com: m / (4.0 * volume) })
}

/// Reusable analytic oracle for one spec.
#[derive(Clone, Debug)]
pub struct AnalyticOracle {
    pub spec: SurfaceSpec,
    pub com: Vec3,
    pub n_starts: usize,
    grid: Vec<(f64, f64, Vec3)>,
}

impl AnalyticOracle {
    pub fn new(spec: &SurfaceSpec, n_starts: usize) -> Result<Self> {
        if n_starts < MIN_STARTS {
            return Err(Error::Domain { what: "n_starts", value: n_starts as f64 });
        }
        check_admissible(spec, 64, 128)?;
        let com = analytic_com(spec, DEFAULT_QUAD_THETA, DEFAULT_QUAD_PHI)?.com;
        let mut grid = Vec::with_capacity(COARSE * COARSE);
        for i in 0..COARSE {
            let t = PI * (i as f64 + 0.5) / COARSE as f64;
            for j in 0..COARSE {
                let p = 2.0 * PI * j as f64 / COARSE as f64;
                grid.push((t, p, surface_point(spec, t, p)?));
            }
        }
        Ok(AnalyticOracle { spec: *spec, com, n_starts, grid })
    }

    /// `min g` over the surface where `g(theta, phi) = x(theta, phi) . d`.
    pub fn support(&self, d: Vec3) -> f64 {
        let g = |t: f64, p: f64| -> f64 { surface_point(&self.spec, t, p).map_or(f64::INFINITY, |x| x.dot(d)) };
        let mut nodes: Vec<(f64, f64, f64)> = self.grid.iter().map(|&(t, p, x)| (x.dot(d), t, p)).collect();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let minus_d = -d;
        let seed_t = minus_d.z.clamp(-1.0, 1.0).acos();
        let seed_p = minus_d.y.atan2(minus_d.x);
        let mut seeds: Vec<(f64, f64)> = nodes.iter().take(self.n_starts).map(|&(_, t, p)| (t, p)).collect();
        seeds.push((seed_t, seed_p));

        let mut best = f64::INFINITY;
        for (t, p) in seeds {
            let (x, fx) = nelder_mead(&g, [t, p], PI / (2.0 * COARSE as f64));
            let (_, fr) = golden_refine(&g, x, fx);
            best = best.min(fr);
        }
        best
    }

    /// `h(d) = c . d - min g`.
    pub fn height(&self, d: Vec3) -> f64 {
        self.com.dot(d) - self.support(d)
    }

    pub fn height_field<'a>(&self, dirs: &'a DirectionSet) -> Result<HeightField<'a>> {
        let h = dirs.directions.par_iter().map(|&d| self.height(d)).collect();
        HeightField::from_values(dirs, h)
    }
}

/// Analytic `h(d)` with the centre of mass from [`analytic_com`].
pub fn analytic_height(spec: &SurfaceSpec, d: Vec3, n_starts: usize) -> Result<f64> {
    Ok(AnalyticOracle::new(spec, n_starts)?.height(d.normalized()))
}

pub fn analytic_height_field<'a>(
    spec: &SurfaceSpec,
    dirs: &'a DirectionSet,
    n_starts: usize,
) -> Result<HeightField<'a>> {
    AnalyticOracle::new(spec, n_starts)?.height_field(dirs)
}

/// Nelder-Mead simplex descent in two variables.
fn nelder_mead(f: &impl Fn(f64, f64) -> f64, x0: [f64; 2], step: f64) -> ([f64; 2], f64) {
    let mut s = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut fs = s.map(|x| f(x[0], x[1]));
    for _ in 0..400 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        s = idx.map(|i| s[i]);
        fs = idx.map(|i| fs[i]);
        let size = (s[1][0] - s[0][0])
            .abs()
            .max((s[1][1] - s[0][1]).abs())
            .max((s[2][0] - s[0][0]).abs().max((s[2][1] - s[0][1]).abs()));
        if size < 1e-10 || (fs[2] - fs[0]).abs() < 1e-15 {
            break;
        }
        let c = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
        let along = |t: f64| [c[0] + t * (s[2][0] - c[0]), c[1] + t * (s[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr[0], xr[1]);
        if fr < fs[0] {
            let xe = along(-2.0);
            let fe = f(xe[0], xe[1]);
            if fe < fr {
                (s[2], fs[2]) = (xe, fe);
            } else {
                (s[2], fs[2]) = (xr, fr);
            }
        } else if fr < fs[1] {
            (s[2], fs[2]) = (xr, fr);
        } else {
            let t = if fr < fs[2] { -0.5 } else { 0.5 };
            let xc = along(t);
            let fc = f(xc[0], xc[1]);
            if fc < fs[2].min(fr) {
                (s[2], fs[2]) = (xc, fc);
            } else {
                for i in 1..3 {
                    s[i] = [(s[0][0] + s[i][0]) / 2.0, (s[0][1] + s[i][1]) / 2.0];
                    fs[i] = f(s[i][0], s[i][1]);
                }
            }
        }
    }
    let b = (0..3).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).unwrap();
    let (t, p) = wrap_angles(s[b][0], s[b][1]);
    ([t, p], fs[b])
}

/// Coordinate-wise golden-section polish around `x`.
fn golden_refine(f: &impl Fn(f64, f64) -> f64, mut x: [f64; 2], mut fx: f64) -> ([f64; 2], f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    for _sweep in 0..2 {
        for axis in 0..2 {
            let eval = |v: f64| {
                let mut y = x;
                y[axis] = v;
                f(y[0], y[1])
            };
            let (mut a, mut b) = (x[axis] - 1e-3, x[axis] + 1e-3);
            let mut c = b - INV_PHI * (b - a);
            let mut d = a + INV_PHI * (b - a);
            let (mut fc, mut fd) = (eval(c), eval(d));
            while b - a > 1e-11 {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - INV_PHI * (b - a);
                    fc = eval(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + INV_PHI * (b - a);
                    fd = eval(d);
                }
            }
            let v = (a + b) / 2.0;
            let fv = eval(v);
            if fv < fx {
                x[axis] = v;
                fx = fv;
            }
        }
    }
    (x, fx)
}
