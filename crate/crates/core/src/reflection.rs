//! Reflection across a minimal surface through its family of orthogonal
//! circles, and the critical points of `u`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{
    log_gradient_from_sigma, second_differences_of_u, sigma_at, sigma_from_jets,
};
use crate::hyperbolic::{distance, Geodesic};
use crate::lift::{frame_with_point, lift_from, lift_path, lift_point, SurfaceFrame, Vec3};
use crate::map_spec::Weierstrass;
use crate::mobius3::{Mobius3, Point3};

/// Below this value of `‖(α, β)‖` the reflected point is taken to be ∞.
pub const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReflectionData {
    pub z: Complex64,
    pub w: Vec3,
    pub normal: Vec3,
    pub alpha: f64,
    pub beta: f64,
    pub w_star: Point3,
    /// `e^σ / √(α² + β²)`, infinite when degenerate.
    pub diameter: f64,
    pub degenerate: bool,
}

/// `w* = w + e^σ(αX + βY)/(α² + β²)` at `f̃(z)`.
pub fn reflect_point<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<ReflectionData> {
    reflect_with_point(spec, z, lift_point(spec, z)?)
}

/// As [`reflect_point`] when `f̃(z)` is already known.
pub fn reflect_with_point<W: Weierstrass + ?Sized>(
    spec: &W,
    z: Complex64,
    w: Vec3,
) -> Result<ReflectionData> {
    let frame = frame_with_point(spec, z, w)?;
    let sigma = sigma_at(spec, z)?;
    let [alpha, beta] = log_gradient_from_sigma(z, &sigma);
    Ok(reflect_in_frame(&frame, alpha, beta))
}

fn reflect_in_frame(frame: &SurfaceFrame, alpha: f64, beta: f64) -> ReflectionData {
    let n2 = alpha * alpha + beta * beta;
    let degenerate = n2.sqrt() < DEGENERATE_TOL;
    let (w_star, diameter) = if degenerate {
        (Point3::Infinity, f64::INFINITY)
    } else {
        let v = (frame.x_axis * alpha + frame.y_axis * beta) * (frame.e_sigma / n2);
        (Point3::Finite(frame.point + v), frame.e_sigma / n2.sqrt())
    };
    ReflectionData {
        z: frame.z,
        w: frame.point,
        normal: frame.normal,
        alpha,
        beta,
        w_star,
        diameter,
        degenerate,
    }
}

/// `R(w) = w + 2∇ψ/‖∇ψ‖²` with `ψ = log λ_Σ` and the gradient taken in the
/// induced metric `⟨f̃_i, f̃_j⟩`.
pub fn reflect_intrinsic<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<Point3> {
    let w = lift_point(spec, z)?;
    let jets = spec.jets(z)?;
    let frame = frame_with_point(spec, z, w)?;
    let sigma_z = sigma_from_jets(&jets).sigma_z;
    // ∂_z ψ = z̄/(1 − |z|²) − σ_z
    let psi_z = z.conj() / (1.0 - z.norm_sqr()) - sigma_z;
    let dpsi = [2.0 * psi_z.re, -2.0 * psi_z.im];
    let f = [frame.fx, frame.fy];
    let g = [
        [f[0].dot(&f[0]), f[0].dot(&f[1])],
        [f[1].dot(&f[0]), f[1].dot(&f[1])],
    ];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let ginv = [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ];
    let mut grad = Vec3::zeros();
    for i in 0..2 {
        for j in 0..2 {
            grad += f[j] * (ginv[i][j] * dpsi[i]);
        }
    }
    let n2 = grad.norm_squared();
    if n2.sqrt() * frame.e_sigma < 2.0 * DEGENERATE_TOL {
        return Ok(Point3::Infinity);
    }
    Ok(Point3::Finite(w + grad * (2.0 / n2)))
}

/// The circle (or line) through `w` orthogonal to the surface.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CircleData {
    pub center: Vec3,
    /// Infinite for a line.
    pub radius: f64,
    pub plane_normal: Vec3,
    pub is_line: bool,
    pub w: Vec3,
    pub w_star: Point3,
    /// Unit tangent at `w`, equal to the surface normal there.
    pub direction: Vec3,
}

impl CircleData {
    /// Point at angle `theta` from `w` (`theta = π` gives `w*`). For a line,
    /// `w + tan(θ/2) N`.
    pub fn point_at(&self, theta: f64) -> Point3 {
        if self.is_line {
            let t = (0.5 * theta).tan();
            return if t.is_finite() && t.abs() < 1e300 {
                Point3::Finite(self.w + self.direction * t)
            } else {
                Point3::Infinity
            };
        }
        let e1 = (self.w - self.center) / self.radius;
        Point3::Finite(
            self.center + (e1 * theta.cos() + self.direction * theta.sin()) * self.radius,
        )
    }

    /// `n` finite points spaced evenly in angle; the point at ∞ of a line is
    /// skipped.
    pub fn sample(&self, n: usize) -> Vec<Vec3> {
        (0..n)
            .filter_map(|k| {
                self.point_at(std::f64::consts::TAU * k as f64 / n as f64)
                    .finite()
            })
            .collect()
    }
}

pub fn circle_at<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<CircleData> {
    Ok(circle_from_reflection(&reflect_point(spec, z)?))
}

pub fn circle_from_reflection(r: &ReflectionData) -> CircleData {
    match r.w_star {
        Point3::Finite(ws) => {
            let chord = ws - r.w;
            CircleData {
                center: (r.w + ws) * 0.5,
                radius: 0.5 * chord.norm(),
                plane_normal: chord.cross(&r.normal).normalize(),
                is_line: false,
                w: r.w,
                w_star: r.w_star,
                direction: r.normal,
            }
        }
        Point3::Infinity => {
            let any = if r.normal.x.abs() < 0.9 {
                Vec3::x()
            } else {
                Vec3::y()
            };
            CircleData {
                center: r.w,
                radius: f64::INFINITY,
                plane_normal: r.normal.cross(&any).normalize(),
                is_line: true,
                w: r.w,
                w_star: r.w_star,
                direction: r.normal,
            }
        }
    }
}

/// Smallest distance between `n`-point samples of two circles.
pub fn circle_separation(a: &CircleData, b: &CircleData, n: usize) -> f64 {
    let (pa, pb) = (a.sample(n), b.sample(n));
    pa.iter()
        .flat_map(|x| pb.iter().map(move |y| (x - y).norm()))
        .fold(f64::INFINITY, f64::min)
}

const FD_STEP: f64 = 1e-5;

/// `‖∇ log u_{I∘f̃}(z0)‖` for the inversion `I(w) = (w − w1)/‖w − w1‖²`,
/// whose conformal factor is `e^τ = e^σ/‖f̃ − w1‖²`.
pub fn inversion_critical_test<W: Weierstrass + ?Sized>(
    spec: &W,
    z0: Complex64,
    w1: &Vec3,
) -> Result<f64> {
    let base = lift_point(spec, z0)?;
    let too_close = |d: f64, z: Complex64| {
        Error::IllConditioned(format!(
            "inversion center within {d:e} of the surface at z = {z}"
        ))
    };
    let d0 = (base - w1).norm();
    if d0 < 1e-6 {
        return Err(too_close(d0, z0));
    }
    let log_u = |z: Complex64| -> Result<f64> {
        let p = lift_from(spec, z0, &base, z)?;
        let d = (p - w1).norm();
        if d < 1e-6 {
            return Err(too_close(d, z));
        }
        let tau = sigma_at(spec, z)?.sigma - 2.0 * d.ln();
        Ok(-0.5 * (1.0 - z.norm_sqr()).ln() - 0.5 * tau)
    };
    let h = FD_STEP;
    let gx = (log_u(z0 + h)? - log_u(z0 - h)?) / (2.0 * h);
    let dy = Complex64::new(0.0, h);
    let gy = (log_u(z0 + dy)? - log_u(z0 - dy)?) / (2.0 * h);
    Ok(gx.hypot(gy))
}

/// `τ = σ + log ‖T'(f̃)‖`, the log conformal factor of `T ∘ f̃`.
pub fn transformed_tau<W: Weierstrass + ?Sized>(
    spec: &W,
    t: &Mobius3,
    z: Complex64,
) -> Result<f64> {
    let p = lift_point(spec, z)?;
    tau_at(spec, t, z, &p)
}

fn tau_at<W: Weierstrass + ?Sized>(spec: &W, t: &Mobius3, z: Complex64, p: &Vec3) -> Result<f64> {
    let factor = t
        .conformal_factor(p)
        .filter(|f| f.is_finite() && *f > 0.0)
        .ok_or_else(|| Error::IllConditioned(format!("Möbius pole on the surface near z = {z}")))?;
    Ok(sigma_at(spec, z)?.sigma + factor.ln())
}

/// Second differences of `u_{T∘f̃}` along a geodesic; the lift is integrated
/// leg by leg between consecutive samples.
pub fn transformed_convexity_profile<W: Weierstrass + ?Sized>(
    spec: &W,
    t: &Mobius3,
    geodesic: &Geodesic,
    n: usize,
    ds: f64,
) -> Result<Vec<f64>> {
    let zs = geodesic.samples(n, ds);
    let ps = lift_path(spec, &zs)?;
    let taus = zs
        .iter()
        .zip(&ps)
        .map(|(z, p)| tau_at(spec, t, *z, p))
        .collect::<Result<Vec<_>>>()?;
    second_differences_of_u(&zs, &taus, ds)
}

/// Coarse seed grid: hyperbolic radii up to this value.
const SEED_RADIUS: f64 = 3.0;
const SEED_GRID: usize = 64;
const MAX_SEEDS: usize = 8;
/// Hyperbolic radius beyond which a descent is treated as escaping to ∂𝔻.
const ESCAPE_RADIUS: f64 = 8.0;
/// Two critical points farther apart than this are distinct.
pub const CRITICAL_SEPARATION: f64 = 1e-4;

/// The critical point of `u_f̃`, if any.
pub fn critical_point_find<W: Weierstrass + ?Sized>(spec: &W) -> Result<Option<Complex64>> {
    critical_point_find_with(|z| sigma_at(spec, z).map(|s| s.sigma))
}

/// Minimizes `u = ((1 − |z|²)e^τ)^{−1/2}` for the given log conformal factor.
/// Returns `None` when every descent escapes to the boundary, and an
/// invariant violation when two distinct critical points are found.
pub fn critical_point_find_with<F>(tau: F) -> Result<Option<Complex64>>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    // log u in the chart z = tanh(|p|) p/|p|, where |p| is the distance to 0
    let objective = |p: [f64; 2]| -> Result<f64> {
        let s = p[0].hypot(p[1]);
        Ok(log_cosh(s) - 0.5 * tau(chart(p))?)
    };

    let mut nodes = vec![[0.0, 0.0]];
    for k in 1..=SEED_GRID {
        let s = SEED_RADIUS * k as f64 / SEED_GRID as f64;
        for j in 0..SEED_GRID {
            let a = std::f64::consts::TAU * j as f64 / SEED_GRID as f64;
            nodes.push([s * a.cos(), s * a.sin()]);
        }
    }
    let values = nodes
        .par_iter()
        .map(|&p| objective(p))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    let mut seeds: Vec<(f64, [f64; 2])> = (0..nodes.len())
        .filter(|&i| seed_neighbors(i).iter().all(|&j| values[i] <= values[j]))
        .map(|i| (values[i], nodes[i]))
        .collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(MAX_SEEDS);

    let found = seeds
        .par_iter()
        .map(|(_, p)| descend(&objective, *p))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let critical: Vec<Complex64> = found.into_iter().flatten().map(chart).collect();

    for (i, a) in critical.iter().enumerate() {
        for b in &critical[i + 1..] {
            let d = distance(*a, *b);
            if d > CRITICAL_SEPARATION {
                return Err(Error::InvariantViolation(format!(
                    "two critical points of u: {a} and {b} (hyperbolic distance {d:e})"
                )));
            }
        }
    }
    Ok(critical.first().copied())
}

fn chart(p: [f64; 2]) -> Complex64 {
    let s = p[0].hypot(p[1]);
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let k = s.tanh() / s;
    Complex64::new(k * p[0], k * p[1])
}

fn log_cosh(s: f64) -> f64 {
    s.abs() + (-2.0 * s.abs()).exp().ln_1p() - std::f64::consts::LN_2
}

fn seed_neighbors(i: usize) -> Vec<usize> {
    let m = SEED_GRID;
    if i == 0 {
        return (1..=m).collect();
    }
    let (ring, j) = ((i - 1) / m, (i - 1) % m);
    let at = |r: usize, j: usize| 1 + r * m + j % m;
    let mut out = vec![at(ring, j + 1), at(ring, j + m - 1)];
    if ring == 0 {
        out.push(0);
    } else {
        out.push(at(ring - 1, j));
    }
    if ring + 1 < m {
        out.push(at(ring + 1, j));
    }
    out
}

/// Nelder–Mead from `p0`, then Newton on the gradient. `None` when the
/// iterates escape toward the boundary or do not settle on a stationary
/// point.
fn descend<F>(f: &F, p0: [f64; 2]) -> Result<Option<[f64; 2]>>
where
    F: Fn([f64; 2]) -> Result<f64>,
{
    let Some(p) = nelder_mead(f, p0, 0.1, 1e-10, 4000)? else {
        return Ok(None);
    };
    let p = newton_polish(f, p)?;
    let g = fd_gradient(f, p, 1e-5)?;
    if g[0].hypot(g[1]) > 1e-5 {
        return Ok(None);
    }
    Ok(Some(p))
}

fn nelder_mead<F>(
    f: &F,
    p0: [f64; 2],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Option<[f64; 2]>>
where
    F: Fn([f64; 2]) -> Result<f64>,
{
    let mut simplex = [p0, [p0[0] + step, p0[1]], [p0[0], p0[1] + step]];
    let mut fv = [f(simplex[0])?, f(simplex[1])?, f(simplex[2])?];
    let lerp =
        |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        simplex = [simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]];
        fv = [fv[idx[0]], fv[idx[1]], fv[idx[2]]];

        let best = simplex[0];
        if best[0].hypot(best[1]) > ESCAPE_RADIUS {
            return Ok(None);
        }
        let size = (1..3)
            .map(|i| (simplex[i][0] - best[0]).hypot(simplex[i][1] - best[1]))
            .fold(0.0, f64::max);
        if size < tol {
            return Ok(Some(best));
        }

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected)?;
        if fr < fv[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded)?;
            if fe < fr {
                simplex[2] = expanded;
                fv[2] = fe;
            } else {
                simplex[2] = reflected;
                fv[2] = fr;
            }
        } else if fr < fv[1] {
            simplex[2] = reflected;
            fv[2] = fr;
        } else {
            let contracted = if fr < fv[2] {
                lerp(centroid, reflected, 0.5)
            } else {
                lerp(centroid, simplex[2], 0.5)
            };
            let fc = f(contracted)?;
            if fc < fv[2].min(fr) {
                simplex[2] = contracted;
                fv[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                    fv[i] = f(simplex[i])?;
                }
            }
        }
    }
    let best = simplex[0];
    Ok((best[0].hypot(best[1]) <= ESCAPE_RADIUS).then_some(best))
}

fn fd_gradient<F>(f: &F, p: [f64; 2], h: f64) -> Result<[f64; 2]>
where
    F: Fn([f64; 2]) -> Result<f64>,
{
    Ok([
        (f([p[0] + h, p[1]])? - f([p[0] - h, p[1]])?) / (2.0 * h),
        (f([p[0], p[1] + h])? - f([p[0], p[1] - h])?) / (2.0 * h),
    ])
}

fn newton_polish<F>(f: &F, mut p: [f64; 2]) -> Result<[f64; 2]>
where
    F: Fn([f64; 2]) -> Result<f64>,
{
    let h = 1e-4;
    for _ in 0..20 {
        let g = fd_gradient(f, p, 1e-5)?;
        let f0 = f(p)?;
        let hxx = (f([p[0] + h, p[1]])? - 2.0 * f0 + f([p[0] - h, p[1]])?) / (h * h);
        let hyy = (f([p[0], p[1] + h])? - 2.0 * f0 + f([p[0], p[1] - h])?) / (h * h);
        let hxy = (f([p[0] + h, p[1] + h])? - f([p[0] + h, p[1] - h])? - f([p[0] - h, p[1] + h])?
            + f([p[0] - h, p[1] - h])?)
            / (4.0 * h * h);
        let det = hxx * hyy - hxy * hxy;
        // only accept steps where the Hessian is positive definite
        if !(hxx > 0.0 && det > 0.0) {
            break;
        }
        let dx = (hyy * g[0] - hxy * g[1]) / det;
        let dy = (hxx * g[1] - hxy * g[0]) / det;
        if dx.hypot(dy) > 0.1 {
            break;
        }
        p = [p[0] - dx, p[1] - dy];
        if dx.hypot(dy) < 1e-10 {
            break;
        }
    }
    Ok(p)
}
