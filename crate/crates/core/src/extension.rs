//! The extension `F̃` of a lift to the whole sphere, its dilatation, and the
//! comparison with the classical Ahlfors–Weill extension.

use nalgebra::{Matrix2, Matrix3x2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::harmonic::{condition_report, sigma_from_jets, ConditionReport};
use crate::lift::{fundamental_forms, lift_from, lift_point, Vec3};
use crate::map_spec::Weierstrass;
use crate::mobius3::Point3;
use crate::reflection::reflect_with_point;

/// Chordal distance on ℝ³ ∪ {∞}.
pub fn chordal(a: &Point3, b: &Point3) -> f64 {
    match (a, b) {
        (Point3::Infinity, Point3::Infinity) => 0.0,
        (Point3::Finite(x), Point3::Infinity) | (Point3::Infinity, Point3::Finite(x)) => {
            2.0 / (1.0 + x.norm_squared()).sqrt()
        }
        (Point3::Finite(x), Point3::Finite(y)) => {
            2.0 * (x - y).norm() / ((1.0 + x.norm_squared()) * (1.0 + y.norm_squared())).sqrt()
        }
    }
}

fn reflect_in_circle(z: Complex64) -> Complex64 {
    1.0 / z.conj()
}

/// `F̃ = f̃` on the closed disk and `R ∘ f̃ ∘ (z ↦ 1/z̄)` outside.
pub struct ExtensionMap<'a, W: ?Sized> {
    spec: &'a W,
    report: Option<ConditionReport>,
}

impl<'a, W: Weierstrass + ?Sized> ExtensionMap<'a, W> {
    pub fn new(spec: &'a W) -> Self {
        Self { spec, report: None }
    }

    /// Also computes and keeps the condition report on `grid`.
    pub fn with_report(spec: &'a W, grid: &GridParams) -> Result<Self> {
        Ok(Self {
            spec,
            report: Some(condition_report(spec, grid)?),
        })
    }

    pub fn spec(&self) -> &W {
        self.spec
    }

    pub fn report(&self) -> Option<&ConditionReport> {
        self.report.as_ref()
    }

    pub fn extend_eval(&self, z: Complex64) -> Result<Point3> {
        if z.norm() <= 1.0 {
            return Ok(Point3::Finite(lift_point(self.spec, z)?));
        }
        let zeta = reflect_in_circle(z);
        let w = lift_point(self.spec, zeta)?;
        Ok(reflect_with_point(self.spec, zeta, w)?.w_star)
    }

    /// `F̃(∞) = R(f̃(0))`.
    pub fn extend_infinity(&self) -> Result<Point3> {
        let zero = Complex64::new(0.0, 0.0);
        let w = lift_point(self.spec, zero)?;
        Ok(reflect_with_point(self.spec, zero, w)?.w_star)
    }

    /// `F̃` at `z` given `f̃(anchor)`, with `anchor` close to `z` or to its
    /// reflection; only a short segment is integrated.
    fn eval_near(
        &self,
        anchor: Complex64,
        anchor_point: &Vec3,
        z: Complex64,
        exterior: bool,
    ) -> Result<Point3> {
        if !exterior {
            return Ok(Point3::Finite(lift_from(
                self.spec,
                anchor,
                anchor_point,
                z,
            )?));
        }
        let zeta = reflect_in_circle(z);
        let w = lift_from(self.spec, anchor, anchor_point, zeta)?;
        Ok(reflect_with_point(self.spec, zeta, w)?.w_star)
    }

    /// Maximum chordal distance between `f̃(z)` and `R(f̃(z))` over 256
    /// angles at `|z| = 1 − ε`.
    pub fn boundary_gap(&self, epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Domain(format!(
                "epsilon = {epsilon} not in (0, 0.5)"
            )));
        }
        let r = 1.0 - epsilon;
        let gaps = (0..BOUNDARY_ANGLES)
            .into_par_iter()
            .map(|k| {
                let z = Complex64::from_polar(
                    r,
                    std::f64::consts::TAU * k as f64 / BOUNDARY_ANGLES as f64,
                );
                let w = lift_point(self.spec, z)?;
                let refl = reflect_with_point(self.spec, z, w)?;
                Ok(chordal(&Point3::Finite(w), &refl.w_star))
            })
            .collect::<Vec<Result<f64>>>();
        gaps.into_iter().try_fold(0.0f64, |m, g| Ok(m.max(g?)))
    }

    /// Singular values of the Jacobian of `F̃` by central differences with step
    /// `min(1e-5, ||z| − 1|/10)`.
    pub fn dilatation_at(&self, z: Complex64) -> Result<DilatationSample> {
        let r = z.norm();
        let gap = (r - 1.0).abs();
        if gap == 0.0 {
            return Err(Error::Domain(
                "dilatation is not sampled on the unit circle".into(),
            ));
        }
        let h = (1e-5f64).min(gap / 10.0);
        let exterior = r > 1.0;
        let anchor = if exterior { reflect_in_circle(z) } else { z };
        let anchor_point = lift_point(self.spec, anchor)?;
        let at = |w: Complex64| -> Result<Vec3> {
            self.eval_near(anchor, &anchor_point, w, exterior)?
                .finite()
                .ok_or(Error::Degenerate {
                    at: w,
                    what: "extension is infinite in the difference stencil",
                })
        };
        let dy = Complex64::new(0.0, h);
        let fx = (at(z + h)? - at(z - h)?) / (2.0 * h);
        let fy = (at(z + dy)? - at(z - dy)?) / (2.0 * h);
        let jacobian = Matrix3x2::from_columns(&[fx, fy]);
        let (s_max, s_min) = singular_values(&jacobian);
        if s_min.is_nan() || s_min <= 0.0 {
            return Err(Error::Degenerate {
                at: z,
                what: "Jacobian is singular",
            });
        }
        Ok(DilatationSample {
            z,
            jacobian,
            singular_values: (s_max, s_min),
            ratio: s_max / s_min,
        })
    }
}

const BOUNDARY_ANGLES: usize = 256;

/// `(s_max, s_min)` from the eigenvalues of `JᵀJ`.
fn singular_values(j: &Matrix3x2<f64>) -> (f64, f64) {
    let g: Matrix2<f64> = j.transpose() * j;
    let half_tr = 0.5 * (g[(0, 0)] + g[(1, 1)]);
    let det = g.determinant();
    let disc = (half_tr * half_tr - det).max(0.0).sqrt();
    let big = half_tr + disc;
    (big.sqrt(), (det.max(0.0) / big).sqrt())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DilatationSample {
    pub z: Complex64,
    /// Columns `∂_x F̃`, `∂_y F̃`.
    pub jacobian: Matrix3x2<f64>,
    pub singular_values: (f64, f64),
    pub ratio: f64,
}

/// Intrinsic quantities of the reflection at `f̃(z)` in the frame `(X, Y)`.
#[derive(Debug, Clone, Copy)]
pub struct ReflectionTensors {
    /// Schwarzian tensor `B(log λ_Σ)` in the frame.
    pub b: Matrix2<f64>,
    /// Second fundamental form in the frame.
    pub ii: Matrix2<f64>,
    /// `∇ log λ_Σ` in the frame.
    pub grad_psi: Vector2<f64>,
    pub lambda_sigma: f64,
    pub abs_k: f64,
    /// `Δ_g log λ_Σ`.
    pub laplacian_psi: f64,
}

impl ReflectionTensors {
    /// `Λ = ‖∇ log λ_Σ‖`.
    pub fn big_lambda(&self) -> f64 {
        self.grad_psi.norm()
    }

    /// Largest absolute eigenvalue of the traceless tensor `B`.
    pub fn b_norm(&self) -> f64 {
        let (a, c) = (self.b[(0, 0)], self.b[(0, 1)]);
        a.hypot(c)
    }

    /// `‖D̄_V R‖` for the unit vector `V = cos θ X + sin θ Y`.
    pub fn dvr(&self, theta: f64) -> f64 {
        let v = Vector2::new(theta.cos(), theta.sin());
        let l2 = self.lambda_sigma * self.lambda_sigma;
        let tangential = self.b * v + v * (2.0 * l2 - 0.5 * self.abs_k);
        let normal = v.dot(&(self.ii * self.grad_psi));
        let big = self.big_lambda();
        2.0 / (big * big) * (tangential.norm_squared() + normal * normal).sqrt()
    }
}

pub fn reflection_tensors<W: Weierstrass + ?Sized>(
    spec: &W,
    z: Complex64,
) -> Result<ReflectionTensors> {
    let r2 = z.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::Domain(format!(
            "|z| = {} is not inside the disk",
            z.norm()
        )));
    }
    let jets = spec.jets(z)?;
    let s = sigma_from_jets(&jets);
    let w = 1.0 - r2;
    let (x, y) = (z.re, z.im);
    // ψ = log λ_Σ = −log(1 − |z|²) − σ in the disk chart
    let dpsi = [2.0 * x / w - s.grad_sigma[0], 2.0 * y / w - s.grad_sigma[1]];
    let [sxx, sxy, syy] = s.hessian;
    let psi_xx = 2.0 / w + 4.0 * x * x / (w * w) - sxx;
    let psi_yy = 2.0 / w + 4.0 * y * y / (w * w) - syy;
    let psi_xy = 4.0 * x * y / (w * w) - sxy;
    let ds = s.grad_sigma;
    let sigma_dot_psi = ds[0] * dpsi[0] + ds[1] * dpsi[1];
    // Hessian for e^{2σ}|dz|²: Γ^k_ij = δ_ik σ_j + δ_jk σ_i − δ_ij σ_k
    let hess = [
        [
            psi_xx - 2.0 * ds[0] * dpsi[0] + sigma_dot_psi,
            psi_xy - ds[1] * dpsi[0] - ds[0] * dpsi[1],
        ],
        [
            psi_xy - ds[0] * dpsi[1] - ds[1] * dpsi[0],
            psi_yy - 2.0 * ds[1] * dpsi[1] + sigma_dot_psi,
        ],
    ];
    let e2 = (-2.0 * s.sigma).exp();
    let m = Matrix2::from_fn(|a, b| e2 * (hess[a][b] - dpsi[a] * dpsi[b]));
    let b = m - Matrix2::identity() * (0.5 * m.trace());
    let ff = fundamental_forms(spec, z)?;
    let [l, mm, n] = ff.ii_matrix;
    let ii = Matrix2::new(l, mm, mm, n) * e2;
    let e1 = (-s.sigma).exp();
    let lambda_sigma = e1 / w;
    Ok(ReflectionTensors {
        b,
        ii,
        grad_psi: Vector2::new(dpsi[0], dpsi[1]) * e1,
        lambda_sigma,
        abs_k: e2 * s.laplacian,
        laplacian_psi: e2 * (psi_xx + psi_yy),
    })
}

/// `‖D̄_V R‖` at `f̃(z)` for `V = cos θ X + sin θ Y`.
pub fn intrinsic_dvr<W: Weierstrass + ?Sized>(spec: &W, z: Complex64, v_angle: f64) -> Result<f64> {
    let t = reflection_tensors(spec, z)?;
    if t.big_lambda() < 1e-10 {
        return Err(Error::Degenerate {
            at: z,
            what: "∇ log λ_Σ vanishes",
        });
    }
    Ok(t.dvr(v_angle))
}

/// Max/min of the intrinsic `‖D̄_V R‖` over `n` directions.
pub fn intrinsic_ratio<W: Weierstrass + ?Sized>(spec: &W, z: Complex64, n: usize) -> Result<f64> {
    let t = reflection_tensors(spec, z)?;
    if t.big_lambda() < 1e-10 {
        return Err(Error::Degenerate {
            at: z,
            what: "∇ log λ_Σ vanishes",
        });
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..n {
        let d = t.dvr(std::f64::consts::PI * k as f64 / n as f64);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(hi / lo)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SurfaceConditionPoint {
    pub z: Complex64,
    /// `‖B(log λ_Σ)‖ + |K|`.
    pub lhs: f64,
    /// `2t λ_Σ²`.
    pub rhs: f64,
    /// `(‖B‖ + |K|)/(2λ_Σ²)`, the surface-side margin.
    pub surface_t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceConditionReport {
    pub t: f64,
    pub max_surface_t: f64,
    /// `max(lhs − rhs)`, nonpositive when the condition holds.
    pub max_violation: f64,
    /// `max |surface_t − margin_t|` against the chart computation.
    pub max_chart_residual: f64,
    #[serde(skip)]
    pub points: Vec<SurfaceConditionPoint>,
}

/// Checks `‖B(log λ_Σ)‖ + |K| ≤ 2t λ_Σ²` on the grid with `t` from the chart
/// condition report.
pub fn surface_condition_check<W: Weierstrass + ?Sized>(
    spec: &W,
    grid: &GridParams,
) -> Result<SurfaceConditionReport> {
    let report = condition_report(spec, grid)?;
    let t = report.sup_t;
    let points = report
        .margin_field
        .par_iter()
        .map(|m| {
            let z = m.z();
            let rt = reflection_tensors(spec, z)?;
            let l2 = rt.lambda_sigma * rt.lambda_sigma;
            let lhs = rt.b_norm() + rt.abs_k;
            Ok(SurfaceConditionPoint {
                z,
                lhs,
                rhs: 2.0 * t * l2,
                surface_t: lhs / (2.0 * l2),
            })
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut out = SurfaceConditionReport {
        t,
        max_surface_t: 0.0,
        max_violation: f64::NEG_INFINITY,
        max_chart_residual: 0.0,
        points: Vec::new(),
    };
    for (p, m) in points.iter().zip(&report.margin_field) {
        out.max_surface_t = out.max_surface_t.max(p.surface_t);
        out.max_violation = out.max_violation.max(p.lhs - p.rhs);
        out.max_chart_residual = out.max_chart_residual.max((p.surface_t - m.margin_t).abs());
    }
    out.points = points;
    Ok(out)
}

fn require_analytic<W: Weierstrass + ?Sized>(spec: &W) -> Result<()> {
    if spec.is_analytic() {
        Ok(())
    } else {
        Err(Error::Spec(
            "the classical extension needs an analytic map (g absent)".into(),
        ))
    }
}

/// Classical Ahlfors–Weill extension at `|z| > 1`:
/// `f(ζ) + (1 − |ζ|²) f'(ζ) / (ζ̄ − ½(1 − |ζ|²) f''(ζ)/f'(ζ))`, `ζ = 1/z̄`.
/// `None` marks ∞.
pub fn classical_aw<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<Option<Complex64>> {
    require_analytic(spec)?;
    if z.norm() <= 1.0 {
        return Err(Error::Domain(format!(
            "|z| = {} is not outside the disk",
            z.norm()
        )));
    }
    let zeta = reflect_in_circle(z);
    let j = spec.jets(zeta)?;
    let (f, f1, f2) = (j.h.value(), j.h.derivative(1), j.h.derivative(2));
    let w = 1.0 - zeta.norm_sqr();
    let denom = zeta.conj() - 0.5 * w * f2 / f1;
    if denom.norm() == 0.0 {
        return Ok(None);
    }
    let value = f + w * f1 / denom;
    Ok(value.is_finite().then_some(value))
}

/// Beltrami coefficient of the classical extension at `1/z̄`:
/// `μ = −½(1 − |z|²)² Sf(z)`.
pub fn beltrami_classical<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<Complex64> {
    require_analytic(spec)?;
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "|z| = {} is not inside the disk",
            z.norm()
        )));
    }
    let sf = spec.jets(z)?.h.schwarzian()?;
    Ok(-0.5 * (1.0 - z.norm_sqr()).powi(2) * sf)
}

fn check_t(t: f64, c: f64) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} not in [0, 1)")));
    }
    if c.is_nan() || c < 0.0 {
        return Err(Error::Domain(format!("C = {c} is negative")));
    }
    Ok(())
}

/// `(2t + √(2t)(2 + C) + 2) / (2(1 − t))`.
pub fn theoretical_bound(t: f64, c: f64) -> Result<f64> {
    check_t(t, c)?;
    Ok((2.0 * t + (2.0 * t).sqrt() * (2.0 + c) + 2.0) / (2.0 * (1.0 - t)))
}

/// The same bound with `√(2t)(1 + C)`, as displayed in the final estimate of
/// the source; reported alongside, never used as the acceptance bound.
pub fn displayed_bound(t: f64, c: f64) -> Result<f64> {
    check_t(t, c)?;
    Ok((2.0 * t + (2.0 * t).sqrt() * (1.0 + c) + 2.0) / (2.0 * (1.0 - t)))
}

/// `(1 + t)/(1 − t)` for analytic maps, where curvature and second
/// fundamental form terms vanish.
pub fn classical_bound(t: f64) -> Result<f64> {
    check_t(t, 0.0)?;
    Ok((1.0 + t) / (1.0 - t))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QcBound {
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// `(2 + C)` form.
    pub general: f64,
    /// `(1 + C)` form.
    pub displayed: f64,
    /// Present for analytic maps.
    pub classical: Option<f64>,
    /// The bound samples are tested against.
    pub applied: f64,
}

impl QcBound {
    pub fn new(t: f64, c: f64, analytic: bool) -> Result<Self> {
        let general = theoretical_bound(t, c)?;
        let classical = if analytic {
            Some(classical_bound(t)?)
        } else {
            None
        };
        Ok(Self {
            t,
            c,
            general,
            displayed: displayed_bound(t, c)?,
            classical,
            applied: classical.unwrap_or(general),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QcReport {
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub theoretical_bound: Option<f64>,
    pub bound: Option<QcBound>,
    pub samples: usize,
    pub skipped: usize,
    pub max_ratio: f64,
    pub argmax_z: Option<Complex64>,
    pub boundary_gaps: Vec<(f64, f64)>,
    #[serde(skip)]
    pub ratios: Vec<DilatationSample>,
}

impl QcReport {
    /// `max_ratio ≤ bound · (1 + slack)`.
    pub fn within_bound(&self, slack: f64) -> bool {
        match &self.bound {
            Some(b) => self.max_ratio <= b.applied * (1.0 + slack),
            None => false,
        }
    }
}

pub const GAP_EPSILONS: [f64; 4] = [0.1, 0.03, 0.01, 0.003];

/// Exterior points `z = 1/ζ̄` with `ζ` uniform in area over
/// `1/exterior_r_max ≤ |ζ| < 1`.
pub fn exterior_samples(n: usize, exterior_r_max: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = 1.0 / (exterior_r_max * exterior_r_max);
    (0..n)
        .map(|_| {
            let r2: f64 = rng.gen_range(inner..1.0);
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = r2.sqrt().min(1.0 - 1e-6);
            reflect_in_circle(Complex64::from_polar(r, theta))
        })
        .collect()
}

pub fn qc_report<W: Weierstrass + ?Sized>(
    spec: &W,
    grid: &GridParams,
    n: usize,
    seed: u64,
) -> Result<QcReport> {
    let ext = ExtensionMap::with_report(spec, grid)?;
    let report = ext.report().expect("report computed");
    let (t, c) = (report.sup_t, report.c_estimate);
    let bound = QcBound::new(t, c, spec.is_analytic()).ok();
    let zs = exterior_samples(n, grid.exterior_r_max, seed);
    let results: Vec<Result<DilatationSample>> =
        zs.par_iter().map(|&z| ext.dilatation_at(z)).collect();
    let mut ratios = Vec::with_capacity(n);
    let mut skipped = 0;
    for r in results {
        match r {
            Ok(s) => ratios.push(s),
            Err(Error::Degenerate { at, what }) | Err(Error::Singular { at, what }) => {
                log::warn!("skipping dilatation sample at {at}: {what}");
                skipped += 1;
            }
            Err(e) => return Err(e),
        }
    }
    let best = ratios.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
    let boundary_gaps = GAP_EPSILONS
        .iter()
        .map(|&e| Ok((e, ext.boundary_gap(e)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(QcReport {
        t,
        c,
        theoretical_bound: bound.map(|b| b.general),
        bound,
        samples: ratios.len(),
        skipped,
        max_ratio: best.map_or(f64::NAN, |s| s.ratio),
        argmax_z: best.map(|s| s.z),
        boundary_gaps,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::schwarzian;
    use crate::map_spec::MapSpec;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scaled_enneper(r: f64) -> MapSpec {
        MapSpec::harmonic(
            &format!("{r}*z"),
            &format!("{}*z^3/3", r * r * r),
            &format!("{r}*z"),
        )
        .unwrap()
    }

    fn power(alpha: f64) -> MapSpec {
        MapSpec::analytic(&format!("((1+z)/(1-z))^{alpha}")).unwrap()
    }

    #[test]
    fn bounds() {
        assert_eq!(theoretical_bound(0.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(theoretical_bound(0.5, 0.5).unwrap(), 5.5, epsilon = 1e-14);
        assert_relative_eq!(classical_bound(0.36).unwrap(), 2.125, epsilon = 1e-14);
        assert!(displayed_bound(0.5, 0.5).unwrap() < 5.5);
        assert!(theoretical_bound(1.0, 0.0).is_err());
        let b = QcBound::new(0.36, 0.0, true).unwrap();
        assert_relative_eq!(b.applied, 2.125, epsilon = 1e-14);
        assert_eq!(
            QcBound::new(0.5, 0.5, false).unwrap().applied,
            b_general(0.5, 0.5)
        );
    }

    fn b_general(t: f64, c: f64) -> f64 {
        theoretical_bound(t, c).unwrap()
    }

    #[test]
    fn chordal_metric() {
        let o = Point3::Finite(Vec3::zeros());
        assert_eq!(chordal(&o, &Point3::Infinity), 2.0);
        assert_eq!(chordal(&Point3::Infinity, &Point3::Infinity), 0.0);
        let x = Point3::Finite(Vec3::new(1.0, 0.0, 0.0));
        assert_relative_eq!(chordal(&o, &x), 2.0f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn identity_extends_to_identity() {
        let id = MapSpec::analytic("z").unwrap();
        let ext = ExtensionMap::new(&id);
        for z in [c(2.0, 0.0), c(-1.2, 0.7), c(0.3, 3.0)] {
            let p = ext.extend_eval(z).unwrap().finite().unwrap();
            assert!((p - Vec3::new(z.re, z.im, 0.0)).norm() < 1e-13 * z.norm());
            assert!((classical_aw(&id, z).unwrap().unwrap() - z).norm() < 1e-14 * z.norm());
            assert_relative_eq!(ext.dilatation_at(z).unwrap().ratio, 1.0, epsilon = 1e-6);
        }
        assert!(ext.extend_infinity().unwrap().is_infinite());
    }

    #[test]
    fn scaled_enneper_infinity_is_infinite() {
        let e = scaled_enneper(0.5);
        assert!(ExtensionMap::new(&e)
            .extend_infinity()
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn boundary_gap_shrinks() {
        let e = scaled_enneper(0.5);
        let ext = ExtensionMap::new(&e);
        let gaps: Vec<f64> = GAP_EPSILONS
            .iter()
            .map(|&eps| ext.boundary_gap(eps).unwrap())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < 0.05);
        assert!(ext.boundary_gap(0.6).is_err());
    }

    #[test]
    fn classical_matches_pipeline_for_power_map() {
        let p = power(0.8);
        let ext = ExtensionMap::new(&p);
        for z in [c(1.5, 0.0), c(-0.4, 1.3), c(0.9, -0.9)] {
            let a = classical_aw(&p, z).unwrap().unwrap();
            let b = ext.extend_eval(z).unwrap().finite().unwrap();
            assert!((a - c(b.x, b.y)).norm() < 1e-8 * (1.0 + a.norm()));
            assert_eq!(b.z, 0.0);
        }
    }

    #[test]
    fn beltrami_on_the_power_axis() {
        let p = power(0.8);
        for x in [-0.6, 0.0, 0.5] {
            let mu = beltrami_classical(&p, c(x, 0.0)).unwrap();
            assert_relative_eq!(mu.re, -0.36, epsilon = 1e-9);
        }
        assert!(beltrami_classical(&scaled_enneper(0.5), c(0.1, 0.0)).is_err());
    }

    #[test]
    fn interior_dilatation_is_conformal() {
        let e = scaled_enneper(0.5);
        let ext = ExtensionMap::new(&e);
        for z in [c(0.1, 0.2), c(-0.5, 0.5)] {
            assert_relative_eq!(ext.dilatation_at(z).unwrap().ratio, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn b_norm_is_the_schwarzian_scaled() {
        let e = scaled_enneper(0.5);
        for z in [c(0.5, 0.0), c(0.2, -0.6), c(-0.7, 0.1)] {
            let t = reflection_tensors(&e, z).unwrap();
            let s = sigma_from_jets(&e.jets(z).unwrap());
            let expect = (-2.0 * s.sigma).exp() * schwarzian(&e, z).unwrap().norm();
            assert_relative_eq!(t.b_norm(), expect, max_relative = 1e-8);
            let l2 = t.lambda_sigma * t.lambda_sigma;
            assert_relative_eq!(t.laplacian_psi, 4.0 * l2 - t.abs_k, max_relative = 1e-10);
        }
    }

    #[test]
    fn identity_intrinsic_dvr_is_inversion_derivative() {
        let id = MapSpec::analytic("z").unwrap();
        let z = c(0.4, 0.3);
        for a in [0.0, 0.7, 2.0] {
            assert_relative_eq!(
                intrinsic_dvr(&id, z, a).unwrap(),
                1.0 / z.norm_sqr(),
                max_relative = 1e-12
            );
        }
        assert!(intrinsic_dvr(&scaled_enneper(0.5), c(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn intrinsic_ratio_matches_numeric_dilatation() {
        let e = scaled_enneper(0.5);
        let zeta = c(0.5, 0.0);
        let intrinsic = intrinsic_ratio(&e, zeta, 32).unwrap();
        let numeric = ExtensionMap::new(&e)
            .dilatation_at(1.0 / zeta.conj())
            .unwrap()
            .ratio;
        assert_relative_eq!(intrinsic, numeric, max_relative = 5e-3);
    }

    #[test]
    fn surface_condition_matches_chart() {
        let g = GridParams::new(8, 16, 0.99, 1.5).unwrap();
        let r = surface_condition_check(&scaled_enneper(0.5), &g).unwrap();
        assert!(r.max_chart_residual < 1e-9, "{}", r.max_chart_residual);
        assert!(r.max_violation <= 1e-12);
        let r = surface_condition_check(&power(0.8), &g).unwrap();
        assert!((r.max_surface_t - 0.36).abs() < 1e-6);
    }

    #[test]
    fn qc_report_for_power_map() {
        let g = GridParams::new(16, 32, 0.995, 1.5).unwrap();
        let r = qc_report(&power(0.8), &g, 64, 7).unwrap();
        assert_eq!(r.samples + r.skipped, 64);
        assert!(r.within_bound(0.02), "{} vs {:?}", r.max_ratio, r.bound);
        let again = qc_report(&power(0.8), &g, 64, 7).unwrap();
        assert_eq!(r.max_ratio, again.max_ratio);
    }
}
