//! The Weierstrass–Enneper lift `f̃ = Re Φ` with
//! `Φ' = (h' + g', −i(h' − g'), −2i q h')`, its tangent frame and
//! second fundamental form.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic::sigma_from_jets;
use crate::map_spec::{DataJets, Weierstrass};
use crate::quadrature::Quadrature;

pub type Vec3 = Vector3<f64>;
pub type CVec3 = [Complex64; 3];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Φ'`, `Φ''`, `Φ'''` at a point; every partial derivative of the lift is a
/// real or imaginary part of one of these.
#[derive(Debug, Clone, Copy)]
pub struct PhiDerivatives {
    pub d1: CVec3,
    pub d2: CVec3,
    pub d3: CVec3,
}

impl PhiDerivatives {
    pub fn from_jets(j: &DataJets) -> Result<Self> {
        let h = [j.h.derivative(1), j.h.derivative(2), j.h.derivative(3)];
        let g = [j.dg.derivative(0), j.dg.derivative(1), j.dg.derivative(2)];
        let qh1 = j.q.mul(&j.h.differentiate()?)?;
        let v = |k: usize| -> CVec3 {
            [
                h[k] + g[k],
                -I * (h[k] - g[k]),
                -2.0 * I * qh1.derivative(k),
            ]
        };
        Ok(Self {
            d1: v(0),
            d2: v(1),
            d3: v(2),
        })
    }
}

pub fn re(v: &CVec3) -> Vec3 {
    Vec3::new(v[0].re, v[1].re, v[2].re)
}

pub fn im(v: &CVec3) -> Vec3 {
    Vec3::new(v[0].im, v[1].im, v[2].im)
}

fn scale(v: &CVec3, s: Complex64) -> CVec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

/// `f̃(z) = (Re(h + g), Im(h − g), 2 Im ∫₀^z q h')`.
pub fn lift_point<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<Vec3> {
    let (h, g) = spec.hg_values(z)?;
    let height = if spec.is_analytic() {
        0.0
    } else {
        2.0 * Quadrature::default()
            .segment(&|w| spec.height_integrand(w), Complex64::new(0.0, 0.0), z)?
            .im
    };
    Ok(Vec3::new((h + g).re, (h - g).im, height))
}

/// Lift at `z` given the lift `base_point` at a nearby `base`; only the short
/// segment `[base, z]` is integrated.
pub fn lift_from<W: Weierstrass + ?Sized>(
    spec: &W,
    base: Complex64,
    base_point: &Vec3,
    z: Complex64,
) -> Result<Vec3> {
    let (h, g) = spec.hg_values(z)?;
    let height = if spec.is_analytic() {
        0.0
    } else {
        base_point.z
            + 2.0
                * Quadrature::default()
                    .segment(&|w| spec.height_integrand(w), base, z)?
                    .im
    };
    Ok(Vec3::new((h + g).re, (h - g).im, height))
}

/// Lifts a sequence of points, integrating leg by leg along the polyline.
pub fn lift_path<W: Weierstrass + ?Sized>(spec: &W, points: &[Complex64]) -> Result<Vec<Vec3>> {
    let mut out: Vec<Vec3> = Vec::with_capacity(points.len());
    for (k, &z) in points.iter().enumerate() {
        let p = if k == 0 {
            lift_point(spec, z)?
        } else {
            lift_from(spec, points[k - 1], &out[k - 1], z)?
        };
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct SurfaceFrame {
    pub z: Complex64,
    pub point: Vec3,
    /// `f̃_x`, `f̃_y`.
    pub fx: Vec3,
    pub fy: Vec3,
    pub x_axis: Vec3,
    pub y_axis: Vec3,
    pub normal: Vec3,
    pub e_sigma: f64,
    pub lambda_sigma: f64,
    pub dz_coords: CVec3,
    pub dzz_coords: CVec3,
    pub dzzbar_coords: CVec3,
}

pub fn frame_at<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<SurfaceFrame> {
    let point = lift_point(spec, z)?;
    frame_with_point(spec, z, point)
}

/// Frame at `z` when the lifted point is already known.
pub fn frame_with_point<W: Weierstrass + ?Sized>(
    spec: &W,
    z: Complex64,
    point: Vec3,
) -> Result<SurfaceFrame> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "|z| = {} is not inside the disk",
            z.norm()
        )));
    }
    let jets = spec.jets(z)?;
    let phi = PhiDerivatives::from_jets(&jets)?;
    let sigma = sigma_from_jets(&jets);
    let e_sigma = sigma.sigma.exp();
    let fx = re(&phi.d1);
    let fy = -im(&phi.d1);
    let x_axis = fx / e_sigma;
    let y_axis = fy / e_sigma;
    let normal = x_axis.cross(&y_axis);
    let zero = Complex64::new(0.0, 0.0);
    Ok(SurfaceFrame {
        z,
        point,
        fx,
        fy,
        x_axis,
        y_axis,
        normal,
        e_sigma,
        lambda_sigma: 1.0 / ((1.0 - z.norm_sqr()) * e_sigma),
        dz_coords: scale(&phi.d1, Complex64::new(0.5, 0.0)),
        dzz_coords: scale(&phi.d2, Complex64::new(0.5, 0.0)),
        dzzbar_coords: [zero; 3],
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FundamentalForms {
    /// `(⟨f̃_xx, N⟩, ⟨f̃_xy, N⟩, ⟨f̃_yy, N⟩)` in the disk chart.
    pub ii_matrix: [f64; 3],
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
    pub e_sigma: f64,
    pub normal: Vec3,
}

impl FundamentalForms {
    /// Second fundamental form in the orthonormal frame `(X, Y)`.
    pub fn ii_frame(&self) -> [[f64; 2]; 2] {
        let s = 1.0 / (self.e_sigma * self.e_sigma);
        let [l, m, n] = self.ii_matrix;
        [[l * s, m * s], [m * s, n * s]]
    }
}

pub fn fundamental_forms<W: Weierstrass + ?Sized>(
    spec: &W,
    z: Complex64,
) -> Result<FundamentalForms> {
    let jets = spec.jets(z)?;
    let phi = PhiDerivatives::from_jets(&jets)?;
    let fx = re(&phi.d1);
    let fy = -im(&phi.d1);
    let normal = fx.cross(&fy).normalize();
    let fxx = re(&phi.d2);
    let fxy = -im(&phi.d2);
    let fyy = -re(&phi.d2);
    let (l, m, n) = (fxx.dot(&normal), fxy.dot(&normal), fyy.dot(&normal));
    // first fundamental form E = G = |f̃_x|², F = 0 by conformality
    let e = fx.norm_squared();
    let g = fy.norm_squared();
    let f = fx.dot(&fy);
    let det = e * g - f * f;
    Ok(FundamentalForms {
        ii_matrix: [l, m, n],
        mean_curvature: (e * n - 2.0 * f * m + g * l) / (2.0 * det),
        gauss_curvature: (l * n - m * m) / det,
        e_sigma: det.sqrt().sqrt(),
        normal,
    })
}
