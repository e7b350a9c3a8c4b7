//! Quantities computed in the disk chart from the Weierstrass data: the
//! conformal factor `σ`, the harmonic Schwarzian, curvature density, the
//! injectivity and extension conditions, the function `u` and Ahlfors' `S1`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::hyperbolic::{second_differences, Geodesic};
use crate::lift::{re, PhiDerivatives};
use crate::map_spec::{DataJets, Precomposed, Weierstrass};

/// `sup_t ≤ 1 + NEHARI_TOL` counts as satisfying the injectivity condition.
pub const NEHARI_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaData {
    pub sigma: f64,
    pub sigma_z: Complex64,
    pub sigma_zz: Complex64,
    pub sigma_zzbar: f64,
    /// `(σ_x, σ_y)`.
    pub grad_sigma: [f64; 2],
    /// `Δσ = 4 σ_zz̄`.
    pub laplacian: f64,
    /// `(σ_xx, σ_xy, σ_yy)`.
    pub hessian: [f64; 3],
}

impl SigmaData {
    pub fn grad_norm(&self) -> f64 {
        self.grad_sigma[0].hypot(self.grad_sigma[1])
    }

    pub fn schwarzian(&self) -> Complex64 {
        2.0 * (self.sigma_zz - self.sigma_z * self.sigma_z)
    }
}

/// `σ = log|h'| + log(1 + |q|²)` and its derivatives from the data jets.
pub fn sigma_from_jets(j: &DataJets) -> SigmaData {
    let (h1, h2, h3) = (j.h.derivative(1), j.h.derivative(2), j.h.derivative(3));
    let (q0, q1, q2) = (j.q.derivative(0), j.q.derivative(1), j.q.derivative(2));
    let n = 1.0 + q0.norm_sqr();
    let qc = q0.conj();
    let sigma_z = h2 / (2.0 * h1) + q1 * qc / n;
    let t = q1 * qc / n;
    let sigma_zz = (h3 * h1 - h2 * h2) / (2.0 * h1 * h1) + q2 * qc / n - t * t;
    let sigma_zzbar = q1.norm_sqr() / (n * n);
    SigmaData {
        sigma: h1.norm().ln() + n.ln(),
        sigma_z,
        sigma_zz,
        sigma_zzbar,
        grad_sigma: [2.0 * sigma_z.re, -2.0 * sigma_z.im],
        laplacian: 4.0 * sigma_zzbar,
        hessian: [
            2.0 * sigma_zz.re + 2.0 * sigma_zzbar,
            -2.0 * sigma_zz.im,
            -2.0 * sigma_zz.re + 2.0 * sigma_zzbar,
        ],
    }
}

pub fn sigma_at<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<SigmaData> {
    Ok(sigma_from_jets(&spec.jets(z)?))
}

/// Harmonic Schwarzian `Sf = 2(σ_zz − σ_z²)`.
pub fn schwarzian<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<Complex64> {
    Ok(sigma_at(spec, z)?.schwarzian())
}

/// `e^{2σ}|K| = Δσ`.
pub fn curvature_density<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<f64> {
    Ok(sigma_at(spec, z)?.laplacian)
}

/// One row of the margin field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginSample {
    pub re: f64,
    pub im: f64,
    pub sigma: f64,
    pub abs_schwarzian: f64,
    pub curv_density: f64,
    pub margin_t: f64,
    pub grad_sigma_norm: f64,
}

impl MarginSample {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

pub fn margin_at<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<MarginSample> {
    let s = sigma_at(spec, z)?;
    let w = 1.0 - z.norm_sqr();
    let abs_schwarzian = s.schwarzian().norm();
    Ok(MarginSample {
        re: z.re,
        im: z.im,
        sigma: s.sigma,
        abs_schwarzian,
        curv_density: s.laplacian,
        margin_t: 0.5 * w * w * (abs_schwarzian + s.laplacian),
        grad_sigma_norm: w * s.grad_norm(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub grid: GridParams,
    pub sup_t: f64,
    #[serde(rename = "C_estimate")]
    pub c_estimate: f64,
    pub nehari_ok: bool,
    pub aw_ok: bool,
    pub worst_point: Complex64,
    #[serde(skip)]
    pub margin_field: Vec<MarginSample>,
}

impl ConditionReport {
    pub fn write_csv<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(
            out,
            "re,im,sigma,abs_schwarzian,curv_density,margin_t,grad_sigma_norm"
        )?;
        for m in &self.margin_field {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                m.re,
                m.im,
                m.sigma,
                m.abs_schwarzian,
                m.curv_density,
                m.margin_t,
                m.grad_sigma_norm
            )?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Sweeps the margin `((1−|z|²)²/2)(|Sf| + e^{2σ}|K|)` and `(1−|z|²)‖∇σ‖`
/// over the polar grid. The first degenerate point in grid order aborts.
pub fn condition_report<W: Weierstrass + ?Sized>(
    spec: &W,
    grid: &GridParams,
) -> Result<ConditionReport> {
    grid.validate()?;
    let results: Vec<Result<MarginSample>> = grid
        .points()
        .par_iter()
        .map(|&z| margin_at(spec, z))
        .collect();
    let margin_field = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut worst = &margin_field[0];
    let mut c_estimate = 0.0f64;
    for m in &margin_field {
        if !m.margin_t.is_finite() {
            return Err(Error::IllConditioned(format!(
                "non-finite margin at z = {}",
                m.z()
            )));
        }
        if m.margin_t > worst.margin_t {
            worst = m;
        }
        c_estimate = c_estimate.max(m.grad_sigma_norm);
    }
    let sup_t = worst.margin_t;
    Ok(ConditionReport {
        grid: *grid,
        sup_t,
        c_estimate,
        nehari_ok: sup_t <= 1.0 + NEHARI_TOL,
        aw_ok: sup_t < 1.0 - NEHARI_TOL,
        worst_point: worst.z(),
        margin_field,
    })
}

/// `u` from the log conformal factor `τ` at `z`: `((1−|z|²)e^τ)^{−1/2}`.
pub fn u_from_tau(z: Complex64, tau: f64) -> f64 {
    let r = z.norm();
    (-0.5 * (((1.0 - r) * (1.0 + r)).ln() + tau)).exp()
}

pub fn u_value<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<f64> {
    check_disk(z)?;
    Ok(u_from_tau(z, sigma_at(spec, z)?.sigma))
}

/// `∇ log u = (α, β)` with `α = x/(1−|z|²) − σ_x/2`, `β = y/(1−|z|²) − σ_y/2`.
pub fn u_log_gradient<W: Weierstrass + ?Sized>(spec: &W, z: Complex64) -> Result<[f64; 2]> {
    check_disk(z)?;
    Ok(log_gradient_from_sigma(z, &sigma_at(spec, z)?))
}

pub(crate) fn log_gradient_from_sigma(z: Complex64, s: &SigmaData) -> [f64; 2] {
    let w = 1.0 - z.norm_sqr();
    [
        z.re / w - 0.5 * s.grad_sigma[0],
        z.im / w - 0.5 * s.grad_sigma[1],
    ]
}

fn check_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "|z| = {} is not inside the disk",
            z.norm()
        )))
    }
}

/// Default hyperbolic arclength step for convexity profiles.
pub const PROFILE_STEP: f64 = 0.05;

/// Centered second differences of `u` along the geodesic, `n` samples at
/// arclength spacing `ds`.
pub fn convexity_profile<W: Weierstrass + ?Sized>(
    spec: &W,
    geodesic: &Geodesic,
    n: usize,
    ds: f64,
) -> Result<Vec<f64>> {
    convexity_profile_with(geodesic, n, ds, |z| sigma_at(spec, z).map(|s| s.sigma))
}

/// As [`convexity_profile`] for an arbitrary log conformal factor `τ`.
pub fn convexity_profile_with<F>(geodesic: &Geodesic, n: usize, ds: f64, tau: F) -> Result<Vec<f64>>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let zs = geodesic.samples(n, ds);
    let taus = zs.iter().map(|&z| tau(z)).collect::<Result<Vec<_>>>()?;
    second_differences_of_u(&zs, &taus, ds)
}

pub(crate) fn second_differences_of_u(zs: &[Complex64], taus: &[f64], ds: f64) -> Result<Vec<f64>> {
    if zs.len() < 3 || ds <= 0.0 {
        return Err(Error::Domain(format!(
            "profile needs n ≥ 3 and ds > 0 (n = {}, ds = {ds})",
            zs.len()
        )));
    }
    let u: Vec<f64> = zs
        .iter()
        .zip(taus)
        .map(|(&z, &t)| u_from_tau(z, t))
        .collect();
    Ok(second_differences(&u, ds))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S1Values {
    pub x: f64,
    /// From the derivatives of `φ`.
    pub s1: f64,
    /// From speed `v` and curvature `κ`.
    pub s1_curvature: f64,
    pub speed: f64,
}

/// Ahlfors' `S1` of `φ(x) = f̃(x)` on the real diameter, by two formulas.
pub fn s1_along_diameter<W: Weierstrass + ?Sized>(spec: &W, x: f64) -> Result<S1Values> {
    if x.is_nan() || x.abs() >= 1.0 {
        return Err(Error::Domain(format!("x = {x} is not in (-1, 1)")));
    }
    let z = Complex64::new(x, 0.0);
    let phi = PhiDerivatives::from_jets(&spec.jets(z)?)?;
    let (d1, d2, d3) = (re(&phi.d1), re(&phi.d2), re(&phi.d3));
    let v2 = d1.norm_squared();
    if v2.sqrt() <= 1e-12 {
        return Err(Error::Degenerate {
            at: z,
            what: "φ' vanishes",
        });
    }
    let a = d2.dot(&d1);
    let s1 = d3.dot(&d1) / v2 - 3.0 * a * a / (v2 * v2) + 1.5 * d2.norm_squared() / v2;

    let v = v2.sqrt();
    // ρ = v'/v = ⟨φ'',φ'⟩/v², differentiated once more
    let rho = a / v2;
    let rho_prime = (d3.dot(&d1) + d2.norm_squared()) / v2 - 2.0 * a * a / (v2 * v2);
    let kappa = d1.cross(&d2).norm() / (v2 * v);
    let s1_curvature = rho_prime - 0.5 * rho * rho + 0.5 * v2 * kappa * kappa;
    Ok(S1Values {
        x,
        s1,
        s1_curvature,
        speed: v,
    })
}

/// `f ∘ T` for `T(z) = e^{iθ}(z + a)/(1 + conj(a) z)`.
pub fn mobius_precompose<W: Weierstrass + ?Sized>(
    spec: &W,
    a: Complex64,
    theta: f64,
) -> Result<Precomposed<'_, W>> {
    Precomposed::new(spec, a, theta)
}
