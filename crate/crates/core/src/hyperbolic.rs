//! Hyperbolic geometry of the unit disk with the curvature −4 metric
//! `|dz| / (1 − |z|²)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Hyperbolic distance for the metric `|dz| / (1 − |z|²)`.
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    let rho = (z - w).norm() / (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
    rho.min(1.0).atanh()
}

/// Geodesic between two ideal points `e^{iθ₀}` and `e^{iθ₁}`, parametrized by
/// hyperbolic arclength with `s = 0` at the point nearest the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    rotation: Complex64,
    shift: f64,
}

impl Geodesic {
    pub fn between(theta0: f64, theta1: f64) -> Result<Self> {
        let span = (theta1 - theta0).rem_euclid(std::f64::consts::TAU);
        if span < 1e-12 || std::f64::consts::TAU - span < 1e-12 {
            return Err(Error::Domain("geodesic endpoints coincide".into()));
        }
        let half = 0.5 * span;
        let mid = theta0 + half;
        // the automorphism x ↦ (x + a)/(1 + a x) takes the vertical diameter to
        // the geodesic with endpoints e^{±i half}
        let a = (0.5 * (std::f64::consts::FRAC_PI_2 - half)).tan();
        Ok(Self {
            rotation: Complex64::from_polar(1.0, mid),
            shift: a,
        })
    }

    /// The real diameter from −1 to 1.
    pub fn diameter() -> Self {
        Self::between(std::f64::consts::PI, 0.0).expect("distinct endpoints")
    }

    pub fn point(&self, s: f64) -> Complex64 {
        let v = Complex64::new(0.0, s.tanh());
        self.rotation * (v + self.shift) / (1.0 + self.shift * v)
    }

    /// Endpoint angles `(θ₀, θ₁)`.
    pub fn endpoints(&self) -> (f64, f64) {
        let mid = self.rotation.arg();
        let half = std::f64::consts::FRAC_PI_2 - 2.0 * self.shift.atan();
        (mid - half, mid + half)
    }

    /// `n` points at uniform arclength spacing `ds`, centered on `s = 0`.
    pub fn samples(&self, n: usize, ds: f64) -> Vec<Complex64> {
        let s0 = -0.5 * (n.saturating_sub(1)) as f64 * ds;
        (0..n).map(|k| self.point(s0 + k as f64 * ds)).collect()
    }
}

/// `count` geodesics with independent uniform endpoints, reproducible from
/// `seed`.
pub fn random_geodesics(count: usize, seed: u64) -> Vec<Geodesic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let b: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        if let Ok(g) = Geodesic::between(a, b) {
            out.push(g);
        }
    }
    out
}

/// Centered second differences `(v[k-1] − 2 v[k] + v[k+1]) / ds²`.
pub fn second_differences(values: &[f64], ds: f64) -> Vec<f64> {
    values
        .windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]) / (ds * ds))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diameter_is_tanh_parametrized() {
        let g = Geodesic::diameter();
        for s in [-2.0, -0.3, 0.0, 0.7, 3.0] {
            let p = g.point(s);
            assert!((p - c(f64::tanh(s), 0.0)).norm() < 1e-15, "{s}: {p}");
        }
    }

    #[test]
    fn arclength_matches_distance() {
        let g = Geodesic::between(0.4, 2.9).unwrap();
        for (s, t) in [(-1.0, 0.5), (0.0, 2.0), (-3.0, -2.5)] {
            let d = distance(g.point(s), g.point(t));
            assert!((d - (t - s)).abs() < 1e-10, "{d} vs {}", t - s);
        }
    }

    #[test]
    fn endpoints_are_reached() {
        let (t0, t1) = (0.4, 2.9);
        let g = Geodesic::between(t0, t1).unwrap();
        assert!((g.point(-30.0) - Complex64::from_polar(1.0, t0)).norm() < 1e-12);
        assert!((g.point(30.0) - Complex64::from_polar(1.0, t1)).norm() < 1e-12);
        // wrapping through 2π
        let g = Geodesic::between(5.5, 0.5).unwrap();
        assert!((g.point(30.0) - Complex64::from_polar(1.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn endpoints_round_trip() {
        let g = Geodesic::between(0.4, 2.9).unwrap();
        let (a, b) = g.endpoints();
        assert!((a - 0.4).abs() < 1e-12 && (b - 2.9).abs() < 1e-12);
    }

    #[test]
    fn random_geodesics_are_reproducible() {
        assert_eq!(random_geodesics(5, 3), random_geodesics(5, 3));
        assert_ne!(random_geodesics(5, 3), random_geodesics(5, 4));
    }

    #[test]
    fn degenerate_geodesic_is_rejected() {
        assert!(Geodesic::between(1.0, 1.0).is_err());
        assert!(Geodesic::between(1.0, 1.0 + std::f64::consts::TAU).is_err());
    }

    #[test]
    fn second_differences_of_a_parabola() {
        let v: Vec<f64> = (0..5).map(|k| (k as f64 * 0.1).powi(2)).collect();
        for d in second_differences(&v, 0.1) {
            assert!((d - 2.0).abs() < 1e-12);
        }
    }
}
