//! Adaptive Gauss–Legendre quadrature of analytic integrands along straight
//! segments in the complex plane.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const RULE_POINTS: usize = 15;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(RULE_POINTS))
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            max_depth: 30,
        }
    }
}

impl Quadrature {
    /// `∫ f(ζ) dζ` along the straight segment from `a` to `b`.
    pub fn segment<F>(&self, f: &F, a: Complex64, b: Complex64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let whole = fixed(f, a, b)?;
        self.refine(f, a, b, whole, self.abs_tol, 0)
    }

    /// Integral along the polyline through `points`.
    pub fn path<F>(&self, f: &F, points: &[Complex64]) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let legs = points.len().saturating_sub(1).max(1) as f64;
        let q = Quadrature {
            abs_tol: self.abs_tol / legs,
            ..*self
        };
        points
            .windows(2)
            .try_fold(Complex64::new(0.0, 0.0), |acc, w| {
                Ok(acc + q.segment(f, w[0], w[1])?)
            })
    }

    fn refine<F>(
        &self,
        f: &F,
        a: Complex64,
        b: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let mid = 0.5 * (a + b);
        let left = fixed(f, a, mid)?;
        let right = fixed(f, mid, b)?;
        let estimate = (left + right - whole).norm();
        if estimate <= tol {
            return Ok(left + right);
        }
        if depth >= self.max_depth {
            return Err(Error::Quadrature {
                from: a,
                to: b,
                estimate,
            });
        }
        Ok(self.refine(f, a, mid, left, 0.5 * tol, depth + 1)?
            + self.refine(f, mid, b, right, 0.5 * tol, depth + 1)?)
    }
}

fn fixed<F>(f: &F, a: Complex64, b: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += *w * f(mid + half * *x)?;
    }
    Ok(acc * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(RULE_POINTS);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 28 monomial: ∫ x^28 = 2/29
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-14);
        // nodes strictly increasing and symmetric
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!((x[7]).abs() < 1e-15);
    }

    #[test]
    fn integrates_exponential_along_complex_segment() {
        let q = Quadrature::default();
        let b = c(0.4, 0.7);
        let got = q
            .segment(&|z: Complex64| Ok(z.exp()), c(0.0, 0.0), b)
            .unwrap();
        assert!((got - (b.exp() - 1.0)).norm() < 1e-13);
    }

    #[test]
    fn adapts_near_a_pole() {
        let q = Quadrature::default();
        let b = c(0.999, 0.0);
        let got = q
            .segment(&|z: Complex64| Ok(1.0 / (1.0 - z)), c(0.0, 0.0), b)
            .unwrap();
        assert!((got - c(-(1.0f64 - 0.999).ln(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn path_independence_for_analytic_integrand() {
        let q = Quadrature::default();
        let f = |z: Complex64| Ok(z * z * (1.0 + z).sqrt());
        let z = c(0.5, -0.6);
        let direct = q.segment(&f, c(0.0, 0.0), z).unwrap();
        let bent = q.path(&f, &[c(0.0, 0.0), c(0.5, 0.0), z]).unwrap();
        assert!((direct - bent).norm() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let q = Quadrature {
            abs_tol: 1e-11,
            max_depth: 3,
        };
        let r = q.segment(
            &|z: Complex64| Ok((z.re * 40.0).sin().abs().into()),
            c(0.0, 0.0),
            c(1.0, 0.0),
        );
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
