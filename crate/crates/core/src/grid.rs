use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polar sampling of the disk, with radii clustered toward `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_max: f64,
    pub exterior_r_max: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            n_radial: 64,
            n_angular: 128,
            r_max: 0.995,
            exterior_r_max: 1.5,
        }
    }
}

impl GridParams {
    pub fn new(n_radial: usize, n_angular: usize, r_max: f64, exterior_r_max: f64) -> Result<Self> {
        let g = Self {
            n_radial,
            n_angular,
            r_max,
            exterior_r_max,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_radial < 2 {
            return Err(Error::Domain(format!("n_radial = {} < 2", self.n_radial)));
        }
        if self.n_angular < 3 {
            return Err(Error::Domain(format!("n_angular = {} < 3", self.n_angular)));
        }
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::Domain(format!(
                "r_max = {} not in (0, 1)",
                self.r_max
            )));
        }
        if !(self.exterior_r_max > 1.0 && self.exterior_r_max.is_finite()) {
            return Err(Error::Domain(format!(
                "exterior_r_max = {} not > 1",
                self.exterior_r_max
            )));
        }
        Ok(())
    }

    /// Ring radii `r_max sin(πk / 2n)`, `k = 1..=n`.
    pub fn radii(&self) -> Vec<f64> {
        let n = self.n_radial as f64;
        (1..=self.n_radial)
            .map(|k| self.r_max * (std::f64::consts::FRAC_PI_2 * k as f64 / n).sin())
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_angular)
            .map(|k| std::f64::consts::TAU * k as f64 / self.n_angular as f64)
            .collect()
    }

    /// Center first, then ring by ring, angle-major within a ring.
    pub fn points(&self) -> Vec<Complex64> {
        let angles = self.angles();
        std::iter::once(Complex64::new(0.0, 0.0))
            .chain(self.radii().into_iter().flat_map(|r| {
                angles
                    .iter()
                    .map(move |&t| Complex64::from_polar(r, t))
                    .collect::<Vec<_>>()
            }))
            .collect()
    }

    pub fn len(&self) -> usize {
        1 + self.n_radial * self.n_angular
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}
