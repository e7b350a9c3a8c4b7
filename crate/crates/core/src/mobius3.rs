//! Möbius transformations of ℝ³ ∪ {∞} as chains of similarities and
//! inversions.

use nalgebra::Rotation3;
use serde::Serialize;

use crate::lift::Vec3;

/// A point of ℝ³ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Point3 {
    Finite(Vec3),
    Infinity,
}

impl Point3 {
    pub fn finite(&self) -> Option<Vec3> {
        match self {
            Point3::Finite(v) => Some(*v),
            Point3::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point3::Infinity)
    }
}

impl From<Vec3> for Point3 {
    fn from(v: Vec3) -> Self {
        Point3::Finite(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Translate(Vec3),
    Rotate(Rotation3<f64>),
    /// Nonzero scale factor.
    Dilate(f64),
    /// `x ↦ c + (x − c)/‖x − c‖²`.
    Invert {
        center: Vec3,
    },
}

impl Step {
    fn apply(&self, p: Point3) -> Point3 {
        match (self, p) {
            (Step::Invert { center }, Point3::Infinity) => Point3::Finite(*center),
            (_, Point3::Infinity) => Point3::Infinity,
            (Step::Translate(t), Point3::Finite(x)) => Point3::Finite(x + t),
            (Step::Rotate(r), Point3::Finite(x)) => Point3::Finite(r * x),
            (Step::Dilate(s), Point3::Finite(x)) => Point3::Finite(x * *s),
            (Step::Invert { center }, Point3::Finite(x)) => {
                let d = x - center;
                let n2 = d.norm_squared();
                if n2 == 0.0 {
                    Point3::Infinity
                } else {
                    Point3::Finite(center + d / n2)
                }
            }
        }
    }

    /// Operator norm of the derivative at a finite point.
    fn factor(&self, x: &Vec3) -> f64 {
        match self {
            Step::Translate(_) | Step::Rotate(_) => 1.0,
            Step::Dilate(s) => s.abs(),
            Step::Invert { center } => 1.0 / (x - center).norm_squared(),
        }
    }
}

/// Steps are applied in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mobius3 {
    steps: Vec<Step>,
}

impl Mobius3 {
    pub fn identity() -> Self {
        Self::default()
    }

    /// The inversion `J(x) = x/‖x‖²`.
    pub fn inversion() -> Self {
        Self::identity().then(Step::Invert {
            center: Vec3::zeros(),
        })
    }

    pub fn then(mut self, step: Step) -> Self {
        self.steps.push(step);
        self
    }

    /// `other ∘ self`.
    pub fn followed_by(mut self, other: &Mobius3) -> Self {
        self.steps.extend_from_slice(&other.steps);
        self
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        self.steps.iter().fold(p, |p, s| s.apply(p))
    }

    /// `‖T'(x)‖`, multiplied along the chain; `None` when the chain passes
    /// through ∞.
    pub fn conformal_factor(&self, x: &Vec3) -> Option<f64> {
        let mut p = *x;
        let mut factor = 1.0;
        for s in &self.steps {
            factor *= s.factor(&p);
            p = s.apply(Point3::Finite(p)).finite()?;
        }
        Some(factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_basics() {
        let j = Mobius3::inversion();
        assert_eq!(
            j.apply(Vec3::new(2.0, 0.0, 0.0).into()),
            Point3::Finite(Vec3::new(0.5, 0.0, 0.0))
        );
        assert_eq!(j.conformal_factor(&Vec3::new(2.0, 0.0, 0.0)), Some(0.25));
        assert_eq!(j.apply(Vec3::zeros().into()), Point3::Infinity);
        assert_eq!(j.apply(Point3::Infinity), Point3::Finite(Vec3::zeros()));
    }

    #[test]
    fn chain_factor_matches_finite_differences() {
        let t = Mobius3::identity()
            .then(Step::Translate(Vec3::new(0.0, 0.0, 3.0)))
            .then(Step::Rotate(Rotation3::from_euler_angles(0.3, -0.2, 1.1)))
            .then(Step::Invert {
                center: Vec3::zeros(),
            })
            .then(Step::Dilate(2.5));
        let x = Vec3::new(0.4, -0.7, 0.2);
        let h = 1e-6;
        let f = |v: Vec3| t.apply(v.into()).finite().unwrap();
        let factor = t.conformal_factor(&x).unwrap();
        for e in [Vec3::x(), Vec3::y(), Vec3::z()] {
            let d = (f(x + e * h) - f(x - e * h)) / (2.0 * h);
            assert!((d.norm() - factor).abs() < 1e-6 * factor);
        }
    }

    #[test]
    fn pole_gives_infinity() {
        let t = Mobius3::identity()
            .then(Step::Translate(Vec3::new(-1.0, 0.0, 0.0)))
            .then(Step::Invert {
                center: Vec3::zeros(),
            });
        assert!(t.apply(Vec3::new(1.0, 0.0, 0.0).into()).is_infinite());
        assert_eq!(t.conformal_factor(&Vec3::new(1.0, 0.0, 0.0)), None);
    }

    #[test]
    fn inversion_is_an_involution() {
        let j = Mobius3::inversion().then(Step::Invert {
            center: Vec3::zeros(),
        });
        let x = Vec3::new(0.3, 2.0, -1.0);
        assert!((j.apply(x.into()).finite().unwrap() - x).norm() < 1e-15);
    }
}
