//! Weierstrass data `(h, g, q)` of a harmonic mapping `f = h + conj(g)` whose
//! dilatation `g'/h'` is the square of `q`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::jet::HoloJet;
use crate::quadrature::Quadrature;

/// Jets of the Weierstrass data at a point.
#[derive(Debug, Clone, Copy)]
pub struct DataJets {
    /// `h`, order 3.
    pub h: HoloJet,
    /// `g'`, order 2.
    pub dg: HoloJet,
    /// `q`, order 2.
    pub q: HoloJet,
}

impl DataJets {
    pub fn h1(&self) -> Complex64 {
        self.h.derivative(1)
    }
}

/// Anything that can supply local Weierstrass data: parsed specs, or specs
/// precomposed with a disk automorphism.
pub trait Weierstrass: Sync {
    fn jets(&self, z: Complex64) -> Result<DataJets>;

    /// Values `(h(z), g(z))`.
    fn hg_values(&self, z: Complex64) -> Result<(Complex64, Complex64)>;

    /// Integrand `q h'` of the height coordinate of the lift.
    fn height_integrand(&self, z: Complex64) -> Result<Complex64> {
        let j = self.jets(z)?;
        Ok(j.q.value() * j.h1())
    }

    /// `g ≡ 0`: the map is analytic and its lift is planar.
    fn is_analytic(&self) -> bool;
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MapSpecSource {
    pub h: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MapSpec {
    pub label: String,
    pub h: Expr,
    pub g: Option<Expr>,
    pub q: Option<Expr>,
    source: MapSpecSource,
}

const CONSISTENCY_TOL: f64 = 1e-8;
const CHECK_RADIUS: f64 = 0.9;
const CHECK_N: usize = 32;

impl MapSpec {
    /// Parses and checks a spec. Only `h` is required.
    pub fn from_source(source: MapSpecSource) -> Result<Self> {
        let h = parse(&source.h).map_err(|e| Error::from(e).in_field("h"))?;
        let g = source
            .g
            .as_deref()
            .map(parse)
            .transpose()
            .map_err(|e| Error::from(e).in_field("g"))?;
        let q = source
            .q
            .as_deref()
            .map(parse)
            .transpose()
            .map_err(|e| Error::from(e).in_field("q"))?;
        if g.is_none() && q.is_some() {
            log::info!("g not given; g will be recovered by integrating q^2 h'");
        }
        if g.is_some() && q.is_none() {
            log::warn!(
                "q not given; using the principal square root of g'/h', which must be single-valued on the disk"
            );
        }
        let spec = Self {
            label: source.label.clone().unwrap_or_else(|| "map".to_string()),
            h,
            g,
            q,
            source,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let source: MapSpecSource = serde_json::from_str(text)?;
        Self::from_source(source)
    }

    /// Reads a spec from a file, or parses `arg` directly when it is inline JSON.
    pub fn load(arg: &str) -> Result<Self> {
        if arg.trim_start().starts_with('{') {
            Self::from_json(arg)
        } else {
            Self::from_json(&std::fs::read_to_string(Path::new(arg))?)
        }
    }

    pub fn analytic(h: &str) -> Result<Self> {
        Self::from_source(MapSpecSource {
            h: h.to_string(),
            g: None,
            q: None,
            label: None,
        })
    }

    pub fn harmonic(h: &str, g: &str, q: &str) -> Result<Self> {
        Self::from_source(MapSpecSource {
            h: h.to_string(),
            g: Some(g.to_string()),
            q: Some(q.to_string()),
            label: None,
        })
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self.source.label = Some(label.to_string());
        self
    }

    pub fn source(&self) -> &MapSpecSource {
        &self.source
    }

    fn check_points() -> impl Iterator<Item = Complex64> {
        std::iter::once(Complex64::new(0.0, 0.0)).chain((1..=CHECK_N).flat_map(|i| {
            let r = CHECK_RADIUS * i as f64 / CHECK_N as f64;
            (0..CHECK_N).map(move |k| {
                Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / CHECK_N as f64)
            })
        }))
    }

    /// Evaluates every field on a sample grid and, when both `g` and `q` are
    /// given, checks `q^2 h' = g'`.
    fn check(&self) -> Result<()> {
        let mut worst: Option<(Complex64, f64)> = None;
        for z in Self::check_points() {
            let h = self.h.eval_jet(z).map_err(|e| e.in_field("h"))?;
            let g = self
                .g
                .as_ref()
                .map(|g| g.eval_jet(z))
                .transpose()
                .map_err(|e| e.in_field("g"))?;
            let q = self
                .q
                .as_ref()
                .map(|q| q.eval_jet(z))
                .transpose()
                .map_err(|e| e.in_field("q"))?;
            if let (Some(g), Some(q)) = (g, q) {
                let h1 = h.derivative(1);
                let g1 = g.derivative(1);
                let q0 = q.value();
                let residual = (q0 * q0 * h1 - g1).norm() / (h1.norm() + g1.norm() + 1.0);
                if worst.is_none_or(|(_, r)| residual > r) {
                    worst = Some((z, residual));
                }
            }
        }
        match worst {
            Some((at, residual)) if residual > CONSISTENCY_TOL => {
                Err(Error::Inconsistent { at, residual })
            }
            _ => Ok(()),
        }
    }

    fn g_from_q(&self, q: &Expr, z: Complex64) -> Result<Complex64> {
        let integrand = |w: Complex64| {
            let qv = q.eval(w)?;
            let h1 = self.h.jet(w, 1)?.derivative(1);
            Ok(qv * qv * h1)
        };
        Quadrature::default().segment(&integrand, Complex64::new(0.0, 0.0), z)
    }
}

impl Weierstrass for MapSpec {
    fn jets(&self, z: Complex64) -> Result<DataJets> {
        let h = self.h.eval_jet(z)?;
        let h1 = h.differentiate()?;
        let (dg, q) = match (&self.g, &self.q) {
            (Some(g), Some(q)) => (g.eval_jet(z)?.differentiate()?, q.jet(z, 2)?),
            (Some(g), None) => {
                let dg = g.eval_jet(z)?.differentiate()?;
                let q = dg.div(&h1).and_then(|w| w.sqrt())?;
                (dg, q)
            }
            (None, Some(q)) => {
                let q = q.jet(z, 2)?;
                (q.mul(&q)?.mul(&h1)?, q)
            }
            (None, None) => {
                let zero = HoloJet::constant(Complex64::new(0.0, 0.0), z, 2);
                (zero, zero)
            }
        };
        if h1.value() == Complex64::new(0.0, 0.0) {
            return Err(Error::Degenerate {
                at: z,
                what: "h' vanishes",
            });
        }
        Ok(DataJets { h, dg, q })
    }

    fn hg_values(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let h = self.h.eval(z)?;
        let g = match (&self.g, &self.q) {
            (Some(g), _) => g.eval(z)?,
            (None, Some(q)) => self.g_from_q(q, z)?,
            (None, None) => Complex64::new(0.0, 0.0),
        };
        Ok((h, g))
    }

    fn height_integrand(&self, z: Complex64) -> Result<Complex64> {
        if self.is_analytic() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match &self.q {
            Some(q) => Ok(q.eval(z)? * self.h.jet(z, 1)?.derivative(1)),
            None => {
                let j = self.jets(z)?;
                Ok(j.q.value() * j.h1())
            }
        }
    }

    fn is_analytic(&self) -> bool {
        self.g.is_none() && self.q.is_none()
    }
}

/// `f ∘ T` for the disk automorphism `T(z) = e^{iθ}(z + a)/(1 + conj(a) z)`.
#[derive(Debug, Clone, Copy)]
pub struct Precomposed<'a, W: ?Sized> {
    pub inner: &'a W,
    pub a: Complex64,
    pub theta: f64,
}

impl<'a, W: Weierstrass + ?Sized> Precomposed<'a, W> {
    pub fn new(inner: &'a W, a: Complex64, theta: f64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "automorphism parameter |a| = {} >= 1",
                a.norm()
            )));
        }
        Ok(Self { inner, a, theta })
    }

    pub fn automorphism(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta) * (z + self.a) / (1.0 + self.a.conj() * z)
    }

    /// Order-3 jet of `T` at `z`.
    pub fn automorphism_jet(&self, z: Complex64) -> Result<HoloJet> {
        let zj = HoloJet::variable(z, 3);
        let one = HoloJet::constant(Complex64::new(1.0, 0.0), z, 3);
        let num = zj.add(&HoloJet::constant(self.a, z, 3))?;
        let den = one.add(&zj.scale(self.a.conj()))?;
        Ok(num.div(&den)?.scale(Complex64::from_polar(1.0, self.theta)))
    }
}

impl<W: Weierstrass + ?Sized> Weierstrass for Precomposed<'_, W> {
    fn jets(&self, z: Complex64) -> Result<DataJets> {
        let t = self.automorphism_jet(z)?;
        let t2 = t.truncate(2);
        let inner = self.inner.jets(t.value())?;
        let h = HoloJet::compose(&inner.h, &t)?;
        let dt = t.differentiate()?;
        let dg = HoloJet::compose(&inner.dg, &t2)?.mul(&dt)?;
        let q = HoloJet::compose(&inner.q, &t2)?;
        Ok(DataJets { h, dg, q })
    }

    fn hg_values(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.inner.hg_values(self.automorphism(z))
    }

    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_spec_is_analytic() {
        let s = MapSpec::from_json(r#"{"h":"z"}"#).unwrap();
        assert!(s.is_analytic());
        let j = s.jets(c(0.2, 0.3)).unwrap();
        assert_eq!(j.dg.value(), c(0.0, 0.0));
        assert_eq!(j.q.value(), c(0.0, 0.0));
    }

    #[test]
    fn enneper_spec_is_consistent() {
        let s = MapSpec::from_json(r#"{"h":"z","g":"z^3/3","q":"z","label":"enneper"}"#).unwrap();
        assert_eq!(s.label, "enneper");
        let z = c(0.4, -0.3);
        let j = s.jets(z).unwrap();
        let residual = j.q.value() * j.q.value() * j.h1() - j.dg.value();
        assert!(residual.norm() < 1e-15);
    }

    #[test]
    fn inconsistent_spec_is_rejected_with_worst_point() {
        let err = MapSpec::from_json(r#"{"h":"z","g":"z^2/2","q":"z"}"#).unwrap_err();
        match err {
            Error::Inconsistent { at, residual } => {
                // |z^2 - z| / (2 + |z|) peaks on the outer ring at the negative real axis
                assert!((at.norm() - 0.9).abs() < 1e-12);
                assert!((at - c(-0.9, 0.0)).norm() < 1e-12);
                assert!((residual - 1.71 / 2.9).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_name_the_field() {
        let err = MapSpec::from_json(r#"{"h":"z","g":"z +"}"#).unwrap_err();
        assert!(matches!(err, Error::Field { field: "g", .. }), "{err}");
        let err = MapSpec::from_json(r#"{"h":"conj(z)"}"#).unwrap_err();
        assert!(matches!(err, Error::Field { field: "h", .. }));
        assert!(MapSpec::from_json(r#"{"g":"z"}"#).is_err());
    }

    #[test]
    fn singular_field_on_the_disk_is_rejected() {
        let err = MapSpec::from_json(r#"{"h":"1/(z-0.45)"}"#).unwrap_err();
        assert!(matches!(err, Error::Field { field: "h", .. }), "{err}");
    }

    #[test]
    fn g_recovered_from_q() {
        let s = MapSpec::from_json(r#"{"h":"z","q":"z"}"#).unwrap();
        let z = c(0.5, 0.2);
        let (_, g) = s.hg_values(z).unwrap();
        assert!((g - z * z * z / 3.0).norm() < 1e-13);
        let j = s.jets(z).unwrap();
        assert!((j.dg.value() - z * z).norm() < 1e-15);
    }

    #[test]
    fn q_recovered_from_g() {
        let s = MapSpec::from_json(r#"{"h":"z","g":"z^3/3"}"#).unwrap();
        let z = c(0.5, 0.2);
        let j = s.jets(z).unwrap();
        assert!((j.q.value() - z).norm() < 1e-15);
        assert!((j.q.derivative(1) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn precomposition_identity_automorphism_is_transparent() {
        let s = MapSpec::harmonic("z", "z^3/3", "z").unwrap();
        let p = Precomposed::new(&s, c(0.0, 0.0), 0.0).unwrap();
        let z = c(0.3, 0.4);
        let a = s.jets(z).unwrap();
        let b = p.jets(z).unwrap();
        for k in 0..=3 {
            assert!((a.h.derivative(k) - b.h.derivative(k)).norm() < 1e-15);
        }
        for k in 0..=2 {
            assert!((a.dg.derivative(k) - b.dg.derivative(k)).norm() < 1e-15);
            assert!((a.q.derivative(k) - b.q.derivative(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn precomposition_keeps_data_consistent() {
        let s = MapSpec::harmonic("z", "z^3/3", "z").unwrap();
        let p = Precomposed::new(&s, c(0.3, -0.1), 0.7).unwrap();
        let j = p.jets(c(-0.2, 0.5)).unwrap();
        let r = j.q.value() * j.q.value() * j.h1() - j.dg.value();
        assert!(r.norm() < 1e-14);
        assert!(Precomposed::new(&s, c(1.0, 0.0), 0.0).is_err());
    }
}
