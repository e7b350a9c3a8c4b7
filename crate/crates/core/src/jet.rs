//! Truncated Taylor jets of analytic functions.
//!
//! A [`HoloJet`] of order `n` stores the normalized Taylor coefficients
//! `f^(k)(z0) / k!` for `k = 0..=n` at an expansion point `z0`. Arithmetic
//! is exact truncated power-series algebra, so derivatives come out without
//! any numerical differentiation. Order 3 is the most anything downstream
//! needs (the Schwarzian uses `f'''`).

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 3;

const FACTORIAL: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoloJet {
    order: usize,
    at: Complex64,
    coeffs: [Complex64; MAX_ORDER + 1],
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl HoloJet {
    /// Builds a jet from normalized Taylor coefficients; `coeffs.len() - 1` is the order.
    pub fn from_taylor(at: Complex64, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_ORDER + 1 {
            return Err(Error::UnsupportedOrder(coeffs.len().saturating_sub(1)));
        }
        let mut c = [zero(); MAX_ORDER + 1];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self {
            order: coeffs.len() - 1,
            at,
            coeffs: c,
        })
    }

    /// Builds a jet from plain derivatives `f, f', f'', ...`.
    pub fn from_derivatives(at: Complex64, derivs: &[Complex64]) -> Result<Self> {
        let scaled: Vec<Complex64> = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| d / FACTORIAL[k.min(MAX_ORDER)])
            .collect();
        Self::from_taylor(at, &scaled)
    }

    pub fn constant(value: Complex64, at: Complex64, order: usize) -> Self {
        let mut coeffs = [zero(); MAX_ORDER + 1];
        coeffs[0] = value;
        Self {
            order: order.min(MAX_ORDER),
            at,
            coeffs,
        }
    }

    /// Jet of the identity function `z` at `at`.
    pub fn variable(at: Complex64, order: usize) -> Self {
        let mut jet = Self::constant(at, at, order);
        if jet.order >= 1 {
            jet.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn at(&self) -> Complex64 {
        self.at
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs[..=self.order]
    }

    /// `f^(k)(z0)`; zero beyond the jet's order.
    pub fn derivative(&self, k: usize) -> Complex64 {
        if k > self.order {
            zero()
        } else {
            self.coeffs[k] * FACTORIAL[k]
        }
    }

    /// The jet of `f'`, one order lower.
    pub fn differentiate(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::UnsupportedOrder(0));
        }
        let c: Vec<Complex64> = (1..=self.order)
            .map(|k| self.coeffs[k] * k as f64)
            .collect();
        Self::from_taylor(self.at, &c)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = *self;
        out.order = order.min(self.order);
        for c in out.coeffs.iter_mut().skip(out.order + 1) {
            *c = zero();
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    fn zip(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_order(other)?;
        let mut out = *self;
        for k in 0..=self.order {
            out.coeffs[k] = op(self.coeffs[k], other.coeffs[k]);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c *= factor;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.order.min(other.order);
        let mut out = Self::constant(zero(), self.at, n);
        for k in 0..=n {
            out.coeffs[k] = (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum();
        }
        out
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let b0 = other.coeffs[0];
        if b0 == zero() {
            return Err(Error::Singular {
                at: self.at,
                what: "division by zero",
            });
        }
        let mut out = Self::constant(zero(), self.at, self.order);
        for k in 0..=self.order {
            let acc: Complex64 = (1..=k).map(|i| other.coeffs[i] * out.coeffs[k - i]).sum();
            out.coeffs[k] = (self.coeffs[k] - acc) / b0;
        }
        Ok(out)
    }

    /// Composes `outer ∘ self`, where `outer` is expanded at `self.value()`.
    ///
    /// The result is expanded at `self.at()`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        outer.check_order(inner)?;
        let n = inner.order;
        let mut shift = *inner;
        shift.coeffs[0] = zero();
        let mut out = Self::constant(outer.coeffs[0], inner.at, n);
        let mut power = Self::constant(Complex64::new(1.0, 0.0), inner.at, n);
        for j in 1..=n {
            power = power.mul_unchecked(&shift);
            for k in 0..=n {
                out.coeffs[k] += outer.coeffs[j] * power.coeffs[k];
            }
        }
        Ok(out)
    }

    /// Applies a scalar function given its derivatives `[F(w), F'(w), F''(w), F'''(w)]`
    /// at `w = self.value()`.
    fn apply(&self, derivs: [Complex64; 4]) -> Self {
        let mut outer = Self::constant(derivs[0], self.value(), self.order);
        for k in 1..=self.order {
            outer.coeffs[k] = derivs[k] / FACTORIAL[k];
        }
        // orders agree by construction
        Self::compose(&outer, self).expect("orders agree")
    }

    fn nonzero_base(&self, what: &'static str) -> Result<Complex64> {
        let w = self.value();
        if w == zero() {
            Err(Error::Singular { at: self.at, what })
        } else {
            Ok(w)
        }
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.apply([e, e, e, e])
    }

    /// Principal branch at the expansion value.
    pub fn ln(&self) -> Result<Self> {
        let w = self.nonzero_base("logarithm of zero")?;
        let r = w.inv();
        Ok(self.apply([w.ln(), r, -r * r, 2.0 * r * r * r]))
    }

    /// Principal branch at the expansion value.
    pub fn sqrt(&self) -> Result<Self> {
        let w = self.nonzero_base("square root of zero")?;
        let s = w.sqrt();
        let r = w.inv();
        Ok(self.apply([s, 0.5 * s * r, -0.25 * s * r * r, 0.375 * s * r * r * r]))
    }

    /// `self^p` for a complex constant exponent, principal branch.
    pub fn powc(&self, p: Complex64) -> Result<Self> {
        let w = self.nonzero_base("non-integer power of zero")?;
        let wp = (p * w.ln()).exp();
        let r = w.inv();
        let one = Complex64::new(1.0, 0.0);
        Ok(self.apply([
            wp,
            p * wp * r,
            p * (p - one) * wp * r * r,
            p * (p - one) * (p - 2.0 * one) * wp * r * r * r,
        ]))
    }

    /// Integer power by repeated multiplication; valid through zeros of the base
    /// for non-negative exponents.
    pub fn powi(&self, n: i64) -> Result<Self> {
        let one = Self::constant(Complex64::new(1.0, 0.0), self.at, self.order);
        let mut acc = one;
        let mut base = *self;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        if n < 0 {
            one.div(&acc)
        } else {
            Ok(acc)
        }
    }

    pub fn sin(&self) -> Self {
        let w = self.value();
        let (s, c) = (w.sin(), w.cos());
        self.apply([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let w = self.value();
        let (s, c) = (w.sin(), w.cos());
        self.apply([c, -s, -c, s])
    }

    pub fn atanh(&self) -> Result<Self> {
        let w = self.value();
        let one = Complex64::new(1.0, 0.0);
        let d = one - w * w;
        if d == zero() {
            return Err(Error::Singular {
                at: self.at,
                what: "atanh at a branch point",
            });
        }
        let r = d.inv();
        Ok(self.apply([
            w.atanh(),
            r,
            2.0 * w * r * r,
            (2.0 + 6.0 * w * w) * r * r * r,
        ]))
    }

    /// Classical Schwarzian `f'''/f' - 3/2 (f''/f')^2`; requires order 3.
    pub fn schwarzian(&self) -> Result<Complex64> {
        if self.order < 3 {
            return Err(Error::UnsupportedOrder(self.order));
        }
        let d1 = self.derivative(1);
        if d1 == zero() {
            return Err(Error::Degenerate {
                at: self.at,
                what: "vanishing first derivative",
            });
        }
        let p = self.derivative(2) / d1;
        Ok(self.derivative(3) / d1 - 1.5 * p * p)
    }
}
