use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Linear fractional map `(a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = Moebius { a, b, c, d };
        if m.det().norm() <= 1e-300 {
            return Err(Error::InvalidParameter(
                "degenerate Moebius coefficients (ad - bc = 0)".into(),
            ));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Moebius {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// The involution `(p - z) / (1 - conj(p) z)`.
    pub fn involution(p: Complex64) -> Self {
        Moebius {
            a: -ONE,
            b: p,
            c: -p.conj(),
            d: ONE,
        }
    }

    /// The self-inverse Cayley map `(1 - z) / (1 + z)` between the disc and
    /// the right half-plane.
    pub fn cayley() -> Self {
        Moebius {
            a: -ONE,
            b: ONE,
            c: ONE,
            d: ONE,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &Moebius) -> Moebius {
        Moebius {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
        .rescaled()
    }

    pub fn inverse(&self) -> Moebius {
        Moebius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn power(&self, k: u32) -> Moebius {
        let mut result = Moebius::identity();
        let mut base = *self;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        result
    }

    /// Same map with the coefficient of largest modulus scaled to one, to
    /// keep repeated products in range.
    fn rescaled(self) -> Moebius {
        let s = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if s == 0.0 {
            return self;
        }
        Moebius {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    /// Coefficients divided by `d` (or by `c` when `d` vanishes) for
    /// coefficient-wise comparisons.
    pub fn normalized(&self) -> Moebius {
        let s = if self.d.norm() > 1e-300 { self.d } else { self.c };
        Moebius {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    /// Max coefficient difference after normalisation.
    pub fn distance(&self, other: &Moebius) -> f64 {
        let p = self.normalized();
        let q = other.normalized();
        [(p.a - q.a), (p.b - q.b), (p.c - q.c), (p.d - q.d)]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let s = self.d;
        if s.norm() <= 1e-300 {
            return false;
        }
        (self.a / s - ONE).norm() <= tol && (self.b / s).norm() <= tol && (self.c / s).norm() <= tol
    }

    /// Centre and radius of the image of the unit circle when the pole lies
    /// outside the closed disc.
    pub fn image_of_unit_circle(&self) -> Option<(Complex64, f64)> {
        // |w| with z = inverse(w) on |z| = 1:
        // (|d|^2-|c|^2)|w|^2 - 2 Re(w K) + |b|^2 - |a|^2 = 0, K = d conj(b) - conj(a) c
        let big_a = self.d.norm_sqr() - self.c.norm_sqr();
        if big_a <= 0.0 {
            return None;
        }
        let k = self.d * self.b.conj() - self.a.conj() * self.c;
        let centre = k.conj() / big_a;
        let r2 = k.norm_sqr() / (big_a * big_a) - (self.b.norm_sqr() - self.a.norm_sqr()) / big_a;
        Some((centre, r2.max(0.0).sqrt()))
    }

    /// `sup |phi|` over the closed disc, when finite.
    pub fn sup_on_disc(&self) -> Option<f64> {
        self.image_of_unit_circle().map(|(c, r)| c.norm() + r)
    }

    /// True when the map is a conformal automorphism of the disc, i.e.
    /// `|cz+d|^2 - |az+b|^2` is a positive multiple of `1 - |z|^2`.
    pub fn is_disc_automorphism(&self, tol: f64) -> bool {
        let k = self.d.norm_sqr() - self.b.norm_sqr();
        if k <= 0.0 {
            return false;
        }
        let scale = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|v| v.norm_sqr())
            .fold(0.0, f64::max);
        let cross = self.c * self.d.conj() - self.a * self.b.conj();
        let lead = self.c.norm_sqr() - self.a.norm_sqr() + k;
        cross.norm() <= tol * scale && lead.abs() <= tol * scale
    }

    /// Finite fixed points; empty for the identity and for maps fixing only
    /// infinity.
    pub fn fixed_points(&self) -> Vec<Complex64> {
        let scale = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let (a, b, c, d) = (self.a / scale, self.b / scale, self.c / scale, self.d / scale);
        // c z^2 + (d - a) z - b = 0
        let p = d - a;
        if c.norm() < 1e-14 {
            if p.norm() < 1e-14 {
                return Vec::new();
            }
            return vec![b / p];
        }
        let disc2 = p * p + 4.0 * b * c;
        if disc2.norm() <= 1e-13 * (p.norm_sqr() + 4.0 * (b * c).norm()) {
            // Parabolic: snap the nearly split double root together.
            let z = -p / (2.0 * c);
            return vec![z, z];
        }
        let disc = disc2.sqrt();
        let q1 = -0.5 * (p + disc);
        let q2 = -0.5 * (p - disc);
        let q = if q1.norm() >= q2.norm() { q1 } else { q2 };
        if q.norm() < 1e-300 {
            return vec![ZERO, ZERO];
        }
        vec![q / c, -b / q]
    }

    /// Real invariant `tr^2 / det`; for automorphisms it is real and
    /// compares with 4 to give the elliptic/parabolic/hyperbolic type.
    pub fn trace_invariant(&self) -> Complex64 {
        let t = self.a + self.d;
        t * t / self.det()
    }
}
