//! Closed-form Laplace symbols, valid on the whole cut plane.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::special::{gamma, upper_gamma_scaled};

/// `K(z)` in closed form.
///
/// For the truncated power kernels `C s^{-α}` on `(0, δ)`,
/// `K(z) = K0(z) + e^{-zδ} F(z)` with `K0 = A z^α − B` and
/// `F = C δ^{-α} e^{zδ} (zδ)^α Γ(−α, zδ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    Power {
        c: f64,
        alpha: f64,
        delta: f64,
        a: f64,
        b: f64,
    },
    /// `a z^α`: the infinite-memory fractional model.
    Fractional { a: f64, alpha: f64 },
    /// `mass · z`: the local model.
    Local { mass: f64 },
}

impl Symbol {
    pub fn from_kernel(spec: &KernelSpec) -> Result<Self> {
        let (c, alpha) = spec.power_law().ok_or_else(|| {
            Error::Unsupported("free-space inversion needs a power-law kernel".into())
        })?;
        let delta = spec.delta;
        Ok(Symbol::Power {
            c,
            alpha,
            delta,
            a: c * gamma(1.0 - alpha) / alpha,
            b: c * delta.powf(-alpha) / alpha,
        })
    }

    /// Caputo derivative of order α (`K = z^α`).
    pub fn caputo(alpha: f64) -> Self {
        Symbol::Fractional { a: 1.0, alpha }
    }

    pub fn local() -> Self {
        Symbol::Local { mass: 1.0 }
    }

    pub fn k(&self, z: Complex64) -> Complex64 {
        match *self {
            Symbol::Power { delta, .. } => self.k0(z) + (-z * delta).exp() * self.remainder(z),
            Symbol::Fractional { a, alpha } => a * z.powf(alpha),
            Symbol::Local { mass } => mass * z,
        }
    }

    /// `K0 = A z^α − B` (power kernels); the full symbol otherwise.
    pub fn k0(&self, z: Complex64) -> Complex64 {
        match *self {
            Symbol::Power { alpha, a, b, .. } => a * z.powf(alpha) - b,
            _ => self.k(z),
        }
    }

    /// `F(z)` such that `K = K0 + e^{-zδ} F`; zero without a horizon.
    pub fn remainder(&self, z: Complex64) -> Complex64 {
        match *self {
            Symbol::Power {
                c, alpha, delta, ..
            } => c * delta.powf(-alpha) * upper_gamma_scaled(-alpha, z * delta),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn horizon(&self) -> Option<f64> {
        match *self {
            Symbol::Power { delta, .. } => Some(delta),
            _ => None,
        }
    }

    /// Real zero of `K0`, `(B/A)^{1/α}`.
    pub fn k0_zero(&self) -> f64 {
        match *self {
            Symbol::Power { alpha, a, b, .. } => (b / a).powf(1.0 / alpha),
            _ => 0.0,
        }
    }

    /// `(coefficient, exponent)` of the leading large-z law `K ≈ A z^α`.
    pub fn large_z(&self) -> (f64, f64) {
        match *self {
            Symbol::Power { alpha, a, .. } | Symbol::Fractional { a, alpha } => (a, alpha),
            Symbol::Local { mass } => (mass, 1.0),
        }
    }

    /// Kernel mass `lim K(z)/z` as z → 0 (infinite for the fractional model).
    pub fn mass(&self) -> f64 {
        match *self {
            Symbol::Power {
                c, alpha, delta, ..
            } => c * delta.powf(1.0 - alpha) / (1.0 - alpha),
            Symbol::Fractional { .. } => f64::INFINITY,
            Symbol::Local { mass } => mass,
        }
    }

    pub fn scaled(&self, sigma: f64) -> Self {
        match *self {
            Symbol::Power {
                c,
                alpha,
                delta,
                a,
                b,
            } => Symbol::Power {
                c: c * sigma,
                alpha,
                delta,
                a: a * sigma,
                b: b * sigma,
            },
            Symbol::Fractional { a, alpha } => Symbol::Fractional {
                a: a * sigma,
                alpha,
            },
            Symbol::Local { mass } => Symbol::Local { mass: mass * sigma },
        }
    }
}
