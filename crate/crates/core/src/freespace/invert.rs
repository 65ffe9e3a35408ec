//! Contour inversion of Laplace-domain solutions.
//!
//! Two routes: for `t` below a few horizons the symbol is split as
//! `K = K0 + e^{-zδ}F` and the transform is expanded in powers of
//! `e^{-zδ}F`, each term inverted at its own shifted time (only
//! `⌊t/δ⌋ + 1` terms survive). For later times the full symbol is inverted
//! directly on a contour through the origin's neighbourhood.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::contour::InversionContour;
use super::symbol::Symbol;
use crate::error::{Error, Result};

/// Time (in horizons) at which the direct route takes over.
pub const DIRECT_FROM_HORIZONS: f64 = 8.0;

/// Which Laplace-domain function to invert.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    /// `√K e^{−|x|√K} / (2z)`: the fundamental solution at `x`.
    Density { x: f64 },
    /// `K / (z (K + ξ²))`: the Fourier mode `ξ` of the fundamental solution.
    Fourier { xi: f64 },
}

impl Target {
    fn direct_value(&self, z: Complex64, k: Complex64, q: Complex64) -> Complex64 {
        match *self {
            Target::Density { x } => q * (-x.abs() * q).exp() / (2.0 * z),
            Target::Fourier { xi } => k / (z * (k + xi * xi)),
        }
    }

    fn needs_root(&self) -> bool {
        matches!(self, Target::Density { .. })
    }

    /// Taylor coefficients in ε of the transform evaluated at `K0 + ε`, up to
    /// order `n`.
    fn series(&self, z: Complex64, k0: Complex64, n: usize) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            Target::Density { x } => {
                let x = x.abs();
                let q0 = k0.sqrt();
                // √(K0+ε) = q0 Σ binom(1/2, k) (ε/K0)^k
                let mut q = vec![zero; n + 1];
                let mut binom = 1.0;
                let mut pow = Complex64::new(1.0, 0.0);
                for (k, qk) in q.iter_mut().enumerate() {
                    *qk = q0 * binom * pow;
                    binom *= (0.5 - k as f64) / (k + 1) as f64;
                    pow /= k0;
                }
                // e^{−x(q − q0)} by the power-series exponential recurrence
                let mut e = vec![zero; n + 1];
                e[0] = Complex64::new(1.0, 0.0);
                for k in 1..=n {
                    let mut acc = zero;
                    for j in 1..=k {
                        acc += (j as f64) * (-x * q[j]) * e[k - j];
                    }
                    e[k] = acc / k as f64;
                }
                let scale = (-x * q0).exp() / (2.0 * z);
                (0..=n)
                    .map(|k| (0..=k).map(|j| q[j] * e[k - j]).sum::<Complex64>() * scale)
                    .collect()
            }
            Target::Fourier { xi } => {
                let x2 = xi * xi;
                let r = k0 + x2;
                // 1/(r + ε) = Σ (−ε)^k / r^{k+1}
                let mut out = Vec::with_capacity(n + 1);
                out.push((1.0 - x2 / r) / z);
                let mut p = 1.0 / r;
                for _ in 1..=n {
                    p = -p / r;
                    out.push(-x2 * p / z);
                }
                out
            }
        }
    }
}

/// Result of one inversion. `imag` is the imaginary part of the quadrature
/// sum, which vanishes for an exact real-valued result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inversion {
    pub value: f64,
    pub imag: f64,
    pub warning: bool,
}

pub fn invert_symbol(
    symbol: &Symbol,
    target: Target,
    t: f64,
    contour: &InversionContour,
) -> Result<Inversion> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("inversion needs t > 0, got {t}")));
    }
    let (sum, scale) = match symbol.horizon() {
        Some(delta) if t < DIRECT_FROM_HORIZONS * delta => {
            by_steps(symbol, target, t, delta, contour)
        }
        _ => direct(symbol, target, t, contour),
    };
    if !sum.re.is_finite() || !sum.im.is_finite() {
        return Err(Error::Numerical(format!(
            "contour sum is not finite at t = {t}"
        )));
    }
    let floor = 1e-6 * sum.re.abs() + 256.0 * f64::EPSILON * scale;
    Ok(Inversion {
        value: sum.re,
        imag: sum.im,
        warning: sum.im.abs() > floor,
    })
}

fn by_steps(
    symbol: &Symbol,
    target: Target,
    t: f64,
    delta: f64,
    contour: &InversionContour,
) -> (Complex64, f64) {
    let shift = 1.5 * symbol.k0_zero();
    let nmax = (t / delta).floor() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for n in 0..=nmax {
        let tn = t - n as f64 * delta;
        if tn <= 1e-12 * t {
            continue;
        }
        for (z, w) in contour.nodes(tn, shift) {
            let c = target.series(z, symbol.k0(z), n)[n];
            let term = (z * tn).exp() * c * symbol.remainder(z).powi(n as i32) * w;
            scale += term.norm();
            sum += term;
        }
    }
    (sum, scale)
}

fn direct(symbol: &Symbol, target: Target, t: f64, contour: &InversionContour) -> (Complex64, f64) {
    let nodes = contour.nodes(t, 0.0);
    let mid = nodes.len() / 2;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    // each half is walked from the vertex outward so √K stays continuous
    for upper in [true, false] {
        let mut prev: Option<Complex64> = None;
        let idx: Box<dyn Iterator<Item = usize>> = if upper {
            Box::new(mid..nodes.len())
        } else {
            Box::new((0..=mid).rev())
        };
        for i in idx {
            let (z, w) = nodes[i];
            let k = symbol.k(z);
            let mut q = if target.needs_root() { k.sqrt() } else { k };
            if let (true, Some(p)) = (target.needs_root(), prev) {
                if (q - p).norm() > (-q - p).norm() {
                    q = -q;
                }
            }
            prev = Some(q);
            let mut term = (z * t).exp() * target.direct_value(z, k, q) * w;
            if i == mid {
                term *= 0.5;
            }
            scale += term.norm();
            sum += term;
        }
    }
    (sum, scale)
}
