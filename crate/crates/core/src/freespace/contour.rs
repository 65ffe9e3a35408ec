use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Hyperbolic Bromwich contour
/// `z(u) = s0 + μ (1 − sin φ cosh u + i cos φ sinh u)`, `u ∈ [−U, U]`,
/// with `μ = mu_t / t` and `nq + 1` trapezoidal nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionContour {
    pub nq: usize,
    pub mu_t: f64,
    pub phi: f64,
    pub half_width: f64,
}

impl Default for InversionContour {
    fn default() -> Self {
        Self::with_nodes(64)
    }
}

impl InversionContour {
    pub fn with_nodes(nq: usize) -> Self {
        Self {
            nq: nq.max(2) & !1,
            mu_t: 72.0,
            phi: 1.1721,
            half_width: 1.0818,
        }
    }

    /// Nodes ordered by `u` from `−U` to `U`, with weights `z'(u) h / (2πi)`.
    pub fn nodes(&self, t: f64, shift: f64) -> Vec<(Complex64, Complex64)> {
        let mu = self.mu_t / t;
        let h = 2.0 * self.half_width / self.nq as f64;
        let half = (self.nq / 2) as i64;
        let (sp, cp) = self.phi.sin_cos();
        let denom = Complex64::new(0.0, 2.0 * PI);
        (-half..=half)
            .map(|k| {
                let u = k as f64 * h;
                let z = Complex64::new(shift + mu * (1.0 - sp * u.cosh()), mu * cp * u.sinh());
                let dz = Complex64::new(-mu * sp * u.sinh(), mu * cp * u.cosh());
                (z, dz * h / denom)
            })
            .collect()
    }
}
