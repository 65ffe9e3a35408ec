//! Memory kernel families, their moments, and the Laplace symbol K(z).

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::gamma;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// `(1-α) δ^{α-1} s^{-α}` on `(0, δ)`; unit mass.
    NormalizedFractional,
    /// `α/Γ(1-α) s^{-α}` on `(0, δ)`.
    TruncatedCaputo,
    /// Piecewise-linear through user samples.
    Tabulated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub alpha: f64,
    pub delta: f64,
    /// Constant multiplier applied to the density (1 unless rescaled).
    pub scale: f64,
    pub table: Option<Vec<(f64, f64)>>,
}

impl KernelSpec {
    pub fn normalized_fractional(alpha: f64, delta: f64) -> Result<Self> {
        Self::fractional(KernelFamily::NormalizedFractional, alpha, delta)
    }

    pub fn truncated_caputo(alpha: f64, delta: f64) -> Result<Self> {
        Self::fractional(KernelFamily::TruncatedCaputo, alpha, delta)
    }

    fn fractional(family: KernelFamily, alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!(
                "delta must be positive, got {delta}"
            )));
        }
        Ok(Self {
            family,
            alpha,
            delta,
            scale: 1.0,
            table: None,
        })
    }

    /// Kernel from `(s, ρ(s))` samples with strictly increasing `s > 0`.
    /// The last abscissa is the horizon.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Config(
                "tabulated kernel needs at least two samples".into(),
            ));
        }
        if samples[0].0 <= 0.0 {
            return Err(Error::Config(
                "tabulated kernel abscissae must be positive".into(),
            ));
        }
        for pair in samples.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Config(
                    "tabulated kernel abscissae must be strictly increasing".into(),
                ));
            }
        }
        if samples.iter().any(|&(_, r)| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::Config(
                "tabulated kernel values must be finite and nonnegative".into(),
            ));
        }
        let delta = samples.last().expect("non-empty").0;
        Ok(Self {
            family: KernelFamily::Tabulated,
            alpha: f64::NAN,
            delta,
            scale: 1.0,
            table: Some(samples),
        })
    }

    /// Load a tabulated kernel from a CSV file with header `s,rho`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "s" || &headers[1] != "rho" {
            return Err(Error::Config(
                "kernel table header must be \"s,rho\"".into(),
            ));
        }
        let mut samples = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number {:?} in kernel table", &rec[i])))
            };
            samples.push((parse(0)?, parse(1)?));
        }
        Self::tabulated(samples)
    }

    /// The same kernel multiplied by `sigma > 0`.
    pub fn scaled(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!(
                "scale must be positive, got {sigma}"
            )));
        }
        let mut out = self.clone();
        out.scale *= sigma;
        Ok(out)
    }

    /// `(C, α)` such that `ρ(s) = C s^{-α}` on `(0, δ)`, for the power families.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        let a = self.alpha;
        let c = match self.family {
            KernelFamily::NormalizedFractional => (1.0 - a) * self.delta.powf(a - 1.0),
            KernelFamily::TruncatedCaputo => a / gamma(1.0 - a),
            KernelFamily::Tabulated => return None,
        };
        Some((c * self.scale, a))
    }

    pub fn density(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!(
                "kernel density requires s > 0, got {s}"
            )));
        }
        if s >= self.delta {
            return Ok(0.0);
        }
        Ok(match self.power_law() {
            Some((c, a)) => c * s.powf(-a),
            None => self.scale * interp(self.table.as_deref().expect("tabulated"), s),
        })
    }

    pub fn mass(&self) -> f64 {
        match self.family {
            KernelFamily::NormalizedFractional => self.scale,
            KernelFamily::TruncatedCaputo => {
                let (c, a) = self.power_law().expect("power family");
                c * self.delta.powf(1.0 - a) / (1.0 - a)
            }
            KernelFamily::Tabulated => {
                self.scale * table_moment(self.table.as_deref().expect("tabulated"), 0)
            }
        }
    }

    pub fn first_moment(&self) -> f64 {
        match self.power_law() {
            Some((c, a)) => c * self.delta.powf(2.0 - a) / (2.0 - a),
            None => self.scale * table_moment(self.table.as_deref().expect("tabulated"), 1),
        }
    }

    /// `K(z) = ∫_0^δ (1 - e^{-zs}) ρ(s)/s ds` for `Re z > 0`.
    pub fn symbol_k(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re > 0.0) || !z.im.is_finite() {
            return Err(Error::Domain(format!(
                "symbol K requires Re z > 0, got {z}"
            )));
        }
        match self.power_law() {
            Some((c, a)) => power_symbol(c, a, self.delta, z),
            None => self.tabulated_symbol(z),
        }
    }

    fn tabulated_symbol(&self, z: Complex64) -> Result<Complex64> {
        let table = self.table.as_deref().expect("tabulated");
        let mut nodes = vec![0.0];
        nodes.extend(table.iter().map(|p| p.0));
        let mut total = Complex64::new(0.0, 0.0);
        for seg in nodes.windows(2) {
            let f = |s: f64| {
                let rho = interp(table, s);
                let w = z * s;
                rho * one_minus_exp_neg(w) / s
            };
            total += quadrature::integrate(f, seg[0], seg[1], 1e-10, 1e-300)?;
        }
        Ok(total * self.scale)
    }
}

/// `1 - e^{-w}` without cancellation for small `|w|`.
pub(crate) fn one_minus_exp_neg(w: Complex64) -> Complex64 {
    if w.norm() < 1e-2 {
        let mut term = w;
        let mut sum = w;
        for n in 2..12 {
            term *= -w / n as f64;
            sum += term;
        }
        sum
    } else {
        1.0 - (-w).exp()
    }
}

fn power_symbol(c: f64, a: f64, delta: f64, z: Complex64) -> Result<Complex64> {
    let s_star = delta.min(1.0 / z.norm());
    // (0, s*): termwise integration of the Taylor series of 1 - e^{-zs}
    // with w = z s*, |w| <= 1: Σ_n -(-w)^n s*^{-α} / (n! (n - α))
    let w = z * s_star;
    let mut head = Complex64::new(0.0, 0.0);
    let mut wpow = Complex64::new(1.0, 0.0);
    for n in 1..80 {
        wpow *= -w / n as f64;
        let term = -wpow / (n as f64 - a);
        head += term;
        if term.norm() < 1e-17 * head.norm() {
            break;
        }
    }
    head *= c * s_star.powf(-a);
    if s_star >= delta {
        return Ok(head);
    }
    // (s*, δ) in the variable v = ln s
    let f = |v: f64| {
        let s = v.exp();
        one_minus_exp_neg(z * s) * (c * s.powf(-a))
    };
    let tail = quadrature::integrate(f, s_star.ln(), delta.ln(), 1e-11, 1e-14 * head.norm())?;
    Ok(head + tail)
}

fn interp(table: &[(f64, f64)], s: f64) -> f64 {
    if s <= table[0].0 {
        return table[0].1;
    }
    let i = table.partition_point(|p| p.0 < s);
    if i >= table.len() {
        return table[table.len() - 1].1;
    }
    let (s0, r0) = table[i - 1];
    let (s1, r1) = table[i];
    r0 + (r1 - r0) * (s - s0) / (s1 - s0)
}

/// Trapezoidal `∫ s^p ρ(s) ds` for p ∈ {0, 1}, with ρ held at its first sample
/// on `(0, s_0)`.
fn table_moment(table: &[(f64, f64)], p: i32) -> f64 {
    let (s0, r0) = table[0];
    let mut acc = if p == 0 { r0 * s0 } else { 0.5 * r0 * s0 * s0 };
    for seg in table.windows(2) {
        let (a, ra) = seg[0];
        let (b, rb) = seg[1];
        acc += 0.5 * (b - a) * (a.powi(p) * ra + b.powi(p) * rb);
    }
    acc
}
