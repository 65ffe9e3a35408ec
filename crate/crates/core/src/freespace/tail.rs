//! Stretched-exponential tail constants and fitting.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::special::gamma;

/// Constants of the far-field law `u ≈ A y^a e^{−b y^c}` and the
/// large-z amplitude `c_δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailAsymptote {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c_delta: f64,
}

impl TailAsymptote {
    pub fn new(alpha: f64, delta: f64) -> Self {
        let two_m = 2.0 - alpha;
        Self {
            a: (2.0 * alpha - 2.0) / two_m,
            b: two_m * 2f64.powf(-2.0 / two_m) * alpha.powf(alpha / two_m),
            c: 2.0 / two_m,
            c_delta: (gamma(two_m) * delta.powf(alpha - 1.0) / alpha).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFitParams {
    /// Window on `u/peak`.
    pub lo: f64,
    pub hi: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub c_step: f64,
    /// Number of x samples between 0 and the far end of the window.
    pub samples: usize,
    pub min_points: usize,
}

impl Default for TailFitParams {
    fn default() -> Self {
        Self {
            lo: 1e-10,
            hi: 1e-4,
            c_min: 1.0,
            c_max: 2.5,
            c_step: 1e-3,
            samples: 240,
            min_points: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailFit {
    Fitted {
        c: f64,
        residual: f64,
        points: usize,
        x_range: (f64, f64),
    },
    /// Too few samples in the window to fit.
    Insufficient { points: usize },
}

impl TailFit {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            TailFit::Fitted { c, .. } => Some(*c),
            TailFit::Insufficient { .. } => None,
        }
    }
}

/// Fit `log u = a0 − b x^c` on the far tail of an even profile `u(x)` by
/// scanning `c` and solving the linear least-squares problem for `(a0, b)`.
pub fn fit_stretch_exponent(
    u: impl Fn(f64) -> Result<f64>,
    params: &TailFitParams,
) -> Result<TailFit> {
    let peak = u(0.0)?;
    // locate the far end of the window by doubling
    let mut x_end = 1e-3;
    for _ in 0..80 {
        if u(x_end)? < params.lo * peak {
            break;
        }
        x_end *= 2.0;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..=params.samples {
        let x = x_end * i as f64 / params.samples as f64;
        let v = u(x)?;
        let r = v / peak;
        if r > params.lo && r < params.hi {
            xs.push(x);
            ys.push(v.ln());
        }
    }
    if xs.len() < params.min_points {
        return Ok(TailFit::Insufficient { points: xs.len() });
    }
    let n = xs.len() as f64;
    let my = ys.iter().sum::<f64>() / n;
    let mut best = (f64::INFINITY, f64::NAN);
    let steps = ((params.c_max - params.c_min) / params.c_step).round() as usize;
    for s in 0..=steps {
        let c = params.c_min + s as f64 * params.c_step;
        let p: Vec<f64> = xs.iter().map(|x| x.powf(c)).collect();
        let mp = p.iter().sum::<f64>() / n;
        let spp: f64 = p.iter().map(|v| (v - mp) * (v - mp)).sum();
        let spy: f64 = p.iter().zip(&ys).map(|(v, y)| (v - mp) * (y - my)).sum();
        let slope = spy / spp;
        let res: f64 = p
            .iter()
            .zip(&ys)
            .map(|(v, y)| {
                let e = y - my - slope * (v - mp);
                e * e
            })
            .sum();
        if res < best.0 {
            best = (res, c);
        }
    }
    Ok(TailFit::Fitted {
        c: best.1,
        residual: best.0,
        points: xs.len(),
        x_range: (xs[0], xs[xs.len() - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_for_half() {
        let t = TailAsymptote::new(0.5, 0.2);
        assert!((t.a + 2.0 / 3.0).abs() < 1e-15);
        assert!((t.c - 4.0 / 3.0).abs() < 1e-15);
        assert!((t.b - 0.4725).abs() < 1e-4, "{}", t.b);
        assert!((t.c_delta - 1.991).abs() < 1e-3, "{}", t.c_delta);
    }

    #[test]
    fn recovers_known_exponent() {
        let f = |x: f64| Ok(2.0 * (-3.0 * x.powf(1.6)).exp());
        let fit = fit_stretch_exponent(f, &TailFitParams::default()).unwrap();
        assert!((fit.exponent().unwrap() - 1.6).abs() < 2e-3, "{fit:?}");
    }

    #[test]
    fn gaussian_tail() {
        let t: f64 = 0.3;
        let g = |x: f64| Ok((-x * x / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt());
        let fit = fit_stretch_exponent(g, &TailFitParams::default()).unwrap();
        assert!((fit.exponent().unwrap() - 2.0).abs() < 0.1);
    }
}
