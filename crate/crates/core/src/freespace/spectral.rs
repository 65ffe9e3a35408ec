//! Self-calibrated check of the smoothing bound `|ũ(ξ,t)| ≤ c / (1 + b ξ² t^α)`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    /// Log-spaced ξ samples in `[xi_max · xi_span, xi_max]`; even indices
    /// train, odd indices test.
    pub samples: usize,
    pub xi_span: f64,
    pub slack: f64,
    /// Log grid for the bound constant `b`.
    pub b_min: f64,
    pub b_max: f64,
    pub b_count: usize,
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self {
            samples: 81,
            xi_span: 1e-3,
            slack: 0.1,
            b_min: 1e-4,
            b_max: 1e4,
            b_count: 161,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub c: f64,
    pub b: f64,
    pub violations: usize,
    pub tested: usize,
    /// `(ξ, ũ(ξ, t))` for every sample.
    pub modes: Vec<(f64, f64)>,
}

/// Fit `(c, b)` on the training modes and count test modes above the bound
/// by more than the slack. `power` is `t^α`.
pub fn fit_and_check(modes: &[(f64, f64)], power: f64, params: &SpectralParams) -> SpectralReport {
    let shape = |b: f64, xi: f64| 1.0 / (1.0 + b * xi * xi * power);
    let train: Vec<_> = modes.iter().step_by(2).copied().collect();
    let test: Vec<_> = modes.iter().skip(1).step_by(2).copied().collect();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..params.b_count {
        let f = i as f64 / (params.b_count - 1).max(1) as f64;
        let b = params.b_min * (params.b_max / params.b_min).powf(f);
        let c = train
            .iter()
            .map(|&(xi, u)| u.abs() / shape(b, xi))
            .fold(0.0, f64::max);
        let slack: f64 = train
            .iter()
            .map(|&(xi, u)| c * shape(b, xi) - u.abs())
            .sum();
        if slack < best.0 {
            best = (slack, c, b);
        }
    }
    let (_, c, b) = best;
    let violations = test
        .iter()
        .filter(|&&(xi, u)| u.abs() > (1.0 + params.slack) * c * shape(b, xi))
        .count();
    SpectralReport {
        c,
        b,
        violations,
        tested: test.len(),
        modes: modes.to_vec(),
    }
}
