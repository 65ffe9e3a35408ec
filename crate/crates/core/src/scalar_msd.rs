//! Scalar nonlocal initial-value problem `𝒢 m = f` with prescribed history:
//! mean-square-displacement trajectories and crossover diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory_op::{HistoryRing, MemoryWeights};

/// Data on the pre-initial interval `(-δ, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HistorySignal {
    Zero,
    /// `k (1 + 2t)`.
    AffineScaled(f64),
    /// `height` on `[t_on, t_off]`, zero elsewhere.
    Step {
        height: f64,
        t_on: f64,
        t_off: f64,
    },
    /// Linear interpolation through `(t, value)` pairs sorted by `t`.
    Tabulated(Vec<(f64, f64)>),
}

impl HistorySignal {
    /// The step datum with its default placement on `[-δ, -δ/2]`.
    pub fn default_step(delta: f64) -> Self {
        HistorySignal::Step {
            height: 10.0,
            t_on: -delta,
            t_off: -0.5 * delta,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            HistorySignal::Zero => 0.0,
            HistorySignal::AffineScaled(k) => k * (1.0 + 2.0 * t),
            HistorySignal::Step {
                height,
                t_on,
                t_off,
            } => {
                // half-step slack so grid nodes at the end points count as inside
                let eps = 1e-12 * (t_on.abs() + t_off.abs());
                if t >= t_on - eps && t <= t_off + eps {
                    *height
                } else {
                    0.0
                }
            }
            HistorySignal::Tabulated(pts) => {
                let i = pts.partition_point(|p| p.0 < t);
                if i == 0 {
                    pts[0].1
                } else if i >= pts.len() {
                    pts[pts.len() - 1].1
                } else {
                    let (t0, v0) = pts[i - 1];
                    let (t1, v1) = pts[i];
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            HistorySignal::Zero => "zero".into(),
            HistorySignal::AffineScaled(k) => format!("affine:{k}"),
            HistorySignal::Step {
                height,
                t_on,
                t_off,
            } => format!("step:{height},{t_on},{t_off}"),
            HistorySignal::Tabulated(p) => format!("tabulated:{}", p.len()),
        }
    }
}

/// Uniformly sampled trajectory `values[n] = m(t0 + nτ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub tau: f64,
    pub t0: f64,
    pub values: Vec<f64>,
    pub alpha: f64,
    pub delta: f64,
    pub history: String,
}

impl TimeSeries {
    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.tau
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|n| self.time(n))
    }

    /// Value at the grid node nearest to `t`.
    pub fn at(&self, t: f64) -> Option<f64> {
        let n = ((t - self.t0) / self.tau).round();
        if n < 0.0 {
            return None;
        }
        self.values.get(n as usize).copied()
    }
}

/// March `m^n = (f(t_n) + Σ w_k m^{n-k}) / W0` for `t_n = nτ ≤ t_end`.
pub fn solve_scalar(
    w: &MemoryWeights,
    history: &HistorySignal,
    rhs: impl Fn(f64) -> f64,
    t_end: f64,
) -> Result<TimeSeries> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!(
            "horizon T must be positive, got {t_end}"
        )));
    }
    let tau = w.tau;
    let steps = (t_end / tau + 1e-9).floor() as usize;
    let mut ring = HistoryRing::from_fn(w.m, |k| history.value(-(k as f64) * tau));
    let mut values = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        let t = n as f64 * tau;
        let m = (rhs(t) + w.dot(ring.iter().copied())) / w.w0;
        if !m.is_finite() {
            return Err(Error::Numerical(format!("non-finite value at t = {t}")));
        }
        values.push(m);
        ring.push(m);
    }
    Ok(TimeSeries {
        tau,
        t0: 0.0,
        values,
        alpha: f64::NAN,
        delta: w.m as f64 * tau,
        history: history.label(),
    })
}

/// Log–log slope on interior nodes; `None` where undefined (end points,
/// `t_{n-1} ≤ 0`, or nonpositive values).
#[allow(clippy::needless_range_loop)]
pub fn local_slope(series: &TimeSeries) -> Vec<Option<f64>> {
    let n = series.values.len();
    let mut out = vec![None; n];
    for i in 1..n.saturating_sub(1) {
        let (ta, tb) = (series.time(i - 1), series.time(i + 1));
        let (ma, mb) = (series.values[i - 1], series.values[i + 1]);
        if ta > 0.0 && ma > 0.0 && mb > 0.0 {
            out[i] = Some((mb.ln() - ma.ln()) / (tb.ln() - ta.ln()));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Crossover {
    At(f64),
    NotDetected,
}

/// Smoothing window and threshold used by [`crossover_time`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossoverParams {
    pub window: usize,
    /// Threshold as a fraction between α (0) and 1 (1).
    pub level: f64,
}

impl Default for CrossoverParams {
    fn default() -> Self {
        Self {
            window: 5,
            level: 0.5,
        }
    }
}

/// First upward crossing of the smoothed local slope through `(α+1)/2`.
pub fn crossover_time(series: &TimeSeries, alpha: f64) -> Crossover {
    crossover_time_with(series, alpha, CrossoverParams::default())
}

pub fn crossover_time_with(series: &TimeSeries, alpha: f64, params: CrossoverParams) -> Crossover {
    let slope = local_slope(series);
    let smooth = moving_average(&slope, params.window.max(1));
    let thr = alpha + params.level * (1.0 - alpha);
    for i in 1..smooth.len() {
        if let (Some(a), Some(b)) = (smooth[i - 1], smooth[i]) {
            if a < thr && b >= thr {
                let frac = (thr - a) / (b - a);
                return Crossover::At(series.time(i - 1) + frac * series.tau);
            }
        }
    }
    Crossover::NotDetected
}

/// Centered moving average; `None` unless the full window is defined.
pub fn moving_average(x: &[Option<f64>], window: usize) -> Vec<Option<f64>> {
    let half = window / 2;
    (0..x.len())
        .map(|i| {
            if i < half || i + half >= x.len() {
                return None;
            }
            let mut acc = 0.0;
            for v in &x[i - half..=i + half] {
                acc += (*v)?;
            }
            Some(acc / (2 * half + 1) as f64)
        })
        .collect()
}

/// Small-time MSD law with the constant as printed in the source model
/// description, `sin(απ) δ^{1-α} / ((1-α)π) · t^α`.
pub fn early_asymptote_printed(alpha: f64, delta: f64, t: f64) -> f64 {
    (alpha * std::f64::consts::PI).sin() * delta.powf(1.0 - alpha)
        / ((1.0 - alpha) * std::f64::consts::PI)
        * t.powf(alpha)
}

/// Leading small-time MSD term obtained from `m̂ = 2/(z K(z))` with
/// `K(z) ~ A z^α`: twice [`early_asymptote_printed`].
pub fn early_asymptote(alpha: f64, delta: f64, t: f64) -> f64 {
    2.0 * early_asymptote_printed(alpha, delta, t)
}

/// History for continuing `series` one step after its last node, with time
/// shifted so the continuation starts at t = 0.
pub fn restart_history(series: &TimeSeries) -> HistorySignal {
    let n = series.values.len();
    let depth = ((series.delta / series.tau).round() as usize).min(n);
    let pts = (1..=depth)
        .rev()
        .map(|k| (-(k as f64) * series.tau, series.values[n - k]))
        .collect();
    HistorySignal::Tabulated(pts)
}
