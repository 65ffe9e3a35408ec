//! The discrete nonlocal time operator: quadrature weights over the memory
//! window, a fixed-capacity history ring, and continuous reference values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::quadrature;
use crate::special::power_increment;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryWeights {
    pub tau: f64,
    pub m: usize,
    /// `weights[k-1]` is `w_k`.
    pub weights: Vec<f64>,
    pub w0: f64,
}

/// Memory depth `δ/τ`, rejecting steps that do not divide the horizon.
pub fn memory_depth(delta: f64, tau: f64) -> Result<usize> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Config(format!("tau must be positive, got {tau}")));
    }
    let ratio = delta / tau;
    let m = ratio.round();
    if m < 1.0 || (ratio - m).abs() > 1e-12 * ratio {
        let m_near = m.max(1.0);
        return Err(Error::Config(format!(
            "tau = {tau} does not divide delta = {delta} (delta/tau = {ratio}); nearest admissible tau is {}",
            delta / m_near
        )));
    }
    Ok(m as usize)
}

/// `w_k = (1/(kτ)) ∫_{(k-1)τ}^{kτ} ρ(s) ds`, k = 1..M.
pub fn build_weights(spec: &KernelSpec, tau: f64) -> Result<MemoryWeights> {
    let m = memory_depth(spec.delta, tau)?;
    let weights: Vec<f64> = match spec.power_law() {
        Some((c, a)) => {
            let beta = 1.0 - a;
            let pre = c * tau.powf(beta) / beta;
            (1..=m)
                .map(|k| pre * power_increment(k, beta) / (k as f64 * tau))
                .collect()
        }
        None => {
            debug_assert_eq!(spec.family, KernelFamily::Tabulated);
            (1..=m)
                .map(|k| {
                    let lo = (k - 1) as f64 * tau;
                    let hi = if k == m { spec.delta } else { k as f64 * tau };
                    table_integral(spec, lo, hi) / (k as f64 * tau)
                })
                .collect()
        }
    };
    let w0 = weights.iter().sum();
    Ok(MemoryWeights {
        tau,
        m,
        weights,
        w0,
    })
}

/// Exact integral of the piecewise-linear tabulated density over `[a, b]`.
fn table_integral(spec: &KernelSpec, a: f64, b: f64) -> f64 {
    let table = spec.table.as_deref().expect("tabulated");
    let mut knots = vec![a];
    knots.extend(table.iter().map(|p| p.0).filter(|&s| s > a && s < b));
    knots.push(b);
    let rho = |s: f64| {
        if s <= 0.0 {
            table[0].1 * spec.scale
        } else {
            spec.density(s.min(spec.delta * (1.0 - 1e-15)))
                .unwrap_or(0.0)
        }
    };
    knots
        .windows(2)
        .map(|p| 0.5 * (p[1] - p[0]) * (rho(p[0]) + rho(p[1])))
        .sum()
}

impl MemoryWeights {
    /// `W0·current − Σ w_k·history[k-1]`, history most recent first.
    pub fn apply(&self, current: f64, history: &[f64]) -> Result<f64> {
        if history.len() != self.m {
            return Err(Error::Contract(format!(
                "history has {} entries, operator depth is {}",
                history.len(),
                self.m
            )));
        }
        Ok(self.w0 * current - self.dot(history.iter().copied()))
    }

    /// `Σ w_k h_k` over a most-recent-first sequence.
    pub fn dot(&self, history: impl Iterator<Item = f64>) -> f64 {
        self.weights.iter().zip(history).map(|(w, h)| w * h).sum()
    }
}

/// Fixed-capacity ring of past values, indexed most recent first.
#[derive(Clone, Debug)]
pub struct HistoryRing<T> {
    slots: Vec<T>,
    head: usize,
}

impl<T: Clone> HistoryRing<T> {
    /// Ring filled from `f(k)` = value at `t - kτ`, k = 1..capacity.
    pub fn from_fn(capacity: usize, mut f: impl FnMut(usize) -> T) -> Self {
        assert!(capacity >= 1, "history ring capacity must be positive");
        Self {
            slots: (1..=capacity).map(&mut f).collect(),
            head: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// Value at lag `k` (1-based).
    pub fn lag(&self, k: usize) -> &T {
        assert!(k >= 1 && k <= self.slots.len(), "lag {k} out of range");
        &self.slots[(self.head + k - 1) % self.slots.len()]
    }

    /// Insert the newest value, discarding the oldest.
    pub fn push(&mut self, value: T) {
        let n = self.slots.len();
        self.head = (self.head + n - 1) % n;
        self.slots[self.head] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        let (a, b) = self.slots.split_at(self.head);
        b.iter().chain(a.iter())
    }
}

/// `c_{δ,α} = δ^{α-1} Σ_{k≥1} (k^{1-α} - (k-1)^{1-α})/k`.
pub fn c_coefficient(alpha: f64, delta: f64) -> f64 {
    const K: usize = 1000;
    let beta = 1.0 - alpha;
    let head: f64 = (1..=K)
        .rev()
        .map(|k| power_increment(k, beta) / k as f64)
        .sum();
    // k^{β}(1 - (1 - 1/k)^β)/k = Σ_j c_j k^{-(α+j)}, c_j = -binom(β,j)(-1)^j
    let mut tail = 0.0;
    let mut binom = 1.0;
    for j in 1..=8 {
        binom *= (beta - (j - 1) as f64) / j as f64;
        let cj = -binom * if j % 2 == 0 { 1.0 } else { -1.0 };
        tail += cj * zeta_tail(alpha + j as f64, K as f64);
    }
    delta.powf(alpha - 1.0) * (head + tail)
}

/// `Σ_{k>K} k^{-s}` by Euler–Maclaurin.
fn zeta_tail(s: f64, k: f64) -> f64 {
    let f = k.powf(-s);
    let d1 = -s * f / k;
    let d3 = -s * (s + 1.0) * (s + 2.0) * f / k.powi(3);
    let d5 = -s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * f / k.powi(5);
    k.powf(1.0 - s) / (s - 1.0) - 0.5 * f - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0
}

/// Continuous operator `∫_0^δ q(s) ρ(s) ds` by adaptive quadrature, where
/// `q(s) = (v(t) - v(t-s))/s` is supplied by the caller. Evaluating the raw
/// difference loses all digits as `s → 0` and the `s^{-α}` weight amplifies
/// that noise, so `q` should be written in a cancellation-free form.
pub fn continuous_apply(spec: &KernelSpec, q: impl Fn(f64) -> f64) -> Result<f64> {
    // s = δ u^4 smooths the s^{-α} endpoint behaviour
    let d = spec.delta;
    let f = |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = d * u.powi(4);
        let rho = spec.density(s).unwrap_or(0.0);
        Complex64::new(q(s) * rho * 4.0 * d * u.powi(3), 0.0)
    };
    Ok(quadrature::integrate(f, 0.0, 1.0, 1e-12, 1e-15)?.re)
}

/// Continuous operator applied to the polynomial `Σ coeffs[j] t^j`, exactly,
/// for the power-law families.
pub fn polynomial_apply(spec: &KernelSpec, coeffs: &[f64], t: f64) -> Result<f64> {
    let (c, a) = spec.power_law().ok_or_else(|| {
        Error::Unsupported("exact polynomial operator needs a power-law kernel".into())
    })?;
    // (v(t) - v(t-s))/s = Σ_i q_i s^i ; moments ∫ s^i ρ = C δ^{i+1-α}/(i+1-α)
    let n = coeffs.len();
    let mut q = vec![0.0; n.saturating_sub(1)];
    for (j, &cj) in coeffs.iter().enumerate().skip(1) {
        // t^j - (t-s)^j = -Σ_{i=1}^{j} binom(j,i) t^{j-i} (-s)^i
        let mut binom = 1.0;
        for i in 1..=j {
            binom *= (j - i + 1) as f64 / i as f64;
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            q[i - 1] += cj * sign * binom * t.powi((j - i) as i32);
        }
    }
    Ok(q.iter()
        .enumerate()
        .map(|(i, qi)| {
            let p = i as f64 + 1.0 - a;
            qi * c * spec.delta.powf(p) / p
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nf(a: f64, d: f64) -> KernelSpec {
        KernelSpec::normalized_fractional(a, d).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w = build_weights(&nf(0.5, 1.0), 0.01).unwrap();
        assert_eq!(w.m, 100);
        assert_relative_eq!(w.weights[0], 10.0, max_relative = 1e-14);
        let w = build_weights(&nf(0.5, 1.0), 0.5).unwrap();
        assert_eq!(w.m, 2);
        // w_1 = τ^{-α} = √2 here
        assert_relative_eq!(w.weights[0], 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(w.weights[1], 1.0 - 0.5f64.sqrt(), max_relative = 1e-14);
        assert_eq!(w.w0, w.weights.iter().sum::<f64>());
    }

    #[test]
    fn weights_match_direct_quadrature() {
        let spec = KernelSpec::truncated_caputo(0.35, 0.6).unwrap();
        let tau = 0.6 / 40.0;
        let w = build_weights(&spec, tau).unwrap();
        for k in [1usize, 2, 7, 40] {
            let lo = (k - 1) as f64 * tau;
            let hi = k as f64 * tau;
            let f = |u: f64| {
                // s = lo + (hi-lo) u^4 tames the k = 1 singularity
                let s = lo + (hi - lo) * u.powi(4);
                let r = if s > 0.0 {
                    spec.density(s.min(0.6 * (1.0 - 1e-16))).unwrap()
                } else {
                    0.0
                };
                Complex64::new(r * 4.0 * (hi - lo) * u.powi(3), 0.0)
            };
            let v = quadrature::integrate(f, 0.0, 1.0, 1e-13, 0.0).unwrap().re / hi;
            assert_relative_eq!(w.weights[k - 1], v, max_relative = 1e-10);
        }
    }

    #[test]
    fn rejects_non_dividing_step() {
        let err = build_weights(&nf(0.5, 1.0), 0.3).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("0.3333333333333333"), "{msg}");
        assert!(build_weights(&nf(0.5, 1.0), 2.0).is_err());
    }

    #[test]
    fn apply_annihilates_constants_and_checks_length() {
        let w = build_weights(&nf(0.3, 0.2), 0.2 / 64.0).unwrap();
        let h = vec![3.5; 64];
        assert!(w.apply(3.5, &h).unwrap().abs() < 1e-9 * w.w0);
        assert!(matches!(w.apply(1.0, &h[..10]), Err(Error::Contract(_))));
    }

    #[test]
    fn single_cell_is_backward_difference() {
        let spec = KernelSpec::truncated_caputo(0.4, 0.1).unwrap();
        let w = build_weights(&spec, 0.1).unwrap();
        assert_relative_eq!(w.weights[0], spec.mass() / 0.1, max_relative = 1e-14);
    }

    #[test]
    fn ring_order() {
        let mut r = HistoryRing::from_fn(3, |k| k as f64);
        assert_eq!(r.iter().copied().collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        r.push(0.0);
        assert_eq!(r.iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert_eq!(*r.lag(3), 2.0);
        r.push(-1.0);
        r.push(-2.0);
        r.push(-3.0);
        assert_eq!(
            r.iter().copied().collect::<Vec<_>>(),
            vec![-3.0, -2.0, -1.0]
        );
    }

    #[test]
    fn c_coefficient_against_brute_force() {
        // independent route: direct sum to 10^7 plus integral tail estimate
        for &alpha in &[0.2, 0.5, 0.75] {
            let beta = 1.0 - alpha;
            let n = 10_000_000usize;
            let mut s = 0.0;
            for k in (1..=n).rev() {
                let kf = k as f64;
                s += (kf.powf(beta) - (kf - 1.0).powf(beta)) / kf;
            }
            let nf_ = n as f64;
            s += beta * nf_.powf(-alpha) / alpha - 0.5 * beta * nf_.powf(-1.0 - alpha);
            assert_relative_eq!(c_coefficient(alpha, 1.0), s, max_relative = 1e-9);
        }
    }

    #[test]
    fn c_coefficient_examples() {
        let c = c_coefficient(0.5, 1.0);
        assert!(c > 1.0);
        let r = c_coefficient(0.3, 0.4) / c_coefficient(0.3, 0.2);
        assert_relative_eq!(r, 2f64.powf(-0.7), max_relative = 1e-14);
        let w = build_weights(&nf(0.75, 0.2), 0.2 / 2048.0).unwrap();
        let ratio = w.w0 * w.tau.powf(0.75) / c_coefficient(0.75, 0.2);
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn polynomial_and_quadrature_routes_agree() {
        let spec = nf(0.5, 1.0);
        let exact = polynomial_apply(&spec, &[0.0, 0.0, 1.0], 1.0).unwrap();
        assert_relative_eq!(exact, 2.0 - 1.0 / 3.0, max_relative = 1e-14);
        let spec = KernelSpec::truncated_caputo(0.3, 0.7).unwrap();
        let coeffs = [1.0, -2.0, 0.5, 3.0];
        let t = 1.3;
        // (v(t) - v(t-s))/s for v = 1 - 2t + t²/2 + 3t³, expanded in s
        let q = |s: f64| -2.0 + 0.5 * (2.0 * t - s) + 3.0 * (3.0 * t * t - 3.0 * t * s + s * s);
        let a = polynomial_apply(&spec, &coeffs, t).unwrap();
        let b = continuous_apply(&spec, q).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }
}
