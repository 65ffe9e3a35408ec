use memoryflow::memory_op::{c_coefficient, continuous_apply, polynomial_apply};
use memoryflow::{build_weights, KernelSpec, MemoryWeights};
use proptest::prelude::*;

fn sampled(w: &MemoryWeights, v: impl Fn(f64) -> f64, t: f64) -> f64 {
    let hist: Vec<f64> = (1..=w.m).map(|k| v(t - k as f64 * w.tau)).collect();
    w.apply(v(t), &hist).unwrap()
}

/// Least-squares slope of `log err` against `log tau`.
fn order(taus: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn spec_strategy() -> impl Strategy<Value = (KernelSpec, usize)> {
    (0.05f64..0.95, 0.05f64..3.0, 1usize..300, any::<bool>()).prop_map(|(a, d, m, caputo)| {
        let spec = if caputo {
            KernelSpec::truncated_caputo(a, d).unwrap()
        } else {
            KernelSpec::normalized_fractional(a, d).unwrap()
        };
        (spec, m)
    })
}

proptest! {
    #[test]
    fn constants_are_annihilated((spec, m) in spec_strategy(), c in -1e3f64..1e3) {
        let w = build_weights(&spec, spec.delta / m as f64).unwrap();
        let g = w.apply(c, &vec![c; m]).unwrap();
        prop_assert!(g.abs() <= 1e-12 * c.abs() * w.w0);
    }

    #[test]
    fn apply_is_linear((spec, m) in spec_strategy(), a in -10f64..10.0, b in -10f64..10.0, seed in any::<u64>()) {
        let w = build_weights(&spec, spec.delta / m as f64).unwrap();
        let mut x = seed;
        let mut next = || { x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5 };
        let (u0, v0) = (next(), next());
        let u: Vec<f64> = (0..m).map(|_| next()).collect();
        let v: Vec<f64> = (0..m).map(|_| next()).collect();
        let mix: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + b * q).collect();
        let lhs = w.apply(a * u0 + b * v0, &mix).unwrap();
        let rhs = a * w.apply(u0, &u).unwrap() + b * w.apply(v0, &v).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * w.w0 * (a.abs() + b.abs() + 1.0));
    }

    #[test]
    fn weights_are_positive((spec, m) in spec_strategy()) {
        let w = build_weights(&spec, spec.delta / m as f64).unwrap();
        prop_assert!(w.weights.iter().all(|&x| x > 0.0));
        prop_assert_eq!(w.w0, w.weights.iter().sum::<f64>());
    }

    // Σ w_k kτ = ∫ρ exactly, so linear trajectories see the kernel mass.
    #[test]
    fn linear_trajectory_sees_mass((spec, m) in spec_strategy(), b in -5f64..5.0, t in -2f64..2.0) {
        let w = build_weights(&spec, spec.delta / m as f64).unwrap();
        let g = sampled(&w, |s| b * s, t);
        prop_assert!((g - b * spec.mass()).abs() <= 1e-9 * (b.abs() * spec.mass()).max(1e-300) + 1e-12);
    }

    #[test]
    fn single_cell_weight_is_mass_over_tau(a in 0.05f64..0.95, d in 0.01f64..5.0) {
        let spec = KernelSpec::truncated_caputo(a, d).unwrap();
        let w = build_weights(&spec, d).unwrap();
        prop_assert!((w.weights[0] - spec.mass() / d).abs() <= 1e-12 * w.weights[0]);
    }
}

#[test]
fn consistency_order_for_smooth_trajectories() {
    let spec = KernelSpec::normalized_fractional(0.5, 1.0).unwrap();
    let t = 1.0;
    // trajectory and its difference quotient (v(t) - v(t-s))/s without cancellation
    type Case = (
        &'static str,
        Box<dyn Fn(f64) -> f64>,
        Box<dyn Fn(f64) -> f64>,
    );
    let cases: [Case; 3] = [
        (
            "t^2",
            Box::new(|x: f64| x * x),
            Box::new(move |s: f64| 2.0 * t - s),
        ),
        (
            "t^3",
            Box::new(|x: f64| x * x * x),
            Box::new(move |s: f64| 3.0 * t * t - 3.0 * t * s + s * s),
        ),
        (
            "sin",
            Box::new(f64::sin),
            Box::new(move |s: f64| 2.0 * (t - 0.5 * s).cos() * (0.5 * s).sin() / s),
        ),
    ];
    let taus: Vec<f64> = (0..5).map(|i| 1.0 / (32.0 * 2f64.powi(i))).collect();
    for (name, v, q) in &cases {
        let exact = continuous_apply(&spec, q).unwrap();
        let errs: Vec<f64> = taus
            .iter()
            .map(|&tau| (sampled(&build_weights(&spec, tau).unwrap(), v, t) - exact).abs())
            .collect();
        assert!(errs.windows(2).all(|e| e[1] < e[0]), "{name}: {errs:?}");
        let p = order(&taus, &errs);
        assert!(p >= 0.9, "{name}: order {p}");
    }
}

#[test]
fn quadrature_oracle_matches_closed_form_on_polynomials() {
    for (a, d) in [(0.3, 0.7), (0.5, 1.0), (0.9, 2.0)] {
        let spec = KernelSpec::normalized_fractional(a, d).unwrap();
        for t in [0.1, 1.0, 3.0] {
            let quad =
                continuous_apply(&spec, |s| -2.0 + 3.0 * t * t - 3.0 * t * s + s * s).unwrap();
            let poly = polynomial_apply(&spec, &[1.0, -2.0, 0.0, 1.0], t).unwrap();
            assert!(
                (quad - poly).abs() <= 1e-9 * poly.abs().max(1.0),
                "{a} {d} {t}: {quad} {poly}"
            );
        }
    }
}

#[test]
fn t_squared_has_the_analytic_value() {
    // 𝒢(t²) = 2t − first moment; for α = 0.5, δ = 1 that is 2 − 1/3 at t = 1
    let spec = KernelSpec::normalized_fractional(0.5, 1.0).unwrap();
    assert!((polynomial_apply(&spec, &[0.0, 0.0, 1.0], 1.0).unwrap() - 5.0 / 3.0).abs() < 1e-14);
}

#[test]
fn row_sum_approaches_c_coefficient() {
    let (a, d) = (0.75, 0.2);
    let tau = d / 2048.0;
    let w = build_weights(&KernelSpec::normalized_fractional(a, d).unwrap(), tau).unwrap();
    let ratio = w.w0 * tau.powf(a) / c_coefficient(a, d);
    assert!((ratio - 1.0).abs() <= 0.02, "{ratio}");
    // the finite sum stays below the series
    assert!(ratio < 1.0);
}

#[test]
fn c_coefficient_horizon_scaling() {
    for a in [0.1, 0.5, 0.75, 0.95] {
        for d in [0.05, 0.2, 1.0, 7.0] {
            let r = c_coefficient(a, 2.0 * d) / c_coefficient(a, d);
            assert!((r - 2f64.powf(a - 1.0)).abs() < 1e-12, "{a} {d} {r}");
        }
    }
}
