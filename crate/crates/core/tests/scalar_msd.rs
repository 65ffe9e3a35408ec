use memoryflow::scalar_msd::{
    crossover_time, local_slope, moving_average, restart_history, solve_scalar, Crossover,
    HistorySignal, TimeSeries,
};
use memoryflow::{build_weights, KernelSpec};
use proptest::prelude::*;

fn run(alpha: f64, delta: f64, m: usize, history: HistorySignal, t_end: f64) -> TimeSeries {
    let spec = KernelSpec::normalized_fractional(alpha, delta).unwrap();
    let w = build_weights(&spec, delta / m as f64).unwrap();
    solve_scalar(&w, &history, |_| 2.0, t_end).unwrap()
}

/// Signs of the forward differences with runs collapsed: `+-+` etc.
fn sign_pattern(values: &[f64]) -> String {
    let mut s = String::new();
    for d in values.windows(2).map(|p| p[1] - p[0]) {
        let c = if d > 0.0 {
            '+'
        } else if d < 0.0 {
            '-'
        } else {
            '0'
        };
        if !s.ends_with(c) {
            s.push(c);
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_history_is_exact(alpha in 0.05f64..0.95, delta in 0.05f64..2.0, m in 1usize..200, k in -3f64..3.0, caputo in any::<bool>()) {
        let spec = if caputo {
            KernelSpec::truncated_caputo(alpha, delta).unwrap()
        } else {
            KernelSpec::normalized_fractional(alpha, delta).unwrap()
        };
        let w = build_weights(&spec, delta / m as f64).unwrap();
        let rhs = 2.0 * k * spec.mass();
        let s = solve_scalar(&w, &HistorySignal::AffineScaled(k), |_| rhs, 3.0 * delta).unwrap();
        for (n, v) in s.values.iter().enumerate() {
            let exact = k * (1.0 + 2.0 * s.time(n));
            prop_assert!((v - exact).abs() <= 1e-10 * exact.abs().max(1e-300) + 1e-300, "n={} {} {}", n, v, exact);
        }
    }

    #[test]
    fn zero_history_stays_positive(alpha in 0.05f64..0.95, delta in 0.05f64..2.0, m in 1usize..100) {
        let s = run(alpha, delta, m, HistorySignal::Zero, 4.0 * delta);
        prop_assert!(s.values.iter().all(|&v| v > 0.0));
    }
}

#[test]
fn small_slopes_keep_increasing() {
    for k in [0.25, 0.5, 1.0] {
        for (alpha, delta) in [(0.2, 0.5), (0.5, 0.2), (0.8, 1.0)] {
            let s = run(
                alpha,
                delta,
                64,
                HistorySignal::AffineScaled(k),
                20.0 * delta,
            );
            assert_eq!(sign_pattern(&s.values), "+", "k={k} alpha={alpha}");
        }
    }
}

#[test]
fn late_growth_is_two_per_unit_time() {
    let (alpha, delta) = (0.2, 0.5);
    let s = run(alpha, delta, 128, HistorySignal::Zero, 150.0 * delta);
    let start = (100.0 * delta / s.tau).round() as usize;
    for p in s.values[start..].windows(2) {
        let d = p[1] - p[0];
        assert!((d - 2.0 * s.tau).abs() <= 0.01 * 2.0 * s.tau, "{d}");
    }
}

#[test]
fn history_data_shapes() {
    let (alpha, delta) = (0.2, 0.5);
    let g1 = run(
        alpha,
        delta,
        128,
        HistorySignal::AffineScaled(5.0),
        20.0 * delta,
    );
    let g2 = run(
        alpha,
        delta,
        128,
        HistorySignal::AffineScaled(0.5),
        20.0 * delta,
    );
    let g3 = run(
        alpha,
        delta,
        128,
        HistorySignal::default_step(delta),
        20.0 * delta,
    );
    assert_eq!(sign_pattern(&g1.values), "-+");
    assert_eq!(sign_pattern(&g2.values), "+");
    assert_eq!(sign_pattern(&g3.values), "+-+");
}

#[test]
fn crossover_sits_near_the_horizon() {
    let (alpha, delta) = (0.2, 0.5);
    let s = run(alpha, delta, 128, HistorySignal::Zero, 200.0 * delta);
    match crossover_time(&s, alpha) {
        Crossover::At(t) => assert!((delta / 10.0..=10.0 * delta).contains(&t), "{t}"),
        Crossover::NotDetected => panic!("no crossover"),
    }
    let slope = moving_average(&local_slope(&s), 5);
    let late = (100.0 * delta / s.tau).round() as usize;
    for a in slope[late..].iter().flatten() {
        assert!((a - 1.0).abs() <= 0.05, "{a}");
    }
}

#[test]
fn early_slope_matches_alpha_on_a_fine_window() {
    // τ = δ/10⁵ over t ≤ δ/10³ is only 100 steps
    let (alpha, delta) = (0.2, 0.5);
    let s = run(alpha, delta, 100_000, HistorySignal::Zero, delta / 1000.0);
    let slope = moving_average(&local_slope(&s), 5);
    let n = (delta / 1e4 / s.tau).round() as usize;
    let a = slope[n].unwrap();
    assert!((a - alpha).abs() <= 0.05, "{a}");
}

#[test]
fn restart_reproduces_the_single_run() {
    let (alpha, delta) = (0.5, 0.2);
    let full = run(alpha, delta, 40, HistorySignal::Zero, 3.0 * delta);
    let head = run(alpha, delta, 40, HistorySignal::Zero, 1.5 * delta);
    let spec = KernelSpec::normalized_fractional(alpha, delta).unwrap();
    let w = build_weights(&spec, delta / 40.0).unwrap();
    let tail = solve_scalar(&w, &restart_history(&head), |_| 2.0, 1.5 * delta - w.tau).unwrap();
    let offset = head.values.len();
    for (n, v) in tail.values.iter().enumerate() {
        let r = full.values[offset + n];
        assert!((v - r).abs() <= 1e-12 * r, "{n}: {v} {r}");
    }
}
