use memoryflow::walker::{
    arrival_density_check, build_pmf, l1_distance, lattice_reference, simulate, WaitPmf,
    WalkOutput, WalkerConfig,
};
use memoryflow::{build_weights, KernelSpec};

fn run(
    alpha: f64,
    delta: f64,
    tau: f64,
    particles: u64,
    seed: u64,
    times: Vec<f64>,
) -> (WaitPmf, WalkOutput) {
    let pmf = build_pmf(alpha, delta, tau).unwrap();
    let cfg = WalkerConfig::calibrated(alpha, delta, tau, particles, seed, times);
    let out = simulate(&cfg, &pmf).unwrap();
    (pmf, out)
}

/// Expected occupation probabilities on the lattice after `steps` steps,
/// from the arrival recursion: arrivals at step r come from arrivals at
/// r − k (probability p_{k−1}) followed by a ±1 jump, and a walker that
/// arrived k steps ago is still in place with probability ω_k.
fn expected_occupation(pmf: &WaitPmf, steps: usize) -> Vec<f64> {
    // one padding site on each side keeps the stencil inside the array
    let width = 2 * steps + 3;
    let mut eta = vec![vec![0.0; width]; steps + 1];
    eta[0][steps + 1] = 1.0;
    for r in 1..=steps {
        for k in 1..=pmf.m.min(r) {
            let p = pmf.p[k - 1];
            let (prev, cur) = eta.split_at_mut(r);
            let src = &prev[r - k];
            for x in 1..width - 1 {
                cur[0][x] += p * 0.5 * (src[x - 1] + src[x + 1]);
            }
        }
    }
    let mut u = vec![0.0; width];
    for k in 0..pmf.m.min(steps + 1) {
        for x in 0..width {
            u[x] += pmf.omega[k] * eta[steps - k][x];
        }
    }
    u
}

#[test]
fn single_particle_runs_repeat() {
    let (_, a) = run(0.75, 0.2, 0.2 / 50.0, 1, 99, vec![0.1, 0.4]);
    let (_, b) = run(0.75, 0.2, 0.2 / 50.0, 1, 99, vec![0.1, 0.4]);
    assert_eq!(a, b);
    let (_, c) = run(0.75, 0.2, 0.2 / 50.0, 1, 100, vec![0.1, 0.4]);
    assert_eq!(
        c.occupation
            .iter()
            .map(|o| o.iter().sum::<u64>())
            .collect::<Vec<_>>(),
        vec![1, 1]
    );
}

#[test]
fn worker_partition_does_not_change_results() {
    let pmf = build_pmf(0.75, 0.2, 0.2 / 40.0).unwrap();
    let mut cfg = WalkerConfig::calibrated(0.75, 0.2, 0.2 / 40.0, 10_007, 5, vec![0.1, 0.3]);
    cfg.track_arrivals = true;
    let base = simulate(&cfg, &pmf).unwrap();
    for workers in [2, 3, 7, 64] {
        cfg.workers = workers;
        let other = simulate(&cfg, &pmf).unwrap();
        assert_eq!(other.occupation, base.occupation, "{workers}");
        assert_eq!(other.moments, base.moments);
        assert_eq!(other.reconstructed, base.reconstructed);
    }
}

#[test]
fn pmf_ratios_match_the_memory_weights() {
    for (alpha, m) in [(0.3, 10), (0.75, 1000), (0.5, 10_000)] {
        let delta = 0.2;
        let tau = delta / m as f64;
        let pmf = build_pmf(alpha, delta, tau).unwrap();
        let w = build_weights(
            &KernelSpec::normalized_fractional(alpha, delta).unwrap(),
            tau,
        )
        .unwrap();
        for k in 0..m {
            let a = pmf.p[k] / pmf.p[0];
            let b = w.weights[k] / w.weights[0];
            assert!((a - b).abs() <= 1e-12 * b, "{alpha} {m} {k}: {a} {b}");
        }
    }
}

#[test]
fn histograms_match_the_exact_expectation() {
    // short memory keeps the recursion small; N large enough for a sharp check
    let (alpha, delta, tau) = (0.75, 0.2, 0.2 / 8.0);
    let steps = 12;
    let n = 400_000u64;
    let (pmf, out) = run(alpha, delta, tau, n, 17, vec![steps as f64 * tau]);
    let expect = expected_occupation(&pmf, steps);
    let counts = &out.occupation[0];
    for (x, &p) in expect.iter().enumerate() {
        let site = x as i64 - steps as i64 - 1;
        let idx = site - out.offset;
        let c = if idx >= 0 && (idx as usize) < counts.len() {
            counts[idx as usize]
        } else {
            0
        };
        let freq = c as f64 / n as f64;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (freq - p).abs() <= 5.0 * sd + 1e-12,
            "site {site}: {freq} vs {p}"
        );
    }
}

#[test]
fn histogram_is_symmetric_within_noise() {
    let n = 200_000u64;
    let (_, out) = run(0.75, 0.2, 0.2 / 100.0, n, 3, vec![0.1, 0.4]);
    for occ in &out.occupation {
        let site = |j: i64| {
            let i = j - out.offset;
            if i >= 0 && (i as usize) < occ.len() {
                occ[i as usize] as f64
            } else {
                0.0
            }
        };
        let reach = occ.len() as i64 + out.offset.abs();
        let (mut dist, mut bound) = (0.0, 0.0);
        for j in 1..=reach {
            let (a, b) = (site(j), site(-j));
            let p = 0.5 * (a + b) / n as f64;
            dist += (a - b).abs() / n as f64;
            // |n_j − n_{−j}| has variance about 2Np_j
            bound += 3.0 * (2.0 * p / n as f64).sqrt();
        }
        assert!(dist <= bound, "{dist} > {bound}");
    }
}

#[test]
fn mean_position_is_zero() {
    let (_, out) = run(0.75, 0.2, 0.2 / 100.0, 100_000, 11, vec![0.1, 1.0, 3.0]);
    for j in 0..out.occupation.len() {
        let (m, se) = out.mean_position(j);
        assert!(m.abs() <= 3.0 * se, "{j}: {m} ± {se}");
    }
}

#[test]
fn late_msd_grows_like_the_scalar_problem() {
    // the late slope of the scalar MSD problem is 2 at unit diffusivity
    let (_, out) = run(0.75, 0.2, 0.2 / 100.0, 100_000, 23, vec![2.0, 4.0]);
    let (a, _) = out.msd(0);
    let (b, _) = out.msd(1);
    let slope = (b - a) / 2.0;
    assert!((slope / 2.0 - 1.0).abs() <= 0.05, "{slope}");
}

#[test]
fn msd_crosses_over() {
    let (alpha, delta) = (0.75, 0.2);
    let n = 1_000_000;
    // early window (0, δ/10) on a fine step
    let (_, early) = run(
        alpha,
        delta,
        delta / 1600.0,
        n,
        29,
        vec![delta / 100.0, delta / 10.0],
    );
    let s = (early.msd(1).0 / early.msd(0).0).ln() / 10f64.ln();
    assert!((alpha - 0.15..=alpha + 0.15).contains(&s), "early {s}");
    // late window (10δ, T)
    let (_, late) = run(
        alpha,
        delta,
        delta / 100.0,
        n / 10,
        31,
        vec![10.0 * delta, 40.0 * delta],
    );
    let s = (late.msd(1).0 / late.msd(0).0).ln() / 4f64.ln();
    assert!((0.9..=1.1).contains(&s), "late {s}");
}

#[test]
fn arrival_reconstruction_matches_occupation() {
    let (alpha, delta) = (0.75, 0.2);
    let tau = delta / 100.0;
    let check = |n: u64| {
        let pmf = build_pmf(alpha, delta, tau).unwrap();
        let mut cfg = WalkerConfig::calibrated(alpha, delta, tau, n, 41, vec![0.2]);
        cfg.track_arrivals = true;
        cfg.workers = 4;
        arrival_density_check(&simulate(&cfg, &pmf).unwrap()).unwrap()
    };
    let fine = check(1_000_000);
    assert!(fine <= 0.02, "{fine}");
    let coarse = check(250_000);
    let ratio = coarse / fine;
    // quartering N doubles the noise; allow for the spread of one realization
    assert!((1.6..=2.5).contains(&ratio), "{coarse} / {fine} = {ratio}");
}

#[test]
fn early_record_has_no_history_terms() {
    let (alpha, delta, tau) = (0.75, 0.2, 0.2 / 100.0);
    let pmf = build_pmf(alpha, delta, tau).unwrap();
    let mut cfg = WalkerConfig::calibrated(alpha, delta, tau, 1000, 1, vec![0.0]);
    cfg.track_arrivals = true;
    assert_eq!(
        arrival_density_check(&simulate(&cfg, &pmf).unwrap()).unwrap(),
        0.0
    );
}

#[test]
fn histogram_tracks_the_finite_difference_solution() {
    let (alpha, delta) = (0.75, 0.2);
    let tau = delta / 400.0;
    let times = vec![0.1, 0.2, 0.3, 0.4];
    let pmf = build_pmf(alpha, delta, tau).unwrap();
    let mut cfg = WalkerConfig::calibrated(alpha, delta, tau, 200_000, 7, times);
    cfg.workers = 4;
    let out = simulate(&cfg, &pmf).unwrap();
    let reference = lattice_reference(&cfg).unwrap();
    for (j, r) in reference.iter().enumerate() {
        let d = l1_distance(&out, j, r);
        assert!(d <= 0.05, "t={}: {d}", out.times()[j]);
    }
}
