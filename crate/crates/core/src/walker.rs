//! Lattice random walk with trapping: waiting times of `kτ` with a
//! truncated power-law pmf, then a `±h` jump.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_solver::{solve, Grid, HistoryGenerator, ModelKind, SolveParams};
use crate::kernel::KernelSpec;
use crate::memory_op::{c_coefficient, memory_depth};
use crate::special::power_increment;

/// Waiting-time distribution: `p[k-1]` is the probability of waiting exactly
/// `kτ`; `omega[k]` the probability of waiting longer than `kτ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaitPmf {
    pub tau: f64,
    pub m: usize,
    pub p: Vec<f64>,
    /// `omega[0..=M]`, `omega[0] = 1`.
    pub omega: Vec<f64>,
    cdf: Vec<f64>,
    /// `guide[i]` is the first index with `cdf > i / guide.len()`.
    guide: Vec<u32>,
}

pub fn build_pmf(alpha: f64, delta: f64, tau: f64) -> Result<WaitPmf> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let m = memory_depth(delta, tau)?;
    let beta = 1.0 - alpha;
    let raw: Vec<f64> = (1..=m)
        .map(|k| power_increment(k, beta) / k as f64)
        .collect();
    let total: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let mut omega = Vec::with_capacity(m + 1);
    let mut cdf = Vec::with_capacity(m);
    let mut acc = 0.0;
    omega.push(1.0);
    for &pk in &p {
        acc += pk;
        cdf.push(acc);
        omega.push(1.0 - acc);
    }
    if omega[m].abs() > 1e-12 {
        return Err(Error::Numerical(format!(
            "waiting-time pmf does not sum to one ({acc})"
        )));
    }
    omega[m] = 0.0;
    cdf[m - 1] = 1.0;
    let g = 4 * m;
    let guide = (0..g)
        .map(|i| cdf.partition_point(|&c| c <= i as f64 / g as f64) as u32)
        .collect();
    Ok(WaitPmf {
        tau,
        m,
        p,
        omega,
        cdf,
        guide,
    })
}

impl WaitPmf {
    /// Waiting time in steps for a uniform draw `u ∈ [0, 1)`.
    pub fn sample_steps(&self, u: f64) -> u64 {
        let mut k =
            self.guide[((u * self.guide.len() as f64) as usize).min(self.guide.len() - 1)] as usize;
        while self.cdf[k] <= u {
            k += 1;
        }
        k as u64 + 1
    }

    pub fn mean_steps(&self) -> f64 {
        self.p
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkerConfig {
    pub alpha: f64,
    pub delta: f64,
    pub tau: f64,
    pub h: f64,
    pub particles: u64,
    pub seed: u64,
    pub record_times: Vec<f64>,
    /// Number of disjoint particle ranges; does not change the result.
    pub workers: usize,
    /// Also reconstruct the occupation from arrival events.
    pub track_arrivals: bool,
}

/// Lattice spacing `h` with `c_{δ,α} h² / (2 τ^α) = D`.
pub fn calibrated_h(alpha: f64, delta: f64, tau: f64, diffusivity: f64) -> f64 {
    (2.0 * diffusivity * tau.powf(alpha) / c_coefficient(alpha, delta)).sqrt()
}

impl WalkerConfig {
    pub fn calibrated(
        alpha: f64,
        delta: f64,
        tau: f64,
        particles: u64,
        seed: u64,
        record_times: Vec<f64>,
    ) -> Self {
        Self {
            alpha,
            delta,
            tau,
            h: calibrated_h(alpha, delta, tau, 1.0),
            particles,
            seed,
            record_times,
            workers: 1,
            track_arrivals: false,
        }
    }

    /// Diffusivity of the continuum limit, `c_{δ,α} h² / (2 τ^α)`.
    pub fn diffusivity(&self) -> f64 {
        c_coefficient(self.alpha, self.delta) * self.h * self.h / (2.0 * self.tau.powf(self.alpha))
    }
}

/// Merged integer tallies of a simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkOutput {
    pub config: WalkerConfig,
    pub record_steps: Vec<u64>,
    /// Lattice index of `occupation[r][0]`.
    pub offset: i64,
    /// Particle counts per lattice site at each record time.
    pub occupation: Vec<Vec<u64>>,
    /// `Σ j`, `Σ j²`, `Σ j⁴` of lattice positions at each record time.
    pub moments: Vec<[i128; 3]>,
    /// `Σ_k ω_k η(x, t − kτ)` accumulated from arrival events, in counts.
    pub reconstructed: Option<Vec<Vec<f64>>>,
}

/// Survival weights are tallied as integers in units of `2^-52` so that
/// merging worker tallies is exact and independent of the partition.
const OMEGA_SCALE: f64 = (1u64 << 52) as f64;

struct Tally {
    occupation: Vec<Vec<u64>>,
    moments: Vec<[i128; 3]>,
    reconstructed: Option<Vec<Vec<u128>>>,
}

pub fn simulate(config: &WalkerConfig, pmf: &WaitPmf) -> Result<WalkOutput> {
    if config.particles == 0 {
        return Err(Error::Config("particle count must be positive".into()));
    }
    if !(config.h > 0.0) {
        return Err(Error::Config(format!(
            "lattice spacing must be positive, got {}",
            config.h
        )));
    }
    if (pmf.tau - config.tau).abs() > 1e-12 * config.tau {
        return Err(Error::Config(
            "pmf and walker use different time steps".into(),
        ));
    }
    let mut record_steps = Vec::with_capacity(config.record_times.len());
    for &t in &config.record_times {
        let r = (t / config.tau).round();
        if r < 0.0 || (r * config.tau - t).abs() > 1e-9 * t.abs().max(config.tau) {
            return Err(Error::Config(format!(
                "record time {t} is not a multiple of tau = {}",
                config.tau
            )));
        }
        record_steps.push(r as u64);
    }
    let r_max = record_steps.iter().copied().max().unwrap_or(0);
    let width = 2 * r_max as usize + 1;
    let offset = -(r_max as i64);
    let workers = config.workers.max(1) as u64;
    let n = config.particles;
    let tallies: Vec<Tally> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let lo = n * w / workers;
            let hi = n * (w + 1) / workers;
            run_range(config, pmf, &record_steps, width, offset, lo..hi)
        })
        .collect();
    let mut it = tallies.into_iter();
    let mut total = it.next().expect("at least one worker");
    for t in it {
        for (a, b) in total.occupation.iter_mut().zip(&t.occupation) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in total.moments.iter_mut().zip(&t.moments) {
            for i in 0..3 {
                a[i] += b[i];
            }
        }
        if let (Some(a), Some(b)) = (total.reconstructed.as_mut(), t.reconstructed.as_ref()) {
            for (x, y) in a.iter_mut().zip(b) {
                for (p, q) in x.iter_mut().zip(y) {
                    *p += q;
                }
            }
        }
    }
    Ok(WalkOutput {
        config: config.clone(),
        record_steps,
        offset,
        occupation: total.occupation,
        moments: total.moments,
        reconstructed: total.reconstructed.map(|r| {
            r.into_iter()
                .map(|row| row.into_iter().map(|v| v as f64 / OMEGA_SCALE).collect())
                .collect()
        }),
    })
}

fn run_range(
    config: &WalkerConfig,
    pmf: &WaitPmf,
    record_steps: &[u64],
    width: usize,
    offset: i64,
    particles: std::ops::Range<u64>,
) -> Tally {
    let nrec = record_steps.len();
    let mut occupation = vec![vec![0u64; width]; nrec];
    let mut moments = vec![[0i128; 3]; nrec];
    let mut reconstructed = config
        .track_arrivals
        .then(|| vec![vec![0u128; width]; nrec]);
    let omega: Vec<u128> = pmf
        .omega
        .iter()
        .map(|w| (w * OMEGA_SCALE).round() as u128)
        .collect();
    let r_max = record_steps.iter().copied().max().unwrap_or(0);
    let m = pmf.m as u64;
    let mut sorted: Vec<(u64, usize)> = record_steps.iter().copied().zip(0..).collect();
    sorted.sort_unstable();
    let mut base = ChaCha8Rng::seed_from_u64(config.seed);
    for particle in particles {
        base.set_stream(particle);
        base.set_word_pos(0);
        let rng = &mut base;
        let mut pos: i64 = 0;
        let mut arrival: u64 = 0;
        let mut first_pending = 0usize;
        loop {
            // one draw per jump: 53 bits for the wait, the lowest bit for the direction
            let bits = rng.next_u64();
            let wait = pmf.sample_steps((bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64));
            let next = arrival + wait;
            // records are visited only when one falls inside this wait or,
            // for the reconstruction, inside the memory window after arrival
            let reach = if reconstructed.is_some() {
                arrival + m
            } else {
                next
            };
            if first_pending < record_steps.len() && sorted[first_pending].0 < reach.max(next) {
                let bin = (pos - offset) as usize;
                for &(r, j) in &sorted[first_pending..] {
                    if r >= reach.max(next) {
                        break;
                    }
                    if r < next {
                        occupation[j][bin] += 1;
                        let p = pos as i128;
                        moments[j][0] += p;
                        moments[j][1] += p * p;
                        moments[j][2] += p * p * p * p;
                    }
                    if let Some(rec) = reconstructed.as_mut() {
                        if r - arrival < m {
                            rec[j][bin] += omega[(r - arrival) as usize];
                        }
                    }
                }
            }
            if next > r_max {
                break;
            }
            arrival = next;
            while first_pending < sorted.len() && sorted[first_pending].0 < arrival {
                first_pending += 1;
            }
            pos += if bits & 1 == 1 { 1 } else { -1 };
        }
    }
    Tally {
        occupation,
        moments,
        reconstructed,
    }
}

impl WalkOutput {
    pub fn times(&self) -> Vec<f64> {
        self.record_steps
            .iter()
            .map(|&r| r as f64 * self.config.tau)
            .collect()
    }

    /// `(x, density)` pairs at record index `j` (nonzero sites only when
    /// `sparse`).
    pub fn density(&self, j: usize) -> Vec<(f64, f64)> {
        let norm = self.config.particles as f64 * self.config.h;
        self.occupation[j]
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                (
                    (i as i64 + self.offset) as f64 * self.config.h,
                    c as f64 / norm,
                )
            })
            .collect()
    }

    /// Empirical MSD and its standard error at record index `j`.
    pub fn msd(&self, j: usize) -> (f64, f64) {
        let n = self.config.particles as f64;
        let h2 = self.config.h * self.config.h;
        let m2 = self.moments[j][1] as f64 / n;
        let m4 = self.moments[j][2] as f64 / n;
        (h2 * m2, h2 * ((m4 - m2 * m2).max(0.0) / n).sqrt())
    }

    /// Mean position and its standard error at record index `j`.
    pub fn mean_position(&self, j: usize) -> (f64, f64) {
        let n = self.config.particles as f64;
        let m1 = self.moments[j][0] as f64 / n;
        let m2 = self.moments[j][1] as f64 / n;
        (
            self.config.h * m1,
            self.config.h * ((m2 - m1 * m1).max(0.0) / n).sqrt(),
        )
    }
}

/// Largest L1 distance (density units) between the recorded occupation and
/// its reconstruction from arrival events.
pub fn arrival_density_check(out: &WalkOutput) -> Result<f64> {
    let rec = out
        .reconstructed
        .as_ref()
        .ok_or_else(|| Error::Contract("simulation ran without arrival tracking".into()))?;
    let n = out.config.particles as f64;
    Ok(out
        .occupation
        .iter()
        .zip(rec)
        .map(|(occ, r)| {
            occ.iter()
                .zip(r)
                .map(|(&o, &v)| (o as f64 - v).abs())
                .sum::<f64>()
                / n
        })
        .fold(0.0, f64::max))
}

/// Finite-difference solution of the continuum equation on the walk's own
/// lattice (spacing `h`, step `τ`, same `D`), Dirac data at the origin.
/// Returns `(x, u)` at each record time; the domain is wide enough that the
/// Dirichlet boundary is invisible.
pub fn lattice_reference(config: &WalkerConfig) -> Result<Vec<Vec<(f64, f64)>>> {
    let spec = KernelSpec::normalized_fractional(config.alpha, config.delta)?;
    let d = config.diffusivity();
    let t_max = config.record_times.iter().copied().fold(0.0, f64::max);
    let reach = 12.0 * (2.0 * d * t_max.max(config.delta)).sqrt();
    let half = ((reach / config.h).ceil() as usize).max(8);
    let span = half as f64 * config.h;
    let grid = Grid::line(-span, span, 2 * half)?;
    let record: Vec<f64> = config
        .record_times
        .iter()
        .map(|&t| (t / config.tau).round() * config.tau)
        .collect();
    let params = SolveParams {
        tau: config.tau,
        t_end: t_max.max(config.tau),
        diffusivity: d,
        record: record.clone(),
        moment_center: Some(0.0),
    };
    let sol = solve(
        &ModelKind::NonlocalInTime(spec),
        &grid,
        &HistoryGenerator::Dirac(vec![0.0]),
        &params,
    )?;
    Ok(record
        .iter()
        .map(|&t| {
            let u = sol.snapshot(t).expect("recorded");
            u.iter()
                .enumerate()
                .map(|(i, &v)| (grid.coord(0, i), v))
                .collect()
        })
        .collect())
}

/// `Σ |density − u| h` over the union of the two supports at record `j`.
pub fn l1_distance(out: &WalkOutput, j: usize, reference: &[(f64, f64)]) -> f64 {
    let h = out.config.h;
    let mut diff: BTreeMap<i64, f64> = BTreeMap::new();
    for (x, v) in out.density(j) {
        *diff.entry((x / h).round() as i64).or_default() += v;
    }
    for &(x, u) in reference {
        *diff.entry((x / h).round() as i64).or_default() -= u;
    }
    diff.values().map(|v| v.abs()).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use crate::memory_op::build_weights;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_pmf() {
        let p = build_pmf(0.5, 1.0, 0.5).unwrap();
        assert_relative_eq!(p.p[0], 0.828_427_124_746_19, max_relative = 1e-12);
        assert_relative_eq!(p.p[1], 0.171_572_875_253_81, max_relative = 1e-12);
        assert_eq!(p.omega[2], 0.0);
    }

    #[test]
    fn pmf_properties() {
        let p = build_pmf(0.3, 1.0, 1e-4).unwrap();
        assert_eq!(p.m, 10_000);
        assert!((p.p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.p.windows(2).all(|w| w[1] < w[0]));
        assert!(p.omega.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn pmf_is_proportional_to_weights() {
        let (a, d, tau) = (0.75, 0.2, 0.2 / 10_000.0);
        let p = build_pmf(a, d, tau).unwrap();
        let w = build_weights(&KernelSpec::normalized_fractional(a, d).unwrap(), tau).unwrap();
        for k in 0..p.m {
            assert_relative_eq!(
                p.p[k] / p.p[0],
                w.weights[k] / w.weights[0],
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn inverse_cdf_edges() {
        let p = build_pmf(0.5, 1.0, 0.5).unwrap();
        assert_eq!(p.sample_steps(0.0), 1);
        assert_eq!(p.sample_steps(0.8), 1);
        assert_eq!(p.sample_steps(0.83), 2);
        assert_eq!(p.sample_steps(1.0 - 1e-16), 2);
    }

    #[test]
    fn counts_are_conserved_and_partition_invariant() {
        let tau = 0.2 / 40.0;
        let pmf = build_pmf(0.75, 0.2, tau).unwrap();
        let mut cfg = WalkerConfig::calibrated(0.75, 0.2, tau, 3000, 7, vec![0.0, 0.1, 0.2]);
        cfg.track_arrivals = true;
        let a = simulate(&cfg, &pmf).unwrap();
        cfg.workers = 7;
        let b = simulate(&cfg, &pmf).unwrap();
        assert_eq!(a.occupation, b.occupation);
        assert_eq!(a.moments, b.moments);
        for occ in &a.occupation {
            assert_eq!(occ.iter().sum::<u64>(), 3000);
        }
        // at t = 0 every particle sits at the origin, freshly arrived
        assert_eq!(a.occupation[0][(-a.offset) as usize], 3000);
        // the reconstruction is exact at t = 0 and unbiased afterwards
        let rec = a.reconstructed.as_ref().unwrap();
        assert_eq!(rec[0][(-a.offset) as usize], 3000.0);
        assert!(arrival_density_check(&a).unwrap() < 0.15);
    }
}
