//! Canned parameter sets for the figure suite, sized to run on a laptop.

use rayon::prelude::*;

use super::args::{KernelArgs, KernelChoice, ModelChoice, MsdArgs, PeakArgs, SolveArgs, WalkArgs};
use super::commands::{self, compare_solutions, write_compare, write_msd, write_solution};
use super::output::{num, Cell, Sink, Table};
use crate::error::{Error, Result};
use crate::walker;

pub const FIGURES: [&str; 8] = [
    "fig1", "fig2a", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
];

fn kernel(alpha: f64, delta: f64) -> KernelArgs {
    KernelArgs {
        alpha,
        delta,
        kernel: KernelChoice::Normalized,
        kernel_file: None,
    }
}

fn msd_args(alpha: f64, delta: f64, history: &str) -> MsdArgs {
    MsdArgs {
        kernel: kernel(alpha, delta),
        tau: Some(delta / 128.0),
        t_end: Some(200.0 * delta),
        history: history.into(),
        rhs: 2.0,
        smoothing: 5,
        threshold_level: 0.5,
    }
}

fn solve_args(
    alpha: f64,
    delta: f64,
    domain: &str,
    n: usize,
    tau: f64,
    record: &[f64],
    history: &str,
) -> SolveArgs {
    SolveArgs {
        kernel: kernel(alpha, delta),
        dim: 1,
        model: ModelChoice::Nonlocal,
        n,
        domain: domain.into(),
        tau,
        t_end: record.iter().copied().fold(0.0, f64::max),
        record: record.to_vec(),
        history: history.into(),
        diffusivity: 1.0,
    }
}

pub fn run(figure: &str, sink: &mut Sink) -> Result<()> {
    match figure {
        // peak value over ten decades with both asymptotes
        "fig1" => commands::peak(
            &PeakArgs {
                kernel: kernel(0.2, 0.1),
                t_min: 1e-6,
                t_max: 1e3,
                count: 50,
                nq: 64,
            },
            sink,
        ),
        "fig2a" => commands::msd(&msd_args(0.2, 0.5, "zero"), sink),
        "fig3" => {
            let runs = [("g1", "affine:5"), ("g2", "affine:0.5"), ("g3", "step")];
            let series = runs
                .par_iter()
                .map(|(_, h)| commands::msd_series(&msd_args(0.2, 0.5, h)))
                .collect::<Result<Vec<_>>>()?;
            for ((stem, h), s) in runs.iter().zip(&series) {
                write_msd(s, &msd_args(0.2, 0.5, h), sink, &format!("msd_{stem}"))?;
            }
            Ok(())
        }
        "fig4" => {
            let args = solve_args(0.5, 0.2, "-2:2", 400, 0.001, &[0.1, 0.2, 0.5], "dirac:0");
            write_compare(&compare_solutions(&args)?, sink, "compare")
        }
        "fig5" => local_limit(sink),
        "fig6" => {
            let args = solve_args(
                0.5,
                0.1,
                "0:1",
                400,
                0.1 / 200.0,
                &[0.05, 0.15, 0.25],
                "dirac:0.5",
            );
            write_compare(&compare_solutions(&args)?, sink, "compare")
        }
        "fig7" => {
            let mut args = solve_args(0.5, 1.0, "0:1", 64, 0.01, &[0.1, 0.5, 1.1], "dirac-ring");
            args.dim = 2;
            let sol = commands::run_model(&args, ModelChoice::Nonlocal)?;
            write_solution(&sol, sink, "")
        }
        "fig8" => monte_carlo(sink),
        other => Err(Error::Config(format!(
            "unknown figure {other:?}; expected one of {}",
            FIGURES.join(", ")
        ))),
    }
}

fn local_limit(sink: &mut Sink) -> Result<()> {
    let deltas = [0.5, 0.25, 0.125, 0.0625];
    let times = [0.1, 0.5];
    let base = solve_args(0.5, 0.5, "-4:4", 512, 1.0 / 1600.0, &times, "dirac:0");
    let mut jobs: Vec<(Option<f64>, SolveArgs)> = deltas
        .iter()
        .map(|&d| {
            let mut a = base.clone();
            a.kernel.delta = d;
            (Some(d), a)
        })
        .collect();
    jobs.push((None, base.clone()));
    let sols = jobs
        .par_iter()
        .map(|(d, a)| {
            commands::run_model(
                a,
                if d.is_some() {
                    ModelChoice::Nonlocal
                } else {
                    ModelChoice::Local
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let local = sols.last().expect("local run");
    let grid = &local.grid;
    let mut gap_cols = vec!["delta".to_string()];
    gap_cols.extend(times.iter().map(|t| format!("gap_t{}", num(*t))));
    let mut gaps = Table {
        columns: gap_cols,
        rows: Vec::new(),
    };
    for (j, &t) in times.iter().enumerate() {
        let mut cols = vec!["x".to_string()];
        cols.extend(deltas.iter().map(|d| format!("delta_{}", num(*d))));
        cols.push("local".into());
        let mut table = Table {
            columns: cols,
            rows: Vec::new(),
        };
        for idx in 0..grid.len() {
            let mut row = vec![Cell::F(grid.point(idx)[0])];
            row.extend(sols.iter().map(|s| Cell::F(s.snapshots[j].1[idx])));
            table.push(row);
        }
        sink.table(&format!("profiles_t{}", num(t)), &table)?;
    }
    for (k, &d) in deltas.iter().enumerate() {
        let mut row = vec![Cell::F(d)];
        for j in 0..times.len() {
            let gap = sols[k].snapshots[j]
                .1
                .iter()
                .zip(&local.snapshots[j].1)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            row.push(gap.into());
        }
        gaps.push(row);
    }
    sink.table("gaps", &gaps)
}

fn monte_carlo(sink: &mut Sink) -> Result<()> {
    let args = WalkArgs {
        alpha: 0.75,
        delta: 0.2,
        tau: 0.2 / 400.0,
        particles: 200_000,
        seed: 1,
        times: vec![0.1, 0.2, 0.3, 0.4],
        calibrate: "auto".into(),
        workers: Some(8),
    };
    let out = commands::run_walk(&args)?;
    commands::write_walk(&out, sink, "walk")?;
    let reference = walker::lattice_reference(&out.config)?;
    let mut fd = Table::new(&["t", "x", "u"]);
    let mut l1 = Table::new(&["t", "l1"]);
    for (j, t) in out.times().into_iter().enumerate() {
        for &(x, u) in &reference[j] {
            fd.push(vec![t.into(), x.into(), u.into()]);
        }
        l1.push(vec![
            t.into(),
            walker::l1_distance(&out, j, &reference[j]).into(),
        ]);
    }
    sink.table("finite_difference", &fd)?;
    sink.table("l1", &l1)
}
