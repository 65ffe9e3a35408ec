use rayon::prelude::*;

use super::args::{
    FundamentalArgs, KernelArgs, KernelChoice, ModelChoice, MsdArgs, PeakArgs, SolveArgs, WalkArgs,
    WeightsArgs,
};
use super::output::{num, Cell, Sink, Table};
use crate::error::{Error, Result};
use crate::field_solver::{self, Grid, HistoryGenerator, ModelKind, Solution, SolveParams};
use crate::freespace::{self, InversionContour, Symbol};
use crate::kernel::KernelSpec;
use crate::memory_op::build_weights;
use crate::scalar_msd::{self, CrossoverParams, HistorySignal, TimeSeries};
use crate::walker::{self, WalkOutput, WalkerConfig};

pub fn kernel_spec(args: &KernelArgs) -> Result<KernelSpec> {
    if let Some(path) = &args.kernel_file {
        return KernelSpec::from_csv(path);
    }
    match args.kernel {
        KernelChoice::Normalized => KernelSpec::normalized_fractional(args.alpha, args.delta),
        KernelChoice::Caputo => KernelSpec::truncated_caputo(args.alpha, args.delta),
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("--{key}: {s:?} is not a number")))
}

pub fn parse_scalar_history(s: &str, delta: f64) -> Result<HistorySignal> {
    let bad = || {
        Error::Config(format!(
            "--history: expected zero | affine:K | step | step:H,T_ON,T_OFF, got {s:?}"
        ))
    };
    match s.split_once(':') {
        None if s == "zero" => Ok(HistorySignal::Zero),
        None if s == "step" => Ok(HistorySignal::default_step(delta)),
        Some(("affine", k)) => Ok(HistorySignal::AffineScaled(parse_f64("history", k)?)),
        Some(("step", rest)) => {
            let v: Vec<&str> = rest.split(',').collect();
            if v.len() != 3 {
                return Err(bad());
            }
            let (height, t_on, t_off) = (
                parse_f64("history", v[0])?,
                parse_f64("history", v[1])?,
                parse_f64("history", v[2])?,
            );
            if !(t_on < t_off) {
                return Err(Error::Config(format!(
                    "--history: step interval [{t_on}, {t_off}] is empty"
                )));
            }
            Ok(HistorySignal::Step {
                height,
                t_on,
                t_off,
            })
        }
        _ => Err(bad()),
    }
}

pub fn parse_range(key: &str, s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("--{key}: expected a:b, got {s:?}")))?;
    let (a, b) = (parse_f64(key, a)?, parse_f64(key, b)?);
    if !(a < b) {
        return Err(Error::Config(format!("--{key}: empty interval {s:?}")));
    }
    Ok((a, b))
}

pub fn parse_points(s: &str) -> Result<Vec<f64>> {
    let v: Vec<&str> = s.split(':').collect();
    if v.len() != 3 {
        return Err(Error::Config(format!(
            "--x-grid: expected a:b:n, got {s:?}"
        )));
    }
    let (a, b) = (parse_f64("x-grid", v[0])?, parse_f64("x-grid", v[1])?);
    let n: usize = v[2].parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        Error::Config(format!(
            "--x-grid: point count {:?} must be a positive integer",
            v[2]
        ))
    })?;
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn check_positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("--{key} must be positive, got {v}")))
    }
}

// ---------------------------------------------------------------- msd

/// Fill in `tau = δ/128` and `T = 200δ` when absent.
pub fn resolve_msd(args: &MsdArgs) -> Result<MsdArgs> {
    let delta = kernel_spec(&args.kernel)?.delta;
    let mut a = args.clone();
    a.tau.get_or_insert(delta / 128.0);
    a.t_end.get_or_insert(200.0 * delta);
    Ok(a)
}

pub fn msd_series(args: &MsdArgs) -> Result<TimeSeries> {
    let spec = kernel_spec(&args.kernel)?;
    let tau = args.tau.unwrap_or(spec.delta / 128.0);
    let t_end = args.t_end.unwrap_or(200.0 * spec.delta);
    check_positive("T", t_end)?;
    let history = parse_scalar_history(&args.history, spec.delta)?;
    let w = build_weights(&spec, tau)?;
    let rhs = args.rhs;
    let mut series = scalar_msd::solve_scalar(&w, &history, |_| rhs, t_end)?;
    series.alpha = spec.power_law().map_or(f64::NAN, |p| p.1);
    Ok(series)
}

pub fn msd(args: &MsdArgs, sink: &mut Sink) -> Result<()> {
    if args.smoothing == 0 {
        return Err(Error::Config("--smoothing must be at least 1".into()));
    }
    let series = msd_series(args)?;
    write_msd(&series, args, sink, "msd")
}

pub fn write_msd(series: &TimeSeries, args: &MsdArgs, sink: &mut Sink, stem: &str) -> Result<()> {
    let slope = scalar_msd::moving_average(&scalar_msd::local_slope(series), args.smoothing);
    let mut table = Table::new(&["t", "m", "alpha_eff"]);
    for (n, &m) in series.values.iter().enumerate() {
        table.push(vec![series.time(n).into(), m.into(), slope[n].into()]);
    }
    sink.table(stem, &table)?;
    if series.alpha.is_finite() {
        let params = CrossoverParams {
            window: args.smoothing,
            level: args.threshold_level,
        };
        let cross = match scalar_msd::crossover_time_with(series, series.alpha, params) {
            scalar_msd::Crossover::At(t) => Some(t),
            scalar_msd::Crossover::NotDetected => None,
        };
        let mut summary = Table::new(&["alpha", "delta", "t_cross"]);
        summary.push(vec![series.alpha.into(), series.delta.into(), cross.into()]);
        sink.table(&format!("{stem}_crossover"), &summary)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- weights

pub fn weights(args: &WeightsArgs, sink: &mut Sink) -> Result<()> {
    let spec = kernel_spec(&args.kernel)?;
    let w = build_weights(&spec, args.tau)?;
    let mut table = Table::new(&["k", "w_k"]);
    table.push(vec![Cell::I(0), w.w0.into()]);
    for (k, &v) in w.weights.iter().enumerate() {
        table.push(vec![Cell::I(k as i64 + 1), v.into()]);
    }
    sink.table("weights", &table)
}

// ---------------------------------------------------------------- solve / compare

pub fn build_grid(args: &SolveArgs) -> Result<Grid> {
    let (a, b) = parse_range("domain", &args.domain)?;
    match args.dim {
        1 => Grid::line(a, b, args.n),
        2 => Grid::rect((a, b), (a, b), args.n),
        d => Err(Error::Config(format!("--dim must be 1 or 2, got {d}"))),
    }
}

pub fn field_history(s: &str, grid: &Grid) -> Result<HistoryGenerator> {
    if s == "zero" {
        return Ok(HistoryGenerator::Zero);
    }
    if s == "dirac-ring" {
        if grid.dim != 2 {
            return Err(Error::Config("--history: dirac-ring needs --dim 2".into()));
        }
        let (a, b) = grid.extents[0];
        return Ok(HistoryGenerator::DiracRing {
            lo: a + 0.25 * (b - a),
            hi: a + 0.75 * (b - a),
        });
    }
    if let Some(path) = s.strip_prefix("file:") {
        return HistoryGenerator::from_csv(path, grid);
    }
    if let Some(p) = s.strip_prefix("dirac:") {
        let point = p
            .split(',')
            .map(|x| parse_f64("history", x))
            .collect::<Result<Vec<f64>>>()?;
        if point.len() != grid.dim {
            return Err(Error::Config(format!(
                "--history: dirac point has {} coordinates, grid is {}D",
                point.len(),
                grid.dim
            )));
        }
        return Ok(HistoryGenerator::Dirac(point));
    }
    Err(Error::Config(format!(
        "--history: expected dirac:X[,Y] | dirac-ring | file:PATH | zero, got {s:?}"
    )))
}

pub fn model_kind(choice: ModelChoice, kernel: &KernelArgs) -> Result<ModelKind> {
    Ok(match choice {
        ModelChoice::Nonlocal => ModelKind::NonlocalInTime(kernel_spec(kernel)?),
        ModelChoice::Local => ModelKind::Local,
        ModelChoice::Fractional => {
            if !(kernel.alpha > 0.0 && kernel.alpha < 1.0) {
                return Err(Error::Config(format!(
                    "--alpha must lie in (0, 1), got {}",
                    kernel.alpha
                )));
            }
            ModelKind::FractionalCaputo {
                alpha: kernel.alpha,
            }
        }
    })
}

fn solve_params(args: &SolveArgs) -> Result<SolveParams> {
    check_positive("tau", args.tau)?;
    check_positive("T", args.t_end)?;
    check_positive("diffusivity", args.diffusivity)?;
    let record = if args.record.is_empty() {
        vec![args.t_end]
    } else {
        args.record.clone()
    };
    Ok(SolveParams {
        tau: args.tau,
        t_end: args.t_end,
        diffusivity: args.diffusivity,
        record,
        moment_center: None,
    })
}

pub fn run_model(args: &SolveArgs, choice: ModelChoice) -> Result<Solution> {
    let grid = build_grid(args)?;
    let history = field_history(&args.history, &grid)?;
    field_solver::solve(
        &model_kind(choice, &args.kernel)?,
        &grid,
        &history,
        &solve_params(args)?,
    )
}

fn snapshot_table(grid: &Grid, u: &[f64]) -> Table {
    let mut table = if grid.dim == 1 {
        Table::new(&["x", "u"])
    } else {
        Table::new(&["x", "y", "u"])
    };
    for (idx, &v) in u.iter().enumerate() {
        let mut row: Vec<Cell> = grid.point(idx).into_iter().map(Cell::F).collect();
        row.push(v.into());
        table.push(row);
    }
    table
}

pub fn solve(args: &SolveArgs, sink: &mut Sink) -> Result<()> {
    write_solution(&run_model(args, args.model)?, sink, "")
}

pub fn write_solution(sol: &Solution, sink: &mut Sink, prefix: &str) -> Result<()> {
    for (t, u) in &sol.snapshots {
        sink.table(
            &format!("{prefix}u_t{}", num(*t)),
            &snapshot_table(&sol.grid, u),
        )?;
    }
    if let Some(m) = &sol.second_moment {
        let mut table = Table::new(&["t", "m"]);
        for &(t, v) in m {
            table.push(vec![t.into(), v.into()]);
        }
        sink.table(&format!("{prefix}second_moment"), &table)?;
    }
    Ok(())
}

pub const MODELS: [ModelChoice; 3] = [
    ModelChoice::Nonlocal,
    ModelChoice::Local,
    ModelChoice::Fractional,
];

pub fn compare_solutions(args: &SolveArgs) -> Result<Vec<Solution>> {
    MODELS.par_iter().map(|&m| run_model(args, m)).collect()
}

pub fn compare(args: &SolveArgs, sink: &mut Sink) -> Result<()> {
    write_compare(&compare_solutions(args)?, sink, "compare")
}

pub fn write_compare(sols: &[Solution], sink: &mut Sink, stem: &str) -> Result<()> {
    let grid = &sols[0].grid;
    let mut cols: Vec<&str> = if grid.dim == 1 {
        vec!["t", "x"]
    } else {
        vec!["t", "x", "y"]
    };
    cols.extend(["nonlocal", "local", "fractional"]);
    let mut table = Table::new(&cols);
    let mut peaks = Table::new(&["t", "nonlocal", "local", "fractional"]);
    for (j, (t, _)) in sols[0].snapshots.iter().enumerate() {
        for idx in 0..grid.len() {
            let mut row = vec![Cell::F(*t)];
            row.extend(grid.point(idx).into_iter().map(Cell::F));
            row.extend(sols.iter().map(|s| Cell::F(s.snapshots[j].1[idx])));
            table.push(row);
        }
        let mut row = vec![Cell::F(*t)];
        row.extend(sols.iter().map(|s| {
            Cell::F(
                s.snapshots[j]
                    .1
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max),
            )
        }));
        peaks.push(row);
    }
    sink.table(stem, &table)?;
    sink.table(&format!("{stem}_peaks"), &peaks)
}

// ---------------------------------------------------------------- free space

fn report_warning(what: &str, inv: &freespace::Inversion) {
    if inv.warning {
        eprintln!(
            "warning: {what}: imaginary residue {:.3e} above roundoff",
            inv.imag
        );
    }
}

pub fn fundamental(args: &FundamentalArgs, sink: &mut Sink) -> Result<()> {
    let spec = kernel_spec(&args.kernel)?;
    let xs = parse_points(&args.x_grid)?;
    for &t in &args.times {
        check_positive("times", t)?;
    }
    let contour = InversionContour::with_nodes(args.nq);
    let jobs: Vec<(f64, f64)> = args
        .times
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
        .collect();
    let values = jobs
        .par_iter()
        .map(|&(x, t)| {
            let inv = freespace::invert(&spec, x, t, &contour)?;
            report_warning(&format!("u({x}, {t})"), &inv);
            Ok(inv.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut table = Table::new(&["x", "t", "u"]);
    for (&(x, t), &u) in jobs.iter().zip(&values) {
        table.push(vec![x.into(), t.into(), u.into()]);
    }
    sink.table("fundamental", &table)
}

pub fn log_times(t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>> {
    check_positive("t-min", t_min)?;
    if !(t_max > t_min) || count < 2 {
        return Err(Error::Config(
            "--t-max must exceed --t-min and --count must be at least 2".into(),
        ));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

pub fn peak(args: &PeakArgs, sink: &mut Sink) -> Result<()> {
    let spec = kernel_spec(&args.kernel)?;
    let symbol = Symbol::from_kernel(&spec)?;
    let contour = InversionContour::with_nodes(args.nq);
    let times = log_times(args.t_min, args.t_max, args.count)?;
    let values = times
        .par_iter()
        .map(|&t| {
            let inv = freespace::invert(&spec, 0.0, t, &contour)?;
            report_warning(&format!("u(0, {t})"), &inv);
            Ok(inv.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut table = Table::new(&["t", "u0", "asymptote_small", "asymptote_large"]);
    for (&t, &u) in times.iter().zip(&values) {
        table.push(vec![
            t.into(),
            u.into(),
            freespace::peak_small_t(&symbol, t).into(),
            freespace::peak_large_t(&symbol, t).into(),
        ]);
    }
    sink.table("peak", &table)
}

// ---------------------------------------------------------------- walk

pub fn walker_config(args: &WalkArgs) -> Result<WalkerConfig> {
    check_positive("tau", args.tau)?;
    let mut cfg = WalkerConfig::calibrated(
        args.alpha,
        args.delta,
        args.tau,
        args.particles,
        args.seed,
        args.times.clone(),
    );
    match args.calibrate.as_str() {
        "auto" => {}
        other => {
            let v = other.strip_prefix("h=").ok_or_else(|| {
                Error::Config(format!(
                    "--calibrate: expected auto or h=VALUE, got {other:?}"
                ))
            })?;
            let h = parse_f64("calibrate", v)?;
            check_positive("calibrate", h)?;
            cfg.h = h;
        }
    }
    cfg.workers = args
        .workers
        .unwrap_or_else(rayon::current_num_threads)
        .max(1);
    Ok(cfg)
}

pub fn run_walk(args: &WalkArgs) -> Result<WalkOutput> {
    let cfg = walker_config(args)?;
    let pmf = walker::build_pmf(args.alpha, args.delta, args.tau)?;
    walker::simulate(&cfg, &pmf)
}

pub fn walk(args: &WalkArgs, sink: &mut Sink) -> Result<()> {
    write_walk(&run_walk(args)?, sink, "walk")
}

pub fn write_walk(out: &WalkOutput, sink: &mut Sink, stem: &str) -> Result<()> {
    let times = out.times();
    let mut density = Table::new(&["t", "x", "density"]);
    let mut msd = Table::new(&["t", "msd", "stderr"]);
    for (j, &t) in times.iter().enumerate() {
        let occ = &out.occupation[j];
        let first = occ.iter().position(|&c| c > 0).unwrap_or(0);
        let last = occ.iter().rposition(|&c| c > 0).unwrap_or(0);
        for (x, d) in out
            .density(j)
            .into_iter()
            .skip(first)
            .take(last + 1 - first)
        {
            density.push(vec![t.into(), x.into(), d.into()]);
        }
        let (m, e) = out.msd(j);
        msd.push(vec![t.into(), m.into(), e.into()]);
    }
    sink.table(&format!("{stem}_density"), &density)?;
    sink.table(&format!("{stem}_msd"), &msd)
}
