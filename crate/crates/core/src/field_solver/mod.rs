//! Time marching of the nonlocal-in-time diffusion equation on bounded 1D/2D
//! domains with homogeneous Dirichlet data, plus local (backward Euler) and
//! Caputo (L1) reference models.

mod grid;
mod linalg;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use grid::Grid;
pub use linalg::{assemble_laplacian, Laplacian, ShiftedSystem};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::memory_op::{build_weights, HistoryRing, MemoryWeights};
use crate::special::gamma;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    NonlocalInTime(KernelSpec),
    Local,
    FractionalCaputo { alpha: f64 },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::NonlocalInTime(_) => "nonlocal",
            ModelKind::Local => "local",
            ModelKind::FractionalCaputo { .. } => "fractional",
        }
    }
}

pub type FieldFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// Generator of the data on the pre-initial interval.
#[derive(Clone)]
pub enum HistoryGenerator {
    Zero,
    /// Grid Dirac mass `1/h^dim` at the node nearest to the point.
    Dirac(Vec<f64>),
    /// Line density on the boundary of the square `[lo, hi]^2`, unit mass per
    /// unit length.
    DiracRing {
        lo: f64,
        hi: f64,
    },
    /// Time-independent field on the interior nodes.
    Field(Vec<f64>),
    /// Snapshots at lags 1..M, most recent first.
    Snapshots(Vec<Vec<f64>>),
    /// Analytic `g(x, t)`.
    Function(FieldFn),
}

impl fmt::Debug for HistoryGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryGenerator::Zero => write!(f, "Zero"),
            HistoryGenerator::Dirac(p) => write!(f, "Dirac({p:?})"),
            HistoryGenerator::DiracRing { lo, hi } => write!(f, "DiracRing({lo}, {hi})"),
            HistoryGenerator::Field(v) => write!(f, "Field(len {})", v.len()),
            HistoryGenerator::Snapshots(v) => write!(f, "Snapshots({})", v.len()),
            HistoryGenerator::Function(_) => write!(f, "Function"),
        }
    }
}

impl HistoryGenerator {
    /// Load a time-independent snapshot from CSV with header `x,u` or `x,y,u`;
    /// each row is assigned to its nearest interior node.
    pub fn from_csv(path: impl AsRef<Path>, grid: &Grid) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let expect: &[&str] = if grid.dim == 1 {
            &["x", "u"]
        } else {
            &["x", "y", "u"]
        };
        if headers.iter().collect::<Vec<_>>() != expect {
            return Err(Error::Config(format!(
                "history file header must be {:?}",
                expect.join(",")
            )));
        }
        let mut field = vec![0.0; grid.len()];
        for rec in reader.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad number {s:?} in history file")))
                })
                .collect::<Result<_>>()?;
            let mut ij = [0usize; 2];
            let mut inside = true;
            for ax in 0..grid.dim {
                match grid.nearest(ax, vals[ax]) {
                    Some(i) => ij[ax] = i,
                    None => inside = false,
                }
            }
            if inside {
                field[grid.flat(ij[0], ij[1])] = vals[grid.dim];
            }
        }
        Ok(HistoryGenerator::Field(field))
    }

    /// The datum at time `t < 0`; `lag` is the step index `-t/τ` used by
    /// tabulated snapshots.
    fn sample(&self, grid: &Grid, t: f64, lag: usize) -> Result<Vec<f64>> {
        match self {
            HistoryGenerator::Zero => Ok(vec![0.0; grid.len()]),
            HistoryGenerator::Dirac(x0) => dirac(grid, x0),
            HistoryGenerator::DiracRing { lo, hi } => dirac_ring(grid, *lo, *hi),
            HistoryGenerator::Field(v) => {
                check_len(grid, v)?;
                Ok(v.clone())
            }
            HistoryGenerator::Snapshots(s) => {
                let v = s.get(lag.max(1) - 1).ok_or_else(|| {
                    Error::Config(format!(
                        "history has {} snapshots, lag {lag} requested",
                        s.len()
                    ))
                })?;
                check_len(grid, v)?;
                Ok(v.clone())
            }
            HistoryGenerator::Function(g) => {
                Ok((0..grid.len()).map(|k| g(&grid.point(k), t)).collect())
            }
        }
    }
}

fn check_len(grid: &Grid, v: &[f64]) -> Result<()> {
    if v.len() == grid.len() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "history field has {} values, grid has {} interior nodes",
            v.len(),
            grid.len()
        )))
    }
}

fn dirac(grid: &Grid, x0: &[f64]) -> Result<Vec<f64>> {
    if x0.len() != grid.dim {
        return Err(Error::Config(format!(
            "Dirac location needs {} coordinates",
            grid.dim
        )));
    }
    let mut ij = [0usize; 2];
    for ax in 0..grid.dim {
        ij[ax] = grid.nearest(ax, x0[ax]).ok_or_else(|| {
            Error::Config(format!(
                "Dirac location {:?} is not at an interior node",
                x0
            ))
        })?;
    }
    let mut v = vec![0.0; grid.len()];
    v[grid.flat(ij[0], ij[1])] = 1.0 / grid.cell_volume();
    Ok(v)
}

fn dirac_ring(grid: &Grid, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if grid.dim != 2 {
        return Err(Error::Config("ring datum needs a 2D grid".into()));
    }
    let err = || {
        Error::Config(format!(
            "ring [{lo}, {hi}] must lie strictly inside the domain"
        ))
    };
    let (i0, i1) = (
        grid.nearest(0, lo).ok_or_else(err)?,
        grid.nearest(0, hi).ok_or_else(err)?,
    );
    let (j0, j1) = (
        grid.nearest(1, lo).ok_or_else(err)?,
        grid.nearest(1, hi).ok_or_else(err)?,
    );
    let mut v = vec![0.0; grid.len()];
    // each ring node carries arc length h; density (arc length)/(cell area)
    let value = 1.0 / grid.h(0).min(grid.h(1));
    for i in i0..=i1 {
        v[grid.flat(i, j0)] = value;
        v[grid.flat(i, j1)] = value;
    }
    for j in j0..=j1 {
        v[grid.flat(i0, j)] = value;
        v[grid.flat(i1, j)] = value;
    }
    Ok(v)
}

enum State {
    Nonlocal {
        w: MemoryWeights,
        ring: HistoryRing<Vec<f64>>,
    },
    Local {
        prev: Vec<f64>,
    },
    Fractional {
        alpha: f64,
        b: Vec<f64>,
        scale: f64,
        past: Vec<Vec<f64>>,
    },
}

/// Time marcher producing `u(nτ)` for n = 0, 1, 2, ...
///
/// The nonlocal model solves its equation already at t = 0 from the history
/// ring; the local and Caputo models start from the datum itself.
pub struct Stepper {
    grid: Grid,
    tau: f64,
    system: ShiftedSystem,
    state: State,
    first: Option<Vec<f64>>,
    guess: Vec<f64>,
    n: usize,
}

impl Stepper {
    pub fn new(
        model: &ModelKind,
        grid: &Grid,
        history: &HistoryGenerator,
        tau: f64,
        diffusivity: f64,
    ) -> Result<Self> {
        if !(diffusivity > 0.0) {
            return Err(Error::Config(format!(
                "diffusivity must be positive, got {diffusivity}"
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        let (state, system, first) = match model {
            ModelKind::NonlocalInTime(spec) => {
                let w = build_weights(spec, tau)?;
                let mut slots = Vec::with_capacity(w.m);
                for k in 1..=w.m {
                    slots.push(history.sample(grid, -(k as f64) * tau, k)?);
                }
                let mut it = slots.into_iter();
                let ring = HistoryRing::from_fn(w.m, |_| it.next().expect("sized"));
                let sys = ShiftedSystem::new(grid, w.w0, diffusivity);
                (State::Nonlocal { w, ring }, sys, None)
            }
            ModelKind::Local => {
                let u0 = history.sample(grid, 0.0, 1)?;
                let sys = ShiftedSystem::new(grid, 1.0 / tau, diffusivity);
                (State::Local { prev: u0.clone() }, sys, Some(u0))
            }
            ModelKind::FractionalCaputo { alpha } => {
                let alpha = *alpha;
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::Config(format!(
                        "alpha must lie in (0,1), got {alpha}"
                    )));
                }
                let u0 = history.sample(grid, 0.0, 1)?;
                let scale = tau.powf(-alpha) / gamma(2.0 - alpha);
                let sys = ShiftedSystem::new(grid, scale, diffusivity);
                (
                    State::Fractional {
                        alpha,
                        b: vec![1.0],
                        scale,
                        past: vec![u0.clone()],
                    },
                    sys,
                    Some(u0),
                )
            }
        };
        let len = grid.len();
        Ok(Self {
            grid: grid.clone(),
            tau,
            system,
            state,
            first,
            guess: vec![0.0; len],
            n: 0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Time of the field returned by the next call to [`Stepper::step`].
    pub fn next_time(&self) -> f64 {
        self.n as f64 * self.tau
    }

    pub fn step(&mut self) -> Result<Vec<f64>> {
        self.n += 1;
        if let Some(u0) = self.first.take() {
            return Ok(u0);
        }
        let len = self.grid.len();
        let mut rhs = vec![0.0; len];
        match &mut self.state {
            State::Nonlocal { w, ring } => {
                for (wk, f) in w.weights.iter().zip(ring.iter()) {
                    for (r, v) in rhs.iter_mut().zip(f.iter()) {
                        *r += wk * v;
                    }
                }
            }
            State::Local { prev } => {
                for (r, v) in rhs.iter_mut().zip(prev.iter()) {
                    *r = v / self.tau;
                }
            }
            State::Fractional {
                alpha,
                b,
                scale,
                past,
            } => {
                // past[i] = u^i for i < n; L1 weights b_j = (j+1)^{1-α} - j^{1-α}
                let n = past.len();
                while b.len() < n {
                    b.push(crate::special::power_increment(b.len() + 1, 1.0 - *alpha));
                }
                for i in 0..len {
                    let mut acc = past[n - 1][i];
                    for j in 1..n {
                        acc -= b[j] * (past[n - j][i] - past[n - j - 1][i]);
                    }
                    rhs[i] = *scale * acc;
                }
            }
        }
        let mut u = self.guess.clone();
        self.system.solve(&rhs, &mut u)?;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite field at t = {}",
                (self.n - 1) as f64 * self.tau
            )));
        }
        self.guess.clone_from(&u);
        match &mut self.state {
            State::Nonlocal { ring, .. } => ring.push(u.clone()),
            State::Local { prev } => prev.clone_from(&u),
            State::Fractional { past, .. } => past.push(u.clone()),
        }
        Ok(u)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    pub tau: f64,
    pub t_end: f64,
    pub diffusivity: f64,
    pub record: Vec<f64>,
    /// Center for the 1D second moment; the domain midpoint when absent.
    pub moment_center: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub grid: Grid,
    pub snapshots: Vec<(f64, Vec<f64>)>,
    /// `(t_n, second moment)` at every step, 1D only.
    pub second_moment: Option<Vec<(f64, f64)>>,
}

impl Solution {
    pub fn snapshot(&self, t: f64) -> Option<&[f64]> {
        self.snapshots
            .iter()
            .find(|(s, _)| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
            .map(|(_, v)| v.as_slice())
    }
}

/// March to `t_end`, keeping snapshots at the recorded times.
pub fn solve(
    model: &ModelKind,
    grid: &Grid,
    history: &HistoryGenerator,
    params: &SolveParams,
) -> Result<Solution> {
    let tau = params.tau;
    let steps = (params.t_end / tau + 1e-9).floor() as usize;
    let mut want = Vec::with_capacity(params.record.len());
    for &t in &params.record {
        let n = (t / tau).round();
        if n < 0.0 || (n * tau - t).abs() > 1e-9 * t.abs().max(tau) || n as usize > steps {
            return Err(Error::Config(format!(
                "record time {t} is not on the step grid (tau = {tau}, T = {})",
                params.t_end
            )));
        }
        want.push(n as usize);
    }
    let center = params
        .moment_center
        .unwrap_or_else(|| 0.5 * (grid.extents[0].0 + grid.extents[0].1));
    let mut stepper = Stepper::new(model, grid, history, tau, params.diffusivity)?;
    let mut snapshots = Vec::new();
    let mut moments = (grid.dim == 1).then(Vec::new);
    let last_wanted = want.iter().copied().max().unwrap_or(0);
    let stop = if moments.is_some() {
        steps
    } else {
        last_wanted
    };
    for n in 0..=stop {
        let u = stepper.step()?;
        let t = n as f64 * tau;
        if let Some(m) = moments.as_mut() {
            m.push((t, second_moment(&u, grid, center)?));
        }
        for (k, &wn) in want.iter().enumerate() {
            if wn == n {
                snapshots.push((params.record[k], u.clone()));
            }
        }
    }
    Ok(Solution {
        grid: grid.clone(),
        snapshots,
        second_moment: moments,
    })
}

/// Trapezoidal `∫ (x − center)² u dx` over the 1D domain (boundary values 0).
pub fn second_moment(u: &[f64], grid: &Grid, center: f64) -> Result<f64> {
    if grid.dim != 1 {
        return Err(Error::Unsupported(
            "second moment is defined for 1D grids".into(),
        ));
    }
    let h = grid.h(0);
    Ok(u.iter()
        .enumerate()
        .map(|(i, v)| (grid.coord(0, i) - center).powi(2) * v)
        .sum::<f64>()
        * h)
}

/// `Σ u h^dim`.
pub fn total_mass(u: &[f64], grid: &Grid) -> f64 {
    u.iter().sum::<f64>() * grid.cell_volume()
}
