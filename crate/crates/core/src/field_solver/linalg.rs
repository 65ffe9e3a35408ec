//! The discrete Dirichlet Laplacian and solvers for `(c I − D Δ_h) u = r`.

use super::grid::Grid;
use crate::error::{Error, Result};

/// 3-point (1D) or 5-point (2D) Laplacian on interior nodes with homogeneous
/// Dirichlet closure.
#[derive(Clone, Debug)]
pub struct Laplacian {
    grid: Grid,
}

pub fn assemble_laplacian(grid: &Grid) -> Laplacian {
    Laplacian { grid: grid.clone() }
}

impl Laplacian {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let m = g.m();
        assert_eq!(u.len(), g.len());
        assert_eq!(out.len(), g.len());
        if g.dim == 1 {
            let ih2 = 1.0 / (g.h(0) * g.h(0));
            for i in 0..m {
                let l = if i > 0 { u[i - 1] } else { 0.0 };
                let r = if i + 1 < m { u[i + 1] } else { 0.0 };
                out[i] = (l - 2.0 * u[i] + r) * ih2;
            }
        } else {
            let ix = 1.0 / (g.h(0) * g.h(0));
            let iy = 1.0 / (g.h(1) * g.h(1));
            for j in 0..m {
                for i in 0..m {
                    let k = i + m * j;
                    let c = u[k];
                    let w = if i > 0 { u[k - 1] } else { 0.0 };
                    let e = if i + 1 < m { u[k + 1] } else { 0.0 };
                    let s = if j > 0 { u[k - m] } else { 0.0 };
                    let n = if j + 1 < m { u[k + m] } else { 0.0 };
                    out[k] = (w - 2.0 * c + e) * ix + (s - 2.0 * c + n) * iy;
                }
            }
        }
    }

    /// Diagonal entry of the stencil.
    pub fn diagonal(&self) -> f64 {
        (0..self.grid.dim)
            .map(|ax| -2.0 / (self.grid.h(ax) * self.grid.h(ax)))
            .sum()
    }
}

/// Solver for `(c I − D Δ_h) u = r` with fixed `c > 0`, `D > 0`.
#[derive(Clone, Debug)]
pub struct ShiftedSystem {
    lap: Laplacian,
    shift: f64,
    diffusivity: f64,
    kind: SolverKind,
}

#[derive(Clone, Debug)]
enum SolverKind {
    /// Forward-eliminated tridiagonal factors: modified diagonal and
    /// the constant off-diagonal.
    Thomas {
        dprime: Vec<f64>,
        off: f64,
    },
    Cg {
        tol: f64,
        max_iter: usize,
    },
}

impl ShiftedSystem {
    pub fn new(grid: &Grid, shift: f64, diffusivity: f64) -> Self {
        let lap = assemble_laplacian(grid);
        let kind = if grid.dim == 1 {
            let m = grid.m();
            let ih2 = 1.0 / (grid.h(0) * grid.h(0));
            let diag = shift + 2.0 * diffusivity * ih2;
            let off = -diffusivity * ih2;
            let mut dprime = vec![diag; m];
            for i in 1..m {
                dprime[i] = diag - off * off / dprime[i - 1];
            }
            SolverKind::Thomas { dprime, off }
        } else {
            SolverKind::Cg {
                tol: 1e-10,
                max_iter: 10 * grid.len() + 100,
            }
        };
        Self {
            lap,
            shift,
            diffusivity,
            kind,
        }
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.lap.apply(u, out);
        for (o, &x) in out.iter_mut().zip(u) {
            *o = self.shift * x - self.diffusivity * *o;
        }
    }

    /// Solve in place; `u` holds the initial guess on entry (CG warm start).
    pub fn solve(&self, rhs: &[f64], u: &mut [f64]) -> Result<()> {
        match &self.kind {
            SolverKind::Thomas { dprime, off } => {
                let m = rhs.len();
                u[0] = rhs[0];
                for i in 1..m {
                    u[i] = rhs[i] - off / dprime[i - 1] * u[i - 1];
                }
                u[m - 1] /= dprime[m - 1];
                for i in (0..m - 1).rev() {
                    u[i] = (u[i] - off * u[i + 1]) / dprime[i];
                }
                Ok(())
            }
            SolverKind::Cg { tol, max_iter } => self.pcg(rhs, u, *tol, *max_iter),
        }
    }

    fn pcg(&self, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<()> {
        let n = b.len();
        let inv_diag = 1.0 / (self.shift - self.diffusivity * self.lap.diagonal());
        let bnorm = norm(b);
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(());
        }
        let mut r = vec![0.0; n];
        self.apply(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let mut z: Vec<f64> = r.iter().map(|v| v * inv_diag).collect();
        let mut p = z.clone();
        let mut q = vec![0.0; n];
        let mut rz = dot(&r, &z);
        for _ in 0..max_iter {
            if norm(&r) <= tol * bnorm {
                return Ok(());
            }
            self.apply(&p, &mut q);
            let a = rz / dot(&p, &q);
            for i in 0..n {
                x[i] += a * p[i];
                r[i] -= a * q[i];
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag;
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let res = norm(&r) / bnorm;
        if res <= tol {
            Ok(())
        } else {
            Err(Error::Numerical(format!(
                "conjugate gradient stalled at relative residual {res:.3e}"
            )))
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
