use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform tensor grid on an interval or rectangle. `n` intervals per axis;
/// the `n - 1` interior nodes per axis carry the unknowns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub extents: Vec<(f64, f64)>,
    pub n: usize,
}

impl Grid {
    pub fn line(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(vec![(a, b)], n)
    }

    pub fn rect(x: (f64, f64), y: (f64, f64), n: usize) -> Result<Self> {
        Self::new(vec![x, y], n)
    }

    pub fn new(extents: Vec<(f64, f64)>, n: usize) -> Result<Self> {
        if extents.is_empty() || extents.len() > 2 {
            return Err(Error::Config(format!(
                "grid dimension must be 1 or 2, got {}",
                extents.len()
            )));
        }
        if n < 3 {
            return Err(Error::Config(format!(
                "grid needs at least 3 intervals per axis, got {n}"
            )));
        }
        for &(a, b) in &extents {
            if !(b > a) || !a.is_finite() || !b.is_finite() {
                return Err(Error::Config(format!("invalid grid extent ({a}, {b})")));
            }
        }
        Ok(Self {
            dim: extents.len(),
            extents,
            n,
        })
    }

    pub fn h(&self, axis: usize) -> f64 {
        let (a, b) = self.extents[axis];
        (b - a) / self.n as f64
    }

    /// Interior nodes per axis.
    pub fn m(&self) -> usize {
        self.n - 1
    }

    pub fn len(&self) -> usize {
        self.m().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|ax| self.h(ax)).product()
    }

    /// Coordinate of interior node `i` (0-based) along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.extents[axis].0 + (i + 1) as f64 * self.h(axis)
    }

    /// Flat index → per-axis interior indices.
    pub fn split(&self, idx: usize) -> [usize; 2] {
        let m = self.m();
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx % m, idx / m]
        }
    }

    pub fn flat(&self, i: usize, j: usize) -> usize {
        i + self.m() * j
    }

    /// Physical coordinates of a flat index.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let ij = self.split(idx);
        (0..self.dim).map(|ax| self.coord(ax, ij[ax])).collect()
    }

    /// Interior index nearest to `x` along `axis`, if the nearest node is interior.
    pub fn nearest(&self, axis: usize, x: f64) -> Option<usize> {
        let g = ((x - self.extents[axis].0) / self.h(axis)).round();
        if g >= 1.0 && g <= (self.n - 1) as f64 {
            Some(g as usize - 1)
        } else {
            None
        }
    }
}
