//! Uniform polar-angle grid on `[0, π]`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Coarsest accepted grid. Below this the pole stencils dominate the error.
pub const MIN_INTERVALS: usize = 16;

/// Nodes `θ_i = i·π/n` for `i = 0..=n`; nodes `0` and `n` are the poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GridSpec {
    n_intervals: usize,
}

impl GridSpec {
    pub fn new(n_intervals: usize) -> Result<Self> {
        if n_intervals < MIN_INTERVALS {
            return Err(Error::GridTooCoarse {
                n_intervals,
                min: MIN_INTERVALS,
            });
        }
        Ok(Self { n_intervals })
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// Number of nodes, `n_intervals + 1`.
    pub fn len(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the last node (the south pole).
    pub fn last(&self) -> usize {
        self.n_intervals
    }

    pub fn spacing(&self) -> f64 {
        PI / self.n_intervals as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.theta(i)).collect()
    }

    /// `sin θ_i`, exactly zero at the poles and exactly mirror-symmetric.
    pub fn sin_theta(&self, i: usize) -> f64 {
        let m = i.min(self.n_intervals - i);
        if m == 0 {
            0.0
        } else {
            (m as f64 * self.spacing()).sin()
        }
    }

    /// `cos θ_i`, exactly antisymmetric under `i ↦ n − i`.
    pub fn cos_theta(&self, i: usize) -> f64 {
        let m = i.min(self.n_intervals - i);
        let c = if 2 * m == self.n_intervals {
            0.0
        } else {
            (m as f64 * self.spacing()).cos()
        };
        if i > self.n_intervals - i {
            -c
        } else {
            c
        }
    }

    pub fn is_pole(&self, i: usize) -> bool {
        i == 0 || i == self.n_intervals
    }

    /// Interior node indices `1..n`.
    pub fn interior(&self) -> std::ops::Range<usize> {
        1..self.n_intervals
    }

    /// The equator node, present only for an even number of intervals.
    pub fn equator(&self) -> Option<usize> {
        self.n_intervals.is_multiple_of(2).then_some(self.n_intervals / 2)
    }

    /// The node `n − i` reflected through the equator.
    pub fn mirror(&self, i: usize) -> usize {
        self.n_intervals - i
    }

    /// Grid with twice as many intervals.
    pub fn refined(&self) -> Self {
        Self {
            n_intervals: 2 * self.n_intervals,
        }
    }
}

impl TryFrom<usize> for GridSpec {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<GridSpec> for usize {
    fn from(g: GridSpec) -> usize {
        g.n_intervals
    }
}
