//! Isoperimetric quantities of parallel loops.
//!
//! Two Cheeger quotients are tracked for every parallel: the sum form
//! `h_sum = L·(1/A₊ + 1/A₋)` and the min form `h_min = L/min(A₊, A₋)`.
//! They satisfy `h_min ≤ h_sum ≤ 2·h_min`. The sum form drives all evolution
//! work; the min form is the one compared with the `16/√A` area bound.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::surface::{SurfaceGeometry, SurfaceProfile};

/// Relative slack allowed when comparing `h_min` with `16/√A`.
pub const AREA_BOUND_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelLoopStats {
    pub node_index: usize,
    pub theta: f64,
    pub rho: f64,
    pub length: f64,
    pub area_plus: f64,
    pub area_minus: f64,
    /// Total geodesic curvature of the loop.
    pub gamma_total: f64,
    pub h_sum: f64,
    pub h_min: f64,
    /// `L²·(1/A₊ + 1/A₋)`, computed as `h_sum·L`.
    pub hamilton_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheegerMinimizer {
    pub stats: ParallelLoopStats,
    /// Vertex of the parabola through the three `h_sum` samples around the
    /// grid minimizer, clamped to the neighbouring nodes.
    pub refined_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaBoundCheck {
    pub bound: f64,
    pub h_min_global: f64,
    pub satisfied: bool,
}

impl SurfaceGeometry {
    /// Stats of the parallel at node `i`; rejects poles.
    pub fn loop_stats(&self, i: usize) -> Result<ParallelLoopStats> {
        self.check_interior(i)?;
        Ok(self.loop_stats_unchecked(i))
    }

    fn loop_stats_unchecked(&self, i: usize) -> ParallelLoopStats {
        let length = self.circumference()[i];
        let area_plus = self.area_plus()[i];
        let area_minus = self.area_minus(i);
        let h_sum = length * (1.0 / area_plus + 1.0 / area_minus);
        ParallelLoopStats {
            node_index: i,
            theta: self.grid().theta(i),
            rho: self.arclength()[i],
            length,
            area_plus,
            area_minus,
            gamma_total: self.gamma()[i],
            h_sum,
            h_min: length / area_plus.min(area_minus),
            hamilton_ratio: h_sum * length,
        }
    }

    /// `h_sum` at every interior node (index `j` ↔ node `j+1`).
    pub fn h_sum_profile(&self) -> Vec<f64> {
        self.grid()
            .interior()
            .map(|i| self.loop_stats_unchecked(i).h_sum)
            .collect()
    }

    pub fn global_cheeger(&self) -> CheegerMinimizer {
        let grid = self.grid();
        let mut best = grid.interior().start;
        let mut best_h = f64::INFINITY;
        let mut h = vec![f64::NAN; grid.len()];
        for i in grid.interior() {
            h[i] = self.loop_stats_unchecked(i).h_sum;
            // Strict comparison keeps the smallest θ on ties.
            if h[i] < best_h {
                best_h = h[i];
                best = i;
            }
        }
        let stats = self.loop_stats_unchecked(best);
        let spacing = grid.spacing();
        let refined_theta = if grid.is_pole(best - 1) || grid.is_pole(best + 1) {
            stats.theta
        } else {
            let (left, mid, right) = (h[best - 1], h[best], h[best + 1]);
            let curvature = left - 2.0 * mid + right;
            if curvature > 0.0 {
                let offset = 0.5 * (left - right) / curvature;
                stats.theta + offset.clamp(-1.0, 1.0) * spacing
            } else {
                stats.theta
            }
        };
        CheegerMinimizer {
            stats,
            refined_theta,
        }
    }

    /// Smallest min-form quotient over all interior parallels.
    pub fn h_min_global(&self) -> f64 {
        self.grid()
            .interior()
            .map(|i| self.loop_stats_unchecked(i).h_min)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn area_bound(&self) -> AreaBoundCheck {
        let bound = 16.0 / self.total_area().sqrt();
        let h_min_global = self.h_min_global();
        AreaBoundCheck {
            bound,
            h_min_global,
            satisfied: h_min_global <= bound * (1.0 + AREA_BOUND_SLACK),
        }
    }
}

pub fn loop_stats(p: &SurfaceProfile, i: usize) -> Result<ParallelLoopStats> {
    SurfaceGeometry::new(p)?.loop_stats(i)
}

/// Total geodesic curvature `Γ` of the parallel at interior node `i`.
pub fn gamma_geodesic(p: &SurfaceProfile, i: usize) -> Result<f64> {
    let g = SurfaceGeometry::new(p)?;
    g.check_interior(i)?;
    Ok(g.gamma()[i])
}

/// Parallel minimizing `h_sum`.
pub fn global_cheeger(p: &SurfaceProfile) -> Result<CheegerMinimizer> {
    Ok(SurfaceGeometry::new(p)?.global_cheeger())
}

/// Compares the min-form Cheeger constant with `16/√A`.
pub fn papasoglu_bound(p: &SurfaceProfile) -> Result<AreaBoundCheck> {
    Ok(SurfaceGeometry::new(p)?.area_bound())
}
