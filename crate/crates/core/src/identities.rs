//! Numerical verification of the evolution equations along the flow.
//!
//! Under Ricci flow the parallel-loop quantities obey
//!
//! ```text
//! ∂t log L  = ∂ρ² log L  + (Γ/L) ∂ρ log L
//! ∂t log A± = ∂ρ² log A± + L²/A±² − 4π/A± + (Γ/L) ∂ρ log A±
//! d/dt log A = −8π/A
//! ∂t log h  = ∂ρ² log h  + (Γ/L) ∂ρ log h + ((4π − hL)/A)(A₊/A₋ + A₋/A₊)
//! ```
//!
//! with `h` the sum-form Cheeger quotient. Each identity holds exactly for
//! smooth axisymmetric metrics, so the discrete left-minus-right residual
//! measures discretization error only and must vanish at second order.
//! Time derivatives are taken along fixed parallels (fixed `θ`).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::calculus::{self, rho_derivatives};
use crate::error::{parameter, Error, Result};
use crate::flow::StopReason;
use crate::grid::GridSpec;
use crate::loops::ParallelLoopStats;
use crate::quadrature;
use crate::surface::{SurfaceGeometry, SurfaceProfile};

/// Relative guard keeping the round sphere (`hL = 4π` exactly) off the threshold.
pub const THRESHOLD_GUARD: f64 = 1e-9;

/// Default window `[0.2, π − 0.2]` for residual norms, away from the pole stencils.
pub const RESIDUAL_WINDOW: (f64, f64) = (0.2, PI - 0.2);

/// Global isoperimetric observables at one instant of a flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub area: f64,
    pub h_sum_global: f64,
    pub h_min_global: f64,
    pub argmin_theta: f64,
    pub length_at_min: f64,
    pub gamma_at_min: f64,
    pub hamilton_at_min: f64,
    pub dh_dt: f64,
    /// `hamilton_at_min < 4π`, with a relative guard of [`THRESHOLD_GUARD`].
    pub threshold_ok: bool,
    /// `h_min_global ≤ 16/√A` within [`crate::loops::AREA_BOUND_SLACK`].
    pub papasoglu_ok: bool,
}

impl TraceRecord {
    /// Observables of `geom` at time `t`; `dh_dt` is filled in by [`FlowTrace`].
    pub fn observe(geom: &SurfaceGeometry, t: f64) -> Self {
        let min = geom.global_cheeger().stats;
        let bound = geom.area_bound();
        Self {
            t,
            area: geom.total_area(),
            h_sum_global: min.h_sum,
            h_min_global: bound.h_min_global,
            argmin_theta: min.theta,
            length_at_min: min.length,
            gamma_at_min: min.gamma_total,
            hamilton_at_min: min.hamilton_ratio,
            dh_dt: 0.0,
            threshold_ok: min.hamilton_ratio < 4.0 * PI * (1.0 - THRESHOLD_GUARD),
            papasoglu_ok: bound.satisfied,
        }
    }
}

pub fn observe(p: &SurfaceProfile) -> Result<TraceRecord> {
    Ok(TraceRecord::observe(&SurfaceGeometry::new(p)?, p.time()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    records: Vec<TraceRecord>,
    stop_reason: Option<StopReason>,
}

impl FlowTrace {
    /// Builds a trace and fills `dh_dt`: centered three-point differences on
    /// the nonuniform time grid, one-sided second order at the ends.
    pub fn from_records(mut records: Vec<TraceRecord>, stop_reason: Option<StopReason>) -> Self {
        let h: Vec<f64> = records.iter().map(|r| r.h_sum_global).collect();
        let t: Vec<f64> = records.iter().map(|r| r.t).collect();
        let n = records.len();
        for (k, record) in records.iter_mut().enumerate() {
            record.dh_dt = match n {
                0 | 1 => 0.0,
                2 => (h[1] - h[0]) / (t[1] - t[0]),
                _ => {
                    let j = k.clamp(1, n - 2);
                    let a = t[j] - t[j - 1];
                    let b = t[j + 1] - t[j];
                    let (f0, f1, f2) = (h[j - 1], h[j], h[j + 1]);
                    if k == 0 {
                        -(2.0 * a + b) / (a * (a + b)) * f0 + (a + b) / (a * b) * f1
                            - a / (b * (a + b)) * f2
                    } else if k == n - 1 {
                        b / (a * (a + b)) * f0 - (a + b) / (a * b) * f1
                            + (2.0 * b + a) / (b * (a + b)) * f2
                    } else {
                        -b / (a * (a + b)) * f0 + (b - a) / (a * b) * f1 + a / (b * (a + b)) * f2
                    }
                }
            };
        }
        Self {
            records,
            stop_reason,
        }
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop_reason
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }
}

/// Nodewise left-minus-right values of one identity over interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub grid_n: usize,
    pub theta: Vec<f64>,
    pub per_node: Vec<f64>,
    pub sup_norm: f64,
    /// `sqrt(Δθ·Σ r²)`.
    pub l2_norm: f64,
}

impl ResidualReport {
    fn new(name: &str, grid: &GridSpec, theta: Vec<f64>, per_node: Vec<f64>) -> Self {
        let sup_norm = per_node.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        let l2_norm = (grid.spacing() * per_node.iter().map(|r| r * r).sum::<f64>()).sqrt();
        Self {
            name: name.to_string(),
            grid_n: grid.n_intervals(),
            theta,
            per_node,
            sup_norm,
            l2_norm,
        }
    }

    /// The same report restricted to nodes with `lo ≤ θ ≤ hi`.
    pub fn windowed(&self, lo: f64, hi: f64) -> Self {
        let (theta, per_node) = self
            .theta
            .iter()
            .zip(&self.per_node)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(t, r)| (*t, *r))
            .unzip();
        let grid = GridSpec::new(self.grid_n).expect("report built from a valid grid");
        Self::new(&self.name, &grid, theta, per_node)
    }

    pub fn in_default_window(&self) -> Self {
        self.windowed(RESIDUAL_WINDOW.0, RESIDUAL_WINDOW.1)
    }
}

fn interior_thetas(grid: &GridSpec) -> Vec<f64> {
    grid.interior().map(|i| grid.theta(i)).collect()
}

/// Smooth remainders `log A± − log(round cap area)`, with their pole limits.
fn cap_remainders(geom: &SurfaceGeometry) -> (Vec<f64>, Vec<f64>) {
    let grid = geom.grid();
    let n = grid.last();
    let u = geom.u();
    let log_a = (geom.total_area() / (4.0 * PI)).ln();
    let mut plus = vec![0.0; grid.len()];
    let mut minus = vec![0.0; grid.len()];
    plus[0] = 2.0 * u[0];
    minus[0] = log_a;
    plus[n] = log_a;
    minus[n] = 2.0 * u[n];
    for i in grid.interior() {
        let half = 0.5 * grid.theta(i);
        let (s, c) = (half.sin(), half.cos());
        plus[i] = geom.area_plus()[i].ln() - (4.0 * PI * s * s).ln();
        minus[i] = geom.area_minus(i).ln() - (4.0 * PI * c * c).ln();
    }
    (plus, minus)
}

impl SurfaceGeometry {
    fn gamma_over_length(&self, i: usize) -> f64 {
        self.gamma()[i] / self.circumference()[i]
    }

    /// Residual of the parallel-length evolution at interior nodes.
    pub fn length_evolution_residual(&self) -> ResidualReport {
        let grid = self.grid();
        // log L = log 2π + log sinθ + u
        let d = rho_derivatives(self, calculus::log_sin, self.u());
        let per_node = grid
            .interior()
            .enumerate()
            .map(|(j, i)| {
                let lhs = -self.curvature()[i];
                let rhs = d.second[j] + self.gamma_over_length(i) * d.first[j];
                lhs - rhs
            })
            .collect();
        ResidualReport::new("length_evolution", grid, interior_thetas(grid), per_node)
    }

    /// Residuals of the two cap-area evolutions at interior nodes.
    ///
    /// The left sides use Gauss–Bonnet on each cap, `∂t A₊ = 2Γ − 4π` and
    /// `∂t A₋ = −2Γ − 4π`.
    pub fn cap_area_evolution_residuals(&self) -> (ResidualReport, ResidualReport) {
        let grid = self.grid();
        let (rem_plus, rem_minus) = cap_remainders(self);
        let dp = rho_derivatives(self, calculus::log_north_cap, &rem_plus);
        let dm = rho_derivatives(self, calculus::log_south_cap, &rem_minus);
        let mut plus = Vec::with_capacity(dp.first.len());
        let mut minus = Vec::with_capacity(dp.first.len());
        for (j, i) in grid.interior().enumerate() {
            let length = self.circumference()[i];
            let gamma = self.gamma()[i];
            let ratio = self.gamma_over_length(i);
            for (area, sign, d, out) in [
                (self.area_plus()[i], 1.0, &dp, &mut plus),
                (self.area_minus(i), -1.0, &dm, &mut minus),
            ] {
                let lhs = (sign * 2.0 * gamma - 4.0 * PI) / area;
                let rhs = d.second[j] + length * length / (area * area) - 4.0 * PI / area
                    + ratio * d.first[j];
                out.push(lhs - rhs);
            }
        }
        let theta = interior_thetas(grid);
        (
            ResidualReport::new("cap_area_evolution_plus", grid, theta.clone(), plus),
            ResidualReport::new("cap_area_evolution_minus", grid, theta, minus),
        )
    }

    /// Both sides of the heat-type equation for `log h` at interior nodes.
    ///
    /// The left side is the material derivative of the discrete quotient:
    /// `∂t log L = −K`, and each area derivative is the quadrature of
    /// `∂t e^{2u} = −2K e^{2u}` over the corresponding region.
    pub fn heat_equation_balance(&self) -> HeatBalance {
        let grid = self.grid();
        let n = grid.last();
        let u = self.u();
        let area = self.total_area();

        let rate_weight: Vec<f64> = self
            .curvature()
            .iter()
            .zip(u)
            .map(|(k, u)| -2.0 * k * (2.0 * u).exp())
            .collect();
        let rate_plus: Vec<f64> = quadrature::cumulative_sin_weighted(grid, &rate_weight)
            .into_iter()
            .map(|v| 2.0 * PI * v)
            .collect();
        let rate_total = rate_plus[n];

        let (rem_plus, rem_minus) = cap_remainders(self);
        let log_a = (area / (4.0 * PI)).ln();
        // log h = log L − log A₊ − log A₋ + log A, whose round part is log(2/sinθ).
        let remainder: Vec<f64> = (0..=n)
            .map(|i| u[i] - rem_plus[i] - rem_minus[i] + log_a)
            .collect();
        let d = rho_derivatives(self, calculus::neg_log_sin, &remainder);

        let mut lhs = Vec::with_capacity(n - 1);
        let mut rhs = Vec::with_capacity(n - 1);
        for (j, i) in grid.interior().enumerate() {
            let a_plus = self.area_plus()[i];
            let a_minus = self.area_minus(i);
            let rate_minus = rate_total - rate_plus[i];
            lhs.push(
                -self.curvature()[i] - rate_plus[i] / a_plus - rate_minus / a_minus
                    + rate_total / area,
            );
            let length = self.circumference()[i];
            let h = length * (1.0 / a_plus + 1.0 / a_minus);
            let reaction = (4.0 * PI - h * length) / area * (a_plus / a_minus + a_minus / a_plus);
            rhs.push(d.second[j] + self.gamma_over_length(i) * d.first[j] + reaction);
        }
        HeatBalance {
            grid_n: grid.n_intervals(),
            theta: interior_thetas(grid),
            lhs,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatBalance {
    pub grid_n: usize,
    pub theta: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl HeatBalance {
    pub fn residual(&self) -> ResidualReport {
        let grid = GridSpec::new(self.grid_n).expect("balance built from a valid grid");
        let per_node = self.lhs.iter().zip(&self.rhs).map(|(l, r)| l - r).collect();
        ResidualReport::new("heat_equation", &grid, self.theta.clone(), per_node)
    }
}

pub fn length_evolution_residual(p: &SurfaceProfile) -> Result<ResidualReport> {
    Ok(SurfaceGeometry::new(p)?.length_evolution_residual())
}

pub fn cap_area_evolution_residuals(
    p: &SurfaceProfile,
) -> Result<(ResidualReport, ResidualReport)> {
    Ok(SurfaceGeometry::new(p)?.cap_area_evolution_residuals())
}

/// `(plus, minus)` cap-area residuals at one interior node.
pub fn cap_area_evolution_residual(p: &SurfaceProfile, i: usize) -> Result<(f64, f64)> {
    let geom = SurfaceGeometry::new(p)?;
    geom.check_interior(i)?;
    let (plus, minus) = geom.cap_area_evolution_residuals();
    Ok((plus.per_node[i - 1], minus.per_node[i - 1]))
}

pub fn heat_equation_balance(p: &SurfaceProfile) -> Result<HeatBalance> {
    Ok(SurfaceGeometry::new(p)?.heat_equation_balance())
}

pub fn heat_equation_residual(p: &SurfaceProfile) -> Result<ResidualReport> {
    Ok(heat_equation_balance(p)?.residual())
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(parameter(name, value, "(0, ∞)"))
    }
}

/// `4π/A₊ + 4π/A₋ − 8π/A` and `(4π/A)(A₊/A₋ + A₋/A₊)` with `A = A₊ + A₋`.
pub fn cap_balance_identity(area_plus: f64, area_minus: f64) -> Result<(f64, f64)> {
    positive("area_plus", area_plus)?;
    positive("area_minus", area_minus)?;
    let area = area_plus + area_minus;
    let bracket = area_plus / area_minus + area_minus / area_plus;
    let lhs = 4.0 * PI / area_plus + 4.0 * PI / area_minus - 8.0 * PI / area;
    let rhs = 4.0 * PI / area * bracket;
    Ok((lhs, rhs))
}

/// `L²/A₊² + L²/A₋²`, `(L²/(A₊A₋))·B` and `(hL/A)·B`, where
/// `B = A₊/A₋ + A₋/A₊` and `h = L(1/A₊ + 1/A₋)`.
pub fn length_ratio_identity(
    length: f64,
    area_plus: f64,
    area_minus: f64,
) -> Result<(f64, f64, f64)> {
    positive("length", length)?;
    positive("area_plus", area_plus)?;
    positive("area_minus", area_minus)?;
    let area = area_plus + area_minus;
    let bracket = area_plus / area_minus + area_minus / area_plus;
    let l2 = length * length;
    let lhs = l2 / (area_plus * area_plus) + l2 / (area_minus * area_minus);
    let mid = l2 / (area_plus * area_minus) * bracket;
    let h = length * (1.0 / area_plus + 1.0 / area_minus);
    let rhs = h * length / area * bracket;
    Ok((lhs, mid, rhs))
}

/// Zeroth-order term `((4π − hL)/A)(A₊/A₋ + A₋/A₊)` of the heat-type equation.
///
/// Positive exactly when the Hamilton ratio of the loop is below `4π`; then
/// `log h` is a supersolution at that loop.
pub fn supersolution_term(stats: &ParallelLoopStats, total_area: f64) -> f64 {
    let bracket = stats.area_plus / stats.area_minus + stats.area_minus / stats.area_plus;
    (4.0 * PI - stats.hamilton_ratio) / total_area * bracket
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    /// Index of the earlier record of the pair.
    pub index: usize,
    pub t_before: f64,
    pub t_after: f64,
    pub h_before: f64,
    pub h_after: f64,
}

/// Consecutive pairs where the threshold held at the earlier record and
/// `h_sum_global` fell by more than `tol·h`.
pub fn monotonicity_check(trace: &FlowTrace, tol: f64) -> Vec<MonotonicityViolation> {
    trace
        .records()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].threshold_ok && w[1].h_sum_global < w[0].h_sum_global * (1.0 - tol))
        .map(|(index, w)| MonotonicityViolation {
            index,
            t_before: w[0].t,
            t_after: w[1].t,
            h_before: w[0].h_sum_global,
            h_after: w[1].h_sum_global,
        })
        .collect()
}

/// Residuals at or below this sup norm count as identically zero. On round
/// spheres the cap-area residuals bottom out near `1e-9`, where rounding in
/// `log A±` dominates and no rate can be measured.
pub const EXACT_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum OrderEstimate {
    Order(f64),
    /// Some residual vanished to rounding; no rate can be measured.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub grids: Vec<usize>,
    pub sup_norms: Vec<f64>,
    pub estimate: OrderEstimate,
}

/// Least-squares slope of `log sup_norm` against `log Δθ` over successively
/// doubled grids.
pub fn convergence_order<R, F>(residual: R, family: F, grids: &[usize]) -> Result<ConvergenceStudy>
where
    R: Fn(&SurfaceProfile) -> Result<ResidualReport>,
    F: Fn(GridSpec) -> Result<SurfaceProfile>,
{
    if grids.len() < 2 {
        return Err(Error::Degenerate(format!(
            "convergence study needs at least two grids, got {}",
            grids.len()
        )));
    }
    if let Some(w) = grids.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(Error::Degenerate(format!(
            "grid sizes must double: {} then {}",
            w[0], w[1]
        )));
    }
    let mut sup_norms = Vec::with_capacity(grids.len());
    for &n in grids {
        let grid = GridSpec::new(n)?;
        sup_norms.push(residual(&family(grid)?)?.sup_norm);
    }
    let estimate = if sup_norms.iter().any(|&s| s <= EXACT_RESIDUAL) {
        OrderEstimate::Exact
    } else {
        let xs: Vec<f64> = grids.iter().map(|&n| (PI / n as f64).ln()).collect();
        let ys: Vec<f64> = sup_norms.iter().map(|s| s.ln()).collect();
        let m = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / m;
        let my = ys.iter().sum::<f64>() / m;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        OrderEstimate::Order(sxy / sxx)
    };
    Ok(ConvergenceStudy {
        grids: grids.to_vec(),
        sup_norms,
        estimate,
    })
}
