//! Rotationally symmetric metrics on the 2-sphere.
//!
//! A metric is stored as an axisymmetric conformal exponent `u(θ)` over the
//! round unit sphere, `g = e^{2u}(dθ² + sin²θ dφ²)`, sampled on a fixed polar
//! grid. Everything else (curvature, parallel lengths, cap areas, meridian
//! arclength) is derived from those samples.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::quadrature;

/// Largest accepted one-sided slope `|u_θ|` at a pole.
pub const POLE_SLOPE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceProfile {
    grid: GridSpec,
    u: Vec<f64>,
    time: f64,
}

impl SurfaceProfile {
    /// Wraps samples without checking them; see [`validate_profile`].
    pub fn new(grid: GridSpec, u: Vec<f64>, time: f64) -> Self {
        Self { grid, u, time }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let u = (0..grid.len()).map(|i| f(grid.theta(i))).collect();
        Self::new(grid, u, 0.0)
    }

    /// The round sphere of the given radius.
    pub fn round(grid: GridSpec, radius: f64) -> Self {
        Self::new(grid, vec![radius.ln(); grid.len()], 0.0)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// `u + c`: a homothety of the metric by `e^c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self::new(self.grid, self.u.iter().map(|v| v + c).collect(), self.time)
    }

    /// Reflection `θ ↦ π − θ`.
    pub fn mirrored(&self) -> Self {
        let mut u = self.u.clone();
        u.reverse();
        Self::new(self.grid, u, self.time)
    }

    pub fn validated(self) -> Result<Self> {
        let report = validate_profile(&self);
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidProfile(report.violations))
        }
    }
}

/// One failed invariant of a [`SurfaceProfile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    LengthMismatch {
        expected: usize,
        actual: usize,
    },
    NonFinite {
        node: usize,
        value: f64,
    },
    NonFiniteTime {
        value: f64,
    },
    PoleSlope {
        node: usize,
        slope: f64,
        tolerance: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch { expected, actual } => {
                write!(f, "length: {actual} samples, grid has {expected} nodes")
            }
            Violation::NonFinite { node, value } => {
                write!(f, "finite: u[{node}] = {value}")
            }
            Violation::NonFiniteTime { value } => write!(f, "finite: time = {value}"),
            Violation::PoleSlope {
                node,
                slope,
                tolerance,
            } => write!(
                f,
                "pole regularity: |u_θ| = {:.3e} at node {node} exceeds {tolerance:e}",
                slope.abs()
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks sample count, finiteness and pole regularity.
///
/// The pole slope is the one-sided second-order difference
/// `(−3u₀ + 4u₁ − u₂)/(2h)` (mirrored at the south pole); it is only examined
/// once the samples are otherwise well formed.
pub fn validate_profile(p: &SurfaceProfile) -> ValidationReport {
    let grid = p.grid;
    let mut violations = Vec::new();
    if p.u.len() != grid.len() {
        violations.push(Violation::LengthMismatch {
            expected: grid.len(),
            actual: p.u.len(),
        });
        return ValidationReport { violations };
    }
    if !p.time.is_finite() {
        violations.push(Violation::NonFiniteTime { value: p.time });
    }
    for (node, &value) in p.u.iter().enumerate() {
        if !value.is_finite() {
            violations.push(Violation::NonFinite { node, value });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    let h = grid.spacing();
    let n = grid.last();
    let u = &p.u;
    let north = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    let south = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
    for (node, slope) in [(0, north), (n, south)] {
        if slope.abs() > POLE_SLOPE_TOL {
            violations.push(Violation::PoleSlope {
                node,
                slope,
                tolerance: POLE_SLOPE_TOL,
            });
        }
    }
    ValidationReport { violations }
}

/// Round-sphere Laplacian `Δ̂u = u_θθ + cotθ·u_θ` of axisymmetric samples.
///
/// Interior nodes use centered second-order differences. At the poles the
/// ghost node `u₋₁ = u₁` enforces `u_θ = 0` and the removable singularity is
/// replaced by its limit `2u_θθ`.
pub(crate) fn round_laplacian(grid: &GridSpec, u: &[f64], out: &mut [f64]) {
    let n = grid.last();
    let h = grid.spacing();
    let h2 = h * h;
    out[0] = 4.0 * (u[1] - u[0]) / h2;
    out[n] = 4.0 * (u[n - 1] - u[n]) / h2;
    for i in 1..n {
        let second = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
        let first = (u[i + 1] - u[i - 1]) / (2.0 * h);
        out[i] = second + grid.cos_theta(i) / grid.sin_theta(i) * first;
    }
}

/// Gaussian curvature `K = e^{−2u}(1 − Δ̂u)` of raw samples.
pub(crate) fn curvature_into(grid: &GridSpec, u: &[f64], out: &mut [f64]) {
    round_laplacian(grid, u, out);
    for (k, &ui) in out.iter_mut().zip(u) {
        *k = (-2.0 * ui).exp() * (1.0 - *k);
    }
}

/// Every derived quantity of a valid profile, computed once.
#[derive(Debug, Clone)]
pub struct SurfaceGeometry {
    grid: GridSpec,
    u: Vec<f64>,
    u_theta: Vec<f64>,
    curvature: Vec<f64>,
    circumference: Vec<f64>,
    gamma: Vec<f64>,
    arclength: Vec<f64>,
    area_plus: Vec<f64>,
    total_area: f64,
}

impl SurfaceGeometry {
    pub fn new(p: &SurfaceProfile) -> Result<Self> {
        let report = validate_profile(p);
        if !report.is_valid() {
            return Err(Error::InvalidProfile(report.violations));
        }
        Ok(Self::from_valid(p))
    }

    pub(crate) fn from_valid(p: &SurfaceProfile) -> Self {
        let grid = p.grid;
        let n = grid.last();
        let h = grid.spacing();
        let u = p.u.clone();

        let mut u_theta = vec![0.0; grid.len()];
        for i in 1..n {
            u_theta[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        }

        let mut curvature = vec![0.0; grid.len()];
        curvature_into(&grid, &u, &mut curvature);

        let exp_u: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let circumference = (0..=n)
            .map(|i| 2.0 * PI * exp_u[i] * grid.sin_theta(i))
            .collect();
        let gamma = (0..=n)
            .map(|i| 2.0 * PI * (grid.cos_theta(i) + u_theta[i] * grid.sin_theta(i)))
            .collect();

        let slopes: Vec<f64> = exp_u.iter().zip(&u_theta).map(|(e, d)| e * d).collect();
        let arclength = quadrature::cumulative(&grid, &exp_u, &slopes);

        let exp_2u: Vec<f64> = exp_u.iter().map(|e| e * e).collect();
        let area_plus: Vec<f64> = quadrature::cumulative_sin_weighted(&grid, &exp_2u)
            .into_iter()
            .map(|a| 2.0 * PI * a)
            .collect();
        let total_area = area_plus[n];

        Self {
            grid,
            u,
            u_theta,
            curvature,
            circumference,
            gamma,
            arclength,
            area_plus,
            total_area,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// Centered `u_θ`; zero at the poles by symmetry.
    pub fn u_theta(&self) -> &[f64] {
        &self.u_theta
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.curvature.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// Parallel lengths `L = 2π e^u sinθ`.
    pub fn circumference(&self) -> &[f64] {
        &self.circumference
    }

    /// Total geodesic curvature `Γ = 2π(cosθ + u_θ sinθ)` of each parallel,
    /// oriented so that `Γ = dL/dρ`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Meridian arclength `ρ` from the north pole.
    pub fn arclength(&self) -> &[f64] {
        &self.arclength
    }

    /// Area of the cap north of each parallel.
    pub fn area_plus(&self) -> &[f64] {
        &self.area_plus
    }

    pub fn area_minus(&self, i: usize) -> f64 {
        self.total_area - self.area_plus[i]
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    /// `∫ K dA`, which Gauss–Bonnet fixes at `4π`.
    pub fn total_curvature(&self) -> f64 {
        let weight: Vec<f64> = self
            .curvature
            .iter()
            .zip(&self.u)
            .map(|(k, u)| k * (2.0 * u).exp())
            .collect();
        2.0 * PI * quadrature::cumulative_sin_weighted(&self.grid, &weight)[self.grid.last()]
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i > self.grid.last() {
            return Err(Error::IndexOutOfRange {
                index: i,
                last: self.grid.last(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_interior(&self, i: usize) -> Result<()> {
        self.check_index(i)?;
        if self.grid.is_pole(i) {
            return Err(Error::PoleIndex { index: i });
        }
        Ok(())
    }
}

pub fn gaussian_curvature(p: &SurfaceProfile) -> Result<Vec<f64>> {
    Ok(SurfaceGeometry::new(p)?.curvature)
}

pub fn circumference(p: &SurfaceProfile, i: usize) -> Result<f64> {
    let g = SurfaceGeometry::new(p)?;
    g.check_index(i)?;
    Ok(g.circumference[i])
}

pub fn arclength(p: &SurfaceProfile) -> Result<Vec<f64>> {
    Ok(SurfaceGeometry::new(p)?.arclength)
}

/// `(A₊, A₋)`: areas north and south of the parallel at node `i`.
pub fn cap_areas(p: &SurfaceProfile, i: usize) -> Result<(f64, f64)> {
    let g = SurfaceGeometry::new(p)?;
    g.check_interior(i)?;
    Ok((g.area_plus[i], g.area_minus(i)))
}

pub fn total_area(p: &SurfaceProfile) -> Result<f64> {
    Ok(SurfaceGeometry::new(p)?.total_area)
}
