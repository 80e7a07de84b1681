//! Unnormalized Ricci flow of axisymmetric conformal factors.
//!
//! On a surface the flow `∂g/∂t = −2 Ric(g) = −2K g` keeps the metric
//! conformal, so with `g = e^{2u}ĝ` it reduces to the scalar equation
//! `∂u/∂t = −K`. The semi-discrete system is advanced with classical RK4 under
//! a diffusive stability limit `dt ≤ cfl·Δθ²·min e^{2u}`.

use log::warn;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{parameter, Error, Result};
use crate::identities::{FlowTrace, TraceRecord};
use crate::surface::{curvature_into, validate_profile, SurfaceGeometry, SurfaceProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub cfl_factor: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Stop once the area drops to this value.
    pub min_area: f64,
    /// Stop once `max |K|` reaches this value.
    pub max_curvature: f64,
}

impl StepControl {
    pub const DEFAULT_CFL: f64 = 0.2;
    pub const DEFAULT_MIN_AREA_FRACTION: f64 = 0.05;
    pub const DEFAULT_MAX_CURVATURE: f64 = 1e4;
    pub const DEFAULT_DT_MIN: f64 = 1e-12;
    pub const DEFAULT_DT_MAX: f64 = 1e-2;

    /// Defaults for a run to `t_end` starting from a surface of area `initial_area`.
    pub fn new(t_end: f64, initial_area: f64) -> Self {
        Self {
            cfl_factor: Self::DEFAULT_CFL,
            dt_min: Self::DEFAULT_DT_MIN,
            dt_max: Self::DEFAULT_DT_MAX,
            t_end,
            min_area: Self::DEFAULT_MIN_AREA_FRACTION * initial_area,
            max_curvature: Self::DEFAULT_MAX_CURVATURE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_factor > 0.0 && self.cfl_factor <= 0.5) {
            return Err(parameter("cfl_factor", self.cfl_factor, "(0, 0.5]"));
        }
        if !(self.dt_min > 0.0 && self.dt_min.is_finite()) {
            return Err(parameter("dt_min", self.dt_min, "(0, dt_max]"));
        }
        if !(self.dt_max >= self.dt_min && self.dt_max.is_finite()) {
            return Err(parameter("dt_max", self.dt_max, "[dt_min, ∞)"));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(parameter("t_end", self.t_end, "[0, ∞)"));
        }
        if !(self.min_area > 0.0 && self.min_area.is_finite()) {
            return Err(parameter("min_area", self.min_area, "(0, ∞)"));
        }
        if self.max_curvature.is_nan() || self.max_curvature <= 0.0 {
            return Err(parameter("max_curvature", self.max_curvature, "(0, ∞]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowState {
    pub profile: SurfaceProfile,
    pub step_count: u64,
    pub last_dt: f64,
}

impl FlowState {
    pub fn new(profile: SurfaceProfile) -> Result<Self> {
        Ok(Self {
            profile: profile.validated()?,
            step_count: 0,
            last_dt: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.profile.time()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EndTime,
    AreaFloor,
    CurvatureCeiling,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::EndTime => "end time",
            StopReason::AreaFloor => "area floor",
            StopReason::CurvatureCeiling => "curvature ceiling",
        })
    }
}

/// `du/dt = −K` at every node.
pub fn flow_rhs(p: &SurfaceProfile) -> Result<Vec<f64>> {
    let geom = SurfaceGeometry::new(p)?;
    Ok(geom.curvature().iter().map(|k| -k).collect())
}

/// Step size from the stability limit, and whether it had to be raised to `dt_min`.
pub fn stable_dt(p: &SurfaceProfile, c: &StepControl) -> (f64, bool) {
    let h = p.grid().spacing();
    let min_u = p.u().iter().copied().fold(f64::INFINITY, f64::min);
    let dt = (c.cfl_factor * h * h * (2.0 * min_u).exp()).min(c.dt_max);
    if dt < c.dt_min {
        (c.dt_min, true)
    } else {
        (dt, false)
    }
}

/// One RK4 step of fixed size `dt`.
pub fn advance(s: &FlowState, dt: f64) -> Result<FlowState> {
    let grid = *s.profile.grid();
    let n = grid.len();
    let u0 = s.profile.u();
    let rhs = |u: &[f64], out: &mut [f64]| {
        curvature_into(&grid, u, out);
        for k in out.iter_mut() {
            *k = -*k;
        }
    };
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    rhs(u0, &mut k1);
    for i in 0..n {
        stage[i] = u0[i] + 0.5 * dt * k1[i];
    }
    rhs(&stage, &mut k2);
    for i in 0..n {
        stage[i] = u0[i] + 0.5 * dt * k2[i];
    }
    rhs(&stage, &mut k3);
    for i in 0..n {
        stage[i] = u0[i] + dt * k3[i];
    }
    rhs(&stage, &mut k4);
    let u: Vec<f64> = (0..n)
        .map(|i| u0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();

    let time = s.time() + dt;
    let profile = SurfaceProfile::new(grid, u, time);
    let report = validate_profile(&profile);
    if !report.is_valid() {
        return Err(Error::StepFailed {
            time,
            reason: Error::InvalidProfile(report.violations).to_string(),
        });
    }
    Ok(FlowState {
        profile,
        step_count: s.step_count + 1,
        last_dt: dt,
    })
}

/// Advances by the stable step, shortened so as not to pass `t_end`.
pub fn step(s: &FlowState, c: &StepControl) -> Result<FlowState> {
    let (mut dt, clamped) = stable_dt(&s.profile, c);
    if clamped {
        warn!(
            "stable step below dt_min at t = {}; using dt_min = {:e}",
            s.time(),
            c.dt_min
        );
    }
    let remaining = c.t_end - s.time();
    if remaining > 0.0 {
        dt = dt.min(remaining);
    }
    advance(s, dt)
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub trace: FlowTrace,
    pub final_state: FlowState,
}

/// A failed run, with everything computed up to the last valid state.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{source} (last valid state at t = {})", .last_state.time())]
pub struct EvolveError {
    pub source: Error,
    pub last_state: FlowState,
    pub trace: FlowTrace,
}

/// Integrates until `t_end`, the area floor, or the curvature ceiling.
///
/// The trace starts with the initial state. When the next step would take the
/// area below `min_area`, it is shortened using the exact area loss rate `8π`
/// so that the run ends on the floor.
pub fn evolve(
    s0: FlowState,
    c: &StepControl,
    mut observer: impl FnMut(&FlowState, &TraceRecord),
) -> Result<Evolution, Box<EvolveError>> {
    let fail = |source: Error, state: FlowState, records: Vec<TraceRecord>| {
        Box::new(EvolveError {
            source,
            last_state: state,
            trace: FlowTrace::from_records(records, None),
        })
    };
    if let Err(e) = c.validate() {
        return Err(fail(e, s0, Vec::new()));
    }
    let geom = match SurfaceGeometry::new(&s0.profile) {
        Ok(g) => g,
        Err(e) => return Err(fail(e, s0, Vec::new())),
    };
    let mut records = vec![TraceRecord::observe(&geom, s0.time())];
    let end_slack = 1e-12 * c.t_end.abs().max(1.0);

    let mut state = s0;
    let mut area = geom.total_area();
    let mut max_k = geom.max_abs_curvature();
    let stop = loop {
        if area <= c.min_area {
            break StopReason::AreaFloor;
        }
        if max_k >= c.max_curvature {
            break StopReason::CurvatureCeiling;
        }
        let remaining = c.t_end - state.time();
        if remaining <= end_slack {
            break StopReason::EndTime;
        }
        let (mut dt, clamped) = stable_dt(&state.profile, c);
        if clamped {
            warn!(
                "stable step below dt_min at t = {}; using dt_min = {:e}",
                state.time(),
                c.dt_min
            );
        }
        dt = dt.min(remaining);
        let to_floor = (area - c.min_area) / (8.0 * PI);
        let hits_floor = to_floor <= dt;
        if hits_floor {
            dt = to_floor;
        }
        let next = match advance(&state, dt) {
            Ok(next) => next,
            Err(e) => return Err(fail(e, state, records)),
        };
        let geom = SurfaceGeometry::from_valid(&next.profile);
        let record = TraceRecord::observe(&geom, next.time());
        observer(&next, &record);
        area = geom.total_area();
        max_k = geom.max_abs_curvature();
        records.push(record);
        state = next;
        if hits_floor {
            break StopReason::AreaFloor;
        }
    };
    Ok(Evolution {
        trace: FlowTrace::from_records(records, Some(stop)),
        final_state: state,
    })
}

/// `max |A(t) − (A(0) − 8πt)| / A(0)` over the trace.
pub fn area_law_check(trace: &FlowTrace) -> f64 {
    let records = trace.records();
    let Some(first) = records.first() else {
        return 0.0;
    };
    records
        .iter()
        .map(|r| (r.area - (first.area - 8.0 * PI * (r.t - first.t))).abs() / first.area)
        .fold(0.0, f64::max)
}
