//! Named initial metrics and the search for momentarily stationary quotients.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{parameter, Error, Result};
use crate::flow::StepControl;
use crate::grid::GridSpec;
use crate::identities::{supersolution_term, FlowTrace};
use crate::surface::{SurfaceGeometry, SurfaceProfile};

pub fn round_sphere(r: f64, grid: GridSpec) -> Result<SurfaceProfile> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(parameter("r", r, "(0, ∞)"));
    }
    Ok(SurfaceProfile::round(grid, r))
}

/// `u(θ) = a·exp(−(θ − π/2)²/w²)`: a fattened (`a > 0`) or pinched (`a < 0`)
/// equatorial band.
///
/// The Gaussian is not flat at the poles. For `w ≤ 0.5` its pole slope stays
/// below [`crate::surface::POLE_SLOPE_TOL`] for every `|a| ≤ 1`; wider bands with a large
/// amplitude are conical at the poles and are rejected as invalid profiles.
pub fn bump_sphere(a: f64, w: f64, grid: GridSpec) -> Result<SurfaceProfile> {
    if !(-1.0..=1.0).contains(&a) {
        return Err(parameter("a", a, "[-1, 1]"));
    }
    if !(0.1..=1.0).contains(&w) {
        return Err(parameter("w", w, "[0.1, 1]"));
    }
    SurfaceProfile::from_fn(grid, |t| a * (-(t - PI / 2.0).powi(2) / (w * w)).exp()).validated()
}

/// Two round lobes around the poles joined by a depressed equatorial neck.
///
/// `u = neck·(G(x − 1) + G(x + 1) − 2G(x))` with `x = cosθ` and
/// `G(y) = exp(−y²/w²)`. Being a function of `cosθ`, it is smooth at the
/// poles, and `∂u/∂x ≥ 0` at `x = 1` keeps the polar caps positively curved.
pub fn dumbbell(neck: f64, w: f64, grid: GridSpec) -> Result<SurfaceProfile> {
    if !(neck > 0.0 && neck < 1.0) {
        return Err(parameter("neck", neck, "(0, 1)"));
    }
    if !(0.2..=1.0).contains(&w) {
        return Err(parameter("w", w, "[0.2, 1]"));
    }
    let g = |y: f64| (-(y * y) / (w * w)).exp();
    SurfaceProfile::from_fn(grid, |t| {
        let x = t.cos();
        neck * (g(x - 1.0) + g(x + 1.0) - 2.0 * g(x))
    })
    .validated()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    RoundSphere,
    BumpSphere,
    Dumbbell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSchema {
    pub name: &'static str,
    pub default: f64,
    pub range: &'static str,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::RoundSphere,
        Scenario::BumpSphere,
        Scenario::Dumbbell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::RoundSphere => "round_sphere",
            Scenario::BumpSphere => "bump_sphere",
            Scenario::Dumbbell => "dumbbell",
        }
    }

    pub fn parameters(self) -> &'static [ParameterSchema] {
        const fn p(name: &'static str, default: f64, range: &'static str) -> ParameterSchema {
            ParameterSchema {
                name,
                default,
                range,
            }
        }
        const ROUND: [ParameterSchema; 1] = [p("r", 1.0, "(0, ∞)")];
        const BUMP: [ParameterSchema; 2] = [p("a", 0.3, "[-1, 1]"), p("w", 0.5, "[0.1, 1]")];
        const DUMBBELL: [ParameterSchema; 2] = [p("neck", 0.5, "(0, 1)"), p("w", 0.4, "[0.2, 1]")];
        match self {
            Scenario::RoundSphere => &ROUND,
            Scenario::BumpSphere => &BUMP,
            Scenario::Dumbbell => &DUMBBELL,
        }
    }

    /// Builds the profile; missing parameters take their defaults and unknown
    /// names are rejected.
    pub fn build(self, params: &BTreeMap<String, f64>, grid: GridSpec) -> Result<SurfaceProfile> {
        let schema = self.parameters();
        if let Some(unknown) = params
            .keys()
            .find(|k| schema.iter().all(|s| s.name != k.as_str()))
        {
            let accepted: Vec<_> = schema.iter().map(|s| s.name).collect();
            return Err(Error::Degenerate(format!(
                "unknown parameter `{unknown}` for {}; accepted: {}",
                self.name(),
                accepted.join(", ")
            )));
        }
        let get = |k: usize| {
            params
                .get(schema[k].name)
                .copied()
                .unwrap_or(schema[k].default)
        };
        match self {
            Scenario::RoundSphere => round_sphere(get(0), grid),
            Scenario::BumpSphere => bump_sphere(get(0), get(1), grid),
            Scenario::Dumbbell => dumbbell(get(0), get(1), grid),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Flow settings with the floor given as a fraction of the initial area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSettings {
    pub cfl_factor: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub t_end: f64,
    pub min_area_fraction: f64,
    pub max_curvature: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            cfl_factor: StepControl::DEFAULT_CFL,
            dt_min: StepControl::DEFAULT_DT_MIN,
            dt_max: StepControl::DEFAULT_DT_MAX,
            t_end: 0.25,
            min_area_fraction: StepControl::DEFAULT_MIN_AREA_FRACTION,
            max_curvature: StepControl::DEFAULT_MAX_CURVATURE,
        }
    }
}

impl FlowSettings {
    pub fn resolve(&self, initial_area: f64) -> Result<StepControl> {
        if !(self.min_area_fraction > 0.0 && self.min_area_fraction < 1.0) {
            return Err(parameter(
                "min_area_fraction",
                self.min_area_fraction,
                "(0, 1)",
            ));
        }
        let c = StepControl {
            cfl_factor: self.cfl_factor,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
            t_end: self.t_end,
            min_area: self.min_area_fraction * initial_area,
            max_curvature: self.max_curvature,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: Scenario,
    pub parameters: BTreeMap<String, f64>,
    pub grid_n: usize,
    pub flow: FlowSettings,
}

impl ScenarioSpec {
    pub fn new(name: Scenario, grid_n: usize) -> Self {
        Self {
            name,
            parameters: BTreeMap::new(),
            grid_n,
            flow: FlowSettings::default(),
        }
    }

    pub fn with_parameter(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid_n)
    }

    pub fn build(&self) -> Result<SurfaceProfile> {
        self.name.build(&self.parameters, self.grid()?)
    }

    /// Initial profile and the resolved step control.
    pub fn prepare(&self) -> Result<(SurfaceProfile, StepControl)> {
        let p = self.build()?;
        let area = crate::surface::total_area(&p)?;
        Ok((p, self.flow.resolve(area)?))
    }
}

/// A one-parameter slice of a registered scenario: `parameter` is scanned and
/// the others are held at `fixed` (or their defaults).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub scenario: Scenario,
    pub parameter: String,
    pub fixed: BTreeMap<String, f64>,
}

impl Family {
    pub fn new(scenario: &str, parameter: &str, fixed: BTreeMap<String, f64>) -> Result<Self> {
        let scenario: Scenario = scenario.parse()?;
        if scenario.parameters().iter().all(|s| s.name != parameter) {
            return Err(Error::Degenerate(format!(
                "{scenario} has no parameter `{parameter}`"
            )));
        }
        Ok(Self {
            scenario,
            parameter: parameter.to_string(),
            fixed,
        })
    }

    pub fn round_sphere() -> Self {
        Self::new("round_sphere", "r", BTreeMap::new()).expect("registered")
    }

    /// Bump amplitude `a` at fixed width `w`.
    pub fn bump_amplitude(w: f64) -> Self {
        Self::new("bump_sphere", "a", BTreeMap::from([("w".to_string(), w)])).expect("registered")
    }

    pub fn member(&self, value: f64, grid: GridSpec) -> Result<SurfaceProfile> {
        let mut params = self.fixed.clone();
        params.insert(self.parameter.clone(), value);
        self.scenario.build(&params, grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryDiagnostics {
    /// `L² − 4πA₊` at the equator.
    pub s: f64,
    pub length: f64,
    pub area_plus: f64,
    pub area_difference: f64,
    pub gamma_equator: f64,
    pub hamilton_ratio: f64,
    pub supersolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryCandidate {
    pub parameter: f64,
    pub profile: SurfaceProfile,
    pub diagnostics: StationaryDiagnostics,
}

fn equator_diagnostics(p: &SurfaceProfile) -> Result<StationaryDiagnostics> {
    let geom = SurfaceGeometry::new(p)?;
    let eq = p
        .grid()
        .equator()
        .ok_or_else(|| Error::Degenerate("an odd grid has no equator node".into()))?;
    let stats = geom.loop_stats(eq)?;
    Ok(StationaryDiagnostics {
        s: stats.length * stats.length - 4.0 * PI * stats.area_plus,
        length: stats.length,
        area_plus: stats.area_plus,
        area_difference: stats.area_plus - stats.area_minus,
        gamma_equator: stats.gamma_total,
        hamilton_ratio: stats.hamilton_ratio,
        supersolution: supersolution_term(&stats, geom.total_area()),
    })
}

/// Bisection for a root of `s = L² − 4πA₊` at the equator, stopping once
/// `|s| ≤ 1e-10·4πA₊` or the bracket cannot shrink further.
pub fn find_stationary_candidate(
    family: &Family,
    range: (f64, f64),
    grid: GridSpec,
) -> Result<StationaryCandidate> {
    let (mut lo, mut hi) = range;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::Degenerate(format!("empty range [{lo}, {hi}]")));
    }
    let eval = |x: f64| -> Result<(SurfaceProfile, StationaryDiagnostics)> {
        let p = family.member(x, grid)?;
        let d = equator_diagnostics(&p)?;
        Ok((p, d))
    };
    let (p_lo, d_lo) = eval(lo)?;
    let (p_hi, d_hi) = eval(hi)?;
    let converged = |d: &StationaryDiagnostics| d.s.abs() <= 1e-10 * 4.0 * PI * d.area_plus;
    if converged(&d_lo) {
        return Ok(StationaryCandidate {
            parameter: lo,
            profile: p_lo,
            diagnostics: d_lo,
        });
    }
    if converged(&d_hi) {
        return Ok(StationaryCandidate {
            parameter: hi,
            profile: p_hi,
            diagnostics: d_hi,
        });
    }
    if d_lo.s.signum() == d_hi.s.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            s_lo: d_lo.s,
            s_hi: d_hi.s,
        });
    }
    let lo_sign = d_lo.s.signum();
    loop {
        let mid = 0.5 * (lo + hi);
        let (p, d) = eval(mid)?;
        if converged(&d) || mid <= lo || mid >= hi {
            return Ok(StationaryCandidate {
                parameter: mid,
                profile: p,
                diagnostics: d,
            });
        }
        if d.s.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Times at which `|dh/dt| ≤ tol·h_sum_global`. Traces shorter than three
/// records carry no usable derivative and yield nothing.
pub fn detect_stationarity(trace: &FlowTrace, tol: f64) -> Vec<f64> {
    if trace.len() < 3 {
        return Vec::new();
    }
    trace
        .records()
        .iter()
        .filter(|r| r.dh_dt.abs() <= tol * r.h_sum_global)
        .map(|r| r.t)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{evolve, FlowState};
    use crate::identities::TraceRecord;
    use crate::loops::global_cheeger;
    use crate::surface::{gaussian_curvature, total_area, validate_profile};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn round_sphere_examples() {
        let p = round_sphere(1.0, grid(256)).unwrap();
        assert_relative_eq!(total_area(&p).unwrap(), 4.0 * PI, max_relative = 1e-10);
        for k in gaussian_curvature(&p).unwrap() {
            assert_relative_eq!(k, 1.0, epsilon = 1e-12);
        }
        let p = round_sphere(2.0, grid(256)).unwrap();
        assert_relative_eq!(global_cheeger(&p).unwrap().stats.h_sum, 1.0, epsilon = 1e-9);
        assert!(round_sphere(0.0, grid(64)).is_err());
        assert!(round_sphere(-1.0, grid(64)).is_err());
    }

    #[test]
    fn bump_examples() {
        let flat = bump_sphere(0.0, 0.5, grid(64)).unwrap();
        assert_eq!(flat, SurfaceProfile::round(grid(64), 1.0));
        let p = bump_sphere(0.3, 0.5, grid(256)).unwrap();
        assert_eq!(global_cheeger(&p).unwrap().stats.node_index, 128);
        // At the equator Δu = u'' = −2a/w², so K = e^{−2a}(1 + 2a/w²).
        let closed = |a: f64, w: f64| (-2.0 * a).exp() * (1.0 + 2.0 * a / (w * w));
        let fat = gaussian_curvature(&p).unwrap()[128];
        assert!((fat - closed(0.3, 0.5)).abs() < 5e-3, "{fat}");
        assert!(fat > 1.0);
        // A pinched band is a saddle-shaped neck.
        let pinched = bump_sphere(-0.3, 0.5, grid(256)).unwrap();
        let k = gaussian_curvature(&pinched).unwrap()[128];
        assert!((k - closed(-0.3, 0.5)).abs() < 5e-3, "{k}");
        assert!(k < 0.0);
        assert!(matches!(
            bump_sphere(0.9, 1.0, grid(64)),
            Err(Error::InvalidProfile(_))
        ));
        for (a, w) in [(1.1, 0.5), (0.3, 0.05), (0.3, 1.5), (f64::NAN, 0.5)] {
            assert!(matches!(
                bump_sphere(a, w, grid(64)),
                Err(Error::InvalidParameter { .. })
            ));
        }
    }

    #[test]
    fn dumbbell_examples() {
        let p = dumbbell(0.5, 0.4, grid(256)).unwrap();
        assert_eq!(global_cheeger(&p).unwrap().stats.node_index, 128);
        let k = gaussian_curvature(&p).unwrap();
        assert!(k[128] < 0.0, "neck curvature {}", k[128]);
        assert!(k[0] > 0.0 && k[256] > 0.0);
        for w in [0.2, 0.7, 1.0] {
            let k = gaussian_curvature(&dumbbell(0.9, w, grid(128)).unwrap()).unwrap();
            assert!(k[0] > 0.0 && k[128] > 0.0, "w = {w}");
        }
        // A faint neck is nearly round, like a faint bump.
        let faint = dumbbell(1e-6, 0.4, grid(64)).unwrap();
        assert!(faint.u().iter().all(|u| u.abs() < 1e-5));
        for (neck, w) in [(0.0, 0.4), (1.0, 0.4), (0.5, 0.1), (0.5, 2.0)] {
            assert!(dumbbell(neck, w, grid(64)).is_err());
        }
    }

    proptest! {
        #[test]
        fn constructors_are_valid_and_mirror_symmetric(
            a in -1.0f64..=1.0, w in 0.1f64..=0.5, neck in 0.01f64..0.99, wd in 0.2f64..=1.0,
        ) {
            let g = grid(128);
            for p in [bump_sphere(a, w, g).unwrap(), dumbbell(neck, wd, g).unwrap()] {
                prop_assert!(validate_profile(&p).is_valid());
                let geom = SurfaceGeometry::new(&p).unwrap();
                let s = geom.loop_stats(64).unwrap();
                prop_assert!((s.area_plus - s.area_minus).abs() <= 1e-12 * s.area_plus);
                prop_assert!(s.gamma_total.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn registry_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
            assert!(s.build(&BTreeMap::new(), grid(64)).is_ok());
        }
        assert!(matches!(
            "torus".parse::<Scenario>(),
            Err(Error::UnknownScenario(_))
        ));
        let bad = BTreeMap::from([("radius".to_string(), 1.0)]);
        assert!(Scenario::RoundSphere.build(&bad, grid(64)).is_err());
    }

    #[test]
    fn spec_prepares_control() {
        let spec = ScenarioSpec::new(Scenario::Dumbbell, 128).with_parameter("neck", 0.3);
        let (p, c) = spec.prepare().unwrap();
        assert_relative_eq!(c.min_area, 0.05 * total_area(&p).unwrap());
        assert_eq!(c.t_end, 0.25);
        let mut bad = spec.clone();
        bad.flow.cfl_factor = 0.9;
        assert!(bad.prepare().is_err());
    }

    #[test]
    fn round_family_has_no_root() {
        let err = find_stationary_candidate(&Family::round_sphere(), (0.5, 3.0), grid(128));
        match err {
            Err(Error::NoSignChange { s_lo, s_hi, .. }) => assert!(s_lo < 0.0 && s_hi < 0.0),
            other => panic!("expected no sign change, got {other:?}"),
        }
        assert!(Family::new("torus", "r", BTreeMap::new()).is_err());
        assert!(Family::new("bump_sphere", "r", BTreeMap::new()).is_err());
    }

    #[test]
    fn bump_family_root() {
        let c =
            find_stationary_candidate(&Family::bump_amplitude(0.5), (0.0, 1.0), grid(256)).unwrap();
        let d = c.diagnostics;
        assert!(d.s.abs() <= 1e-10 * 4.0 * PI * d.area_plus);
        assert!(d.area_difference.abs() <= 1e-12 * d.area_plus);
        assert!(d.gamma_equator.abs() <= 1e-12);
        // L² = 4πA₊ with A₊ = A₋ gives hL = L²·2/A₊ = 8π.
        assert_relative_eq!(d.hamilton_ratio, 8.0 * PI, max_relative = 1e-9);
        assert!(d.supersolution < 0.0);
        assert!((0.6..0.8).contains(&c.parameter), "{}", c.parameter);
    }

    fn constant_trace(n: usize) -> FlowTrace {
        let records = (0..n)
            .map(|k| TraceRecord {
                t: 0.01 * k as f64,
                area: 4.0 * PI,
                h_sum_global: 2.0,
                h_min_global: 1.0,
                argmin_theta: PI / 2.0,
                length_at_min: 2.0 * PI,
                gamma_at_min: 0.0,
                hamilton_at_min: 4.0 * PI,
                dh_dt: 0.0,
                threshold_ok: false,
                papasoglu_ok: true,
            })
            .collect();
        FlowTrace::from_records(records, None)
    }

    #[test]
    fn stationarity_detector() {
        let trace = constant_trace(8);
        let flagged = detect_stationarity(&trace, 1e-6);
        assert_eq!(flagged.len(), 8);
        assert!(detect_stationarity(&constant_trace(2), 1e-6).is_empty());

        let p = round_sphere(1.0, grid(64)).unwrap();
        let c = StepControl::new(0.1, 4.0 * PI);
        let run = evolve(FlowState::new(p).unwrap(), &c, |_, _| {}).unwrap();
        assert!(detect_stationarity(&run.trace, 0.1).is_empty());
    }
}
