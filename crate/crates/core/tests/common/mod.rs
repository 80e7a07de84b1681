//! Grid-free reference values computed from the analytic conformal factor.

#![allow(dead_code)]

use std::f64::consts::PI;

fn simpson_step(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson_step(a, m, fa, flm, fm);
    let right = simpson_step(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson_step(a, b, fa, fm, fb);
    adapt(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Loop quantities of `g = e^{2u}(dθ² + sin²θ dφ²)` for an analytic `u`.
pub struct Analytic<F: Fn(f64) -> f64> {
    pub u: F,
}

impl<F: Fn(f64) -> f64> Analytic<F> {
    pub fn area_between(&self, a: f64, b: f64) -> f64 {
        2.0 * PI * integrate(|t| (2.0 * (self.u)(t)).exp() * t.sin(), a, b, 1e-14)
    }

    pub fn total_area(&self) -> f64 {
        self.area_between(0.0, PI / 2.0) + self.area_between(PI / 2.0, PI)
    }

    pub fn length(&self, theta: f64) -> f64 {
        2.0 * PI * (self.u)(theta).exp() * theta.sin()
    }

    pub fn caps(&self, theta: f64) -> (f64, f64) {
        (self.area_between(0.0, theta), self.area_between(theta, PI))
    }

    pub fn h_sum(&self, theta: f64) -> f64 {
        let (p, m) = self.caps(theta);
        self.length(theta) * (1.0 / p + 1.0 / m)
    }

    pub fn h_min(&self, theta: f64) -> f64 {
        let (p, m) = self.caps(theta);
        self.length(theta) / p.min(m)
    }
}

pub fn bump(a: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| a * (-(t - PI / 2.0).powi(2) / (w * w)).exp()
}

pub fn dumbbell(neck: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let x = t.cos();
        let g = |y: f64| (-(y * y) / (w * w)).exp();
        neck * (g(x - 1.0) + g(x + 1.0) - 2.0 * g(x))
    }
}

/// Values computed independently with 30-digit arbitrary-precision quadrature.
pub mod frozen {
    pub const BUMP_AREA: f64 = 16.521_778_414_280_887;
    pub const BUMP_H_SUM_EQ: f64 = 2.053_389_850_380_136_3;
    pub const BUMP_H_MIN_EQ: f64 = 1.026_694_925_190_068_2;
    pub const BUMP_BOUND: f64 = 3.936_330_778_816_326_6;
    pub const BUMP_HAMILTON_EQ: f64 = 17.415_647_425_555_495;

    pub const DUMBBELL_AREA: f64 = 13.665_441_279_785_792;
    pub const DUMBBELL_H_SUM_EQ: f64 = 0.677_891_366_760_598_1;
    pub const DUMBBELL_H_MIN_EQ: f64 = 0.338_945_683_380_299_06;
    pub const DUMBBELL_BOUND: f64 = 4.328_208_289_643_218;
    pub const DUMBBELL_HAMILTON_EQ: f64 = 1.569_942_964_960_115_6;

    /// Root of `L² = 4πA₊` at the equator over the bump amplitude, `w = 0.5`.
    pub const BUMP_STATIONARY_AMPLITUDE: f64 = 0.708_259_874_545_070_75;
}
