//! Derivatives along the meridian arclength `ρ`.
//!
//! Quantities such as `log L` or `log A₊` are singular at the poles through
//! their round-sphere part (`log sinθ`, `log(1 − cosθ)`). Each one is split as
//! `Q = R(θ) + δ`: the closed-form reference `R` is differentiated exactly via
//! `∂ρ = e^{−u}∂θ`, and the smooth remainder `δ` with three-point differences
//! on the nonuniform grid of discrete arclengths `ρ_i`.

use crate::surface::SurfaceGeometry;

/// Closed-form round-sphere part of a quantity: `θ ↦ (R'(θ), R''(θ))`.
pub(crate) type Reference = fn(f64) -> (f64, f64);

/// `log sinθ`.
pub(crate) fn log_sin(theta: f64) -> (f64, f64) {
    let s = theta.sin();
    (theta.cos() / s, -1.0 / (s * s))
}

/// `−log sinθ`.
pub(crate) fn neg_log_sin(theta: f64) -> (f64, f64) {
    let (d1, d2) = log_sin(theta);
    (-d1, -d2)
}

/// `log(1 − cosθ) = log(2 sin²(θ/2))`.
pub(crate) fn log_north_cap(theta: f64) -> (f64, f64) {
    let s = (0.5 * theta).sin();
    let c = (0.5 * theta).cos();
    (c / s, -0.5 / (s * s))
}

/// `log(1 + cosθ) = log(2 cos²(θ/2))`.
pub(crate) fn log_south_cap(theta: f64) -> (f64, f64) {
    let s = (0.5 * theta).sin();
    let c = (0.5 * theta).cos();
    (-s / c, -0.5 / (c * c))
}

/// First and second `ρ`-derivatives at interior nodes (index `j` ↔ node `j+1`).
#[derive(Debug, Clone)]
pub(crate) struct RhoDerivatives {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

/// Differentiates `R(θ) + δ` along `ρ`; `remainder` holds `δ` at every node,
/// poles included (as limits).
pub(crate) fn rho_derivatives(
    geom: &SurfaceGeometry,
    reference: Reference,
    remainder: &[f64],
) -> RhoDerivatives {
    let grid = geom.grid();
    let rho = geom.arclength();
    let u = geom.u();
    let u_theta = geom.u_theta();
    let interior = grid.interior();
    let mut first = Vec::with_capacity(interior.len());
    let mut second = Vec::with_capacity(interior.len());
    for i in interior {
        let a = rho[i] - rho[i - 1];
        let b = rho[i + 1] - rho[i];
        let (f0, f1, f2) = (remainder[i - 1], remainder[i], remainder[i + 1]);
        let d1 = -b / (a * (a + b)) * f0 + (b - a) / (a * b) * f1 + a / (b * (a + b)) * f2;
        let d2 = 2.0 * (f0 / (a * (a + b)) - f1 / (a * b) + f2 / (b * (a + b)));

        let (r1, r2) = reference(grid.theta(i));
        let e = (-u[i]).exp();
        first.push(e * r1 + d1);
        second.push(e * e * (r2 - u_theta[i] * r1) + d2);
    }
    RhoDerivatives { first, second }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::surface::SurfaceProfile;

    fn finite_difference(f: fn(f64) -> f64, x: f64) -> (f64, f64) {
        let h = 1e-4;
        (
            (f(x + h) - f(x - h)) / (2.0 * h),
            (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        )
    }

    #[test]
    fn references_match_their_functions() {
        let cases: [(Reference, fn(f64) -> f64); 4] = [
            (log_sin, |t| t.sin().ln()),
            (neg_log_sin, |t| -t.sin().ln()),
            (log_north_cap, |t| (1.0 - t.cos()).ln()),
            (log_south_cap, |t| (1.0 + t.cos()).ln()),
        ];
        for (reference, f) in cases {
            for t in [0.3, 1.0, 1.7, 2.5] {
                let (d1, d2) = reference(t);
                let (f1, f2) = finite_difference(f, t);
                assert!((d1 - f1).abs() < 1e-6, "{t}: {d1} vs {f1}");
                assert!((d2 - f2).abs() < 1e-4, "{t}: {d2} vs {f2}");
            }
        }
    }

    #[test]
    fn remainder_derivatives_on_a_scaled_sphere() {
        // On a sphere of radius 2, ρ = 2θ; take δ(ρ) = ρ² so δ' = 2ρ, δ'' = 2.
        let grid = GridSpec::new(128).unwrap();
        let geom = SurfaceGeometry::new(&SurfaceProfile::round(grid, 2.0)).unwrap();
        let delta: Vec<f64> = geom.arclength().iter().map(|r| r * r).collect();
        let d = rho_derivatives(&geom, |_| (0.0, 0.0), &delta);
        for (j, i) in grid.interior().enumerate() {
            let rho = geom.arclength()[i];
            assert!((d.first[j] - 2.0 * rho).abs() < 1e-9);
            assert!((d.second[j] - 2.0).abs() < 1e-7);
        }
    }
}
