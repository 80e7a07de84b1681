//! Cumulative quadrature on the uniform polar grid.
//!
//! Both rules are the composite trapezoid rule with the Euler–Maclaurin
//! endpoint correction `h²/12·(f'(a) − f'(b))`. On a uniform grid the interior
//! corrections telescope, so the cumulative integral up to any node only needs
//! the integrand slope at that node, and the rule is fourth order whenever the
//! slope estimate is second order.

use crate::grid::GridSpec;

/// `∫₀^{θ_k} f dθ` for every node `k`, given samples of `f` and of `f'`.
pub fn cumulative(grid: &GridSpec, values: &[f64], slopes: &[f64]) -> Vec<f64> {
    debug_assert_eq!(values.len(), grid.len());
    debug_assert_eq!(slopes.len(), grid.len());
    let h = grid.spacing();
    let correction = h * h / 12.0;
    let mut out = Vec::with_capacity(values.len());
    let mut trapezoid = 0.0;
    out.push(0.0);
    for k in 1..values.len() {
        trapezoid += 0.5 * h * (values[k - 1] + values[k]);
        out.push(trapezoid + correction * (slopes[0] - slopes[k]));
    }
    out
}

/// `∫₀^{θ_k} F(s)·sin s ds` for every node `k`.
///
/// `F` must be even about both poles (any smooth axisymmetric scalar is), so
/// `F' = 0` there. The slope of the full integrand is assembled as
/// `F'·sinθ + F·cosθ` from a centered difference of `F` alone; differencing the
/// product would leave an `O(h²)` relative error next to the poles, where the
/// integral itself is only `O(h²)`.
pub fn cumulative_sin_weighted(grid: &GridSpec, weight: &[f64]) -> Vec<f64> {
    let n = grid.last();
    let h = grid.spacing();
    let mut values = Vec::with_capacity(weight.len());
    let mut slopes = Vec::with_capacity(weight.len());
    for i in 0..=n {
        let s = grid.sin_theta(i);
        let c = grid.cos_theta(i);
        let dw = if grid.is_pole(i) {
            0.0
        } else {
            (weight[i + 1] - weight[i - 1]) / (2.0 * h)
        };
        values.push(weight[i] * s);
        slopes.push(dw * s + weight[i] * c);
    }
    cumulative(grid, &values, &slopes)
}
