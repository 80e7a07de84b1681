//! `trace.csv`: one row per trace record, columns frozen per artifact version.

use std::fmt::Write as _;

use cheeger_flow::FlowTrace;

pub const TRACE_HEADER: &str = "t,area,h_sum_global,h_min_global,argmin_theta,L_at_min,gamma_at_min,hamilton_at_min,dh_dt,threshold_ok,papasoglu_ok";

/// Shortest representation that parses back to the same `f64`; exponent form
/// outside `[1e-5, 1e15)`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn trace_csv(trace: &FlowTrace) -> String {
    let mut s = String::with_capacity(64 * (trace.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in trace.records() {
        let floats = [
            r.t,
            r.area,
            r.h_sum_global,
            r.h_min_global,
            r.argmin_theta,
            r.length_at_min,
            r.gamma_at_min,
            r.hamilton_at_min,
            r.dh_dt,
        ];
        for v in floats {
            s.push_str(&format_float(v));
            s.push(',');
        }
        let _ = writeln!(s, "{},{}", r.threshold_ok, r.papasoglu_ok);
    }
    s
}
