//! Benchmark fixtures shared by the criterion targets.

use cheeger_flow::{bump_sphere, dumbbell, GridSpec, SurfaceProfile};

/// Grid sizes exercised by the size-scaling groups.
pub const SIZES: [usize; 3] = [128, 256, 512];

pub fn bump(n: usize) -> SurfaceProfile {
    bump_sphere(0.3, 0.5, GridSpec::new(n).expect("bench grid")).expect("bench profile")
}

pub fn neck(n: usize) -> SurfaceProfile {
    dumbbell(0.5, 0.4, GridSpec::new(n).expect("bench grid")).expect("bench profile")
}
