//! Shared fixtures for the benchmarks; the interesting code lives in
//! `benches/core_paths.rs`.

use khl_core::{hilbert_shifted, SymMatrix};

/// The positive moment matrix whose eigensolve dominates the acceptance
/// suite's runtime: `(1/pi) * H(1/2, n)`.
pub fn scaled_moment_matrix(n: usize) -> SymMatrix {
    hilbert_shifted(0.5, n)
        .expect("1/2 is never a pole")
        .scale(1.0 / std::f64::consts::PI)
}
