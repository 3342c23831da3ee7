//! Numerical spectral analysis of a family of operators built around a
//! rank-one resolvent perturbation on the half line: closed-form kernels,
//! truncated-domain quadrature grids, Hankel and shifted Hilbert finite
//! sections, a dense symmetric eigensolver, spectral diagnostics, and
//! spectral-shift-function checks.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: dense symmetric matrix storage shared by everything;
//! * [`kernels`]: closed-form kernel evaluation and the scaling map;
//! * [`quadrature`]: grids on `(0, L]` and symmetrized Nystrom discretization;
//! * [`eigensolve`]: cyclic Jacobi eigensolver and spectral projections;
//! * [`hankel`]: integer-indexed sections, meaning Hankel matrices from
//!   arc-symbol Fourier coefficients, shifted Hilbert matrices, the parity
//!   split;
//! * [`spectra`]: spectrum-filling, atom-decay and cyclicity probes;
//! * [`ssf`]: trace-formula verification, counting spectral shift,
//!   Hilbert-Schmidt divergence scan, projection-vs-kernel cross-check.

pub mod eigensolve;
pub mod error;
pub mod hankel;
pub mod kernels;
pub mod matrix;
pub mod quadrature;
pub mod spectra;
pub mod ssf;

pub use eigensolve::{
    jacobi_eigen, spectral_projection, EigenDecomposition, ProjectionMatrix, DEFAULT_MAX_SWEEPS,
    DEFAULT_TOL,
};
pub use error::KhlError;
pub use hankel::{
    coeff_by_quadrature, fourier_coeff, hankel_section, hilbert_alt, hilbert_shifted, parity_split,
    ParitySplit, SymbolArc,
};
pub use kernels::{eval_kernel, lambda_of_mu, scale_grid, KernelSpec, ScalingMap};
pub use matrix::SymMatrix;
pub use quadrature::{discretize, make_grid, quadratic_form, Grid, QuadRule, TestFunction};
pub use spectra::{
    ac_decay_probe, fill_metrics, krylov_rank, spectral_measure, AcDecayReport, FillReport,
    SectionBuilder, SpectralMeasure, DEFAULT_KRYLOV_TOL,
};
pub use ssf::{
    counting_ssf, crosscheck_kernel, hs_divergence_scan, projection_difference, run_trace_trials,
    trace_formula_check, CrosscheckReport, DivergenceScan, PairDiscrepancy, Polynomial,
    StepFunction, TraceCheckReport, TrialRecord,
};

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, KhlError>;
