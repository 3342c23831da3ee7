//! Closed-form kernels on the half line and the scaling map.
//!
//! Three kernels are provided: a pair of resolvent-type kernels `A0`, `A1`
//! differing by the rank-one term `e^(-x) e^(-y)`, and the oscillatory
//! difference kernel `Kmu` whose matrix elements reproduce a difference of
//! spectral projections. The spectral parameter enters through
//! `lambda_of_mu`, and `scale_grid` realizes the unitary scaling that maps
//! the whole `Kmu` family onto the `mu = 1/2` member.

use crate::error::KhlError;
use crate::quadrature::Grid;
use crate::Result;

/// Which kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `sinh(min(x,y)) * exp(-max(x,y))`.
    A0,
    /// `cosh(min(x,y)) * exp(-max(x,y))`; equals `A0` plus the rank-one
    /// kernel `e^(-x) e^(-y)`.
    A1,
    /// `(2/pi) * sin(sqrt(lambda(mu)) * (x+y)) / (x+y)`, with the removable
    /// singularity at `x + y = 0` filled in by its limit.
    Kmu { mu: f64 },
}

impl KernelSpec {
    /// Checked constructor for the `Kmu` variant.
    pub fn kmu(mu: f64) -> Result<Self> {
        lambda_of_mu(mu)?;
        Ok(KernelSpec::Kmu { mu })
    }
}

/// Spectral parameter map `mu -> 1/mu - 1`, strictly decreasing from
/// `(0, 1)` onto `(0, +inf)`.
pub fn lambda_of_mu(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(KhlError::InvalidArgument(format!(
            "mu must lie in (0, 1), got {mu}"
        )));
    }
    Ok(1.0 / mu - 1.0)
}

// Taylor branch keeps sin(s)/s accurate through the removable singularity;
// at |s| = 1e-4 both branches agree to ~1e-16 relative.
const SINC_TAYLOR_CUTOFF: f64 = 1e-4;

#[inline]
fn sinc(s: f64) -> f64 {
    if s.abs() < SINC_TAYLOR_CUTOFF {
        let s2 = s * s;
        1.0 - s2 / 6.0 + s2 * s2 / 120.0
    } else {
        s.sin() / s
    }
}

/// Difference-kernel value at argument sum `x + y`, shared with the
/// streaming Frobenius scan so both paths use identical arithmetic.
#[inline]
pub(crate) fn kmu_point(root_lambda: f64, sum: f64) -> f64 {
    std::f64::consts::FRAC_2_PI * root_lambda * sinc(root_lambda * sum)
}

/// Evaluates a kernel at `(x, y)`, `x, y >= 0`.
pub fn eval_kernel(spec: &KernelSpec, x: f64, y: f64) -> Result<f64> {
    if x < 0.0 || y < 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "kernel arguments must be finite and nonnegative, got ({x}, {y})"
        )));
    }
    // min/max form keeps k(x, y) = k(y, x) structurally exact
    let lo = x.min(y);
    let hi = x.max(y);
    match spec {
        KernelSpec::A0 => Ok(lo.sinh() * (-hi).exp()),
        KernelSpec::A1 => Ok(lo.cosh() * (-hi).exp()),
        KernelSpec::Kmu { mu } => {
            let lam = lambda_of_mu(*mu)?;
            Ok(kmu_point(lam.sqrt(), x + y))
        }
    }
}

/// Grid-level realization of the unitary scaling `f(x) -> lambda^(1/4) f(sqrt(lambda) x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMap {
    lambda: f64,
}

impl ScalingMap {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(KhlError::InvalidArgument(format!(
                "scaling parameter must be positive and finite, got {lambda}"
            )));
        }
        Ok(ScalingMap { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Applies the scaling map to a grid: nodes and weights both divide by
/// `sqrt(lambda)`.
///
/// Discretizing `Kmu(mu)` on the scaled grid reproduces, entry by entry,
/// the discretization of `Kmu(1/2)` on the original grid when
/// `lambda = lambda_of_mu(mu)`.
pub fn scale_grid(grid: &Grid, map: &ScalingMap) -> Grid {
    let root = map.lambda.sqrt();
    let nodes = grid.nodes().iter().map(|x| x / root).collect();
    let weights = grid.weights().iter().map(|w| w / root).collect();
    Grid::from_parts(nodes, weights, grid.length() / root, grid.rule().clone())
        .expect("scaling preserves grid invariants")
}
