//! Spectral-shift-function laboratory.
//!
//! For finite symmetric matrices the shift function is an honest
//! piecewise-constant object: the eigenvalue-counting difference between a
//! pair of operators. This module verifies the trace formula against it
//! exactly, and runs the two signature computations for the rank-one kernel
//! pair: the Hilbert-Schmidt divergence of the difference kernel, and the
//! smeared cross-check identifying the projection difference with that
//! kernel (up to overall sign, which the report keeps visible).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{
    jacobi_eigen, spectral_projection, EigenDecomposition, DEFAULT_MAX_SWEEPS, DEFAULT_TOL,
};
use crate::error::KhlError;
use crate::kernels::{kmu_point, lambda_of_mu, KernelSpec};
use crate::matrix::SymMatrix;
use crate::quadrature::{discretize, quadratic_form_sampled, Grid, TestFunction};
use crate::Result;

/// Piecewise-constant, compactly supported integer step function.
///
/// The value on the open interval between consecutive breakpoints is stored
/// per interval; both unbounded tails carry the value 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<i64>,
}

impl StepFunction {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Values on the open intervals between consecutive breakpoints.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Left-continuous evaluation: at a breakpoint the value from the left
    /// interval applies, matching strictly-below eigenvalue counting.
    pub fn value_at(&self, x: f64) -> i64 {
        let k = self.breakpoints.partition_point(|&b| b < x);
        // x is at or below breakpoint k; interval k-1 lies to its left
        if k == 0 || k == self.breakpoints.len() {
            0
        } else {
            self.values[k - 1]
        }
    }

    /// Exact integral: sum of value times interval length.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(&v, w)| v as f64 * (w[1] - w[0]))
            .sum()
    }

    /// Sorted distinct values the function takes between its breakpoints.
    pub fn distinct_values(&self) -> Vec<i64> {
        let mut vals = self.values.clone();
        vals.sort_unstable();
        vals.dedup();
        vals
    }
}

fn check_sorted(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(KhlError::InvalidArgument(format!(
            "{name} eigenvalue list must be finite"
        )));
    }
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(KhlError::InvalidArgument(format!(
            "{name} eigenvalue list must be sorted ascending"
        )));
    }
    Ok(())
}

/// Eigenvalue-counting shift function of an operator pair.
///
/// The value at `mu` is the count of `eigs0` strictly below `mu` minus the
/// count of `eigs1` strictly below `mu`; breakpoints are the merged
/// eigenvalue lists. Between breakpoints neither count changes, so the
/// values are exact integers with no quadrature involved.
pub fn counting_ssf(eigs0: &[f64], eigs1: &[f64]) -> Result<StepFunction> {
    if eigs0.len() != eigs1.len() {
        return Err(KhlError::DimensionMismatch {
            expected: eigs0.len(),
            got: eigs1.len(),
        });
    }
    check_sorted("first", eigs0)?;
    check_sorted("second", eigs1)?;
    let mut breakpoints: Vec<f64> = eigs0.iter().chain(eigs1).copied().collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let values = breakpoints
        .windows(2)
        .map(|w| {
            // on (w[0], w[1]) the strictly-below count equals the at-or-below
            // count of the left breakpoint
            let c0 = eigs0.partition_point(|&e| e <= w[0]);
            let c1 = eigs1.partition_point(|&e| e <= w[0]);
            c0 as i64 - c1 as i64
        })
        .collect();
    Ok(StepFunction {
        breakpoints,
        values,
    })
}

/// Real polynomial in the monomial basis, degree at most 8.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// `coeffs[k]` multiplies `x^k`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > 9 {
            return Err(KhlError::InvalidArgument(format!(
                "polynomial needs 1 to 9 coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(KhlError::InvalidArgument(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// One exact trace-formula verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceCheckReport {
    /// Coefficients of the test polynomial, constant term first.
    pub phi: Vec<f64>,
    /// Eigenvalue-sum difference of the operator pair under the polynomial.
    pub lhs: f64,
    /// Exact integral of the polynomial derivative against the counting
    /// shift function.
    pub rhs: f64,
    pub abs_diff: f64,
}

/// Verifies the trace formula for the rank-one pair `A0` and
/// `A0 + c * v v^T` under a polynomial test function.
///
/// The right-hand side telescopes exactly over the step function's constant
/// intervals, so the comparison has no quadrature error: it tests the
/// eigensolver pipeline at machine precision.
pub fn trace_formula_check(
    a0: &SymMatrix,
    v: &[f64],
    c: f64,
    phi: &Polynomial,
) -> Result<TraceCheckReport> {
    let n = a0.dim();
    if v.len() != n {
        return Err(KhlError::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    if !c.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "coupling must be finite, got {c}"
        )));
    }
    let a1 = SymMatrix::from_fn(n, |i, j| a0.get(i, j) + c * v[i] * v[j]);
    let dec0 = jacobi_eigen(a0, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
    let dec1 = jacobi_eigen(&a1, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
    let lhs: f64 = dec1.eigenvalues().iter().map(|&x| phi.eval(x)).sum::<f64>()
        - dec0.eigenvalues().iter().map(|&x| phi.eval(x)).sum::<f64>();
    let xi = counting_ssf(dec0.eigenvalues(), dec1.eigenvalues())?;
    let rhs: f64 = xi
        .values()
        .iter()
        .zip(xi.breakpoints().windows(2))
        .map(|(&val, w)| val as f64 * (phi.eval(w[1]) - phi.eval(w[0])))
        .sum();
    Ok(TraceCheckReport {
        phi: phi.coeffs().to_vec(),
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
    })
}

/// Difference of the below-threshold spectral projections of two
/// decompositions. Fails if `mu` sits closer than the guard to either
/// spectrum.
pub fn projection_difference(
    dec0: &EigenDecomposition,
    dec1: &EigenDecomposition,
    mu: f64,
    guard: Option<f64>,
) -> Result<SymMatrix> {
    if dec0.dim() != dec1.dim() {
        return Err(KhlError::DimensionMismatch {
            expected: dec0.dim(),
            got: dec1.dim(),
        });
    }
    let p0 = spectral_projection(dec0, mu, guard)?;
    let p1 = spectral_projection(dec1, mu, guard)?;
    p1.matrix().sub(p0.matrix())
}

/// Smeared comparison of one test-function pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDiscrepancy {
    pub f: TestFunction,
    pub g: TestFunction,
    /// Quadratic form of the projection difference.
    pub projection_form: f64,
    /// Quadratic form of the discretized difference kernel.
    pub kernel_form: f64,
    /// Relative deviation of `projection_form` from `-kernel_form`; the
    /// projection difference realizes the kernel with reversed sign.
    pub discrepancy: f64,
    /// Relative deviation from `+kernel_form`, kept so the sign structure is
    /// visible in the data rather than baked into the headline number.
    pub discrepancy_flipped: f64,
}

/// Full cross-check report over a list of test pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub mu: f64,
    pub length: f64,
    pub size: usize,
    pub pairs: Vec<PairDiscrepancy>,
    pub max_discrepancy: f64,
    pub max_discrepancy_flipped: f64,
}

fn check_support(tf: &TestFunction, length: f64) -> Result<()> {
    let ok = match *tf {
        // three widths of tail mass must fit inside the truncation
        TestFunction::Gaussian { center, width } => center + 3.0 * width <= length,
        TestFunction::Indicator { a: _, b } => b <= length,
    };
    if ok {
        Ok(())
    } else {
        Err(KhlError::Resolution(format!(
            "test function {tf:?} carries mass beyond the truncation length {length}"
        )))
    }
}

/// Compares the projection difference of the discretized operator pair
/// against the discretized difference kernel through smeared quadratic
/// forms.
///
/// Raw entries of a projection difference oscillate at finite truncation and
/// never converge pointwise; smearing against fixed smooth test pairs is
/// what converges. The headline `max_discrepancy` uses the sign-matched
/// orientation (projection difference against minus the kernel).
pub fn crosscheck_kernel(
    mu: f64,
    grid: &Grid,
    tests: &[(TestFunction, TestFunction)],
) -> Result<CrosscheckReport> {
    let lambda = lambda_of_mu(mu)?;
    if tests.is_empty() {
        return Err(KhlError::InvalidArgument(
            "cross-check needs at least one test pair".into(),
        ));
    }
    let bound = 0.2 / lambda.sqrt();
    let spacing = grid.max_spacing();
    if spacing > bound {
        return Err(KhlError::Resolution(format!(
            "grid spacing {spacing:.3e} exceeds the oscillation bound {bound:.3e}"
        )));
    }
    for (f, g) in tests {
        check_support(f, grid.length())?;
        check_support(g, grid.length())?;
    }

    let dec0 = jacobi_eigen(&discretize(&KernelSpec::A0, grid)?, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
    let dec1 = jacobi_eigen(&discretize(&KernelSpec::A1, grid)?, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
    let diff = projection_difference(&dec0, &dec1, mu, None)?;
    let kernel = discretize(&KernelSpec::kmu(mu)?, grid)?;

    let mut pairs = Vec::with_capacity(tests.len());
    let mut max_discrepancy = 0.0_f64;
    let mut max_discrepancy_flipped = 0.0_f64;
    for (f, g) in tests {
        let fs = f.sample(grid)?;
        let gs = g.sample(grid)?;
        let projection_form = quadratic_form_sampled(&diff, &fs, &gs)?;
        let kernel_form = quadratic_form_sampled(&kernel, &fs, &gs)?;
        let scale = 1.0 + kernel_form.abs();
        let discrepancy = (projection_form + kernel_form).abs() / scale;
        let discrepancy_flipped = (projection_form - kernel_form).abs() / scale;
        max_discrepancy = max_discrepancy.max(discrepancy);
        max_discrepancy_flipped = max_discrepancy_flipped.max(discrepancy_flipped);
        pairs.push(PairDiscrepancy {
            f: f.clone(),
            g: g.clone(),
            projection_form,
            kernel_form,
            discrepancy,
            discrepancy_flipped,
        });
    }
    Ok(CrosscheckReport {
        mu,
        length: grid.length(),
        size: grid.size(),
        pairs,
        max_discrepancy,
        max_discrepancy_flipped,
    })
}

/// Growth of the squared Frobenius norm of the difference kernel with the
/// truncation length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceScan {
    pub mu: f64,
    pub lengths: Vec<f64>,
    pub frob_sq: Vec<f64>,
    /// Least-squares slope of `frob_sq` against `ln L`.
    pub slope: f64,
    pub intercept: f64,
}

/// Scans the squared Frobenius norm of the discretized difference kernel
/// over increasing truncation lengths and fits its logarithmic growth.
///
/// The per-length norm is accumulated by streaming over midpoint cells, so
/// no matrix of the scan size is ever allocated; rows are summed in index
/// order to keep the result independent of thread scheduling.
pub fn hs_divergence_scan(mu: f64, lengths: &[f64], nodes_per_unit: f64) -> Result<DivergenceScan> {
    let lambda = lambda_of_mu(mu)?;
    if lengths.len() < 3 {
        return Err(KhlError::InvalidArgument(format!(
            "divergence scan needs at least 3 lengths, got {}",
            lengths.len()
        )));
    }
    if lengths[0] <= 0.0 || lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KhlError::InvalidArgument(
            "scan lengths must be positive and strictly increasing".into(),
        ));
    }
    let root = lambda.sqrt();
    let required = 10.0 * root;
    if nodes_per_unit.is_nan() || nodes_per_unit < required {
        return Err(KhlError::Resolution(format!(
            "{nodes_per_unit} nodes per unit cannot resolve the oscillation; need at least {required}"
        )));
    }
    let frob_sq: Vec<f64> = lengths
        .par_iter()
        .map(|&length| {
            let n = (nodes_per_unit * length).ceil() as usize;
            let n = n.max(2);
            let h = length / n as f64;
            let row_sums: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = (i as f64 + 0.5) * h;
                    let mut acc = 0.0;
                    for j in 0..n {
                        let y = (j as f64 + 0.5) * h;
                        let entry = h * kmu_point(root, x + y);
                        acc += entry * entry;
                    }
                    acc
                })
                .collect();
            row_sums.iter().sum()
        })
        .collect();
    let ln_l: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
    let (slope, intercept) = least_squares(&ln_l, &frob_sq);
    Ok(DivergenceScan {
        mu,
        lengths: lengths.to_vec(),
        frob_sq,
        slope,
        intercept,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// One seeded random trace-formula trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Per-trial generator seed, recorded for replay.
    pub seed: u64,
    pub coupling: f64,
    pub check: TraceCheckReport,
    /// Worst violation of the rank-one interlacing inequalities (0 when the
    /// eigenvalues interlace cleanly).
    pub interlacing_violation: f64,
    /// Distinct values taken by the counting shift function.
    pub xi_values: Vec<i64>,
}

/// Worst violation of the interlacing inequalities for a rank-one update.
///
/// For positive coupling the updated eigenvalues satisfy
/// `a0[i] <= a1[i] <= a0[i+1]`; negative coupling mirrors the pattern.
fn interlacing_violation(eigs0: &[f64], eigs1: &[f64], coupling: f64) -> f64 {
    let (lo, hi) = if coupling >= 0.0 {
        (eigs0, eigs1)
    } else {
        (eigs1, eigs0)
    };
    let mut worst = 0.0_f64;
    for i in 0..lo.len() {
        worst = worst.max(lo[i] - hi[i]);
        if i + 1 < lo.len() {
            worst = worst.max(hi[i] - lo[i + 1]);
        }
    }
    worst
}

/// Runs seeded random trace-formula trials on dense gaussian matrices.
///
/// The coupling cycles through `{1, -1, 0.1, -0.1}` and the polynomial
/// through `x`, `x^2`, `x^3`, and a random polynomial of the requested
/// degree, so every four consecutive trials cover all cases. Trials run
/// concurrently; records keep input order and embed their seeds.
pub fn run_trace_trials(
    trials: usize,
    dim: usize,
    degree: usize,
    master_seed: u64,
) -> Result<Vec<TrialRecord>> {
    if trials == 0 {
        return Err(KhlError::InvalidArgument(
            "trial count must be at least 1".into(),
        ));
    }
    if dim < 2 {
        return Err(KhlError::InvalidArgument(format!(
            "trial dimension must be at least 2, got {dim}"
        )));
    }
    if degree == 0 || degree > 8 {
        return Err(KhlError::InvalidArgument(format!(
            "random polynomial degree must lie in 1..=8, got {degree}"
        )));
    }
    let mut master = ChaCha8Rng::seed_from_u64(master_seed);
    let seeds: Vec<u64> = (0..trials).map(|_| master.random()).collect();
    seeds
        .into_par_iter()
        .enumerate()
        .map(|(trial, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = StandardNormal;
            // fill order is fixed, so each trial replays from its seed alone
            let mut lower = vec![0.0_f64; dim * (dim + 1) / 2];
            for slot in lower.iter_mut() {
                *slot = normal.sample(&mut rng);
            }
            let a0 = SymMatrix::from_fn(dim, |i, j| {
                let (r, c) = if i >= j { (i, j) } else { (j, i) };
                lower[r * (r + 1) / 2 + c]
            });
            let v: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
            let coupling = [1.0, -1.0, 0.1, -0.1][trial % 4];
            let phi = match trial % 4 {
                0 => Polynomial::new(vec![0.0, 1.0])?,
                1 => Polynomial::new(vec![0.0, 0.0, 1.0])?,
                2 => Polynomial::new(vec![0.0, 0.0, 0.0, 1.0])?,
                _ => {
                    let coeffs: Vec<f64> =
                        (0..=degree).map(|_| normal.sample(&mut rng)).collect();
                    Polynomial::new(coeffs)?
                }
            };
            let check = trace_formula_check(&a0, &v, coupling, &phi)?;
            let dec0 = jacobi_eigen(&a0, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
            let a1 = SymMatrix::from_fn(dim, |i, j| a0.get(i, j) + coupling * v[i] * v[j]);
            let dec1 = jacobi_eigen(&a1, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
            let violation =
                interlacing_violation(dec0.eigenvalues(), dec1.eigenvalues(), coupling);
            let xi = counting_ssf(dec0.eigenvalues(), dec1.eigenvalues())?;
            Ok(TrialRecord {
                trial,
                seed,
                coupling,
                check,
                interlacing_violation: violation,
                xi_values: xi.distinct_values(),
            })
        })
        .collect()
}
