//! Dense symmetric eigensolver (cyclic Jacobi) and spectral projections.
//!
//! This is the single numerical engine behind every spectral quantity in the
//! crate, so it reports its own quality figures (residual, orthogonality
//! defect) with each decomposition.

use crate::error::KhlError;
use crate::matrix::SymMatrix;
use crate::Result;

/// Default relative tolerance on the off-diagonal Frobenius mass.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default cap on cyclic sweeps.
pub const DEFAULT_MAX_SWEEPS: usize = 30;

/// Full eigendecomposition of a symmetric matrix with quality figures.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector paired with `eigenvalues[k]`.
    vectors: Vec<Vec<f64>>,
    residual: f64,
    orth_defect: f64,
    sweeps: usize,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    /// Largest Euclidean norm of `M v - lambda v` over all pairs.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest entry of `V^T V - I`.
    pub fn orth_defect(&self) -> f64 {
        self.orth_defect
    }

    /// Cyclic sweeps spent before convergence.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }
}

fn off_diagonal_mass(a: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            let v = a[p * n + q];
            acc += v * v;
        }
    }
    (2.0 * acc).sqrt()
}

/// One Givens update of the pair `(arr[i*n+j], arr[k*n+l])`.
#[inline]
#[allow(clippy::too_many_arguments)]
fn rotate(arr: &mut [f64], n: usize, s: f64, tau: f64, i: usize, j: usize, k: usize, l: usize) {
    let g = arr[i * n + j];
    let h = arr[k * n + l];
    arr[i * n + j] = g - s * (h + g * tau);
    arr[k * n + l] = h + s * (g - h * tau);
}

/// Diagonalizes a symmetric matrix by cyclic Jacobi rotations.
///
/// Convergence means the off-diagonal Frobenius mass dropped below
/// `tol * ||M||_F`; rotations on entries below `tol * ||M||_F / n^2` are
/// skipped, which cannot stall convergence because the skipped mass stays a
/// factor `n` below the target. The sweep order is fixed (row-major over the
/// upper triangle), so identical inputs give bit-identical output.
pub fn jacobi_eigen(m: &SymMatrix, tol: f64, max_sweeps: usize) -> Result<EigenDecomposition> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "eigensolver tolerance must be positive and finite, got {tol}"
        )));
    }
    if max_sweeps == 0 {
        return Err(KhlError::InvalidArgument(
            "eigensolver needs at least one sweep".into(),
        ));
    }
    let n = m.dim();
    let fnorm = m.frobenius_norm();
    if !fnorm.is_finite() {
        return Err(KhlError::InvalidArgument(
            "matrix entries must be finite".into(),
        ));
    }

    let mut a = m.to_dense();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let target = tol * fnorm;
    let skip = target / (n * n) as f64;
    let mut sweeps = 0;
    let mut converged = off_diagonal_mass(&a, n) <= target;

    while !converged && sweeps < max_sweeps {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < skip {
                    continue;
                }
                let g = 100.0 * apq.abs();
                let h = d[q] - d[p];
                // small off-diagonal entries take the first-order rotation
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                for j in 0..p {
                    rotate(&mut a, n, s, tau, j, p, j, q);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, n, s, tau, p, j, j, q);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, n, s, tau, p, j, q, j);
                }
                for j in 0..n {
                    rotate(&mut v, n, s, tau, j, p, j, q);
                }
            }
        }
        // fold the accumulated corrections back into the diagonal; this keeps
        // the eigenvalue estimates free of drift from the in-sweep updates
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
        sweeps += 1;
        converged = off_diagonal_mass(&a, n) <= target;
    }
    if !converged {
        return Err(KhlError::NoConvergence {
            off_mass: off_diagonal_mass(&a, n),
            sweeps,
        });
    }

    // stable ascending sort, then a fixed sign convention per column
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    for col in &mut vectors {
        if let Some(&lead) = col.iter().find(|&&x| x != 0.0) {
            if lead < 0.0 {
                for x in col.iter_mut() {
                    *x = -*x;
                }
            }
        }
    }

    let mut residual = 0.0_f64;
    for (lambda, vec) in eigenvalues.iter().zip(&vectors) {
        let mv = m.matvec(vec)?;
        let norm_sq: f64 = mv
            .iter()
            .zip(vec)
            .map(|(a, b)| {
                let r = a - lambda * b;
                r * r
            })
            .sum();
        residual = residual.max(norm_sq.sqrt());
    }
    let mut orth_defect = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            orth_defect = orth_defect.max((dot - target).abs());
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
        residual,
        orth_defect,
        sweeps,
    })
}

/// Spectral projection onto the eigenvalues below a threshold.
#[derive(Debug, Clone)]
pub struct ProjectionMatrix {
    matrix: SymMatrix,
    mu: f64,
    rank: usize,
}

impl ProjectionMatrix {
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Number of eigenvalues below the threshold.
    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Default separation guard: `1e-8` times the spectral span.
pub fn default_guard(dec: &EigenDecomposition) -> f64 {
    let vals = dec.eigenvalues();
    let span = vals[vals.len() - 1] - vals[0];
    if span > 0.0 {
        1e-8 * span
    } else {
        1e-8
    }
}

/// Builds the projection onto eigenvectors with eigenvalue below `mu`.
///
/// Near-threshold eigenvalues make the projection ill-conditioned at this
/// truncation, so any eigenvalue closer to `mu` than the guard is an error
/// rather than a silent coin flip; callers perturb `mu` or refine the grid.
/// `guard = None` uses [`default_guard`].
pub fn spectral_projection(
    dec: &EigenDecomposition,
    mu: f64,
    guard: Option<f64>,
) -> Result<ProjectionMatrix> {
    if !mu.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "projection threshold must be finite, got {mu}"
        )));
    }
    let guard = match guard {
        Some(g) if g > 0.0 && g.is_finite() => g,
        Some(g) => {
            return Err(KhlError::InvalidArgument(format!(
                "projection guard must be positive and finite, got {g}"
            )))
        }
        None => default_guard(dec),
    };
    let mut distance = f64::INFINITY;
    for &lambda in dec.eigenvalues() {
        distance = distance.min((lambda - mu).abs());
    }
    if distance < guard {
        return Err(KhlError::ThresholdTooClose {
            mu,
            distance,
            guard,
        });
    }
    let selected: Vec<&Vec<f64>> = dec
        .eigenvalues()
        .iter()
        .zip(dec.eigenvectors())
        .filter(|(&lambda, _)| lambda < mu)
        .map(|(_, v)| v)
        .collect();
    let rank = selected.len();
    let n = dec.dim();
    let matrix = SymMatrix::from_fn(n, |i, j| selected.iter().map(|v| v[i] * v[j]).sum());
    Ok(ProjectionMatrix { matrix, mu, rank })
}
