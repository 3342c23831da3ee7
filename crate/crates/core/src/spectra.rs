//! Finite-section spectral diagnostics: spectral measures of probe vectors,
//! interval-filling metrics, atom-decay scans across section sizes, and a
//! cyclic-vector rank certificate.
//!
//! Absolute continuity of a limit operator is never provable from finite
//! sections; these probes report observables (atom decay, gap shrinkage,
//! full Krylov rank) whose expected behavior under an absolutely continuous,
//! multiplicity-one limit is known, so the results read "consistent with",
//! never "proven".

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{jacobi_eigen, EigenDecomposition, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::error::KhlError;
use crate::hankel::{hankel_section, hilbert_shifted};
use crate::kernels::KernelSpec;
use crate::matrix::SymMatrix;
use crate::quadrature::{discretize, make_grid, QuadRule};
use crate::Result;

/// Relative tolerance for declaring a Krylov direction dependent.
pub const DEFAULT_KRYLOV_TOL: f64 = 1e-10;

/// Discrete spectral measure of a probe vector: one atom per eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralMeasure {
    /// `(location, weight)` pairs in ascending location order.
    atoms: Vec<(f64, f64)>,
    total_mass: f64,
}

impl SpectralMeasure {
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Sum of all atom weights; equals the squared norm of the probe.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn max_atom_weight(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).fold(0.0, f64::max)
    }
}

/// Spectral measure of `f` in the eigenbasis: atom `(lambda_i, <v_i, f>^2)`.
pub fn spectral_measure(dec: &EigenDecomposition, f: &[f64]) -> Result<SpectralMeasure> {
    if f.len() != dec.dim() {
        return Err(KhlError::DimensionMismatch {
            expected: dec.dim(),
            got: f.len(),
        });
    }
    if f.iter().all(|&x| x == 0.0) {
        return Err(KhlError::ZeroVector);
    }
    let atoms: Vec<(f64, f64)> = dec
        .eigenvalues()
        .iter()
        .zip(dec.eigenvectors())
        .map(|(&lambda, v)| {
            let overlap: f64 = v.iter().zip(f).map(|(a, b)| a * b).sum();
            (lambda, overlap * overlap)
        })
        .collect();
    let total_mass = atoms.iter().map(|&(_, w)| w).sum();
    Ok(SpectralMeasure { atoms, total_mass })
}

/// How thoroughly the eigenvalues fill an open interval `(a, b)`.
///
/// The gap chain runs over the eigenvalues strictly inside the interval with
/// the endpoints appended, so `max_gap` shrinks toward zero exactly when the
/// interval fills; eigenvalues on or beyond the endpoints count as outside.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FillReport {
    pub a: f64,
    pub b: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub max_gap: f64,
    pub count_outside: usize,
}

/// Computes the fill metrics of a decomposition over `(a, b)`.
pub fn fill_metrics(dec: &EigenDecomposition, a: f64, b: f64) -> Result<FillReport> {
    if a >= b || !a.is_finite() || !b.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "fill interval needs a < b, got ({a}, {b})"
        )));
    }
    let vals = dec.eigenvalues();
    let inside: Vec<f64> = vals.iter().copied().filter(|&l| l > a && l < b).collect();
    let count_outside = vals.len() - inside.len();
    let mut max_gap = 0.0_f64;
    let mut prev = a;
    for &l in inside.iter().chain(std::iter::once(&b)) {
        max_gap = max_gap.max(l - prev);
        prev = l;
    }
    Ok(FillReport {
        a,
        b,
        min_eig: vals[0],
        max_eig: vals[vals.len() - 1],
        max_gap,
        count_outside,
    })
}

/// Families of symmetric sections indexed by size.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionBuilder {
    /// Hankel section of the arc symbol.
    Hankel,
    /// `p`-shifted Hilbert matrix.
    Hilbert { p: f64 },
    /// Midpoint discretization of the oscillatory difference kernel on a
    /// truncation of length `length`.
    Kmu { mu: f64, length: f64 },
}

impl SectionBuilder {
    pub fn build(&self, size: usize) -> Result<SymMatrix> {
        match *self {
            SectionBuilder::Hankel => hankel_section(size),
            SectionBuilder::Hilbert { p } => hilbert_shifted(p, size),
            SectionBuilder::Kmu { mu, length } => {
                let spec = KernelSpec::kmu(mu)?;
                let grid = make_grid(length, size, QuadRule::Midpoint)?;
                discretize(&spec, &grid)
            }
        }
    }
}

/// Largest-atom trace across growing section sizes for a fixed probe vector.
///
/// A limit operator with point spectrum overlapped by the probe keeps a
/// non-decaying atom; decay of the largest atom as the section grows is the
/// observable consistent with an absolutely continuous limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcDecayReport {
    pub sizes: Vec<usize>,
    pub probe: usize,
    pub max_atoms: Vec<f64>,
    /// Successive ratios `max_atoms[i+1] / max_atoms[i]`.
    pub decay_ratios: Vec<f64>,
}

/// Runs the atom-decay probe for a custom section family.
///
/// Sizes run concurrently; the report order follows the input order.
pub fn ac_decay_probe_with<F>(build: F, sizes: &[usize], probe: usize) -> Result<AcDecayReport>
where
    F: Fn(usize) -> Result<SymMatrix> + Sync,
{
    if sizes.len() < 3 {
        return Err(KhlError::InvalidArgument(format!(
            "atom-decay probe needs at least 3 sizes, got {}",
            sizes.len()
        )));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KhlError::InvalidArgument(
            "atom-decay probe sizes must be strictly increasing".into(),
        ));
    }
    if probe >= sizes[0] {
        return Err(KhlError::InvalidArgument(format!(
            "probe index {probe} is outside the smallest section ({})",
            sizes[0]
        )));
    }
    let max_atoms: Vec<f64> = sizes
        .par_iter()
        .map(|&n| {
            let m = build(n)?;
            let dec = jacobi_eigen(&m, DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
            let mut f = vec![0.0; n];
            f[probe] = 1.0;
            Ok(spectral_measure(&dec, &f)?.max_atom_weight())
        })
        .collect::<Result<_>>()?;
    let decay_ratios = max_atoms.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(AcDecayReport {
        sizes: sizes.to_vec(),
        probe,
        max_atoms,
        decay_ratios,
    })
}

/// Runs the atom-decay probe for a named section family.
pub fn ac_decay_probe(builder: &SectionBuilder, sizes: &[usize], probe: usize) -> Result<AcDecayReport> {
    ac_decay_probe_with(|n| builder.build(n), sizes, probe)
}

/// Dimension of the Krylov space of `v` under `M`, by incremental
/// orthogonalization.
///
/// Each new direction `M q_k` is orthogonalized twice against the basis so
/// far (twice is enough to restore orthogonality in floating point); the
/// scan stops when the remainder falls below `tol` times the raw direction
/// norm. A full rank `n` certifies `v` is cyclic for the section, which
/// forces every eigenvalue of the section to be simple.
pub fn krylov_rank(m: &SymMatrix, v: &[f64], tol: f64) -> Result<usize> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "rank tolerance must be positive and finite, got {tol}"
        )));
    }
    let n = m.dim();
    if v.len() != n {
        return Err(KhlError::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(KhlError::ZeroVector);
    }
    let mut basis: Vec<Vec<f64>> = vec![v.iter().map(|x| x / norm).collect()];
    while basis.len() < n {
        let raw = m.matvec(basis.last().unwrap())?;
        let raw_norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if raw_norm == 0.0 {
            break;
        }
        let mut w = raw;
        for _ in 0..2 {
            for q in &basis {
                let coeff: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= coeff * qi;
                }
            }
        }
        let w_norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if w_norm < tol * raw_norm {
            break;
        }
        basis.push(w.into_iter().map(|x| x / w_norm).collect());
    }
    Ok(basis.len())
}
