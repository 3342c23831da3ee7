//! Exact integer-indexed constructions: the arc symbol, its Fourier
//! coefficients, Hankel sections, shifted Hilbert matrices, and the parity
//! decomposition that block-diagonalizes the Hankel section.
//!
//! The coefficient zeros on even indices are exact by construction, which is
//! what makes the parity cross-blocks vanish bit-exactly rather than to
//! rounding noise.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use crate::error::KhlError;
use crate::matrix::SymMatrix;
use crate::quadrature::gauss_legendre_reference;
use crate::Result;

/// The symbol taking the value 2 on the right half of the unit circle and 0
/// on the left half; equivalently, 2 on `[-1, 1]` after the Cayley transform
/// to the real line.
pub struct SymbolArc;

impl SymbolArc {
    /// Symbol value at the circle point `e^{i theta}`.
    pub fn value_on_circle(theta: f64) -> f64 {
        if theta.cos() >= 0.0 {
            2.0
        } else {
            0.0
        }
    }

    /// Symbol value at the real-line point `t`.
    pub fn value_on_line(t: f64) -> f64 {
        if t.abs() <= 1.0 {
            2.0
        } else {
            0.0
        }
    }

    /// Cayley image of the circle point: the right half-circle maps onto
    /// `[-1, 1]`.
    pub fn line_param(theta: f64) -> f64 {
        (0.5 * theta).tan()
    }
}

fn coeff(k: u64) -> f64 {
    debug_assert!(k >= 1);
    match k % 4 {
        0 | 2 => 0.0,
        1 => 2.0 / (PI * k as f64),
        _ => -2.0 / (PI * k as f64),
    }
}

/// `k`-th Fourier coefficient of the arc symbol, by exact case split.
///
/// The mod-4 split (zero on even `k`, alternating `2/(pi k)` on odd `k`)
/// avoids floating `sin`, so even-index coefficients are exactly zero.
pub fn fourier_coeff(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(KhlError::InvalidArgument(
            "coefficient index starts at 1".into(),
        ));
    }
    Ok(coeff(k))
}

/// Independent quadrature route to the same coefficient, for cross-checks.
///
/// The coefficient is `(1/pi)` times the integral of `cos(k theta)` over the
/// right half-circle; the integrand is even, so this integrates the half
/// interval `[0, pi/2]` and doubles. `nodes` is an evaluation budget spent on
/// composite Gauss panels of order 8.
pub fn coeff_by_quadrature(k: u64, nodes: usize) -> Result<f64> {
    if k == 0 {
        return Err(KhlError::InvalidArgument(
            "coefficient index starts at 1".into(),
        ));
    }
    if nodes < 64 {
        return Err(KhlError::InvalidArgument(format!(
            "coefficient quadrature needs at least 64 nodes, got {nodes}"
        )));
    }
    const ORDER: usize = 8;
    let panels = nodes / ORDER;
    let (ref_nodes, ref_weights) = gauss_legendre_reference(ORDER);
    let h = FRAC_PI_2 / panels as f64;
    let kf = k as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for i in 0..ORDER {
            let theta = mid + 0.5 * h * ref_nodes[i];
            acc += 0.5 * h * ref_weights[i] * (kf * theta).cos();
        }
    }
    Ok(FRAC_2_PI * acc)
}

/// `n x n` section of the Hankel matrix with entries `c_{i+j+1}`.
pub fn hankel_section(n: usize) -> Result<SymMatrix> {
    if n == 0 {
        return Err(KhlError::InvalidArgument(
            "section size must be at least 1".into(),
        ));
    }
    Ok(SymMatrix::from_fn(n, |i, j| coeff((i + j + 1) as u64)))
}

fn check_shift(p: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(KhlError::InvalidArgument(
            "section size must be at least 1".into(),
        ));
    }
    if !p.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "shift must be finite, got {p}"
        )));
    }
    // poles sit at p = i+j+1, i.e. positive integers up to 2n-1
    if p >= 1.0 && p.fract() == 0.0 && p <= (2 * n - 1) as f64 {
        return Err(KhlError::InvalidArgument(format!(
            "shift {p} hits a pole of the {n} x {n} section"
        )));
    }
    Ok(())
}

/// `p`-shifted Hilbert matrix: entries `1/(i+j+1-p)`.
///
/// `p = 0` gives the classical Hilbert matrix.
pub fn hilbert_shifted(p: f64, n: usize) -> Result<SymMatrix> {
    check_shift(p, n)?;
    Ok(SymMatrix::from_fn(n, |i, j| 1.0 / ((i + j + 1) as f64 - p)))
}

/// Sign-alternating variant: entries `(-1)^{i+j}/(i+j+1-p)`.
///
/// Conjugation by `diag((-1)^i)` carries this to [`hilbert_shifted`] exactly,
/// entry by entry, at every finite size.
pub fn hilbert_alt(p: f64, n: usize) -> Result<SymMatrix> {
    check_shift(p, n)?;
    Ok(SymMatrix::from_fn(n, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign / ((i + j + 1) as f64 - p)
    }))
}

/// Even/odd-index compressions of an even-dimensional symmetric matrix.
#[derive(Debug, Clone)]
pub struct ParitySplit {
    /// Compression onto even indices: entries `M(2i, 2j)`.
    pub even: SymMatrix,
    /// Compression onto odd indices: entries `M(2i+1, 2j+1)`.
    pub odd: SymMatrix,
    /// Largest cross-block entry `|M(2i, 2j+1)|`.
    pub off_max: f64,
}

/// Splits a `2n x 2n` symmetric matrix into its parity compressions and
/// reports the largest cross-parity entry.
///
/// For Hankel sections of the arc symbol the cross block vanishes exactly,
/// so `off_max == 0.0` is a meaningful assertion, not a tolerance check.
pub fn parity_split(m: &SymMatrix) -> Result<ParitySplit> {
    let dim = m.dim();
    if !dim.is_multiple_of(2) {
        return Err(KhlError::InvalidArgument(format!(
            "parity split needs even dimension, got {dim}"
        )));
    }
    let n = dim / 2;
    let even = SymMatrix::from_fn(n, |i, j| m.get(2 * i, 2 * j));
    let odd = SymMatrix::from_fn(n, |i, j| m.get(2 * i + 1, 2 * j + 1));
    let mut off_max = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            off_max = off_max.max(m.get(2 * i, 2 * j + 1).abs());
        }
    }
    Ok(ParitySplit { even, odd, off_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{jacobi_eigen, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};

    #[test]
    fn coefficient_case_split() {
        assert_eq!(fourier_coeff(1).unwrap(), 2.0 / PI);
        assert_eq!(fourier_coeff(2).unwrap(), 0.0);
        assert_eq!(fourier_coeff(3).unwrap(), -2.0 / (3.0 * PI));
        assert_eq!(fourier_coeff(4).unwrap(), 0.0);
        assert_eq!(fourier_coeff(5).unwrap(), 2.0 / (5.0 * PI));
        // decimal spot check independent of the closed-form expression
        assert!((PI * fourier_coeff(1).unwrap() - 2.0).abs() < 1e-15);
        assert!(fourier_coeff(0).is_err());
    }

    #[test]
    fn quadrature_route_agrees() {
        assert!((coeff_by_quadrature(1, 10_000).unwrap() - fourier_coeff(1).unwrap()).abs() < 1e-10);
        assert!(coeff_by_quadrature(2, 10_000).unwrap().abs() < 1e-10);
        assert!((coeff_by_quadrature(7, 10_000).unwrap() + 2.0 / (7.0 * PI)).abs() < 1e-9);
        for k in 1..=12 {
            let q = coeff_by_quadrature(k, 64).unwrap();
            assert!(
                (q - fourier_coeff(k).unwrap()).abs() < 1e-12,
                "k = {k}: quadrature {q}"
            );
        }
        assert!(coeff_by_quadrature(1, 63).is_err());
        assert!(coeff_by_quadrature(0, 100).is_err());
    }

    #[test]
    fn small_sections() {
        let h1 = hankel_section(1).unwrap();
        assert_eq!(h1.get(0, 0), 2.0 / PI);
        let h2 = hankel_section(2).unwrap();
        assert_eq!(h2.get(0, 0), 2.0 / PI);
        assert_eq!(h2.get(0, 1), 0.0);
        assert_eq!(h2.get(1, 1), -2.0 / (3.0 * PI));
        assert!(hankel_section(0).is_err());
    }

    #[test]
    fn anti_diagonals_constant() {
        let m = hankel_section(16).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                // the entry depends only on i + j
                assert_eq!(m.get(i, j), m.get(j, i));
                if i >= 1 && j < 15 {
                    assert_eq!(m.get(i, j), m.get(i - 1, j + 1));
                }
            }
        }
    }

    #[test]
    fn shifted_hilbert_entries() {
        let m = hilbert_shifted(0.5, 1).unwrap();
        assert_eq!(m.get(0, 0), 2.0);

        let m = hilbert_shifted(0.0, 2).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 1), 1.0 / 3.0);

        let m = hilbert_shifted(0.5, 2).unwrap();
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.get(0, 1), 2.0 / 3.0);
        assert_eq!(m.get(1, 1), 0.4);
    }

    #[test]
    fn two_by_two_spectra_match_quadratic_roots() {
        // closed-form eigenvalues of a 2x2 symmetric matrix as an oracle
        let roots = |m: &SymMatrix| {
            let tr = m.trace();
            let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(0, 1);
            let disc = (tr * tr - 4.0 * det).sqrt();
            (0.5 * (tr - disc), 0.5 * (tr + disc))
        };
        let m = hilbert_shifted(0.0, 2).unwrap();
        let (lo, hi) = roots(&m);
        let dec = jacobi_eigen(&m, DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        assert!((dec.eigenvalues()[0] - lo).abs() < 1e-14);
        assert!((dec.eigenvalues()[1] - hi).abs() < 1e-14);

        let m = hilbert_shifted(0.5, 2).unwrap();
        let (lo, hi) = roots(&m);
        let dec = jacobi_eigen(&m, DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        assert!((dec.eigenvalues()[0] - lo).abs() < 1e-14);
        assert!((dec.eigenvalues()[1] - hi).abs() < 1e-14);
        assert!((lo - 0.15863).abs() < 1e-5);
        assert!((hi - 2.24137).abs() < 1e-5);
        assert!(hi < PI);
    }

    #[test]
    fn pole_shifts_rejected() {
        assert!(hilbert_shifted(3.0, 4).is_err());
        assert!(hilbert_shifted(7.0, 4).is_err());
        // beyond the last index the pole is outside the section
        assert!(hilbert_shifted(9.0, 4).is_ok());
        assert!(hilbert_shifted(f64::NAN, 4).is_err());
        assert!(hilbert_alt(1.0, 2).is_err());
        assert!(hilbert_shifted(0.5, 0).is_err());
    }

    #[test]
    fn alternating_variant() {
        let m = hilbert_alt(0.5, 2).unwrap();
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.get(0, 1), -2.0 / 3.0);
        assert_eq!(m.get(1, 1), 0.4);
    }

    #[test]
    fn sign_conjugation_is_exact() {
        for p in [0.5, -0.5] {
            let plain = hilbert_shifted(p, 64).unwrap();
            let alt = hilbert_alt(p, 64).unwrap();
            let conjugated = SymMatrix::from_fn(64, |i, j| {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                sign * plain.get(i, j)
            });
            assert_eq!(conjugated.max_abs_diff(&alt).unwrap(), 0.0);
        }
    }

    #[test]
    fn alternating_spectrum_matches_plain() {
        let a = jacobi_eigen(&hilbert_shifted(0.5, 32).unwrap(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS)
            .unwrap();
        let b = jacobi_eigen(&hilbert_alt(0.5, 32).unwrap(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS)
            .unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_split_of_small_section() {
        let split = parity_split(&hankel_section(4).unwrap()).unwrap();
        assert_eq!(split.off_max, 0.0);

        assert_eq!(split.even.get(0, 0), 2.0 / PI);
        assert_eq!(split.even.get(0, 1), -2.0 / (3.0 * PI));
        assert_eq!(split.even.get(1, 1), 2.0 / (5.0 * PI));

        let even_ref = hilbert_alt(0.5, 2).unwrap().scale(1.0 / PI);
        assert!(split.even.max_abs_diff(&even_ref).unwrap() <= 1e-15);
        let odd_ref = hilbert_alt(-0.5, 2).unwrap().scale(-1.0 / PI);
        assert!(split.odd.max_abs_diff(&odd_ref).unwrap() <= 1e-15);
    }

    #[test]
    fn parity_split_needs_even_dimension() {
        assert!(parity_split(&hankel_section(5).unwrap()).is_err());
    }

    #[test]
    fn section_norms_grow_with_size() {
        let mut prev = f64::NEG_INFINITY;
        for n in [2usize, 4, 8] {
            let dec = jacobi_eigen(&hilbert_shifted(0.0, n).unwrap(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS)
                .unwrap();
            let top = *dec.eigenvalues().last().unwrap();
            assert!(top >= prev);
            prev = top;
        }
    }

    #[test]
    fn symbol_definitions_agree() {
        assert_eq!(SymbolArc::value_on_circle(0.0), 2.0);
        assert_eq!(SymbolArc::value_on_circle(2.0), 0.0);
        assert_eq!(SymbolArc::value_on_line(0.3), 2.0);
        assert_eq!(SymbolArc::value_on_line(-1.2), 0.0);
        for i in 0..=60 {
            let theta = -3.0 + 0.1 * i as f64;
            assert_eq!(
                SymbolArc::value_on_circle(theta),
                SymbolArc::value_on_line(SymbolArc::line_param(theta)),
                "mismatch at theta = {theta}"
            );
        }
    }
}
