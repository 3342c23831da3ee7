//! Dense real symmetric matrices with lower-triangle storage.

use crate::error::KhlError;
use crate::Result;

/// Dense real symmetric matrix.
///
/// The row-major lower triangle is authoritative; reads above the diagonal
/// mirror across it, so symmetry is structural rather than approximate.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    // lower triangle, row-major: (i, j) with j <= i lives at i*(i+1)/2 + j
    data: Vec<f64>,
}

impl SymMatrix {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Builds from a function evaluated on the lower triangle (`i >= j`).
    ///
    /// Panics if the function produces a non-finite entry.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j}): {v}");
                data.push(v);
            }
        }
        SymMatrix { n, data }
    }

    /// Fallible version of [`from_fn`](Self::from_fn) for entry generators
    /// that can reject their inputs.
    pub fn try_from_fn<F: FnMut(usize, usize) -> Result<f64>>(n: usize, mut f: F) -> Result<Self> {
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j)?;
                if !v.is_finite() {
                    return Err(KhlError::InvalidArgument(format!(
                        "non-finite entry at ({i}, {j}): {v}"
                    )));
                }
                data.push(v);
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(i: usize, j: usize) -> usize {
        debug_assert!(j <= i);
        i * (i + 1) / 2 + j
    }

    /// Entry `(i, j)`; mirrors across the diagonal.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.data[Self::idx(i, j)]
        } else {
            self.data[Self::idx(j, i)]
        }
    }

    /// Sets entry `(i, j)` (and by symmetry `(j, i)`).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if j <= i {
            self.data[Self::idx(i, j)] = v;
        } else {
            self.data[Self::idx(j, i)] = v;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[Self::idx(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.data[Self::idx(i, j)];
                let v2 = v * v;
                s += if i == j { v2 } else { 2.0 * v2 };
            }
        }
        s.sqrt()
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(KhlError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let y = (0..self.n)
            .map(|i| {
                x.iter()
                    .enumerate()
                    .map(|(j, &xj)| self.get(i, j) * xj)
                    .sum()
            })
            .collect();
        Ok(y)
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if other.n != self.n {
            return Err(KhlError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SymMatrix { n: self.n, data })
    }

    /// Entrywise scaling by `factor`.
    pub fn scale(&self, factor: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Largest `|self(i,j) - other(i,j)|`.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> Result<f64> {
        if other.n != self.n {
            return Err(KhlError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Row-major dense copy (full square), for interop in tests and the
    /// eigensolver working storage.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i * self.n + j] = self.get(i, j);
            }
        }
        out
    }
}
