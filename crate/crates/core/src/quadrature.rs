//! Quadrature grids on `(0, L]` and symmetrized Nystrom discretization.

use crate::error::KhlError;
use crate::kernels::{eval_kernel, KernelSpec};
use crate::matrix::SymMatrix;
use crate::Result;

/// Quadrature rule selector.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadRule {
    /// Composite midpoint rule, `N` equal cells.
    Midpoint,
    /// Composite Gauss-Legendre: `panels` equal panels carrying a fixed-order
    /// rule each, `N = panels * order`.
    GaussLegendreComposite { panels: usize, order: usize },
}

impl QuadRule {
    /// Shorthand for the composite Gauss-Legendre variant.
    pub fn glc(panels: usize, order: usize) -> Self {
        QuadRule::GaussLegendreComposite { panels, order }
    }
}

impl std::fmt::Display for QuadRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuadRule::Midpoint => write!(f, "midpoint"),
            QuadRule::GaussLegendreComposite { panels, order } => {
                write!(f, "glc(panels={panels}, order={order})")
            }
        }
    }
}

/// Truncated quadrature grid on `(0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    length: f64,
    rule: QuadRule,
}

impl Grid {
    /// Builds a grid from raw parts, validating the grid invariants:
    /// strictly increasing nodes in `(0, L]`, positive weights, and
    /// `sum(weights) = L` to `1e-10` relative.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, length: f64, rule: QuadRule) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(KhlError::InvalidArgument(format!(
                "grid needs matching nonempty nodes/weights, got {} nodes and {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if length <= 0.0 || !length.is_finite() {
            return Err(KhlError::InvalidArgument(format!(
                "grid length must be positive and finite, got {length}"
            )));
        }
        let mut prev = 0.0;
        for &x in &nodes {
            if !x.is_finite() || x <= prev || x > length {
                return Err(KhlError::InvalidArgument(format!(
                    "nodes must be strictly increasing inside (0, {length}], offending node {x}"
                )));
            }
            prev = x;
        }
        if !weights.iter().all(|&w| w > 0.0) {
            return Err(KhlError::InvalidArgument(
                "all grid weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - length).abs() > 1e-10 * length.max(1.0) {
            return Err(KhlError::InvalidArgument(format!(
                "weights sum to {total}, expected the grid length {length}"
            )));
        }
        Ok(Grid {
            nodes,
            weights,
            length,
            rule,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn rule(&self) -> &QuadRule {
        &self.rule
    }

    /// Largest gap between consecutive nodes (the grid's resolution scale).
    pub fn max_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(self.nodes[0], f64::max)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre_reference(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Builds a quadrature grid on `(0, L]`.
///
/// For the composite Gauss-Legendre rule, `n` must equal `panels * order`.
pub fn make_grid(length: f64, n: usize, rule: QuadRule) -> Result<Grid> {
    if length <= 0.0 || !length.is_finite() {
        return Err(KhlError::InvalidArgument(format!(
            "grid length must be positive and finite, got {length}"
        )));
    }
    if n < 2 {
        return Err(KhlError::InvalidArgument(format!(
            "grid needs at least 2 nodes, got {n}"
        )));
    }
    match rule {
        QuadRule::Midpoint => {
            let h = length / n as f64;
            let nodes = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
            let weights = vec![h; n];
            Grid::from_parts(nodes, weights, length, QuadRule::Midpoint)
        }
        QuadRule::GaussLegendreComposite { panels, order } => {
            if panels == 0 || order == 0 || panels * order != n {
                return Err(KhlError::InvalidArgument(format!(
                    "composite rule mismatch: {panels} panels x order {order} != {n} nodes"
                )));
            }
            let (ref_nodes, ref_weights) = gauss_legendre_reference(order);
            let h = length / panels as f64;
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for p in 0..panels {
                let a = p as f64 * h;
                let mid = a + 0.5 * h;
                for k in 0..order {
                    nodes.push(mid + 0.5 * h * ref_nodes[k]);
                    weights.push(0.5 * h * ref_weights[k]);
                }
            }
            Grid::from_parts(nodes, weights, length, rule)
        }
    }
}

/// Symmetrized Nystrom discretization: entries `sqrt(w_i w_j) * k(x_i, x_j)`.
///
/// The symmetrized form shares its spectrum with the plain weighted Nystrom
/// matrix, so the symmetric eigensolver serves every operator here.
pub fn discretize(spec: &KernelSpec, grid: &Grid) -> Result<SymMatrix> {
    let x = grid.nodes();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    SymMatrix::try_from_fn(grid.size(), |i, j| {
        Ok(sw[i] * sw[j] * eval_kernel(spec, x[i], x[j])?)
    })
}

/// Test functions for smeared quadratic-form comparisons.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum TestFunction {
    Gaussian { center: f64, width: f64 },
    Indicator { a: f64, b: f64 },
}

impl TestFunction {
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if width <= 0.0 || !width.is_finite() || !center.is_finite() {
            return Err(KhlError::InvalidArgument(format!(
                "gaussian test function needs finite center and positive width, got ({center}, {width})"
            )));
        }
        Ok(TestFunction::Gaussian { center, width })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if a >= b || !a.is_finite() || !b.is_finite() {
            return Err(KhlError::InvalidArgument(format!(
                "indicator test function needs a < b, got ({a}, {b})"
            )));
        }
        Ok(TestFunction::Indicator { a, b })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Gaussian { center, width } => {
                let u = (x - center) / width;
                (-0.5 * u * u).exp()
            }
            TestFunction::Indicator { a, b } => {
                if x >= *a && x <= *b {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Weighted samples `sqrt(w_i) * f(x_i)`; errors if the sampled vector
    /// vanishes (the function has no mass on the grid).
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        let s: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .map(|(&x, &w)| w.sqrt() * self.eval(x))
            .collect();
        if s.iter().all(|&v| v == 0.0) {
            return Err(KhlError::ZeroVector);
        }
        Ok(s)
    }
}

/// Smeared quadratic form `f^T M g` with `f`, `g` sampled as
/// `sqrt(w_i) * f(x_i)`.
pub fn quadratic_form(m: &SymMatrix, f: &TestFunction, g: &TestFunction, grid: &Grid) -> Result<f64> {
    if m.dim() != grid.size() {
        return Err(KhlError::DimensionMismatch {
            expected: grid.size(),
            got: m.dim(),
        });
    }
    let fs = f.sample(grid)?;
    let gs = g.sample(grid)?;
    quadratic_form_sampled(m, &fs, &gs)
}

/// Quadratic form on already-sampled weighted vectors.
pub fn quadratic_form_sampled(m: &SymMatrix, f: &[f64], g: &[f64]) -> Result<f64> {
    let mg = m.matvec(g)?;
    if f.len() != mg.len() {
        return Err(KhlError::DimensionMismatch {
            expected: mg.len(),
            got: f.len(),
        });
    }
    Ok(f.iter().zip(&mg).map(|(a, b)| a * b).sum())
}
