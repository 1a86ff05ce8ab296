//! Periodic tensor-product grids on `[−L, L)^d`, sampled fields with the
//! `L²` inner product, and dense discretizations of `∂ₖ`, coordinate
//! multiplication and the rotation generators `x∂y − y∂x` (and cyclic).
//!
//! Flat indices are row-major with the x index slowest. Dense matrices are
//! capped at [`DENSE_CAP`] rows; larger 3D grids go through the matrix-free
//! `apply_*` functions.

mod csvio;
mod ops;

pub use csvio::{read_field_csv, read_matrix_csv, write_field_csv, write_matrix_csv, CsvError};
pub use ops::{
    angular_momentum_matrix, apply_angular_momentum, apply_coordinate, apply_derivative, coordinate_operator,
    operator_norm, spectral_derivative, spectral_derivative_1d, upwind_derivative, upwind_derivative_1d,
    DerivativeScheme,
};

use std::f64::consts::PI;

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::Axis;

/// Largest dense operator dimension.
pub const DENSE_CAP: usize = 4096;

/// Skew-adjointness tolerance `‖M + M*‖ ≤ SKEW_TOL · ‖M‖` (Frobenius).
pub const SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GridError {
    #[error("grid dimension must be 1, 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("points per axis must be even and at least 4, got {0}")]
    InvalidSize(usize),
    #[error("half-width must be positive and finite, got {0}")]
    InvalidHalfWidth(f64),
    #[error("axis {axis} is not available on a {dim}D grid")]
    AxisOutOfRange { axis: Axis, dim: usize },
    #[error("dense operator of dimension {dimension} exceeds the cap {DENSE_CAP}; use matrix-free application")]
    DenseTooLarge { dimension: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix labelled skew-adjoint has ‖M + M*‖ = {defect:e} > {SKEW_TOL:e}·‖M‖")]
    NotSkewAdjoint { defect: f64 },
    #[error("matrix labelled self-adjoint has ‖M − M*‖ = {defect:e} > {SKEW_TOL:e}·‖M‖")]
    NotSelfAdjoint { defect: f64 },
    #[error("norm estimate did not converge after {iterations} Lanczos steps (estimate {estimate:e})")]
    NormNoConvergence { iterations: usize, estimate: f64 },
}

/// Periodic grid with `n` nodes per axis, `−L + k·2L/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Grid, GridError> {
        if !(1..=3).contains(&dim) {
            return Err(GridError::InvalidDimension(dim));
        }
        if n < 4 || n % 2 != 0 {
            return Err(GridError::InvalidSize(n));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(GridError::InvalidHalfWidth(half_width));
        }
        if n.checked_pow(dim as u32).is_none() {
            return Err(GridError::InvalidSize(n));
        }
        Ok(Grid { dim, n, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Total number of nodes `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^dim` of the `L²` inner product.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    pub fn check_axis(&self, axis: Axis) -> Result<(), GridError> {
        if axis.index() < self.dim {
            Ok(())
        } else {
            Err(GridError::AxisOutOfRange { axis, dim: self.dim })
        }
    }

    /// Flat-index stride of `axis`.
    pub fn stride(&self, axis: Axis) -> usize {
        self.n.pow((self.dim - 1 - axis.index()) as u32)
    }

    /// Per-axis indices of a flat index; unused axes are 0.
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rest % self.n;
            rest /= self.n;
        }
        idx
    }

    /// Node coordinates of a flat index; unused axes are 0.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.node(idx[a]);
        }
        p
    }

    /// Largest Fourier wavenumber resolved by the spectral derivative, `π(n/2−1)/L`.
    pub fn max_wavenumber(&self) -> f64 {
        PI * (self.n as f64 / 2.0 - 1.0) / self.half_width
    }

    pub(crate) fn ensure_dense(&self) -> Result<usize, GridError> {
        let dimension = self.len();
        if dimension > DENSE_CAP {
            return Err(GridError::DenseTooLarge { dimension });
        }
        Ok(dimension)
    }
}

/// Complex field sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub grid: Grid,
    pub values: CVector,
}

impl StateVector {
    pub fn new(grid: Grid, values: CVector) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(StateVector { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        StateVector { grid, values: CVector::zeros(grid.len()) }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> C64) -> Self {
        let values = Array1::from_shape_fn(grid.len(), |k| f(grid.point(k)));
        StateVector { grid, values }
    }

    /// Entries uniform in `[-1,1] + i[-1,1]`.
    pub fn random(grid: Grid, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values =
            Array1::from_shape_fn(grid.len(), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        StateVector { grid, values }
    }

    /// `h^d Σ ū v`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        let s: C64 = self.values.iter().zip(other.values.iter()).map(|(a, b)| a.conj() * b).sum();
        s * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        (linalg::vec_norm(&self.values).powi(2) * self.grid.cell_volume()).sqrt()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        let diff = &self.values - &other.values;
        (linalg::vec_norm(&diff).powi(2) * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs_difference(&self, other: &StateVector) -> f64 {
        self.values.iter().zip(other.values.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Algebraic tag carried by an [`OperatorMatrix`] and checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    General,
    SelfAdjoint,
    SkewAdjoint,
}

/// Dense operator on the nodes of a grid.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub entries: CMatrix,
    pub label: String,
    pub symmetry: Symmetry,
}

impl OperatorMatrix {
    pub fn new(grid: Grid, entries: CMatrix, label: impl Into<String>, symmetry: Symmetry) -> Result<Self, GridError> {
        let n = grid.len();
        if entries.dim() != (n, n) {
            return Err(GridError::DimensionMismatch { expected: n, found: entries.nrows() });
        }
        let size = linalg::norm_fro(&entries);
        let adj = linalg::adjoint(&entries);
        match symmetry {
            Symmetry::SkewAdjoint => {
                let defect = linalg::norm_fro(&(&entries + &adj));
                if defect > SKEW_TOL * size {
                    return Err(GridError::NotSkewAdjoint { defect });
                }
            }
            Symmetry::SelfAdjoint => {
                let defect = linalg::norm_fro(&(&entries - &adj));
                if defect > SKEW_TOL * size {
                    return Err(GridError::NotSelfAdjoint { defect });
                }
            }
            Symmetry::General => {}
        }
        Ok(OperatorMatrix { grid, entries, label: label.into(), symmetry })
    }

    /// Untagged operator (no symmetry check).
    pub fn general(grid: Grid, entries: CMatrix, label: impl Into<String>) -> Result<Self, GridError> {
        OperatorMatrix::new(grid, entries, label, Symmetry::General)
    }

    /// Zero operator.
    pub fn zeros(grid: Grid) -> Result<Self, GridError> {
        let n = grid.ensure_dense()?;
        OperatorMatrix::new(grid, CMatrix::zeros((n, n)), "0", Symmetry::SkewAdjoint)
    }

    pub fn identity(grid: Grid) -> Result<Self, GridError> {
        let n = grid.ensure_dense()?;
        OperatorMatrix::new(grid, linalg::identity(n), "I", Symmetry::SelfAdjoint)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, u: &StateVector) -> Result<StateVector, GridError> {
        if u.values.len() != self.dim() {
            return Err(GridError::DimensionMismatch { expected: self.dim(), found: u.values.len() });
        }
        Ok(StateVector { grid: self.grid, values: self.entries.dot(&u.values) })
    }

    /// `c · M`, keeping the tag when `c` preserves it.
    pub fn scaled(&self, c: C64, label: impl Into<String>) -> OperatorMatrix {
        let symmetry = match self.symmetry {
            Symmetry::General => Symmetry::General,
            s if c.im == 0.0 => s,
            Symmetry::SkewAdjoint if c.re == 0.0 => Symmetry::SelfAdjoint,
            Symmetry::SelfAdjoint if c.re == 0.0 => Symmetry::SkewAdjoint,
            _ => Symmetry::General,
        };
        OperatorMatrix { grid: self.grid, entries: &self.entries * c, label: label.into(), symmetry }
    }
}
