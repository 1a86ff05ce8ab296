use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{Grid, GridError, OperatorMatrix, Symmetry};
use crate::linalg::{self, CMatrix, CVector, C64, ZERO};
use crate::Axis;

/// Lanczos settings of [`operator_norm`].
const NORM_REL_TOL: f64 = 1e-10;
const NORM_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeScheme {
    Spectral,
    Upwind,
}

impl fmt::Display for DerivativeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivativeScheme::Spectral => "spectral",
            DerivativeScheme::Upwind => "upwind",
        })
    }
}

impl FromStr for DerivativeScheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(DerivativeScheme::Spectral),
            "upwind" => Ok(DerivativeScheme::Upwind),
            _ => Err(format!("unknown scheme '{s}' (expected spectral or upwind)")),
        }
    }
}

/// Fourier differentiation matrix on `n` periodic nodes of `[−L, L)`:
/// `D_jk = (π/L)·½(−1)^{j−k} cot(π(j−k)/n)`, zero diagonal. Its symbol is
/// `ikπ/L` for `|k| < n/2` and 0 at the Nyquist mode.
///
/// Only the strictly lower triangle is evaluated; the upper one is its exact
/// negative, so the matrix is skew-symmetric to the last bit.
pub fn spectral_derivative_1d(n: usize, half_width: f64) -> Array2<f64> {
    let mut d = Array2::zeros((n, n));
    let scale = PI / half_width;
    for j in 0..n {
        for k in 0..j {
            let m = j - k;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let v = scale * 0.5 * sign / (PI * m as f64 / n as f64).tan();
            d[[j, k]] = v;
            d[[k, j]] = -v;
        }
    }
    d
}

/// Forward difference `(S − I)/h` with the periodic one-step shift `(Su)_j = u_{j+1}`.
pub fn upwind_derivative_1d(n: usize, half_width: f64) -> Array2<f64> {
    let h = 2.0 * half_width / n as f64;
    let mut d = Array2::zeros((n, n));
    for j in 0..n {
        d[[j, j]] = -1.0 / h;
        d[[j, (j + 1) % n]] = 1.0 / h;
    }
    d
}

fn stencil(grid: &Grid, scheme: DerivativeScheme) -> Array2<f64> {
    let (n, l) = (grid.points_per_axis(), grid.half_width());
    match scheme {
        DerivativeScheme::Spectral => spectral_derivative_1d(n, l),
        DerivativeScheme::Upwind => upwind_derivative_1d(n, l),
    }
}

/// `I ⊗ ⋯ ⊗ d ⊗ ⋯ ⊗ I` with `d` on `axis`.
fn embed(grid: &Grid, axis: Axis, d: &Array2<f64>) -> CMatrix {
    let (size, n, stride) = (grid.len(), grid.points_per_axis(), grid.stride(axis));
    let mut out = CMatrix::zeros((size, size));
    for i in 0..size {
        let a = grid.multi_index(i)[axis.index()];
        let base = i - a * stride;
        for m in 0..n {
            let v = d[[a, m]];
            if v != 0.0 {
                out[[i, base + m * stride]] = C64::new(v, 0.0);
            }
        }
    }
    out
}

fn axis_label(prefix: &str, axis: Axis) -> String {
    format!("{prefix} ∂{axis}")
}

pub fn spectral_derivative(grid: &Grid, axis: Axis) -> Result<OperatorMatrix, GridError> {
    grid.check_axis(axis)?;
    grid.ensure_dense()?;
    let d = spectral_derivative_1d(grid.points_per_axis(), grid.half_width());
    OperatorMatrix::new(*grid, embed(grid, axis, &d), axis_label("spectral", axis), Symmetry::SkewAdjoint)
}

pub fn upwind_derivative(grid: &Grid, axis: Axis) -> Result<OperatorMatrix, GridError> {
    grid.check_axis(axis)?;
    grid.ensure_dense()?;
    let d = upwind_derivative_1d(grid.points_per_axis(), grid.half_width());
    OperatorMatrix::general(*grid, embed(grid, axis, &d), axis_label("upwind", axis))
}

/// Multiplication by the node coordinate along `axis`.
pub fn coordinate_operator(grid: &Grid, axis: Axis) -> Result<OperatorMatrix, GridError> {
    grid.check_axis(axis)?;
    let size = grid.ensure_dense()?;
    let mut m = CMatrix::zeros((size, size));
    for i in 0..size {
        m[[i, i]] = C64::new(grid.point(i)[axis.index()], 0.0);
    }
    OperatorMatrix::new(*grid, m, format!("diag({axis})"), Symmetry::SelfAdjoint)
}

/// Axes `(j, k)` of the generator `r_j ∂_k − r_k ∂_j` about `axis`.
fn rotation_axes(grid: &Grid, axis: Axis) -> Result<(Axis, Axis), GridError> {
    let (j, k) = axis.cyclic_successors();
    for a in [j, k] {
        grid.check_axis(a).map_err(|_| GridError::AxisOutOfRange { axis, dim: grid.dim() })?;
    }
    if grid.dim() < 2 {
        return Err(GridError::AxisOutOfRange { axis, dim: grid.dim() });
    }
    Ok((j, k))
}

/// Real rotation generator `r_j D_k − r_k D_j` about `axis` (so `x D_y − y D_x`
/// for `z`), equal to `iL/ħ` discretized. Skew-symmetric by construction:
/// each coordinate factor acts on a tensor slot its derivative leaves alone.
pub fn angular_momentum_matrix(grid: &Grid, axis: Axis) -> Result<OperatorMatrix, GridError> {
    let (j, k) = rotation_axes(grid, axis)?;
    let size = grid.ensure_dense()?;
    let n = grid.points_per_axis();
    let d = spectral_derivative_1d(n, grid.half_width());
    let mut m = CMatrix::zeros((size, size));
    for i in 0..size {
        let idx = grid.multi_index(i);
        let p = grid.point(i);
        for (deriv_axis, coord, sign) in [(k, p[j.index()], 1.0), (j, p[k.index()], -1.0)] {
            let a = idx[deriv_axis.index()];
            let stride = grid.stride(deriv_axis);
            let base = i - a * stride;
            for q in 0..n {
                let v = d[[a, q]];
                if v != 0.0 {
                    m[[i, base + q * stride]] += C64::new(sign * coord * v, 0.0);
                }
            }
        }
    }
    let label = format!("{j}∂{k} − {k}∂{j}");
    OperatorMatrix::new(*grid, m, label, Symmetry::SkewAdjoint)
}

/// Applies the 1D derivative along `axis` line by line, without assembling
/// the full matrix.
pub fn apply_derivative(grid: &Grid, axis: Axis, scheme: DerivativeScheme, v: &CVector) -> Result<CVector, GridError> {
    grid.check_axis(axis)?;
    check_len(grid, v)?;
    let d = stencil(grid, scheme);
    let (n, stride) = (grid.points_per_axis(), grid.stride(axis));
    let mut out = CVector::zeros(v.len());
    let mut line = vec![ZERO; n];
    for base in 0..grid.len() {
        if grid.multi_index(base)[axis.index()] != 0 {
            continue;
        }
        for (q, slot) in line.iter_mut().enumerate() {
            *slot = v[base + q * stride];
        }
        for a in 0..n {
            let row = d.row(a);
            let s: C64 = row.iter().zip(&line).filter(|(c, _)| **c != 0.0).map(|(c, z)| z * *c).sum();
            out[base + a * stride] = s;
        }
    }
    Ok(out)
}

pub fn apply_coordinate(grid: &Grid, axis: Axis, v: &CVector) -> Result<CVector, GridError> {
    grid.check_axis(axis)?;
    check_len(grid, v)?;
    Ok(CVector::from_shape_fn(v.len(), |i| v[i] * grid.point(i)[axis.index()]))
}

/// Matrix-free [`angular_momentum_matrix`].
pub fn apply_angular_momentum(grid: &Grid, axis: Axis, v: &CVector) -> Result<CVector, GridError> {
    let (j, k) = rotation_axes(grid, axis)?;
    let dk = apply_derivative(grid, k, DerivativeScheme::Spectral, v)?;
    let dj = apply_derivative(grid, j, DerivativeScheme::Spectral, v)?;
    Ok(apply_coordinate(grid, j, &dk)? - apply_coordinate(grid, k, &dj)?)
}

fn check_len(grid: &Grid, v: &CVector) -> Result<(), GridError> {
    if v.len() != grid.len() {
        return Err(GridError::DimensionMismatch { expected: grid.len(), found: v.len() });
    }
    Ok(())
}

/// Spectral norm by Lanczos on `M*M` (relative tolerance 1e-10, at most
/// 10⁴ steps). The value is a lower bound on `‖M‖₂`.
pub fn operator_norm(m: &CMatrix) -> Result<f64, GridError> {
    let est = linalg::lanczos_norm(m, NORM_REL_TOL, NORM_MAX_ITER);
    if !est.converged {
        return Err(GridError::NormNoConvergence { iterations: est.iterations, estimate: est.value });
    }
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridops::StateVector;
    use crate::linalg::{adjoint, commutator, norm_fro};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn spectral_derivative_of_sine() {
        for (n, l) in [(8, PI), (32, 6.0), (64, 2.5)] {
            let g = Grid::new(1, n, l).unwrap();
            let d = spectral_derivative(&g, Axis::X).unwrap();
            let u = StateVector::from_fn(g, |p| c((PI * p[0] / l).sin()));
            let du = d.apply(&u).unwrap();
            let want = StateVector::from_fn(g, |p| c(PI / l * (PI * p[0] / l).cos()));
            assert!(du.max_abs_difference(&want) < 1e-12, "n = {n}");
            let one = StateVector::from_fn(g, |_| c(1.0));
            assert!(d.apply(&one).unwrap().values.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn spectral_norm_matches_symbol() {
        for (n, want) in [(32, 15.0), (64, 31.0)] {
            let g = Grid::new(1, n, PI).unwrap();
            assert!((g.max_wavenumber() - want).abs() < 1e-12);
            let d = spectral_derivative(&g, Axis::X).unwrap();
            let norm = operator_norm(&d.entries).unwrap();
            assert!((norm - want).abs() < 1e-6 * want, "n = {n}: {norm}");
        }
    }

    #[test]
    fn spectral_derivative_is_exactly_skew() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        for a in [Axis::X, Axis::Y] {
            let d = spectral_derivative(&g, a).unwrap();
            assert_eq!(norm_fro(&(&d.entries + &adjoint(&d.entries))), 0.0);
        }
    }

    #[test]
    fn upwind_stencil() {
        let g = Grid::new(1, 4, PI).unwrap();
        let d = upwind_derivative(&g, Axis::X).unwrap();
        let h = g.spacing();
        for j in 0..4 {
            for k in 0..4 {
                let want = if k == j {
                    -1.0 / h
                } else if k == (j + 1) % 4 {
                    1.0 / h
                } else {
                    0.0
                };
                assert_eq!(d.entries[[j, k]], c(want));
            }
        }
        let one = StateVector::from_fn(g, |_| c(1.0));
        assert!(d.apply(&one).unwrap().values.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn upwind_is_dissipative() {
        let g = Grid::new(1, 32, PI).unwrap();
        let d = upwind_derivative(&g, Axis::X).unwrap();
        for seed in 0..100 {
            let u = StateVector::random(g, seed);
            let du = d.apply(&u).unwrap();
            assert!(u.inner(&du).re <= 1e-12 * u.norm().powi(2) * operator_norm(&d.entries).unwrap());
        }
    }

    #[test]
    fn coordinate_operator_entries() {
        let g = Grid::new(1, 4, PI).unwrap();
        let x = coordinate_operator(&g, Axis::X).unwrap();
        let diag: Vec<f64> = x.entries.diag().iter().map(|z| z.re).collect();
        assert_eq!(diag, g.nodes());
        assert!((operator_norm(&x.entries).unwrap() - PI).abs() < 1e-9);
    }

    #[test]
    fn different_axes_commute_exactly() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let x = coordinate_operator(&g, Axis::X).unwrap();
        let dy = spectral_derivative(&g, Axis::Y).unwrap();
        assert_eq!(norm_fro(&commutator(&x.entries, &dy.entries)), 0.0);
    }

    #[test]
    fn rotation_generator_kills_radial_gaussian() {
        let g = Grid::new(2, 40, 6.0).unwrap();
        let m = angular_momentum_matrix(&g, Axis::Z).unwrap();
        assert_eq!(norm_fro(&(&m.entries + &adjoint(&m.entries))), 0.0);
        let u = StateVector::from_fn(g, |p| c((-(p[0] * p[0] + p[1] * p[1])).exp()));
        let mu = m.apply(&u).unwrap();
        assert!(mu.values.iter().all(|z| z.norm() < 1e-10), "{}", mu.norm());
    }

    #[test]
    fn rotation_generator_needs_two_axes() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        assert!(angular_momentum_matrix(&g, Axis::X).is_err());
        let g = Grid::new(1, 8, 1.0).unwrap();
        assert!(angular_momentum_matrix(&g, Axis::Z).is_err());
    }

    #[test]
    fn matrix_free_agrees_with_dense() {
        let g = Grid::new(3, 6, 2.0).unwrap();
        let u = StateVector::random(g, 7);
        for axis in Axis::ALL {
            let dense = angular_momentum_matrix(&g, axis).unwrap().entries.dot(&u.values);
            let free = apply_angular_momentum(&g, axis, &u.values).unwrap();
            assert!(linalg::vec_norm(&(dense - free)) < 1e-12);
            for scheme in [DerivativeScheme::Spectral, DerivativeScheme::Upwind] {
                let m = match scheme {
                    DerivativeScheme::Spectral => spectral_derivative(&g, axis),
                    DerivativeScheme::Upwind => upwind_derivative(&g, axis),
                }
                .unwrap();
                let diff = m.entries.dot(&u.values) - apply_derivative(&g, axis, scheme, &u.values).unwrap();
                assert!(linalg::vec_norm(&diff) < 1e-12);
            }
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let g = Grid::new(3, 18, 1.0).unwrap();
        assert!(matches!(spectral_derivative(&g, Axis::X), Err(GridError::DenseTooLarge { .. })));
        // matrix-free still works
        let u = StateVector::random(g, 1);
        assert!(apply_angular_momentum(&g, Axis::Z, &u.values).is_ok());
    }
}
