use ndarray::Array2;

use crate::linalg::{self, adjoint, matmul, CMatrix, Schur, C64, ONE, ZERO};

use super::quadrature::gauss_legendre_unit;
use super::{default_cut_threshold, BranchCutReport, FuncalcError};

/// Padé degree for `log(I + X)` once `‖X‖₁ ≤ SQRT_TARGET`.
const PADE_DEGREE: usize = 7;
const SQRT_TARGET: f64 = 0.25;
const MAX_SQUARE_ROOTS: usize = 64;

/// Principal logarithm with the default branch-cut margin.
pub fn logm_principal(m: &CMatrix) -> Result<CMatrix, FuncalcError> {
    logm_principal_with_report(m, None).map(|(l, _)| l)
}

/// Principal logarithm together with the admissibility report computed from
/// the same Schur form.
pub fn logm_principal_with_report(
    m: &CMatrix,
    eps_cut: Option<f64>,
) -> Result<(CMatrix, BranchCutReport), FuncalcError> {
    let threshold = eps_cut.unwrap_or_else(|| default_cut_threshold(m));
    let schur = linalg::schur(m)?;
    let report = BranchCutReport::from_eigenvalues(&schur.eigenvalues(), threshold).into_result()?;
    Ok((logm_from_schur(&schur)?, report))
}

/// `Q log(T) Q*` by inverse scaling and squaring on the triangular factor.
///
/// The caller is responsible for the branch-cut check.
pub fn logm_from_schur(schur: &Schur) -> Result<CMatrix, FuncalcError> {
    let n = schur.t.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros((0, 0)));
    }
    let diag_logs: Vec<C64> = schur.t.diag().iter().map(|z| z.ln()).collect();
    let mut t: Vec<C64> = schur.t.iter().copied().collect();
    let mut roots = 0usize;
    loop {
        let dist = upper_norm_1_minus_identity(&t, n);
        if dist <= SQRT_TARGET {
            break;
        }
        if roots == MAX_SQUARE_ROOTS {
            return Err(FuncalcError::TooManySquareRoots { roots });
        }
        t = sqrt_upper(&t, n);
        roots += 1;
    }
    for k in 0..n {
        t[k * n + k] -= ONE;
    }
    let mut log_t = pade_log_upper(&t, n);
    let scale = C64::new(2f64.powi(roots as i32), 0.0);
    for z in log_t.iter_mut() {
        *z *= scale;
    }
    // diagonal entries are known in closed form
    for (k, d) in diag_logs.into_iter().enumerate() {
        log_t[k * n + k] = d;
    }
    let log_t = Array2::from_shape_vec((n, n), log_t).expect("square buffer");
    Ok(matmul(&matmul(&schur.q, &log_t), &adjoint(&schur.q)))
}

fn upper_norm_1_minus_identity(t: &[C64], n: usize) -> f64 {
    (0..n)
        .map(|j| {
            (0..=j)
                .map(|i| {
                    let z = if i == j { t[i * n + j] - ONE } else { t[i * n + j] };
                    z.norm()
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Principal square root of an upper triangular matrix (column recurrence).
fn sqrt_upper(t: &[C64], n: usize) -> Vec<C64> {
    let mut r = vec![ZERO; n * n];
    for k in 0..n {
        r[k * n + k] = t[k * n + k].sqrt();
    }
    let mut col = vec![ZERO; n];
    for j in 0..n {
        col[j] = r[j * n + j];
        for i in (0..j).rev() {
            let row = &r[i * n..(i + 1) * n];
            let mut s = t[i * n + j];
            for k in i + 1..j {
                s -= row[k] * col[k];
            }
            let v = s / (row[i] + col[j]);
            col[i] = v;
            r[i * n + j] = v;
        }
    }
    r
}

/// `Σ_j w_j X (I + x_j X)⁻¹` for upper triangular `X`, the partial-fraction
/// form of the diagonal Padé approximant to `log(I + X)`.
fn pade_log_upper(x: &[C64], n: usize) -> Vec<C64> {
    let (nodes, weights) = gauss_legendre_unit(PADE_DEGREE);
    let mut out = vec![ZERO; n * n];
    let mut a = vec![ZERO; n * n];
    let mut col = vec![ZERO; n];
    for (node, weight) in nodes.into_iter().zip(weights) {
        let node = C64::new(node, 0.0);
        for i in 0..n {
            for j in i..n {
                a[i * n + j] = x[i * n + j] * node + if i == j { ONE } else { ZERO };
            }
        }
        // (I + node X) Y = X, column by column; both factors commute with X.
        for c in 0..n {
            for i in (0..=c).rev() {
                let row = &a[i * n..(i + 1) * n];
                let mut s = x[i * n + c];
                for k in i + 1..=c {
                    s -= row[k] * col[k];
                }
                col[i] = s / row[i];
            }
            for i in 0..=c {
                out[i * n + c] += col[i] * weight;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::expm;
    use crate::linalg::{diag, identity, norm_fro, random_complex_matrix, shifted};

    fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
        norm_fro(&(a - b)) / norm_fro(b).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = logm_principal(&identity(6)).unwrap();
        assert!(norm_fro(&l) < 1e-15);
    }

    #[test]
    fn log_of_positive_diagonal() {
        let e = std::f64::consts::E;
        let l = logm_principal(&diag(&[C64::new(e, 0.0), C64::new(e * e, 0.0)])).unwrap();
        assert!((l[[0, 0]] - ONE).norm() < 1e-15);
        assert!((l[[1, 1]] - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(l[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn round_trip_random_admissible() {
        for (n, seed) in [(3, 1u64), (8, 2), (16, 3), (40, 4)] {
            let g = random_complex_matrix(n, seed) * C64::new(0.6 / (n as f64).sqrt(), 0.0);
            let m = shifted(&g, C64::new(2.0, 0.5));
            let l = logm_principal(&m).unwrap();
            assert!(rel_err(&expm(&l).unwrap(), &m) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn non_normal_jordan_block() {
        let mut m = identity(4) * C64::new(3.0, 0.0);
        for i in 0..3 {
            m[[i, i + 1]] = C64::new(5.0, 0.0);
        }
        let l = logm_principal(&m).unwrap();
        assert!(rel_err(&expm(&l).unwrap(), &m) < 1e-12);
    }

    #[test]
    fn principal_branch_for_rotation() {
        // exp of a 2x2 rotation by 1.0 rad is recovered, not a 2π-shifted branch
        let mut g = CMatrix::zeros((2, 2));
        g[[0, 1]] = C64::new(-1.0, 0.0);
        g[[1, 0]] = C64::new(1.0, 0.0);
        let u = expm(&g).unwrap();
        let l = logm_principal(&u).unwrap();
        assert!(norm_fro(&(l - g)) < 1e-14);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let m = diag(&[C64::new(-1.0, 0.0), ONE]);
        assert!(matches!(logm_principal(&m), Err(FuncalcError::BranchCut { .. })));
        let m = diag(&[C64::new(-4.0, 1e-9), ONE]);
        assert!(matches!(logm_principal(&m), Err(FuncalcError::BranchCut { .. })));
    }
}
