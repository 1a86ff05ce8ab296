use ndarray::{s, Array2};

use super::{matmul_view, ensure_square, is_finite, norm_1, CMatrix, LinalgError, ONE, ZERO};

/// Panel width of the blocked factorization and solves.
const BLOCK: usize = 48;

/// LU factorization with partial (row) pivoting, `PA = LU`.
///
/// `L` is unit lower triangular and shares storage with `U`. Trailing
/// updates are done block-wise through `ndarray`'s matrix product.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self, LinalgError> {
        let n = ensure_square(a)?;
        if !is_finite(a) {
            return Err(LinalgError::NonFinite);
        }
        let mut lu = a.as_standard_layout().to_owned();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut k0 = 0;
        while k0 < n {
            let k1 = (k0 + BLOCK).min(n);
            factor_panel(&mut lu, &mut perm, k0, k1)?;
            if k1 < n {
                // U12 <- L11⁻¹ A12
                for i in k0 + 1..k1 {
                    for k in k0..i {
                        let l = lu[[i, k]];
                        if l != ZERO {
                            let (src, mut dst) =
                                lu.multi_slice_mut((s![k, k1..], s![i, k1..]));
                            dst.zip_mut_with(&src, |t, s| *t -= l * s);
                        }
                    }
                }
                // A22 <- A22 − L21 U12
                let prod = matmul_view(lu.slice(s![k1.., k0..k1]), lu.slice(s![k0..k1, k1..]));
                let mut a22 = lu.slice_mut(s![k1.., k1..]);
                a22 -= &prod;
            }
            k0 = k1;
        }
        Ok(Lu { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix, LinalgError> {
        let n = self.dim();
        if b.nrows() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: b.nrows() });
        }
        let mut x = Array2::from_shape_fn(b.dim(), |(i, j)| b[[self.perm[i], j]]);
        // forward substitution with unit L
        let mut r0 = 0;
        while r0 < n {
            let r1 = (r0 + BLOCK).min(n);
            if r0 > 0 {
                let prod = matmul_view(self.lu.slice(s![r0..r1, ..r0]), x.slice(s![..r0, ..]));
                let mut xb = x.slice_mut(s![r0..r1, ..]);
                xb -= &prod;
            }
            for i in r0 + 1..r1 {
                for k in r0..i {
                    let l = self.lu[[i, k]];
                    if l != ZERO {
                        let (src, mut dst) = x.multi_slice_mut((s![k, ..], s![i, ..]));
                        dst.zip_mut_with(&src, |t, s| *t -= l * s);
                    }
                }
            }
            r0 = r1;
        }
        // back substitution with U
        let mut r1 = n;
        while r1 > 0 {
            let r0 = r1.saturating_sub(BLOCK);
            if r1 < n {
                let prod = matmul_view(self.lu.slice(s![r0..r1, r1..]), x.slice(s![r1.., ..]));
                let mut xb = x.slice_mut(s![r0..r1, ..]);
                xb -= &prod;
            }
            for i in (r0..r1).rev() {
                for k in i + 1..r1 {
                    let u = self.lu[[i, k]];
                    if u != ZERO {
                        let (src, mut dst) = x.multi_slice_mut((s![k, ..], s![i, ..]));
                        dst.zip_mut_with(&src, |t, s| *t -= u * s);
                    }
                }
                let inv = ONE / self.lu[[i, i]];
                x.row_mut(i).mapv_inplace(|t| t * inv);
            }
            r1 = r0;
        }
        Ok(x)
    }

    pub fn inverse(&self) -> CMatrix {
        self.solve(&super::identity(self.dim())).expect("identity has matching rows")
    }

    /// Exact 1-norm condition number `‖A‖₁‖A⁻¹‖₁`, given the original matrix.
    pub fn condition_1(&self, a: &CMatrix) -> f64 {
        norm_1(a) * norm_1(&self.inverse())
    }
}

/// Unblocked elimination of columns `k0..k1`; swaps act on whole rows.
fn factor_panel(
    lu: &mut CMatrix,
    perm: &mut [usize],
    k0: usize,
    k1: usize,
) -> Result<(), LinalgError> {
    let n = lu.nrows();
    for k in k0..k1 {
        let mut p = k;
        let mut best = lu[[k, k]].norm();
        for i in k + 1..n {
            let v = lu[[i, k]].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(LinalgError::Singular { column: k });
        }
        if p != k {
            let (mut a, mut b) = lu.multi_slice_mut((s![k, ..], s![p, ..]));
            ndarray::Zip::from(&mut a).and(&mut b).for_each(std::mem::swap);
            perm.swap(k, p);
        }
        let inv_pivot = ONE / lu[[k, k]];
        for i in k + 1..n {
            let l = lu[[i, k]] * inv_pivot;
            lu[[i, k]] = l;
            if l != ZERO {
                let (src, mut dst) = lu.multi_slice_mut((s![k, k + 1..k1], s![i, k + 1..k1]));
                dst.zip_mut_with(&src, |t, s| *t -= l * s);
            }
        }
    }
    Ok(())
}
