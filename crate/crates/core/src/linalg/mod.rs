//! Dense complex linear algebra: LU with partial pivoting, Hessenberg
//! reduction, the complex Schur form, and the norms used by the
//! verification layer.
//!
//! Matrices are `ndarray::Array2<Complex64>` in standard (row-major) layout.
//! The factorizations work on contiguous row slices.

mod lu;
mod schur;

pub use lu::Lu;
pub use schur::{schur, Schur};

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular (zero pivot in column {column})")]
    Singular { column: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("QR iteration failed to converge after {iterations} iterations")]
    QrNoConvergence { iterations: usize },
}

pub fn ensure_square(m: &CMatrix) -> Result<usize, LinalgError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    Ok(rows)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, ONE)
}

pub fn diag(values: &[C64]) -> CMatrix {
    Array2::from_diag(&Array1::from(values.to_vec()))
}

/// `m + shift * I`.
pub fn shifted(m: &CMatrix, shift: C64) -> CMatrix {
    let mut out = m.clone();
    for k in 0..out.nrows().min(out.ncols()) {
        out[[k, k]] += shift;
    }
    out
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// `ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    matmul(a, b) - matmul(b, a)
}

/// Below this many multiply-adds the complex kernel is used directly.
const SPLIT_THRESHOLD: usize = 1 << 15;

/// Matrix product through real kernels: one real product when both factors
/// are real, four otherwise. The real kernel is several times faster than
/// the generic complex one and the arithmetic is the same (no 3M trick).
pub fn matmul_view(a: ArrayView2<'_, C64>, b: ArrayView2<'_, C64>) -> CMatrix {
    if a.nrows() * a.ncols() * b.ncols() < SPLIT_THRESHOLD {
        return a.dot(&b);
    }
    let (ar, ai) = (a.mapv(|z| z.re), a.mapv(|z| z.im));
    let (br, bi) = (b.mapv(|z| z.re), b.mapv(|z| z.im));
    let a_real = ai.iter().all(|v| *v == 0.0);
    let b_real = bi.iter().all(|v| *v == 0.0);
    match (a_real, b_real) {
        (true, true) => ar.dot(&br).mapv(|v| C64::new(v, 0.0)),
        (true, false) => {
            let (re, im) = (ar.dot(&br), ar.dot(&bi));
            Array2::from_shape_fn(re.dim(), |ij| C64::new(re[ij], im[ij]))
        }
        (false, true) => {
            let (re, im) = (ar.dot(&br), ai.dot(&br));
            Array2::from_shape_fn(re.dim(), |ij| C64::new(re[ij], im[ij]))
        }
        (false, false) => {
            let re = ar.dot(&br) - ai.dot(&bi);
            let im = ar.dot(&bi) + ai.dot(&br);
            Array2::from_shape_fn(re.dim(), |ij| C64::new(re[ij], im[ij]))
        }
    }
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    matmul_view(a.view(), b.view())
}

/// Maximum absolute column sum.
pub fn norm_1(m: &CMatrix) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute row sum.
pub fn norm_inf(m: &CMatrix) -> f64 {
    m.rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm_fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `sqrt(‖m‖₁‖m‖∞)`, an upper bound on the spectral norm.
pub fn spectral_upper_bound(m: &CMatrix) -> f64 {
    (norm_1(m) * norm_inf(m)).sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos estimate of the largest singular value.
///
/// `value` is the square root of the top Ritz value of `M*M`, which never
/// exceeds the true spectral norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, by Sturm-sequence bisection.
fn tridiagonal_max_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let radius = |i: usize| {
        let left = if i > 0 { beta[i - 1].abs() } else { 0.0 };
        let right = beta.get(i).map_or(0.0, |b| b.abs());
        left + right
    };
    let mut lo = (0..alpha.len()).map(|i| alpha[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..alpha.len()).map(|i| alpha[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    // number of eigenvalues below x
    let below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..alpha.len() {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let k = alpha.len();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Spectral norm by Lanczos on `M*M` with full reorthogonalization, from a
/// fixed pseudo-random start.
///
/// Stops once two successive estimates differ by at most `rel_tol` relative,
/// or when the Krylov space becomes invariant (exact up to rounding). At most
/// `min(max_steps, n)` steps.
pub fn lanczos_norm(m: &CMatrix, rel_tol: f64, max_steps: usize) -> NormEstimate {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mh = adjoint(m);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
    let mut q: CVector = Array1::from_shape_fn(n, |_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let nq = vec_norm(&q);
    q.mapv_inplace(|z| z / nq);
    let mut basis: Vec<CVector> = Vec::new();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut prev = f64::NAN;
    let mut settled = 0;
    let steps = max_steps.min(n).max(1);
    for step in 1..=steps {
        let mut w = mh.dot(&m.dot(&q));
        let a = q.iter().zip(w.iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
        alpha.push(a);
        basis.push(q);
        let scale = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(a.abs());
        for _ in 0..2 {
            for b in &basis {
                let c: C64 = b.iter().zip(w.iter()).map(|(x, y)| x.conj() * y).sum();
                w.zip_mut_with(b, |y, x| *y -= c * x);
            }
        }
        let theta = tridiagonal_max_eigenvalue(&alpha, &beta).max(0.0);
        let value = theta.sqrt();
        let b = vec_norm(&w);
        if b <= 1e3 * f64::EPSILON * scale.max(theta) || step == n {
            return NormEstimate { value, iterations: step, converged: true };
        }
        if (value - prev).abs() <= rel_tol * value {
            settled += 1;
            if settled == 2 {
                return NormEstimate { value, iterations: step, converged: true };
            }
        } else {
            settled = 0;
        }
        prev = value;
        beta.push(b);
        q = w.mapv(|z| z / b);
    }
    NormEstimate { value: prev, iterations: steps, converged: false }
}

/// Entries uniform in the unit square `[-1,1] + i[-1,1]`, reproducible from `seed`.
pub fn random_complex_matrix(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, n), |_| C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
}
