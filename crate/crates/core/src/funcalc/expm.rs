use crate::linalg::{self, matmul, norm_1, CMatrix, Lu, C64};

use super::FuncalcError;

/// Padé(13) numerator coefficients `b_0 … b_13`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which Padé(13) is accurate to unit roundoff.
const THETA_13: f64 = 5.371_920_351_148_152;

/// More squarings than this and the result cannot be meaningful in double precision.
const MAX_SQUARINGS: i32 = 64;

/// Matrix exponential by scaling and squaring with the order-13 Padé approximant.
pub fn expm(m: &CMatrix) -> Result<CMatrix, FuncalcError> {
    let n = linalg::ensure_square(m)?;
    if !linalg::is_finite(m) {
        return Err(FuncalcError::Linalg(linalg::LinalgError::NonFinite));
    }
    if n == 0 {
        return Ok(CMatrix::zeros((0, 0)));
    }
    let norm = norm_1(m);
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    if squarings > MAX_SQUARINGS {
        return Err(FuncalcError::ExpOverflow { norm });
    }
    let a = if squarings > 0 { m * C64::new(0.5f64.powi(squarings), 0.0) } else { m.clone() };

    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let ident = linalg::identity(n);
    let a2 = matmul(&a, &a);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a4, &a2);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_tail = &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1);
    let u = matmul(&a, &(matmul(&a6, &u_inner) + u_tail));

    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v_tail = &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);
    let v = matmul(&a6, &v_inner) + v_tail;

    let p = &v + &u;
    let q = &v - &u;
    let mut r = Lu::new(&q)?.solve(&p)?;
    for _ in 0..squarings {
        r = matmul(&r, &r);
    }
    if !linalg::is_finite(&r) {
        return Err(FuncalcError::ExpOverflow { norm });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity, norm_fro, ONE};

    /// Truncated Taylor series, valid for small norms.
    fn series(m: &CMatrix, terms: usize) -> CMatrix {
        let n = m.nrows();
        let mut sum = identity(n);
        let mut term = identity(n);
        for k in 1..terms {
            term = term.dot(m) * C64::new(1.0 / k as f64, 0.0);
            sum = sum + &term;
        }
        sum
    }

    #[test]
    fn zero_gives_identity() {
        let e = expm(&CMatrix::zeros((5, 5))).unwrap();
        assert!(norm_fro(&(e - identity(5))) < 1e-15);
    }

    #[test]
    fn diagonal_imaginary() {
        let thetas = [0.3, -1.2, 2.5, 10.0];
        let d: Vec<C64> = thetas.iter().map(|t| C64::new(0.0, *t)).collect();
        let e = expm(&diag(&d)).unwrap();
        for (k, t) in thetas.iter().enumerate() {
            assert!((e[[k, k]] - C64::new(0.0, *t).exp()).norm() < 1e-13);
        }
    }

    #[test]
    fn planar_rotation_closed_form_and_series() {
        for theta in [0.1, 0.7, 1.5, 3.0] {
            let mut m = CMatrix::zeros((2, 2));
            m[[0, 1]] = C64::new(-theta, 0.0);
            m[[1, 0]] = C64::new(theta, 0.0);
            let e = expm(&m).unwrap();
            let (c, s) = (theta.cos(), theta.sin());
            let expected = ndarray::arr2(&[[c, -s], [s, c]]).mapv(|x| C64::new(x, 0.0));
            assert!(norm_fro(&(&e - &expected)) < 1e-14, "theta = {theta}");
            assert!(norm_fro(&(&e - &series(&m, 30))) < 1e-13);
        }
    }

    #[test]
    fn large_norm_uses_squaring() {
        let m = diag(&[C64::new(-30.0, 0.0), C64::new(0.0, 40.0), ONE]);
        let e = expm(&m).unwrap();
        assert!((e[[0, 0]].re - (-30f64).exp()).abs() < 1e-25);
        assert!((e[[1, 1]] - C64::new(0.0, 40.0).exp()).norm() < 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let m = diag(&[C64::new(1e300, 0.0)]);
        assert!(matches!(expm(&m), Err(FuncalcError::ExpOverflow { .. })));
        let m = diag(&[C64::new(800.0, 0.0)]);
        assert!(matches!(expm(&m), Err(FuncalcError::ExpOverflow { .. })));
    }
}
