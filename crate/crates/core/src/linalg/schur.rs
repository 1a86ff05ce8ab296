use ndarray::Array2;

use super::{ensure_square, is_finite, CMatrix, LinalgError, C64, ONE, ZERO};

/// Complex Schur form `A = Q T Q*` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diag().to_vec()
    }
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 40;

/// Computes the complex Schur decomposition of a square matrix.
pub fn schur(a: &CMatrix) -> Result<Schur, LinalgError> {
    let n = ensure_square(a)?;
    if !is_finite(a) {
        return Err(LinalgError::NonFinite);
    }
    let mut h: Vec<C64> = a.iter().copied().collect();
    // qt holds the transpose of Q so that column updates of Q are row updates.
    let mut qt: Vec<C64> = vec![ZERO; n * n];
    for k in 0..n {
        qt[k * n + k] = ONE;
    }
    hessenberg(&mut h, &mut qt, n);
    hessenberg_qr(&mut h, &mut qt, n)?;
    for i in 1..n {
        for j in 0..i {
            h[i * n + j] = ZERO;
        }
    }
    let t = Array2::from_shape_vec((n, n), h).expect("square buffer");
    let q = Array2::from_shape_vec((n, n), qt).expect("square buffer").reversed_axes();
    Ok(Schur { q: q.as_standard_layout().to_owned(), t })
}

/// Householder reduction to upper Hessenberg form, accumulating Q.
fn hessenberg(h: &mut [C64], qt: &mut [C64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut wbuf = vec![ZERO; n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let v = &mut v[..m];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = h[(k + 1 + i) * n + k];
        }
        let tail: f64 = v[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (tail + v[0].norm_sqr()).sqrt();
        let phase = if v[0] == ZERO { ONE } else { v[0] / v[0].norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // H <- P H on rows k+1.., columns k..
        let w = &mut wbuf[..n - k];
        w.iter_mut().for_each(|z| *z = ZERO);
        for (i, vi) in v.iter().enumerate() {
            let row = &h[(k + 1 + i) * n + k..(k + 2 + i) * n];
            let c = vi.conj();
            for (wj, rj) in w.iter_mut().zip(row) {
                *wj += c * rj;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let f = *vi * tau;
            let row = &mut h[(k + 1 + i) * n + k..(k + 2 + i) * n];
            for (rj, wj) in row.iter_mut().zip(w.iter()) {
                *rj -= f * wj;
            }
        }
        h[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            h[i * n + k] = ZERO;
        }

        // H <- H P on columns k+1.., all rows
        for r in 0..n {
            let row = &mut h[r * n + k + 1..(r + 1) * n];
            let mut s = ZERO;
            for (rj, vj) in row.iter().zip(v.iter()) {
                s += rj * vj;
            }
            let f = s * tau;
            for (rj, vj) in row.iter_mut().zip(v.iter()) {
                *rj -= f * vj.conj();
            }
        }

        // Q <- Q P, i.e. Qᵀ <- Pᵀ Qᵀ on rows k+1..
        let w = &mut wbuf[..n];
        w.iter_mut().for_each(|z| *z = ZERO);
        for (i, vi) in v.iter().enumerate() {
            let row = &qt[(k + 1 + i) * n..(k + 2 + i) * n];
            for (wj, rj) in w.iter_mut().zip(row) {
                *wj += vi * rj;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let f = vi.conj() * tau;
            let row = &mut qt[(k + 1 + i) * n..(k + 2 + i) * n];
            for (rj, wj) in row.iter_mut().zip(w.iter()) {
                *rj -= f * wj;
            }
        }
    }
}

/// Rotation `G = [c s; -s̄ c]` with real `c` such that `G [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, y.conj() / y.norm());
    }
    let ax = x.norm();
    let norm = ax.hypot(y.norm());
    (ax / norm, (x / ax) * y.conj() / norm)
}

/// Applies `G` to rows `r0` and `r0 + 1` over the column range `cols`.
fn rotate_rows(m: &mut [C64], n: usize, r0: usize, cols: std::ops::Range<usize>, c: f64, s: C64) {
    let (top, bottom) = m.split_at_mut((r0 + 1) * n);
    let a = &mut top[r0 * n + cols.start..r0 * n + cols.end];
    let b = &mut bottom[cols.start..cols.end];
    let sc = s.conj();
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (u, v) = (*x, *y);
        *x = u * c + s * v;
        *y = v * c - sc * u;
    }
}

/// Applies `G*` from the right to columns `c0`, `c0 + 1` over `rows`.
fn rotate_cols(m: &mut [C64], n: usize, c0: usize, rows: std::ops::Range<usize>, c: f64, s: C64) {
    let sc = s.conj();
    for r in rows {
        let base = r * n + c0;
        let (u, v) = (m[base], m[base + 1]);
        m[base] = u * c + sc * v;
        m[base + 1] = v * c - s * u;
    }
}

fn abs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Single-shift implicit QR on an upper Hessenberg matrix.
fn hessenberg_qr(h: &mut [C64], qt: &mut [C64], n: usize) -> Result<(), LinalgError> {
    if n < 2 {
        return Ok(());
    }
    let ulp = f64::EPSILON;
    let safe_min = f64::MIN_POSITIVE / ulp;
    let total_norm: f64 = h.iter().map(|z| abs1(*z)).fold(0.0, f64::max);
    let max_total = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(n);
    while hi > 0 {
        // locate the active block [lo, hi]
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = abs1(h[k * n + k - 1]);
            let mut tst = abs1(h[(k - 1) * n + k - 1]) + abs1(h[k * n + k]);
            if tst == 0.0 {
                tst = total_norm;
            }
            if sub <= safe_min || sub <= ulp * tst {
                h[k * n + k - 1] = ZERO;
                lo = k;
                break;
            }
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_total {
            return Err(LinalgError::QrNoConvergence { iterations: total });
        }

        let d = h[hi * n + hi];
        let mu = if its % 10 == 0 {
            // exceptional shift
            d + C64::new(0.75 * h[hi * n + hi - 1].re.abs(), 0.0)
        } else {
            let a = h[(hi - 1) * n + hi - 1];
            let b = h[(hi - 1) * n + hi];
            let c = h[hi * n + hi - 1];
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let l1 = half_tr + disc;
            let l2 = half_tr - disc;
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        let mut x = h[lo * n + lo] - mu;
        let mut y = h[(lo + 1) * n + lo];
        rots.clear();
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let first_col = if k > lo { k - 1 } else { k };
            rotate_rows(h, n, k, first_col..n, c, s);
            if k > lo {
                h[(k + 1) * n + k - 1] = ZERO;
            }
            // Rows up to k take no further row rotations in this sweep, so
            // their column rotations are deferred and applied row-wise below.
            rotate_cols(h, n, k, k + 1..(k + 3).min(hi + 1), c, s);
            rots.push((c, s));
            rotate_rows(qt, n, k, 0..n, c, s.conj());
            if k + 1 < hi {
                x = h[(k + 1) * n + k];
                y = h[(k + 2) * n + k];
            }
        }
        for r in 0..=hi {
            let first = r.max(lo);
            let row = &mut h[r * n..(r + 1) * n];
            for k in first..hi {
                let (c, s) = rots[k - lo];
                let (u, v) = (row[k], row[k + 1]);
                row[k] = u * c + s.conj() * v;
                row[k + 1] = v * c - s * u;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{adjoint, identity, norm_fro, random_complex_matrix};
    use super::*;

    fn check(a: &CMatrix) {
        let s = schur(a).unwrap();
        let n = a.nrows();
        let recon = s.q.dot(&s.t).dot(&adjoint(&s.q));
        let scale = norm_fro(a).max(1.0);
        assert!(norm_fro(&(recon - a)) / scale < 1e-12, "reconstruction");
        assert!(norm_fro(&(adjoint(&s.q).dot(&s.q) - identity(n))) < 1e-12, "unitarity");
        for i in 0..n {
            for j in 0..i {
                assert_eq!(s.t[[i, j]], ZERO);
            }
        }
    }

    #[test]
    fn random_matrices_factor() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (20, 5), (45, 6)] {
            check(&random_complex_matrix(n, seed));
        }
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let mut a = CMatrix::zeros((2, 2));
        a[[0, 1]] = C64::new(-1.0, 0.0);
        a[[1, 0]] = ONE;
        let s = schur(&a).unwrap();
        let mut ev = s.eigenvalues();
        ev.sort_by(|p, q| p.im.partial_cmp(&q.im).unwrap());
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
        check(&a);
    }

    #[test]
    fn jordan_block_and_zero_matrix() {
        let mut a = CMatrix::zeros((4, 4));
        for i in 0..3 {
            a[[i, i + 1]] = ONE;
        }
        check(&a);
        check(&CMatrix::zeros((5, 5)));
    }
}
