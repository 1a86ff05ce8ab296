use std::f64::consts::PI;

use crate::linalg::{self, norm_fro, CMatrix, Lu, C64};

use super::{distance_to_cut, spectrum, FuncalcError};

const START_NODES: usize = 32;
const MAX_NODES: usize = 1 << 15;
const CONVERGENCE_TOL: f64 = 1e-10;

/// Principal logarithm as the Cauchy integral
/// `(1/2πi) ∮ Log(λ) (λI − M)⁻¹ dλ` over a circle enclosing the spectrum.
///
/// The circle has centre `c` maximizing `dist(c, (−∞,0]) − max|λᵢ − c|` and
/// radius `ρ + radius_margin · gap`, where `ρ = max|λᵢ − c|`. The trapezoidal
/// rule is refined by node doubling until successive results agree to 1e-10.
pub fn logm_contour(m: &CMatrix, radius_margin: f64) -> Result<CMatrix, FuncalcError> {
    let n = linalg::ensure_square(m)?;
    if n == 0 {
        return Ok(CMatrix::zeros((0, 0)));
    }
    let margin = radius_margin.clamp(1e-3, 1.0 - 1e-3);
    let eigs = spectrum(m, "contour")?.eigenvalues;
    let (center, rho, gap) = best_center(&eigs);
    let scale = eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if gap <= 1e-8 * scale {
        return Err(FuncalcError::ContourBlocked { gap });
    }
    let radius = rho + margin * gap;

    let node_sum = |count: usize, offset: usize, stride: usize| -> Result<CMatrix, FuncalcError> {
        let mut acc = CMatrix::zeros((n, n));
        for k in (offset..count).step_by(stride) {
            let phase = C64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64);
            let lambda = center + phase * radius;
            let res = Lu::new(&linalg::shifted(&(-m), lambda))?.inverse();
            acc = acc + res * (lambda.ln() * phase * radius);
        }
        Ok(acc)
    };

    let mut nodes = START_NODES;
    let mut sum = node_sum(nodes, 0, 1)?;
    let mut estimate = &sum * C64::new(1.0 / nodes as f64, 0.0);
    let mut change = f64::INFINITY;
    while nodes * 2 <= MAX_NODES {
        nodes *= 2;
        sum = sum + node_sum(nodes, 1, 2)?;
        let refined = &sum * C64::new(1.0 / nodes as f64, 0.0);
        change = norm_fro(&(&refined - &estimate));
        estimate = refined;
        if change < CONVERGENCE_TOL * norm_fro(&estimate).max(1.0) {
            return Ok(estimate);
        }
    }
    Err(FuncalcError::QuadratureNoConvergence { nodes, last_change: change })
}

fn enclosing_radius(eigs: &[C64], c: C64) -> f64 {
    eigs.iter().map(|z| (z - c).norm()).fold(0.0, f64::max)
}

fn slack(eigs: &[C64], c: C64) -> f64 {
    distance_to_cut(c) - enclosing_radius(eigs, c)
}

/// Pattern search for the circle centre with the largest clearance.
/// Returns `(centre, enclosing radius, clearance)`.
fn best_center(eigs: &[C64]) -> (C64, f64, f64) {
    let count = eigs.len() as f64;
    let mean = eigs.iter().sum::<C64>() / count;
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for z in eigs {
        lo_re = lo_re.min(z.re);
        hi_re = hi_re.max(z.re);
        lo_im = lo_im.min(z.im);
        hi_im = hi_im.max(z.im);
    }
    let mid = C64::new(0.5 * (lo_re + hi_re), 0.5 * (lo_im + hi_im));
    let spread = (hi_re - lo_re).max(hi_im - lo_im).max(mean.norm() * 1e-3).max(1e-12);

    let mut best = if slack(eigs, mid) > slack(eigs, mean) { mid } else { mean };
    let mut best_slack = slack(eigs, best);
    // moving the centre further right also helps when the spectrum hugs the cut
    for shift in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let c = best + C64::new(shift * spread, 0.0);
        let s = slack(eigs, c);
        if s > best_slack {
            best = c;
            best_slack = s;
        }
    }
    let mut step = spread;
    let dirs = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    while step > spread * 1e-6 {
        let mut improved = false;
        for d in dirs {
            let c = best + d * step;
            let s = slack(eigs, c);
            if s > best_slack {
                best = c;
                best_slack = s;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, enclosing_radius(eigs, best), best_slack)
}
