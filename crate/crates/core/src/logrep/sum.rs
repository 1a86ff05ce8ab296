//! Decomposition of the 2D rotation generator `M = x∂y − y∂x` into a sum of
//! products of bounded operators with logarithmic representations.
//!
//! With `Uⱼ(τ) = e^{τ∂y}`, `Uᵢ(τ) = e^{τ∂x}`, `Gₖ = I + κUₖ⁻¹` and
//! `dₖ = ∂τ Log(Uₖ + κI)`, each factor satisfies `Gₖ dₖ = ∂ₖ`, and
//!
//! ```text
//! M = Gⱼ x (dⱼ − dᵢ) + Gⱼ (x − y) dᵢ + (Gⱼ − Gᵢ) y dᵢ.
//! ```
//!
//! The three terms are evaluated with central-difference `dₖ`, summed and
//! compared with `M`. Per term, the central-difference value is also compared
//! with the exact-derivative value, and the norm of its time integral over
//! `[s, t]` is reported next to its integrated mean-value bound.

use serde::Serialize;

use super::{
    exact_dt, relative_residual, require_kappa, residual_norm, richardson, EvolutionFamily, IdentityResidual,
    LogrepError,
};
use crate::funcalc::{self, quadrature::gauss_legendre};
use crate::gridops::{self, Grid, GridError};
use crate::linalg::{self, matmul, CMatrix, C64, ONE};
use crate::Axis;

/// Tolerance of the summed decomposition and of each term's
/// central-difference evaluation.
pub const SUM_TOL: f64 = 1e-5;
/// Gauss–Legendre nodes of the per-term time integral.
pub const INTEGRAL_NODES: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct SumTerm {
    pub label: String,
    /// Central-difference against exact-derivative evaluation.
    pub fd_vs_exact: IdentityResidual,
    /// Norm of the value at `τ = t − s`.
    pub norm: f64,
    /// Norm of `∫ₛᵗ term dτ` (reported only).
    pub integral_norm: f64,
    /// `sup ‖G‖ · ‖P ΔLog‖` over the quadrature nodes, the integrated
    /// mean-value bound for `integral_norm` (reported only).
    pub increment_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SumDecomposition {
    pub terms: Vec<SumTerm>,
    /// `T₁ + T₂ + T₃` against `M`.
    pub total: IdentityResidual,
}

struct Factor {
    generator: CMatrix,
    family: EvolutionFamily,
}

impl Factor {
    fn new(grid: &Grid, axis: Axis) -> Result<Self, LogrepError> {
        let d = gridops::spectral_derivative(grid, axis)?;
        Ok(Factor { generator: d.entries.clone(), family: EvolutionFamily::with_default_horizon(d) })
    }

    /// `I + κU(τ)⁻¹`.
    fn g(&self, tau: f64, kappa: C64) -> Result<CMatrix, LogrepError> {
        Ok(linalg::shifted(&(self.family.propagator(-tau)? * kappa), ONE))
    }

    fn d_exact(&self, tau: f64, kappa: C64) -> Result<CMatrix, LogrepError> {
        exact_dt(&self.generator, &self.family.propagator(tau)?, kappa)
    }

    fn d_fd(&self, tau: f64, kappa: C64) -> Result<CMatrix, LogrepError> {
        richardson(|x| self.family.log_at(x, kappa), tau)
    }
}

/// `[T₁, T₂, T₃]` at `τ` from the given derivative values.
fn terms(
    x: &CMatrix,
    y: &CMatrix,
    gj: &CMatrix,
    gi: &CMatrix,
    dj: &CMatrix,
    di: &CMatrix,
) -> [CMatrix; 3] {
    [
        matmul(gj, &matmul(x, &(dj - di))),
        matmul(gj, &matmul(&(x - y), di)),
        matmul(&(gj - gi), &matmul(y, di)),
    ]
}

pub fn sum_decomposition(grid: &Grid, t: f64, s: f64, kappa: C64) -> Result<SumDecomposition, LogrepError> {
    if grid.dim() != 2 {
        return Err(GridError::InvalidDimension(grid.dim()).into());
    }
    require_kappa(kappa)?;
    let fj = Factor::new(grid, Axis::Y)?;
    let fi = Factor::new(grid, Axis::X)?;
    fj.family.check_times(&[t, s])?;
    let x = gridops::coordinate_operator(grid, Axis::X)?.entries;
    let y = gridops::coordinate_operator(grid, Axis::Y)?.entries;
    let m = gridops::angular_momentum_matrix(grid, Axis::Z)?.entries;
    let tau = t - s;

    for f in [&fj, &fi] {
        funcalc::branch_cut_check(&linalg::shifted(&f.family.propagator(tau)?, kappa), None)?.into_result()?;
    }

    let at = |tau: f64, exact: bool| -> Result<[CMatrix; 3], LogrepError> {
        let (gj, gi) = (fj.g(tau, kappa)?, fi.g(tau, kappa)?);
        let (dj, di) = if exact {
            (fj.d_exact(tau, kappa)?, fi.d_exact(tau, kappa)?)
        } else {
            (fj.d_fd(tau, kappa)?, fi.d_fd(tau, kappa)?)
        };
        Ok(terms(&x, &y, &gj, &gi, &dj, &di))
    };

    let fd = at(tau, false)?;
    let exact = at(tau, true)?;

    let mut integrals: [CMatrix; 3] = std::array::from_fn(|_| CMatrix::zeros(m.dim()));
    let mut g_sup = [0.0f64; 3];
    let nodes = if tau != 0.0 { gauss_legendre(INTEGRAL_NODES, 0.0, tau) } else { Vec::new() };
    for (node, weight) in nodes {
        for (acc, term) in integrals.iter_mut().zip(at(node, true)?) {
            *acc = &*acc + &(term * C64::new(weight, 0.0));
        }
        let (gj, gi) = (fj.g(node, kappa)?, fi.g(node, kappa)?);
        let gs = [residual_norm(&gj), residual_norm(&gj), residual_norm(&(&gj - &gi))];
        for (sup, g) in g_sup.iter_mut().zip(gs) {
            *sup = sup.max(g);
        }
    }
    let delta = |f: &Factor| -> Result<CMatrix, LogrepError> { Ok(f.family.log_at(tau, kappa)? - f.family.log_at(0.0, kappa)?) };
    let (delta_j, delta_i) = (delta(&fj)?, delta(&fi)?);
    let increments = [
        matmul(&x, &(&delta_j - &delta_i)),
        matmul(&(&x - &y), &delta_i),
        matmul(&y, &delta_i),
    ];

    let labels = ["G_y x (d_y − d_x)", "G_y (x − y) d_x", "(G_y − G_x) y d_x"];
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        let (residual, relative) = relative_residual(&(&fd[k] - &exact[k]), &exact[k]);
        out.push(SumTerm {
            label: labels[k].to_string(),
            fd_vs_exact: IdentityResidual::checked(
                format!("{} (central difference)", labels[k]),
                format!("{} (exact)", labels[k]),
                residual,
                SUM_TOL,
                relative,
            ),
            norm: residual_norm(&exact[k]),
            integral_norm: residual_norm(&integrals[k]),
            increment_bound: g_sup[k] * residual_norm(&increments[k]),
        });
    }
    let sum = &(&fd[0] + &fd[1]) + &fd[2];
    let (residual, relative) = relative_residual(&(sum - &m), &m);
    Ok(SumDecomposition {
        terms: out,
        total: IdentityResidual::checked("T₁ + T₂ + T₃", "x∂y − y∂x", residual, SUM_TOL, relative),
    })
}
