//! Logarithmic representation of generators of evolution families.
//!
//! For an evolution family `U(t,s) = exp((t−s)A)` and `κ ≠ 0` with the
//! spectrum of `U + κI` off the cut `(−∞, 0]`, the bounded operator
//! `a(t,s) = Log(U(t,s) + κI)` recovers the possibly unbounded generator:
//!
//! ```text
//! A = (I + κU(s,t)) ∂ₜ a(t,s),      ∂ₜ a = (U + κI)⁻¹ A U,
//! U = Σₙ aⁿ/n! − κI.
//! ```
//!
//! Every check returns an [`IdentityResidual`]. Numerators are measured with
//! the upper bound `sqrt(‖Δ‖₁‖Δ‖∞)` on the spectral norm, reference norms with
//! Lanczos (a lower bound), so relative residuals are never
//! under-reported.

mod sum;

pub use sum::{sum_decomposition, SumDecomposition, SumTerm};

use serde::Serialize;
use thiserror::Error;

use crate::funcalc::{self, logm_principal_with_report, BranchCutReport, FuncalcError};
use crate::gridops::{GridError, OperatorMatrix};
use crate::linalg::{self, matmul, CMatrix, LinalgError, Lu, C64, ONE};

/// Default half-length `T` of the parameter interval `[−T, T]`.
pub const DEFAULT_HORIZON: f64 = 1.0;
/// Relative tolerance of every `[X, U] = 0` hypothesis check.
pub const COMMUTATION_TOL: f64 = 1e-10;
/// Tolerance of the reconstruction and product-perturbation identities.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Tolerance of the power-series reconstruction.
pub const SERIES_TOL: f64 = 1e-10;
/// Term-norm cutoff that ends the power series.
pub const SERIES_TERM_CUTOFF: f64 = 1e-16;
/// Upper limit on series terms when the cutoff is not reached.
pub const SERIES_MAX_TERMS: usize = 500;
/// Step of the central-difference `∂ₜ`.
pub const FD_STEP: f64 = 1e-5;
/// A semigroup defect above this counts as a detected violation.
pub const VIOLATION_THRESHOLD: f64 = 1e-6;
/// Tolerance of the `U`-semigroup control.
pub const SEMIGROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LogrepError {
    #[error(transparent)]
    Funcalc(#[from] FuncalcError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("time {time} lies outside the parameter interval [-{horizon}, {horizon}]")]
    OutsideInterval { time: f64, horizon: f64 },
    #[error("parameter interval half-length must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("kappa must be a non-zero complex constant")]
    ZeroKappa,
    #[error(
        "hypothesis violated: {operator} must commute with U(t,s) (relative commutator {residual:e} > {tolerance:e})"
    )]
    CommutationViolated { operator: String, residual: f64, tolerance: f64 },
    #[error("{0}")]
    Invalid(String),
}

impl LogrepError {
    /// Whether the error is a violated mathematical precondition (as opposed
    /// to bad input or a numerical failure).
    pub fn is_precondition(&self) -> bool {
        match self {
            LogrepError::ZeroKappa | LogrepError::CommutationViolated { .. } => true,
            LogrepError::Funcalc(e) => matches!(
                e,
                FuncalcError::BranchCut { .. }
                    | FuncalcError::SpectrumAdjacent { .. }
                    | FuncalcError::ContourBlocked { .. }
                    | FuncalcError::Linalg(LinalgError::Singular { .. })
            ),
            _ => false,
        }
    }
}

impl From<LinalgError> for LogrepError {
    fn from(e: LinalgError) -> Self {
        LogrepError::Funcalc(e.into())
    }
}

/// Outcome of one identity check.
///
/// `tolerance: None` marks a reported-only quantity; such records always pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub lhs_label: String,
    pub rhs_label: String,
    pub residual: f64,
    pub tolerance: Option<f64>,
    pub relative: bool,
    pub pass: bool,
}

impl IdentityResidual {
    pub fn checked(lhs: impl Into<String>, rhs: impl Into<String>, residual: f64, tolerance: f64, relative: bool) -> Self {
        IdentityResidual {
            lhs_label: lhs.into(),
            rhs_label: rhs.into(),
            residual,
            tolerance: Some(tolerance),
            relative,
            pass: residual <= tolerance,
        }
    }

    pub fn reported(lhs: impl Into<String>, rhs: impl Into<String>, residual: f64, relative: bool) -> Self {
        IdentityResidual {
            lhs_label: lhs.into(),
            rhs_label: rhs.into(),
            residual,
            tolerance: None,
            relative,
            pass: true,
        }
    }
}

/// Upper bound on `‖m‖₂` used for residual numerators.
pub fn residual_norm(m: &CMatrix) -> f64 {
    linalg::spectral_upper_bound(m)
}

/// Lanczos estimate of `‖m‖₂` (a lower bound) used for reference norms.
pub fn reference_norm(m: &CMatrix) -> f64 {
    linalg::lanczos_norm(m, 1e-10, 10_000).value
}

/// `‖diff‖ / ‖reference‖`, or the absolute `‖diff‖` when the reference is zero.
/// The flag says which one was returned.
pub fn relative_residual(diff: &CMatrix, reference: &CMatrix) -> (f64, bool) {
    let num = residual_norm(diff);
    let den = reference_norm(reference);
    if den > 0.0 {
        (num / den, true)
    } else {
        (num, false)
    }
}

/// `‖[a, b]‖ / (‖a‖‖b‖)`, zero when either factor vanishes.
pub fn commutation_defect(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = residual_norm(a) * residual_norm(b);
    if scale == 0.0 {
        return 0.0;
    }
    residual_norm(&linalg::commutator(a, b)) / scale
}

fn require_commuting(operator: &str, a: &CMatrix, u: &CMatrix) -> Result<(), LogrepError> {
    let residual = commutation_defect(a, u);
    if residual > COMMUTATION_TOL {
        return Err(LogrepError::CommutationViolated {
            operator: operator.to_string(),
            residual,
            tolerance: COMMUTATION_TOL,
        });
    }
    Ok(())
}

/// `U(t,s) = exp((t−s)A)` for a time-independent generator on `[−T, T]`.
#[derive(Debug, Clone)]
pub struct EvolutionFamily {
    generator: OperatorMatrix,
    horizon: f64,
}

impl EvolutionFamily {
    pub fn new(generator: OperatorMatrix, horizon: f64) -> Result<Self, LogrepError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(LogrepError::InvalidHorizon(horizon));
        }
        Ok(EvolutionFamily { generator, horizon })
    }

    pub fn with_default_horizon(generator: OperatorMatrix) -> Self {
        EvolutionFamily { generator, horizon: DEFAULT_HORIZON }
    }

    pub fn generator(&self) -> &OperatorMatrix {
        &self.generator
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    fn check_time(&self, time: f64) -> Result<(), LogrepError> {
        if !(time.abs() <= self.horizon) {
            return Err(LogrepError::OutsideInterval { time, horizon: self.horizon });
        }
        Ok(())
    }

    fn check_times(&self, times: &[f64]) -> Result<(), LogrepError> {
        times.iter().try_for_each(|t| self.check_time(*t))
    }

    /// `exp(τA)` without interval checks.
    pub fn propagator(&self, tau: f64) -> Result<CMatrix, LogrepError> {
        if tau == 0.0 {
            return Ok(linalg::identity(self.dim()));
        }
        Ok(funcalc::expm(&(&self.generator.entries * C64::new(tau, 0.0)))?)
    }

    fn log_at(&self, tau: f64, kappa: C64) -> Result<CMatrix, LogrepError> {
        let m = linalg::shifted(&self.propagator(tau)?, kappa);
        Ok(logm_principal_with_report(&m, None)?.0)
    }
}

/// `U(t,s)` as an operator on the family's grid.
pub fn evolution(family: &EvolutionFamily, t: f64, s: f64) -> Result<OperatorMatrix, LogrepError> {
    family.check_times(&[t, s])?;
    let u = family.propagator(t - s)?;
    Ok(OperatorMatrix::general(family.generator.grid, u, format!("U({t}, {s})"))?)
}

/// `a(t,s) = Log(U(t,s) + κI)` with its admissibility record.
#[derive(Debug, Clone)]
pub struct LogRep {
    pub kappa: C64,
    pub t: f64,
    pub s: f64,
    pub a: OperatorMatrix,
    /// `U(t,s)` the logarithm was taken of.
    pub u: CMatrix,
    pub branch: BranchCutReport,
    /// Lanczos estimate of `‖a‖₂`.
    pub a_norm: f64,
}

impl LogRep {
    /// `log(‖U‖ + |κ|) + |log d| + π` with `d` the distance of the spectrum of
    /// `U + κI` from the cut. Bounds `‖a‖₂` whenever `U + κI` is normal.
    pub fn norm_bound(&self) -> f64 {
        (residual_norm(&self.u) + self.kappa.norm()).ln() + self.branch.min_distance.ln().abs() + std::f64::consts::PI
    }
}

pub fn log_representation(family: &EvolutionFamily, t: f64, s: f64, kappa: C64) -> Result<LogRep, LogrepError> {
    family.check_times(&[t, s])?;
    let u = family.propagator(t - s)?;
    let (a, branch) = logm_principal_with_report(&linalg::shifted(&u, kappa), None)?;
    // the branch-cut diagnosis takes precedence so that κ = 0 with an
    // eigenvalue on the cut reports the eigenvalue
    if kappa == C64::new(0.0, 0.0) {
        return Err(LogrepError::ZeroKappa);
    }
    let a_norm = reference_norm(&a);
    let a = OperatorMatrix::general(family.generator.grid, a, format!("Log(U({t}, {s}) + {kappa}I)"))?;
    Ok(LogRep { kappa, t, s, a, u, branch, a_norm })
}

/// How `∂ₜ a(t,s)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DtMethod {
    /// `(U + κI)⁻¹ A U`, valid because `A` commutes with `U`.
    Exact,
    /// Central differences with step [`FD_STEP`], Richardson-extrapolated once.
    CentralDifference,
}

fn require_kappa(kappa: C64) -> Result<(), LogrepError> {
    if kappa == C64::new(0.0, 0.0) {
        return Err(LogrepError::ZeroKappa);
    }
    Ok(())
}

/// `(U + κI)⁻¹ A U` for a given propagator.
fn exact_dt(a: &CMatrix, u: &CMatrix, kappa: C64) -> Result<CMatrix, LogrepError> {
    let lu = Lu::new(&linalg::shifted(u, kappa))?;
    Ok(lu.solve(&matmul(a, u))?)
}

/// Richardson-extrapolated central difference of `τ ↦ f(τ)` at `tau`.
fn richardson<F>(f: F, tau: f64) -> Result<CMatrix, LogrepError>
where
    F: Fn(f64) -> Result<CMatrix, LogrepError>,
{
    let h = FD_STEP;
    let coarse = (f(tau + h)? - f(tau - h)?) * C64::new(1.0 / (2.0 * h), 0.0);
    let fine = (f(tau + h / 2.0)? - f(tau - h / 2.0)?) * C64::new(1.0 / h, 0.0);
    Ok((fine * C64::new(4.0, 0.0) - coarse) * C64::new(1.0 / 3.0, 0.0))
}

pub fn dt_log_representation(
    family: &EvolutionFamily,
    t: f64,
    s: f64,
    kappa: C64,
    method: DtMethod,
) -> Result<OperatorMatrix, LogrepError> {
    family.check_times(&[t, s])?;
    require_kappa(kappa)?;
    let tau = t - s;
    let u = family.propagator(tau)?;
    funcalc::branch_cut_check(&linalg::shifted(&u, kappa), None)?.into_result()?;
    let entries = match method {
        DtMethod::Exact => {
            require_commuting("A", &family.generator.entries, &u)?;
            exact_dt(&family.generator.entries, &u, kappa)?
        }
        DtMethod::CentralDifference => richardson(|x| family.log_at(x, kappa), tau)?,
    };
    Ok(OperatorMatrix::general(family.generator.grid, entries, format!("∂t Log(U({t}, {s}) + {kappa}I)"))?)
}

/// `(I + κU(s,t)) ∂ₜ a(t,s)` against `A`, relative, exact `∂ₜ`.
pub fn reconstruct_generator(family: &EvolutionFamily, t: f64, s: f64, kappa: C64) -> Result<IdentityResidual, LogrepError> {
    let dt = dt_log_representation(family, t, s, kappa, DtMethod::Exact)?;
    let back = linalg::shifted(&(family.propagator(s - t)? * kappa), ONE);
    let a = &family.generator.entries;
    let (residual, relative) = relative_residual(&(matmul(&back, &dt.entries) - a), a);
    Ok(IdentityResidual::checked("(I + κU(s,t)) ∂t Log(U(t,s) + κI)", family.generator.label.clone(), residual, RECONSTRUCTION_TOL, relative))
}

/// `(I + κU(s,t)) L ∂ₜ a(t,s)` against `L A` for a bounded `L` commuting with `U(t,s)`.
pub fn product_perturbation(
    l: &OperatorMatrix,
    family: &EvolutionFamily,
    t: f64,
    s: f64,
    kappa: C64,
) -> Result<IdentityResidual, LogrepError> {
    family.check_times(&[t, s])?;
    require_kappa(kappa)?;
    if l.dim() != family.dim() {
        return Err(GridError::DimensionMismatch { expected: family.dim(), found: l.dim() }.into());
    }
    let u = family.propagator(t - s)?;
    require_commuting(&l.label, &l.entries, &u)?;
    let dt = dt_log_representation(family, t, s, kappa, DtMethod::Exact)?;
    let back = linalg::shifted(&(family.propagator(s - t)? * kappa), ONE);
    let la = matmul(&l.entries, &family.generator.entries);
    let lhs = matmul(&back, &matmul(&l.entries, &dt.entries));
    let (residual, relative) = relative_residual(&(lhs - &la), &la);
    Ok(IdentityResidual::checked(
        format!("(I + κU(s,t)) ∂t[{} Log(U(t,s) + κI)]", l.label),
        format!("{} · {}", l.label, family.generator.label),
        residual,
        RECONSTRUCTION_TOL,
        relative,
    ))
}

/// Power-series reconstruction `Σ aⁿ/n! − κI` of `U(t,s)`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub residual: IdentityResidual,
    pub terms_used: usize,
    pub last_term_norm: f64,
}

fn series_sum(rep: &LogRep, max_terms: usize, mut visit: impl FnMut(usize, &CMatrix)) -> (CMatrix, usize, f64) {
    let a = &rep.a.entries;
    let n = a.nrows();
    let mut sum = linalg::identity(n);
    let mut term = linalg::identity(n);
    let mut last = 1.0;
    let mut used = 0;
    visit(0, &sum);
    for k in 1..=max_terms {
        term = matmul(&term, a) * C64::new(1.0 / k as f64, 0.0);
        sum = sum + &term;
        used = k;
        last = linalg::norm_fro(&term);
        visit(k, &sum);
        if last < SERIES_TERM_CUTOFF {
            break;
        }
    }
    (sum, used, last)
}

/// Sums until `‖aᴺ/N!‖ < 1e-16` (Frobenius, hence conservative) or
/// `max_terms` (default [`SERIES_MAX_TERMS`]), and compares with `U(t,s)`.
pub fn series_reconstruction(rep: &LogRep, max_terms: Option<usize>) -> SeriesReport {
    let (sum, terms_used, last_term_norm) = series_sum(rep, max_terms.unwrap_or(SERIES_MAX_TERMS), |_, _| {});
    let recon = linalg::shifted(&sum, -rep.kappa);
    let residual = residual_norm(&(recon - &rep.u));
    SeriesReport {
        residual: IdentityResidual::checked("Σ aⁿ/n! − κI", "U(t,s)", residual, SERIES_TOL, false),
        terms_used,
        last_term_norm,
    }
}

/// Residual of the partial sums `Σ_{n≤N} aⁿ/n! − κI` for `N = 0..=max_n`.
pub fn truncation_study(rep: &LogRep, max_n: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(max_n + 1);
    let kappa = rep.kappa;
    let u = &rep.u;
    let mut visit = |k: usize, sum: &CMatrix| {
        out.push((k, residual_norm(&(linalg::shifted(sum, -kappa) - u))));
    };
    // run the full range regardless of the cutoff
    let a = &rep.a.entries;
    let n = a.nrows();
    let mut sum = linalg::identity(n);
    let mut term = linalg::identity(n);
    visit(0, &sum);
    for k in 1..=max_n {
        term = matmul(&term, a) * C64::new(1.0 / k as f64, 0.0);
        sum = sum + &term;
        visit(k, &sum);
    }
    out
}

/// `exp a(t,r) · exp a(r,s)` against `exp a(t,s)`, with the `U` control.
#[derive(Debug, Clone, Serialize)]
pub struct ViolationReport {
    /// Lanczos estimate of the defect (a lower bound).
    pub violation_residual: f64,
    pub detection_threshold: f64,
    pub detected: bool,
    pub control: IdentityResidual,
}

pub fn semigroup_violation(
    family: &EvolutionFamily,
    kappa: C64,
    (t, r, s): (f64, f64, f64),
) -> Result<ViolationReport, LogrepError> {
    require_kappa(kappa)?;
    let exp_a = |x: f64, y: f64| -> Result<CMatrix, LogrepError> {
        let rep = log_representation(family, x, y, kappa)?;
        Ok(funcalc::expm(&rep.a.entries)?)
    };
    let defect = matmul(&exp_a(t, r)?, &exp_a(r, s)?) - exp_a(t, s)?;
    let violation_residual = reference_norm(&defect);
    let (u_tr, u_rs, u_ts) = (family.propagator(t - r)?, family.propagator(r - s)?, family.propagator(t - s)?);
    let control = residual_norm(&(matmul(&u_tr, &u_rs) - u_ts));
    Ok(ViolationReport {
        violation_residual,
        detection_threshold: VIOLATION_THRESHOLD,
        detected: violation_residual > VIOLATION_THRESHOLD,
        control: IdentityResidual::checked("U(t,r) U(r,s)", "U(t,s)", control, SEMIGROUP_TOL, false),
    })
}
