//! Numerical checks: resolvent estimates, rotation semantics, unitarity,
//! discrete commutation relations, norm growth and the functional-calculus
//! oracle.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::funcalc::{self, logm_contour, logm_principal};
use crate::gridops::{self, Grid, GridError, OperatorMatrix, StateVector};
use crate::linalg::{self, matmul, random_complex_matrix, CMatrix, C64};
use crate::logrep::{log_representation, reference_norm, residual_norm, EvolutionFamily, IdentityResidual};
use crate::Axis;

/// Relative slack on every `1/Re λ` bound.
pub const RESOLVENT_REL_SLACK: f64 = 1e-9;
/// Highest resolvent power checked.
pub const RESOLVENT_MAX_POWER: u32 = 4;
/// Default tolerance of [`rotation_compare`].
pub const ROTATION_TOL: f64 = 1e-6;
/// Default tolerance of the unitarity and group-law checks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Largest per-axis degree accepted by the field parser.
pub const MAX_FIELD_DEGREE: u32 = 16;
/// Tolerance of the functional-calculus oracle.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerCheck {
    pub power: u32,
    pub measured_norm: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// `‖(λI − D)⁻ⁿ‖` against `(1/Re λ)ⁿ` at one `λ`.
///
/// `satisfied` covers `n = 1`; the higher powers are in `power_checks`.
/// A `λ` adjacent to the spectrum, or a norm that fails to converge, is
/// flagged in `error` with `satisfied = false`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventReport {
    pub lambda: C64,
    pub measured_norm: Option<f64>,
    pub bound: f64,
    pub satisfied: bool,
    pub power_checks: Vec<PowerCheck>,
    pub error: Option<String>,
}

impl ResolventReport {
    pub fn all_satisfied(&self) -> bool {
        self.satisfied && self.power_checks.iter().all(|p| p.satisfied)
    }

    /// Largest `measured/bound` over all powers.
    pub fn worst_ratio(&self) -> Option<f64> {
        self.measured_norm?;
        Some(self.power_checks.iter().map(|p| p.measured_norm / p.bound).fold(0.0, f64::max))
    }
}

fn resolvent_report(d: &CMatrix, lambda: C64) -> ResolventReport {
    let bound = 1.0 / lambda.re;
    let flagged = |error: String| ResolventReport {
        lambda,
        measured_norm: None,
        bound,
        satisfied: false,
        power_checks: Vec::new(),
        error: Some(error),
    };
    let r = match funcalc::resolvent(d, lambda) {
        Ok(r) => r,
        Err(e) => return flagged(e.to_string()),
    };
    let mut power_checks = Vec::new();
    let mut rk = r.clone();
    for power in 1..=RESOLVENT_MAX_POWER {
        if power > 1 {
            rk = matmul(&rk, &r);
        }
        let measured_norm = match gridops::operator_norm(&rk) {
            Ok(v) => v,
            Err(e) => return flagged(e.to_string()),
        };
        let b = bound.powi(power as i32);
        power_checks.push(PowerCheck { power, measured_norm, bound: b, satisfied: measured_norm <= b * (1.0 + RESOLVENT_REL_SLACK) });
    }
    ResolventReport {
        lambda,
        measured_norm: Some(power_checks[0].measured_norm),
        bound,
        satisfied: power_checks[0].satisfied,
        power_checks,
        error: None,
    }
}

/// Resolvent estimate `‖(λI − D)⁻ⁿ‖ ≤ (Re λ)⁻ⁿ` for `n = 1..=4` at each `λ`.
pub fn resolvent_sweep(d: &OperatorMatrix, lambdas: &[C64]) -> Result<Vec<ResolventReport>, VerifyError> {
    if let Some(bad) = lambdas.iter().find(|l| !(l.re > 0.0 && l.is_finite())) {
        return Err(VerifyError::LambdaNotInRightHalfPlane(*bad));
    }
    Ok(lambdas.iter().map(|&l| resolvent_report(&d.entries, l)).collect())
}

/// Gaussian × monomial test field `xᵃ yᵇ zᶜ exp(−|r|²/2σ²)`; `σ` defaults to
/// `L/7`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(default)]
    pub x: u32,
    #[serde(default)]
    pub y: u32,
    #[serde(default)]
    pub z: u32,
    #[serde(default)]
    pub sigma: Option<f64>,
}

impl FieldSpec {
    pub const RADIAL: FieldSpec = FieldSpec { x: 0, y: 0, z: 0, sigma: None };

    pub fn monomial(x: u32, y: u32, z: u32) -> Self {
        FieldSpec { x, y, z, sigma: None }
    }

    pub fn sigma_for(&self, half_width: f64) -> f64 {
        self.sigma.unwrap_or(half_width / 7.0)
    }

    pub fn eval(&self, sigma: f64, p: [f64; 3]) -> f64 {
        let r2: f64 = p.iter().map(|v| v * v).sum();
        p[0].powi(self.x as i32) * p[1].powi(self.y as i32) * p[2].powi(self.z as i32) * (-r2 / (2.0 * sigma * sigma)).exp()
    }

    pub fn label(&self) -> String {
        let mut poly = String::new();
        for (name, k) in [("x", self.x), ("y", self.y), ("z", self.z)] {
            match k {
                0 => {}
                1 => poly.push_str(name),
                k => poly.push_str(&format!("{name}^{k}")),
            }
        }
        if poly.is_empty() {
            "gaussian".to_string()
        } else {
            format!("{poly}·gaussian")
        }
    }
}

/// Parses the polynomial prefactor: `1` (or `gaussian`), or a product of
/// `x`, `y`, `z` with optional `^k`, e.g. `x^2*y` or `xy`.
impl FromStr for FieldSpec {
    type Err = String;
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let mut shape = FieldSpec::RADIAL;
        if text == "1" || text == "gaussian" {
            return Ok(shape);
        }
        if text.is_empty() {
            return Err("empty field".to_string());
        }
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            let slot = match c {
                'x' => &mut shape.x,
                'y' => &mut shape.y,
                'z' => &mut shape.z,
                '*' => continue,
                other => return Err(format!("unexpected '{other}' in field '{text}' (expected x, y, z, ^k or *)")),
            };
            let mut power = 1;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                power = digits
                    .parse::<u32>()
                    .ok()
                    .filter(|&p| p <= MAX_FIELD_DEGREE)
                    .ok_or_else(|| format!("exponent in '{text}' must be an integer in 0..={MAX_FIELD_DEGREE}"))?;
            }
            *slot = slot.saturating_add(power);
            if *slot > MAX_FIELD_DEGREE {
                return Err(format!("degree in '{text}' exceeds {MAX_FIELD_DEGREE}"));
            }
        }
        Ok(shape)
    }
}

pub fn gaussian_field(grid: &Grid, shape: FieldSpec) -> StateVector {
    let sigma = shape.sigma_for(grid.half_width());
    StateVector::from_fn(*grid, |p| C64::new(shape.eval(sigma, p), 0.0))
}

/// Counter-clockwise rotation of the first two coordinates.
fn rotate(theta: f64, p: [f64; 3]) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
}

/// Largest `|f|` or `|f∘R_θ|` on the boundary nodes of the box, an estimate
/// of the error from periodizing the field.
pub fn wrap_error_estimate(grid: &Grid, shape: FieldSpec, theta: f64) -> f64 {
    let sigma = shape.sigma_for(grid.half_width());
    (0..grid.len())
        .filter(|&k| grid.multi_index(k)[..grid.dim()].iter().any(|&i| i == 0))
        .map(|k| {
            let p = grid.point(k);
            shape.eval(sigma, p).abs().max(shape.eval(sigma, rotate(theta, p)).abs())
        })
        .fold(0.0, f64::max)
}

/// `exp(θ(xD_y − yD_x))` on a 2D grid.
pub fn rotation_propagator(grid: &Grid, theta: f64) -> Result<CMatrix, VerifyError> {
    let m = gridops::angular_momentum_matrix(grid, Axis::Z)?;
    Ok(funcalc::expm(&(&m.entries * C64::new(theta, 0.0)))?)
}

/// `f∘R_θ` sampled on the grid (the exact action of `exp(θ(x∂y − y∂x))`).
pub fn rotated_field_error(grid: &Grid, shape: FieldSpec, theta: f64, propagated: &StateVector) -> f64 {
    let sigma = shape.sigma_for(grid.half_width());
    let exact = StateVector::from_fn(*grid, |p| C64::new(shape.eval(sigma, rotate(theta, p)), 0.0));
    propagated.distance(&exact)
}

/// [`rotation_compare`] with a precomputed propagator and tolerance.
pub fn rotation_compare_with(
    grid: &Grid,
    propagator: &CMatrix,
    theta: f64,
    shape: FieldSpec,
    tolerance: f64,
) -> Result<IdentityResidual, VerifyError> {
    if grid.dim() != 2 {
        return Err(GridError::InvalidDimension(grid.dim()).into());
    }
    let sigma = shape.sigma_for(grid.half_width());
    let limit = grid.half_width() / 6.0;
    if sigma > limit {
        return Err(VerifyError::FieldTooWide { sigma, limit });
    }
    let estimate = wrap_error_estimate(grid, shape, theta);
    if estimate > tolerance / 10.0 {
        return Err(VerifyError::FieldNotDecayed { estimate, limit: tolerance / 10.0 });
    }
    let u = gaussian_field(grid, shape);
    let moved = StateVector { grid: *grid, values: propagator.dot(&u.values) };
    let residual = rotated_field_error(grid, shape, theta, &moved);
    Ok(IdentityResidual::checked(format!("exp(θM) {}", shape.label()), format!("{} ∘ R_θ", shape.label()), residual, tolerance, false))
}

/// L² distance between `exp(θ(xD_y − yD_x)) f` and `f∘R_θ`, with `R_θ` the
/// counter-clockwise rotation by `θ`.
pub fn rotation_compare(grid: &Grid, theta: f64, shape: FieldSpec) -> Result<IdentityResidual, VerifyError> {
    let u = rotation_propagator(grid, theta)?;
    rotation_compare_with(grid, &u, theta, shape, ROTATION_TOL)
}

fn require_skew(m: &OperatorMatrix) -> Result<(), VerifyError> {
    let size = linalg::norm_fro(&m.entries);
    let defect = linalg::norm_fro(&(&m.entries + &linalg::adjoint(&m.entries)));
    if defect > gridops::SKEW_TOL * size {
        return Err(GridError::NotSkewAdjoint { defect }.into());
    }
    Ok(())
}

fn propagate(m: &OperatorMatrix, theta: f64) -> Result<CMatrix, VerifyError> {
    if theta == 0.0 {
        return Ok(linalg::identity(m.dim()));
    }
    Ok(funcalc::expm(&(&m.entries * C64::new(theta, 0.0)))?)
}

/// `|‖exp(θM)u‖ − ‖u‖| / ‖u‖` for every `θ` and field.
pub fn unitarity_check(
    m: &OperatorMatrix,
    thetas: &[f64],
    fields: &[StateVector],
    tolerance: f64,
) -> Result<Vec<IdentityResidual>, VerifyError> {
    require_skew(m)?;
    let mut out = Vec::new();
    for &theta in thetas {
        let u = propagate(m, theta)?;
        for (k, f) in fields.iter().enumerate() {
            if f.values.len() != m.dim() {
                return Err(GridError::DimensionMismatch { expected: m.dim(), found: f.values.len() }.into());
            }
            let norm = f.norm();
            let moved = StateVector { grid: f.grid, values: u.dot(&f.values) }.norm();
            let residual = if norm > 0.0 { (moved - norm).abs() / norm } else { moved };
            out.push(IdentityResidual::checked(
                format!("‖exp({theta}·{}) u{k}‖", m.label),
                format!("‖u{k}‖"),
                residual,
                tolerance,
                norm > 0.0,
            ));
        }
    }
    Ok(out)
}

/// `exp(θ₁M) exp(θ₂M)` against `exp((θ₁+θ₂)M)`.
pub fn group_law(m: &OperatorMatrix, theta1: f64, theta2: f64, tolerance: f64) -> Result<IdentityResidual, VerifyError> {
    let lhs = matmul(&propagate(m, theta1)?, &propagate(m, theta2)?);
    let rhs = propagate(m, theta1 + theta2)?;
    Ok(IdentityResidual::checked(
        format!("exp({theta1}M) exp({theta2}M)"),
        format!("exp({}M)", theta1 + theta2),
        residual_norm(&(lhs - rhs)),
        tolerance,
        false,
    ))
}

/// `‖([Mᵢ, Mⱼ] + M_k) u‖ / ‖u‖` for the cyclic triples, with `M = iL/ħ` the
/// real rotation generators applied matrix-free. Reported only.
pub fn discrete_commutation_residual(grid: &Grid, u: &StateVector) -> Result<[IdentityResidual; 3], VerifyError> {
    if grid.dim() != 3 {
        return Err(GridError::InvalidDimension(grid.dim()).into());
    }
    let apply = |axis: Axis, v: &linalg::CVector| gridops::apply_angular_momentum(grid, axis, v);
    let norm = linalg::vec_norm(&u.values);
    let mut out = Vec::with_capacity(3);
    for i in Axis::ALL {
        let (j, k) = i.cyclic_successors();
        let ij = apply(i, &apply(j, &u.values)?)?;
        let ji = apply(j, &apply(i, &u.values)?)?;
        let defect = ij - ji + apply(k, &u.values)?;
        let residual = if norm > 0.0 { linalg::vec_norm(&defect) / norm } else { 0.0 };
        out.push(IdentityResidual::reported(format!("[M{i}, M{j}] u"), format!("−M{k} u"), residual, norm > 0.0));
    }
    Ok(out.try_into().expect("three axes"))
}

/// Operators of the norm-growth study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormOperator {
    Spectral,
    Upwind,
    Coordinate,
    Identity,
}

impl NormOperator {
    pub const ALL: [NormOperator; 4] = [NormOperator::Spectral, NormOperator::Upwind, NormOperator::Coordinate, NormOperator::Identity];

    /// Whether the norm is expected to grow with `n`.
    pub fn is_unbounded(self) -> bool {
        matches!(self, NormOperator::Spectral | NormOperator::Upwind)
    }

    pub fn name(self) -> &'static str {
        match self {
            NormOperator::Spectral => "spectral",
            NormOperator::Upwind => "upwind",
            NormOperator::Coordinate => "coordinate",
            NormOperator::Identity => "identity",
        }
    }

    /// Closed-form `‖·‖₂` on `n` nodes of `[−L, L)`.
    pub fn analytic_norm(self, grid: &Grid) -> f64 {
        match self {
            NormOperator::Spectral => grid.max_wavenumber(),
            NormOperator::Upwind => 2.0 / grid.spacing(),
            NormOperator::Coordinate => grid.half_width(),
            NormOperator::Identity => 1.0,
        }
    }

    fn build(self, grid: &Grid) -> Result<OperatorMatrix, GridError> {
        match self {
            NormOperator::Spectral => gridops::spectral_derivative(grid, Axis::X),
            NormOperator::Upwind => gridops::upwind_derivative(grid, Axis::X),
            NormOperator::Coordinate => gridops::coordinate_operator(grid, Axis::X),
            NormOperator::Identity => OperatorMatrix::identity(*grid),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub n: usize,
    pub norm: f64,
    pub analytic: f64,
}

/// `(n, ‖Aₙ‖)` on 1D grids of half-width `L`, norms by Lanczos.
pub fn norm_growth_study(op: NormOperator, n_list: &[usize], half_width: f64) -> Result<Vec<NormRow>, VerifyError> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VerifyError::NotAscending);
    }
    n_list
        .iter()
        .map(|&n| {
            let grid = Grid::new(1, n, half_width)?;
            let m = op.build(&grid)?;
            Ok(NormRow { n, norm: gridops::operator_norm(&m.entries)?, analytic: op.analytic_norm(&grid) })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessRow {
    pub n: usize,
    /// `‖Log(U(t,s) + κI)‖`.
    pub log_norm: f64,
    /// `‖x∂y − y∂x‖`.
    pub generator_norm: f64,
}

/// `‖a(t,s)‖` stays bounded while `‖A‖` grows with `n`: the 2D rotation
/// generator on `n × n` grids.
pub fn boundedness_contrast(
    n_list: &[usize],
    half_width: f64,
    kappa: C64,
    t: f64,
    s: f64,
) -> Result<Vec<BoundednessRow>, VerifyError> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VerifyError::NotAscending);
    }
    n_list
        .iter()
        .map(|&n| {
            let grid = Grid::new(2, n, half_width)?;
            let m = gridops::angular_momentum_matrix(&grid, Axis::Z)?;
            let generator_norm = reference_norm(&m.entries);
            let rep = log_representation(&EvolutionFamily::with_default_horizon(m), t, s, kappa)?;
            Ok(BoundednessRow { n, log_norm: rep.a_norm, generator_norm })
        })
        .collect()
}

/// `logm_principal` against `logm_contour` on `count` random admissible
/// matrices of dimension `2..=max_dim`; returns `(dimension, ‖Δ‖)` pairs.
pub fn logm_oracle(count: usize, max_dim: usize, seed: u64) -> Result<Vec<(usize, f64)>, VerifyError> {
    if max_dim < 2 {
        return Err(VerifyError::Invalid(format!("oracle dimension must be at least 2, got {max_dim}")));
    }
    const SHIFTS: [C64; 4] = [C64::new(2.0, 0.0), C64::new(1.5, 1.0), C64::new(1.5, -1.0), C64::new(3.0, 0.5)];
    (0..count)
        .map(|k| {
            let n = 2 + k % (max_dim - 1);
            let spread = if k % 2 == 0 { 0.6 } else { 0.3 };
            let g = random_complex_matrix(n, seed.wrapping_add(k as u64)) * C64::new(spread / (n as f64).sqrt(), 0.0);
            let m = linalg::shifted(&g, SHIFTS[k % SHIFTS.len()]);
            let a = logm_principal(&m)?;
            let b = logm_contour(&m, 0.5)?;
            Ok((n, residual_norm(&(a - b))))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn upwind_resolvent_examples() {
        let g = Grid::new(1, 64, PI).unwrap();
        let d = gridops::upwind_derivative(&g, Axis::X).unwrap();
        let reports = resolvent_sweep(&d, &[c(1.0, 0.0), c(5.0, 0.0), c(1.0, 10.0)]).unwrap();
        for r in &reports {
            assert!(r.all_satisfied(), "{r:?}");
        }
        assert!(reports[1].measured_norm.unwrap() <= 0.2 * (1.0 + 1e-9));
        // real λ: the zero mode attains the bound
        assert!((reports[0].measured_norm.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(resolvent_sweep(&d, &[c(-1.0, 0.0)]).unwrap_err(), VerifyError::LambdaNotInRightHalfPlane(c(-1.0, 0.0)));
    }

    #[test]
    fn resolvent_at_spectrum_is_flagged() {
        let g = Grid::new(1, 8, PI).unwrap();
        let zero = OperatorMatrix::zeros(g).unwrap();
        // D = 0 has spectrum {0}; a right-half-plane λ is fine, but the identity
        // has spectrum {1} and λ = 1 hits it
        assert!(resolvent_sweep(&zero, &[c(1.0, 0.0)]).unwrap()[0].all_satisfied());
        let id = OperatorMatrix::general(g, linalg::identity(8), "I").unwrap();
        let r = &resolvent_sweep(&id, &[c(1.0, 0.0)]).unwrap()[0];
        assert!(!r.satisfied && r.error.is_some());
    }

    #[test]
    fn rotation_semantics() {
        let g = Grid::new(2, 32, 6.0).unwrap();
        let u = rotation_propagator(&g, PI / 2.0).unwrap();
        for shape in [FieldSpec::RADIAL, FieldSpec::monomial(1, 0, 0), FieldSpec::monomial(1, 1, 0)] {
            let r = rotation_compare_with(&g, &u, PI / 2.0, shape, ROTATION_TOL).unwrap();
            assert!(r.pass, "{shape:?} {r:?}");
        }
        // x·g rotated counter-clockwise by π/2 becomes −y·g
        let f = gaussian_field(&g, FieldSpec::monomial(1, 0, 0));
        let moved = StateVector { grid: g, values: u.dot(&f.values) };
        let minus_y = StateVector::from_fn(g, |p| c(-p[1] * (-(p[0] * p[0] + p[1] * p[1]) / (2.0 * (6.0f64 / 7.0).powi(2))).exp(), 0.0));
        assert!(moved.distance(&minus_y) < 1e-6);

        let radial = rotation_compare_with(&g, &u, PI / 2.0, FieldSpec::RADIAL, ROTATION_TOL).unwrap();
        assert!(radial.residual < 1e-10, "{radial:?}");
        let id = linalg::identity(g.len());
        assert!(rotation_compare_with(&g, &id, 0.0, FieldSpec::monomial(2, 1, 0), ROTATION_TOL).unwrap().residual == 0.0);
    }

    #[test]
    fn rotation_preconditions() {
        let g = Grid::new(2, 8, 6.0).unwrap();
        let id = linalg::identity(g.len());
        let wide = FieldSpec { sigma: Some(1.5), ..FieldSpec::RADIAL };
        assert!(matches!(rotation_compare_with(&g, &id, 0.0, wide, 1e-6), Err(VerifyError::FieldTooWide { .. })));
        let heavy = FieldSpec { x: 6, sigma: Some(1.0), ..FieldSpec::RADIAL };
        let err = rotation_compare_with(&g, &id, 0.3, heavy, 1e-6).unwrap_err();
        assert!(matches!(err, VerifyError::FieldNotDecayed { .. }) && err.is_precondition());
        // under-resolved grid: precondition holds, tolerance fails
        let g = Grid::new(2, 4, 6.0).unwrap();
        let r = rotation_compare(&g, PI / 4.0, FieldSpec::monomial(1, 0, 0)).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn unitarity_and_group_law() {
        let g = Grid::new(1, 16, 2.0).unwrap();
        let x = gridops::coordinate_operator(&g, Axis::X).unwrap();
        let ix = x.scaled(c(0.0, 1.0), "i·x");
        let fields = [StateVector::random(g, 42), StateVector::random(g, 7)];
        for r in unitarity_check(&ix, &[0.0, 0.5, 3.0], &fields, UNITARY_TOL).unwrap() {
            assert!(r.residual < 1e-12, "{r:?}");
        }
        assert!(matches!(unitarity_check(&x, &[1.0], &fields, UNITARY_TOL), Err(VerifyError::Grid(GridError::NotSkewAdjoint { .. }))));

        let g2 = Grid::new(2, 12, 6.0).unwrap();
        let m = gridops::angular_momentum_matrix(&g2, Axis::Z).unwrap();
        let u = [StateVector::random(g2, 1)];
        assert!(unitarity_check(&m, &[PI / 3.0], &u, UNITARY_TOL).unwrap()[0].pass);
        assert!(group_law(&m, 0.4, 0.7, UNITARY_TOL).unwrap().pass);
    }

    #[test]
    fn commutation_residuals() {
        let g = Grid::new(3, 32, 8.0).unwrap();
        let radial = gaussian_field(&g, FieldSpec { sigma: Some(1.2), ..FieldSpec::RADIAL });
        for r in discrete_commutation_residual(&g, &radial).unwrap() {
            assert!(r.residual <= 1e-8, "{r:?}");
        }
        let shape = FieldSpec { x: 1, sigma: Some(1.0), ..FieldSpec::RADIAL };
        let coarse = discrete_commutation_residual(&Grid::new(3, 16, 6.0).unwrap(), &gaussian_field(&Grid::new(3, 16, 6.0).unwrap(), shape)).unwrap();
        let g24 = Grid::new(3, 24, 6.0).unwrap();
        let fine = discrete_commutation_residual(&g24, &gaussian_field(&g24, shape)).unwrap();
        let worst = |rs: &[IdentityResidual; 3]| rs.iter().map(|r| r.residual).fold(0.0, f64::max);
        assert!(worst(&fine) < worst(&coarse), "{} vs {}", worst(&fine), worst(&coarse));
    }

    #[test]
    fn norm_growth_examples() {
        let rows = norm_growth_study(NormOperator::Spectral, &[16, 32, 64], PI).unwrap();
        for (row, want) in rows.iter().zip([7.0, 15.0, 31.0]) {
            assert!((row.norm - want).abs() / want < 1e-8, "{row:?}");
        }
        let rows = norm_growth_study(NormOperator::Upwind, &[16, 32], PI).unwrap();
        assert!((rows[1].norm / rows[0].norm - 2.0).abs() < 1e-8);
        for row in norm_growth_study(NormOperator::Identity, &[8, 16, 32], PI).unwrap() {
            assert!((row.norm - 1.0).abs() < 1e-12);
        }
        for row in norm_growth_study(NormOperator::Coordinate, &[8, 16], 3.0).unwrap() {
            assert!((row.norm - 3.0).abs() < 1e-9);
        }
        assert_eq!(norm_growth_study(NormOperator::Spectral, &[32, 16], PI).unwrap_err(), VerifyError::NotAscending);
    }

    #[test]
    fn field_spec_text() {
        assert_eq!("1".parse::<FieldSpec>().unwrap(), FieldSpec::RADIAL);
        assert_eq!("x^2*y".parse::<FieldSpec>().unwrap(), FieldSpec::monomial(2, 1, 0));
        assert_eq!("xyx".parse::<FieldSpec>().unwrap(), FieldSpec::monomial(2, 1, 0));
        for bad in ["", "w", "x^", "x^99", "x^-1"] {
            assert!(bad.parse::<FieldSpec>().is_err(), "{bad}");
        }
        let shape = FieldSpec::monomial(1, 1, 0);
        assert_eq!(shape.label(), "xy·gaussian");
    }

    #[test]
    fn oracle_on_small_matrices() {
        for (n, r) in logm_oracle(6, 6, 42).unwrap() {
            assert!(r <= ORACLE_TOL, "dim {n}: {r}");
        }
    }
}
