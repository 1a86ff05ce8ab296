//! Verification suites over the symbolic and numerical engines, their
//! configuration, and the JSON records they emit.

mod checks;
mod config;
mod suite;
mod symbolic;

pub use checks::{
    boundedness_contrast, discrete_commutation_residual, gaussian_field, group_law, logm_oracle, norm_growth_study,
    resolvent_sweep, rotated_field_error, rotation_compare, rotation_compare_with, rotation_propagator,
    unitarity_check, wrap_error_estimate, BoundednessRow, FieldSpec, NormOperator, NormRow, PowerCheck,
    ResolventReport, MAX_FIELD_DEGREE, ORACLE_TOL, RESOLVENT_MAX_POWER, RESOLVENT_REL_SLACK, ROTATION_TOL, UNITARY_TOL,
};
pub use config::{
    default_lambda_sweep, BoundednessConfig, CheckKind, CommutationConfig, ComplexSpec, ConfigError, GeneratorCase,
    LogrepConfig, NormGrowthConfig, OracleConfig, ProductConfig, ResolventConfig, RotationConfig, SemigroupConfig,
    SuiteConfig, SumConfig, UnitarityConfig,
};
pub use suite::{build_cells, run_cells, run_suite, summarize, Cell, SuiteReport, Summary};
pub use symbolic::{symbolic_suite, SymbolicCheck};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcalc::FuncalcError;
use crate::gridops::{self, Grid, GridError, OperatorMatrix};
use crate::linalg::C64;
use crate::logrep::{IdentityResidual, LogrepError};
use crate::Axis;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Funcalc(#[from] FuncalcError),
    #[error(transparent)]
    Logrep(#[from] LogrepError),
    #[error("invalid lambda {0}: the resolvent estimate needs Re λ > 0")]
    LambdaNotInRightHalfPlane(C64),
    #[error("test field is not decayed enough for the periodic box (wrap error estimate {estimate:e} > {limit:e})")]
    FieldNotDecayed { estimate: f64, limit: f64 },
    #[error("Gaussian width {sigma} exceeds L/6 = {limit}")]
    FieldTooWide { sigma: f64, limit: f64 },
    #[error("grid sizes must be strictly ascending")]
    NotAscending,
    #[error("{0}")]
    Invalid(String),
}

impl VerifyError {
    /// Whether the error is a violated mathematical precondition rather than
    /// bad input or a numerical failure.
    pub fn is_precondition(&self) -> bool {
        match self {
            VerifyError::Logrep(e) => e.is_precondition(),
            VerifyError::Funcalc(e) => LogrepError::Funcalc(e.clone()).is_precondition(),
            VerifyError::FieldNotDecayed { .. } | VerifyError::FieldTooWide { .. } => true,
            _ => false,
        }
    }
}

/// How a record's residual is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Pass iff `residual ≤ tolerance`.
    #[default]
    AtMost,
    /// Pass iff `residual ≥ tolerance` (detections and growth rates).
    AtLeast,
}

impl Relation {
    pub fn holds(self, residual: f64, tolerance: f64) -> bool {
        match self {
            Relation::AtMost => residual <= tolerance,
            Relation::AtLeast => residual >= tolerance,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

/// Cell parameters carried by every record; absent ones serialize as null.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: Option<usize>,
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    pub kappa_re: Option<f64>,
    pub kappa_im: Option<f64>,
    pub t: Option<f64>,
    pub s: Option<f64>,
}

impl Params {
    pub fn grid(n: usize, half_width: f64) -> Self {
        Params { n: Some(n), half_width: Some(half_width), ..Params::default() }
    }

    pub fn with_kappa(mut self, kappa: C64) -> Self {
        self.kappa_re = Some(kappa.re);
        self.kappa_im = Some(kappa.im);
        self
    }

    pub fn with_times(mut self, t: f64, s: f64) -> Self {
        self.t = Some(t);
        self.s = Some(s);
        self
    }
}

/// One verification result.
///
/// `tolerance: None` marks a reported-only quantity, which always passes.
/// A residual that could not be computed serializes as null and fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub case: String,
    pub params: Params,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub relation: Relation,
    pub pass: bool,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Set when `error` is a violated mathematical precondition.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub precondition: bool,
}

impl CheckRecord {
    pub fn new(check: &str, case: impl Into<String>, params: Params, residual: f64, tolerance: Option<f64>, relation: Relation) -> Self {
        let pass = residual.is_finite() && tolerance.map_or(true, |tol| relation.holds(residual, tol));
        CheckRecord {
            check: check.to_string(),
            case: case.into(),
            params,
            residual: Some(residual).filter(|r| r.is_finite()),
            tolerance,
            relation,
            pass,
            wall_ms: 0.0,
            error: None,
            precondition: false,
        }
    }

    pub fn from_identity(check: &str, case: impl Into<String>, params: Params, r: &IdentityResidual) -> Self {
        CheckRecord::new(check, case, params, r.residual, r.tolerance, Relation::AtMost)
    }

    pub fn failed(check: &str, case: impl Into<String>, params: Params, error: impl fmt::Display) -> Self {
        CheckRecord {
            check: check.to_string(),
            case: case.into(),
            params,
            residual: None,
            tolerance: None,
            relation: Relation::AtMost,
            pass: false,
            wall_ms: 0.0,
            error: Some(error.to_string()),
            precondition: false,
        }
    }

    /// [`CheckRecord::failed`], flagged when `error` is a precondition.
    pub fn from_error(check: &str, case: impl Into<String>, params: Params, error: &VerifyError) -> Self {
        let mut r = CheckRecord::failed(check, case, params, error);
        r.precondition = error.is_precondition();
        r
    }
}

/// Generators the logarithmic-representation checks are run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    /// 1D upwind derivative (dissipative).
    Upwind,
    /// 1D Fourier derivative (skew-symmetric).
    Spectral,
    /// `x∂y − y∂x` on a 2D grid.
    Rot2d,
    /// `x∂y − y∂x` on a 3D grid.
    Rot3d,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [GeneratorKind::Upwind, GeneratorKind::Spectral, GeneratorKind::Rot2d, GeneratorKind::Rot3d];

    pub fn dim(self) -> usize {
        match self {
            GeneratorKind::Upwind | GeneratorKind::Spectral => 1,
            GeneratorKind::Rot2d => 2,
            GeneratorKind::Rot3d => 3,
        }
    }

    /// `π` for the derivatives, 6 for the rotation generators.
    pub fn default_half_width(self) -> f64 {
        match self {
            GeneratorKind::Upwind | GeneratorKind::Spectral => std::f64::consts::PI,
            GeneratorKind::Rot2d | GeneratorKind::Rot3d => 6.0,
        }
    }

    pub fn build(self, n: usize, half_width: f64) -> Result<OperatorMatrix, GridError> {
        let grid = Grid::new(self.dim(), n, half_width)?;
        match self {
            GeneratorKind::Upwind => gridops::upwind_derivative(&grid, Axis::X),
            GeneratorKind::Spectral => gridops::spectral_derivative(&grid, Axis::X),
            GeneratorKind::Rot2d | GeneratorKind::Rot3d => gridops::angular_momentum_matrix(&grid, Axis::Z),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Upwind => "upwind",
            GeneratorKind::Spectral => "spectral",
            GeneratorKind::Rot2d => "rot2d",
            GeneratorKind::Rot3d => "rot3d",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GeneratorKind::ALL
            .into_iter()
            .find(|g| g.to_string() == s)
            .ok_or_else(|| format!("unknown generator '{s}' (expected upwind, spectral, rot2d or rot3d)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse '{0}' as a complex number (forms: 2, -0.5, 3i, 1+10i, 2.5-i)")]
pub struct ComplexParseError(pub String);

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, exponents, spaces).
/// Non-finite parts are rejected.
pub fn parse_complex(text: &str) -> Result<C64, ComplexParseError> {
    let err = || ComplexParseError(text.to_string());
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('−', "-");
    if s.is_empty() {
        return Err(err());
    }
    let real = |p: &str| -> Result<f64, ComplexParseError> {
        if p.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
            return Err(err());
        }
        p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(err)
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(real(&s)?, 0.0));
    };
    // the imaginary part starts at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => real(t)?,
    };
    let re = if re_text.is_empty() { 0.0 } else { real(re_text)? };
    Ok(C64::new(re, im))
}

/// Comma-separated list of [`parse_complex`] values; commas inside a number
/// are not supported.
pub fn parse_complex_list(text: &str) -> Result<Vec<C64>, ComplexParseError> {
    text.split(',').map(parse_complex).collect()
}
