//! Dense matrix functional calculus.
//!
//! * [`expm`] — scaling and squaring with the order-13 Padé approximant.
//! * [`logm_principal`] — principal logarithm from the complex Schur form by
//!   inverse scaling and squaring (triangular square roots, then the
//!   order-7 Padé approximant of `log(I + X)` in partial-fraction form).
//! * [`logm_contour`] — the same logarithm as a Cauchy integral over a circle,
//!   evaluated by the trapezoidal rule. Slow; used only to cross-check
//!   `logm_principal`.
//! * [`resolvent`], [`spectrum`], [`branch_cut_check`].

mod contour;
mod expm;
mod logm;
pub mod quadrature;

pub use contour::logm_contour;
pub use expm::expm;
pub use logm::{logm_from_schur, logm_principal, logm_principal_with_report};

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, norm_1, CMatrix, LinalgError, Lu, C64};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FuncalcError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix exponential overflow (1-norm {norm:e} exceeds the scaling cap)")]
    ExpOverflow { norm: f64 },
    #[error(
        "eigenvalue {eigenvalue} lies within {min_distance:e} of the branch cut (-inf, 0] \
         (threshold {threshold:e}); the principal logarithm is undefined"
    )]
    BranchCut { eigenvalue: C64, min_distance: f64, threshold: f64 },
    #[error("no circular contour encloses the spectrum while avoiding the branch cut (gap {gap:e})")]
    ContourBlocked { gap: f64 },
    #[error("contour quadrature did not converge with {nodes} nodes (last change {last_change:e})")]
    QuadratureNoConvergence { nodes: usize, last_change: f64 },
    #[error("inverse scaling and squaring needed more than {roots} square roots")]
    TooManySquareRoots { roots: usize },
    #[error("lambda = {lambda} is adjacent to the spectrum (condition estimate {condition:e})")]
    SpectrumAdjacent { lambda: C64, condition: f64 },
}

/// Condition-number threshold above which a resolvent is rejected.
pub const RESOLVENT_CONDITION_LIMIT: f64 = 1e12;

/// Eigenvalues of an operator, with multiplicity.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub source: String,
}

impl Spectrum {
    pub fn max_abs_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    pub fn max_modulus_deviation(&self, radius: f64) -> f64 {
        self.eigenvalues.iter().map(|z| (z.norm() - radius).abs()).fold(0.0, f64::max)
    }
}

/// Eigenvalues of the triangular factor of the complex Schur form.
pub fn spectrum(m: &CMatrix, source: impl Into<String>) -> Result<Spectrum, FuncalcError> {
    let s = linalg::schur(m)?;
    Ok(Spectrum { eigenvalues: s.eigenvalues(), source: source.into() })
}

/// Distance of the spectrum from the ray `(-∞, 0]`.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct BranchCutReport {
    pub min_distance: f64,
    pub threshold: f64,
    pub closest_eigenvalue: C64,
    pub admissible: bool,
}

impl BranchCutReport {
    pub fn from_eigenvalues(eigenvalues: &[C64], threshold: f64) -> Self {
        let mut min_distance = f64::INFINITY;
        let mut closest = C64::new(f64::NAN, f64::NAN);
        for &z in eigenvalues {
            let d = distance_to_cut(z);
            if d < min_distance {
                min_distance = d;
                closest = z;
            }
        }
        BranchCutReport {
            min_distance,
            threshold,
            closest_eigenvalue: closest,
            admissible: min_distance > threshold,
        }
    }

    pub fn into_result(self) -> Result<Self, FuncalcError> {
        if self.admissible {
            Ok(self)
        } else {
            Err(FuncalcError::BranchCut {
                eigenvalue: self.closest_eigenvalue,
                min_distance: self.min_distance,
                threshold: self.threshold,
            })
        }
    }
}

/// Distance from `z` to the closed ray `(-∞, 0]`.
pub fn distance_to_cut(z: C64) -> f64 {
    if z.re <= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Default admissibility margin `1e-6 · (1 + ‖M‖₁)`.
pub fn default_cut_threshold(m: &CMatrix) -> f64 {
    1e-6 * (1.0 + norm_1(m))
}

/// Checks that the principal logarithm of `m` is defined with margin
/// `eps_cut` (default [`default_cut_threshold`]).
pub fn branch_cut_check(m: &CMatrix, eps_cut: Option<f64>) -> Result<BranchCutReport, FuncalcError> {
    let threshold = eps_cut.unwrap_or_else(|| default_cut_threshold(m));
    let s = spectrum(m, "branch cut check")?;
    Ok(BranchCutReport::from_eigenvalues(&s.eigenvalues, threshold))
}

/// `(λI − M)⁻¹` by LU with partial pivoting.
pub fn resolvent(m: &CMatrix, lambda: C64) -> Result<CMatrix, FuncalcError> {
    linalg::ensure_square(m)?;
    let a = linalg::shifted(&(-m), lambda);
    let lu = match Lu::new(&a) {
        Ok(lu) => lu,
        Err(LinalgError::Singular { .. }) => {
            return Err(FuncalcError::SpectrumAdjacent { lambda, condition: f64::INFINITY })
        }
        Err(e) => return Err(e.into()),
    };
    let inv = lu.inverse();
    let condition = norm_1(&a) * norm_1(&inv);
    if !condition.is_finite() || condition > RESOLVENT_CONDITION_LIMIT {
        return Err(FuncalcError::SpectrumAdjacent { lambda, condition });
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity, norm_fro, random_complex_matrix, ONE, ZERO};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn resolvent_of_zero_and_diagonal() {
        let r = resolvent(&CMatrix::zeros((3, 3)), c(2.0, 0.0)).unwrap();
        assert!(norm_fro(&(r - identity(3) * c(0.5, 0.0))) < 1e-15);
        let r = resolvent(&diag(&[ONE]), c(3.0, 0.0)).unwrap();
        assert!((r[[0, 0]] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resolvent_at_eigenvalue_is_rejected() {
        let m = diag(&[ONE, c(2.0, 0.0)]);
        match resolvent(&m, c(2.0, 0.0)) {
            Err(FuncalcError::SpectrumAdjacent { lambda, .. }) => assert_eq!(lambda, c(2.0, 0.0)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            resolvent(&m, c(2.0 + 1e-14, 0.0)),
            Err(FuncalcError::SpectrumAdjacent { .. })
        ));
    }

    #[test]
    fn resolvent_identity() {
        let m = random_complex_matrix(10, 21);
        let (l1, l2) = (c(3.0, 1.0), c(-2.5, 4.0));
        let r1 = resolvent(&m, l1).unwrap();
        let r2 = resolvent(&m, l2).unwrap();
        let lhs = &r1 - &r2;
        let rhs = r1.dot(&r2) * (l2 - l1);
        assert!(norm_fro(&(lhs - rhs)) < 1e-9);
    }

    #[test]
    fn spectrum_of_diagonal() {
        let s = spectrum(&diag(&[ONE, c(2.0, 0.0), c(3.0, 0.0)]), "diag").unwrap();
        let mut re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn branch_cut_identity_shift() {
        for kappa in [0.0, 0.5, 2.0, 7.0] {
            let m = identity(4) * c(1.0 + kappa, 0.0);
            let rep = branch_cut_check(&m, None).unwrap();
            assert!((rep.min_distance - (1.0 + kappa)).abs() < 1e-14);
            assert!(rep.admissible);
        }
    }

    #[test]
    fn branch_cut_unitary_plus_two() {
        // eigenvalue -1 of U gives 1 after the shift by 2
        let u = diag(&[c(-1.0, 0.0), ONE, c(0.0, 1.0), c(0.6, 0.8)]);
        let rep = branch_cut_check(&linalg::shifted(&u, c(2.0, 0.0)), None).unwrap();
        assert!((rep.min_distance - 1.0).abs() < 1e-14);
        assert!(rep.admissible);
        let rep = branch_cut_check(&u, None).unwrap();
        assert!(rep.min_distance < 1e-14);
        assert!(!rep.admissible);
        assert!(rep.into_result().is_err());
    }

    #[test]
    fn distance_to_cut_geometry() {
        assert_eq!(distance_to_cut(c(-3.0, 0.5)), 0.5);
        assert_eq!(distance_to_cut(c(3.0, 4.0)), 5.0);
        assert_eq!(distance_to_cut(ZERO), 0.0);
    }
}
