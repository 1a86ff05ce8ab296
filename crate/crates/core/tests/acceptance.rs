//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances and runtime budgets are pinned here.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rotgen_core::gridops::{self, Grid, StateVector};
use rotgen_core::linalg::C64;
use rotgen_core::logrep::{self, EvolutionFamily, LogrepError};
use rotgen_core::verify::{self, default_lambda_sweep, FieldSpec, GeneratorKind};
use rotgen_core::Axis;

const RESOLVENT_SLACK: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-8;
const SERIES_TOL: f64 = 1e-10;
const LOG_NORM_SPREAD: f64 = 2.0;
const GENERATOR_GROWTH: f64 = 1.8;
const PRODUCT_TOL: f64 = 1e-8;
const SUM_TOL: f64 = 1e-5;
const ROTATION_TOL: f64 = 1e-6;
const GROUP_LAW_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-10;
const VIOLATION_MIN: f64 = 1e-3;
const CONTROL_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-8;

type Outcome = Result<(bool, String), String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn kappas() -> [C64; 3] {
    [c(2.0, 0.0), c(3.0, 0.0), c(1.0, 1.0)]
}

fn log_cases() -> [(GeneratorKind, usize); 4] {
    [(GeneratorKind::Upwind, 64), (GeneratorKind::Spectral, 64), (GeneratorKind::Rot2d, 16), (GeneratorKind::Rot3d, 8)]
}

const TAUS: [f64; 3] = [0.1, 0.5, 1.0];

fn family(gen: GeneratorKind, n: usize) -> Result<EvolutionFamily, String> {
    let m = gen.build(n, gen.default_half_width()).map_err(|e| e.to_string())?;
    Ok(EvolutionFamily::with_default_horizon(m))
}

fn symbolic() -> Outcome {
    let checks = verify::symbolic_suite();
    let failing: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| c.lhs.clone()).collect();
    Ok((failing.is_empty(), format!("{} identities exact, failing: {failing:?}", checks.len() - failing.len())))
}

fn resolvent() -> Outcome {
    let lambdas = default_lambda_sweep();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for n in [32, 64, 128] {
        let grid = Grid::new(1, n, PI).map_err(|e| e.to_string())?;
        let d = gridops::upwind_derivative(&grid, Axis::X).map_err(|e| e.to_string())?;
        for r in verify::resolvent_sweep(&d, &lambdas).map_err(|e| e.to_string())? {
            if r.power_checks.len() != 4 {
                failures.push(format!("n={n} λ={}: {}", r.lambda, r.error.clone().unwrap_or_default()));
                continue;
            }
            for p in &r.power_checks {
                let ratio = p.measured_norm / p.bound;
                worst = worst.max(ratio);
                if ratio > 1.0 + RESOLVENT_SLACK {
                    failures.push(format!("n={n} λ={} power {}: ratio {ratio}", r.lambda, p.power));
                }
            }
        }
    }
    Ok((failures.is_empty(), format!("{} λ × 3 grids × powers 1..4, worst ‖R^k‖·(Re λ)^k = {worst:.12}, failures {failures:?}", lambdas.len())))
}

fn reconstruction() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (gen, n) in log_cases() {
        let fam = family(gen, n)?;
        for kappa in kappas() {
            for tau in TAUS {
                match logrep::reconstruct_generator(&fam, tau, 0.0, kappa) {
                    Ok(r) => {
                        worst = worst.max(r.residual);
                        if r.residual > RECONSTRUCTION_TOL {
                            failures.push(format!("{gen} n={n} κ={kappa} t−s={tau}: {:e}", r.residual));
                        }
                    }
                    Err(e) => failures.push(format!("{gen} n={n} κ={kappa} t−s={tau}: {e}")),
                }
            }
        }
    }
    Ok((failures.is_empty(), format!("36 cells, worst relative residual {worst:e} (tol {RECONSTRUCTION_TOL:e}), failures {failures:?}")))
}

fn series_and_boundedness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (gen, n) in log_cases() {
        let fam = family(gen, n)?;
        for kappa in kappas() {
            for tau in TAUS {
                let rep = logrep::log_representation(&fam, tau, 0.0, kappa).map_err(|e| e.to_string())?;
                let r = logrep::series_reconstruction(&rep, None).residual.residual;
                worst = worst.max(r);
                if r > SERIES_TOL {
                    failures.push(format!("{gen} n={n} κ={kappa} t−s={tau}: {r:e}"));
                }
            }
        }
    }
    let rows = verify::boundedness_contrast(&[8, 16, 32], 6.0, c(2.0, 0.0), 0.3, 0.0).map_err(|e| e.to_string())?;
    let logs: Vec<f64> = rows.iter().map(|r| r.log_norm).collect();
    let gens: Vec<f64> = rows.iter().map(|r| r.generator_norm).collect();
    let spread = logs.iter().copied().fold(0.0, f64::max) / logs.iter().copied().fold(f64::INFINITY, f64::min);
    let growth = gens.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    let pass = failures.is_empty() && spread < LOG_NORM_SPREAD && growth >= GENERATOR_GROWTH;
    Ok((
        pass,
        format!("series worst {worst:e} (tol {SERIES_TOL:e}), failures {failures:?}; rot2d n=8,16,32: ‖a‖ {logs:.4?} spread {spread:.4}×, ‖A‖ {gens:.4?} min growth {growth:.4}×"),
    ))
}

fn product() -> Outcome {
    let mut residuals = Vec::new();
    for n in [16, 32] {
        let grid = Grid::new(2, n, 6.0).map_err(|e| e.to_string())?;
        let x = gridops::coordinate_operator(&grid, Axis::X).map_err(|e| e.to_string())?;
        let fam = EvolutionFamily::with_default_horizon(gridops::spectral_derivative(&grid, Axis::Y).map_err(|e| e.to_string())?);
        residuals.push(logrep::product_perturbation(&x, &fam, 0.5, 0.0, c(2.0, 0.0)).map_err(|e| e.to_string())?.residual);
    }
    let grid = Grid::new(2, 16, 6.0).map_err(|e| e.to_string())?;
    let x = gridops::coordinate_operator(&grid, Axis::X).map_err(|e| e.to_string())?;
    let fam = EvolutionFamily::with_default_horizon(gridops::spectral_derivative(&grid, Axis::X).map_err(|e| e.to_string())?);
    let control = logrep::product_perturbation(&x, &fam, 0.5, 0.0, c(2.0, 0.0));
    let rejected = matches!(control, Err(LogrepError::CommutationViolated { .. }));
    let pass = residuals.iter().all(|&r| r <= PRODUCT_TOL) && rejected;
    Ok((pass, format!("residuals n=16,32 {residuals:?} (tol {PRODUCT_TOL:e}); D_x control rejected: {rejected}")))
}

fn sum() -> Outcome {
    let grid = Grid::new(2, 16, 6.0).map_err(|e| e.to_string())?;
    let d = logrep::sum_decomposition(&grid, 0.2, 0.0, c(2.0, 0.0)).map_err(|e| e.to_string())?;
    Ok((d.total.residual <= SUM_TOL, format!("three-term total residual {:e} (tol {SUM_TOL:e})", d.total.residual)))
}

fn rotation() -> Outcome {
    let grid = Grid::new(2, 32, 6.0).map_err(|e| e.to_string())?;
    let fields = [FieldSpec::RADIAL, FieldSpec::monomial(1, 0, 0), FieldSpec::monomial(1, 1, 0), FieldSpec::monomial(2, 0, 0)];
    let mut worst_compare: f64 = 0.0;
    for theta in [PI / 6.0, PI / 4.0, PI / 2.0] {
        let u = verify::rotation_propagator(&grid, theta).map_err(|e| e.to_string())?;
        for f in fields {
            let r = verify::rotation_compare_with(&grid, &u, theta, f, ROTATION_TOL).map_err(|e| e.to_string())?;
            worst_compare = worst_compare.max(r.residual);
        }
    }
    let m = gridops::angular_momentum_matrix(&grid, Axis::Z).map_err(|e| e.to_string())?;
    let group = verify::group_law(&m, PI / 6.0, PI / 4.0, GROUP_LAW_TOL).map_err(|e| e.to_string())?.residual;
    let small = Grid::new(2, 16, 6.0).map_err(|e| e.to_string())?;
    let m16 = gridops::angular_momentum_matrix(&small, Axis::Z).map_err(|e| e.to_string())?;
    let probes = [StateVector::random(small, 42), StateVector::random(small, 43), verify::gaussian_field(&small, FieldSpec::monomial(1, 0, 0))];
    let unitary = verify::unitarity_check(&m16, &[PI / 6.0, PI / 4.0, PI / 2.0, 1.0], &probes, UNITARITY_TOL)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    let pass = worst_compare <= ROTATION_TOL && group <= GROUP_LAW_TOL && unitary <= UNITARITY_TOL;
    Ok((pass, format!("compare worst {worst_compare:e} (tol {ROTATION_TOL:e}), group law {group:e}, unitarity {unitary:e} (tol {UNITARITY_TOL:e})")))
}

fn semigroup() -> Outcome {
    let fam = family(GeneratorKind::Rot2d, 8)?;
    let r = logrep::semigroup_violation(&fam, c(2.0, 0.0), (0.4, 0.2, 0.0)).map_err(|e| e.to_string())?;
    let pass = r.violation_residual > VIOLATION_MIN && r.control.residual <= CONTROL_TOL;
    Ok((pass, format!("exp[a] defect {:e} (> {VIOLATION_MIN:e}), U control {:e} (tol {CONTROL_TOL:e})", r.violation_residual, r.control.residual)))
}

fn oracle() -> Outcome {
    let rows = verify::logm_oracle(20, 16, 42).map_err(|e| e.to_string())?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_dim = rows.iter().map(|r| r.0).max().unwrap_or(0);
    Ok((rows.len() == 20 && worst <= ORACLE_TOL, format!("{} matrices, dim ≤ {max_dim}, worst ‖Δ‖ {worst:e} (tol {ORACLE_TOL:e})", rows.len())))
}

fn main() -> ExitCode {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 9] = [
        ("exact symbolic suite", Some(Duration::from_secs(1)), symbolic),
        ("upwind resolvent estimate", Some(Duration::from_secs(30)), resolvent),
        ("logarithmic representation reconstruction", Some(Duration::from_secs(120)), reconstruction),
        ("series reconstruction and boundedness contrast", None, series_and_boundedness),
        ("product perturbation", None, product),
        ("sum decomposition", None, sum),
        ("rotation semantics", None, rotation),
        ("semigroup violation of exp[a]", None, semigroup),
        ("cross-algorithm logarithm oracle", None, oracle),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if let Some(b) = budget {
            if elapsed > *b {
                pass = false;
                detail.push_str(&format!("; over the {b:?} budget"));
            }
        }
        failed += usize::from(!pass);
        println!("{} criterion {}: {name} — {detail} [{elapsed:.2?}]", if pass { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
