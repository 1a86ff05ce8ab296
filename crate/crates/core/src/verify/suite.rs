//! Suite runner: expands a [`SuiteConfig`] into independent cells, runs them
//! on a bounded worker pool, and returns their records in construction order.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::checks::{self, FieldSpec};
use super::config::{CheckKind, ComplexSpec, SuiteConfig};
use super::symbolic::symbolic_suite;
use super::{CheckRecord, Params, Relation, VerifyError};
use crate::gridops::{self, DerivativeScheme, Grid, StateVector};
use crate::linalg::C64;
use crate::logrep::{self, EvolutionFamily, LogrepError, COMMUTATION_TOL};
use crate::Axis;

type CellFn = Box<dyn Fn() -> Result<Vec<CheckRecord>, VerifyError> + Send + Sync>;

/// Independent unit of work. On error the runner emits one failed record
/// under `check`.
pub struct Cell {
    pub check: String,
    pub case: String,
    pub params: Params,
    run: CellFn,
}

impl Cell {
    fn new<F>(check: &str, case: impl Into<String>, params: Params, run: F) -> Self
    where
        F: Fn() -> Result<Vec<CheckRecord>, VerifyError> + Send + Sync + 'static,
    {
        Cell { check: check.to_string(), case: case.into(), params, run: Box::new(run) }
    }

    /// Runs the cell and stamps its wall time on every record.
    pub fn execute(&self) -> Vec<CheckRecord> {
        let start = Instant::now();
        let result = (self.run)();
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let mut records = match result {
            Ok(r) => r,
            Err(e) => vec![CheckRecord::from_error(&self.check, self.case.clone(), self.params.clone(), &e)],
        };
        for r in &mut records {
            r.wall_ms = wall_ms;
        }
        records
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Records without a tolerance (always counted as passed).
    pub reported_only: usize,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn summarize(records: &[CheckRecord]) -> Summary {
    let passed = records.iter().filter(|r| r.pass).count();
    Summary {
        total: records.len(),
        passed,
        failed: records.len() - passed,
        reported_only: records.iter().filter(|r| r.tolerance.is_none() && r.error.is_none()).count(),
    }
}

/// Records of a finished suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
}

/// Runs `cells` on `jobs` workers (0 = available parallelism). The order of
/// the output does not depend on scheduling.
pub fn run_cells(cells: &[Cell], jobs: usize) -> Result<Vec<CheckRecord>, VerifyError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| VerifyError::Invalid(format!("cannot start worker pool: {e}")))?;
    let per_cell: Vec<Vec<CheckRecord>> = pool.install(|| cells.par_iter().map(Cell::execute).collect());
    Ok(per_cell.into_iter().flatten().collect())
}

pub fn run_suite(config: &SuiteConfig, jobs: usize) -> Result<SuiteReport, VerifyError> {
    let records = run_cells(&build_cells(config), jobs)?;
    Ok(SuiteReport { summary: summarize(&records), records })
}

fn kappa_case(k: C64) -> String {
    ComplexSpec(k).to_string()
}

/// Expands the enabled checks of `config` into cells.
pub fn build_cells(config: &SuiteConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for kind in CheckKind::ALL {
        if !config.check_enabled(kind) {
            continue;
        }
        match kind {
            CheckKind::Symbolic => symbolic_cells(&mut cells),
            CheckKind::Resolvent => resolvent_cells(config, &mut cells),
            CheckKind::Logrep => logrep_cells(config, &mut cells),
            CheckKind::Boundedness => boundedness_cells(config, &mut cells),
            CheckKind::Product => product_cells(config, &mut cells),
            CheckKind::Sum => sum_cells(config, &mut cells),
            CheckKind::Rotation => rotation_cells(config, &mut cells),
            CheckKind::Unitarity => unitarity_cells(config, &mut cells),
            CheckKind::Commutation => commutation_cells(config, &mut cells),
            CheckKind::NormGrowth => norm_growth_cells(config, &mut cells),
            CheckKind::Semigroup => semigroup_cells(config, &mut cells),
            CheckKind::Oracle => oracle_cells(config, &mut cells),
        }
    }
    cells
}

fn symbolic_cells(cells: &mut Vec<Cell>) {
    cells.push(Cell::new("symbolic", "exact canonical forms", Params::default(), || {
        let checks = symbolic_suite();
        let mut out = Vec::new();
        for group in ["angular_momentum", "canonical", "product_rule"] {
            let members: Vec<_> = checks.iter().filter(|c| c.group == group).collect();
            let mismatched: usize = members.iter().map(|c| c.mismatched_terms).sum();
            let failing: Vec<&str> = members.iter().filter(|c| !c.pass).map(|c| c.lhs.as_str()).collect();
            let mut case = format!("{} identities", members.len());
            if !failing.is_empty() {
                case.push_str(&format!(", failing: {}", failing.join(" ")));
            }
            out.push(CheckRecord::new(&format!("symbolic_{group}"), case, Params::default(), mismatched as f64, Some(0.0), Relation::AtMost));
        }
        Ok(out)
    }));
}

fn resolvent_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let rc = &config.resolvent;
    let lambdas: Vec<C64> = rc.lambdas.iter().map(|l| l.0).collect();
    for &scheme in &rc.schemes {
        for &n in &rc.n {
            let (l, slack, lambdas) = (rc.half_width, rc.tolerance, lambdas.clone());
            let params = Params::grid(n, l);
            cells.push(Cell::new("resolvent", format!("{scheme} n={n}"), params.clone(), move || {
                let grid = Grid::new(1, n, l)?;
                let d = match scheme {
                    DerivativeScheme::Upwind => gridops::upwind_derivative(&grid, Axis::X)?,
                    DerivativeScheme::Spectral => gridops::spectral_derivative(&grid, Axis::X)?,
                };
                let mut out = Vec::new();
                for r in checks::resolvent_sweep(&d, &lambdas)? {
                    let case = format!("{scheme} n={n} λ={}", kappa_case(r.lambda));
                    let Some(measured) = r.measured_norm else {
                        out.push(CheckRecord::failed("resolvent", case, params.clone(), r.error.unwrap_or_default()));
                        continue;
                    };
                    out.push(CheckRecord::new("resolvent", case.clone(), params.clone(), measured, Some(r.bound * (1.0 + slack)), Relation::AtMost));
                    let worst = r.worst_ratio().unwrap_or(f64::NAN);
                    out.push(CheckRecord::new("resolvent_powers", format!("{case} powers 1..4 (ratio)"), params.clone(), worst, Some(1.0 + slack), Relation::AtMost));
                }
                Ok(out)
            }));
        }
    }
}

fn logrep_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let lc = &config.logrep;
    for case in &lc.cases {
        for kappa in &lc.kappas {
            for &tau in &lc.taus {
                let (gen, n, l, kappa, s) = (case.generator, case.n, case.half_width(), kappa.0, lc.s);
                let (tol, series_tol, series_terms) = (lc.tolerance, lc.series_tolerance, lc.series_terms);
                let t = s + tau;
                let params = Params::grid(n, l).with_kappa(kappa).with_times(t, s);
                let label = format!("{gen} n={n} κ={} t−s={tau}", kappa_case(kappa));
                cells.push(Cell::new("logrep_reconstruction", label.clone(), params.clone(), move || {
                    let horizon = t.abs().max(s.abs()).max(logrep::DEFAULT_HORIZON);
                    let family = EvolutionFamily::new(gen.build(n, l)?, horizon)?;
                    let rec = logrep::reconstruct_generator(&family, t, s, kappa)?;
                    let rep = logrep::log_representation(&family, t, s, kappa)?;
                    let series = logrep::series_reconstruction(&rep, series_terms);
                    Ok(vec![
                        CheckRecord::new("logrep_reconstruction", label.clone(), params.clone(), rec.residual, Some(tol), Relation::AtMost),
                        CheckRecord::new(
                            "logrep_series",
                            format!("{label} N={}", series.terms_used),
                            params.clone(),
                            series.residual.residual,
                            Some(series_tol),
                            Relation::AtMost,
                        ),
                    ])
                }));
            }
        }
    }
}

fn boundedness_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let b = config.boundedness.clone();
    let params = Params { half_width: Some(b.half_width), ..Params::default() }.with_kappa(b.kappa.0).with_times(b.t, b.s);
    cells.push(Cell::new("boundedness", "rot2d", params.clone(), move || {
        let rows = checks::boundedness_contrast(&b.n, b.half_width, b.kappa.0, b.t, b.s)?;
        let mut out: Vec<CheckRecord> = rows
            .iter()
            .map(|r| {
                let p = Params { n: Some(r.n), ..params.clone() };
                CheckRecord::new("boundedness_norms", format!("rot2d n={} ‖A‖={:.6}", r.n, r.generator_norm), p, r.log_norm, None, Relation::AtMost)
            })
            .collect();
        let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.log_norm), hi.max(r.log_norm)));
        out.push(CheckRecord::new("boundedness_log_norm", "max/min ‖a‖ over n", params.clone(), hi / lo, Some(b.max_log_ratio), Relation::AtMost));
        let growth = rows.windows(2).map(|w| w[1].generator_norm / w[0].generator_norm).fold(f64::INFINITY, f64::min);
        out.push(CheckRecord::new("boundedness_generator_growth", "min ‖A_2n‖/‖A_n‖", params.clone(), growth, Some(b.min_growth), Relation::AtLeast));
        Ok(out)
    }));
}

fn product_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let pc = config.product.clone();
    for &n in &pc.n {
        let params = Params::grid(n, pc.half_width).with_kappa(pc.kappa.0).with_times(pc.t, pc.s);
        let pc = pc.clone();
        let (p2, case) = (params.clone(), format!("L=diag(x), A=D_y n={n}"));
        cells.push(Cell::new("product_perturbation", case.clone(), params, move || {
            let grid = Grid::new(2, n, pc.half_width)?;
            let x = gridops::coordinate_operator(&grid, Axis::X)?;
            let family = EvolutionFamily::with_default_horizon(gridops::spectral_derivative(&grid, Axis::Y)?);
            let r = logrep::product_perturbation(&x, &family, pc.t, pc.s, pc.kappa.0)?;
            Ok(vec![CheckRecord::new("product_perturbation", case.clone(), p2.clone(), r.residual, Some(pc.tolerance), Relation::AtMost)])
        }));
    }
    let n = pc.n.first().copied().unwrap_or(16);
    let params = Params::grid(n, pc.half_width).with_kappa(pc.kappa.0).with_times(pc.t, pc.s);
    let p2 = params.clone();
    cells.push(Cell::new("product_negative_control", format!("L=diag(x), A=D_x n={n}"), params, move || {
        let grid = Grid::new(2, n, pc.half_width)?;
        let x = gridops::coordinate_operator(&grid, Axis::X)?;
        let family = EvolutionFamily::with_default_horizon(gridops::spectral_derivative(&grid, Axis::X)?);
        let case = format!("L=diag(x), A=D_x n={n} rejected");
        match logrep::product_perturbation(&x, &family, pc.t, pc.s, pc.kappa.0) {
            Err(LogrepError::CommutationViolated { residual, tolerance, .. }) => {
                Ok(vec![CheckRecord::new("product_negative_control", case, p2.clone(), residual, Some(tolerance), Relation::AtLeast)])
            }
            Err(e) => Err(e.into()),
            Ok(r) => Ok(vec![CheckRecord::failed(
                "product_negative_control",
                case,
                p2.clone(),
                format!("non-commuting pair was accepted (residual {:e}, hypothesis tolerance {COMMUTATION_TOL:e})", r.residual),
            )]),
        }
    }));
}

fn sum_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let sc = config.sum.clone();
    let params = Params::grid(sc.n, sc.half_width).with_kappa(sc.kappa.0).with_times(sc.t, sc.s);
    let p2 = params.clone();
    cells.push(Cell::new("sum_decomposition", format!("x∂y − y∂x n={}", sc.n), params, move || {
        let grid = Grid::new(2, sc.n, sc.half_width)?;
        let rep = logrep::sum_decomposition(&grid, sc.t, sc.s, sc.kappa.0)?;
        let mut out = vec![CheckRecord::new(
            "sum_decomposition",
            format!("T1 + T2 + T3 vs x∂y − y∂x n={}", sc.n),
            p2.clone(),
            rep.total.residual,
            Some(sc.tolerance),
            Relation::AtMost,
        )];
        for (k, term) in rep.terms.iter().enumerate() {
            out.push(CheckRecord::new(
                "sum_term_fd",
                format!("T{} = {} central difference vs exact", k + 1, term.label),
                p2.clone(),
                term.fd_vs_exact.residual,
                Some(sc.tolerance),
                Relation::AtMost,
            ));
            out.push(CheckRecord::new(
                "sum_term_integral",
                format!("T{} ‖∫T‖ (mean-value bound {:.6e})", k + 1, term.increment_bound),
                p2.clone(),
                term.integral_norm,
                None,
                Relation::AtMost,
            ));
        }
        Ok(out)
    }));
}

fn rotation_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let rc = config.rotation.clone();
    for &theta in &rc.thetas {
        let rc = rc.clone();
        let params = Params::grid(rc.n, rc.half_width);
        let p2 = params.clone();
        cells.push(Cell::new("rotation_compare", format!("θ={theta:.6}"), params, move || {
            let grid = Grid::new(2, rc.n, rc.half_width)?;
            let u = checks::rotation_propagator(&grid, theta)?;
            let mut out = Vec::new();
            for &field in &rc.fields {
                let case = format!("{} θ={theta:.6}", field.label());
                out.push(match checks::rotation_compare_with(&grid, &u, theta, field, rc.tolerance) {
                    Ok(r) => CheckRecord::new("rotation_compare", case, p2.clone(), r.residual, Some(rc.tolerance), Relation::AtMost),
                    Err(e) => CheckRecord::from_error("rotation_compare", case, p2.clone(), &e),
                });
            }
            Ok(out)
        }));
    }
    for &(a, b) in &rc.group_pairs {
        let (n, l, tol) = (rc.n, rc.half_width, rc.group_tolerance);
        let params = Params::grid(n, l);
        let p2 = params.clone();
        let case = format!("θ1={a:.6} θ2={b:.6}");
        cells.push(Cell::new("rotation_group_law", case.clone(), params, move || {
            let grid = Grid::new(2, n, l)?;
            let m = gridops::angular_momentum_matrix(&grid, Axis::Z)?;
            let r = checks::group_law(&m, a, b, tol)?;
            Ok(vec![CheckRecord::new("rotation_group_law", case.clone(), p2.clone(), r.residual, Some(tol), Relation::AtMost)])
        }));
    }
}

fn unitarity_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let uc = config.unitarity.clone();
    let seed = config.seed;
    for planar in [false, true] {
        let uc = uc.clone();
        let params = Params::grid(uc.n, uc.half_width);
        let p2 = params.clone();
        let name = if planar { "x∂y − y∂x (2D)" } else { "i·diag(x) (1D)" };
        cells.push(Cell::new("unitarity", name, params, move || {
            let grid = Grid::new(if planar { 2 } else { 1 }, uc.n, uc.half_width)?;
            let m = if planar {
                gridops::angular_momentum_matrix(&grid, Axis::Z)?
            } else {
                gridops::coordinate_operator(&grid, Axis::X)?.scaled(C64::new(0.0, 1.0), "i·x")
            };
            let fields = [
                StateVector::random(grid, seed),
                StateVector::random(grid, seed.wrapping_add(1)),
                checks::gaussian_field(&grid, FieldSpec::monomial(1, 0, 0)),
            ];
            let mut out = Vec::new();
            for &theta in &uc.thetas {
                let rs = checks::unitarity_check(&m, &[theta], &fields, uc.tolerance)?;
                let worst = rs.iter().map(|r| r.residual).fold(0.0, f64::max);
                out.push(CheckRecord::new("unitarity", format!("{name} θ={theta:.6} (worst of {} fields)", fields.len()), p2.clone(), worst, Some(uc.tolerance), Relation::AtMost));
            }
            Ok(out)
        }));
    }
}

fn commutation_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let cc = config.commutation.clone();
    for &field in &cc.fields {
        let cc = cc.clone();
        let params = Params { half_width: Some(cc.half_width), ..Params::default() };
        let p2 = params.clone();
        cells.push(Cell::new("commutation", field.label(), params, move || {
            let mut out = Vec::new();
            let mut worst_by_n = Vec::new();
            for &n in &cc.n {
                let grid = Grid::new(3, n, cc.half_width)?;
                let u = checks::gaussian_field(&grid, field);
                let rs = checks::discrete_commutation_residual(&grid, &u)?;
                let p = Params { n: Some(n), ..p2.clone() };
                for r in &rs {
                    out.push(CheckRecord::new("commutation", format!("{} n={n} {} vs {}", field.label(), r.lhs_label, r.rhs_label), p.clone(), r.residual, None, Relation::AtMost));
                }
                worst_by_n.push(rs.iter().map(|r| r.residual).fold(0.0, f64::max));
            }
            if let (Some(first), Some(last)) = (worst_by_n.first(), worst_by_n.last()) {
                let decreasing = worst_by_n.windows(2).all(|w| w[1] <= w[0]);
                let ratio = if *first > 0.0 { last / first } else { 0.0 };
                out.push(CheckRecord::new(
                    "commutation_trend",
                    format!("{} worst(n_max)/worst(n_min), monotone={decreasing}", field.label()),
                    p2.clone(),
                    ratio,
                    None,
                    Relation::AtMost,
                ));
            }
            Ok(out)
        }));
    }
}

fn norm_growth_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let gc = config.norm_growth.clone();
    for &op in &gc.operators {
        let gc = gc.clone();
        let params = Params { half_width: Some(gc.half_width), ..Params::default() };
        let p2 = params.clone();
        cells.push(Cell::new("norm_growth", op.name(), params, move || {
            let rows = checks::norm_growth_study(op, &gc.n, gc.half_width)?;
            let mut out: Vec<CheckRecord> = rows
                .iter()
                .map(|r| {
                    let p = Params { n: Some(r.n), ..p2.clone() };
                    CheckRecord::new("norm_growth_table", format!("{} n={} closed form {:.10}", op.name(), r.n, r.analytic), p, r.norm, None, Relation::AtMost)
                })
                .collect();
            let closed = rows.iter().map(|r| (r.norm - r.analytic).abs() / r.analytic).fold(0.0, f64::max);
            out.push(CheckRecord::new("norm_growth_closed_form", format!("{} max relative deviation", op.name()), p2.clone(), closed, Some(gc.tolerance), Relation::AtMost));
            let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].norm / w[0].norm).collect();
            if op.is_unbounded() {
                let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                out.push(CheckRecord::new("norm_growth_ratio", format!("{} min ‖A_next‖/‖A‖", op.name()), p2.clone(), min, Some(gc.min_growth), Relation::AtLeast));
            } else {
                let spread = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
                out.push(CheckRecord::new("norm_growth_flat", format!("{} max |‖A_next‖/‖A‖ − 1|", op.name()), p2.clone(), spread, Some(gc.tolerance), Relation::AtMost));
            }
            Ok(out)
        }));
    }
}

fn semigroup_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let sc = config.semigroup.clone();
    let (t, r, s) = sc.times;
    let params = Params::grid(sc.case.n, sc.case.half_width()).with_kappa(sc.kappa.0).with_times(t, s);
    let p2 = params.clone();
    let label = format!("{} n={} (t,r,s)=({t},{r},{s})", sc.case.generator, sc.case.n);
    cells.push(Cell::new("semigroup_violation", label.clone(), params, move || {
        let horizon = [t, r, s].iter().fold(logrep::DEFAULT_HORIZON, |h, v| h.max(v.abs()));
        let family = EvolutionFamily::new(sc.case.generator.build(sc.case.n, sc.case.half_width())?, horizon)?;
        let rep = logrep::semigroup_violation(&family, sc.kappa.0, sc.times)?;
        Ok(vec![
            CheckRecord::new("semigroup_violation", format!("{label} exp[a] defect"), p2.clone(), rep.violation_residual, Some(sc.threshold), Relation::AtLeast),
            CheckRecord::new("semigroup_control", format!("{label} U defect"), p2.clone(), rep.control.residual, Some(sc.control_tolerance), Relation::AtMost),
        ])
    }));
}

fn oracle_cells(config: &SuiteConfig, cells: &mut Vec<Cell>) {
    let oc = config.oracle.clone();
    let seed = config.seed;
    cells.push(Cell::new("logm_oracle", format!("{} random matrices", oc.count), Params::default(), move || {
        Ok(checks::logm_oracle(oc.count, oc.max_dim, seed)?
            .into_iter()
            .enumerate()
            .map(|(k, (n, r))| {
                let p = Params { n: Some(n), ..Params::default() };
                CheckRecord::new("logm_oracle", format!("matrix {k} dim {n}"), p, r, Some(oc.tolerance), Relation::AtMost)
            })
            .collect())
    }));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SuiteConfig {
        let mut c = SuiteConfig::default_suite();
        c.resolvent.n = vec![16];
        c.resolvent.lambdas.truncate(3);
        c.logrep.cases.truncate(3);
        c.logrep.cases[2].n = 6;
        c.logrep.kappas.truncate(1);
        c.logrep.taus.truncate(1);
        c.boundedness.n = vec![4, 8];
        c.product.n = vec![8];
        c.sum.n = 8;
        c.rotation.n = 16;
        c.rotation.thetas.truncate(1);
        c.rotation.group_pairs.truncate(1);
        c.unitarity.n = 8;
        c.commutation.n = vec![8, 12];
        c.oracle.count = 3;
        c.oracle.max_dim = 4;
        c
    }

    #[test]
    fn every_check_produces_records() {
        let config = small_config();
        let report = run_suite(&config, 1).unwrap();
        for prefix in [
            "symbolic_", "resolvent", "logrep_reconstruction", "logrep_series", "boundedness_", "product_perturbation",
            "product_negative_control", "sum_decomposition", "rotation_compare", "rotation_group_law", "unitarity",
            "commutation", "norm_growth_", "semigroup_violation", "semigroup_control", "logm_oracle",
        ] {
            assert!(report.records.iter().any(|r| r.check.starts_with(prefix)), "no {prefix} record");
        }
        for r in &report.records {
            assert!(r.error.is_none(), "{r:?}");
        }
        assert_eq!(report.summary.total, report.records.len());
    }

    #[test]
    fn order_is_independent_of_workers() {
        let mut config = small_config();
        config.checks = vec![CheckKind::Symbolic, CheckKind::NormGrowth, CheckKind::Oracle];
        let a = run_suite(&config, 1).unwrap().records;
        let b = run_suite(&config, 3).unwrap().records;
        let key = |r: &CheckRecord| (r.check.clone(), r.case.clone(), r.residual);
        assert_eq!(a.iter().map(key).collect::<Vec<_>>(), b.iter().map(key).collect::<Vec<_>>());
    }

    #[test]
    fn under_resolved_rotation_fails_without_error() {
        let mut config = SuiteConfig::default_suite();
        config.checks = vec![CheckKind::Rotation];
        config.rotation.n = 4;
        config.rotation.group_pairs.clear();
        let report = run_suite(&config, 1).unwrap();
        assert!(!report.summary.all_passed());
        let anisotropic: Vec<_> = report.records.iter().filter(|r| r.case.starts_with("x·")).collect();
        assert!(anisotropic.iter().all(|r| !r.pass && r.error.is_none()));
    }
}
