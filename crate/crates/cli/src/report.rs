//! Report files and the human summary.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rotgen_core::verify::{summarize, CheckRecord, Relation, SuiteConfig, Summary};
use serde::Serialize;

/// Provenance embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Settings the run actually used, after flags were applied.
    pub config: Option<SuiteConfig>,
    pub version: &'static str,
    pub timestamp: String,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub jobs: usize,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: Option<SuiteConfig>, config_path: Option<PathBuf>, seed: u64, jobs: usize) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339(),
            config_path,
            seed,
            jobs,
        }
    }
}

/// Canonical form produced by `sym`.
#[derive(Debug, Clone, Serialize)]
pub struct SymResult {
    pub input: String,
    pub canonical: String,
    pub terms: usize,
    pub is_zero: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sym: Option<SymResult>,
}

impl Report {
    pub fn new(manifest: RunManifest, records: Vec<CheckRecord>) -> Self {
        Report { manifest, summary: summarize(&records), records, sym: None }
    }

    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        let mut f = File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        writeln!(f)
    }

    /// One row per record, preceded by a `# manifest:` comment line.
    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut f = File::create(path)?;
        writeln!(f, "# manifest: {}", serde_json::to_string(&self.manifest)?)?;
        let mut w = csv::Writer::from_writer(f);
        for r in &self.records {
            w.serialize(CsvRow::from(r))?;
        }
        w.flush()
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    case: &'a str,
    n: Option<usize>,
    #[serde(rename = "L")]
    half_width: Option<f64>,
    kappa_re: Option<f64>,
    kappa_im: Option<f64>,
    t: Option<f64>,
    s: Option<f64>,
    residual: Option<f64>,
    tolerance: Option<f64>,
    relation: &'static str,
    pass: bool,
    wall_ms: f64,
    error: &'a str,
}

impl<'a> From<&'a CheckRecord> for CsvRow<'a> {
    fn from(r: &'a CheckRecord) -> Self {
        CsvRow {
            check: &r.check,
            case: &r.case,
            n: r.params.n,
            half_width: r.params.half_width,
            kappa_re: r.params.kappa_re,
            kappa_im: r.params.kappa_im,
            t: r.params.t,
            s: r.params.s,
            residual: r.residual,
            tolerance: r.tolerance,
            relation: match r.relation {
                Relation::AtMost => "at_most",
                Relation::AtLeast => "at_least",
            },
            pass: r.pass,
            wall_ms: r.wall_ms,
            error: r.error.as_deref().unwrap_or(""),
        }
    }
}

/// Human line for one record. Numbers use the same shortest round-trip
/// form as the JSON.
pub fn record_line(r: &CheckRecord) -> String {
    let status = match (r.pass, r.tolerance) {
        (false, _) => "FAIL",
        (true, None) => "INFO",
        (true, Some(_)) => "PASS",
    };
    let detail = match (&r.error, r.residual, r.tolerance) {
        (Some(e), _, _) => format!("error: {e}"),
        (None, Some(res), Some(tol)) => format!("{res:e} {} {tol:e}", r.relation.symbol()),
        (None, Some(res), None) => format!("{res:e}"),
        (None, None, _) => "residual not computed".to_string(),
    };
    format!("{status} {:<30} {:<44} {detail}", r.check, r.case)
}

pub fn summary_line(s: &Summary) -> String {
    format!("{}/{} passed, {} failed, {} reported only", s.passed, s.total, s.failed, s.reported_only)
}
