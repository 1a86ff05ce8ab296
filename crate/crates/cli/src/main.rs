mod report;

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rotgen_core::gridops::DerivativeScheme;
use rotgen_core::logrep::{LogrepError, VIOLATION_THRESHOLD};
use rotgen_core::symop::parse_operator;
use rotgen_core::verify::{
    self, default_lambda_sweep, parse_complex, parse_complex_list, CheckKind, CheckRecord, ComplexSpec, FieldSpec,
    GeneratorCase, GeneratorKind, Params, Relation, SuiteConfig, ROTATION_TOL,
};

use report::{record_line, summary_line, Report, RunManifest, SymResult};

/// Stable exit-code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    Ok = 0,
    Failed = 1,
    Usage = 2,
    Precondition = 3,
}

struct Failure {
    exit: Exit,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { exit: Exit::Usage, message: message.into() }
    }
}

#[derive(Parser)]
#[command(name = "rotgen", version, about = "Verify logarithmic representations of rotation generators")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report here.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write the records as CSV here.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Seed of the randomized fields and matrices [default: 42, or the config's].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for suite cells [default: available parallelism].
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Normal-order an operator expression.
    Sym {
        expr: String,
        /// Exit 0 iff the expression is exactly zero.
        #[arg(long)]
        check_zero: bool,
    },
    /// Resolvent estimate of a discrete derivative.
    Resolvent {
        #[arg(short = 'n', value_delimiter = ',', default_value = "64")]
        n: Vec<usize>,
        #[arg(long, default_value_t = PI)]
        half_width: f64,
        /// Comma-separated λ values with Re λ > 0 [default: the built-in sweep].
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, default_value = "upwind")]
        scheme: DerivativeScheme,
        /// Relative slack on 1/Re λ.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Logarithmic representation, series reconstruction and semigroup violation.
    Logrep {
        #[arg(long = "gen", default_value = "rot2d")]
        generator: GeneratorKind,
        /// Points per axis [default: 64 for 1D, 16 for rot2d, 8 for rot3d].
        #[arg(short = 'n')]
        n: Option<usize>,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        kappa: String,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s: f64,
        /// Cap on the number of series terms.
        #[arg(short = 'N', long = "terms")]
        terms: Option<usize>,
        /// Smallest exp[a] semigroup defect that counts as detected.
        #[arg(long, default_value_t = VIOLATION_THRESHOLD)]
        threshold: f64,
    },
    /// Compare exp(θ(x∂y − y∂x)) f with f∘R_θ on a 2D grid.
    Rotate {
        #[arg(short = 'n', default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 6.0)]
        half_width: f64,
        /// Angles, as numbers or multiples of pi (e.g. pi/6, 2pi/3).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "pi/6,pi/4,pi/2")]
        theta: Vec<String>,
        /// Polynomial prefactors of the Gaussian (e.g. 1, x, x*y, x^2).
        #[arg(long, value_delimiter = ',', default_value = "1,x,xy,x^2")]
        field: Vec<FieldSpec>,
        /// Gaussian width [default: L/7].
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = ROTATION_TOL)]
        tolerance: f64,
    },
    /// Run every check enabled in a JSON config.
    Suite { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exit = match run(cli) {
        Ok(exit) => exit,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.exit
        }
    };
    ExitCode::from(exit as u8)
}

fn run(cli: Cli) -> Result<Exit, Failure> {
    let out = cli.output;
    let jobs = out.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let (report, exit) = match cli.command {
        Command::Sym { expr, check_zero } => sym(&expr, check_zero, out.seed.unwrap_or(42), jobs, out.quiet)?,
        Command::Suite { config } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", config.display())))?;
            let mut suite = SuiteConfig::from_json_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", config.display())))?;
            if let Some(seed) = out.seed {
                suite.seed = seed;
            }
            let json = out.json.clone().or_else(|| suite.output.clone());
            let out = OutputArgs { json, ..out };
            return execute("suite", suite, Some(config), jobs, &out);
        }
        command => {
            let (name, mut suite) = resolve(command)?;
            suite.seed = out.seed.unwrap_or(suite.seed);
            return execute(name, suite, None, jobs, &out);
        }
    };
    write_outputs(&report, &out)?;
    Ok(exit)
}

fn sym(expr: &str, check_zero: bool, seed: u64, jobs: usize, quiet: bool) -> Result<(Report, Exit), Failure> {
    let op = parse_operator(expr).map_err(|e| {
        let caret = format!("{}^", " ".repeat(e.position));
        Failure::usage(format!("{e}\n  {expr}\n  {caret}"))
    })?;
    let canonical = op.to_string();
    if !quiet {
        println!("{canonical}");
    }
    let mut records = Vec::new();
    if check_zero {
        records.push(CheckRecord::new("sym_zero", expr, Params::default(), op.len() as f64, Some(0.0), Relation::AtMost));
    }
    let mut report = Report::new(RunManifest::new("sym", None, None, seed, jobs), records);
    report.sym = Some(SymResult { input: expr.to_string(), canonical, terms: op.len(), is_zero: op.is_zero() });
    let exit = if check_zero && !op.is_zero() { Exit::Failed } else { Exit::Ok };
    Ok((report, exit))
}

/// Expresses a single-purpose subcommand as a suite restricted to its checks.
fn resolve(command: Command) -> Result<(&'static str, SuiteConfig), Failure> {
    let mut suite = SuiteConfig::default_suite();
    let name = match command {
        Command::Resolvent { n, half_width, lambda, scheme, tolerance } => {
            let lambdas = match lambda {
                Some(text) => parse_complex_list(&text).map_err(|e| Failure::usage(format!("--lambda: {e}")))?,
                None => default_lambda_sweep(),
            };
            if let Some(bad) = lambdas.iter().find(|l| l.re <= 0.0) {
                return Err(Failure::usage(format!("--lambda: {}", verify::VerifyError::LambdaNotInRightHalfPlane(*bad))));
            }
            suite.checks = vec![CheckKind::Resolvent];
            suite.resolvent.n = n;
            suite.resolvent.half_width = half_width;
            suite.resolvent.schemes = vec![scheme];
            suite.resolvent.lambdas = lambdas.into_iter().map(ComplexSpec).collect();
            suite.resolvent.tolerance = tolerance;
            "resolvent"
        }
        Command::Logrep { generator, n, half_width, kappa, t, s, terms, threshold } => {
            let kappa = parse_complex(&kappa).map_err(|e| Failure::usage(format!("--kappa: {e}")))?;
            if kappa.norm() == 0.0 {
                return Err(Failure { exit: Exit::Precondition, message: LogrepError::ZeroKappa.to_string() });
            }
            let n = n.unwrap_or(match generator {
                GeneratorKind::Upwind | GeneratorKind::Spectral => 64,
                GeneratorKind::Rot2d => 16,
                GeneratorKind::Rot3d => 8,
            });
            let case = GeneratorCase { generator, n, half_width };
            suite.checks = vec![CheckKind::Logrep, CheckKind::Semigroup];
            suite.logrep.cases = vec![case.clone()];
            suite.logrep.kappas = vec![ComplexSpec(kappa)];
            suite.logrep.taus = vec![t - s];
            suite.logrep.s = s;
            suite.logrep.series_terms = terms;
            suite.semigroup.case = case;
            suite.semigroup.kappa = ComplexSpec(kappa);
            suite.semigroup.times = (t, 0.5 * (t + s), s);
            suite.semigroup.threshold = threshold;
            "logrep"
        }
        Command::Rotate { n, half_width, theta, field, sigma, tolerance } => {
            let thetas = theta.iter().map(|t| parse_angle(t)).collect::<Result<Vec<_>, _>>().map_err(Failure::usage)?;
            suite.checks = vec![CheckKind::Rotation];
            suite.rotation.n = n;
            suite.rotation.half_width = half_width;
            suite.rotation.group_pairs = match thetas.as_slice() {
                [only] => vec![(*only, *only)],
                many => many.windows(2).map(|w| (w[0], w[1])).collect(),
            };
            suite.rotation.thetas = thetas;
            suite.rotation.fields = field.into_iter().map(|f| FieldSpec { sigma, ..f }).collect();
            suite.rotation.tolerance = tolerance;
            "rotate"
        }
        Command::Sym { .. } | Command::Suite { .. } => unreachable!("handled by run"),
    };
    Ok((name, suite))
}

fn execute(name: &str, suite: SuiteConfig, path: Option<PathBuf>, jobs: usize, out: &OutputArgs) -> Result<Exit, Failure> {
    suite.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let result = verify::run_suite(&suite, jobs).map_err(|e| Failure { exit: Exit::Failed, message: e.to_string() })?;
    let report = Report::new(RunManifest::new(name, Some(suite.clone()), path, suite.seed, jobs), result.records);
    if !out.quiet {
        for r in &report.records {
            println!("{}", record_line(r));
        }
        println!("{}", summary_line(&report.summary));
    }
    for r in report.records.iter().filter(|r| r.precondition) {
        eprintln!("precondition violated in {} ({}): {}", r.check, r.case, r.error.as_deref().unwrap_or(""));
    }
    write_outputs(&report, out)?;
    Ok(if report.summary.all_passed() {
        Exit::Ok
    } else if report.records.iter().any(|r| r.precondition) {
        Exit::Precondition
    } else {
        Exit::Failed
    })
}

fn write_outputs(report: &Report, out: &OutputArgs) -> Result<(), Failure> {
    if let Some(path) = &out.json {
        report.write_json(path).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &out.csv {
        report.write_csv(path).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// A number, or `[-][k]pi[/m]`.
fn parse_angle(text: &str) -> Result<f64, String> {
    let bad = || format!("invalid angle '{text}' (expected a number or a form like pi/6, 2pi/3, -pi)");
    let t = text.trim();
    let value = if let Some(pos) = t.find("pi") {
        let (head, tail) = (&t[..pos], &t[pos + 2..]);
        let factor = match head.trim_end_matches('*') {
            "" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| bad())?,
        };
        let divisor = match tail {
            "" => 1.0,
            d => d.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        factor * PI / divisor
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/6").unwrap(), PI / 6.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        for bad in ["", "pie", "pi/0", "x", "pi*2"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
