//! JSON suite configuration.
//!
//! Only `checks` is required; every section and field falls back to the
//! defaults of [`SuiteConfig::default_suite`]. Unknown keys anywhere are
//! rejected, all of them listed with their full paths. Complex numbers are
//! written as JSON numbers or strings (`"2"`, `"1+10i"`).

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::checks::{FieldSpec, NormOperator};
use super::{parse_complex, GeneratorKind};
use crate::gridops::{DerivativeScheme, DENSE_CAP};
use crate::linalg::C64;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("configuration is empty")]
    Empty,
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("invalid configuration values: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// A complex number accepted as a JSON number or a [`parse_complex`] string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSpec(pub C64);

impl fmt::Display for ComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let C64 { re, im } = self.0;
        match (re, im) {
            (re, im) if im == 0.0 => write!(f, "{re}"),
            (re, im) if re == 0.0 => write!(f, "{im}i"),
            (re, im) if im < 0.0 => write!(f, "{re}-{}i", -im),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

impl Serialize for ComplexSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ComplexSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) if v.is_finite() => Ok(ComplexSpec(C64::new(v, 0.0))),
            Raw::Number(v) => Err(serde::de::Error::custom(format!("non-finite number {v}"))),
            Raw::Text(t) => parse_complex(&t).map(ComplexSpec).map_err(serde::de::Error::custom),
        }
    }
}

fn cs(re: f64, im: f64) -> ComplexSpec {
    ComplexSpec(C64::new(re, im))
}

/// `{0.5, 1, 2, 5} × {0, ±5i, ±10i}`.
pub fn default_lambda_sweep() -> Vec<C64> {
    let mut out = Vec::new();
    for re in [0.5, 1.0, 2.0, 5.0] {
        for im in [0.0, 5.0, -5.0, 10.0, -10.0] {
            out.push(C64::new(re, im));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Symbolic,
    Resolvent,
    Logrep,
    Boundedness,
    Product,
    Sum,
    Rotation,
    Unitarity,
    Commutation,
    NormGrowth,
    Semigroup,
    Oracle,
}

impl CheckKind {
    pub const ALL: [CheckKind; 12] = [
        CheckKind::Symbolic,
        CheckKind::Resolvent,
        CheckKind::Logrep,
        CheckKind::Boundedness,
        CheckKind::Product,
        CheckKind::Sum,
        CheckKind::Rotation,
        CheckKind::Unitarity,
        CheckKind::Commutation,
        CheckKind::NormGrowth,
        CheckKind::Semigroup,
        CheckKind::Oracle,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolventConfig {
    pub n: Vec<usize>,
    pub half_width: f64,
    pub schemes: Vec<DerivativeScheme>,
    pub lambdas: Vec<ComplexSpec>,
    /// Relative slack on `1/Re λ`.
    pub tolerance: f64,
}

impl Default for ResolventConfig {
    fn default() -> Self {
        ResolventConfig {
            n: vec![32, 64, 128],
            half_width: PI,
            schemes: vec![DerivativeScheme::Upwind, DerivativeScheme::Spectral],
            lambdas: default_lambda_sweep().into_iter().map(ComplexSpec).collect(),
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCase {
    pub generator: GeneratorKind,
    pub n: usize,
    #[serde(default)]
    pub half_width: Option<f64>,
}

impl GeneratorCase {
    pub fn half_width(&self) -> f64 {
        self.half_width.unwrap_or_else(|| self.generator.default_half_width())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogrepConfig {
    pub cases: Vec<GeneratorCase>,
    pub kappas: Vec<ComplexSpec>,
    /// Values of `t − s`.
    pub taus: Vec<f64>,
    pub s: f64,
    pub tolerance: f64,
    pub series_tolerance: f64,
    /// Cap on the series length (default 500).
    pub series_terms: Option<usize>,
}

impl Default for LogrepConfig {
    fn default() -> Self {
        let case = |generator, n| GeneratorCase { generator, n, half_width: None };
        LogrepConfig {
            cases: vec![
                case(GeneratorKind::Upwind, 64),
                case(GeneratorKind::Spectral, 64),
                case(GeneratorKind::Rot2d, 16),
                case(GeneratorKind::Rot3d, 8),
            ],
            kappas: vec![cs(2.0, 0.0), cs(3.0, 0.0), cs(1.0, 1.0)],
            taus: vec![0.1, 0.5, 1.0],
            s: 0.0,
            tolerance: 1e-8,
            series_tolerance: 1e-10,
            series_terms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundednessConfig {
    pub n: Vec<usize>,
    pub half_width: f64,
    pub kappa: ComplexSpec,
    pub t: f64,
    pub s: f64,
    /// Largest admissible `max ‖a‖ / min ‖a‖`.
    pub max_log_ratio: f64,
    /// Smallest admissible `‖A_{2n}‖ / ‖A_n‖`.
    pub min_growth: f64,
}

impl Default for BoundednessConfig {
    fn default() -> Self {
        BoundednessConfig { n: vec![8, 16, 32], half_width: 6.0, kappa: cs(2.0, 0.0), t: 0.3, s: 0.0, max_log_ratio: 2.0, min_growth: 1.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProductConfig {
    pub n: Vec<usize>,
    pub half_width: f64,
    pub kappa: ComplexSpec,
    pub t: f64,
    pub s: f64,
    pub tolerance: f64,
}

impl Default for ProductConfig {
    fn default() -> Self {
        ProductConfig { n: vec![16, 32], half_width: 6.0, kappa: cs(2.0, 0.0), t: 0.5, s: 0.0, tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SumConfig {
    pub n: usize,
    pub half_width: f64,
    pub kappa: ComplexSpec,
    pub t: f64,
    pub s: f64,
    pub tolerance: f64,
}

impl Default for SumConfig {
    fn default() -> Self {
        SumConfig { n: 16, half_width: 6.0, kappa: cs(2.0, 0.0), t: 0.2, s: 0.0, tolerance: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RotationConfig {
    pub n: usize,
    pub half_width: f64,
    pub thetas: Vec<f64>,
    pub fields: Vec<FieldSpec>,
    pub tolerance: f64,
    /// `(θ₁, θ₂)` pairs for the one-parameter group law.
    pub group_pairs: Vec<(f64, f64)>,
    pub group_tolerance: f64,
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig {
            n: 32,
            half_width: 6.0,
            thetas: vec![PI / 6.0, PI / 4.0, PI / 2.0],
            fields: vec![
                FieldSpec::RADIAL,
                FieldSpec::monomial(1, 0, 0),
                FieldSpec::monomial(1, 1, 0),
                FieldSpec::monomial(2, 0, 0),
            ],
            tolerance: 1e-6,
            group_pairs: vec![(PI / 6.0, PI / 4.0), (0.3, -0.7)],
            group_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnitarityConfig {
    /// Points per axis of both the 1D `i·x` and the 2D rotation grid.
    pub n: usize,
    pub half_width: f64,
    pub thetas: Vec<f64>,
    pub tolerance: f64,
}

impl Default for UnitarityConfig {
    fn default() -> Self {
        UnitarityConfig { n: 16, half_width: 6.0, thetas: vec![0.0, PI / 6.0, PI / 2.0, PI, 2.5], tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CommutationConfig {
    pub n: Vec<usize>,
    pub half_width: f64,
    pub fields: Vec<FieldSpec>,
}

impl Default for CommutationConfig {
    fn default() -> Self {
        let with_sigma = |x| FieldSpec { x, y: 0, z: 0, sigma: Some(1.2) };
        CommutationConfig { n: vec![16, 24, 32], half_width: 8.0, fields: vec![with_sigma(0), with_sigma(1)] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormGrowthConfig {
    pub n: Vec<usize>,
    pub half_width: f64,
    pub operators: Vec<NormOperator>,
    /// Smallest admissible `‖D_{2n}‖ / ‖D_n‖` for the derivatives.
    pub min_growth: f64,
    /// Relative tolerance of each norm against its closed form.
    pub tolerance: f64,
}

impl Default for NormGrowthConfig {
    fn default() -> Self {
        NormGrowthConfig { n: vec![16, 32, 64], half_width: PI, operators: NormOperator::ALL.to_vec(), min_growth: 1.8, tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SemigroupConfig {
    pub case: GeneratorCase,
    pub kappa: ComplexSpec,
    /// `(t, r, s)`.
    pub times: (f64, f64, f64),
    /// Smallest violation that counts as detected.
    pub threshold: f64,
    pub control_tolerance: f64,
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        SemigroupConfig {
            case: GeneratorCase { generator: GeneratorKind::Rot2d, n: 8, half_width: None },
            kappa: cs(2.0, 0.0),
            times: (0.4, 0.2, 0.0),
            threshold: 1e-3,
            control_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub count: usize,
    pub max_dim: usize,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { count: 20, max_dim: 16, tolerance: 1e-8 }
    }
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub checks: Vec<CheckKind>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub resolvent: ResolventConfig,
    #[serde(default)]
    pub logrep: LogrepConfig,
    #[serde(default)]
    pub boundedness: BoundednessConfig,
    #[serde(default)]
    pub product: ProductConfig,
    #[serde(default)]
    pub sum: SumConfig,
    #[serde(default)]
    pub rotation: RotationConfig,
    #[serde(default)]
    pub unitarity: UnitarityConfig,
    #[serde(default)]
    pub commutation: CommutationConfig,
    #[serde(default)]
    pub norm_growth: NormGrowthConfig,
    #[serde(default)]
    pub semigroup: SemigroupConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

impl SuiteConfig {
    /// Every check with default parameters.
    pub fn default_suite() -> Self {
        SuiteConfig {
            checks: CheckKind::ALL.to_vec(),
            seed: default_seed(),
            output: None,
            resolvent: ResolventConfig::default(),
            logrep: LogrepConfig::default(),
            boundedness: BoundednessConfig::default(),
            product: ProductConfig::default(),
            sum: SumConfig::default(),
            rotation: RotationConfig::default(),
            unitarity: UnitarityConfig::default(),
            commutation: CommutationConfig::default(),
            norm_growth: NormGrowthConfig::default(),
            semigroup: SemigroupConfig::default(),
            oracle: OracleConfig::default(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        if text.trim().is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut unknown = Vec::new();
        let mut de = serde_json::Deserializer::from_str(text);
        let config: SuiteConfig = serde_ignored::deserialize(&mut de, |path| unknown.push(key_path(&path)))
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
        de.end().map_err(|e| ConfigError::Parse(e.to_string()))?;
        if !unknown.is_empty() {
            unknown.sort();
            return Err(ConfigError::UnknownKeys(unknown));
        }
        config.validate()?;
        Ok(config)
    }

    pub fn check_enabled(&self, kind: CheckKind) -> bool {
        self.checks.contains(&kind)
    }

    /// Collects every out-of-range value with its key path.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut bad = Vec::new();
        let mut need = |ok: bool, key: &str, why: &str| {
            if !ok {
                bad.push(format!("{key}: {why}"));
            }
        };
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let nonzero = |k: &ComplexSpec| k.0 != C64::new(0.0, 0.0);
        let dense = |n: usize, dim: u32| n >= 2 && n.checked_pow(dim).is_some_and(|s| s <= DENSE_CAP);

        need(!self.checks.is_empty(), "checks", "at least one check is required");

        let r = &self.resolvent;
        need(!r.n.is_empty() && r.n.iter().all(|&n| dense(n, 1)), "resolvent.n", "sizes must lie in 2..=4096");
        need(positive(r.half_width), "resolvent.half_width", "must be positive");
        need(!r.schemes.is_empty(), "resolvent.schemes", "must not be empty");
        need(!r.lambdas.is_empty(), "resolvent.lambdas", "must not be empty");
        for (k, l) in r.lambdas.iter().enumerate() {
            need(l.0.re > 0.0, &format!("resolvent.lambdas[{k}]"), "Re λ must be positive");
        }
        need(r.tolerance >= 0.0, "resolvent.tolerance", "must be non-negative");

        let l = &self.logrep;
        for (k, c) in l.cases.iter().enumerate() {
            need(dense(c.n, c.generator.dim() as u32), &format!("logrep.cases[{k}].n"), "grid too small or above the dense cap");
            need(positive(c.half_width()), &format!("logrep.cases[{k}].half_width"), "must be positive");
        }
        for (k, kappa) in l.kappas.iter().enumerate() {
            need(nonzero(kappa), &format!("logrep.kappas[{k}]"), "κ must be non-zero");
        }
        need(l.taus.iter().chain([&l.s]).all(|v| v.is_finite()), "logrep.taus", "must be finite");
        need(l.series_terms.map_or(true, |n| n >= 1), "logrep.series_terms", "must be at least 1");

        let b = &self.boundedness;
        need(b.n.len() >= 2 && b.n.windows(2).all(|w| w[1] == 2 * w[0]), "boundedness.n", "needs at least two successive doublings");
        need(b.n.iter().all(|&n| dense(n, 2)), "boundedness.n", "grid above the dense cap");
        need(positive(b.half_width), "boundedness.half_width", "must be positive");
        need(nonzero(&b.kappa), "boundedness.kappa", "κ must be non-zero");

        let p = &self.product;
        need(!p.n.is_empty() && p.n.iter().all(|&n| dense(n, 2)), "product.n", "grid too small or above the dense cap");
        need(positive(p.half_width), "product.half_width", "must be positive");
        need(nonzero(&p.kappa), "product.kappa", "κ must be non-zero");

        let s = &self.sum;
        need(dense(s.n, 2), "sum.n", "grid too small or above the dense cap");
        need(positive(s.half_width), "sum.half_width", "must be positive");
        need(nonzero(&s.kappa), "sum.kappa", "κ must be non-zero");

        let rot = &self.rotation;
        need(dense(rot.n, 2), "rotation.n", "grid too small or above the dense cap");
        need(positive(rot.half_width), "rotation.half_width", "must be positive");
        need(rot.thetas.iter().all(|t| t.is_finite()), "rotation.thetas", "must be finite");
        need(positive(rot.tolerance), "rotation.tolerance", "must be positive");
        for (k, f) in rot.fields.iter().enumerate() {
            need(f.z == 0, &format!("rotation.fields[{k}].z"), "planar fields only");
            need(f.sigma.map_or(true, positive), &format!("rotation.fields[{k}].sigma"), "must be positive");
        }

        let u = &self.unitarity;
        need(dense(u.n, 2), "unitarity.n", "grid too small or above the dense cap");
        need(positive(u.half_width), "unitarity.half_width", "must be positive");

        let c = &self.commutation;
        need(!c.n.is_empty() && c.n.iter().all(|&n| n >= 2 && n <= 64), "commutation.n", "sizes must lie in 2..=64");
        need(positive(c.half_width), "commutation.half_width", "must be positive");

        let g = &self.norm_growth;
        need(g.n.windows(2).all(|w| w[1] > w[0]), "norm_growth.n", "sizes must be strictly ascending");
        need(g.n.iter().all(|&n| dense(n, 1)), "norm_growth.n", "sizes must lie in 2..=4096");
        need(positive(g.half_width), "norm_growth.half_width", "must be positive");

        let sg = &self.semigroup;
        need(dense(sg.case.n, sg.case.generator.dim() as u32), "semigroup.case.n", "grid too small or above the dense cap");
        need(nonzero(&sg.kappa), "semigroup.kappa", "κ must be non-zero");

        let o = &self.oracle;
        need((2..=64).contains(&o.max_dim), "oracle.max_dim", "must lie in 2..=64");
        need(o.count <= 1000, "oracle.count", "at most 1000");

        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(bad))
        }
    }
}

/// `a.b[0].c` rendering of an ignored-key path.
fn key_path(path: &serde_ignored::Path<'_>) -> String {
    use serde_ignored::Path;
    match path {
        Path::Root => String::new(),
        Path::Seq { parent, index } => format!("{}[{index}]", key_path(parent)),
        Path::Map { parent, key } => match key_path(parent) {
            p if p.is_empty() => key.clone(),
            p => format!("{p}.{key}"),
        },
        Path::Some { parent } | Path::NewtypeStruct { parent } | Path::NewtypeVariant { parent } => key_path(parent),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = SuiteConfig::default_suite();
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(SuiteConfig::from_json_str(&text).unwrap(), c);
        assert_eq!(c.resolvent.lambdas.len(), 20);
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let c = SuiteConfig::from_json_str(r#"{"checks": ["symbolic"], "rotation": {"n": 4}}"#).unwrap();
        assert_eq!(c.rotation.n, 4);
        assert_eq!(c.rotation.thetas.len(), 3);
        assert!(c.check_enabled(CheckKind::Symbolic) && !c.check_enabled(CheckKind::Logrep));
    }

    #[test]
    fn empty_and_malformed() {
        assert_eq!(SuiteConfig::from_json_str("  \n"), Err(ConfigError::Empty));
        assert!(matches!(SuiteConfig::from_json_str("{}"), Err(ConfigError::Parse(m)) if m.contains("checks")));
        assert!(matches!(SuiteConfig::from_json_str(r#"{"checks": []}"#), Err(ConfigError::Invalid(_))));
        assert!(matches!(SuiteConfig::from_json_str(r#"{"checks": ["nope"]}"#), Err(ConfigError::Parse(_))));
        assert!(matches!(SuiteConfig::from_json_str(r#"{"checks": ["sum"]} x"#), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn unknown_keys_are_listed() {
        let text = r#"{"checks": ["sum"], "bogus": 1, "sum": {"n": 8, "extra": true}, "rotation": {"fields": [{"x": 1, "w": 2}]}}"#;
        match SuiteConfig::from_json_str(text) {
            Err(ConfigError::UnknownKeys(keys)) => {
                assert_eq!(keys, vec!["bogus", "rotation.fields[0].w", "sum.extra"]);
            }
            other => panic!("{other:?}"),
        }
        match SuiteConfig::from_json_str(r#"{"checks": ["sum"], "bogus": 1}"#) {
            Err(ConfigError::UnknownKeys(keys)) => assert_eq!(keys, vec!["bogus"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_values_are_listed() {
        let text = r#"{"checks": ["resolvent"], "resolvent": {"lambdas": [1, "-1", "2+3i"]}, "sum": {"kappa": 0}}"#;
        match SuiteConfig::from_json_str(text) {
            Err(ConfigError::Invalid(msgs)) => {
                assert!(msgs.iter().any(|m| m.starts_with("resolvent.lambdas[1]")), "{msgs:?}");
                assert!(msgs.iter().any(|m| m.starts_with("sum.kappa")), "{msgs:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complex_spec_text() {
        assert_eq!(cs(1.0, -10.0).to_string(), "1-10i");
        assert_eq!(cs(0.0, 5.0).to_string(), "5i");
        assert_eq!(cs(2.0, 0.0).to_string(), "2");
        for c in [cs(1.0, -10.0), cs(0.0, 5.0), cs(2.5, 1e-3)] {
            assert_eq!(parse_complex(&c.to_string()).unwrap(), c.0);
        }
    }
}
