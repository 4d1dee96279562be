//! JSON inputs: profiles, envelopes, translation sets and the analysis
//! config that drives [`crate::run`].

use std::path::PathBuf;

use frameseq_core::spectrum::EnvelopeKind;
use frameseq_core::{Budgets, FourierProfile, Piece, RateFunction, Shape, TimeEnvelope, TranslationSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

pub const SCHEMA: &str = "frameseq/1";

/// Half width of the windows behind the `"Z"`, `"N"` and `"mZ"` shorthands.
pub const SHORTHAND_EXTENT: i64 = 10_000;

pub const MAX_GRID: usize = 1 << 22;
pub const MAX_REFINEMENTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub pieces: Vec<PieceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub shape: ShapeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Const(f64),
    Affine { slope: f64, intercept: f64 },
    Sampled(Vec<f64>),
}

impl ProfileSpec {
    pub fn build(&self) -> Result<FourierProfile, Failure> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let shape = match &p.shape {
                    ShapeSpec::Const(c) => Shape::Constant(*c),
                    ShapeSpec::Affine { slope, intercept } => Shape::Affine { slope: *slope, intercept: *intercept },
                    ShapeSpec::Sampled(v) => Shape::Sampled(v.clone()),
                };
                Piece::new(p.lo, p.hi, shape)
            })
            .collect();
        Ok(FourierProfile::new(pieces)?)
    }

    pub fn from_profile(profile: &FourierProfile) -> Self {
        let pieces = profile
            .pieces()
            .iter()
            .map(|p| PieceSpec {
                lo: p.lo,
                hi: p.hi,
                shape: match &p.shape {
                    Shape::Constant(c) => ShapeSpec::Const(*c),
                    Shape::Affine { slope, intercept } => ShapeSpec::Affine { slope: *slope, intercept: *intercept },
                    Shape::Sampled(v) => ShapeSpec::Sampled(v.clone()),
                },
            })
            .collect();
        Self { pieces }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeSpec {
    /// `min(1, x^{-a})`.
    Power {
        a: f64,
    },
    /// `exp(-delta h(x))`.
    Exponential {
        delta: f64,
        rate: RateSpec,
    },
    Tabulated {
        x: Vec<f64>,
        f: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RateSpec {
    Power { exponent: f64 },
    LinearOverLog,
}

impl EnvelopeSpec {
    pub fn build(&self) -> Result<TimeEnvelope, Failure> {
        Ok(match self {
            EnvelopeSpec::Power { a } => TimeEnvelope::power(*a)?,
            EnvelopeSpec::Exponential { delta, rate } => {
                let rate = match rate {
                    RateSpec::Power { exponent } => RateFunction::Power { exponent: *exponent },
                    RateSpec::LinearOverLog => RateFunction::LinearOverLog,
                };
                TimeEnvelope::exponential(*delta, rate)?
            }
            EnvelopeSpec::Tabulated { x, f } => TimeEnvelope::tabulated(x.clone(), f.clone())?,
        })
    }

    pub fn from_envelope(env: &TimeEnvelope) -> Self {
        match env.kind() {
            EnvelopeKind::Power { exponent } => EnvelopeSpec::Power { a: *exponent },
            EnvelopeKind::Exponential { delta, rate } => EnvelopeSpec::Exponential {
                delta: *delta,
                rate: match rate {
                    RateFunction::Power { exponent } => RateSpec::Power { exponent: *exponent },
                    RateFunction::LinearOverLog => RateSpec::LinearOverLog,
                },
            },
            EnvelopeKind::Tabulated { xs, fs } => EnvelopeSpec::Tabulated { x: xs.clone(), f: fs.clone() },
        }
    }
}

/// `"Z"`, `"N"`, `"3Z"` or a tagged generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Shorthand(String),
    Generator(Generator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Integers {
        n: i64,
    },
    Subgroup {
        m: i64,
        n: i64,
    },
    Naturals {
        n: i64,
    },
    Squares {
        n_max: i64,
    },
    Powers {
        exponent: u32,
        n_max: i64,
    },
    PowersOfTwo {
        n_max: u32,
    },
    #[serde(rename = "dyadic5")]
    Dyadic {
        alpha: f64,
        n_max: u32,
    },
    Explicit(Vec<f64>),
}

impl LambdaSpec {
    pub fn build(&self) -> Result<TranslationSet, Failure> {
        Ok(match self {
            LambdaSpec::Shorthand(s) => {
                let s = s.trim();
                match s {
                    "Z" => TranslationSet::Integers { n: SHORTHAND_EXTENT },
                    "N" => TranslationSet::Naturals { n: SHORTHAND_EXTENT },
                    _ => {
                        let m = s
                            .strip_suffix('Z')
                            .and_then(|m| m.parse::<i64>().ok())
                            .filter(|m| *m > 0)
                            .ok_or_else(|| Failure::Usage(format!("unknown translation set shorthand {s:?}")))?;
                        TranslationSet::Subgroup { m, n: SHORTHAND_EXTENT * m }
                    }
                }
            }
            LambdaSpec::Generator(g) => match g.clone() {
                Generator::Integers { n } => TranslationSet::Integers { n },
                Generator::Subgroup { m, n } => TranslationSet::Subgroup { m, n },
                Generator::Naturals { n } => TranslationSet::Naturals { n },
                Generator::Squares { n_max } => TranslationSet::squares(n_max),
                Generator::Powers { exponent, n_max } => TranslationSet::Powers { exponent, n_max },
                Generator::PowersOfTwo { n_max } => TranslationSet::PowersOfTwo { n_max },
                Generator::Dyadic { alpha, n_max } => TranslationSet::Dyadic { alpha, n_max },
                Generator::Explicit(v) => TranslationSet::Explicit(v),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSpec {
    pub grid_size: usize,
    pub refinements: usize,
    pub window: usize,
    pub kernel_tol: f64,
    pub zero_rel: f64,
    pub orthonormal_tol: f64,
    pub tol: f64,
}

impl Default for BudgetSpec {
    fn default() -> Self {
        let b = Budgets::default();
        Self {
            grid_size: b.grid_size,
            refinements: b.refinements,
            window: b.gram_window,
            kernel_tol: b.kernel_tol,
            zero_rel: b.zero_rel,
            orthonormal_tol: b.orthonormal_tol,
            tol: b.tol,
        }
    }
}

impl BudgetSpec {
    pub fn budgets(&self, seed: u64) -> Budgets {
        Budgets {
            grid_size: self.grid_size,
            refinements: self.refinements,
            kernel_tol: self.kernel_tol,
            zero_rel: self.zero_rel,
            orthonormal_tol: self.orthonormal_tol,
            gram_window: self.window,
            tol: self.tol,
            seed,
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.grid_size < 16 || self.grid_size > MAX_GRID {
            return Err(Failure::Usage(format!("grid_size must lie in 16..={MAX_GRID}")));
        }
        if self.refinements > MAX_REFINEMENTS || (self.grid_size << self.refinements) > MAX_GRID {
            return Err(Failure::Usage(format!(
                "refinements must be at most {MAX_REFINEMENTS} and keep the finest grid within {MAX_GRID}"
            )));
        }
        if self.window == 0 || self.window > frameseq_core::gram::MAX_DIM {
            return Err(Failure::Usage(format!("window must lie in 1..={}", frameseq_core::gram::MAX_DIM)));
        }
        for (name, v) in [
            ("kernel_tol", self.kernel_tol),
            ("zero_rel", self.zero_rel),
            ("orthonormal_tol", self.orthonormal_tol),
            ("tol", self.tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Failure::Usage(format!("{name} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Periodize,
    Bounds,
    Classify,
    Density,
    Hausdorff,
    Gallery,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityParams {
    /// Upper end of the sufficiency integral and of the `D_Λ` table.
    pub x_max: f64,
    /// Increasing windows for the necessity trend.
    pub windows: Vec<f64>,
    /// Table rows per octave.
    pub per_octave: usize,
    /// Range of the regularity constant scan.
    pub regularity_range: (f64, f64),
    /// Largest shift in the sparsity diagnostic.
    pub sparsity_shifts: i64,
}

impl Default for DensityParams {
    fn default() -> Self {
        Self {
            x_max: 4000.0,
            windows: vec![1000.0, 2000.0, 4000.0],
            per_octave: 4,
            regularity_range: (1.0, 1e4),
            sparsity_shifts: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HausdorffParams {
    pub alpha: f64,
    /// Absolute levels `ε` of the sublevel sets `{Φ_b < ε}`.
    pub eps: Vec<f64>,
    pub max_depth: u32,
    /// Decay exponent for the fractal evidence record; needs `lambda`.
    pub a: Option<f64>,
}

impl Default for HausdorffParams {
    fn default() -> Self {
        Self { alpha: 0.5, eps: vec![0.125, 0.03125, 0.0078125, 0.001953125], max_depth: 16, a: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", deny_unknown_fields)]
pub enum GallerySpec {
    #[serde(rename = "thm23-1")]
    CoarseSpacing { a: f64, b: f64 },
    #[serde(rename = "thm23-3")]
    FineSpacing { a: f64, b: f64 },
    #[serde(rename = "sec5")]
    Dyadic(DyadicParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicParams {
    pub alpha: f64,
    pub n_max: u32,
    #[serde(default = "default_n_lo")]
    pub n_lo: u32,
    #[serde(default = "default_dyadic_grid")]
    pub grid_size: usize,
}

fn default_n_lo() -> u32 {
    4
}

fn default_dyadic_grid() -> usize {
    1 << 16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", deny_unknown_fields)]
pub enum VerifySpec {
    #[serde(rename = "sec5")]
    Dyadic(DyadicParams),
}

fn default_b() -> f64 {
    1.0
}

fn default_schema() -> String {
    SCHEMA.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    #[serde(default)]
    pub envelope: Option<EnvelopeSpec>,
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default)]
    pub lambda: Option<LambdaSpec>,
    #[serde(default)]
    pub budgets: BudgetSpec,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub density: DensityParams,
    #[serde(default)]
    pub hausdorff: HausdorffParams,
    #[serde(default)]
    pub gallery: Option<GallerySpec>,
    #[serde(default)]
    pub verify: Option<VerifySpec>,
    /// Directory for `report.json` and the CSV tables. Not part of the hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl AnalysisConfig {
    pub fn new(analyses: Vec<Analysis>) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            profile: None,
            envelope: None,
            b: 1.0,
            lambda: None,
            budgets: BudgetSpec::default(),
            analyses,
            density: DensityParams::default(),
            hausdorff: HausdorffParams::default(),
            gallery: None,
            verify: None,
            output: None,
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("config: {e}")))
    }

    /// Hex SHA-256 of the canonical JSON form, output path excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.schema != SCHEMA {
            return Err(Failure::Usage(format!("unsupported schema {:?}, expected {SCHEMA:?}", self.schema)));
        }
        if self.analyses.is_empty() {
            return Err(Failure::Usage("no analyses requested".into()));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Failure::Usage("b must be positive and finite".into()));
        }
        self.budgets.validate()?;
        let need = |ok: bool, what: &str, a: Analysis| {
            if ok {
                Ok(())
            } else {
                Err(Failure::Usage(format!("analysis {a:?} needs {what}")))
            }
        };
        for &a in &self.analyses {
            match a {
                Analysis::Periodize | Analysis::Bounds | Analysis::Hausdorff => {
                    need(self.profile.is_some(), "a profile", a)?
                }
                Analysis::Classify => {
                    need(self.profile.is_some(), "a profile", a)?;
                    need(self.lambda.is_some(), "a translation set", a)?;
                }
                Analysis::Density => {
                    need(self.lambda.is_some(), "a translation set", a)?;
                    need(self.envelope.is_some(), "an envelope", a)?;
                    let w = &self.density.windows;
                    if !(self.density.x_max > 16.0) || w.len() < 2 || w.windows(2).any(|p| !(p[0] < p[1])) {
                        return Err(Failure::Usage(
                            "density needs x_max > 16 and at least two increasing windows".into(),
                        ));
                    }
                }
                Analysis::Gallery => need(self.gallery.is_some(), "a gallery case", a)?,
                Analysis::Verify => need(self.verify.is_some(), "a verification target", a)?,
            }
        }
        if self.analyses.contains(&Analysis::Hausdorff) && self.hausdorff.a.is_some() && self.lambda.is_none() {
            return Err(Failure::Usage("fractal evidence needs a translation set".into()));
        }
        Ok(())
    }

    /// Analyses in dependency order, deduplicated.
    pub fn ordered_analyses(&self) -> Vec<Analysis> {
        let mut a = self.analyses.clone();
        a.sort();
        a.dedup();
        a
    }
}

/// Reads inline JSON (leading `{`, `[` or `"`) or a file path.
pub fn read_json_arg<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') || t.starts_with('"') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("{what} {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

/// Translation set argument: a shorthand such as `Z` or `3Z`, inline JSON, or
/// a file.
pub fn read_lambda_arg(arg: &str) -> Result<LambdaSpec, Failure> {
    let t = arg.trim();
    if t == "Z" || t == "N" || (t.ends_with('Z') && t[..t.len() - 1].parse::<i64>().is_ok()) {
        let spec = LambdaSpec::Shorthand(t.to_string());
        spec.build()?;
        return Ok(spec);
    }
    read_json_arg(arg, "translation set")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_json_round_trips() {
        let text = r#"{"pieces":[{"lo":0.0,"hi":0.5,"shape":{"const":1.0}},
            {"lo":0.5,"hi":1.0,"shape":{"affine":{"slope":-2.0,"intercept":2.0}}}]}"#;
        let spec: ProfileSpec = serde_json::from_str(text).unwrap();
        let p = spec.build().unwrap();
        assert_eq!(p.eval(0.75), 0.5);
        assert_eq!(ProfileSpec::from_profile(&p), spec);
    }

    #[test]
    fn lambda_forms() {
        assert_eq!(read_lambda_arg("Z").unwrap().build().unwrap(), TranslationSet::Integers { n: SHORTHAND_EXTENT });
        assert_eq!(
            read_lambda_arg("3Z").unwrap().build().unwrap(),
            TranslationSet::Subgroup { m: 3, n: 3 * SHORTHAND_EXTENT }
        );
        let sq = read_lambda_arg(r#"{"squares":{"n_max":100}}"#).unwrap().build().unwrap();
        assert_eq!(sq, TranslationSet::squares(100));
        let dy = read_lambda_arg(r#"{"dyadic5":{"alpha":0.5,"n_max":14}}"#).unwrap().build().unwrap();
        assert_eq!(dy, TranslationSet::Dyadic { alpha: 0.5, n_max: 14 });
        assert!(read_lambda_arg("0Z").is_err());
        assert!(matches!(LambdaSpec::Shorthand("Q".into()).build(), Err(Failure::Usage(_))));
    }

    #[test]
    fn envelope_forms() {
        let e: EnvelopeSpec = serde_json::from_str(r#"{"power":{"a":0.75}}"#).unwrap();
        assert_eq!(e.build().unwrap().value(16.0), 0.125);
        let x: EnvelopeSpec =
            serde_json::from_str(r#"{"exponential":{"delta":1.0,"rate":"linear_over_log"}}"#).unwrap();
        assert_eq!(EnvelopeSpec::from_envelope(&x.build().unwrap()), x);
        assert!(serde_json::from_str::<EnvelopeSpec>(r#"{"power":{"b":0.75}}"#).is_err());
    }

    #[test]
    fn config_validation_and_hash() {
        let mut c = AnalysisConfig::new(vec![Analysis::Classify]);
        assert!(matches!(c.validate(), Err(Failure::Usage(_))));
        c.profile = Some(ProfileSpec::from_profile(&FourierProfile::indicator(0.0, 1.0).unwrap()));
        c.lambda = Some(LambdaSpec::Shorthand("Z".into()));
        c.validate().unwrap();
        let h = c.hash();
        c.output = Some("elsewhere".into());
        assert_eq!(c.hash(), h);
        c.seed = 1;
        assert_ne!(c.hash(), h);
        c.schema = "frameseq/0".into();
        assert!(c.validate().is_err());
        let mut big = AnalysisConfig::new(vec![Analysis::Periodize]);
        big.profile = c.profile.clone();
        big.budgets.window = 1 << 20;
        assert!(big.validate().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r = AnalysisConfig::from_json(r#"{"analyses":["classify"],"colour":1}"#);
        assert!(matches!(r, Err(Failure::Usage(_))));
        let ok = AnalysisConfig::from_json(r#"{"analyses":["periodize","classify"]}"#).unwrap();
        assert_eq!(ok.schema, SCHEMA);
    }
}
