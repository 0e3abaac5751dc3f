//! Simulation configuration schema and code construction.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use gmd_core::exponent::ExponentModel;
use gmd_core::field::FieldSpec;
use gmd_core::inner::InnerCode;
use gmd_core::outer::OuterCode;
use gmd_core::sim::SimConfig;
use gmd_core::threshold::{minimax_optimize, solve_condition_system, ThresholdSet};

/// Inner code selector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InnerSpec {
    Hamming74,
    Golay24,
    Repetition { n: usize },
    Random { n: usize, k: usize, seed: u64 },
    File { path: PathBuf },
}

impl InnerSpec {
    pub fn build(&self) -> Result<InnerCode> {
        Ok(match self {
            InnerSpec::Hamming74 => InnerCode::hamming74(),
            InnerSpec::Golay24 => InnerCode::golay24(),
            InnerSpec::Repetition { n } => InnerCode::repetition(*n)?,
            InnerSpec::Random { n, k, seed } => InnerCode::random(*n, *k, *seed)?,
            InnerSpec::File { path } => {
                InnerCode::from_file(path).with_context(|| format!("loading {}", path.display()))?
            }
        })
    }

    /// Parse the compact command-line form: hamming74, golay24,
    /// repetition:N, random:N:K:SEED, file:PATH.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split(':');
        let head = parts.next().unwrap_or_default();
        let spec = match head {
            "hamming74" => InnerSpec::Hamming74,
            "golay24" => InnerSpec::Golay24,
            "repetition" => InnerSpec::Repetition {
                n: parts
                    .next()
                    .context("repetition needs a length, e.g. repetition:3")?
                    .parse()?,
            },
            "random" => InnerSpec::Random {
                n: parts.next().context("random needs random:N:K:SEED")?.parse()?,
                k: parts.next().context("random needs random:N:K:SEED")?.parse()?,
                seed: parts.next().context("random needs random:N:K:SEED")?.parse()?,
            },
            "file" => InnerSpec::File {
                path: PathBuf::from(parts.next().context("file needs file:PATH")?),
            },
            other => bail!("unknown inner code '{other}'"),
        };
        Ok(spec)
    }

    pub fn describe(&self) -> String {
        match self {
            InnerSpec::Hamming74 => "hamming74".into(),
            InnerSpec::Golay24 => "golay24".into(),
            InnerSpec::Repetition { n } => format!("repetition:{n}"),
            InnerSpec::Random { n, k, seed } => format!("random:{n}:{k}:{seed}"),
            InnerSpec::File { path } => format!("file:{}", path.display()),
        }
    }
}

/// Outer Reed–Solomon parameters (primitive polynomial comes from the
/// per-degree default unless overridden).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterSpec {
    pub m: u32,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive_poly: Option<u32>,
}

impl OuterSpec {
    pub fn build(&self) -> Result<OuterCode> {
        let field = match self.primitive_poly {
            Some(poly) => FieldSpec::with_polynomial(self.m, poly)?,
            None => FieldSpec::new(self.m)?,
        };
        Ok(OuterCode::new(field, self.n, self.k)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodChoice {
    pub method: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesChoice {
    pub values: Vec<f64>,
}

/// How to obtain the threshold set for a run: solve for them at the
/// channel's exponent (`{"method": "solver"}`) or give explicit values in
/// nats (`{"values": [...]}`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdChoice {
    Method(MethodChoice),
    Values(ValuesChoice),
}

fn default_trials() -> u64 {
    10_000
}

fn default_s() -> f64 {
    gmd_core::exponent::DEFAULT_S
}

fn default_true() -> bool {
    true
}

/// On-disk simulation configuration; command-line flags override fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimFileConfig {
    pub inner: InnerSpec,
    pub outer: OuterSpec,
    pub l: u32,
    pub z: usize,
    pub e: f64,
    #[serde(default = "default_s")]
    pub s: f64,
    pub thresholds: ThresholdChoice,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Real error/erasure decoding for l = 1; the radius model otherwise.
    #[serde(default = "default_true")]
    pub real_decoder: bool,
}

impl SimFileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: SimFileConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    /// Resolve codes and thresholds into a runnable configuration.
    pub fn build(&self) -> Result<SimConfig> {
        let inner = self.inner.build()?;
        let outer = self.outer.build()?;
        let thresholds = self.resolve_thresholds(&inner)?;
        let cfg = SimConfig {
            inner,
            outer,
            l: self.l,
            e: self.e,
            thresholds,
            real_decoder: self.real_decoder && self.l == 1,
            trials: self.trials,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_thresholds(&self, inner: &InnerCode) -> Result<ThresholdSet> {
        match &self.thresholds {
            ThresholdChoice::Values(v) => Ok(ThresholdSet::manual(v.values.clone())?),
            ThresholdChoice::Method(m) => {
                let model = ExponentModel::for_bsc(self.e, inner.n(), inner.k(), self.s)?;
                let set = match m.method.as_str() {
                    "solver" => solve_condition_system(self.l, self.z, model.e0, model.s)?,
                    "minimax" => minimax_optimize(
                        self.l,
                        self.z,
                        model.e0,
                        model.s,
                        inner.n(),
                        self.outer.n,
                    )?,
                    other => bail!("unknown threshold method '{other}' (solver | minimax)"),
                };
                Ok(set)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_spec_parse_forms() {
        assert!(matches!(InnerSpec::parse("hamming74"), Ok(InnerSpec::Hamming74)));
        assert!(matches!(InnerSpec::parse("golay24"), Ok(InnerSpec::Golay24)));
        assert!(matches!(
            InnerSpec::parse("repetition:5"),
            Ok(InnerSpec::Repetition { n: 5 })
        ));
        assert!(matches!(
            InnerSpec::parse("random:10:4:3"),
            Ok(InnerSpec::Random { n: 10, k: 4, seed: 3 })
        ));
        assert!(InnerSpec::parse("mystery").is_err());
        assert!(InnerSpec::parse("repetition").is_err());
    }

    #[test]
    fn inner_spec_from_file() {
        let dir = std::env::temp_dir().join("gmd-inner-spec-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rep3.txt");
        std::fs::write(&path, "3 1\n111\n").unwrap();
        let spec = InnerSpec::parse(&format!("file:{}", path.display())).unwrap();
        let code = spec.build().unwrap();
        assert_eq!((code.n(), code.k()), (3, 1));
    }

    #[test]
    fn threshold_choice_shapes() {
        let m: ThresholdChoice = serde_json::from_str(r#"{"method": "solver"}"#).unwrap();
        assert!(matches!(m, ThresholdChoice::Method(_)));
        let v: ThresholdChoice = serde_json::from_str(r#"{"values": [0.1, 0.2]}"#).unwrap();
        assert!(matches!(v, ThresholdChoice::Values(_)));
        assert!(serde_json::from_str::<ThresholdChoice>(r#"{"method": "solver", "x": 1}"#).is_err());
    }
}
