use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::exponent_calculus::{DerivativeOrder, Exponent, MixedNormSpace};
use crate::solver::{InitialCondition, SolverConfig};

/// One requested mixed norm `L^r(W^{k,q})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormRequest {
    pub r: Exponent,
    pub q: Exponent,
    #[serde(default)]
    pub k: u8,
}

impl NormRequest {
    pub fn space(&self) -> Result<MixedNormSpace, CliError> {
        let derivative = DerivativeOrder::from_index(self.k)
            .ok_or_else(|| CliError::Usage(format!("derivative order {} is not 0 or 1", self.k)))?;
        Ok(MixedNormSpace {
            time_exp: self.r.clone(),
            space_exp: self.q.clone(),
            derivative,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerSection {
    /// Empty means the built-in criterion spaces.
    #[serde(default)]
    pub norms: Vec<NormRequest>,
    #[serde(default)]
    pub mollify: Vec<f64>,
    /// Width of the space-time smoothing applied before an Oseen probe.
    pub smooth_eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

/// Top-level experiment file. Relative paths are taken relative to the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub solver: SolverConfig,
    #[serde(default)]
    pub ledger: LedgerSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.output.dir = base.join(&cfg.output.dir);
        if let InitialCondition::Snapshot { path: snap } = &mut cfg.solver.initial {
            *snap = base.join(&*snap);
        }
        cfg.solver.validate()?;
        Ok(cfg)
    }

    pub fn spaces(&self) -> Result<Vec<MixedNormSpace>, CliError> {
        self.ledger.norms.iter().map(NormRequest::space).collect()
    }

    pub fn wants(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
        [solver]
        n = 16
        dt = 0.001
        t_end = 0.01
        viscosity = 1.0
        initial = { kind = "taylor-green" }

        [ledger]
        norms = [{ r = "4", q = "4" }, { r = "3", q = "9/5", k = 1 }]
        mollify = [0.004]

        [output]
        dir = "out"
    "#;

    #[test]
    fn parses_exact_exponents() {
        let cfg = ExperimentConfig::parse(TEXT).unwrap();
        let spaces = cfg.spaces().unwrap();
        assert_eq!(spaces[1].space_exp, Exponent::fraction(9, 5).unwrap());
        assert_eq!(spaces[1].derivative, DerivativeOrder::Gradient);
        assert!(cfg.wants(Format::Json));
    }

    #[test]
    fn rejects_unknown_keys_and_decimals() {
        let bad = TEXT.replace("[output]", "[output]\ncolour = \"red\"");
        let err = ExperimentConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let bad = TEXT.replace("\"9/5\"", "\"1.8\"");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }
}
