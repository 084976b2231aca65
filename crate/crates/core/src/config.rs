//! Run configuration: a JSON file whose fields command-line flags may override.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dirichlet::{DEFAULT_EPSILONS, MIN_EPSILON};
use crate::error::{Error, Result};
use crate::factorial::{read_override_table, FSpec, Shape, TABLE_CAP};
use crate::field::{FieldSpec, SSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FSpecConfig {
    /// `norm`, `norm-1`, or `table`.
    pub shape: String,
    pub c: f64,
    /// `[p, index, f]` triples; only used by the `table` shape.
    pub overrides: Vec<(u64, u8, u64)>,
}

impl Default for FSpecConfig {
    fn default() -> Self {
        Self {
            shape: "norm".into(),
            c: 1.0,
            overrides: Vec::new(),
        }
    }
}

impl FSpecConfig {
    pub fn build(&self) -> Result<FSpec> {
        let shape = match self.shape.as_str() {
            "norm" => Shape::ExactNorm,
            "norm-1" => Shape::NormMinusOne,
            "table" => Shape::Table(
                self.overrides
                    .iter()
                    .map(|&(p, i, f)| ((p, i), f))
                    .collect::<BTreeMap<_, _>>(),
            ),
            other => return Err(Error::config(format!("unknown fspec shape {other:?}"))),
        };
        FSpec::new(self.c, shape)
    }

    /// Applies the `--fspec` grammar (`norm`, `norm-1`, `c*norm:<c>`, `c*norm-1:<c>`,
    /// `table:<path>`).
    pub fn apply_flag(&mut self, flag: &str) -> Result<()> {
        let flag = flag.trim();
        let parse_c = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad scale in fspec {flag:?}")))
        };
        *self = match flag {
            "norm" | "norm-1" => Self {
                shape: flag.into(),
                ..Self::default()
            },
            _ => {
                if let Some(v) = flag.strip_prefix("c*norm-1:") {
                    Self {
                        shape: "norm-1".into(),
                        c: parse_c(v)?,
                        overrides: Vec::new(),
                    }
                } else if let Some(v) = flag.strip_prefix("c*norm:") {
                    Self {
                        shape: "norm".into(),
                        c: parse_c(v)?,
                        overrides: Vec::new(),
                    }
                } else if let Some(path) = flag.strip_prefix("table:") {
                    let table = read_override_table(Path::new(path))?;
                    Self {
                        shape: "table".into(),
                        c: 1.0,
                        overrides: table.into_iter().map(|((p, i), f)| (p, i, f)).collect(),
                    }
                } else {
                    return Err(Error::config(format!("unknown fspec {flag:?}")));
                }
            }
        };
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplesConfig {
    pub count: usize,
    /// Smallest sample; defaults to `min(1000, x_max/100)`, at least 100.
    pub min: Option<u64>,
}

impl Default for SamplesConfig {
    fn default() -> Self {
        Self {
            count: crate::asymptotics::DEFAULT_SAMPLE_COUNT,
            min: None,
        }
    }
}

impl SamplesConfig {
    pub fn points(&self, x_max: u64) -> Vec<u64> {
        let lo = self.min.unwrap_or_else(|| (x_max / 100).clamp(100, 1000));
        crate::asymptotics::log_spaced_samples(lo, x_max, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerronConfig {
    pub x: f64,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    /// Prime-ideal truncation; defaults to covering every ideal with `f(p) <= x`.
    #[serde(rename = "P", default)]
    pub p: Option<u64>,
}

impl Default for PerronConfig {
    fn default() -> Self {
        Self {
            x: 100.5,
            t: vec![100.0, 200.0, 400.0, 800.0],
            p: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub field: String,
    /// Entries like `"2"` or `"5:one"`.
    pub s_set: Vec<String>,
    pub fspec: FSpecConfig,
    pub x_max: u64,
    pub samples: SamplesConfig,
    pub s_values: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub perron: Option<PerronConfig>,
    pub output: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            field: "Q".into(),
            s_set: Vec::new(),
            fspec: FSpecConfig::default(),
            x_max: 100_000,
            samples: SamplesConfig::default(),
            s_values: vec![1.5, 2.0, 3.0],
            epsilons: DEFAULT_EPSILONS.to_vec(),
            perron: None,
            output: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

/// A validated configuration with its strings parsed.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub field: FieldSpec,
    pub s_set: SSet,
    pub fspec: FSpec,
    pub config: RunConfig,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn set_s_exclude(&mut self, flag: &str) {
        self.s_set = flag
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from)
            .collect();
    }

    pub fn resolve(self) -> Result<Resolved> {
        let field: FieldSpec = self.field.parse()?;
        let s_set: SSet = self.s_set.join(",").parse()?;
        s_set.validate(&field)?;
        let fspec = self.fspec.build()?;
        if self.x_max == 0 {
            return Err(Error::config("x_max must be >= 1"));
        }
        if self.x_max > TABLE_CAP {
            return Err(Error::Size {
                requested: self.x_max,
                cap: TABLE_CAP,
            });
        }
        if let Some(s) = self.s_values.iter().find(|&&s| !(s > 1.0 && s.is_finite())) {
            return Err(Error::config(format!("s_values must exceed 1, got {s}")));
        }
        if let Some(e) = self
            .epsilons
            .iter()
            .find(|&&e| !(MIN_EPSILON * (1.0 - 1e-9)..=0.5).contains(&e))
        {
            return Err(Error::config(format!(
                "epsilons must lie in [1e-3, 0.5], got {e}"
            )));
        }
        if let Some(p) = &self.perron {
            if let Some(t) = p.t.iter().find(|&&t| !(t >= 2.0 && t.is_finite())) {
                return Err(Error::config(format!("Perron T must be >= 2, got {t}")));
            }
            if !(p.x >= 2.0) || p.x.fract() < 0.25 {
                return Err(Error::config(format!(
                    "Perron x must be >= 2 and at least 0.25 past an integer, got {}",
                    p.x
                )));
            }
        }
        Ok(Resolved {
            field,
            s_set,
            fspec,
            config: self,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!(r.field, FieldSpec::rationals());
        assert_eq!(r.fspec, FSpec::norm());
        assert!(r.s_set.is_empty());
    }

    #[test]
    fn json_round_trip_with_renamed_fields() {
        let text = r#"{
            "field": "Q(sqrt-1)",
            "s_set": ["5:one"],
            "fspec": {"shape": "norm-1", "c": 1.0},
            "x_max": 5000,
            "perron": {"x": 50.5, "T": [10, 20], "P": 500},
            "format": "json"
        }"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.perron.as_ref().unwrap().t, vec![10.0, 20.0]);
        assert_eq!(cfg.format, Format::Json);
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.s_set.to_string(), "5:one");
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.resolve().is_err()
        };
        assert!(bad(|c| c.field = "Q(sqrt9)".into()));
        assert!(bad(|c| c.fspec.c = 0.0));
        assert!(bad(|c| c.fspec.shape = "cube".into()));
        assert!(bad(|c| c.x_max = 100_000_000));
        assert!(bad(|c| c.x_max = 0));
        assert!(bad(|c| c.s_values = vec![1.0]));
        assert!(bad(|c| c.epsilons = vec![0.0001]));
        assert!(bad(|c| c.epsilons = vec![0.6]));
        assert!(bad(|c| c.s_set = vec!["3:one".into()]));
        assert!(bad(|c| c.perron = Some(PerronConfig {
            t: vec![1.0],
            ..Default::default()
        })));
        assert!(bad(|c| c.perron = Some(PerronConfig {
            x: 100.1,
            ..Default::default()
        })));
        assert!(serde_json::from_str::<RunConfig>(r#"{"nonsense": 1}"#).is_err());
    }

    #[test]
    fn fspec_flags() {
        let mut f = FSpecConfig::default();
        f.apply_flag("c*norm:2").unwrap();
        assert_eq!(f.build().unwrap(), FSpec::scaled_norm(2.0).unwrap());
        f.apply_flag("norm-1").unwrap();
        assert_eq!(f.build().unwrap(), FSpec::norm_minus_one());
        assert!(f.apply_flag("bogus").is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "p,index,f\n3,0,7\n").unwrap();
        f.apply_flag(&format!("table:{}", path.display())).unwrap();
        assert_eq!(f.overrides, vec![(3, 0, 7)]);
    }
}
