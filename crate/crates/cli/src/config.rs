//! Run configuration: command-line flags merged over an optional TOML file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::table::{Cell, Format};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Pairwise,
    Global,
}

/// One dephasing factor for every TLS, or one per TLS.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum EpsSetting {
    Uniform(f64),
    PerTls(Vec<f64>),
}

impl FromStr for EpsSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = parse_list::<f64>(s)?;
        Ok(match values.as_slice() {
            [single] => EpsSetting::Uniform(*single),
            _ => EpsSetting::PerTls(values),
        })
    }
}

impl EpsSetting {
    pub fn resolve(&self, n: usize) -> Result<Vec<f64>, CliError> {
        let values = match self {
            EpsSetting::Uniform(e) => vec![*e; n],
            EpsSetting::PerTls(v) if v.len() == n => v.clone(),
            EpsSetting::PerTls(v) => {
                return Err(CliError::Usage(format!(
                    "{} per-TLS dephasing factors given for N = {n}",
                    v.len()
                )))
            }
        };
        if let Some(bad) = values.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(CliError::Usage(format!(
                "dephasing factor {bad} outside [0, 1]"
            )));
        }
        Ok(values)
    }

    pub fn cell(setting: Option<&EpsSetting>) -> Cell {
        match setting {
            None => Cell::Num(1.0),
            Some(EpsSetting::Uniform(e)) => Cell::Num(*e),
            Some(EpsSetting::PerTls(v)) => Cell::List(v.clone()),
        }
    }
}

/// Comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Result<Vec<T>, String> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|e| format!("bad value {x:?}: {e}"))
        })
        .collect();
    match items {
        Ok(v) if v.is_empty() => Err("empty list".into()),
        other => other,
    }
}

/// Keys accepted in a `--config` TOML file. All optional; flags take
/// precedence over file values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<Vec<usize>>,
    pub p: Option<Vec<f64>>,
    pub protocol: Option<Protocol>,
    pub pre_eps: Option<EpsSetting>,
    pub post_eps: Option<EpsSetting>,
    pub rus: Option<Vec<u32>>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub p_spread: Option<f64>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 0;

/// Fully resolved grid for `single` and `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub p_values: Vec<f64>,
    pub protocol: Protocol,
    pub pre_eps: Option<EpsSetting>,
    pub post_eps: Option<EpsSetting>,
    pub rus: Option<Vec<u32>>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub jobs: Option<usize>,
    /// Width of the flat window per-TLS `p` values are drawn from.
    pub p_spread: Option<f64>,
    pub samples: usize,
}

impl SweepConfig {
    /// Invariants: nonempty grids, `p` in `[0, 1]` (or `(0, 1)` when
    /// `open_p`), `ε` in `[0, 1]`, `R ≥ 1`.
    pub fn validate(&self, open_p: bool) -> Result<(), CliError> {
        if self.n_values.is_empty() || self.p_values.is_empty() {
            return Err(CliError::Usage("empty N or p grid".into()));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(CliError::Usage(format!(
                "N = {n}: the protocol needs N >= 2"
            )));
        }
        for &p in &self.p_values {
            let ok = if open_p {
                p > 0.0 && p < 1.0
            } else {
                (0.0..=1.0).contains(&p)
            };
            if !ok {
                return Err(CliError::Usage(format!(
                    "p = {p} outside the allowed range"
                )));
            }
        }
        for eps in [&self.pre_eps, &self.post_eps].into_iter().flatten() {
            for &n in &self.n_values {
                eps.resolve(n)?;
            }
        }
        if let Some(rs) = &self.rus {
            if rs.is_empty() || rs.contains(&0) {
                return Err(CliError::Usage("RUS repetitions must be >= 1".into()));
            }
        }
        if let Some(w) = self.p_spread {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(CliError::Usage(format!("p spread {w} must be >= 0")));
            }
            for &p in &self.p_values {
                if p - w / 2.0 < 0.0 || p + w / 2.0 > 1.0 {
                    return Err(CliError::Usage(format!(
                        "window [{}, {}] leaves [0, 1]",
                        p - w / 2.0,
                        p + w / 2.0
                    )));
                }
            }
            if self.samples == 0 {
                return Err(CliError::Usage("need at least one sample".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_parsing() {
        assert_eq!(
            "0.9".parse::<EpsSetting>().unwrap(),
            EpsSetting::Uniform(0.9)
        );
        assert_eq!(
            "0.9, 0.8".parse::<EpsSetting>().unwrap(),
            EpsSetting::PerTls(vec![0.9, 0.8])
        );
        assert!("x".parse::<EpsSetting>().is_err());
        assert!(EpsSetting::PerTls(vec![0.9, 0.8]).resolve(3).is_err());
        assert!(EpsSetting::Uniform(1.5).resolve(3).is_err());
        assert_eq!(EpsSetting::Uniform(0.5).resolve(2).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn toml_file() {
        let cfg: FileConfig = toml::from_str(
            "n = [2, 4]\np = [0.01]\nprotocol = \"global\"\npre_eps = 0.9\npost_eps = [0.9, 0.8]\nformat = \"json\"\n",
        )
        .unwrap();
        assert_eq!(cfg.n, Some(vec![2, 4]));
        assert_eq!(cfg.protocol, Some(Protocol::Global));
        assert_eq!(cfg.pre_eps, Some(EpsSetting::Uniform(0.9)));
        assert_eq!(cfg.post_eps, Some(EpsSetting::PerTls(vec![0.9, 0.8])));
        assert_eq!(cfg.format, Some(Format::Json));
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
