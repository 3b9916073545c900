//! Suite configuration: `key=value` files overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use logdrw::overconv::parse_rational;
use logdrw::{Error, LocalModel, Result};
use num_rational::Rational64;

/// Raw settings keyed by flag name (`max-num`, `seed`, ...).
pub type RawConfig = BTreeMap<String, String>;

pub const KEYS: &[&str] = &[
    "model", "m", "max-num", "max-den", "trials", "seed", "suite", "out", "eps", "N", "weight", "variant",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub model: LocalModel,
    pub m: u32,
    pub max_num: u64,
    pub max_den: u32,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub eps: Vec<Rational64>,
    /// Witt vector length for the degree-zero and Gauss suites.
    pub len: usize,
    pub weight: Option<String>,
    pub variant: Option<String>,
}

/// Parses a `key=value` file; blank lines and `#` comments are skipped.
pub fn parse_file(text: &str) -> Result<RawConfig> {
    let mut out = RawConfig::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Malformed(format!("line {}: expected key=value", no + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Malformed(format!("line {}: unknown key `{k}`", no + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Malformed(format!("`{key}` expects a number, got `{v}`"))),
    }
}

pub fn parse_eps_list(s: &str) -> Result<Vec<Rational64>> {
    s.split(',').map(|x| parse_rational(x.trim())).collect()
}

impl SuiteConfig {
    /// Resolves raw settings; the model is required.
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let model: LocalModel = raw
            .get("model")
            .ok_or_else(|| Error::Malformed("missing `model`".into()))?
            .parse()?;
        let cfg = SuiteConfig {
            suite: raw.get("suite").cloned().unwrap_or_default(),
            model,
            m: num(raw, "m", 2)?,
            max_num: num(raw, "max-num", 2)?,
            max_den: num(raw, "max-den", 1)?,
            trials: num(raw, "trials", 100)?,
            seed: num(raw, "seed", 0)?,
            out: raw.get("out").map(PathBuf::from),
            eps: parse_eps_list(raw.get("eps").map_or("1/2,1/3,2", String::as_str))?,
            len: num(raw, "N", 3)?,
            weight: raw.get("weight").cloned(),
            variant: raw.get("variant").cloned(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Malformed(m.into()));
        if self.m == 0 {
            return bad("`m` must be positive");
        }
        if self.max_num == 0 {
            return bad("`max-num` must be positive");
        }
        if self.trials == 0 {
            return bad("`trials` must be positive");
        }
        if self.len == 0 {
            return bad("`N` must be positive");
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| *e <= Rational64::from_integer(0)) {
            return bad("`eps` must list positive rationals");
        }
        logdrw::witt_scalar::modulus(self.model.p, self.m + 2)?;
        Ok(())
    }

    /// The settings that determine the results, as echoed in reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let eps: Vec<String> = self.eps.iter().map(|e| e.to_string()).collect();
        let mut out = BTreeMap::from([
            ("model".to_string(), self.model.to_string()),
            ("m".to_string(), self.m.to_string()),
            ("max-num".to_string(), self.max_num.to_string()),
            ("max-den".to_string(), self.max_den.to_string()),
            ("trials".to_string(), self.trials.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("eps".to_string(), eps.join(",")),
            ("N".to_string(), self.len.to_string()),
        ]);
        if !self.suite.is_empty() {
            out.insert("suite".into(), self.suite.clone());
        }
        if let Some(w) = &self.weight {
            out.insert("weight".into(), w.clone());
        }
        if let Some(v) = &self.variant {
            out.insert("variant".into(), v.clone());
        }
        out
    }

    /// A config for `model` with the remaining settings at their defaults.
    pub fn for_model(model: LocalModel) -> Self {
        let mut raw = RawConfig::new();
        raw.insert("model".into(), model.to_string());
        Self::from_raw(&raw).expect("defaults are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut raw = parse_file("# demo\nmodel = poly:p=3,n=2,e=1,f=0\nseed=4\n\ntrials=10\n").unwrap();
        raw.insert("seed".into(), "42".into());
        let cfg = SuiteConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.m, 2);
        assert_eq!(cfg.eps.len(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_file("nonsense").is_err());
        assert!(parse_file("colour=blue").is_err());
        let raw = RawConfig::from([("model".to_string(), "poly:p=4,n=1,e=0,f=0".to_string())]);
        assert!(SuiteConfig::from_raw(&raw).is_err());
        let raw = RawConfig::from([
            ("model".to_string(), "poly:p=3,n=1,e=0,f=0".to_string()),
            ("trials".to_string(), "0".to_string()),
        ]);
        assert!(SuiteConfig::from_raw(&raw).is_err());
    }
}
