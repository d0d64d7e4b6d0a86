//! Flat `key = value` experiment configuration with a strict schema.
//!
//! The on-disk form is one `key = value` pair per line in schema order;
//! blank lines and `#` comments are allowed on input and dropped on output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::limit::Schedule;
use crate::measure::BaseMeasure;
use crate::partition::Partition;

/// Prefix of environment variables that fill in missing keys.
pub const ENV_PREFIX: &str = "HALLSCOPE_";

#[derive(Clone, Copy, Debug)]
enum Kind {
    Word(&'static [&'static str]),
    UInt,
    Float,
    Partition,
    Rationals,
    Measure,
    Text,
}

pub const COMMANDS: &[&str] = &[
    "count",
    "enumerate",
    "sample",
    "identity-check",
    "frozen",
    "limit-shape",
    "burgers",
    "gff-cov",
    "render",
];

const SCHEMA: &[(&str, Kind)] = &[
    ("command", Kind::Word(COMMANDS)),
    ("which", Kind::Word(&["all", "branching", "level-sgf", "moment"])),
    ("lambda", Kind::Partition),
    ("n", Kind::UInt),
    ("t", Kind::UInt),
    ("weights", Kind::Rationals),
    ("method", Kind::Word(&["exact", "mcmc"])),
    ("moves", Kind::Word(&["flip", "heat-bath"])),
    ("samples", Kind::UInt),
    ("chains", Kind::UInt),
    ("burn_in", Kind::UInt),
    ("thin", Kind::UInt),
    ("seed", Kind::UInt),
    ("measure", Kind::Measure),
    ("schedule", Kind::Word(&["uniform", "power"])),
    ("alpha", Kind::Float),
    ("exponent", Kind::Float),
    ("s", Kind::Float),
    ("j", Kind::UInt),
    ("kappa", Kind::UInt),
    ("k1", Kind::UInt),
    ("k2", Kind::UInt),
    ("s1", Kind::Float),
    ("s2", Kind::Float),
    ("grid", Kind::UInt),
    ("z_min", Kind::Float),
    ("z_max", Kind::Float),
    ("step", Kind::Float),
    ("tolerance", Kind::Float),
    ("input", Kind::Text),
    ("out", Kind::Text),
    ("manifest", Kind::Text),
    ("format", Kind::Word(&["csv", "json", "svg", "text"])),
];

/// Names of every recognised key, in canonical order.
pub fn keys() -> impl Iterator<Item = &'static str> {
    SCHEMA.iter().map(|(k, _)| *k)
}

fn schema_index(key: &str) -> Option<usize> {
    SCHEMA.iter().position(|(k, _)| *k == key)
}

fn check_value(kind: Kind, v: &str) -> std::result::Result<(), String> {
    match kind {
        Kind::Word(words) => {
            if words.contains(&v) {
                Ok(())
            } else {
                Err(format!("expected one of {}", words.join(", ")))
            }
        }
        Kind::UInt => v.parse::<u64>().map(|_| ()).map_err(|e| e.to_string()),
        Kind::Float => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(()),
            Ok(_) => Err("value must be finite".into()),
            Err(e) => Err(e.to_string()),
        },
        Kind::Partition => Partition::parse(v).map(|_| ()).map_err(|e| e.to_string()),
        Kind::Rationals => parse_rationals(v).map(|_| ()).map_err(|e| e.to_string()),
        Kind::Measure => BaseMeasure::from_str(v).map(|_| ()).map_err(|e| e.to_string()),
        Kind::Text => {
            if v.is_empty() || v.contains('\n') {
                Err("expected a non-empty single-line value".into())
            } else {
                Ok(())
            }
        }
    }
}

/// Parses `"1,2,3/2"`.
pub fn parse_rationals(v: &str) -> Result<Vec<BigRational>> {
    v.split(',')
        .map(|p| {
            BigRational::from_str(p.trim())
                .map_err(|e| Error::Argument(format!("bad rational {p:?}: {e}")))
        })
        .collect()
}

/// A validated experiment configuration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    /// Values keyed by schema position, so iteration is canonical order.
    values: BTreeMap<usize, String>,
}

impl ExperimentConfig {
    pub fn new(command: &str) -> Result<Self> {
        let mut c = Self::default();
        c.set("command", command)?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let idx = schema_index(key).ok_or_else(|| Error::Argument(format!("unknown key {key:?}")))?;
        let value = value.trim();
        check_value(SCHEMA[idx].1, value).map_err(|m| Error::Argument(format!("{key}: {m}")))?;
        self.values.insert(idx, value.to_string());
        Ok(())
    }

    /// Sets `key` only when a value is given.
    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) -> Result<()> {
        match value {
            Some(v) => self.set(key, &v.to_string()),
            None => Ok(()),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        schema_index(key).and_then(|i| self.values.get(&i)).map(String::as_str)
    }

    pub fn command(&self) -> Result<&str> {
        self.get("command").ok_or_else(|| Error::Argument("configuration has no command".into()))
    }

    /// Parses the on-disk form. Errors carry 1-based line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let err = |line: usize, column: usize, message: String| Error::Parse { line, column, message };
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = raw.trim_start();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let indent = raw.len() - body.len();
            let eq = body.find('=').ok_or_else(|| err(line, indent + 1, "expected `key = value`".into()))?;
            let key = body[..eq].trim();
            let idx = schema_index(key).ok_or_else(|| err(line, indent + 1, format!("unknown key {key:?}")))?;
            if c.values.contains_key(&idx) {
                return Err(err(line, indent + 1, format!("duplicate key {key:?}")));
            }
            let after = &body[eq + 1..];
            let value = after.trim();
            let vcol = indent + eq + 2 + (after.len() - after.trim_start().len());
            check_value(SCHEMA[idx].1, value).map_err(|m| err(line, vcol, format!("{key}: {m}")))?;
            c.values.insert(idx, value.to_string());
        }
        if c.values.is_empty() {
            return Err(err(1, 1, "empty configuration".into()));
        }
        if c.get("command").is_none() {
            return Err(err(1, 1, "missing key \"command\"".into()));
        }
        Ok(c)
    }

    /// Canonical on-disk form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (idx, v) in &self.values {
            let _ = writeln!(out, "{} = {}", SCHEMA[*idx].0, v);
        }
        out
    }

    /// Fills keys that are still unset from `HALLSCOPE_<KEY>` variables.
    pub fn fill_from_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<()> {
        for (name, value) in vars {
            let Some(rest) = name.strip_prefix(ENV_PREFIX) else { continue };
            let key = rest.to_ascii_lowercase();
            let Some(idx) = schema_index(&key) else { continue };
            if !self.values.contains_key(&idx) {
                self.set(&key, &value)?;
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical text without the `manifest` key, hex
    /// encoded; where the manifest goes does not change the experiment.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        if let Some(idx) = schema_index("manifest") {
            c.values.remove(&idx);
        }
        hex::encode(Sha256::digest(c.to_text().as_bytes()))
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Argument(format!("missing required key {key:?}")))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            Some(v) => v.parse().map_err(|e| Error::Argument(format!("{key}: {e}"))),
            None => Ok(default),
        }
    }

    pub fn u64_req(&self, key: &str) -> Result<u64> {
        self.required(key)?.parse().map_err(|e| Error::Argument(format!("{key}: {e}")))
    }

    pub fn u32_req(&self, key: &str) -> Result<u32> {
        let v = self.u64_req(key)?;
        u32::try_from(v).map_err(|_| Error::Argument(format!("{key} = {v} is too large")))
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32> {
        let v = self.u64_or(key, default as u64)?;
        u32::try_from(v).map_err(|_| Error::Argument(format!("{key} = {v} is too large")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(v) => v.parse().map_err(|e| Error::Argument(format!("{key}: {e}"))),
            None => Ok(default),
        }
    }

    pub fn f64_req(&self, key: &str) -> Result<f64> {
        self.required(key)?.parse().map_err(|e| Error::Argument(format!("{key}: {e}")))
    }

    pub fn partition(&self, key: &str) -> Result<Partition> {
        Partition::parse(self.required(key)?)
    }

    pub fn rationals(&self, key: &str) -> Result<Option<Vec<BigRational>>> {
        self.get(key).map(parse_rationals).transpose()
    }

    pub fn measure(&self) -> Result<BaseMeasure> {
        BaseMeasure::from_str(self.required("measure")?)
    }

    pub fn schedule(&self) -> Result<Schedule> {
        let kind = self.get("schedule").unwrap_or("uniform");
        let alpha = self.f64_or("alpha", 1.0)?;
        let exponent = self.get("exponent").map(|_| self.f64_req("exponent")).transpose()?;
        Schedule::parse(kind, alpha, exponent)
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.get(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "command = count\nlambda = 2,2\nn = 2\nt = 3\n";

    #[test]
    fn canonical_round_trip() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.to_text(), SAMPLE);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn comments_and_order_are_normalised() {
        let c = ExperimentConfig::parse("# demo\n t = 3\nn=2\n\ncommand = count\nlambda = 2,2\n").unwrap();
        assert_eq!(c.to_text(), SAMPLE);
    }

    #[test]
    fn errors_have_positions() {
        match ExperimentConfig::parse("command = count\n  colour = red\n") {
            Err(Error::Parse { line: 2, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::parse("command = count\nn =  x\n") {
            Err(Error::Parse { line: 2, column: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(ExperimentConfig::parse("\n# nothing\n"), Err(Error::Parse { .. })));
        assert!(matches!(ExperimentConfig::parse("n = 2\nn = 3\n"), Err(Error::Parse { .. })));
        assert!(matches!(ExperimentConfig::parse("n = 2\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn environment_fills_gaps_only() {
        let mut c = ExperimentConfig::parse(SAMPLE).unwrap();
        c.fill_from_env([
            ("HALLSCOPE_N".to_string(), "7".to_string()),
            ("HALLSCOPE_SEED".to_string(), "11".to_string()),
            ("PATH".to_string(), "/bin".to_string()),
        ])
        .unwrap();
        assert_eq!(c.get("n"), Some("2"));
        assert_eq!(c.get("seed"), Some("11"));
        assert!(c
            .clone()
            .fill_from_env([("HALLSCOPE_SEED2".into(), "x".into()), ("HALLSCOPE_T".into(), "x".into())])
            .is_ok());
        let mut d = ExperimentConfig::new("count").unwrap();
        assert!(d.fill_from_env([("HALLSCOPE_T".into(), "x".into())]).is_err());
    }

    #[test]
    fn typed_access() {
        let mut c = ExperimentConfig::new("frozen").unwrap();
        c.set("measure", "staircase:p=3").unwrap();
        c.set("weights", "1,3/2").unwrap();
        assert!(c.set("measure", "staircase:p=x").is_err());
        assert!(c.set("alpha", "inf").is_err());
        assert_eq!(c.measure().unwrap(), BaseMeasure::Staircase { p: 3 });
        assert_eq!(c.rationals("weights").unwrap().unwrap().len(), 2);
        assert_eq!(c.schedule().unwrap(), Schedule::Uniform { alpha: 1.0 });
        assert_eq!(c.hash().len(), 64);
    }
}
