//! Flat `key = value` run configuration.
//!
//! A config file holds one `key = value` per line; `#` starts a comment.
//! Keys use `-` or `_` interchangeably. Command-line flags override file
//! entries. Values stay strings until a command asks for a typed view, so
//! rationals reach the exponent algebra exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exponent::{parse_rational, Exponent, ExponentVec, Rational};
use crate::families::FunctionFamily;
use crate::field::GridSpec;

/// Environment variable naming the root for relative output paths.
pub const OUT_ROOT_ENV: &str = "ANISO_GN_OUT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    values: BTreeMap<String, String>,
}

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

/// Parses the text of a config file into key/value pairs.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse(format!(
                "config line {}: expected key = value, got {raw:?}",
                lineno + 1
            )));
        };
        let key = normalize_key(k);
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", lineno + 1)));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("config key '{key}' given twice")));
        }
    }
    Ok(out)
}

impl RunConfig {
    /// Builds a config from file entries and flag overrides, rejecting keys
    /// outside `allowed`.
    pub fn new(
        command: &str,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
        allowed: &[&str],
    ) -> Result<Self> {
        let mut values = file;
        values.extend(flags);
        let unknown: Vec<&str> = values
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        if !unknown.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "unknown key(s) for '{command}': {}",
                unknown.join(", ")
            )));
        }
        Ok(Self {
            command: command.to_string(),
            values,
        })
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// SHA-256 over the command and the sorted `key=value` lines; the output
    /// location is left out so reruns elsewhere hash the same.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("command={}\n", self.command));
        for (k, v) in &self.values {
            if k != "out" {
                h.update(format!("{k}={v}\n"));
            }
        }
        hex::encode(h.finalize())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn parse_with<T>(&self, key: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
        self.get(key)
            .map(|v| f(v).map_err(|e| Error::InvalidArgument(format!("{key}: {e}"))))
            .transpose()
    }

    fn need<T>(&self, key: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| Error::InvalidArgument(format!("missing required key '{key}'")))
    }

    pub fn rational(&self, key: &str) -> Result<Option<Rational>> {
        self.parse_with(key, parse_rational)
    }

    pub fn require_rational(&self, key: &str) -> Result<Rational> {
        let v = self.rational(key)?;
        self.need(key, v)
    }

    pub fn exponent(&self, key: &str) -> Result<Option<Exponent>> {
        self.parse_with(key, str::parse)
    }

    pub fn exponents(&self, key: &str) -> Result<Option<ExponentVec>> {
        self.parse_with(key, str::parse)
    }

    pub fn require_exponents(&self, key: &str) -> Result<ExponentVec> {
        let v = self.exponents(key)?;
        self.need(key, v)
    }

    pub fn rationals(&self, key: &str) -> Result<Option<Vec<Rational>>> {
        self.parse_with(key, |v| split_list(v).map(parse_rational).collect())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.parse_with(key, parse_f64)?.unwrap_or(default))
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.parse_with(key, |v| split_list(v).map(parse_f64).collect())
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.parse_with(key, parse_int)?.unwrap_or(default))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        Ok(self.parse_with(key, parse_int)?.unwrap_or(default))
    }

    pub fn i32_or(&self, key: &str, default: i32) -> Result<i32> {
        Ok(self.parse_with(key, parse_int)?.unwrap_or(default))
    }

    pub fn i32_list(&self, key: &str) -> Result<Option<Vec<i32>>> {
        self.parse_with(key, |v| split_list(v).map(parse_int).collect())
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        Ok(self
            .parse_with(key, |v| match v.trim() {
                "true" | "yes" | "1" | "" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(Error::Parse(format!("expected a boolean, got {other:?}"))),
            })?
            .unwrap_or(default))
    }

    /// `size` points per axis (default `default_size`) in dimension `dim`;
    /// `length` is one period for all axes or a list, default `2π`.
    pub fn grid(&self, dim: usize, default_size: usize) -> Result<GridSpec> {
        self.grid_with_length(dim, default_size, 2.0 * std::f64::consts::PI)
    }

    pub fn grid_with_length(&self, dim: usize, default_size: usize, default_length: f64) -> Result<GridSpec> {
        let size = self.usize_or("size", default_size)?;
        let lengths = match self.f64_list("length")? {
            None => vec![default_length; dim],
            Some(l) if l.len() == 1 => vec![l[0]; dim],
            Some(l) => l,
        };
        GridSpec::new(vec![size; dim], lengths)
    }

    /// Family named by `family` with parameters `width`, `shell`, `shells`,
    /// `k`, `radius` and `seed`.
    pub fn family(&self, default: &str) -> Result<FunctionFamily> {
        self.family_with(default, 4.0)
    }

    pub fn family_with(&self, default: &str, default_radius: f64) -> Result<FunctionFamily> {
        let seed = self.u64_or("seed", 0)?;
        let width = self.f64_or("width", 1.0)?;
        let radius = self.f64_or("radius", default_radius)?;
        Ok(match self.get("family").unwrap_or(default) {
            "anisotropic-gaussian" => FunctionFamily::AnisotropicGaussian { width, seed },
            "random-bandlimited" => FunctionFamily::RandomBandlimited {
                shell: self.i32_or("shell", 2)?,
                seed,
            },
            "multi-shell" => FunctionFamily::MultiShell {
                shells: self.i32_list("shells")?.unwrap_or_else(|| vec![0, 1, 2]),
                seed,
            },
            "bump-product" => FunctionFamily::BumpProduct { width, seed },
            "single-mode" => FunctionFamily::SingleMode {
                k: self
                    .i32_list("k")?
                    .ok_or_else(|| Error::InvalidArgument("single-mode needs 'k'".into()))?
                    .into_iter()
                    .map(i64::from)
                    .collect(),
            },
            "ball-cluster" => FunctionFamily::BallCluster { radius, seed },
            "annulus-cluster" => FunctionFamily::AnnulusCluster { radius, seed },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown family '{other}' (expected anisotropic-gaussian, random-bandlimited, \
                     multi-shell, bump-product, single-mode, ball-cluster or annulus-cluster)"
                )))
            }
        })
    }

    /// Output directory: `out` (default the command name), relative paths
    /// resolved against `$ANISO_GN_OUT` when set.
    pub fn out_dir(&self) -> PathBuf {
        resolve_out(Path::new(self.get("out").unwrap_or(&self.command)))
    }
}

pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_ROOT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(v: &str) -> Result<f64> {
    let x: f64 = match v.trim() {
        "pi" => std::f64::consts::PI,
        "2pi" => 2.0 * std::f64::consts::PI,
        t => t
            .parse()
            .map_err(|_| Error::Parse(format!("malformed number {v:?}")))?,
    };
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite number {v:?}")));
    }
    Ok(x)
}

fn parse_int<T: std::str::FromStr>(v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("malformed integer {v:?}")))
}
