//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use branchdim::system::file::{load_system_file, load_system_file_unchecked};
use branchdim::system::{build_catalog, BranchedSystem, CatalogName, CatalogParams};
use branchdim::{Error, ProbVector, Result};
use clap::ValueEnum;
use serde::Deserialize;

/// Environment variable holding the default word budget.
pub const BUDGET_ENV: &str = "BRANCHDIM_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Combined,
    Orbit,
    Coarse,
}

/// A probability vector given as text (list, fractions or a file path) or
/// as a TOML array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PSpec {
    Text(String),
    Weights(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimSection {
    pub p: Option<PSpec>,
    pub depth: Option<usize>,
    pub rule: Option<Rule>,
    pub coarse_bound: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximizeSection {
    #[serde(rename = "L")]
    pub l: Option<toml::Value>,
    pub depth: Option<usize>,
    pub alpha: Option<f64>,
    pub seeds: Option<usize>,
    pub seed: Option<u64>,
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapcertSection {
    pub max_len: Option<usize>,
    pub max_symbol: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub system: Option<String>,
    pub file: Option<PathBuf>,
    pub lengths: Option<Vec<f64>>,
    pub tail_branches: Option<usize>,
    pub prefix: Option<usize>,
    pub budget: Option<u128>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub dim: DimSection,
    #[serde(default)]
    pub maximize: MaximizeSection,
    #[serde(default)]
    pub gapcert: GapcertSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

impl RunFile {
    /// Reads the file; relative paths inside it resolve against its directory.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut run: RunFile = toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut run.file, &mut run.output, &mut run.maximize.plot].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(PSpec::Text(t)) = &mut run.dim.p {
            let candidate = base.join(&*t);
            if !Path::new(t.as_str()).exists() && candidate.is_file() {
                *t = candidate.to_string_lossy().into_owned();
            }
        }
        Ok(run)
    }
}

/// Where the system comes from, after merging flags and file.
#[derive(Debug, Clone, Default)]
pub struct SystemRef {
    pub system: Option<String>,
    pub file: Option<PathBuf>,
    pub params: CatalogParams,
}

impl SystemRef {
    pub fn load(&self, checked: bool) -> Result<BranchedSystem> {
        match (&self.system, &self.file) {
            (Some(_), Some(_)) => Err(Error::param("give either a catalog system or a system file, not both")),
            (None, None) => Err(Error::param("no system given (use --system NAME or --file PATH)")),
            (Some(name), None) => build_catalog(name.parse::<CatalogName>()?, &self.params),
            (None, Some(path)) if checked => load_system_file(path),
            (None, Some(path)) => load_system_file_unchecked(path),
        }
    }
}

pub fn parse_p(spec: &PSpec) -> Result<ProbVector> {
    match spec {
        PSpec::Weights(w) => ProbVector::new(w.clone()),
        PSpec::Text(t) if Path::new(t).is_file() => ProbVector::read(t),
        PSpec::Text(t) => ProbVector::parse(t),
    }
}

/// `"3"` is the single value 3; `"1..3"` and `"1..=3"` are inclusive ranges.
pub fn parse_l_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::param(format!("bad L range '{text}' (expected N or A..B)"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(text)?;
            (n, n)
        }
    };
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn l_value(v: &toml::Value) -> Result<String> {
    match v {
        toml::Value::Integer(n) => Ok(n.to_string()),
        toml::Value::String(s) => Ok(s.clone()),
        other => Err(Error::param(format!("L must be an integer or a range string, got {other}"))),
    }
}

/// Budget from the flag, the file, the environment, or the library default.
pub fn budget(flag: Option<u128>, file: Option<u128>) -> Result<u128> {
    if let Some(b) = flag.or(file) {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::param(format!("{BUDGET_ENV}='{v}' is not a word count"))),
        Err(_) => Ok(branchdim::measures::DEFAULT_BUDGET),
    }
}

/// Explicit format, else inferred from the output extension, else text.
pub fn format(flag: Option<Format>, file: Option<Format>, output: Option<&Path>) -> Format {
    flag.or(file).unwrap_or_else(|| match output.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        _ => Format::Text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_ranges() {
        assert_eq!(parse_l_range("3").unwrap(), (3, 3));
        assert_eq!(parse_l_range("1..3").unwrap(), (1, 3));
        assert_eq!(parse_l_range("2..=4").unwrap(), (2, 4));
        assert!(parse_l_range("0").is_err());
        assert!(parse_l_range("3..1").is_err());
        assert!(parse_l_range("x").is_err());
    }

    #[test]
    fn format_inference() {
        assert_eq!(format(None, None, Some(Path::new("a.json"))), Format::Json);
        assert_eq!(format(Some(Format::Csv), None, Some(Path::new("a.json"))), Format::Csv);
        assert_eq!(format(None, Some(Format::Json), None), Format::Json);
        assert_eq!(format(None, None, None), Format::Text);
    }

    #[test]
    fn run_file_sections() {
        let run: RunFile = toml::from_str("system = \"gauss\"\n[dim]\np = \"1/2,1/2\"\ndepth = 3\n[maximize]\nL = \"1..3\"\n").unwrap();
        assert_eq!(run.dim.depth, Some(3));
        assert_eq!(l_value(run.maximize.l.as_ref().unwrap()).unwrap(), "1..3");
        assert!(toml::from_str::<RunFile>("sytem = 1").is_err());
    }
}
