use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::spectral::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    GapScan,
    EntropyScan,
    Effective,
    Necklaces,
    Fermion,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "verify" => Command::Verify,
            "gap-scan" => Command::GapScan,
            "entropy-scan" => Command::EntropyScan,
            "effective" => Command::Effective,
            "necklaces" => Command::Necklaces,
            "fermion" => Command::Fermion,
            _ => return Err(Error::Parse(format!("unknown command '{s}'"))),
        })
    }
}

/// A list of ring sizes: `5`, `3..5` (inclusive), `8,16,32` or a mix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeList(pub Vec<usize>);

impl FromStr for SizeList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad size list '{s}'"));
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| bad())?);
            }
        }
        if out.is_empty() {
            return Err(bad());
        }
        out.sort_unstable();
        out.dedup();
        Ok(SizeList(out))
    }
}

impl fmt::Display for SizeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Which invariant classes a gap scan covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassSelector {
    /// All-singlet class: gap above its zero mode.
    Singlet,
    /// `p = N − 1` with a single penalized shift.
    Worst,
    /// `--p` and `--bad`.
    Custom,
    /// Every necklace class, plus the other sectors for small `N`.
    All,
    /// Minimum over the singlet gap, single-penalty classes and sector bounds.
    Headline,
}

impl FromStr for ClassSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "singlet" => ClassSelector::Singlet,
            "worst" => ClassSelector::Worst,
            "custom" => ClassSelector::Custom,
            "all" => ClassSelector::All,
            "headline" => ClassSelector::Headline,
            other => return Err(Error::Parse(format!("unknown class selector '{other}'"))),
        })
    }
}

impl ClassSelector {
    pub fn name(&self) -> &'static str {
        match self {
            ClassSelector::Singlet => "singlet",
            ClassSelector::Worst => "worst",
            ClassSelector::Custom => "custom",
            ClassSelector::All => "all",
            ClassSelector::Headline => "headline",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    /// One JSON object per row, no envelope.
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            "jsonl" => OutputFormat::Jsonl,
            _ => return Err(Error::Parse(format!("unknown output format '{s}'"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub sizes: SizeList,
    /// Overrides of the default `V1 = 1/N⁴`, `V2 = 1`.
    pub v1: Option<f64>,
    pub v2: Option<f64>,
    pub classes: Vec<ClassSelector>,
    pub period: Option<usize>,
    pub bad_set: Vec<usize>,
    /// Eigenvalues reported by `effective`.
    pub k: usize,
    pub solver: SolverConfig,
    pub sites: Vec<i64>,
    pub times: Vec<f64>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let sizes = match command {
            Command::Verify | Command::EntropyScan => vec![3, 4, 5],
            Command::GapScan => vec![8, 16, 32, 64],
            Command::Effective => vec![8],
            Command::Necklaces => vec![4],
            Command::Fermion => vec![3],
        };
        Self {
            command,
            sizes: SizeList(sizes),
            v1: None,
            v2: None,
            classes: vec![ClassSelector::Singlet, ClassSelector::Worst],
            period: None,
            bad_set: Vec::new(),
            k: 4,
            solver: SolverConfig::default(),
            sites: vec![3],
            times: vec![1.0],
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn params(&self, n: usize) -> ModelParams {
        let d = ModelParams::new(n);
        ModelParams::with_potentials(n, self.v1.unwrap_or(d.v1), self.v2.unwrap_or(d.v2))
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Parse(format!("bad value '{value}' for {what}"));
        let num = |what: &str| value.parse::<f64>().map_err(|_| bad(what));
        let int = |what: &str| value.parse::<usize>().map_err(|_| bad(what));
        match key {
            "command" => self.command = value.parse()?,
            "n" => self.sizes = value.parse()?,
            "v1" => self.v1 = Some(num("v1")?),
            "v2" => self.v2 = Some(num("v2")?),
            "classes" => {
                self.classes = value.split(',').map(str::parse).collect::<Result<_>>()?;
                self.classes.sort();
                self.classes.dedup();
            }
            "p" => self.period = Some(int("p")?),
            "bad" => {
                self.bad_set = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| bad("bad")))
                    .collect::<Result<_>>()?;
                self.bad_set.sort_unstable();
                self.bad_set.dedup();
            }
            "k" => self.k = int("k")?,
            "tol" => self.solver.tol = num("tol")?,
            "seed" => self.solver.seed = value.parse().map_err(|_| bad("seed"))?,
            "max_iter" => self.solver.max_iter = int("max_iter")?,
            "dense_cap" => self.solver.dense_cap = int("dense_cap")?,
            "x" => {
                self.sites = value.split(',').map(|s| s.trim().parse().map_err(|_| bad("x"))).collect::<Result<_>>()?
            }
            "t" => {
                self.times = value.split(',').map(|s| s.trim().parse().map_err(|_| bad("t"))).collect::<Result<_>>()?
            }
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            _ => return Err(Error::Parse(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse_settings(text: &str) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'key = value'", no + 1)))?;
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(out)
    }

    /// Settings from a config file, applied over the defaults of `command`.
    /// A `command` key in the file must agree with `command`.
    pub fn from_file(command: Command, path: &Path) -> Result<Self> {
        let settings = Self::parse_settings(&std::fs::read_to_string(path)?)?;
        let mut cfg = Self::new(command);
        for (k, v) in &settings {
            if k == "command" && v.parse::<Command>()? != command {
                return Err(Error::InvalidInput(format!("config file is for '{v}'")));
            }
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}
