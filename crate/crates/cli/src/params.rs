//! Parameters: command-line flags layered over an optional TOML file.
//!
//! The file may set the global options at top level and each command's
//! parameters in a table named after the command:
//!
//! ```toml
//! seed = 7
//!
//! [diamond]
//! mass = 5.0
//! eps_min = 0.0078125
//! ```
//!
//! Flags given on the command line win over the file, the file wins over
//! built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::output::Format;

/// Inverse temperature; `inf` selects the ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beta(pub f64);

impl FromStr for Beta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "ground" => Ok(Beta(f64::INFINITY)),
            other => other
                .parse::<f64>()
                .map(Beta)
                .map_err(|_| format!("invalid inverse temperature `{s}`")),
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Beta(v)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Top level of a configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileGlobals {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

pub struct ConfigFile {
    pub globals: FileGlobals,
    tables: toml::Table,
}

pub const COMMANDS: [&str; 8] = [
    "entropy",
    "renyi",
    "relative",
    "oracle-check",
    "kitaev",
    "cfs",
    "diamond",
    "random-density",
];

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let (line, column) = e
                .span()
                .map(|s| line_col(&text, s.start))
                .unwrap_or((1, 1));
            CliError::Parse {
                path: path.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let mut tables = toml::Table::new();
        for name in COMMANDS {
            if let Some(v) = table.remove(name) {
                tables.insert(name.to_string(), v);
            }
        }
        let globals = FileGlobals::deserialize(toml::Value::Table(table))
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self { globals, tables })
    }

    /// Parameters for `command`: fields set on the command line override the
    /// file's table.
    pub fn merge<T: Serialize + DeserializeOwned>(file: Option<&Self>, command: &str, cli: &T) -> CliResult<T> {
        let Some(table) = file.and_then(|f| f.tables.get(command)) else {
            return Ok(T::deserialize(serde_json::to_value(cli)?)?);
        };
        let from_file: T = table
            .clone()
            .try_into()
            .map_err(|e| CliError::Config(format!("[{command}]: {e}")))?;
        let mut merged = serde_json::to_value(from_file)?;
        if let (Value::Object(base), Value::Object(over)) = (&mut merged, serde_json::to_value(cli)?) {
            for (k, v) in over {
                if !v.is_null() {
                    base.insert(k, v);
                }
            }
        }
        serde_json::from_value(merged).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Site subsets: `all`, `contiguous` (`{0..k}` for every proper prefix),
/// `singletons`, or explicit sets `0,1;3` separated by semicolons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetSpec {
    All,
    Contiguous,
    Singletons,
    Explicit(Vec<Vec<usize>>),
}

/// Largest lattice for which `all` subsets may be requested.
pub const MAX_ALL_SUBSETS_SITES: usize = 12;

impl FromStr for SubsetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "all" => Ok(SubsetSpec::All),
            "contiguous" => Ok(SubsetSpec::Contiguous),
            "singletons" => Ok(SubsetSpec::Singletons),
            other => other
                .split(';')
                .map(|set| {
                    let set = set.trim();
                    if set.is_empty() {
                        return Ok(Vec::new());
                    }
                    set.split(',')
                        .map(|i| i.trim().parse::<usize>().map_err(|_| format!("invalid site index `{i}`")))
                        .collect()
                })
                .collect::<Result<_, _>>()
                .map(SubsetSpec::Explicit),
        }
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetSpec::All => f.write_str("all"),
            SubsetSpec::Contiguous => f.write_str("contiguous"),
            SubsetSpec::Singletons => f.write_str("singletons"),
            SubsetSpec::Explicit(sets) => {
                let parts: Vec<String> = sets
                    .iter()
                    .map(|s| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                f.write_str(&parts.join(";"))
            }
        }
    }
}

impl Serialize for SubsetSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SubsetSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl SubsetSpec {
    pub fn expand(&self, n: usize) -> CliResult<Vec<Vec<usize>>> {
        let sets = match self {
            SubsetSpec::All => {
                if n > MAX_ALL_SUBSETS_SITES {
                    return Err(CliError::Config(format!(
                        "`all` subsets needs at most {MAX_ALL_SUBSETS_SITES} sites, got {n}"
                    )));
                }
                (0..1usize << n)
                    .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
                    .collect()
            }
            SubsetSpec::Contiguous => (1..n).map(|k| (0..k).collect()).collect(),
            SubsetSpec::Singletons => (0..n).map(|i| vec![i]).collect(),
            SubsetSpec::Explicit(sets) => {
                for set in sets {
                    let mut sorted = set.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != set.len() || sorted.last().is_some_and(|&i| i >= n) {
                        return Err(CliError::Config(format!(
                            "subset {{{}}} is not a set of distinct sites below {n}",
                            format_sites(set)
                        )));
                    }
                }
                sets.clone()
            }
        };
        Ok(sets)
    }
}

/// `0 2 5`; an empty set prints as the empty string.
pub fn format_sites(sites: &[usize]) -> String {
    sites.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn require<T>(value: Option<T>, name: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required parameter `{name}`")))
}
