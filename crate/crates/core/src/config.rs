//! Line-oriented design files.
//!
//! ```text
//! # two stars with center loops, loop removed from the product
//! star 5 center
//! star 3 center
//! remove_loop true
//! workers 4
//! ```
//!
//! Each `star` line adds a factor: the number of points and an optional loop
//! placement (`none`, `center`, `leaf`; default `none`). Other keys are
//! `remove_loop`, `mixed_loops`, `split`, `workers`, `threads`, `out`,
//! `memory_budget` and `one_based`. `#` starts a comment.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::design::{DesignError, FactorSpec, GraphDesign, LoopPlacement};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Design {
        line: usize,
        #[source]
        source: DesignError,
    },
    #[error("no `star` lines in configuration")]
    NoFactors,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignConfig {
    pub design: GraphDesign,
    pub split: Option<usize>,
    pub workers: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub memory_budget: Option<u64>,
    pub one_based: bool,
}

impl DesignConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        text.parse()
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: Option<&str>) -> Result<T, ConfigError> {
    let value = value.ok_or_else(|| ConfigError::Parse {
        line,
        message: format!("`{key}` needs a value"),
    })?;
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("invalid value `{value}` for `{key}`"),
    })
}

impl FromStr for DesignConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut factors: Vec<(usize, FactorSpec)> = Vec::new();
        let mut remove_loop = (0, false);
        let mut mixed_loops = false;
        let mut cfg = (None, None, None, None, None, false);

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut words = content.split_whitespace();
            let key = words.next().expect("non-empty line");
            let value = words.next();
            let extra = match key {
                "star" => {
                    let m_hat: u64 = parse_value(line, key, value)?;
                    let placement = match words.next() {
                        Some(p) => p
                            .parse::<LoopPlacement>()
                            .map_err(|source| ConfigError::Design { line, source })?,
                        None => LoopPlacement::None,
                    };
                    let f = FactorSpec::new(m_hat, placement)
                        .map_err(|source| ConfigError::Design { line, source })?;
                    factors.push((line, f));
                    words.next()
                }
                "remove_loop" => {
                    remove_loop = (line, parse_value(line, key, value)?);
                    words.next()
                }
                "mixed_loops" => {
                    mixed_loops = parse_value(line, key, value)?;
                    words.next()
                }
                "split" => {
                    cfg.0 = Some(parse_value(line, key, value)?);
                    words.next()
                }
                "workers" => {
                    cfg.1 = Some(parse_value(line, key, value)?);
                    words.next()
                }
                "threads" => {
                    cfg.2 = Some(parse_value(line, key, value)?);
                    words.next()
                }
                "out" => {
                    cfg.3 = Some(PathBuf::from(parse_value::<String>(line, key, value)?));
                    words.next()
                }
                "memory_budget" => {
                    cfg.4 = Some(parse_value(line, key, value)?);
                    words.next()
                }
                "one_based" => {
                    cfg.5 = parse_value(line, key, value)?;
                    words.next()
                }
                other => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            };
            if let Some(word) = extra {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("unexpected `{word}`"),
                });
            }
        }

        if factors.is_empty() {
            return Err(ConfigError::NoFactors);
        }
        if !mixed_loops {
            let first = factors[0].1.placement();
            if let Some((line, f)) = factors.iter().find(|(_, f)| f.placement() != first) {
                return Err(ConfigError::Design {
                    line: *line,
                    source: DesignError::MixedLoops(format!("{first} then {}", f.placement())),
                });
            }
        }
        let specs = factors.iter().map(|(_, f)| *f).collect();
        let design = if mixed_loops {
            GraphDesign::with_mixed_loops(specs, remove_loop.1)
        } else {
            GraphDesign::new(specs, remove_loop.1)
        }
        .map_err(|source| ConfigError::Design {
            line: remove_loop.0,
            source,
        })?;

        let (split, workers, threads, out, memory_budget, one_based) = cfg;
        Ok(DesignConfig {
            design,
            split,
            workers,
            threads,
            out,
            memory_budget,
            one_based,
        })
    }
}
