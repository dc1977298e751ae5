//! `dgl.toml` settings. Command-line flags take precedence, then the
//! environment, then this file.

use std::path::Path;

use serde::Deserialize;

use crate::solver::{InputMode, SolverConfig, SOLVER_ENV};

pub const CONFIG_FILE: &str = "dgl.toml";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub llm: LlmSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub cmd: Option<String>,
    pub input: Option<InputMode>,
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmSection {
    pub model: Option<String>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub samples: Option<usize>,
    pub max_repairs: Option<usize>,
    pub workers: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Reads `path`, or `dgl.toml` in the working directory when present.
    pub fn load(path: Option<&Path>) -> Result<Config, String> {
        let path = match path {
            Some(p) => p.to_path_buf(),
            None if Path::new(CONFIG_FILE).is_file() => CONFIG_FILE.into(),
            None => return Ok(Config::default()),
        };
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn solver(&self, flag: Option<&str>) -> SolverConfig {
        let env = std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty());
        let mut config = match flag.map(str::to_string).or(env).or_else(|| self.solver.cmd.clone()) {
            Some(line) => SolverConfig::from_command_line(&line),
            None => SolverConfig::default(),
        };
        if let Some(mode) = self.solver.input {
            config.input = mode;
        }
        config
    }
}
