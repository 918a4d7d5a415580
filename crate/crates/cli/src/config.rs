//! TOML run configuration. Command-line flags take precedence over the file,
//! the file over the per-example presets.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use assoc_core::hl::{BoundaryFamily, SolverConfig};
use assoc_core::Tolerances;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Relative output paths are resolved against this directory when set.
pub const OUT_DIR_ENV: &str = "ASSOC_OUT_DIR";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub verify: VerifySection,
    pub solve: SolveSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub skip_christoffel: bool,
    /// Partial overrides of the example's tolerance preset.
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSection {
    pub n: Option<usize>,
    pub amplitude: Option<f64>,
    pub boundary: Option<BoundaryFamily>,
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                Self::from_toml(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
            }
        }
    }
}

/// Parses `key=value` tolerance overrides.
pub fn parse_override(s: &str) -> CliResult<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| {
        CliError::Config(format!(
            "tolerance override {s:?} is not of the form key=value"
        ))
    })?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("tolerance override {s:?}: bad number")))?;
    Ok((k.trim().to_string(), v))
}

pub fn apply_overrides<'a>(
    tol: &mut Tolerances,
    pairs: impl IntoIterator<Item = (&'a str, f64)>,
) -> CliResult<()> {
    for (k, v) in pairs {
        tol.set(k, v)?;
    }
    Ok(())
}

/// Resolves a relative output path against [`OUT_DIR_ENV`] and creates the
/// parent directory.
pub fn output_path(path: &Path) -> CliResult<PathBuf> {
    let resolved = match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    };
    if let Some(parent) = resolved.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    Ok(resolved)
}
