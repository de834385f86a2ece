//! Run configuration: TOML (or JSON, by extension) with every table optional
//! except the surface.

use std::path::{Path, PathBuf};

use flute_core::criterion::Thresholds;
use flute_core::families;
use flute_core::oracle::SvgStyle;
use flute_core::patchwork::{validate_restricted, Patchwork, RestrictedPatchwork};
use flute_core::{ClassifyOptions, FluteError, FluteSurface, SequenceSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_DEPTH: usize = 200;
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub lengths: SequenceSpec,
    pub twists: SequenceSpec,
}

/// How the patchwork is chosen.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatchworkConfig {
    /// Restricted with `v_2 = +1` for the oracle; the classifier picks its own.
    #[default]
    Auto,
    /// Restricted patchwork with the given `v_2`, later signs forced or kept.
    Restricted { v2: i8 },
    /// An explicit restricted `v` or generalized `(v_prime, w)`.
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<Vec<i8>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_prime: Option<Vec<i8>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w: Option<Vec<u8>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub beam_width: usize,
    pub exhaustive_up_to: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        let d = ClassifyOptions::default();
        SearchConfig {
            beam_width: d.beam_width,
            exhaustive_up_to: d.exhaustive_up_to,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Name of a built-in family, instead of `[surface]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceConfig>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Working precision in bits; the top of the precision ladder.
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default)]
    pub patchwork: PatchworkConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub render: SvgStyle,
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

/// A validated configuration with its surface resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub surface: FluteSurface,
}

fn field(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config(format!("{field}: {}", message.into()))
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<Resolved, CliError> {
    resolve(read_config(path)?)
}

/// Reads a configuration file without the semantic checks, so command-line
/// overrides can be applied first.
pub fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text, is_json(path))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn parse_str(text: &str, is_json: bool) -> Result<RunConfig, CliError> {
    if is_json {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    } else {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
    }
}

/// Reads a stand-alone patchwork table (the contents of `[patchwork]`).
pub fn parse_patchwork(path: &Path) -> Result<PatchworkConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if is_json(path) {
        serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!("patchwork line {}, column {}: {e}", e.line(), e.column()))
        })
    } else {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("patchwork: {}", e.to_string().trim_end())))
    }
}

/// Semantic checks; every error names the offending field.
pub fn resolve(config: RunConfig) -> Result<Resolved, CliError> {
    let surface = match (&config.family, &config.surface) {
        (Some(name), None) => families::by_name(name)
            .ok_or_else(|| {
                let known: Vec<_> = families::all().iter().map(|f| f.name).collect();
                field("family", format!("unknown family {name:?}; known: {}", known.join(", ")))
            })?
            .surface,
        (None, Some(s)) => FluteSurface::new(s.lengths.clone(), s.twists.clone()),
        (Some(_), Some(_)) => return Err(field("surface", "give either `family` or `[surface]`, not both")),
        (None, None) => return Err(field("surface", "missing; give `family` or a `[surface]` table")),
    };
    if config.depth < 2 {
        return Err(field("depth", format!("must be at least 2, got {}", config.depth)));
    }
    if config.precision < 53 {
        return Err(field("precision", format!("must be at least 53 bits, got {}", config.precision)));
    }
    let th = &config.thresholds;
    if !(th.divergent_slope > 0.0) {
        return Err(field("thresholds.divergent_slope", "must be positive"));
    }
    if !(th.convergent_term_decay > 0.0) {
        return Err(field("thresholds.convergent_term_decay", "must be positive"));
    }
    if config.search.beam_width == 0 {
        return Err(field("search.beam_width", "must be positive"));
    }
    // Coordinates through ℓ_{depth+2} feed the shears and the search.
    for n in 1..=config.depth + 2 {
        surface.eval_coordinates(n)?;
    }
    validate_patchwork(&config.patchwork, &surface)?;
    Ok(Resolved { config, surface })
}

fn validate_patchwork(p: &PatchworkConfig, surface: &FluteSurface) -> Result<(), CliError> {
    match p {
        PatchworkConfig::Auto => Ok(()),
        PatchworkConfig::Restricted { v2 } => {
            if *v2 == 1 || *v2 == -1 {
                Ok(())
            } else {
                Err(field("patchwork.v2", "must be 1 or -1"))
            }
        }
        PatchworkConfig::Explicit { v, v_prime, w } => match (v, v_prime, w) {
            (Some(v), None, None) => {
                let r = RestrictedPatchwork::new(v.clone())?;
                if r.len() >= 2 {
                    validate_restricted(&r, surface, r.len())?;
                }
                Ok(())
            }
            (None, Some(vp), Some(w)) => {
                let p = Patchwork::new(vp.clone(), w.clone())?;
                Ok(p.check(true)?)
            }
            _ => Err(field(
                "patchwork",
                "explicit mode takes either `v`, or both `v_prime` and `w`",
            )),
        },
    }
}

impl Resolved {
    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            depth: self.config.depth,
            beam_width: self.config.search.beam_width,
            exhaustive_up_to: self.config.search.exhaustive_up_to,
            thresholds: self.config.thresholds,
        }
    }

    /// The patchwork used for development, with at least `pants` pairs of pants.
    pub fn patchwork(&self, pants: usize) -> Result<Patchwork, CliError> {
        use flute_core::patchwork::reduce_to_patchwork;
        let p = match &self.config.patchwork {
            PatchworkConfig::Auto => reduce_to_patchwork(
                &RestrictedPatchwork::canonical(&self.surface, pants)?,
            ),
            PatchworkConfig::Restricted { v2 } => reduce_to_patchwork(
                &RestrictedPatchwork::with_v2(&self.surface, pants, *v2)?,
            ),
            PatchworkConfig::Explicit { v: Some(v), .. } => {
                reduce_to_patchwork(&RestrictedPatchwork::new(v.clone())?)
            }
            PatchworkConfig::Explicit {
                v_prime: Some(vp),
                w: Some(w),
                ..
            } => Patchwork::new(vp.clone(), w.clone())?,
            PatchworkConfig::Explicit { .. } => unreachable!("rejected by validation"),
        };
        if p.pants() < pants {
            return Err(CliError::from_core(FluteError::Validation {
                field: "patchwork",
                index: p.pants() + 1,
                message: format!("{} pairs of pants given, {pants} needed at this depth", p.pants()),
            }));
        }
        Ok(p)
    }

    /// The restricted patchwork, when the configuration names one.
    pub fn restricted(&self, len: usize) -> Result<Option<RestrictedPatchwork>, CliError> {
        Ok(match &self.config.patchwork {
            PatchworkConfig::Auto => None,
            PatchworkConfig::Restricted { v2 } => {
                Some(RestrictedPatchwork::with_v2(&self.surface, len, *v2)?)
            }
            PatchworkConfig::Explicit { v: Some(v), .. } => {
                Some(RestrictedPatchwork::new(v.clone())?)
            }
            PatchworkConfig::Explicit { .. } => None,
        })
    }
}
