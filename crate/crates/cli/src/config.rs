use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use bjorling_core::curves::{CurveSpec, DEFAULT_CYCLOID_DELTA, DEFAULT_PARABOLA_HALF_WIDTH};

use crate::error::CliError;

pub const DEFAULT_NT: usize = 256;
pub const DEFAULT_NS: usize = 33;
pub const DEFAULT_S_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveName {
    Epitrochoid,
    Circle,
    Cycloid,
    Parabola,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand. All are optional so that a config file
/// can supply them; flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Geodesic curve.
    #[arg(long, value_enum)]
    pub curve: Option<CurveName>,
    /// Epitrochoid lobe parameter (k + 1 lobes).
    #[arg(long)]
    pub k: Option<u32>,
    /// Epitrochoid tracing distance.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Cycloid end trim.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Parabola parameter half-width.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Samples along the curve.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Samples across the strip.
    #[arg(long)]
    pub ns: Option<usize>,
    /// Strip half-width as a fraction of the distance to the nearest zero of speed^2.
    #[arg(long)]
    pub s_fraction: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON or TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub curve: Option<CurveSpec>,
    pub nt: Option<usize>,
    pub ns: Option<usize>,
    pub s_fraction: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub half_cut: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let is_toml = path.extension().is_some_and(|e| e == "toml");
        if is_toml {
            toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
        }
    }
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub curve: CurveSpec,
    pub nt: usize,
    pub ns: usize,
    pub s_fraction: f64,
    #[serde(skip)]
    pub out: PathBuf,
    pub format: Format,
    pub half_cut: bool,
    #[serde(skip)]
    pub sequential: bool,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, half_cut_flag: bool) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let curve = match args.curve {
            Some(name) => curve_from_flags(name, args)?,
            None => match file.curve {
                Some(c) => c,
                None => return Err(CliError::Invalid("no curve given (use --curve or a config file)".into())),
            },
        };
        let cfg = RunConfig {
            curve,
            nt: args.nt.or(file.nt).unwrap_or(DEFAULT_NT),
            ns: args.ns.or(file.ns).unwrap_or(DEFAULT_NS),
            s_fraction: args.s_fraction.or(file.s_fraction).unwrap_or(DEFAULT_S_FRACTION),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            format: args.format.or(file.format).unwrap_or_default(),
            half_cut: half_cut_flag || file.half_cut.unwrap_or(false),
            sequential: args.sequential,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.nt < 2 || self.ns < 2 {
            return Err(CliError::Invalid(format!("nt and ns must be >= 2 (got {} x {})", self.nt, self.ns)));
        }
        if !(self.s_fraction > 0.0 && self.s_fraction < 1.0) {
            return Err(CliError::Invalid(format!("s-fraction must lie in (0, 1), got {}", self.s_fraction)));
        }
        Ok(())
    }
}

fn curve_from_flags(name: CurveName, args: &CommonArgs) -> Result<CurveSpec, CliError> {
    Ok(match name {
        CurveName::Epitrochoid => CurveSpec::Epitrochoid {
            k: args.k.ok_or_else(|| CliError::Invalid("--curve epitrochoid needs --k".into()))?,
            lambda: args
                .lambda
                .ok_or_else(|| CliError::Invalid("--curve epitrochoid needs --lambda".into()))?,
        },
        CurveName::Circle => CurveSpec::Circle,
        CurveName::Cycloid => CurveSpec::Cycloid {
            delta: args.delta.unwrap_or(DEFAULT_CYCLOID_DELTA),
        },
        CurveName::Parabola => CurveSpec::Parabola {
            half_width: args.half_width.unwrap_or(DEFAULT_PARABOLA_HALF_WIDTH),
        },
    })
}
