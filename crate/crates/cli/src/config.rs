use std::fs;
use std::path::Path;

use serde::Deserialize;
use startree_core::construction::{Addr, Region};
use startree_core::tree::ExportFormat;

use crate::cli::GlobalArgs;
use crate::Failure;

/// Optional defaults read from `--config`. Command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub max_level: Option<usize>,
    pub radius: Option<usize>,
    pub margin: Option<usize>,
    pub stability_k: Option<usize>,
    pub format: Option<String>,
    pub center: Option<String>,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Config {
    pub level: usize,
    pub radius: usize,
    margin: Option<usize>,
    pub stability_k: usize,
    pub format: ExportFormat,
    center: Option<Addr>,
}

impl Config {
    pub fn resolve(args: &GlobalArgs) -> Result<Config, Failure> {
        let file = match &args.config {
            Some(path) => load(path)?,
            None => FileConfig::default(),
        };
        let format = args
            .format
            .clone()
            .or(file.format)
            .map(|f| f.parse::<ExportFormat>().map_err(Failure::Usage))
            .transpose()?
            .unwrap_or(ExportFormat::Edgelist);
        let center = args
            .center
            .clone()
            .or(file.center)
            .map(|c| parse_addr(&c))
            .transpose()?;
        Ok(Config {
            level: args.level.or(file.max_level).unwrap_or(1),
            radius: args.radius.or(file.radius).unwrap_or(10),
            margin: args.margin.or(file.margin),
            stability_k: args.stability_k.or(file.stability_k).unwrap_or(3),
            format,
            center,
        })
    }

    pub fn margin(&self, level: usize) -> usize {
        self.margin.unwrap_or_else(|| Region::default_margin(level))
    }

    pub fn explicit_margin(&self) -> Option<usize> {
        self.margin
    }

    pub fn center(&self) -> Option<&Addr> {
        self.center.as_ref()
    }

    /// The configured center, or `base^level(ray(0))`.
    pub fn center_at(&self, level: usize) -> Addr {
        self.center.clone().unwrap_or_else(|| Addr::Ray(0).wrap(level))
    }

    pub fn region(&self, level: usize) -> Region {
        Region::new(self.center_at(level), self.radius, self.margin(level))
    }

    /// Warns about an explicit margin below half the radius; the per-level
    /// defaults are audited separately.
    pub fn warn_thin_margin(&self) {
        if let Some(m) = self.margin.filter(|m| 2 * m < self.radius) {
            eprintln!("warning: margin {m} is below half the radius {}", self.radius);
        }
    }
}

fn load(path: &Path) -> Result<FileConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

pub fn parse_addr(s: &str) -> Result<Addr, Failure> {
    s.parse::<Addr>()
        .map_err(|e| Failure::Usage(format!("bad address `{s}`: {e}")))
}
