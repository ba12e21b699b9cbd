//! Run configuration: truncation profile, target and output path.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gwcone_core::correlators::TableJson;
use gwcone_core::{genus0_point_table, ConeTruncation, CorrelatorTable, Target};

/// Raised for configurations that are rejected before any computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Bounds shared by all commands: coefficient degree, descendant depth,
/// genus and the number of negative z-powers kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationProfile {
    pub deg: u32,
    pub depth: u32,
    pub genus: u32,
    pub zdepth: u32,
}

impl Default for TruncationProfile {
    fn default() -> Self {
        TruncationProfile {
            deg: 6,
            depth: 4,
            genus: 2,
            zdepth: 5,
        }
    }
}

impl TruncationProfile {
    /// Parses `deg=6,depth=4,genus=2,zdepth=5`; omitted keys keep defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = TruncationProfile::default();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| usage(format!("truncation entry `{part}` is not key=value")))?;
            let value: u32 = value
                .trim()
                .parse()
                .map_err(|_| usage(format!("truncation value `{value}` is not a non-negative integer")))?;
            match key.trim() {
                "deg" => p.deg = value,
                "depth" => p.depth = value,
                "genus" => p.genus = value,
                "zdepth" => p.zdepth = value,
                other => return Err(usage(format!("unknown truncation key `{other}`"))),
            }
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.deg == 0 || self.zdepth == 0 {
            return Err(usage("degree and z-depth bounds must be positive"));
        }
        Ok(())
    }

    /// Cone commands need every input z-power to have a matching output
    /// z-power.
    pub fn validate_cone(&self) -> Result<()> {
        self.validate()?;
        if self.zdepth < self.depth {
            return Err(usage(format!(
                "z-depth {} is smaller than the descendant depth {}",
                self.zdepth, self.depth
            )));
        }
        Ok(())
    }

    pub fn cone(&self) -> ConeTruncation {
        ConeTruncation::new(self.depth, self.zdepth)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSpec {
    Point,
    /// A correlator table file; the target and its algebra are read from it.
    Table(PathBuf),
}

impl TargetSpec {
    pub fn parse(text: &str) -> Self {
        match text {
            "point" | "pt" => TargetSpec::Point,
            path => TargetSpec::Table(PathBuf::from(path)),
        }
    }

    pub fn target(&self) -> Result<Target> {
        match self {
            TargetSpec::Point => Ok(Target::point()),
            TargetSpec::Table(path) => Ok(load_table(path)?.target().clone()),
        }
    }

    /// Genus-zero correlators for cone computations with coefficient
    /// degree `≤ deg`.
    pub fn cone_table(&self, deg: u32) -> Result<CorrelatorTable> {
        match self {
            TargetSpec::Point => Ok(genus0_point_table(deg)?),
            TargetSpec::Table(path) => load_table(path),
        }
    }
}

fn load_table(path: &Path) -> Result<CorrelatorTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading table {}", path.display()))?;
    let json: TableJson = serde_json::from_str(&text).map_err(|e| usage(format!("table {}: {e}", path.display())))?;
    CorrelatorTable::from_json(&json).map_err(|e| usage(format!("table {}: {e}", path.display())))
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub truncation: TruncationProfile,
    pub target: TargetSpec,
    pub output: Option<PathBuf>,
}

/// Reads a JSON argument given inline or as `@path`.
pub fn json_argument(arg: &str) -> Result<serde_json::Value> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid JSON argument: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_parsing() {
        let p = TruncationProfile::parse("deg=3, zdepth=7").unwrap();
        assert_eq!(
            p,
            TruncationProfile {
                deg: 3,
                zdepth: 7,
                ..TruncationProfile::default()
            }
        );
        assert_eq!(TruncationProfile::parse("").unwrap(), TruncationProfile::default());
        for bad in ["deg", "deg=-1", "width=3"] {
            assert!(TruncationProfile::parse(bad)
                .unwrap_err()
                .downcast_ref::<UsageError>()
                .is_some());
        }
    }

    #[test]
    fn cone_bounds_are_consistent() {
        let p = TruncationProfile {
            depth: 6,
            zdepth: 5,
            ..TruncationProfile::default()
        };
        assert!(p.validate().is_ok());
        assert!(p.validate_cone().is_err());
        assert!(TruncationProfile { deg: 0, ..p }.validate().is_err());
    }
}
