use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::engine::{CurveSet, Series};
use crate::analysis::Scheme;
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// Run manifest: the complete config (seed included) that produced the data
/// files next to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let config = value
            .get("config")
            .cloned()
            .ok_or_else(|| Error::InvalidConfig(format!("{} has no `config`", path.display())))?;
        Ok(Self {
            tool: value["tool"].as_str().unwrap_or_default().to_string(),
            version: value["version"].as_str().unwrap_or_default().to_string(),
            config: ExperimentConfig::from_value(config)?,
        })
    }
}

/// File stem of a series, e.g. `ber-relay-vs-snr_optimal` or
/// `ber-d1-vs-snr_nnc-none`. The target is appended when the experiment
/// produces more than one.
pub fn series_stem(curves: &CurveSet, s: &Series) -> String {
    let mut stem = format!("{}_", curves.experiment);
    if s.scheme == Scheme::Nnc {
        stem.push_str("nnc-");
    }
    let _ = write!(stem, "{}", s.mode);
    let targets = curves.experiment.targets();
    if targets.len() > 1 || targets[0] != s.target {
        stem.push_str(match s.target {
            crate::analysis::BerTarget::Relay => "-relay",
            crate::analysis::BerTarget::D1 => "-d1",
        });
    }
    stem
}

/// Writes `<stem>_th.dat` (`x ber`) and, when simulated, `<stem>_mc.dat`
/// (`x ber flag`, flag 1 for fewer than 100 observed errors) per series,
/// plus the manifest and a JSON summary. Returns the data files written.
pub fn write_curve(curves: &CurveSet, config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    if curves.series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::InvalidParameter("nothing to write: empty curve set".into()));
    }
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for s in &curves.series {
        let stem = series_stem(curves, s);
        let mut th = String::new();
        let mut mc = String::new();
        for p in &s.points {
            if let Some(a) = p.analytic {
                let _ = writeln!(th, "{} {}", p.x, a.mean);
            }
            if let Some(m) = p.monte_carlo {
                let _ = writeln!(mc, "{} {} {}", p.x, m.mean, p.low_count() as u8);
            }
        }
        let th_path = dir.join(format!("{stem}_th.dat"));
        std::fs::write(&th_path, th)?;
        written.push(th_path);
        if config.trials_per_realization > 0 {
            let mc_path = dir.join(format!("{stem}_mc.dat"));
            std::fs::write(&mc_path, mc)?;
            written.push(mc_path);
        }
    }
    let manifest = serde_json::to_string_pretty(&Manifest::new(config))?;
    std::fs::write(dir.join(MANIFEST_FILE), manifest + "\n")?;
    let summary = serde_json::to_string_pretty(&Summary::new(curves, &written))?;
    std::fs::write(dir.join(SUMMARY_FILE), summary + "\n")?;
    Ok(written)
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    files: Vec<String>,
    optimizations: usize,
    optimization_failures: usize,
    failure_rate: f64,
    /// Realizations whose optimisation stopped at the outer cap, per series.
    outer_capped: Vec<(String, usize)>,
    curves: &'a CurveSet,
}

impl<'a> Summary<'a> {
    fn new(curves: &'a CurveSet, files: &[PathBuf]) -> Self {
        Self {
            files: files
                .iter()
                .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                .collect(),
            optimizations: curves.optimizations,
            optimization_failures: curves.optimization_failures,
            failure_rate: curves.failure_rate(),
            outer_capped: curves
                .series
                .iter()
                .map(|s| (series_stem(curves, s), s.points.iter().map(|p| p.outer_capped).sum()))
                .collect(),
            curves,
        }
    }
}

/// One row of a `.dat` file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatRow {
    pub x: f64,
    pub y: f64,
    pub low_count: Option<bool>,
}

pub fn read_dat(path: &Path) -> Result<Vec<DatRow>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let bad = || Error::InvalidParameter(format!("{}: bad row `{line}`", path.display()));
            let cols: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
            match cols.as_slice() {
                [x, y] => Ok(DatRow { x: num(x)?, y: num(y)?, low_count: None }),
                [x, y, f] => Ok(DatRow {
                    x: num(x)?,
                    y: num(y)?,
                    low_count: Some(*f == "1"),
                }),
                _ => Err(bad()),
            }
        })
        .collect()
}
