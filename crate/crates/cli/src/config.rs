//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use zic_dmt::curve::{GainSweep, RGrid};
use zic_dmt::model::{AntennaConfig, Csit, MultiplexingGainPair, ScalingExponents};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every field optional; a missing field falls back to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub antennas: Option<[usize; 4]>,
    pub alphas: Option<[f64; 3]>,
    pub r_start: Option<f64>,
    pub r_stop: Option<f64>,
    pub r_step: Option<f64>,
    pub gains: Option<Vec<[f64; 2]>>,
    pub csit: Option<Csit>,
    pub snr_grid_db: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub min_hits: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(self, flags: FileConfig) -> FileConfig {
        FileConfig {
            antennas: flags.antennas.or(self.antennas),
            alphas: flags.alphas.or(self.alphas),
            r_start: flags.r_start.or(self.r_start),
            r_stop: flags.r_stop.or(self.r_stop),
            r_step: flags.r_step.or(self.r_step),
            gains: flags.gains.or(self.gains),
            csit: flags.csit.or(self.csit),
            snr_grid_db: flags.snr_grid_db.or(self.snr_grid_db),
            samples: flags.samples.or(self.samples),
            seed: flags.seed.or(self.seed),
            min_hits: flags.min_hits.or(self.min_hits),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
        }
    }
}

pub const DEFAULT_R_STEP: f64 = 0.1;
pub const DEFAULT_SNR_GRID_DB: [f64; 6] = [15.0, 20.0, 25.0, 30.0, 35.0, 40.0];
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub antennas: AntennaConfig,
    pub alphas: ScalingExponents,
    pub sweep: GainSweep,
    pub csit: Csit,
    pub snr_grid_db: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub min_hits: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(file: FileConfig) -> Result<Self> {
        let [m1, n1, m2, n2] = file.antennas.unwrap_or([1, 1, 1, 1]);
        let antennas = AntennaConfig::new(m1, n1, m2, n2)?;
        let [a11, a21, a22] = file.alphas.unwrap_or([1.0, 1.0, 1.0]);
        let alphas = ScalingExponents::new(a11, a21, a22)?;
        let sweep = match file.gains {
            Some(pairs) => {
                if pairs.is_empty() {
                    bail!("gains list is empty");
                }
                GainSweep::Pairs(
                    pairs
                        .iter()
                        .map(|&[r1, r2]| MultiplexingGainPair::new(r1, r2))
                        .collect::<zic_dmt::error::Result<_>>()?,
                )
            }
            None => {
                // default sweep covers every symmetric gain both links support
                let max = (antennas.q1() as f64 * alphas.alpha11)
                    .min(antennas.q2() as f64 * alphas.alpha22);
                let grid = RGrid {
                    start: file.r_start.unwrap_or(0.0),
                    stop: file.r_stop.unwrap_or(max),
                    step: file.r_step.unwrap_or(DEFAULT_R_STEP),
                };
                grid.validate()?;
                GainSweep::Symmetric(grid)
            }
        };
        Ok(Self {
            antennas,
            alphas,
            sweep,
            csit: file.csit.unwrap_or(Csit::Full),
            snr_grid_db: file
                .snr_grid_db
                .unwrap_or_else(|| DEFAULT_SNR_GRID_DB.to_vec()),
            samples: file.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: file.seed.unwrap_or(DEFAULT_SEED),
            min_hits: file
                .min_hits
                .unwrap_or(zic_dmt::montecarlo::DEFAULT_MIN_HITS),
            out: file.out,
            format: file.format.unwrap_or_default(),
        })
    }

    /// The single gain pair used by commands that need one: the first
    /// explicit pair, else `r1 = r2 = r_start`.
    pub fn first_gains(&self) -> Result<MultiplexingGainPair> {
        Ok(match &self.sweep {
            GainSweep::Pairs(p) => p[0],
            GainSweep::Symmetric(g) => MultiplexingGainPair::symmetric(g.start)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file = FileConfig {
            antennas: Some([2, 2, 2, 2]),
            seed: Some(9),
            ..Default::default()
        };
        let flags = FileConfig {
            seed: Some(3),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.antennas, Some([2, 2, 2, 2]));
        assert_eq!(merged.seed, Some(3));
    }

    #[test]
    fn defaults() {
        let rc = RunConfig::resolve(FileConfig::default()).unwrap();
        assert_eq!(rc.antennas, AntennaConfig::symmetric(1).unwrap());
        assert_eq!(
            rc.sweep,
            GainSweep::Symmetric(RGrid {
                start: 0.0,
                stop: 1.0,
                step: 0.1
            })
        );
        assert_eq!(rc.format, Format::Csv);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"antenas": [1,1,1,1]}"#).is_err());
        let f: FileConfig =
            serde_json::from_str(r#"{"csit": "none", "gains": [[0.1, 0.2]]}"#).unwrap();
        assert_eq!(f.csit, Some(Csit::None));
    }
}
