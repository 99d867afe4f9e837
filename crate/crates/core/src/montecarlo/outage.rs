use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{ChannelRealization, LinkGains, SnrPoint};
use super::mutual_info::{mutual_info_iml, mutual_info_upper, NumericalFailure};
use super::regression::{fit_outage_slope, usable_points, SlopeFit};
use crate::error::{DmtError, Result};
use crate::model::{AntennaConfig, Csit, MultiplexingGainPair, ScalingExponents};

/// Samples per independently seeded chunk. Chunks, not threads, own the
/// random streams, so counts do not depend on the worker count.
pub const CHUNK_SAMPLES: u64 = 1 << 16;

/// Resampling attempts per sample before a numerical failure is fatal.
const MAX_RETRIES: u32 = 100;

pub const DEFAULT_MIN_HITS: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutageEvent {
    /// Link 1's single-user bound falls below its rate.
    #[serde(rename = "1")]
    Link1,
    #[serde(rename = "2")]
    Link2,
    /// The sum bound falls below the sum rate.
    #[serde(rename = "s")]
    Sum,
    /// Any of the three.
    #[serde(rename = "union")]
    Union,
}

impl OutageEvent {
    pub const ALL: [OutageEvent; 4] = [Self::Link1, Self::Link2, Self::Sum, Self::Union];

    pub fn name(self) -> &'static str {
        match self {
            Self::Link1 => "1",
            Self::Link2 => "2",
            Self::Sum => "s",
            Self::Union => "union",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Parameters of an outage simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub cfg: AntennaConfig,
    pub alphas: ScalingExponents,
    pub gains: MultiplexingGainPair,
    pub csit: Csit,
    pub snr_grid_db: Vec<f64>,
    pub samples_per_point: u64,
    pub seed: u64,
    /// Points with fewer outages than this are left out of slope fits.
    pub min_hits: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.alphas.validate()?;
        MultiplexingGainPair::new(self.gains.r1, self.gains.r2)?;
        if self.snr_grid_db.len() < 3 {
            return Err(DmtError::InvalidConfig(format!(
                "slope estimation needs >= 3 SNR points, got {}",
                self.snr_grid_db.len()
            )));
        }
        for &db in &self.snr_grid_db {
            SnrPoint::new(db)?;
        }
        if self.samples_per_point == 0 {
            return Err(DmtError::InvalidConfig(
                "samples per point must be >= 1".into(),
            ));
        }
        if self.min_hits == 0 {
            return Err(DmtError::InvalidConfig("min_hits must be >= 1".into()));
        }
        Ok(())
    }
}

/// Raw outage counts at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCounts {
    pub rho_db: f64,
    pub samples: u64,
    /// Indexed like [`OutageEvent::ALL`].
    pub outages: [u64; 4],
    /// Draws discarded after a log-det failed and redrawn.
    pub rejected: u64,
}

impl PointCounts {
    pub fn outages(&self, event: OutageEvent) -> u64 {
        self.outages[event.index()]
    }

    pub fn probability(&self, event: OutageEvent) -> f64 {
        self.outages(event) as f64 / self.samples as f64
    }
}

/// Counts for the whole SNR sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageCounts {
    pub points: Vec<PointCounts>,
}

/// Per-event slopes; `None` where fewer than 3 points had enough hits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub points: Vec<PointCounts>,
    pub link1: Option<SlopeFit>,
    pub link2: Option<SlopeFit>,
    pub sum: Option<SlopeFit>,
    /// Fit on the union event: the channel's diversity estimate.
    pub composed: SlopeFit,
}

impl OutageCounts {
    fn triples(&self, event: OutageEvent) -> Vec<(f64, u64, u64)> {
        self.points
            .iter()
            .map(|p| (p.rho_db, p.outages(event), p.samples))
            .collect()
    }

    pub fn fit(&self, event: OutageEvent, min_hits: u64) -> Option<SlopeFit> {
        fit_outage_slope(&self.triples(event), min_hits)
    }

    /// Fits every event; fails when the union event has too few usable points.
    pub fn estimate(&self, min_hits: u64) -> Result<OutageEstimate> {
        let composed = self.fit(OutageEvent::Union, min_hits).ok_or_else(|| {
            DmtError::InsufficientOutageEvents {
                usable: usable_points(&self.triples(OutageEvent::Union), min_hits),
                min_hits,
            }
        })?;
        Ok(OutageEstimate {
            points: self.points.clone(),
            link1: self.fit(OutageEvent::Link1, min_hits),
            link2: self.fit(OutageEvent::Link2, min_hits),
            sum: self.fit(OutageEvent::Sum, min_hits),
            composed,
        })
    }

    /// CSV with columns `rho_db,event,outages,samples`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho_db,event,outages,samples\n");
        for p in &self.points {
            for e in OutageEvent::ALL {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    p.rho_db,
                    e.name(),
                    p.outages(e),
                    p.samples
                ));
            }
        }
        out
    }
}

/// Which events one channel draw triggers.
fn outage_flags(
    real: &ChannelRealization,
    g: &LinkGains,
    csit: Csit,
    rates: (f64, f64),
) -> std::result::Result<[bool; 3], NumericalFailure> {
    let (i1, i2, is) = match csit {
        Csit::Full => {
            let b = mutual_info_upper(real, g)?;
            (b.i_b1, b.i_b2, b.i_bs)
        }
        Csit::None => {
            let b = mutual_info_iml(real, g)?;
            (b.i_c1, b.i_c2, b.i_cs)
        }
    };
    Ok([i1 < rates.0, i2 < rates.1, is < rates.0 + rates.1])
}

fn run_chunk(mc: &McConfig, point: usize, chunk: u64, n: u64) -> Result<([u64; 4], u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    rng.set_stream(((point as u64) << 32) | chunk);
    let snr = SnrPoint::new(mc.snr_grid_db[point])?;
    let g = snr.gains(&mc.alphas);
    let log_rho = g.rho.log2();
    let rates = (mc.gains.r1 * log_rho, mc.gains.r2 * log_rho);
    let mut counts = [0u64; 4];
    let mut rejected = 0u64;
    for _ in 0..n {
        let mut attempts = 0;
        let flags = loop {
            let real = ChannelRealization::sample(&mc.cfg, &mut rng);
            match outage_flags(&real, &g, mc.csit, rates) {
                Ok(f) => break f,
                Err(NumericalFailure) => {
                    rejected += 1;
                    attempts += 1;
                    if attempts >= MAX_RETRIES {
                        return Err(DmtError::InvalidConfig(format!(
                            "log-det failed {MAX_RETRIES} times in a row at {} dB",
                            snr.rho_db
                        )));
                    }
                }
            }
        };
        for (c, f) in counts.iter_mut().zip(flags) {
            *c += f as u64;
        }
        counts[OutageEvent::Union.index()] += flags.iter().any(|&f| f) as u64;
    }
    Ok((counts, rejected))
}

/// Draws `samples_per_point` channels at each SNR and counts outages.
///
/// Work is split into chunks of [`CHUNK_SAMPLES`] draws. Chunk `c` of point
/// `k` uses a ChaCha8 generator seeded with `seed` on stream `(k << 32) | c`,
/// so the counts are bit-identical for any rayon pool size.
pub fn simulate_outage(mc: &McConfig) -> Result<OutageCounts> {
    mc.validate()?;
    let chunks = mc.samples_per_point.div_ceil(CHUNK_SAMPLES);
    let mut points = Vec::with_capacity(mc.snr_grid_db.len());
    for (k, &rho_db) in mc.snr_grid_db.iter().enumerate() {
        let results: Vec<([u64; 4], u64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let n = CHUNK_SAMPLES.min(mc.samples_per_point - c * CHUNK_SAMPLES);
                run_chunk(mc, k, c, n)
            })
            .collect::<Result<_>>()?;
        let mut outages = [0u64; 4];
        let mut rejected = 0;
        for (counts, rej) in results {
            for (o, c) in outages.iter_mut().zip(counts) {
                *o += c;
            }
            rejected += rej;
        }
        points.push(PointCounts {
            rho_db,
            samples: mc.samples_per_point,
            outages,
            rejected,
        });
    }
    Ok(OutageCounts { points })
}

/// Simulates and fits in one step.
pub fn estimate_outage_slope(mc: &McConfig) -> Result<OutageEstimate> {
    simulate_outage(mc)?.estimate(mc.min_hits)
}
