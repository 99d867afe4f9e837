//! Monte-Carlo outage simulation on Rayleigh channels.
//!
//! Draws channel triples, evaluates the log-det rate bounds, counts how often
//! each bound falls below its target rate `r log2(rho)`, and regresses the
//! diversity slope from the SNR sweep.

mod channel;
mod mutual_info;
mod outage;
mod regression;

pub use channel::{complex_gaussian, CMatrix, ChannelRealization, LinkGains, SnrPoint};
pub use mutual_info::{
    iml_bracket_constant, log2_det_hpd, lower_from_upper, mutual_info_iml, mutual_info_lower,
    mutual_info_upper, sum_bound_decomposition, ImlBounds, LowerBounds, NumericalFailure,
    UpperBounds,
};
pub use outage::{
    estimate_outage_slope, simulate_outage, McConfig, OutageCounts, OutageEstimate, OutageEvent,
    PointCounts, CHUNK_SAMPLES, DEFAULT_MIN_HITS,
};
pub use regression::{fit_line, fit_outage_slope, usable_points, SlopeFit};
