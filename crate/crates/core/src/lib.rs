//! Diversity-multiplexing tradeoff of the two-user MIMO Z interference
//! channel.
//!
//! - [`ptp`]: point-to-point DMT curves.
//! - [`lp`]: piecewise-linear programs, an exact LP solver and a lattice
//!   oracle.
//! - [`exponents`]: the sum-rate outage exponent programs.
//! - [`closed_form`]: explicit DMTs, CSIT thresholds and the dispatching
//!   [`closed_form::full_dmt`].
//! - [`montecarlo`]: simulated outage and slope fits.
//! - [`curve`], [`validate`]: curve tables and self-check suites used by the
//!   command-line tool.
//!
//! ```
//! use zic_dmt::closed_form::{full_dmt, DmtQuery};
//! use zic_dmt::model::{AntennaConfig, Csit, MultiplexingGainPair, ScalingExponents};
//!
//! let q = DmtQuery {
//!     cfg: AntennaConfig::symmetric(1)?,
//!     alphas: ScalingExponents::unit(),
//!     gains: MultiplexingGainPair::symmetric(0.25)?,
//!     csit: Csit::Full,
//! };
//! assert_eq!(full_dmt(&q)?.value, 0.75);
//! # Ok::<(), zic_dmt::error::DmtError>(())
//! ```

pub mod closed_form;
pub mod curve;
pub mod error;
pub mod exponents;
pub mod lp;
pub mod model;
pub mod montecarlo;
pub mod ptp;
pub mod validate;

// Runs the code blocks of the guide as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ptp.md")]
    mod ptp {}
    #[doc = include_str!("../../../book/src/programs.md")]
    mod programs {}
    #[doc = include_str!("../../../book/src/exponents.md")]
    mod exponents {}
    #[doc = include_str!("../../../book/src/closed_forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/montecarlo.md")]
    mod montecarlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
