//! Channel parameters shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{DmtError, Result};

/// Antenna counts of an `(M1, N1, M2, N2)` Z interference channel.
///
/// Transmitter 1 has `m1` antennas and talks to receiver 1 (`n1` antennas);
/// transmitter 2 has `m2` antennas, talks to receiver 2 (`n2` antennas) and
/// interferes at receiver 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntennaConfig {
    pub m1: usize,
    pub n1: usize,
    pub m2: usize,
    pub n2: usize,
}

impl AntennaConfig {
    pub fn new(m1: usize, n1: usize, m2: usize, n2: usize) -> Result<Self> {
        let cfg = Self { m1, n1, m2, n2 };
        cfg.validate()?;
        Ok(cfg)
    }

    /// All four nodes carry `n` antennas.
    pub fn symmetric(n: usize) -> Result<Self> {
        Self::new(n, n, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m1 == 0 || self.n1 == 0 || self.m2 == 0 || self.n2 == 0 {
            return Err(DmtError::InvalidConfig(format!(
                "antenna counts must be >= 1, got {self}"
            )));
        }
        Ok(())
    }

    /// Rank of the cross link `H21`, `min(M2, N1)`.
    pub fn p(&self) -> usize {
        self.m2.min(self.n1)
    }

    /// Rank of the first direct link, `min(M1, N1)`.
    pub fn q1(&self) -> usize {
        self.m1.min(self.n1)
    }

    /// Rank of the second direct link, `min(M2, N2)`.
    pub fn q2(&self) -> usize {
        self.m2.min(self.n2)
    }

    pub fn is_symmetric(&self) -> bool {
        self.m1 == self.n1 && self.n1 == self.m2 && self.m2 == self.n2
    }
}

impl std::fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.m1, self.n1, self.m2, self.n2)
    }
}

/// Exponents of `SNR11`, `INR21` and `SNR22` with respect to the nominal SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingExponents {
    pub alpha11: f64,
    pub alpha21: f64,
    pub alpha22: f64,
}

impl ScalingExponents {
    pub fn new(alpha11: f64, alpha21: f64, alpha22: f64) -> Result<Self> {
        let a = Self {
            alpha11,
            alpha21,
            alpha22,
        };
        a.validate()?;
        Ok(a)
    }

    /// `(1, 1, 1)`: every link scales like the nominal SNR.
    pub fn unit() -> Self {
        Self {
            alpha11: 1.0,
            alpha21: 1.0,
            alpha22: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha11", self.alpha11),
            ("alpha21", self.alpha21),
            ("alpha22", self.alpha22),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DmtError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn max(&self) -> f64 {
        self.alpha11.max(self.alpha21).max(self.alpha22)
    }
}

/// Multiplexing gains of the two users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplexingGainPair {
    pub r1: f64,
    pub r2: f64,
}

impl MultiplexingGainPair {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        for (name, v) in [("r1", r1), ("r2", r2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(DmtError::InvalidConfig(format!(
                    "{name} must be nonnegative and finite, got {v}"
                )));
            }
        }
        Ok(Self { r1, r2 })
    }

    pub fn symmetric(r: f64) -> Result<Self> {
        Self::new(r, r)
    }

    /// Sum multiplexing gain `r1 + r2`.
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Negative SNR exponents of the ordered eigenvalues of `W3`, `W1`, `W2`.
///
/// Entry `k` (0-based) of each vector holds the 1-based index `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentVariables {
    pub upsilon: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl ExponentVariables {
    /// Each vector is nonnegative and nondecreasing.
    pub fn is_ordered(&self) -> bool {
        [&self.upsilon, &self.beta, &self.gamma]
            .iter()
            .all(|v| v.iter().all(|&x| x >= 0.0) && v.windows(2).all(|w| w[0] <= w[1]))
    }
}

/// Transmitter channel-state knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Csit {
    Full,
    None,
}

impl std::str::FromStr for Csit {
    type Err = DmtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Csit::Full),
            "none" => Ok(Csit::None),
            other => Err(DmtError::InvalidConfig(format!(
                "csit must be 'full' or 'none', got '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for Csit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Csit::Full => "full",
            Csit::None => "none",
        })
    }
}
