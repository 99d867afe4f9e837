//! DMT curves over a grid of gain pairs, with CSV and JSON rendering.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{full_dmt, DmtQuery};
use crate::error::{DmtError, Result};
use crate::model::{AntennaConfig, Csit, MultiplexingGainPair, ScalingExponents};

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-4, 1e9)`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Values this close to 0 are solver round-off and print as `0`.
const ZERO_SNAP: f64 = 1e-12;

fn clean(x: f64) -> f64 {
    if x.abs() < ZERO_SNAP {
        0.0
    } else {
        x
    }
}

/// `start, start + step, ...` up to `stop` (inclusive within rounding).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RGrid {
    pub fn validate(&self) -> Result<()> {
        let finite = self.start.is_finite() && self.stop.is_finite() && self.step.is_finite();
        if !finite || self.step <= 0.0 {
            return Err(DmtError::InvalidConfig(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        if self.stop < self.start {
            return Err(DmtError::InvalidConfig(format!(
                "grid stop {} is below start {}",
                self.stop, self.start
            )));
        }
        if self.start < 0.0 {
            return Err(DmtError::InvalidConfig(format!(
                "multiplexing gains must be >= 0, grid starts at {}",
                self.start
            )));
        }
        Ok(())
    }

    /// Grid values computed as `start + k * step` so errors do not accumulate.
    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.start + k as f64 * self.step).collect())
    }
}

/// Gain pairs a curve is evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainSweep {
    /// `r1 = r2 = r` for every `r` on the grid.
    Symmetric(RGrid),
    Pairs(Vec<MultiplexingGainPair>),
}

/// One row of a curve. `d_os` is the F-CSIT sum exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub r1: f64,
    pub r2: f64,
    pub d_full: f64,
    pub d_nocsit: f64,
    pub d_o1: f64,
    pub d_o2: f64,
    pub d_os: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub cfg: AntennaConfig,
    pub alphas: ScalingExponents,
    pub sweep: GainSweep,
    pub rows: Vec<CurveRow>,
}

fn evaluate_row(
    cfg: AntennaConfig,
    alphas: ScalingExponents,
    gains: MultiplexingGainPair,
) -> Result<CurveRow> {
    let query = |csit| DmtQuery {
        cfg,
        alphas,
        gains,
        csit,
    };
    let full = full_dmt(&query(Csit::Full))?;
    let none = full_dmt(&query(Csit::None))?;
    Ok(CurveRow {
        r1: gains.r1,
        r2: gains.r2,
        d_full: clean(full.value),
        d_nocsit: clean(none.value),
        d_o1: clean(full.d1),
        d_o2: clean(full.d2),
        d_os: clean(full.ds),
    })
}

/// Evaluates F-CSIT and No-CSIT DMT at every gain pair, in parallel, keeping
/// grid order.
pub fn compute_curve(
    cfg: AntennaConfig,
    alphas: ScalingExponents,
    sweep: GainSweep,
) -> Result<Curve> {
    cfg.validate()?;
    alphas.validate()?;
    let pairs: Vec<MultiplexingGainPair> = match &sweep {
        GainSweep::Symmetric(grid) => grid
            .points()?
            .into_iter()
            .map(MultiplexingGainPair::symmetric)
            .collect::<Result<_>>()?,
        GainSweep::Pairs(p) => p.clone(),
    };
    let rows = pairs
        .par_iter()
        .map(|&g| evaluate_row(cfg, alphas, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(Curve {
        cfg,
        alphas,
        sweep,
        rows,
    })
}

const SIG: usize = 9;

impl Curve {
    fn symmetric(&self) -> bool {
        matches!(self.sweep, GainSweep::Symmetric(_))
    }

    pub fn columns(&self) -> Vec<&'static str> {
        let mut c = if self.symmetric() {
            vec!["r"]
        } else {
            vec!["r1", "r2"]
        };
        c.extend(["d_full", "d_nocsit", "d_O1", "d_O2", "d_Os"]);
        c
    }

    fn row_values(&self, row: &CurveRow) -> Vec<f64> {
        let mut v = if self.symmetric() {
            vec![row.r1]
        } else {
            vec![row.r1, row.r2]
        };
        v.extend([row.d_full, row.d_nocsit, row.d_o1, row.d_o2, row.d_os]);
        v
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns().join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = self
                .row_values(row)
                .iter()
                .map(|&x| format_sig(x, SIG))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON mirror of the CSV with the configuration echoed. Numbers carry
    /// the same 9 significant digits as the CSV.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| {
                self.row_values(r)
                    .iter()
                    .map(|&x| format_sig(x, SIG).parse().expect("formatted float parses"))
                    .collect()
            })
            .collect();
        serde_json::json!({
            "antennas": self.cfg,
            "alphas": self.alphas,
            "sweep": self.sweep,
            "columns": self.columns(),
            "rows": rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(4.0, 9), "4");
        assert_eq!(format_sig(0.1, 9), "0.1");
        assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_sig(2.0 / 3.0 * 100.0, 9), "66.6666667");
        assert_eq!(format_sig(0.30000000000000004, 9), "0.3");
        assert_eq!(format_sig(1.5e-7, 9), "1.5e-07");
        assert_eq!(format_sig(-2.5, 9), "-2.5");
        assert_eq!(format_sig(123456789012.0, 9), "1.23456789e+11");
    }

    #[test]
    fn grid_points() {
        let g = RGrid {
            start: 0.0,
            stop: 2.0,
            step: 0.1,
        };
        let p = g.points().unwrap();
        assert_eq!(p.len(), 21);
        assert!((p[20] - 2.0).abs() < 1e-12);
        assert!(RGrid { step: 0.0, ..g }.points().is_err());
        assert!(RGrid { stop: -1.0, ..g }.points().is_err());
    }

    #[test]
    fn symmetric_two_antenna_curve() {
        let cfg = AntennaConfig::symmetric(2).unwrap();
        let grid = RGrid {
            start: 0.0,
            stop: 2.0,
            step: 0.1,
        };
        let c = compute_curve(cfg, ScalingExponents::unit(), GainSweep::Symmetric(grid)).unwrap();
        assert_eq!(c.rows.first().unwrap().d_full, 4.0);
        assert_eq!(c.rows.last().unwrap().d_full, 0.0);
        let csv = c.to_csv();
        assert!(csv.starts_with("r,d_full,d_nocsit,d_O1,d_O2,d_Os\n0,4,"));
        assert_eq!(
            csv,
            compute_curve(cfg, ScalingExponents::unit(), GainSweep::Symmetric(grid))
                .unwrap()
                .to_csv()
        );
    }

    #[test]
    fn out_of_range_gain_is_a_domain_error() {
        let cfg = AntennaConfig::symmetric(1).unwrap();
        let grid = RGrid {
            start: 0.0,
            stop: 1.5,
            step: 0.5,
        };
        let err =
            compute_curve(cfg, ScalingExponents::unit(), GainSweep::Symmetric(grid)).unwrap_err();
        assert!(matches!(err, DmtError::Domain { value, .. } if value == 1.5));
    }

    #[test]
    fn pair_sweeps_use_two_gain_columns() {
        let cfg = AntennaConfig::symmetric(1).unwrap();
        let pairs = vec![MultiplexingGainPair::new(0.25, 0.5).unwrap()];
        let c = compute_curve(cfg, ScalingExponents::unit(), GainSweep::Pairs(pairs)).unwrap();
        assert!(c.to_csv().starts_with("r1,r2,d_full"));
        assert_eq!(c.to_json()["rows"][0][0], 0.25);
    }
}
