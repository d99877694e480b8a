//! Parameter sweeps of the time-machine response against its two limits.
//!
//! A circumference sweep holds `w` fixed and varies `l`; a curvature sweep
//! holds `l` fixed and varies `w`. Each row carries all four geometries.

use std::io::{Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernels::{EinsteinCylinder, PoincareAdS2, TimeMachine};
use crate::quadrature::QuadratureConfig;
use crate::response::{
    response_ads2, response_einstein_cylinder, response_minkowski_closed,
    response_time_machine_with, DetectorConfig, ResponseResult, TimeMachineOptions, Truncation,
};
use crate::special::erfc;

/// Relative imaginary residue above which a row is flagged.
pub const RESIDUE_LIMIT: f64 = 1e-10;

pub const CSV_HEADER: [&str; 8] = [
    "swept",
    "P_TM",
    "P_AdS2",
    "P_EC",
    "P_M",
    "tail_estimate",
    "eps_residual",
    "status",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Vary `l` at fixed `w`.
    Circumference,
    /// Vary `w` at fixed `l`.
    Curvature,
}

impl SweepMode {
    pub fn axis_label(self) -> &'static str {
        match self {
            SweepMode::Circumference => "dimensionless circumference l",
            SweepMode::Curvature => "dimensionless curvature w",
        }
    }
}

impl std::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circumference" => Ok(SweepMode::Circumference),
            "curvature" => Ok(SweepMode::Curvature),
            _ => Err(Error::Input(format!(
                "unknown sweep mode '{s}' (expected circumference or curvature)"
            ))),
        }
    }
}

/// Number of image pairs: a fixed `N` or `"auto"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageCount {
    Fixed(u32),
    Auto,
}

impl std::str::FromStr for ImageCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(ImageCount::Auto);
        }
        match s.parse::<u32>() {
            Ok(n) if n > 0 => Ok(ImageCount::Fixed(n)),
            _ => Err(Error::Input(format!(
                "N must be a positive integer or 'auto', got '{s}'"
            ))),
        }
    }
}

impl Serialize for ImageCount {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self {
            ImageCount::Fixed(n) => s.serialize_u32(*n),
            ImageCount::Auto => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for ImageCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(n) => n.to_string().parse(),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl From<ImageCount> for Truncation {
    fn from(n: ImageCount) -> Self {
        match n {
            ImageCount::Fixed(n) => Truncation::Fixed(n),
            ImageCount::Auto => Truncation::Auto,
        }
    }
}

fn default_gamma() -> f64 {
    0.01
}

fn default_tail_tol() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub omega: f64,
    /// Fixed curvature of a circumference sweep.
    #[serde(default)]
    pub w: Option<f64>,
    /// Fixed circumference of a curvature sweep.
    #[serde(default)]
    pub ell: Option<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(rename = "N")]
    pub n: ImageCount,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig<f64>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("sweep config: {e}")))
    }

    /// `(w, l)` at one grid point.
    pub fn point(&self, swept: f64) -> Result<(f64, f64)> {
        match self.mode {
            SweepMode::Circumference => {
                let w = self
                    .w
                    .ok_or_else(|| Error::Input("circumference sweep needs a fixed w".into()))?;
                Ok((w, swept))
            }
            SweepMode::Curvature => {
                let l = self
                    .ell
                    .ok_or_else(|| Error::Input("curvature sweep needs a fixed ell".into()))?;
                Ok((swept, l))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(Error::Input(format!(
                "omega must be finite, got {}",
                self.omega
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::Input(format!(
                "gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::Input(format!(
                "tail tolerance must be positive, got {}",
                self.tail_tol
            )));
        }
        if let ImageCount::Fixed(0) = self.n {
            return Err(Error::Input("N must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Input("sweep grid is empty".into()));
        }
        if self.grid.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::Input(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        self.quadrature.validate()?;
        let support = self.quadrature.support_halfwidth;
        for &x in &self.grid {
            let (w, l) = self.point(x)?;
            let tm = TimeMachine::from_curvature(w, l)?;
            let limit = tm.causal_limit();
            if support > limit && erfc(limit) > 1e-6 {
                return Err(Error::ChronologyViolation {
                    tau: support,
                    limit,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub swept: f64,
    pub p_tm: f64,
    pub p_ads2: f64,
    pub p_ec: f64,
    pub p_m: f64,
    pub tail_estimate: f64,
    pub eps_residual: f64,
    pub status: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Input(format!("writing CSV: {e}"));
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                sci(r.swept),
                sci(r.p_tm),
                sci(r.p_ads2),
                sci(r.p_ec),
                sci(r.p_m),
                sci(r.tail_estimate),
                sci(r.eps_residual),
                r.status.clone(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Input(format!("writing CSV: {e}")))?;
        Ok(())
    }

    /// Parses a table written by [`SweepTable::write_csv`]; errors name the offending line.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(input);
        let mut rows = Vec::new();
        let mut header_seen = false;
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::Input(format!("line {line}: {e}"))
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if !header_seen {
                if record.iter().ne(CSV_HEADER.iter().copied()) {
                    return Err(Error::Input(format!(
                        "line {line}: expected header {}",
                        CSV_HEADER.join(",")
                    )));
                }
                header_seen = true;
                continue;
            }
            if record.len() != CSV_HEADER.len() {
                return Err(Error::Input(format!(
                    "line {line}: expected {} fields, found {}",
                    CSV_HEADER.len(),
                    record.len()
                )));
            }
            let num = |i: usize| -> Result<f64> {
                record[i].trim().parse::<f64>().map_err(|_| {
                    Error::Input(format!(
                        "line {line}: {} is not a number: '{}'",
                        CSV_HEADER[i], &record[i]
                    ))
                })
            };
            rows.push(SweepRow {
                swept: num(0)?,
                p_tm: num(1)?,
                p_ads2: num(2)?,
                p_ec: num(3)?,
                p_m: num(4)?,
                tail_estimate: num(5)?,
                eps_residual: num(6)?,
                status: record[7].to_string(),
            });
        }
        if !header_seen {
            return Err(Error::Input("line 1: missing header".into()));
        }
        Ok(Self { rows })
    }
}

/// Runs the sweep; failures at single points are recorded in the row status.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let q = &cfg.quadrature;
    let det = DetectorConfig::new(cfg.omega);
    let p_m = response_minkowski_closed(&det)?.probability;
    let opts = TimeMachineOptions {
        truncation: cfg.n.into(),
        tail_tol: cfg.tail_tol,
    };
    let ads2_at = |w: f64| response_ads2(&det, &PoincareAdS2::new(w)?, q);
    let ec_at = |l: f64| response_einstein_cylinder(&det, &EinsteinCylinder::new(l, cfg.gamma)?, q);
    // the baseline that does not depend on the swept value
    let constant = match cfg.mode {
        SweepMode::Circumference => ads2_at(cfg.point(cfg.grid[0])?.0)?,
        SweepMode::Curvature => ec_at(cfg.point(cfg.grid[0])?.1)?,
    };

    let rows = cfg
        .grid
        .par_iter()
        .map(|&x| {
            let (w, l) = cfg.point(x).expect("validated");
            let varying = match cfg.mode {
                SweepMode::Circumference => ec_at(l),
                SweepMode::Curvature => ads2_at(w),
            };
            let tm = TimeMachine::from_curvature(w, l)
                .and_then(|g| response_time_machine_with(&det, &g, q, &opts));
            let value =
                |r: &Result<ResponseResult<f64>>| r.as_ref().map_or(f64::NAN, |r| r.probability);
            let (p_ads2, p_ec) = match cfg.mode {
                SweepMode::Circumference => (constant.probability, value(&varying)),
                SweepMode::Curvature => (value(&varying), constant.probability),
            };
            let mut row = SweepRow {
                swept: x,
                p_tm: value(&tm),
                p_ads2,
                p_ec,
                p_m,
                tail_estimate: f64::NAN,
                eps_residual: f64::NAN,
                status: "ok".into(),
            };
            let mut notes = Vec::new();
            for (label, r) in [
                ("baseline", Ok(&constant)),
                ("varying", varying.as_ref()),
                ("time machine", tm.as_ref()),
            ] {
                match r {
                    Ok(r) => {
                        if r.relative_residue() > RESIDUE_LIMIT {
                            notes.push(format!(
                                "warning: {label} imaginary residue {:.1e} relative",
                                r.relative_residue()
                            ));
                        }
                        notes.extend(r.warnings.iter().map(|w| format!("warning: {w}")));
                    }
                    Err(e) => notes.push(format!("error: {e}")),
                }
            }
            if let Ok(r) = &tm {
                let report = r.image_sum.as_ref().expect("image-sum report");
                row.tail_estimate = report.tail_estimate;
                row.eps_residual = report.eps_residual;
            }
            if !notes.is_empty() {
                row.status = notes.join("; ");
            }
            row
        })
        .collect();
    Ok(SweepTable { rows })
}
