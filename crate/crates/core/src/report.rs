//! Result rows and their CSV / JSON encodings.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "spinbench/1";

pub const REPORT_HEADER: [&str; 8] =
    ["two_j", "two_k", "theta_rad", "method", "step", "value", "uncertainty", "mode_notes"];

pub const EXPERIMENT_HEADER: [&str; 5] = ["label", "two_j", "theta_rad", "measured_avg_fidelity", "std_err"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    OptExact,
    OptAsymptotic,
    MoExact,
    MoAsymptotic,
    HeisenbergSim,
    MoSim,
    WorstCase,
    Recycling,
    SpinKSim,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::OptExact,
        Method::OptAsymptotic,
        Method::MoExact,
        Method::MoAsymptotic,
        Method::HeisenbergSim,
        Method::MoSim,
        Method::WorstCase,
        Method::Recycling,
        Method::SpinKSim,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::OptExact => "opt_exact",
            Method::OptAsymptotic => "opt_asymptotic",
            Method::MoExact => "mo_exact",
            Method::MoAsymptotic => "mo_asymptotic",
            Method::HeisenbergSim => "heisenberg_sim",
            Method::MoSim => "mo_sim",
            Method::WorstCase => "worst_case",
            Method::Recycling => "recycling",
            Method::SpinKSim => "spin_k_sim",
        }
    }

    /// Closed-form or simulated values that must lie in `[0, 1]`.
    pub fn is_bounded(self) -> bool {
        !matches!(self, Method::OptAsymptotic | Method::MoAsymptotic)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub two_j: i64,
    pub two_k: i64,
    pub theta_rad: f64,
    pub method: Method,
    /// Reuse step for recycling rows, 0 otherwise.
    pub step: u64,
    pub value: f64,
    pub uncertainty: f64,
    pub mode_notes: String,
}

impl FidelityReport {
    pub fn new(two_j: i64, two_k: i64, theta_rad: f64, method: Method, value: f64) -> Self {
        FidelityReport { two_j, two_k, theta_rad, method, step: 0, value, uncertainty: 0.0, mode_notes: String::new() }
    }

    pub fn with_step(mut self, step: u64) -> Self {
        self.step = step;
        self
    }

    pub fn with_uncertainty(mut self, u: f64) -> Self {
        self.uncertainty = u;
        self
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.mode_notes = notes.into();
        self
    }

    pub fn key(&self) -> (i64, i64, u64, Method, u64) {
        (self.two_j, self.two_k, self.theta_rad.to_bits(), self.method, self.step)
    }

    pub fn validate(&self) -> Result<()> {
        if self.uncertainty.is_nan() || self.uncertainty < 0.0 {
            return Err(Error::InvalidArgument(format!("negative uncertainty in {} row", self.method)));
        }
        if self.method.is_bounded() && !(self.value >= 0.0 && self.value <= 1.0 + self.uncertainty + 1e-12) {
            return Err(Error::InvalidArgument(format!("{} value {} outside [0, 1]", self.method, self.value)));
        }
        Ok(())
    }
}

/// Reals are written in shortest round-trip form (at most 17 significant digits).
pub fn write_csv<W: Write>(rows: &[FidelityReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(REPORT_HEADER).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<FidelityReport>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(REPORT_HEADER) {
        return Err(Error::InvalidArgument(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

/// `{"schema": "spinbench/1", "command": ..., <meta>, "rows": [...]}`.
pub fn json_document(command: &str, meta: serde_json::Value, rows: &[FidelityReport]) -> serde_json::Value {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), SCHEMA.into());
    doc.insert("command".into(), command.into());
    if let serde_json::Value::Object(m) = meta {
        doc.extend(m);
    }
    doc.insert("rows".into(), serde_json::to_value(rows).expect("rows serialize"));
    serde_json::Value::Object(doc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub label: String,
    pub two_j: i64,
    pub theta_rad: f64,
    pub measured_avg_fidelity: f64,
    pub std_err: f64,
}

impl ExperimentRecord {
    pub fn validate(&self) -> Result<()> {
        if self.two_j < 1 {
            return Err(Error::InvalidSpin(format!("two_j = {}", self.two_j)));
        }
        if !self.theta_rad.is_finite() {
            return Err(Error::InvalidArgument("theta_rad is not finite".into()));
        }
        if !(0.0..=1.0).contains(&self.measured_avg_fidelity) {
            return Err(Error::InvalidArgument(format!(
                "measured_avg_fidelity {} outside [0, 1]",
                self.measured_avg_fidelity
            )));
        }
        if !self.std_err.is_finite() || self.std_err < 0.0 {
            return Err(Error::InvalidArgument(format!("std_err {} must be finite and >= 0", self.std_err)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    QuantumEnhanced,
    Inconclusive,
    ClassicalReachable,
    SuspectAboveQuantumBound,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::QuantumEnhanced => "quantum-enhanced",
            Verdict::Inconclusive => "inconclusive",
            Verdict::ClassicalReachable => "classical-reachable",
            Verdict::SuspectAboveQuantumBound => "suspect-above-quantum-bound",
        }
    }
}

/// Three-sigma classification of a measured fidelity against the MO
/// benchmark and the optimal quantum value.
pub fn classify(measured: f64, std_err: f64, mo: f64, opt: f64) -> (Verdict, f64) {
    let z = if std_err > 0.0 {
        (measured - mo) / std_err
    } else if measured == mo {
        0.0
    } else {
        (measured - mo).signum() * f64::INFINITY
    };
    let verdict = if measured > opt + 3.0 * std_err {
        Verdict::SuspectAboveQuantumBound
    } else if z >= 3.0 {
        Verdict::QuantumEnhanced
    } else if z <= -3.0 {
        Verdict::ClassicalReachable
    } else {
        Verdict::Inconclusive
    };
    (verdict, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.as_str()));
        }
        assert!("opt".parse::<Method>().is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            FidelityReport::new(3, 1, std::f64::consts::PI, Method::OptExact, 17.0 / 24.0).with_notes("a,b"),
            FidelityReport::new(3, 1, 0.1, Method::Recycling, 0.5).with_step(7).with_uncertainty(1e-20),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("two_j,two_k,theta_rad,method,step,value,uncertainty,mode_notes\n"));
        assert!(text.contains("3,1,3.141592653589793,opt_exact,0,0.7083333333333334,0.0,\"a,b\""));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn verdicts() {
        let (mo, opt) = (29.0 / 45.0, 17.0 / 24.0);
        assert_eq!(classify(0.69, 0.005, mo, opt).0, Verdict::QuantumEnhanced);
        assert_eq!(classify(0.64444, 0.01, mo, opt).0, Verdict::Inconclusive);
        assert_eq!(classify(0.95, 0.01, mo, opt).0, Verdict::SuspectAboveQuantumBound);
        assert_eq!(classify(0.5, 0.01, mo, opt).0, Verdict::ClassicalReachable);
        assert_eq!(classify(mo, 0.0, mo, opt).0, Verdict::Inconclusive);
    }

    #[test]
    fn report_bounds() {
        assert!(FidelityReport::new(3, 1, 0.0, Method::OptExact, 1.0).validate().is_ok());
        assert!(FidelityReport::new(3, 1, 0.0, Method::OptExact, 1.1).validate().is_err());
        assert!(FidelityReport::new(3, 1, 0.0, Method::OptAsymptotic, -0.2).validate().is_ok());
        assert!(FidelityReport::new(3, 1, 0.0, Method::MoSim, 0.5).with_uncertainty(-1.0).validate().is_err());
    }
}
