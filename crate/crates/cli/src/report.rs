//! Experiment reports and their deterministic serialization.
//!
//! A report is write-once: it is assembled through [`ReportBuilder`] and
//! frozen by `build()`. Serialization is byte-deterministic for a given
//! report: keys are sorted (BTreeMap), floats use a fixed 17-significant-
//! digit format in CSV, and files are written atomically (temp + rename).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use hyperheat_core::io::{fmt_float, write_atomic};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: String,
    pub config_hash: String,
}

/// A finished experiment report: named metrics plus named (x, y) series.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    experiment: String,
    params: BTreeMap<String, String>,
    metrics: BTreeMap<String, f64>,
    series: BTreeMap<String, Series>,
    provenance: Provenance,
}

impl ExperimentReport {
    pub fn experiment(&self) -> &str {
        &self.experiment
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn metrics(&self) -> &BTreeMap<String, f64> {
        &self.metrics
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.get(name)
    }

    pub fn series_names(&self) -> impl Iterator<Item = &String> {
        self.series.keys()
    }
}

pub struct ReportBuilder {
    experiment: String,
    params: BTreeMap<String, String>,
    metrics: BTreeMap<String, f64>,
    series: BTreeMap<String, Series>,
}

impl ReportBuilder {
    pub fn new(experiment: &str, params: BTreeMap<String, String>) -> Self {
        ReportBuilder {
            experiment: experiment.to_string(),
            params,
            metrics: BTreeMap::new(),
            series: BTreeMap::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> Result<&mut Self, CliError> {
        if !value.is_finite() {
            return Err(CliError::Runtime(format!("metric {name} is not finite: {value}")));
        }
        self.metrics.insert(name.to_string(), value);
        Ok(self)
    }

    pub fn series(
        &mut self,
        name: &str,
        x_label: &str,
        y_label: &str,
        points: Vec<(f64, f64)>,
    ) -> Result<&mut Self, CliError> {
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(CliError::Runtime(format!(
                "series {name}: x values must be strictly increasing"
            )));
        }
        if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(CliError::Runtime(format!("series {name}: non-finite point")));
        }
        self.series.insert(
            name.to_string(),
            Series { x_label: x_label.to_string(), y_label: y_label.to_string(), points },
        );
        Ok(self)
    }

    /// Freezes the report; the provenance hash covers the experiment name
    /// and the resolved parameters.
    pub fn build(self) -> ExperimentReport {
        let mut hasher = Sha256::new();
        hasher.update(self.experiment.as_bytes());
        hasher.update(b"\n");
        for (k, v) in &self.params {
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        let config_hash = hex_string(&hasher.finalize());
        ExperimentReport {
            experiment: self.experiment,
            params: self.params,
            metrics: self.metrics,
            series: self.series,
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config_hash,
            },
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `<experiment>.json` plus one `<experiment>.<series>.csv` per
/// series into `out_dir`; returns the paths written (sorted).
pub fn write_report(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut paths = Vec::new();

    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Runtime(format!("serialization: {e}")))?;
    let json_path = out_dir.join(format!("{}.json", report.experiment));
    write_atomic(&json_path, &(json + "\n"))
        .map_err(|e| CliError::Io(format!("{}: {e}", json_path.display())))?;
    paths.push(json_path);

    for (name, series) in &report.series {
        let mut csv = format!("{},{}\n", series.x_label, series.y_label);
        for &(x, y) in &series.points {
            csv.push_str(&fmt_float(x));
            csv.push(',');
            csv.push_str(&fmt_float(y));
            csv.push('\n');
        }
        let path = out_dir.join(format!("{}.{}.csv", report.experiment, name));
        write_atomic(&path, &csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        paths.push(path);
    }
    paths.sort();
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        let mut params = BTreeMap::new();
        params.insert("n".to_string(), "3".to_string());
        let mut b = ReportBuilder::new("demo", params);
        b.metric("alpha", 1.5).unwrap();
        b.series("curve", "t", "v", vec![(1.0, 2.0), (2.0, 2.5)]).unwrap();
        b.series("other", "r", "q", vec![(0.0, 1.0), (1.0, 0.5)]).unwrap();
        b.build()
    }

    #[test]
    fn one_json_plus_one_csv_per_series() {
        let dir = std::env::temp_dir().join(format!("hyperheat-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).ok();
        let report = sample_report();
        let paths = write_report(&report, &dir).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths.iter().any(|p| p.ends_with("demo.json")));
        assert!(paths.iter().any(|p| p.ends_with("demo.curve.csv")));
        let csv = std::fs::read_to_string(dir.join("demo.curve.csv")).unwrap();
        assert!(csv.starts_with("t,v\n"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rewrites_are_byte_identical() {
        let dir = std::env::temp_dir().join(format!("hyperheat-repeat-{}", std::process::id()));
        std::fs::create_dir_all(&dir).ok();
        let report = sample_report();
        write_report(&report, &dir).unwrap();
        let first = std::fs::read(dir.join("demo.json")).unwrap();
        write_report(&report, &dir).unwrap();
        let second = std::fs::read(dir.join("demo.json")).unwrap();
        assert_eq!(first, second);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn invalid_series_rejected() {
        let mut b = ReportBuilder::new("demo", BTreeMap::new());
        assert!(b.series("bad", "x", "y", vec![(2.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(b.metric("nan", f64::NAN).is_err());
    }

    #[test]
    fn hash_depends_on_params() {
        let mut p1 = BTreeMap::new();
        p1.insert("n".to_string(), "3".to_string());
        let mut p2 = BTreeMap::new();
        p2.insert("n".to_string(), "5".to_string());
        let r1 = ReportBuilder::new("demo", p1).build();
        let r2 = ReportBuilder::new("demo", p2).build();
        assert_ne!(r1.provenance.config_hash, r2.provenance.config_hash);
    }
}
