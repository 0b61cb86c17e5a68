use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentReport;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::param(format!("unknown report format {other:?}"))),
        }
    }
}

/// `report-seed<seed>-<first 12 hex digits of the config hash>.<ext>`
pub fn report_file_name(seed: u64, config_hash: &str, format: ReportFormat) -> String {
    let short = &config_hash[..config_hash.len().min(12)];
    format!("report-seed{seed}-{short}.{}", format.extension())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    section: &'a str,
    adder: String,
    attack: &'a str,
    case: Option<usize>,
    a: Option<u64>,
    b: Option<u64>,
    expected: Option<u64>,
    trajectories: Option<usize>,
    correct: Option<usize>,
    value: Option<f64>,
}

impl<'a> CsvRow<'a> {
    fn summary(section: &'a str, adder: String, attack: &'a str, value: Option<f64>) -> Self {
        CsvRow {
            section,
            adder,
            attack,
            case: None,
            a: None,
            b: None,
            expected: None,
            trajectories: None,
            correct: None,
            value,
        }
    }
}

pub(crate) fn to_csv(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::param(format!("csv encoding failed: {e}"));
    for m in &report.measurements {
        for (i, c) in m.cases.iter().enumerate() {
            w.serialize(CsvRow {
                section: "case",
                adder: m.adder.clone(),
                attack: m.attack.name(),
                case: Some(i),
                a: Some(c.a),
                b: Some(c.b),
                expected: Some(c.expected),
                trajectories: Some(c.shots),
                correct: Some(c.correct),
                value: Some(c.probability),
            })
            .map_err(csv_err)?;
        }
        let mut row = CsvRow::summary("mean", m.adder.clone(), m.attack.name(), Some(m.mean));
        row.trajectories = Some(m.trajectories);
        w.serialize(row).map_err(csv_err)?;
    }
    for p in &report.pqa {
        let label = format!("pqa:{}{}", p.output_bits, p.moduli);
        w.serialize(CsvRow::summary(
            "pqa",
            label,
            p.attack.name(),
            Some(p.probability),
        ))
        .map_err(csv_err)?;
    }
    for e in &report.effectiveness {
        w.serialize(CsvRow::summary(
            "effectiveness",
            e.adder.clone(),
            e.attack.name(),
            e.effectiveness,
        ))
        .map_err(csv_err)?;
    }
    for r in &report.improvement {
        let label = format!("qfa:{}", r.output_bits);
        w.serialize(CsvRow::summary(
            "improvement",
            label,
            r.attack.name(),
            r.improvement,
        ))
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::param(format!("csv encoding failed: {e}")))
}

/// Writes the report into `dir` and returns the file path.
pub fn write_report(
    report: &ExperimentReport,
    dir: &Path,
    format: ReportFormat,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(report_file_name(report.seed, &report.config_hash, format));
    let bytes = match format {
        ReportFormat::Csv => to_csv(report)?,
        ReportFormat::Json => {
            let mut v = serde_json::to_vec_pretty(report)?;
            v.push(b'\n');
            v
        }
    };
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
