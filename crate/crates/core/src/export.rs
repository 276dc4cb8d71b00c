//! CSV and JSON files for simulation output.
//!
//! CSV: `raw.csv`, `summary.csv` and a `metadata.json` sidecar. JSON:
//! `raw.json` and `summary.json`, each `{"metadata": …, "rows": […]}`.
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the exact values.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ReportError;
use crate::graph::{WClass, XyRelation};
use crate::simulation::{Metadata, RawRow, SimulationOutput, SimulationSummary, Summary};
use crate::technique::Technique;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    fn of_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Flat summary row, the on-disk shape of [`SimulationSummary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub graph_id: u32,
    pub notation: String,
    pub w_class: WClass,
    pub xy_relation: XyRelation,
    pub technique: Technique,
    pub count: usize,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub true_effect: f64,
    pub population_estimand: Option<f64>,
    pub median_bias: Option<f64>,
}

impl From<&SimulationSummary> for SummaryRecord {
    fn from(s: &SimulationSummary) -> Self {
        let st = s.stats;
        SummaryRecord {
            graph_id: s.graph_id,
            notation: s.notation.clone(),
            w_class: s.w_class,
            xy_relation: s.xy_relation,
            technique: s.technique,
            count: s.count,
            min: st.map(|v| v.min),
            q1: st.map(|v| v.q1),
            median: st.map(|v| v.median),
            q3: st.map(|v| v.q3),
            max: st.map(|v| v.max),
            mean: st.map(|v| v.mean),
            sd: st.map(|v| v.sd),
            true_effect: s.true_effect,
            population_estimand: s.population_estimand,
            median_bias: s.median_bias(),
        }
    }
}

impl SummaryRecord {
    fn into_summary(self) -> Option<SimulationSummary> {
        let stats = match (self.min, self.q1, self.median, self.q3, self.max, self.mean, self.sd) {
            (Some(min), Some(q1), Some(median), Some(q3), Some(max), Some(mean), Some(sd)) => Some(Summary {
                min,
                q1,
                median,
                q3,
                max,
                mean,
                sd,
            }),
            (None, None, None, None, None, None, None) => None,
            _ => return None,
        };
        Some(SimulationSummary {
            graph_id: self.graph_id,
            notation: self.notation,
            w_class: self.w_class,
            xy_relation: self.xy_relation,
            technique: self.technique,
            count: self.count,
            stats,
            true_effect: self.true_effect,
            population_estimand: self.population_estimand,
        })
    }
}

#[derive(Deserialize)]
struct JsonTable<T> {
    rows: Vec<T>,
}

#[derive(Serialize)]
struct JsonTableRef<'a, T> {
    metadata: &'a Metadata,
    rows: &'a [T],
}

fn create(path: &Path) -> Result<BufWriter<File>, ReportError> {
    File::create(path).map(BufWriter::new).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows<T: Serialize>(path: &Path, metadata: &Metadata, rows: &[T], format: Format) -> Result<(), ReportError> {
    let mut out = create(path)?;
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(&mut out);
            for row in rows {
                writer.serialize(row).map_err(|source| ReportError::Csv {
                    path: path.to_path_buf(),
                    source,
                })?;
            }
            writer.flush().map_err(|source| ReportError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
        Format::Json => {
            let table = JsonTableRef { metadata, rows };
            serde_json::to_writer_pretty(&mut out, &table).map_err(|source| ReportError::Json {
                path: path.to_path_buf(),
                source,
            })?;
            writeln!(out).map_err(|source| ReportError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
    }
    out.flush().map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ReportError> {
    let file = File::open(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match Format::of_path(path) {
        Format::Csv => csv::Reader::from_reader(BufReader::new(file))
            .deserialize()
            .collect::<Result<Vec<T>, _>>()
            .map_err(|source| ReportError::Csv {
                path: path.to_path_buf(),
                source,
            }),
        Format::Json => serde_json::from_reader::<_, JsonTable<T>>(BufReader::new(file))
            .map(|t| t.rows)
            .map_err(|source| ReportError::Json {
                path: path.to_path_buf(),
                source,
            }),
    }
}

pub fn write_raw(path: &Path, metadata: &Metadata, rows: &[RawRow], format: Format) -> Result<(), ReportError> {
    write_rows(path, metadata, rows, format)
}

pub fn write_summary(
    path: &Path,
    metadata: &Metadata,
    summaries: &[SimulationSummary],
    format: Format,
) -> Result<(), ReportError> {
    let records: Vec<SummaryRecord> = summaries.iter().map(SummaryRecord::from).collect();
    write_rows(path, metadata, &records, format)
}

/// Reads a raw estimates file; the format follows the file extension.
pub fn read_raw(path: &Path) -> Result<Vec<RawRow>, ReportError> {
    read_rows(path)
}

/// Reads a summary file; the format follows the file extension.
pub fn read_summary(path: &Path) -> Result<Vec<SimulationSummary>, ReportError> {
    read_rows::<SummaryRecord>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.into_summary().ok_or_else(|| ReportError::Format {
                path: path.to_path_buf(),
                reason: format!("row {} has partially missing statistics", i + 1),
            })
        })
        .collect()
}

/// Paths written by [`export_simulation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedFiles {
    pub raw: PathBuf,
    pub summary: PathBuf,
    pub metadata: Option<PathBuf>,
}

/// Writes raw and summary tables into `dir`, creating it if needed.
pub fn export_simulation(dir: &Path, output: &SimulationOutput, format: Format) -> Result<ExportedFiles, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let ext = format.extension();
    let raw = dir.join(format!("raw.{ext}"));
    let summary = dir.join(format!("summary.{ext}"));
    write_raw(&raw, &output.metadata, &output.raw, format)?;
    write_summary(&summary, &output.metadata, &output.summaries, format)?;
    let metadata = match format {
        Format::Json => None,
        Format::Csv => {
            let path = dir.join("metadata.json");
            let mut out = create(&path)?;
            serde_json::to_writer_pretty(&mut out, &output.metadata).map_err(|source| ReportError::Json {
                path: path.clone(),
                source,
            })?;
            writeln!(out)
                .and_then(|_| out.flush())
                .map_err(|source| ReportError::Io {
                    path: path.clone(),
                    source,
                })?;
            Some(path)
        }
    };
    Ok(ExportedFiles { raw, summary, metadata })
}
