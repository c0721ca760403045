//! CSV and JSONL persistence of score records.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{MetricFlags, RawMetrics};
use crate::scoring::{ErsRecord, SubScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Jsonl,
}

impl RecordFormat {
    /// Picks a format from a `.csv` or `.jsonl` extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "csv" => Some(Self::Csv),
            "jsonl" | "ndjson" => Some(Self::Jsonl),
            _ => None,
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "jsonl" => Some(Self::Jsonl),
            _ => None,
        }
    }
}

pub const CSV_COLUMNS: [&str; 16] = [
    "path",
    "palette_count",
    "edge_density",
    "saliency_fraction",
    "contrast_delta",
    "stroke_rel",
    "centering_error",
    "s_palette",
    "s_edges",
    "s_saliency",
    "s_contrast",
    "s_stroke",
    "s_centering",
    "ers",
    "flags",
    "fingerprint",
];

/// Flat form of an [`ErsRecord`], one field per output column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub path: String,
    pub palette_count: u32,
    pub edge_density: f64,
    pub saliency_fraction: f64,
    pub contrast_delta: f64,
    pub stroke_rel: Option<f64>,
    pub centering_error: f64,
    pub s_palette: f64,
    pub s_edges: f64,
    pub s_saliency: f64,
    pub s_contrast: f64,
    pub s_stroke: f64,
    pub s_centering: f64,
    pub ers: f64,
    pub flags: String,
    pub fingerprint: String,
}

impl From<&ErsRecord> for RecordRow {
    fn from(r: &ErsRecord) -> Self {
        Self {
            path: r.source.clone(),
            palette_count: r.raw.palette_count,
            edge_density: r.raw.edge_density,
            saliency_fraction: r.raw.saliency_fraction,
            contrast_delta: r.raw.contrast_delta,
            stroke_rel: r.raw.stroke_rel,
            centering_error: r.raw.centering_error,
            s_palette: r.scores.s_palette,
            s_edges: r.scores.s_edges,
            s_saliency: r.scores.s_saliency,
            s_contrast: r.scores.s_contrast,
            s_stroke: r.scores.s_stroke,
            s_centering: r.scores.s_centering,
            ers: r.ers,
            flags: r.raw.flags.to_string(),
            fingerprint: r.fingerprint.clone(),
        }
    }
}

impl TryFrom<RecordRow> for ErsRecord {
    type Error = Error;

    fn try_from(row: RecordRow) -> Result<Self> {
        let flags =
            MetricFlags::parse(&row.flags).ok_or_else(|| Error::Format(format!("unknown flags {:?}", row.flags)))?;
        Ok(ErsRecord {
            source: row.path,
            raw: RawMetrics {
                palette_count: row.palette_count,
                edge_density: row.edge_density,
                saliency_fraction: row.saliency_fraction,
                contrast_delta: row.contrast_delta,
                stroke_rel: row.stroke_rel,
                centering_error: row.centering_error,
                flags,
            },
            scores: SubScores {
                s_palette: row.s_palette,
                s_edges: row.s_edges,
                s_saliency: row.s_saliency,
                s_contrast: row.s_contrast,
                s_stroke: row.s_stroke,
                s_centering: row.s_centering,
            },
            ers: row.ers,
            fingerprint: row.fingerprint,
        })
    }
}

/// `%.{digits}g`-style rendering: `digits` significant digits, trailing
/// zeros dropped, exponent form outside `[1e-5, 1e{digits})`.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, value))
    }
}

fn csv_real(v: f64) -> String {
    format_significant(v, 9)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Writes records in `format` to any sink.
pub fn write_records_to<W: Write>(records: &[ErsRecord], format: RecordFormat, sink: W) -> Result<()> {
    match format {
        RecordFormat::Csv => {
            let mut out = csv::WriterBuilder::new()
                .quote_style(csv::QuoteStyle::NonNumeric)
                .from_writer(sink);
            out.write_record(CSV_COLUMNS).map_err(csv_error)?;
            for r in records {
                let row = RecordRow::from(r);
                out.write_record([
                    row.path,
                    row.palette_count.to_string(),
                    csv_real(row.edge_density),
                    csv_real(row.saliency_fraction),
                    csv_real(row.contrast_delta),
                    row.stroke_rel.map(csv_real).unwrap_or_default(),
                    csv_real(row.centering_error),
                    csv_real(row.s_palette),
                    csv_real(row.s_edges),
                    csv_real(row.s_saliency),
                    csv_real(row.s_contrast),
                    csv_real(row.s_stroke),
                    csv_real(row.s_centering),
                    csv_real(row.ers),
                    row.flags,
                    row.fingerprint,
                ])
                .map_err(csv_error)?;
            }
            out.flush().map_err(|e| Error::Format(e.to_string()))
        }
        RecordFormat::Jsonl => {
            let mut out = BufWriter::new(sink);
            for r in records {
                serde_json::to_writer(&mut out, &RecordRow::from(r)).map_err(|e| Error::Format(e.to_string()))?;
                out.write_all(b"\n").map_err(|e| Error::Format(e.to_string()))?;
            }
            out.flush().map_err(|e| Error::Format(e.to_string()))
        }
    }
}

pub fn write_records(records: &[ErsRecord], format: RecordFormat, destination: &Path) -> Result<()> {
    let file = File::create(destination).map_err(|e| Error::io(destination, e))?;
    write_records_to(records, format, file).map_err(|e| match e {
        Error::Format(msg) => Error::io(destination, std::io::Error::other(msg)),
        other => other,
    })
}

fn parse_real(field: &str, column: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("column {column}: not a number: {field:?}")))
}

pub fn read_records_from<R: Read>(source: R, format: RecordFormat) -> Result<Vec<ErsRecord>> {
    match format {
        RecordFormat::Csv => {
            let mut reader = csv::Reader::from_reader(source);
            let header = reader.headers().map_err(csv_error)?.clone();
            if header.iter().ne(CSV_COLUMNS) {
                return Err(Error::Format(format!("unexpected CSV header: {header:?}")));
            }
            let mut records = Vec::new();
            for row in reader.records() {
                let row = row.map_err(csv_error)?;
                let real = |i: usize| parse_real(&row[i], CSV_COLUMNS[i]);
                let stroke = if row[5].trim().is_empty() { None } else { Some(real(5)?) };
                let parsed = RecordRow {
                    path: row[0].to_string(),
                    palette_count: row[1]
                        .trim()
                        .parse()
                        .map_err(|_| Error::Format(format!("bad palette_count {:?}", &row[1])))?,
                    edge_density: real(2)?,
                    saliency_fraction: real(3)?,
                    contrast_delta: real(4)?,
                    stroke_rel: stroke,
                    centering_error: real(6)?,
                    s_palette: real(7)?,
                    s_edges: real(8)?,
                    s_saliency: real(9)?,
                    s_contrast: real(10)?,
                    s_stroke: real(11)?,
                    s_centering: real(12)?,
                    ers: real(13)?,
                    flags: row[14].to_string(),
                    fingerprint: row[15].to_string(),
                };
                records.push(parsed.try_into()?);
            }
            Ok(records)
        }
        RecordFormat::Jsonl => {
            let mut records = Vec::new();
            for line in BufReader::new(source).lines() {
                let line = line.map_err(|e| Error::Format(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let row: RecordRow = serde_json::from_str(&line).map_err(|e| Error::Format(e.to_string()))?;
                records.push(row.try_into()?);
            }
            Ok(records)
        }
    }
}

pub fn read_records(path: &Path, format: RecordFormat) -> Result<Vec<ErsRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records_from(file, format)
}
