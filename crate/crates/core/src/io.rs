//! File formats: regression CSV, channel CSV, the `SBW1` raw format and JSON
//! fit reports.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbiteError};
use crate::fixed_point::ProblemInstance;
use crate::risk::RegressionFit;
use crate::wavelet::MultichannelSeries;

pub const SBW1_MAGIC: [u8; 4] = *b"SBW1";

/// Raw regression data as read from disk.
#[derive(Debug, Clone)]
pub struct RegressionData {
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub names: Vec<String>,
}

fn parse_field(field: &str, row: usize, col: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| SbiteError::Format(format!("row {row}, column '{col}': cannot parse '{field}' as a number")))
}

/// Reads a CSV with header `y,x1,...,xP`.
pub fn read_regression_csv<R: Read>(reader: R) -> Result<RegressionData> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.first().map(String::as_str) != Some("y") {
        return Err(SbiteError::Format("first column must be named 'y'".into()));
    }
    if header.len() < 2 {
        return Err(SbiteError::Format("need at least one predictor column".into()));
    }
    let p = header.len() - 1;
    let mut y = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if rec.len() != header.len() {
            return Err(SbiteError::Format(format!("row {row} has {} fields, expected {}", rec.len(), header.len())));
        }
        y.push(parse_field(&rec[0], row, &header[0])?);
        for (k, col) in header.iter().enumerate().skip(1) {
            values.push(parse_field(&rec[k], row, col)?);
        }
    }
    if y.is_empty() {
        return Err(SbiteError::Format("no data rows".into()));
    }
    let x = DMatrix::from_row_slice(y.len(), p, &values);
    Ok(RegressionData { x, y, names: header[1..].to_vec() })
}

pub fn write_regression_csv<W: Write>(writer: W, x: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(SbiteError::InvalidInput("design and response lengths differ".into()));
    }
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["y".to_string()];
    header.extend((1..=x.ncols()).map(|k| format!("x{k}")));
    wtr.write_record(&header)?;
    for (n, &yn) in y.iter().enumerate() {
        let mut rec = vec![yn.to_string()];
        rec.extend(x.row(n).iter().map(|v| v.to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a CSV with one column per channel.
pub fn read_channels_csv<R: Read>(reader: R) -> Result<MultichannelSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() {
        return Err(SbiteError::Format("empty header".into()));
    }
    let mut channels = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if rec.len() != header.len() {
            return Err(SbiteError::Format(format!("row {row} has {} fields, expected {}", rec.len(), header.len())));
        }
        for (q, col) in header.iter().enumerate() {
            channels[q].push(parse_field(&rec[q], row, col)?);
        }
    }
    MultichannelSeries::new(channels)
}

pub fn write_channels_csv<W: Write>(writer: W, series: &MultichannelSeries) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record((1..=series.q()).map(|q| format!("ch{q}")))?;
    for t in 0..series.len() {
        wtr.write_record(series.channels().iter().map(|c| c[t].to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// `SBW1` layout: magic, `u32` channel count, `u64` length, then `f64`
/// samples channel after channel, all little-endian.
pub fn read_sbw1<R: Read>(mut reader: R) -> Result<MultichannelSeries> {
    let mut header = [0u8; 16];
    reader.read_exact(&mut header).map_err(|_| SbiteError::Format("truncated SBW1 header".into()))?;
    if header[..4] != SBW1_MAGIC {
        return Err(SbiteError::Format("bad magic, expected SBW1".into()));
    }
    let q = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let t = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let t = usize::try_from(t).map_err(|_| SbiteError::Format("series length overflows".into()))?;
    if q == 0 {
        return Err(SbiteError::Format("SBW1 file declares zero channels".into()));
    }
    let total = q
        .checked_mul(t)
        .and_then(|v| v.checked_mul(8))
        .ok_or_else(|| SbiteError::Format("SBW1 size overflows".into()))?;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != total {
        return Err(SbiteError::Format(format!("SBW1 payload has {} bytes, header implies {total}", bytes.len())));
    }
    let samples: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    MultichannelSeries::new(samples.chunks(t.max(1)).map(<[f64]>::to_vec).collect())
}

pub fn write_sbw1<W: Write>(mut writer: W, series: &MultichannelSeries) -> Result<()> {
    let q = u32::try_from(series.q()).map_err(|_| SbiteError::InvalidInput("too many channels".into()))?;
    writer.write_all(&SBW1_MAGIC)?;
    writer.write_all(&q.to_le_bytes())?;
    writer.write_all(&(series.len() as u64).to_le_bytes())?;
    for ch in series.channels() {
        for v in ch {
            writer.write_all(&v.to_le_bytes())?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// JSON summary of a regression fit, coefficients in the original basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub coefficients: Vec<f64>,
    /// 1-based indices of nonzero coefficients.
    pub active_set: Vec<usize>,
    pub lambda: f64,
    pub nu: f64,
    pub s: f64,
    pub sure: f64,
    pub gsure: f64,
    pub edf: f64,
    pub intercept: f64,
    pub rss: f64,
    pub n: usize,
    pub criterion: String,
}

impl FitReport {
    pub fn new(inst: &ProblemInstance, fit: &RegressionFit, criterion: &str) -> Self {
        let beta = &fit.solution.beta;
        let r = &fit.report;
        Self {
            coefficients: inst.original_coefficients(beta),
            active_set: beta.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, _)| k + 1).collect(),
            lambda: r.hp.lambda,
            nu: r.hp.nu,
            s: r.hp.s,
            sure: r.sure,
            gsure: r.gsure,
            edf: r.edf,
            intercept: inst.original_intercept(beta),
            rss: r.rss,
            n: r.n,
            criterion: criterion.to_string(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        // serde_json writes +∞ (gsure past the saturation point) as null.
        Ok(serde_json::to_string_pretty(self)?)
    }
}
