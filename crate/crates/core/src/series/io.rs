use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{DailySeries, IncrementSeries, IntradaySeries, SeriesRole};
use crate::error::{Error, Result};

/// Fixed 17-significant-digit formatting used in machine-readable files.
pub fn fmt_machine(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NA".to_string()
    }
}

fn csv_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Csv { path: path.display().to_string(), message: message.into() }
}

fn parse_timestamp(raw: &str) -> Option<i64> {
    let s = raw.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v as i64);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp())
}

struct Table {
    header: Vec<String>,
    rows: Vec<(String, String)>,
}

fn read_two_columns(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path).map_err(|e| {
        match e.kind() {
            csv::ErrorKind::Io(io) => {
                Error::Io { path: path.display().to_string(), source: std::io::Error::new(io.kind(), io.to_string()) }
            }
            _ => csv_err(path, e.to_string()),
        }
    })?;
    let header: Vec<String> =
        reader.headers().map_err(|e| csv_err(path, e.to_string()))?.iter().map(|h| h.to_ascii_lowercase()).collect();
    if header.len() < 2 {
        return Err(csv_err(path, "expected at least two columns"));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e.to_string()))?;
        match (rec.get(0), rec.get(1)) {
            (Some(a), Some(b)) => rows.push((a.to_string(), b.to_string())),
            _ => return Err(csv_err(path, format!("row {} has fewer than two fields", i + 2))),
        }
    }
    Ok(Table { header, rows })
}

fn parse_value(path: &Path, row: usize, raw: &str) -> Result<f64> {
    raw.parse::<f64>().map_err(|_| csv_err(path, format!("row {}: cannot parse value {raw:?}", row + 2)))
}

/// Reads `timestamp,price` rows (ISO-8601 or epoch seconds, UTC).
pub fn read_intraday(path: impl AsRef<Path>, interval_minutes: u32) -> Result<IntradaySeries> {
    let path = path.as_ref();
    let table = read_two_columns(path)?;
    if table.header[0] != "timestamp" || table.header[1] != "price" {
        return Err(csv_err(path, "expected header `timestamp,price`"));
    }
    let mut ts = Vec::with_capacity(table.rows.len());
    let mut ps = Vec::with_capacity(table.rows.len());
    for (i, (t, p)) in table.rows.iter().enumerate() {
        let t = parse_timestamp(t).ok_or_else(|| csv_err(path, format!("row {}: bad timestamp {t:?}", i + 2)))?;
        ts.push(t);
        ps.push(parse_value(path, i, p)?);
    }
    IntradaySeries::new(ts, ps, interval_minutes).map_err(|e| csv_err(path, e.to_string()))
}

/// Reads a series file into increments.
///
/// `timestamp,price` files are converted to log returns; `date,value` or
/// `index,value` files are taken as increments directly.
pub fn read_series(path: impl AsRef<Path>) -> Result<IncrementSeries> {
    let path = path.as_ref();
    let table = read_two_columns(path)?;
    let source = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match (table.header[0].as_str(), table.header[1].as_str()) {
        ("timestamp", "price") => {
            let mut ts = Vec::new();
            let mut ps = Vec::new();
            for (i, (t, p)) in table.rows.iter().enumerate() {
                let t =
                    parse_timestamp(t).ok_or_else(|| csv_err(path, format!("row {}: bad timestamp {t:?}", i + 2)))?;
                ts.push(t);
                ps.push(parse_value(path, i, p)?);
            }
            if ps.len() < 2 {
                return Err(Error::TooShort { needed: 2, got: ps.len() });
            }
            if let Some(index) = ps.iter().position(|p| !(*p > 0.0)) {
                return Err(Error::NonPositive { index, value: ps[index] });
            }
            let values = ps.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
            let series = IncrementSeries::new(values, SeriesRole::Return, source)?;
            let dates: Vec<NaiveDate> = ts[1..]
                .iter()
                .map(|t| DateTime::from_timestamp(*t, 0).map(|d| d.date_naive()))
                .collect::<Option<_>>()
                .ok_or_else(|| csv_err(path, "timestamp out of range"))?;
            if dates.windows(2).all(|w| w[0] < w[1]) {
                series.with_dates(dates)
            } else {
                Ok(series)
            }
        }
        ("date", "value") => {
            let mut dates = Vec::new();
            let mut values = Vec::new();
            for (i, (d, v)) in table.rows.iter().enumerate() {
                let d = NaiveDate::parse_from_str(d, "%Y-%m-%d")
                    .map_err(|_| csv_err(path, format!("row {}: bad date {d:?}", i + 2)))?;
                dates.push(d);
                values.push(parse_value(path, i, v)?);
            }
            IncrementSeries::new(values, SeriesRole::Generic, source)?.with_dates(dates)
        }
        ("index", "value") => {
            let values =
                table.rows.iter().enumerate().map(|(i, (_, v))| parse_value(path, i, v)).collect::<Result<Vec<_>>>()?;
            IncrementSeries::new(values, SeriesRole::Generic, source)
        }
        (a, b) => Err(csv_err(
            path,
            format!("unrecognised header `{a},{b}`; expected timestamp,price | date,value | index,value"),
        )),
    }
}

fn write_err(path: &Path, e: impl std::fmt::Display) -> Error {
    csv_err(path, e.to_string())
}

/// Writes `date,value` when the series is dated, `index,value` otherwise.
pub fn write_series(path: impl AsRef<Path>, series: &IncrementSeries) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    match series.dates() {
        Some(dates) => {
            w.write_record(["date", "value"]).map_err(|e| write_err(path, e))?;
            for (d, v) in dates.iter().zip(series.values()) {
                w.write_record([d.to_string(), fmt_machine(*v)]).map_err(|e| write_err(path, e))?;
            }
        }
        None => {
            w.write_record(["index", "value"]).map_err(|e| write_err(path, e))?;
            for (i, v) in series.values().iter().enumerate() {
                w.write_record([i.to_string(), fmt_machine(*v)]).map_err(|e| write_err(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| write_err(path, e))
}

/// Writes `timestamp,price` with epoch-second timestamps.
pub fn write_intraday(path: impl AsRef<Path>, series: &IntradaySeries) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    w.write_record(["timestamp", "price"]).map_err(|e| write_err(path, e))?;
    for (t, p) in series.timestamps().iter().zip(series.prices()) {
        w.write_record([t.to_string(), fmt_machine(*p)]).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

pub fn write_daily(path: impl AsRef<Path>, series: &DailySeries) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    w.write_record(["date", "value"]).map_err(|e| write_err(path, e))?;
    for (d, v) in series.dates().iter().zip(series.values()) {
        w.write_record([d.to_string(), fmt_machine(*v)]).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}
