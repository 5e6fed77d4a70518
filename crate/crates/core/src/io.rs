//! CSV ingestion and emission for series data.
//!
//! Input files carry two columns, `timestamp,value`. Timestamps are ISO-8601
//! strings or integer epoch seconds and must be strictly increasing; an empty
//! value field marks a missing observation. [`ingest`] runs the whole
//! preparation pipeline: parse, optional block-max aggregation, missing-rate
//! guard, interpolation.

use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::series::{Series, SeriesMeta};

/// Ingestion options beyond raw parsing.
#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// When set, aggregate each `block_max`-length block of raw rows to its
    /// maximum before interpolation.
    pub block_max: Option<usize>,
    /// Maximum tolerated missing fraction (after aggregation). Defaults to
    /// 0.5.
    pub max_missing_fraction: Option<f64>,
}

/// Parses one timestamp field: integer epoch seconds or ISO-8601
/// (offset-bearing or naive, date-only allowed; naive forms are read as UTC).
fn parse_timestamp(field: &str) -> Option<i64> {
    let field = field.trim();
    if let Ok(epoch) = field.parse::<i64>() {
        return Some(epoch);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(field) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(field, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(field, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0).expect("midnight").and_utc().timestamp());
    }
    None
}

/// Reads a `timestamp,value` CSV into a [`Series`].
///
/// A leading header row is skipped when its first field is not a parseable
/// timestamp. Timestamps must be strictly increasing; step metadata is
/// recorded only when the spacing is uniform.
pub fn read_series_csv(path: &Path) -> Result<Series> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut timestamps: Vec<i64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut mask: Vec<bool> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::data(format!(
                "row {}: expected 2 columns, found {}",
                row + 1,
                record.len()
            )));
        }
        let ts_field = record.get(0).unwrap_or("");
        let value_field = record.get(1).unwrap_or("");
        let Some(ts) = parse_timestamp(ts_field) else {
            if row == 0 {
                continue;
            }
            return Err(Error::data(format!("row {}: unparseable timestamp `{ts_field}`", row + 1)));
        };
        if let Some(&prev) = timestamps.last() {
            if ts <= prev {
                return Err(Error::data(format!(
                    "row {}: timestamp {ts} not after previous {prev}",
                    row + 1
                )));
            }
        }
        timestamps.push(ts);
        if value_field.is_empty() {
            values.push(f64::NAN);
            mask.push(false);
        } else {
            let v: f64 = value_field
                .parse()
                .map_err(|_| Error::data(format!("row {}: unparseable value `{value_field}`", row + 1)))?;
            values.push(v);
            mask.push(true);
        }
    }
    if timestamps.is_empty() {
        return Err(Error::data(format!("{}: no data rows", path.display())));
    }
    let meta = uniform_step(&timestamps).map(|step_s| SeriesMeta {
        origin_epoch_s: timestamps[0],
        step_s,
    });
    Series::new(values, mask, meta)
}

/// The common positive step when all consecutive gaps agree, else `None`.
fn uniform_step(timestamps: &[i64]) -> Option<i64> {
    if timestamps.len() < 2 {
        return None;
    }
    let step = timestamps[1] - timestamps[0];
    if timestamps.windows(2).all(|w| w[1] - w[0] == step) {
        Some(step)
    } else {
        None
    }
}

/// Full preparation pipeline: read, optionally block-max, enforce the missing
/// ceiling, interpolate. The returned series is fully present.
pub fn ingest(path: &Path, options: IngestOptions) -> Result<Series> {
    let mut series = read_series_csv(path)?;
    if let Some(block_len) = options.block_max {
        series = series.aggregate_block_max(block_len)?;
    }
    let ceiling = options.max_missing_fraction.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&ceiling) {
        return Err(Error::config(format!("max_missing_fraction {ceiling} outside [0, 1]")));
    }
    let fraction = series.missing_count() as f64 / series.len() as f64;
    if fraction > ceiling {
        return Err(Error::data(format!(
            "missing fraction {fraction:.3} exceeds ceiling {ceiling:.3}"
        )));
    }
    series.interpolate_missing()
}

/// Writes a series as `t,value` rows with a header. `t` is the epoch-second
/// timestamp when step metadata exists, else the 0-based index; missing
/// entries are written with an empty value field.
pub fn write_series_csv(path: &Path, series: &Series) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["t", "value"])?;
    for (i, (v, &present)) in series.values().iter().zip(series.mask()).enumerate() {
        let t = match series.meta() {
            Some(m) => m.origin_epoch_s + m.step_s * i as i64,
            None => i as i64,
        };
        let value = if present { format_float(*v) } else { String::new() };
        writer.write_record([t.to_string(), value])?;
    }
    writer.flush()?;
    Ok(())
}

/// Shortest round-trip decimal rendering of a float.
pub fn format_float(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains(['.', 'e', 'n', 'i']) {
        s.push_str(".0");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_epoch_seconds_with_header() {
        let f = write_temp("timestamp,value\n0,1.5\n60,2.5\n120,\n180,4.0\n");
        let s = read_series_csv(f.path()).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.mask(), &[true, true, false, true]);
        assert_eq!(s.values()[1], 2.5);
        let meta = s.meta().unwrap();
        assert_eq!(meta.origin_epoch_s, 0);
        assert_eq!(meta.step_s, 60);
    }

    #[test]
    fn reads_iso_timestamps_without_header() {
        let f = write_temp("2017-09-06T00:00:00,1.0\n2017-09-06T01:00:00,2.0\n");
        let s = read_series_csv(f.path()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.meta().unwrap().step_s, 3600);
    }

    #[test]
    fn rejects_non_monotone_timestamps() {
        let f = write_temp("t,value\n10,1.0\n10,2.0\n");
        let err = read_series_csv(f.path()).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");
    }

    #[test]
    fn rejects_empty_file() {
        let f = write_temp("");
        assert!(read_series_csv(f.path()).is_err());
        let f = write_temp("timestamp,value\n");
        assert!(read_series_csv(f.path()).is_err());
    }

    #[test]
    fn irregular_spacing_gets_no_meta() {
        let f = write_temp("0,1.0\n60,2.0\n90,3.0\n");
        let s = read_series_csv(f.path()).unwrap();
        assert!(s.meta().is_none());
    }

    #[test]
    fn ingest_block_max_minute_to_hour() {
        let mut content = String::from("timestamp,value\n");
        for i in 0..120 {
            content.push_str(&format!("{},{}\n", i * 60, i));
        }
        let f = write_temp(&content);
        let s = ingest(
            f.path(),
            IngestOptions {
                block_max: Some(60),
                max_missing_fraction: None,
            },
        )
        .unwrap();
        assert_eq!(s.values(), &[59.0, 119.0]);
        assert_eq!(s.meta().unwrap().step_s, 3600);
    }

    #[test]
    fn ingest_interpolates_sparse_missing() {
        let f = write_temp("0,1.0\n60,\n120,3.0\n");
        let s = ingest(f.path(), IngestOptions::default()).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn ingest_rejects_mostly_missing() {
        let f = write_temp("0,1.0\n60,\n120,\n180,\n240,5.0\n");
        let err = ingest(f.path(), IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");
    }

    #[test]
    fn series_csv_round_trip() {
        let series = Series::new(
            vec![1.5, f64::NAN, -0.25],
            vec![true, false, true],
            Some(SeriesMeta {
                origin_epoch_s: 100,
                step_s: 60,
            }),
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_series_csv(f.path(), &series).unwrap();
        let back = read_series_csv(f.path()).unwrap();
        assert_eq!(back.mask(), series.mask());
        assert_eq!(back.values()[0], 1.5);
        assert_eq!(back.values()[2], -0.25);
        assert_eq!(back.meta(), series.meta());
    }
}
