use std::cmp::Ordering;
use std::path::Path;

use serde::Serialize;

use super::TimeSeriesWindow;
use crate::error::{Error, Result};

/// Windows cut from a CSV stream plus what was thrown away.
#[derive(Debug, Clone, Serialize)]
pub struct LoadReport {
    pub windows: Vec<TimeSeriesWindow>,
    /// Complete windows dropped because they held a non-finite sample.
    pub dropped_windows: usize,
    /// Trailing samples that did not fill a whole window.
    pub discarded_samples: usize,
}

/// Cut a `value` or `timestamp,value` CSV file into consecutive
/// non-overlapping windows of `window_len` samples.
///
/// A first line whose value field is not numeric is taken as a header.
/// Later unparseable values count as non-finite samples. Timestamps, when
/// present, must be strictly increasing (numerically if they all parse as
/// numbers, lexicographically otherwise) and are then ignored.
pub fn load_csv(path: impl AsRef<Path>, window_len: usize) -> Result<LoadReport> {
    let path = path.as_ref();
    if window_len < 2 {
        return Err(Error::invalid(format!(
            "window length must be at least 2, got {window_len}"
        )));
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };

    let mut values = Vec::new();
    let mut timestamps: Vec<String> = Vec::new();
    let mut parsed_any = false;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let (ts, value) = match record.len() {
            1 => (None, &record[0]),
            2 => (Some(&record[0]), &record[1]),
            0 => continue,
            n => {
                return Err(parse_err(format!(
                    "line {}: expected 1 or 2 fields, found {n}",
                    line + 1
                )))
            }
        };
        match value.parse::<f64>() {
            Ok(v) => {
                parsed_any = true;
                values.push(v);
            }
            Err(_) if line == 0 => continue,
            Err(_) => values.push(f64::NAN),
        }
        if let Some(ts) = ts {
            timestamps.push(ts.to_owned());
        }
    }

    if !parsed_any {
        return Err(parse_err("no parseable numeric column".into()));
    }
    check_timestamp_order(&timestamps).map_err(parse_err)?;

    let n_complete = values.len() / window_len;
    if n_complete == 0 {
        return Err(parse_err(format!(
            "zero complete windows: {} samples, window length {window_len}",
            values.len()
        )));
    }

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut windows = Vec::with_capacity(n_complete);
    let mut dropped_windows = 0;
    for (i, chunk) in values.chunks_exact(window_len).enumerate() {
        if chunk.iter().all(|v| v.is_finite()) {
            windows.push(TimeSeriesWindow::new(
                chunk.to_vec(),
                format!("{stem}#{i}"),
            )?);
        } else {
            dropped_windows += 1;
        }
    }
    Ok(LoadReport {
        windows,
        dropped_windows,
        discarded_samples: values.len() % window_len,
    })
}

fn check_timestamp_order(ts: &[String]) -> std::result::Result<(), String> {
    let numeric: Option<Vec<f64>> = ts.iter().map(|t| t.parse::<f64>().ok()).collect();
    let out_of_order = match numeric {
        Some(nums) => nums
            .windows(2)
            .position(|p| p[0].partial_cmp(&p[1]) != Some(Ordering::Less)),
        None => ts.windows(2).position(|p| p[0] >= p[1]),
    };
    match out_of_order {
        Some(i) => Err(format!(
            "timestamps not strictly increasing at record {}",
            i + 2
        )),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn series(n: usize) -> String {
        (0..n).map(|i| format!("{}\n", i as f64 * 0.5)).collect()
    }

    #[test]
    fn remainder_is_discarded() {
        let f = write_tmp(&series(1200));
        let r = load_csv(f.path(), 500).unwrap();
        assert_eq!(r.windows.len(), 2);
        assert_eq!(r.discarded_samples, 200);
        assert_eq!(r.dropped_windows, 0);
    }

    #[test]
    fn too_short_is_an_error() {
        let f = write_tmp(&series(499));
        let err = load_csv(f.path(), 500).unwrap_err();
        assert!(err.to_string().contains("zero complete windows"), "{err}");
        assert!(err.is_input_error());
    }

    #[test]
    fn non_finite_window_is_dropped() {
        let mut text = series(1000);
        text = text.replacen("3\n", "NaN\n", 1);
        let f = write_tmp(&text);
        let r = load_csv(f.path(), 500).unwrap();
        assert_eq!(r.windows.len(), 1);
        assert_eq!(r.dropped_windows, 1);
        assert_eq!(r.windows[0].samples()[0], 250.0);
    }

    #[test]
    fn header_and_timestamps() {
        let f = write_tmp("time,temp\n1,20.5\n2,21.0\n3,21.5\n4,22.0\n");
        let r = load_csv(f.path(), 2).unwrap();
        assert_eq!(r.windows.len(), 2);
        assert_eq!(r.windows[1].samples(), &[21.5, 22.0]);

        let f = write_tmp("1,20.5\n3,21.0\n2,21.5\n4,22.0\n");
        assert!(load_csv(f.path(), 2).is_err());

        let f = write_tmp("2024-01-01T00:00,1\n2024-01-01T00:10,2\n");
        assert_eq!(load_csv(f.path(), 2).unwrap().windows.len(), 1);
    }

    #[test]
    fn windows_reproduce_stream_prefix() {
        let f = write_tmp(&series(1234));
        let r = load_csv(f.path(), 100).unwrap();
        let joined: Vec<f64> = r
            .windows
            .iter()
            .flat_map(|w| w.samples().to_vec())
            .collect();
        let expected: Vec<f64> = (0..1200).map(|i| i as f64 * 0.5).collect();
        assert_eq!(joined, expected);
    }

    #[test]
    fn no_numbers_is_an_error() {
        let f = write_tmp("a\nb\nc\n");
        assert!(load_csv(f.path(), 2).is_err());
        assert!(load_csv("/nonexistent/file.csv", 2).is_err());
        let f = write_tmp(&series(10));
        assert!(load_csv(f.path(), 1).is_err());
    }
}
