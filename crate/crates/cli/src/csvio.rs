//! Trajectory CSV files: fixed headers, 17 significant digits, and a
//! `TRUNCATED` marker row after a failed integration.

use std::io::{Read, Write};
use thiserror::Error;

pub const TRAJECTORY_HEADER: [&str; 9] = ["s", "u", "v", "p_u", "p_v", "E", "t", "H", "drift"];
pub const PHYSICAL_HEADER: [&str; 5] = ["t", "q1x", "q1y", "q2x", "q2y"];
pub const TRUNCATED_MARKER: &str = "TRUNCATED";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("header mismatch: expected {expected:?}, found {found:?}")]
    Header {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
}

/// Shortest form with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable<const N: usize> {
    pub rows: Vec<[f64; N]>,
    /// Message carried by the marker row, when present.
    pub truncated: Option<String>,
}

impl<const N: usize> Default for CsvTable<N> {
    fn default() -> Self {
        Self {
            rows: Vec::new(),
            truncated: None,
        }
    }
}

pub type TrajectoryTable = CsvTable<9>;
pub type PhysicalTable = CsvTable<5>;

pub fn write_table<const N: usize, W: Write>(
    out: W,
    header: &[&str; N],
    table: &CsvTable<N>,
) -> Result<(), CsvError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| fmt_f64(*x)))?;
    }
    if let Some(msg) = &table.truncated {
        w.write_record([TRUNCATED_MARKER, msg.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

pub fn read_table<const N: usize, R: Read>(input: R, header: &[&str; N]) -> Result<CsvTable<N>, CsvError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = r.records();
    let first = match records.next() {
        Some(rec) => rec?,
        None => {
            return Err(CsvError::Header {
                expected: header.iter().map(|s| s.to_string()).collect(),
                found: Vec::new(),
            })
        }
    };
    if first.iter().ne(header.iter().copied()) {
        return Err(CsvError::Header {
            expected: header.iter().map(|s| s.to_string()).collect(),
            found: first.iter().map(|s| s.to_string()).collect(),
        });
    }
    let mut table = CsvTable::default();
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let row = i + 2;
        if table.truncated.is_some() {
            return Err(CsvError::Row {
                row,
                reason: "data after the truncation marker".into(),
            });
        }
        if rec.get(0) == Some(TRUNCATED_MARKER) {
            if rec.len() > 2 {
                return Err(CsvError::Row {
                    row,
                    reason: "malformed truncation marker".into(),
                });
            }
            table.truncated = Some(rec.get(1).unwrap_or("").to_string());
            continue;
        }
        if rec.len() != N {
            return Err(CsvError::Row {
                row,
                reason: format!("expected {N} fields, found {}", rec.len()),
            });
        }
        let mut vals = [0.0; N];
        for (j, field) in rec.iter().enumerate() {
            vals[j] = parse_field(field).ok_or_else(|| CsvError::Row {
                row,
                reason: format!("field {} is not a number: {field:?}", header[j]),
            })?;
        }
        table.rows.push(vals);
    }
    Ok(table)
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<TrajectoryTable, CsvError> {
    read_table(input, &TRAJECTORY_HEADER)
}

pub fn read_physical_csv<R: Read>(input: R) -> Result<PhysicalTable, CsvError> {
    read_table(input, &PHYSICAL_HEADER)
}
