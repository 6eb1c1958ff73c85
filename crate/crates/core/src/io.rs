//! CSV input and output of data sets.
//!
//! A data file has a header row. A column named `label` holds integer ground
//! truth; every other column is a coordinate. Floats are written with 17
//! significant digits so a write/read round trip is exact.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernels::DataSet;

pub const LABEL_COLUMN: &str = "label";

pub fn read_dataset(reader: impl Read) -> Result<DataSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let label_col = headers.iter().position(|h| h == LABEL_COLUMN);
    let d = headers.len() - usize::from(label_col.is_some());
    if d == 0 {
        return Err(Error::Csv("no coordinate columns".into()));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let line = r + 2;
        for (c, field) in record.iter().enumerate() {
            if Some(c) == label_col {
                let l = field
                    .parse::<usize>()
                    .map_err(|_| Error::Csv(format!("line {line}: label {field:?} is not a nonnegative integer")))?;
                labels.push(l);
            } else {
                let v = field
                    .parse::<f64>()
                    .map_err(|_| Error::Csv(format!("line {line}: {field:?} is not a number")))?;
                if !v.is_finite() {
                    return Err(Error::Csv(format!("line {line}: non-finite value {field:?}")));
                }
                points.push(v);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Csv("no data rows".into()));
    }
    DataSet::new(d, points, label_col.map(|_| labels))
}

pub fn read_dataset_file(path: impl AsRef<Path>) -> Result<DataSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
    read_dataset(std::io::BufReader::new(file))
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_dataset(data: &DataSet, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=data.dim()).map(|a| format!("x{a}")).collect();
    if data.labels().is_some() {
        header.push(LABEL_COLUMN.into());
    }
    w.write_record(&header)?;
    for (i, p) in data.points().enumerate() {
        let mut row: Vec<String> = p.iter().map(|&v| format_float(v)).collect();
        if let Some(l) = data.labels() {
            row.push(l[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_file(data: &DataSet, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_dataset(data, std::io::BufWriter::new(file))
}
