use std::collections::HashMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{DatasetError, LabeledDataset};
use crate::fsutil::atomic_write;
use crate::Scalar;

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
    #[default]
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse::<usize>() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

/// JSON metadata written next to a dataset CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub d: usize,
    pub n: usize,
    pub c: usize,
    pub label_map: Vec<String>,
    pub seed: Option<u64>,
    pub provenance: String,
}

fn io_err(path: &Path, source: std::io::Error) -> DatasetError {
    DatasetError::Io { path: path.display().to_string(), source }
}

/// Loads a row-per-sample CSV into a `d × n` dataset.
///
/// A first row in which no cell parses as a number is taken as the header.
/// Labels are densified to `0..c` in order of first occurrence. Reported
/// row and column numbers are 1-based file positions.
pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, label_column: &LabelColumn) -> Result<LabeledDataset<T>, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_csv(&text, label_column)
}

pub(crate) fn parse_csv<T: Scalar>(text: &str, label_column: &LabelColumn) -> Result<LabeledDataset<T>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        rows.push(record);
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }

    let header_present = rows[0].iter().all(|cell| cell.parse::<f64>().is_err());
    let header = if header_present { Some(rows.remove(0)) } else { None };
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }
    let first_line = if header_present { 2 } else { 1 };

    let width = header.as_ref().map_or(rows[0].len(), |h| h.len());
    if width < 2 {
        return Err(DatasetError::Shape("need at least one feature column and a label column".into()));
    }
    let label_idx = match label_column {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(i) => return Err(DatasetError::UnknownLabelColumn(i.to_string())),
        LabelColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|cell| cell == name))
            .ok_or_else(|| DatasetError::UnknownLabelColumn(name.clone()))?,
    };

    let d = width - 1;
    let n = rows.len();
    let mut values = Vec::with_capacity(d * n);
    let mut labels = Vec::with_capacity(n);
    let mut names: Vec<String> = Vec::new();
    let mut lookup: HashMap<String, usize> = HashMap::new();

    for (r, record) in rows.iter().enumerate() {
        let line = first_line + r;
        if record.len() != width {
            return Err(DatasetError::Ragged { row: line, expected: width, found: record.len() });
        }
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                continue;
            }
            let value: T = cell.parse().map_err(|_| DatasetError::NonNumeric {
                row: line,
                column: col + 1,
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::NonFinite { row: line, column: col + 1 });
            }
            values.push(value);
        }
        let raw = &record[label_idx];
        let next = names.len();
        let label = *lookup.entry(raw.to_string()).or_insert_with(|| {
            names.push(raw.to_string());
            next
        });
        labels.push(label);
    }
    if names.len() < 2 {
        return Err(DatasetError::SingleClass);
    }
    // values are row-major samples: exactly the column-major layout of d × n
    let features = DMatrix::from_vec(d, n, values);
    let c = names.len();
    LabeledDataset::with_label_names(features, labels, c, names)
}

pub(crate) fn to_csv_bytes<T: Scalar>(data: &LabeledDataset<T>) -> Result<Vec<u8>, DatasetError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..data.dim()).map(|k| format!("f{k}")).collect();
    header.push("label".into());
    writer.write_record(&header)?;
    for (j, &label) in data.labels().iter().enumerate() {
        let mut row: Vec<String> = data.features().column(j).iter().map(|v| v.to_string()).collect();
        row.push(data.label_names()[label].clone());
        writer.write_record(&row)?;
    }
    writer.into_inner().map_err(|e| DatasetError::Io {
        path: "<buffer>".into(),
        source: e.into_error(),
    })
}

/// Writes `data` as a headed row-per-sample CSV with the label last.
pub fn write_csv<T: Scalar>(path: impl AsRef<Path>, data: &LabeledDataset<T>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let bytes = to_csv_bytes(data)?;
    atomic_write(path, &bytes).map_err(|e| io_err(path, e))
}

pub fn write_sidecar(path: impl AsRef<Path>, sidecar: &Sidecar) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let mut bytes = serde_json::to_vec_pretty(sidecar)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes).map_err(|e| io_err(path, e))
}

pub fn read_sidecar(path: impl AsRef<Path>) -> Result<Sidecar, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

impl Sidecar {
    pub fn describe<T: Scalar>(data: &LabeledDataset<T>, seed: Option<u64>, provenance: impl Into<String>) -> Self {
        Self {
            d: data.dim(),
            n: data.len(),
            c: data.class_count(),
            label_map: data.label_names().to_vec(),
            seed,
            provenance: provenance.into(),
        }
    }
}
