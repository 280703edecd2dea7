use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::EvalError;
use crate::dataset::LabeledDataset;
use crate::fsutil::atomic_write;
use crate::solver::project_dataset;
use crate::Scalar;

pub const DEFAULT_BINS: usize = 50;

/// One histogram bin of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub label: usize,
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Per-class histograms of 1-D coordinates over `bins` uniform bins spanning
/// the data range (the last bin is closed). Every (class, bin) is listed.
pub fn histogram(values: &[f64], labels: &[usize], classes: usize, bins: usize) -> Vec<HistogramBin> {
    assert!(bins > 0, "need at least one bin");
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![vec![0usize; bins]; classes];
    for (&v, &l) in values.iter().zip(labels) {
        let b = (((v - lo) / width).floor() as usize).min(bins - 1);
        counts[l][b] += 1;
    }
    let mut out = Vec::with_capacity(classes * bins);
    for (label, row) in counts.iter().enumerate() {
        for (b, &count) in row.iter().enumerate() {
            out.push(HistogramBin { label, left: lo + b as f64 * width, right: lo + (b + 1) as f64 * width, count });
        }
    }
    out
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut out = String::from("label,bin_left,bin_right,count\n");
    for b in bins {
        let _ = writeln!(out, "{},{},{},{}", b.label, b.left, b.right, b.count);
    }
    out
}

/// `(coordinates…, label)` rows of projected points.
pub fn scatter_csv<T: Scalar>(projected: &DMatrix<T>, labels: &[usize]) -> String {
    let m = projected.nrows();
    let names = ["x", "y"];
    let mut out = String::new();
    for name in names.iter().take(m) {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("label\n");
    for (col, &l) in projected.column_iter().zip(labels) {
        for v in col.iter() {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{l}");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotFiles {
    pub scatter: PathBuf,
    pub histogram: Option<PathBuf>,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Writes `<prefix>_scatter.csv` and, for `m = 1`, `<prefix>_hist.csv`.
pub fn export_projection_plot<T: Scalar>(
    data: &LabeledDataset<T>,
    w: &DMatrix<T>,
    prefix: &Path,
    bins: usize,
) -> Result<PlotFiles, EvalError> {
    let m = w.ncols();
    if !(1..=2).contains(&m) {
        return Err(EvalError::UnsupportedPlotDim(m));
    }
    let projected = project_dataset(data, w)?;
    let scatter = with_suffix(prefix, "_scatter.csv");
    atomic_write(&scatter, scatter_csv(&projected, data.labels()).as_bytes()).map_err(EvalError::Io)?;
    let histogram = if m == 1 {
        let values: Vec<f64> = projected.iter().map(|v| v.as_f64()).collect();
        let rows = histogram(&values, data.labels(), data.class_count(), bins);
        let path = with_suffix(prefix, "_hist.csv");
        atomic_write(&path, histogram_csv(&rows).as_bytes()).map_err(EvalError::Io)?;
        Some(path)
    } else {
        None
    };
    Ok(PlotFiles { scatter, histogram })
}
