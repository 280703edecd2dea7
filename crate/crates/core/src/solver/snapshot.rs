use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Method, Projection, SolverConfig, SolverTrace};
use crate::fsutil::atomic_write;
use crate::Scalar;

/// JSON model file shared by every method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSnapshot {
    /// `W`, row-major, `d · m` entries.
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    pub d: usize,
    pub m: usize,
    pub source: Method,
    pub epsilon: f64,
    pub constraint_residual: f64,
    pub config: SolverConfig,
    pub objective_trace: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl ModelSnapshot {
    pub fn new<T: Scalar>(projection: &Projection<T>, config: &SolverConfig, trace: Option<&SolverTrace>) -> Self {
        let w = &projection.matrix;
        let mut flat = Vec::with_capacity(w.len());
        for r in 0..w.nrows() {
            flat.extend(w.row(r).iter().map(|v| v.as_f64()));
        }
        Self {
            w: flat,
            d: w.nrows(),
            m: w.ncols(),
            source: projection.source,
            epsilon: projection.epsilon,
            constraint_residual: projection.constraint_residual,
            config: config.clone(),
            objective_trace: trace.map(|t| t.objectives.clone()).unwrap_or_default(),
            converged: trace.map(|t| t.converged),
            iterations: trace.map(|t| t.iterations),
        }
    }

    pub fn matrix<T: Scalar>(&self) -> Result<DMatrix<T>, String> {
        if self.w.len() != self.d * self.m {
            return Err(format!("W has {} entries, expected {}x{}", self.w.len(), self.d, self.m));
        }
        Ok(DMatrix::from_row_iterator(self.d, self.m, self.w.iter().map(|&v| T::cast(v))))
    }

    pub fn projection<T: Scalar>(&self) -> Result<Projection<T>, String> {
        Ok(Projection {
            matrix: self.matrix()?,
            constraint_residual: self.constraint_residual,
            source: self.source,
            epsilon: self.epsilon,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshot serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        atomic_write(path, self.to_json().as_bytes())
    }
}

/// `iteration,objective` CSV of an objective sequence.
pub fn trace_csv(objectives: &[f64]) -> String {
    let mut out = String::from("iteration,objective\n");
    for (t, f) in objectives.iter().enumerate() {
        let _ = writeln!(out, "{t},{f}");
    }
    out
}

pub fn write_trace_csv(path: &Path, objectives: &[f64]) -> std::io::Result<()> {
    atomic_write(path, trace_csv(objectives).as_bytes())
}
