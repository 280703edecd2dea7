use std::path::Path;

use serde::Deserialize;

use crate::eval::CorruptionGrid;
use crate::scatter::EpsilonPolicy;
use crate::solver::{MAssembly, SvdRoute};

/// Optional experiment manifest; every field can be overridden by a flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub label: Option<String>,
    pub method: Option<String>,
    pub methods: Option<Vec<String>>,
    pub m: Option<usize>,
    pub dims: Option<String>,
    pub seed: Option<u64>,
    pub cv_seed: Option<u64>,
    pub folds: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub epsilon_policy: Option<EpsilonPolicy>,
    pub m_assembly: Option<MAssembly>,
    pub svd_route: Option<SvdRoute>,
    pub zero_norm_threshold: Option<f64>,
    pub bins: Option<usize>,
    pub runs: Option<usize>,
    pub corrupt: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Inclusive range `a..b` (or a single value).
pub fn parse_range(text: &str) -> Result<(usize, usize), String> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad range {text:?}"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {text:?}"));
    }
    Ok((lo, hi))
}

/// Parses `classes=A..B,frac=F1/F2,pixels=P,seeds=S`.
impl std::str::FromStr for CorruptionGrid {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut grid = CorruptionGrid {
            classes: (0, 0),
            sample_fractions: vec![0.2, 0.4, 0.6, 0.8],
            pixel_fraction: 0.3,
            seeds: 1,
        };
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            let float = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number {v:?} in {key}"));
            match key.trim() {
                "classes" => grid.classes = parse_range(value)?,
                "frac" => grid.sample_fractions = value.split('/').map(float).collect::<Result<_, _>>()?,
                "pixels" => grid.pixel_fraction = float(value)?,
                "seeds" => grid.seeds = value.trim().parse().map_err(|_| format!("bad seed count {value:?}"))?,
                other => return Err(format!("unknown corruption key {other:?}")),
            }
        }
        for &f in grid.sample_fractions.iter().chain(std::iter::once(&grid.pixel_fraction)) {
            if !(0.0..=1.0).contains(&f) {
                return Err(format!("fraction {f} outside [0, 1]"));
            }
        }
        if grid.seeds == 0 {
            return Err("seeds must be at least 1".into());
        }
        Ok(grid)
    }
}
