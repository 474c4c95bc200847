//! JSON model files.
//!
//! ```json
//! {
//!   "n": 2,
//!   "kind": "integer",
//!   "entries": [
//!     [{"bernoulli": 0.5}, {"constant": 3}],
//!     [{"atoms": [[0, 0.25], [2, 0.75]]}, {"constant": -1}]
//!   ]
//! }
//! ```

use std::path::Path;

use diagsum::{AtomicDistribution, Distribution, Kind, LatticeDistribution, MatrixModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Largest span of an integer `atoms` cell.
const MAX_LATTICE_SPAN: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    pub kind: Kind,
    pub entries: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Cell {
    Bernoulli(f64),
    Constant(f64),
    Atoms(Vec<(f64, f64)>),
}

impl Cell {
    fn to_distribution(&self, kind: Kind) -> Result<Distribution, String> {
        let lib = |e: diagsum::Error| e.to_string();
        match (self, kind) {
            (Cell::Bernoulli(p), Kind::Integer) => {
                Ok(LatticeDistribution::bernoulli(*p).map_err(lib)?.into())
            }
            (Cell::Bernoulli(p), Kind::Real) => {
                if !(0.0..=1.0).contains(p) {
                    return Err(format!("bernoulli parameter {p} outside [0, 1]"));
                }
                Ok(AtomicDistribution::new(vec![(0.0, 1.0 - p), (1.0, *p)])
                    .map_err(lib)?
                    .into())
            }
            (Cell::Constant(c), Kind::Integer) => Ok(LatticeDistribution::point(integer(*c)?).into()),
            (Cell::Constant(c), Kind::Real) => {
                if !c.is_finite() {
                    return Err(format!("constant {c} is not finite"));
                }
                Ok(AtomicDistribution::point(*c).into())
            }
            (Cell::Atoms(atoms), Kind::Integer) => {
                if atoms.is_empty() {
                    return Err("atoms list is empty".into());
                }
                let mut locations = Vec::with_capacity(atoms.len());
                for &(x, _) in atoms {
                    locations.push(integer(x)?);
                }
                let lo = *locations.iter().min().expect("nonempty");
                let hi = *locations.iter().max().expect("nonempty");
                if (hi - lo) as f64 > MAX_LATTICE_SPAN {
                    return Err(format!("support spans {} integers", hi - lo + 1));
                }
                let mut dense = vec![0.0; (hi - lo + 1) as usize];
                for (&k, &(_, p)) in locations.iter().zip(atoms) {
                    if !(p.is_finite() && p >= 0.0) {
                        return Err(format!("mass {p} is not a nonnegative number"));
                    }
                    dense[(k - lo) as usize] += p;
                }
                Ok(LatticeDistribution::new(lo, dense).map_err(lib)?.into())
            }
            (Cell::Atoms(atoms), Kind::Real) => {
                Ok(AtomicDistribution::new(atoms.clone()).map_err(lib)?.into())
            }
        }
    }

    fn from_distribution(d: &Distribution) -> Self {
        match d {
            Distribution::Lattice(l) if l.is_point_mass() => Cell::Constant(l.offset() as f64),
            Distribution::Lattice(l) if l.offset() == 0 && l.masses().len() == 2 => {
                Cell::Bernoulli(l.masses()[1])
            }
            Distribution::Lattice(l) => {
                Cell::Atoms(l.iter().map(|(k, p)| (k as f64, p)).collect())
            }
            Distribution::Atomic(a) if a.len() == 1 => Cell::Constant(a.atoms()[0].0),
            Distribution::Atomic(a) => Cell::Atoms(a.atoms().to_vec()),
        }
    }
}

fn integer(x: f64) -> Result<i64, String> {
    if x.fract() != 0.0 || x.abs() > 2f64.powi(53) {
        return Err(format!("{x} is not an integer location"));
    }
    Ok(x as i64)
}

impl ModelFile {
    pub fn to_model(&self) -> Result<MatrixModel, String> {
        if self.entries.len() != self.n {
            return Err(format!(
                "entries has {} rows, expected n = {}",
                self.entries.len(),
                self.n
            ));
        }
        let mut rows = Vec::with_capacity(self.n);
        for (j, row) in self.entries.iter().enumerate() {
            if row.len() != self.n {
                return Err(format!(
                    "row {} has {} cells, expected n = {}",
                    j + 1,
                    row.len(),
                    self.n
                ));
            }
            let mut out = Vec::with_capacity(self.n);
            for (r, cell) in row.iter().enumerate() {
                let d = cell
                    .to_distribution(self.kind)
                    .map_err(|e| format!("cell (row {}, column {}): {e}", j + 1, r + 1))?;
                out.push(d);
            }
            rows.push(out);
        }
        MatrixModel::new(rows).map_err(|e| e.to_string())
    }

    pub fn from_model(model: &MatrixModel) -> Self {
        Self {
            n: model.n(),
            kind: model.kind(),
            entries: model
                .rows()
                .map(|row| row.iter().map(Cell::from_distribution).collect())
                .collect(),
        }
    }
}

/// Parses a model; syntax errors carry a line and column, semantic errors
/// the offending cell.
pub fn parse_model(text: &str) -> Result<MatrixModel, String> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.to_model()
}

pub fn model_to_json(model: &MatrixModel) -> String {
    let mut s = serde_json::to_string_pretty(&ModelFile::from_model(model))
        .expect("model files always serialize");
    s.push('\n');
    s
}

pub fn read_model(path: &Path) -> Result<MatrixModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_model(&text).map_err(|message| CliError::Input {
        path: path.to_path_buf(),
        message,
    })
}
