//! JSON state and network files.
//!
//! State file:
//!
//! ```json
//! {"modes": 2, "basis": "quadrature", "matrix": [[...], ...], "mean": [...]}
//! ```
//!
//! `matrix` is a list of rows. In the `"complex"` basis every entry is a
//! `[re, im]` pair; the reader converts to the quadrature basis and
//! validates. `mean` is optional.
//!
//! Network file:
//!
//! ```json
//! {"modes": 3, "ops": [
//!   {"type": "beamsplitter", "modes": [0, 1], "transmissivity": 0.5, "phase": 0.0},
//!   {"type": "phase", "mode": 2, "angle": 1.0},
//!   {"type": "squeeze", "mode": 0, "r": 0.3, "phi": 0.0},
//!   {"type": "two_mode_squeeze", "modes": [1, 2], "r": 0.2, "phi": 0.0},
//!   {"type": "raw", "matrix": [[...], ...]}
//! ]}
//! ```

use std::fs;
use std::path::Path;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{to_quadrature_basis, CovarianceState};
use crate::symplectic::{GaussianOp, NetworkSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Quadrature,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StateFile {
    modes: usize,
    basis: Basis,
    matrix: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum OpEntry {
    Beamsplitter {
        modes: [usize; 2],
        transmissivity: f64,
        #[serde(default)]
        phase: f64,
    },
    Phase {
        mode: usize,
        angle: f64,
    },
    Squeeze {
        mode: usize,
        r: f64,
        #[serde(default)]
        phi: f64,
    },
    TwoModeSqueeze {
        modes: [usize; 2],
        r: f64,
        #[serde(default)]
        phi: f64,
    },
    Raw {
        matrix: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modes: Option<usize>,
    ops: Vec<OpEntry>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

fn rows_to_matrix<T: Clone + nalgebra::Scalar>(rows: Vec<Vec<T>>, dim: usize, what: &str) -> Result<DMatrix<T>> {
    if rows.len() != dim {
        return Err(Error::Parse(format!("{what}: {} rows, expected {dim}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Parse(format!("{what}: row {i} has {} entries, expected {dim}", row.len())));
        }
    }
    Ok(DMatrix::from_row_iterator(dim, dim, rows.into_iter().flatten()))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Raw quadrature-basis matrix and mean from a state file, without the
/// validity checks (complex input is still converted).
pub fn read_state_matrix(text: &str) -> Result<(DMatrix<f64>, Option<DVector<f64>>)> {
    let file: StateFile = serde_json::from_str(text).map_err(parse_err)?;
    let dim = 2 * file.modes;
    if file.modes == 0 {
        return Err(Error::Parse("field 'modes' must be positive".into()));
    }
    let matrix = match file.basis {
        Basis::Quadrature => {
            let rows = file
                .matrix
                .into_iter()
                .enumerate()
                .map(|(i, row)| {
                    row.into_iter()
                        .map(|e| match e {
                            Entry::Real(v) => Ok(v),
                            Entry::Complex(_) => Err(Error::Parse(format!(
                                "matrix row {i}: complex entry in quadrature basis"
                            ))),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            rows_to_matrix(rows, dim, "matrix")?
        }
        Basis::Complex => {
            let rows = file
                .matrix
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|e| match e {
                            Entry::Real(v) => Complex::new(v, 0.0),
                            Entry::Complex([re, im]) => Complex::new(re, im),
                        })
                        .collect()
                })
                .collect();
            to_quadrature_basis(&rows_to_matrix(rows, dim, "matrix")?)?
        }
    };
    let mean = match file.mean {
        Some(m) if m.len() != dim => {
            return Err(Error::Parse(format!("field 'mean' has {} entries, expected {dim}", m.len())))
        }
        Some(m) => Some(DVector::from_vec(m)),
        None => None,
    };
    Ok((matrix, mean))
}

pub fn parse_state_str(text: &str) -> Result<CovarianceState> {
    let (matrix, mean) = read_state_matrix(text)?;
    CovarianceState::new(matrix, mean)
}

pub fn parse_state_file(path: impl AsRef<Path>) -> Result<CovarianceState> {
    parse_state_str(&fs::read_to_string(path)?)
}

/// Serializes a state in the quadrature basis at full precision.
pub fn state_to_json(state: &CovarianceState) -> String {
    let file = StateFile {
        modes: state.n_modes(),
        basis: Basis::Quadrature,
        matrix: state
            .matrix()
            .row_iter()
            .map(|r| r.iter().map(|&v| Entry::Real(v)).collect())
            .collect(),
        mean: Some(state.mean().iter().copied().collect()),
    };
    serde_json::to_string_pretty(&file).expect("state serialization cannot fail")
}

fn op_from_entry(entry: OpEntry, n: usize) -> Result<GaussianOp> {
    Ok(match entry {
        OpEntry::Beamsplitter { modes, transmissivity, phase } => {
            GaussianOp::BeamSplitter { modes, transmissivity, phase }
        }
        OpEntry::Phase { mode, angle } => GaussianOp::Phase { mode, angle },
        OpEntry::Squeeze { mode, r, phi } => GaussianOp::Squeeze { mode, r, phi },
        OpEntry::TwoModeSqueeze { modes, r, phi } => GaussianOp::TwoModeSqueeze { modes, r, phi },
        OpEntry::Raw { matrix } => GaussianOp::Raw { matrix: rows_to_matrix(matrix, 2 * n, "raw matrix")? },
    })
}

fn inferred_modes(ops: &[OpEntry]) -> Option<usize> {
    ops.iter()
        .map(|op| match op {
            OpEntry::Beamsplitter { modes, .. } | OpEntry::TwoModeSqueeze { modes, .. } => {
                modes[0].max(modes[1]) + 1
            }
            OpEntry::Phase { mode, .. } | OpEntry::Squeeze { mode, .. } => mode + 1,
            OpEntry::Raw { matrix } => matrix.len() / 2,
        })
        .max()
}

/// Parses a network file. The mode count comes from the `modes` field, then
/// from `modes_hint` (typically the state it will act on), then from the
/// largest mode index used.
pub fn parse_network_str(text: &str, modes_hint: Option<usize>) -> Result<NetworkSpec> {
    let file: NetworkFile = serde_json::from_str(text).map_err(parse_err)?;
    let n = file
        .modes
        .or(modes_hint)
        .or_else(|| inferred_modes(&file.ops))
        .ok_or_else(|| Error::Parse("network mode count missing and not inferable".into()))?;
    let ops = file
        .ops
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            op_from_entry(e, n).map_err(|err| match err {
                Error::Parse(msg) => Error::Parse(format!("ops[{i}]: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkSpec::new(n, ops)
}

pub fn parse_network_file(path: impl AsRef<Path>, modes_hint: Option<usize>) -> Result<NetworkSpec> {
    parse_network_str(&fs::read_to_string(path)?, modes_hint)
}

pub fn network_to_json(network: &NetworkSpec) -> String {
    let ops = network
        .ops()
        .iter()
        .map(|op| match op.clone() {
            GaussianOp::BeamSplitter { modes, transmissivity, phase } => {
                OpEntry::Beamsplitter { modes, transmissivity, phase }
            }
            GaussianOp::Phase { mode, angle } => OpEntry::Phase { mode, angle },
            GaussianOp::Squeeze { mode, r, phi } => OpEntry::Squeeze { mode, r, phi },
            GaussianOp::TwoModeSqueeze { modes, r, phi } => OpEntry::TwoModeSqueeze { modes, r, phi },
            GaussianOp::Raw { matrix } => OpEntry::Raw { matrix: matrix_to_rows(&matrix) },
        })
        .collect();
    let file = NetworkFile { modes: Some(network.n_modes()), ops };
    serde_json::to_string_pretty(&file).expect("network serialization cannot fail")
}
