//! JSON channel descriptions for the command-line harness and FFI surface.
//!
//! A channel file holds a single object whose key names the representation:
//! `kraus`, `choi`, `superoperator`, `affine` or `family`. Complex numbers
//! are `[re, im]` pairs; matrices are row-major nested arrays. The `choi`
//! form stores the unnormalized dynamical matrix (trace = dim).

use crate::channel::{Channel, Repr};
use crate::error::{QchanError, Result};
use crate::families::{
    dephasing, dephasing_qubit, depolarizing, pauli_channel, werner_holevo, AffineQubit,
};
use crate::linalg::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A complex entry as stored in JSON: `[re, im]`.
pub type ComplexData = [f64; 2];
/// A row-major matrix as stored in JSON.
pub type MatrixData = Vec<Vec<ComplexData>>;

/// Serializable channel description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSpec {
    /// A list of Kraus operators.
    Kraus(Vec<MatrixData>),
    /// The dynamical (Choi) matrix, normalized to trace = `dim`.
    Choi { dim: usize, matrix: MatrixData },
    /// The superoperator acting on row-major vectorized states.
    Superoperator { dim: usize, matrix: MatrixData },
    /// A qubit map through its Bloch-ball action: `r ↦ η∘r + κ`.
    Affine { kappa: [f64; 3], eta: [f64; 3] },
    /// A named parametric family.
    Family(FamilySpec),
}

/// Parametric channel families addressable by name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    Depolarizing { d: usize, p: f64 },
    Pauli { d: usize, probs: Vec<f64> },
    WernerHolevo { d: usize, p: f64 },
    Dephasing(DephasingParams),
}

/// Dephasing is specified by one off-diagonal factor (qubit) or a full
/// hadamard-factor matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DephasingParams {
    Qubit { f: ComplexData },
    General { matrix: MatrixData },
}

/// Converts nested `[re, im]` arrays into a matrix, rejecting ragged rows.
pub fn matrix_from_data(data: &MatrixData) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = data
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(rows).map_err(|e| QchanError::Parse(e.to_string()))
}

/// Converts a matrix into nested `[re, im]` arrays.
pub fn matrix_to_data(m: &ComplexMatrix) -> MatrixData {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn check_square(m: &ComplexMatrix, side: usize) -> Result<()> {
    if m.rows() != side || m.cols() != side {
        return Err(QchanError::DimMismatch {
            expected: side,
            got: m.rows().max(m.cols()),
        });
    }
    Ok(())
}

impl ChannelSpec {
    /// Builds the channel this description names.
    pub fn to_channel(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Kraus(ops) => {
                let mats = ops.iter().map(matrix_from_data).collect::<Result<Vec<_>>>()?;
                Channel::from_kraus(mats)
            }
            ChannelSpec::Choi { dim, matrix } => {
                let m = matrix_from_data(matrix)?;
                check_square(&m, dim * dim)?;
                Channel::from_dynamical(m)
            }
            ChannelSpec::Superoperator { dim, matrix } => {
                let m = matrix_from_data(matrix)?;
                check_square(&m, dim * dim)?;
                Channel::from_superoperator(m)
            }
            ChannelSpec::Affine { kappa, eta } => Ok(AffineQubit::new(*kappa, *eta).channel()),
            ChannelSpec::Family(f) => f.to_channel(),
        }
    }

    /// Describes a channel in its stored representation (Kraus stays Kraus,
    /// a dynamical matrix becomes `choi`, and so on).
    pub fn from_channel(channel: &Channel) -> Self {
        match channel.repr() {
            Repr::Kraus(set) => {
                ChannelSpec::Kraus(set.operators().iter().map(matrix_to_data).collect())
            }
            Repr::Superoperator(s) => ChannelSpec::Superoperator {
                dim: s.dim(),
                matrix: matrix_to_data(s.matrix()),
            },
            Repr::Dynamical(d) => ChannelSpec::Choi {
                dim: d.dim(),
                matrix: matrix_to_data(d.matrix()),
            },
            Repr::Affine(a) => ChannelSpec::Affine {
                kappa: a.kappa,
                eta: a.eta,
            },
        }
    }

    /// Describes a channel through its canonical Kraus decomposition
    /// (eigendecomposition of the dynamical matrix), regardless of how the
    /// channel was stored. Fails for non-completely-positive maps.
    pub fn canonical_kraus(channel: &Channel) -> Result<Self> {
        let set = channel.kraus()?;
        Ok(ChannelSpec::Kraus(
            set.operators().iter().map(matrix_to_data).collect(),
        ))
    }
}

impl FamilySpec {
    /// Builds the named family member.
    pub fn to_channel(&self) -> Result<Channel> {
        match self {
            FamilySpec::Depolarizing { d, p } => depolarizing(*d, *p),
            FamilySpec::Pauli { d, probs } => pauli_channel(*d, probs),
            FamilySpec::WernerHolevo { d, p } => werner_holevo(*d, *p),
            FamilySpec::Dephasing(DephasingParams::Qubit { f }) => {
                dephasing_qubit(C64::new(f[0], f[1]))
            }
            FamilySpec::Dephasing(DephasingParams::General { matrix }) => {
                dephasing(matrix_from_data(matrix)?)
            }
        }
    }
}

/// Parses a channel from its JSON description.
pub fn parse_channel(json: &str) -> Result<Channel> {
    let spec: ChannelSpec =
        serde_json::from_str(json).map_err(|e| QchanError::Parse(e.to_string()))?;
    spec.to_channel()
}

/// Serializes a channel's stored representation as pretty-printed JSON.
pub fn channel_to_json(channel: &Channel) -> Result<String> {
    serde_json::to_string_pretty(&ChannelSpec::from_channel(channel))
        .map_err(|e| QchanError::Parse(e.to_string()))
}

/// Reads and parses a channel description file.
pub fn load_channel(path: &Path) -> Result<Channel> {
    let text = std::fs::read_to_string(path)?;
    parse_channel(&text)
}
