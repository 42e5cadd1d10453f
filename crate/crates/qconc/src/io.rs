//! JSON state-file format shared between the library and the CLI.
//!
//! A state file is a single JSON object:
//!
//! ```json
//! { "dA": 2, "dB": 2, "kind": "density", "data": [[re, im], ...] }
//! ```
//!
//! `data` holds `dA*dB` complex amplitudes for `"pure"` states, or the
//! row-major flattening of the `(dA*dB) x (dA*dB)` matrix for `"density"`
//! states. Each entry is a `[re, im]` pair.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::state::{
    validate_density, BipartiteDims, CMatrix, CVector, DensityMatrix, PureState, Tolerances,
};
use crate::{QcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Density,
    Pure,
}

/// On-disk representation of a state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

/// A state parsed and validated from a file.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Density(DensityMatrix),
    Pure(PureState),
}

impl LoadedState {
    /// The density-matrix view: pure states are promoted to their projector.
    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Density(rho) => rho.clone(),
            LoadedState::Pure(psi) => psi.projector(),
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        match self {
            LoadedState::Density(rho) => rho.dims(),
            LoadedState::Pure(psi) => psi.dims(),
        }
    }
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let n = rho.dims().total();
        let m = rho.matrix();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self {
            da: rho.dims().da(),
            db: rho.dims().db(),
            kind: StateKind::Density,
            data,
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let data = psi.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        Self {
            da: psi.dims().da(),
            db: psi.dims().db(),
            kind: StateKind::Pure,
            data,
        }
    }

    /// Validates and converts to an in-memory state.
    pub fn into_state(self) -> Result<LoadedState> {
        let dims = BipartiteDims::new(self.da, self.db)?;
        let n = dims.total();
        match self.kind {
            StateKind::Pure => {
                if self.data.len() != n {
                    return Err(QcError::DimensionMismatch(format!(
                        "pure state on {} x {} needs {} amplitudes, file has {}",
                        self.da,
                        self.db,
                        n,
                        self.data.len()
                    )));
                }
                let v = CVector::from_iterator(
                    n,
                    self.data.iter().map(|&[re, im]| Complex64::new(re, im)),
                );
                Ok(LoadedState::Pure(PureState::new(dims, v)?))
            }
            StateKind::Density => {
                if self.data.len() != n * n {
                    return Err(QcError::DimensionMismatch(format!(
                        "density matrix on {} x {} needs {} entries, file has {}",
                        self.da,
                        self.db,
                        n * n,
                        self.data.len()
                    )));
                }
                // Row-major on disk.
                let m = CMatrix::from_fn(n, n, |i, j| {
                    let [re, im] = self.data[i * n + j];
                    Complex64::new(re, im)
                });
                Ok(LoadedState::Density(validate_density(
                    m,
                    dims,
                    Tolerances::default(),
                )?))
            }
        }
    }
}

/// Reads and validates a state file from any reader.
pub fn read_state<R: Read>(reader: R) -> std::result::Result<LoadedState, String> {
    let file: StateFile =
        serde_json::from_reader(reader).map_err(|e| format!("malformed state file: {e}"))?;
    file.into_state().map_err(|e| format!("invalid state: {e}"))
}

/// Serializes a state file as pretty JSON.
pub fn write_state<W: Write>(writer: W, file: &StateFile) -> std::io::Result<()> {
    serde_json::to_writer_pretty(writer, file).map_err(std::io::Error::from)
}
