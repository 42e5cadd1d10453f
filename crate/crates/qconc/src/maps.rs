//! Partial transposition, realignment and the trace norm.
//!
//! For rho = sum rho_{ij,kl} |ij><kl| the partial transpose over B is
//! rho^Gamma = sum rho_{ij,kl} |il><kj| and the realigned matrix is
//! R(rho) = sum rho_{ij,kl} |ik><jl|, of shape dA^2 x dB^2.

use crate::state::{CMatrix, DensityMatrix, Subsystem};
use crate::{QcError, Result};

/// Partial transpose with respect to subsystem B (the Gamma superscript
/// convention). Output is Hermitian with trace 1.
pub fn partial_transpose(rho: &DensityMatrix) -> CMatrix {
    partial_transpose_on(rho, Subsystem::B)
}

/// Partial transpose over either subsystem. The trace norm of the result is
/// the same for both choices (the two outputs are transposes of each other).
pub fn partial_transpose_on(rho: &DensityMatrix, subsystem: Subsystem) -> CMatrix {
    partial_transpose_matrix(rho.matrix(), rho.dims(), subsystem)
}

/// Partial transpose of a raw dA*dB square matrix. The output of a partial
/// transpose is generally indefinite, so this form also serves as the inverse
/// map.
pub fn partial_transpose_matrix(
    m: &CMatrix,
    dims: crate::state::BipartiteDims,
    subsystem: Subsystem,
) -> CMatrix {
    let db = dims.db();
    let n = dims.total();
    match subsystem {
        // out_{il,kj} = rho_{ij,kl}
        Subsystem::B => CMatrix::from_fn(n, n, |r, c| {
            let (i, l) = (r / db, r % db);
            let (k, j) = (c / db, c % db);
            m[(i * db + j, k * db + l)]
        }),
        // out_{kj,il} = rho_{ij,kl}
        Subsystem::A => CMatrix::from_fn(n, n, |r, c| {
            let (k, j) = (r / db, r % db);
            let (i, l) = (c / db, c % db);
            m[(i * db + j, k * db + l)]
        }),
    }
}

/// Realigned matrix R(rho) of shape dA^2 x dB^2 with
/// R_{ik,jl} = rho_{ij,kl}.
pub fn realign(rho: &DensityMatrix) -> CMatrix {
    let (da, db) = (rho.dims().da(), rho.dims().db());
    let m = rho.matrix();
    CMatrix::from_fn(da * da, db * db, |r, c| {
        let (i, k) = (r / da, r % da);
        let (j, l) = (c / db, c % db);
        m[(i * db + j, k * db + l)]
    })
}

/// Trace norm ||M||_1: the sum of singular values. Works for non-square
/// matrices; computed by full SVD.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or(QcError::SvdFailure)?;
    Ok(svd.singular_values.iter().sum())
}
