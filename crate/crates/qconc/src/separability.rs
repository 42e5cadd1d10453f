//! PPT and CCNR (realignment) entanglement detectors.
//!
//! Both criteria are necessary conditions for separability, so a verdict is
//! either `Entangled` or `Inconclusive`; neither test can certify
//! separability outside 2x2 and 2x3 systems.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::maps::{partial_transpose, realign, trace_norm};
use crate::state::DensityMatrix;
use crate::Result;

/// Detection margin: witnesses within this distance of the threshold stay
/// `Inconclusive`.
pub const EPS_DET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Entangled,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Ppt,
    Ccnr,
}

/// Outcome of one criterion. The witness is the minimum eigenvalue of
/// rho^Gamma for PPT and ||R(rho)||_1 - 1 for CCNR.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub criterion: Criterion,
    pub witness: f64,
}

/// Both verdicts for one state.
#[derive(Debug, Clone, Serialize)]
pub struct Detection {
    pub ppt: Verdict,
    pub ccnr: Verdict,
    pub entangled: bool,
}

/// Entangled iff rho^Gamma has an eigenvalue below -EPS_DET.
pub fn ppt_test(rho: &DensityMatrix) -> Verdict {
    let pt = partial_transpose(rho);
    let min_eig = SymmetricEigen::new(pt)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Verdict {
        status: if min_eig < -EPS_DET {
            Status::Entangled
        } else {
            Status::Inconclusive
        },
        criterion: Criterion::Ppt,
        witness: min_eig,
    }
}

/// Entangled iff ||R(rho)||_1 exceeds 1 + EPS_DET.
pub fn ccnr_test(rho: &DensityMatrix) -> Result<Verdict> {
    let norm = trace_norm(&realign(rho))?;
    Ok(Verdict {
        status: if norm > 1.0 + EPS_DET {
            Status::Entangled
        } else {
            Status::Inconclusive
        },
        criterion: Criterion::Ccnr,
        witness: norm - 1.0,
    })
}

/// Runs both tests; the overall flag is set if either fires.
pub fn detect(rho: &DensityMatrix) -> Result<Detection> {
    let ppt = ppt_test(rho);
    let ccnr = ccnr_test(rho)?;
    let entangled = ppt.status == Status::Entangled || ccnr.status == Status::Entangled;
    Ok(Detection {
        ppt,
        ccnr,
        entangled,
    })
}
