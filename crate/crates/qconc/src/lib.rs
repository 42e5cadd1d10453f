//! Bipartite entanglement detection and q-concurrence estimation.
//!
//! The crate provides:
//!
//! - validated bipartite state types, Schmidt decomposition, partial trace and
//!   seeded random state generation ([`state`]);
//! - partial transposition, matrix realignment and the trace norm ([`maps`]);
//! - the PPT and CCNR (realignment) entanglement detectors ([`separability`]);
//! - the q-concurrence on pure states together with lower bounds for mixed
//!   states and a heuristic convex-roof upper-bound search ([`qconcurrence`]);
//! - the isotropic state family, the function xi(F, q, d) and its lower convex
//!   envelope, which is the exact q-concurrence of an isotropic state
//!   ([`isotropic`]);
//! - a JSON state-file format shared with the CLI ([`io`]).
//!
//! All numerical routines are pure functions of their inputs. Random
//! generation is deterministic given a `u64` seed: the crate uses the ChaCha8
//! counter-based generator throughout, so results are reproducible across
//! platforms and reimplementations.

mod error;

pub mod io;
pub mod isotropic;
pub mod maps;
pub mod qconcurrence;
pub mod separability;
pub mod state;

pub use error::{QcError, Result};
