//! Domain types for bipartite quantum states.
//!
//! Basis convention: the product basis state |i j> of a dA x dB system maps to
//! the flat index `i * dB + j`. Every reshape and structural map in the crate
//! relies on this convention.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{QcError, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

/// Which subsystem an operation acts on (or traces out).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Subsystem dimensions of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    da: usize,
    db: usize,
}

impl BipartiteDims {
    pub fn new(da: usize, db: usize) -> Result<Self> {
        if da < 1 || db < 1 {
            return Err(QcError::DimensionMismatch(format!(
                "subsystem dimensions must be at least 1, got {da} x {db}"
            )));
        }
        Ok(Self { da, db })
    }

    pub fn da(&self) -> usize {
        self.da
    }

    pub fn db(&self) -> usize {
        self.db
    }

    /// d = min(dA, dB), the number of Schmidt coefficients.
    pub fn d(&self) -> usize {
        self.da.min(self.db)
    }

    /// Total Hilbert-space dimension dA * dB.
    pub fn total(&self) -> usize {
        self.da * self.db
    }
}

/// Numerical tolerances for state validation.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max entrywise deviation from Hermiticity.
    pub herm: f64,
    /// Allowed deviation of the trace (or norm) from 1.
    pub trace: f64,
    /// Eigenvalues above `-psd` count as non-negative; values in `[-psd, 0)`
    /// are clamped to 0 before downstream use.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-8,
            trace: 1e-8,
            psd: 1e-9,
        }
    }
}

/// Unit-norm bipartite state vector.
#[derive(Debug, Clone)]
pub struct PureState {
    dims: BipartiteDims,
    amplitudes: CVector,
}

impl PureState {
    /// Validates the length and norm, then renormalizes exactly.
    pub fn new(dims: BipartiteDims, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(QcError::DimensionMismatch(format!(
                "expected {} amplitudes, got {}",
                dims.total(),
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > Tolerances::default().trace {
            return Err(QcError::NotNormalized(norm));
        }
        let amplitudes = amplitudes / Complex64::new(norm, 0.0);
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// The projector |psi><psi| as a validated density matrix.
    pub fn projector(&self) -> DensityMatrix {
        let n = self.dims.total();
        let m = CMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix {
            dims: self.dims,
            matrix: m,
        }
    }

    /// Amplitudes reshaped to the dA x dB coefficient matrix.
    pub fn coefficient_matrix(&self) -> CMatrix {
        let (da, db) = (self.dims.da(), self.dims.db());
        CMatrix::from_fn(da, db, |i, j| self.amplitudes[i * db + j])
    }
}

/// Validated bipartite mixed state: Hermitian, unit trace, positive
/// semidefinite within tolerances.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: BipartiteDims,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues of the state, ascending, with values in `[-psd, 0)`
    /// clamped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for v in vals.iter_mut() {
            if *v < 0.0 && *v >= -Tolerances::default().psd {
                *v = 0.0;
            }
        }
        vals
    }
}

/// Squared Schmidt coefficients of a pure state, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    lambdas: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Checks non-negativity and unit sum, sorts descending.
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(QcError::InvalidSpectrum("empty spectrum".into()));
        }
        for &l in &lambdas {
            if l < -Tolerances::default().psd {
                return Err(QcError::InvalidSpectrum(format!("negative entry {l}")));
            }
        }
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(QcError::InvalidSpectrum(format!("sum is {sum}, expected 1")));
        }
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for l in lambdas.iter_mut() {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// Validates a candidate density matrix and renormalizes its trace to
/// exactly 1.
///
/// The stored matrix is the Hermitian part (M + M^dagger)/2 of the input,
/// which differs from M by at most the Hermiticity tolerance.
pub fn validate_density(
    matrix: CMatrix,
    dims: BipartiteDims,
    tol: Tolerances,
) -> Result<DensityMatrix> {
    let n = dims.total();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(QcError::DimensionMismatch(format!(
            "expected a {n} x {n} matrix, got {} x {}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let mut herm_dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
            herm_dev = herm_dev.max(dev);
        }
    }
    if herm_dev > tol.herm {
        return Err(QcError::NotHermitian(herm_dev));
    }
    let hermitized = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);

    let trace = hermitized.trace().re;
    if (trace - 1.0).abs() > tol.trace {
        return Err(QcError::TraceMismatch(trace));
    }
    let renormalized = hermitized / Complex64::new(trace, 0.0);

    let eig = SymmetricEigen::new(renormalized.clone());
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -tol.psd {
        return Err(QcError::NotPositive(min_eig));
    }

    Ok(DensityMatrix {
        dims,
        matrix: renormalized,
    })
}

/// Squared singular values of the reshaped amplitude matrix, sorted
/// descending and padded with zeros to length d.
pub fn schmidt_spectrum(psi: &PureState) -> Result<SchmidtSpectrum> {
    let coeff = psi.coefficient_matrix();
    let svd = coeff
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or(QcError::SvdFailure)?;
    let d = psi.dims().d();
    let mut lambdas: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    lambdas.resize(d, 0.0);
    SchmidtSpectrum::new(lambdas)
}

/// Traces out the named subsystem, returning the reduced matrix of the other
/// one (size dA when tracing out B, size dB when tracing out A).
pub fn partial_trace(rho: &DensityMatrix, traced_out: Subsystem) -> CMatrix {
    let (da, db) = (rho.dims().da(), rho.dims().db());
    let m = rho.matrix();
    match traced_out {
        Subsystem::B => CMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()
        }),
        Subsystem::A => CMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()
        }),
    }
}

/// Haar-distributed pure state: i.i.d. standard complex Gaussian amplitudes,
/// normalized. Deterministic for a fixed seed (ChaCha8 stream).
pub fn random_pure_state(dims: BipartiteDims, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_state_with(dims, &mut rng)
}

/// Same as [`random_pure_state`] but drawing from a caller-owned stream.
pub fn random_pure_state_with<R: Rng>(dims: BipartiteDims, rng: &mut R) -> PureState {
    let n = dims.total();
    let mut v = CVector::zeros(n);
    for i in 0..n {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        v[i] = Complex64::new(re, im);
    }
    let norm = v.norm();
    let amplitudes = v / Complex64::new(norm, 0.0);
    PureState { dims, amplitudes }
}

/// The maximally entangled state (1/sqrt(d)) sum_i |ii> on a d x d system.
pub fn max_entangled(d: usize) -> Result<PureState> {
    let dims = BipartiteDims::new(d, d)?;
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    PureState::new(dims, v)
}

/// Convex mixture of `rank` Haar-random pure states with Dirichlet(1,...,1)
/// weights. Deterministic for a fixed seed.
pub fn random_density(dims: BipartiteDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = dims.total();
    if rank < 1 || rank > n {
        return Err(QcError::RankOutOfRange { rank, max: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Dirichlet(1,...,1) via normalized unit exponentials.
    let mut weights: Vec<f64> = (0..rank)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut m = CMatrix::zeros(n, n);
    for &w in &weights {
        let psi = random_pure_state_with(dims, &mut rng);
        let a = psi.amplitudes();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += Complex64::new(w, 0.0) * a[i] * a[j].conj();
            }
        }
    }
    validate_density(m, dims, Tolerances::default())
}

/// Explicit convex mixture of `terms` random product projectors, with
/// Dirichlet-uniform weights. Separable by construction; deterministic for a
/// fixed seed.
pub fn random_separable_density(
    dims: BipartiteDims,
    terms: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    if terms < 1 {
        return Err(QcError::RankOutOfRange {
            rank: terms,
            max: dims.total(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..terms)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let (da, db) = (dims.da(), dims.db());
    let a_dims = BipartiteDims::new(da, 1)?;
    let b_dims = BipartiteDims::new(1, db)?;
    let n = dims.total();
    let mut m = CMatrix::zeros(n, n);
    for &w in &weights {
        let a = random_pure_state_with(a_dims, &mut rng);
        let b = random_pure_state_with(b_dims, &mut rng);
        let mut v = CVector::zeros(n);
        for i in 0..da {
            for j in 0..db {
                v[i * db + j] = a.amplitudes()[i] * b.amplitudes()[j];
            }
        }
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += Complex64::new(w, 0.0) * v[i] * v[j].conj();
            }
        }
    }
    validate_density(m, dims, Tolerances::default())
}
