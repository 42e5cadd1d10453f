//! The q-concurrence and its estimation for mixed states.
//!
//! On a pure state with squared Schmidt coefficients lambda the measure is
//! C_q = 1 - sum lambda_i^q, q >= 2, extended to mixed states as a convex
//! roof. This module provides the pure-state formula, the monotonicity
//! machinery behind the scaling argument (f, G_dq and the critical parameter
//! s), the trace-norm lower bounds, and a heuristic convex-roof upper-bound
//! search.

use std::sync::OnceLock;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::maps::{partial_transpose, realign, trace_norm};
use crate::state::{
    schmidt_spectrum, BipartiteDims, CMatrix, DensityMatrix, PureState, SchmidtSpectrum,
};
use crate::{QcError, Result};

/// The exponent of the measure, restricted to q >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !(q >= 2.0) {
            return Err(QcError::QOutOfRange(q));
        }
        Ok(Self(q))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Which case of the trace-norm lower bound applies to a (q, d) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRegime {
    /// q >= 2 with d >= 3.
    GeneralD,
    /// q >= 3 with d = 2.
    Qubit3Plus,
    /// s <= q < 3 with d = 2.
    QubitSRange,
    /// 2 <= q < s with d = 2: no trace-norm bound is proven here.
    QubitGap,
}

/// Full set of norms, verdict-relevant quantities and bounds for one
/// (state, q) query.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub q: f64,
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    pub d: usize,
    pub ppt_norm: f64,
    pub realign_norm: f64,
    pub regime: BoundRegime,
    pub theorem1_bound: Option<f64>,
    pub prior_bound: f64,
    pub best_lower: f64,
    pub upper_estimate: Option<f64>,
}

/// Options for [`bound_report`].
#[derive(Debug, Clone, Copy)]
pub struct BoundOptions {
    /// Iteration budget for the convex-roof upper-bound search; 0 skips it.
    pub upper_iterations: usize,
    pub seed: u64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            upper_iterations: 0,
            seed: 0,
        }
    }
}

/// C_q of a pure state: 1 - sum lambda_i^q. Lies in [0, 1 - d^(1-q)].
pub fn q_concurrence_pure(lambda: &SchmidtSpectrum, q: QParam) -> f64 {
    let q = q.value();
    1.0 - lambda.lambdas().iter().map(|l| l.powf(q)).sum::<f64>()
}

/// The normalized measure f(q) = (1 - sum lambda^q) / (1 - d^(1-q)).
/// Non-decreasing in q for q >= s with d = 2, and for d >= 3 once q is
/// away from 2; strongly skewed spectra give a small dip just above q = 2
/// when d = 3, so the sign of g_dq is not global there.
pub fn f_ratio(lambda: &SchmidtSpectrum, q: QParam, d: usize) -> f64 {
    let qv = q.value();
    q_concurrence_pure(lambda, q) / (1.0 - (d as f64).powf(1.0 - qv))
}

/// The function whose sign controls the q-derivative of f:
/// G_dq = sum lambda_i^q ln(lambda_i) (d^(1-q) - 1)
///        - (1 - sum lambda_i^q) d^(1-q) ln d.
pub fn g_dq(lambda: &SchmidtSpectrum, q: QParam, d: usize) -> Result<f64> {
    let qv = q.value();
    for &l in lambda.lambdas() {
        if l <= 0.0 {
            return Err(QcError::NonpositiveLambda(l));
        }
    }
    let d = d as f64;
    let dq = d.powf(1.0 - qv);
    let sum_pow: f64 = lambda.lambdas().iter().map(|l| l.powf(qv)).sum();
    let sum_pow_ln: f64 = lambda.lambdas().iter().map(|l| l.powf(qv) * l.ln()).sum();
    Ok(sum_pow_ln * (dq - 1.0) - (1.0 - sum_pow) * dq * d.ln())
}

fn critical_s_bracket(q: f64) -> f64 {
    q * (q - 1.0) * 2f64.ln() - (2.0 * q - 1.0) * (1.0 - 2f64.powf(1.0 - q))
}

/// The critical parameter s: the root on (2, 3) of
/// q(q-1) ln 2 - (2q-1)(1 - 2^(1-q)) = 0, approximately 2.4721.
///
/// Computed once per process by bisection to absolute tolerance 1e-12.
pub fn critical_s() -> f64 {
    static S: OnceLock<f64> = OnceLock::new();
    *S.get_or_init(|| {
        let (mut lo, mut hi) = (2.0f64, 3.0f64);
        debug_assert!(critical_s_bracket(lo) < 0.0 && critical_s_bracket(hi) > 0.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if critical_s_bracket(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// The bound regime for a (q, d) pair; total over the whole domain.
pub fn regime_for(q: QParam, d: usize) -> BoundRegime {
    let qv = q.value();
    if d >= 3 {
        BoundRegime::GeneralD
    } else if qv >= 3.0 {
        BoundRegime::Qubit3Plus
    } else if qv >= critical_s() {
        BoundRegime::QubitSRange
    } else {
        BoundRegime::QubitGap
    }
}

/// Scales a known value c_h of C_h up to q >= h:
/// C_q >= (1 - d^(1-q)) / (1 - d^(1-h)) * c_h,
/// valid for h >= s with d = 2 or h >= 2 with d >= 3.
pub fn corollary1_bound(c_h: f64, h: f64, q: QParam, d: usize) -> Result<f64> {
    let qv = q.value();
    let ok = qv >= h && ((d == 2 && h >= critical_s()) || (d >= 3 && h >= 2.0));
    if !ok {
        return Err(QcError::RegimeViolation { h, d });
    }
    let d = d as f64;
    let cap = 1.0 - d.powf(1.0 - h);
    if !(0.0..=cap + 1e-12).contains(&c_h) {
        return Err(QcError::DomainError(c_h));
    }
    Ok((1.0 - d.powf(1.0 - qv)) / cap * c_h)
}

/// Trace-norm lower bound given precomputed norms. `None` in the
/// `QubitGap` regime, where no bound is claimed.
pub fn theorem1_from_norms(
    ppt_norm: f64,
    realign_norm: f64,
    q: QParam,
    d: usize,
) -> (Option<f64>, BoundRegime) {
    let regime = regime_for(q, d);
    let qv = q.value();
    let df = d as f64;
    // Norms of states never fall below 1; the clamp only absorbs numerical
    // undershoot so the bound stays non-negative.
    let t = (ppt_norm.max(realign_norm) - 1.0).max(0.0);
    let coeff = match regime {
        BoundRegime::GeneralD | BoundRegime::Qubit3Plus => {
            (1.0 - df.powf(1.0 - qv)) / (df - 1.0).powi(2)
        }
        BoundRegime::QubitSRange => {
            let s = critical_s();
            (1.0 - 2f64.powf(1.0 - qv)) / (2.0 - 2f64.powf(2.0 - s))
        }
        BoundRegime::QubitGap => return (None, regime),
    };
    (Some(coeff * t * t), regime)
}

/// The trace-norm lower bound on C_q(rho).
pub fn theorem1_lower_bound(rho: &DensityMatrix, q: QParam) -> Result<(Option<f64>, BoundRegime)> {
    let ppt_norm = trace_norm(&partial_transpose(rho))?;
    let realign_norm = trace_norm(&realign(rho))?;
    Ok(theorem1_from_norms(
        ppt_norm,
        realign_norm,
        q,
        rho.dims().d(),
    ))
}

/// Earlier trace-norm bound used for comparison:
/// [max(||rho^Gamma||_1, ||R(rho)||_1)^(q-1) - 1]^2 / (d^(2q-2) - d^(q-1)),
/// clamped below at 0.
pub fn prior_lower_bound(rho: &DensityMatrix, q: QParam) -> Result<f64> {
    let ppt_norm = trace_norm(&partial_transpose(rho))?;
    let realign_norm = trace_norm(&realign(rho))?;
    Ok(prior_from_norms(ppt_norm, realign_norm, q, rho.dims().d()))
}

/// Prior bound given precomputed norms.
pub fn prior_from_norms(ppt_norm: f64, realign_norm: f64, q: QParam, d: usize) -> f64 {
    let qv = q.value();
    let d = d as f64;
    let m = ppt_norm.powf(qv - 1.0).max(realign_norm.powf(qv - 1.0));
    let num = (m - 1.0).max(0.0).powi(2);
    num / (d.powf(2.0 * qv - 2.0) - d.powf(qv - 1.0))
}

/// Assembles norms, regime and every applicable bound for one (state, q)
/// query. The upper estimate is computed only when
/// `options.upper_iterations > 0`.
pub fn bound_report(rho: &DensityMatrix, q: QParam, options: BoundOptions) -> Result<BoundReport> {
    let ppt_norm = trace_norm(&partial_transpose(rho))?;
    let realign_norm = trace_norm(&realign(rho))?;
    let d = rho.dims().d();
    let (theorem1_bound, regime) = theorem1_from_norms(ppt_norm, realign_norm, q, d);
    let prior_bound = prior_from_norms(ppt_norm, realign_norm, q, d);
    let best_lower = theorem1_bound.unwrap_or(0.0).max(prior_bound).max(0.0);
    let upper_estimate = if options.upper_iterations > 0 {
        Some(convex_roof_upper_bound(
            rho,
            q,
            options.upper_iterations,
            options.seed,
        )?)
    } else {
        None
    };
    Ok(BoundReport {
        q: q.value(),
        da: rho.dims().da(),
        db: rho.dims().db(),
        d,
        ppt_norm,
        realign_norm,
        regime,
        theorem1_bound,
        prior_bound,
        best_lower,
        upper_estimate,
    })
}

/// Average C_q over the pure-state decomposition encoded by the columns of
/// `phi` (unnormalized vectors whose outer products sum to rho).
fn decomposition_average(phi: &CMatrix, dims: BipartiteDims, q: QParam) -> Result<f64> {
    let mut acc = 0.0;
    for j in 0..phi.ncols() {
        let col = phi.column(j);
        let p: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if p < 1e-14 {
            continue;
        }
        let scale = Complex64::new(1.0 / p.sqrt(), 0.0);
        let v = crate::state::CVector::from_iterator(phi.nrows(), col.iter().map(|z| z * scale));
        let psi = PureState::new(dims, v)?;
        acc += p * q_concurrence_pure(&schmidt_spectrum(&psi)?, q);
    }
    Ok(acc)
}

/// Heuristic upper bound on the convex roof.
///
/// Every decomposition of rho into c pure states arises as phi = B V^dagger
/// where rho = B B^dagger is the (truncated) eigendecomposition with rank r
/// and V is a c x r matrix with orthonormal columns. The search evaluates the
/// eigendecomposition itself and then `iterations` Haar-random isometries,
/// cycling the column count over r, r+1, ..., 2r, and returns the smallest
/// average found. Deterministic for a fixed seed: each candidate draws from
/// its own stream derived from the master seed and the iteration index.
pub fn convex_roof_upper_bound(
    rho: &DensityMatrix,
    q: QParam,
    iterations: usize,
    seed: u64,
) -> Result<f64> {
    let dims = rho.dims();
    let n = dims.total();
    let eig = SymmetricEigen::new(rho.matrix().clone());
    let kept: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 1e-12).collect();
    let rank = kept.len();
    let mut b = CMatrix::zeros(n, rank);
    for (col, &i) in kept.iter().enumerate() {
        let w = Complex64::new(eig.eigenvalues[i].sqrt(), 0.0);
        for row in 0..n {
            b[(row, col)] = eig.eigenvectors[(row, i)] * w;
        }
    }

    let mut best = decomposition_average(&b, dims, q)?;
    for it in 0..iterations {
        let cols = rank + (it % (rank + 1));
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ (it as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let g = CMatrix::from_fn(cols, rank, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let isometry = g.qr().q(); // cols x rank, orthonormal columns
        let phi = &b * isometry.adjoint();
        let avg = decomposition_average(&phi, dims, q)?;
        if avg < best {
            best = avg;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isotropic::{isotropic_state, Fidelity};
    use crate::state::{max_entangled, random_density, random_pure_state};
    use approx::assert_abs_diff_eq;

    fn spectrum(lambdas: &[f64]) -> SchmidtSpectrum {
        SchmidtSpectrum::new(lambdas.to_vec()).unwrap()
    }

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn rejects_q_below_two() {
        assert!(QParam::new(1.5).is_err());
        assert!(QParam::new(f64::NAN).is_err());
    }

    #[test]
    fn pure_value_edge_cases() {
        assert_abs_diff_eq!(q_concurrence_pure(&spectrum(&[1.0, 0.0]), q(2.0)), 0.0);
        assert_abs_diff_eq!(q_concurrence_pure(&spectrum(&[1.0, 0.0]), q(5.0)), 0.0);
        // Maximally entangled: 1 - d^(1-q).
        let uniform = spectrum(&[1.0 / 3.0; 3]);
        assert_abs_diff_eq!(
            q_concurrence_pure(&uniform, q(3.0)),
            1.0 - 3f64.powf(-2.0),
            epsilon = 1e-12
        );
        // lambda = (3/4, 1/4), q=2: 1 - 9/16 - 1/16 = 3/8.
        assert_abs_diff_eq!(
            q_concurrence_pure(&spectrum(&[0.75, 0.25]), q(2.0)),
            0.375,
            epsilon = 1e-12
        );
    }

    #[test]
    fn f_ratio_values() {
        let uniform = spectrum(&[0.25; 4]);
        for qv in [2.0, 3.0, 4.5] {
            assert_abs_diff_eq!(f_ratio(&uniform, q(qv), 4), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(f_ratio(&spectrum(&[1.0, 0.0]), q(3.0), 2), 0.0);
        let bell = spectrum(&[0.5, 0.5]);
        assert_abs_diff_eq!(f_ratio(&bell, q(2.0), 2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f_ratio(&bell, q(3.0), 2), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn g_dq_values() {
        let uniform = spectrum(&[0.5, 0.5]);
        assert_abs_diff_eq!(g_dq(&uniform, q(3.0), 2).unwrap(), 0.0, epsilon = 1e-12);
        assert!(g_dq(&spectrum(&[0.9, 0.1]), q(3.0), 2).unwrap() > 0.0);
        assert!(g_dq(&spectrum(&[0.5, 0.3, 0.2]), q(2.0), 3).unwrap() >= 0.0);
        assert!(matches!(
            g_dq(&spectrum(&[1.0, 0.0]), q(3.0), 2),
            Err(QcError::NonpositiveLambda(_))
        ));
    }

    #[test]
    fn critical_s_value() {
        let s = critical_s();
        assert!((s - 2.4721).abs() <= 5e-5, "s = {s}");
        assert!(critical_s_bracket(2.0) < 0.0);
        assert!(critical_s_bracket(3.0) > 0.0);
        assert_eq!(s.to_bits(), critical_s().to_bits());
    }

    #[test]
    fn corollary1_scaling() {
        // q = h is the identity.
        assert_abs_diff_eq!(corollary1_bound(0.3, 3.0, q(3.0), 3).unwrap(), 0.3);
        assert_abs_diff_eq!(corollary1_bound(0.0, 2.0, q(4.0), 3).unwrap(), 0.0);
        // Scaled-up C_2 stays below the true C_3 for d = 3.
        let lam = spectrum(&[0.5, 0.3, 0.2]);
        let c2 = q_concurrence_pure(&lam, q(2.0));
        let bound = corollary1_bound(c2, 2.0, q(3.0), 3).unwrap();
        assert!(bound <= q_concurrence_pure(&lam, q(3.0)) + 1e-12);
        // d = 2 demands h >= s.
        assert!(matches!(
            corollary1_bound(0.1, 2.0, q(3.0), 2),
            Err(QcError::RegimeViolation { .. })
        ));
    }

    #[test]
    fn regime_classification_is_total() {
        assert_eq!(regime_for(q(2.0), 3), BoundRegime::GeneralD);
        assert_eq!(regime_for(q(5.0), 4), BoundRegime::GeneralD);
        assert_eq!(regime_for(q(3.0), 2), BoundRegime::Qubit3Plus);
        assert_eq!(regime_for(q(2.6), 2), BoundRegime::QubitSRange);
        assert_eq!(regime_for(q(2.0), 2), BoundRegime::QubitGap);
        assert_eq!(regime_for(q(2.2), 2), BoundRegime::QubitGap);
    }

    #[test]
    fn theorem1_on_isotropic_states() {
        // d=2, q=3, F=0.75: (3/4)(2F-1)^2 = 0.1875.
        let rho = isotropic_state(Fidelity::new(0.75).unwrap(), 2).unwrap();
        let (b, regime) = theorem1_lower_bound(&rho, q(3.0)).unwrap();
        assert_eq!(regime, BoundRegime::Qubit3Plus);
        assert_abs_diff_eq!(b.unwrap(), 0.1875, epsilon = 1e-8);

        // d=3, q=3: (2/9)(3F-1)^2.
        for f in [0.5, 0.7, 0.95] {
            let rho = isotropic_state(Fidelity::new(f).unwrap(), 3).unwrap();
            let (b, _) = theorem1_lower_bound(&rho, q(3.0)).unwrap();
            assert_abs_diff_eq!(
                b.unwrap(),
                2.0 / 9.0 * (3.0 * f - 1.0).powi(2),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn theorem1_vanishes_on_product_states() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let mut v = crate::state::CVector::zeros(4);
        v[0] = Complex64::new(1.0, 0.0);
        let rho = PureState::new(dims, v).unwrap().projector();
        let (b, _) = theorem1_lower_bound(&rho, q(3.0)).unwrap();
        assert_abs_diff_eq!(b.unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn theorem1_absent_in_qubit_gap() {
        let rho = isotropic_state(Fidelity::new(0.9).unwrap(), 2).unwrap();
        let (b, regime) = theorem1_lower_bound(&rho, q(2.1)).unwrap();
        assert_eq!(regime, BoundRegime::QubitGap);
        assert!(b.is_none());
    }

    #[test]
    fn prior_bound_on_isotropic_states() {
        // d=2, q=3: (2F+1)^2 (2F-1)^2 / 12.
        for f in [0.6, 0.8, 1.0] {
            let rho = isotropic_state(Fidelity::new(f).unwrap(), 2).unwrap();
            let b = prior_lower_bound(&rho, q(3.0)).unwrap();
            let expect = (2.0 * f + 1.0).powi(2) * (2.0 * f - 1.0).powi(2) / 12.0;
            assert_abs_diff_eq!(b, expect, epsilon = 1e-8);
        }
        // d=3, q=3: (3F+1)^2 (3F-1)^2 / 72.
        for f in [0.5, 0.9] {
            let rho = isotropic_state(Fidelity::new(f).unwrap(), 3).unwrap();
            let b = prior_lower_bound(&rho, q(3.0)).unwrap();
            let expect = (3.0 * f + 1.0).powi(2) * (3.0 * f - 1.0).powi(2) / 72.0;
            assert_abs_diff_eq!(b, expect, epsilon = 1e-8);
        }
        // Maximally mixed: both norms at most 1, bound clamps to 0.
        let rho = isotropic_state(Fidelity::new(0.25).unwrap(), 2).unwrap();
        assert_eq!(prior_lower_bound(&rho, q(3.0)).unwrap(), 0.0);
    }

    #[test]
    fn report_picks_the_tighter_bound() {
        let rho = isotropic_state(Fidelity::new(0.8).unwrap(), 3).unwrap();
        let report = bound_report(&rho, q(3.0), BoundOptions::default()).unwrap();
        assert_abs_diff_eq!(
            report.best_lower,
            report.theorem1_bound.unwrap(),
            epsilon = 1e-14
        );
        assert!(report.theorem1_bound.unwrap() > report.prior_bound);
        assert!(report.upper_estimate.is_none());
    }

    #[test]
    fn report_on_bell_state_reaches_exact_value() {
        let rho = max_entangled(2).unwrap().projector();
        let report = bound_report(&rho, q(3.0), BoundOptions::default()).unwrap();
        assert_abs_diff_eq!(report.best_lower, 0.75, epsilon = 1e-8);
    }

    #[test]
    fn upper_bound_is_exact_on_pure_states() {
        let dims = BipartiteDims::new(3, 3).unwrap();
        let psi = random_pure_state(dims, 21);
        let exact = q_concurrence_pure(&schmidt_spectrum(&psi).unwrap(), q(3.0));
        let upper = convex_roof_upper_bound(&psi.projector(), q(3.0), 1, 0).unwrap();
        assert_abs_diff_eq!(upper, exact, epsilon = 1e-10);
    }

    #[test]
    fn upper_bound_finds_separable_decomposition() {
        // Mixture of product basis projectors: the eigenvectors are already
        // products, so the base decomposition has zero average.
        let dims = BipartiteDims::new(2, 2).unwrap();
        let weights = [0.5, 0.3, 0.2];
        let m = CMatrix::from_fn(4, 4, |i, j| {
            if i == j && i < 3 {
                Complex64::new(weights[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rho =
            crate::state::validate_density(m, dims, crate::state::Tolerances::default()).unwrap();
        let upper = convex_roof_upper_bound(&rho, q(3.0), 50, 7).unwrap();
        assert!(upper <= 1e-6, "upper = {upper}");
    }

    #[test]
    fn upper_bound_respects_lower_bounds_and_iteration_monotonicity() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let rho = random_density(dims, 3, 13).unwrap();
        let report = bound_report(&rho, q(3.0), BoundOptions::default()).unwrap();
        let u50 = convex_roof_upper_bound(&rho, q(3.0), 50, 99).unwrap();
        let u200 = convex_roof_upper_bound(&rho, q(3.0), 200, 99).unwrap();
        assert!(u200 <= u50 + 1e-14);
        assert!(u200 >= report.best_lower - 1e-8);
    }

    #[test]
    fn chain_identity_for_two_qubit_spectra() {
        // f(2) = f(3) at d = 2 gives C_3 = (3/2) C_2, and for q >= 3
        // C_q >= (1 - 2^(1-q)) * 2 * C_2.
        for seed in 0..200u64 {
            let dims = BipartiteDims::new(2, 2).unwrap();
            let lam = schmidt_spectrum(&random_pure_state(dims, seed)).unwrap();
            let c2 = q_concurrence_pure(&lam, q(2.0));
            let c3 = q_concurrence_pure(&lam, q(3.0));
            assert_abs_diff_eq!(c3, 1.5 * c2, epsilon = 1e-10);
            for qv in [3.0, 4.0, 5.5] {
                let cq = q_concurrence_pure(&lam, q(qv));
                assert!(cq >= (1.0 - 2f64.powf(1.0 - qv)) * 2.0 * c2 - 1e-10);
            }
        }
    }
}
