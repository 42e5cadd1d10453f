//! Isotropic states and their exact q-concurrence.
//!
//! The isotropic state rho_F mixes the maximally entangled state with white
//! noise. Its q-concurrence is the lower convex envelope of
//! xi(F, q, d) = 1 - gamma^(2q) - (d-1) delta^(2q) over the fidelity range,
//! extended by the zero plateau on the separable region F <= 1/d.

use serde::Serialize;
use std::str::FromStr;

use crate::qconcurrence::QParam;
use crate::state::{max_entangled, validate_density, BipartiteDims, CMatrix, DensityMatrix,
    Tolerances};
use crate::{QcError, Result};

/// Fidelity with the maximally entangled state, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Fidelity(f64);

impl Fidelity {
    pub fn new(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(QcError::DomainError(f));
        }
        Ok(Self(f))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Piecewise-linear convex function given by its knots, evaluated by linear
/// interpolation (clamped to the endpoint values outside the knot range).
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Requires strictly increasing abscissae and convexity: discrete second
    /// differences of slopes at least -1e-12.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(QcError::InvalidSpectrum(
                "piecewise-linear function needs at least two knots".into(),
            ));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(QcError::InvalidSpectrum(format!(
                    "knot abscissae must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for w in knots.windows(3) {
            let s0 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s1 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            if s1 - s0 < -1e-12 {
                return Err(QcError::InvalidSpectrum(format!(
                    "knots are not convex near x = {}",
                    w[1].0
                )));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        let first = self.knots[0];
        let last = *self.knots.last().unwrap();
        if x <= first.0 {
            return first.1;
        }
        if x >= last.0 {
            return last.1;
        }
        let idx = self
            .knots
            .partition_point(|&(kx, _)| kx <= x)
            .min(self.knots.len() - 1);
        let (x0, y0) = self.knots[idx - 1];
        let (x1, y1) = self.knots[idx];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// The isotropic state
/// rho_F = (1-F)/(d^2-1) (I - P) + F P, with P = |Psi+><Psi+|.
pub fn isotropic_state(f: Fidelity, d: usize) -> Result<DensityMatrix> {
    let dims = BipartiteDims::new(d, d)?;
    let psi = max_entangled(d)?;
    let n = dims.total();
    let noise = (1.0 - f.value()) / (n as f64 - 1.0);
    let amps = psi.amplitudes();
    let m = CMatrix::from_fn(n, n, |i, j| {
        let p = amps[i] * amps[j].conj();
        let id = if i == j { 1.0 } else { 0.0 };
        num_complex::Complex64::new(noise * id, 0.0)
            + p * num_complex::Complex64::new(f.value() - noise, 0.0)
    });
    validate_density(m, dims, Tolerances::default())
}

fn gamma_delta(f: f64, d: f64) -> (f64, f64) {
    let gamma = (f.sqrt() + ((d - 1.0) * (1.0 - f)).sqrt()) / d.sqrt();
    let delta = (f.sqrt() - ((1.0 - f) / (d - 1.0)).sqrt()) / d.sqrt();
    (gamma, delta)
}

/// xi(F, q, d) = 1 - gamma^(2q) - (d-1) delta^(2q) on the entangled range
/// F in (1/d, 1].
pub fn xi(f: Fidelity, q: QParam, d: usize) -> Result<f64> {
    let fv = f.value();
    let df = d as f64;
    if fv <= 1.0 / df {
        return Err(QcError::DomainError(fv));
    }
    let (gamma, delta) = gamma_delta(fv, df);
    let qv = q.value();
    Ok(1.0 - gamma.powf(2.0 * qv) - (df - 1.0) * delta.powf(2.0 * qv))
}

/// Analytic dxi/dF, used to refine the tangency point of the terminal chord.
fn xi_derivative(f: f64, q: f64, d: f64) -> f64 {
    let (gamma, delta) = gamma_delta(f, d);
    let dgamma = (1.0 / f.sqrt() - (d - 1.0).sqrt() / (1.0 - f).sqrt()) / (2.0 * d.sqrt());
    let ddelta = (1.0 / f.sqrt() + 1.0 / ((d - 1.0) * (1.0 - f)).sqrt()) / (2.0 * d.sqrt());
    -2.0 * q * gamma.powf(2.0 * q - 1.0) * dgamma
        - (d - 1.0) * 2.0 * q * delta.powf(2.0 * q - 1.0) * ddelta
}

/// First and second central differences of xi at F with the given step.
pub fn xi_central_derivatives(f: Fidelity, q: QParam, d: usize, step: f64) -> Result<(f64, f64)> {
    let fv = f.value();
    if fv - step <= 1.0 / d as f64 || fv + step > 1.0 {
        return Err(QcError::DomainError(fv));
    }
    let lo = xi(Fidelity::new(fv - step)?, q, d)?;
    let mid = xi(f, q, d)?;
    let hi = xi(Fidelity::new(fv + step)?, q, d)?;
    Ok(((hi - lo) / (2.0 * step), (hi - 2.0 * mid + lo) / (step * step)))
}

/// The extended function: zero on the separable plateau, xi beyond it.
fn xi_extended(f: f64, q: QParam, d: usize) -> f64 {
    if f <= 1.0 / d as f64 {
        0.0
    } else {
        xi(Fidelity::new(f).expect("f in [0,1]"), q, d).expect("f > 1/d")
    }
}

/// Lower convex hull of points sorted by x (Andrew monotone chain, lower
/// half). Collinear interior points are dropped.
fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

fn build_envelope(q: QParam, d: usize, grid_size: usize) -> (PiecewiseLinear, Option<f64>) {
    let inv_d = 1.0 / d as f64;
    let mut xs: Vec<f64> = (0..grid_size)
        .map(|i| i as f64 / (grid_size - 1) as f64)
        .collect();
    xs.extend_from_slice(&[0.0, inv_d, 1.0]);
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, xi_extended(x, q, d))).collect();
    let mut hull = lower_hull(&samples);

    // A terminal segment that skips sample points is a chord replacing a
    // concave stretch of xi; refine its left knot to the tangency abscissa.
    let mut kink = None;
    if hull.len() >= 2 {
        let (left, _) = hull[hull.len() - 2];
        let skipped = xs
            .iter()
            .filter(|&&x| x > left + 1e-15 && x < 1.0 - 1e-15)
            .count();
        if skipped >= 2 && left > inv_d {
            let refined = refine_tangency(left, q, d, 1.0 / (grid_size - 1) as f64);
            let y = xi_extended(refined, q, d);
            let n = hull.len();
            hull[n - 2] = (refined, y);
            kink = Some(refined);
        }
    }

    let envelope = PiecewiseLinear::new(hull).expect("hull is convex by construction");
    (envelope, kink)
}

/// Bisects the tangency condition xi'(F)(1 - F) = xi(1) - xi(F) around the
/// grid estimate.
fn refine_tangency(guess: f64, q: QParam, d: usize, spacing: f64) -> f64 {
    let df = d as f64;
    let qv = q.value();
    let xi_one = xi_extended(1.0, q, d);
    let t = |f: f64| xi_derivative(f, qv, df) * (1.0 - f) - (xi_one - xi_extended(f, q, d));
    let mut lo = (guess - spacing).max(1.0 / df + 1e-9);
    let mut hi = (guess + spacing).min(1.0 - 1e-9);
    if t(lo) >= 0.0 || t(hi) <= 0.0 {
        return guess;
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if t(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Default sampling density for [`exact_isotropic_qc`].
pub const DEFAULT_GRID: usize = 2048;

/// The exact q-concurrence of isotropic states as a function of fidelity:
/// the lower convex envelope of the extended xi, as a piecewise-linear
/// function over [0, 1].
pub fn exact_isotropic_qc(q: QParam, d: usize, grid_size: usize) -> PiecewiseLinear {
    let grid_size = grid_size.max(64);
    build_envelope(q, d, grid_size).0
}

/// The fidelity where the envelope departs from xi onto the terminal chord,
/// refined by tangency bisection. `None` when the envelope coincides with xi
/// everywhere.
pub fn kink_point(q: QParam, d: usize) -> Option<f64> {
    build_envelope(q, d, DEFAULT_GRID).1
}

/// The closed forms printed in the source analysis, kept with their rounded
/// constants. The envelope is the precise artifact; these serve as oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleName {
    /// q=3, d=2: (3/4)(2F-1)^2 above F = 1/2.
    C3D2,
    /// q=3, d=3: xi up to F = 0.86, then 1.777 F - 0.888.
    C3D3,
    /// q=4, d=2: (8 - (2F-1)^2)/8 (2F-1)^2 above F = 1/2.
    C4D2,
}

impl FromStr for OracleName {
    type Err = QcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c3d2" => Ok(Self::C3D2),
            "c3d3" => Ok(Self::C3D3),
            "c4d2" => Ok(Self::C4D2),
            other => Err(QcError::UnknownOracle(other.to_string())),
        }
    }
}

pub fn closed_form_oracle(name: OracleName, f: Fidelity) -> f64 {
    let fv = f.value();
    match name {
        OracleName::C3D2 => {
            if fv <= 0.5 {
                0.0
            } else {
                0.75 * (2.0 * fv - 1.0).powi(2)
            }
        }
        OracleName::C3D3 => {
            if fv <= 1.0 / 3.0 {
                0.0
            } else if fv <= 0.86 {
                xi(f, QParam::new(3.0).unwrap(), 3).unwrap()
            } else {
                1.777 * fv - 0.888
            }
        }
        OracleName::C4D2 => {
            if fv <= 0.5 {
                0.0
            } else {
                let t = (2.0 * fv - 1.0).powi(2);
                (8.0 - t) / 8.0 * t
            }
        }
    }
}
