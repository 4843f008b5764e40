//! Period map of the linearized third-order system, its μ-derivatives at
//! the origin, the periodic Evans function, and the closed form of M(0).
//!
//! The profile `(u, u_x)` is integrated alongside the matrix system, so the
//! coefficients are evaluated at the integrator's own stages.

mod closed_form;
mod derivatives;

pub use closed_form::{closed_form_m0, jordan_multiplicities, ClosedFormM0, JordanData};
pub use derivatives::{monodromy_derivatives, MonodromyDerivatives};

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::linalg::CMat3;
use crate::numerics::ode::{Integrator, OdeOptions};
use crate::profile::samples::profile_rhs;
use crate::profile::{ProfileSamples, WaveParameters};

/// `H(x; μ)` for the state `(v, v_x, v_xx)`.
pub fn coefficient_matrix_at(params: &WaveParameters, u: f64, u_x: f64, mu: Complex64) -> CMat3 {
    let nl = &params.nonlinearity;
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Matrix3::new(
        z,
        one,
        z,
        z,
        z,
        one,
        -mu - u_x * nl.d2f(u),
        Complex64::new(params.c - nl.df(u), 0.0),
        z,
    )
}

/// `H(x; μ)` with the profile evaluated at `x`.
pub fn coefficient_matrix(x: f64, mu: Complex64, profile: &ProfileSamples) -> Result<CMat3> {
    let [u, ux] = profile.evaluate(x)?;
    Ok(coefficient_matrix_at(&profile.params, u, ux, mu))
}

#[derive(Debug, Clone, Serialize)]
pub struct Monodromy {
    #[serde(serialize_with = "ser_complex")]
    pub mu: Complex64,
    #[serde(skip)]
    pub matrix: CMat3,
    #[serde(serialize_with = "ser_complex")]
    pub trace: Complex64,
    /// `|det M − 1|`.
    pub det_residual: f64,
    /// Hadamard bound `∏ ‖row‖`, maximized along the period; the
    /// attainable accuracy of det M is about the integration tolerance (or
    /// roundoff) times this number. Near a separatrix Φ grows and shrinks
    /// again within one period, so the final matrix alone understates it.
    pub det_scale: f64,
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl Monodromy {
    pub fn from_matrix(mu: Complex64, matrix: CMat3) -> Self {
        let det = matrix.determinant();
        let det_scale = (0..3).map(|i| matrix.row(i).norm()).product::<f64>();
        Self { mu, trace: matrix.trace(), det_residual: (det - 1.0).norm(), det_scale, matrix }
    }

    /// Floquet multipliers (eigenvalues of M).
    pub fn multipliers(&self) -> Vec<Complex64> {
        crate::numerics::linalg::eigenvalues3(&self.matrix)
    }
}

/// Advances the profile and one 3×3 complex fundamental matrix over a period.
pub fn integrate_monodromy(profile: &ProfileSamples, mu: Complex64, tol: f64) -> Result<Monodromy> {
    if !(tol >= 1e-14 && mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::InvalidInput(format!("bad monodromy request: mu = {mu}, tol = {tol}")));
    }
    let params = &profile.params;
    let nl = &params.nonlinearity;
    let c = params.c;
    // State: u, u_x, then Re/Im of Φ in row-major order.
    let mut y = vec![0.0; 20];
    let [u0, ux0] = profile.initial_state();
    y[0] = u0;
    y[1] = ux0;
    for k in 0..3 {
        y[2 + 2 * (3 * k + k)] = 1.0;
    }
    let mut peak = 1.0f64;
    let mut rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        peak = peak.max(hadamard(&y[2..]));
        profile_rhs(params, &y[..2], &mut dy[..2]);
        let (u, ux) = (y[0], y[1]);
        let q = -ux * nl.d2f(u);
        let k = c - nl.df(u);
        let phi = &y[2..];
        let d = &mut dy[2..];
        // Row r, column j: re at 2(3r+j), im at 2(3r+j)+1.
        for j in 0..3 {
            let (r0, r1, r2) = (2 * j, 2 * (3 + j), 2 * (6 + j));
            d[r0] = phi[r1];
            d[r0 + 1] = phi[r1 + 1];
            d[r1] = phi[r2];
            d[r1 + 1] = phi[r2 + 1];
            let (vr, vi) = (phi[r0], phi[r0 + 1]);
            // (−μ + q) v + k v_x
            d[r2] = (q - mu.re) * vr + mu.im * vi + k * phi[r1];
            d[r2 + 1] = (q - mu.re) * vi - mu.im * vr + k * phi[r1 + 1];
        }
    };
    let mut it = Integrator::new(OdeOptions::with_tol(tol), 20);
    it.integrate(&mut rhs, 0.0, profile.period, &mut y)?;
    let m = Matrix3::from_fn(|r, j| Complex64::new(y[2 + 2 * (3 * r + j)], y[3 + 2 * (3 * r + j)]));
    let mut mono = Monodromy::from_matrix(mu, m);
    mono.det_scale = mono.det_scale.max(peak);
    let bound = 100.0 * tol.max(f64::EPSILON) * mono.det_scale;
    if mono.det_residual > bound {
        return Err(Error::DetDrift { residual: mono.det_residual, bound, mu: mu.to_string() });
    }
    Ok(mono)
}

/// Product of row norms of the flattened complex 3×3 state.
fn hadamard(phi: &[f64]) -> f64 {
    (0..3).map(|r| phi[6 * r..6 * r + 6].iter().map(|v| v * v).sum::<f64>().sqrt()).product()
}

/// `D(μ, λ) = −λ³ + a(μ)λ² − a(−μ)λ + 1` with `a = tr M`.
pub fn evans(mono: &Monodromy, mono_neg: &Monodromy, lambda: Complex64) -> Complex64 {
    let d = -lambda * lambda * lambda + mono.trace * lambda * lambda - mono_neg.trace * lambda + 1.0;
    #[cfg(debug_assertions)]
    {
        let direct = (mono.matrix - CMat3::identity() * lambda).determinant();
        let scale = mono.det_scale.max(1.0) * lambda.norm().max(1.0).powi(3) * mono_neg.det_scale.max(1.0);
        debug_assert!(
            (direct - d).norm() <= 1e-7 * scale,
            "Evans trace formula disagrees with det(M − λI): {d} vs {direct}"
        );
    }
    d
}

/// `D(μ, λ)` from the trace pair alone.
pub fn evans_from_traces(a_mu: Complex64, a_neg_mu: Complex64, lambda: Complex64) -> Complex64 {
    -lambda * lambda * lambda + a_mu * lambda * lambda - a_neg_mu * lambda + 1.0
}
