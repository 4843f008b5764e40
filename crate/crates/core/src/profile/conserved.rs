//! Period, mass, momentum, Hamiltonian and action as regularized integrals.
//!
//! With `u = (u₊+u₋)/2 + ((u₊−u₋)/2) sin θ` the orbit integrals become
//! `2 ∫ g(u) dθ / √Q` over `θ ∈ [−π/2, π/2]`, where
//! `Q = 2(E − V)/((u − u₋)(u₊ − u))` is bounded away from zero for simple
//! turning points.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{self, QuadOptions};

use super::wave::{find_turning_points, TurningPoints, WaveParameters};

/// Relative distance from an endpoint inside which V is Taylor expanded.
const TAYLOR_ZONE: f64 = 1e-4;
/// Orbit width below which the expansion is used on the whole orbit.
const SMALL_ORBIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedSet {
    pub period: Estimate,
    pub mass: Estimate,
    pub momentum: Estimate,
    pub hamiltonian: Estimate,
    pub action: Estimate,
}

impl ConservedSet {
    /// Values in the order (T, M, P, H, K).
    pub fn values(&self) -> [f64; 5] {
        [self.period.value, self.mass.value, self.momentum.value, self.hamiltonian.value, self.action.value]
    }
}

/// Point on the orbit at angle θ: `(u, Q, E − V(u))`.
pub(crate) fn orbit_point(params: &WaveParameters, tp: &TurningPoints, theta: f64) -> (f64, f64, f64) {
    let w = tp.width();
    let s = 0.5 * (theta + FRAC_PI_2);
    let (sn, cs) = s.sin_cos();
    let dm = w * sn * sn; // u − u₋
    let dp = w * cs * cs; // u₊ − u
    // Small orbits lose E − V to cancellation everywhere, so expand about
    // the nearer endpoint across the whole interval.
    let small = w <= SMALL_ORBIT * tp.u_minus.abs().max(tp.u_plus.abs()).max(1.0);
    let (u, q) = if dm <= TAYLOR_ZONE * w || (small && dm <= dp) {
        let u = tp.u_minus + dm;
        let [v1, v2, v3, v4] = params.potential_jet(tp.u_minus);
        let poly = v1 + dm * (v2 / 2.0 + dm * (v3 / 6.0 + dm * v4 / 24.0));
        (u, -2.0 * poly / dp)
    } else if dp <= TAYLOR_ZONE * w || small {
        let u = tp.u_plus - dp;
        let d = -dp;
        let [v1, v2, v3, v4] = params.potential_jet(tp.u_plus);
        let poly = v1 + d * (v2 / 2.0 + d * (v3 / 6.0 + d * v4 / 24.0));
        (u, 2.0 * poly / dm)
    } else {
        let u = tp.u_minus + dm;
        (u, 2.0 * (params.energy - params.potential(u)) / (dm * dp))
    };
    (u, q, 0.5 * q * dm * dp)
}

pub fn conserved_quantities(params: &WaveParameters, tol: f64) -> Result<ConservedSet> {
    let tp = find_turning_points(params)?;
    conserved_with_turning_points(params, &tp, tol)
}

pub fn conserved_with_turning_points(params: &WaveParameters, tp: &TurningPoints, tol: f64) -> Result<ConservedSet> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let mut bad_q: Option<f64> = None;
    let r = quadrature::integrate(
        |theta, out| {
            let (u, q, ev) = orbit_point(params, tp, theta);
            if !(q > 0.0) && bad_q.is_none() {
                bad_q = Some(u);
            }
            let wt = 2.0 / q.max(f64::MIN_POSITIVE).sqrt();
            out[0] = wt;
            out[1] = wt * u;
            out[2] = wt * u * u;
            out[3] = wt * (ev - params.nonlinearity.antiderivative(u));
            out[4] = wt * 2.0 * ev;
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        5,
        QuadOptions { atol: tol, rtol: tol, max_intervals: 20_000 },
    )?;
    if let Some(u) = bad_q {
        return Err(Error::QuadratureFailure(format!(
            "Q vanishes at u = {u} inside the orbit; a turning point is not simple"
        )));
    }
    let est = |i: usize| Estimate { value: r.values[i], error: r.errors[i] };
    Ok(ConservedSet { period: est(0), mass: est(1), momentum: est(2), hamiltonian: est(3), action: est(4) })
}
