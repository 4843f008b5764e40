use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ode::{Integrator, OdeOptions};
use crate::profile::samples::profile_rhs;
use crate::profile::ProfileSamples;

/// `M(0)` and `M_μ(0)`, `M_μμ(0)`, `M_μμμ(0)`. At μ = 0 the system is real,
/// so the matrices are stored as real and the traces are exactly real.
#[derive(Debug, Clone, Serialize)]
pub struct MonodromyDerivatives {
    #[serde(skip)]
    pub m0: Matrix3<f64>,
    #[serde(skip)]
    pub m1: Matrix3<f64>,
    #[serde(skip)]
    pub m2: Matrix3<f64>,
    #[serde(skip)]
    pub m3: Matrix3<f64>,
    pub order: usize,
    pub tr0: f64,
    pub tr1: f64,
    pub tr2: f64,
    pub tr3: f64,
}

/// Integrates `Φ_k' = HΦ_k + k H_μ Φ_{k−1}` for `k ≤ order` at μ = 0, where
/// `H_μ` has −1 in entry (3,1).
pub fn monodromy_derivatives(profile: &ProfileSamples, order: usize, tol: f64) -> Result<MonodromyDerivatives> {
    if order == 0 || order > 3 {
        return Err(Error::InvalidInput(format!("derivative order must be 1..=3, got {order}")));
    }
    let params = &profile.params;
    let nl = &params.nonlinearity;
    let c = params.c;
    let blocks = order + 1;
    let dim = 2 + 9 * blocks;
    let mut y = vec![0.0; dim];
    let [u0, ux0] = profile.initial_state();
    y[0] = u0;
    y[1] = ux0;
    for k in 0..3 {
        y[2 + 3 * k + k] = 1.0;
    }
    let mut rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        profile_rhs(params, &y[..2], &mut dy[..2]);
        let (u, ux) = (y[0], y[1]);
        let q = -ux * nl.d2f(u);
        let kk = c - nl.df(u);
        for b in 0..blocks {
            let off = 2 + 9 * b;
            for j in 0..3 {
                let (v, vx, vxx) = (y[off + j], y[off + 3 + j], y[off + 6 + j]);
                dy[off + j] = vx;
                dy[off + 3 + j] = vxx;
                let mut last = q * v + kk * vx;
                if b > 0 {
                    last -= b as f64 * y[off - 9 + j];
                }
                dy[off + 6 + j] = last;
            }
        }
    };
    let mut it = Integrator::new(OdeOptions::with_tol(tol), dim);
    it.integrate(&mut rhs, 0.0, profile.period, &mut y)?;
    let block = |b: usize| {
        if b < blocks {
            Matrix3::from_fn(|r, j| y[2 + 9 * b + 3 * r + j])
        } else {
            Matrix3::zeros()
        }
    };
    let (m0, m1, m2, m3) = (block(0), block(1), block(2), block(3));
    Ok(MonodromyDerivatives {
        tr0: m0.trace(),
        tr1: m1.trace(),
        tr2: m2.trace(),
        tr3: m3.trace(),
        m0,
        m1,
        m2,
        m3,
        order,
    })
}
