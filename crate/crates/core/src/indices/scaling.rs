//! Power-law scaling `u = |c|^{1/p} ũ`, `x = x̃ / √|c|`, which maps any speed
//! to `c = ±1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::WaveParameters;

/// Powers of `|c|` relating quantities at speed `c` to those at unit speed:
/// `Q(a, E, c) = |c|^{k_Q} Q̃(ã, Ẽ, ±1)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingExponents {
    pub a: f64,
    pub energy: f64,
    pub period: f64,
    pub mass: f64,
    pub momentum: f64,
}

pub fn scaling_exponents(p: f64) -> ScalingExponents {
    ScalingExponents {
        a: 1.0 + 1.0 / p,
        energy: 1.0 + 2.0 / p,
        period: -0.5,
        mass: 1.0 / p - 0.5,
        momentum: 2.0 / p - 0.5,
    }
}

/// Maps `(a, E, c)` to `(a/|c|^{1+1/p}, E/|c|^{1+2/p}, sgn c)`.
pub fn rescale_to_unit_speed(params: &WaveParameters) -> Result<WaveParameters> {
    let p = params.nonlinearity.exponent().ok_or(Error::NotPowerLaw)?;
    if params.c == 0.0 || !params.c.is_finite() {
        return Err(Error::InvalidInput(format!("cannot rescale speed c = {}", params.c)));
    }
    let s = params.c.abs();
    let k = scaling_exponents(p);
    Ok(WaveParameters::new(
        params.a / s.powf(k.a),
        params.energy / s.powf(k.energy),
        params.c.signum(),
        params.nonlinearity.clone(),
    ))
}
