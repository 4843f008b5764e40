//! Sufficient conditions for a monotone period map, checked on the orbit.
//!
//! With `G = V'`, the conditions are `5G''² − 3G'G''' > 0` wherever
//! `G' > 0`, and `G G'' < 0` wherever `G' = 0`. When they hold for a power
//! law at unit speed, `T_E > 0` is guaranteed.

use serde::Serialize;

use crate::error::Result;

use super::nonlinearity::Nonlinearity;
use super::wave::{find_turning_points, WaveParameters};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub enum Applicability {
    /// Power law with c = 1: the conditions imply `T_E > 0`.
    Guaranteed,
    /// The conditions were evaluated but carry no guarantee.
    NotApplicable(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SchaafReport {
    pub samples: usize,
    /// `5G''² − 3G'G''' > 0` on every sample with `G' > 0`.
    pub curvature_condition: bool,
    /// `G G'' < 0` at every zero of `G'`.
    pub zero_condition: bool,
    pub zeros_of_g_prime: Vec<f64>,
    pub min_curvature_margin: f64,
    pub applicability: Applicability,
}

impl SchaafReport {
    pub fn conditions_hold(&self) -> bool {
        self.curvature_condition && self.zero_condition
    }

    /// True only when the conditions hold and a guarantee applies.
    pub fn guarantees_positive_period_slope(&self) -> bool {
        self.conditions_hold() && self.applicability == Applicability::Guaranteed
    }
}

pub fn schaaf_check(params: &WaveParameters) -> Result<SchaafReport> {
    schaaf_check_with(params, 1000)
}

pub fn schaaf_check_with(params: &WaveParameters, samples: usize) -> Result<SchaafReport> {
    let tp = find_turning_points(params)?;
    let nl = &params.nonlinearity;
    let g1 = |u: f64| params.d2potential(u);
    let g2 = |u: f64| nl.d2f(u);
    let g3 = |u: f64| nl.d3f(u);

    let us: Vec<f64> = (0..samples)
        .map(|i| tp.u_minus + tp.width() * i as f64 / (samples - 1) as f64)
        .collect();
    let gp: Vec<f64> = us.iter().map(|&u| g1(u)).collect();
    let scale = gp.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);

    let mut margin = f64::INFINITY;
    for (&u, &d) in us.iter().zip(&gp) {
        if d > 0.0 {
            let m = 5.0 * g2(u).powi(2) - 3.0 * d * g3(u);
            margin = margin.min(m);
        }
    }

    // Zeros of G': sign changes, and touching zeros at local minima of |G'|.
    let mut zeros = Vec::new();
    for i in 0..samples - 1 {
        let (a, b) = (gp[i], gp[i + 1]);
        if a == 0.0 {
            zeros.push(us[i]);
        } else if a.signum() != b.signum() && b != 0.0 {
            let (mut lo, mut hi) = (us[i], us[i + 1]);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if g1(mid).signum() == a.signum() {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            zeros.push(0.5 * (lo + hi));
        } else if i > 0 && a.abs() <= gp[i - 1].abs() && a.abs() <= b.abs() {
            // Golden-section search for the minimum of |G'| on the neighbouring cells.
            let (mut lo, mut hi) = (us[i - 1], us[i + 1]);
            let r = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..120 {
                let m1 = hi - r * (hi - lo);
                let m2 = lo + r * (hi - lo);
                if g1(m1).abs() < g1(m2).abs() {
                    hi = m2
                } else {
                    lo = m1
                }
            }
            let um = 0.5 * (lo + hi);
            if g1(um).abs() <= 1e-10 * scale {
                zeros.push(um);
            }
        }
    }
    zeros.dedup_by(|x, y| (*x - *y).abs() <= 1e-6 * tp.width());
    let zero_condition = zeros.iter().all(|&u| params.dpotential(u) * g2(u) < 0.0);

    let applicability = match nl {
        Nonlinearity::PowerLaw { .. } if params.c == 1.0 => Applicability::Guaranteed,
        Nonlinearity::PowerLaw { .. } => Applicability::NotApplicable(format!(
            "wave speed c = {} (guarantee stated for c = 1)",
            params.c
        )),
        Nonlinearity::Custom(c) => Applicability::NotApplicable(format!("non-power-law nonlinearity {}", c.name)),
    };

    Ok(SchaafReport {
        samples,
        curvature_condition: margin > 0.0,
        zero_condition,
        zeros_of_g_prime: zeros,
        min_curvature_margin: margin,
        applicability,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::profile::gradients::{gradients, StepPolicy};
    use crate::profile::nonlinearity::CustomNonlinearity;

    #[test]
    fn kdv_conditions_hold_and_period_increases() {
        let params = WaveParameters::power_law(1.0, 0.0, -0.1, 1.0).unwrap();
        let rep = schaaf_check(&params).unwrap();
        assert!(rep.guarantees_positive_period_slope());
        let g = gradients(&params, StepPolicy::default()).unwrap();
        assert!(g.t()[1] > 0.0);
    }

    #[test]
    fn mkdv_near_bottom_conditions_hold() {
        let vmin = -0.25;
        let params = WaveParameters::power_law(2.0, 0.0, vmin + 1e-3, 1.0).unwrap();
        let rep = schaaf_check(&params).unwrap();
        assert!(rep.conditions_hold());
    }

    #[test]
    fn flat_inflection_violates_zero_condition() {
        // f = (u−1)³ + u at c = 1 gives G = (u−1)³: G' and G vanish together.
        let nl = Nonlinearity::custom(CustomNonlinearity {
            name: "(u-1)^3+u".into(),
            f: Arc::new(|u: f64| (u - 1.0).powi(3) + u),
            antiderivative: Arc::new(|u: f64| (u - 1.0).powi(4) / 4.0 + u * u / 2.0 - 0.25),
            df: Arc::new(|u: f64| 3.0 * (u - 1.0).powi(2) + 1.0),
            d2f: Arc::new(|u: f64| 6.0 * (u - 1.0)),
            d3f: Some(Arc::new(|_| 6.0)),
            seed: 1.0,
            search_radius: 2.0,
        });
        let params = WaveParameters::new(0.0, 0.0, 1.0, nl);
        let rep = schaaf_check(&params).unwrap();
        assert!(!rep.zero_condition);
        assert!(!rep.guarantees_positive_period_slope());
        assert!(matches!(rep.applicability, Applicability::NotApplicable(_)));
        assert_eq!(rep.zeros_of_g_prime.len(), 1);
        assert!((rep.zeros_of_g_prime[0] - 1.0).abs() < 1e-4);
    }
}
