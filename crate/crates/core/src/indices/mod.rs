//! Orientation index and modulational discriminant from conserved-quantity
//! Jacobians, stability classification, power-law scaling and the
//! solitary-wave limit.

mod scaling;
mod solitary;

pub use scaling::{rescale_to_unit_speed, scaling_exponents};
pub use scaling::ScalingExponents;
pub use solitary::{solitary_limit_report, DEFAULT_PATH as DEFAULT_SOLITARY_PATH, SolitaryLimitReport, SolitarySample};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monodromy::MonodromyDerivatives;
use crate::numerics::linalg::{jac2, jac3};
use crate::profile::gradients::rel_diff;
use crate::profile::{gradients, GradientSet, StepPolicy, WaveParameters};

/// Relative mismatch between Jacobian and variational-ODE traces above which
/// a numerics bug is declared.
pub const CROSS_CHECK_FAIL: f64 = 1e-2;
/// Mismatch the cross-check is expected to stay under.
pub const CROSS_CHECK_TARGET: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub tr2_variational: f64,
    pub tr3_variational: f64,
    pub tr1_variational: f64,
    pub tr2_relative: f64,
    pub tr3_relative: f64,
    pub within_target: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AltForms {
    /// `−2 det(Hess K)`, from second differences of K alone.
    pub hessian_form: Option<f64>,
    /// `−{M,P,H}_{a,E,c} / E`; absent when |E| < 1e-8.
    pub mph_form: Option<f64>,
    pub hessian_relative: Option<f64>,
    pub mph_relative: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityIndices {
    /// `{T,P}_{E,c} + 2{M,P}_{a,E}`, equal to `tr M_μμ(0)`.
    pub tr2: f64,
    /// `−(3/2){T,M,P}_{a,E,c}`, equal to `tr M_μμμ(0)`.
    pub tr3: f64,
    /// `{T,M,P}_{a,E,c}`.
    pub orientation_jacobian: f64,
    /// `½ tr2³ − 3 tr3²`.
    pub delta: f64,
    /// `{T,M}_{a,E}`, `{T,M}_{E,c}`, `{T,M}_{a,c}`, `{T,P}_{a,E}`.
    pub tm_ae: f64,
    pub tm_ec: f64,
    pub tm_ac: f64,
    pub tp_ae: f64,
    pub alt_forms: AltForms,
    pub cross_check: Option<CrossCheck>,
}

pub fn compute_indices(
    params: &WaveParameters,
    grads: &GradientSet,
    derivs: Option<&MonodromyDerivatives>,
) -> Result<StabilityIndices> {
    let (t, m, p, h) = (grads.t(), grads.m(), grads.p(), grads.h());
    let (a, e, c) = (0, 1, 2);
    let tr2 = jac2(&t, &p, e, c) + 2.0 * jac2(&m, &p, a, e);
    let orientation = jac3(&t, &m, &p);
    let tr3 = -1.5 * orientation;
    let delta = 0.5 * tr2.powi(3) - 3.0 * tr3 * tr3;

    let energy = params.energy;
    let mph_form = (energy.abs() >= 1e-8).then(|| -jac3(&m, &p, &h) / energy);
    let alt_forms = AltForms {
        hessian_form: None,
        mph_form,
        hessian_relative: None,
        mph_relative: mph_form.map(|v| rel_diff(v, orientation, 0.0)),
    };

    let scale = index_scale(tr2, tr3);
    let cross_check = match derivs {
        Some(d) => {
            let tr2_relative = rel_diff(tr2, d.tr2, 1e-8 * scale.powi(2));
            let tr3_relative = rel_diff(tr3, d.tr3, 1e-8 * scale.powi(3));
            if tr2_relative > CROSS_CHECK_FAIL {
                return Err(Error::CrossCheckFailure { quantity: "tr M_uu(0)", relative: tr2_relative });
            }
            if tr3_relative > CROSS_CHECK_FAIL {
                return Err(Error::CrossCheckFailure { quantity: "tr M_uuu(0)", relative: tr3_relative });
            }
            Some(CrossCheck {
                tr2_variational: d.tr2,
                tr3_variational: d.tr3,
                tr1_variational: d.tr1,
                tr2_relative,
                tr3_relative,
                within_target: tr2_relative <= CROSS_CHECK_TARGET && tr3_relative <= CROSS_CHECK_TARGET,
            })
        }
        None => None,
    };

    Ok(StabilityIndices {
        tr2,
        tr3,
        orientation_jacobian: orientation,
        delta,
        tm_ae: jac2(&t, &m, a, e),
        tm_ec: jac2(&t, &m, e, c),
        tm_ac: jac2(&t, &m, a, c),
        tp_ae: jac2(&t, &p, a, e),
        alt_forms,
        cross_check,
    })
}

/// Fills in the Hessian-of-K form from second differences of K, computed
/// by differencing the K row of gradient sets at shifted parameters.
pub fn attach_hessian_form(idx: &mut StabilityIndices, params: &WaveParameters, grads: &GradientSet) -> Result<()> {
    let steps = grads.steps;
    let policy = StepPolicy { scale: 1.0, ..grads.policy };
    // Outer stencil at ±2h and ±4h with Richardson, h the inner step.
    let jobs: Vec<(usize, f64)> = (0..3)
        .flat_map(|j| [4.0, -4.0, 2.0, -2.0].map(|s| (j, s * steps[j])))
        .collect();
    let rows: Vec<Result<[f64; 3]>> = jobs
        .par_iter()
        .map(|&(j, h)| {
            let mut v = params.vector();
            v[j] += h;
            let g = gradients(&params.with_vector(v), policy)?;
            Ok(g.partials[4])
        })
        .collect();
    let rows: Vec<[f64; 3]> = rows.into_iter().collect::<Result<_>>()?;
    let mut hess = nalgebra::Matrix3::zeros();
    for j in 0..3 {
        let h = steps[j];
        for i in 0..3 {
            let coarse = (rows[4 * j][i] - rows[4 * j + 1][i]) / (8.0 * h);
            let fine = (rows[4 * j + 2][i] - rows[4 * j + 3][i]) / (4.0 * h);
            hess[(i, j)] = (4.0 * fine - coarse) / 3.0;
        }
    }
    let sym = 0.5 * (hess + hess.transpose());
    let form = -2.0 * sym.determinant();
    idx.alt_forms.hessian_form = Some(form);
    idx.alt_forms.hessian_relative = Some(rel_diff(form, idx.orientation_jacobian, 0.0));
    Ok(())
}

/// `max(|tr2|^{1/2}, |tr3|^{1/3}, 1)`.
pub fn index_scale(tr2: f64, tr3: f64) -> f64 {
    tr2.abs().sqrt().max(tr3.abs().cbrt()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Modulational {
    StableTripleImaginary,
    UnstableTwoBranches,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RealAxis {
    OddPeriodicCount,
    EvenPeriodicCount,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub modulational: Modulational,
    pub real_axis: RealAxis,
    pub notes: Vec<String>,
    pub tr3_threshold: f64,
    pub delta_threshold: f64,
}

pub fn classify(idx: &StabilityIndices) -> Classification {
    let scale = index_scale(idx.tr2, idx.tr3);
    let tr3_threshold = 1e-6 * scale.powi(3);
    let delta_threshold = 1e-6 * scale.powi(6);
    let mut notes = Vec::new();
    let tr3_zero = idx.tr3.abs() < tr3_threshold;
    let modulational = if tr3_zero || idx.delta.abs() < delta_threshold {
        if tr3_zero {
            notes.push("Jordan structure change: tr M_uuu(0) vanishes within threshold".to_string());
        } else {
            notes.push("discriminant vanishes within threshold".to_string());
        }
        Modulational::Degenerate
    } else if idx.delta > 0.0 {
        Modulational::StableTripleImaginary
    } else {
        Modulational::UnstableTwoBranches
    };
    let real_axis = if idx.tr3 > 0.0 && !tr3_zero {
        notes.push("odd number of positive real periodic eigenvalues: real-axis instability".to_string());
        RealAxis::OddPeriodicCount
    } else {
        RealAxis::EvenPeriodicCount
    };
    if idx.tr2 < 0.0 {
        notes.push("tr M_uu(0) < 0: sufficient for modulational instability".to_string());
    }
    Classification { modulational, real_axis, notes, tr3_threshold, delta_threshold }
}
