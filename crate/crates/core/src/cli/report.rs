//! Report types for each command and the pipeline that fills them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::indices::{attach_hessian_form, classify, compute_indices, Classification, StabilityIndices};
use crate::monodromy::{closed_form_m0, monodromy_derivatives, ClosedFormM0};
use crate::profile::{
    gradients, reconstruct_profile, ConservedSet, GradientSet, IdentityResiduals, StepPolicy, TurningPoints,
    WaveParameters,
};
use crate::spectrum::{
    hill_spectrum, normal_form_roots, real_axis_scan, trace_bands, BandTrace, HillSpectrum, NormalFormRoots,
    RealAxisEigenvalues,
};

use super::config::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    pub nonlinearity: String,
    pub p: f64,
    pub a: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub c: f64,
    pub tol: f64,
}

impl Inputs {
    pub fn new(params: &WaveParameters, tol: f64) -> Self {
        Inputs {
            nonlinearity: params.nonlinearity.describe(),
            p: params.nonlinearity.exponent().unwrap_or(f64::NAN),
            a: params.a,
            energy: params.energy,
            c: params.c,
            tol,
        }
    }
}

pub fn parameters(s: &Settings, point: [f64; 3]) -> Result<WaveParameters> {
    WaveParameters::power_law(s.p, point[0], point[1], point[2])
}

fn policy(s: &Settings) -> StepPolicy {
    StepPolicy { tol: 0.1 * s.tol, ..StepPolicy::default() }
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveReport {
    pub inputs: Inputs,
    pub turning_points: TurningPoints,
    pub conserved: ConservedSet,
    pub period: f64,
    pub closure_mismatch: f64,
    pub max_energy_residual: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub u_x: Vec<f64>,
}

pub fn wave_report(s: &Settings) -> Result<WaveReport> {
    let params = parameters(s, s.point())?;
    let conserved = crate::profile::conserved_quantities(&params, 0.1 * s.tol)?;
    let prof = reconstruct_profile(&params, s.profile_nodes, false)?;
    Ok(WaveReport {
        inputs: Inputs::new(&params, s.tol),
        turning_points: prof.turning_points,
        conserved,
        period: prof.period,
        closure_mismatch: prof.closure_mismatch,
        max_energy_residual: prof.max_energy_residual,
        x: prof.x.clone(),
        u: prof.u.clone(),
        u_x: prof.u_x.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OriginChecks {
    /// `tr M(0)`, expected 3.
    pub trace: f64,
    /// `tr M_μ(0)` from the variational system, expected 0.
    pub trace_derivative: f64,
    pub det_residual: f64,
    /// Largest entry of |closed-form M(0) − integrated M(0)|.
    pub closed_form_mismatch: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub inputs: Inputs,
    pub turning_points: TurningPoints,
    pub conserved: ConservedSet,
    pub gradients: GradientSet,
    pub identity_residuals: IdentityResiduals,
    pub origin: OriginChecks,
    pub closed_form: ClosedFormM0,
    pub indices: StabilityIndices,
    pub classification: Classification,
    pub normal_form: Option<NormalFormRoots>,
    pub normal_form_error: Option<String>,
}

pub fn stability_report(params: &WaveParameters, s: &Settings) -> Result<StabilityReport> {
    let grads = gradients(params, policy(s))?;
    let prof = reconstruct_profile(params, s.profile_nodes.min(512), false)?;
    let derivs = monodromy_derivatives(&prof, 3, s.tol)?;
    let mut indices = compute_indices(params, &grads, Some(&derivs))?;
    attach_hessian_form(&mut indices, params, &grads)?;
    let closed = closed_form_m0(&prof, &grads)?;
    let mismatch = (closed.m0 - derivs.m0).abs().max();
    let det = derivs.m0.determinant();
    let classification = classify(&indices);
    let (normal_form, normal_form_error) = match normal_form_roots(&indices) {
        Ok(nf) => (Some(nf), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(StabilityReport {
        inputs: Inputs::new(params, s.tol),
        turning_points: grads.turning_points,
        conserved: grads.base,
        identity_residuals: grads.identity_residuals(params),
        origin: OriginChecks {
            trace: derivs.tr0,
            trace_derivative: derivs.tr1,
            det_residual: (det - 1.0).abs(),
            closed_form_mismatch: mismatch,
        },
        closed_form: closed,
        gradients: grads,
        indices,
        classification,
        normal_form,
        normal_form_error,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BandReport {
    pub inputs: Inputs,
    pub tr2: f64,
    pub tr3: f64,
    pub delta: f64,
    pub bands: BandTrace,
}

/// One row of the band table.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct BandRow {
    pub branch: usize,
    pub kappa: f64,
    pub re_mu: f64,
    pub im_mu: f64,
    pub residual: f64,
}

impl BandReport {
    pub fn rows(&self) -> Vec<BandRow> {
        self.bands
            .branches
            .iter()
            .flatten()
            .map(|p| BandRow { branch: p.branch, kappa: p.kappa, re_mu: p.mu.re, im_mu: p.mu.im, residual: p.residual })
            .collect()
    }
}

pub fn band_report(s: &Settings) -> Result<BandReport> {
    let params = parameters(s, s.point())?;
    let grads = gradients(&params, policy(s))?;
    let idx = compute_indices(&params, &grads, None)?;
    let prof = reconstruct_profile(&params, 128, false)?;
    let bands = trace_bands(&prof, &idx, s.kappa_max, s.kappa_steps)?;
    Ok(BandReport { inputs: Inputs::new(&params, s.tol), tr2: idx.tr2, tr3: idx.tr3, delta: idx.delta, bands })
}

#[derive(Debug, Clone, Serialize)]
pub struct RealScanReport {
    pub inputs: Inputs,
    pub tr3: f64,
    pub period: f64,
    pub scan: RealAxisEigenvalues,
}

pub fn real_scan_report(s: &Settings) -> Result<RealScanReport> {
    let params = parameters(s, s.point())?;
    let grads = gradients(&params, policy(s))?;
    let idx = compute_indices(&params, &grads, None)?;
    let prof = reconstruct_profile(&params, 128, false)?;
    let scan = real_axis_scan(&prof, s.mu_max, s.scan_nodes, Some(idx.tr3))?;
    Ok(RealScanReport { inputs: Inputs::new(&params, s.tol), tr3: idx.tr3, period: prof.period, scan })
}

#[derive(Debug, Clone, Serialize)]
pub struct HillReport {
    pub inputs: Inputs,
    pub spectra: Vec<HillSpectrum>,
}

pub fn hill_report(s: &Settings) -> Result<HillReport> {
    let params = parameters(s, s.point())?;
    let prof = reconstruct_profile(&params, s.profile_nodes.max(4 * s.hill_n), false)?;
    let spectra = s.gamma.par_iter().map(|&g| hill_spectrum(&prof, g, s.hill_n)).collect::<Result<Vec<_>>>()?;
    Ok(HillReport { inputs: Inputs::new(&params, s.tol), spectra })
}

/// One grid point of a sweep; failures are recorded, not propagated.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub a: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub c: f64,
    pub status: String,
    pub error: Option<String>,
    pub period: Option<f64>,
    pub tr2: Option<f64>,
    pub tr3: Option<f64>,
    pub orientation_jacobian: Option<f64>,
    pub delta: Option<f64>,
    pub modulational: Option<String>,
    pub real_axis: Option<String>,
    pub cross_check_tr2: Option<f64>,
    pub cross_check_tr3: Option<f64>,
}

fn sweep_point(s: &Settings, index: usize, point: [f64; 3]) -> SweepRow {
    let mut row = SweepRow {
        index,
        a: point[0],
        energy: point[1],
        c: point[2],
        status: "ok".into(),
        error: None,
        period: None,
        tr2: None,
        tr3: None,
        orientation_jacobian: None,
        delta: None,
        modulational: None,
        real_axis: None,
        cross_check_tr2: None,
        cross_check_tr3: None,
    };
    let run = || -> Result<(f64, StabilityIndices)> {
        let params = parameters(s, point)?;
        let grads = gradients(&params, policy(s))?;
        let prof = reconstruct_profile(&params, 128, false)?;
        let derivs = monodromy_derivatives(&prof, 3, s.tol)?;
        Ok((grads.base.period.value, compute_indices(&params, &grads, Some(&derivs))?))
    };
    match run() {
        Ok((period, idx)) => {
            let cl = classify(&idx);
            let cc = idx.cross_check.as_ref();
            row.period = Some(period);
            row.tr2 = Some(idx.tr2);
            row.tr3 = Some(idx.tr3);
            row.orientation_jacobian = Some(idx.orientation_jacobian);
            row.delta = Some(idx.delta);
            row.modulational = Some(format!("{:?}", cl.modulational));
            row.real_axis = Some(format!("{:?}", cl.real_axis));
            row.cross_check_tr2 = cc.map(|c| c.tr2_relative);
            row.cross_check_tr3 = cc.map(|c| c.tr3_relative);
        }
        Err(e) => {
            row.status = e.kind().into();
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Grid points in row-major (a, E, c) order; rows keep that order whatever
/// the completion order of the workers.
pub fn sweep_rows(s: &Settings) -> Vec<SweepRow> {
    let mut points = Vec::new();
    for &a in &s.a {
        for &e in &s.energy {
            for &c in &s.c {
                points.push([a, e, c]);
            }
        }
    }
    points.into_par_iter().enumerate().map(|(i, p)| sweep_point(s, i, p)).collect()
}

