//! The invariant suite behind `gkdv validate`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::monodromy::integrate_monodromy;
use crate::profile::{reconstruct_profile, WaveParameters};
use crate::spectrum::{
    hill_spectrum, null_basis, real_axis_scan, trace_bands_at, BandPoint, HILL_CONVERGENCE_TOL,
};

use super::config::Settings;
use super::report::{stability_report, Inputs};

#[derive(Debug, Clone, Serialize, serde::Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Check {
        Check { name: name.into(), value, threshold, pass: value <= threshold }
    }

    fn equals(name: &str, value: f64, expected: f64) -> Check {
        Check { name: name.into(), value, threshold: expected, pass: value == expected }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub inputs: Inputs,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Sample points for the det M = 1 check: real, imaginary and complex.
fn det_samples(period: f64) -> Vec<Complex64> {
    let s = (2.0 * std::f64::consts::PI / period).powi(3);
    let mut v = Vec::new();
    for k in 1..=4 {
        let r = s * k as f64 / 2.0;
        v.push(Complex64::new(r, 0.0));
        v.push(Complex64::new(-r, 0.0));
        v.push(Complex64::new(0.0, r));
        v.push(Complex64::new(r, r) * std::f64::consts::FRAC_1_SQRT_2);
    }
    v
}

pub fn validate_point(params: &WaveParameters, s: &Settings) -> Result<ValidationReport> {
    let rep = stability_report(params, s)?;
    let grads = &rep.gradients;
    let idx = &rep.indices;
    let mut checks = Vec::new();

    let ir = &rep.identity_residuals;
    checks.push(Check::at_most("action_gradient_identity", ir.max_action(), 1e-5));
    checks.push(Check::at_most("linear_gradient_identity", ir.max_linear(), 1e-5));
    checks.push(Check::at_most("jacobian_relations", ir.max_jacobian(), 1e-4));

    let prof = reconstruct_profile(params, s.profile_nodes.max(4 * s.hill_n), true)?;
    let dets: Vec<f64> = det_samples(prof.period)
        .par_iter()
        .map(|&mu| integrate_monodromy(&prof, mu, s.tol).map(|m| m.det_residual))
        .collect::<Result<_>>()?;
    checks.push(Check::at_most("det_monodromy", dets.iter().cloned().fold(0.0, f64::max), 1e-8));
    checks.push(Check::at_most("trace_at_origin", (rep.origin.trace - 3.0).abs(), 1e-7));
    checks.push(Check::at_most("trace_derivative_at_origin", rep.origin.trace_derivative.abs(), 1e-6));

    let cc = idx.cross_check.as_ref().expect("report carries the variational cross-check");
    checks.push(Check::at_most("trace_identity_tr2", cc.tr2_relative, 1e-3));
    checks.push(Check::at_most("trace_identity_tr3", cc.tr3_relative, 1e-3));

    let j = rep.closed_form.jordan;
    checks.push(Check::equals("jordan_algebraic_multiplicity", j.algebraic as f64, 3.0));
    checks.push(Check::equals("jordan_geometric_multiplicity", j.geometric as f64, 2.0));
    checks.push(Check::at_most("closed_form_m0", rep.origin.closed_form_mismatch, 1e-6));

    if let Some(h) = idx.alt_forms.hessian_relative {
        checks.push(Check::at_most("hessian_form", h, 1e-3));
    }
    if let Some(m) = idx.alt_forms.mph_relative {
        checks.push(Check::at_most("mph_form", m, 1e-3));
    }

    // Imaginary-axis multiplicity: one multiplier on the unit circle.
    let scale = (2.0 * std::f64::consts::PI / prof.period).powi(3);
    let on_circle: Vec<f64> = [2.0, 5.0, 10.0]
        .par_iter()
        .map(|&k| {
            let m = integrate_monodromy(&prof, Complex64::new(0.0, k * scale), s.tol)?;
            Ok(m.multipliers().iter().filter(|z| (z.norm() - 1.0).abs() <= 1e-6).count() as f64)
        })
        .collect::<Result<_>>()?;
    checks.push(Check::equals(
        "imaginary_axis_simple",
        if on_circle.iter().all(|&c| c == 1.0) { 1.0 } else { 0.0 },
        1.0,
    ));

    let scan = real_axis_scan(&prof, s.mu_max, s.scan_nodes, None)?;
    checks.push(Check::equals("antiperiodic_count_even", (scan.antiperiodic_positive % 2) as f64, 0.0));
    checks.push(Check::equals(
        "periodic_parity_matches_tr3",
        ((scan.periodic_positive % 2 == 1) == (idx.tr3 > 0.0)) as u8 as f64,
        1.0,
    ));

    let nb = null_basis(&prof, grads)?;
    checks.push(Check::at_most("null_phi0_residual", nb.residuals[0], 1e-5));
    checks.push(Check::at_most("null_phi1_residual", nb.residuals[1], 1e-5));
    checks.push(Check::at_most("null_phi2_chain_residual", nb.residuals[2], 1e-4));
    checks.push(Check::at_most("null_periodicity", nb.periodicity.iter().cloned().fold(0.0, f64::max), 1e-6));
    if let Some(r) = nb.inner_product_relative {
        checks.push(Check::at_most("null_pairing", r, 1e-3));
    }

    let hill0 = hill_spectrum(&prof, 0.0, s.hill_n)?;
    let cluster = hill0.near_origin.iter().map(|z| z.norm()).fold(0.0, f64::max);
    checks.push(Check::at_most("hill_triple_zero", cluster, 1e-6));

    if let Some(nf) = &rep.normal_form {
        checks.push(Check::at_most("normal_form_residual", nf.max_residual, 1e-10));
        checks.push(Check::equals("normal_form_matches_delta", nf.delta_consistent as u8 as f64, 1.0));
        let bands = trace_bands_at(&prof, idx, &s.gamma, s.tol)?;
        let hills: Vec<_> = s.gamma.par_iter().map(|&g| hill_spectrum(&prof, g, s.hill_n)).collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for h in hills.iter().filter(|h| h.gamma > 0.0) {
            let pts: Vec<&BandPoint> = bands.branches.iter().flatten().filter(|p| p.kappa == h.gamma).collect();
            for z in &h.near_origin {
                let d = pts.iter().map(|p| rel(p.mu, *z)).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        checks.push(Check::at_most("hill_matches_bands", worst, 5e-3));
        let drift = hills.iter().map(|h| h.truncation_drift).fold(0.0, f64::max);
        checks.push(Check::at_most("hill_truncation", drift, HILL_CONVERGENCE_TOL));
    }

    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(ValidationReport { inputs: rep.inputs, passed: checks.len() - failed, failed, checks })
}
