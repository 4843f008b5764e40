//! Parameter gradients of (T, M, P, H, K) by central differences with one
//! level of Richardson extrapolation.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::conserved::{conserved_with_turning_points, ConservedSet};
use super::wave::{find_turning_points, TurningPoints, WaveParameters};

pub const PARAM_NAMES: [&str; 3] = ["a", "E", "c"];
pub const QUANTITY_NAMES: [&str; 5] = ["T", "M", "P", "H", "K"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Period = 0,
    Mass = 1,
    Momentum = 2,
    Hamiltonian = 3,
    Action = 4,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepPolicy {
    /// Multiplies every adapted step; 0.5 gives the half-step recomputation.
    pub scale: f64,
    /// Quadrature tolerance for each stencil evaluation.
    pub tol: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self { scale: 1.0, tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientSet {
    /// `partials[q][j] = ∂q/∂param_j`, q in (T,M,P,H,K), j in (a,E,c).
    pub partials: [[f64; 3]; 5],
    /// Difference between the extrapolated value and the finer central difference.
    pub extrapolation_error: [[f64; 3]; 5],
    pub steps: [f64; 3],
    pub policy: StepPolicy,
    pub base: ConservedSet,
    #[serde(skip)]
    pub turning_points: TurningPoints,
}

impl GradientSet {
    pub fn grad(&self, q: Quantity) -> Vector3<f64> {
        let r = self.partials[q as usize];
        Vector3::new(r[0], r[1], r[2])
    }
    pub fn t(&self) -> Vector3<f64> {
        self.grad(Quantity::Period)
    }
    pub fn m(&self) -> Vector3<f64> {
        self.grad(Quantity::Mass)
    }
    pub fn p(&self) -> Vector3<f64> {
        self.grad(Quantity::Momentum)
    }
    pub fn h(&self) -> Vector3<f64> {
        self.grad(Quantity::Hamiltonian)
    }
    pub fn k(&self) -> Vector3<f64> {
        self.grad(Quantity::Action)
    }
}

/// Relative residuals of the identities every gradient set must satisfy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityResiduals {
    /// `K_E = T`, `K_a = M`, `K_c = P/2`.
    pub action: [f64; 3],
    /// `E∇T + a∇M + (c/2)∇P + ∇H = 0`, componentwise in (a, E, c).
    pub linear: [f64; 3],
    /// `{M,P}_{a,E} = −2{T,M}_{a,c}`, `{T,M}_{E,c} = −½{T,P}_{a,E}`,
    /// `{T,P}_{a,c} = {M,P}_{E,c}`.
    pub jacobian: [f64; 3],
}

impl IdentityResiduals {
    pub fn max_action(&self) -> f64 {
        self.action.iter().cloned().fold(0.0, f64::max)
    }
    pub fn max_linear(&self) -> f64 {
        self.linear.iter().cloned().fold(0.0, f64::max)
    }
    pub fn max_jacobian(&self) -> f64 {
        self.jacobian.iter().cloned().fold(0.0, f64::max)
    }
}

/// `|x − y|` relative to the larger magnitude, with `floor` guarding pairs
/// that vanish identically (symmetric waves).
pub(crate) fn rel_diff(x: f64, y: f64, floor: f64) -> f64 {
    let d = (x - y).abs();
    if d == 0.0 {
        0.0
    } else {
        d / x.abs().max(y.abs()).max(floor)
    }
}

impl GradientSet {
    pub fn identity_residuals(&self, params: &WaveParameters) -> IdentityResiduals {
        use crate::numerics::linalg::jac2;
        let [tv, mv, pv, _, _] = self.base.values();
        let (t, m, p, h, k) = (self.t(), self.m(), self.p(), self.h(), self.k());
        let scale_tmp = tv.abs().max(mv.abs()).max(pv.abs());
        let action = [
            rel_diff(k[1], tv, 1e-3 * scale_tmp),
            rel_diff(k[0], mv, 1e-3 * scale_tmp),
            rel_diff(k[2], 0.5 * pv, 1e-3 * scale_tmp),
        ];
        let (e, a, c) = (params.energy, params.a, params.c);
        // Components that vanish by symmetry are measured against the
        // largest term of the whole identity rather than their own size.
        let mut terms = [[0.0; 4]; 3];
        for j in 0..3 {
            terms[j] = [e * t[j], a * m[j], 0.5 * c * p[j], h[j]];
        }
        let overall = terms.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
        let mut linear = [0.0; 3];
        for j in 0..3 {
            let sum: f64 = terms[j].iter().sum();
            let mag = terms[j].iter().map(|v| v.abs()).fold(0.0, f64::max);
            linear[j] = if sum == 0.0 { 0.0 } else { sum.abs() / mag.max(1e-3 * overall).max(1e-300) };
        }
        let pairs = [
            (jac2(&m, &p, 0, 1), -2.0 * jac2(&t, &m, 0, 2)),
            (jac2(&t, &m, 1, 2), -0.5 * jac2(&t, &p, 0, 1)),
            (jac2(&t, &p, 0, 2), jac2(&m, &p, 1, 2)),
        ];
        let floor = 1e-3 * pairs.iter().map(|(x, y)| x.abs().max(y.abs())).fold(0.0, f64::max);
        let jacobian = pairs.map(|(x, y)| rel_diff(x, y, floor));
        IdentityResiduals { action, linear, jacobian }
    }
}

/// Adapted steps for (a, E, c), keeping every stencil point inside the same
/// orbit family and well away from the logarithmic separatrix singularity.
fn adapted_steps(params: &WaveParameters, tp: &TurningPoints, scale: f64) -> [f64; 3] {
    let e = params.energy;
    let bottom_gap = e - tp.well_level;
    let mut sing_gap = tp.ceiling_level - e;
    if !tp.floor_is_bottom() {
        sing_gap = sing_gap.min(e - tp.floor_level);
    }
    let gap_e = (0.25 * bottom_gap).min(0.02 * sing_gap);
    // Shifting a or c moves each critical level by about u_s δa or u_s² δc / 2.
    let gap = bottom_gap.min(sing_gap);
    let u_ext = tp.critical_extent.max(tp.u_minus.abs()).max(tp.u_plus.abs());
    let root = gap.sqrt();
    let h_a = (1e-4 * params.a.abs().max(1.0)).min(0.02 * gap / u_ext.max(root));
    let h_e = (1e-4 * e.abs().max(1.0)).min(gap_e);
    let h_c = (1e-4 * params.c.abs().max(1.0)).min(0.02 * gap / (0.5 * u_ext * u_ext).max(root));
    [h_a * scale, h_e * scale, h_c * scale]
}

pub fn gradients(params: &WaveParameters, policy: StepPolicy) -> Result<GradientSet> {
    let tp = find_turning_points(params)?;
    let base = conserved_with_turning_points(params, &tp, policy.tol)?;
    let steps = adapted_steps(params, &tp, policy.scale);

    // Stencil offsets: ±h and ±h/2 for each parameter.
    let jobs: Vec<(usize, f64)> = (0..3)
        .flat_map(|j| [(j, steps[j]), (j, -steps[j]), (j, 0.5 * steps[j]), (j, -0.5 * steps[j])])
        .collect();
    let evals: Vec<Result<[f64; 5]>> = jobs
        .par_iter()
        .map(|&(j, h)| {
            let mut v = params.vector();
            v[j] += h;
            let shifted = params.with_vector(v);
            let near = |detail: String| Error::NearSeparatrix { param: PARAM_NAMES[j], detail };
            let stp = find_turning_points(&shifted).map_err(|e| near(format!("offset {h:e}: {e}")))?;
            if stp.ceiling_level.is_finite() != tp.ceiling_level.is_finite()
                || stp.floor_is_bottom() != tp.floor_is_bottom()
            {
                return Err(near(format!("orbit family changes at offset {h:e}")));
            }
            let cs = conserved_with_turning_points(&shifted, &stp, policy.tol)
                .map_err(|e| near(format!("offset {h:e}: {e}")))?;
            Ok(cs.values())
        })
        .collect();
    let evals: Vec<[f64; 5]> = evals.into_iter().collect::<Result<_>>()?;

    let mut partials = [[0.0; 3]; 5];
    let mut extrapolation_error = [[0.0; 3]; 5];
    for j in 0..3 {
        let [p1, m1, p2, m2] = [&evals[4 * j], &evals[4 * j + 1], &evals[4 * j + 2], &evals[4 * j + 3]];
        let h = steps[j];
        for q in 0..5 {
            let coarse = (p1[q] - m1[q]) / (2.0 * h);
            let fine = (p2[q] - m2[q]) / h;
            let rich = (4.0 * fine - coarse) / 3.0;
            partials[q][j] = rich;
            extrapolation_error[q][j] = (rich - fine).abs();
        }
    }
    Ok(GradientSet { partials, extrapolation_error, steps, policy, base, turning_points: tp })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn kdv_action_identities() {
        let params = WaveParameters::power_law(1.0, 0.0, -0.1, 1.0).unwrap();
        let g = gradients(&params, StepPolicy::default()).unwrap();
        let b = g.base;
        assert!(rel(g.k()[1], b.period.value) < 1e-8);
        assert!(rel(g.k()[0], b.mass.value) < 1e-8);
        assert!(rel(g.k()[2], 0.5 * b.momentum.value) < 1e-8);
    }

    #[test]
    fn kdv_half_step_self_convergence() {
        let params = WaveParameters::power_law(1.0, 0.0, -0.1, 1.0).unwrap();
        let g1 = gradients(&params, StepPolicy::default()).unwrap();
        let g2 = gradients(&params, StepPolicy { scale: 0.5, ..Default::default() }).unwrap();
        for q in 0..5 {
            for j in 0..3 {
                let (x, y) = (g1.partials[q][j], g2.partials[q][j]);
                let scale = g1.partials[q].iter().map(|v| v.abs()).fold(0.0, f64::max);
                assert!((x - y).abs() <= 1e-4 * x.abs().max(1e-6 * scale), "{}_{}: {x} vs {y}", QUANTITY_NAMES[q], PARAM_NAMES[j]);
            }
        }
    }

    #[test]
    fn identities_across_families() {
        let cases = [
            (1.0, 0.0, -0.1, 1.0),
            (1.0, 0.05, -0.05, 2.0),
            (2.0, 0.0, -0.1, 1.0),
            (2.0, 0.0, 0.5, 1.0),
            (2.0, 0.1, 0.2, 1.0),
            (3.0, 0.02, -0.2, 1.0),
            (5.0, 0.0, -0.2, 1.0),
            (5.0, 1e-4, -1e-6, 1.0),
            (1.5, 0.0, -0.05, 0.7),
        ];
        for (p, a, e, c) in cases {
            let params = WaveParameters::power_law(p, a, e, c).unwrap();
            let g = gradients(&params, StepPolicy::default()).unwrap_or_else(|e| panic!("p={p} a={a} E={e}: {e}"));
            let r = g.identity_residuals(&params);
            assert!(r.max_action() < 1e-5, "p={p} a={a} E={e} c={c}: {r:?}");
            assert!(r.max_linear() < 1e-5, "p={p} a={a} E={e} c={c}: {r:?}");
            assert!(r.max_jacobian() < 1e-4, "p={p} a={a} E={e} c={c}: {r:?}");
        }
    }

    #[test]
    fn stencil_over_separatrix_is_flagged() {
        // Uses an explicit oversized step to push E above the separatrix.
        let params = WaveParameters::power_law(1.0, 0.0, -1e-3, 1.0).unwrap();
        let err = gradients(&params, StepPolicy { scale: 200.0, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::NearSeparatrix { .. }), "{err}");
    }
}
