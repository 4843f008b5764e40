use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{GradientSet, ProfileSamples};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JordanData {
    pub algebraic: usize,
    pub geometric: usize,
    /// Taylor coefficients of `det(M − λI)` at λ = 1, orders 0..=2, each
    /// divided by `max(1, ‖M‖)^{3−k}`.
    pub char_poly_at_one: [f64; 3],
    /// Singular values of `M − I`, descending.
    pub singular_values: [f64; 3],
}

/// Multiplicities of the eigenvalue 1.
///
/// The algebraic multiplicity counts the vanishing leading Taylor
/// coefficients of the characteristic polynomial at 1; the geometric one is
/// `3 − rank(M − I)` with singular values below `rank_tol · s_max` dropped.
pub fn jordan_multiplicities(m: &Matrix3<f64>, poly_tol: f64, rank_tol: f64) -> JordanData {
    let tr = m.trace();
    let s2 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let det = m.determinant();
    let norm = m.norm().max(1.0);
    let raw = [-1.0 + tr - s2 + det, -3.0 + 2.0 * tr - s2, tr - 3.0];
    let coeffs = [raw[0] / norm.powi(3), raw[1] / norm.powi(2), raw[2] / norm];
    let algebraic = coeffs.iter().take_while(|c| c.abs() <= poly_tol).count();

    let svd = (m - Matrix3::identity()).svd(false, false);
    let mut sv = [svd.singular_values[0], svd.singular_values[1], svd.singular_values[2]];
    sv.sort_by(|a, b| b.total_cmp(a));
    let cutoff = rank_tol * sv[0].max(rank_tol * norm);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    JordanData { algebraic, geometric: 3 - rank, char_poly_at_one: coeffs, singular_values: sv }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormM0 {
    #[serde(skip)]
    pub u00: Matrix3<f64>,
    /// Entries `(V'(u₋)T_a, V'(u₋)T_E)` added to the second row of U(0,0).
    pub update_row: [f64; 2],
    #[serde(skip)]
    pub u_t: Matrix3<f64>,
    #[serde(skip)]
    pub m0: Matrix3<f64>,
    /// `U(0,0)⁻¹ M(0) U(0,0)`.
    #[serde(skip)]
    pub n: Matrix3<f64>,
    pub det_u00: f64,
    /// Off-diagonal Jordan entry in the basis `(0,T_E,−T_a)`, `(1,0,0)`, `(0,−T_a,−T_E)`.
    pub sigma: f64,
    pub jordan: JordanData,
}

/// Builds M(0) from the solutions `(u_x, u_a, u_E)` of the μ = 0 system,
/// whose values at x = 0 and x = T are known in closed form.
pub fn closed_form_m0(profile: &ProfileSamples, grads: &GradientSet) -> Result<ClosedFormM0> {
    let params = &profile.params;
    let um = profile.turning_points.u_minus;
    let vp = params.dpotential(um);
    let [da, de, _] = profile.du_minus;
    let k = params.c - params.nonlinearity.df(um);
    let u00 = Matrix3::new(0.0, da, de, -vp, 0.0, 0.0, 0.0, 1.0 + k * da, k * de);
    let det_u00 = u00.determinant();
    if (det_u00 + 1.0).abs() > 1e-7 {
        return Err(Error::GenericityViolation(format!("det U(0,0) = {det_u00}, expected −1")));
    }
    let t = grads.t();
    let (ta, te) = (t[0], t[1]);
    let tscale = t.norm().max(grads.base.period.value);
    if ta.abs() <= 1e-10 * tscale && te.abs() <= 1e-10 * tscale {
        return Err(Error::GenericityViolation("T_a and T_E both vanish".into()));
    }
    let update_row = [vp * ta, vp * te];
    let mut u_t = u00;
    u_t[(1, 1)] += update_row[0];
    u_t[(1, 2)] += update_row[1];
    let inv = u00.try_inverse().ok_or_else(|| Error::GenericityViolation("U(0,0) is singular".into()))?;
    let m0 = u_t * inv;
    let n = inv * u_t;
    let sigma = ta * ta + te * te;
    let jordan = jordan_multiplicities(&m0, 1e-6, 1e-8);
    Ok(ClosedFormM0 { u00, update_row, u_t, m0, n, det_u00, sigma, jordan })
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;
    use num_complex::Complex64;

    use super::*;
    use crate::monodromy::integrate_monodromy;
    use crate::profile::{gradients, reconstruct_profile, StepPolicy, WaveParameters};

    #[test]
    fn closed_form_matches_integration_and_has_jordan_block() {
        for (p, a, e) in [(1.0, 0.0, -0.1), (2.0, 0.0, 0.4), (5.0, 0.0, -0.2)] {
            let params = WaveParameters::power_law(p, a, e, 1.0).unwrap();
            let prof = reconstruct_profile(&params, 128, false).unwrap();
            let g = gradients(&params, StepPolicy::default()).unwrap();
            let cf = closed_form_m0(&prof, &g).unwrap();
            assert!((cf.det_u00 + 1.0).abs() < 1e-10);
            let mi = integrate_monodromy(&prof, Complex64::new(0.0, 0.0), 1e-12).unwrap();
            for r in 0..3 {
                for j in 0..3 {
                    assert!((cf.m0[(r, j)] - mi.matrix[(r, j)].re).abs() < 1e-6, "p={p} ({r},{j})");
                }
            }
            assert_eq!((cf.jordan.algebraic, cf.jordan.geometric), (3, 2), "p={p}: {:?}", cf.jordan);
            let mreal = mi.matrix.map(|z| z.re);
            let ji = jordan_multiplicities(&mreal, 1e-6, 1e-8);
            assert_eq!((ji.algebraic, ji.geometric), (3, 2), "p={p}: {ji:?}");
            assert!(cf.sigma > 0.0);
            // Kernel of N − I in the transformed basis.
            let t = g.t();
            let nm = cf.n - Matrix3::identity();
            for v in [Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, t[1], -t[0])] {
                assert!((nm * v).norm() < 1e-8 * t.norm().max(1.0));
            }
            // And its third basis vector feeds the chain with σ.
            let v3 = Vector3::new(0.0, -t[0], -t[1]);
            let w = nm * v3;
            assert!((w[0] - cf.sigma).abs() < 1e-8 * cf.sigma && w[1].abs() < 1e-12 && w[2].abs() < 1e-12);
        }
    }

    #[test]
    fn identity_matrix_has_full_geometric_multiplicity() {
        let j = jordan_multiplicities(&Matrix3::identity(), 1e-6, 1e-8);
        assert_eq!((j.algebraic, j.geometric), (3, 3));
        let j = jordan_multiplicities(&Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 0.5)), 1e-6, 1e-8);
        assert_eq!((j.algebraic, j.geometric), (1, 1));
    }
}
