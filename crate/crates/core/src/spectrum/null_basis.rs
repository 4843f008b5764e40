//! Generalized kernel of `∂_x𝓛[u]` at μ = 0 built from parameter
//! derivatives of the profile, checked with a Fourier discretization.

use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::linalg::{jac2, jac3};
use crate::profile::gradients::rel_diff;
use crate::profile::{GradientSet, ProfileSamples};

/// Which conserved quantity pins the Jordan chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainPartner {
    Mass,
    /// Used when `{T,M}_{a,E}` vanishes.
    Momentum,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullBasis {
    pub partner: ChainPartner,
    #[serde(skip)]
    pub phi0: Vec<f64>,
    #[serde(skip)]
    pub phi1: Vec<f64>,
    #[serde(skip)]
    pub phi2: Vec<f64>,
    #[serde(skip)]
    pub psi2: Option<Vec<f64>>,
    /// `‖∂_x𝓛φ₀‖/‖φ₀‖`, `‖∂_x𝓛φ₁‖/‖φ₁‖`, `‖∂_x𝓛φ₂ + φ₁‖/‖φ₁‖`.
    pub residuals: [f64; 3],
    /// `|φ_k(T) − φ_k(0)|`.
    pub periodicity: [f64; 3],
    /// `⟨ψ₂, φ₂⟩` on the grid and `½{T,M}_{a,E}{T,M,P}_{a,E,c}`.
    pub inner_product: Option<f64>,
    pub inner_product_expected: Option<f64>,
    pub inner_product_relative: Option<f64>,
}

/// `∂_x𝓛[u]v = ∂_x(−v'' + (c − f'(u))v)` by FFT differentiation.
pub fn apply_operator(profile: &ProfileSamples, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let t = profile.period;
    let c = profile.params.c;
    let nl = &profile.params.nonlinearity;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let wave = |k: usize| -> f64 {
        // Nyquist mode dropped so odd derivatives stay real.
        if 2 * k == n {
            return 0.0;
        }
        let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * std::f64::consts::PI * m / t
    };
    let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    let mut d2 = buf.clone();
    for (k, z) in d2.iter_mut().enumerate() {
        let w = wave(k);
        *z *= -w * w;
    }
    inv.process(&mut d2);
    let inner: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(-d2[i].re / n as f64 + (c - nl.df(profile.u[i])) * v[i], 0.0))
        .collect();
    let mut buf = inner;
    fwd.process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= Complex64::new(0.0, wave(k));
    }
    inv.process(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

fn norm(v: &[f64], dx: f64) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() * dx).sqrt()
}

pub fn null_basis(profile: &ProfileSamples, grads: &GradientSet) -> Result<NullBasis> {
    let var = profile
        .variational
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("null basis needs a profile with variational derivatives".into()))?;
    let (t, m, p) = (grads.t(), grads.m(), grads.p());
    let tm_ae = jac2(&t, &m, 0, 1);
    let tp_ae = jac2(&t, &p, 0, 1);
    let scale = (t.norm() * m.norm()).max(t.norm() * p.norm()).max(f64::MIN_POSITIVE);
    let (partner, q, coupling) = if tm_ae.abs() > 1e-8 * t.norm() * m.norm() {
        (ChainPartner::Mass, m, tm_ae)
    } else if tp_ae.abs() > 1e-8 * scale {
        (ChainPartner::Momentum, p, tp_ae)
    } else {
        return Err(Error::GenericityViolation("{T,M}_{a,E} and {T,P}_{a,E} both vanish".into()));
    };
    let n = profile.len();
    let dx = profile.period / n as f64;
    let d_u = |i: usize| Vector3::new(var.u_a[i], var.u_e[i], var.u_c[i]);
    let phi0: Vec<f64> = (0..n).map(|i| t[0] * var.u_e[i] - t[1] * var.u_a[i]).collect();
    let phi1: Vec<f64> = profile.u_x.iter().map(|ux| coupling * ux).collect();
    let phi2: Vec<f64> = (0..n).map(|i| jac3(&d_u(i), &t, &q)).collect();

    let e = &var.end;
    let end_u = Vector3::new(e[0], e[2], e[4]);
    let periodicity = [
        ((t[0] * e[2] - t[1] * e[0]) - phi0[0]).abs(),
        (coupling * profile.end[1] - phi1[0]).abs(),
        (jac3(&end_u, &t, &q) - phi2[0]).abs(),
    ];

    let r0 = apply_operator(profile, &phi0);
    let r1 = apply_operator(profile, &phi1);
    let mut r2 = apply_operator(profile, &phi2);
    for (r, f) in r2.iter_mut().zip(&phi1) {
        *r += f;
    }
    let n1 = norm(&phi1, dx);
    let residuals = [norm(&r0, dx) / norm(&phi0, dx), norm(&r1, dx) / n1, norm(&r2, dx) / n1];

    let (psi2, inner, expected) = match partner {
        ChainPartner::Mass => {
            let tm_ec = jac2(&t, &m, 1, 2);
            let psi2: Vec<f64> = profile.u.iter().map(|u| tm_ec + tm_ae * u).collect();
            let ip = psi2.iter().zip(&phi2).map(|(a, b)| a * b).sum::<f64>() * dx;
            (Some(psi2), Some(ip), Some(0.5 * tm_ae * jac3(&t, &m, &p)))
        }
        ChainPartner::Momentum => (None, None, None),
    };
    Ok(NullBasis {
        partner,
        phi0,
        phi1,
        phi2,
        psi2,
        residuals,
        periodicity,
        inner_product: inner,
        inner_product_expected: expected,
        inner_product_relative: inner.zip(expected).map(|(a, b)| rel_diff(a, b, 0.0)),
    })
}
