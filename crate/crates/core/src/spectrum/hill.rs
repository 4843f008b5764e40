//! Fourier–Bloch (Hill's method) oracle: eigenvalues of `J_γ 𝓛_γ[u]` on
//! T-periodic functions, `J_γ = ∂_x + iγ/T`,
//! `𝓛_γ = −(∂_x + iγ/T)² − f'(u) + c`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::ProfileSamples;

pub const DEFAULT_MODES: usize = 128;
pub const MIN_MODES: usize = 32;
/// Allowed drift of the three eigenvalues nearest 0 between N and N/2.
pub const CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct HillSpectrum {
    pub gamma: f64,
    pub modes: usize,
    #[serde(skip)]
    pub eigenvalues: Vec<Complex64>,
    /// Three eigenvalues nearest 0, by modulus.
    #[serde(serialize_with = "ser_list")]
    pub near_origin: Vec<Complex64>,
    /// Largest shift of `near_origin` against the N/2 truncation.
    pub truncation_drift: f64,
    pub period: f64,
}

pub(crate) fn ser_list<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    serde::Serialize::serialize(&pairs, s)
}

/// Fourier coefficients `ĝ_m`, |m| ≤ 2N, of `g = f'(u)` on the profile grid.
fn potential_coefficients(profile: &ProfileSamples, modes: usize) -> Vec<Complex64> {
    let n = profile.len();
    let nl = &profile.params.nonlinearity;
    let mut buf: Vec<Complex64> = profile.u.iter().map(|&u| Complex64::new(nl.df(u), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    (0..=4 * modes)
        .map(|i| {
            let m = i as isize - 2 * modes as isize;
            buf[m.rem_euclid(n as isize) as usize] * scale
        })
        .collect()
}

/// The `(2N+1)²` Galerkin matrix in the basis `e^{2πikx/T}`, k = −N..N.
pub fn hill_matrix(profile: &ProfileSamples, gamma: f64, modes: usize) -> Result<DMatrix<Complex64>> {
    if modes < MIN_MODES {
        return Err(Error::InvalidInput(format!("Hill truncation needs N >= {MIN_MODES}, got {modes}")));
    }
    if profile.len() < 4 * modes {
        return Err(Error::InvalidInput(format!(
            "profile has {} nodes; N = {modes} needs at least {}",
            profile.len(),
            4 * modes
        )));
    }
    let t = profile.period;
    let c = profile.params.c;
    let g = potential_coefficients(profile, modes);
    let dim = 2 * modes + 1;
    let xi: Vec<f64> = (0..dim)
        .map(|j| (2.0 * std::f64::consts::PI * (j as f64 - modes as f64) + gamma) / t)
        .collect();
    Ok(DMatrix::from_fn(dim, dim, |j, k| {
        // Row j of iξ_j·[(ξ_j² + c)δ_jk − ĝ_{j−k}].
        let conv = g[j + 2 * modes - k];
        let diag = if j == k { Complex64::new(xi[j] * xi[j] + c, 0.0) } else { Complex64::new(0.0, 0.0) };
        Complex64::new(0.0, xi[j]) * (diag - conv)
    }))
}

fn eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| Error::IntegratorFailure("Hill matrix eigenvalue iteration did not converge".into()))?;
    Ok(schur.eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default())
}

fn sorted_by_modulus(ev: &[Complex64]) -> Vec<Complex64> {
    let mut v = ev.to_vec();
    v.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    v
}

/// Largest cluster handed to the Rayleigh–Ritz refinement.
const MAX_CLUSTER: usize = 16;
const INVERSE_SWEEPS: usize = 40;

/// Rayleigh–Ritz on the invariant subspace of the smallest cluster of
/// `k ≥ 3` eigenvalues nearest 0 that is separated from the rest by a
/// factor 2 in modulus; the subspace comes from shifted block inverse
/// iteration.
///
/// Dense QR is backward stable only relative to `‖A‖ ~ ξ_max³`, and the
/// eigenvalues near 0 can be badly conditioned (a Jordan block at γ = 0,
/// near-defective pairs close to the solitary limit). The invariant
/// subspace of a separated cluster is well conditioned, and `A` applied to
/// it is small, so the projected `k×k` matrix is accurate to about `ε`
/// times the cluster's size instead of `ε ξ_max³`.
fn refine_cluster(a: &DMatrix<Complex64>, sorted: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.nrows();
    let k = (3..MAX_CLUSTER.min(n - 1)).find(|&k| sorted[k].norm() > 2.0 * sorted[k - 1].norm())?;
    let s = 0.1 * sorted[k - 1].norm() + f64::MIN_POSITIVE.sqrt();
    let sigma = Complex64::new(0.37 * s, 0.61 * s);
    let lu = (a - DMatrix::identity(n, n) * sigma).lu();
    // Start from the modes nearest k = 0.
    let mid = n / 2;
    let start: Vec<usize> = (0..k).map(|j| if j % 2 == 0 { mid + j / 2 } else { mid - (j + 1) / 2 }).collect();
    let mut q = DMatrix::from_fn(n, k, |i, j| Complex64::new(if start[j] == i { 1.0 } else { 0.0 }, 0.0));
    for _ in 0..INVERSE_SWEEPS {
        let z = lu.solve(&q)?;
        q = z.qr().q();
    }
    let ritz = eigenvalues(q.adjoint() * a * &q).ok()?;
    let mut ev = sorted_by_modulus(&ritz);
    ev.truncate(3);
    Some(ev)
}

fn nearest_origin(a: &DMatrix<Complex64>, ev: &[Complex64]) -> Vec<Complex64> {
    let sorted = sorted_by_modulus(ev);
    refine_cluster(a, &sorted).unwrap_or_else(|| sorted[..3].to_vec())
}

/// Largest distance from each point of `a` to its nearest neighbour in `b`.
fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .map(|z| b.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn hill_spectrum(profile: &ProfileSamples, gamma: f64, modes: usize) -> Result<HillSpectrum> {
    if !(gamma.abs() <= std::f64::consts::PI) {
        return Err(Error::InvalidInput(format!("Floquet exponent {gamma} outside [-pi, pi]")));
    }
    let solve = |m: usize| -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let a = hill_matrix(profile, gamma, m)?;
        let ev = eigenvalues(a.clone())?;
        let near = nearest_origin(&a, &ev);
        Ok((ev, near))
    };
    let (full, half) = rayon::join(|| solve(modes), || solve(modes / 2));
    let ((full, near), (_, near_half)) = (full?, half?);
    let drift = set_distance(&near, &near_half).max(set_distance(&near_half, &near));
    if drift > CONVERGENCE_TOL {
        return Err(Error::TruncationNotConverged(drift));
    }
    Ok(HillSpectrum { gamma, modes, eigenvalues: full, near_origin: near, truncation_drift: drift, period: profile.period })
}
