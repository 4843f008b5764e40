//! Real eigenvalues: zeros of `D(μ, 1) = a(μ) − a(−μ)` and of
//! `D(μ, −1) = 2 + a(μ) + a(−μ)` on `[0, μ_max]`, mirrored to ℝ.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monodromy::integrate_monodromy;
use crate::numerics::roots::bisect;
use crate::profile::ProfileSamples;

pub const DEFAULT_NODES: usize = 2048;
/// `|D|` below this multiple of `2 + |a(μ)| + |a(−μ)|` carries no sign.
const NOISE: f64 = 1e-9;
/// Multiple of the summed det residuals treated as trace noise.
const RESIDUAL_NOISE: f64 = 10.0;
/// Cap on that floor relative to the traces: once the entries are huge,
/// det M cancels catastrophically and says nothing about the trace.
const RESIDUAL_CAP: f64 = 1e-6;

/// `a(μ)`, `a(−μ)` and the noise level of any combination of them.
#[derive(Debug, Clone, Copy)]
struct TracePair {
    p: f64,
    n: f64,
    noise: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealAxisEigenvalues {
    /// Roots of `D(·,1)`: 0 and the ± pairs, sorted.
    pub periodic: Vec<f64>,
    /// Roots of `D(·,−1)`: ± pairs, sorted.
    pub antiperiodic: Vec<f64>,
    pub mu_max: f64,
    pub nodes: usize,
    pub periodic_positive: usize,
    pub antiperiodic_positive: usize,
    /// Sign of `D(μ_max, 1)`; negative once the asymptotic regime is reached.
    pub large_mu_sign: f64,
    /// Nodes skipped because |D| was below the noise floor.
    pub unresolved_nodes: usize,
}

/// `8 max((2π/T)³, m^{3/2})` with `m = max |c − f'(u)|` on the profile.
///
/// The first term is the wavelength scale; near the solitary limit the
/// real eigenvalues sit at the amplitude scale instead, which the second
/// term covers.
pub fn default_mu_max(profile: &ProfileSamples) -> f64 {
    let params = &profile.params;
    let m = profile.u.iter().map(|&u| (params.c - params.nonlinearity.df(u)).abs()).fold(0.0, f64::max);
    8.0 * (2.0 * std::f64::consts::PI / profile.period).powi(3).max(m.powf(1.5))
}

/// Near a separatrix the fundamental matrix grows by many orders within a
/// period and the traces keep only absolute accuracy; `|det M − 1|` is
/// the measured stand-in for that error.
/// `origin_error` is `|a(0) − 3|`, an absolute gauge of the same error
/// measured where the exact value is known.
fn traces(profile: &ProfileSamples, mu: f64, tol: f64, origin_error: f64) -> Result<TracePair> {
    let mp = integrate_monodromy(profile, Complex64::new(mu, 0.0), tol)?;
    let mn = integrate_monodromy(profile, Complex64::new(-mu, 0.0), tol)?;
    let (p, n) = (mp.trace.re, mn.trace.re);
    let size = 2.0 + p.abs() + n.abs();
    let measured = (RESIDUAL_NOISE * (mp.det_residual + mn.det_residual)).min(RESIDUAL_CAP * size);
    let noise = (NOISE * size).max(measured).max(origin_error);
    Ok(TracePair { p, n, noise })
}

fn d_periodic(p: f64, n: f64) -> f64 {
    p - n
}

fn d_antiperiodic(p: f64, n: f64) -> f64 {
    2.0 + p + n
}

/// Roots from sign changes between resolved nodes, refined by bisection.
fn roots_of(
    profile: &ProfileSamples,
    grid: &[f64],
    values: &[TracePair],
    d: fn(f64, f64) -> f64,
    tol: f64,
    origin_error: f64,
    unresolved: &mut usize,
) -> Result<Vec<f64>> {
    let mut brackets = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&mu, t) in grid.iter().zip(values) {
        let v = d(t.p, t.n);
        if v.abs() <= t.noise {
            *unresolved += 1;
            continue;
        }
        if let Some((m0, v0)) = last {
            if v0.signum() != v.signum() {
                brackets.push((m0, mu));
            }
        }
        last = Some((mu, v));
    }
    let xtol = 1e-13 * grid.last().copied().unwrap_or(1.0);
    brackets
        .into_par_iter()
        .map(|(lo, hi)| {
            bisect(
                |mu| traces(profile, mu, tol, origin_error).map(|t| d(t.p, t.n)).unwrap_or(f64::NAN),
                lo,
                hi,
                xtol,
            )
        })
        .collect()
}

fn mirror(pos: &[f64], with_zero: bool) -> Vec<f64> {
    let mut v: Vec<f64> = pos.iter().flat_map(|&r| [r, -r]).collect();
    if with_zero {
        v.push(0.0);
    }
    v.sort_by(f64::total_cmp);
    v
}

/// Scans `(0, μ_max]` on `n` nodes uniform in `μ^{1/3}`, the variable the
/// monodromy grows in. With `tr3` given, the periodic count parity is
/// checked against its sign.
pub fn real_axis_scan(
    profile: &ProfileSamples,
    mu_max: Option<f64>,
    nodes: usize,
    tr3: Option<f64>,
) -> Result<RealAxisEigenvalues> {
    let mu_max = mu_max.unwrap_or_else(|| default_mu_max(profile));
    if !(mu_max > 0.0 && mu_max.is_finite()) || nodes < 16 {
        return Err(Error::InvalidInput(format!("bad real-axis scan: mu_max = {mu_max}, nodes = {nodes}")));
    }
    let tol = 1e-12;
    let grid: Vec<f64> = (1..=nodes).map(|i| mu_max * (i as f64 / nodes as f64).powi(3)).collect();
    let origin_error = (integrate_monodromy(profile, Complex64::new(0.0, 0.0), tol)?.trace - 3.0).norm();
    let values: Vec<TracePair> =
        grid.par_iter().map(|&mu| traces(profile, mu, tol, origin_error)).collect::<Result<_>>()?;

    let last = values.last().expect("nodes >= 16");
    let end = d_periodic(last.p, last.n);
    if !(end < 0.0 && end.abs() > last.noise) {
        return Err(Error::ScanTooShort(mu_max));
    }

    let mut unresolved = 0;
    let per = roots_of(profile, &grid, &values, d_periodic, tol, origin_error, &mut unresolved)?;
    let anti = roots_of(profile, &grid, &values, d_antiperiodic, tol, origin_error, &mut unresolved)?;
    if anti.len() % 2 != 0 {
        return Err(Error::ParityViolation(format!(
            "{} antiperiodic roots on (0, {mu_max}]; the count must be even",
            anti.len()
        )));
    }
    if let Some(tr3) = tr3 {
        if (per.len() % 2 == 1) != (tr3 > 0.0) {
            return Err(Error::ParityViolation(format!(
                "{} nonzero periodic roots on (0, {mu_max}] but tr M_uuu(0) = {tr3}",
                per.len()
            )));
        }
    }
    Ok(RealAxisEigenvalues {
        periodic_positive: per.len(),
        antiperiodic_positive: anti.len(),
        periodic: mirror(&per, true),
        antiperiodic: mirror(&anti, false),
        mu_max,
        nodes,
        large_mu_sign: end.signum(),
        unresolved_nodes: unresolved,
    })
}
