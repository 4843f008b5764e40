//! Continuation of the three spectral curves `μ_j(κ)` leaving the origin,
//! as roots of `D(μ, e^{iκ})`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indices::StabilityIndices;
use crate::monodromy::{evans_from_traces, integrate_monodromy, ser_complex};
use crate::profile::ProfileSamples;

use super::normal_form::{normal_form_roots, NormalFormRoots};

/// Ratio of the geometric κ grid.
pub const GRID_RATIO: f64 = 0.8;
const RESIDUAL_TOL: f64 = 1e-8;
const MAX_HALVINGS: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct BandPoint {
    pub kappa: f64,
    #[serde(serialize_with = "ser_complex")]
    pub mu: Complex64,
    /// `|D(μ, e^{iκ})|`.
    pub residual: f64,
    /// `2 + |a(μ)| + |a(−μ)|`, the size of the terms that cancel in D.
    pub scale: f64,
    pub branch: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandTrace {
    pub normal_form: NormalFormRoots,
    /// `branches[j]` follows `−i·y_j·κ`, in increasing κ, starting at κ = 0.
    pub branches: Vec<Vec<BandPoint>>,
}

/// Evaluates `D(μ, λ)` by two monodromy integrations.
pub struct EvansEvaluator<'a> {
    pub profile: &'a ProfileSamples,
    pub tol: f64,
}

impl EvansEvaluator<'_> {
    /// Returns `(D, scale)`.
    pub fn eval(&self, mu: Complex64, lambda: Complex64) -> Result<(Complex64, f64)> {
        let (p, n) = rayon::join(
            || integrate_monodromy(self.profile, mu, self.tol),
            || integrate_monodromy(self.profile, -mu, self.tol),
        );
        let (p, n) = (p?.trace, n?.trace);
        Ok((evans_from_traces(p, n, lambda), 2.0 + p.norm() + n.norm()))
    }
}

/// Secant iteration on `μ ↦ D(μ, λ)`.
fn secant(ev: &EvansEvaluator, lambda: Complex64, guess: Complex64, size: f64) -> Option<(Complex64, f64, f64)> {
    let h = Complex64::new(1e-3 * size, 0.0);
    let mut z0 = guess + h;
    let mut f0 = ev.eval(z0, lambda).ok()?.0;
    let mut z1 = guess;
    let (mut f1, mut scale) = ev.eval(z1, lambda).ok()?;
    for _ in 0..40 {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let z2 = z1 - f1 * (z1 - z0) / denom;
        if !(z2.re.is_finite() && z2.im.is_finite()) || (z2 - guess).norm() > 0.5 * size.max(1e-12) {
            return None;
        }
        let (f2, s2) = ev.eval(z2, lambda).ok()?;
        let step = (z2 - z1).norm();
        (z0, f0, z1, f1, scale) = (z1, f1, z2, f2, s2);
        if step <= 1e-14 * size + 1e-15 {
            break;
        }
    }
    (f1.norm() <= RESIDUAL_TOL * scale).then_some((z1, f1.norm(), scale))
}

/// Graded grid `κ_max·r^k`, k = steps−1..0, below which a uniform tail of
/// three points reaches down towards 0.
pub fn kappa_grid(kappa_max: f64, steps: usize) -> Vec<f64> {
    let smallest = kappa_max * GRID_RATIO.powi(steps as i32 - 1);
    let mut grid: Vec<f64> = (1..4).map(|i| smallest * i as f64 / 4.0).collect();
    grid.extend((0..steps).rev().map(|k| kappa_max * GRID_RATIO.powi(k as i32)));
    grid
}

pub fn trace_bands(profile: &ProfileSamples, idx: &StabilityIndices, kappa_max: f64, steps: usize) -> Result<BandTrace> {
    if !(kappa_max > 0.0 && kappa_max <= std::f64::consts::PI) || steps == 0 {
        return Err(Error::InvalidInput(format!("bad band grid: kappa_max = {kappa_max}, steps = {steps}")));
    }
    trace_bands_at(profile, idx, &kappa_grid(kappa_max, steps), 1e-12)
}

/// Traces the branches through the given κ values (sorted internally).
pub fn trace_bands_at(profile: &ProfileSamples, idx: &StabilityIndices, kappas: &[f64], tol: f64) -> Result<BandTrace> {
    let nf = normal_form_roots(idx)?;
    let mut grid: Vec<f64> = kappas.iter().copied().filter(|k| *k > 0.0).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let ev = EvansEvaluator { profile, tol };
    let branches: Vec<Result<Vec<BandPoint>>> =
        (0..3).into_par_iter().map(|j| trace_branch(&ev, &nf, j, &grid)).collect();
    let branches: Vec<Vec<BandPoint>> = branches.into_iter().collect::<Result<_>>()?;
    check_collisions(&ev, &branches)?;
    Ok(BandTrace { normal_form: nf, branches })
}

fn trace_branch(ev: &EvansEvaluator, nf: &NormalFormRoots, j: usize, grid: &[f64]) -> Result<Vec<BandPoint>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut pts = vec![BandPoint { kappa: 0.0, mu: zero, residual: 0.0, scale: 8.0, branch: j }];
    for &kappa in grid {
        // Sub-steps in κ when the predictor lands outside the basin.
        let mut target = kappa;
        let mut halvings = 0;
        while pts.last().unwrap().kappa < kappa {
            let last = pts.last().unwrap();
            let guess = if pts.len() < 3 {
                nf.predict(j, target)
            } else {
                let prev = &pts[pts.len() - 2];
                let slope = (last.mu - prev.mu) / (last.kappa - prev.kappa);
                last.mu + slope * (target - last.kappa)
            };
            let size = nf.predict(j, target).norm().max(guess.norm());
            let lambda = Complex64::from_polar(1.0, target);
            match secant(ev, lambda, guess, size) {
                Some((mu, residual, scale)) => {
                    pts.push(BandPoint { kappa: target, mu, residual, scale, branch: j });
                    target = kappa;
                    halvings = 0;
                }
                None if halvings < MAX_HALVINGS => {
                    target = 0.5 * (last.kappa + target);
                    halvings += 1;
                }
                None => return Err(Error::NewtonDivergence { branch: j, last_good_kappa: last.kappa }),
            }
        }
    }
    Ok(pts)
}

fn merge_radius(a: Complex64, b: Complex64) -> f64 {
    1e-6 * (a.norm() + b.norm()) + 1e-12
}

/// Two branches meeting at a shared κ is a collision; bisect κ between the
/// last separated grid value and the first merged one.
fn check_collisions(ev: &EvansEvaluator, branches: &[Vec<BandPoint>]) -> Result<()> {
    for i in 0..3 {
        for j in i + 1..3 {
            let (bi, bj) = (&branches[i], &branches[j]);
            for k in 1..bi.len().min(bj.len()) {
                if bi[k].kappa != bj[k].kappa {
                    break;
                }
                if (bi[k].mu - bj[k].mu).norm() > merge_radius(bi[k].mu, bj[k].mu) {
                    continue;
                }
                let (mut lo, mut hi) = (bi[k - 1].kappa, bi[k].kappa);
                let (mut mi, mut mj) = (bi[k - 1].mu, bj[k - 1].mu);
                for _ in 0..20 {
                    let mid = 0.5 * (lo + hi);
                    let lambda = Complex64::from_polar(1.0, mid);
                    let size = mi.norm().max(mj.norm()).max(1e-12);
                    match (secant(ev, lambda, mi, size), secant(ev, lambda, mj, size)) {
                        (Some((a, ..)), Some((b, ..))) if (a - b).norm() > merge_radius(a, b) => {
                            lo = mid;
                            (mi, mj) = (a, b);
                        }
                        _ => hi = mid,
                    }
                }
                return Err(Error::BranchCollision(i, j, hi));
            }
        }
    }
    Ok(())
}

/// Least-squares fit `Re μ ≈ sκ + qκ²` over `0 < κ ≤ kappa_fit`; returns `s`.
pub fn real_part_slope(branch: &[BandPoint], kappa_fit: f64) -> Option<f64> {
    let pts: Vec<&BandPoint> = branch.iter().filter(|p| p.kappa > 0.0 && p.kappa <= kappa_fit).collect();
    if pts.len() < 3 {
        return None;
    }
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in pts {
        let (k, y) = (p.kappa, p.mu.re);
        s11 += k * k;
        s12 += k * k * k;
        s22 += k * k * k * k;
        r1 += k * y;
        r2 += k * k * y;
    }
    let det = s11 * s22 - s12 * s12;
    (det != 0.0).then(|| (r1 * s22 - r2 * s12) / det)
}
