//! Wave parameters, the effective potential and turning points.

use crate::error::{Error, Result};
use crate::numerics::roots::safeguarded_newton;

use super::nonlinearity::Nonlinearity;

#[derive(Debug, Clone)]
pub struct WaveParameters {
    pub a: f64,
    pub energy: f64,
    pub c: f64,
    pub nonlinearity: Nonlinearity,
}

impl WaveParameters {
    pub fn new(a: f64, energy: f64, c: f64, nonlinearity: Nonlinearity) -> Self {
        Self { a, energy, c, nonlinearity }
    }

    pub fn power_law(p: f64, a: f64, energy: f64, c: f64) -> Result<Self> {
        Ok(Self::new(a, energy, c, Nonlinearity::power_law(p)?))
    }

    /// Parameter vector in the order (a, E, c).
    pub fn vector(&self) -> [f64; 3] {
        [self.a, self.energy, self.c]
    }

    pub fn with_vector(&self, v: [f64; 3]) -> Self {
        Self { a: v[0], energy: v[1], c: v[2], nonlinearity: self.nonlinearity.clone() }
    }

    /// `V(u) = F(u) − (c/2)u² − a u`.
    pub fn potential(&self, u: f64) -> f64 {
        self.nonlinearity.antiderivative(u) - 0.5 * self.c * u * u - self.a * u
    }

    pub fn dpotential(&self, u: f64) -> f64 {
        self.nonlinearity.f(u) - self.c * u - self.a
    }

    pub fn d2potential(&self, u: f64) -> f64 {
        self.nonlinearity.df(u) - self.c
    }

    /// Derivatives of V of order 1 through 4.
    pub fn potential_jet(&self, u: f64) -> [f64; 4] {
        let nl = &self.nonlinearity;
        [self.dpotential(u), self.d2potential(u), nl.d2f(u), nl.d3f(u)]
    }

    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.energy.is_finite() && self.c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite parameters a={}, E={}, c={}",
                self.a, self.energy, self.c
            )));
        }
        Ok(())
    }
}

/// The orbit's turning points, plus the critical levels that bound the
/// continuous family of orbits around it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TurningPoints {
    pub u_minus: f64,
    pub u_plus: f64,
    pub v_prime_minus: f64,
    pub v_prime_plus: f64,
    /// Abscissa and level of the selected well minimum.
    pub u_well: f64,
    pub well_level: f64,
    /// Highest critical value of V below E inside (u_-, u_+).
    pub floor_level: f64,
    /// Lowest local maximum of V just outside the orbit, or +inf.
    pub ceiling_level: f64,
    /// Largest |u| over the critical points that bound the family.
    pub critical_extent: f64,
}

impl TurningPoints {
    pub fn width(&self) -> f64 {
        self.u_plus - self.u_minus
    }

    /// Distance in E to the nearest level where the orbit changes character.
    pub fn energy_gap(&self, energy: f64) -> f64 {
        (energy - self.floor_level).min(self.ceiling_level - energy)
    }

    /// True when the level just below E is the well bottom rather than an
    /// interior hump of V; the orbit family is analytic there.
    pub fn floor_is_bottom(&self) -> bool {
        self.floor_level == self.well_level
    }
}

#[derive(Debug, Clone, Copy)]
struct Critical {
    u: f64,
    value: f64,
    is_min: bool,
}

/// Locates the roots of `V'` on `[lo, hi]` by sign scan plus refinement.
fn critical_points(params: &WaveParameters, lo: f64, hi: f64, n: usize) -> Vec<Critical> {
    let mut out = Vec::new();
    let h = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut g0 = params.dpotential(x0);
    // Last nonzero sample of V' to the left, for classifying flat roots.
    let mut left = g0;
    for i in 1..=n {
        let x1 = lo + h * i as f64;
        let g1 = params.dpotential(x1);
        let root = if g0 == 0.0 {
            Some(x0)
        } else if g0.signum() != g1.signum() && g1 != 0.0 {
            safeguarded_newton(|x| (params.dpotential(x), params.d2potential(x)), x0, x1, 1e-15).ok()
        } else {
            None
        };
        if let Some(r) = root {
            let v2 = params.d2potential(r);
            let is_min = if v2 != 0.0 { v2 > 0.0 } else { left < 0.0 && g1 > 0.0 };
            if out.last().map_or(true, |c: &Critical| (c.u - r).abs() > 1e-12 * r.abs().max(1.0)) {
                out.push(Critical { u: r, value: params.potential(r), is_min });
            }
        }
        if g0 != 0.0 {
            left = g0;
        }
        x0 = x1;
        g0 = g1;
    }
    out
}

fn scan_window(params: &WaveParameters) -> (f64, f64, f64) {
    match &params.nonlinearity {
        Nonlinearity::PowerLaw { p } => {
            // Roots of u^{p+1} = cu + a satisfy |u| <= max(1, (|c|+|a|)^{1/p}).
            let b = 1.05 * (params.c.abs() + params.a.abs()).powf(1.0 / p).max(1.0);
            let lo = if params.nonlinearity.integer_exponent().is_some() { -b } else { 0.0 };
            (lo, b, 0.0)
        }
        Nonlinearity::Custom(c) => (c.seed - c.search_radius, c.seed + c.search_radius, c.seed),
    }
}

/// Finds `u_- < u_+` with `V(u_±) = E` bracketing the selected well.
///
/// For a power law the well is the minimum of V nearest the smallest
/// positive critical point; for a custom nonlinearity it is the minimum
/// nearest the supplied seed.
fn select_well(params: &WaveParameters) -> Result<(Vec<Critical>, usize, f64, f64)> {
    params.validate()?;
    let (lo, hi, seed) = scan_window(params);
    let crit = critical_points(params, lo, hi, 4000);
    let minima: Vec<&Critical> = crit.iter().filter(|c| c.is_min).collect();
    if minima.is_empty() {
        return Err(Error::NoPeriodicOrbit("effective potential has no local minimum".into()));
    }
    let anchor = match params.nonlinearity {
        Nonlinearity::PowerLaw { .. } => crit
            .iter()
            .filter(|c| c.u > 1e-9 * hi.abs().max(1.0))
            .map(|c| c.u)
            .next()
            .unwrap_or(minima[0].u),
        Nonlinearity::Custom(_) => seed,
    };
    let well = **minima
        .iter()
        .min_by(|x, y| (x.u - anchor).abs().total_cmp(&(y.u - anchor).abs()))
        .expect("non-empty");
    let idx = crit.iter().position(|c| c.u == well.u).expect("well is a critical point");
    Ok((crit, idx, lo, hi))
}

/// Energy range `(V_min, E_sep)` of the orbit family around the selected
/// well; `E_sep` is the lower of the adjacent local maxima, or +inf.
pub fn well_energy_window(params: &WaveParameters) -> Result<(f64, f64)> {
    let (crit, idx, _, _) = select_well(params)?;
    let mut top = f64::INFINITY;
    for k in [idx.wrapping_sub(1), idx + 1] {
        if let Some(c) = crit.get(k) {
            if !c.is_min {
                top = top.min(c.value);
            }
        }
    }
    Ok((crit[idx].value, top))
}

/// Finds `u_- < u_+` with `V(u_±) = E` bracketing the selected well.
///
/// For a power law the well is the minimum of V nearest the smallest
/// positive critical point; for a custom nonlinearity it is the minimum
/// nearest the supplied seed.
pub fn find_turning_points(params: &WaveParameters) -> Result<TurningPoints> {
    let (crit, idx, lo, hi) = select_well(params)?;
    let well = crit[idx];

    let e = params.energy;
    let level_tol = 1e-12 * well.value.abs().max(e.abs()).max(1.0);
    if e < well.value - level_tol {
        return Err(Error::NoPeriodicOrbit(format!(
            "E = {e} lies below the well bottom V = {}",
            well.value
        )));
    }
    if e - well.value <= level_tol {
        return Err(Error::DegenerateOrbit { u_minus: well.u, u_plus: well.u });
    }

    let mut floor = well.value;
    let mut extent = well.u.abs();

    let mut side = |dir: i32| -> Result<(f64, f64)> {
        // Walk across monotone pieces until V climbs above E.
        let mut k = idx as i64;
        let mut prev = well.u;
        loop {
            k += dir as i64;
            if k < 0 || k as usize >= crit.len() {
                break;
            }
            let c = crit[k as usize];
            extent = extent.max(c.u.abs());
            if (c.value - e).abs() <= level_tol {
                return Err(Error::NoPeriodicOrbit(format!(
                    "E = {e} sits on the critical level of u = {} (non-simple turning point)",
                    c.u
                )));
            }
            if c.value > e {
                let r = refine_root(params, prev, c.u)?;
                return Ok((r, if c.is_min { f64::INFINITY } else { c.value }));
            }
            if c.value > floor {
                floor = c.value;
            }
            prev = c.u;
        }
        // Beyond the last critical point: V is monotone until it exits the window.
        let edge = if dir > 0 { hi } else { lo };
        let mut inner = prev;
        let mut outer = edge;
        let mut span = (edge - prev).abs().max(1e-3);
        for _ in 0..200 {
            if params.potential(outer) > e {
                let r = refine_root(params, inner, outer)?;
                // The u = 0 edge of a non-integer power law bounds the family
                // like a local maximum would.
                let bounded = outer == 0.0 && params.nonlinearity.integer_exponent().is_none();
                return Ok((r, if bounded { params.potential(0.0) } else { f64::INFINITY }));
            }
            if params.dpotential(outer) * (dir as f64) < 0.0 && outer != edge {
                break;
            }
            inner = outer;
            span *= 2.0;
            outer = prev + dir as f64 * span;
            if !params.potential(outer).is_finite() || outer.abs() > 1e12 {
                break;
            }
            if params.nonlinearity.integer_exponent().is_none() && outer <= 0.0 {
                break;
            }
        }
        Err(Error::NoPeriodicOrbit(format!(
            "E = {e} is at or above the separatrix level; V stays below E to the {}",
            if dir > 0 { "right" } else { "left" }
        )))
    };

    let (u_plus, ceil_r) = side(1)?;
    let (u_minus, ceil_l) = side(-1)?;
    let vpm = params.dpotential(u_minus);
    let vpp = params.dpotential(u_plus);
    let scale = well.u.abs().max(1.0);
    if u_plus - u_minus < 1e-6 * scale {
        return Err(Error::DegenerateOrbit { u_minus, u_plus });
    }
    if !(vpm < 0.0 && vpp > 0.0) {
        return Err(Error::NoPeriodicOrbit(format!(
            "turning points are not simple: V'(u-) = {vpm}, V'(u+) = {vpp}"
        )));
    }
    Ok(TurningPoints {
        u_minus,
        u_plus,
        v_prime_minus: vpm,
        v_prime_plus: vpp,
        u_well: well.u,
        well_level: well.value,
        floor_level: floor,
        ceiling_level: ceil_l.min(ceil_r),
        critical_extent: extent,
    })
}

fn refine_root(params: &WaveParameters, x0: f64, x1: f64) -> Result<f64> {
    let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    let e = params.energy;
    safeguarded_newton(|x| (params.potential(x) - e, params.dpotential(x)), lo, hi, 1e-16)
}
