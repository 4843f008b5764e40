//! The wave profile on a uniform grid, with optional variational solutions.

use crate::error::{Error, Result};
use crate::numerics::ode::{Integrator, OdeOptions};

use super::conserved::conserved_with_turning_points;
use super::wave::{find_turning_points, TurningPoints, WaveParameters};

/// Right-hand side of `u_xx = a + c u − f(u)` for the state `(u, u_x)`.
#[inline]
pub(crate) fn profile_rhs(params: &WaveParameters, y: &[f64], dy: &mut [f64]) {
    dy[0] = y[1];
    dy[1] = params.a + params.c * y[0] - params.nonlinearity.f(y[0]);
}

/// Profile plus the three variational pairs; state layout
/// `(u, u_x, u_a, u_ax, u_E, u_Ex, u_c, u_cx)`.
#[inline]
fn full_rhs(params: &WaveParameters, y: &[f64], dy: &mut [f64]) {
    profile_rhs(params, y, dy);
    let k = params.nonlinearity.df(y[0]) - params.c;
    dy[2] = y[3];
    dy[3] = 1.0 - k * y[2];
    dy[4] = y[5];
    dy[5] = -k * y[4];
    dy[6] = y[7];
    dy[7] = y[0] - k * y[6];
}

#[derive(Debug, Clone)]
pub struct Variational {
    pub u_a: Vec<f64>,
    pub u_ax: Vec<f64>,
    pub u_e: Vec<f64>,
    pub u_ex: Vec<f64>,
    pub u_c: Vec<f64>,
    pub u_cx: Vec<f64>,
    /// Values at x = T in the order (u_a, u_ax, u_E, u_Ex, u_c, u_cx).
    pub end: [f64; 6],
}

#[derive(Debug, Clone)]
pub struct ProfileSamples {
    pub params: WaveParameters,
    pub turning_points: TurningPoints,
    pub period: f64,
    /// Nodes `x_i = i T / n`, `i = 0..n`; the closing node `x = T` is kept
    /// separately in `end`.
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub u_x: Vec<f64>,
    pub u_xx: Vec<f64>,
    pub variational: Option<Variational>,
    /// `∂u₋/∂(a, E, c)`.
    pub du_minus: [f64; 3],
    /// `(u(T), u_x(T))`.
    pub end: [f64; 2],
    pub closure_mismatch: f64,
    pub max_energy_residual: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    pub ode_tol: f64,
    pub period_tol: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { ode_tol: 1e-12, period_tol: 1e-13 }
    }
}

pub fn reconstruct_profile(params: &WaveParameters, n: usize, with_variational: bool) -> Result<ProfileSamples> {
    reconstruct_profile_with(params, n, with_variational, ProfileOptions::default())
}

pub fn reconstruct_profile_with(
    params: &WaveParameters,
    n: usize,
    with_variational: bool,
    opts: ProfileOptions,
) -> Result<ProfileSamples> {
    if n < 64 {
        return Err(Error::InvalidInput(format!("profile needs at least 64 nodes, got {n}")));
    }
    let tp = find_turning_points(params)?;
    let period = conserved_with_turning_points(params, &tp, opts.period_tol)?.period.value;
    let um = tp.u_minus;
    let vp = tp.v_prime_minus;
    let du_minus = [um / vp, 1.0 / vp, 0.5 * um * um / vp];

    let dim = if with_variational { 8 } else { 2 };
    let mut y = vec![0.0; dim];
    y[0] = um;
    if with_variational {
        y[2] = du_minus[0];
        y[4] = du_minus[1];
        y[6] = du_minus[2];
    }
    let mut rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        if dy.len() == 8 {
            full_rhs(params, y, dy)
        } else {
            profile_rhs(params, y, dy)
        }
    };
    let mut it = Integrator::new(OdeOptions::with_tol(opts.ode_tol), dim);

    let mut x = Vec::with_capacity(n);
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); dim];
    let mut u_xx = Vec::with_capacity(n);
    let mut max_res = 0.0f64;
    let e = params.energy;
    for i in 0..n {
        let xi = period * i as f64 / n as f64;
        if i > 0 {
            let x_prev = period * (i - 1) as f64 / n as f64;
            it.integrate(&mut rhs, x_prev, xi, &mut y)?;
        }
        x.push(xi);
        for (c, v) in cols.iter_mut().zip(&y) {
            c.push(*v);
        }
        u_xx.push(params.a + params.c * y[0] - params.nonlinearity.f(y[0]));
        let res = (0.5 * y[1] * y[1] + params.potential(y[0]) - e).abs();
        max_res = max_res.max(res);
    }
    it.integrate(&mut rhs, period * (n - 1) as f64 / n as f64, period, &mut y)?;

    let scale = tp.u_minus.abs().max(tp.u_plus.abs()).max(1.0);
    let mismatch = (y[0] - um).abs().max(y[1].abs());
    if mismatch > 1e-7 * scale {
        return Err(Error::ClosureFailure { mismatch });
    }

    let mut cols = cols.into_iter();
    let u = cols.next().unwrap();
    let u_x = cols.next().unwrap();
    let variational = if with_variational {
        Some(Variational {
            u_a: cols.next().unwrap(),
            u_ax: cols.next().unwrap(),
            u_e: cols.next().unwrap(),
            u_ex: cols.next().unwrap(),
            u_c: cols.next().unwrap(),
            u_cx: cols.next().unwrap(),
            end: [y[2], y[3], y[4], y[5], y[6], y[7]],
        })
    } else {
        None
    };

    Ok(ProfileSamples {
        params: params.clone(),
        turning_points: tp,
        period,
        x,
        u,
        u_x,
        u_xx,
        variational,
        du_minus,
        end: [y[0], y[1]],
        closure_mismatch: mismatch,
        max_energy_residual: max_res,
        tol: opts.ode_tol,
    })
}

impl ProfileSamples {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Initial state `(u, u_x)` at x = 0.
    pub fn initial_state(&self) -> [f64; 2] {
        [self.u[0], self.u_x[0]]
    }

    /// `(u, u_x)` at arbitrary x in [0, T], integrated from the nearest node.
    pub fn evaluate(&self, x: f64) -> Result<[f64; 2]> {
        if !(x >= 0.0 && x <= self.period * (1.0 + 1e-14)) {
            return Err(Error::InvalidInput(format!("x = {x} outside [0, {}]", self.period)));
        }
        let n = self.len();
        let h = self.period / n as f64;
        let i = ((x / h).round() as usize).min(n);
        let (x0, mut y) = if i == n { (self.period, self.end.to_vec()) } else { (self.x[i], vec![self.u[i], self.u_x[i]]) };
        let mut it = Integrator::new(OdeOptions::with_tol(self.tol), 2);
        it.integrate(&mut |_, y: &[f64], dy: &mut [f64]| profile_rhs(&self.params, y, dy), x0, x, &mut y)?;
        Ok([y[0], y[1]])
    }

    /// Maximum over nodes of the three Wronskian identity residuals
    /// `{u,u_x}_{x,a} − u`, `{u,u_x}_{x,E} − 1`, `{u,u_x}_{x,c} − u²/2`.
    pub fn wronskian_residuals(&self) -> Option<[f64; 3]> {
        let v = self.variational.as_ref()?;
        let mut r = [0.0f64; 3];
        for i in 0..self.len() {
            let w = |q: f64, qx: f64| self.u_x[i] * qx - self.u_xx[i] * q;
            let u = self.u[i];
            r[0] = r[0].max((w(v.u_a[i], v.u_ax[i]) - u).abs());
            r[1] = r[1].max((w(v.u_e[i], v.u_ex[i]) - 1.0).abs());
            r[2] = r[2].max((w(v.u_c[i], v.u_cx[i]) - 0.5 * u * u).abs());
        }
        Some(r)
    }
}
