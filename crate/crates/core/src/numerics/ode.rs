//! Adaptive explicit Runge–Kutta integration with Verner's 9(8) pair.
//!
//! States are flat `f64` slices; complex systems are split into real and
//! imaginary parts by the caller. Integration always lands exactly on the
//! requested end point, so resampling onto a grid is done by integrating
//! node to node while the controller carries its step size across calls.

use super::verner::{A, B_HIGH, B_LOW, C, STAGES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-11,
            max_steps: 2_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Stateful stepper; keeps the last accepted step size between calls.
pub struct Integrator {
    opts: OdeOptions,
    h: Option<f64>,
    stages: Vec<Vec<f64>>,
    work: Vec<f64>,
    y_high: Vec<f64>,
    pub stats: OdeStats,
}

impl Integrator {
    pub fn new(opts: OdeOptions, dim: usize) -> Self {
        Self {
            opts,
            h: None,
            stages: vec![vec![0.0; dim]; STAGES],
            work: vec![0.0; dim],
            y_high: vec![0.0; dim],
            stats: OdeStats::default(),
        }
    }

    /// Advances `y` from `x0` to `x1` in place.
    pub fn integrate<F>(&mut self, rhs: &mut F, x0: f64, x1: f64, y: &mut [f64]) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(());
        }
        let dir = span.signum();
        let n = y.len();
        debug_assert_eq!(n, self.work.len());

        let mut x = x0;
        let mut h = match self.h {
            Some(h) => h.abs().min(span.abs()) * dir,
            None => self.initial_step(rhs, x0, y, span),
        };
        let mut steps = 0usize;

        loop {
            let remaining = x1 - x;
            if remaining * dir <= 0.0 {
                break;
            }
            let last = (h.abs() >= remaining.abs()) || (remaining.abs() - h.abs()).abs() <= 1e-14 * x1.abs().max(1.0);
            let h_try = if last { remaining } else { h };

            let err = self.trial_step(rhs, x, h_try, y);
            steps += 1;
            if steps > self.opts.max_steps {
                return Err(Error::IntegratorFailure(format!(
                    "step budget of {} exhausted at x = {x}",
                    self.opts.max_steps
                )));
            }
            if !err.is_finite() {
                // Treat a blown-up trial as a hard rejection.
                h = h_try * 0.1;
                if h.abs() <= 1e-15 * x.abs().max(1.0) {
                    return Err(Error::IntegratorFailure(format!("non-finite state at x = {x}")));
                }
                self.stats.rejected += 1;
                continue;
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-1.0 / 9.0)).clamp(0.2, 5.0)
            };

            if err <= 1.0 {
                y.copy_from_slice(&self.y_high);
                x = if last { x1 } else { x + h_try };
                self.stats.accepted += 1;
                if !last {
                    h = h_try * factor;
                } else {
                    // Keep the pre-clamp step for the next call.
                    self.h = Some(h.abs().max(h_try.abs()));
                    break;
                }
                self.h = Some(h.abs());
            } else {
                self.stats.rejected += 1;
                h = h_try * factor.min(1.0);
                if h.abs() <= 1e-15 * x.abs().max(1.0) {
                    return Err(Error::IntegratorFailure(format!(
                        "step size underflow at x = {x}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn initial_step<F>(&mut self, rhs: &mut F, x0: f64, y: &[f64], span: f64) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        rhs(x0, y, &mut self.work);
        let mut d0 = 0.0f64;
        let mut d1 = 0.0f64;
        for (yi, fi) in y.iter().zip(&self.work) {
            let sc = self.opts.atol + self.opts.rtol * yi.abs();
            d0 = d0.max(yi.abs() / sc);
            d1 = d1.max(fi.abs() / sc);
        }
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0.min(span.abs() * 0.1).max(1e-12) * span.signum()
    }

    /// Computes one trial step into `y_high`, returning the scaled error norm.
    fn trial_step<F>(&mut self, rhs: &mut F, x: f64, h: f64, y: &[f64]) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        for s in 0..STAGES {
            self.work.copy_from_slice(y);
            for (j, &a) in A[s].iter().enumerate() {
                if a != 0.0 {
                    let k = &self.stages[j];
                    for i in 0..n {
                        self.work[i] += h * a * k[i];
                    }
                }
            }
            let (head, tail) = self.stages.split_at_mut(s);
            let _ = head;
            rhs(x + C[s] * h, &self.work, &mut tail[0]);
        }
        let mut err = 0.0f64;
        for i in 0..n {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..STAGES {
                let k = self.stages[s][i];
                hi += B_HIGH[s] * k;
                lo += B_LOW[s] * k;
            }
            let y_new = y[i] + h * hi;
            self.y_high[i] = y_new;
            let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(y_new.abs());
            err = err.max((h * (hi - lo)).abs() / sc);
        }
        err
    }
}

/// One-shot convenience wrapper.
pub fn integrate<F>(mut rhs: F, x0: f64, x1: f64, y: &mut [f64], opts: OdeOptions) -> Result<OdeStats>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut it = Integrator::new(opts, y.len());
    it.integrate(&mut rhs, x0, x1, y)?;
    Ok(it.stats)
}
