use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied smooth nonlinearity.
///
/// `seed` must lie inside the potential well whose orbits are wanted;
/// `search_radius` bounds the scan for critical points around it.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub f: ScalarFn,
    pub antiderivative: ScalarFn,
    pub df: ScalarFn,
    pub d2f: ScalarFn,
    pub d3f: Option<ScalarFn>,
    pub seed: f64,
    pub search_radius: f64,
}

/// The nonlinearity `f` in `u_t = u_xxx + f(u)_x − c u_x`.
#[derive(Clone)]
pub enum Nonlinearity {
    /// `f(u) = u^{p+1}`. Non-integer `p` is only defined for `u > 0`.
    PowerLaw { p: f64 },
    Custom(Arc<CustomNonlinearity>),
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::PowerLaw { p } => write!(fm, "PowerLaw {{ p: {p} }}"),
            Nonlinearity::Custom(c) => write!(fm, "Custom({:?}, seed {})", c.name, c.seed),
        }
    }
}

impl Nonlinearity {
    pub fn power_law(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidInput(format!("power-law exponent must be positive, got {p}")));
        }
        Ok(Nonlinearity::PowerLaw { p })
    }

    pub fn custom(c: CustomNonlinearity) -> Self {
        Nonlinearity::Custom(Arc::new(c))
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            Nonlinearity::PowerLaw { p } => Some(*p),
            Nonlinearity::Custom(_) => None,
        }
    }

    /// Integer exponents use `powi` and are defined on the whole line.
    pub fn integer_exponent(&self) -> Option<i32> {
        match self {
            Nonlinearity::PowerLaw { p } if p.fract() == 0.0 && *p <= 64.0 => Some(*p as i32),
            _ => None,
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::PowerLaw { p } => pow(u, *p + 1.0),
            Nonlinearity::Custom(c) => (c.f)(u),
        }
    }

    /// `F` with `F' = f` and `F(0) = 0`.
    pub fn antiderivative(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::PowerLaw { p } => pow(u, *p + 2.0) / (*p + 2.0),
            Nonlinearity::Custom(c) => (c.antiderivative)(u),
        }
    }

    pub fn df(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::PowerLaw { p } => (*p + 1.0) * pow(u, *p),
            Nonlinearity::Custom(c) => (c.df)(u),
        }
    }

    pub fn d2f(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::PowerLaw { p } => (*p + 1.0) * *p * pow(u, *p - 1.0),
            Nonlinearity::Custom(c) => (c.d2f)(u),
        }
    }

    pub fn d3f(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::PowerLaw { p } => {
                if *p == 1.0 {
                    0.0
                } else {
                    (*p + 1.0) * *p * (*p - 1.0) * pow(u, *p - 2.0)
                }
            }
            Nonlinearity::Custom(c) => match &c.d3f {
                Some(g) => g(u),
                None => {
                    let h = 1e-4 * u.abs().max(1.0);
                    ((c.d2f)(u + h) - (c.d2f)(u - h)) / (2.0 * h)
                }
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Nonlinearity::PowerLaw { p } => format!("u^{}", p + 1.0),
            Nonlinearity::Custom(c) => c.name.clone(),
        }
    }
}

fn pow(u: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() <= 64.0 {
        u.powi(e as i32)
    } else {
        u.powf(e)
    }
}
