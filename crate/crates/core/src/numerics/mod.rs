//! Numerical building blocks shared by the analysis modules.

pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod roots;
mod verner;
