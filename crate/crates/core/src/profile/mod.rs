//! Periodic traveling-wave profiles of `u_xx + f(u) − c u = a` and their
//! conserved quantities.

pub mod conserved;
pub mod gradients;
pub mod nonlinearity;
pub mod samples;
pub mod schaaf;
pub mod wave;

pub use conserved::{conserved_quantities, ConservedSet, Estimate};
pub use gradients::{gradients, GradientSet, IdentityResiduals, Quantity, StepPolicy};
pub use nonlinearity::{CustomNonlinearity, Nonlinearity};
pub use samples::{reconstruct_profile, reconstruct_profile_with, ProfileOptions, ProfileSamples};
pub use schaaf::{schaaf_check, Applicability, SchaafReport};
pub use wave::{find_turning_points, well_energy_window, TurningPoints, WaveParameters};
