//! Spectrum near the origin: normal-form tangents, traced band curves,
//! real-axis eigenvalues, a Hill's-method oracle and the generalized null
//! basis of the linearization.

mod bands;
mod hill;
mod normal_form;
mod null_basis;
mod real_axis;

pub use bands::{kappa_grid, real_part_slope, trace_bands, trace_bands_at, BandPoint, BandTrace, EvansEvaluator};
pub use hill::{hill_matrix, hill_spectrum, HillSpectrum, CONVERGENCE_TOL as HILL_CONVERGENCE_TOL, DEFAULT_MODES};
pub use normal_form::{normal_form_roots, NormalFormRoots};
pub use null_basis::{apply_operator, null_basis, ChainPartner, NullBasis};
pub use real_axis::{default_mu_max, real_axis_scan, RealAxisEigenvalues, DEFAULT_NODES as REAL_SCAN_NODES};
