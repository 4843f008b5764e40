//! Roots of the projective cubic `1 − (y²/2)·tr2 + (y³/3)·tr3 = 0`, which
//! give the tangent directions `μ ≈ −i·y·κ` of the three bands at the origin.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indices::{index_scale, StabilityIndices};
use crate::monodromy::ser_complex;
use crate::numerics::linalg::eigenvalues3;

/// Imaginary parts below this fraction of |y| count as real.
const REAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct NormalFormRoots {
    /// Real roots first in increasing order, then the complex pair with
    /// positive imaginary part first.
    #[serde(serialize_with = "ser_roots")]
    pub y: [Complex64; 3],
    pub all_real: bool,
    /// `all_real` agrees with `Δ > 0`.
    pub delta_consistent: bool,
    pub max_residual: f64,
    pub tr2: f64,
    pub tr3: f64,
}

fn ser_roots<S: serde::Serializer>(y: &[Complex64; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct C<'a>(&'a Complex64);
    impl serde::Serialize for C<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_complex(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(3))?;
    for z in y {
        seq.serialize_element(&C(z))?;
    }
    seq.end()
}

fn cubic(tr2: f64, tr3: f64, y: Complex64) -> (Complex64, Complex64) {
    let v = 1.0 - y * y * (tr2 / 2.0) + y * y * y * (tr3 / 3.0);
    let d = -y * tr2 + y * y * tr3;
    (v, d)
}

impl NormalFormRoots {
    /// Predicted band point `−i·y_j·κ`.
    pub fn predict(&self, j: usize, kappa: f64) -> Complex64 {
        Complex64::new(0.0, -kappa) * self.y[j]
    }

    pub fn residual(&self, y: Complex64) -> f64 {
        cubic(self.tr2, self.tr3, y).0.norm()
    }
}

pub fn normal_form_roots(idx: &StabilityIndices) -> Result<NormalFormRoots> {
    solve_cubic(idx.tr2, idx.tr3, idx.delta)
}

pub(crate) fn solve_cubic(tr2: f64, tr3: f64, delta: f64) -> Result<NormalFormRoots> {
    if !(tr3.abs() >= 1e-6 * index_scale(tr2, tr3).powi(3)) {
        return Err(Error::DegenerateCubic(tr3));
    }
    // Monic form y³ + b y² + d = 0.
    let b = -1.5 * tr2 / tr3;
    let d = 3.0 / tr3;
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let companion = nalgebra::Matrix3::new(-b * one, z, -d * one, one, z, z, z, one, z);
    let mut roots = eigenvalues3(&companion);
    for y in roots.iter_mut() {
        for _ in 0..8 {
            let (v, dv) = cubic(tr2, tr3, *y);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            *y -= step;
            if step.norm() <= 1e-16 * y.norm() {
                break;
            }
        }
    }
    for y in roots.iter_mut() {
        if y.im.abs() <= REAL_TOL * y.norm() {
            y.im = 0.0;
        }
    }
    let all_real = roots.iter().all(|y| y.im == 0.0);
    roots.sort_by(|p, q| {
        (p.im != 0.0).cmp(&(q.im != 0.0)).then(p.re.total_cmp(&q.re)).then(q.im.total_cmp(&p.im))
    });
    if !all_real && roots[1].im < 0.0 {
        roots.swap(1, 2);
    }
    let max_residual = roots.iter().map(|&y| cubic(tr2, tr3, y).0.norm()).fold(0.0, f64::max);
    Ok(NormalFormRoots {
        y: [roots[0], roots[1], roots[2]],
        all_real,
        delta_consistent: all_real == (delta > 0.0),
        max_residual,
        tr2,
        tr3,
    })
}
