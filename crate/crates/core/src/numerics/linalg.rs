//! Small determinant and Jacobian helpers.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type CMat3 = Matrix3<Complex64>;

#[inline]
pub fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

/// `{f,g}_{x,y} = f_x g_y − f_y g_x`, with gradients ordered (a, E, c).
#[inline]
pub fn jac2(f: &Vector3<f64>, g: &Vector3<f64>, x: usize, y: usize) -> f64 {
    f[x] * g[y] - f[y] * g[x]
}

/// `{f,g,h}_{a,E,c}`: determinant with rows indexed by parameter.
pub fn jac3(f: &Vector3<f64>, g: &Vector3<f64>, h: &Vector3<f64>) -> f64 {
    Matrix3::new(f[0], g[0], h[0], f[1], g[1], h[1], f[2], g[2], h[2]).determinant()
}

pub fn to_complex(m: &Matrix3<f64>) -> CMat3 {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn max_abs(m: &CMat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a 3×3 complex matrix via the complex Schur form.
pub fn eigenvalues3(m: &CMat3) -> Vec<Complex64> {
    let schur = nalgebra::linalg::Schur::new(*m);
    let (_, t) = schur.unpack();
    (0..3).map(|i| t[(i, i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_antisymmetry_and_multilinearity() {
        let f = Vector3::new(1.0, 2.0, 3.0);
        let g = Vector3::new(-1.0, 0.5, 4.0);
        let h = Vector3::new(2.0, 1.0, -1.0);
        assert_eq!(jac2(&f, &g, 0, 1), -jac2(&g, &f, 0, 1));
        assert_eq!(jac2(&f, &g, 0, 1), -jac2(&f, &g, 1, 0));
        let d = jac3(&f, &g, &h);
        assert!((d + jac3(&g, &f, &h)).abs() < 1e-12);
        // Laplace expansion along the h column.
        let lap = h[0] * jac2(&f, &g, 1, 2) - h[1] * jac2(&f, &g, 0, 2) + h[2] * jac2(&f, &g, 0, 1);
        assert!((d - lap).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_triangular_and_rotation() {
        let z = Complex64::new(0.0, 0.0);
        let m = CMat3::new(
            Complex64::new(2.0, 1.0), Complex64::new(5.0, 0.0), z,
            z, Complex64::new(-1.0, 0.0), Complex64::new(3.0, 0.0),
            z, z, Complex64::new(0.5, -0.5),
        );
        let mut ev = eigenvalues3(&m);
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((ev[2] - Complex64::new(2.0, 1.0)).norm() < 1e-12);
        let (s, c) = 0.3f64.sin_cos();
        let r = to_complex(&Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0));
        let ev = eigenvalues3(&r);
        assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }
}

