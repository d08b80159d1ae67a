//! Test functions used by the reproduction commands and named in run
//! configuration files.

use nalgebra::{DMatrix, DVector};

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_row_slice(x)
}

/// `2u1^2 - u1 u2 + u2^2 - c u1 + 1.4^(2u1 + u2)`; `c = 2` for the bound
/// tables and `c = 3` for the optimization case study.
fn exp_quadratic(u: &DVector<f64>, c: f64) -> f64 {
    2.0 * u[0] * u[0] - u[0] * u[1] + u[1] * u[1] - c * u[0] + 1.4f64.powf(2.0 * u[0] + u[1])
}

fn exp_quadratic_grad(u: &DVector<f64>, c: f64) -> DVector<f64> {
    let e = 1.4f64.powf(2.0 * u[0] + u[1]) * 1.4f64.ln();
    v(&[4.0 * u[0] - u[1] - c + 2.0 * e, -u[0] + 2.0 * u[1] + e])
}

fn exp_quadratic_hessian(u: &DVector<f64>) -> DMatrix<f64> {
    let e = 1.4f64.powf(2.0 * u[0] + u[1]) * 1.4f64.ln().powi(2);
    DMatrix::from_row_slice(
        2,
        2,
        &[4.0 + 4.0 * e, -1.0 + 2.0 * e, -1.0 + 2.0 * e, 2.0 + e],
    )
}

pub mod table1 {
    use super::*;

    pub const LIPSCHITZ: f64 = 5.3;

    pub fn points() -> Vec<DVector<f64>> {
        vec![v(&[0.5, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 0.0])]
    }

    pub fn f(u: &DVector<f64>) -> f64 {
        exp_quadratic(u, 2.0)
    }

    pub fn grad(u: &DVector<f64>) -> DVector<f64> {
        exp_quadratic_grad(u, 2.0)
    }
}

pub mod table2 {
    use super::*;

    pub const LIPSCHITZ: f64 = 2.0;
    pub const THETA: f64 = 2.0 / 3.0;

    pub fn points(theta: f64) -> Vec<DVector<f64>> {
        vec![v(&[0.0, theta]), v(&[-1.0, 0.5]), v(&[1.0, 0.5])]
    }

    pub fn f(u: &DVector<f64>) -> f64 {
        u[0] * u[0] + 6.0 * u[1]
    }

    pub fn grad(u: &DVector<f64>) -> DVector<f64> {
        v(&[2.0 * u[0], 6.0])
    }
}

/// `u_0 = 0`, `u_1 = 4 e_1`, `u_j = e_j`.
pub mod ex3 {
    use super::*;

    pub fn points(n_u: usize) -> Vec<DVector<f64>> {
        let mut pts = vec![DVector::zeros(n_u)];
        for j in 0..n_u {
            let mut p = DVector::zeros(n_u);
            p[j] = if j == 0 { 4.0 } else { 1.0 };
            pts.push(p);
        }
        pts
    }

    pub fn t_delta(n_u: usize, l: f64) -> f64 {
        l / 2.0 * 16.0 * (n_u as f64).sqrt()
    }

    pub fn t_radial(n_u: usize, l: f64) -> f64 {
        l / 2.0 * (16.0 + n_u as f64 - 1.0).sqrt()
    }

    pub fn t_column(n_u: usize, l: f64) -> f64 {
        l / 2.0 * (256.0 + n_u as f64 - 1.0).sqrt()
    }
}

/// Nonconvex quadratic in five variables with constant Hessian.
pub mod ex5 {
    use super::*;

    pub const LIPSCHITZ: f64 = 4.3014;
    pub const INV_NORM_CAP: f64 = 8.0;

    pub fn hessian() -> DMatrix<f64> {
        DMatrix::from_row_slice(
            5,
            5,
            &[
                2.0, 0.0, 1.0, 0.0, 0.0, //
                0.0, -2.0, 0.0, -1.0, 0.0, //
                1.0, 0.0, 2.0, -2.0, 0.0, //
                0.0, -1.0, -2.0, 2.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, -2.0,
            ],
        )
    }

    pub fn linear() -> DVector<f64> {
        v(&[0.0, 5.0, 0.0, 0.0, -6.0])
    }

    pub fn f(u: &DVector<f64>) -> f64 {
        0.5 * u.dot(&(hessian() * u)) + linear().dot(u)
    }

    pub fn grad(u: &DVector<f64>) -> DVector<f64> {
        hessian() * u + linear()
    }
}

/// Two-variable case study.
pub mod case1 {
    use super::*;

    pub const LIPSCHITZ: f64 = 5.3;
    pub const SIGMA: f64 = 0.1;
    pub const DELTA: f64 = 0.3;

    pub fn start_points() -> [DVector<f64>; 2] {
        [v(&[-2.0, -2.5]), v(&[-2.0, 0.5])]
    }

    pub fn f(u: &DVector<f64>) -> f64 {
        exp_quadratic(u, 3.0)
    }

    pub fn grad(u: &DVector<f64>) -> DVector<f64> {
        exp_quadratic_grad(u, 3.0)
    }

    /// Unique minimizer, by Newton's method from the origin.
    pub fn optimum() -> DVector<f64> {
        let mut u = DVector::zeros(2);
        for _ in 0..50 {
            let g = grad(&u);
            if g.norm() < 1e-15 {
                break;
            }
            let step = exp_quadratic_hessian(&u)
                .lu()
                .solve(&g)
                .expect("strictly convex near the optimum");
            u -= step;
        }
        u
    }
}

/// `u^T u` in three variables.
pub mod case2 {
    use super::*;

    pub const LIPSCHITZ: f64 = 2.5;
    pub const SIGMA: f64 = 0.05;
    pub const DELTA: f64 = 0.15;

    pub fn start_point() -> DVector<f64> {
        v(&[2.0, 5.0, 3.0])
    }

    pub fn f(u: &DVector<f64>) -> f64 {
        u.norm_squared()
    }
}

pub fn sphere(u: &DVector<f64>) -> f64 {
    u.norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;

    #[test]
    fn table1_values() {
        let f: Vec<f64> = table1::points().iter().map(table1::f).collect();
        assert!((f[0] - 0.9).abs() < 1e-12 && (f[1] - 2.4).abs() < 1e-12);
    }

    #[test]
    fn ex5_lipschitz() {
        assert!((spectral_norm(&ex5::hessian()) - ex5::LIPSCHITZ).abs() < 1e-4);
        let u = v(&[0.1, -0.3, 0.5, 0.7, -0.2]);
        let h = 1e-6;
        for i in 0..5 {
            let mut e = DVector::zeros(5);
            e[i] = h;
            let fd = (ex5::f(&(&u + &e)) - ex5::f(&(&u - &e))) / (2.0 * h);
            assert!((fd - ex5::grad(&u)[i]).abs() < 1e-6);
        }
        // spot-check against the expanded polynomial
        let (a, b, c, d, e) = (u[0], u[1], u[2], u[3], u[4]);
        let poly = a * a - b * b + (c - d) * (c - d) - e * e + a * c - b * d - 6.0 * e + 5.0 * b;
        assert!((ex5::f(&u) - poly).abs() < 1e-12);
    }

    #[test]
    fn case1_optimum_is_stationary() {
        let u = case1::optimum();
        assert!(case1::grad(&u).norm() < 1e-12);
        assert!((u[0] - 0.51514).abs() < 1e-5 && (u[1] - 0.01817).abs() < 1e-5);
    }
}
