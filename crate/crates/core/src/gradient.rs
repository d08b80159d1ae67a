//! Simplex gradients and the interpolating linear and quadratic models.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, SampleSet, Scalar};

fn check_values<T: Scalar>(set: &SampleSet<T>, values: &[T]) -> Result<()> {
    if values.len() != set.points().len() {
        return Err(Error::DimensionMismatch {
            expected: set.points().len(),
            found: values.len(),
        });
    }
    Ok(())
}

/// `g = U^{-T} y` with `y_j = value_j - value_ref`.
pub fn simplex_gradient<T: Scalar>(set: &SampleSet<T>, values: &[T]) -> Result<DVector<T>> {
    check_values(set, values)?;
    let f_ref = values[set.ref_index()];
    let y = DVector::from_iterator(set.dim(), set.others().map(|j| values[j] - f_ref));
    set.solve_transpose(&y)
}

/// `m(u) = c + g^T u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T: Scalar> {
    pub intercept: T,
    pub gradient: DVector<T>,
}

impl<T: Scalar> LinearModel<T> {
    pub fn eval(&self, u: &DVector<T>) -> T {
        self.intercept + self.gradient.dot(u)
    }
}

pub fn linear_model<T: Scalar>(set: &SampleSet<T>, values: &[T]) -> Result<LinearModel<T>> {
    let gradient = simplex_gradient(set, values)?;
    let intercept = values[set.ref_index()] - gradient.dot(set.reference());
    Ok(LinearModel {
        intercept,
        gradient,
    })
}

/// Quadratic interpolation model with a prescribed Hessian:
/// `m(u) = 1/2 (u - b)^T H (u - b) + f(b) + lambda^T (u - b)` around the
/// base point `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadModel<T: Scalar> {
    pub base_point: DVector<T>,
    pub base_value: T,
    pub hessian: DMatrix<T>,
    pub lambda: DVector<T>,
}

impl<T: Scalar> QuadModel<T> {
    pub fn eval(&self, u: &DVector<T>) -> T {
        let d = u - &self.base_point;
        let hd = &self.hessian * &d;
        self.base_value + self.lambda.dot(&d) + d.dot(&hd) * T::lit(0.5)
    }

    pub fn gradient(&self, u: &DVector<T>) -> DVector<T> {
        &self.hessian * (u - &self.base_point) + &self.lambda
    }

    /// Stationary point `b - H^{-1} lambda`, if `H` is invertible.
    pub fn stationary_point(&self) -> Option<DVector<T>> {
        let step = self.hessian.clone().lu().solve(&self.lambda)?;
        Some(&self.base_point - step)
    }
}

/// Fits the quadratic model with Hessian `hessian` interpolating `values`
/// at every point of `set`, based at the set's reference point.
pub fn quadratic_model<T: Scalar>(
    set: &SampleSet<T>,
    values: &[T],
    hessian: &DMatrix<T>,
) -> Result<QuadModel<T>> {
    check_values(set, values)?;
    let n = set.dim();
    if hessian.nrows() != n || hessian.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: hessian.nrows().max(hessian.ncols()),
        });
    }
    let asymmetry = (hessian - hessian.transpose()).amax();
    if asymmetry > T::lit(1e-10) {
        return Err(Error::AsymmetricHessian {
            asymmetry: asymmetry.to_f64_lossy(),
        });
    }
    let f_ref = values[set.ref_index()];
    let rhs = DVector::from_iterator(
        n,
        set.others().enumerate().map(|(col, j)| {
            let d = set.displacement().column(col);
            let q = d.dot(&(hessian * d)) * T::lit(0.5);
            values[j] - f_ref - q
        }),
    );
    let lambda = set.solve_transpose(&rhs)?;
    Ok(QuadModel {
        base_point: set.reference().clone(),
        base_value: f_ref,
        hessian: hessian.clone(),
        lambda,
    })
}

/// Simplex-gradient error, optionally split into truncation and noise parts.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientError<T: Scalar> {
    pub total: DVector<T>,
    pub truncation: Option<DVector<T>>,
    pub noise: Option<DVector<T>>,
}

impl<T: Scalar> GradientError<T> {
    pub fn norm(&self) -> T {
        self.total.norm()
    }
}

/// `g - true_grad`.
pub fn gradient_error<T: Scalar>(
    g: &DVector<T>,
    true_grad: &DVector<T>,
) -> Result<GradientError<T>> {
    if g.len() != true_grad.len() {
        return Err(Error::DimensionMismatch {
            expected: true_grad.len(),
            found: g.len(),
        });
    }
    Ok(GradientError {
        total: g - true_grad,
        truncation: None,
        noise: None,
    })
}

/// Splits the error of the gradient computed from noisy values into the
/// part due to curvature (exact values) and the part due to the noise
/// realization.
pub fn decompose_gradient_error<T: Scalar>(
    set: &SampleSet<T>,
    exact_values: &[T],
    noise: &[T],
    true_grad: &DVector<T>,
) -> Result<GradientError<T>> {
    check_values(set, noise)?;
    let g_t = simplex_gradient(set, exact_values)?;
    let truncation = gradient_error(&g_t, true_grad)?.total;
    let noise_err = simplex_gradient(set, noise)?;
    Ok(GradientError {
        total: &truncation + &noise_err,
        truncation: Some(truncation),
        noise: Some(noise_err),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    fn ex1_f(u: &DVector<f64>) -> f64 {
        2.0 * u[0] * u[0] - u[0] * u[1] + u[1] * u[1] - 2.0 * u[0] + 1.4f64.powf(2.0 * u[0] + u[1])
    }

    fn ex1_grad(u: &DVector<f64>) -> DVector<f64> {
        let e = 1.4f64.powf(2.0 * u[0] + u[1]) * 1.4f64.ln();
        v(&[4.0 * u[0] - u[1] - 2.0 + 2.0 * e, -u[0] + 2.0 * u[1] + e])
    }

    fn ex1() -> SampleSet<f64> {
        SampleSet::new(vec![v(&[0.5, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 0.0])], 0).unwrap()
    }

    #[test]
    fn example1_gradient_and_error() {
        let set = ex1();
        let values: Vec<f64> = set.points().iter().map(ex1_f).collect();
        assert_relative_eq!(values[0], 0.9, epsilon = 1e-12);
        assert_relative_eq!(values[1], 2.4, epsilon = 1e-12);
        assert_relative_eq!(values[2], 1.96, epsilon = 1e-12);
        let g = simplex_gradient(&set, &values).unwrap();
        assert_relative_eq!(g, v(&[2.12, 2.56]), epsilon = 1e-10);
        let err = gradient_error(&g, &ex1_grad(&set.points()[0])).unwrap();
        assert!((err.norm() - 2.8443).abs() < 5e-5);
        let err1 = gradient_error(&g, &ex1_grad(&set.points()[1])).unwrap();
        assert!((err1.norm() - 4.1788).abs() < 5e-5);
    }

    #[test]
    fn example2_gradient_vanishes() {
        let set = SampleSet::new(
            vec![v(&[0.0, 2.0 / 3.0]), v(&[-1.0, 0.5]), v(&[1.0, 0.5])],
            0,
        )
        .unwrap();
        let g = simplex_gradient(&set, &[4.0, 4.0, 4.0]).unwrap();
        assert_relative_eq!(g.norm(), 0.0, epsilon = 1e-14);
        let err = gradient_error(&g, &v(&[-2.0, 6.0])).unwrap();
        assert_relative_eq!(err.norm(), 40f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn linear_model_interpolates() {
        let set = ex1();
        let values: Vec<f64> = set.points().iter().map(ex1_f).collect();
        let m = linear_model(&set, &values).unwrap();
        assert_relative_eq!(m.eval(&set.points()[2]), 1.96, epsilon = 1e-12);
        let m1 = linear_model(&set.rebase(1).unwrap(), &values).unwrap();
        assert_relative_eq!(m.gradient, m1.gradient, epsilon = 1e-10);
        assert_relative_eq!(m.intercept, m1.intercept, epsilon = 1e-10);

        let c = linear_model(&set, &[3.0, 3.0, 3.0]).unwrap();
        assert_relative_eq!(c.gradient.norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(c.intercept, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_model_properties() {
        let set = ex1();
        let values: Vec<f64> = set.points().iter().map(ex1_f).collect();
        let zero = DMatrix::zeros(2, 2);
        let m0 = quadratic_model(&set, &values, &zero).unwrap();
        assert_relative_eq!(
            m0.lambda,
            simplex_gradient(&set, &values).unwrap(),
            epsilon = 1e-12
        );

        let h = DMatrix::identity(2, 2) * 5.3;
        let m = quadratic_model(&set, &values, &h).unwrap();
        for (p, &f) in set.points().iter().zip(&values) {
            assert!((m.eval(p) - f).abs() <= 1e-9 * (1.0 + f.abs()));
        }
        assert_eq!(m.eval(&set.points()[0]), values[0]);
    }

    #[test]
    fn quadratic_model_reproduces_quadratics() {
        // f(u) = 1/2 u^T A u + b^T u
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let b = v(&[0.5, -1.0]);
        let f = |u: &DVector<f64>| 0.5 * u.dot(&(&a * u)) + b.dot(u);
        let set = SampleSet::new(vec![v(&[0.3, 0.1]), v(&[1.0, 0.2]), v(&[-0.4, 0.9])], 0).unwrap();
        let values: Vec<f64> = set.points().iter().map(f).collect();
        let m = quadratic_model(&set, &values, &a).unwrap();
        let grad = &a * &set.points()[0] + &b;
        assert_relative_eq!(m.lambda, grad, epsilon = 1e-10);
        let probe = v(&[2.0, -3.0]);
        assert_relative_eq!(m.eval(&probe), f(&probe), epsilon = 1e-9);
    }

    #[test]
    fn asymmetric_hessian_rejected() {
        let set = ex1();
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            quadratic_model(&set, &[0.0, 0.0, 0.0], &h),
            Err(Error::AsymmetricHessian { .. })
        ));
    }

    #[test]
    fn error_decomposition_adds_up() {
        let set = ex1();
        let values: Vec<f64> = set.points().iter().map(ex1_f).collect();
        let noise = [0.01, -0.02, 0.03];
        let e =
            decompose_gradient_error(&set, &values, &noise, &ex1_grad(&set.points()[0])).unwrap();
        let sum = e.truncation.as_ref().unwrap() + e.noise.as_ref().unwrap();
        assert_relative_eq!(e.total, sum, epsilon = 1e-12);
        let noisy: Vec<f64> = values.iter().zip(&noise).map(|(a, b)| a + b).collect();
        let direct = simplex_gradient(&set, &noisy).unwrap() - ex1_grad(&set.points()[0]);
        assert_relative_eq!(e.total, direct, epsilon = 1e-12);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(gradient_error(&v(&[1.0]), &v(&[1.0, 2.0])).is_err());
        assert!(simplex_gradient(&ex1(), &[1.0, 2.0]).is_err());
        let e = gradient_error(&v(&[1.0, 2.0]), &v(&[1.0, 2.0])).unwrap();
        assert_eq!(e.norm(), 0.0);
    }
}
