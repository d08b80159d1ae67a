//! Bounds on the simplex-gradient error caused by curvature (truncation).
//!
//! All bounds take the gradient Lipschitz constant `L` and are evaluated at
//! the sample set's current reference point; sweep vertices with
//! [`SampleSet::rebase`].

use nalgebra::DVector;
use serde::Serialize;

use crate::geometry::{circumsphere, nearest_point_in_hull, Circumsphere};
use crate::{Result, SampleSet, Scalar};

fn sqrt_n<T: Scalar>(set: &SampleSet<T>) -> T {
    T::from_usize(set.dim())
        .expect("dimension fits scalar")
        .sqrt()
}

/// Delta bound `|U_hat^{-1}| sqrt(n) (L/2) Delta`.
pub fn delta_bound<T: Scalar>(set: &SampleSet<T>, lipschitz: T) -> T {
    set.scaled_inv_norm() * sqrt_n(set) * lipschitz * T::lit(0.5) * set.delta()
}

/// Delta bound made valid on the whole ball `B(u_ref, Delta)`.
pub fn delta_bound_uniform<T: Scalar>(set: &SampleSet<T>, lipschitz: T) -> T {
    delta_bound(set, lipschitz) + lipschitz * set.delta()
}

/// Delta bound at an arbitrary point `u`.
pub fn delta_bound_pointwise<T: Scalar>(set: &SampleSet<T>, lipschitz: T, u: &DVector<T>) -> T {
    delta_bound(set, lipschitz) + lipschitz * (u - set.reference()).norm()
}

/// Circumsphere of the sample set.
pub fn sample_circumsphere<T: Scalar>(set: &SampleSet<T>) -> Result<Circumsphere<T>> {
    circumsphere(&set.reference_first())
}

/// Radial bound `L r(U)` with `r` the circumradius.
///
/// A certified bound on the gradient error when the columns of `U` are
/// orthogonal (see [`has_orthogonal_columns`]); otherwise it bounds only the
/// error projections onto the column directions.
pub fn radial_bound<T: Scalar>(set: &SampleSet<T>, lipschitz: T) -> Result<T> {
    Ok(lipschitz * sample_circumsphere(set)?.radius)
}

/// Pointwise approximate bound `T_r + L |u - u_ref|`.
pub fn radial_bound_pointwise<T: Scalar>(
    set: &SampleSet<T>,
    lipschitz: T,
    u: &DVector<T>,
) -> Result<T> {
    Ok(radial_bound(set, lipschitz)? + lipschitz * (u - set.reference()).norm())
}

/// True when `U^T U` is diagonal up to relative off-diagonal entries of 1e-8.
pub fn has_orthogonal_columns<T: Scalar>(set: &SampleSet<T>) -> bool {
    let u = set.displacement();
    let gram = u.transpose() * u;
    let n = set.dim();
    let tol = T::lit(1e-8);
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = (gram[(i, i)] * gram[(j, j)]).sqrt();
            if gram[(i, j)].abs() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// Square column bound `(L/2) |[|u_j - u_ref|^2]_j| |U^{-1}|`.
pub fn square_column_bound<T: Scalar>(set: &SampleSet<T>, lipschitz: T) -> T {
    lipschitz * T::lit(0.5) * set.squared_column_norms().norm() * set.inv_norm()
}

/// Minimum over all reference choices of the radial and square column
/// bounds, `(T_rv, T_cv)`.
pub fn min_vertex_bounds<T: Scalar>(set: &SampleSet<T>, lipschitz: T) -> Result<(T, T)> {
    let mut t_rv: Option<T> = None;
    let mut t_cv: Option<T> = None;
    for j in 0..set.points().len() {
        let rebased = set.rebase(j)?;
        let r = radial_bound(&rebased, lipschitz)?;
        let c = square_column_bound(&rebased, lipschitz);
        t_rv = Some(t_rv.map_or(r, |x| x.min(r)));
        t_cv = Some(t_cv.map_or(c, |x| x.min(c)));
    }
    Ok((t_rv.expect("nonempty"), t_cv.expect("nonempty")))
}

/// Extended radial bound `L |u_c - u|`.
pub fn extended_radial_bound<T: Scalar>(
    set: &SampleSet<T>,
    lipschitz: T,
    u: &DVector<T>,
) -> Result<T> {
    Ok(lipschitz * (&sample_circumsphere(set)?.center - u).norm())
}

/// Simplex bound and the hull point where it is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexBound<T: Scalar> {
    pub value: T,
    /// Point of `conv(U)` nearest to the circumcenter.
    pub witness: DVector<T>,
    pub circumcenter: DVector<T>,
}

/// Minimum of the extended radial bound over the convex hull of the set.
pub fn simplex_bound<T: Scalar>(set: &SampleSet<T>, lipschitz: T) -> Result<SimplexBound<T>> {
    let sphere = sample_circumsphere(set)?;
    let proj = nearest_point_in_hull(&sphere.center, set.points());
    Ok(SimplexBound {
        value: lipschitz * proj.distance,
        witness: proj.point,
        circumcenter: sphere.center,
    })
}

/// Every truncation bound for one sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub t_delta: f64,
    pub t_column: f64,
    pub t_radial: f64,
    pub t_min_vertex_radial: f64,
    pub t_min_vertex_column: f64,
    pub t_simplex: f64,
    pub lipschitz: f64,
    /// Whether `t_radial` is a certified bound for this set.
    pub orthogonal_columns: bool,
}

pub fn truncation_report<T: Scalar>(set: &SampleSet<T>, lipschitz: T) -> Result<TruncationReport> {
    let (t_rv, t_cv) = min_vertex_bounds(set, lipschitz)?;
    Ok(TruncationReport {
        t_delta: delta_bound(set, lipschitz).to_f64_lossy(),
        t_column: square_column_bound(set, lipschitz).to_f64_lossy(),
        t_radial: radial_bound(set, lipschitz)?.to_f64_lossy(),
        t_min_vertex_radial: t_rv.to_f64_lossy(),
        t_min_vertex_column: t_cv.to_f64_lossy(),
        t_simplex: simplex_bound(set, lipschitz)?.value.to_f64_lossy(),
        lipschitz: lipschitz.to_f64_lossy(),
        orthogonal_columns: has_orthogonal_columns(set),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    fn ex1() -> SampleSet<f64> {
        SampleSet::new(vec![v(&[0.5, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 0.0])], 0).unwrap()
    }

    fn ex2() -> SampleSet<f64> {
        SampleSet::new(
            vec![v(&[0.0, 2.0 / 3.0]), v(&[-1.0, 0.5]), v(&[1.0, 0.5])],
            0,
        )
        .unwrap()
    }

    #[test]
    fn example1_at_u0() {
        let s = ex1();
        assert!((delta_bound(&s, 5.3) - 10.72).abs() < 5e-3);
        assert!((square_column_bound(&s, 5.3) - 7.73).abs() < 5e-3);
        assert!((radial_bound(&s, 5.3).unwrap() - 4.19).abs() < 5e-3);
        assert!(!has_orthogonal_columns(&s));
    }

    #[test]
    fn example1_uniform_and_pointwise() {
        let s = ex1();
        let td = delta_bound(&s, 5.3);
        assert_relative_eq!(
            delta_bound_uniform(&s, 5.3),
            td + 5.3 * 1.25f64.sqrt(),
            epsilon = 1e-12
        );
        assert!((delta_bound_uniform(&s, 5.3) - 16.646).abs() < 1e-3);
        assert_eq!(delta_bound_pointwise(&s, 5.3, &v(&[0.5, 0.0])), td);
        let u = v(&[0.6, 0.3]);
        assert!(delta_bound_pointwise(&s, 5.3, &u) <= delta_bound_uniform(&s, 5.3));
        assert_relative_eq!(
            radial_bound_pointwise(&s, 5.3, s.reference()).unwrap(),
            radial_bound(&s, 5.3).unwrap()
        );
    }

    #[test]
    fn example1_min_vertex() {
        let (t_rv, t_cv) = min_vertex_bounds(&ex1(), 5.3).unwrap();
        assert!((t_rv - 4.19).abs() < 5e-3);
        assert!((t_cv - 7.73).abs() < 5e-3);
    }

    #[test]
    fn example2_values() {
        let s = ex2();
        assert!((radial_bound(&s, 2.0).unwrap() - 6.1667).abs() < 5e-5);
        let s1 = s.rebase(1).unwrap();
        assert!((square_column_bound(&s1, 2.0) - 27.72).abs() < 5e-3);
        let (_, t_cv) = min_vertex_bounds(&s, 2.0).unwrap();
        assert!((t_cv - 6.1667).abs() < 5e-5);
    }

    #[test]
    fn example3_closed_forms() {
        let l = 2.0;
        let n = 5;
        let mut pts = vec![DVector::zeros(n)];
        for j in 0..n {
            let mut p = DVector::zeros(n);
            p[j] = if j == 0 { 4.0 } else { 1.0 };
            pts.push(p);
        }
        let s = SampleSet::new(pts, 0).unwrap();
        assert_relative_eq!(delta_bound(&s, l), 16.0 * 5f64.sqrt(), epsilon = 1e-9);
        assert!((delta_bound(&s, l) - 35.777).abs() < 1e-3);
        assert_relative_eq!(square_column_bound(&s, l), 260f64.sqrt(), epsilon = 1e-9);
        assert!(has_orthogonal_columns(&s));
    }

    #[test]
    fn ffd_bounds_coincide() {
        let s = SampleSet::ffd(&v(&[0.3, -1.0, 2.0]), 0.25).unwrap();
        let l = 1.7;
        let expected = l * 3f64.sqrt() * 0.25 / 2.0;
        assert_relative_eq!(delta_bound(&s, l), expected, epsilon = 1e-12);
        assert_relative_eq!(square_column_bound(&s, l), expected, epsilon = 1e-12);
        assert_relative_eq!(radial_bound(&s, l).unwrap(), expected, epsilon = 1e-12);
        let (t_rv, t_cv) = min_vertex_bounds(&s, l).unwrap();
        assert_relative_eq!(t_rv, expected, epsilon = 1e-12);
        assert_relative_eq!(t_cv, expected, epsilon = 1e-12);
    }

    #[test]
    fn extended_radial() {
        let s = ex1();
        let c = sample_circumsphere(&s).unwrap().center;
        assert_relative_eq!(
            extended_radial_bound(&s, 5.3, &c).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        for p in s.points() {
            assert!((extended_radial_bound(&s, 5.3, p).unwrap() - 4.19).abs() < 5e-3);
        }
        // exp(u) on [1, 2]
        let one_d = SampleSet::new(vec![v(&[1.0]), v(&[2.0])], 0).unwrap();
        let l = 2.5f64.exp();
        assert_relative_eq!(
            extended_radial_bound(&one_d, l, &v(&[1.0])).unwrap(),
            l * 0.5,
            epsilon = 1e-12
        );
        assert!((l * 0.5 - 6.0912).abs() < 1e-4);
    }

    #[test]
    fn simplex_bound_cases() {
        let s = ex1();
        let sb = simplex_bound(&s, 5.3).unwrap();
        assert_relative_eq!(sb.witness, v(&[0.5, 0.5]), epsilon = 1e-12);
        assert_relative_eq!(sb.value, 5.3 * 0.125f64.sqrt(), epsilon = 1e-12);
        assert!((sb.value - 1.874).abs() < 1e-3);

        let acute =
            SampleSet::new(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.5, 0.8])], 0).unwrap();
        assert_eq!(simplex_bound(&acute, 3.0).unwrap().value, 0.0);

        let needle =
            SampleSet::new(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.5, 1e-3])], 0).unwrap();
        assert!(simplex_bound(&needle, 1.0).unwrap().value <= radial_bound(&needle, 1.0).unwrap());
    }

    #[test]
    fn report_is_consistent() {
        let r = truncation_report(&ex1(), 5.3).unwrap();
        assert!(r.t_column <= r.t_delta);
        assert!(r.t_simplex <= r.t_radial);
        assert!(r.t_min_vertex_column <= r.t_column);
        assert!(!r.orthogonal_columns);
    }
}
