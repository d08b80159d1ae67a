//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::Scalar;

/// Singular values of `m`, sorted in decreasing order.
pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<T> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Orthonormal basis of `{x : q x = 0}` for a matrix with `q.ncols() == n`.
///
/// Singular directions with `sigma <= rel_tol * sigma_max` count as null.
/// Returns the basis vectors in order of increasing singular value.
pub fn null_space<T: Scalar>(q: &DMatrix<T>, rel_tol: T) -> Vec<DVector<T>> {
    let n = q.ncols();
    if n == 0 {
        return Vec::new();
    }
    // Pad with zero rows so the SVD returns a full right basis.
    let rows = q.nrows().max(n);
    let mut padded = DMatrix::<T>::zeros(rows, n);
    padded.view_mut((0, 0), (q.nrows(), n)).copy_from(q);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let cutoff = rel_tol * sigma_max;
    let mut null: Vec<(T, DVector<T>)> = (0..sigma.len())
        .filter(|&i| sigma[i] <= cutoff)
        .map(|i| (sigma[i], v_t.row(i).transpose()))
        .collect();
    null.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    null.into_iter().map(|(_, v)| v).collect()
}

/// Numerical rank with relative tolerance on the largest singular value.
pub fn rank<T: Scalar>(m: &DMatrix<T>, rel_tol: T) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&smax) if smax == T::zero() => 0,
        Some(&smax) => s.iter().filter(|&&x| x > rel_tol * smax).count(),
    }
}

/// Spectral norm (largest singular value).
pub fn spectral_norm<T: Scalar>(m: &DMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

pub(crate) fn f64_vec<T: Scalar>(values: &[T]) -> Vec<f64> {
    values.iter().map(|v| v.to_f64_lossy()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn null_space_of_single_row() {
        let q = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let ns = null_space(&q, 1e-10);
        assert_eq!(ns.len(), 1);
        assert_relative_eq!(
            ns[0].dot(&DVector::from_vec(vec![1.0, 1.0])),
            0.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(ns[0].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn null_space_of_empty_matrix_is_everything() {
        let q = DMatrix::<f64>::zeros(0, 3);
        assert_eq!(null_space(&q, 1e-10).len(), 3);
    }

    #[test]
    fn singular_values_descend() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 2.0]));
        assert_eq!(singular_values(&m), vec![3.0, 2.0, 1.0]);
        assert_eq!(rank(&m, 1e-10), 3);
        assert_eq!(spectral_norm(&m), 3.0);
    }
}
