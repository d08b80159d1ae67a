//! Interpolation sample sets and the quantities cached on them.

use nalgebra::{DMatrix, DVector};

use crate::geometry::poised_from_singular_values;
use crate::linalg::{f64_vec, singular_values};
use crate::{Error, Result, Scalar};

/// `n_u + 1` points in `R^{n_u}` with a designated reference point.
///
/// Construction fails unless the displacement matrix
/// `U = [u_j - u_ref]_{j != ref}` is nonsingular. Immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T: Scalar> {
    points: Vec<DVector<T>>,
    ref_index: usize,
    displacement: DMatrix<T>,
    singular_values: Vec<T>,
    delta: T,
}

impl<T: Scalar> SampleSet<T> {
    /// Builds and validates a sample set.
    pub fn new(points: Vec<DVector<T>>, ref_index: usize) -> Result<Self> {
        let np = points.len();
        if np < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: np,
            });
        }
        let n = np - 1;
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        if ref_index >= np {
            return Err(Error::InvalidIndex {
                index: ref_index,
                len: np,
            });
        }
        if points.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::Parse("sample points must be finite".into()));
        }
        let reference = &points[ref_index];
        let mut displacement = DMatrix::<T>::zeros(n, n);
        let mut col = 0;
        let mut delta = T::zero();
        for (j, p) in points.iter().enumerate() {
            if j == ref_index {
                continue;
            }
            let d = p - reference;
            delta = delta.max(d.norm());
            displacement.set_column(col, &d);
            col += 1;
        }
        let singular_values = singular_values(&displacement);
        if !poised_from_singular_values(&singular_values) {
            return Err(Error::UnpoisedSet {
                singular_values: f64_vec(&singular_values),
            });
        }
        Ok(Self {
            points,
            ref_index,
            displacement,
            singular_values,
            delta,
        })
    }

    /// Forward-finite-difference arrangement `{u_0, u_0 + h e_1, ..., u_0 + h e_n}`
    /// with `u_0` as reference.
    pub fn ffd(origin: &DVector<T>, h: T) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::NonpositiveStep(h.to_f64_lossy()));
        }
        let n = origin.len();
        let mut points = Vec::with_capacity(n + 1);
        points.push(origin.clone());
        for j in 0..n {
            let mut p = origin.clone();
            p[j] += h;
            points.push(p);
        }
        Self::new(points, 0)
    }

    /// Same points, new reference.
    pub fn rebase(&self, new_ref: usize) -> Result<Self> {
        if new_ref == self.ref_index {
            return Ok(self.clone());
        }
        Self::new(self.points.clone(), new_ref)
    }

    pub fn dim(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[DVector<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<DVector<T>> {
        self.points
    }

    pub fn ref_index(&self) -> usize {
        self.ref_index
    }

    pub fn reference(&self) -> &DVector<T> {
        &self.points[self.ref_index]
    }

    /// Indices of the non-reference points, in column order of `U`.
    pub fn others(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.points.len()).filter(move |&j| j != self.ref_index)
    }

    /// Points ordered with the reference first, as expected by the
    /// geometry routines.
    pub fn reference_first(&self) -> Vec<DVector<T>> {
        std::iter::once(self.ref_index)
            .chain(self.others())
            .map(|j| self.points[j].clone())
            .collect()
    }

    /// Displacement matrix `U`.
    pub fn displacement(&self) -> &DMatrix<T> {
        &self.displacement
    }

    /// Singular values of `U`, largest first.
    pub fn singular_values(&self) -> &[T] {
        &self.singular_values
    }

    /// `Delta = max_j |u_j - u_ref|`.
    pub fn delta(&self) -> T {
        self.delta
    }

    /// Spectral norm of `U^{-1}`.
    pub fn inv_norm(&self) -> T {
        T::one() / *self.singular_values.last().expect("nonempty")
    }

    /// Spectral norm of `(U / Delta)^{-1}`.
    pub fn scaled_inv_norm(&self) -> T {
        self.delta * self.inv_norm()
    }

    /// Condition number `sigma_max / sigma_min` of `U`.
    pub fn condition(&self) -> T {
        self.singular_values[0] / *self.singular_values.last().expect("nonempty")
    }

    /// Squared column norms `[|u_j - u_ref|^2]_j`.
    pub fn squared_column_norms(&self) -> DVector<T> {
        DVector::from_fn(self.dim(), |j, _| {
            self.displacement.column(j).norm_squared()
        })
    }

    /// `U / Delta`.
    pub fn scaled_displacement(&self) -> DMatrix<T> {
        &self.displacement / self.delta
    }

    /// Solves `U^T x = rhs`.
    pub(crate) fn solve_transpose(&self, rhs: &DVector<T>) -> Result<DVector<T>> {
        self.displacement
            .transpose()
            .lu()
            .solve(rhs)
            .ok_or_else(|| Error::UnpoisedSet {
                singular_values: f64_vec(&self.singular_values),
            })
    }
}

/// Per-coordinate box used to bring raw inputs to a common scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSpec<T: Scalar> {
    pub lower: DVector<T>,
    pub upper: DVector<T>,
}

impl<T: Scalar> ScalingSpec<T> {
    pub fn new(lower: DVector<T>, upper: DVector<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if let Some(coord) = (0..lower.len()).find(|&i| !(upper[i] > lower[i])) {
            return Err(Error::DegenerateRange { coord });
        }
        Ok(Self { lower, upper })
    }

    /// `(raw_i - lower_i) / (upper_i - lower_i)`.
    pub fn scale_point(&self, raw: &DVector<T>) -> Result<DVector<T>> {
        if raw.len() != self.lower.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lower.len(),
                found: raw.len(),
            });
        }
        let mut out = raw.clone();
        for i in 0..raw.len() {
            let span = self.upper[i] - self.lower[i];
            if !(span > T::zero()) {
                return Err(Error::DegenerateRange { coord: i });
            }
            out[i] = (raw[i] - self.lower[i]) / span;
        }
        Ok(out)
    }

    /// Inverse of [`ScalingSpec::scale_point`].
    pub fn unscale_point(&self, scaled: &DVector<T>) -> DVector<T> {
        DVector::from_fn(scaled.len(), |i, _| {
            self.lower[i] + scaled[i] * (self.upper[i] - self.lower[i])
        })
    }
}
