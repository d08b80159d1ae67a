//! Bounds on the simplex-gradient error caused by bounded measurement noise
//! `|v_j| <= delta`.

use nalgebra::{DMatrix, DVector};

use crate::geometry::{min_partition_distance, ComplementPartition};
use crate::{Error, Result, SampleSet, Scalar};

/// Largest `n_u` accepted by [`worst_case_noise_error`].
pub const WORST_CASE_MAX_DIM: usize = 12;

/// Conditioning and l-min noise bounds of one sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport<T: Scalar> {
    pub n_conditioning: T,
    pub n_lmin: T,
    pub l_min: T,
    pub argmin_partition: ComplementPartition,
    pub delta_noise: T,
}

/// One noise value per sample point, each bounded by `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization<T: Scalar> {
    values: Vec<T>,
}

impl<T: Scalar> NoiseRealization<T> {
    pub fn new(values: Vec<T>, delta: T) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| v.abs() > delta) {
            return Err(Error::InvalidConfig(format!(
                "noise value {} exceeds bound {}",
                v.to_f64_lossy(),
                delta.to_f64_lossy()
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// `N_c = 2 delta sqrt(n_u) |U^{-1}|`.
pub fn conditioning_bound<T: Scalar>(set: &SampleSet<T>, delta: T) -> T {
    let n = T::from_usize(set.dim()).expect("dimension fits scalar");
    T::lit(2.0) * delta * n.sqrt() * set.inv_norm()
}

/// `N_l = 2 delta / l_min`, the least upper bound on the noise error.
pub fn lmin_bound<T: Scalar>(set: &SampleSet<T>, delta: T) -> Result<NoiseReport<T>> {
    let (l_min, argmin_partition) = min_partition_distance(set.points())?;
    Ok(NoiseReport {
        n_conditioning: conditioning_bound(set, delta),
        n_lmin: T::lit(2.0) * delta / l_min,
        l_min,
        argmin_partition,
        delta_noise: delta,
    })
}

/// Maps noise values at the sample points to the induced gradient error.
fn noise_operator<T: Scalar>(set: &SampleSet<T>) -> Result<DMatrix<T>> {
    let n = set.dim();
    let inv_t = set
        .displacement()
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::UnpoisedSet {
            singular_values: set
                .singular_values()
                .iter()
                .map(|s| s.to_f64_lossy())
                .collect(),
        })?;
    // eps = U^{-T} (v_others - v_ref): column of the reference is -sum.
    let mut op = DMatrix::<T>::zeros(n, n + 1);
    for (col, j) in set.others().enumerate() {
        op.set_column(j, &inv_t.column(col));
    }
    let ref_col = -inv_t.column_sum();
    op.set_column(set.ref_index(), &ref_col);
    Ok(op)
}

/// Gradient error induced by one noise realization.
pub fn noise_error<T: Scalar>(set: &SampleSet<T>, noise: &[T]) -> Result<DVector<T>> {
    if noise.len() != set.points().len() {
        return Err(Error::DimensionMismatch {
            expected: set.points().len(),
            found: noise.len(),
        });
    }
    Ok(noise_operator(set)? * DVector::from_column_slice(noise))
}

/// Exact maximum of `|eps_n|` over all `2^{n_u+1}` vertex patterns
/// `v_j = +-delta`, with a maximizing pattern.
///
/// Patterns are visited in increasing bitmask order (bit `j` set means
/// `v_j = +delta`); the first maximizer wins.
pub fn worst_case_noise_error<T: Scalar>(
    set: &SampleSet<T>,
    delta: T,
) -> Result<(T, NoiseRealization<T>)> {
    let n = set.dim();
    if n > WORST_CASE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            n_u: n,
            cap: WORST_CASE_MAX_DIM,
        });
    }
    let op = noise_operator(set)?;
    let np = n + 1;
    let pattern = |mask: u32| -> DVector<T> {
        DVector::from_fn(np, |j, _| if mask & (1 << j) != 0 { delta } else { -delta })
    };
    let mut best_mask = 0u32;
    let mut best = T::zero();
    for mask in 0..(1u32 << np) {
        let val = (&op * pattern(mask)).norm();
        if val > best {
            best = val;
            best_mask = mask;
        }
    }
    let realization = NoiseRealization {
        values: pattern(best_mask).iter().copied().collect(),
    };
    Ok((best, realization))
}

/// Angle between the noisy interpolation plane and the level plane for a
/// noise-induced gradient error `epsilon_n`: `acos(1/sqrt(|eps|^2 + 1))`.
pub fn noise_plane_angle<T: Scalar>(epsilon_n: &DVector<T>) -> T {
    // Same quantity as the acos form, without its cancellation near zero.
    epsilon_n.norm().atan()
}
