//! Combined truncation and noise bounds, the forward-difference step
//! trade-off and the candidate bound `E(u)` used as a duality constraint.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::BOUND_SENTINEL;
use crate::geometry::{hyperplane_through, Hyperplane};
use crate::noise_bounds::lmin_bound;
use crate::truncation_bounds::{radial_bound, simplex_bound, square_column_bound};
use crate::{Error, Result, SampleSet, Scalar};

/// `E_c = T_c + 2 delta / l_min`.
pub fn total_bound_ec<T: Scalar>(set: &SampleSet<T>, lipschitz: T, delta: T) -> Result<T> {
    Ok(square_column_bound(set, lipschitz) + lmin_bound(set, delta)?.n_lmin)
}

fn count<T: Scalar>(n_u: usize) -> T {
    T::from_usize(n_u).expect("dimension fits scalar")
}

/// `E_FFD(h) = L sqrt(n_u) h / 2 + 2 delta sqrt(n_u) / h`.
pub fn ffd_error_bound<T: Scalar>(n_u: usize, lipschitz: T, delta: T, h: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::NonpositiveStep(h.to_f64_lossy()));
    }
    let sn = count::<T>(n_u).sqrt();
    Ok(lipschitz * sn * h * T::lit(0.5) + T::lit(2.0) * delta * sn / h)
}

/// Minimizer `h* = 2 sqrt(delta / L)` of [`ffd_error_bound`].
pub fn optimal_ffd_step<T: Scalar>(lipschitz: T, delta: T) -> Result<T> {
    if !(lipschitz > T::zero()) {
        return Err(Error::ZeroLipschitz);
    }
    if !(delta > T::zero()) {
        return Err(Error::NonpositiveStep(0.0));
    }
    Ok(T::lit(2.0) * (delta / lipschitz).sqrt())
}

/// `E*_FFD = E_FFD(h*) = 2 sqrt(n_u) sqrt(L delta)`.
pub fn e_star_ffd<T: Scalar>(n_u: usize, lipschitz: T, delta: T) -> Result<T> {
    let h = optimal_ffd_step(lipschitz, delta)?;
    ffd_error_bound(n_u, lipschitz, delta, h)
}

/// Truncation part of the candidate bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Radial,
    Simplex,
}

/// The `n_u` fixed anchor points and constants defining `E(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateContext<T: Scalar> {
    anchors: Vec<DVector<T>>,
    lipschitz: T,
    delta: T,
    kind: BoundKind,
    hyperplane: Hyperplane<T>,
    spread: T,
}

impl<T: Scalar> CandidateContext<T> {
    /// Fails with [`Error::DegenerateDirections`] unless the anchors span a
    /// hyperplane.
    pub fn new(anchors: Vec<DVector<T>>, lipschitz: T, delta: T, kind: BoundKind) -> Result<Self> {
        let hyperplane = hyperplane_through(&anchors)?;
        let spread = anchors
            .iter()
            .map(|a| (a - &anchors[0]).norm())
            .fold(T::zero(), |m, d| m.max(d));
        Ok(Self {
            anchors,
            lipschitz,
            delta,
            kind,
            hyperplane,
            spread,
        })
    }

    pub fn anchors(&self) -> &[DVector<T>] {
        &self.anchors
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn hyperplane(&self) -> &Hyperplane<T> {
        &self.hyperplane
    }

    /// Sample set `{u, anchors...}` with `u` as reference.
    pub fn augmented_set(&self, u: &DVector<T>) -> Result<SampleSet<T>> {
        let dist = self.hyperplane.signed_distance(u);
        let scale = self.spread.max((u - &self.anchors[0]).norm());
        let degenerate = || Error::DegenerateCandidate {
            distance: dist.to_f64_lossy(),
            sentinel: BOUND_SENTINEL,
        };
        if !(dist.abs() >= T::lit(1e-9) * scale) || scale == T::zero() {
            return Err(degenerate());
        }
        let mut points = Vec::with_capacity(self.anchors.len() + 1);
        points.push(u.clone());
        points.extend(self.anchors.iter().cloned());
        SampleSet::new(points, 0).map_err(|e| match e {
            Error::UnpoisedSet { .. } => degenerate(),
            other => other,
        })
    }
}

/// `E(u)`: radial or simplex truncation bound plus the l-min noise bound of
/// the set `{u, anchors...}`.
///
/// Near the anchor hyperplane the set loses poisedness and the bound grows
/// without limit; within `1e-9` (relative) of it the call returns
/// [`Error::DegenerateCandidate`].
pub fn candidate_bound<T: Scalar>(ctx: &CandidateContext<T>, u: &DVector<T>) -> Result<T> {
    let set = ctx.augmented_set(u)?;
    let truncation = match ctx.kind {
        BoundKind::Radial => radial_bound(&set, ctx.lipschitz)?,
        BoundKind::Simplex => simplex_bound(&set, ctx.lipschitz)?.value,
    };
    let noise = if ctx.delta == T::zero() {
        T::zero()
    } else {
        lmin_bound(&set, ctx.delta)?.n_lmin
    };
    Ok(truncation + noise)
}

/// [`candidate_bound`] with degenerate points mapped to the sentinel value.
pub fn candidate_bound_or_sentinel<T: Scalar>(ctx: &CandidateContext<T>, u: &DVector<T>) -> f64 {
    match candidate_bound(ctx, u) {
        Ok(v) if v.is_finite() => v.to_f64_lossy(),
        _ => BOUND_SENTINEL,
    }
}
