//! Affine and convex geometry used by the gradient-error bounds.
//!
//! Everything here is a pure function of its inputs: hyperplanes through
//! `n_u` points, the complement affine subspaces of a sample set and the
//! distances between them, circumscribed spheres, and Euclidean projection
//! onto the convex hull of a small vertex set.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{f64_vec, null_space, singular_values};
use crate::{Error, Result, Scalar};

/// Hyperplane `{u : normal . u = offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane<T: Scalar> {
    pub normal: DVector<T>,
    pub offset: T,
}

/// Which closed half-space of a [`Hyperplane`] a subproblem is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    /// `normal . u >= offset`
    Plus,
    /// `normal . u <= offset`
    Minus,
}

impl Side {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Side::Plus => T::one(),
            Side::Minus => -T::one(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

impl<T: Scalar> Hyperplane<T> {
    /// `normal . u - offset`.
    pub fn signed_distance(&self, u: &DVector<T>) -> T {
        self.normal.dot(u) - self.offset
    }

    /// True when `u` is in the closed half-space selected by `side`.
    pub fn contains_side(&self, u: &DVector<T>, side: Side) -> bool {
        side.sign::<T>() * self.signed_distance(u) >= T::zero()
    }

    /// Mirror image of `u` across the hyperplane.
    pub fn reflect(&self, u: &DVector<T>) -> DVector<T> {
        let d = self.signed_distance(u);
        u - &self.normal * (d + d)
    }
}

/// Builds the unique hyperplane through `points` (`n_u` points in `R^{n_u}`).
///
/// The normal is unit length with its first nonzero component positive.
pub fn hyperplane_through<T: Scalar>(points: &[DVector<T>]) -> Result<Hyperplane<T>> {
    let n = points.len();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    check_dims(points, n)?;
    let origin = &points[0];
    let mut q = DMatrix::<T>::zeros(n - 1, n);
    for (i, p) in points.iter().enumerate().skip(1) {
        q.row_mut(i - 1).copy_from(&(p - origin).transpose());
    }
    if n > 1 {
        let s = singular_values(&q);
        let tol = T::rank_tol() * s[0];
        let rank = s.iter().filter(|&&x| x > tol).count();
        if rank < n - 1 {
            return Err(Error::DegenerateDirections {
                rank,
                required: n - 1,
            });
        }
    }
    let mut normal = null_space(&q, T::rank_tol())
        .into_iter()
        .next()
        .expect("rank n-1 matrix has a null direction");
    normal /= normal.norm();
    canonical_sign(&mut normal);
    let offset = normal.dot(origin);
    Ok(Hyperplane { normal, offset })
}

fn canonical_sign<T: Scalar>(v: &mut DVector<T>) {
    let tiny = T::lit(1e-12);
    if let Some(first) = v.iter().copied().find(|x| x.abs() > tiny) {
        if first < T::zero() {
            v.neg_mut();
        }
    }
}

fn check_dims<T: Scalar>(points: &[DVector<T>], n: usize) -> Result<()> {
    match points.iter().find(|p| p.len() != n) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        }),
        None => Ok(()),
    }
}

/// A bipartition of the sample points into two nonempty subsets, each
/// spanning one of a pair of complement affine subspaces.
///
/// Index 0 always belongs to `subset_a`, so mirrored partitions are not
/// counted twice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct ComplementPartition {
    pub subset_a: Vec<usize>,
    pub subset_c: Vec<usize>,
}

impl ComplementPartition {
    /// Canonical partition with `subset` on one side and the remaining
    /// indices of `0..n_points` on the other.
    ///
    /// Returns `None` when either side would be empty or an index is out
    /// of range.
    pub fn new(subset: &[usize], n_points: usize) -> Option<Self> {
        let mut in_a = vec![false; n_points];
        for &i in subset {
            *in_a.get_mut(i)? = true;
        }
        let a: Vec<usize> = (0..n_points).filter(|&i| in_a[i]).collect();
        let c: Vec<usize> = (0..n_points).filter(|&i| !in_a[i]).collect();
        if a.is_empty() || c.is_empty() {
            return None;
        }
        if in_a[0] {
            Some(Self {
                subset_a: a,
                subset_c: c,
            })
        } else {
            Some(Self {
                subset_a: c,
                subset_c: a,
            })
        }
    }

    fn from_mask(mask: u64, n_points: usize) -> Self {
        // Bit i-1 of the mask puts index i into subset A.
        let mut a = vec![0usize];
        let mut c = Vec::new();
        for i in 1..n_points {
            if mask & (1u64 << (i - 1)) != 0 {
                a.push(i);
            } else {
                c.push(i);
            }
        }
        Self {
            subset_a: a,
            subset_c: c,
        }
    }
}

/// Lists all `2^{n_u} - 1` canonical bipartitions of `n_points = n_u + 1`
/// points, ordered by the bitmask of the non-zero indices placed in A.
pub fn enumerate_complement_partitions(n_points: usize) -> Vec<ComplementPartition> {
    if n_points < 2 {
        return Vec::new();
    }
    assert!(n_points <= 64, "partition enumeration limited to 64 points");
    let full = if n_points - 1 == 64 {
        u64::MAX
    } else {
        (1u64 << (n_points - 1)) - 1
    };
    (0..full)
        .map(|mask| ComplementPartition::from_mask(mask, n_points))
        .collect()
}

/// Verifies that `points` (`n_u + 1` points of dimension `n_u`) are poised.
pub(crate) fn check_poised<T: Scalar>(points: &[DVector<T>]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: points.len(),
        });
    }
    let n = points.len() - 1;
    check_dims(points, n)?;
    let u = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - points[0][i]);
    let s = singular_values(&u);
    if !poised_from_singular_values(&s) {
        return Err(Error::UnpoisedSet {
            singular_values: f64_vec(&s),
        });
    }
    Ok(())
}

pub(crate) fn poised_from_singular_values<T: Scalar>(s: &[T]) -> bool {
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) => {
            max > T::zero() && min.is_finite() && min > T::poised_tol() * max
        }
        _ => false,
    }
}

/// Distance between the complement affine subspaces spanned by the two
/// sides of `partition`.
pub fn partition_distance<T: Scalar>(
    points: &[DVector<T>],
    partition: &ComplementPartition,
) -> Result<T> {
    check_poised(points)?;
    let np = points.len();
    let covered = partition.subset_a.len() + partition.subset_c.len();
    if covered != np
        || partition
            .subset_a
            .iter()
            .chain(&partition.subset_c)
            .any(|&i| i >= np)
    {
        return Err(Error::DimensionMismatch {
            expected: np,
            found: covered,
        });
    }
    Ok(partition_distance_unchecked(points, partition))
}

fn partition_distance_unchecked<T: Scalar>(
    points: &[DVector<T>],
    partition: &ComplementPartition,
) -> T {
    let n = points[0].len();
    let a = &partition.subset_a;
    let c = &partition.subset_c;
    let rows = (a.len() - 1) + (c.len() - 1);
    let mut q = DMatrix::<T>::zeros(rows, n);
    let mut r = 0;
    for side in [a, c] {
        let base = &points[side[0]];
        for &i in &side[1..] {
            q.row_mut(r).copy_from(&(&points[i] - base).transpose());
            r += 1;
        }
    }
    let w = &points[c[0]] - &points[a[0]];
    // A one-dimensional complement gives |n.w|/|n|; a larger one (only for
    // degenerate sets) gives the norm of the projection onto it.
    null_space(&q, T::rank_tol())
        .iter()
        .map(|v| {
            let d = v.dot(&w);
            d * d
        })
        .fold(T::zero(), |acc, x| acc + x)
        .sqrt()
}

/// Shortest distance between any pair of complement affine subspaces,
/// together with the first partition (in enumeration order) attaining it.
pub fn min_partition_distance<T: Scalar>(
    points: &[DVector<T>],
) -> Result<(T, ComplementPartition)> {
    check_poised(points)?;
    let mut best: Option<(T, ComplementPartition)> = None;
    for part in enumerate_complement_partitions(points.len()) {
        let d = partition_distance_unchecked(points, &part);
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, part));
        }
    }
    Ok(best.expect("at least one partition for two or more points"))
}

/// Sphere passing through all `n_u + 1` sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Circumsphere<T: Scalar> {
    pub center: DVector<T>,
    pub radius: T,
}

/// Circumscribed sphere of a poised set of `n_u + 1` points.
///
/// Solves `2 (u_c - u_0)^T U = [|u_j - u_0|^2]_j`, which is the usual
/// `2 u_c^T U = [|u_j|^2 - |u_0|^2]_j` with the origin moved to `u_0`.
pub fn circumsphere<T: Scalar>(points: &[DVector<T>]) -> Result<Circumsphere<T>> {
    check_poised(points)?;
    let n = points.len() - 1;
    let u0 = &points[0];
    let ut = DMatrix::from_fn(n, n, |j, i| points[j + 1][i] - u0[i]);
    let half_sq = DVector::from_fn(n, |j, _| {
        let d = &points[j + 1] - u0;
        d.norm_squared() * T::lit(0.5)
    });
    let z = ut
        .lu()
        .solve(&half_sq)
        .ok_or_else(|| unpoised_error(points))?;
    let radius = z.norm();
    Ok(Circumsphere {
        center: u0 + z,
        radius,
    })
}

/// Center and radius of the smallest sphere through affinely independent
/// `points`, lying in their affine hull. `None` if the points are affinely
/// dependent.
pub fn affine_circumsphere<T: Scalar>(points: &[DVector<T>]) -> Option<Circumsphere<T>> {
    let base = points.first()?;
    let k = points.len() - 1;
    if k == 0 {
        return Some(Circumsphere {
            center: base.clone(),
            radius: T::zero(),
        });
    }
    let a = DMatrix::from_fn(base.len(), k, |i, j| points[j + 1][i] - base[i]);
    let rhs = DVector::from_fn(k, |j, _| a.column(j).norm_squared() * T::lit(0.5));
    let z = (a.transpose() * &a).cholesky()?.solve(&rhs);
    let offset = &a * z;
    Some(Circumsphere {
        radius: offset.norm(),
        center: base + offset,
    })
}

/// Circumradius from the row-vector identity `r = 1/2 |[|u_j - u_0|^2]_j U^{-1}|`,
/// computed with an explicit inverse.
pub fn circumradius_row_formula<T: Scalar>(points: &[DVector<T>]) -> Result<T> {
    check_poised(points)?;
    let n = points.len() - 1;
    let u0 = &points[0];
    let u = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - u0[i]);
    let inv = u.try_inverse().ok_or_else(|| unpoised_error(points))?;
    let sq = DMatrix::from_fn(1, n, |_, j| (&points[j + 1] - u0).norm_squared());
    Ok((sq * inv).norm() * T::lit(0.5))
}

fn unpoised_error<T: Scalar>(points: &[DVector<T>]) -> Error {
    let n = points.len() - 1;
    let u = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - points[0][i]);
    Error::UnpoisedSet {
        singular_values: f64_vec(&singular_values(&u)),
    }
}

/// Euclidean projection of a point onto the convex hull of a vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct HullProjection<T: Scalar> {
    /// Nearest point of the hull.
    pub point: DVector<T>,
    /// Barycentric weights: nonnegative, summing to one.
    pub weights: DVector<T>,
    /// Distance from the target to `point`.
    pub distance: T,
}

/// Projects `target` onto `conv(vertices)` by enumerating every vertex
/// subset, projecting onto its affine hull and keeping the closest
/// candidate whose barycentric weights are all `>= -1e-12`.
///
/// Cost is exponential in the number of vertices; intended for simplices
/// with up to a dozen vertices. Panics if `vertices` is empty or has more
/// than 24 entries.
pub fn nearest_point_in_hull<T: Scalar>(
    target: &DVector<T>,
    vertices: &[DVector<T>],
) -> HullProjection<T> {
    let m = vertices.len();
    assert!(m > 0, "hull needs at least one vertex");
    assert!(m <= 24, "hull projection limited to 24 vertices");
    let dim = target.len();
    let weight_tol = -T::lit(1e-12);

    let mut best: Option<(T, DVector<T>, DVector<T>)> = None;
    let mut subset = Vec::with_capacity(m);
    for mask in 1u32..(1u32 << m) {
        subset.clear();
        subset.extend((0..m).filter(|&i| mask & (1 << i) != 0));
        if subset.len() > dim + 1 {
            continue;
        }
        let Some((point, local)) = project_affine(target, vertices, &subset) else {
            continue;
        };
        if local.iter().any(|&w| w < weight_tol) {
            continue;
        }
        let dist2 = (target - &point).norm_squared();
        if best.as_ref().is_none_or(|(b, _, _)| dist2 < *b) {
            let mut weights = DVector::<T>::zeros(m);
            for (k, &i) in subset.iter().enumerate() {
                weights[i] = local[k].max(T::zero());
            }
            let total = weights.sum();
            weights /= total;
            // A full-dimensional face containing the target projects to the
            // target itself.
            let point = if subset.len() == dim + 1 {
                target.clone()
            } else {
                point
            };
            let dist2 = (target - &point).norm_squared();
            best = Some((dist2, point, weights));
        }
    }
    let (dist2, point, weights) = best.expect("single vertices are always admissible");
    HullProjection {
        point,
        weights,
        distance: dist2.sqrt(),
    }
}

/// Projection of `target` onto the affine hull of `vertices[subset]`.
/// Returns the point and the barycentric weights in subset order, or
/// `None` if the subset is affinely dependent.
fn project_affine<T: Scalar>(
    target: &DVector<T>,
    vertices: &[DVector<T>],
    subset: &[usize],
) -> Option<(DVector<T>, Vec<T>)> {
    let base = &vertices[subset[0]];
    let k = subset.len() - 1;
    if k == 0 {
        return Some((base.clone(), vec![T::one()]));
    }
    // Modified Gram-Schmidt on the edge vectors from the base vertex.
    let mut q: Vec<DVector<T>> = Vec::with_capacity(k);
    let mut r = DMatrix::<T>::zeros(k, k);
    let dep_tol = T::rank_tol();
    for (j, &i) in subset[1..].iter().enumerate() {
        let mut v = &vertices[i] - base;
        let orig = v.norm();
        for (l, ql) in q.iter().enumerate() {
            let c = ql.dot(&v);
            r[(l, j)] = c;
            v.axpy(-c, ql, T::one());
        }
        let nv = v.norm();
        if nv <= dep_tol * orig || nv == T::zero() {
            return None;
        }
        r[(j, j)] = nv;
        q.push(v / nv);
    }
    let d = target - base;
    let coeffs = DVector::from_fn(k, |l, _| q[l].dot(&d));
    let mut point = base.clone();
    for (l, ql) in q.iter().enumerate() {
        point.axpy(coeffs[l], ql, T::one());
    }
    // Edge coefficients: R alpha = Q^T d.
    let alpha = r.solve_upper_triangular(&coeffs)?;
    let mut weights = Vec::with_capacity(k + 1);
    weights.push(T::one() - alpha.sum());
    weights.extend(alpha.iter().copied());
    Some((point, weights))
}
