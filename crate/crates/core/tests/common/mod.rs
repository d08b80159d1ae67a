#![allow(dead_code)]

//! Reference computations built from plain linear algebra, independent of
//! the library's own routines.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_points(
    rng: &mut ChaCha8Rng,
    n: usize,
    count: usize,
    half: f64,
) -> Vec<DVector<f64>> {
    (0..count)
        .map(|_| DVector::from_fn(n, |_, _| rng.random_range(-half..=half)))
        .collect()
}

/// Condition number of `[u_j - u_0]` from its singular values.
pub fn condition(points: &[DVector<f64>]) -> f64 {
    let n = points.len() - 1;
    let u = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - points[0][i]);
    let s = u.singular_values();
    s.max() / s.min()
}

/// `n + 1` uniform points in `[-1, 1]^n` with condition number below `cap`.
pub fn poised_points(rng: &mut ChaCha8Rng, n: usize, cap: f64) -> Vec<DVector<f64>> {
    loop {
        let p = uniform_points(rng, n, n + 1, 1.0);
        if condition(&p) < cap {
            return p;
        }
    }
}

/// Gradient of the affine interpolant, from the full `(n+1) x (n+1)` system
/// `c + g . u_j = y_j`.
pub fn interp_gradient(points: &[DVector<f64>], values: &[f64]) -> DVector<f64> {
    let n = points.len() - 1;
    let a = DMatrix::from_fn(
        n + 1,
        n + 1,
        |r, c| if c == 0 { 1.0 } else { points[r][c - 1] },
    );
    let y = DVector::from_column_slice(values);
    let sol = a.full_piv_lu().solve(&y).expect("poised");
    sol.rows(1, n).into_owned()
}

/// Circumcenter from `2 (u_j - u_0) . c = |u_j|^2 - |u_0|^2`.
pub fn circumcenter(points: &[DVector<f64>]) -> DVector<f64> {
    let n = points.len() - 1;
    let a = DMatrix::from_fn(n, n, |r, c| 2.0 * (points[r + 1][c] - points[0][c]));
    let b = DVector::from_fn(n, |r, _| {
        points[r + 1].norm_squared() - points[0].norm_squared()
    });
    a.full_piv_lu().solve(&b).expect("poised")
}

pub fn circumradius(points: &[DVector<f64>]) -> f64 {
    (circumcenter(points) - &points[0]).norm()
}

/// Distance between the affine hulls of `a` and `b` by least squares over
/// the affine coordinates of both.
pub fn affine_distance(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    let dim = a[0].len();
    let k = a.len() - 1 + b.len() - 1;
    let rhs = &b[0] - &a[0];
    if k == 0 {
        return rhs.norm();
    }
    let mut m = DMatrix::zeros(dim, k);
    let mut col = 0;
    for p in &a[1..] {
        m.set_column(col, &(p - &a[0]));
        col += 1;
    }
    for q in &b[1..] {
        m.set_column(col, &(&b[0] - q));
        col += 1;
    }
    let svd = m.clone().svd(true, true);
    let x = svd.solve(&rhs, 1e-12).expect("svd solve");
    (m * x - rhs).norm()
}

/// Smallest distance between complementary affine hulls over all
/// bipartitions of the points.
pub fn lmin(points: &[DVector<f64>]) -> f64 {
    let np = points.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << (np - 1)) {
        let a: Vec<_> = (0..np)
            .filter(|&i| i == 0 || mask & (1 << (i - 1)) != 0)
            .map(|i| points[i].clone())
            .collect();
        let b: Vec<_> = (1..np)
            .filter(|&i| mask & (1 << (i - 1)) == 0)
            .map(|i| points[i].clone())
            .collect();
        if b.is_empty() {
            continue;
        }
        best = best.min(affine_distance(&a, &b));
    }
    best
}

/// Largest gradient error over all `+-delta` noise patterns.
pub fn worst_noise(points: &[DVector<f64>], delta: f64) -> f64 {
    let np = points.len();
    (0u32..(1 << np))
        .map(|mask| {
            let v: Vec<f64> = (0..np)
                .map(|j| if mask & (1 << j) != 0 { delta } else { -delta })
                .collect();
            interp_gradient(points, &v).norm()
        })
        .fold(0.0, f64::max)
}

pub fn rotation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

/// Symmetric matrix with eigenvalues drawn from `[-l, l]`.
pub fn hessian(rng: &mut ChaCha8Rng, n: usize, l: f64) -> DMatrix<f64> {
    let q = rotation(rng, n);
    let d = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.random_range(-l..=l)));
    &q * d * q.transpose()
}

/// `f(u) = u^T A u / 2 + b . u` with its gradient.
pub struct Quadratic {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl Quadratic {
    pub fn random(rng: &mut ChaCha8Rng, n: usize, l: f64) -> Self {
        Quadratic {
            a: hessian(rng, n, l),
            b: DVector::from_fn(n, |_, _| rng.random_range(-3.0..=3.0)),
        }
    }

    pub fn f(&self, u: &DVector<f64>) -> f64 {
        0.5 * u.dot(&(&self.a * u)) + self.b.dot(u)
    }

    pub fn grad(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.a * u + &self.b
    }
}

/// Barycentric coordinates of `x` with respect to a full simplex.
pub fn barycentric(points: &[DVector<f64>], x: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    let m = DMatrix::from_fn(n + 1, n + 1, |r, c| if r < n { points[c][r] } else { 1.0 });
    let mut rhs = DVector::from_element(n + 1, 1.0);
    rhs.rows_mut(0, n).copy_from(x);
    m.full_piv_lu().solve(&rhs).expect("poised")
}

/// Nearest hull point to `target` by grid search over barycentric weights
/// (three or four vertices): a coarse grid, then a `1e-3` grid around the
/// coarse winner.
pub fn grid_hull_point(points: &[DVector<f64>], target: &DVector<f64>) -> DVector<f64> {
    assert!(points.len() == 3 || points.len() == 4);
    let k = points.len() - 1;
    let mut best = (f64::INFINITY, vec![0.0; k + 1]);
    let coarse = if k == 2 { 1e-3 } else { 1e-2 };
    grid_visit(points, target, &vec![0.0; k], 1.0, coarse, &mut best);
    if k == 3 {
        let lo: Vec<f64> = best.1[..k]
            .iter()
            .map(|w| ((w - 0.02) * 1e3).round() / 1e3)
            .collect();
        grid_visit(points, target, &lo, 0.04, 1e-3, &mut best);
    }
    combine(points, &best.1)
}

fn combine(points: &[DVector<f64>], w: &[f64]) -> DVector<f64> {
    let mut p = DVector::zeros(points[0].len());
    for (wi, v) in w.iter().zip(points) {
        p += v * *wi;
    }
    p
}

fn grid_visit(
    points: &[DVector<f64>],
    target: &DVector<f64>,
    lo: &[f64],
    width: f64,
    step: f64,
    best: &mut (f64, Vec<f64>),
) {
    let k = lo.len();
    let count = (width / step).round() as usize;
    let mut idx = vec![0usize; k];
    loop {
        let w: Vec<f64> = (0..k).map(|i| lo[i] + idx[i] as f64 * step).collect();
        let s: f64 = w.iter().sum();
        if w.iter().all(|&x| x >= -1e-12) && s <= 1.0 + 1e-12 {
            let mut full = w;
            full.push((1.0 - s).max(0.0));
            let d = (combine(points, &full) - target).norm();
            if d < best.0 {
                *best = (d, full);
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            idx[i] += 1;
            if idx[i] <= count {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// `|U^{-1}|` for `U = [u_j - u_0]`, from the smallest singular value.
pub fn inv_norm(points: &[DVector<f64>]) -> f64 {
    let n = points.len() - 1;
    let u = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - points[0][i]);
    1.0 / u.singular_values().min()
}

/// `(T_d, T_c, T_r)` at `points[0]`, from their defining formulas.
pub fn truncation_bounds(points: &[DVector<f64>], l: f64) -> (f64, f64, f64) {
    let n = points.len() - 1;
    let sq: Vec<f64> = points[1..]
        .iter()
        .map(|p| (p - &points[0]).norm_squared())
        .collect();
    let delta = sq.iter().cloned().fold(0.0, f64::max).sqrt();
    let inv = inv_norm(points);
    let t_d = delta * inv * (n as f64).sqrt() * l / 2.0 * delta;
    let t_c = l / 2.0 * DVector::from_vec(sq).norm() * inv;
    let t_r = l * circumradius(points);
    (t_d, t_c, t_r)
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}
