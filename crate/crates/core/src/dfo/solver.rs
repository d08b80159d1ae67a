//! Multistart pattern search for the half-space subproblems
//! `min m(u) s.t. E(u) <= budget, u on one side of the anchor hyperplane`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geometry::affine_circumsphere;
use crate::total_bounds::candidate_bound;
use crate::{CandidateContext, Error, QuadModel, Result, Scalar, Side};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Feasible seeds collected per side.
    pub multistart_count: usize,
    pub seed: u64,
    /// Sampling rounds; the seed box doubles after each unsuccessful round.
    pub max_rounds: usize,
    /// Rejection-sampling draws per requested seed and round.
    pub draws_per_start: usize,
    /// Pattern search stops once the step falls below this.
    pub min_step: f64,
    /// Bound evaluations allowed per local search.
    pub max_evals: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            multistart_count: 4,
            seed: 0,
            max_rounds: 3,
            draws_per_start: 16,
            min_step: 1e-7,
            max_evals: 1500,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.multistart_count == 0 || self.max_rounds == 0 || self.draws_per_start == 0 {
            return Err(Error::InvalidConfig(
                "solver counts must be positive".into(),
            ));
        }
        if !(self.min_step > 0.0) || self.max_evals == 0 {
            return Err(Error::InvalidConfig(
                "solver step and evaluation cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Axis-aligned box `center +- half_width` from which seeds are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedBox<T: Scalar> {
    pub center: DVector<T>,
    pub half_width: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceSolution<T: Scalar> {
    pub point: DVector<T>,
    pub model_value: T,
    /// `E(point)`.
    pub bound: T,
    pub side: Side,
    /// Number of local searches run.
    pub starts: usize,
    pub bound_evals: usize,
}

struct Problem<'a, T: Scalar> {
    model: &'a QuadModel<T>,
    ctx: &'a CandidateContext<T>,
    budget: T,
    side: Side,
    rho: T,
    evals: usize,
}

struct Eval<T> {
    merit: T,
    model: T,
    bound: Option<T>,
}

impl<T: Scalar> Problem<'_, T> {
    fn on_side(&self, u: &DVector<T>) -> bool {
        self.side.sign::<T>() * self.ctx.hyperplane().signed_distance(u) > T::zero()
    }

    /// `E(u)` if `u` is strictly on the side and the bound is defined.
    fn bound(&mut self, u: &DVector<T>) -> Option<T> {
        if !self.on_side(u) {
            return None;
        }
        self.evals += 1;
        candidate_bound(self.ctx, u).ok().filter(|e| e.is_finite())
    }

    fn feasible_bound(&mut self, u: &DVector<T>) -> Option<T> {
        self.bound(u).filter(|&e| e <= self.budget)
    }

    fn eval(&mut self, u: &DVector<T>) -> Eval<T> {
        let model = self.model.eval(u);
        match self.bound(u) {
            Some(e) => {
                let excess = (e - self.budget).max(T::zero());
                Eval {
                    merit: model + self.rho * excess,
                    model,
                    bound: Some(e),
                }
            }
            None => Eval {
                merit: T::max_value().expect("bounded scalar"),
                model,
                bound: None,
            },
        }
    }
}

fn stream_seed(seed: u64, iter: u64, side: Side, start: u64) -> u64 {
    let side_tag = match side {
        Side::Plus => 1u64,
        Side::Minus => 2u64,
    };
    seed ^ iter.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ side_tag.wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ start.wrapping_mul(0x1656_67B1_9E37_79F9)
}

fn random_unit<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> DVector<T> {
    loop {
        let d = DVector::<T>::from_fn(n, |_, _| T::lit(rng.sample::<f64, _>(StandardNormal)));
        let norm = d.norm();
        if norm > T::lit(1e-12) {
            return d / norm;
        }
    }
}

/// Points on the normal line through the anchors' circumcenter, where the
/// sphere through `{u, anchors}` is smallest for a given distance from the
/// hyperplane.
fn normal_seeds<T: Scalar>(ctx: &CandidateContext<T>, side: Side, fallback: T) -> Vec<DVector<T>> {
    let Some(sphere) = affine_circumsphere(ctx.anchors()) else {
        return Vec::new();
    };
    let r = if sphere.radius > T::zero() {
        sphere.radius
    } else {
        fallback * T::lit(0.5)
    };
    let normal = &ctx.hyperplane().normal * side.sign::<T>();
    [0.5, 1.0, 2.0]
        .iter()
        .map(|&t| &sphere.center + &normal * (r * T::lit(t)))
        .collect()
}

/// Solves one half-space subproblem.
///
/// Seeds are any feasible `extra_seeds`, three points on the normal line
/// through the anchors' circumcenter, and points rejection-sampled from
/// `seed_box` (enlarged on failure). Each seed starts an expanding/shrinking
/// pattern search on `m(u) + rho max(0, E(u) - budget)`; the best feasible
/// point visited wins, ties going to the earlier start. `iter` selects the
/// random stream so results are reproducible.
#[allow(clippy::too_many_arguments)]
pub fn solve_half_space<T: Scalar>(
    model: &QuadModel<T>,
    ctx: &CandidateContext<T>,
    budget: T,
    side: Side,
    seed_box: &SeedBox<T>,
    extra_seeds: &[DVector<T>],
    cfg: &SolverConfig,
    iter: u64,
) -> Result<HalfSpaceSolution<T>> {
    let n = model.base_point.len();
    let rho = T::lit(1e3) * (T::one() + model.base_value.abs());
    let mut problem = Problem {
        model,
        ctx,
        budget,
        side,
        rho,
        evals: 0,
    };

    // The global minimizer of a convex model is optimal whenever feasible.
    let convex = model.hessian.clone().cholesky().is_some();
    let mut seeds: Vec<(DVector<T>, T)> = Vec::new();
    for s in extra_seeds {
        if let Some(e) = problem.feasible_bound(s) {
            if convex && model.stationary_point().is_some_and(|p| &p == s) {
                return Ok(HalfSpaceSolution {
                    point: s.clone(),
                    model_value: model.eval(s),
                    bound: e,
                    side,
                    starts: 0,
                    bound_evals: problem.evals,
                });
            }
            seeds.push((s.clone(), e));
        }
    }

    for u in normal_seeds(ctx, side, seed_box.half_width) {
        if let Some(e) = problem.feasible_bound(&u) {
            seeds.push((u, e));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, iter, side, u64::MAX));
    let mut half_width = seed_box.half_width;
    let wanted = cfg.multistart_count.saturating_sub(seeds.len()).max(1);
    let mut sampled = 0;
    for _ in 0..cfg.max_rounds {
        let draws = cfg.draws_per_start * cfg.multistart_count;
        for _ in 0..draws {
            if sampled == wanted {
                break;
            }
            let u = DVector::<T>::from_fn(n, |i, _| {
                let r: f64 = rng.random_range(-1.0..=1.0);
                seed_box.center[i] + half_width * T::lit(r)
            });
            if let Some(e) = problem.feasible_bound(&u) {
                seeds.push((u, e));
                sampled += 1;
            }
        }
        if sampled > 0 {
            break;
        }
        half_width *= T::lit(2.0);
    }
    if seeds.is_empty() {
        return Err(Error::Infeasible);
    }

    let initial_step = seed_box.half_width * T::lit(0.5);
    let max_step = seed_box.half_width * T::lit(64.0);
    let mut best: Option<(DVector<T>, T, T)> = None;
    let starts = seeds.len();
    for (k, (seed, e)) in seeds.into_iter().enumerate() {
        let mut local_rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, iter, side, k as u64));
        let (x, m, e) = pattern_search(
            &mut problem,
            seed,
            e,
            initial_step,
            max_step,
            T::lit(cfg.min_step),
            cfg.max_evals,
            &mut local_rng,
        );
        if best.as_ref().is_none_or(|(_, bm, _)| m < *bm) {
            best = Some((x, m, e));
        }
    }
    let (point, model_value, bound) = best.expect("at least one start");
    Ok(HalfSpaceSolution {
        point,
        model_value,
        bound,
        side,
        starts,
        bound_evals: problem.evals,
    })
}

/// Opportunistic pattern search. Polls the steepest-descent direction of the
/// model, the `2n` coordinate directions and `n` random directions; doubles
/// the step after a success and halves it after a failed poll. Returns the
/// best feasible point visited as `(point, m(point), E(point))`.
#[allow(clippy::too_many_arguments)]
fn pattern_search<T: Scalar>(
    problem: &mut Problem<'_, T>,
    seed: DVector<T>,
    seed_bound: T,
    initial_step: T,
    max_step: T,
    min_step: T,
    max_evals: usize,
    rng: &mut ChaCha8Rng,
) -> (DVector<T>, T, T) {
    let n = seed.len();
    let start_evals = problem.evals;
    let m0 = problem.model.eval(&seed);
    let mut best = (seed.clone(), m0, seed_bound);
    let mut x = seed;
    let mut fx = m0;
    let mut step = initial_step;

    while step >= min_step && problem.evals - start_evals < max_evals {
        let mut dirs: Vec<DVector<T>> = Vec::with_capacity(3 * n + 1);
        let g = problem.model.gradient(&x);
        let gn = g.norm();
        if gn > T::zero() {
            dirs.push(-g / gn);
        }
        for i in 0..n {
            let mut e = DVector::<T>::zeros(n);
            e[i] = T::one();
            dirs.push(e.clone());
            dirs.push(-e);
        }
        for _ in 0..n {
            dirs.push(random_unit(rng, n));
        }

        let mut improved = false;
        for d in &dirs {
            let y = &x + d * step;
            let ev = problem.eval(&y);
            if let Some(e) = ev.bound {
                if e <= problem.budget && ev.model < best.1 {
                    best = (y.clone(), ev.model, e);
                }
            }
            if ev.merit < fx {
                x = y;
                fx = ev.merit;
                improved = true;
                break;
            }
        }
        step = if improved {
            (step * T::lit(2.0)).min(max_step)
        } else {
            step * T::lit(0.5)
        };
    }
    best
}
