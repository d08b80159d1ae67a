//! Sequential-programming optimizer whose next iterate minimizes a
//! quadratic model subject to a bound on the gradient error of the
//! resulting simplex (a duality constraint).

mod oracle;
mod solver;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use oracle::{NoiseModel, NoisyOracle, Objective};
pub use solver::{solve_half_space, HalfSpaceSolution, SeedBox, SolverConfig};

use crate::gradient::{quadratic_model, simplex_gradient};
use crate::total_bounds::{e_star_ffd, ffd_error_bound, optimal_ffd_step};
use crate::truncation_bounds::sample_circumsphere;
use crate::{
    candidate_bound, BoundKind, CandidateContext, Error, QuadModel, Result, SampleSet, Scalar, Side,
};

/// Which bound forms the duality constraint and how its budget is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Radial bound, budget `max(|g_k| / divisor, E*_FFD)`.
    #[serde(rename = "1a")]
    Radial,
    /// Simplex bound, budget `E*_FFD`.
    #[serde(rename = "1b")]
    Simplex,
}

impl Variant {
    pub fn bound_kind(self) -> BoundKind {
        match self {
            Variant::Radial => BoundKind::Radial,
            Variant::Simplex => BoundKind::Simplex,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::Radial => "1a",
            Variant::Simplex => "1b",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfoConfig<T: Scalar> {
    pub variant: Variant,
    pub lipschitz: T,
    /// Declared noise bound.
    pub delta: T,
    /// FFD step for the initial simplex; `None` selects `h* = 2 sqrt(delta/L)`.
    pub init_step: Option<T>,
    /// Divisor of `|g_k|` in the variant-1a budget.
    pub budget_divisor: T,
    /// Factor applied to the budget for the single retry when both sides
    /// are infeasible.
    pub budget_retry_factor: T,
    pub max_iters: usize,
    pub step_tolerance: T,
    pub solver: SolverConfig,
}

impl<T: Scalar> DfoConfig<T> {
    pub fn new(variant: Variant, lipschitz: T, delta: T) -> Self {
        Self {
            variant,
            lipschitz,
            delta,
            init_step: None,
            budget_divisor: T::lit(4.0),
            budget_retry_factor: T::lit(1.5),
            max_iters: 60,
            step_tolerance: T::lit(1e-6),
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.lipschitz > T::zero()) {
            return Err(Error::ZeroLipschitz);
        }
        if !(self.delta >= T::zero()) {
            return bad("delta must be nonnegative");
        }
        if let Some(h) = self.init_step {
            if !(h > T::zero()) {
                return Err(Error::NonpositiveStep(h.to_f64_lossy()));
            }
        } else if self.delta == T::zero() {
            return bad("init_step is required when delta is zero");
        }
        if !(self.budget_divisor > T::zero()) || !(self.budget_retry_factor >= T::one()) {
            return bad("budget divisor must be positive and retry factor at least one");
        }
        if !(self.step_tolerance > T::zero()) {
            return bad("step tolerance must be positive");
        }
        self.solver.validate()
    }

    /// Configured FFD step, or `h*`.
    pub fn initial_step(&self) -> Result<T> {
        match self.init_step {
            Some(h) => Ok(h),
            None => optimal_ffd_step(self.lipschitz, self.delta),
        }
    }

    /// Budget floor `E*_FFD`. Without noise `h*` is undefined and the
    /// forward-difference bound at the initial step is used instead.
    pub fn e_star(&self, n_u: usize) -> Result<T> {
        if self.delta > T::zero() {
            e_star_ffd(n_u, self.lipschitz, self.delta)
        } else {
            ffd_error_bound(n_u, self.lipschitz, self.delta, self.initial_step()?)
        }
    }
}

/// Solver outcome for one side of the dividing hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct SideOutcome<T: Scalar> {
    pub side: Side,
    /// `None` when no feasible point was found.
    pub point: Option<DVector<T>>,
    pub model_value: Option<T>,
    pub starts: usize,
    pub bound_evals: usize,
}

/// One accepted iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord<T: Scalar> {
    /// Index `k + 1` of the accepted point.
    pub iter: usize,
    pub point: DVector<T>,
    pub model_value: T,
    pub f_noisy: T,
    /// Budget the accepted point satisfies (after any retry).
    pub budget: T,
    /// `E(point)` for the anchors below.
    pub bound: T,
    pub side: Side,
    /// The `n_u` most recent points the constraint was built from.
    pub anchors: Vec<DVector<T>>,
    pub sides: [SideOutcome<T>; 2],
    pub budget_retried: bool,
    pub eval_count: usize,
}

/// Initial simplex plus every accepted iterate, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace<T: Scalar> {
    /// `u_0, u_0 + h e_1, ..., u_0 + h e_n`.
    pub init_points: Vec<DVector<T>>,
    pub init_values: Vec<T>,
    pub init_step: T,
    records: Vec<IterateRecord<T>>,
}

impl<T: Scalar> IterateTrace<T> {
    pub fn records(&self) -> &[IterateRecord<T>] {
        &self.records
    }

    fn push(&mut self, record: IterateRecord<T>) {
        self.records.push(record);
    }

    pub fn eval_count(&self) -> usize {
        self.records
            .last()
            .map_or(self.init_points.len(), |r| r.eval_count)
    }

    /// Latest accepted point (`u_0` before any step).
    pub fn last_point(&self) -> &DVector<T> {
        self.records
            .last()
            .map_or(&self.init_points[0], |r| &r.point)
    }

    /// First iteration whose accepted point satisfies `pred`.
    pub fn first_iter_where(&self, mut pred: impl FnMut(&DVector<T>) -> bool) -> Option<usize> {
        if pred(&self.init_points[0]) {
            return Some(0);
        }
        self.records.iter().find(|r| pred(&r.point)).map(|r| r.iter)
    }
}

/// Optimizer state at iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DfoState<T: Scalar> {
    /// `u_k, u_{k-1}, ..., u_{k-n}` with `u_k` as reference.
    pub window: SampleSet<T>,
    pub values: Vec<T>,
    pub iter: usize,
    pub trace: IterateTrace<T>,
    /// Consecutive steps shorter than the step tolerance.
    pub short_steps: usize,
}

impl<T: Scalar> DfoState<T> {
    pub fn current(&self) -> &DVector<T> {
        self.window.reference()
    }
}

/// Evaluates the FFD simplex at `u0` with step `h`, `u0` first.
pub fn init_ffd<T: Scalar>(
    oracle: &mut NoisyOracle<T>,
    u0: &DVector<T>,
    h: T,
) -> Result<DfoState<T>> {
    let window = SampleSet::ffd(u0, h)?;
    let values: Vec<T> = window.points().iter().map(|p| oracle.eval(p)).collect();
    let trace = IterateTrace {
        init_points: window.points().to_vec(),
        init_values: values.clone(),
        init_step: h,
        records: Vec::new(),
    };
    Ok(DfoState {
        window,
        values,
        iter: 0,
        trace,
        short_steps: 0,
    })
}

/// Quadratic model with Hessian `L I` interpolating the window.
pub fn build_model_k<T: Scalar>(
    state: &DfoState<T>,
    config: &DfoConfig<T>,
) -> Result<QuadModel<T>> {
    let n = state.window.dim();
    let h = DMatrix::<T>::identity(n, n) * config.lipschitz;
    quadratic_model(&state.window, &state.values, &h)
}

/// Gradient-error budget `E_k^U` for the current iteration.
pub fn select_budget<T: Scalar>(state: &DfoState<T>, config: &DfoConfig<T>) -> Result<T> {
    let floor = config.e_star(state.window.dim())?;
    match config.variant {
        Variant::Simplex => Ok(floor),
        Variant::Radial => {
            let g = simplex_gradient(&state.window, &state.values)?;
            Ok((g.norm() / config.budget_divisor).max(floor))
        }
    }
}

/// Duality-constraint context built from the `n_u` most recent points.
pub fn candidate_context<T: Scalar>(
    state: &DfoState<T>,
    config: &DfoConfig<T>,
) -> Result<CandidateContext<T>> {
    let n = state.window.dim();
    let anchors = state.window.points()[..n].to_vec();
    CandidateContext::new(
        anchors,
        config.lipschitz,
        config.delta,
        config.variant.bound_kind(),
    )
}

fn seed_box<T: Scalar>(window: &SampleSet<T>) -> Result<SeedBox<T>> {
    let pts = window.points();
    let count = T::from_usize(pts.len()).expect("count fits scalar");
    let center = pts
        .iter()
        .fold(DVector::zeros(window.dim()), |acc, p| acc + p)
        / count;
    let radius = sample_circumsphere(window)?.radius;
    Ok(SeedBox {
        center,
        half_width: radius * T::lit(2.0),
    })
}

fn solve_sides<T: Scalar>(
    state: &DfoState<T>,
    model: &QuadModel<T>,
    ctx: &CandidateContext<T>,
    budget: T,
    config: &DfoConfig<T>,
) -> Result<[Result<HalfSpaceSolution<T>>; 2]> {
    let sbox = seed_box(&state.window)?;
    let extra: Vec<DVector<T>> = model.stationary_point().into_iter().collect();
    let solve = |side| {
        solve_half_space(
            model,
            ctx,
            budget,
            side,
            &sbox,
            &extra,
            &config.solver,
            state.iter as u64,
        )
    };
    Ok([solve(Side::Plus), solve(Side::Minus)])
}

fn outcome<T: Scalar>(side: Side, r: &Result<HalfSpaceSolution<T>>) -> SideOutcome<T> {
    match r {
        Ok(s) => SideOutcome {
            side,
            point: Some(s.point.clone()),
            model_value: Some(s.model_value),
            starts: s.starts,
            bound_evals: s.bound_evals,
        },
        Err(_) => SideOutcome {
            side,
            point: None,
            model_value: None,
            starts: 0,
            bound_evals: 0,
        },
    }
}

/// One iteration: solve both half-space problems, accept the better
/// candidate (side `+` on ties within 1e-12), evaluate it and slide the
/// window.
pub fn step<T: Scalar>(
    state: &mut DfoState<T>,
    oracle: &mut NoisyOracle<T>,
    config: &DfoConfig<T>,
) -> Result<()> {
    let model = build_model_k(state, config)?;
    let ctx = candidate_context(state, config)?;
    let mut budget = select_budget(state, config)?;
    let mut retried = false;
    let mut results = solve_sides(state, &model, &ctx, budget, config)?;
    if results.iter().all(|r| r.is_err()) {
        budget *= config.budget_retry_factor;
        retried = true;
        results = solve_sides(state, &model, &ctx, budget, config)?;
    }
    for r in &results {
        match r {
            Ok(_) | Err(Error::Infeasible) => {}
            Err(e) => return Err(e.clone()),
        }
    }
    let chosen = match (&results[0], &results[1]) {
        (Ok(p), Ok(m)) => {
            if m.model_value < p.model_value - T::lit(1e-12) {
                m
            } else {
                p
            }
        }
        (Ok(p), Err(_)) => p,
        (Err(_), Ok(m)) => m,
        (Err(_), Err(_)) => {
            return Err(Error::BothSidesInfeasible {
                iter: state.iter,
                budget: budget.to_f64_lossy(),
            })
        }
    };

    let next = chosen.point.clone();
    let f_next = oracle.eval(&next);
    let n = state.window.dim();
    let mut points = Vec::with_capacity(n + 1);
    points.push(next.clone());
    points.extend(state.window.points()[..n].iter().cloned());
    let mut values = Vec::with_capacity(n + 1);
    values.push(f_next);
    values.extend_from_slice(&state.values[..n]);

    let step_len = (&next - state.current()).norm();
    state.short_steps = if step_len < config.step_tolerance {
        state.short_steps + 1
    } else {
        0
    };
    let record = IterateRecord {
        iter: state.iter + 1,
        point: next,
        model_value: chosen.model_value,
        f_noisy: f_next,
        budget,
        bound: chosen.bound,
        side: chosen.side,
        anchors: ctx.anchors().to_vec(),
        sides: [
            outcome(Side::Plus, &results[0]),
            outcome(Side::Minus, &results[1]),
        ],
        budget_retried: retried,
        eval_count: oracle.eval_count(),
    };
    state.window = SampleSet::new(points, 0)?;
    state.values = values;
    state.iter += 1;
    state.trace.push(record);
    Ok(())
}

/// Run stopped by an error, with the trace up to the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure<T: Scalar> {
    pub error: Error,
    pub trace: Option<IterateTrace<T>>,
}

impl<T: Scalar> std::fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl<T: Scalar> std::error::Error for RunFailure<T> {}

/// True once the last `n_u` steps were all shorter than the tolerance.
pub fn converged<T: Scalar>(state: &DfoState<T>) -> bool {
    state.short_steps >= state.window.dim()
}

/// Runs until convergence, `max_iters`, or `stop` returns true.
pub fn run_until<T: Scalar>(
    oracle: &mut NoisyOracle<T>,
    u0: &DVector<T>,
    config: &DfoConfig<T>,
    mut stop: impl FnMut(&DfoState<T>) -> bool,
) -> Result<IterateTrace<T>, RunFailure<T>> {
    let fail = |error, trace| RunFailure { error, trace };
    config.validate().map_err(|e| fail(e, None))?;
    let h = config.initial_step().map_err(|e| fail(e, None))?;
    let mut state = init_ffd(oracle, u0, h).map_err(|e| fail(e, None))?;
    while state.iter < config.max_iters && !converged(&state) && !stop(&state) {
        if let Err(e) = step(&mut state, oracle, config) {
            return Err(fail(e, Some(state.trace)));
        }
    }
    Ok(state.trace)
}

pub fn run<T: Scalar>(
    oracle: &mut NoisyOracle<T>,
    u0: &DVector<T>,
    config: &DfoConfig<T>,
) -> Result<IterateTrace<T>, RunFailure<T>> {
    run_until(oracle, u0, config, |_| false)
}

/// Recomputes `E(u_{k+1})` for a record from its stored anchors.
pub fn record_bound<T: Scalar>(record: &IterateRecord<T>, config: &DfoConfig<T>) -> Result<T> {
    let ctx = CandidateContext::new(
        record.anchors.clone(),
        config.lipschitz,
        config.delta,
        config.variant.bound_kind(),
    )?;
    candidate_bound(&ctx, &record.point)
}
