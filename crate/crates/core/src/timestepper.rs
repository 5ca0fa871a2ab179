//! Time integration of the semi-discrete system.
//!
//! Two schemes are provided:
//!
//! * explicit SSP-RK2 (Heun), projecting the velocity after every stage and
//!   applying an optional positivity guard that clamps `omega` and `k` to the
//!   comparison envelopes (every activation is counted);
//! * implicit Euler solved by damped Picard iteration on the residual
//!   `(U - U_old)/dt + A(U) - F`, the discrete analogue of the abstract Cauchy
//!   problem `U' + A(U) = F` for the regularized system.

use crate::diagnostics::{record, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::fields::{
    frobenius_sq, leray_project, max_face_weight, sym_gradient, Grid, ScalarField, VectorField,
};
use crate::model::{rhs, rhs_split, ComparisonEnvelope, Forcing, ModelParams, Rhs, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ExplicitRk2,
    RothePicard,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub dt_max: f64,
    pub k_floor: f64,
    pub picard_max_iters: usize,
    pub picard_tol: f64,
    pub picard_damping: f64,
    /// Clamp `omega`/`k` to the envelopes after each explicit stage.
    pub guard: bool,
    pub guard_slack: f64,
    /// Number of dt halvings allowed after a rejected step.
    pub max_retries: usize,
    /// Keep full states at the sample times (records are always kept).
    pub keep_states: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::ExplicitRk2,
            cfl_safety: 0.4,
            dt_max: 1e-2,
            k_floor: 1e-14,
            picard_max_iters: 200,
            picard_tol: 1e-10,
            picard_damping: 0.7,
            guard: true,
            guard_slack: 0.05,
            max_retries: 10,
            keep_states: true,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| Err(Error::InvalidParameter { name, reason: reason.into() });
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad("cfl_safety", "must lie in (0, 1]");
        }
        if !(self.dt_max > 0.0) {
            return bad("dt_max", "must be positive");
        }
        if !(self.k_floor >= 0.0) {
            return bad("k_floor", "must be nonnegative");
        }
        if self.picard_max_iters == 0 {
            return bad("picard_max_iters", "must be at least 1");
        }
        if !(self.picard_tol > 0.0) {
            return bad("picard_tol", "must be positive");
        }
        if !(self.picard_damping > 0.0 && self.picard_damping <= 1.0) {
            return bad("picard_damping", "must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.guard_slack) {
            return bad("guard_slack", "must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Per-step bookkeeping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub guard_activations: u64,
    pub picard_iterations: usize,
}

/// Stable step size: `safety * min(h / max|u|, h^2 / (2 d D))`, capped by `dt_max`,
/// where `D` bounds the diffusivities of all three equations.
pub fn cfl_dt(state: &State, params: &ModelParams, cfg: &StepConfig) -> f64 {
    let g = state.grid();
    let h = g.h();
    let u_max = state.u.magnitude().max();
    let eddy_max = state
        .k
        .zip_map(&state.omega, |k, w| {
            let den = params.active_eps() + w.max(0.0);
            if den > 0.0 {
                k.max(0.0) / den
            } else {
                0.0
            }
        })
        .max();
    let mut diffusivity = params.nu0.max(params.nu1).max(params.nu2) * eddy_max;
    if params.regularized {
        let r = params.r;
        let strain_weight = frobenius_sq(&sym_gradient(&state.u)).map(|s| s.powf(0.5 * (r - 2.0))).max();
        let face = max_face_weight(&state.omega, r).max(max_face_weight(&state.k, r));
        diffusivity += params.eps * strain_weight.max(face);
    }
    let advective = h / (u_max + f64::MIN_POSITIVE);
    let diffusive = if diffusivity > 0.0 { h * h / (2.0 * g.dim() as f64 * diffusivity) } else { f64::INFINITY };
    (cfg.cfl_safety * advective.min(diffusive)).min(cfg.dt_max)
}

fn advance(state: &State, dt: f64, r: &Rhs) -> (VectorField, ScalarField, ScalarField) {
    let mut u = state.u.clone();
    u.axpy(dt, &r.du);
    let mut omega = state.omega.clone();
    omega.axpy(dt, &r.domega);
    let mut k = state.k.clone();
    k.axpy(dt, &r.dk);
    (u, omega, k)
}

/// Clamps `omega` and `k` from below at the (slackened) envelopes at time `t`.
fn apply_guard(
    omega: &mut ScalarField,
    k: &mut ScalarField,
    t: f64,
    params: &ModelParams,
    env: &ComparisonEnvelope,
    cfg: &StepConfig,
) -> u64 {
    let omega_floor = env.omega_lower(t, params) * (1.0 - cfg.guard_slack);
    let k_floor = cfg.k_floor.max(env.kappa(t, params) * (1.0 - cfg.guard_slack));
    let mut hits = 0;
    for w in omega.values_mut() {
        if *w < omega_floor {
            *w = omega_floor;
            hits += 1;
        }
    }
    for v in k.values_mut() {
        if *v < k_floor {
            *v = k_floor;
            hits += 1;
        }
    }
    if hits > 0 {
        log::debug!("positivity guard clamped {hits} values at t = {t}");
    }
    hits
}

/// One SSP-RK2 (Heun) step with projection after each stage.
pub fn step_explicit(
    state: &State,
    dt: f64,
    forcing: &Forcing,
    params: &ModelParams,
    env: &ComparisonEnvelope,
    cfg: &StepConfig,
) -> Result<(State, StepStats)> {
    let t_new = state.t + dt;
    let mut stats = StepStats::default();

    let stage = |u: VectorField, mut omega: ScalarField, mut k: ScalarField, stats: &mut StepStats| {
        let (u, p) = leray_project(&u);
        if cfg.guard {
            stats.guard_activations += apply_guard(&mut omega, &mut k, t_new, params, env, cfg);
        }
        State { t: t_new, u, omega, k, p }
    };

    let r0 = rhs(state, state.t, forcing, params, env)?;
    let (u1, w1, k1) = advance(state, dt, &r0);
    let s1 = stage(u1, w1, k1, &mut stats);
    if !s1.is_finite() {
        return Err(Error::StepRejected { t: state.t, dt });
    }

    let r1 = rhs(&s1, t_new, forcing, params, env)?;
    let (mut u2, mut w2, mut k2) = advance(&s1, dt, &r1);
    u2.axpy(1.0, &state.u);
    w2.axpy(1.0, &state.omega);
    k2.axpy(1.0, &state.k);
    let s2 = stage(u2.scaled(0.5), w2.scaled(0.5), k2.scaled(0.5), &mut stats);
    if !s2.is_finite() {
        return Err(Error::StepRejected { t: state.t, dt });
    }
    Ok((s2, stats))
}

/// Implicit Euler residual `(U - U_old)/dt + A(U) - F` at time `U_old.t + dt`,
/// with `A = -(operator part of the rhs)` and `F` the force and envelope
/// sources. The velocity component is projected onto divergence-free fields.
pub fn operator_apply(
    candidate: &State,
    old: &State,
    dt: f64,
    forcing: &Forcing,
    params: &ModelParams,
    env: &ComparisonEnvelope,
) -> Result<Rhs> {
    let t_new = old.t + dt;
    let (op, sources) = rhs_split(candidate, t_new, forcing, params, env)?;
    let inv = 1.0 / dt;
    let mut du = candidate.u.clone();
    du.axpy(-1.0, &old.u);
    let mut du = du.scaled(inv);
    du.axpy(-1.0, &op.du);
    du.axpy(-1.0, &sources.du);
    let (du, _) = leray_project(&du);

    let residual = |c: &ScalarField, o: &ScalarField, a: &ScalarField, f: &ScalarField| {
        let mut r = c.clone();
        r.axpy(-1.0, o);
        let mut r = r.scaled(inv);
        r.axpy(-1.0, a);
        r.axpy(-1.0, f);
        r
    };
    Ok(Rhs {
        du,
        domega: residual(&candidate.omega, &old.omega, &op.domega, &sources.domega),
        dk: residual(&candidate.k, &old.k, &op.dk, &sources.dk),
    })
}

/// `<A(U), U>` in the discrete inner product, the quantity bounded from below
/// by the coercivity estimate of the regularized operator.
pub fn operator_pairing(state: &State, params: &ModelParams, env: &ComparisonEnvelope) -> Result<f64> {
    let (op, _) = rhs_split(state, state.t, &Forcing::None, params, env)?;
    Ok(-(state.u.dot(&op.du) + state.omega.dot(&op.domega) + state.k.dot(&op.dk)))
}

fn triple_norm(u: &VectorField, omega: &ScalarField, k: &ScalarField) -> f64 {
    (u.dot(u) + omega.dot(omega) + k.dot(k)).sqrt()
}

/// Implicit Euler step solved by damped Picard iteration
/// `U <- U - damping * dt * residual(U)`, converged once
/// `||dt * residual|| <= picard_tol * ||U||`.
pub fn step_rothe(
    state: &State,
    dt: f64,
    forcing: &Forcing,
    params: &ModelParams,
    env: &ComparisonEnvelope,
    cfg: &StepConfig,
) -> Result<(State, StepStats)> {
    if !params.regularized {
        return Err(Error::NotRegularized);
    }
    if dt == 0.0 {
        return Ok((state.clone(), StepStats { guard_activations: 0, picard_iterations: 1 }));
    }
    let mut iterate = State { t: state.t + dt, ..state.clone() };
    let mut rel = f64::INFINITY;
    for iter in 1..=cfg.picard_max_iters {
        let res = operator_apply(&iterate, state, dt, forcing, params, env)?;
        let scale = triple_norm(&iterate.u, &iterate.omega, &iterate.k).max(f64::MIN_POSITIVE);
        rel = dt * triple_norm(&res.du, &res.domega, &res.dk) / scale;
        if !rel.is_finite() {
            return Err(Error::StepRejected { t: state.t, dt });
        }
        if rel <= cfg.picard_tol {
            return Ok((iterate, StepStats { guard_activations: 0, picard_iterations: iter }));
        }
        let step = -cfg.picard_damping * dt;
        let mut u = iterate.u.clone();
        u.axpy(step, &res.du);
        let (u, p) = leray_project(&u);
        iterate.u = u;
        iterate.p = p;
        iterate.omega.axpy(step, &res.domega);
        iterate.k.axpy(step, &res.dk);
    }
    Err(Error::PicardDiverged { iters: cfg.picard_max_iters, residual: rel })
}

/// Samples of one run. `states` is empty when the run was configured not to keep them.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub records: Vec<DiagnosticsRecord>,
    pub params: ModelParams,
    pub env: ComparisonEnvelope,
    pub grid: Grid,
}

impl Trajectory {
    pub fn volume(&self) -> f64 {
        self.grid.volume()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&State> {
        self.states.last()
    }
}

fn is_retryable(e: &Error) -> bool {
    matches!(e, Error::StepRejected { .. } | Error::PicardDiverged { .. } | Error::DegenerateOmega { .. })
}

/// Takes one step of the configured scheme, halving `dt` on rejection.
fn step_with_retries(
    state: &State,
    mut dt: f64,
    forcing: &Forcing,
    params: &ModelParams,
    env: &ComparisonEnvelope,
    cfg: &StepConfig,
) -> Result<(State, StepStats, f64)> {
    let mut attempt = 0;
    loop {
        let result = match cfg.scheme {
            Scheme::ExplicitRk2 => step_explicit(state, dt, forcing, params, env, cfg),
            Scheme::RothePicard => step_rothe(state, dt, forcing, params, env, cfg),
        };
        match result {
            Ok((s, stats)) => return Ok((s, stats, dt)),
            Err(e) if is_retryable(&e) && attempt < cfg.max_retries => {
                log::warn!("step at t = {} with dt = {dt:e} rejected ({e}); halving", state.t);
                dt *= 0.5;
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Integrates from `initial.t` to `t_end`, recording diagnostics at
/// `initial.t + m * sample_every` and at `t_end`. Steps are shortened to land
/// exactly on every sample time.
pub fn run(
    initial: &State,
    t_end: f64,
    forcing: &Forcing,
    params: &ModelParams,
    env: &ComparisonEnvelope,
    cfg: &StepConfig,
    sample_every: f64,
) -> Result<Trajectory> {
    params.validate()?;
    env.validate()?;
    cfg.validate()?;
    if !(sample_every > 0.0) {
        return Err(Error::InvalidParameter { name: "sample_every", reason: "must be positive".into() });
    }
    if t_end < initial.t {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("{t_end} precedes the initial time {}", initial.t),
        });
    }

    let grid = *initial.grid();
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        records: Vec::new(),
        params: *params,
        env: *env,
        grid,
    };
    let push = |traj: &mut Trajectory, s: &State, guard: u64| {
        let mut rec = record(s, forcing, params, env);
        rec.guard_activations = guard;
        traj.times.push(s.t);
        traj.records.push(rec);
        if cfg.keep_states {
            traj.states.push(s.clone());
        }
    };

    let mut state = initial.clone();
    push(&mut traj, &state, 0);
    let t0 = initial.t;
    let mut m = 1u64;
    while state.t < t_end {
        let mut boundary = (t0 + m as f64 * sample_every).min(t_end);
        if t_end - boundary < 1e-9 * sample_every {
            boundary = t_end;
        }
        let mut guard = 0;
        while state.t < boundary {
            let remaining = boundary - state.t;
            let dt = cfl_dt(&state, params, cfg).min(remaining);
            let (mut next, stats, taken) = step_with_retries(&state, dt, forcing, params, env, cfg)?;
            if taken >= remaining {
                next.t = boundary;
            }
            guard += stats.guard_activations;
            state = next;
        }
        push(&mut traj, &state, guard);
        m += 1;
    }
    Ok(traj)
}
