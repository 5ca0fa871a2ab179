//! Scaling group of the two-equation model.
//!
//! Under `t -> t/alpha`, `x -> x/beta`, `u -> gamma u`, `omega -> rho omega`,
//! `k -> sigma k` the system with coefficients `d_i = D_i omega^-A k^B` and
//! `g_m = G_m omega^A k^(1-B)` is invariant when `alpha = beta gamma`,
//! `sigma = gamma^2` and `beta = rho^A gamma^(1-2B)`. For Kolmogorov's choice
//! `A = B = 1` this is the two-parameter family
//! `(rho, gamma) -> (rho, rho/gamma, gamma, rho, gamma^2)`.

use std::fmt::Write as _;

use crate::diagnostics::{format_number, record};
use crate::error::{Error, Result};
use crate::fields::{leray_project, resample, Grid, ScalarField, VectorField};
use crate::model::{rhs, ComparisonEnvelope, Forcing, ModelParams, State};
use crate::timestepper::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rho: f64,
    pub sigma: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonpositiveParameter { name, value })
    }
}

/// `beta = rho^A gamma^(1 - 2B)`
pub fn beta_general(a: f64, b: f64, rho: f64, gamma: f64) -> Result<f64> {
    positive("A", a)?;
    positive("B", b)?;
    positive("rho", rho)?;
    positive("gamma", gamma)?;
    Ok(rho.powf(a) * gamma.powf(1.0 - 2.0 * b))
}

/// Kolmogorov family `(alpha, beta, gamma, rho, sigma) = (rho, rho/gamma, gamma, rho, gamma^2)`.
pub fn family_from(rho: f64, gamma: f64) -> Result<ScalingParams> {
    positive("rho", rho)?;
    positive("gamma", gamma)?;
    Ok(ScalingParams { alpha: rho, beta: rho / gamma, gamma, rho, sigma: gamma * gamma })
}

impl ScalingParams {
    /// Family for general exponents: `beta` from [`beta_general`], `alpha = beta gamma`, `sigma = gamma^2`.
    pub fn general(a: f64, b: f64, rho: f64, gamma: f64) -> Result<Self> {
        let beta = beta_general(a, b, rho, gamma)?;
        Ok(Self { alpha: beta * gamma, beta, gamma, rho, sigma: gamma * gamma })
    }

    pub fn identity() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma: 1.0, rho: 1.0, sigma: 1.0 }
    }

    /// Componentwise product, the parameters of applying both scalings.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            alpha: self.alpha * other.alpha,
            beta: self.beta * other.beta,
            gamma: self.gamma * other.gamma,
            rho: self.rho * other.rho,
            sigma: self.sigma * other.sigma,
        }
    }
}

/// Coefficient family `d_i = D_i omega^-A k^B` (i = 1..3), `g_m = G_m omega^A k^(1-B)` (m = 2, 3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientFamily {
    pub a: f64,
    pub b: f64,
    pub d: [f64; 3],
    pub g: [f64; 2],
}

impl CoefficientFamily {
    pub fn kolmogorov(params: &ModelParams) -> Self {
        Self { a: 1.0, b: 1.0, d: [params.nu0, params.nu1, params.nu2], g: [params.alpha1, params.alpha2] }
    }

    pub fn diffusion(&self, i: usize, omega: f64, k: f64) -> f64 {
        self.d[i] * omega.powf(-self.a) * k.powf(self.b)
    }

    pub fn reaction(&self, m: usize, omega: f64, k: f64) -> f64 {
        self.g[m] * omega.powf(self.a) * k.powf(1.0 - self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientResiduals {
    /// max `|beta^2 d_i(rho omega, sigma k) / (alpha d_i(omega, k)) - 1|`
    pub diffusion: f64,
    /// max `|g_m(rho omega, sigma k) / (alpha g_m(omega, k)) - 1|`
    pub reaction: f64,
}

impl CoefficientResiduals {
    pub fn max(&self) -> f64 {
        self.diffusion.max(self.reaction)
    }
}

pub fn coefficient_invariance_residuals(
    fam: &CoefficientFamily,
    sp: &ScalingParams,
    samples: &[(f64, f64)],
) -> Result<CoefficientResiduals> {
    let mut out = CoefficientResiduals { diffusion: 0.0, reaction: 0.0 };
    for &(omega, k) in samples {
        if !(omega > 0.0 && k > 0.0) {
            return Err(Error::NonpositiveSample { omega, k });
        }
        let (w2, k2) = (sp.rho * omega, sp.sigma * k);
        for i in 0..3 {
            let lhs = sp.beta * sp.beta * fam.diffusion(i, w2, k2);
            let rhs = sp.alpha * fam.diffusion(i, omega, k);
            out.diffusion = out.diffusion.max((lhs / rhs - 1.0).abs());
        }
        for m in 0..2 {
            let lhs = fam.reaction(m, w2, k2);
            let rhs = sp.alpha * fam.reaction(m, omega, k);
            out.reaction = out.reaction.max((lhs / rhs - 1.0).abs());
        }
    }
    Ok(out)
}

/// Rescaled state `(gamma u, rho omega, sigma k)(beta x, alpha t)` on `target`,
/// whose side must equal `side / beta`. Time becomes `t / alpha`; the pressure
/// is rescaled by `gamma^2`.
pub fn transform_state(state: &State, sp: &ScalingParams, target: Grid) -> Result<State> {
    let src = state.grid();
    let expected = src.side() / sp.beta;
    if target.dim() != src.dim() || (target.side() - expected).abs() > 1e-12 * expected {
        return Err(Error::IncompatibleGrid(format!(
            "target side {} (dim {}) but the scaled domain has side {expected} (dim {})",
            target.side(),
            target.dim(),
            src.dim()
        )));
    }
    let map = |f: &ScalarField, c: f64| -> Result<ScalarField> { Ok(resample(f, target)?.scaled(c)) };
    let comps = state.u.components().iter().map(|c| map(c, sp.gamma)).collect::<Result<Vec<_>>>()?;
    Ok(State {
        t: state.t / sp.alpha,
        u: VectorField::new(comps)?,
        omega: map(&state.omega, sp.rho)?,
        k: map(&state.k, sp.sigma)?,
        p: map(&state.p, sp.gamma * sp.gamma)?,
    })
}

/// L2-in-space, max-over-interior-samples residual norms of the three equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeResidual {
    pub u: f64,
    pub omega: f64,
    pub k: f64,
}

/// Residual of the model equations along a sampled trajectory: time
/// derivatives by three-point differences on the sample grid, spatial terms by
/// [`rhs`]. Endpoint samples only enter the differences. The velocity residual
/// is projected, removing the pressure gradient.
pub fn pde_residual(traj: &Trajectory, params: &ModelParams, forcing: &Forcing) -> Result<PdeResidual> {
    let states = &traj.states;
    if states.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, found: states.len() });
    }
    let mut out = PdeResidual { u: 0.0, omega: 0.0, k: 0.0 };
    for j in 1..states.len() - 1 {
        let (a, b, c) = (&states[j - 1], &states[j], &states[j + 1]);
        let (h1, h2) = (b.t - a.t, c.t - b.t);
        let wa = -h2 / (h1 * (h1 + h2));
        let wb = (h2 - h1) / (h1 * h2);
        let wc = h1 / (h2 * (h1 + h2));
        let ddt = |fa: &ScalarField, fb: &ScalarField, fc: &ScalarField| {
            let mut d = fa.scaled(wa);
            d.axpy(wb, fb);
            d.axpy(wc, fc);
            d
        };
        let r = rhs(b, b.t, forcing, params, &traj.env)?;

        let comps = (0..b.grid().dim())
            .map(|i| {
                let mut d = ddt(a.u.component(i), b.u.component(i), c.u.component(i));
                d.axpy(-1.0, r.du.component(i));
                d
            })
            .collect();
        let (res_u, _) = leray_project(&VectorField::new(comps)?);
        let mut res_w = ddt(&a.omega, &b.omega, &c.omega);
        res_w.axpy(-1.0, &r.domega);
        let mut res_k = ddt(&a.k, &b.k, &c.k);
        res_k.axpy(-1.0, &r.dk);

        out.u = out.u.max(res_u.dot(&res_u).sqrt());
        out.omega = out.omega.max(res_w.dot(&res_w).sqrt());
        out.k = out.k.max(res_k.dot(&res_k).sqrt());
    }
    Ok(out)
}

/// Applies `sp` to every sample of `traj`. Envelope bounds are rescaled
/// (`omega` bounds by `rho`, `k_*` by `sigma`).
pub fn transform_trajectory(traj: &Trajectory, sp: &ScalingParams) -> Result<Trajectory> {
    let src = traj.grid;
    let target = Grid::new(src.dim(), src.n(), src.side() / sp.beta)?;
    let env = ComparisonEnvelope::new(traj.env.omega_star * sp.rho, traj.env.omega_sup * sp.rho, traj.env.k_star * sp.sigma)?;
    let states = traj.states.iter().map(|s| transform_state(s, sp, target)).collect::<Result<Vec<_>>>()?;
    let records = states.iter().map(|s| record(s, &Forcing::None, &traj.params, &env)).collect();
    Ok(Trajectory {
        times: states.iter().map(|s| s.t).collect(),
        states,
        records,
        params: traj.params,
        env,
        grid: target,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvarianceReport {
    pub scaling: ScalingParams,
    pub original: PdeResidual,
    pub transformed: PdeResidual,
    /// Original residuals multiplied by the factors an exact invariance predicts.
    pub scaled_original: PdeResidual,
    /// Round-off level of the transformed residuals, see [`roundoff_floor`].
    pub floor: PdeResidual,
    pub pass: bool,
}

/// Allowed ratio between transformed and predicted residual.
pub const INVARIANCE_FACTOR: f64 = 3.0;
/// Relative size of round-off in the sampled time differences.
const ROUNDOFF: f64 = 1e-10;

/// Residual level indistinguishable from round-off: `ROUNDOFF * max ||f|| / min dt`
/// per equation over the samples.
pub fn roundoff_floor(traj: &Trajectory) -> PdeResidual {
    let dt = traj.times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let norm = |f: &ScalarField| f.dot(f).sqrt();
    let mut out = PdeResidual { u: 0.0, omega: 0.0, k: 0.0 };
    for s in &traj.states {
        out.u = out.u.max(s.u.dot(&s.u).sqrt());
        out.omega = out.omega.max(norm(&s.omega));
        out.k = out.k.max(norm(&s.k));
    }
    let c = ROUNDOFF / dt;
    PdeResidual { u: c * out.u, omega: c * out.omega, k: c * out.k }
}

impl InvarianceReport {
    pub fn ratio(&self) -> PdeResidual {
        let r = |t: f64, s: f64| if s > 0.0 { t / s } else if t == 0.0 { 1.0 } else { f64::INFINITY };
        PdeResidual {
            u: r(self.transformed.u, self.scaled_original.u),
            omega: r(self.transformed.omega, self.scaled_original.omega),
            k: r(self.transformed.k, self.scaled_original.k),
        }
    }

    /// Largest ratio among the equations whose transformed residual exceeds round-off.
    pub fn worst_ratio(&self) -> f64 {
        let r = self.ratio();
        [(r.u, self.transformed.u, self.floor.u), (r.omega, self.transformed.omega, self.floor.omega), (r.k, self.transformed.k, self.floor.k)]
            .iter()
            .filter(|(_, t, f)| t > f)
            .map(|(r, _, _)| *r)
            .fold(1.0, f64::max)
    }

    pub fn to_ndjson(&self) -> String {
        let sp = &self.scaling;
        let ratio = self.ratio();
        let fields = [
            ("alpha", sp.alpha),
            ("beta", sp.beta),
            ("gamma", sp.gamma),
            ("rho", sp.rho),
            ("sigma", sp.sigma),
            ("residual_u", self.original.u),
            ("residual_omega", self.original.omega),
            ("residual_k", self.original.k),
            ("transformed_u", self.transformed.u),
            ("transformed_omega", self.transformed.omega),
            ("transformed_k", self.transformed.k),
            ("scaled_u", self.scaled_original.u),
            ("scaled_omega", self.scaled_original.omega),
            ("scaled_k", self.scaled_original.k),
            ("ratio_u", ratio.u),
            ("ratio_omega", ratio.omega),
            ("ratio_k", ratio.k),
        ];
        let mut out = String::from("{");
        for (key, v) in fields {
            let _ = write!(out, "\"{key}\":{},", format_number(v));
        }
        let _ = write!(out, "\"pass\":{}}}", self.pass);
        out
    }
}

/// Transforms `traj` by `sp` and compares the residuals of the transformed
/// trajectory with the original ones rescaled by `alpha gamma`, `alpha rho`,
/// `alpha sigma` (per equation) and `beta^(-d/2)` (L2 norm on the shrunken box).
pub fn invariance_experiment(traj: &Trajectory, sp: &ScalingParams, params: &ModelParams) -> Result<InvarianceReport> {
    let original = pde_residual(traj, params, &Forcing::None)?;
    let mapped = transform_trajectory(traj, sp)?;
    let transformed = pde_residual(&mapped, params, &Forcing::None)?;
    let volume = sp.beta.powf(-0.5 * traj.grid.dim() as f64);
    let scaled_original = PdeResidual {
        u: original.u * sp.alpha * sp.gamma * volume,
        omega: original.omega * sp.alpha * sp.rho * volume,
        k: original.k * sp.alpha * sp.sigma * volume,
    };
    let floor = roundoff_floor(&mapped);
    let ok = |t: f64, s: f64, f: f64| t <= INVARIANCE_FACTOR * s || t <= f;
    let pass = ok(transformed.u, scaled_original.u, floor.u)
        && ok(transformed.omega, scaled_original.omega, floor.omega)
        && ok(transformed.k, scaled_original.k, floor.k);
    Ok(InvarianceReport { scaling: *sp, original, transformed, scaled_original, floor, pass })
}

/// Samples of the exact homogeneous solution as a trajectory, for residual checks.
pub fn homogeneous_trajectory(
    grid: Grid,
    ic: &crate::model::HomogeneousIC,
    params: &ModelParams,
    times: &[f64],
) -> Result<Trajectory> {
    let env = ComparisonEnvelope::new(ic.omega0, ic.omega0, ic.k0)?;
    let states: Vec<State> = times
        .iter()
        .map(|&t| {
            let (u, omega, k) = crate::model::homogeneous_solution(t, ic, params);
            State::homogeneous(grid, &crate::model::HomogeneousIC { u_const: u, omega0: omega, k0: k }, t)
        })
        .collect();
    let records = states.iter().map(|s| record(s, &Forcing::None, params, &env)).collect();
    Ok(Trajectory { times: times.to_vec(), states, records, params: *params, env, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HomogeneousIC;
    use std::f64::consts::PI;

    #[test]
    fn family_values() {
        let sp = family_from(4.0, 2.0).unwrap();
        assert_eq!((sp.alpha, sp.beta, sp.sigma), (4.0, 2.0, 4.0));
        assert_eq!(family_from(1.0, 1.0).unwrap(), ScalingParams::identity());
        let sp = family_from(9.0, 3.0).unwrap();
        assert_eq!(sp.beta, sp.gamma);
        assert!(matches!(family_from(-1.0, 1.0), Err(Error::NonpositiveParameter { .. })));
    }

    #[test]
    fn general_beta() {
        assert_eq!(beta_general(1.0, 1.0, 6.0, 3.0).unwrap(), 2.0);
        assert!((beta_general(0.7, 1.3, 1.0, 2.5).unwrap() - 2.5f64.powf(1.0 - 2.6)).abs() < 1e-15);
        assert_eq!(beta_general(2.0, 0.5, 3.0, 7.0).unwrap(), 9.0);
        assert!(beta_general(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn kolmogorov_coefficients_are_invariant() {
        let fam = CoefficientFamily::kolmogorov(&ModelParams::default());
        let sp = family_from(4.0, 2.0).unwrap();
        let r = coefficient_invariance_residuals(&fam, &sp, &[(1.0, 1.0)]).unwrap();
        assert!(r.max() < 1e-15);
        let id = coefficient_invariance_residuals(&fam, &ScalingParams::identity(), &[(0.3, 2.0)]).unwrap();
        assert_eq!(id.max(), 0.0);
        assert!(coefficient_invariance_residuals(&fam, &sp, &[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn wrong_sigma_is_detected() {
        let fam = CoefficientFamily { a: 0.8, b: 1.7, d: [1.0, 2.0, 0.5], g: [1.0, 1.5] };
        let mut sp = ScalingParams::general(0.8, 1.7, 2.0, 1.4).unwrap();
        sp.sigma *= 1.1;
        let r = coefficient_invariance_residuals(&fam, &sp, &[(0.7, 1.9)]).unwrap();
        assert!((r.diffusion - (1.1f64.powf(1.7) - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn transform_identity_is_exact() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let s = State {
            t: 0.3,
            u: VectorField::new(vec![ScalarField::from_fn(g, |x| x[0].sin()), ScalarField::from_fn(g, |x| x[1])]).unwrap(),
            omega: ScalarField::from_fn(g, |x| 1.0 + x[0] * x[1]),
            k: ScalarField::constant(g, 0.4),
            p: ScalarField::zeros(g),
        };
        assert_eq!(transform_state(&s, &ScalingParams::identity(), g).unwrap(), s);
    }

    #[test]
    fn transform_homogeneous_state() {
        let g = Grid::new(2, 8, 2.0).unwrap();
        let s = State::homogeneous(g, &HomogeneousIC { u_const: vec![0.5, -1.0], omega0: 2.0, k0: 3.0 }, 1.0);
        let sp = family_from(3.0, 1.5).unwrap();
        let target = Grid::new(2, 16, 2.0 / sp.beta).unwrap();
        let out = transform_state(&s, &sp, target).unwrap();
        assert!((out.t - 1.0 / 3.0).abs() < 1e-15);
        assert!(out.u.component(0).values().iter().all(|v| (v - 0.75).abs() < 1e-14));
        assert!(out.omega.values().iter().all(|v| (v - 6.0).abs() < 1e-14));
        assert!(out.k.values().iter().all(|v| (v - 3.0 * 2.25).abs() < 1e-13));
        let wrong = Grid::new(2, 16, 2.0).unwrap();
        assert!(matches!(transform_state(&s, &sp, wrong), Err(Error::IncompatibleGrid(_))));
    }

    #[test]
    fn transform_single_mode_matches_analytic() {
        // beta = 2 on an n -> n grid: the profile sin(2 pi m x / l) evaluated at 2x
        let (l, m) = (1.0, 3.0);
        let g = Grid::new(1, 32, l).unwrap();
        let f = |x: f64| (2.0 * PI * m * x / l).sin();
        let s = State {
            t: 0.0,
            u: VectorField::new(vec![ScalarField::from_fn(g, |x| f(x[0]))]).unwrap(),
            omega: ScalarField::constant(g, 1.0),
            k: ScalarField::constant(g, 1.0),
            p: ScalarField::zeros(g),
        };
        let sp = ScalingParams { alpha: 1.0, beta: 2.0, gamma: 1.0, rho: 1.0, sigma: 1.0 };
        let target = Grid::new(1, 32, l / 2.0).unwrap();
        let out = transform_state(&s, &sp, target).unwrap();
        let exact = ScalarField::from_fn(target, |x| f(2.0 * x[0]));
        assert!(out.u.component(0).zip_map(&exact, |a, b| (a - b).abs()).max() < 1e-12);
    }

    #[test]
    fn homogeneous_residual_is_second_order_in_sampling() {
        let g = Grid::new(1, 4, 1.0).unwrap();
        let p = ModelParams { alpha2: 10.0 / 7.0, ..ModelParams::default() };
        let ic = HomogeneousIC { u_const: vec![0.0], omega0: 1.0, k0: 1.0 };
        let res = |n: usize| {
            let times: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
            pde_residual(&homogeneous_trajectory(g, &ic, &p, &times).unwrap(), &p, &Forcing::None).unwrap()
        };
        let (a, b) = (res(20), res(40));
        assert_eq!(a.u, 0.0);
        assert!((a.omega / b.omega - 4.0).abs() < 0.8, "{}", a.omega / b.omega);
        assert!((a.k / b.k - 4.0).abs() < 0.8, "{}", a.k / b.k);
    }

    #[test]
    fn identity_invariance_passes() {
        let g = Grid::new(1, 4, 1.0).unwrap();
        let p = ModelParams::default();
        let ic = HomogeneousIC { u_const: vec![0.2], omega0: 1.0, k0: 1.0 };
        let times: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
        let traj = homogeneous_trajectory(g, &ic, &p, &times).unwrap();
        let rep = invariance_experiment(&traj, &ScalingParams::identity(), &p).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.transformed, rep.original);
    }

    #[test]
    fn transformed_homogeneous_energy_balance() {
        // d/dt int k + alpha2 int omega k = 0 for the transformed exact solution
        let p = ModelParams { alpha2: 10.0 / 7.0, ..ModelParams::default() };
        let ic = HomogeneousIC { u_const: vec![0.0], omega0: 1.3, k0: 0.8 };
        let sp = family_from(2.5, 0.7).unwrap();
        let vol = 1.0 / sp.beta;
        let at = |t: f64| {
            let (_, w, k) = crate::model::homogeneous_solution(sp.alpha * t, &ic, &p);
            (sp.rho * w, sp.sigma * k)
        };
        let (t, dt) = (0.4, 1e-4);
        let dk = (at(t + dt).1 - at(t - dt).1) / (2.0 * dt) * vol;
        let (w, k) = at(t);
        assert!((dk + p.alpha2 * w * k * vol).abs() < 1e-7);
    }
}
