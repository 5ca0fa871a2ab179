//! Observables of a simulation: energies, integral balances, envelope
//! monitors, the external length scale, the entropy functional used for L^1
//! estimates of `k`, and power-law decay fits.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fields::{frobenius_sq, gradient, sym_gradient, ScalarField};
use crate::model::{signed_power, ComparisonEnvelope, Forcing, ModelParams, State};
use crate::timestepper::Trajectory;

/// Integrals needed by the balance identities that are not part of the
/// serialized record.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BalanceTerms {
    /// `int omega`
    pub omega_integral: f64,
    /// `nu0 int c_prod |D(u)|^2`, the source of `k` (equals `dissipation` when eps = 0)
    pub production: f64,
    /// Net rate of `int omega` from the eps damping and envelope source.
    pub eps_omega: f64,
    /// Net rate of `int k` from the eps damping and envelope source.
    pub eps_k: f64,
    /// Rate of `1/2 int |u|^2` from the eps terms (nonpositive).
    pub eps_u: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub e_kin: f64,
    pub e_turb: f64,
    pub dissipation: f64,
    pub sink_k: f64,
    pub sink_omega: f64,
    pub power_in: f64,
    pub min_omega: f64,
    pub max_omega: f64,
    pub min_k: f64,
    pub envelope_violation_omega_low: f64,
    pub envelope_violation_omega_high: f64,
    pub envelope_violation_k: f64,
    pub l_min: f64,
    pub guard_activations: u64,
    pub balance: BalanceTerms,
}

/// Decimal with 17 significant digits; non-finite values become `null`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

impl DiagnosticsRecord {
    /// One NDJSON line (without trailing newline).
    pub fn to_ndjson(&self) -> String {
        let fields: [(&str, f64); 14] = [
            ("t", self.t),
            ("E_kin", self.e_kin),
            ("E_turb", self.e_turb),
            ("dissipation", self.dissipation),
            ("sink_k", self.sink_k),
            ("sink_omega", self.sink_omega),
            ("power_in", self.power_in),
            ("min_omega", self.min_omega),
            ("max_omega", self.max_omega),
            ("min_k", self.min_k),
            ("envelope_violation_omega_low", self.envelope_violation_omega_low),
            ("envelope_violation_omega_high", self.envelope_violation_omega_high),
            ("envelope_violation_k", self.envelope_violation_k),
            ("L_min", self.l_min),
        ];
        let mut out = String::from("{");
        for (key, v) in fields {
            let _ = write!(out, "\"{key}\":{},", format_number(v));
        }
        let _ = write!(out, "\"guard_activations\":{}}}", self.guard_activations);
        out
    }

    /// Largest of the three envelope violation depths.
    pub fn max_violation(&self) -> f64 {
        self.envelope_violation_omega_low
            .max(self.envelope_violation_omega_high)
            .max(self.envelope_violation_k)
    }
}

/// Positive-part coefficient `k+ / (eps + omega+ + k_weight k+)`; NaN where the
/// unregularized denominator is not positive.
fn safe_coefficient(k: &ScalarField, omega: &ScalarField, params: &ModelParams, k_weight: f64) -> ScalarField {
    let eps = params.active_eps();
    k.zip_map(omega, |k, w| {
        let kp = k.max(0.0);
        let den = eps + w.max(0.0) + k_weight * kp;
        if params.regularized || w > 0.0 {
            kp / den
        } else {
            f64::NAN
        }
    })
}

/// Diagnostics of one state; `guard_activations` is left at zero for the caller.
pub fn record(state: &State, forcing: &Forcing, params: &ModelParams, env: &ComparisonEnvelope) -> DiagnosticsRecord {
    let grid = *state.grid();
    let t = state.t;
    let (u, omega, k) = (&state.u, &state.omega, &state.k);

    let strain = sym_gradient(u);
    let strain_sq = frobenius_sq(&strain);
    let eddy = safe_coefficient(k, omega, params, 0.0);
    let prod = safe_coefficient(k, omega, params, params.active_eps());
    let dissipation = params.nu0 * eddy.zip_map(&strain_sq, |a, s| a * s).integrate();
    let production = params.nu0 * prod.zip_map(&strain_sq, |a, s| a * s).integrate();

    let power_in = forcing.at(t, grid).map_or(0.0, |f| f.dot(u));

    let (lo, hi, ka) = (env.omega_lower(t, params), env.omega_upper(t, params), env.kappa(t, params));
    let l_min = if omega.min() > 0.0 {
        k.zip_map(omega, |k, w| k.max(0.0).sqrt() / w).min()
    } else {
        f64::NAN
    };

    let mut balance = BalanceTerms {
        omega_integral: omega.integrate(),
        production,
        ..BalanceTerms::default()
    };
    if params.regularized {
        let (eps, r) = (params.eps, params.r);
        let vol = grid.volume();
        balance.eps_omega = eps * (vol * lo.powf(r - 1.0) - omega.map(|w| signed_power(w, r)).integrate());
        balance.eps_k = eps * (vol * ka.powf(r - 1.0) - k.map(|v| signed_power(v, r)).integrate());
        let grad_part = strain_sq.map(|s| s.powf(0.5 * r)).integrate();
        let zero_part = u.magnitude().map(|m| m.powf(r)).integrate();
        balance.eps_u = -eps * (grad_part + zero_part);
    }

    DiagnosticsRecord {
        t,
        e_kin: 0.5 * u.norm_sq().integrate(),
        e_turb: k.integrate(),
        dissipation,
        sink_k: params.alpha2 * k.zip_map(omega, |k, w| k * w.max(0.0)).integrate(),
        sink_omega: params.alpha1 * omega.map(|w| w.max(0.0) * w).integrate(),
        power_in,
        min_omega: omega.min(),
        max_omega: omega.max(),
        min_k: k.min(),
        envelope_violation_omega_low: (lo - omega.min()).max(0.0),
        envelope_violation_omega_high: (omega.max() - hi).max(0.0),
        envelope_violation_k: (ka - k.min()).max(0.0),
        l_min,
        guard_activations: 0,
        balance,
    }
}

/// Closed time interval `[start, end]` selecting trajectory samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    /// The whole trajectory.
    pub fn all() -> Self {
        Self { start: f64::NEG_INFINITY, end: f64::INFINITY }
    }

    fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * (1.0 + t.abs());
        t >= self.start - slack && t <= self.end + slack
    }
}

fn window_records(traj: &Trajectory, window: Window, needed: usize) -> Result<Vec<&DiagnosticsRecord>> {
    let recs: Vec<_> = traj.records.iter().filter(|r| window.contains(r.t)).collect();
    if recs.len() < needed {
        return Err(Error::InsufficientSamples { needed, found: recs.len() });
    }
    Ok(recs)
}

/// Trapezoid rule of `f` over consecutive records.
fn trapezoid<F: Fn(&DiagnosticsRecord) -> f64>(recs: &[&DiagnosticsRecord], f: F) -> f64 {
    recs.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (f(w[0]) + f(w[1]))).sum()
}

/// `| int omega(t) - int omega(s) + int_s^t (sink_omega - eps_terms) |`
pub fn omega_balance_residual(traj: &Trajectory, window: Window) -> Result<f64> {
    let recs = window_records(traj, window, 2)?;
    let (first, last) = (recs[0], recs[recs.len() - 1]);
    let flux = trapezoid(&recs, |r| r.sink_omega - r.balance.eps_omega);
    Ok((last.balance.omega_integral - first.balance.omega_integral + flux).abs())
}

/// Returns `(|mu|, mu)` where `mu = int k(t) - int k(s) - int_s^t (production - sink_k + eps_terms)`
/// is the defect-measure proxy of the window.
pub fn k_balance_residual(traj: &Trajectory, window: Window) -> Result<(f64, f64)> {
    let recs = window_records(traj, window, 2)?;
    let (first, last) = (recs[0], recs[recs.len() - 1]);
    let flux = trapezoid(&recs, |r| r.balance.production - r.sink_k + r.balance.eps_k);
    let mu = last.e_turb - first.e_turb - flux;
    Ok((mu.abs(), mu))
}

/// Gap `RHS - LHS` of the mean-flow energy equality
/// `E(t) + int_s^t dissipation = E(s) + int_s^t power_in` (eps terms included on the right).
pub fn energy_gap(traj: &Trajectory, window: Window) -> Result<f64> {
    let recs = window_records(traj, window, 2)?;
    let (first, last) = (recs[0], recs[recs.len() - 1]);
    let rhs = first.e_kin + trapezoid(&recs, |r| r.power_in + r.balance.eps_u);
    let lhs = last.e_kin + trapezoid(&recs, |r| r.dissipation);
    Ok(rhs - lhs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceReport {
    pub window: Window,
    pub omega_balance_residual: f64,
    pub k_balance_residual: f64,
    pub mu_proxy: f64,
    pub energy_gap: f64,
    /// Time integrals of the eps contributions to the omega, k and energy balances.
    pub epsilon_corrections: [f64; 3],
}

pub fn balance_report(traj: &Trajectory, window: Window) -> Result<BalanceReport> {
    let recs = window_records(traj, window, 2)?;
    let (k_res, mu) = k_balance_residual(traj, window)?;
    Ok(BalanceReport {
        window,
        omega_balance_residual: omega_balance_residual(traj, window)?,
        k_balance_residual: k_res,
        mu_proxy: mu,
        energy_gap: energy_gap(traj, window)?,
        epsilon_corrections: [
            trapezoid(&recs, |r| r.balance.eps_omega),
            trapezoid(&recs, |r| r.balance.eps_k),
            trapezoid(&recs, |r| r.balance.eps_u),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthScaleCheck {
    pub l_min: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// `1/omega^* + alpha1 t <= 1/omega <= 1/omega_* + alpha1 t` everywhere.
    pub bracket_satisfied: bool,
}

/// Lower bound `sqrt(k_*)/omega^* (1 + alpha1 t omega^*)^(1 - alpha2/(2 alpha1))`
/// on the external length scale `sqrt(k)/omega`.
pub fn length_scale_bound(t: f64, env: &ComparisonEnvelope, params: &ModelParams) -> f64 {
    let s = 1.0 + params.alpha1 * t * env.omega_sup;
    env.k_star.sqrt() / env.omega_sup * s.powf(1.0 - params.alpha2 / (2.0 * params.alpha1))
}

pub fn length_scale_check(state: &State, env: &ComparisonEnvelope, params: &ModelParams) -> Result<LengthScaleCheck> {
    let min = state.omega.min();
    if !(min > 0.0) {
        return Err(Error::DegenerateOmega { min });
    }
    let t = state.t;
    let tol = 1e-12;
    let l_min = state.k.zip_map(&state.omega, |k, w| k.max(0.0).sqrt() / w).min();
    let bound = length_scale_bound(t, env, params);
    let lower = 1.0 / env.omega_sup + params.alpha1 * t;
    let upper = 1.0 / env.omega_star + params.alpha1 * t;
    let bracket_satisfied = state
        .omega
        .values()
        .iter()
        .all(|&w| 1.0 / w >= lower * (1.0 - tol) && 1.0 / w <= upper * (1.0 + tol));
    Ok(LengthScaleCheck { l_min, bound, satisfied: l_min >= bound * (1.0 - tol), bracket_satisfied })
}

/// `Phi(tau) = tau + (1 - (1 + tau)^(1 - delta)) / (1 - delta)`
pub fn entropy_phi(tau: f64, delta: f64) -> f64 {
    tau + (1.0 - (1.0 + tau).powf(1.0 - delta)) / (1.0 - delta)
}

/// Returns `(int Phi(k), int |grad k|^2 / (1 + k)^delta)`. Negative `k` is
/// taken by its positive part.
pub fn entropy_functional(k: &ScalarField, delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadDelta(delta));
    }
    let kp = k.map(|v| v.max(0.0));
    let phi = kp.map(|v| entropy_phi(v, delta)).integrate();
    let grad_sq = gradient(&kp).norm_sq();
    let weighted = grad_sq.zip_map(&kp, |g, v| g / (1.0 + v).powf(delta)).integrate();
    Ok((phi, weighted))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayQuantity {
    MeanK,
    MeanOmega,
    LMin,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    pub std_error: f64,
    pub window: Window,
    pub samples: usize,
}

/// Least-squares slope of `ln q` against `ln(1 + alpha1 omega^* t)`.
pub fn decay_fit(traj: &Trajectory, quantity: DecayQuantity, window: Window) -> Result<FitResult> {
    let recs = window_records(traj, window, 2)?;
    let (params, env) = (&traj.params, &traj.env);
    let vol = traj.volume();
    let mut xs = Vec::with_capacity(recs.len());
    let mut ys = Vec::with_capacity(recs.len());
    for r in &recs {
        let q = match quantity {
            DecayQuantity::MeanK => r.e_turb / vol,
            DecayQuantity::MeanOmega => r.balance.omega_integral / vol,
            DecayQuantity::LMin => r.l_min,
        };
        if !(q > 0.0) {
            return Err(Error::NonpositiveSamples { t: r.t, value: q });
        }
        xs.push((1.0 + params.alpha1 * env.omega_sup * r.t).ln());
        ys.push(q.ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientSamples { needed: 2, found: 1 });
    }
    let slope = sxy / sxx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let std_error = if xs.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(FitResult { exponent: slope, std_error, window, samples: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Grid, VectorField};
    use crate::model::{homogeneous_solution, HomogeneousIC};
    use std::f64::consts::PI;

    fn params(alpha2: f64) -> ModelParams {
        ModelParams { alpha2, ..ModelParams::default() }
    }

    fn fabricated(times: &[f64], make: impl Fn(f64) -> DiagnosticsRecord) -> Trajectory {
        Trajectory {
            times: times.to_vec(),
            states: Vec::new(),
            records: times.iter().map(|&t| make(t)).collect(),
            params: params(1.0),
            env: ComparisonEnvelope::new(1.0, 1.0, 1.0).unwrap(),
            grid: Grid::new(1, 4, 1.0).unwrap(),
        }
    }

    /// Records of the exact homogeneous solution on the unit interval.
    fn homogeneous_traj(times: &[f64], omega0: f64, alpha2: f64) -> Trajectory {
        let p = params(alpha2);
        let ic = HomogeneousIC { u_const: vec![0.0], omega0, k0: 1.0 };
        let mut traj = fabricated(times, |t| {
            let (_, w, k) = homogeneous_solution(t, &ic, &p);
            DiagnosticsRecord {
                t,
                e_turb: k,
                sink_k: alpha2 * k * w,
                sink_omega: w * w,
                l_min: k.sqrt() / w,
                balance: BalanceTerms { omega_integral: w, ..BalanceTerms::default() },
                ..DiagnosticsRecord::default()
            }
        });
        traj.params = p;
        traj.env = ComparisonEnvelope::new(omega0, omega0, 1.0).unwrap();
        traj
    }

    fn grid_times(end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| end * i as f64 / n as f64).collect()
    }

    #[test]
    fn record_of_unit_state() {
        let g = Grid::new(3, 4, 1.0).unwrap();
        let s = State::homogeneous(g, &HomogeneousIC { u_const: vec![0.0; 3], omega0: 1.0, k0: 1.0 }, 0.0);
        let p = params(1.3);
        let env = ComparisonEnvelope::new(1.0, 1.0, 1.0).unwrap();
        let r = record(&s, &Forcing::None, &p, &env);
        assert_eq!(r.e_kin, 0.0);
        assert!((r.e_turb - 1.0).abs() < 1e-14);
        assert!((r.sink_k - 1.3).abs() < 1e-14);
        assert_eq!(r.max_violation(), 0.0);
    }

    #[test]
    fn exact_solution_saturates_envelopes() {
        let g = Grid::new(2, 4, 1.0).unwrap();
        let p = params(10.0 / 7.0);
        let ic = HomogeneousIC { u_const: vec![0.0, 0.0], omega0: 2.0, k0: 0.5 };
        let env = ComparisonEnvelope::new(2.0, 2.0, 0.5).unwrap();
        for i in 0..20 {
            let t = 0.3 * i as f64;
            let (_, w, k) = homogeneous_solution(t, &ic, &p);
            let mut s = State::homogeneous(g, &HomogeneousIC { omega0: w, k0: k, ..ic.clone() }, t);
            s.t = t;
            let r = record(&s, &Forcing::None, &p, &env);
            assert!(r.max_violation() < 1e-15, "{}", r.max_violation());
            let c = length_scale_check(&s, &env, &p).unwrap();
            assert!(c.satisfied && c.bracket_satisfied);
            assert!((c.l_min / c.bound - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn length_scale_exponent_is_two_sevenths() {
        let p = params(10.0 / 7.0);
        let env = ComparisonEnvelope::new(1.0, 1.0, 1.0).unwrap();
        let (b1, b2) = (length_scale_bound(99.0, &env, &p), length_scale_bound(199.0, &env, &p));
        let exponent = (b2 / b1).ln() / 2f64.ln();
        assert!((exponent - 2.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn shear_mode_dissipation_matches_strain_integral() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let u = VectorField::new(vec![ScalarField::from_fn(g, |x| (2.0 * PI * x[1]).sin()), ScalarField::zeros(g)]).unwrap();
        let s = State { t: 0.0, u, omega: ScalarField::constant(g, 1.0), k: ScalarField::constant(g, 1.0), p: ScalarField::zeros(g) };
        let p = ModelParams { nu0: 0.3, ..ModelParams::default() };
        let r = record(&s, &Forcing::None, &p, &ComparisonEnvelope::new(1.0, 1.0, 1.0).unwrap());
        let expect = 0.3 * frobenius_sq(&sym_gradient(&s.u)).integrate();
        assert!((r.dissipation - expect).abs() < 1e-14);
        assert_eq!(r.dissipation, r.balance.production);
    }

    #[test]
    fn ndjson_line_has_exact_keys() {
        let r = DiagnosticsRecord { t: 0.1, l_min: f64::NAN, guard_activations: 3, ..DiagnosticsRecord::default() };
        let line = r.to_ndjson();
        assert!(line.starts_with("{\"t\":1.0000000000000001e-1,"));
        assert!(line.contains("\"L_min\":null"));
        assert!(line.ends_with("\"guard_activations\":3}"));
        let keys: Vec<&str> = line.split('"').skip(1).step_by(2).collect();
        assert_eq!(
            keys,
            [
                "t", "E_kin", "E_turb", "dissipation", "sink_k", "sink_omega", "power_in", "min_omega",
                "max_omega", "min_k", "envelope_violation_omega_low", "envelope_violation_omega_high",
                "envelope_violation_k", "L_min", "guard_activations"
            ]
        );
    }

    #[test]
    fn constant_trajectory_balances() {
        let traj = fabricated(&[0.0, 0.5, 1.0], |t| DiagnosticsRecord {
            t,
            e_turb: 2.0,
            balance: BalanceTerms { omega_integral: 3.0, ..BalanceTerms::default() },
            ..DiagnosticsRecord::default()
        });
        assert_eq!(omega_balance_residual(&traj, Window::all()).unwrap(), 0.0);
        assert_eq!(k_balance_residual(&traj, Window::all()).unwrap(), (0.0, 0.0));
        assert_eq!(energy_gap(&traj, Window::all()).unwrap(), 0.0);
        assert!(matches!(
            omega_balance_residual(&traj, Window::new(0.2, 0.4)),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn homogeneous_balance_is_quadrature_error() {
        let res = |n| omega_balance_residual(&homogeneous_traj(&grid_times(2.0, n), 1.0, 1.0), Window::all()).unwrap();
        let (r1, r2) = (res(40), res(80));
        assert!(r1 < 1e-3);
        assert!((r1 / r2 - 4.0).abs() < 0.2, "{}", r1 / r2);
        let (_, mu) = k_balance_residual(&homogeneous_traj(&grid_times(2.0, 400), 1.0, 10.0 / 7.0), Window::all()).unwrap();
        assert!(mu.abs() < 1e-4);
    }

    #[test]
    fn injected_k_jump_is_the_measure_mass() {
        let times = grid_times(1.0, 100);
        let traj = fabricated(&times, |t| {
            let k = 1.0 + if t > 0.5 { 0.1 } else { 0.0 };
            DiagnosticsRecord { t, e_turb: k, ..DiagnosticsRecord::default() }
        });
        let (_, mu) = k_balance_residual(&traj, Window::all()).unwrap();
        assert!((mu - 0.1).abs() < 1e-12);
    }

    #[test]
    fn reduced_dissipation_shows_as_gap() {
        let times = grid_times(1.0, 10);
        let traj = fabricated(&times, |t| DiagnosticsRecord {
            t,
            e_kin: 1.0 - t,
            dissipation: if (t - 0.5).abs() < 1e-9 { 0.6 } else { 1.0 },
            ..DiagnosticsRecord::default()
        });
        // trapezoid weight of the interior sample is 0.1
        let gap = energy_gap(&traj, Window::all()).unwrap();
        assert!((gap - 0.04).abs() < 1e-12, "{gap}");
    }

    #[test]
    fn entropy_values() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        assert_eq!(entropy_functional(&ScalarField::zeros(g), 0.5).unwrap(), (0.0, 0.0));
        assert_eq!(entropy_phi(3.0, 0.5), 1.0);
        assert!(matches!(entropy_functional(&ScalarField::zeros(g), 1.0), Err(Error::BadDelta(_))));
        assert!(entropy_functional(&ScalarField::zeros(g), 0.0).is_err());
    }

    #[test]
    fn fits_recover_exact_exponents() {
        let times = grid_times(50.0, 200);
        let traj = homogeneous_traj(&times, 1.0, 10.0 / 7.0);
        let w = Window::new(5.0, 50.0);
        let fk = decay_fit(&traj, DecayQuantity::MeanK, w).unwrap();
        assert!((fk.exponent + 10.0 / 7.0).abs() < 1e-10);
        let fw = decay_fit(&traj, DecayQuantity::MeanOmega, w).unwrap();
        assert!((fw.exponent + 1.0).abs() < 1e-10);
        let fl = decay_fit(&traj, DecayQuantity::LMin, w).unwrap();
        assert!((fl.exponent - 2.0 / 7.0).abs() < 1e-10);
        let flat = fabricated(&times, |t| DiagnosticsRecord { t, e_turb: 2.0, ..DiagnosticsRecord::default() });
        assert!(decay_fit(&flat, DecayQuantity::MeanK, w).unwrap().exponent.abs() < 1e-14);
        assert!(matches!(
            decay_fit(&flat, DecayQuantity::MeanOmega, w),
            Err(Error::NonpositiveSamples { .. })
        ));
    }
}
