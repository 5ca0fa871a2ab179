//! The canonical experiments behind the `kolmo-box` subcommands.
//!
//! Every command writes `summary.json` into the output directory and returns
//! the summary; `series.ndjson` holds the diagnostics of the primary run.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use kolmo_core::diagnostics::{balance_report, decay_fit, DecayQuantity, Window};
use kolmo_core::fields::divergence;
use kolmo_core::model::HomogeneousIC;
use kolmo_core::scaling::{
    coefficient_invariance_residuals, homogeneous_trajectory, invariance_experiment, family_from,
    CoefficientFamily, ScalingParams, INVARIANCE_FACTOR,
};
use kolmo_core::snapshot;
use kolmo_core::timestepper::{run, StepConfig, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, InitialCondition, RunConfig};
use crate::summary::VerificationSummary;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] kolmo_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exponent tolerance of the decay fits.
pub const EXPONENT_TOLERANCE: f64 = 0.02;
/// Slack on the external length scale exponent.
pub const LENGTH_EXPONENT_SLACK: f64 = 0.05;
/// Required shrink factor of residuals under one refinement.
pub const REFINEMENT_FACTOR: f64 = 1.5;
/// Envelope violations allowed, relative to the field scale.
pub const ENVELOPE_TOLERANCE: f64 = 1e-3;
/// Residuals below this fraction of their scale count as exact zeros.
const ROUNDOFF: f64 = 1e-12;

pub fn write_series(dir: &Path, name: &str, traj: &Trajectory) -> CliResult<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(dir.join(name))?);
    for rec in &traj.records {
        writeln!(out, "{}", rec.to_ndjson())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary(dir: &Path, summary: &VerificationSummary) -> CliResult<()> {
    fs::write(dir.join("summary.json"), summary.to_json() + "\n")?;
    Ok(())
}

pub fn snapshot_name(t: f64) -> String {
    format!("snap_{t:.6}.kbox")
}

/// Solver run of `cfg` on `n` points per axis with the given step control.
pub fn simulate(cfg: &RunConfig, n: usize, step: &StepConfig, sample_every: f64) -> CliResult<Trajectory> {
    let initial = cfg.initial_state(n)?;
    let forcing = cfg.forcing(*initial.grid());
    Ok(run(&initial, cfg.t_end, &forcing, &cfg.params, &cfg.env, step, sample_every)?)
}

fn prepare(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Plain run: series, snapshots at every sample and basic invariants.
pub fn cmd_run(cfg: &RunConfig, dir: &Path) -> CliResult<VerificationSummary> {
    prepare(dir)?;
    let traj = simulate(cfg, cfg.n, &cfg.step, cfg.sample_every)?;
    write_series(dir, "series.ndjson", &traj)?;
    let mut summary = VerificationSummary::new("run");
    let mut nonfinite = 0usize;
    let mut projection = 0.0f64;
    for s in &traj.states {
        snapshot::save(&dir.join(snapshot_name(s.t)), s)?;
        if !s.is_finite() {
            nonfinite += 1;
        }
        let scale = s.u.max_abs() / s.grid().h();
        if scale > 0.0 {
            projection = projection.max(divergence(&s.u).max_abs() / scale);
        }
    }
    summary.at_most("nonfinite_samples", nonfinite as f64, 0.0);
    summary.at_most("projection_residual", projection, 1e-10);
    summary.detail("samples", traj.len() as f64);
    summary.detail("guard_activations", traj.records.iter().map(|r| r.guard_activations).sum::<u64>() as f64);
    write_summary(dir, &summary)?;
    Ok(summary)
}

/// Power-law fits of mean `k`, mean `omega` and the minimal length scale.
pub fn cmd_decay(cfg: &RunConfig, dir: &Path) -> CliResult<VerificationSummary> {
    prepare(dir)?;
    let step = StepConfig { keep_states: false, ..cfg.step };
    let traj = simulate(cfg, cfg.n, &step, cfg.sample_every)?;
    write_series(dir, "series.ndjson", &traj)?;

    let window = Window::new(cfg.fit_start, cfg.fit_end.min(cfg.t_end));
    let ratio = cfg.params.alpha2 / cfg.params.alpha1;
    let k = decay_fit(&traj, DecayQuantity::MeanK, window)?;
    let w = decay_fit(&traj, DecayQuantity::MeanOmega, window)?;
    let l = decay_fit(&traj, DecayQuantity::LMin, window)?;

    let mut summary = VerificationSummary::new("decay");
    summary.at_most("k_exponent_error", (k.exponent + ratio).abs(), EXPONENT_TOLERANCE);
    summary.at_most("omega_exponent_error", (w.exponent + 1.0).abs(), EXPONENT_TOLERANCE);
    summary.at_least("length_scale_exponent", l.exponent, 1.0 - 0.5 * ratio - LENGTH_EXPONENT_SLACK);
    summary.detail("k_exponent", k.exponent);
    summary.detail("omega_exponent", w.exponent);
    summary.detail("length_scale_exponent_std_error", l.std_error);
    summary.detail("fit_samples", k.samples as f64);
    write_summary(dir, &summary)?;
    Ok(summary)
}

/// Maximal envelope violations `(omega below, omega above, k below)` over a run.
fn max_violations(traj: &Trajectory) -> [f64; 3] {
    traj.records.iter().fold([0.0; 3], |acc, r| {
        [
            acc[0].max(r.envelope_violation_omega_low),
            acc[1].max(r.envelope_violation_omega_high),
            acc[2].max(r.envelope_violation_k),
        ]
    })
}

fn shrinks(coarse: f64, fine: f64, floor: f64) -> bool {
    fine * REFINEMENT_FACTOR <= coarse || (coarse <= floor && fine <= floor)
}

/// Envelope monitoring with the guard disabled, repeated on a grid and step
/// size refined once.
pub fn cmd_bounds(cfg: &RunConfig, dir: &Path) -> CliResult<VerificationSummary> {
    prepare(dir)?;
    let coarse_step = StepConfig { guard: false, keep_states: false, ..cfg.step };
    let fine_step = StepConfig { dt_max: 0.5 * coarse_step.dt_max, ..coarse_step };
    let (coarse, fine) = rayon::join(
        || simulate(cfg, cfg.n, &coarse_step, cfg.sample_every),
        || simulate(cfg, 2 * cfg.n, &fine_step, cfg.sample_every),
    );
    let (coarse, fine) = (coarse?, fine?);
    write_series(dir, "series.ndjson", &coarse)?;

    let (vc, vf) = (max_violations(&coarse), max_violations(&fine));
    let scales = [cfg.env.omega_star, cfg.env.omega_star, cfg.env.k_star];
    let names = ["omega_low", "omega_high", "k_low"];
    let mut summary = VerificationSummary::new("bounds");
    for i in 0..3 {
        let bound = ENVELOPE_TOLERANCE * scales[i];
        summary.at_most(format!("violation_{}", names[i]), vc[i], bound);
        summary.at_most(format!("violation_{}_refined", names[i]), vf[i], bound);
        let ratio = if vf[i] > 0.0 { vc[i] / vf[i] } else { f64::INFINITY };
        summary.check(
            format!("violation_{}_shrink", names[i]),
            ratio,
            REFINEMENT_FACTOR,
            shrinks(vc[i], vf[i], ROUNDOFF * scales[i]),
        );
    }
    let guard: u64 = coarse.records.iter().chain(&fine.records).map(|r| r.guard_activations).sum();
    summary.at_most("guard_activations", guard as f64, 0.0);
    write_summary(dir, &summary)?;
    Ok(summary)
}

/// Balance residuals at `refine_levels` joint refinements of grid and step.
///
/// Level `l` uses `n 2^l` points and steps of at most `dt_max / 2^l`, sampled
/// after every step so the time integrals of the balances use the step size.
pub fn cmd_balance(cfg: &RunConfig, dir: &Path) -> CliResult<VerificationSummary> {
    prepare(dir)?;
    let levels: Vec<(usize, StepConfig)> = (0..cfg.refine_levels)
        .map(|l| {
            let f = (1u64 << l) as f64;
            (cfg.n << l, StepConfig { dt_max: cfg.step.dt_max / f, keep_states: false, ..cfg.step })
        })
        .collect();
    let trajs = levels
        .iter()
        .map(|(n, step)| simulate(cfg, *n, step, step.dt_max))
        .collect::<CliResult<Vec<_>>>()?;
    write_series(dir, "series.ndjson", &trajs[0])?;

    let reports = trajs
        .iter()
        .map(|t| balance_report(t, Window::all()))
        .collect::<Result<Vec<_>, _>>()?;
    let zero_velocity =
        cfg.initial_state(cfg.n)?.u.max_abs() == 0.0 && matches!(cfg.forcing, crate::config::ForcingSpec::None);

    let mut summary = VerificationSummary::new("balance");
    let scale = |t: &Trajectory| t.records.iter().map(|r| r.balance.omega_integral.abs() + r.e_turb.abs()).fold(0.0, f64::max);
    let floor = ROUNDOFF * scale(&trajs[0]).max(1.0);
    for (l, pair) in reports.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        for (name, ca, cb) in [
            ("omega_balance", a.omega_balance_residual, b.omega_balance_residual),
            ("k_balance", a.k_balance_residual, b.k_balance_residual),
        ] {
            let ratio = if cb > 0.0 { ca / cb } else { f64::INFINITY };
            summary.check(format!("{name}_shrink_{l}"), ratio, REFINEMENT_FACTOR, shrinks(ca, cb, floor));
        }
        if !zero_velocity {
            let (ca, cb) = (a.energy_gap.abs(), b.energy_gap.abs());
            let ratio = if cb > 0.0 { ca / cb } else { f64::INFINITY };
            summary.check(format!("energy_gap_shrink_{l}"), ratio, REFINEMENT_FACTOR, shrinks(ca, cb, floor));
        }
    }
    if zero_velocity {
        let gap = reports.iter().map(|r| r.energy_gap.abs()).fold(0.0, f64::max);
        summary.at_most("energy_gap_zero_velocity", gap, floor);
    }
    for (l, r) in reports.iter().enumerate() {
        summary.detail(format!("omega_balance_residual_{l}"), r.omega_balance_residual);
        summary.detail(format!("k_balance_residual_{l}"), r.k_balance_residual);
        summary.detail(format!("mu_proxy_{l}"), r.mu_proxy);
        summary.detail(format!("energy_gap_{l}"), r.energy_gap);
    }
    write_summary(dir, &summary)?;
    Ok(summary)
}

/// Trajectory used by the scaling check: exact samples for homogeneous data,
/// a solver run otherwise.
pub fn scaling_trajectory(cfg: &RunConfig) -> CliResult<Trajectory> {
    match cfg.ic {
        InitialCondition::Homogeneous => {
            let m = (cfg.t_end / cfg.sample_every).round().max(2.0) as usize;
            let times: Vec<f64> = (0..=m).map(|i| cfg.t_end * i as f64 / m as f64).collect();
            let ic = HomogeneousIC { u_const: cfg.u0.clone(), omega0: cfg.omega0, k0: cfg.k0 };
            let mut traj = homogeneous_trajectory(cfg.grid()?, &ic, &cfg.params, &times)?;
            traj.env = cfg.env;
            Ok(traj)
        }
        _ => simulate(cfg, cfg.n, &cfg.step, cfg.sample_every),
    }
}

/// Random `(A, B, rho, gamma, omega, k)` tuples around the given scaling.
pub fn coefficient_samples(count: usize, seed: u64) -> Vec<(CoefficientFamily, ScalingParams, (f64, f64))> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (a, b) = (rng.gen_range(0.25..3.0), rng.gen_range(0.25..3.0));
            let fam = CoefficientFamily {
                a,
                b,
                d: [rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)],
                g: [rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)],
            };
            let (rho, gamma) = (rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0));
            let sp = ScalingParams::general(a, b, rho, gamma).expect("positive sample");
            let state = (10f64.powf(rng.gen_range(-2.0..2.0)), 10f64.powf(rng.gen_range(-2.0..2.0)));
            (fam, sp, state)
        })
        .collect()
}

/// Invariance of the residuals under `(rho, gamma)` and of the coefficient families.
pub fn cmd_scaling(cfg: &RunConfig, rho: f64, gamma: f64, dir: &Path) -> CliResult<VerificationSummary> {
    prepare(dir)?;
    let sp = family_from(rho, gamma)?;
    let traj = scaling_trajectory(cfg)?;
    write_series(dir, "series.ndjson", &traj)?;
    let report = invariance_experiment(&traj, &sp, &cfg.params)?;
    fs::write(dir.join("scaling.ndjson"), report.to_ndjson() + "\n")?;

    let mut summary = VerificationSummary::new("scaling");
    let ratio = report.ratio();
    for (name, r) in [("u", ratio.u), ("omega", ratio.omega), ("k", ratio.k)] {
        summary.detail(format!("residual_ratio_{name}"), r);
    }
    summary.check("invariance", report.worst_ratio(), INVARIANCE_FACTOR, report.pass);
    let deltas = [
        (report.transformed.u - report.scaled_original.u).abs(),
        (report.transformed.omega - report.scaled_original.omega).abs(),
        (report.transformed.k - report.scaled_original.k).abs(),
    ];
    summary.detail("max_residual_delta", deltas.iter().cloned().fold(0.0, f64::max));

    let kolmogorov = CoefficientFamily::kolmogorov(&cfg.params);
    let mut worst = coefficient_invariance_residuals(&kolmogorov, &sp, &[(cfg.omega0, cfg.k0)])?.max();
    for (fam, general, state) in coefficient_samples(cfg.coefficient_samples, cfg.seed) {
        worst = worst.max(coefficient_invariance_residuals(&fam, &general, &[state])?.max());
    }
    summary.at_most("coefficient_invariance", worst, 1e-12);
    write_summary(dir, &summary)?;
    Ok(summary)
}
