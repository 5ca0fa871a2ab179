//! Plain `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, lists are comma separated.
//! Required keys: `dim`, `n`, `t_end`. Everything else has a default:
//!
//! | key | default |
//! |-----|---------|
//! | `side` | `2 pi` |
//! | `sample_every` | `t_end / 100` |
//! | `scheme` | `rk2` (`rothe` selects implicit Euler) |
//! | `nu0`, `nu1`, `nu2`, `alpha1` | `1` |
//! | `alpha2` | `10/7` |
//! | `regularized`, `eps`, `r` | `false`, `0`, `3.5` |
//! | `ic` | `homogeneous` (`perturbed`, `snapshot`) |
//! | `u0`, `omega0`, `k0` | zero vector, `1`, `1` |
//! | `omega_star`, `omega_sup`, `k_star` | `omega0`, `omega0`, `k0` |
//! | `modes` | empty; entries `field:axis:wavenumber:amplitude` with field `u1..u3`, `omega`, `k` |
//! | `snapshot` | path of a `.kbox` file, required for `ic = snapshot` |
//! | `forcing` | `none` (`constant` with `forcing_vector`, `single_mode` with `forcing_mode = component:axis:wavenumber:amplitude`) |
//! | `seed` | `0` (phases of the perturbation modes) |
//! | `output_dir` | `out` |
//! | step control | `cfl_safety 0.4`, `dt_max 0.01`, `k_floor 1e-14`, `guard true`, `guard_slack 0.05`, `max_retries 10`, `picard_max_iters 200`, `picard_tol 1e-10`, `picard_damping 0.7` |
//! | experiments | `fit_start 5`, `fit_end 50`, `refine_levels 3`, `rho 1`, `gamma 1`, `coefficient_samples 1000` |

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use kolmo_core::fields::{resample, Grid, ScalarField, VectorField};
use kolmo_core::model::{ComparisonEnvelope, Forcing, HomogeneousIC, ModelParams, State};
use kolmo_core::snapshot;
use kolmo_core::timestepper::{Scheme, StepConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{field}`: {constraint}")]
    Validation { field: String, constraint: String },
}

fn invalid(field: &str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field: field.to_string(), constraint: constraint.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Zero-based velocity component.
    Velocity(usize),
    Omega,
    K,
}

/// `amplitude * cos(2 pi wavenumber x_axis / side + phase)` added to `target`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub target: Target,
    /// Zero-based.
    pub axis: usize,
    pub wavenumber: u32,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    Homogeneous,
    Perturbed(Vec<Mode>),
    Snapshot(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ForcingSpec {
    None,
    Constant(Vec<f64>),
    /// `f_component = amplitude * sin(2 pi wavenumber x_axis / side)`, zero-based indices.
    SingleMode { component: usize, axis: usize, wavenumber: u32, amplitude: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub side: f64,
    pub t_end: f64,
    pub sample_every: f64,
    pub params: ModelParams,
    pub env: ComparisonEnvelope,
    pub u0: Vec<f64>,
    pub omega0: f64,
    pub k0: f64,
    pub ic: InitialCondition,
    pub forcing: ForcingSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub step: StepConfig,
    pub fit_start: f64,
    pub fit_end: f64,
    pub refine_levels: usize,
    pub rho: f64,
    pub gamma: f64,
    pub coefficient_samples: usize,
}

const KEYS: &[&str] = &[
    "dim",
    "n",
    "side",
    "t_end",
    "sample_every",
    "scheme",
    "nu0",
    "nu1",
    "nu2",
    "alpha1",
    "alpha2",
    "eps",
    "r",
    "regularized",
    "omega_star",
    "omega_sup",
    "k_star",
    "ic",
    "u0",
    "omega0",
    "k0",
    "modes",
    "snapshot",
    "forcing",
    "forcing_vector",
    "forcing_mode",
    "seed",
    "output_dir",
    "cfl_safety",
    "dt_max",
    "k_floor",
    "guard",
    "guard_slack",
    "max_retries",
    "picard_max_iters",
    "picard_tol",
    "picard_damping",
    "fit_start",
    "fit_end",
    "refine_levels",
    "rho",
    "gamma",
    "coefficient_samples",
];

/// Raw assignments with the line each came from.
struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::Parse { line, message: format!("expected `key = value`, found `{content}`") })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::Parse { line, message: format!("unknown key `{key}`") });
            }
            if map.insert(key.to_string(), (line, value.trim().to_string())).is_some() {
                return Err(ConfigError::Parse { line, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.0.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::Parse { line, message: format!("cannot parse `{v}` for `{key}`") }),
        }
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.get(key)?.ok_or_else(|| invalid(key, "is required"))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| ConfigError::Parse { line, message: format!("bad number `{}` in `{key}`", s.trim()) })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }
}

fn parse_index(line: usize, s: &str, what: &str) -> Result<usize, ConfigError> {
    match s.trim().parse::<usize>() {
        Ok(i) if i >= 1 => Ok(i - 1),
        _ => Err(ConfigError::Parse { line, message: format!("{what} must be an index starting at 1, found `{s}`") }),
    }
}

fn parse_quad(line: usize, entry: &str) -> Result<(String, usize, u32, f64), ConfigError> {
    let parts: Vec<&str> = entry.split(':').map(str::trim).collect();
    let bad = || ConfigError::Parse { line, message: format!("expected `a:axis:wavenumber:amplitude`, found `{entry}`") };
    if parts.len() != 4 {
        return Err(bad());
    }
    let axis = parse_index(line, parts[1], "axis")?;
    let wavenumber = parts[2].parse().map_err(|_| bad())?;
    let amplitude = parts[3].parse().map_err(|_| bad())?;
    Ok((parts[0].to_string(), axis, wavenumber, amplitude))
}

fn parse_modes(line: usize, text: &str) -> Result<Vec<Mode>, ConfigError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|entry| {
            let (field, axis, wavenumber, amplitude) = parse_quad(line, entry)?;
            let target = match field.as_str() {
                "omega" => Target::Omega,
                "k" => Target::K,
                f if f.starts_with('u') => Target::Velocity(parse_index(line, &f[1..], "velocity component")?),
                f => return Err(ConfigError::Parse { line, message: format!("unknown mode field `{f}`") }),
            };
            Ok(Mode { target, axis, wavenumber, amplitude })
        })
        .collect()
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::Parse { line, message: format!("`{key}` expects true or false, found `{v}`") }),
    }
}

/// Parses and fully validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let e = Entries::parse(text)?;
    let dim: usize = e.required("dim")?;
    let n: usize = e.required("n")?;
    let t_end: f64 = e.required("t_end")?;
    let omega0 = e.or("omega0", 1.0)?;
    let k0 = e.or("k0", 1.0)?;
    let defaults = ModelParams::default();
    let flag = |key: &str, default: bool| match e.raw(key) {
        Some((line, v)) => parse_bool(line, key, v),
        None => Ok(default),
    };

    let scheme = match e.raw("scheme") {
        None | Some((_, "rk2")) => Scheme::ExplicitRk2,
        Some((_, "rothe")) => Scheme::RothePicard,
        Some((line, v)) => return Err(ConfigError::Parse { line, message: format!("unknown scheme `{v}`") }),
    };
    let step_defaults = StepConfig::default();
    let step = StepConfig {
        scheme,
        cfl_safety: e.or("cfl_safety", step_defaults.cfl_safety)?,
        dt_max: e.or("dt_max", step_defaults.dt_max)?,
        k_floor: e.or("k_floor", step_defaults.k_floor)?,
        picard_max_iters: e.or("picard_max_iters", step_defaults.picard_max_iters)?,
        picard_tol: e.or("picard_tol", step_defaults.picard_tol)?,
        picard_damping: e.or("picard_damping", step_defaults.picard_damping)?,
        guard: flag("guard", step_defaults.guard)?,
        guard_slack: e.or("guard_slack", step_defaults.guard_slack)?,
        max_retries: e.or("max_retries", step_defaults.max_retries)?,
        keep_states: true,
    };

    let ic = match e.raw("ic") {
        None | Some((_, "homogeneous")) => InitialCondition::Homogeneous,
        Some((_, "perturbed")) => {
            InitialCondition::Perturbed(match e.raw("modes") {
                Some((line, v)) => parse_modes(line, v)?,
                None => Vec::new(),
            })
        }
        Some((_, "snapshot")) => {
            InitialCondition::Snapshot(PathBuf::from(e.get::<String>("snapshot")?.ok_or_else(|| invalid("snapshot", "is required for ic = snapshot"))?))
        }
        Some((line, v)) => return Err(ConfigError::Parse { line, message: format!("unknown initial condition `{v}`") }),
    };

    let forcing = match e.raw("forcing") {
        None | Some((_, "none")) => ForcingSpec::None,
        Some((_, "constant")) => {
            ForcingSpec::Constant(e.list("forcing_vector")?.ok_or_else(|| invalid("forcing_vector", "is required for constant forcing"))?)
        }
        Some((_, "single_mode")) => {
            let (line, v) = e.raw("forcing_mode").ok_or_else(|| invalid("forcing_mode", "is required for single_mode forcing"))?;
            let (c, axis, wavenumber, amplitude) = parse_quad(line, v)?;
            ForcingSpec::SingleMode { component: parse_index(line, &c, "forcing component")?, axis, wavenumber, amplitude }
        }
        Some((line, v)) => return Err(ConfigError::Parse { line, message: format!("unknown forcing `{v}`") }),
    };

    let cfg = RunConfig {
        dim,
        n,
        side: e.or("side", 2.0 * PI)?,
        t_end,
        sample_every: e.or("sample_every", t_end / 100.0)?,
        params: ModelParams {
            nu0: e.or("nu0", defaults.nu0)?,
            nu1: e.or("nu1", defaults.nu1)?,
            nu2: e.or("nu2", defaults.nu2)?,
            alpha1: e.or("alpha1", defaults.alpha1)?,
            alpha2: e.or("alpha2", defaults.alpha2)?,
            eps: e.or("eps", defaults.eps)?,
            r: e.or("r", defaults.r)?,
            regularized: flag("regularized", defaults.regularized)?,
        },
        env: ComparisonEnvelope {
            omega_star: e.or("omega_star", omega0)?,
            omega_sup: e.or("omega_sup", omega0)?,
            k_star: e.or("k_star", k0)?,
        },
        u0: e.list("u0")?.unwrap_or_else(|| vec![0.0; dim]),
        omega0,
        k0,
        ic,
        forcing,
        seed: e.or("seed", 0)?,
        output_dir: PathBuf::from(e.or("output_dir", "out".to_string())?),
        step,
        fit_start: e.or("fit_start", 5.0)?,
        fit_end: e.or("fit_end", 50.0)?,
        refine_levels: e.or("refine_levels", 3)?,
        rho: e.or("rho", 1.0)?,
        gamma: e.or("gamma", 1.0)?,
        coefficient_samples: e.or("coefficient_samples", 1000)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, "must be positive"))
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid, ConfigError> {
        self.grid_with(self.n)
    }

    /// Same box with `n` points per axis.
    pub fn grid_with(&self, n: usize) -> Result<Grid, ConfigError> {
        Grid::new(self.dim, n, self.side).map_err(|e| invalid("n", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=3).contains(&self.dim) {
            return Err(invalid("dim", "must be 1, 2 or 3"));
        }
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(invalid("n", "must be even and at least 4"));
        }
        positive("side", self.side)?;
        positive("t_end", self.t_end)?;
        positive("sample_every", self.sample_every)?;
        let p = &self.params;
        for (name, v) in [("nu0", p.nu0), ("nu1", p.nu1), ("nu2", p.nu2), ("alpha1", p.alpha1), ("alpha2", p.alpha2)] {
            positive(name, v)?;
        }
        p.validate().map_err(core_invalid)?;
        positive("omega_star", self.env.omega_star)?;
        positive("k_star", self.env.k_star)?;
        self.env.validate().map_err(core_invalid)?;
        self.step.validate().map_err(core_invalid)?;
        if self.u0.len() != self.dim {
            return Err(invalid("u0", format!("needs {} components", self.dim)));
        }
        if !(self.fit_start >= 0.0 && self.fit_end > self.fit_start) {
            return Err(invalid("fit_end", "fit window must satisfy 0 <= fit_start < fit_end"));
        }
        if self.refine_levels < 2 {
            return Err(invalid("refine_levels", "must be at least 2"));
        }
        positive("rho", self.rho)?;
        positive("gamma", self.gamma)?;
        if let InitialCondition::Perturbed(modes) = &self.ic {
            for m in modes {
                if m.axis >= self.dim {
                    return Err(invalid("modes", format!("axis {} exceeds dim {}", m.axis + 1, self.dim)));
                }
                if let Target::Velocity(c) = m.target {
                    if c >= self.dim {
                        return Err(invalid("modes", format!("velocity component {} exceeds dim {}", c + 1, self.dim)));
                    }
                }
                if m.wavenumber == 0 || 2 * m.wavenumber as usize >= self.n || !m.amplitude.is_finite() {
                    return Err(invalid("modes", "wavenumber must lie in 1..n/2 with a finite amplitude"));
                }
            }
        }
        match &self.forcing {
            ForcingSpec::None => {}
            ForcingSpec::Constant(v) if v.len() != self.dim => {
                return Err(invalid("forcing_vector", format!("needs {} components", self.dim)));
            }
            ForcingSpec::Constant(_) => {}
            ForcingSpec::SingleMode { component, axis, wavenumber, .. } => {
                if *component >= self.dim || *axis >= self.dim {
                    return Err(invalid("forcing_mode", "component and axis must not exceed dim"));
                }
                if component == axis {
                    return Err(invalid("forcing_mode", "component must differ from axis (divergence-free forcing)"));
                }
                if *wavenumber == 0 {
                    return Err(invalid("forcing_mode", "wavenumber must be positive"));
                }
            }
        }
        let initial = self.initial_state(self.n)?;
        self.check_initial_bounds(&initial)
    }

    /// Initial state on the configured box with `n` points per axis.
    pub fn initial_state(&self, n: usize) -> Result<State, ConfigError> {
        let grid = self.grid_with(n)?;
        let base = HomogeneousIC { u_const: self.u0.clone(), omega0: self.omega0, k0: self.k0 };
        let mut state = State::homogeneous(grid, &base, 0.0);
        match &self.ic {
            InitialCondition::Homogeneous => {}
            InitialCondition::Perturbed(modes) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                for m in modes {
                    let phase = rng.gen_range(0.0..2.0 * PI);
                    let kx = 2.0 * PI * m.wavenumber as f64 / self.side;
                    let bump = ScalarField::from_fn(grid, |x| m.amplitude * (kx * x[m.axis] + phase).cos());
                    let field = match m.target {
                        Target::Velocity(c) => state.u.component_mut(c),
                        Target::Omega => &mut state.omega,
                        Target::K => &mut state.k,
                    };
                    field.axpy(1.0, &bump);
                }
                let (u, p) = kolmo_core::fields::leray_project(&state.u);
                state.u = u;
                state.p = p;
            }
            InitialCondition::Snapshot(path) => {
                let loaded = snapshot::load(path, 0.0).map_err(|e| invalid("snapshot", e.to_string()))?;
                let src = *loaded.grid();
                if src.dim() != self.dim || (src.side() - self.side).abs() > 1e-12 * self.side {
                    return Err(invalid("snapshot", "dimension and side must match the configuration"));
                }
                let map = |f: &ScalarField| resample(f, grid).map_err(|e| invalid("snapshot", e.to_string()));
                let comps = loaded.u.components().iter().map(map).collect::<Result<Vec<_>, _>>()?;
                state = State {
                    t: 0.0,
                    u: VectorField::new(comps).map_err(|e| invalid("snapshot", e.to_string()))?,
                    omega: map(&loaded.omega)?,
                    k: map(&loaded.k)?,
                    p: map(&loaded.p)?,
                };
            }
        }
        Ok(state)
    }

    /// Initial data must satisfy `omega_* <= omega <= omega^*` and `k >= k_*` pointwise.
    fn check_initial_bounds(&self, s: &State) -> Result<(), ConfigError> {
        let tol = 1e-12;
        let (lo, hi, ks) = (self.env.omega_star, self.env.omega_sup, self.env.k_star);
        let (wmin, wmax, kmin) = (s.omega.min(), s.omega.max(), s.k.min());
        if wmin < lo * (1.0 - tol) || wmax > hi * (1.0 + tol) {
            return Err(invalid(
                "omega0",
                format!(
                    "initial omega must satisfy omega_star <= omega0(x) <= omega_sup pointwise; range [{wmin}, {wmax}] vs [{lo}, {hi}]"
                ),
            ));
        }
        if kmin < ks * (1.0 - tol) {
            return Err(invalid("k0", format!("initial k must satisfy k0(x) >= k_star pointwise; min {kmin} < {ks}")));
        }
        Ok(())
    }

    pub fn forcing(&self, grid: Grid) -> Forcing {
        match &self.forcing {
            ForcingSpec::None => Forcing::None,
            ForcingSpec::Constant(v) => Forcing::Constant(VectorField::constant(grid, v)),
            ForcingSpec::SingleMode { component, axis, wavenumber, amplitude } => {
                let kx = 2.0 * PI * *wavenumber as f64 / self.side;
                let comps = (0..self.dim)
                    .map(|c| {
                        if c == *component {
                            ScalarField::from_fn(grid, |x| amplitude * (kx * x[*axis]).sin())
                        } else {
                            ScalarField::zeros(grid)
                        }
                    })
                    .collect();
                Forcing::Constant(VectorField::new(comps).expect("components share the grid"))
            }
        }
    }
}

fn core_invalid(e: kolmo_core::Error) -> ConfigError {
    match e {
        kolmo_core::Error::InvalidParameter { name, reason } => invalid(name, reason),
        kolmo_core::Error::NonpositiveParameter { name, .. } => invalid(name, "must be positive"),
        other => invalid("config", other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "dim = 1\nn = 8\nt_end = 2\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!((c.dim, c.n), (1, 8));
        assert_eq!(c.side, 2.0 * PI);
        assert_eq!(c.sample_every, 0.02);
        assert_eq!(c.params, ModelParams::default());
        assert_eq!(c.env, ComparisonEnvelope { omega_star: 1.0, omega_sup: 1.0, k_star: 1.0 });
        assert_eq!(c.u0, vec![0.0]);
        assert_eq!(c.ic, InitialCondition::Homogeneous);
        assert_eq!(c.forcing, ForcingSpec::None);
        assert_eq!(c.step, StepConfig::default());
        assert_eq!(c.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn comments_and_lists() {
        let c = parse_config("# header\ndim = 2 # trailing\nn = 8\nt_end = 1\nu0 = 0.5, -0.25\n\n").unwrap();
        assert_eq!(c.u0, vec![0.5, -0.25]);
    }

    #[test]
    fn negative_alpha2_is_rejected() {
        let err = parse_config(&format!("{MINIMAL}alpha2 = -1\n")).unwrap_err();
        assert_eq!(err, invalid("alpha2", "must be positive"));
    }

    #[test]
    fn unknown_and_malformed_lines() {
        assert_eq!(
            parse_config("dim = 1\nfoo = 3\n").unwrap_err(),
            ConfigError::Parse { line: 2, message: "unknown key `foo`".into() }
        );
        assert!(matches!(parse_config("dim 1\n"), Err(ConfigError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("dim = x\n"), Err(ConfigError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("dim = 1\ndim = 2\n"), Err(ConfigError::Parse { line: 2, .. })));
        assert_eq!(parse_config("n = 8\nt_end = 1\n").unwrap_err(), invalid("dim", "is required"));
    }

    #[test]
    fn perturbation_below_omega_star_is_rejected() {
        let text = "dim = 2\nn = 8\nt_end = 1\nic = perturbed\nomega0 = 1\nomega_star = 0.95\nomega_sup = 1.2\nk_star = 0.5\nmodes = omega:1:1:0.2\n";
        match parse_config(text).unwrap_err() {
            ConfigError::Validation { field, constraint } => {
                assert_eq!(field, "omega0");
                assert!(constraint.contains("omega_star <= omega0(x)"));
            }
            e => panic!("{e:?}"),
        }
        let ok = text.replace("omega_star = 0.95", "omega_star = 0.75");
        let c = parse_config(&ok).unwrap();
        assert_eq!(c.ic, InitialCondition::Perturbed(vec![Mode { target: Target::Omega, axis: 0, wavenumber: 1, amplitude: 0.2 }]));
    }

    #[test]
    fn perturbed_state_is_seeded_and_solenoidal() {
        let text = "dim = 2\nn = 16\nt_end = 1\nic = perturbed\nmodes = u1:2:1:0.3, u2:1:2:0.1, k:1:1:0.1\nk_star = 0.8\nseed = 7\n";
        let c = parse_config(text).unwrap();
        let a = c.initial_state(16).unwrap();
        assert_eq!(a, c.initial_state(16).unwrap());
        assert!(kolmo_core::fields::divergence(&a.u).max_abs() < 1e-12);
        assert!(a.u.max_abs() > 0.1);
        let other = parse_config(&text.replace("seed = 7", "seed = 8")).unwrap();
        assert_ne!(a, other.initial_state(16).unwrap());
    }

    #[test]
    fn forcing_options() {
        let c = parse_config("dim = 2\nn = 8\nt_end = 1\nforcing = single_mode\nforcing_mode = 1:2:1:0.5\n").unwrap();
        let f = c.forcing(c.grid().unwrap()).at(0.0, c.grid().unwrap()).unwrap();
        assert!(kolmo_core::fields::divergence(&f).max_abs() < 1e-14);
        assert!((f.component(0).max() - 0.5).abs() < 1e-12);
        assert!(parse_config("dim = 2\nn = 8\nt_end = 1\nforcing = single_mode\nforcing_mode = 1:1:1:0.5\n").is_err());
        assert!(parse_config("dim = 2\nn = 8\nt_end = 1\nforcing = constant\nforcing_vector = 1\n").is_err());
    }
}
