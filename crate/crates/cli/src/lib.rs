//! Run configuration and experiment drivers behind the `erosion` binary.
//!
//! Every command renders a [`Csv`]; the binary only chooses where to write it.

use std::fmt;
use std::path::{Path, PathBuf};

use erosion_core::coarea_lab::{coarea_report, CoareaSettings};
use erosion_core::energy::{functional_f, willmore_p, EnergyParams};
use erosion_core::erosion_ode::{erosion_speed, integrate, OdeParams, SpeedBracket, Trajectory};
use erosion_core::oracles::{brute_force_minimizer, BruteForceProblem, DEFAULT_BUDGET};
use erosion_core::profiles::{parse_directives, Directive, ProfileFile};
use erosion_core::scheme::{interpolant_eval, next_level, run_scheme, SchemeParams};
use erosion_core::{constants, DimensionalConstants, RadiusProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Levels and radius steps of the random oracle bases.
pub const ORACLE_LEVELS: usize = 8;
pub const ORACLE_RADII: usize = 10;
const ORACLE_ENCLOSING_RADIUS: f64 = 2.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] erosion_core::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use erosion_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(E::Domain(_) | E::Parse { .. } | E::OpenCase { .. } | E::Budget { .. }) => 2,
            CliError::Core(E::Numeric { .. } | E::Bracket { .. } | E::NotExtinct { .. }) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Converge,
    Coarea,
    Oracle,
    Energy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Converge => "converge",
            Command::Coarea => "coarea",
            Command::Oracle => "oracle",
            Command::Energy => "energy",
        }
    }

    fn parse(s: &str) -> Option<Command> {
        [Command::Simulate, Command::Converge, Command::Coarea, Command::Oracle, Command::Energy]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

/// Where the base profile comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    File(PathBuf),
    Inline(ProfileFile),
}

/// Merged settings of one run: config file first, then command-line overrides.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub profile: Option<ProfileSource>,
    /// Second profile for `energy`.
    pub candidate: Option<PathBuf>,
    pub dim: Option<usize>,
    pub taus: Vec<f64>,
    pub p: Option<f64>,
    pub t_max: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub exploratory: bool,
    pub root_tol: Option<f64>,
    pub step_tol: Option<f64>,
    pub event_tol: Option<f64>,
    pub ns: Vec<usize>,
    pub q: Option<f64>,
    pub big_r: Option<f64>,
    pub trials: Option<usize>,
}

/// Command-line values; `None` leaves the config value alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub profile: Option<PathBuf>,
    pub candidate: Option<PathBuf>,
    pub dim: Option<usize>,
    pub taus: Option<Vec<f64>>,
    pub p: Option<f64>,
    pub t_max: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub exploratory: bool,
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value
        .parse()
        .map_err(|_| config_err(format!("line {line}: `{key}` expects a number, got {value:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| config_err(format!("line {line}: bad entry {s:?} in `{key}`")))
        })
        .collect()
}

/// Parses a comma separated list of time steps, as given to `--tau`.
pub fn parse_taus(s: &str) -> Result<Vec<f64>> {
    parse_list("tau", s, 0)
}

impl RunConfig {
    /// Parses config text; relative paths resolve against `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Self> {
        let directives = parse_directives(text)?;
        let mut cfg = RunConfig::default();
        let mut inline = false;
        for d in &directives {
            match d {
                Directive::Piece { .. } => inline = true,
                Directive::KeyValue { section: None, .. } => inline = true,
                Directive::KeyValue {
                    section: Some(s),
                    key,
                    value,
                    line,
                } => {
                    if s != "run" {
                        return Err(config_err(format!("line {line}: unknown section [{s}]")));
                    }
                    cfg.set(key, value, *line, dir)?;
                }
            }
        }
        if inline {
            if cfg.profile.is_some() {
                return Err(config_err("config has both a `profile` path and an inline profile"));
            }
            cfg.profile = Some(ProfileSource::Inline(ProfileFile::from_directives(&directives)?));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            context: format!("cannot read config {}", path.display()),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        RunConfig::parse(&text, dir)
    }

    fn set(&mut self, key: &str, value: &str, line: usize, dir: &Path) -> Result<()> {
        match key {
            "command" => {
                self.command = Some(
                    Command::parse(value).ok_or_else(|| config_err(format!("line {line}: unknown command {value:?}")))?,
                )
            }
            "profile" => self.profile = Some(ProfileSource::File(dir.join(value))),
            "candidate" => self.candidate = Some(dir.join(value)),
            "out" => self.out = Some(dir.join(value)),
            "dim" => {
                self.dim = Some(
                    value
                        .parse()
                        .map_err(|_| config_err(format!("line {line}: bad dimension {value:?}")))?,
                )
            }
            "tau" => self.taus = parse_list(key, value, line)?,
            "n" => self.ns = parse_list(key, value, line)?,
            "p" => self.p = Some(parse_f64(key, value, line)?),
            "t_max" => self.t_max = Some(parse_f64(key, value, line)?),
            "root_tol" => self.root_tol = Some(parse_f64(key, value, line)?),
            "step_tol" => self.step_tol = Some(parse_f64(key, value, line)?),
            "event_tol" => self.event_tol = Some(parse_f64(key, value, line)?),
            "q" => self.q = Some(parse_f64(key, value, line)?),
            "R" => self.big_r = Some(parse_f64(key, value, line)?),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| config_err(format!("line {line}: bad seed {value:?}")))?
            }
            "trials" => {
                self.trials = Some(
                    value
                        .parse()
                        .map_err(|_| config_err(format!("line {line}: bad trial count {value:?}")))?,
                )
            }
            "exploratory" => {
                self.exploratory = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(config_err(format!("line {line}: `exploratory` expects true or false"))),
                }
            }
            other => return Err(config_err(format!("line {line}: unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(p) = o.profile {
            self.profile = Some(ProfileSource::File(p));
        }
        if o.candidate.is_some() {
            self.candidate = o.candidate;
        }
        if o.dim.is_some() {
            self.dim = o.dim;
        }
        if let Some(t) = o.taus {
            self.taus = t;
        }
        if o.p.is_some() {
            self.p = o.p;
        }
        if o.t_max.is_some() {
            self.t_max = o.t_max;
        }
        if o.out.is_some() {
            self.out = o.out;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        self.exploratory |= o.exploratory;
    }

    /// Checks the numeric fields that must be positive.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0) => Err(config_err(format!("`{name}` must be positive, got {x}"))),
            _ => Ok(()),
        };
        for &t in &self.taus {
            positive("tau", Some(t))?;
        }
        positive("t_max", self.t_max)?;
        positive("root_tol", self.root_tol)?;
        positive("step_tol", self.step_tol)?;
        positive("event_tol", self.event_tol)?;
        positive("q", self.q)?;
        positive("R", self.big_r)?;
        if let Some(p) = self.p {
            if !p.is_finite() {
                return Err(config_err(format!("`p` must be finite, got {p}")));
            }
        }
        if self.ns.contains(&0) {
            return Err(config_err("`n` entries must be positive"));
        }
        if self.trials == Some(0) {
            return Err(config_err("`trials` must be positive"));
        }
        Ok(())
    }

    /// The base profile and its constants, with `dim` overriding the file.
    pub fn load_profile(&self) -> Result<(RadiusProfile, DimensionalConstants)> {
        let file = match &self.profile {
            None => return Err(config_err("no profile given")),
            Some(ProfileSource::Inline(f)) => f.clone(),
            Some(ProfileSource::File(path)) => read_profile(path)?,
        };
        let d = self.dim.unwrap_or(file.dim);
        Ok((file.profile, constants(d)?))
    }

    fn tau(&self) -> Result<f64> {
        match self.taus.as_slice() {
            [] => Err(config_err("no time step given")),
            [t] => Ok(*t),
            [t, ..] => {
                log::warn!("several time steps given, using the first ({t})");
                Ok(*t)
            }
        }
    }

    fn ode_params(&self) -> OdeParams {
        let mut o = OdeParams::default();
        if let Some(t) = self.step_tol {
            o.step_tol = t;
        }
        if let Some(t) = self.event_tol {
            o.event_tol = t;
        }
        if let Some(t) = self.t_max {
            o.t_max = t;
        }
        o.exploratory = self.exploratory;
        o
    }

    fn scheme_params(&self, tau: f64, base: &RadiusProfile, consts: &DimensionalConstants) -> Result<SchemeParams> {
        let mut s = SchemeParams::for_profile(tau, base, consts)?;
        if let Some(t) = self.root_tol {
            s.root_tol = t;
        }
        if let Some(t) = self.t_max {
            s.max_steps = s.max_steps.min((t / tau).ceil().max(1.0) as usize);
        }
        Ok(s)
    }
}

fn read_profile(path: &Path) -> Result<ProfileFile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        context: format!("cannot read profile {}", path.display()),
        source,
    })?;
    Ok(erosion_core::profiles::parse_profile(&text)?)
}

/// Shortest round-trip decimal, in exponent form outside `[1e-5, 1e16)`, with
/// `nan`, `inf` and `-inf` spelled out.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x != 0.0 && !(1e-5..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// A header and rows of already formatted fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    fn new(header: &[&'static str]) -> Self {
        Csv {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }
}

impl fmt::Display for Csv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Csv> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(config_err(format!(
                "config is for `{}` but `{}` was requested",
                c.name(),
                command.name()
            )));
        }
    }
    cfg.validate()?;
    match command {
        Command::Simulate => cmd_simulate(cfg),
        Command::Converge => cmd_converge(cfg),
        Command::Coarea => cmd_coarea(cfg),
        Command::Oracle => cmd_oracle(cfg),
        Command::Energy => cmd_energy(cfg),
    }
}

/// `-k / r(λ-)^{2d}` at `λ > 0`, and `-k / r(0+)^{2d}` at `λ = 0`.
fn degenerate_speed(base: &RadiusProfile, lambda: f64, consts: &DimensionalConstants) -> Result<f64> {
    if lambda > 0.0 {
        return Ok(erosion_speed(base, lambda, consts)?.upper);
    }
    let r = base.eval(0.0)?;
    Ok(if r == 0.0 {
        f64::NEG_INFINITY
    } else {
        -consts.speed_constant() / r.powi(2 * consts.d as i32)
    })
}

/// Speed columns of the row at `t`: the bracket of the jumps crossed since
/// `t_prev`, or the degenerate speed when none was crossed.
fn row_speed(
    traj: &Trajectory,
    base: &RadiusProfile,
    t_prev: f64,
    t: f64,
    consts: &DimensionalConstants,
) -> Result<SpeedBracket> {
    let crossed: Vec<SpeedBracket> = traj
        .crossings
        .iter()
        .filter(|c| c.t > t_prev && c.t <= t)
        .map(|c| c.bracket)
        .collect();
    if crossed.is_empty() {
        let v = degenerate_speed(base, traj.eval(t), consts)?;
        return Ok(SpeedBracket {
            lower: v,
            upper: v,
            unbounded: v == f64::NEG_INFINITY,
        });
    }
    Ok(crossed.iter().skip(1).fold(crossed[0], |acc, b| SpeedBracket {
        lower: acc.lower.min(b.lower),
        upper: acc.upper.max(b.upper),
        unbounded: acc.unbounded || b.unbounded,
    }))
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Csv> {
    let (base, consts) = cfg.load_profile()?;
    let tau = cfg.tau()?;
    let mut csv = Csv::new(&["t", "lambda_discrete", "lambda_ode", "speed_lower", "speed_upper"]);
    let a = base.support_length();
    let traj = integrate(&base, a, &cfg.ode_params(), &consts)?;
    if base.is_zero() {
        let v = degenerate_speed(&base, 0.0, &consts)?;
        csv.rows.push(vec!["0".into(), "0".into(), "0".into(), fmt_float(v), fmt_float(v)]);
        return Ok(csv);
    }
    let path = run_scheme(&base, &cfg.scheme_params(tau, &base, &consts)?, &consts)?;
    let ode_end = traj.extinction.unwrap_or(traj.end_time());
    let mut rows = (path.levels.len() - 1).max((ode_end / tau - 1e-9).ceil() as usize);
    if let Some(t_max) = cfg.t_max {
        rows = rows.min((t_max / tau + 1e-9).floor() as usize);
    }
    let mut t_prev = f64::NEG_INFINITY;
    for i in 0..=rows {
        let t = i as f64 * tau;
        let s = row_speed(&traj, &base, t_prev, t, &consts)?;
        csv.rows.push(vec![
            fmt_float(t),
            fmt_float(interpolant_eval(&path, t)),
            fmt_float(traj.eval(t)),
            fmt_float(s.lower),
            fmt_float(s.upper),
        ]);
        t_prev = t;
    }
    Ok(csv)
}

/// Sup of `|λ_τ - λ|` over `[0, T]`, `T` the extinction time of the ODE (or the
/// end of the trajectory), sampled at the scheme nodes, the midpoints between
/// them and `T`.
pub fn sup_error_vs_ode(base: &RadiusProfile, tau: f64, traj: &Trajectory, scheme: &SchemeParams, consts: &DimensionalConstants) -> Result<f64> {
    let path = run_scheme(base, scheme, consts)?;
    let end = traj.extinction.unwrap_or(traj.end_time());
    let gap = |t: f64| (interpolant_eval(&path, t) - traj.eval(t)).abs();
    let mut sup = gap(end);
    let mut i = 0;
    loop {
        let t = 0.5 * i as f64 * tau;
        if t > end {
            break;
        }
        sup = sup.max(gap(t));
        i += 1;
    }
    Ok(sup)
}

pub fn cmd_converge(cfg: &RunConfig) -> Result<Csv> {
    if cfg.taus.len() < 2 {
        return Err(config_err(format!("converge needs at least two time steps, got {}", cfg.taus.len())));
    }
    let (base, consts) = cfg.load_profile()?;
    let traj = integrate(&base, base.support_length(), &cfg.ode_params(), &consts)?;
    let mut csv = Csv::new(&["tau", "sup_error_vs_ode", "rate_vs_prev"]);
    let mut prev: Option<f64> = None;
    for &tau in &cfg.taus {
        let err = sup_error_vs_ode(&base, tau, &traj, &cfg.scheme_params(tau, &base, &consts)?, &consts)?;
        let rate = prev.map_or(f64::NAN, |p| p / err);
        csv.rows.push(vec![fmt_float(tau), fmt_float(err), fmt_float(rate)]);
        prev = Some(err);
    }
    Ok(csv)
}

pub fn cmd_coarea(cfg: &RunConfig) -> Result<Csv> {
    let (base, consts) = cfg.load_profile()?;
    let settings = CoareaSettings {
        ns: if cfg.ns.is_empty() { vec![8, 16, 32, 64] } else { cfg.ns.clone() },
        p: cfg.p.unwrap_or((consts.d - 1) as f64),
        q: cfg.q,
        big_r: cfg.big_r,
    };
    let report = coarea_report(&base, &settings, &consts)?;
    let mut csv = Csv::new(&["n", "q", "energy", "target", "rel_error", "l1_gap"]);
    for r in &report.rows {
        csv.rows.push(vec![
            r.n.to_string(),
            fmt_float(r.q),
            fmt_float(r.energy),
            fmt_float(r.target),
            fmt_float(r.rel_error),
            fmt_float(r.l1_gap),
        ]);
    }
    Ok(csv)
}

/// A random base for the oracle: [`ORACLE_LEVELS`] non-increasing positive
/// indices into the radius grid `i / ORACLE_RADII`.
pub fn random_oracle_base(rng: &mut impl Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ORACLE_LEVELS).map(|_| rng.gen_range(1..=ORACLE_RADII)).collect();
    idx.sort_unstable_by(|a, b| b.cmp(a));
    idx
}

fn oracle_grid() -> Vec<f64> {
    (0..=ORACLE_RADII).map(|i| i as f64 / ORACLE_RADII as f64).collect()
}

/// Snaps a profile onto the oracle grid: level `i` takes the grid radius nearest
/// to `r` at its midpoint, scaled so that `r(0)` is the top of the grid.
fn profile_to_oracle(base: &RadiusProfile) -> Result<BruteForceProblem> {
    if base.is_zero() {
        return Err(config_err("the oracle needs a nonzero profile"));
    }
    let a = base.support_length();
    let dt = a / ORACLE_LEVELS as f64;
    let top = base.initial_radius();
    let grid: Vec<f64> = (0..=ORACLE_RADII).map(|i| top * i as f64 / ORACLE_RADII as f64).collect();
    let mut idx = Vec::with_capacity(ORACLE_LEVELS);
    for i in 0..ORACLE_LEVELS {
        let r = base.eval((i as f64 + 0.5) * dt)?;
        let k = (r / top * ORACLE_RADII as f64).round() as usize;
        idx.push(k.min(*idx.last().unwrap_or(&ORACLE_RADII)));
    }
    Ok(BruteForceProblem::new(grid, dt, idx, base.enclosing_radius())?)
}

/// One oracle trial: brute-force argmin against `next_level` from the top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTrial {
    pub is_truncation: bool,
    pub argmin_level: f64,
    pub scheme_level: f64,
    /// `|argmin_level - scheme_level| / Δt`.
    pub agreement_cells: f64,
}

pub fn oracle_trial(problem: &BruteForceProblem, tau: f64, root_tol: Option<f64>, consts: &DimensionalConstants) -> Result<OracleTrial> {
    let bf = brute_force_minimizer(problem, tau, consts, DEFAULT_BUDGET)?;
    let base = problem.base_profile()?;
    let mut params = SchemeParams::for_profile(tau, &base, consts)?;
    if let Some(t) = root_tol {
        params.root_tol = t;
    }
    let scheme_level = next_level(&base, base.support_length(), &params, consts)?;
    let argmin_level = bf.argmin.support_levels() as f64 * problem.dt;
    Ok(OracleTrial {
        is_truncation: bf.is_truncation(),
        argmin_level,
        scheme_level,
        agreement_cells: (argmin_level - scheme_level).abs() / problem.dt,
    })
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<Csv> {
    let tau = cfg.tau()?;
    let consts_override = cfg.dim.map(constants).transpose()?;
    let fixed = match &cfg.profile {
        Some(_) => {
            let (base, consts) = cfg.load_profile()?;
            Some((profile_to_oracle(&base)?, consts))
        }
        None => None,
    };
    let trials = cfg.trials.unwrap_or(if fixed.is_some() { 1 } else { 20 });
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = Csv::new(&["trial", "argmin_is_truncation", "argmin_level", "scheme_level", "agreement_cells"]);
    for trial in 0..trials {
        let (problem, consts) = match &fixed {
            Some((p, c)) => (p.clone(), *c),
            None => {
                let grid = oracle_grid();
                let dt = 1.0 / ORACLE_LEVELS as f64;
                let problem = BruteForceProblem::new(grid, dt, random_oracle_base(&mut rng), ORACLE_ENCLOSING_RADIUS)?;
                (problem, consts_override.map_or_else(|| constants(2), Ok)?)
            }
        };
        let r = oracle_trial(&problem, tau, cfg.root_tol, &consts)?;
        csv.rows.push(vec![
            trial.to_string(),
            u8::from(r.is_truncation).to_string(),
            fmt_float(r.argmin_level),
            fmt_float(r.scheme_level),
            fmt_float(r.agreement_cells),
        ]);
    }
    Ok(csv)
}

/// `W_p` of the profile and `F(candidate; profile)`; the candidate defaults to
/// the profile itself and `τ` to 1.
pub fn cmd_energy(cfg: &RunConfig) -> Result<Csv> {
    let (base, consts) = cfg.load_profile()?;
    let tau = if cfg.taus.is_empty() { 1.0 } else { cfg.tau()? };
    let p = cfg.p.unwrap_or((consts.d - 1) as f64);
    let params = EnergyParams::new(p, tau, consts)?;
    let candidate = match &cfg.candidate {
        Some(path) => read_profile(path)?.profile,
        None => base.clone(),
    };
    let w = willmore_p(&base, &params)?.to_f64();
    let f = functional_f(&candidate, &base, &params);
    let mut csv = Csv::new(&["W_p", "F"]);
    csv.rows.push(vec![fmt_float(w), fmt_float(f)]);
    Ok(csv)
}
