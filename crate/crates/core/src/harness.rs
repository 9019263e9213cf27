//! Experiment configuration, scenario drivers and report files.
//!
//! A run reads one JSON config, fills in per-scenario defaults, and writes
//! CSV data, `summary.json`, `config.json` (the resolved config) and
//! `log.txt` into `<out>/<command>-<scenario>-<hash>`, where the hash is a
//! SHA-256 prefix of the resolved config. Nothing in the output depends on
//! wall-clock time, so identical configs give byte-identical files.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::{self, ReflectionFn};
use crate::core::FieldState;
use crate::error::{Error, Result};
use crate::rhp::{self, RhpConfig};
use crate::scattering::{scattering_data, DiscreteSpectrum, ScatterConfig, Scatterer, ScatteringData, Side};
use crate::simulator::{self, evolve_snapshots};
use crate::solitons::{self, n_soliton, one_soliton, one_soliton_params};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    RadiationAsymptotics,
    SolitonTrack,
    TwoSolitonResolution,
    Roundtrip,
    BEquality,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::RadiationAsymptotics,
        Scenario::SolitonTrack,
        Scenario::TwoSolitonResolution,
        Scenario::Roundtrip,
        Scenario::BEquality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::RadiationAsymptotics => "radiation_asymptotics",
            Scenario::SolitonTrack => "soliton_track",
            Scenario::TwoSolitonResolution => "two_soliton_resolution",
            Scenario::Roundtrip => "roundtrip",
            Scenario::BEquality => "b_equality",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Scenario::ALL.iter().map(|c| c.name()).collect();
            Error::Config(format!("scenario: unknown value `{s}`, expected one of {}", names.join(", ")))
        })
    }
}

/// CLI subcommands; `Report` runs the configured scenario end to end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Scatter,
    Predict,
    Soliton,
    Reconstruct,
    Resolve,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Scatter => "scatter",
            Command::Predict => "predict",
            Command::Soliton => "soliton",
            Command::Reconstruct => "reconstruct",
            Command::Resolve => "resolve",
            Command::Report => "report",
        }
    }
}

/// One soliton by |lambda|^2, gamma in (0, pi) and the centre x0 at t = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSpec {
    pub lambda_sq: f64,
    pub gamma: f64,
    pub x0: f64,
}

impl SolitonSpec {
    /// (lambda, C) with C real positive and the centre at x0.
    pub fn lambda_and_c(&self) -> Result<(C64, C64)> {
        if !(self.lambda_sq > 0.0) || !(self.gamma > 0.0 && self.gamma < PI) || !self.x0.is_finite() {
            return Err(Error::Config(format!(
                "initial.solitons: need lambda_sq > 0, 0 < gamma < pi and finite x0, got {self:?}"
            )));
        }
        let lambda = -self.lambda_sq.sqrt() * C64::from_polar(1.0, -0.5 * self.gamma);
        // x0 is affine in ln|C| with slope 1/E
        let p = one_soliton_params(lambda, C64::new(1.0, 0.0))?;
        Ok((lambda, C64::new((p.e * (self.x0 - p.x0)).exp(), 0.0)))
    }
}

fn unit() -> f64 {
    1.0
}

/// Initial data families.
///   gaussian:  u = A e^{-(x/w)^2},  v = A e^{i phase} e^{-(x/w)^2}
///   solitons:  exact multi-soliton at t = 0, plus a gaussian of amplitude
///              `radiation` (u real, v imaginary) when nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Gaussian {
        amplitude: f64,
        #[serde(default = "unit")]
        width: f64,
        #[serde(default)]
        v_phase: f64,
    },
    Solitons {
        solitons: Vec<SolitonSpec>,
        #[serde(default)]
        radiation: f64,
    },
}

impl InitialData {
    fn validate(&self) -> Result<()> {
        match self {
            InitialData::Gaussian { amplitude, width, v_phase } => {
                if !amplitude.is_finite() || !(*width > 0.0) || !v_phase.is_finite() {
                    return Err(Error::Config("initial: gaussian needs finite amplitude and width > 0".into()));
                }
            }
            InitialData::Solitons { solitons, radiation } => {
                if solitons.is_empty() || solitons.len() > solitons::MAX_SOLITONS {
                    return Err(Error::Config(format!(
                        "initial.solitons: need 1..={} entries",
                        solitons::MAX_SOLITONS
                    )));
                }
                if !radiation.is_finite() {
                    return Err(Error::Config("initial.radiation must be finite".into()));
                }
                for s in solitons {
                    s.lambda_and_c()?;
                }
            }
        }
        Ok(())
    }

    /// Half-width outside which the data are negligible.
    fn support(&self) -> f64 {
        match self {
            InitialData::Gaussian { width, .. } => 12.0 * width,
            InitialData::Solitons { solitons, .. } => solitons.iter().map(|s| s.x0.abs()).fold(0.0, f64::max) + 20.0,
        }
    }

    pub fn spectrum(&self) -> Result<Option<DiscreteSpectrum>> {
        match self {
            InitialData::Gaussian { .. } => Ok(None),
            InitialData::Solitons { solitons, .. } => {
                let (l, c): (Vec<C64>, Vec<C64>) =
                    solitons.iter().map(|s| s.lambda_and_c()).collect::<Result<Vec<_>>>()?.into_iter().unzip();
                Ok(Some(DiscreteSpectrum::new(l, c)?))
            }
        }
    }

    /// Samples on [-half, half] with spacing dx.
    pub fn fields(&self, half: f64, dx: f64) -> Result<FieldState> {
        let n = (2.0 * half / dx).round() as usize + 1;
        match self {
            InitialData::Gaussian { amplitude, width, v_phase } => {
                let e = C64::from_polar(1.0, *v_phase);
                Ok(FieldState::from_fn(0.0, -half, dx, n, |x| {
                    let g = amplitude * (-(x / width) * (x / width)).exp();
                    (C64::new(g, 0.0), e * g)
                }))
            }
            InitialData::Solitons { radiation, .. } => {
                let spec = self.spectrum()?.expect("soliton family");
                let mut f = n_soliton(&spec, 0.0, -half, dx, n)?;
                if *radiation != 0.0 {
                    for k in 0..n {
                        let x = f.x(k);
                        let g = radiation * (-x * x).exp();
                        f.u[k] += C64::new(g, 0.0);
                        f.v[k] += C64::new(0.0, g);
                    }
                }
                Ok(f)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// simulator spacing (= time step)
    pub dx: Option<f64>,
    /// simulator half-width; defaults to support + largest time + margin
    pub half_width: Option<f64>,
    /// also run at dx/2 and extrapolate the second-order error away
    pub richardson: Option<bool>,
    /// spacing and half-width of the window handed to the direct transform
    pub scatter_dx: Option<f64>,
    pub scatter_half_width: Option<f64>,
    /// nodes and extent of the sampled r, r-hat
    pub spectral_nodes: Option<usize>,
    pub spectral_max: Option<f64>,
    /// output grid of `reconstruct`
    pub reconstruct_dx: Option<f64>,
    pub reconstruct_half_width: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub min_exponent: Option<f64>,
    pub max_error: Option<f64>,
    pub min_order: Option<f64>,
    pub closed_form: Option<f64>,
    pub charge_drift: Option<f64>,
    pub k_ratio: Option<f64>,
    pub constant_agreement: Option<f64>,
    pub route_agreement: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub initial: Option<InitialData>,
    #[serde(default)]
    pub grid: GridConfig,
    /// tau values (radiation_asymptotics, predict) or times (everything else)
    pub samples: Option<Vec<f64>>,
    /// ray x/t for radiation_asymptotics and predict
    pub speed: Option<f64>,
    /// number of speeds swept by b_equality
    pub speed_count: Option<usize>,
    /// half-width in velocity of each soliton cone
    pub cone_width: Option<f64>,
    pub out_dir: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Parses a config; every failure is a configuration error naming the field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    match v.get("scenario") {
        Some(serde_json::Value::String(s)) => {
            s.parse::<Scenario>()?;
        }
        Some(_) => return Err(Error::Config("scenario: expected a string".into())),
        None => return Err(Error::Config("scenario: missing".into())),
    }
    serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// A config with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plan {
    pub scenario: Scenario,
    pub initial: InitialData,
    pub dx: f64,
    pub half_width: f64,
    pub richardson: bool,
    pub scatter_dx: f64,
    pub scatter_half_width: f64,
    pub spectral_nodes: usize,
    pub spectral_max: f64,
    pub reconstruct_dx: f64,
    pub reconstruct_half_width: f64,
    pub samples: Vec<f64>,
    pub speed: f64,
    pub speed_count: usize,
    pub cone_width: f64,
    pub tolerances: BTreeMap<String, f64>,
}

fn gaussian(amplitude: f64) -> InitialData {
    InitialData::Gaussian { amplitude, width: 1.0, v_phase: 0.0 }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

impl Plan {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        use Scenario::*;
        let sc = cfg.scenario;
        let initial = match &cfg.initial {
            Some(i) => i.clone(),
            None => match sc {
                RadiationAsymptotics | BEquality => gaussian(0.1),
                Roundtrip => gaussian(0.05),
                SolitonTrack => InitialData::Solitons {
                    solitons: vec![SolitonSpec { lambda_sq: 0.8, gamma: 0.62 * PI, x0: 0.0 }],
                    radiation: 0.0,
                },
                TwoSolitonResolution => InitialData::Solitons {
                    solitons: vec![
                        SolitonSpec { lambda_sq: 0.5, gamma: 0.5 * PI, x0: -5.0 },
                        SolitonSpec { lambda_sq: 2.0, gamma: 0.5 * PI, x0: 5.0 },
                    ],
                    radiation: 0.1,
                },
            },
        };
        initial.validate()?;
        let g = &cfg.grid;
        let dx = positive(
            "grid.dx",
            g.dx.unwrap_or(match sc {
                SolitonTrack => 1.0 / 256.0,
                RadiationAsymptotics => 1.0 / 64.0,
                _ => 1.0 / 64.0,
            }),
        )?;
        let samples = cfg.samples.clone().unwrap_or_else(|| match sc {
            RadiationAsymptotics => vec![50.0, 100.0, 200.0, 400.0],
            SolitonTrack => vec![10.0],
            TwoSolitonResolution => vec![40.0, 80.0, 160.0],
            Roundtrip => vec![0.0],
            BEquality => vec![],
        });
        if samples.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Config("samples must be finite and nonnegative".into()));
        }
        let speed = cfg.speed.unwrap_or(0.2);
        if !(speed.abs() < 1.0) {
            return Err(Error::Config(format!("speed must lie in (-1, 1), got {speed}")));
        }
        // largest simulated time: tau samples sit on the ray x = speed t
        let t_max = samples
            .iter()
            .map(|&s| if sc == RadiationAsymptotics { s / (1.0 - speed * speed).sqrt() } else { s })
            .fold(0.0, f64::max);
        let support = initial.support();
        let half_width =
            positive("grid.half_width", g.half_width.unwrap_or_else(|| simulator::default_half_width(support, t_max)))?;
        let scatter_dx =
            positive("grid.scatter_dx", g.scatter_dx.unwrap_or(if sc == Roundtrip { 0.05 } else { 0.025 }))?;
        let scatter_half_width = positive("grid.scatter_half_width", g.scatter_half_width.unwrap_or(support))?;
        let spectral_nodes = g.spectral_nodes.unwrap_or(if sc == Roundtrip { 2048 } else { 4096 });
        if spectral_nodes < 16 {
            return Err(Error::Config("grid.spectral_nodes must be at least 16".into()));
        }
        let speed_count = cfg.speed_count.unwrap_or(50);
        if speed_count == 0 {
            return Err(Error::Config("speed_count must be positive".into()));
        }
        let mut tolerances = BTreeMap::new();
        let t = &cfg.tolerances;
        let mut tol = |name: &str, given: Option<f64>, default: f64| -> Result<()> {
            tolerances.insert(name.to_string(), positive(&format!("tolerances.{name}"), given.unwrap_or(default))?);
            Ok(())
        };
        match sc {
            RadiationAsymptotics => tol("min_exponent", t.min_exponent, 0.6)?,
            SolitonTrack => {
                tol("max_error", t.max_error, 1e-3)?;
                tol("min_order", t.min_order, 1.9)?;
                tol("closed_form", t.closed_form, 1e-10)?;
                tol("charge_drift", t.charge_drift, 1e-10)?;
            }
            TwoSolitonResolution => {
                tol("k_ratio", t.k_ratio, 2.0)?;
                tol("constant_agreement", t.constant_agreement, 1e-6)?;
            }
            Roundtrip => tol("max_error", t.max_error, 1e-3)?,
            BEquality => tol("route_agreement", t.route_agreement, 1e-8)?,
        }
        Ok(Self {
            scenario: sc,
            initial,
            dx,
            half_width,
            richardson: g.richardson.unwrap_or(matches!(sc, RadiationAsymptotics | TwoSolitonResolution)),
            scatter_dx,
            scatter_half_width,
            spectral_nodes,
            spectral_max: positive("grid.spectral_max", g.spectral_max.unwrap_or(12.0))?,
            reconstruct_dx: positive("grid.reconstruct_dx", g.reconstruct_dx.unwrap_or(0.2))?,
            reconstruct_half_width: positive("grid.reconstruct_half_width", g.reconstruct_half_width.unwrap_or(4.0))?,
            samples,
            speed,
            speed_count,
            cone_width: positive("cone_width", cfg.cone_width.unwrap_or(0.1))?,
            tolerances,
        })
    }

    fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    fn scatter_config(&self) -> ScatterConfig {
        ScatterConfig {
            w_min: -self.spectral_max,
            w_max: self.spectral_max,
            n_grid: self.spectral_nodes,
            ..Default::default()
        }
    }

    fn scatter_window(&self) -> Result<FieldState> {
        self.initial.fields(self.scatter_half_width, self.scatter_dx)
    }

    fn scatter(&self) -> Result<ScatteringData> {
        scattering_data(&self.scatter_window()?, &self.scatter_config())
    }

    /// Simulated snapshots at `times`, optionally Richardson-extrapolated
    /// from spacings dx and dx/2 onto the dx grid.
    fn simulate(&self, times: &[f64]) -> Result<Vec<FieldState>> {
        let coarse = evolve_snapshots(&self.initial.fields(self.half_width, self.dx)?, times)?;
        if !self.richardson {
            return Ok(coarse);
        }
        let fine = evolve_snapshots(&self.initial.fields(self.half_width, 0.5 * self.dx)?, times)?;
        Ok(coarse
            .into_iter()
            .zip(fine)
            .map(|(mut c, f)| {
                for k in 0..c.len() {
                    c.u[k] = (4.0 * f.u[2 * k] - c.u[k]) / 3.0;
                    c.v[k] = (4.0 * f.v[2 * k] - c.v[k]) / 3.0;
                }
                c
            })
            .collect())
    }

    /// Rounds a time to the simulator step.
    fn on_step(&self, t: f64) -> f64 {
        (t / self.dx).round() * self.dx
    }
}

/// Least-squares slope of ln(residual) against ln(tau), sign-flipped so
/// that residual = C tau^{-p} gives p.
pub fn fit_decay(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 4 {
        return Err(Error::Domain(format!("fit_decay needs at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|&(t, r)| !(t > 0.0 && r > 0.0)) {
        return Err(Error::Domain("fit_decay needs positive tau and residuals".into()));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("fit_decay needs at least two distinct tau".into()));
    }
    Ok(-sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// "<=" or ">="
    pub relation: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, relation: "<=".into(), pass: value <= limit }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, relation: ">=".into(), pass: value >= limit }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub command: String,
    pub scenario: Scenario,
    pub pass: bool,
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub files: Vec<String>,
    pub config_sha256: String,
}

/// Collected output of one run before it is written.
struct Report {
    files: Vec<(String, String)>,
    log: Vec<String>,
    checks: Vec<Check>,
    metrics: BTreeMap<String, f64>,
    max_residual: Option<f64>,
    exponent: Option<f64>,
}

impl Report {
    fn new() -> Self {
        Self {
            files: vec![],
            log: vec![],
            checks: vec![],
            metrics: BTreeMap::new(),
            max_residual: None,
            exponent: None,
        }
    }

    fn log(&mut self, line: String) {
        self.log.push(line);
    }

    fn file(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    fn metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.to_string(), v);
    }
}

pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: Summary,
}

/// Runs `command` for the config and writes the report files under `out`.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    let plan = Plan::new(cfg)?;
    let resolved = serde_json::to_string_pretty(&plan)? + "\n";
    let hash = hex::encode(Sha256::digest(resolved.as_bytes()));
    let dir = out.join(format!("{}-{}-{}", command.name(), plan.scenario, &hash[..12]));
    fs::create_dir_all(&dir)
        .map_err(|e| Error::Config(format!("output directory {} is not writable: {e}", dir.display())))?;

    let mut rep = Report::new();
    rep.log(format!("command {} scenario {}", command.name(), plan.scenario));
    match command {
        Command::Report => match plan.scenario {
            Scenario::RadiationAsymptotics => radiation_asymptotics(&plan, &mut rep)?,
            Scenario::SolitonTrack => soliton_track(&plan, &mut rep)?,
            Scenario::TwoSolitonResolution => two_soliton_resolution(&plan, &mut rep)?,
            Scenario::Roundtrip => roundtrip(&plan, &mut rep)?,
            Scenario::BEquality => b_equality(&plan, &mut rep)?,
        },
        Command::Simulate => stage_simulate(&plan, &mut rep)?,
        Command::Scatter => {
            let s = plan.scatter()?;
            rep.log(format!("eigenvalues {}", s.spectrum.len()));
            rep.file("scattering.json", s.to_json() + "\n");
        }
        Command::Predict => stage_predict(&plan, &mut rep)?,
        Command::Soliton => stage_soliton(&plan, &mut rep)?,
        Command::Reconstruct => stage_reconstruct(&plan, &mut rep)?,
        Command::Resolve => {
            let (_, rows) = resolution_constants(&plan, &mut rep)?;
            rep.file("resolution.json", serde_json::to_string_pretty(&rows)? + "\n");
        }
    }

    let pass = rep.checks.iter().all(|c| c.pass);
    let mut files: Vec<String> = rep.files.iter().map(|f| f.0.clone()).collect();
    files.extend(["config.json", "log.txt", "summary.json"].map(String::from));
    let summary = Summary {
        command: command.name().into(),
        scenario: plan.scenario,
        pass,
        max_residual: rep.max_residual,
        exponent: rep.exponent,
        checks: rep.checks,
        metrics: rep.metrics,
        tolerances: plan.tolerances.clone(),
        files,
        config_sha256: hash,
    };
    for c in &summary.checks {
        rep.log.push(format!(
            "check {} = {:e} {} {:e}: {}",
            c.name,
            c.value,
            c.relation,
            c.limit,
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
    rep.log.push(format!("result {}", if pass { "pass" } else { "fail" }));
    let write = |name: &str, body: &str| {
        fs::write(dir.join(name), body).map_err(|e| Error::Config(format!("cannot write {name}: {e}")))
    };
    for (name, body) in &rep.files {
        write(name, body)?;
    }
    write("config.json", &resolved)?;
    write("log.txt", &(rep.log.join("\n") + "\n"))?;
    write("summary.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    Ok(RunOutcome { dir, summary })
}

/// `run(Command::Report, ..)`.
pub fn run_scenario(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    run(Command::Report, cfg, out)
}

fn soliton_free(plan: &Plan, s: &ScatteringData) -> Result<()> {
    if !s.spectrum.is_empty() {
        return Err(Error::InvalidData(format!(
            "{} needs soliton-free data; found {} eigenvalue(s)",
            plan.scenario,
            s.spectrum.len()
        )));
    }
    Ok(())
}

fn radiation_asymptotics(plan: &Plan, rep: &mut Report) -> Result<()> {
    let s = plan.scatter()?;
    soliton_free(plan, &s)?;
    let v = plan.speed;
    let times: Vec<f64> = plan.samples.iter().map(|tau| plan.on_step(tau / (1.0 - v * v).sqrt())).collect();
    let snaps = plan.simulate(&times)?;
    let mut csv = String::from("tau,t,x,re_u,im_u,re_u_as,im_u_as,re_v,im_v,re_v_as,im_v_as,residual_u,residual_v\n");
    let mut pts = vec![];
    for (st, &t) in snaps.iter().zip(&times) {
        let k = ((v * t - st.x_start) / st.dx).round() as usize;
        let x = st.x(k);
        let tau = crate::core::cone_coords(t, x)?.tau;
        let (ua, va) = asymptotics::predict_fields(&s.r_hat, t, x)?;
        let (ru, rv) = ((st.u[k] - ua).norm(), (st.v[k] - va).norm());
        csv.push_str(&format!(
            "{tau},{t},{x},{},{},{},{},{},{},{},{},{ru},{rv}\n",
            st.u[k].re, st.u[k].im, ua.re, ua.im, st.v[k].re, st.v[k].im, va.re, va.im
        ));
        rep.log(format!("tau {tau} t {t} x {x} residual_u {ru:e} residual_v {rv:e}"));
        pts.push((tau, ru));
    }
    rep.file("residuals.csv", csv);
    let p = fit_decay(&pts)?;
    rep.exponent = Some(p);
    rep.max_residual = Some(pts.iter().map(|p| p.1).fold(0.0, f64::max));
    rep.checks.push(Check::at_least("decay_exponent", p, plan.tol("min_exponent")));
    Ok(())
}

fn soliton_track(plan: &Plan, rep: &mut Report) -> Result<()> {
    let spec = plan
        .initial
        .spectrum()?
        .ok_or_else(|| Error::Config("initial: soliton_track needs the solitons family".into()))?;
    if spec.len() != 1 {
        return Err(Error::Config("initial.solitons: soliton_track takes exactly one soliton".into()));
    }
    let t = plan.on_step(plan.samples.iter().copied().fold(0.0, f64::max));
    let (l, c) = (spec.eigenvalues[0], spec.norming[0]);
    let exact = |f: &FieldState| -> Result<f64> {
        let mut e: f64 = 0.0;
        for k in 0..f.len() {
            let (u, v) = one_soliton(l, c, f.t, f.x(k))?;
            e = e.max((f.u[k] - u).norm()).max((f.v[k] - v).norm());
        }
        Ok(e)
    };
    // closed form against the residue system
    let ns =
        n_soliton(&spec, t, -plan.half_width, plan.dx * 64.0, (2.0 * plan.half_width / (plan.dx * 64.0)) as usize + 1)?;
    let closed = exact(&ns)?;
    rep.checks.push(Check::at_most("closed_form_agreement", closed, plan.tol("closed_form")));

    let mut errs = vec![];
    let mut drift: f64 = 0.0;
    let mut csv = String::from("dx,t,sup_error,charge_drift\n");
    for h in [2.0 * plan.dx, plan.dx, 0.5 * plan.dx] {
        let f0 = plan.initial.fields(plan.half_width, h)?;
        let (f, r) = simulator::evolve(&f0, t)?;
        let e = exact(&f)?;
        csv.push_str(&format!("{h},{t},{e},{}\n", r.relative_drift()));
        rep.log(format!("dx {h} sup_error {e:e} charge_drift {:e} boundary {:e}", r.relative_drift(), r.boundary_max));
        drift = drift.max(r.relative_drift());
        errs.push(e);
    }
    rep.file("convergence.csv", csv);
    let order = (errs[0] / errs[1]).log2().min((errs[1] / errs[2]).log2());
    rep.metric("order", order);
    rep.max_residual = Some(errs[1]);
    rep.checks.push(Check::at_most("sup_error", errs[1], plan.tol("max_error")));
    rep.checks.push(Check::at_least("convergence_order", order, plan.tol("min_order")));
    rep.checks.push(Check::at_most("charge_drift", drift, plan.tol("charge_drift")));
    Ok(())
}

#[derive(Serialize)]
struct ResolutionRow {
    lambda: [f64; 2],
    speed: f64,
    c: [f64; 2],
    c_tilde: [f64; 2],
    c_tilde_w: [f64; 2],
}

/// Modified norming constant of each soliton inside its own cone.
fn resolution_constants(plan: &Plan, rep: &mut Report) -> Result<(ScatteringData, Vec<ResolutionRow>)> {
    let s = plan.scatter()?;
    let mut rows = vec![];
    let mut worst: f64 = 0.0;
    for j in 0..s.spectrum.len() {
        let l = s.spectrum.eigenvalues[j];
        let p = one_soliton_params(l, s.spectrum.norming[j])?;
        let (v1, v2) = ((p.nu - plan.cone_width).max(-0.999), (p.nu + plan.cone_width).min(0.999));
        let rs = solitons::cone_restrict(&s, v1, v2)?;
        if rs.spectrum.len() != 1 {
            return Err(Error::Resolution(format!(
                "cone around speed {} holds {} eigenvalues",
                p.nu,
                rs.spectrum.len()
            )));
        }
        let rc = solitons::resolution_constants(&rs, l.norm_sqr())?[0];
        worst = worst.max((rc.c_tilde - rc.c_tilde_w).norm() / rc.c_tilde.norm());
        rep.log(format!("soliton {j}: lambda {l} speed {} C~/C {}", p.nu, rc.c_tilde / s.spectrum.norming[j]));
        rows.push(ResolutionRow {
            lambda: [l.re, l.im],
            speed: p.nu,
            c: [s.spectrum.norming[j].re, s.spectrum.norming[j].im],
            c_tilde: [rc.c_tilde.re, rc.c_tilde.im],
            c_tilde_w: [rc.c_tilde_w.re, rc.c_tilde_w.im],
        });
    }
    if let Some(&tol) = plan.tolerances.get("constant_agreement") {
        rep.checks.push(Check::at_most("constant_forms_agreement", worst, tol));
    }
    Ok((s, rows))
}

fn two_soliton_resolution(plan: &Plan, rep: &mut Report) -> Result<()> {
    let expected = plan.initial.spectrum()?.map(|s| s.len()).unwrap_or(0);
    let (s, rows) = resolution_constants(plan, rep)?;
    if s.spectrum.len() != expected {
        return Err(Error::Resolution(format!("found {} eigenvalues, expected {expected}", s.spectrum.len())));
    }
    rep.file("resolution.json", serde_json::to_string_pretty(&rows)? + "\n");
    let times: Vec<f64> = plan.samples.iter().map(|&t| plan.on_step(t)).collect();
    let snaps = plan.simulate(&times)?;
    let mut csv = String::from("t,soliton,speed,sup_error,k\n");
    let mut worst: f64 = 0.0;
    let mut ratio: f64 = 1.0;
    for (j, row) in rows.iter().enumerate() {
        let l = C64::new(row.lambda[0], row.lambda[1]);
        let ct = C64::new(row.c_tilde[0], row.c_tilde[1]);
        let (v1, v2) = (row.speed - plan.cone_width, row.speed + plan.cone_width);
        let mut ks = vec![];
        for st in &snaps {
            let t = st.t;
            let mut err: f64 = 0.0;
            for k in 0..st.len() {
                let x = st.x(k);
                if x < v1 * t - CONE_MARGIN || x > v2 * t + CONE_MARGIN {
                    continue;
                }
                let (u, v) = one_soliton(l, ct, t, x)?;
                err = err.max((st.u[k] - u).norm()).max((st.v[k] - v).norm());
            }
            let k = err * t.sqrt();
            csv.push_str(&format!("{t},{j},{},{err},{k}\n", row.speed));
            rep.log(format!("t {t} soliton {j} sup_error {err:e} K {k:e}"));
            worst = worst.max(err);
            ks.push(k);
        }
        let (lo, hi) = ks.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &k| (a.min(k), b.max(k)));
        rep.metric(&format!("k_{j}"), hi);
        ratio = ratio.max(hi / lo);
    }
    rep.file("resolution.csv", csv);
    rep.max_residual = Some(worst);
    rep.metric("k_ratio", ratio);
    rep.checks.push(Check::at_most("k_stability_ratio", ratio, plan.tol("k_ratio")));
    Ok(())
}

/// Cone K(v1, v2, x1, x2) used for the sup-norm: x1 = -CONE_MARGIN, x2 = CONE_MARGIN.
const CONE_MARGIN: f64 = 5.0;

fn roundtrip(plan: &Plan, rep: &mut Report) -> Result<()> {
    let s = plan.scatter()?;
    soliton_free(plan, &s)?;
    let (f, err) = reconstruct_at_zero(plan, &s)?;
    rep.file("fields.csv", f.to_csv());
    rep.log(format!("sup error at t = 0: {err:e}"));
    rep.max_residual = Some(err);
    rep.checks.push(Check::at_most("roundtrip_error", err, plan.tol("max_error")));
    Ok(())
}

fn reconstruct_grid(plan: &Plan) -> (f64, usize) {
    let n = (2.0 * plan.reconstruct_half_width / plan.reconstruct_dx).round() as usize + 1;
    (-plan.reconstruct_half_width, n)
}

fn reconstruct_at_zero(plan: &Plan, s: &ScatteringData) -> Result<(FieldState, f64)> {
    let (x0, n) = reconstruct_grid(plan);
    let f = rhp::reconstruct_fields(s, 0.0, x0, plan.reconstruct_dx, n, &RhpConfig::default())?;
    let exact = plan.initial.fields(plan.reconstruct_half_width, plan.reconstruct_dx)?;
    let err = (0..n).map(|k| (f.u[k] - exact.u[k]).norm().max((f.v[k] - exact.v[k]).norm())).fold(0.0, f64::max);
    Ok((f, err))
}

fn b_equality(plan: &Plan, rep: &mut Report) -> Result<()> {
    let sc = Scatterer::new(&plan.scatter_window()?)?;
    let eval = |side: Side, s: f64| -> C64 {
        if s == 0.0 {
            return C64::new(0.0, 0.0);
        }
        // |s| < 1 through the other side, where the Jost problem is well scaled
        let (side, s, scale) =
            if s.abs() >= 1.0 { (side, s, 1.0) } else { (if side == Side::W { Side::Z } else { Side::W }, 1.0 / s, s) };
        sc.reflection_at(side, s).map(|r| r / scale).unwrap_or(C64::new(f64::NAN, f64::NAN))
    };
    let r = |s: f64| eval(Side::W, s);
    let r_hat = |s: f64| eval(Side::Z, s);
    let wf = ReflectionFn::new(&r, f64::NEG_INFINITY, f64::INFINITY, 64)?;
    let zf = ReflectionFn::new(&r_hat, f64::NEG_INFINITY, f64::INFINITY, 64)?;
    let mut csv =
        String::from("speed,re_f_minus,im_f_minus,re_f_plus,im_f_plus,w_route_diff,q_as_z_diff,q_as_w_diff\n");
    let mut worst: f64 = 0.0;
    let n = plan.speed_count;
    for k in 0..n {
        let speed = -0.9 + 1.8 * (k as f64 + 0.5) / n as f64;
        let (fm, fp) = asymptotics::f_pm_with(&zf, speed)?;
        let d = |(a, b): (C64, C64)| (a - fm).norm().max((b - fp).norm());
        let dw = d(asymptotics::f_pm_from_r_with(&wf, speed)?);
        let dqz = d(asymptotics::f_pm_from_q_as(&zf, speed, Side::Z)?);
        let dqw = d(asymptotics::f_pm_from_q_as(&wf, speed, Side::W)?);
        let m = dw.max(dqz).max(dqw);
        if !m.is_finite() {
            return Err(Error::Resonance(format!("reflection coefficient not computable near speed {speed}")));
        }
        worst = worst.max(m);
        csv.push_str(&format!("{speed},{},{},{},{},{dw},{dqz},{dqw}\n", fm.re, fm.im, fp.re, fp.im));
    }
    rep.file("routes.csv", csv);
    rep.log(format!("{n} speeds, largest route difference {worst:e}"));
    rep.max_residual = Some(worst);
    rep.checks.push(Check::at_most("route_agreement", worst, plan.tol("route_agreement")));
    Ok(())
}

fn stage_simulate(plan: &Plan, rep: &mut Report) -> Result<()> {
    let mut times: Vec<f64> = plan.samples.iter().map(|&t| plan.on_step(t)).collect();
    if times.is_empty() {
        times.push(plan.on_step(10.0));
    }
    let f0 = plan.initial.fields(plan.half_width, plan.dx)?;
    let q0 = simulator::charge(&f0);
    for (k, st) in plan.simulate(&times)?.iter().enumerate() {
        let drift = ((simulator::charge(st) - q0) / q0).abs();
        rep.log(format!("t {} charge drift {drift:e}", st.t));
        rep.metric(&format!("charge_drift_{k}"), drift);
        rep.file(&format!("fields_{k}.csv"), st.to_csv());
    }
    Ok(())
}

fn stage_predict(plan: &Plan, rep: &mut Report) -> Result<()> {
    let s = plan.scatter()?;
    soliton_free(plan, &s)?;
    let v = plan.speed;
    let pts: Vec<(f64, f64)> = plan
        .samples
        .iter()
        .map(|tau| {
            let t = tau / (1.0 - v * v).sqrt();
            (t, v * t)
        })
        .collect();
    rep.file("prediction.csv", asymptotics::prediction_csv(&s.r_hat, &pts)?);
    Ok(())
}

fn stage_soliton(plan: &Plan, rep: &mut Report) -> Result<()> {
    let spec = match &plan.initial {
        InitialData::Solitons { radiation, .. } if *radiation == 0.0 => {
            plan.initial.spectrum()?.expect("soliton family")
        }
        _ => return Err(Error::Config("initial: soliton needs the solitons family with zero radiation".into())),
    };
    let n = (2.0 * plan.half_width / plan.dx).round() as usize + 1;
    let times = if plan.samples.is_empty() { vec![0.0] } else { plan.samples.clone() };
    for (k, &t) in times.iter().enumerate() {
        rep.file(&format!("fields_{k}.csv"), n_soliton(&spec, t, -plan.half_width, plan.dx, n)?.to_csv());
    }
    Ok(())
}

fn stage_reconstruct(plan: &Plan, rep: &mut Report) -> Result<()> {
    let s = plan.scatter()?;
    let (x0, n) = reconstruct_grid(plan);
    let times = if plan.samples.is_empty() { vec![0.0] } else { plan.samples.clone() };
    for (k, &t) in times.iter().enumerate() {
        let st = crate::scattering::evolve_scattering(&s, t);
        let f = rhp::reconstruct_fields(&st, t, x0, plan.reconstruct_dx, n, &RhpConfig::default())?;
        rep.file(&format!("fields_{k}.csv"), f.to_csv());
    }
    if times.contains(&0.0) && s.spectrum.is_empty() {
        let (_, err) = reconstruct_at_zero(plan, &s)?;
        rep.metric("roundtrip_error", err);
        rep.max_residual = Some(err);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_fits() {
        let law = |p: f64| [50.0, 100.0, 200.0, 400.0].map(|t: f64| (t, t.powf(-p)));
        assert!((fit_decay(&law(0.75)).unwrap() - 0.75).abs() <= 1e-12);
        assert_eq!(fit_decay(&[50.0, 100.0, 200.0, 400.0].map(|t| (t, 0.3))).unwrap(), 0.0);
        let wobble = [50.0, 100.0, 200.0, 400.0].map(|t: f64| (t, t.powf(-0.75) * (1.0 + 0.05 * t.sin())));
        assert!((fit_decay(&wobble).unwrap() - 0.75).abs() <= 0.05);
        assert!(fit_decay(&law(0.75)[..3]).is_err());
        assert!(fit_decay(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
    }

    #[test]
    fn config_errors_name_the_field() {
        let e = parse_config(r#"{"scenario": "bogus"}"#).unwrap_err().to_string();
        assert!(e.contains("scenario") && e.contains("bogus"), "{e}");
        let e = parse_config(r#"{"scenario": "roundtrip", "grdi": {}}"#).unwrap_err().to_string();
        assert!(e.contains("grdi"), "{e}");
        let cfg = parse_config(r#"{"scenario": "roundtrip", "grid": {"dx": -1}}"#).unwrap();
        assert!(Plan::new(&cfg).unwrap_err().to_string().contains("grid.dx"));
        assert!(matches!(parse_config("{"), Err(Error::Config(_))));
        assert!(matches!(parse_config("{}"), Err(Error::Config(_))));
    }

    #[test]
    fn defaults_resolve() {
        for sc in Scenario::ALL {
            let cfg = parse_config(&format!(r#"{{"scenario": "{sc}"}}"#)).unwrap();
            let p = Plan::new(&cfg).unwrap();
            assert!(!p.tolerances.is_empty());
            assert_eq!(p.scenario.to_string().parse::<Scenario>().unwrap(), sc);
        }
    }

    #[test]
    fn soliton_spec_places_the_centre() {
        let s = SolitonSpec { lambda_sq: 0.5, gamma: 1.2, x0: -3.5 };
        let (l, c) = s.lambda_and_c().unwrap();
        let p = one_soliton_params(l, c).unwrap();
        assert!((p.x0 + 3.5).abs() < 1e-12);
        assert!((l.norm_sqr() - 0.5).abs() < 1e-15);
        assert!(SolitonSpec { lambda_sq: 0.5, gamma: 4.0, x0: 0.0 }.lambda_and_c().is_err());
    }
}
