//! Flat `key = value` experiment configuration with `#` comments.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::besov_drift::{BesovParams, Construction, DriftSpec, FIXTURE_SEED};
use crate::density_weak_error::Estimator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    KernelCheck,
    DriftCheck,
    Simulate,
    Rate,
    Duhamel,
    Decompose,
    Inequalities,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::KernelCheck,
        Mode::DriftCheck,
        Mode::Simulate,
        Mode::Rate,
        Mode::Duhamel,
        Mode::Decompose,
        Mode::Inequalities,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Mode::KernelCheck => "kernel-check",
            Mode::DriftCheck => "drift-check",
            Mode::Simulate => "simulate",
            Mode::Rate => "rate",
            Mode::Duhamel => "duhamel",
            Mode::Decompose => "decompose",
            Mode::Inequalities => "inequalities",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftKind {
    Zero,
    Constant,
    SingleMode,
    RandomFourier,
    LipschitzSmooth,
}

impl DriftKind {
    const ALL: [DriftKind; 5] = [
        DriftKind::Zero,
        DriftKind::Constant,
        DriftKind::SingleMode,
        DriftKind::RandomFourier,
        DriftKind::LipschitzSmooth,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            DriftKind::Zero => "zero",
            DriftKind::Constant => "constant",
            DriftKind::SingleMode => "single-mode",
            DriftKind::RandomFourier => "random-fourier",
            DriftKind::LipschitzSmooth => "lipschitz-smooth",
        }
    }
}

impl FromStr for DriftKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        DriftKind::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| format!("unknown drift `{s}`"))
    }
}

/// Every knob of a run. Defaults reproduce the distributional rate fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub alpha: f64,
    pub dim: usize,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub drift: DriftKind,
    /// Constant value, or amplitude of the single-mode and Lipschitz drifts.
    pub drift_value: Vec<f64>,
    pub torus_length: f64,
    pub cutoff: usize,
    pub sigma: f64,
    pub drift_seed: u64,
    pub modulation: f64,
    pub horizon: f64,
    pub steps: usize,
    pub start: Vec<f64>,
    pub paths: usize,
    pub seed: u64,
    /// Observation time; `None` is the horizon.
    pub time: Option<f64>,
    pub levels: Vec<usize>,
    /// `None` means `0.05 gamma`.
    pub epsilon: Option<f64>,
    pub slope_band: (f64, f64),
    pub bootstrap: usize,
    pub reference_steps: usize,
    pub probes: Vec<Vec<f64>>,
    pub estimator: Estimator,
    pub window_radius: f64,
    pub window_points: usize,
    pub bandwidth: f64,
    pub quad_nodes: usize,
    pub residual_tolerance: f64,
    pub sweep_tuples: usize,
    pub sweep_seed: u64,
    pub sampler_draws: usize,
    pub threads: usize,
    pub allow_invalid: bool,
    pub trajectories: bool,
    pub plot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Rate,
            alpha: 1.5,
            dim: 1,
            beta: -0.1,
            p: f64::INFINITY,
            q: f64::INFINITY,
            r: f64::INFINITY,
            drift: DriftKind::RandomFourier,
            drift_value: vec![1.0],
            torus_length: 16.0,
            cutoff: 512,
            sigma: 1.0,
            drift_seed: FIXTURE_SEED,
            modulation: 0.0,
            horizon: 1.0,
            steps: 32,
            start: vec![0.0],
            paths: 100_000,
            seed: 1,
            time: None,
            levels: (3..=10).map(|k| 1usize << k).collect(),
            epsilon: None,
            slope_band: (0.05, 0.35),
            bootstrap: 1000,
            reference_steps: 256,
            probes: [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|v| vec![*v]).collect(),
            estimator: Estimator::Kde,
            window_radius: 8.0,
            window_points: 65,
            bandwidth: 1.0,
            quad_nodes: 8,
            residual_tolerance: 0.1,
            sweep_tuples: 200,
            sweep_seed: 7,
            sampler_draws: 100_000,
            threads: 0,
            allow_invalid: false,
            trajectories: false,
            plot: false,
        }
    }
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

fn nums(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")
}

fn estimator_from(s: &str) -> std::result::Result<Estimator, String> {
    [Estimator::Histogram, Estimator::Kde, Estimator::Conditional]
        .into_iter()
        .find(|e| e.tag() == s)
        .ok_or_else(|| format!("unknown estimator `{s}`"))
}

impl ExperimentConfig {
    pub fn besov(&self) -> Result<BesovParams> {
        BesovParams::new(self.beta, self.p, self.q, self.r)
    }

    pub fn time(&self) -> f64 {
        self.time.unwrap_or(self.horizon)
    }

    /// The drift fixture described by the config.
    pub fn drift_spec(&self) -> Result<DriftSpec> {
        let d = self.dim;
        let value = |what: &str| -> Result<Vec<f64>> {
            match self.drift_value.len() {
                1 => {
                    let mut v = vec![0.0; d];
                    v[0] = self.drift_value[0];
                    if what == "constant" {
                        v = vec![self.drift_value[0]; d];
                    }
                    Ok(v)
                }
                n if n == d => Ok(self.drift_value.clone()),
                n => Err(Error::Configuration(format!("drift_value has {n} entries, expected 1 or {d}"))),
            }
        };
        let construction = match self.drift {
            DriftKind::Zero => Construction::Constant { value: vec![0.0; d] },
            DriftKind::Constant => Construction::Constant { value: value("constant")? },
            DriftKind::SingleMode => {
                let mut wave = vec![0; d];
                wave[0] = 1;
                Construction::DeterministicSingleMode {
                    wave,
                    amplitude: value("single-mode")?,
                }
            }
            DriftKind::RandomFourier => Construction::RandomFourier { sigma: self.sigma },
            DriftKind::LipschitzSmooth => Construction::LipschitzSmooth {
                amplitude: self.drift_value[0],
            },
        };
        let mut spec = DriftSpec::new(self.alpha, d, self.torus_length, self.besov()?, construction);
        spec.cutoff = self.cutoff;
        spec.seed = self.drift_seed;
        spec.horizon = self.horizon;
        spec.modulation = self.modulation;
        Ok(spec)
    }

    /// Canonical text form; [`ExperimentConfig::parse`] inverts it exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("mode", self.mode.tag().into());
        kv("alpha", num(self.alpha));
        kv("dim", self.dim.to_string());
        kv("beta", num(self.beta));
        kv("p", num(self.p));
        kv("q", num(self.q));
        kv("r", num(self.r));
        kv("drift", self.drift.tag().into());
        kv("drift_value", nums(&self.drift_value));
        kv("torus_length", num(self.torus_length));
        kv("cutoff", self.cutoff.to_string());
        kv("sigma", num(self.sigma));
        kv("drift_seed", self.drift_seed.to_string());
        kv("modulation", num(self.modulation));
        kv("horizon", num(self.horizon));
        kv("steps", self.steps.to_string());
        kv("start", nums(&self.start));
        kv("paths", self.paths.to_string());
        kv("seed", self.seed.to_string());
        kv("time", self.time.map_or("auto".into(), num));
        kv(
            "levels",
            self.levels.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
        );
        kv("epsilon", self.epsilon.map_or("auto".into(), num));
        kv("slope_band", nums(&[self.slope_band.0, self.slope_band.1]));
        kv("bootstrap", self.bootstrap.to_string());
        kv("reference_steps", self.reference_steps.to_string());
        kv("probes", self.probes.iter().map(|p| nums(p)).collect::<Vec<_>>().join("; "));
        kv("estimator", self.estimator.tag().into());
        kv("window_radius", num(self.window_radius));
        kv("window_points", self.window_points.to_string());
        kv("bandwidth", num(self.bandwidth));
        kv("quad_nodes", self.quad_nodes.to_string());
        kv("residual_tolerance", num(self.residual_tolerance));
        kv("sweep_tuples", self.sweep_tuples.to_string());
        kv("sweep_seed", self.sweep_seed.to_string());
        kv("sampler_draws", self.sampler_draws.to_string());
        kv("threads", self.threads.to_string());
        kv("allow_invalid", self.allow_invalid.to_string());
        kv("trajectories", self.trajectories.to_string());
        kv("plot", self.plot.to_string());
        s
    }

    /// Parse a config; absent keys keep their defaults. Errors carry the line and key.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    key: body.into(),
                    message: "expected `key = value`".into(),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(Error::Parse {
                    line,
                    key: k.into(),
                    message: "duplicate key".into(),
                });
            }
            c.set(k, v).map_err(|message| Error::Parse {
                line,
                key: k.into(),
                message,
            })?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Assign one key from its text value.
    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        fn one<T: FromStr>(v: &str) -> std::result::Result<T, String> {
            v.trim().parse().map_err(|_| format!("cannot parse `{}`", v.trim()))
        }
        fn real(v: &str) -> std::result::Result<f64, String> {
            let x: f64 = one(v)?;
            if x.is_nan() {
                return Err("NaN is not allowed".into());
            }
            Ok(x)
        }
        fn list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
            if v.trim().is_empty() {
                return Ok(Vec::new());
            }
            v.split(',').map(one).collect()
        }
        fn reals(v: &str) -> std::result::Result<Vec<f64>, String> {
            if v.trim().is_empty() {
                return Ok(Vec::new());
            }
            v.split(',').map(real).collect()
        }
        fn auto(v: &str) -> std::result::Result<Option<f64>, String> {
            if v == "auto" {
                Ok(None)
            } else {
                real(v).map(Some)
            }
        }
        match key {
            "mode" => self.mode = v.parse()?,
            "alpha" => self.alpha = real(v)?,
            "dim" => self.dim = one(v)?,
            "beta" => self.beta = real(v)?,
            "p" => self.p = real(v)?,
            "q" => self.q = real(v)?,
            "r" => self.r = real(v)?,
            "drift" => self.drift = v.parse()?,
            "drift_value" => self.drift_value = reals(v)?,
            "torus_length" => self.torus_length = real(v)?,
            "cutoff" => self.cutoff = one(v)?,
            "sigma" => self.sigma = real(v)?,
            "drift_seed" => self.drift_seed = one(v)?,
            "modulation" => self.modulation = real(v)?,
            "horizon" => self.horizon = real(v)?,
            "steps" => self.steps = one(v)?,
            "start" => self.start = reals(v)?,
            "paths" => self.paths = one(v)?,
            "seed" => self.seed = one(v)?,
            "time" => self.time = auto(v)?,
            "levels" => self.levels = list(v)?,
            "epsilon" => self.epsilon = auto(v)?,
            "slope_band" => match reals(v)?.as_slice() {
                [lo, hi] => self.slope_band = (*lo, *hi),
                _ => return Err("expected two numbers `lo, hi`".into()),
            },
            "bootstrap" => self.bootstrap = one(v)?,
            "reference_steps" => self.reference_steps = one(v)?,
            "probes" => {
                self.probes = if v.trim().is_empty() {
                    Vec::new()
                } else {
                    v.split(';').map(reals).collect::<std::result::Result<_, _>>()?
                }
            }
            "estimator" => self.estimator = estimator_from(v)?,
            "window_radius" => self.window_radius = real(v)?,
            "window_points" => self.window_points = one(v)?,
            "bandwidth" => self.bandwidth = real(v)?,
            "quad_nodes" => self.quad_nodes = one(v)?,
            "residual_tolerance" => self.residual_tolerance = real(v)?,
            "sweep_tuples" => self.sweep_tuples = one(v)?,
            "sweep_seed" => self.sweep_seed = one(v)?,
            "sampler_draws" => self.sampler_draws = one(v)?,
            "threads" => self.threads = one(v)?,
            "allow_invalid" => self.allow_invalid = one(v)?,
            "trajectories" => self.trajectories = one(v)?,
            "plot" => self.plot = one(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }
}
