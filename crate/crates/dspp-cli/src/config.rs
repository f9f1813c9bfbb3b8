//! JSON-facing configuration types.
//!
//! These mirror the library's model types but stay serde-owned on the CLI
//! side, so the schema can evolve (renames, defaults, tags) without touching
//! the core crate. Parsing is strict where serde allows it; everything the
//! format cannot express (ordering constraints, parameter domains) is checked
//! in [`RunConfig::validate`].

use dspp::hazard_models::{HazardModelSpec, LevyDensity, SpaceTimeKernel, TimeKernel};
use dspp::mc_oracle::McConfig;
use serde::{Deserialize, Serialize};

/// One survival run: a model, a conditioning time, and the grid of horizons
/// and jump indices to evaluate, under a subset of the three routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub t: f64,
    pub horizons: Vec<f64>,
    pub jump_indices: Vec<usize>,
    #[serde(default = "Route::all")]
    pub routes: Vec<Route>,
    #[serde(default)]
    pub mc: McSection,
    /// When false, every emitted row carries a reminder that the value is the
    /// analytic factor only — the caller must still know that the n-th jump
    /// has not occurred by `t`.
    #[serde(default = "default_true")]
    pub assert_alive: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Bell,
    Malliavin,
    MonteCarlo,
}

impl Route {
    pub fn all() -> Vec<Route> {
        vec![Route::Bell, Route::Malliavin, Route::MonteCarlo]
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Bell => "bell",
            Route::Malliavin => "malliavin",
            Route::MonteCarlo => "monte_carlo",
        }
    }

    pub fn parse(s: &str) -> Result<Route, String> {
        match s.trim() {
            "bell" => Ok(Route::Bell),
            "malliavin" => Ok(Route::Malliavin),
            "monte_carlo" => Ok(Route::MonteCarlo),
            other => Err(format!(
                "unknown route {other:?}; expected bell, malliavin or monte_carlo"
            )),
        }
    }
}

/// Monte Carlo settings; any subset of fields may appear in the JSON, the
/// rest fall back to the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "d_n_paths")]
    pub n_paths: usize,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_time_step")]
    pub time_step: f64,
    #[serde(default = "d_jump_trunc_eps")]
    pub jump_trunc_eps: f64,
    #[serde(default = "d_workers")]
    pub workers: usize,
}

fn d_n_paths() -> usize {
    McConfig::default().n_paths
}
fn d_seed() -> u64 {
    McConfig::default().seed
}
fn d_time_step() -> f64 {
    McConfig::default().time_step
}
fn d_jump_trunc_eps() -> f64 {
    McConfig::default().jump_trunc_eps
}
fn d_workers() -> usize {
    McConfig::default().workers
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            n_paths: d_n_paths(),
            seed: d_seed(),
            time_step: d_time_step(),
            jump_trunc_eps: d_jump_trunc_eps(),
            workers: d_workers(),
        }
    }
}

impl McSection {
    pub fn to_mc_config(&self) -> McConfig {
        McConfig {
            n_paths: self.n_paths,
            seed: self.seed,
            time_step: self.time_step,
            jump_trunc_eps: self.jump_trunc_eps,
            workers: self.workers,
        }
    }
}

/// Model selector; the `type` tag matches the names the library reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ModelConfig {
    #[serde(rename = "CIR")]
    Cir {
        theta: f64,
        kappa: f64,
        sigma: f64,
        lambda_t: f64,
    },
    #[serde(rename = "GammaOU")]
    GammaOu { theta: f64, a: f64, b: f64, lambda0: f64 },
    #[serde(rename = "IGOU")]
    IgOu { theta: f64, a: f64, b: f64, lambda0: f64 },
    #[serde(rename = "LevyKernel")]
    LevyKernel {
        sigma: SpaceKernelConfig,
        density: DensityConfig,
        /// Mark domain (lo, hi); `null` for the upper end means unbounded.
        #[serde(default = "default_z_domain")]
        z_domain: (f64, Option<f64>),
        lambda_t: f64,
    },
    #[serde(rename = "CMY")]
    Cmy {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "M")]
        m: f64,
        #[serde(rename = "Y")]
        y: f64,
        sigma: TimeKernelConfig,
        lambda_t: f64,
    },
}

fn default_z_domain() -> (f64, Option<f64>) {
    (0.0, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeKernelConfig {
    Constant { value: f64 },
    ExpDecay { scale: f64, rate: f64 },
    Piecewise { breaks: Vec<f64>, values: Vec<f64> },
}

impl TimeKernelConfig {
    fn to_kernel(&self) -> TimeKernel {
        match self {
            TimeKernelConfig::Constant { value } => TimeKernel::Constant(*value),
            TimeKernelConfig::ExpDecay { scale, rate } => TimeKernel::ExpDecay {
                scale: *scale,
                rate: *rate,
            },
            TimeKernelConfig::Piecewise { breaks, values } => TimeKernel::PiecewiseConstant {
                breaks: breaks.clone(),
                values: values.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKernelConfig {
    TimeOnly { time: TimeKernelConfig },
    ZTimes { time: TimeKernelConfig },
}

impl SpaceKernelConfig {
    fn to_kernel(&self) -> SpaceTimeKernel {
        match self {
            SpaceKernelConfig::TimeOnly { time } => SpaceTimeKernel::TimeOnly(time.to_kernel()),
            SpaceKernelConfig::ZTimes { time } => SpaceTimeKernel::ZTimes(time.to_kernel()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityConfig {
    Cmy {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "M")]
        m: f64,
        #[serde(rename = "Y")]
        y: f64,
    },
    ScaledExp { coeff: f64, rate: f64 },
}

impl DensityConfig {
    fn to_density(&self) -> LevyDensity {
        match self {
            DensityConfig::Cmy { c, m, y } => LevyDensity::Cmy { c: *c, m: *m, y: *y },
            DensityConfig::ScaledExp { coeff, rate } => LevyDensity::ScaledExp {
                coeff: *coeff,
                rate: *rate,
            },
        }
    }
}

impl ModelConfig {
    pub fn to_model(&self) -> HazardModelSpec {
        match self {
            ModelConfig::Cir { theta, kappa, sigma, lambda_t } => HazardModelSpec::Cir {
                theta: *theta,
                kappa: *kappa,
                sigma: *sigma,
                lambda_t: *lambda_t,
            },
            ModelConfig::GammaOu { theta, a, b, lambda0 } => HazardModelSpec::GammaOu {
                theta: *theta,
                a: *a,
                b: *b,
                lambda0: *lambda0,
            },
            ModelConfig::IgOu { theta, a, b, lambda0 } => HazardModelSpec::IgOu {
                theta: *theta,
                a: *a,
                b: *b,
                lambda0: *lambda0,
            },
            ModelConfig::LevyKernel { sigma, density, z_domain, lambda_t } => {
                HazardModelSpec::LevyKernel {
                    sigma_fn: sigma.to_kernel(),
                    levy_density: density.to_density(),
                    z_domain: (z_domain.0, z_domain.1.unwrap_or(f64::INFINITY)),
                    lambda_t: *lambda_t,
                }
            }
            ModelConfig::Cmy { c, m, y, sigma, lambda_t } => HazardModelSpec::Cmy {
                c: *c,
                m: *m,
                y: *y,
                sigma_fn: sigma.to_kernel(),
                lambda_t: *lambda_t,
            },
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, String> {
        serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    /// Semantic checks that the JSON schema cannot express. Returns the
    /// validated model so callers don't convert twice.
    pub fn validate(&self) -> Result<HazardModelSpec, String> {
        let model = self.model.to_model();
        model.validate().map_err(|e| e.to_string())?;

        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(format!("t must be non-negative and finite, got {}", self.t));
        }
        if self.horizons.is_empty() {
            return Err("horizons must be non-empty".into());
        }
        for (i, &h) in self.horizons.iter().enumerate() {
            if !h.is_finite() || h < self.t {
                return Err(format!("horizons[{i}] = {h} must be finite and >= t = {}", self.t));
            }
            if i > 0 && h <= self.horizons[i - 1] {
                return Err(format!(
                    "horizons must be strictly increasing, but horizons[{i}] = {h} <= horizons[{}] = {}",
                    i - 1,
                    self.horizons[i - 1]
                ));
            }
        }
        if self.jump_indices.is_empty() {
            return Err("jump_indices must be non-empty".into());
        }
        for (i, &n) in self.jump_indices.iter().enumerate() {
            if n == 0 || n > dspp::bell::MAX_BELL_ORDER {
                return Err(format!(
                    "jump_indices[{i}] = {n} is outside the supported range 1..={}",
                    dspp::bell::MAX_BELL_ORDER
                ));
            }
        }
        if self.routes.is_empty() {
            return Err("routes must be non-empty".into());
        }
        let mut seen = self.routes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.routes.len() {
            return Err("routes must not contain duplicates".into());
        }
        if self.routes.contains(&Route::Malliavin) && !model.is_pure_jump() {
            return Err(format!(
                "route malliavin is not defined for model {}; it requires a pure-jump hazard (LevyKernel or CMY)",
                model.name()
            ));
        }
        self.mc
            .to_mc_config()
            .validate()
            .map_err(|e| format!("mc section: {e}"))?;
        Ok(model)
    }

    /// Execution order for routes: canonical (bell, malliavin, monte_carlo)
    /// regardless of how the config listed them, so output is byte-stable.
    pub fn ordered_routes(&self) -> Vec<Route> {
        let mut routes = self.routes.clone();
        routes.sort();
        routes
    }
}
