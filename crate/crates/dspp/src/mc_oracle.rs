//! Monte Carlo ground truth for the analytic survival routes.
//!
//! Two estimators are provided on top of a shared path engine:
//!
//! * [`mc_survival`] averages the exact conditional survival formula
//!   e^{−Λ_T} Σ_{j<n} Λ_T^j/j! over simulated endpoints Λ_T — the
//!   Rao-Blackwellized (conditioned) estimator.
//! * [`mc_jump_times`] simulates the crossing definition directly: draw a
//!   Gamma(n,1) threshold as a sum of unit exponentials and report whether the
//!   running hazard path stays below it through the horizon. Same estimand on
//!   models with non-decreasing paths, strictly higher variance.
//!
//! Path conventions mirror the analytic routes. CIR and the two OU families
//! accumulate ∫λ ds over the window starting from the spot intensity, so their
//! window increment carries no prior hazard; the pure-jump families
//! (`LevyKernel`, `Cmy`) produce the compensated increment
//! ∫∫σ dÑ = Σσ(s_i,z_i) − ∫∫σ ds ν(dz), which drifts downward between jumps.
//! For those models a crossing can therefore only happen at time zero or at a
//! jump epoch, which is how the first-passage walk checks it. Because a
//! compensated path is not monotone, `mc_jump_times` (a true first-passage
//! probability) and `mc_survival` (an endpoint functional) are equivalent only
//! on the monotone families; on compensated models the first-passage estimate
//! is a lower bound for the endpoint one.
//!
//! Determinism: every path owns a dedicated counter-based RNG stream keyed by
//! (seed, estimator purpose, path index), and per-block partial sums are folded
//! in block order. Estimates are therefore bit-identical for any `workers`
//! setting and across runs.
//!
//! Infinite-activity jump models are simulated by dropping marks below
//! `jump_trunc_eps` while keeping the full analytic compensator of the retained
//! marks. The dropped kernel mass is integrated exactly and must stay below
//! 1e−4 of the retained mass, otherwise construction fails with a
//! configuration error asking for a smaller truncation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1, Gamma, InverseGaussian, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hazard_models::{ou_eps, HazardModelSpec, LevyDensity, SpaceTimeKernel};
use crate::numerics::{integrate_levy, QuadratureSettings};

/// Paths per work unit; partial sums are folded in block order so the result
/// does not depend on how blocks were scheduled across threads.
const BLOCK: usize = 4096;

/// Grid steps used to weight the inverse-Gaussian subordinator part of the
/// IG-OU increment by the integrated kernel. The subordinator mass itself is
/// sampled exactly per step; only the kernel weight is step-averaged.
const IG_GRID_STEPS: usize = 200;

/// Stream-key domains keeping the two estimators' draws independent.
const PURPOSE_LAMBDA: u64 = 0;
const PURPOSE_JUMP_TIMES: u64 = 1;

/// Controls for the Monte Carlo engine.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    /// Number of simulated paths.
    pub n_paths: usize,
    /// Base seed; combined with the path index into per-path streams.
    pub seed: u64,
    /// Euler step for the CIR discretization (other models need no time grid).
    pub time_step: f64,
    /// Mark-truncation level for infinite-activity jump densities.
    pub jump_trunc_eps: f64,
    /// Worker threads; has no effect on the values produced, only on wall time.
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 1_000_000,
            seed: 42,
            time_step: 1e-3,
            jump_trunc_eps: 1e-8,
            workers: 1,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 100 {
            return Err(Error::Config(format!(
                "n_paths must be at least 100, got {}",
                self.n_paths
            )));
        }
        if !(self.time_step > 0.0 && self.time_step <= 1e-2) {
            return Err(Error::Config(format!(
                "time_step must lie in (0, 1e-2], got {}",
                self.time_step
            )));
        }
        if !(self.jump_trunc_eps > 0.0 && self.jump_trunc_eps.is_finite()) {
            return Err(Error::Config(format!(
                "jump_trunc_eps must be positive and finite, got {}",
                self.jump_trunc_eps
            )));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// A Monte Carlo estimate with its sampling error and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by √n_paths (0 for degenerate runs).
    pub std_error: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Hash of the model, window, and sampling configuration. Two estimates
    /// with equal digests are bit-identical.
    pub model_digest: String,
}

// ---------------------------------------------------------------------------
// RNG plumbing
// ---------------------------------------------------------------------------

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dedicated stream for one path: the 256-bit key expands (seed, purpose) and
/// the ChaCha stream counter carries the path index, so any path can be
/// regenerated in isolation.
fn path_rng(seed: u64, purpose: u64, path: u64) -> ChaCha8Rng {
    let mut state = seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path);
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x1_0000_0001_b3);
    }
    h
}

fn digest(op: &str, model: &HazardModelSpec, t: f64, horizon: f64, n: usize, config: &McConfig) -> String {
    let tag = format!(
        "{op}|{model:?}|t={t}|T={horizon}|n={n}|paths={}|seed={}|step={}|eps={}",
        config.n_paths, config.seed, config.time_step, config.jump_trunc_eps
    );
    format!("{:016x}", fnv1a(tag.as_bytes()))
}

// ---------------------------------------------------------------------------
// Per-model path samplers
// ---------------------------------------------------------------------------

/// One-shot sampler for the hazard increment over a fixed window, prepared
/// once and shared read-only across worker threads.
enum Sampler {
    Cir {
        theta: f64,
        kappa: f64,
        sigma: f64,
        lambda0: f64,
        steps: usize,
        dt: f64,
    },
    GammaOu {
        theta: f64,
        tau: f64,
        det_part: f64,
        count: Option<Poisson<f64>>,
        jump: Exp<f64>,
    },
    IgOu {
        theta: f64,
        tau: f64,
        det_part: f64,
        /// Step-averaged kernel weight per subordinator grid step.
        weights: Vec<f64>,
        ig_step: InverseGaussian<f64>,
        cp_count: Option<Poisson<f64>>,
        inv_b2: f64,
    },
    Jump(JumpPlan),
}

fn mk_poisson(mean: f64) -> Result<Option<Poisson<f64>>> {
    if mean == 0.0 {
        return Ok(None);
    }
    Poisson::new(mean)
        .map(Some)
        .map_err(|e| Error::Config(format!("cannot sample a Poisson count with mean {mean}: {e}")))
}

fn draw_count(count: &Option<Poisson<f64>>, rng: &mut ChaCha8Rng) -> usize {
    match count {
        None => 0,
        Some(p) => p.sample(rng) as usize,
    }
}

impl Sampler {
    /// Prepares the sampler for the window [w0, w1] with w1 > w0.
    fn new(model: &HazardModelSpec, w0: f64, w1: f64, config: &McConfig) -> Result<Sampler> {
        let tau = w1 - w0;
        match model {
            HazardModelSpec::Cir { theta, kappa, sigma, lambda_t } => {
                let steps = (tau / config.time_step).ceil() as usize;
                Ok(Sampler::Cir {
                    theta: *theta,
                    kappa: *kappa,
                    sigma: *sigma,
                    lambda0: *lambda_t,
                    steps,
                    dt: tau / steps as f64,
                })
            }
            HazardModelSpec::GammaOu { theta, a, b, lambda0 } => Ok(Sampler::GammaOu {
                theta: *theta,
                tau,
                det_part: ou_eps(*theta, tau) * lambda0,
                count: mk_poisson(a * theta * tau)?,
                jump: Exp::new(*b)
                    .map_err(|e| Error::Config(format!("exponential jump sampler: {e}")))?,
            }),
            HazardModelSpec::IgOu { theta, a, b, lambda0 } => {
                let ds = tau / IG_GRID_STEPS as f64;
                // F(s) = ∫_0^s ε(τ−v) dv, so the step weight (F(s1)−F(s0))/Δs
                // is the kernel averaged over the step.
                let primitive = |s: f64| {
                    s / theta - ((-theta * (tau - s)).exp() - (-theta * tau).exp()) / (theta * theta)
                };
                let weights: Vec<f64> = (0..IG_GRID_STEPS)
                    .map(|j| {
                        let s0 = j as f64 * ds;
                        (primitive(s0 + ds) - primitive(s0)) / ds
                    })
                    .collect();
                // Subordinator clock advance per grid step.
                let h = theta * ds;
                let ig_step = InverseGaussian::new(0.5 * a * h / b, (0.5 * a * h).powi(2))
                    .map_err(|e| Error::Config(format!("inverse-Gaussian step sampler: {e}")))?;
                Ok(Sampler::IgOu {
                    theta: *theta,
                    tau,
                    det_part: ou_eps(*theta, tau) * lambda0,
                    weights,
                    ig_step,
                    cp_count: mk_poisson(0.5 * a * b * theta * tau)?,
                    inv_b2: 1.0 / (b * b),
                })
            }
            HazardModelSpec::LevyKernel { sigma_fn, levy_density, z_domain, .. } => Ok(Sampler::Jump(
                JumpPlan::new(sigma_fn.clone(), levy_density.clone(), *z_domain, w0, w1, config)?,
            )),
            HazardModelSpec::Cmy { c, m, y, sigma_fn, .. } => Ok(Sampler::Jump(JumpPlan::new(
                SpaceTimeKernel::ZTimes(sigma_fn.clone()),
                LevyDensity::Cmy { c: *c, m: *m, y: *y },
                (0.0, f64::INFINITY),
                w0,
                w1,
                config,
            )?)),
        }
    }

    /// Λ(w1) − Λ(w0) for one fresh path.
    fn increment(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Cir { .. } => self.cir_accumulate(rng, f64::INFINITY),
            Sampler::GammaOu { theta, tau, det_part, count, jump } => {
                let mut acc = *det_part;
                for _ in 0..draw_count(count, rng) {
                    let s = rng.random_range(0.0..*tau);
                    let x: f64 = jump.sample(rng);
                    acc += ou_eps(*theta, tau - s) * x;
                }
                acc
            }
            Sampler::IgOu { theta, tau, det_part, weights, ig_step, cp_count, inv_b2 } => {
                let mut acc = *det_part;
                for &w in weights {
                    acc += w * ig_step.sample(rng);
                }
                for _ in 0..draw_count(cp_count, rng) {
                    let s = rng.random_range(0.0..*tau);
                    let v: f64 = rng.sample(StandardNormal);
                    acc += ou_eps(*theta, tau - s) * v * v * inv_b2;
                }
                acc
            }
            Sampler::Jump(plan) => plan.increment(rng),
        }
    }

    /// Whether the running increment Λ(s) − Λ(w0) reaches `level` anywhere in
    /// the window. The monotone families only need the endpoint; CIR stops
    /// integrating as soon as the level is hit.
    fn crosses(&self, rng: &mut ChaCha8Rng, level: f64) -> bool {
        match self {
            Sampler::Cir { .. } => self.cir_accumulate(rng, level) >= level,
            Sampler::GammaOu { .. } | Sampler::IgOu { .. } => self.increment(rng) >= level,
            Sampler::Jump(plan) => plan.crosses(rng, level),
        }
    }

    /// Full-truncation Euler with trapezoidal accumulation of ∫λ⁺ ds; the
    /// accumulated integral is non-decreasing, so once it reaches `stop` the
    /// remaining steps cannot change a crossing verdict.
    fn cir_accumulate(&self, rng: &mut ChaCha8Rng, stop: f64) -> f64 {
        let Sampler::Cir { theta, kappa, sigma, lambda0, steps, dt } = self else {
            unreachable!("cir_accumulate is only called on the CIR variant");
        };
        let sqrt_dt = dt.sqrt();
        let mut lam = *lambda0;
        let mut acc = 0.0;
        for _ in 0..*steps {
            let pos = lam.max(0.0);
            let z: f64 = rng.sample(StandardNormal);
            let next = lam + theta * (kappa - pos) * dt + sigma * pos.sqrt() * sqrt_dt * z;
            acc += 0.5 * (pos + next.max(0.0)) * dt;
            lam = next;
            if acc >= stop {
                return acc;
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Pure-jump plan: truncation, compensator, mark sampling
// ---------------------------------------------------------------------------

struct JumpPlan {
    kernel: SpaceTimeKernel,
    z_sampler: ZSampler,
    w0: f64,
    w1: f64,
    count: Option<Poisson<f64>>,
    /// Mark-integrated kernel mass ρ = ∫ h(z) ν(dz) over the kept domain,
    /// where h(z) = z for mark-proportional kernels and 1 otherwise.
    comp_rate: f64,
    /// ρ · ∫_{w0}^{w1} σ_time(s) ds — the compensator of the whole window.
    comp_total: f64,
}

impl JumpPlan {
    fn new(
        kernel: SpaceTimeKernel,
        density: LevyDensity,
        z_domain: (f64, f64),
        w0: f64,
        w1: f64,
        config: &McConfig,
    ) -> Result<JumpPlan> {
        let (lo, hi) = z_domain;
        let qs = QuadratureSettings::default();
        let truncated = !density.is_finite_activity() && lo == 0.0;
        let eff_lo = if truncated { config.jump_trunc_eps } else { lo };
        if eff_lo >= hi {
            return Err(Error::Config(format!(
                "jump_trunc_eps = {} leaves no mark domain below the upper bound {}",
                config.jump_trunc_eps, hi
            )));
        }
        let mark_weight = |z: f64| if kernel.is_mark_proportional() { z } else { 1.0 };
        let nu = |z: f64| density.eval(z);
        let q_mass = integrate_levy(|_, _| 1.0, 0.0, 1.0, nu, (eff_lo, hi), &qs)?.value;
        let comp_rate = integrate_levy(|_, z| mark_weight(z), 0.0, 1.0, nu, (eff_lo, hi), &qs)?.value;
        let k_total = kernel.time_part().integral(w0, w1);
        if truncated && comp_rate * k_total != 0.0 {
            match integrate_levy(|_, z| mark_weight(z), 0.0, 1.0, nu, (lo, eff_lo), &qs) {
                Ok(dropped) => {
                    if dropped.value >= 1e-4 * comp_rate {
                        return Err(Error::Config(format!(
                            "marks below jump_trunc_eps = {:.3e} carry kernel mass {:.3e}, \
                             which is not below 1e-4 of the retained mass {:.3e}; decrease \
                             jump_trunc_eps",
                            config.jump_trunc_eps, dropped.value, comp_rate
                        )));
                    }
                }
                Err(Error::NonIntegrable { .. }) => {
                    return Err(Error::Config(
                        "small marks contribute unbounded kernel mass under this kernel; an \
                         infinite-activity density needs a mark-proportional kernel \
                         σ(s,z) = z·σ(s)"
                            .into(),
                    ));
                }
                Err(e) => return Err(e),
            }
        }
        let z_sampler = ZSampler::build(&density, eff_lo, hi, q_mass)?;
        Ok(JumpPlan {
            kernel,
            z_sampler,
            w0,
            w1,
            count: mk_poisson(q_mass * (w1 - w0))?,
            comp_rate,
            comp_total: comp_rate * k_total,
        })
    }

    fn increment(&self, rng: &mut ChaCha8Rng) -> f64 {
        let mut acc = -self.comp_total;
        for _ in 0..draw_count(&self.count, rng) {
            let s = rng.random_range(self.w0..self.w1);
            let z = self.z_sampler.sample(rng);
            acc += self.kernel.eval(s, z);
        }
        acc
    }

    /// First-passage check on the compensated path: between jumps the path
    /// only drifts down, so the running maximum is attained right after a
    /// jump and it suffices to scan jump epochs in time order.
    fn crosses(&self, rng: &mut ChaCha8Rng, level: f64) -> bool {
        let n_jumps = draw_count(&self.count, rng);
        let mut jumps: Vec<(f64, f64)> = (0..n_jumps)
            .map(|_| {
                let s = rng.random_range(self.w0..self.w1);
                let z = self.z_sampler.sample(rng);
                (s, self.kernel.eval(s, z))
            })
            .collect();
        jumps.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let time_part = self.kernel.time_part();
        let mut cum = 0.0;
        for (s, contribution) in jumps {
            cum += contribution;
            if cum - self.comp_rate * time_part.integral(self.w0, s) >= level {
                return true;
            }
        }
        false
    }
}

/// Exact sampler for a mark from ν restricted to the kept domain, built from
/// closed-form envelope pieces with thinning. A rejection restarts the piece
/// selection, so the mixture stays exact.
enum ZSampler {
    /// Exponential density: direct inversion on (lo, hi), no thinning.
    TruncExp { rate: f64, lo: f64, span_mass: f64 },
    /// Tempered-stable with Y < 0: the density is a Gamma(−Y, 1/M) law up to
    /// normalization, so propose from it and keep draws inside the domain.
    GammaThin { proposal: Gamma<f64>, lo: f64, hi: f64 },
    /// Tempered-stable with 0 ≤ Y < 1: power-law (or log-uniform) piece below
    /// the 1/M knee, exponential-tail piece above it.
    Pieces { pieces: Vec<Piece>, total_weight: f64 },
}

struct Piece {
    weight: f64,
    kind: PieceKind,
}

enum PieceKind {
    /// Proposal density ∝ 1/z on (lo, hi); accept with e^{−m z}.
    LogKnee { lo: f64, ratio: f64, m: f64 },
    /// Proposal density ∝ z^{−1−y} on (lo, hi); accept with e^{−m z}.
    PowerKnee { lo_pow: f64, hi_pow: f64, inv_y: f64, m: f64 },
    /// Proposal: z0 + truncated Exp(m) on (z0, hi); accept with (z0/z)^{1+y}.
    ExpTail { z0: f64, m: f64, span_mass: f64, one_plus_y: f64 },
}

impl ZSampler {
    fn build(density: &LevyDensity, lo: f64, hi: f64, q_mass: f64) -> Result<ZSampler> {
        match density {
            LevyDensity::ScaledExp { rate, .. } => Ok(ZSampler::TruncExp {
                rate: *rate,
                lo,
                span_mass: if hi.is_finite() { -(-rate * (hi - lo)).exp_m1() } else { 1.0 },
            }),
            LevyDensity::Cmy { c, m, y } if *y < 0.0 => {
                let proposal = Gamma::new(-y, 1.0 / m)
                    .map_err(|e| Error::Config(format!("gamma mark proposal: {e}")))?;
                let total = c * crate::numerics::gamma_fn(-y)? * m.powf(*y);
                check_acceptance(q_mass, total)?;
                Ok(ZSampler::GammaThin { proposal, lo, hi })
            }
            LevyDensity::Cmy { c, m, y } => {
                let knee = (1.0 / m).min(hi);
                let mut pieces = Vec::new();
                if lo < knee {
                    if *y == 0.0 {
                        pieces.push(Piece {
                            weight: c * (knee / lo).ln(),
                            kind: PieceKind::LogKnee { lo, ratio: knee / lo, m: *m },
                        });
                    } else {
                        let lo_pow = lo.powf(-y);
                        let hi_pow = knee.powf(-y);
                        pieces.push(Piece {
                            weight: c * (lo_pow - hi_pow) / y,
                            kind: PieceKind::PowerKnee { lo_pow, hi_pow, inv_y: 1.0 / y, m: *m },
                        });
                    }
                }
                let z0 = lo.max(knee);
                if z0 < hi {
                    let span_mass =
                        if hi.is_finite() { -(-m * (hi - z0)).exp_m1() } else { 1.0 };
                    pieces.push(Piece {
                        weight: c * z0.powf(-1.0 - y) * (-m * z0).exp() * span_mass / m,
                        kind: PieceKind::ExpTail { z0, m: *m, span_mass, one_plus_y: 1.0 + y },
                    });
                }
                let total_weight: f64 = pieces.iter().map(|p| p.weight).sum();
                check_acceptance(q_mass, total_weight)?;
                Ok(ZSampler::Pieces { pieces, total_weight })
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            ZSampler::TruncExp { rate, lo, span_mass } => {
                let u: f64 = rng.random();
                lo - (-u * span_mass).ln_1p() / rate
            }
            ZSampler::GammaThin { proposal, lo, hi } => loop {
                let z = proposal.sample(rng);
                if z > *lo && z < *hi {
                    return z;
                }
            },
            ZSampler::Pieces { pieces, total_weight } => loop {
                let mut pick: f64 = rng.random::<f64>() * total_weight;
                for piece in pieces {
                    if pick < piece.weight {
                        if let Some(z) = piece.propose_and_thin(rng) {
                            return z;
                        }
                        break;
                    }
                    pick -= piece.weight;
                }
            },
        }
    }
}

impl Piece {
    fn propose_and_thin(&self, rng: &mut ChaCha8Rng) -> Option<f64> {
        match self.kind {
            PieceKind::LogKnee { lo, ratio, m } => {
                let z = lo * ratio.powf(rng.random());
                (rng.random::<f64>() < (-m * z).exp()).then_some(z)
            }
            PieceKind::PowerKnee { lo_pow, hi_pow, inv_y, m } => {
                let u: f64 = rng.random();
                let z = (lo_pow - u * (lo_pow - hi_pow)).powf(-inv_y);
                (rng.random::<f64>() < (-m * z).exp()).then_some(z)
            }
            PieceKind::ExpTail { z0, m, span_mass, one_plus_y } => {
                let u: f64 = rng.random();
                let z = z0 - (-u * span_mass).ln_1p() / m;
                (rng.random::<f64>() < (z0 / z).powf(one_plus_y)).then_some(z)
            }
        }
    }
}

/// Plan-time guard against degenerate thinning loops: the expected acceptance
/// rate is the true restricted mass over the envelope mass.
fn check_acceptance(q_mass: f64, envelope_mass: f64) -> Result<()> {
    if !(envelope_mass.is_finite() && envelope_mass > 0.0) {
        return Err(Error::Config(format!(
            "mark-sampling envelope mass is {envelope_mass}; the restricted density carries no \
             sampleable mass"
        )));
    }
    if q_mass < 1e-4 * envelope_mass {
        return Err(Error::Config(format!(
            "mark sampler would accept only ~{:.2e} of proposals (restricted mass {:.3e} vs \
             envelope mass {:.3e}); narrow the mark domain or adjust the density",
            q_mass / envelope_mass,
            q_mass,
            envelope_mass
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Block engine
// ---------------------------------------------------------------------------

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} worker threads: {e}")))
}

/// Runs `eval` once per path on its dedicated stream and returns (mean,
/// std error), reducing per-block sums in block order.
fn run_stats<F>(config: &McConfig, purpose: u64, eval: F) -> Result<(f64, f64)>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let n = config.n_paths;
    let n_blocks = n.div_ceil(BLOCK);
    let block_stat = |block: usize| -> (f64, f64) {
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for path in block * BLOCK..(block * BLOCK + BLOCK).min(n) {
            let v = eval(&mut path_rng(config.seed, purpose, path as u64));
            sum += v;
            sumsq += v * v;
        }
        (sum, sumsq)
    };
    let partials: Vec<(f64, f64)> = if config.workers > 1 {
        build_pool(config.workers)?
            .install(|| (0..n_blocks).into_par_iter().map(block_stat).collect())
    } else {
        (0..n_blocks).map(block_stat).collect()
    };
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (s, q) in partials {
        sum += s;
        sumsq += q;
    }
    let n_f = n as f64;
    let mean = sum / n_f;
    let variance = ((sumsq - n_f * mean * mean) / (n_f - 1.0)).max(0.0);
    Ok((mean, (variance / n_f).sqrt()))
}

/// Like [`run_stats`] but keeps every per-path value, in path order.
fn run_samples<F>(config: &McConfig, purpose: u64, eval: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let n = config.n_paths;
    let n_blocks = n.div_ceil(BLOCK);
    let block_vals = |block: usize| -> Vec<f64> {
        (block * BLOCK..(block * BLOCK + BLOCK).min(n))
            .map(|path| eval(&mut path_rng(config.seed, purpose, path as u64)))
            .collect()
    };
    let chunks: Vec<Vec<f64>> = if config.workers > 1 {
        build_pool(config.workers)?
            .install(|| (0..n_blocks).into_par_iter().map(block_vals).collect())
    } else {
        (0..n_blocks).map(block_vals).collect()
    };
    Ok(chunks.concat())
}

// ---------------------------------------------------------------------------
// Public estimators
// ---------------------------------------------------------------------------

fn check_window(model: &HazardModelSpec, t: f64, horizon: f64) -> Result<()> {
    model.validate()?;
    if !(t.is_finite() && t >= 0.0 && horizon.is_finite() && horizon >= t) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= t <= T with both finite, got t = {t}, T = {horizon}"
        )));
    }
    Ok(())
}

/// e^{−λ} Σ_{j<n} λ^j/j!, evaluated by streaming multiplication. For λ < 0
/// (possible on compensated paths) this is the analytic continuation used
/// consistently by every route, not a probability pointwise.
fn poisson_tail(lambda: f64, n: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..n {
        term *= lambda / j as f64;
        sum += term;
    }
    sum * (-lambda).exp()
}

/// Draws `config.n_paths` independent samples of the window increment
/// Λ_T − Λ_t, in path order. For CIR and the OU families the window starts at
/// the model's spot intensity; for the pure-jump families the increment is the
/// compensated jump integral over [t, T].
pub fn simulate_lambda(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    config: &McConfig,
) -> Result<Vec<f64>> {
    check_window(model, t, horizon)?;
    config.validate()?;
    if horizon == t {
        return Ok(vec![0.0; config.n_paths]);
    }
    let sampler = Sampler::new(model, t, horizon, config)?;
    run_samples(config, PURPOSE_LAMBDA, |rng| sampler.increment(rng))
}

/// Rao-Blackwellized survival estimate: averages
/// e^{−Λ_T} Σ_{j<n} Λ_T^j/j! with Λ_T = `lambda_t` + simulated increment.
///
/// `lambda_t` is the hazard already accumulated at the conditioning time and
/// must match the convention of the analytic route being checked: 0 for the
/// intensity models (whose CGF is conditioned on the spot intensity alone) and
/// `model.accumulated_lambda()` for the pure-jump families.
pub fn mc_survival(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    n: usize,
    lambda_t: f64,
    config: &McConfig,
) -> Result<McEstimate> {
    check_window(model, t, horizon)?;
    config.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("jump index n must be at least 1".into()));
    }
    if !(lambda_t.is_finite() && lambda_t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "accumulated hazard lambda_t must be finite and >= 0, got {lambda_t}"
        )));
    }
    let model_digest = digest("survival", model, t, horizon, n, config);
    let (mean, std_error) = if horizon == t {
        (poisson_tail(lambda_t, n), 0.0)
    } else {
        let sampler = Sampler::new(model, t, horizon, config)?;
        run_stats(config, PURPOSE_LAMBDA, |rng| {
            poisson_tail(lambda_t + sampler.increment(rng), n)
        })?
    };
    Ok(McEstimate { mean, std_error, n_paths: config.n_paths, seed: config.seed, model_digest })
}

/// Direct first-passage estimate of P(τ_n > T) from time zero: each path draws
/// its Gamma(n,1) threshold as a sum of n unit exponentials, then checks
/// whether the running hazard (starting at `model.accumulated_lambda()`)
/// reaches the threshold anywhere in [0, T].
pub fn mc_jump_times(
    model: &HazardModelSpec,
    horizon: f64,
    n: usize,
    config: &McConfig,
) -> Result<McEstimate> {
    check_window(model, 0.0, horizon)?;
    config.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("jump index n must be at least 1".into()));
    }
    let lambda0 = model.accumulated_lambda();
    let sampler =
        if horizon > 0.0 { Some(Sampler::new(model, 0.0, horizon, config)?) } else { None };
    let model_digest = digest("jump_times", model, 0.0, horizon, n, config);
    let (mean, std_error) = run_stats(config, PURPOSE_JUMP_TIMES, |rng| {
        let mut threshold = 0.0;
        for _ in 0..n {
            let e: f64 = rng.sample(Exp1);
            threshold += e;
        }
        if lambda0 >= threshold {
            return 0.0;
        }
        match &sampler {
            None => 1.0,
            Some(s) => {
                if s.crosses(rng, threshold - lambda0) {
                    0.0
                } else {
                    1.0
                }
            }
        }
    })?;
    Ok(McEstimate { mean, std_error, n_paths: config.n_paths, seed: config.seed, model_digest })
}
