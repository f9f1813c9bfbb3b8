//! The hazard-model catalogue.
//!
//! Each model exposes its conditional cumulant generating function
//! Ψ(u; t, T) = log E[e^{iuΛ_T} | F_t] through [`cgf`], and the real
//! normalized derivatives c_k = Ψ^{(k)}(i)/i^k through
//! [`cgf_derivatives_at_i`], which is what the survival formulas consume.
//!
//! Conditioning conventions:
//! * CIR / Gamma-OU / IG-OU carry the *rate* observed at the conditioning
//!   time (`lambda_t` / `lambda0`); hazard accumulated before `t` is not
//!   part of the state, so Ψ(u; t, t) = 0.
//! * LevyKernel / CMY carry the *accumulated* hazard Λ_t in `lambda_t`,
//!   and the increment Λ_T − Λ_t is the compensated integral
//!   ∫_t^T ∫ σ(s,z) Ñ(ds,dz), so Ψ(u; t, t) = iuΛ_t.

pub mod kernels;

mod cir;
mod levy;
mod ou;

pub use kernels::{LevyDensity, SpaceTimeKernel, TimeKernel};

pub(crate) use levy::JumpKernelIntegrals;
pub(crate) use ou::ou_eps;

use crate::error::{Error, Result};
use crate::numerics::{cauchy_derivatives, CauchySettings};
use num_complex::Complex64;

/// A fully parameterised hazard model.
#[derive(Debug, Clone)]
pub enum HazardModelSpec {
    /// Square-root (CIR) diffusion intensity:
    /// dλ_s = ϑ(κ − λ_s)ds + σ√λ_s dW_s, conditioned on λ_t.
    Cir {
        theta: f64,
        kappa: f64,
        sigma: f64,
        lambda_t: f64,
    },
    /// OU intensity driven by a compound-Poisson Gamma subordinator:
    /// dλ_s = −ϑλ_s ds + dL_{ϑs}, jumps Exp(b) at calendar intensity aϑ.
    GammaOu { theta: f64, a: f64, b: f64, lambda0: f64 },
    /// OU intensity driven by an inverse-Gaussian subordinator with
    /// L₁ ~ IG(a/b, b²) in the (mean, shape) parameterisation used here.
    IgOu { theta: f64, a: f64, b: f64, lambda0: f64 },
    /// Compensated jump hazard Λ_T = Λ_t + ∫∫ σ(s,z) Ñ(ds,dz) with a
    /// user-supplied kernel and Lévy density on `z_domain`.
    LevyKernel {
        sigma_fn: SpaceTimeKernel,
        levy_density: LevyDensity,
        z_domain: (f64, f64),
        lambda_t: f64,
    },
    /// Tempered-stable (CMY) hazard: ν(dz) = C z^{−1−Y} e^{−Mz} dz on
    /// (0, ∞), mark kernel σ(s, z) = z·σ(s), compensated convention.
    Cmy {
        c: f64,
        m: f64,
        y: f64,
        sigma_fn: TimeKernel,
        lambda_t: f64,
    },
}

impl HazardModelSpec {
    /// Checks parameter-domain constraints. Cheap; called by every entry point.
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str, model: &str| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{model}: {what} must be positive and finite, got {v}")))
            }
        };
        let non_negative = |v: f64, what: &str, model: &str| -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!(
                    "{model}: {what} must be non-negative and finite, got {v}"
                )))
            }
        };
        match self {
            HazardModelSpec::Cir { theta, kappa, sigma, lambda_t } => {
                positive(*theta, "theta", "CIR")?;
                positive(*kappa, "kappa", "CIR")?;
                positive(*sigma, "sigma", "CIR")?;
                non_negative(*lambda_t, "lambda_t", "CIR")?;
                if theta * kappa < sigma * sigma {
                    return Err(Error::InvalidModel(format!(
                        "CIR: positivity condition theta*kappa >= sigma^2 violated ({} < {})",
                        theta * kappa,
                        sigma * sigma
                    )));
                }
                Ok(())
            }
            HazardModelSpec::GammaOu { theta, a, b, lambda0 } => {
                positive(*theta, "theta", "GammaOU")?;
                positive(*a, "a", "GammaOU")?;
                positive(*b, "b", "GammaOU")?;
                non_negative(*lambda0, "lambda0", "GammaOU")
            }
            HazardModelSpec::IgOu { theta, a, b, lambda0 } => {
                positive(*theta, "theta", "IGOU")?;
                positive(*a, "a", "IGOU")?;
                positive(*b, "b", "IGOU")?;
                non_negative(*lambda0, "lambda0", "IGOU")
            }
            HazardModelSpec::LevyKernel { sigma_fn, levy_density, z_domain, lambda_t } => {
                sigma_fn.validate()?;
                levy_density.validate()?;
                let (lo, hi) = *z_domain;
                if !(lo.is_finite() && lo >= 0.0) || lo >= hi {
                    return Err(Error::InvalidModel(format!(
                        "LevyKernel: z_domain must satisfy 0 <= lo < hi, got ({lo}, {hi})"
                    )));
                }
                non_negative(*lambda_t, "lambda_t", "LevyKernel")
            }
            HazardModelSpec::Cmy { c, m, y, sigma_fn, lambda_t } => {
                let density = LevyDensity::Cmy { c: *c, m: *m, y: *y };
                density.validate()?;
                sigma_fn.validate()?;
                non_negative(*lambda_t, "lambda_t", "CMY")
            }
        }
    }

    /// Short model tag used in errors and diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            HazardModelSpec::Cir { .. } => "CIR",
            HazardModelSpec::GammaOu { .. } => "GammaOU",
            HazardModelSpec::IgOu { .. } => "IGOU",
            HazardModelSpec::LevyKernel { .. } => "LevyKernel",
            HazardModelSpec::Cmy { .. } => "CMY",
        }
    }

    /// Hazard already accumulated at the conditioning time. Zero for the
    /// rate-state models, Λ_t for the jump-kernel models.
    pub fn accumulated_lambda(&self) -> f64 {
        match self {
            HazardModelSpec::Cir { .. }
            | HazardModelSpec::GammaOu { .. }
            | HazardModelSpec::IgOu { .. } => 0.0,
            HazardModelSpec::LevyKernel { lambda_t, .. } | HazardModelSpec::Cmy { lambda_t, .. } => *lambda_t,
        }
    }

    /// True for the models whose hazard is a pure jump integral (LevyKernel,
    /// CMY) — these admit the analytic derivative route and the moment
    /// recursion.
    pub fn is_pure_jump(&self) -> bool {
        matches!(
            self,
            HazardModelSpec::LevyKernel { .. } | HazardModelSpec::Cmy { .. }
        )
    }
}

/// Evaluation point for [`cgf`]: Ψ(u; t, T) with T stored as `horizon`.
#[derive(Debug, Clone, Copy)]
pub struct CgfQuery {
    pub u: Complex64,
    pub t: f64,
    pub horizon: f64,
}

impl CgfQuery {
    pub fn validate(&self) -> Result<()> {
        if !(self.u.re.is_finite() && self.u.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("u must be finite, got {}", self.u)));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::InvalidArgument(format!("t must satisfy t >= 0, got {}", self.t)));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.t) {
            return Err(Error::InvalidArgument(format!(
                "horizon must satisfy T >= t, got T={} t={}",
                self.horizon, self.t
            )));
        }
        Ok(())
    }
}

/// Raw dispatch without validation or branch checks.
fn cgf_raw(model: &HazardModelSpec, u: Complex64, t: f64, horizon: f64) -> Result<Complex64> {
    let tau = horizon - t;
    match model {
        HazardModelSpec::Cir { theta, kappa, sigma, lambda_t } => {
            cir::cgf_cir(*theta, *kappa, *sigma, *lambda_t, u, tau)
        }
        HazardModelSpec::GammaOu { theta, a, b, lambda0 } => {
            ou::cgf_gamma_ou(*theta, *a, *b, *lambda0, u, tau)
        }
        HazardModelSpec::IgOu { theta, a, b, lambda0 } => {
            ou::cgf_ig_ou(*theta, *a, *b, *lambda0, u, tau)
        }
        HazardModelSpec::LevyKernel { sigma_fn, levy_density, z_domain, lambda_t } => {
            levy::cgf_levy_kernel(sigma_fn, levy_density, *z_domain, *lambda_t, u, t, horizon)
        }
        HazardModelSpec::Cmy { c, m, y, sigma_fn, lambda_t } => {
            levy::cgf_cmy(*c, *m, *y, sigma_fn, *lambda_t, u, t, horizon)
        }
    }
}

/// Points sampled strictly between 0 and the target when walking the
/// evaluation segment looking for branch discontinuities.
const SEGMENT_POINTS: usize = 32;
/// An imaginary-part jump larger than this between consecutive segment
/// samples is read as a crossed branch cut (a principal-log jump is ~2π).
const SEGMENT_IM_JUMP: f64 = 0.5;

/// Walks the segment 0 → u in `SEGMENT_POINTS + 1` steps, rejecting jumps in
/// Im Ψ. Returns Ψ(u) from the final step so callers get the value for free.
fn cgf_checked_segment(model: &HazardModelSpec, u: Complex64, t: f64, horizon: f64) -> Result<Complex64> {
    let steps = SEGMENT_POINTS + 1;
    let mut prev_im = 0.0; // Ψ(0) = 0
    let mut value = Complex64::new(0.0, 0.0);
    for j in 1..=steps {
        let frac = j as f64 / steps as f64;
        value = cgf_raw(model, u * frac, t, horizon)?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("{} cgf along segment to {}", model.name(), u),
            });
        }
        if (value.im - prev_im).abs() > SEGMENT_IM_JUMP {
            return Err(Error::BranchCut { model: model.name() });
        }
        prev_im = value.im;
    }
    Ok(value)
}

/// Conditional cumulant generating function Ψ(u; t, T) = log E[e^{iuΛ_T}|F_t].
///
/// The CIR/OU closed forms use the principal branches of √·, log and arctanh;
/// continuity of Im Ψ along the segment from 0 to `q.u` is asserted for those
/// models so a crossed branch cut surfaces as [`Error::BranchCut`] instead of
/// a silently wrong value. The jump-kernel models evaluate an entire function
/// of u (no branch structure) and skip the walk.
pub fn cgf(model: &HazardModelSpec, q: CgfQuery) -> Result<Complex64> {
    model.validate()?;
    q.validate()?;
    if model.is_pure_jump() {
        cgf_raw(model, q.u, q.t, q.horizon)
    } else {
        cgf_checked_segment(model, q.u, q.t, q.horizon)
    }
}

/// Real normalized CGF derivatives at u = i: c₀ = Ψ(i) and
/// c_k = Ψ^{(k)}(i)/i^k for k = 1..n−1.
#[derive(Debug, Clone)]
pub struct CumulantDerivatives {
    /// Ψ(i), the log conditional Laplace transform of Λ_T at 1.
    pub c0: f64,
    /// c₁..c_{n−1}; length n−1.
    pub c: Vec<f64>,
    /// Jump index the vector was sized for.
    pub n: usize,
    /// Contour-accuracy warning from the numeric route, when any.
    pub warning: Option<String>,
}

/// Largest imaginary residue tolerated when the contour derivatives are
/// normalized to the theoretically real c_k.
const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Probe radii for the expanding-circle singularity search around u = i.
const PROBE_RADII: [f64; 10] = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50];
const PROBE_POINTS: usize = 64;

/// Finds a contour radius for the Cauchy route: 0.9 × the largest probed
/// circle around i on which Ψ is finite with no imaginary-part jumps, capped
/// at 0.25, and for CIR additionally capped by the γ branch-point distance.
fn analyticity_radius(model: &HazardModelSpec, t: f64, horizon: f64) -> Result<f64> {
    let center = Complex64::new(0.0, 1.0);
    let mut last_clean: Option<f64> = None;
    'circles: for &r in PROBE_RADII.iter() {
        let mut first_im = 0.0;
        let mut prev_im = 0.0;
        for j in 0..PROBE_POINTS {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / PROBE_POINTS as f64;
            let u = center + Complex64::from_polar(r, angle);
            let value = match cgf_raw(model, u, t, horizon) {
                Ok(v) if v.re.is_finite() && v.im.is_finite() => v,
                _ => break 'circles,
            };
            if j == 0 {
                first_im = value.im;
            } else if (value.im - prev_im).abs() > SEGMENT_IM_JUMP {
                break 'circles;
            }
            prev_im = value.im;
        }
        // Close the loop: the step from the last node back to the first must
        // also be free of jumps.
        if (prev_im - first_im).abs() > SEGMENT_IM_JUMP {
            break 'circles;
        }
        last_clean = Some(r);
    }
    let clean = last_clean.ok_or_else(|| Error::CauchyNoConverge {
        detail: format!(
            "{}: no clean contour around u=i even at radius {}",
            model.name(),
            PROBE_RADII[0]
        ),
    })?;
    let mut radius = (0.9 * clean).min(0.25);
    if let HazardModelSpec::Cir { theta, sigma, .. } = model {
        // γ(u) = √(ϑ² − 2iuσ²) has its branch point at u* = −iϑ²/(2σ²),
        // a distance 1 + ϑ²/(2σ²) from i; stay well inside it.
        let branch_distance = 1.0 + theta * theta / (2.0 * sigma * sigma);
        radius = radius.min(0.9 * branch_distance);
    }
    Ok(radius)
}

/// The OU models' CGF via the generic driver-cumulant integral
/// Ψ(u) = iuλ₀ε(τ) + ϑ∫₀^τ k_L(u·ε(s)) ds, evaluated by quadrature.
///
/// This is the route the Example-style closed forms are validated against;
/// it is exposed so external validation suites can reproduce the comparison.
/// Models without an OU driver representation are rejected.
pub fn ou_cgf_driver_quadrature(model: &HazardModelSpec, q: CgfQuery) -> Result<Complex64> {
    model.validate()?;
    q.validate()?;
    let tau = q.horizon - q.t;
    match model {
        HazardModelSpec::GammaOu { theta, a, b, lambda0 } => {
            let base = Complex64::i() * q.u * *lambda0 * ou_eps(*theta, tau);
            let jump =
                ou::driver_quadrature(*theta, q.u, tau, |t| ou::gamma_driver_cumulant(*a, *b, t))?;
            Ok(base + jump)
        }
        HazardModelSpec::IgOu { theta, a, b, lambda0 } => {
            let base = Complex64::i() * q.u * *lambda0 * ou_eps(*theta, tau);
            let jump =
                ou::driver_quadrature(*theta, q.u, tau, |t| ou::ig_driver_cumulant(*a, *b, t))?;
            Ok(base + jump)
        }
        _ => Err(Error::UnsupportedRoute {
            route: "driver-quadrature",
            model: model.name(),
        }),
    }
}

/// Kernel integrals for the jump models, dispatched by model; the
/// moment-recursion route for other models is rejected here.
pub(crate) fn kernel_integrals(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    max_k: usize,
) -> Result<JumpKernelIntegrals> {
    match model {
        HazardModelSpec::Cmy { c, m, y, sigma_fn, .. } => {
            levy::cmy_kernel_integrals(*c, *m, *y, sigma_fn, t, horizon, max_k)
        }
        HazardModelSpec::LevyKernel { sigma_fn, levy_density, z_domain, .. } => {
            levy::levy_kernel_integrals(sigma_fn, levy_density, *z_domain, t, horizon, max_k)
        }
        _ => Err(Error::UnsupportedRoute {
            route: "malliavin",
            model: model.name(),
        }),
    }
}

/// Computes c₀ = Ψ(i) and c_k = Ψ^{(k)}(i)/i^k for k = 1..n−1.
///
/// Jump-kernel models use the analytic route (the derivative formulas reduce
/// to the kernel integrals; CMY in Γ-function closed form). CIR and the OU
/// models differentiate the closed-form CGF numerically on a Cauchy contour
/// whose radius comes from an expanding-circle singularity probe, after an
/// explicit branch-continuity walk from 0 to i. Imaginary parts of the
/// normalized derivatives beyond 1e−8 are an accuracy error; below that they
/// are discarded.
pub fn cgf_derivatives_at_i(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    n: usize,
) -> Result<CumulantDerivatives> {
    model.validate()?;
    let q = CgfQuery { u: Complex64::new(0.0, 1.0), t, horizon };
    q.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("jump index n must be at least 1".into()));
    }
    if n > crate::bell::MAX_BELL_ORDER {
        return Err(Error::InvalidArgument(format!(
            "jump index n={n} exceeds the supported maximum {}",
            crate::bell::MAX_BELL_ORDER
        )));
    }

    if model.is_pure_jump() {
        let lambda_t = model.accumulated_lambda();
        // c₁ needs I_A; c_k for k ≥ 2 equals I_{k−1}, so the recursion depth
        // of the integral table is n−2.
        let max_k = n.saturating_sub(2);
        let ints = kernel_integrals(model, t, horizon, max_k)?;
        let c0 = -lambda_t + ints.log_m0;
        let mut c = Vec::with_capacity(n - 1);
        if n >= 2 {
            c.push(lambda_t + ints.i_a);
            for k in 2..n {
                c.push(ints.i_pow[k - 2]);
            }
        }
        return Ok(CumulantDerivatives { c0, c, n, warning: None });
    }

    // Numeric route: branch walk, then contour derivatives at the probed radius.
    cgf_checked_segment(model, q.u, t, horizon)?;
    let radius = analyticity_radius(model, t, horizon)?;
    let settings = CauchySettings { radius, ..CauchySettings::default() };
    let mut f = |u: Complex64| cgf_raw(model, u, t, horizon);
    let contour = cauchy_derivatives(&mut f, q.u, n - 1, &settings)?;

    let check_real = |order: usize, v: Complex64| -> Result<f64> {
        if v.im.abs() > IMAG_RESIDUE_TOL {
            Err(Error::ImaginaryResidue { order, residue: v.im })
        } else {
            Ok(v.re)
        }
    };
    let c0 = check_real(0, contour.values[0])?;
    let mut c = Vec::with_capacity(n - 1);
    for k in 1..n {
        let ik = Complex64::i().powu(k as u32);
        c.push(check_real(k, contour.values[k] / ik)?);
    }
    Ok(CumulantDerivatives { c0, c, n, warning: contour.warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_models() -> Vec<HazardModelSpec> {
        vec![
            HazardModelSpec::Cir { theta: 2.0, kappa: 1.0, sigma: 0.5, lambda_t: 1.0 },
            HazardModelSpec::GammaOu { theta: 0.8, a: 1.5, b: 2.0, lambda0: 0.6 },
            HazardModelSpec::IgOu { theta: 0.7, a: 1.2, b: 1.5, lambda0: 0.4 },
            HazardModelSpec::LevyKernel {
                sigma_fn: SpaceTimeKernel::ZTimes(TimeKernel::ExpDecay { scale: 1.0, rate: 0.5 }),
                levy_density: LevyDensity::ScaledExp { coeff: 1.0, rate: 2.0 },
                z_domain: (0.0, f64::INFINITY),
                lambda_t: 0.9,
            },
            HazardModelSpec::Cmy {
                c: 1.0,
                m: 2.0,
                y: 0.5,
                sigma_fn: TimeKernel::Constant(1.0),
                lambda_t: 0.5,
            },
        ]
    }

    #[test]
    fn cgf_vanishes_at_zero_everywhere() {
        for model in all_models() {
            for &(t, horizon) in &[(0.0, 0.7), (0.3, 1.4), (1.0, 1.0)] {
                let psi = cgf(&model, CgfQuery { u: Complex64::new(0.0, 0.0), t, horizon }).unwrap();
                assert!(
                    psi.norm() < 1e-12,
                    "{}: psi(0; {t}, {horizon}) = {psi}",
                    model.name()
                );
            }
        }
    }

    #[test]
    fn cgf_conjugate_symmetry_on_real_axis() {
        for model in all_models() {
            for &u in &[0.3, 1.1] {
                let plus = cgf(&model, CgfQuery { u: Complex64::new(u, 0.0), t: 0.1, horizon: 1.1 }).unwrap();
                let minus = cgf(&model, CgfQuery { u: Complex64::new(-u, 0.0), t: 0.1, horizon: 1.1 }).unwrap();
                assert_relative_eq!(plus.re, minus.re, max_relative = 1e-9, epsilon = 1e-12);
                assert_relative_eq!(plus.im, -minus.im, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_horizon_reduces_to_accumulated_hazard() {
        let u = Complex64::new(0.7, 0.2);
        for model in all_models() {
            let psi = cgf(&model, CgfQuery { u, t: 0.8, horizon: 0.8 }).unwrap();
            let expect = Complex64::i() * u * model.accumulated_lambda();
            assert!(
                (psi - expect).norm() < 1e-12,
                "{}: psi(u; t, t) = {psi}, expected {expect}",
                model.name()
            );
        }
    }

    #[test]
    fn cir_derivatives_match_finite_differences() {
        // Along the imaginary axis g(y) := Ψ(iy) is real with
        // g^{(k)}(1) = i^{2k} c_k, so c_k = (−1)^k g^{(k)}(1).
        let model = HazardModelSpec::Cir { theta: 2.0, kappa: 1.0, sigma: 0.5, lambda_t: 1.0 };
        let g = |y: f64| {
            cgf(&model, CgfQuery { u: Complex64::new(0.0, y), t: 0.0, horizon: 1.0 })
                .unwrap()
                .re
        };
        let h = 1e-3;
        let d1 = (g(1.0 + h) - g(1.0 - h)) / (2.0 * h);
        let d2 = (g(1.0 + h) - 2.0 * g(1.0) + g(1.0 - h)) / (h * h);

        let derivs = cgf_derivatives_at_i(&model, 0.0, 1.0, 3).unwrap();
        assert_eq!(derivs.c.len(), 2);
        assert_relative_eq!(derivs.c0, g(1.0), max_relative = 1e-10);
        assert_relative_eq!(derivs.c[0], -d1, max_relative = 1e-6);
        assert_relative_eq!(derivs.c[1], d2, max_relative = 1e-6);
    }

    #[test]
    fn ou_derivative_routes_are_internally_consistent() {
        // c₀ must match the direct CGF evaluation, and c₁ must match a
        // finite difference along the imaginary axis, for both OU models.
        for model in [
            HazardModelSpec::GammaOu { theta: 0.8, a: 1.5, b: 2.0, lambda0: 0.6 },
            HazardModelSpec::IgOu { theta: 0.7, a: 1.2, b: 1.5, lambda0: 0.4 },
        ] {
            let derivs = cgf_derivatives_at_i(&model, 0.2, 1.3, 4).unwrap();
            let g = |y: f64| {
                cgf(&model, CgfQuery { u: Complex64::new(0.0, y), t: 0.2, horizon: 1.3 })
                    .unwrap()
                    .re
            };
            assert_relative_eq!(derivs.c0, g(1.0), max_relative = 1e-10);
            let h = 1e-3;
            let d1 = (g(1.0 + h) - g(1.0 - h)) / (2.0 * h);
            assert_relative_eq!(derivs.c[0], -d1, max_relative = 1e-6);
            assert!(derivs.c0 < 0.0, "{}: c0 should be negative", model.name());
        }
    }

    #[test]
    fn ou_closed_forms_match_driver_quadrature_route() {
        // Both OU closed forms against the generic ϑ∫k_L(u·ε(s))ds integral,
        // on a grid along the imaginary axis (where the survival math lives).
        for model in [
            HazardModelSpec::GammaOu { theta: 0.8, a: 1.5, b: 2.0, lambda0: 0.6 },
            HazardModelSpec::IgOu { theta: 0.7, a: 1.2, b: 1.5, lambda0: 0.4 },
        ] {
            for &y in &[0.25, 0.5, 1.0, 1.5] {
                let q = CgfQuery { u: Complex64::new(0.0, y), t: 0.1, horizon: 1.2 };
                let closed = cgf(&model, q).unwrap();
                let generic = ou_cgf_driver_quadrature(&model, q).unwrap();
                assert_relative_eq!(closed.re, generic.re, max_relative = 1e-6, epsilon = 1e-12);
                assert!(
                    (closed.im - generic.im).abs() < 1e-10,
                    "{}: imaginary mismatch at y={y}",
                    model.name()
                );
            }
        }
    }

    #[test]
    fn zero_kernel_levy_model_is_deterministic() {
        let model = HazardModelSpec::LevyKernel {
            sigma_fn: SpaceTimeKernel::ZTimes(TimeKernel::Constant(0.0)),
            levy_density: LevyDensity::ScaledExp { coeff: 1.0, rate: 1.0 },
            z_domain: (0.0, f64::INFINITY),
            lambda_t: 1.7,
        };
        let derivs = cgf_derivatives_at_i(&model, 0.0, 2.0, 4).unwrap();
        assert_relative_eq!(derivs.c0, -1.7, epsilon = 1e-12);
        assert_relative_eq!(derivs.c[0], 1.7, epsilon = 1e-12);
        assert!(derivs.c[1].abs() < 1e-12);
        assert!(derivs.c[2].abs() < 1e-12);
    }

    #[test]
    fn cmy_second_cumulant_closed_form() {
        let model = HazardModelSpec::Cmy {
            c: 1.0,
            m: 2.0,
            y: 0.5,
            sigma_fn: TimeKernel::Constant(1.0),
            lambda_t: 0.0,
        };
        let derivs = cgf_derivatives_at_i(&model, 0.0, 1.0, 3).unwrap();
        let expect = crate::numerics::gamma_fn(1.5).unwrap() * 3.0f64.powf(-1.5);
        assert_relative_eq!(derivs.c[1], expect, max_relative = 1e-10);
    }

    #[test]
    fn pure_jump_c1_is_bounded_by_lambda() {
        // (e^{−σ}−1)σ ≤ 0 for σ ≥ 0, so c₁ = Λ_t + I_A ≤ Λ_t.
        for model in all_models().into_iter().filter(|m| m.is_pure_jump()) {
            let derivs = cgf_derivatives_at_i(&model, 0.0, 1.0, 2).unwrap();
            assert!(
                derivs.c[0] <= model.accumulated_lambda() + 1e-12,
                "{}: c1 = {} exceeds lambda_t = {}",
                model.name(),
                derivs.c[0],
                model.accumulated_lambda()
            );
        }
    }

    #[test]
    fn levy_kernel_analytic_route_matches_contour_route() {
        let model = HazardModelSpec::LevyKernel {
            sigma_fn: SpaceTimeKernel::ZTimes(TimeKernel::Constant(1.0)),
            levy_density: LevyDensity::ScaledExp { coeff: 0.8, rate: 2.0 },
            z_domain: (0.0, f64::INFINITY),
            lambda_t: 0.6,
        };
        let analytic = cgf_derivatives_at_i(&model, 0.0, 1.0, 5).unwrap();

        let mut f = |u: Complex64| cgf_raw(&model, u, 0.0, 1.0);
        let contour = cauchy_derivatives(
            &mut f,
            Complex64::new(0.0, 1.0),
            4,
            &CauchySettings::default(),
        )
        .unwrap();
        assert_relative_eq!(analytic.c0, contour.values[0].re, max_relative = 1e-6);
        for k in 1..5 {
            let ck = (contour.values[k] / Complex64::i().powu(k as u32)).re;
            assert_relative_eq!(analytic.c[k - 1], ck, max_relative = 1e-6);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad_cir = HazardModelSpec::Cir { theta: 0.5, kappa: 0.5, sigma: 1.0, lambda_t: 1.0 };
        assert!(matches!(bad_cir.validate(), Err(Error::InvalidModel(_))));

        let model = HazardModelSpec::GammaOu { theta: 0.8, a: 1.5, b: 2.0, lambda0: 0.6 };
        assert!(matches!(
            cgf_derivatives_at_i(&model, 0.0, 1.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            cgf(&model, CgfQuery { u: Complex64::new(0.0, 0.0), t: 1.0, horizon: 0.5 }),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            kernel_integrals(&model, 0.0, 1.0, 2),
            Err(Error::UnsupportedRoute { .. })
        ));
    }

    #[test]
    fn cumulant_vector_has_length_n_minus_one() {
        for model in all_models() {
            for n in 1..=4 {
                let derivs = cgf_derivatives_at_i(&model, 0.0, 0.9, n).unwrap();
                assert_eq!(derivs.c.len(), n - 1, "{} n={n}", model.name());
                assert_eq!(derivs.n, n);
            }
        }
    }
}
