//! Moment-recursion survival route for the jump-kernel hazards.
//!
//! For Λ_T = Λ_t + ∫_t^T ∫ σ(s,z) Ñ(ds,dz), the weighted increment moments
//! m_r := E[(Λ_T−Λ_t)^r e^{−(Λ_T−Λ_t)} | F_t] satisfy a closed recursion in
//! the kernel integrals
//!
//!   I_A = ∫∫ (e^{−σ}−1)σ ν ds,   I_k = ∫∫ e^{−σ} σ^{k+1} ν ds:
//!
//!   m₀    = exp{∫∫ (e^{−σ}−1+σ) ν ds},
//!   m_{r+1} = m_r·I_A + Σ_{k=1}^{r} C(r,k)·m_{r−k}·I_k,
//!
//! and the survival probability follows by binomially splitting Λ_T^k into
//! increment and Λ_t powers:
//!
//!   P(τₙ > T | F_t) = 1_{τₙ>t} e^{−Λ_t} Σ_{k=0}^{n−1} Σ_{j=0}^{k}
//!                       Λ_t^j / (j!(k−j)!) · m_{k−j}.
//!
//! The e^{−Λ_t} prefactor (rather than e^{+Λ_t}) is forced by the T = t
//! degeneracy and by agreement with the Bell route; both routes evaluate the
//! same conditional expectation, so they cross-validate each other exactly.

use crate::bell::{binomial_u128, factorial_u128};
use crate::error::{Error, Result};
use crate::hazard_models::{kernel_integrals, CgfQuery, HazardModelSpec};
use crate::survival_bell::{attach_consistency_diagnostics, Route, SurvivalResult};

/// Weighted increment moments m₀..m_{n−1} for a jump-kernel model.
#[derive(Debug, Clone)]
pub struct MalliavinMoments {
    /// m[r] = E[(Λ_T−Λ_t)^r e^{−(Λ_T−Λ_t)} | F_t].
    pub m: Vec<f64>,
    pub t: f64,
    pub horizon: f64,
}

fn validate_window(model: &HazardModelSpec, t: f64, horizon: f64, n: usize) -> Result<()> {
    model.validate()?;
    // Reuse the CGF query validation for the time window.
    CgfQuery { u: num_complex::Complex64::new(0.0, 0.0), t, horizon }.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("jump index n must be at least 1".into()));
    }
    if n > crate::bell::MAX_BELL_ORDER {
        return Err(Error::InvalidArgument(format!(
            "jump index n={n} exceeds the supported maximum {}",
            crate::bell::MAX_BELL_ORDER
        )));
    }
    if !model.is_pure_jump() {
        return Err(Error::UnsupportedRoute { route: "malliavin", model: model.name() });
    }
    Ok(())
}

/// Computes m₀..m_{n−1} by the kernel-integral recursion. Each integral is
/// evaluated once and reused across all recursion steps.
pub fn malliavin_moments(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    n: usize,
) -> Result<MalliavinMoments> {
    validate_window(model, t, horizon, n)?;
    // m_{r+1} consumes I_k for k ≤ r ≤ n−2.
    let ints = kernel_integrals(model, t, horizon, n.saturating_sub(2))?;
    let m0 = ints.log_m0.exp();
    if !m0.is_finite() || m0 <= 0.0 {
        return Err(Error::NonFinite { context: format!("m0 = exp({})", ints.log_m0) });
    }
    let mut m = Vec::with_capacity(n);
    m.push(m0);
    for r in 0..n - 1 {
        let mut next = m[r] * ints.i_a;
        for k in 1..=r {
            next += binomial_u128(r, k) as f64 * m[r - k] * ints.i_pow[k - 1];
        }
        if !next.is_finite() {
            return Err(Error::NonFinite { context: format!("m_{}", r + 1) });
        }
        m.push(next);
    }
    Ok(MalliavinMoments { m, t, horizon })
}

/// P(τₙ > T | F_t) via the moment recursion. `lambda_t` is the hazard
/// accumulated by the conditioning time — for self-consistent results pass
/// the model's own `accumulated_lambda()`; the parameter is explicit so the
/// Λ_t-dependence of the double sum is testable in isolation. The indicator
/// 1_{τₙ>t} is the caller's responsibility, as in the Bell route.
pub fn survival_thm2(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    n: usize,
    lambda_t: f64,
) -> Result<SurvivalResult> {
    if !(lambda_t.is_finite() && lambda_t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_t must be non-negative and finite, got {lambda_t}"
        )));
    }
    let moments = malliavin_moments(model, t, horizon, n)?;
    let weight = (-lambda_t).exp();

    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        let mut inner = 0.0_f64;
        let mut lambda_pow = 1.0_f64;
        for j in 0..=k {
            if j > 0 {
                lambda_pow *= lambda_t;
            }
            let denom = (factorial_u128(j) * factorial_u128(k - j)) as f64;
            inner += lambda_pow / denom * moments.m[k - j];
        }
        let term = weight * inner;
        if !term.is_finite() {
            return Err(Error::NonFinite { context: format!("moment survival term k = {k}") });
        }
        terms.push(term);
    }
    let probability: f64 = terms.iter().sum();
    let mut diagnostics = Vec::new();
    attach_consistency_diagnostics(probability, &terms, &mut diagnostics);

    Ok(SurvivalResult { probability, terms, route: Route::Malliavin, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard_models::{cgf, LevyDensity, SpaceTimeKernel, TimeKernel};
    use crate::numerics::{cauchy_derivatives, gamma_fn, CauchySettings};
    use crate::survival_bell::survival_thm1;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn cmy_anchor() -> HazardModelSpec {
        HazardModelSpec::Cmy {
            c: 1.0,
            m: 2.0,
            y: 0.5,
            sigma_fn: TimeKernel::Constant(1.0),
            lambda_t: 0.5,
        }
    }

    fn scaled_exp_kernel(coeff: f64) -> HazardModelSpec {
        HazardModelSpec::LevyKernel {
            sigma_fn: SpaceTimeKernel::ZTimes(TimeKernel::Constant(1.0)),
            levy_density: LevyDensity::ScaledExp { coeff, rate: 1.0 },
            z_domain: (0.0, f64::INFINITY),
            lambda_t: 1.1,
        }
    }

    #[test]
    fn degenerate_horizon_and_zero_kernel_give_unit_mass() {
        let at_horizon = malliavin_moments(&cmy_anchor(), 0.4, 0.4, 4).unwrap();
        assert_relative_eq!(at_horizon.m[0], 1.0, epsilon = 1e-14);
        for r in 1..4 {
            assert!(at_horizon.m[r].abs() < 1e-14, "m_{r} = {}", at_horizon.m[r]);
        }

        let zero_kernel = HazardModelSpec::LevyKernel {
            sigma_fn: SpaceTimeKernel::ZTimes(TimeKernel::Constant(0.0)),
            levy_density: LevyDensity::ScaledExp { coeff: 1.0, rate: 1.0 },
            z_domain: (0.0, f64::INFINITY),
            lambda_t: 2.0,
        };
        let frozen = malliavin_moments(&zero_kernel, 0.0, 1.0, 3).unwrap();
        assert_relative_eq!(frozen.m[0], 1.0, epsilon = 1e-14);
        assert!(frozen.m[1].abs() < 1e-14 && frozen.m[2].abs() < 1e-14);
    }

    #[test]
    fn cmy_m0_and_m1_closed_forms() {
        let model = cmy_anchor();
        let moments = malliavin_moments(&model, 0.0, 1.0, 2).unwrap();
        let g_half = gamma_fn(0.5).unwrap();
        let g_neg_half = gamma_fn(-0.5).unwrap();
        let log_m0 = g_half * 2.0_f64.powf(-0.5) + g_neg_half * (3.0_f64.sqrt() - 2.0_f64.sqrt());
        assert_relative_eq!(moments.m[0], log_m0.exp(), max_relative = 1e-8);
        let i_a = g_half * (3.0_f64.powf(-0.5) - 2.0_f64.powf(-0.5));
        assert_relative_eq!(moments.m[1], moments.m[0] * i_a, max_relative = 1e-8);
    }

    #[test]
    fn moments_match_laplace_transform_derivatives() {
        // φ(ζ) := E[e^{−ζΔΛ}] = exp{∫∫(e^{−ζσ}−1+ζσ)ν ds} satisfies
        // m_r = (−1)^r φ^{(r)}(1); φ(ζ) = exp(Ψ(iζ) + ζΛ_t) reuses the CGF.
        let model = scaled_exp_kernel(0.8);
        let lambda_t = model.accumulated_lambda();
        let moments = malliavin_moments(&model, 0.0, 1.0, 4).unwrap();

        let mut f = |zeta: Complex64| -> crate::error::Result<Complex64> {
            let u = Complex64::i() * zeta;
            let psi = cgf(&model, CgfQuery { u, t: 0.0, horizon: 1.0 })?;
            Ok((psi + zeta * lambda_t).exp())
        };
        let contour = cauchy_derivatives(
            &mut f,
            Complex64::new(1.0, 0.0),
            3,
            &CauchySettings::default(),
        )
        .unwrap();
        for r in 0..4 {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let derived = sign * contour.values[r].re;
            assert!(contour.values[r].im.abs() < 1e-9);
            assert_relative_eq!(moments.m[r], derived, max_relative = 1e-7);
        }
    }

    #[test]
    fn recursion_is_linear_under_density_scaling() {
        // Doubling ν doubles log m₀ and every kernel integral. Express the
        // doubled moments through the original integrals and compare.
        let base = malliavin_moments(&scaled_exp_kernel(0.7), 0.0, 1.0, 3).unwrap();
        let doubled = malliavin_moments(&scaled_exp_kernel(1.4), 0.0, 1.0, 3).unwrap();

        let i_a = base.m[1] / base.m[0];
        let i_1 = base.m[2] / base.m[0] - i_a * i_a;

        assert_relative_eq!(doubled.m[0], (2.0 * base.m[0].ln()).exp(), max_relative = 1e-9);
        assert_relative_eq!(doubled.m[1], doubled.m[0] * 2.0 * i_a, max_relative = 1e-9);
        let expect_m2 = doubled.m[0] * (4.0 * i_a * i_a + 2.0 * i_1);
        assert_relative_eq!(doubled.m[2], expect_m2, max_relative = 1e-9);
    }

    #[test]
    fn degenerate_horizon_survival_is_poisson() {
        // T = t, Λ_t = 2, n = 3 → e^{−2}(1 + 2 + 2) = 5e^{−2}.
        let result = survival_thm2(&cmy_anchor(), 0.9, 0.9, 3, 2.0).unwrap();
        assert_relative_eq!(result.probability, 5.0 * (-2.0_f64).exp(), max_relative = 1e-12);
        assert_eq!(result.route, Route::Malliavin);
    }

    #[test]
    fn first_jump_reduces_to_laplace_factor() {
        let model = cmy_anchor();
        let lambda_t = model.accumulated_lambda();
        let result = survival_thm2(&model, 0.0, 1.0, 1, lambda_t).unwrap();
        let psi_i =
            cgf(&model, CgfQuery { u: Complex64::new(0.0, 1.0), t: 0.0, horizon: 1.0 }).unwrap();
        assert_relative_eq!(result.probability, psi_i.re.exp(), max_relative = 1e-8);
    }

    #[test]
    fn agrees_with_bell_route_on_cmy() {
        let model = cmy_anchor();
        let lambda_t = model.accumulated_lambda();
        for n in 1..=4 {
            let bell = survival_thm1(&model, 0.0, 1.0, n).unwrap();
            let rec = survival_thm2(&model, 0.0, 1.0, n, lambda_t).unwrap();
            assert_relative_eq!(bell.probability, rec.probability, max_relative = 1e-8);
        }
    }

    #[test]
    fn diffusion_models_are_rejected() {
        let cir = HazardModelSpec::Cir { theta: 2.0, kappa: 1.0, sigma: 0.5, lambda_t: 1.0 };
        assert!(matches!(
            malliavin_moments(&cir, 0.0, 1.0, 3),
            Err(Error::UnsupportedRoute { route: "malliavin", .. })
        ));
        assert!(matches!(
            survival_thm2(&cir, 0.0, 1.0, 3, 0.0),
            Err(Error::UnsupportedRoute { .. })
        ));
    }
}
