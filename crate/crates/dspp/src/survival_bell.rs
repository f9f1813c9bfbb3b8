//! Survival probability of the n-th jump from the CGF derivative vector:
//!
//!   P(τₙ > T | F_t) = 1_{τₙ>t} · Σ_{k=0}^{n−1} (e^{c₀}/k!) · B_k(c₁, …, c_k),
//!
//! where B_k are complete Bell polynomials and c_k = Ψ^{(k)}(i)/i^k. The
//! normalization to real arguments uses Bell homogeneity:
//! B_k(Ψ'(i), …, Ψ^{(k)}(i))/i^k = B_k(c₁, …, c_k), so the k-sum runs in real
//! arithmetic with no imaginary drift.
//!
//! The indicator 1_{τₙ>t} is the caller's responsibility: whether the n-th
//! jump has already happened by the conditioning time is application state
//! the analytic factor cannot know. Everything returned here is the factor
//! multiplying that indicator.

use crate::bell::bell_sequence;
use crate::error::{Error, Result};
use crate::hazard_models::{cgf_derivatives_at_i, HazardModelSpec};

/// Which of the three independent computations produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Bell,
    Malliavin,
    MonteCarlo,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Bell => "bell",
            Route::Malliavin => "malliavin",
            Route::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A survival probability with its k-indexed partial terms and any accuracy
/// or model-consistency notes accumulated on the way.
#[derive(Debug, Clone)]
pub struct SurvivalResult {
    /// The analytic factor of P(τₙ > T | F_t) (caller applies 1_{τₙ>t}).
    pub probability: f64,
    /// terms[k] for k = 0..n−1; probability is exactly their sum and
    /// terms[0] = e^{c₀}.
    pub terms: Vec<f64>,
    pub route: Route,
    pub diagnostics: Vec<String>,
}

/// Shared between the Bell and moment-recursion routes: warn (never clamp)
/// when a probability leaves [0, 1] beyond tolerance, and when individual
/// terms go negative. Both can legitimately happen for compensated hazards,
/// where Λ_T may take negative values; they signal that the model violates
/// the non-decreasing-hazard reading rather than an arithmetic bug.
pub(crate) fn attach_consistency_diagnostics(
    probability: f64,
    terms: &[f64],
    diagnostics: &mut Vec<String>,
) {
    if let Some(worst) = terms.iter().copied().filter(|&v| v < 0.0).reduce(f64::min) {
        diagnostics.push(format!(
            "negative k-term {worst:.6e}: the hazard increment is not a.s. non-negative under this model"
        ));
    }
    if !(-1e-9..=1.0 + 1e-9).contains(&probability) {
        diagnostics.push(format!(
            "probability {probability:.12e} outside [0, 1]: model-consistency warning (compensated hazard admits negative Λ_T)"
        ));
    }
}

/// P(τₙ > T | F_t) via the Bell-polynomial representation.
///
/// Derivatives come from [`cgf_derivatives_at_i`]: analytically for the
/// jump-kernel models, by Cauchy contour for CIR and the OU models. The
/// moment condition E[Λ_T^n | F_t] < ∞ is implied by convergent kernel
/// integrals for the jump models and holds automatically for CIR/OU.
pub fn survival_thm1(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    n: usize,
) -> Result<SurvivalResult> {
    let derivs = cgf_derivatives_at_i(model, t, horizon, n)?;
    let mut diagnostics = Vec::new();
    if let Some(w) = derivs.warning {
        diagnostics.push(w);
    }

    let weight = derivs.c0.exp();
    if !weight.is_finite() {
        return Err(Error::NonFinite {
            context: format!("e^c0 with c0 = {}", derivs.c0),
        });
    }
    let bells = bell_sequence(n - 1, &derivs.c)?;

    let mut terms = Vec::with_capacity(n);
    let mut k_factorial = 1.0_f64;
    for (k, b) in bells.into_iter().enumerate() {
        if k > 0 {
            k_factorial *= k as f64;
        }
        let term = weight * b / k_factorial;
        if !term.is_finite() {
            return Err(Error::NonFinite {
                context: format!("Bell survival term k = {k}"),
            });
        }
        terms.push(term);
    }
    let probability: f64 = terms.iter().sum();
    attach_consistency_diagnostics(probability, &terms, &mut diagnostics);

    Ok(SurvivalResult { probability, terms, route: Route::Bell, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard_models::{cgf, CgfQuery, LevyDensity, SpaceTimeKernel, TimeKernel};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn cir() -> HazardModelSpec {
        HazardModelSpec::Cir { theta: 2.0, kappa: 1.0, sigma: 0.5, lambda_t: 1.0 }
    }

    fn constant_hazard(level: f64) -> HazardModelSpec {
        HazardModelSpec::LevyKernel {
            sigma_fn: SpaceTimeKernel::ZTimes(TimeKernel::Constant(0.0)),
            levy_density: LevyDensity::ScaledExp { coeff: 1.0, rate: 1.0 },
            z_domain: (0.0, f64::INFINITY),
            lambda_t: level,
        }
    }

    #[test]
    fn first_jump_is_the_laplace_transform() {
        for model in [
            cir(),
            HazardModelSpec::GammaOu { theta: 0.8, a: 1.5, b: 2.0, lambda0: 0.6 },
            HazardModelSpec::Cmy {
                c: 1.0,
                m: 2.0,
                y: 0.5,
                sigma_fn: TimeKernel::Constant(1.0),
                lambda_t: 0.5,
            },
        ] {
            let result = survival_thm1(&model, 0.0, 1.0, 1).unwrap();
            let psi_i = cgf(&model, CgfQuery { u: Complex64::new(0.0, 1.0), t: 0.0, horizon: 1.0 })
                .unwrap();
            assert_eq!(result.terms.len(), 1);
            assert_relative_eq!(result.probability, psi_i.re.exp(), max_relative = 1e-10);
            assert_relative_eq!(result.terms[0], result.probability, max_relative = 1e-15);
        }
    }

    #[test]
    fn constant_hazard_gives_poisson_partial_sums() {
        let level = 1.3_f64;
        let model = constant_hazard(level);
        let mut partial = 0.0;
        let mut k_factorial = 1.0;
        for n in 1..=5 {
            let k = n - 1;
            if k > 0 {
                k_factorial *= k as f64;
            }
            partial += level.powi(k as i32) / k_factorial;
            let expect = (-level).exp() * partial;
            let result = survival_thm1(&model, 0.0, 2.0, n).unwrap();
            assert_relative_eq!(result.probability, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn probability_is_sum_of_terms_and_leads_with_laplace_weight() {
        let result = survival_thm1(&cir(), 0.0, 1.5, 4).unwrap();
        let total: f64 = result.terms.iter().sum();
        assert_relative_eq!(result.probability, total, max_relative = 1e-15);
        // terms[0] = e^{c0} = e^{Ψ(i)}.
        let psi_i = cgf(&cir(), CgfQuery { u: Complex64::new(0.0, 1.0), t: 0.0, horizon: 1.5 })
            .unwrap();
        assert_relative_eq!(result.terms[0], psi_i.re.exp(), max_relative = 1e-10);
        assert_eq!(result.route, Route::Bell);
        assert!(result.probability > 0.0 && result.probability <= 1.0 + 1e-12);
    }

    #[test]
    fn monotone_in_jump_index() {
        let mut last = 0.0;
        for n in 1..=6 {
            let p = survival_thm1(&cir(), 0.0, 1.0, n).unwrap().probability;
            assert!(
                p >= last - 1e-12,
                "survival must be non-decreasing in n: P({n}) = {p} < {last}"
            );
            last = p;
        }
    }

    #[test]
    fn rejects_out_of_range_jump_index() {
        assert!(matches!(
            survival_thm1(&cir(), 0.0, 1.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            survival_thm1(&cir(), 0.0, 1.0, 33),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn degenerate_horizon_counts_accumulated_hazard() {
        // T = t with Λ_t = 2: P(τ₃ > t | F_t)-factor = e^{−2}(1 + 2 + 2).
        let model = constant_hazard(2.0);
        let result = survival_thm1(&model, 0.7, 0.7, 3).unwrap();
        assert_relative_eq!(result.probability, 5.0 * (-2.0_f64).exp(), max_relative = 1e-12);
    }
}
