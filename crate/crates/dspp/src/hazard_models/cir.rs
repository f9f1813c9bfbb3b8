//! Conditional CGF of the integrated square-root (CIR) hazard rate.
//!
//! For dλ_s = ϑ(κ − λ_s) ds + σ√λ_s dW_s the conditional law of
//! ∫_t^T λ_s ds given λ_t has the exponential-affine transform
//! Ψ(u; t, T) = A(u, τ) + B(u, τ)·λ_t with τ = T − t,
//!
//!   γ(u) = √(ϑ² − 2iuσ²)                       (principal square root)
//!   B    = 2iu(1 − e^{−γτ}) / [(γ+ϑ) + (γ−ϑ)e^{−γτ}]
//!   A    = (2ϑκ/σ²)·[ln(2γ) + (ϑ−γ)τ/2 − ln((γ+ϑ) + (γ−ϑ)e^{−γτ})]
//!
//! with principal branches throughout, so that Ψ(0) = 0 and A(u,0) = B(u,0) = 0.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub(crate) fn cgf_cir(
    theta: f64,
    kappa: f64,
    sigma: f64,
    lambda_t: f64,
    u: Complex64,
    tau: f64,
) -> Result<Complex64> {
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let iu = Complex64::i() * u;
    let gamma = (Complex64::new(theta * theta, 0.0) - 2.0 * iu * sigma * sigma).sqrt();
    if gamma.norm() < 1e-12 * theta.max(1.0) {
        // u sits on the γ branch point; the affine formulas degenerate.
        return Err(Error::BranchCut { model: "CIR" });
    }
    let decay = (-gamma * tau).exp();
    let denom = (gamma + theta) + (gamma - theta) * decay;
    if denom.norm() < 1e-12 * gamma.norm().max(theta) {
        return Err(Error::BranchCut { model: "CIR" });
    }
    let b = 2.0 * iu * (1.0 - decay) / denom;
    let a = (2.0 * theta * kappa / (sigma * sigma))
        * ((2.0 * gamma).ln() + (theta - gamma) * (tau / 2.0) - denom.ln());
    let value = a + b * lambda_t;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite {
            context: format!("CIR cgf at u = {}", u),
        });
    }
    Ok(value)
}
