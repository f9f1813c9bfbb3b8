//! Iterated integrals of a time-space kernel against a Lévy density:
//! ∫_t^T ∫_{z domain} g(s, z) ν(z) dz ds.
//!
//! The inner z-integral is the delicate part. Infinite-activity densities blow
//! up like z^{-1-Y} at the origin while admissible integrands vanish there, so
//! the product is integrable but may retain a fractional-power shape near
//! zero. Below a declared cutoff the product is treated as a local power law:
//! the exponent is fitted from samples, a sub-cutoff contribution is added by
//! extrapolation, and a fitted exponent at or below -1 is rejected as
//! non-integrable. Far tails are truncated where the integrand has decayed to
//! machine irrelevance, found by a doubling scan.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{adaptive, QuadResult, QuadValue, QuadratureSettings};

/// Cutoff below which the inner integrand is handled by power-law
/// extrapolation instead of direct quadrature.
const SMALL_Z: f64 = 1e-8;

/// Magnitude ratio (relative to the largest value seen) at which the upper
/// tail scan declares the integrand dead.
const TAIL_RATIO: f64 = 1e-18;

fn levy_core<V, G, D>(
    g: &G,
    t: f64,
    t_end: f64,
    density: &D,
    z_domain: (f64, f64),
    settings: &QuadratureSettings,
) -> Result<(V, f64)>
where
    V: QuadValue,
    G: Fn(f64, f64) -> V,
    D: Fn(f64) -> f64,
{
    settings.validate()?;
    let (z_lo, z_hi) = z_domain;
    if !(z_lo >= 0.0) || !(z_hi > z_lo) {
        return Err(Error::InvalidArgument(format!(
            "z domain must satisfy 0 <= lo < hi, got ({z_lo}, {z_hi})"
        )));
    }
    if !t_end.is_finite() || !t.is_finite() || t_end < t {
        return Err(Error::InvalidArgument(format!(
            "time interval must be finite with t <= T, got [{t}, {t_end}]"
        )));
    }
    if t_end == t {
        return Ok((V::zero(), 0.0));
    }

    let h = |s: f64, z: f64| g(s, z).scale(density(z));

    // Lower edge of the directly integrated region.
    let delta = if z_lo == 0.0 { SMALL_Z.min(0.25 * z_hi) } else { z_lo };

    let z_cut = upper_cutoff(&h, t, t_end, delta, z_hi)?;

    let inner_settings = QuadratureSettings {
        rel_tol: settings.rel_tol,
        abs_tol: settings.abs_tol / (4.0 * (t_end - t).max(1.0)),
        max_subdivisions: settings.max_subdivisions.max(400),
    };

    let mut inner = |s: f64| -> Result<V> {
        // The sub-cutoff fit is cheap and doubles as the integrability check,
        // so it runs before the (potentially expensive) direct quadrature.
        let tail = if z_lo == 0.0 { small_z_tail(&h, s, delta)? } else { V::zero() };
        let (value, _err) = adaptive(&mut |z| Ok(h(s, z)), delta, z_cut, &inner_settings)?;
        Ok(value.add(tail))
    };

    adaptive(&mut inner, t, t_end, settings)
}

/// Contribution of (0, delta) by local power-law extrapolation. Samples the
/// integrand at delta, delta/2, delta/4 and delta/8, fits the exponent from
/// two stride-4 pairs, and rejects exponents at or below -1.
fn small_z_tail<V, H>(h: &H, s: f64, delta: f64) -> Result<V>
where
    V: QuadValue,
    H: Fn(f64, f64) -> V,
{
    let zs = [delta, 0.5 * delta, 0.25 * delta, 0.125 * delta];
    let vals: Vec<V> = zs.iter().map(|&z| h(s, z)).collect();
    let mags: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
    let peak = mags.iter().fold(0.0_f64, |a, &b| a.max(b));
    if peak == 0.0 {
        return Ok(V::zero());
    }
    if !peak.is_finite() {
        return Err(Error::NonFinite { context: format!("levy integrand near z=0 at s={s}") });
    }

    // Exponent fits over [delta/8, delta/2] and [delta/4, delta]; they must
    // agree for the power-law model to be trusted.
    let ln4 = 4.0_f64.ln();
    let fit = |hi: f64, lo: f64| -> Option<f64> {
        if hi > 0.0 && lo > 0.0 {
            Some((hi / lo).ln() / ln4)
        } else {
            None
        }
    };
    let p1 = fit(mags[1], mags[3]);
    let p2 = fit(mags[0], mags[2]);
    let p = match (p1, p2) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) | (None, Some(a)) => a,
        // Mixed zero/non-zero samples at these scales mean the integrand is
        // effectively zero below the cutoff.
        (None, None) => return Ok(V::zero()),
    };
    if p <= -1.0 + 1e-9 {
        return Err(Error::NonIntegrable { region: format!("z -> 0+ (fitted exponent {p:.3})") });
    }
    // Anchor at the best-conditioned sample: ∫_0^delta h dz ≈
    // h(z_a) z_a (delta/z_a)^{p+1} / (p+1).
    let (anchor_idx, _) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty magnitude set");
    let z_a = zs[anchor_idx];
    let factor = z_a * (delta / z_a).powf(p + 1.0) / (p + 1.0);
    Ok(vals[anchor_idx].scale(factor))
}

/// Finds the upper truncation point by doubling until the integrand magnitude
/// has collapsed relative to its running maximum, probing three time slices.
fn upper_cutoff<V, H>(h: &H, t: f64, t_end: f64, z_start: f64, z_hi: f64) -> Result<f64>
where
    V: QuadValue,
    H: Fn(f64, f64) -> V,
{
    if z_hi.is_finite() && z_hi <= 1e4 {
        return Ok(z_hi);
    }
    let slices = [
        t + 0.5 * (t_end - t),
        t + 0.01 * (t_end - t),
        t + 0.99 * (t_end - t),
    ];
    let probe = |z: f64| slices.iter().map(|&s| h(s, z).norm()).fold(0.0_f64, f64::max);

    let mut z = z_start.max(1e-3);
    let mut peak = 0.0_f64;
    // Seed the scale with a few moderate points so a hump beyond 1 is seen.
    for &seed in &[z_start * 2.0, 0.1, 1.0] {
        if seed > z_start && seed < z_hi {
            peak = peak.max(probe(seed));
        }
    }
    let mut quiet = 0;
    loop {
        z *= 2.0;
        if z >= z_hi {
            return Ok(z_hi);
        }
        let m = probe(z);
        if !m.is_finite() {
            return Err(Error::NonFinite { context: format!("levy integrand at z={z:.3e}") });
        }
        peak = peak.max(m);
        if peak == 0.0 {
            // Identically zero so far: nothing to resolve beyond this point.
            if z > 1e3 {
                return Ok(z);
            }
            continue;
        }
        if m <= TAIL_RATIO * peak {
            quiet += 1;
            if quiet >= 3 {
                return Ok(z);
            }
        } else {
            quiet = 0;
        }
        if z > 1e7 {
            return Err(Error::NonIntegrable {
                region: format!("z -> infinity (no decay by z={z:.3e})"),
            });
        }
    }
}

/// Integrates `g(s, z) ν(z)` over `[t, T] x z_domain` for a real kernel.
pub fn integrate_levy<G, D>(
    g: G,
    t: f64,
    t_end: f64,
    density: D,
    z_domain: (f64, f64),
    settings: &QuadratureSettings,
) -> Result<QuadResult>
where
    G: Fn(f64, f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (value, error) = levy_core(&g, t, t_end, &density, z_domain, settings)?;
    Ok(QuadResult { value, error })
}

/// Complex-kernel counterpart of [`integrate_levy`], used when evaluating
/// characteristic exponents at complex arguments.
pub fn integrate_levy_complex<G, D>(
    g: G,
    t: f64,
    t_end: f64,
    density: D,
    z_domain: (f64, f64),
    settings: &QuadratureSettings,
) -> Result<(Complex64, f64)>
where
    G: Fn(f64, f64) -> Complex64,
    D: Fn(f64) -> f64,
{
    levy_core(&g, t, t_end, &density, z_domain, settings)
}
