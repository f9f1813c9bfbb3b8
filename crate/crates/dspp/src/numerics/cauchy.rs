//! Derivatives of analytic functions by trapezoidal integration on a circle.
//!
//! For f analytic on a disk around `center`, the k-th Taylor coefficient is a
//! Fourier coefficient of θ ↦ f(center + r e^{iθ}); the trapezoid rule on
//! equispaced nodes converges geometrically in the node count, with the ratio
//! set by the distance to the nearest singularity. The implementation always
//! evaluates a doubled node set and compares the two resulting coefficient
//! sets: agreement is the convergence certificate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Contour radius and base node count for [`cauchy_derivatives`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySettings {
    /// Circle radius; must stay strictly inside the analyticity disk of the
    /// function being differentiated.
    pub radius: f64,
    /// Base node count N; the function is sampled at 2N points and both the
    /// N-node and 2N-node coefficient sets are formed from the same samples.
    pub nodes: usize,
}

impl Default for CauchySettings {
    fn default() -> Self {
        CauchySettings { radius: 0.25, nodes: 64 }
    }
}

/// Derivatives f^{(0)}..f^{(n_max)} at the expansion center, with an optional
/// accuracy warning when node doubling agreed only loosely.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourDerivatives {
    pub values: Vec<Complex64>,
    pub warning: Option<String>,
}

const AGREE_CLEAN: f64 = 1e-9;
const AGREE_HARD: f64 = 1e-6;

/// Computes f^{(k)}(center) for k = 0..=n_max.
///
/// The node-doubling check compares normalised Taylor coefficients
/// a_k = f^{(k)} r^k / k! (which share the scale of f on the circle): relative
/// disagreement above 1e-9 attaches a warning, above 1e-6 it is an error.
pub fn cauchy_derivatives<F>(
    f: &mut F,
    center: Complex64,
    n_max: usize,
    settings: &CauchySettings,
) -> Result<ContourDerivatives>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let n = settings.nodes;
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument("cauchy node count must be even and at least 4".into()));
    }
    if n_max + 1 > n / 2 {
        return Err(Error::InvalidArgument(format!(
            "cauchy derivative order {n_max} too high for {n} nodes (aliasing)"
        )));
    }
    let r = settings.radius;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument("cauchy radius must be positive and finite".into()));
    }

    let doubled = 2 * n;
    let mut samples = Vec::with_capacity(doubled);
    for j in 0..doubled {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / doubled as f64;
        let u = center + Complex64::from_polar(r, theta);
        let v = f(u)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite {
                context: format!("contour sample at angle {theta:.4}"),
            });
        }
        samples.push((theta, v));
    }
    let scale = samples.iter().map(|(_, v)| v.norm()).fold(0.0_f64, f64::max).max(1e-300);

    // Normalised Taylor coefficients from the full and the halved node sets.
    let coeff = |stride: usize| -> Vec<Complex64> {
        let count = doubled / stride;
        (0..=n_max)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (theta, v) in samples.iter().step_by(stride) {
                    acc += v * Complex64::from_polar(1.0, -(k as f64) * theta);
                }
                acc / count as f64
            })
            .collect()
    };
    let fine = coeff(1);
    let coarse = coeff(2);

    let worst = fine
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0_f64, f64::max)
        / scale;
    if worst > AGREE_HARD {
        return Err(Error::CauchyNoConverge {
            detail: format!(
                "node doubling left relative coefficient gap {worst:.3e} (radius {r}, {n} nodes)"
            ),
        });
    }
    let warning = (worst > AGREE_CLEAN).then(|| {
        format!("contour derivatives agreed only to {worst:.3e} under node doubling")
    });

    let mut values = Vec::with_capacity(n_max + 1);
    let mut k_factorial = 1.0;
    for (k, a) in fine.iter().enumerate() {
        if k > 0 {
            k_factorial *= k as f64;
        }
        values.push(a * k_factorial / r.powi(k as i32));
    }
    Ok(ContourDerivatives { values, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_is_exact() {
        // f(u) = u² at center i: f(i) = -1, f'(i) = 2i, f''(i) = 2.
        let center = Complex64::new(0.0, 1.0);
        let mut f = |u: Complex64| Ok(u * u);
        let d = cauchy_derivatives(&mut f, center, 2, &CauchySettings::default()).unwrap();
        assert!(d.warning.is_none());
        assert_relative_eq!(d.values[0].re, -1.0, epsilon = 1e-12);
        assert_relative_eq!(d.values[0].im, 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.values[1].im, 2.0, epsilon = 1e-12);
        assert_relative_eq!(d.values[2].re, 2.0, epsilon = 1e-11);
    }

    #[test]
    fn entire_function_value_only() {
        let center = Complex64::new(0.3, -0.2);
        let mut f = |u: Complex64| Ok(u.exp());
        let d = cauchy_derivatives(&mut f, center, 0, &CauchySettings::default()).unwrap();
        let expect = center.exp();
        assert_relative_eq!(d.values[0].re, expect.re, max_relative = 1e-12);
        assert_relative_eq!(d.values[0].im, expect.im, max_relative = 1e-12);
    }

    #[test]
    fn exp_derivatives_to_high_order() {
        let center = Complex64::new(0.0, 1.0);
        let mut f = |u: Complex64| Ok(u.exp());
        let expect = center.exp();
        // Recovering f^(k) multiplies coefficient-level rounding noise by
        // k!/r^k, so the attainable accuracy drops with both the order and
        // a shrinking radius. Orders up to 6 at the production radius:
        let d = cauchy_derivatives(&mut f, center, 6, &CauchySettings::default()).unwrap();
        for v in &d.values {
            assert_relative_eq!(v.re, expect.re, max_relative = 1e-8);
            assert_relative_eq!(v.im, expect.im, max_relative = 1e-8);
        }
        // Order 8 with a comfortable radius, where the amplification factor
        // 8!/r^8 stays small.
        let wide = CauchySettings {
            radius: 1.0,
            ..CauchySettings::default()
        };
        let d = cauchy_derivatives(&mut f, center, 8, &wide).unwrap();
        for v in &d.values {
            assert_relative_eq!(v.re, expect.re, max_relative = 1e-9);
            assert_relative_eq!(v.im, expect.im, max_relative = 1e-9);
        }
    }

    #[test]
    fn nearby_pole_is_detected() {
        // f(u) = 1/(u - (i + 0.26)): the pole grazes the radius-0.25 circle
        // around i, so trapezoid convergence stalls and node doubling exposes
        // the disagreement.
        let center = Complex64::new(0.0, 1.0);
        let pole = Complex64::new(0.26, 1.0);
        let mut f = |u: Complex64| Ok(1.0 / (u - pole));
        let err = cauchy_derivatives(&mut f, center, 4, &CauchySettings::default());
        assert!(matches!(err, Err(Error::CauchyNoConverge { .. })));
    }

    #[test]
    fn aliasing_guard() {
        let mut f = |u: Complex64| Ok(u);
        let err = cauchy_derivatives(
            &mut f,
            Complex64::new(0.0, 0.0),
            40,
            &CauchySettings { radius: 0.25, nodes: 64 },
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }
}
