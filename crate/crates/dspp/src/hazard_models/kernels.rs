//! Deterministic kernel vocabulary: time factors σ(s), space-time kernels
//! σ(s,z), and Lévy jump densities ν(z).
//!
//! The closed vocabulary (constants, decaying exponentials, piecewise-constant
//! tables) covers every worked configuration while keeping serialization and
//! closed-form integration tractable.

use crate::error::{Error, Result};

/// Deterministic time factor σ(s) ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeKernel {
    /// σ(s) = value.
    Constant(f64),
    /// σ(s) = scale · e^{−rate·s}. `rate` may be negative (growing kernel);
    /// the scale must be non-negative.
    ExpDecay { scale: f64, rate: f64 },
    /// Right-open steps: value `values[0]` on (−∞, breaks[0]), `values[i]` on
    /// [breaks[i−1], breaks[i]), and `values.last()` from the final break on.
    PiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
}

impl TimeKernel {
    pub fn validate(&self) -> Result<()> {
        match self {
            TimeKernel::Constant(v) => {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "constant time kernel must be finite and >= 0, got {}",
                        v
                    )));
                }
            }
            TimeKernel::ExpDecay { scale, rate } => {
                if !scale.is_finite() || *scale < 0.0 || !rate.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "exponential time kernel needs finite scale >= 0 and finite rate, \
                         got scale = {}, rate = {}",
                        scale, rate
                    )));
                }
            }
            TimeKernel::PiecewiseConstant { breaks, values } => {
                if values.len() != breaks.len() + 1 {
                    return Err(Error::InvalidModel(format!(
                        "piecewise kernel needs exactly one more value than breaks, \
                         got {} breaks and {} values",
                        breaks.len(),
                        values.len()
                    )));
                }
                if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite())
                {
                    return Err(Error::InvalidModel(
                        "piecewise kernel breaks must be finite and strictly increasing".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidModel(
                        "piecewise kernel values must be finite and >= 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            TimeKernel::Constant(v) => *v,
            TimeKernel::ExpDecay { scale, rate } => scale * (-rate * s).exp(),
            TimeKernel::PiecewiseConstant { breaks, values } => {
                let idx = breaks.partition_point(|b| *b <= s);
                values[idx]
            }
        }
    }

    /// ∫_a^b σ(s) ds in closed form (a ≤ b).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            TimeKernel::Constant(v) => v * (b - a),
            TimeKernel::ExpDecay { scale, rate } => {
                if *rate == 0.0 {
                    scale * (b - a)
                } else {
                    // scale/rate·(e^{−rate a} − e^{−rate b}), written to stay
                    // accurate when rate·(b−a) is small.
                    scale * (-rate * a).exp() * (-(-(rate) * (b - a)).exp_m1()) / rate
                }
            }
            TimeKernel::PiecewiseConstant { breaks, values } => {
                let mut total = 0.0;
                let mut lo = a;
                for (i, brk) in breaks.iter().enumerate() {
                    if *brk <= lo {
                        continue;
                    }
                    if *brk >= b {
                        break;
                    }
                    total += values[i.min(values.len() - 1)] * (brk - lo);
                    lo = *brk;
                }
                let idx = breaks.partition_point(|x| *x <= lo);
                total + values[idx] * (b - lo)
            }
        }
    }

    /// Interior discontinuity points strictly inside (a, b), ascending.
    pub(crate) fn breakpoints_within(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            TimeKernel::PiecewiseConstant { breaks, .. } => breaks
                .iter()
                .copied()
                .filter(|x| *x > a && *x < b)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Supremum of σ over [a, b].
    #[cfg(test)]
    pub(crate) fn sup_on(&self, a: f64, b: f64) -> f64 {
        match self {
            TimeKernel::Constant(v) => *v,
            TimeKernel::ExpDecay { scale, rate } => {
                // Monotone in s: the sup sits at whichever endpoint the sign
                // of the rate favours.
                if *rate >= 0.0 {
                    scale * (-rate * a).exp()
                } else {
                    scale * (-rate * b).exp()
                }
            }
            TimeKernel::PiecewiseConstant { breaks, values } => {
                let mut sup = self.eval(a).max(self.eval(b));
                for (i, brk) in breaks.iter().enumerate() {
                    if *brk > a && *brk < b {
                        sup = sup.max(values[i + 1]).max(values[i]);
                    }
                }
                sup
            }
        }
    }
}

/// Space-time kernel σ(s, z) for the Lévy-driven hazard.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceTimeKernel {
    /// σ(s,z) = time(s): every jump contributes the same time-dependent
    /// amount regardless of its mark. Only meaningful with finite-activity
    /// densities, since the contribution does not vanish as z → 0.
    TimeOnly(TimeKernel),
    /// σ(s,z) = z · time(s): mark-proportional contribution.
    ZTimes(TimeKernel),
}

impl SpaceTimeKernel {
    pub fn validate(&self) -> Result<()> {
        self.time_part().validate()
    }

    pub fn eval(&self, s: f64, z: f64) -> f64 {
        match self {
            SpaceTimeKernel::TimeOnly(k) => k.eval(s),
            SpaceTimeKernel::ZTimes(k) => z * k.eval(s),
        }
    }

    pub(crate) fn time_part(&self) -> &TimeKernel {
        match self {
            SpaceTimeKernel::TimeOnly(k) | SpaceTimeKernel::ZTimes(k) => k,
        }
    }

    pub(crate) fn is_mark_proportional(&self) -> bool {
        matches!(self, SpaceTimeKernel::ZTimes(_))
    }
}

/// Lévy density ν(z) on z > 0.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyDensity {
    /// ν(z) = c·z^{−1−y}·e^{−m·z} — the tempered-stable family; requires
    /// c > 0, m > 0, y < 1. Infinite activity for y ≥ 0, finite for y < 0.
    Cmy { c: f64, m: f64, y: f64 },
    /// ν(z) = coeff·e^{−rate·z} — a finite-activity exponential density.
    ScaledExp { coeff: f64, rate: f64 },
}

impl LevyDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyDensity::Cmy { c, m, y } => {
                if !(c.is_finite() && *c > 0.0 && m.is_finite() && *m > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "tempered-stable density needs C > 0 and M > 0, got C = {}, M = {}",
                        c, m
                    )));
                }
                if !(y.is_finite() && *y < 1.0) {
                    return Err(Error::InvalidModel(format!(
                        "tempered-stable density needs Y < 1, got Y = {}",
                        y
                    )));
                }
            }
            LevyDensity::ScaledExp { coeff, rate } => {
                if !(coeff.is_finite() && *coeff > 0.0 && rate.is_finite() && *rate > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "exponential density needs coeff > 0 and rate > 0, got coeff = {}, \
                         rate = {}",
                        coeff, rate
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        match self {
            LevyDensity::Cmy { c, m, y } => c * z.powf(-1.0 - y) * (-m * z).exp(),
            LevyDensity::ScaledExp { coeff, rate } => coeff * (-rate * z).exp(),
        }
    }

    /// Whether ν has finite total mass on (0, ∞).
    pub(crate) fn is_finite_activity(&self) -> bool {
        match self {
            LevyDensity::Cmy { y, .. } => *y < 0.0,
            LevyDensity::ScaledExp { .. } => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_decay_integral_matches_antiderivative() {
        let k = TimeKernel::ExpDecay {
            scale: 2.0,
            rate: 0.7,
        };
        let expect = 2.0 / 0.7 * ((-0.7f64 * 0.3).exp() - (-0.7f64 * 1.4).exp());
        assert_relative_eq!(k.integral(0.3, 1.4), expect, max_relative = 1e-14);
        // Tiny-rate regime stays accurate.
        let flat = TimeKernel::ExpDecay {
            scale: 1.0,
            rate: 1e-13,
        };
        assert_relative_eq!(flat.integral(0.0, 2.0), 2.0, max_relative = 1e-10);
    }

    #[test]
    fn piecewise_eval_and_integral() {
        let k = TimeKernel::PiecewiseConstant {
            breaks: vec![1.0, 2.0],
            values: vec![3.0, 5.0, 1.0],
        };
        assert_eq!(k.eval(0.5), 3.0);
        assert_eq!(k.eval(1.0), 5.0);
        assert_eq!(k.eval(1.99), 5.0);
        assert_eq!(k.eval(2.0), 1.0);
        // ∫_{0.5}^{2.5} = 3·0.5 + 5·1 + 1·0.5 = 7
        assert_relative_eq!(k.integral(0.5, 2.5), 7.0, max_relative = 1e-14);
        // Sub-piece span.
        assert_relative_eq!(k.integral(1.2, 1.8), 3.0, max_relative = 1e-14);
        assert_eq!(k.breakpoints_within(0.5, 2.5), vec![1.0, 2.0]);
        assert_eq!(k.breakpoints_within(1.0, 2.0), Vec::<f64>::new());
        assert_eq!(k.sup_on(0.0, 3.0), 5.0);
        assert_eq!(k.sup_on(2.1, 3.0), 1.0);
    }

    #[test]
    fn invalid_kernels_rejected() {
        assert!(TimeKernel::Constant(-1.0).validate().is_err());
        assert!(TimeKernel::PiecewiseConstant {
            breaks: vec![2.0, 1.0],
            values: vec![1.0, 1.0, 1.0],
        }
        .validate()
        .is_err());
        assert!(TimeKernel::PiecewiseConstant {
            breaks: vec![1.0],
            values: vec![1.0],
        }
        .validate()
        .is_err());
        assert!(LevyDensity::Cmy {
            c: 1.0,
            m: 2.0,
            y: 1.0,
        }
        .validate()
        .is_err());
        assert!(LevyDensity::ScaledExp {
            coeff: 1.0,
            rate: 0.0,
        }
        .validate()
        .is_err());
    }

    #[test]
    fn exp_decay_sup_respects_rate_sign() {
        let dec = TimeKernel::ExpDecay {
            scale: 1.0,
            rate: 2.0,
        };
        assert_relative_eq!(dec.sup_on(0.5, 1.5), (-1.0f64).exp(), max_relative = 1e-14);
        let grow = TimeKernel::ExpDecay {
            scale: 1.0,
            rate: -2.0,
        };
        assert_relative_eq!(grow.sup_on(0.5, 1.5), (3.0f64).exp(), max_relative = 1e-14);
    }
}
