//! The built-in cross-model suite behind `dspp validate`.
//!
//! One entry per model family (two for CMY: the Y = 0.5 case exercises the
//! infinite-variation analytics, the Y = 0 case is cheap enough to carry a
//! Monte Carlo leg at default path counts). Every entry shares the same
//! window grid so reports line up across models.

use crate::config::{
    DensityConfig, McSection, ModelConfig, Route, RunConfig, SpaceKernelConfig, TimeKernelConfig,
};

pub struct SuiteEntry {
    pub label: String,
    pub cfg: RunConfig,
}

pub fn builtin(seed: Option<u64>, paths: Option<usize>) -> Vec<SuiteEntry> {
    let mut mc = McSection::default();
    if let Some(s) = seed {
        mc.seed = s;
    }
    if let Some(p) = paths {
        mc.n_paths = p;
    }

    let base = |label: &str, model: ModelConfig, routes: Vec<Route>| SuiteEntry {
        label: label.to_string(),
        cfg: RunConfig {
            model,
            t: 0.0,
            horizons: vec![0.5, 1.0],
            jump_indices: vec![1, 2, 3],
            routes,
            mc: mc.clone(),
            assert_alive: true,
        },
    };

    let analytic_pair = vec![Route::Bell, Route::Malliavin];
    let bell_mc = vec![Route::Bell, Route::MonteCarlo];

    vec![
        base(
            "CIR",
            ModelConfig::Cir { theta: 1.2, kappa: 1.0, sigma: 0.6, lambda_t: 0.9 },
            bell_mc.clone(),
        ),
        base(
            "GammaOU",
            ModelConfig::GammaOu { theta: 1.0, a: 2.0, b: 3.0, lambda0: 1.0 },
            bell_mc.clone(),
        ),
        base(
            "IGOU",
            ModelConfig::IgOu { theta: 1.0, a: 1.5, b: 2.0, lambda0: 0.8 },
            bell_mc,
        ),
        // Infinite-variation marks: simulating these to certificate accuracy
        // is orders of magnitude more expensive than the analytics, so this
        // entry checks the two analytic routes against each other only.
        base(
            "CMY(Y=0.5)",
            ModelConfig::Cmy {
                c: 1.0,
                m: 2.0,
                y: 0.5,
                sigma: TimeKernelConfig::Constant { value: 1.0 },
                lambda_t: 0.2,
            },
            analytic_pair,
        ),
        base(
            "CMY(Y=0)",
            ModelConfig::Cmy {
                c: 1.0,
                m: 2.0,
                y: 0.0,
                sigma: TimeKernelConfig::Constant { value: 1.0 },
                lambda_t: 0.2,
            },
            Route::all(),
        ),
        base(
            "LevyKernel",
            ModelConfig::LevyKernel {
                sigma: SpaceKernelConfig::ZTimes {
                    time: TimeKernelConfig::ExpDecay { scale: 1.0, rate: 0.5 },
                },
                density: DensityConfig::ScaledExp { coeff: 2.0, rate: 2.0 },
                z_domain: (0.0, None),
                lambda_t: 0.3,
            },
            Route::all(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_validates() {
        for entry in builtin(None, Some(1_000)) {
            entry
                .cfg
                .validate()
                .unwrap_or_else(|e| panic!("catalogue entry {} is invalid: {e}", entry.label));
            assert_eq!(entry.cfg.mc.n_paths, 1_000);
        }
    }

    #[test]
    fn labels_are_unique() {
        let entries = builtin(None, None);
        let mut labels: Vec<_> = entries.iter().map(|e| e.label.clone()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), entries.len());
    }
}
