//! Row evaluation and CSV formatting shared by `survival` and `validate`.

use dspp::hazard_models::HazardModelSpec;
use dspp::malliavin_rec::survival_thm2;
use dspp::mc_oracle::{mc_survival, McConfig};
use dspp::survival_bell::survival_thm1;

use crate::config::Route;

/// One output record of the `survival` command.
pub struct Row {
    pub horizon: f64,
    pub n: usize,
    pub route: Route,
    pub probability: f64,
    /// Present only for the Monte Carlo route.
    pub std_error: Option<f64>,
    pub warnings: Vec<String>,
}

pub const SURVIVAL_HEADER: &str = "T,n,route,probability,std_error,warning";

/// Evaluates one (horizon, n, route) cell. The accumulated hazard handed to
/// the Malliavin and Monte Carlo routes is the model's own, which keeps the
/// three routes estimating the same quantity.
pub fn compute_row(
    model: &HazardModelSpec,
    t: f64,
    horizon: f64,
    n: usize,
    route: Route,
    mc: &McConfig,
) -> dspp::Result<Row> {
    match route {
        Route::Bell => {
            let r = survival_thm1(model, t, horizon, n)?;
            Ok(Row {
                horizon,
                n,
                route,
                probability: r.probability,
                std_error: None,
                warnings: r.diagnostics,
            })
        }
        Route::Malliavin => {
            let r = survival_thm2(model, t, horizon, n, model.accumulated_lambda())?;
            Ok(Row {
                horizon,
                n,
                route,
                probability: r.probability,
                std_error: None,
                warnings: r.diagnostics,
            })
        }
        Route::MonteCarlo => {
            let est = mc_survival(model, t, horizon, n, model.accumulated_lambda(), mc)?;
            let mut warnings = Vec::new();
            if est.mean < -1e-9 || est.mean > 1.0 + 1e-9 {
                warnings.push(format!("estimate {:.6e} lies outside [0, 1]", est.mean));
            }
            Ok(Row {
                horizon,
                n,
                route,
                probability: est.mean,
                std_error: Some(est.std_error),
                warnings,
            })
        }
    }
}

/// 12 significant digits; enough to reproduce every comparison made here
/// without dumping full f64 noise into diffs.
pub fn fmt_prob(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn format_row(row: &Row) -> String {
    let se = row.std_error.map(fmt_prob).unwrap_or_default();
    format!(
        "{},{},{},{},{},{}",
        row.horizon,
        row.n,
        row.route.as_str(),
        fmt_prob(row.probability),
        se,
        csv_escape(&row.warnings.join("; "))
    )
}

/// Minimal CSV quoting: only fields containing a delimiter, quote or newline
/// get wrapped, so the common (warning-free) case stays byte-for-byte plain.
pub fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dspp::hazard_models::TimeKernel;

    #[test]
    fn csv_escaping_is_minimal() {
        assert_eq!(csv_escape("plain note"), "plain note");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn probability_format_is_twelve_significant_digits() {
        assert_eq!(fmt_prob(1.0), "1.00000000000e0");
        assert_eq!(fmt_prob(0.9491211733134), "9.49121173313e-1");
    }

    #[test]
    fn analytic_rows_leave_std_error_empty() {
        let model = HazardModelSpec::Cmy {
            c: 1.0,
            m: 2.0,
            y: 0.5,
            sigma_fn: TimeKernel::Constant(1.0),
            lambda_t: 0.6,
        };
        let mc = McConfig::default();
        let row = compute_row(&model, 0.0, 1.0, 3, Route::Bell, &mc).unwrap();
        assert!(row.std_error.is_none());
        let text = format_row(&row);
        assert_eq!(text.split(',').count(), 6);
        assert!(text.starts_with("1,3,bell,"));
    }
}
