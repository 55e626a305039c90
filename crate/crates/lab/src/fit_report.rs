//! JSON report of growth fits over a scan table.

use entropy_lab_core::scaling::{fit_exponent, ExponentFit, FitParams, FitWindow, GrowthModel, Quantity, ScanRecord};
use serde::Serialize;
use serde_json::{json, Value};

pub const DEFAULT_ALPHA_TOLERANCE: f64 = 0.1;
pub const DEFAULT_R2_MIN: f64 = 0.995;

const MODELS: [(GrowthModel, &str); 3] =
    [(GrowthModel::Power, "power"), (GrowthModel::Log, "log"), (GrowthModel::LogSquared, "logsq")];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub window: FitWindow,
    pub alpha_tolerance: f64,
    pub r2_min: f64,
    /// Exponent to check the power fits against, when known.
    pub predicted_alpha: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            window: FitWindow::default(),
            alpha_tolerance: DEFAULT_ALPHA_TOLERANCE,
            r2_min: DEFAULT_R2_MIN,
            predicted_alpha: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub json: Value,
    pub checks: Vec<Check>,
    /// False when no quantity had enough points in the window to fit at all.
    pub usable: bool,
}

impl FitReport {
    pub fn passed(&self) -> bool {
        self.usable && self.checks.iter().all(|c| c.passed)
    }
}

fn params_json(params: FitParams) -> Value {
    match params {
        FitParams::Power { prefactor, exponent } => json!({"prefactor": prefactor, "exponent": exponent}),
        FitParams::Log { slope, intercept } => json!({"slope": slope, "intercept": intercept}),
        FitParams::LogSquared { quadratic, linear, intercept } => {
            json!({"quadratic": quadratic, "linear": linear, "intercept": intercept})
        }
    }
}

fn fit_json(fit: &ExponentFit) -> Value {
    json!({
        "params": params_json(fit.params),
        "residual_rms": fit.residual_rms,
        "r_squared": fit.r_squared,
        "window": [fit.window.n_min, fit.window.n_max],
        "points": fit.points,
        "local_slopes": fit.local_slopes.iter().map(|&(n, s)| [n, s]).collect::<Vec<_>>(),
    })
}

fn exponent(fit: &ExponentFit) -> Option<f64> {
    match fit.params {
        FitParams::Power { exponent, .. } => Some(exponent),
        _ => None,
    }
}

pub fn build(records: &[ScanRecord], opts: &FitOptions) -> FitReport {
    let has_entropy = records.iter().any(|r| r.entropy.is_some());
    let quantities: Vec<(Quantity, &str)> = if has_entropy {
        vec![(Quantity::Entropy, "S_N"), (Quantity::Proxy, "P_N")]
    } else {
        vec![(Quantity::Proxy, "P_N")]
    };
    let mut fits = serde_json::Map::new();
    let mut checks = Vec::new();
    let mut usable = false;
    for (quantity, label) in quantities {
        let mut per_model = serde_json::Map::new();
        for (model, name) in MODELS {
            let result = fit_exponent(records, quantity, model, opts.window);
            usable |= result.is_ok();
            per_model.insert(
                name.into(),
                match &result {
                    Ok(fit) => fit_json(fit),
                    Err(e) => json!({"error": e.to_string()}),
                },
            );
            let check = match (model, opts.predicted_alpha) {
                (GrowthModel::Power, Some(alpha)) => Some(check_of(
                    format!("alpha_{label}"),
                    result.as_ref().map(|f| exponent(f).unwrap_or(f64::NAN)),
                    alpha,
                    opts.alpha_tolerance,
                    |v| (v - alpha).abs() <= opts.alpha_tolerance,
                )),
                (GrowthModel::Log, None) if quantity == Quantity::Entropy => Some(check_of(
                    format!("r_squared_log_{label}"),
                    result.as_ref().map(|f| f.r_squared),
                    opts.r2_min,
                    0.0,
                    |v| v >= opts.r2_min,
                )),
                _ => None,
            };
            checks.extend(check);
        }
        fits.insert(label.into(), Value::Object(per_model));
    }
    let passed = usable && checks.iter().all(|c| c.passed);
    let json = json!({
        "entropy_unit": "nats",
        "window": [opts.window.n_min, opts.window.n_max],
        "records": records.len(),
        "predicted_alpha": opts.predicted_alpha,
        "fits": fits,
        "checks": checks,
        "passed": passed,
    });
    FitReport { json, checks, usable }
}

fn check_of(
    name: String,
    value: Result<f64, &entropy_lab_core::Error>,
    target: f64,
    tolerance: f64,
    ok: impl Fn(f64) -> bool,
) -> Check {
    match value {
        Ok(v) => Check { name, value: Some(v), target, tolerance, passed: ok(v), error: None },
        Err(e) => Check { name, value: None, target, tolerance, passed: false, error: Some(e.to_string()) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(f: impl Fn(f64) -> f64, with_entropy: bool) -> Vec<ScanRecord> {
        (3..=11)
            .map(|k| {
                let n = 1usize << k;
                let v = f(n as f64);
                ScanRecord { n, entropy: with_entropy.then_some(v), proxy: 0.5 * v, wall_ms: 0.0 }
            })
            .collect()
    }

    #[test]
    fn power_law_recovered_and_checked() {
        let recs = records(|n| n.powf(0.5), false);
        let opts = FitOptions { predicted_alpha: Some(0.5), ..Default::default() };
        let report = build(&recs, &opts);
        assert!(report.passed());
        let alpha = report.json["fits"]["P_N"]["power"]["params"]["exponent"].as_f64().unwrap();
        assert!((alpha - 0.5).abs() < 1e-10);
        assert_eq!(report.checks.len(), 1);

        let off = FitOptions { predicted_alpha: Some(0.75), ..Default::default() };
        assert!(!build(&recs, &off).passed());
    }

    #[test]
    fn log_growth_passes_r_squared() {
        let recs = records(|n| 3.0 * n.ln() + 1.0, true);
        let report = build(&recs, &FitOptions::default());
        assert!(report.passed());
        let slope = report.json["fits"]["S_N"]["log"]["params"]["slope"].as_f64().unwrap();
        assert!((slope - 3.0).abs() < 1e-10);
        assert_eq!(report.checks[0].name, "r_squared_log_S_N");
    }

    #[test]
    fn empty_window_is_unusable() {
        let recs = records(|n| n, true);
        let opts = FitOptions { window: FitWindow::new(100_000, 200_000), ..Default::default() };
        let report = build(&recs, &opts);
        assert!(!report.usable);
        assert!(!report.passed());
    }
}
