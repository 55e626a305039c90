//! Self-check suites behind the `verify` command.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use entropy_lab_core::kernel::purity_proxy_kernel;
use entropy_lab_core::oracle::density_matrix;
use entropy_lab_core::scaling::{check_monotonicity, check_subadditivity, scan, ScanMode, GAP_TOLERANCE};
use entropy_lab_core::toeplitz::{
    default_tail_terms, entropy_density, eta_tilde, purity_proxy_direct, purity_proxy_single_interval_series,
};
use entropy_lab_core::{CantorSpec, SymbolFunction, ToeplitzRestriction, TorusIntervalSet};
use serde::Serialize;

use crate::random_sets::{random_disjoint_pair, random_interval_set, seeded};

pub const ORACLE_TOLERANCE: f64 = 1e-8;
pub const ROUTE_TOLERANCE: f64 = 1e-6;
pub const SERIES_TOLERANCE: f64 = 1e-8;
pub const ANCHOR_TOLERANCE: f64 = 1e-12;
pub const ETA_GRID_POINTS: usize = 100_000;
pub const ETA_CONSTANT_MAX: f64 = 2.0;

pub const SUITES: [&str; 8] =
    ["oracle", "routes", "series", "anchors", "subadditivity", "monotonicity", "eta_bound", "density"];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    /// Largest error (or most negative gap) seen.
    pub worst: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, passed: true, checks: 0, worst: 0.0, tolerance, constants: BTreeMap::new(), failures: Vec::new() }
    }

    /// Counts an error measurement, failing when it exceeds the tolerance.
    fn error(&mut self, err: f64, label: impl FnOnce() -> String) {
        self.error_within(err, self.tolerance, label);
    }

    fn error_within(&mut self, err: f64, tolerance: f64, label: impl FnOnce() -> String) {
        self.checks += 1;
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
        if !(err <= tolerance) {
            self.fail(format!("{}: error {err:e}", label()));
        }
    }

    /// Counts a gap that must stay above `−tolerance`.
    fn gap(&mut self, gap: f64, label: impl FnOnce() -> String) {
        self.checks += 1;
        if gap.is_nan() || gap < self.worst {
            self.worst = gap;
        }
        if !(gap >= -self.tolerance) {
            self.fail(format!("{}: gap {gap:e}", label()));
        }
    }

    fn require(&mut self, ok: bool, label: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(label());
        }
    }

    fn fail(&mut self, message: String) {
        self.passed = false;
        self.failures.push(message);
    }

    fn guard<T>(&mut self, result: entropy_lab_core::Result<T>, label: impl FnOnce() -> String) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.fail(format!("{}: {e}", label()));
                None
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

fn set(raw: &[(f64, f64)]) -> TorusIntervalSet {
    TorusIntervalSet::canonicalize(raw).expect("literal set is valid")
}

fn toeplitz_entropy(symbol: &SymbolFunction, n: usize) -> entropy_lab_core::Result<(f64, f64)> {
    let r = ToeplitzRestriction::from_symbol(symbol, n)?.entropy()?;
    Ok((r.entropy, r.proxy))
}

/// Brute-force Fock-space entropy against `Tr η̃(Q_n)`.
pub fn oracle_suite(seed: u64, sets: usize, n_max: usize) -> SuiteReport {
    let mut report = SuiteReport::new("oracle", ORACLE_TOLERANCE);
    let mut rng = seeded(seed);
    for i in 0..sets {
        let symbol = SymbolFunction::indicator(&random_interval_set(&mut rng, 3));
        for n in 1..=n_max {
            let label = || format!("set {i}, n={n}");
            let Some(rho) = report.guard(density_matrix(&symbol, n), label) else { continue };
            let Some(oracle) = report.guard(rho.vn_entropy(), label) else { continue };
            let Some((s, _)) = report.guard(toeplitz_entropy(&symbol, n), label) else { continue };
            report.error((oracle - s).abs(), label);
        }
    }
    report
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Direct, kernel and spectral `P_N` agree pairwise (relative error).
pub fn routes_suite(seed: u64, sets: usize, ns: &[usize]) -> SuiteReport {
    let mut report = SuiteReport::new("routes", ROUTE_TOLERANCE);
    let mut rng = seeded(seed.wrapping_add(1));
    for i in 0..sets {
        let k = random_interval_set(&mut rng, 3);
        let symbol = SymbolFunction::indicator(&k);
        for &n in ns {
            let label = || format!("set {i}, N={n}");
            let Some(direct) = report.guard(purity_proxy_direct(&symbol.coefficients(n), n), label) else { continue };
            let Some(kernel) = report.guard(purity_proxy_kernel(&k, n), label) else { continue };
            let Some((_, spectral)) = report.guard(toeplitz_entropy(&symbol, n), label) else { continue };
            let err = relative(direct, kernel).max(relative(direct, spectral)).max(relative(kernel, spectral));
            report.error(err, label);
        }
    }
    report
}

/// Single-interval series identity against the direct route.
pub fn series_suite(measures: &[f64], ns: &[usize]) -> SuiteReport {
    let mut report = SuiteReport::new("series", SERIES_TOLERANCE);
    for &m in measures {
        let symbol = SymbolFunction::indicator(&set(&[(0.2, 0.2 + m)]));
        for &n in ns {
            let label = || format!("|K|={m}, N={n}");
            let Some(direct) = report.guard(purity_proxy_direct(&symbol.coefficients(n), n), label) else { continue };
            let tail = default_tail_terms(m, n);
            let Some(series) = report.guard(purity_proxy_single_interval_series(m, n, tail), label) else { continue };
            report.error((direct - series).abs(), label);
        }
    }
    report
}

/// Closed-form values: `S₁`, `P₂` for `[0, 1/2)` and `N log 2` for the constant symbol.
pub fn anchors_suite() -> SuiteReport {
    let mut report = SuiteReport::new("anchors", ANCHOR_TOLERANCE);
    let half = SymbolFunction::indicator(&set(&[(0.0, 0.5)]));
    if let Some((s1, _)) = report.guard(toeplitz_entropy(&half, 1), || "S_1".into()) {
        report.error((s1 - LN_2).abs(), || "S_1 = log 2".into());
    }
    let p2_want = 0.5 - 2.0 / (PI * PI);
    if let Some(p2) = report.guard(purity_proxy_direct(&half.coefficients(2), 2), || "P_2".into()) {
        report.error((p2 - p2_want).abs(), || "P_2 direct".into());
    }
    if let Some((_, p2)) = report.guard(toeplitz_entropy(&half, 2), || "P_2".into()) {
        report.error((p2 - p2_want).abs(), || "P_2 spectral".into());
    }
    let flat = SymbolFunction::constant(0.5).expect("1/2 is a valid value");
    for n in [1usize, 8, 64] {
        if let Some((s, _)) = report.guard(toeplitz_entropy(&flat, n), || format!("constant N={n}")) {
            report.error_within((s - n as f64 * LN_2).abs(), 1e-9, || format!("constant symbol N={n}"));
        }
    }
    report
}

/// Gaps `S(K₁) + S(K₂) − S(K₁ ∪ K₂)` for random disjoint pairs.
pub fn subadditivity_suite(seed: u64, pairs: usize, ns: &[usize]) -> SuiteReport {
    let mut report = SuiteReport::new("subadditivity", GAP_TOLERANCE);
    let mut rng = seeded(seed.wrapping_add(2));
    for i in 0..pairs {
        let (a, b) = random_disjoint_pair(&mut rng);
        for &n in ns {
            let label = || format!("pair {i}, N={n}");
            if let Some(gap) = report.guard(check_subadditivity(&a, &b, n), label) {
                report.gap(gap, label);
            }
        }
    }
    report
}

/// `S_N` nondecreasing for `[0, 1/2)` and a depth-3 Cantor set, `N = 1..=n_max`.
pub fn monotonicity_suite(n_max: usize) -> SuiteReport {
    let mut report = SuiteReport::new("monotonicity", GAP_TOLERANCE);
    let cantor = CantorSpec::new(0.25, 1.0, 3).and_then(|c| c.generate()).expect("valid Cantor parameters");
    let grid: Vec<usize> = (1..=n_max).collect();
    for (name, k) in [("[0,1/2)", set(&[(0.0, 0.5)])), ("cantor q=1/4 depth 3", cantor)] {
        let symbol = SymbolFunction::indicator(&k);
        let Some(outcome) = report.guard(scan(&symbol, &grid, ScanMode::Entropy, n_max), || name.into()) else {
            continue;
        };
        for f in &outcome.failures {
            report.fail(format!("{name}, N={}: {}", f.n, f.error));
        }
        let values: Vec<f64> = outcome.records.iter().filter_map(|r| r.entropy).collect();
        for w in values.windows(2) {
            report.gap(w[1] - w[0], || name.into());
        }
        if let Some(ok) = report.guard(check_monotonicity(&outcome.records), || name.into()) {
            report.require(ok, || format!("{name}: not monotone"));
        }
    }
    report
}

/// Largest `x(1−x) − η̃(x)` on a uniform grid of `[0, 1]` (should be ≤ 0).
pub fn eta_lower_bound_defect(points: usize) -> f64 {
    grid(points).map(|x| x * (1.0 - x) - eta_tilde(x).expect("grid lies in [0, 1]")).fold(f64::MIN, f64::max)
}

/// Smallest `c ≥ 0` with `η̃(x) ≤ ε − c log ε · x(1−x)` on the grid, `ε = 1/N`.
pub fn smallest_eta_constant(n: usize, points: usize) -> f64 {
    let eps = 1.0 / n as f64;
    let scale = -eps.ln();
    grid(points)
        .filter(|&x| x > 0.0 && x < 1.0)
        .map(|x| (eta_tilde(x).expect("grid lies in [0, 1]") - eps) / (scale * x * (1.0 - x)))
        .fold(0.0, f64::max)
}

fn grid(points: usize) -> impl Iterator<Item = f64> {
    let last = (points - 1) as f64;
    (0..points).map(move |i| i as f64 / last)
}

pub fn eta_bound_suite(points: usize, ns: &[usize]) -> SuiteReport {
    let mut report = SuiteReport::new("eta_bound", 0.0);
    let defect = eta_lower_bound_defect(points);
    report.error(defect.max(0.0), || "x(1-x) <= eta~(x)".into());
    report.constants.insert("lower_bound_defect".into(), defect);
    for &n in ns {
        let c = smallest_eta_constant(n, points);
        report.constants.insert(format!("c_N{n}"), c);
        report.require(c <= ETA_CONSTANT_MAX, || format!("N={n}: smallest c = {c} exceeds {ETA_CONSTANT_MAX}"));
    }
    report
}

/// Entropy density: zero for pure symbols, `log 2` for the constant 1/2.
pub fn density_suite(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("density", 0.0);
    let mut rng = seeded(seed.wrapping_add(3));
    let mut pure = vec![set(&[(0.0, 0.5)]), CantorSpec::new(0.25, 1.0, 5).and_then(|c| c.generate()).expect("valid")];
    pure.extend((0..5).map(|_| random_interval_set(&mut rng, 3)));
    for k in &pure {
        let d = entropy_density(&SymbolFunction::indicator(k));
        report.error(d.abs(), || format!("pure set {:?}", k.intervals()));
    }
    let d = entropy_density(&SymbolFunction::constant(0.5).expect("valid"));
    report.error((d - LN_2).abs(), || "constant 1/2".into());
    report
}

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    Some(match name {
        "oracle" => oracle_suite(seed, 20, 6),
        "routes" => routes_suite(seed, 10, &[4, 16, 64, 256]),
        "series" => series_suite(&[0.1, 0.25, 0.5], &[1, 2, 16, 256, 2048]),
        "anchors" => anchors_suite(),
        "subadditivity" => subadditivity_suite(seed, 20, &[4, 16, 64]),
        "monotonicity" => monotonicity_suite(64),
        "eta_bound" => eta_bound_suite(ETA_GRID_POINTS, &[2, 16, 256]),
        "density" => density_suite(seed),
        _ => return None,
    })
}

/// Runs the named suites (all of [`SUITES`] when `names` is empty).
pub fn run(seed: u64, names: &[String]) -> Result<VerifyReport, String> {
    let selected: Vec<&str> = if names.is_empty() { SUITES.to_vec() } else { names.iter().map(String::as_str).collect() };
    let mut suites = Vec::new();
    for name in selected {
        suites.push(run_suite(name, seed).ok_or_else(|| format!("unknown suite {name:?}; known: {}", SUITES.join(", ")))?);
    }
    Ok(VerifyReport { seed, passed: suites.iter().all(|s| s.passed), suites })
}
