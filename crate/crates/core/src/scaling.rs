//! Sweeps over `N`, growth fits and checks of the entropy bounds.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::spectral_set::{CantorSpec, TorusIntervalSet, MERGE_TOLERANCE};
use crate::symbol::{SymbolCoefficients, SymbolFunction};
use crate::toeplitz::{purity_proxy_direct, ToeplitzRestriction};

/// Slack on subadditivity and monotonicity gaps (eigensolver noise).
pub const GAP_TOLERANCE: f64 = 1e-9;
/// Largest Cantor depth the policy will hand out.
pub const MAX_CANTOR_DEPTH: u32 = 60;
/// Default largest `N` computed by eigendecomposition.
pub const DEFAULT_EIGEN_CAP: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    /// `S_N` by eigendecomposition; fails above the eigensolve cap.
    Entropy,
    /// `P_N` only, in `O(N)`.
    Proxy,
    /// `S_N` up to the cap, `P_N` everywhere.
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub n: usize,
    /// `S_N` in nats, absent for proxy-only points.
    pub entropy: Option<f64>,
    /// `P_N = Tr Q_N(1 − Q_N)`.
    pub proxy: f64,
    /// Filled in by callers that time the work; zero otherwise.
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanFailure {
    pub n: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    pub failures: Vec<ScanFailure>,
}

/// Geometric grid `n_min · ratio^k`, rounded, deduplicated, ending at `n_max`.
pub fn geometric_grid(n_min: usize, n_max: usize, ratio: f64) -> Result<Vec<usize>> {
    if n_min == 0 || n_max < n_min || !(ratio > 1.0) || !ratio.is_finite() {
        return Err(Error::InvalidGrid);
    }
    let mut grid = Vec::new();
    let mut x = n_min as f64;
    while x <= n_max as f64 * (1.0 + 1e-12) {
        let n = (libm::round(x) as usize).min(n_max);
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        x *= ratio;
    }
    if grid.last() != Some(&n_max) {
        grid.push(n_max);
    }
    Ok(grid)
}

fn validate_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

/// One scan point from cached coefficients (must reach index `n − 1`).
pub fn scan_point(coeffs: &SymbolCoefficients, n: usize, mode: ScanMode, eigen_cap: usize) -> Result<ScanRecord> {
    let want_entropy = match mode {
        ScanMode::Proxy => false,
        ScanMode::Entropy if n > eigen_cap => return Err(Error::EigenCapExceeded { n, cap: eigen_cap }),
        ScanMode::Entropy => true,
        ScanMode::Both => n <= eigen_cap,
    };
    let entropy = if want_entropy {
        Some(ToeplitzRestriction::from_coefficients(coeffs, n)?.entropy()?.entropy)
    } else {
        None
    };
    let mut proxy = purity_proxy_direct(coeffs, n)?;
    if proxy < 0.0 && proxy > -GAP_TOLERANCE {
        proxy = 0.0;
    }
    Ok(ScanRecord { n, entropy, proxy, wall_ms: 0.0 })
}

/// Sequential scan; per-`N` failures are collected and the scan continues.
pub fn scan(symbol: &SymbolFunction, grid: &[usize], mode: ScanMode, eigen_cap: usize) -> Result<ScanOutcome> {
    validate_grid(grid)?;
    let coeffs = symbol.coefficients(grid[grid.len() - 1]);
    let mut outcome = ScanOutcome::default();
    for &n in grid {
        match scan_point(&coeffs, n, mode, eigen_cap) {
            Ok(r) => outcome.records.push(r),
            Err(error) => outcome.failures.push(ScanFailure { n, error }),
        }
    }
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthModel {
    /// `value ≈ c N^α`, fitted as `log value` against `log N`.
    Power,
    /// `value ≈ c log N + b`.
    Log,
    /// `value ≈ c (log N)² + d log N + b`.
    LogSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Entropy,
    Proxy,
}

/// Inclusive range of `N` used by a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitWindow {
    pub n_min: usize,
    pub n_max: usize,
}

impl FitWindow {
    pub const fn new(n_min: usize, n_max: usize) -> Self {
        Self { n_min, n_max }
    }

    pub fn contains(&self, n: usize) -> bool {
        self.n_min <= n && n <= self.n_max
    }
}

impl Default for FitWindow {
    /// Drops `N < 16`.
    fn default() -> Self {
        Self { n_min: 16, n_max: usize::MAX }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitParams {
    Power { prefactor: f64, exponent: f64 },
    Log { slope: f64, intercept: f64 },
    LogSquared { quadratic: f64, linear: f64, intercept: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub params: FitParams,
    /// RMS residual in the transformed coordinates.
    pub residual_rms: f64,
    pub r_squared: f64,
    /// Smallest and largest `N` actually used.
    pub window: FitWindow,
    pub points: usize,
    /// `(√(N_i N_{i+1}), slope)` between consecutive points, transformed coordinates.
    pub local_slopes: Vec<(f64, f64)>,
}

impl ExponentFit {
    pub fn model(&self) -> GrowthModel {
        match self.params {
            FitParams::Power { .. } => GrowthModel::Power,
            FitParams::Log { .. } => GrowthModel::Log,
            FitParams::LogSquared { .. } => GrowthModel::LogSquared,
        }
    }

    pub fn predict(&self, n: f64) -> f64 {
        let l = libm::log(n);
        match self.params {
            FitParams::Power { prefactor, exponent } => prefactor * libm::pow(n, exponent),
            FitParams::Log { slope, intercept } => slope * l + intercept,
            FitParams::LogSquared { quadratic, linear, intercept } => quadratic * l * l + linear * l + intercept,
        }
    }
}

/// Solves the small dense system `a x = b` by Gaussian elimination with partial pivoting.
fn solve_dense<const D: usize>(mut a: [[f64; D]; D], mut b: [f64; D]) -> [f64; D] {
    for col in 0..D {
        let pivot = (col..D).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..D {
            let factor = a[row][col] / a[col][col];
            for k in col..D {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; D];
    for row in (0..D).rev() {
        let s: f64 = (row + 1..D).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Least squares on `(N, value)` pairs in the model's transformed coordinates.
pub fn fit_points(points: &[(usize, f64)], model: GrowthModel, window: FitWindow) -> Result<ExponentFit> {
    let mut pts: Vec<(usize, f64)> = points.iter().copied().filter(|p| window.contains(p.0)).collect();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by_key(|p| p.0);
    if pts.len() < 4 {
        return Err(Error::DegenerateWindow { n_min: window.n_min, n_max: window.n_max, count: pts.len() });
    }
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::DegenerateWindow { n_min: window.n_min, n_max: window.n_max, count: 0 });
    }
    if model == GrowthModel::Power {
        if let Some(p) = pts.iter().find(|p| !(p.1 > 0.0)) {
            return Err(Error::NonPositiveValue { n: p.0, value: p.1 });
        }
    }

    let x: Vec<f64> = pts.iter().map(|p| libm::log(p.0 as f64)).collect();
    let y: Vec<f64> = match model {
        GrowthModel::Power => pts.iter().map(|p| libm::log(p.1)).collect(),
        _ => pts.iter().map(|p| p.1).collect(),
    };
    let count = x.len() as f64;
    let x_mean = x.iter().sum::<f64>() / count;
    let y_mean = y.iter().sum::<f64>() / count;
    let u: Vec<f64> = x.iter().map(|v| v - x_mean).collect();

    let (params, fitted): (FitParams, Vec<f64>) = match model {
        GrowthModel::Power | GrowthModel::Log => {
            let sxx: f64 = u.iter().map(|v| v * v).sum();
            let sxy: f64 = u.iter().zip(&y).map(|(a, b)| a * (b - y_mean)).sum();
            let slope = sxy / sxx;
            let intercept = y_mean - slope * x_mean;
            let fitted = x.iter().map(|v| slope * v + intercept).collect();
            let params = if model == GrowthModel::Power {
                FitParams::Power { prefactor: libm::exp(intercept), exponent: slope }
            } else {
                FitParams::Log { slope, intercept }
            };
            (params, fitted)
        }
        GrowthModel::LogSquared => {
            // y = α u² + β u + γ in the centred variable, then expand back.
            let mut ata = [[0.0; 3]; 3];
            let mut aty = [0.0; 3];
            for (&ui, &yi) in u.iter().zip(&y) {
                let row = [ui * ui, ui, 1.0];
                for r in 0..3 {
                    for c in 0..3 {
                        ata[r][c] += row[r] * row[c];
                    }
                    aty[r] += row[r] * yi;
                }
            }
            let [alpha, beta, gamma] = solve_dense(ata, aty);
            let fitted = u.iter().map(|v| alpha * v * v + beta * v + gamma).collect();
            let params = FitParams::LogSquared {
                quadratic: alpha,
                linear: beta - 2.0 * alpha * x_mean,
                intercept: alpha * x_mean * x_mean - beta * x_mean + gamma,
            };
            (params, fitted)
        }
    };

    let ss_res: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    let abscissa = |xi: f64| if model == GrowthModel::LogSquared { xi * xi } else { xi };
    let local_slopes = (0..pts.len() - 1)
        .map(|i| {
            let mid = libm::sqrt(pts[i].0 as f64 * pts[i + 1].0 as f64);
            (mid, (y[i + 1] - y[i]) / (abscissa(x[i + 1]) - abscissa(x[i])))
        })
        .collect();

    Ok(ExponentFit {
        params,
        residual_rms: libm::sqrt(ss_res / count),
        r_squared,
        window: FitWindow::new(pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
        local_slopes,
    })
}

/// Fits one quantity of a scan; records lacking the quantity are skipped.
pub fn fit_exponent(records: &[ScanRecord], quantity: Quantity, model: GrowthModel, window: FitWindow) -> Result<ExponentFit> {
    let points: Vec<(usize, f64)> = records
        .iter()
        .filter_map(|r| match quantity {
            Quantity::Entropy => r.entropy.map(|s| (r.n, s)),
            Quantity::Proxy => Some((r.n, r.proxy)),
        })
        .collect();
    fit_points(&points, model, window)
}

/// Growth exponent `log 2 / (−log q)` of the Cantor-like family.
pub fn predicted_alpha(spec: &CantorSpec) -> f64 {
    LN_2 / -libm::log(spec.q())
}

/// Entropy of the restriction of `χ_K`.
pub fn set_entropy(set: &TorusIntervalSet, n: usize) -> Result<f64> {
    Ok(ToeplitzRestriction::from_symbol(&SymbolFunction::indicator(set), n)?.entropy()?.entropy)
}

/// `S_N(K₁) + S_N(K₂) − S_N(K₁ ∪ K₂)` for disjoint sets; nonnegative up to noise.
pub fn check_subadditivity(first: &TorusIntervalSet, second: &TorusIntervalSet, n: usize) -> Result<f64> {
    let overlap = first.intersection_measure(second);
    if overlap > MERGE_TOLERANCE {
        return Err(Error::NotDisjoint { overlap });
    }
    let union = first.union(second);
    Ok(set_entropy(first, n)? + set_entropy(second, n)? - set_entropy(&union, n)?)
}

/// True iff `S_N` never drops by more than [`GAP_TOLERANCE`] along increasing `N`.
pub fn check_monotonicity(records: &[ScanRecord]) -> Result<bool> {
    let mut pts = Vec::with_capacity(records.len());
    for r in records {
        pts.push((r.n, r.entropy.ok_or(Error::MissingEntropy { n: r.n })?));
    }
    pts.sort_by_key(|p| p.0);
    Ok(pts.windows(2).all(|w| w[1].1 >= w[0].1 - GAP_TOLERANCE))
}

/// Empirical constants of the two-sided envelope
/// `c₁ log N ≤ S_N ≤ c₃ (log N)²` and of `P_N ≤ S_N ≤ 1 + c log N · P_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// Largest `c₁` with `S_N ≥ c₁ log N` on the window.
    pub lower_log: f64,
    /// Smallest `c₃` with `S_N ≤ c₃ (log N)²` on the window.
    pub upper_log_squared: f64,
    /// Smallest `c ≥ 0` with `S_N ≤ 1 + c log N · P_N` (infinite if none).
    pub proxy_bound: f64,
    pub proxy_below_entropy: bool,
    pub points: usize,
}

impl EnvelopeReport {
    /// Positive `c₁`, finite `c₃` and `P_N ≤ S_N` throughout.
    pub fn holds(&self) -> bool {
        self.lower_log > 0.0 && self.upper_log_squared.is_finite() && self.proxy_below_entropy
    }
}

/// Envelope constants over records with `N ≥ max(2, n_min)` that carry `S_N`.
pub fn bound_envelope(records: &[ScanRecord], n_min: usize) -> Result<EnvelopeReport> {
    let floor = n_min.max(2);
    let usable: Vec<(f64, f64, f64)> = records
        .iter()
        .filter(|r| r.n >= floor)
        .filter_map(|r| r.entropy.map(|s| (libm::log(r.n as f64), s, r.proxy)))
        .collect();
    if usable.is_empty() {
        return Err(Error::DegenerateWindow { n_min: floor, n_max: usize::MAX, count: 0 });
    }
    let mut report = EnvelopeReport {
        lower_log: f64::INFINITY,
        upper_log_squared: 0.0,
        proxy_bound: 0.0,
        proxy_below_entropy: true,
        points: usable.len(),
    };
    for &(l, s, p) in &usable {
        report.lower_log = report.lower_log.min(s / l);
        report.upper_log_squared = report.upper_log_squared.max(s / (l * l));
        if p > s + 1e-12 {
            report.proxy_below_entropy = false;
        }
        if s > 1.0 {
            let need = if p > 0.0 { (s - 1.0) / (l * p) } else { f64::INFINITY };
            report.proxy_bound = report.proxy_bound.max(need);
        }
    }
    Ok(report)
}

/// Smallest depth with `ℓ_h(depth + 1) < 1/(2 N_max)`: every hole at or above
/// the resolution scale `1/(2N)` is generated.
pub fn cantor_depth_policy(spec: &CantorSpec, n_max: usize) -> Result<u32> {
    depth_for_scale(spec, 1.0 / (2.0 * n_max.max(1) as f64))
}

/// Depth at which the omitted holes change `P_{N_max}` by a relative amount
/// of order `rel_error`.
///
/// A hole of length `h ≪ 1/N` adds about `N h` to `P_N`, so the holes beyond
/// depth `d` add about `N · Σ_{m>d} 2^{m−1} a q^m`. Against `P_N ∝ N^α` this is
/// of order `(N q^d)^{1−α}`, which [`cantor_depth_policy`] leaves at O(1) when
/// `N = N_max`. Here the resolution scale is shrunk by `rel_error^{1/(1−α)}`.
pub fn cantor_depth_for_accuracy(spec: &CantorSpec, n_max: usize, rel_error: f64) -> Result<u32> {
    if !(rel_error > 0.0 && rel_error <= 1.0) {
        return Err(Error::InvalidTruncationError(rel_error));
    }
    let alpha = predicted_alpha(spec);
    let shrink = libm::pow(rel_error, 1.0 / (1.0 - alpha));
    depth_for_scale(spec, shrink / (2.0 * n_max.max(1) as f64))
}

fn depth_for_scale(spec: &CantorSpec, scale: f64) -> Result<u32> {
    (0..=MAX_CANTOR_DEPTH)
        .find(|&d| spec.hole_length(d + 1) < scale)
        .ok_or(Error::DepthCapExceeded { cap: MAX_CANTOR_DEPTH })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn half() -> SymbolFunction {
        SymbolFunction::indicator(&TorusIntervalSet::canonicalize(&[(0.0, 0.5)]).unwrap())
    }

    fn set(raw: &[(f64, f64)]) -> TorusIntervalSet {
        TorusIntervalSet::canonicalize(raw).unwrap()
    }

    #[test]
    fn grid_is_geometric_and_deduplicated() {
        assert_eq!(
            geometric_grid(8, 2048, core::f64::consts::SQRT_2).unwrap(),
            vec![8, 11, 16, 23, 32, 45, 64, 91, 128, 181, 256, 362, 512, 724, 1024, 1448, 2048]
        );
        assert_eq!(geometric_grid(1, 5, core::f64::consts::SQRT_2).unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(geometric_grid(3, 3, 2.0).unwrap(), vec![3]);
        assert!(geometric_grid(0, 8, 2.0).is_err());
        assert!(geometric_grid(4, 8, 1.0).is_err());
    }

    #[test]
    fn scan_examples() {
        let out = scan(&half(), &[1, 2], ScanMode::Entropy, DEFAULT_EIGEN_CAP).unwrap();
        assert!(out.failures.is_empty());
        assert_abs_diff_eq!(out.records[0].entropy.unwrap(), LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.records[1].entropy.unwrap(), 0.947_893_3, epsilon = 1e-5);

        let full = SymbolFunction::indicator(&TorusIntervalSet::full());
        let out = scan(&full, &[1, 10, 100], ScanMode::Proxy, DEFAULT_EIGEN_CAP).unwrap();
        assert!(out.records.iter().all(|r| r.proxy == 0.0 && r.entropy.is_none()));

        let out = scan(&half(), &[8, 16, 32], ScanMode::Both, DEFAULT_EIGEN_CAP).unwrap();
        assert!(out.records.iter().all(|r| r.proxy <= r.entropy.unwrap()));
    }

    #[test]
    fn scan_records_failures_and_continues() {
        let out = scan(&half(), &[4, 8, 16], ScanMode::Entropy, 8).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.failures, vec![ScanFailure { n: 16, error: Error::EigenCapExceeded { n: 16, cap: 8 } }]);
        let both = scan(&half(), &[4, 8, 16], ScanMode::Both, 8).unwrap();
        assert_eq!(both.records.len(), 3);
        assert!(both.records[2].entropy.is_none());
        assert!(scan(&half(), &[4, 4], ScanMode::Proxy, 8).is_err());
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<(usize, f64)> {
        geometric_grid(16, 4096, 1.5).unwrap().into_iter().map(|n| (n, f(n as f64))).collect()
    }

    #[test]
    fn fits_recover_exact_models() {
        let power = fit_points(&synthetic(|n| libm::sqrt(n)), GrowthModel::Power, FitWindow::default()).unwrap();
        let FitParams::Power { prefactor, exponent } = power.params else { panic!() };
        assert_abs_diff_eq!(exponent, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(prefactor, 1.0, epsilon = 1e-10);
        assert!(power.residual_rms < 1e-10);
        assert!(power.local_slopes.iter().all(|s| (s.1 - 0.5).abs() < 1e-10));

        let log = fit_points(&synthetic(|n| 3.0 * libm::log(n) + 1.0), GrowthModel::Log, FitWindow::default()).unwrap();
        let FitParams::Log { slope, intercept } = log.params else { panic!() };
        assert_abs_diff_eq!(slope, 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(intercept, 1.0, epsilon = 1e-10);
        assert!(log.residual_rms < 1e-10);
        assert_abs_diff_eq!(log.r_squared, 1.0, epsilon = 1e-12);

        let sq = synthetic(|n| 0.7 * libm::log(n) * libm::log(n) - 2.0);
        let fit = fit_points(&sq, GrowthModel::LogSquared, FitWindow::default()).unwrap();
        let FitParams::LogSquared { quadratic, linear, intercept } = fit.params else { panic!() };
        assert_abs_diff_eq!(quadratic, 0.7, epsilon = 1e-10);
        assert_abs_diff_eq!(linear, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(intercept, -2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.predict(100.0), 0.7 * libm::log(100.0).powi(2) - 2.0, epsilon = 1e-9);
    }

    #[test]
    fn fit_window_and_errors() {
        let pts = synthetic(|n| n);
        let fit = fit_points(&pts, GrowthModel::Power, FitWindow::new(100, 1000)).unwrap();
        assert!(fit.window.n_min >= 100 && fit.window.n_max <= 1000);
        assert!(matches!(
            fit_points(&pts, GrowthModel::Power, FitWindow::new(16, 30)),
            Err(Error::DegenerateWindow { .. })
        ));
        let zeros: Vec<(usize, f64)> = pts.iter().map(|p| (p.0, 0.0)).collect();
        assert!(matches!(fit_points(&zeros, GrowthModel::Power, FitWindow::default()), Err(Error::NonPositiveValue { .. })));
        let flat = fit_points(&zeros, GrowthModel::Log, FitWindow::default()).unwrap();
        assert_eq!(flat.r_squared, 1.0);
    }

    #[test]
    fn predicted_alpha_examples() {
        let alpha = |q: f64| predicted_alpha(&CantorSpec::new(q, 1e-7, 0).unwrap());
        assert_abs_diff_eq!(alpha(0.25), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(alpha(1.0 / 3.0), 0.630_929_753_571_457_4, epsilon = 1e-15);
        assert!(alpha(0.499_999) > 0.99999);
    }

    #[test]
    fn subadditivity_examples() {
        let gap = check_subadditivity(&set(&[(0.0, 0.25)]), &set(&[(0.5, 0.75)]), 8).unwrap();
        assert!(gap >= 0.0);
        let k = set(&[(0.1, 0.4), (0.7, 0.8)]);
        assert_eq!(check_subadditivity(&k, &TorusIntervalSet::empty(), 16).unwrap(), 0.0);
        assert!(matches!(
            check_subadditivity(&set(&[(0.0, 0.5)]), &set(&[(0.4, 0.6)]), 4),
            Err(Error::NotDisjoint { .. })
        ));
    }

    #[test]
    fn monotonicity_examples() {
        let grid: Vec<usize> = (1..=32).collect();
        let out = scan(&half(), &grid, ScanMode::Entropy, DEFAULT_EIGEN_CAP).unwrap();
        assert!(check_monotonicity(&out.records).unwrap());

        let c = SymbolFunction::constant(0.5).unwrap();
        let out = scan(&c, &grid, ScanMode::Entropy, DEFAULT_EIGEN_CAP).unwrap();
        assert!(out.records.windows(2).all(|w| w[1].entropy.unwrap() > w[0].entropy.unwrap()));
        assert!(check_monotonicity(&out.records).unwrap());

        let full = SymbolFunction::indicator(&TorusIntervalSet::full());
        let out = scan(&full, &grid, ScanMode::Entropy, DEFAULT_EIGEN_CAP).unwrap();
        assert!(out.records.iter().all(|r| r.entropy == Some(0.0)));
        assert!(check_monotonicity(&out.records).unwrap());

        let dropping = [
            ScanRecord { n: 1, entropy: Some(1.0), proxy: 0.1, wall_ms: 0.0 },
            ScanRecord { n: 2, entropy: Some(0.5), proxy: 0.1, wall_ms: 0.0 },
        ];
        assert!(!check_monotonicity(&dropping).unwrap());
        let missing = [ScanRecord { n: 3, entropy: None, proxy: 0.1, wall_ms: 0.0 }];
        assert_eq!(check_monotonicity(&missing), Err(Error::MissingEntropy { n: 3 }));
    }

    #[test]
    fn envelope_on_synthetic_log_data() {
        let records: Vec<ScanRecord> = geometric_grid(8, 4096, 2.0)
            .unwrap()
            .into_iter()
            .map(|n| ScanRecord { n, entropy: Some(libm::log(n as f64)), proxy: 0.5, wall_ms: 0.0 })
            .collect();
        let env = bound_envelope(&records, 8).unwrap();
        assert_abs_diff_eq!(env.lower_log, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(env.upper_log_squared, 1.0 / libm::log(8.0), epsilon = 1e-15);
        assert!(env.holds());
    }

    #[test]
    fn envelope_on_half_interval() {
        let grid = geometric_grid(8, 256, 2.0).unwrap();
        let out = scan(&half(), &grid, ScanMode::Both, DEFAULT_EIGEN_CAP).unwrap();
        let env = bound_envelope(&out.records, 8).unwrap();
        assert!(env.holds());
        assert!(env.proxy_bound <= 2.0);
    }

    #[test]
    fn depth_policy_brackets_resolution_scale() {
        for (q, a, n_max) in [(0.25, 1.0, 1usize << 14), (0.25, 1.0, 1), (0.49, 0.04, 1024), (1.0 / 3.0, 1.0, 1 << 16)] {
            let spec = CantorSpec::new(q, a, 0).unwrap();
            let depth = cantor_depth_policy(&spec, n_max).unwrap();
            let scale = 1.0 / (2.0 * n_max as f64);
            assert!(spec.hole_length(depth + 1) < scale);
            if depth > 0 {
                assert!(spec.hole_length(depth) >= scale);
            }
        }
        let quarter = CantorSpec::new(0.25, 1.0, 0).unwrap();
        assert_eq!(cantor_depth_policy(&quarter, 1 << 14).unwrap(), 7);
        assert_eq!(cantor_depth_policy(&quarter, 1).unwrap(), 0);
        let slow = CantorSpec::new(0.49, 0.04, 0).unwrap();
        assert_eq!(cantor_depth_policy(&slow, 1 << 14).unwrap(), 10);
        let wide = CantorSpec::new(0.45, 0.2, 0).unwrap();
        assert_eq!(depth_for_scale(&wide, 1e-40), Err(Error::DepthCapExceeded { cap: MAX_CANTOR_DEPTH }));
    }

    #[test]
    fn accuracy_depth_examples() {
        let quarter = CantorSpec::new(0.25, 1.0, 0).unwrap();
        let third = CantorSpec::new(1.0 / 3.0, 0.5, 0).unwrap();
        assert_eq!(cantor_depth_for_accuracy(&quarter, 1 << 14, 0.1).unwrap(), 10);
        assert_eq!(cantor_depth_for_accuracy(&third, 1 << 14, 0.1).unwrap(), 14);
        for spec in [quarter, third] {
            assert_eq!(cantor_depth_for_accuracy(&spec, 1000, 1.0), cantor_depth_policy(&spec, 1000));
            let mut prev = 0;
            for eps in [1.0, 0.5, 0.1, 0.01] {
                let d = cantor_depth_for_accuracy(&spec, 1000, eps).unwrap();
                assert!(d >= prev);
                prev = d;
            }
        }
        assert!(cantor_depth_for_accuracy(&quarter, 16, 0.0).is_err());
        assert!(cantor_depth_for_accuracy(&quarter, 16, 1.5).is_err());
    }

    #[test]
    fn deeper_truncations_barely_move_the_proxy() {
        let n = 512;
        let proxy = |spec: CantorSpec| {
            let f = SymbolFunction::indicator(&spec.generate().unwrap());
            purity_proxy_direct(&f.coefficients(n), n).unwrap()
        };
        let base = CantorSpec::new(0.25, 1.0, 0).unwrap();
        let coarse = proxy(base.with_depth(cantor_depth_policy(&base, n).unwrap()));
        let fine = proxy(base.with_depth(cantor_depth_for_accuracy(&base, n, 0.1).unwrap()));
        let limit = proxy(base.with_depth(cantor_depth_for_accuracy(&base, n, 0.1).unwrap() + 4));
        assert!((fine - limit).abs() / limit < 0.1);
        assert!((coarse - limit).abs() > (fine - limit).abs());
    }
}
