use std::f64::consts::{LN_2, PI};

use entropy_lab_core::kernel::purity_proxy_kernel;
use entropy_lab_core::oracle::density_matrix;
use entropy_lab_core::scaling::{cantor_depth_policy, fit_exponent, scan, FitWindow, GrowthModel, Quantity, ScanMode};
use entropy_lab_core::toeplitz::{default_tail_terms, purity_proxy_direct, purity_proxy_single_interval_series};
use entropy_lab_core::{CantorSpec, SymbolFunction, ToeplitzRestriction, TorusIntervalSet};

#[test]
fn half_interval_end_to_end() {
    let half = TorusIntervalSet::canonicalize(&[(0.0, 0.5)]).unwrap();
    let symbol = SymbolFunction::indicator(&half);

    let r1 = ToeplitzRestriction::from_symbol(&symbol, 1).unwrap().entropy().unwrap();
    assert!((r1.entropy - LN_2).abs() < 1e-12);

    let n = 40;
    let direct = purity_proxy_direct(&symbol.coefficients(n), n).unwrap();
    let kernel = purity_proxy_kernel(&half, n).unwrap();
    let series = purity_proxy_single_interval_series(0.5, n, default_tail_terms(0.5, n)).unwrap();
    assert!((direct - kernel).abs() < 1e-9 * direct);
    assert!((direct - series).abs() < 1e-8);

    let p2 = purity_proxy_direct(&symbol.coefficients(2), 2).unwrap();
    assert!((p2 - (0.5 - 2.0 / (PI * PI))).abs() < 1e-12);

    let rho = density_matrix(&symbol, 3).unwrap();
    let s3 = ToeplitzRestriction::from_symbol(&symbol, 3).unwrap().entropy().unwrap().entropy;
    assert!((rho.vn_entropy().unwrap() - s3).abs() < 1e-10);
}

#[test]
fn cantor_proxy_grows_like_a_power() {
    let base = CantorSpec::new(0.25, 1.0, 0).unwrap();
    let set = base.with_depth(cantor_depth_policy(&base, 1024).unwrap() + 3).generate().unwrap();
    let grid: Vec<usize> = (4..=10).map(|k| 1 << k).collect();
    let outcome = scan(&SymbolFunction::indicator(&set), &grid, ScanMode::Proxy, 0).unwrap();
    assert!(outcome.failures.is_empty());
    let fit = fit_exponent(&outcome.records, Quantity::Proxy, GrowthModel::Power, FitWindow::new(16, 1024)).unwrap();
    let slope = fit.local_slopes.last().unwrap().1;
    assert!(slope > 0.3 && slope < 0.7, "local slope {slope}");
}
