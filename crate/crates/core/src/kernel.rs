//! Fejér-kernel route to the quadratic proxy:
//! `Tr Q_N(1 − Q_N) = N ∫_{−1/2}^{1/2} k_N(φ) |K ∖ (K + φ)| dφ`.
//!
//! This is a verification path, independent of the Fourier coefficients.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral_set::TorusIntervalSet;
use crate::symbol::sin_pi;

/// Absolute error target for one kernel integral.
pub const KERNEL_TOLERANCE: f64 = 1e-9;
/// Maximum bisection depth of a panel.
pub const MAX_PANEL_DEPTH: u32 = 40;

const SERIES_CUTOFF: f64 = 1e-8;

/// `k_N(φ) = sin²(Nπφ) / (N sin²(πφ))`, with value `N` at the integers.
pub fn fejer_kernel(n: usize, phi: f64) -> f64 {
    let nf = n as f64;
    let d = phi - libm::round(phi);
    if d.abs() < SERIES_CUTOFF {
        let x = PI * d;
        return nf * (1.0 - (nf * nf - 1.0) * x * x / 3.0);
    }
    let num = sin_pi(nf * d);
    let den = sin_pi(d);
    num * num / (nf * den * den)
}

// 15-point Kronrod rule with embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    value: f64,
    error: f64,
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Panel {
    let (value, error) = kronrod15(f, a, b);
    if error <= tol || depth >= MAX_PANEL_DEPTH || b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
        return Panel { value, error };
    }
    let mid = 0.5 * (a + b);
    let left = adaptive(f, a, mid, 0.5 * tol, depth + 1);
    let right = adaptive(f, mid, b, 0.5 * tol, depth + 1);
    Panel { value: left.value + right.value, error: left.error + right.error }
}

/// Integrates `f` over `[a, b]` split at `breakpoints`, to absolute
/// tolerance `tol`. Fails when the summed error estimate exceeds `tol`.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let width = b - a;
    let (mut value, mut error) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let panel = adaptive(&f, w[0], w[1], tol * (w[1] - w[0]) / width, 0);
        value += panel.value;
        error += panel.error;
    }
    if error > tol {
        return Err(Error::QuadratureFailure { estimate: error, tolerance: tol });
    }
    Ok(value)
}

/// Kernel zeros `j/N` inside `[−1/2, 1/2]`.
fn kernel_zeros(n: usize) -> Vec<f64> {
    let half = (n / 2) as i64;
    (-half..=half).map(|j| j as f64 / n as f64).collect()
}

/// `N ∫ k_N(φ) |K ∖ (K + φ)| dφ`.
pub fn purity_proxy_kernel(set: &TorusIntervalSet, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyRestriction);
    }
    if set.is_empty() || set.is_full() {
        return Ok(0.0);
    }
    let mut breaks = set.deficit_breakpoints();
    breaks.extend(kernel_zeros(n));
    let nf = n as f64;
    integrate_with_breakpoints(
        |phi| nf * fejer_kernel(n, phi) * set.overlap_deficit(phi),
        -0.5,
        0.5,
        &breaks,
        KERNEL_TOLERANCE,
    )
}

/// The same integral evaluated on the complement `K^c`.
pub fn purity_proxy_kernel_complement(set: &TorusIntervalSet, n: usize) -> Result<f64> {
    purity_proxy_kernel(&set.complement(), n)
}
