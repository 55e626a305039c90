//! Toeplitz restrictions `Q_N` of a symbol, their spectra, the entropy
//! `S_N = Tr η̃(Q_N)` and the quadratic proxy `P_N = Tr Q_N(1 − Q_N)`.
//!
//! All logarithms are natural, so entropies are in nats.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::eigen;
use crate::error::{Error, Result};
use crate::symbol::{cos_pi, sin_pi, SymbolCoefficients, SymbolFunction};

/// Arguments and eigenvalues within this distance outside `[0, 1]` are clipped.
pub const CLIP_TOLERANCE: f64 = 1e-9;

fn clip_unit(x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else if x >= -CLIP_TOLERANCE && x < 0.0 {
        Ok(0.0)
    } else if x > 1.0 && x <= 1.0 + CLIP_TOLERANCE {
        Ok(1.0)
    } else {
        Err(Error::DomainViolation(x))
    }
}

fn eta_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * libm::log(x)
    }
}

// η(1 − x) without forming 1 − x.
fn eta_complement_unchecked(x: f64) -> f64 {
    if x >= 1.0 {
        0.0
    } else {
        -(1.0 - x) * libm::log1p(-x)
    }
}

/// `η(x) = −x log x`, with `η(0) = 0`.
pub fn eta(x: f64) -> Result<f64> {
    clip_unit(x).map(eta_unchecked)
}

/// `η̃(x) = η(x) + η(1 − x)`, the entropy of a single mode with occupation `x`.
pub fn eta_tilde(x: f64) -> Result<f64> {
    clip_unit(x).map(|x| eta_unchecked(x) + eta_complement_unchecked(x))
}

/// The `N × N` Hermitian Toeplitz matrix `Q_{lk} = q(k − l)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzRestriction {
    n: usize,
    entries: Vec<Complex64>,
}

/// Spectrum-derived quantities of one restriction.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    pub n: usize,
    /// Ascending, clipped into `[0, 1]`.
    pub eigenvalues: Vec<f64>,
    /// `S_N = Σ η̃(λ)` in nats.
    pub entropy: f64,
    /// `P_N = Σ λ(1 − λ)`.
    pub proxy: f64,
}

impl ToeplitzRestriction {
    pub fn from_coefficients(coeffs: &SymbolCoefficients, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRestriction);
        }
        coeffs.require(n - 1)?;
        let values = coeffs.values();
        let mut entries = Vec::with_capacity(n * n);
        for l in 0..n {
            for k in 0..n {
                entries.push(if k >= l { values[k - l] } else { values[l - k].conj() });
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_symbol(symbol: &SymbolFunction, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRestriction);
        }
        Self::from_coefficients(&symbol.coefficients(n - 1), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n + col]
    }

    /// Eigenvalues, ascending, clipped into `[0, 1]`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let raw = eigen::hermitian_eigenvalues(&self.entries, self.n)?;
        raw.into_iter()
            .map(|x| clip_unit(x).map_err(|_| Error::SpectrumOutOfRange { value: x, dim: self.n }))
            .collect()
    }

    pub fn entropy(&self) -> Result<EntropyResult> {
        let eigenvalues = self.spectrum()?;
        let entropy = eigenvalues.iter().map(|&x| eta_unchecked(x) + eta_complement_unchecked(x)).sum();
        let proxy = eigenvalues.iter().map(|&x| x * (1.0 - x)).sum();
        Ok(EntropyResult { n: self.n, eigenvalues, entropy, proxy })
    }
}

/// Free function form of [`ToeplitzRestriction::from_symbol`].
pub fn build_restriction(symbol: &SymbolFunction, n: usize) -> Result<ToeplitzRestriction> {
    ToeplitzRestriction::from_symbol(symbol, n)
}

/// `Tr Q_N(1 − Q_N) = N q(0) − Σ_{|n|<N} (N − |n|) |q(n)|²` in `O(N)`.
pub fn purity_proxy_direct(coeffs: &SymbolCoefficients, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyRestriction);
    }
    coeffs.require(n - 1)?;
    let q = coeffs.values();
    let q0 = q[0].re;
    let nf = n as f64;
    let off: f64 = (1..n).map(|m| (nf - m as f64) * q[m].norm_sqr()).sum();
    Ok(nf * q0 * (1.0 - q0) - 2.0 * off)
}

/// `ψ'(n) = Σ_{k≥n} 1/k²` for integer `n ≥ 1`.
fn trigamma(n: usize) -> f64 {
    const SHIFT: usize = 20;
    let mut head = 0.0;
    let mut m = n;
    while m < SHIFT {
        head += 1.0 / (m as f64 * m as f64);
        m += 1;
    }
    let x = m as f64;
    let x2 = x * x;
    let tail = 1.0 / x
        + 1.0 / (2.0 * x2)
        + (1.0 / 6.0 - (1.0 / 30.0 - (1.0 / 42.0 - 1.0 / (30.0 * x2)) / x2) / x2) / (x2 * x);
    head + tail
}

/// Truncation-error target used by [`default_tail_terms`].
pub const TAIL_BOUND_TARGET: f64 = 1e-10;
pub const MAX_TAIL_TERMS: usize = 100_000_000;

/// Tail length meeting both `T ≥ 10⁶/N` and a bound below [`TAIL_BOUND_TARGET`]
/// (capped at [`MAX_TAIL_TERMS`]).
pub fn default_tail_terms(measure: f64, n: usize) -> usize {
    let floor = (1_000_000 / n.max(1)).max(1000);
    let s = sin_pi(measure).abs();
    if s == 0.0 {
        return floor;
    }
    // smallest T with series_tail_bound < TAIL_BOUND_TARGET
    let reach = libm::sqrt(n as f64 / (PI * PI * TAIL_BOUND_TARGET * s));
    let needed = (libm::ceil(reach) as usize).saturating_sub(n) + 1;
    floor.max(needed).min(MAX_TAIL_TERMS)
}

/// Bound on the truncation error of [`purity_proxy_single_interval_series`].
pub fn series_tail_bound(measure: f64, n: usize, tail_terms: usize) -> f64 {
    let s = sin_pi(measure).abs();
    if s == 0.0 {
        return 0.0;
    }
    let m = (n + tail_terms) as f64;
    n as f64 / (PI * PI) / (m * m * s)
}

/// `P_N` for a single interval of length `|K|` from the series
/// `(2N/π²) Σ_{n≥N} sin²(πn|K|)/n² + (2/π²) Σ_{n<N} sin²(πn|K|)/n`.
///
/// The infinite tail is split as `sin² = (1 − cos 2·)/2`: the `1/n²` part is
/// the trigamma function, the oscillating part is summed over `tail_terms`
/// terms (error below [`series_tail_bound`]).
pub fn purity_proxy_single_interval_series(measure: f64, n: usize, tail_terms: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyRestriction);
    }
    if !(0.0..=1.0).contains(&measure) {
        return Err(Error::DomainViolation(measure));
    }
    let oscillating: f64 =
        (n..n + tail_terms).map(|m| cos_pi(2.0 * m as f64 * measure) / (m as f64 * m as f64)).sum();
    let tail = 0.5 * (trigamma(n) - oscillating);
    let head: f64 = (1..n)
        .map(|m| {
            let s = sin_pi(m as f64 * measure);
            s * s / m as f64
        })
        .sum();
    let scale = 2.0 / (PI * PI);
    Ok(scale * (n as f64 * tail + head))
}

/// Szegő entropy density `∫ η̃(q^(θ)) dθ`, exact for step functions.
pub fn entropy_density(symbol: &SymbolFunction) -> f64 {
    symbol
        .pieces()
        .iter()
        .map(|&(a, b, v)| (b - a) * (eta_unchecked(v) + eta_complement_unchecked(v)))
        .sum()
}
