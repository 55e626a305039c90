//! Piecewise-constant symbols `q^: T → [0, 1]` and their Fourier coefficients
//! `q(k) = ∫ q^(θ) e^{−2πikθ} dθ`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral_set::TorusIntervalSet;

/// `sin(πx)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * libm::round(x / 2.0);
    let (a, sign) = if r < 0.0 { (-r, -1.0) } else { (r, 1.0) };
    let s = if a <= 0.25 {
        libm::sin(PI * a)
    } else if a <= 0.75 {
        libm::cos(PI * (0.5 - a))
    } else {
        libm::sin(PI * (1.0 - a))
    };
    sign * s
}

/// `cos(πx)` with exact zeros at the half-integers.
pub(crate) fn cos_pi(x: f64) -> f64 {
    let a = (x - 2.0 * libm::round(x / 2.0)).abs();
    if a <= 0.25 {
        libm::cos(PI * a)
    } else if a <= 0.75 {
        libm::sin(PI * (0.5 - a))
    } else {
        -libm::cos(PI * (1.0 - a))
    }
}

/// A step function on the torus: contiguous pieces `(start, end, value)`
/// covering `[0, 1)` with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFunction {
    pieces: Vec<(f64, f64, f64)>,
}

impl SymbolFunction {
    pub fn from_pieces(pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else {
            return Err(Error::InvalidSymbol("symbol needs at least one piece"));
        };
        if first.0 != 0.0 || last.1 != 1.0 {
            return Err(Error::InvalidSymbol("pieces must start at 0 and end at 1"));
        }
        if pieces.windows(2).any(|w| w[0].1 != w[1].0) {
            return Err(Error::InvalidSymbol("pieces must be contiguous"));
        }
        if pieces.iter().any(|p| !(p.1 > p.0)) {
            return Err(Error::InvalidSymbol("pieces must have positive length"));
        }
        if pieces.iter().any(|p| !(0.0..=1.0).contains(&p.2)) {
            return Err(Error::InvalidSymbol("values must lie in [0, 1]"));
        }
        Ok(Self { pieces })
    }

    /// The characteristic function of `K`.
    pub fn indicator(set: &TorusIntervalSet) -> Self {
        let mut pieces = Vec::with_capacity(2 * set.intervals().len() + 1);
        let mut prev = 0.0;
        for &(s, e) in set.intervals() {
            if s > prev {
                pieces.push((prev, s, 0.0));
            }
            pieces.push((s, e, 1.0));
            prev = e;
        }
        if prev < 1.0 {
            pieces.push((prev, 1.0, 0.0));
        }
        Self { pieces }
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::from_pieces(alloc::vec![(0.0, 1.0, value)])
    }

    pub fn pieces(&self) -> &[(f64, f64, f64)] {
        &self.pieces
    }

    /// True when every value is 0 or 1, i.e. the symbol is a projector.
    pub fn is_pure(&self) -> bool {
        self.pieces.iter().all(|p| p.2 == 0.0 || p.2 == 1.0)
    }

    /// The set `{q^ = 1}` for a pure symbol.
    pub fn support_set(&self) -> Option<TorusIntervalSet> {
        if !self.is_pure() {
            return None;
        }
        let raw: Vec<(f64, f64)> =
            self.pieces.iter().filter(|p| p.2 == 1.0).map(|p| (p.0, p.1)).collect();
        TorusIntervalSet::canonicalize(&raw).ok()
    }

    /// `∫ q^ dθ`, the particle density.
    pub fn mean(&self) -> f64 {
        self.pieces.iter().map(|p| (p.1 - p.0) * p.2).sum()
    }

    /// Closed-form `q(k)`: each piece `[a, b)` with value `v` contributes
    /// `v · e^{−iπk(a+b)} · sin(πk(b−a)) / (πk)`.
    pub fn fourier_coefficient(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.mean(), 0.0);
        }
        let kf = k as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, b, v) in &self.pieces {
            if v == 0.0 {
                continue;
            }
            let amplitude = v * sin_pi(kf * (b - a)) / (PI * kf);
            let phase = kf * (a + b);
            acc += Complex64::new(cos_pi(phase), -sin_pi(phase)) * amplitude;
        }
        acc
    }

    /// `q(k)` for every `k` in `range` (nonnegative indices).
    pub fn fourier_coefficients(&self, range: Range<usize>) -> Vec<Complex64> {
        range.map(|k| self.fourier_coefficient(k as i64)).collect()
    }

    /// `q(0), …, q(n_max)`.
    pub fn coefficients(&self, n_max: usize) -> SymbolCoefficients {
        SymbolCoefficients { coeffs: self.fourier_coefficients(0..n_max + 1) }
    }
}

/// Cached `q(0), …, q(n_max)`; negative indices follow from `q(−k) = conj q(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCoefficients {
    coeffs: Vec<Complex64>,
}

impl SymbolCoefficients {
    /// Wraps precomputed values; `values[0]` must be real.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        match values.first() {
            None => Err(Error::InvalidSymbol("need at least q(0)")),
            Some(q0) if q0.im != 0.0 => Err(Error::InvalidSymbol("q(0) must be real")),
            Some(_) => Ok(Self { coeffs: values }),
        }
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        let idx = k.unsigned_abs() as usize;
        let q = *self.coeffs.get(idx)?;
        Some(if k < 0 { q.conj() } else { q })
    }

    pub(crate) fn require(&self, needed: usize) -> Result<()> {
        if needed > self.n_max() {
            return Err(Error::CoefficientsTooShort { available: self.n_max(), needed });
        }
        Ok(())
    }
}
