//! Dense Hermitian eigensolver.
//!
//! Householder reduction of a complex Hermitian matrix to a real symmetric
//! tridiagonal one (the phases are folded into the reflectors), followed by
//! the implicit QL iteration with Wilkinson-style shifts. Only the lower
//! triangle of the input is read.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues in ascending order, and optionally the eigenvectors as the
/// columns of a row-major `n × n` matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Complex64>>,
}

struct Reflector {
    tau: Complex64,
    // v[0] = 1 implicitly stored, acting on rows k+1..n
    v: Vec<Complex64>,
}

struct Tridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    reflectors: Vec<Option<Reflector>>,
}

fn tridiagonalize(matrix: &[Complex64], n: usize, keep_reflectors: bool) -> Tridiagonal {
    let mut a = matrix.to_vec();
    let mut diag = vec![0.0; n];
    let mut offdiag = vec![0.0; n];
    let mut reflectors = Vec::new();
    let mut y = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(1) {
        diag[k] = a[k * n + k].re;
        let alpha = a[(k + 1) * n + k];
        let xnorm = libm::sqrt((k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>());
        if xnorm == 0.0 && alpha.im == 0.0 {
            offdiag[k] = alpha.re;
            if keep_reflectors {
                reflectors.push(None);
            }
            continue;
        }
        let beta = -libm::copysign(libm::hypot(libm::hypot(alpha.re, alpha.im), xnorm), alpha.re);
        let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
        let scale = Complex64::new(1.0, 0.0) / (alpha - beta);
        offdiag[k] = beta;

        let m = n - k - 1;
        let base = k + 1;
        let mut v = Vec::with_capacity(m);
        v.push(Complex64::new(1.0, 0.0));
        for i in base + 1..n {
            v.push(a[i * n + k] * scale);
        }

        // y = tau * A22 v, reading only the lower triangle of A22.
        let y = &mut y[..m];
        y.iter_mut().for_each(|t| *t = Complex64::new(0.0, 0.0));
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + base + i + 1];
            let vi = v[i];
            let mut acc = row[i].re * vi;
            for j in 0..i {
                acc += row[j] * v[j];
                y[j] += row[j].conj() * vi;
            }
            y[i] += acc;
        }
        let mut yv = Complex64::new(0.0, 0.0);
        for (yi, vi) in y.iter_mut().zip(&v) {
            *yi *= tau;
            yv += yi.conj() * vi;
        }
        let shift = -0.5 * tau * yv;
        // w = y + shift v, then A22 -= v w^H + w v^H on the lower triangle.
        for (yi, vi) in y.iter_mut().zip(&v) {
            *yi += shift * vi;
        }
        for i in 0..m {
            let (vi, wi) = (v[i], y[i]);
            let row = &mut a[(base + i) * n + base..(base + i) * n + base + i + 1];
            for j in 0..=i {
                row[j] -= vi * y[j].conj() + wi * v[j].conj();
            }
        }

        if keep_reflectors {
            reflectors.push(Some(Reflector { tau, v }));
        }
    }
    if n > 0 {
        diag[n - 1] = a[(n - 1) * n + n - 1].re;
    }
    offdiag[n.saturating_sub(1)] = 0.0;
    Tridiagonal { diag, offdiag, reflectors }
}

/// Implicit QL on a symmetric tridiagonal matrix; `offdiag[i]` couples `i`
/// and `i + 1`. When `z` is given (row-major, initialised to the identity or
/// a prior basis) its columns are rotated along.
fn tridiagonal_ql(diag: &mut [f64], offdiag: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = diag.len();
    let norm = diag
        .iter()
        .zip(offdiag.iter())
        .fold(0.0f64, |acc, (d, e)| acc.max(d.abs() + 2.0 * e.abs()));
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if offdiag[m].abs() <= floor || offdiag[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                let residual = offdiag.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
                return Err(Error::NoConvergence { dim: n, residual });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
            let mut r = libm::hypot(g, 1.0);
            g = diag[m] - diag[l] + offdiag[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * offdiag[i];
                let b = c * offdiag[i];
                r = libm::hypot(f, g);
                offdiag[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    offdiag[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for row in z.chunks_exact_mut(n) {
                        let f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            offdiag[l] = g;
            offdiag[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of the Hermitian matrix stored row-major in `matrix`, ascending.
pub fn hermitian_eigenvalues(matrix: &[Complex64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let Tridiagonal { mut diag, mut offdiag, .. } = tridiagonalize(matrix, n, false);
    tridiagonal_ql(&mut diag, &mut offdiag, None)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Full eigendecomposition; use for small matrices (`O(n³)` with a larger constant).
pub fn hermitian_eigen(matrix: &[Complex64], n: usize) -> Result<HermitianEigen> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let Tridiagonal { mut diag, mut offdiag, reflectors } = tridiagonalize(matrix, n, true);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut offdiag, Some(&mut z))?;

    // V = H_0 H_1 ... H_{n-2} Z
    let mut vectors: Vec<Complex64> = z.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for (k, refl) in reflectors.iter().enumerate().rev() {
        let Some(Reflector { tau, v }) = refl else { continue };
        let base = k + 1;
        for col in 0..n {
            let dot: Complex64 =
                v.iter().enumerate().map(|(i, vi)| vi.conj() * vectors[(base + i) * n + col]).sum();
            let coef = tau * dot;
            for (i, vi) in v.iter().enumerate() {
                vectors[(base + i) * n + col] -= coef * vi;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut sorted = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            sorted[row * n + new_col] = vectors[row * n + old_col];
        }
    }
    Ok(HermitianEigen { values, vectors: Some(sorted) })
}
