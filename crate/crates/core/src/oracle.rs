//! Brute-force check of `S_n = Tr η̃(Q_n)`: assemble the `2ⁿ × 2ⁿ` reduced
//! density matrix of the quasi-free state entry by entry from Wick
//! contractions, then take its von Neumann entropy.
//!
//! Basis convention: site 0 is the most significant bit of a basis index, and
//! a bit value of 0 means the site is occupied (matrix-unit index 1,
//! `E₁₁ = c†c`). With this choice `ρ` is Hermitian with unit trace and the
//! one-site matrix is `diag(q(0), 1 − q(0))`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::eigen;
use crate::error::{Error, Result};
use crate::symbol::SymbolFunction;
use crate::toeplitz::{eta, ToeplitzRestriction};

pub const MAX_WORD_LEN: usize = 24;
pub const MAX_ORACLE_SITES: usize = 8;
/// Largest window for [`density_matrix_by_expansion`] (word length `n²`).
pub const MAX_EXPANSION_SITES: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `c_site` or `c†_site`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionOp {
    pub site: usize,
    pub dagger: bool,
}

impl FermionOp {
    pub const fn create(site: usize) -> Self {
        Self { site, dagger: true }
    }

    pub const fn annihilate(site: usize) -> Self {
        Self { site, dagger: false }
    }
}

/// An ordered product of creation and annihilation operators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FermionWord(Vec<FermionOp>);

impl FermionWord {
    pub fn new(ops: Vec<FermionOp>) -> Result<Self> {
        if ops.len() > MAX_WORD_LEN {
            return Err(Error::WordTooLong { len: ops.len(), max: MAX_WORD_LEN });
        }
        Ok(Self(ops))
    }

    pub fn ops(&self) -> &[FermionOp] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self · other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut ops = self.0.clone();
        ops.extend_from_slice(&other.0);
        Self::new(ops)
    }
}

/// Two-point function `⟨c†_i c_j⟩ = Q_{ij}` on a window of `n` sites.
#[derive(Debug, Clone, Copy)]
pub struct TwoPoint<'a> {
    n: usize,
    entries: &'a [Complex64],
}

impl<'a> TwoPoint<'a> {
    /// `entries` is the row-major `n × n` matrix `Q`.
    pub fn new(entries: &'a [Complex64], n: usize) -> Self {
        assert_eq!(entries.len(), n * n, "two-point matrix must be n x n");
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn contract(&self, a: FermionOp, b: FermionOp) -> Complex64 {
        match (a.dagger, b.dagger) {
            (true, false) => self.entries[a.site * self.n + b.site],
            (false, true) => {
                let delta = if a.site == b.site { ONE } else { ZERO };
                delta - self.entries[b.site * self.n + a.site]
            }
            _ => ZERO,
        }
    }
}

struct Pfaffian<'a> {
    ops: &'a [FermionOp],
    creators: u32,
    q: TwoPoint<'a>,
    memo: BTreeMap<u32, Complex64>,
}

impl Pfaffian<'_> {
    fn eval(&mut self, mask: u32) -> Complex64 {
        if mask == 0 {
            return ONE;
        }
        let count = mask.count_ones();
        if count % 2 == 1 || 2 * (mask & self.creators).count_ones() != count {
            return ZERO;
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let first = mask.trailing_zeros();
        let rest = mask & !(1 << first);
        let mut total = ZERO;
        let mut remaining = rest;
        let mut rank = 0;
        while remaining != 0 {
            let k = remaining.trailing_zeros();
            remaining &= remaining - 1;
            rank += 1;
            let c = self.q.contract(self.ops[first as usize], self.ops[k as usize]);
            if c == ZERO {
                continue;
            }
            let sub = self.eval(rest & !(1 << k));
            if rank % 2 == 1 {
                total += c * sub;
            } else {
                total -= c * sub;
            }
        }
        self.memo.insert(mask, total);
        total
    }
}

/// `φ(o₁ o₂ … o_m)` for the gauge-invariant quasi-free state with two-point
/// function `q`, by the recursive Pfaffian expansion
/// `φ(o₁…o_{2p}) = Σ_k (−1)^k ⟨o₁ o_k⟩ φ(… without o₁, o_k …)`.
pub fn wick_expectation(word: &FermionWord, q: TwoPoint<'_>) -> Result<Complex64> {
    if word.len() > MAX_WORD_LEN {
        return Err(Error::WordTooLong { len: word.len(), max: MAX_WORD_LEN });
    }
    if let Some(op) = word.ops().iter().find(|op| op.site >= q.n()) {
        return Err(Error::SiteOutOfRange { site: op.site, n: q.n() });
    }
    let creators = word
        .ops()
        .iter()
        .enumerate()
        .filter(|(_, op)| op.dagger)
        .fold(0u32, |m, (i, _)| m | (1 << i));
    let full = if word.is_empty() { 0 } else { u32::MAX >> (32 - word.len()) };
    let mut pf = Pfaffian { ops: word.ops(), creators, q, memo: BTreeMap::new() };
    Ok(pf.eval(full))
}

/// Single-site basis state; `Occupied` is matrix-unit index 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupation {
    Occupied,
    Empty,
}

fn site_ops(site: usize, row: Occupation, col: Occupation) -> Vec<FermionOp> {
    use Occupation::*;
    match (row, col) {
        (Occupied, Occupied) => vec![FermionOp::create(site), FermionOp::annihilate(site)],
        (Empty, Empty) => vec![FermionOp::annihilate(site), FermionOp::create(site)],
        (Occupied, Empty) => vec![FermionOp::create(site)],
        (Empty, Occupied) => vec![FermionOp::annihilate(site)],
    }
}

/// Jordan–Wigner image of the matrix unit `E^k_{row,col}` as a weighted sum of
/// words: `E₁₁ = c†c`, `E₂₂ = cc†`, `E₁₂ = A_k c†`, `E₂₁ = A_k c` with
/// `A_k = Π_{l<k} (2c†_l c_l − 1)` multiplied out.
pub fn matrix_unit_word(site: usize, row: Occupation, col: Occupation) -> Result<Vec<(f64, FermionWord)>> {
    let tail = site_ops(site, row, col);
    if row == col {
        return Ok(vec![(1.0, FermionWord::new(tail)?)]);
    }
    let mut terms = Vec::with_capacity(1 << site);
    for subset in (0..1usize << site).rev() {
        let picked = subset.count_ones() as i32;
        let sign = if (site as i32 - picked) % 2 == 0 { 1.0 } else { -1.0 };
        let mut ops = Vec::with_capacity(2 * picked as usize + 1);
        for l in (0..site).filter(|l| subset & (1 << l) != 0) {
            ops.push(FermionOp::create(l));
            ops.push(FermionOp::annihilate(l));
        }
        ops.extend_from_slice(&tail);
        terms.push((sign * libm::ldexp(1.0, picked), FermionWord::new(ops)?));
    }
    Ok(terms)
}

/// A `2ⁿ × 2ⁿ` density matrix on the Fock space of `n` sites, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

fn occupation(index: usize, site: usize, n: usize) -> Occupation {
    if (index >> (n - 1 - site)) & 1 == 0 {
        Occupation::Occupied
    } else {
        Occupation::Empty
    }
}

fn two_point_window(symbol: &SymbolFunction, n: usize) -> Result<ToeplitzRestriction> {
    if n == 0 {
        return Err(Error::EmptyRestriction);
    }
    if n > MAX_ORACLE_SITES {
        return Err(Error::OracleTooLarge { n, max: MAX_ORACLE_SITES });
    }
    ToeplitzRestriction::from_symbol(symbol, n)
}

/// `ρ_{j,i} = φ(Π_k E^k_{i_k j_k})` with the parity strings cancelled
/// site by site: each string factor `σ^z_l` lands next to site `l`'s own
/// operator and turns into a sign, leaving words of length at most `2n`.
pub fn density_matrix(symbol: &SymbolFunction, n: usize) -> Result<FockDensityMatrix> {
    let window = two_point_window(symbol, n)?;
    let q = TwoPoint::new(window.entries(), n);
    let dim = 1usize << n;
    let mut entries = vec![ZERO; dim * dim];
    for row in 0..dim {
        for col in 0..dim {
            // E^k_{i_k j_k} with i = col, j = row
            let flips = row ^ col;
            let raising = (0..n).filter(|&k| {
                flips >> (n - 1 - k) & 1 == 1 && occupation(col, k, n) == Occupation::Occupied
            });
            if 2 * raising.count() != flips.count_ones() as usize {
                continue;
            }
            let mut ops = Vec::with_capacity(2 * n);
            let mut sign = 1.0;
            for k in 0..n {
                let (a, b) = (occupation(col, k, n), occupation(row, k, n));
                let later_flips = (flips & ((1usize << (n - 1 - k)) - 1)).count_ones();
                if later_flips % 2 == 1 && matches!(b, Occupation::Empty) {
                    // σ^z after c_k c_k† or c_k† gives −1
                    sign = -sign;
                }
                ops.extend(site_ops(k, a, b));
            }
            let value = wick_expectation(&FermionWord::new(ops)?, q)?;
            entries[row * dim + col] = value * sign;
        }
    }
    Ok(FockDensityMatrix { n, entries })
}

/// Same matrix, summing every word of the multiplied-out parity strings.
/// Independent of the sign bookkeeping in [`density_matrix`]; limited to
/// `n ≤ 4`.
pub fn density_matrix_by_expansion(symbol: &SymbolFunction, n: usize) -> Result<FockDensityMatrix> {
    if n > MAX_EXPANSION_SITES {
        return Err(Error::OracleTooLarge { n, max: MAX_EXPANSION_SITES });
    }
    let window = two_point_window(symbol, n)?;
    let q = TwoPoint::new(window.entries(), n);
    let dim = 1usize << n;
    let mut entries = vec![ZERO; dim * dim];
    for row in 0..dim {
        for col in 0..dim {
            let mut terms = vec![(1.0, FermionWord::default())];
            for k in 0..n {
                let unit = matrix_unit_word(k, occupation(col, k, n), occupation(row, k, n))?;
                let mut next = Vec::with_capacity(terms.len() * unit.len());
                for (c1, w1) in &terms {
                    for (c2, w2) in &unit {
                        next.push((c1 * c2, w1.concat(w2)?));
                    }
                }
                terms = next;
            }
            let mut acc = ZERO;
            for (c, w) in &terms {
                acc += wick_expectation(w, q)? * *c;
            }
            entries[row * dim + col] = acc;
        }
    }
    Ok(FockDensityMatrix { n, entries })
}

impl FockDensityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_{ij} − conj ρ_{ji}|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Traces out the last site (the least significant bit).
    pub fn partial_trace_last(&self) -> Option<Self> {
        if self.n == 0 {
            return None;
        }
        let d = self.dim() / 2;
        let mut entries = vec![ZERO; d * d];
        for a in 0..d {
            for b in 0..d {
                entries[a * d + b] = self.get(2 * a, 2 * b) + self.get(2 * a + 1, 2 * b + 1);
            }
        }
        Some(Self { n: self.n - 1, entries })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigen::hermitian_eigenvalues(&self.entries, self.dim())
    }

    /// `Σ η(p)` over the spectrum, in nats.
    pub fn vn_entropy(&self) -> Result<f64> {
        self.eigenvalues()?.into_iter().map(eta).sum()
    }
}
