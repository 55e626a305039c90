//! Finite unions of intervals on the unit torus `T = [0, 1)`.
//!
//! Endpoints are plain `f64`. Whether an endpoint is open or closed never
//! matters for any quantity computed here, so intervals are treated as
//! half-open and adjacency is decided with [`MERGE_TOLERANCE`].

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Gaps at or below this width are closed during canonicalization.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Maps `x` into `[0, 1)`.
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let r = x - libm::floor(x);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Maps `x` into `[-1/2, 1/2]`.
pub(crate) fn wrap_centered(x: f64) -> f64 {
    let r = wrap_unit(x);
    if r > 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// A finite union of disjoint intervals on the torus.
///
/// Intervals are stored sorted, pairwise separated by more than
/// [`MERGE_TOLERANCE`], inside `[0, 1]`. An arc crossing `0 ≡ 1` is stored as
/// two pieces `(0, a)` and `(b, 1)`; [`TorusIntervalSet::wraps`] records that
/// they form a single arc on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusIntervalSet {
    intervals: Vec<(f64, f64)>,
    wraps: bool,
}

impl TorusIntervalSet {
    pub fn empty() -> Self {
        Self { intervals: Vec::new(), wraps: false }
    }

    pub fn full() -> Self {
        Self { intervals: alloc::vec![(0.0, 1.0)], wraps: false }
    }

    /// Builds the canonical form of a union of arcs.
    ///
    /// Each raw pair `(start, end)` is the arc running forward from `start` to
    /// `end`; `end < start` wraps through zero, and `end - start >= 1` covers
    /// the whole torus. Overlapping and touching arcs are merged.
    pub fn canonicalize(raw: &[(f64, f64)]) -> Result<Self> {
        let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(raw.len() + 1);
        for &(start, end) in raw {
            if !start.is_finite() || !end.is_finite() {
                return Err(Error::NonFiniteEndpoint { start, end });
            }
            if (0.0..1.0).contains(&start) && end <= 1.0 && start < end {
                pieces.push((start, end));
                continue;
            }
            let span = end - start;
            if span >= 1.0 {
                return Ok(Self::full());
            }
            let len = if span > 0.0 { span } else { wrap_unit(span) };
            if len <= 0.0 {
                return Err(Error::DegenerateInterval { start, end });
            }
            let s = wrap_unit(start);
            let e = s + len;
            if e > 1.0 {
                pieces.push((s, 1.0));
                pieces.push((0.0, e - 1.0));
            } else {
                pieces.push((s, e));
            }
        }

        for p in pieces.iter_mut() {
            if p.0 < MERGE_TOLERANCE {
                p.0 = 0.0;
            }
            if p.1 > 1.0 - MERGE_TOLERANCE {
                p.1 = 1.0;
            }
        }
        pieces.retain(|p| p.1 - p.0 > MERGE_TOLERANCE);
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(cur) if p.0 <= cur.1 + MERGE_TOLERANCE => {
                    if p.1 > cur.1 {
                        cur.1 = p.1;
                    }
                }
                _ => merged.push(p),
            }
        }
        let wraps =
            merged.len() >= 2 && merged[0].0 == 0.0 && merged[merged.len() - 1].1 == 1.0;
        Ok(Self { intervals: merged, wraps })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// True when the first and last stored pieces meet across `0 ≡ 1`.
    pub fn wraps(&self) -> bool {
        self.wraps
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0] == (0.0, 1.0)
    }

    /// Number of arcs on the torus (pieces split at zero count once).
    pub fn component_count(&self) -> usize {
        self.intervals.len() - usize::from(self.wraps)
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(s, e)| e - s).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = wrap_unit(theta);
        self.intervals.iter().any(|&(s, e)| s <= t && t < e)
    }

    pub fn complement(&self) -> Self {
        if self.is_empty() {
            return Self::full();
        }
        let mut gaps = Vec::with_capacity(self.intervals.len() + 1);
        let mut prev = 0.0;
        for &(s, e) in &self.intervals {
            if s > prev {
                gaps.push((prev, s));
            }
            prev = e;
        }
        if prev < 1.0 {
            gaps.push((prev, 1.0));
        }
        Self::canonicalize(&gaps).expect("gaps of a canonical set are valid arcs")
    }

    /// The set `K + φ`.
    pub fn translate(&self, phi: f64) -> Self {
        if self.is_empty() || self.is_full() || phi == 0.0 {
            return self.clone();
        }
        let shift = wrap_unit(phi);
        let raw: Vec<(f64, f64)> =
            self.intervals.iter().map(|&(s, e)| (s + shift, e + shift)).collect();
        Self::canonicalize(&raw).expect("translated arcs are finite and nondegenerate")
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut raw = self.intervals.clone();
        raw.extend_from_slice(&other.intervals);
        Self::canonicalize(&raw).expect("pieces of canonical sets are valid arcs")
    }

    /// Measure of `self ∩ other` by a merge sweep over both sorted lists.
    pub fn intersection_measure(&self, other: &Self) -> f64 {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut total = 0.0;
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if hi > lo {
                total += hi - lo;
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        total
    }

    /// `|K ∖ (K + φ)|`, the measure the set loses under a shift by `φ`.
    pub fn overlap_deficit(&self, phi: f64) -> f64 {
        if self.is_empty() || self.is_full() {
            return 0.0;
        }
        let shifted = self.translate(phi);
        (self.measure() - self.intersection_measure(&shifted)).max(0.0)
    }

    /// Shifts in `[-1/2, 1/2]` where `φ ↦ |K ∖ (K + φ)|` may have a kink:
    /// all pairwise differences of interval endpoints. Sorted, deduplicated,
    /// and always containing `-1/2`, `0` and `1/2`.
    pub fn deficit_breakpoints(&self) -> Vec<f64> {
        let mut ends: Vec<f64> = Vec::with_capacity(2 * self.intervals.len());
        for (idx, &(s, e)) in self.intervals.iter().enumerate() {
            // The seam of a wrapped arc is not a real boundary.
            if !(self.wraps && idx == 0 && s == 0.0) {
                ends.push(s);
            }
            if !(self.wraps && idx == self.intervals.len() - 1 && e == 1.0) {
                ends.push(e);
            }
        }
        let mut out = alloc::vec![-0.5, 0.0, 0.5];
        for &x in &ends {
            for &y in &ends {
                let d = wrap_centered(x - y);
                out.push(d);
                if d == 0.5 || d == -0.5 {
                    out.push(-d);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOLERANCE);
        out
    }
}

/// Parameters of the Cantor-like construction with hole lengths `a·q^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantorSpec {
    q: f64,
    a: f64,
    depth: u32,
}

impl CantorSpec {
    /// Requires `0 < q < 1/2`, `a > 0` and `a·q / (1 − 2q) < 1` so the limit
    /// set keeps positive measure.
    pub fn new(q: f64, a: f64, depth: u32) -> Result<Self> {
        if !(q > 0.0 && q < 0.5) {
            return Err(Error::InvalidCantor { q, a, reason: "ratio q must lie in (0, 1/2)" });
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidCantor { q, a, reason: "amplitude a must be positive" });
        }
        if a * q / (1.0 - 2.0 * q) >= 1.0 {
            return Err(Error::InvalidCantor {
                q,
                a,
                reason: "total removed measure a·q/(1−2q) must be below 1",
            });
        }
        Ok(Self { q, a, depth })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn with_depth(&self, depth: u32) -> Self {
        Self { depth, ..*self }
    }

    /// Length `a·q^k` of each hole cut in generation `k`.
    pub fn hole_length(&self, generation: u32) -> f64 {
        self.a * libm::pow(self.q, f64::from(generation))
    }

    /// Length of each of the `2^m` intervals left after `m` generations.
    pub fn interval_length(&self, generation: u32) -> f64 {
        (1..=generation).fold(1.0, |len, k| (len - self.hole_length(k)) / 2.0)
    }

    /// Fraction `γ(m)` of each parent interval that survives generation `m`.
    pub fn surviving_fraction(&self, generation: u32) -> f64 {
        1.0 - self.hole_length(generation) / self.interval_length(generation - 1)
    }

    /// `1 − Σ_{k ≤ depth} 2^{k−1} a q^k`.
    pub fn truncated_measure(&self) -> f64 {
        let removed: f64 = (1..=self.depth)
            .map(|k| libm::ldexp(self.hole_length(k), k as i32 - 1))
            .sum();
        1.0 - removed
    }

    /// Measure `1 − a q / (1 − 2q)` of the infinite-depth limit set.
    pub fn limit_measure(&self) -> f64 {
        1.0 - self.a * self.q / (1.0 - 2.0 * self.q)
    }

    /// Builds `K_depth`: `2^depth` equal intervals, holes centred in their parents.
    pub fn generate(&self) -> Result<TorusIntervalSet> {
        let mut intervals: Vec<(f64, f64)> = alloc::vec![(0.0, 1.0)];
        for generation in 1..=self.depth {
            let hole = self.hole_length(generation);
            let mut next = Vec::with_capacity(2 * intervals.len());
            for &(s, e) in &intervals {
                let parent = e - s;
                if hole >= parent {
                    return Err(Error::HoleTooLarge { generation, hole, parent });
                }
                let child = (parent - hole) / 2.0;
                next.push((s, s + child));
                next.push((e - child, e));
            }
            intervals = next;
        }
        TorusIntervalSet::canonicalize(&intervals)
    }
}

/// Free function form of [`CantorSpec::generate`].
pub fn cantor_generate(spec: &CantorSpec) -> Result<TorusIntervalSet> {
    spec.generate()
}

/// Samples `(θ, ε(θ))` of a periodic dispersion relation, interpolated
/// piecewise linearly (the last sample connects to the first at `θ + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSamples {
    samples: Vec<(f64, f64)>,
}

/// Sublevel set at the Fermi level for a given filling.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiSea {
    pub fermi_energy: f64,
    pub set: TorusIntervalSet,
}

const FERMI_BISECTION_STEPS: usize = 200;
const FERMI_FILLING_TOLERANCE: f64 = 1e-9;

impl DispersionSamples {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidDispersion("need at least 3 samples"));
        }
        if samples.iter().any(|&(t, e)| !(0.0..1.0).contains(&t) || !e.is_finite()) {
            return Err(Error::InvalidDispersion("θ must lie in [0, 1) and energies be finite"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidDispersion("θ must be strictly increasing"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        let n = self.samples.len();
        (0..n).map(move |i| {
            let p = self.samples[i];
            let q = if i + 1 < n {
                self.samples[i + 1]
            } else {
                (self.samples[0].0 + 1.0, self.samples[0].1)
            };
            (p, q)
        })
    }

    fn sublevel_arcs(&self, energy: f64) -> Vec<(f64, f64)> {
        let mut arcs = Vec::new();
        for ((t0, e0), (t1, e1)) in self.segments() {
            let arc = match (e0 <= energy, e1 <= energy) {
                (true, true) => Some((t0, t1)),
                (false, false) => None,
                (below0, _) => {
                    let cross = t0 + (energy - e0) / (e1 - e0) * (t1 - t0);
                    if below0 {
                        Some((t0, cross))
                    } else {
                        Some((cross, t1))
                    }
                }
            };
            if let Some((a, b)) = arc {
                if b > a {
                    arcs.push((a, b));
                }
            }
        }
        arcs
    }

    fn sublevel_measure(&self, energy: f64) -> f64 {
        self.sublevel_arcs(energy).iter().map(|(a, b)| b - a).sum()
    }

    /// `K(e) = {θ : ε(θ) ≤ e}` for the interpolated dispersion.
    pub fn sublevel_set(&self, energy: f64) -> TorusIntervalSet {
        TorusIntervalSet::canonicalize(&self.sublevel_arcs(energy))
            .expect("sublevel arcs are finite and nondegenerate")
    }

    /// Finds the Fermi level with `|K(e_F)| = filling` by bisection.
    pub fn fermi_sea(&self, filling: f64) -> Result<FermiSea> {
        if !(0.0..=1.0).contains(&filling) {
            return Err(Error::FillingOutOfRange(filling));
        }
        let (mut lo, mut hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, e)| (lo.min(e), hi.max(e)));
        if filling == 0.0 {
            return Ok(FermiSea { fermi_energy: lo, set: TorusIntervalSet::empty() });
        }
        if filling == 1.0 {
            return Ok(FermiSea { fermi_energy: hi, set: TorusIntervalSet::full() });
        }
        let at_min = self.sublevel_measure(lo);
        if at_min >= filling {
            if at_min - filling <= FERMI_FILLING_TOLERANCE {
                return Ok(FermiSea { fermi_energy: lo, set: self.sublevel_set(lo) });
            }
            return Err(Error::FermiPlateau { energy: lo, below: 0.0, above: at_min });
        }
        for _ in 0..FERMI_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.sublevel_measure(mid) >= filling {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (m_lo, m_hi) = (self.sublevel_measure(lo), self.sublevel_measure(hi));
        let energy = if (m_hi - filling).abs() <= FERMI_FILLING_TOLERANCE {
            hi
        } else if (filling - m_lo).abs() <= FERMI_FILLING_TOLERANCE {
            lo
        } else {
            return Err(Error::FermiPlateau { energy: hi, below: m_lo, above: m_hi });
        };
        Ok(FermiSea { fermi_energy: energy, set: self.sublevel_set(energy) })
    }
}

/// Free function form of [`DispersionSamples::fermi_sea`].
pub fn fermi_sea(dispersion: &DispersionSamples, filling: f64) -> Result<FermiSea> {
    dispersion.fermi_sea(filling)
}
