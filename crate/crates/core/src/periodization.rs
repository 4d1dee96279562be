//! The periodization `Φ_b(ξ) = Σ_n |φ̂((ξ+n)/b)|²` on `𝕋 = [0, 1)`.
//!
//! A [`PeriodizedSpectrum`] keeps both the midpoint grid samples and the
//! exact folded representation of `Φ_b` as disjoint quadratic pieces, so
//! Fourier coefficients and pointwise values do not depend on the grid.

use alloc::vec::Vec;

use libm::{ceil, floor};
use num_complex::Complex64;

use crate::math::{is_power_of_two, TAU};
use crate::spectrum::{FourierProfile, PolyPiece};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodizedSpectrum {
    b: f64,
    values: Vec<f64>,
    truncation_range: i64,
    tail_bound: f64,
    pieces: Vec<PolyPiece>,
    norm_sq: f64,
}

/// Grid extrema of `Φ_b` with the zero set split off.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EssentialBounds {
    /// Smallest grid value above the threshold, `+∞` if there is none.
    pub inf_nonzero: f64,
    pub sup: f64,
    pub zero_fraction: f64,
    /// Smallest grid value overall.
    pub min: f64,
    pub grid_size: usize,
}

/// Cyclic runs of grid points at or below a threshold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ZeroSet {
    pub count: usize,
    /// `(start, end)` of each run; `end < start` when the run wraps past 1.
    pub intervals: Vec<(f64, f64)>,
}

/// Samples `Φ_b` at the midpoints `(j + ½)/M`.
///
/// Profiles have bounded support, so the sum is finite and `tail_bound` is
/// zero; `tail_tol` is only validated.
pub fn periodize(profile: &FourierProfile, b: f64, grid_size: usize, tail_tol: f64) -> Result<PeriodizedSpectrum> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument("spacing b must be positive and finite".into()));
    }
    if grid_size < 16 || !is_power_of_two(grid_size) {
        return Err(Error::InvalidArgument("grid size must be a power of two, at least 16".into()));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidArgument("tail tolerance must be positive".into()));
    }
    let mut folded = Vec::new();
    let mut reach = 0i64;
    for piece in profile.squared_pieces() {
        let s = b * piece.lo;
        let t = b * piece.hi;
        let first = floor(s) as i64;
        let last = ceil(t) as i64 - 1;
        for n in first..=last {
            let lo = (s - n as f64).max(0.0);
            let hi = (t - n as f64).min(1.0);
            if hi <= lo {
                continue;
            }
            reach = reach.max(n.abs());
            folded.push(fold(&piece, b, n, lo, hi));
        }
    }
    let pieces = merge(folded);
    let mut ps = PeriodizedSpectrum {
        b,
        values: Vec::new(),
        truncation_range: reach,
        tail_bound: 0.0,
        pieces,
        norm_sq: profile.norm_sq(),
    };
    ps.values = ps.sample(grid_size);
    Ok(ps)
}

/// Re-expresses `p((ξ + n)/b)` on `[lo, hi)` as a quadratic about the new
/// midpoint.
fn fold(p: &PolyPiece, b: f64, n: i64, lo: f64, hi: f64) -> PolyPiece {
    let center = 0.5 * (lo + hi);
    let d = (center + n as f64) / b - p.center;
    let [c0, c1, c2] = p.coeffs;
    PolyPiece { lo, hi, center, coeffs: [c0 + d * (c1 + d * c2), (c1 + 2.0 * c2 * d) / b, c2 / (b * b)] }
}

fn recenter(coeffs: [f64; 3], from: f64, to: f64) -> [f64; 3] {
    let e = to - from;
    let [c0, c1, c2] = coeffs;
    [c0 + e * (c1 + e * c2), c1 + 2.0 * c2 * e, c2]
}

/// Sums overlapping pieces into disjoint sorted ones.
fn merge(folded: Vec<PolyPiece>) -> Vec<PolyPiece> {
    let mut cuts: Vec<f64> = folded.iter().flat_map(|p| [p.lo, p.hi]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.len() < 2 {
        return Vec::new();
    }
    let mut out: Vec<PolyPiece> = cuts
        .windows(2)
        .map(|w| PolyPiece { lo: w[0], hi: w[1], center: 0.5 * (w[0] + w[1]), coeffs: [0.0; 3] })
        .collect();
    let mut covered = alloc::vec![false; out.len()];
    for p in &folded {
        let start = cuts.partition_point(|&c| c < p.lo);
        let end = cuts.partition_point(|&c| c < p.hi);
        for k in start..end {
            let q = recenter(p.coeffs, p.center, out[k].center);
            for (acc, v) in out[k].coeffs.iter_mut().zip(q) {
                *acc += v;
            }
            covered[k] = true;
        }
    }
    let mut kept = Vec::with_capacity(out.len());
    for (p, c) in out.drain(..).zip(covered) {
        if c {
            kept.push(p);
        }
    }
    kept
}

impl PeriodizedSpectrum {
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest `|n|` with a nonzero term.
    pub fn truncation_range(&self) -> i64 {
        self.truncation_range
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `‖φ‖²` of the generating profile.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// Disjoint polynomial pieces of `Φ_b` on `[0, 1)`.
    pub fn pieces(&self) -> &[PolyPiece] {
        &self.pieces
    }

    pub fn grid_point(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.values.len() as f64
    }

    /// Piece boundaries of `Φ_b` inside `(0, 1)`, plus both ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0];
        for p in &self.pieces {
            for x in [p.lo, p.hi] {
                if x > *out.last().unwrap() && x < 1.0 {
                    out.push(x);
                }
            }
        }
        out.push(1.0);
        out
    }

    /// `Φ_b(ξ)` for any real `ξ`, reduced mod 1.
    pub fn eval(&self, xi: f64) -> f64 {
        let x = xi - floor(xi);
        let idx = self.pieces.partition_point(|p| p.lo <= x);
        if idx == 0 {
            return 0.0;
        }
        let p = &self.pieces[idx - 1];
        if x < p.hi {
            p.eval(x)
        } else {
            0.0
        }
    }

    fn sample(&self, m: usize) -> Vec<f64> {
        let mut values = alloc::vec![0.0; m];
        let mf = m as f64;
        for p in &self.pieces {
            let start = ceil(p.lo * mf - 0.5).max(0.0) as usize;
            let end = (ceil(p.hi * mf - 0.5).max(0.0) as usize).min(m);
            for (j, v) in values.iter_mut().enumerate().take(end).skip(start) {
                *v = p.eval((j as f64 + 0.5) / mf).max(0.0);
            }
        }
        values
    }

    /// The same spectrum sampled on another grid.
    pub fn resample(&self, grid_size: usize) -> Result<Self> {
        if grid_size < 16 || !is_power_of_two(grid_size) {
            return Err(Error::InvalidArgument("grid size must be a power of two, at least 16".into()));
        }
        let mut out = self.clone();
        out.values = self.sample(grid_size);
        Ok(out)
    }

    /// `Φ̂_b(n) = ∫₀¹ Φ_b(ξ) e^{−2πinξ} dξ`, integrated exactly over the
    /// folded pieces. Refuses `|n| ≥ M/2` like the grid transform would.
    pub fn fourier_coeff(&self, n: i64) -> Result<Complex64> {
        self.check_alias(n)?;
        Ok(self.coeff_unchecked(n))
    }

    pub(crate) fn coeff_unchecked(&self, n: i64) -> Complex64 {
        let f = n as f64;
        self.pieces
            .iter()
            .map(|p| {
                if p.coeffs[1] == 0.0 && p.coeffs[2] == 0.0 && n != 0 {
                    // constant pieces dominate sampled profiles
                    let w = Complex64::new(0.0, -TAU * f);
                    p.coeffs[0] * ((w * p.hi).exp() - (w * p.lo).exp()) / w
                } else {
                    p.fourier(f)
                }
            })
            .sum()
    }

    /// `(1/M) Σ_j Φ_b(ξ_j) e^{−2πinξ_j}`; first order accurate at jumps.
    pub fn grid_fourier_coeff(&self, n: i64) -> Result<Complex64> {
        self.check_alias(n)?;
        let m = self.values.len() as f64;
        let sum: Complex64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| Complex64::from_polar(v, -TAU * n as f64 * (j as f64 + 0.5) / m))
            .sum();
        Ok(sum / m)
    }

    fn check_alias(&self, n: i64) -> Result<()> {
        let m = self.values.len();
        if n.unsigned_abs() as usize >= m / 2 {
            return Err(Error::Aliasing { n, grid_size: m });
        }
        Ok(())
    }

    /// Grid mean of `Φ_b`, which approximates `Φ̂_b(0) = b‖φ‖²`.
    pub fn grid_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Default zero threshold `1e−8 · sup`.
    pub fn default_zero_thresh(&self) -> f64 {
        1e-8 * self.sup()
    }

    pub fn essential_bounds(&self, zero_thresh: f64) -> Result<EssentialBounds> {
        if !(zero_thresh >= 0.0) {
            return Err(Error::InvalidArgument("zero threshold must be nonnegative".into()));
        }
        let mut inf_nonzero = f64::INFINITY;
        let mut sup = 0.0f64;
        let mut min = f64::INFINITY;
        let mut zeros = 0usize;
        for &v in &self.values {
            sup = sup.max(v);
            min = min.min(v);
            if v > zero_thresh {
                inf_nonzero = inf_nonzero.min(v);
            } else {
                zeros += 1;
            }
        }
        Ok(EssentialBounds {
            inf_nonzero,
            sup,
            zero_fraction: zeros as f64 / self.values.len() as f64,
            min,
            grid_size: self.values.len(),
        })
    }

    /// Bounds at `M, 2M, …, 2^levels·M` with the threshold relative to each sup.
    pub fn refinement_study(&self, levels: usize, rel_thresh: f64) -> Result<Vec<EssentialBounds>> {
        let mut out = Vec::with_capacity(levels + 1);
        for k in 0..=levels {
            let ps = self.resample(self.values.len() << k)?;
            out.push(ps.essential_bounds(rel_thresh * ps.sup())?);
        }
        Ok(out)
    }

    pub fn zero_count(&self, zero_thresh: f64) -> Result<ZeroSet> {
        let bounds = self.essential_bounds(zero_thresh)?;
        if bounds.zero_fraction > 0.5 {
            return Err(Error::ZeroSetTooLarge { fraction: bounds.zero_fraction });
        }
        let m = self.values.len();
        let low: Vec<bool> = self.values.iter().map(|&v| v <= zero_thresh).collect();
        let Some(anchor) = low.iter().position(|z| !z) else {
            return Ok(ZeroSet { count: 0, intervals: Vec::new() });
        };
        // walk once around the circle starting after a nonzero point
        let mut intervals = Vec::new();
        let mut start: Option<usize> = None;
        for step in 1..=m {
            let j = (anchor + step) % m;
            match (low[j], start) {
                (true, None) => start = Some(j),
                (false, Some(s)) => {
                    let end = (j + m - 1) % m;
                    intervals.push((self.grid_point(s), self.grid_point(end)));
                    start = None;
                }
                _ => {}
            }
        }
        Ok(ZeroSet { count: intervals.len(), intervals })
    }
}

/// `max_ξ |Φ_{mb}(ξ) − Σ_{k<m} Φ_b((ξ+k)/m)|` over the midpoint grid of size
/// `grid_size`.
pub fn dilation_deviation(profile: &FourierProfile, b: f64, m: usize, grid_size: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("dilation factor must be positive".into()));
    }
    let fine = periodize(profile, b, grid_size, 1.0)?;
    let coarse = periodize(profile, m as f64 * b, grid_size, 1.0)?;
    let mf = m as f64;
    let mut worst = 0.0f64;
    for (j, &v) in coarse.values.iter().enumerate() {
        let xi = coarse.grid_point(j);
        let folded: f64 = (0..m).map(|k| fine.eval((xi + k as f64) / mf)).sum();
        worst = worst.max((v - folded).abs());
    }
    Ok(worst)
}
