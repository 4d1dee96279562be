//! Finite Gram matrices `G_{ij} = ⟨τ_{λ_i b} φ, τ_{λ_j b} φ⟩` and frame bound
//! estimates from their extremal eigenvalues.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use libm::ceil;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index;

use crate::math::TAU;
use crate::periodization::{periodize, PeriodizedSpectrum};
use crate::quad::gauss_composite;
use crate::rng::trial_rng;
use crate::spectrum::FourierProfile;
use crate::{Error, Result};

/// Largest dimension handed to the eigen-solver.
pub const MAX_DIM: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramOptions {
    /// Target accuracy of each entry.
    pub tol: f64,
    /// Share of distinct shifts re-derived by quadrature.
    pub cross_check_fraction: f64,
    /// Upper limit on the number of recomputed shifts.
    pub cross_check_cap: usize,
    pub seed: u64,
}

impl Default for GramOptions {
    fn default() -> Self {
        Self { tol: 1e-10, cross_check_fraction: 0.05, cross_check_cap: 128, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramOperator {
    indices: Vec<i64>,
    b: f64,
    norm_sq: f64,
    matrix: DMatrix<Complex64>,
    /// Shifts that were cross-checked and the largest deviation seen.
    checked: Vec<i64>,
    max_check_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FrameBounds {
    pub a_est: f64,
    pub b_est: f64,
    pub numerical_rank: usize,
    pub dimension: usize,
    pub min_eigenvalue: f64,
}

/// `⟨τ_a φ, φ⟩` by composite Gauss quadrature over the squared profile, with
/// panels fine enough to resolve the oscillation. Independent of the closed
/// forms used on the fast path.
pub fn quadrature_autocorrelation(profile: &FourierProfile, shift: f64) -> Complex64 {
    profile
        .squared_pieces()
        .iter()
        .map(|p| {
            let panels = ceil(2.0 * shift.abs() * (p.hi - p.lo)) as usize + 1;
            gauss_composite(p.lo, p.hi, panels, |x| Complex64::from_polar(p.eval(x), -TAU * shift * x))
        })
        .sum()
}

fn grid_for_span(span: i64) -> usize {
    let need = (2 * span as usize + 2).max(16);
    need.next_power_of_two()
}

/// Gram matrix of the translates indexed by `indices` at spacing `b`.
///
/// Entries come from the exact Fourier coefficients of `Φ_b`; a random
/// `cross_check_fraction` of the distinct shifts (at least one, at most
/// `cross_check_cap`) is recomputed
/// by quadrature and must agree within `10·tol·max(1, ‖φ‖²)`.
pub fn build_gram(profile: &FourierProfile, b: f64, indices: &[i64], opts: &GramOptions) -> Result<GramOperator> {
    if indices.is_empty() {
        return Err(Error::InvalidArgument("index set is empty".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoint(w[0] as f64));
    }
    let span = sorted[sorted.len() - 1] - sorted[0];
    let ps = periodize(profile, b, grid_for_span(span), 1.0)?;
    build_from_spectrum(&ps, profile, indices, opts)
}

/// As [`build_gram`], reusing a spectrum already computed for `profile`.
pub fn build_from_spectrum(
    ps: &PeriodizedSpectrum,
    profile: &FourierProfile,
    indices: &[i64],
    opts: &GramOptions,
) -> Result<GramOperator> {
    let n = indices.len();
    let b = ps.b();
    let mut shifts: BTreeMap<i64, Complex64> = BTreeMap::new();
    for &i in indices {
        for &j in indices {
            if i >= j {
                shifts.entry(i - j).or_insert(Complex64::new(0.0, 0.0));
            }
        }
    }
    for (d, v) in shifts.iter_mut() {
        *v = ps.coeff_unchecked(*d) / b;
    }
    let keys: Vec<i64> = shifts.keys().cloned().collect();
    let want =
        (ceil(keys.len() as f64 * opts.cross_check_fraction) as usize).min(opts.cross_check_cap).clamp(1, keys.len());
    let mut rng = trial_rng(opts.seed, 0x6772_616d);
    let picks = index::sample(&mut rng, keys.len(), want);
    let limit = 10.0 * opts.tol * ps.norm_sq().max(1.0);
    let mut checked = Vec::with_capacity(want);
    let mut max_check_deviation = 0.0f64;
    for k in picks.iter() {
        let d = keys[k];
        let oracle = quadrature_autocorrelation(profile, d as f64 * b);
        let dev = (oracle - shifts[&d]).norm();
        if dev > limit {
            return Err(Error::Inconsistent(format!(
                "gram entry for shift {d}: fast path {}, quadrature {}, deviation {dev:e}",
                shifts[&d], oracle
            )));
        }
        max_check_deviation = max_check_deviation.max(dev);
        checked.push(d);
    }
    checked.sort_unstable();
    let matrix = DMatrix::from_fn(n, n, |r, c| {
        let d = indices[r] - indices[c];
        if d >= 0 {
            shifts[&d]
        } else {
            shifts[&-d].conj()
        }
    });
    Ok(GramOperator { indices: indices.to_vec(), b, norm_sq: ps.norm_sq(), matrix, checked, max_check_deviation })
}

impl GramOperator {
    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dimension(&self) -> usize {
        self.indices.len()
    }

    /// `‖φ‖²`, the common diagonal.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn cross_checked_shifts(&self) -> &[i64] {
        &self.checked
    }

    pub fn max_cross_check_deviation(&self) -> f64 {
        self.max_check_deviation
    }

    /// `‖Σ c_i τ_{λ_i b} φ‖² = cᵀ G c̄`.
    pub fn quadratic_form(&self, coeffs: &[Complex64]) -> Result<f64> {
        if coeffs.len() != self.dimension() {
            return Err(Error::InvalidArgument("coefficient length does not match the index set".into()));
        }
        let c = DVector::from_column_slice(coeffs);
        let gc = &self.matrix * c.map(|z| z.conj());
        Ok(c.iter().zip(gc.iter()).map(|(a, b)| a * b).sum::<Complex64>().re)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dimension();
        if n > MAX_DIM {
            return Err(Error::WindowTooLarge { dim: n, cap: MAX_DIM });
        }
        let mut ev: Vec<f64> = if self.matrix.iter().all(|z| z.im == 0.0) {
            self.matrix.map(|z| z.re).symmetric_eigenvalues().iter().cloned().collect()
        } else {
            self.matrix.clone().symmetric_eigenvalues().iter().cloned().collect()
        };
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// `B = λ_max`, `A` the smallest eigenvalue above `kernel_tol·λ_max`.
    pub fn frame_bound_estimates(&self, kernel_tol: f64) -> Result<FrameBounds> {
        if !(kernel_tol >= 0.0) {
            return Err(Error::InvalidArgument("kernel tolerance must be nonnegative".into()));
        }
        bounds_from_eigenvalues(&self.eigenvalues()?, kernel_tol)
    }
}

pub fn bounds_from_eigenvalues(ev: &[f64], kernel_tol: f64) -> Result<FrameBounds> {
    let top = ev.last().cloned().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(Error::Degenerate);
    }
    let cut = kernel_tol * top;
    let kept: Vec<f64> = ev.iter().cloned().filter(|&v| v > cut).collect();
    Ok(FrameBounds {
        a_est: kept[0],
        b_est: top,
        numerical_rank: kept.len(),
        dimension: ev.len(),
        min_eigenvalue: ev[0],
    })
}

/// `(A, B) = (inf_nonzero / b, sup / b)` with the default zero threshold.
pub fn bounds_from_phi(ps: &PeriodizedSpectrum) -> Result<(f64, f64)> {
    let e = ps.essential_bounds(ps.default_zero_thresh())?;
    Ok((e.inf_nonzero / ps.b(), e.sup / ps.b()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
}

/// Compares `cᵀ G c̄` with `(1/b) ∫₀¹ |Σ c_k e^{−2πiλ_k ξ}|² Φ_b(ξ) dξ`; the
/// integral runs over the pieces of `Φ_b` with composite Gauss panels.
pub fn weighted_norm_identity_check(
    profile: &FourierProfile,
    b: f64,
    indices: &[i64],
    coeffs: &[Complex64],
) -> Result<NormIdentity> {
    if indices.len() != coeffs.len() {
        return Err(Error::InvalidArgument("coefficient length does not match the index set".into()));
    }
    let g = build_gram(profile, b, indices, &GramOptions::default())?;
    let lhs = g.quadratic_form(coeffs)?;
    let ps = periodize(profile, b, 16, 1.0)?;
    let span = indices.iter().max().unwrap() - indices.iter().min().unwrap();
    let trig = |xi: f64| -> f64 {
        let s: Complex64 =
            indices.iter().zip(coeffs).map(|(&k, &c)| c * Complex64::from_polar(1.0, -TAU * k as f64 * xi)).sum();
        s.norm_sqr()
    };
    let mut rhs = 0.0;
    for p in ps.pieces() {
        let panels = ceil(2.0 * span as f64 * (p.hi - p.lo)) as usize + 1;
        rhs += gauss_composite(p.lo, p.hi, panels, |x| trig(x) * p.eval(x));
    }
    rhs /= b;
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok(NormIdentity { lhs, rhs, deviation: (lhs - rhs).abs() / scale })
}
