//! Explicit generators: a pair of profiles whose frame behaviour flips
//! between two spacings, and the dyadic block construction whose
//! periodization is positive everywhere yet admits no lower frame bound.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, floor, pow, round, sin, sqrt};
use num_complex::Complex64;

use crate::math::{PI, TAU};
use crate::periodization::{periodize, PeriodizedSpectrum};
use crate::quad::{gauss, GAUSS_LEGENDRE_8};
use crate::sets::RealizedSet;
use crate::spectrum::{FourierProfile, Piece, Shape};
use crate::{Error, Result};

fn check_spacings(a: f64, b: f64) -> Result<()> {
    if !(b > 0.0 && a.is_finite()) || !(b < a) {
        return Err(Error::Precondition("spacings must satisfy 0 < b < a".into()));
    }
    Ok(())
}

/// `φ̂ = 1` on `[0, 1/a]`, falling linearly to zero at `1/b`. The translates
/// form a frame sequence at spacing `a` but not at spacing `b`.
pub fn coarse_spacing_frame_profile(a: f64, b: f64) -> Result<FourierProfile> {
    check_spacings(a, b)?;
    let slope = a * b / (b - a);
    FourierProfile::new(vec![
        Piece::new(0.0, 1.0 / a, Shape::Constant(1.0)),
        Piece::new(1.0 / a, 1.0 / b, Shape::Affine { slope, intercept: a / (a - b) }),
    ])
}

/// Profile `φ̂(ξ) = ξ` on `[0, 1/a]` plus a unit plateau on `[1/b, 1/b + ε]`,
/// with the plateau invisible from `(0, ε)` at spacing `a`. The translates
/// form a frame sequence at spacing `b` but not at spacing `a`.
///
/// `ε` is the largest `2^{−j}`, `j ≤ 20`, such that `((0, ε) + n)/a` misses
/// the plateau for every `|n| ≤ ⌈4a⌉ + 16`.
pub fn fine_spacing_frame_profile(a: f64, b: f64) -> Result<(FourierProfile, f64)> {
    check_spacings(a, b)?;
    let q = a / b;
    if fabs(q - round(q)) < 1e-12 * q {
        return Err(Error::Precondition("a/b must not be an integer".into()));
    }
    let n_scan = libm::ceil(4.0 * a) as i64 + 16;
    let plateau = 1.0 / b;
    let eps = (1..=20).map(|j| pow(2.0, -(j as f64))).find(|&eps| {
        (-n_scan..=n_scan).all(|n| {
            let lo = n as f64 / a;
            let hi = (n as f64 + eps) / a;
            hi <= plateau || lo >= plateau + eps
        })
    });
    let Some(eps) = eps else {
        return Err(Error::Precondition("no admissible plateau width down to 2^-20".into()));
    };
    let profile = FourierProfile::new(vec![
        Piece::new(0.0, 1.0 / a, Shape::Affine { slope: 1.0, intercept: 0.0 }),
        Piece::new(plateau, plateau + eps, Shape::Constant(1.0)),
    ])?;
    Ok((profile, eps))
}

/// Blocks `{2^n + k 2^{m_n} : 1 ≤ k ≤ 2^{n − m_n}}` with
/// `m_n = max(⌊αn − √n⌋, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicConstruction {
    alpha: f64,
    n_max: u32,
    m: Vec<u32>,
}

impl DyadicConstruction {
    pub fn new(alpha: f64, n_max: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
        }
        if !(1..=24).contains(&n_max) {
            return Err(Error::InvalidArgument("n_max must lie in 1..=24".into()));
        }
        let m = (0..=n_max)
            .map(|n| {
                let v = floor(alpha * n as f64 - sqrt(n as f64));
                if v > 0.0 {
                    v as u32
                } else {
                    0
                }
            })
            .collect();
        Ok(Self { alpha, n_max, m })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `m_n` for `0 ≤ n ≤ n_max`.
    pub fn m(&self, n: u32) -> u32 {
        self.m[n as usize]
    }

    pub fn block(&self, n: u32) -> Vec<i64> {
        let m = self.m(n);
        let base = 1i64 << n;
        (1..=(1i64 << (n - m))).map(|k| base + (k << m)).collect()
    }

    /// Union of the blocks `1..=n_max`, increasing.
    pub fn points(&self) -> Vec<i64> {
        (1..=self.n_max).flat_map(|n| self.block(n)).collect()
    }
}

/// The unit-norm block polynomial `f_n(ξ) = 2^{(m−n)/2} Σ_k e^{2πi(2^n + k2^m)ξ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPolynomial {
    pub n: u32,
    pub m: u32,
    pub amplitude: f64,
    pub frequencies: Vec<i64>,
}

impl BlockPolynomial {
    pub fn new(construction: &DyadicConstruction, n: u32) -> Result<Self> {
        if n == 0 || n > construction.n_max() {
            return Err(Error::InvalidArgument("block index out of range".into()));
        }
        let m = construction.m(n);
        Ok(Self { n, m, amplitude: pow(2.0, (m as f64 - n as f64) / 2.0), frequencies: construction.block(n) })
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitude * self.amplitude * self.frequencies.len() as f64
    }

    /// Direct summation.
    pub fn eval(&self, xi: f64) -> Complex64 {
        self.frequencies.iter().map(|&f| Complex64::from_polar(self.amplitude, TAU * (f as f64) * xi)).sum()
    }

    /// `|f_n(ξ)|` from the Dirichlet kernel,
    /// `2^{(m−n)/2} |sin(πLt)/sin(πt)|` with `t = 2^m ξ mod 1`, `L = 2^{n−m}`.
    pub fn modulus(&self, xi: f64) -> f64 {
        let len = (1u64 << (self.n - self.m)) as f64;
        let x = pow(2.0, self.m as f64) * xi;
        let mut t = x - floor(x);
        if t > 0.5 {
            t -= 1.0;
        }
        if fabs(t) < 1e-9 {
            let s = PI * t;
            return self.amplitude * len * fabs(1.0 - (len * len - 1.0) * s * s / 6.0);
        }
        self.amplitude * fabs(sin(PI * len * t) / sin(PI * t))
    }

    /// `|sin(2^{n−1}θ) / sin(2^{m−1}θ)|` scaled by the amplitude, `θ = 2πξ`.
    pub fn sine_ratio_modulus(&self, xi: f64) -> f64 {
        let theta = TAU * xi;
        let num = sin(pow(2.0, self.n as f64 - 1.0) * theta);
        let den = sin(pow(2.0, self.m as f64 - 1.0) * theta);
        self.amplitude * fabs(num / den)
    }

    /// `2^{(n − m − √n/2)/2}`, the cut between `E_n` and `F_n`.
    pub fn threshold(&self) -> f64 {
        let n = self.n as f64;
        pow(2.0, (n - self.m as f64 - 0.5 * sqrt(n)) / 2.0)
    }
}

/// `Φ = 2^{−K}` with `K(ξ)` the largest `k ≤ n_max` such that
/// `ξ ∈ F_k = {|f_k| ≥ threshold}`, `F_0 = 𝕋`, plus `φ̂ = Φ^{1/2} χ_[0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSpectrum {
    pub construction: DyadicConstruction,
    /// `K` on the midpoint grid.
    pub level: Vec<u32>,
    pub profile: FourierProfile,
    /// `Φ_1` of `profile`, which equals `Φ` cell by cell.
    pub spectrum: PeriodizedSpectrum,
    /// Grid measure of `F_n`, index `n − 1`.
    pub f_measure: Vec<f64>,
    /// Grid value of `∫_{E_n} |f_n|²`, index `n − 1`.
    pub e_energy: Vec<f64>,
}

pub fn dyadic_spectrum(alpha: f64, n_max: u32, grid_size: usize) -> Result<DyadicSpectrum> {
    let construction = DyadicConstruction::new(alpha, n_max)?;
    let required = 1usize << (n_max + 2);
    if grid_size < required || !grid_size.is_power_of_two() {
        return Err(Error::GridTooCoarse { grid: grid_size, required });
    }
    let mf = grid_size as f64;
    let mut level = vec![0u32; grid_size];
    let mut f_measure = Vec::with_capacity(n_max as usize);
    let mut e_energy = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let f = BlockPolynomial::new(&construction, n)?;
        let cut = f.threshold();
        let mut inside = 0usize;
        let mut energy = 0.0;
        for (j, k) in level.iter_mut().enumerate() {
            let v = f.modulus((j as f64 + 0.5) / mf);
            if v >= cut {
                inside += 1;
                *k = n;
            } else {
                energy += v * v;
            }
        }
        f_measure.push(inside as f64 / mf);
        e_energy.push(energy / mf);
    }
    let samples: Vec<f64> = level.iter().map(|&k| pow(2.0, -(k as f64) / 2.0)).collect();
    let profile = FourierProfile::new(vec![Piece::new(0.0, 1.0, Shape::Sampled(samples))])?;
    let spectrum = periodize(&profile, 1.0, grid_size, 1.0)?;
    Ok(DyadicSpectrum { construction, level, profile, spectrum, f_measure, e_energy })
}

impl DyadicSpectrum {
    /// `Φ` on cell `j`.
    pub fn phi(&self, j: usize) -> f64 {
        pow(2.0, -(self.level[j] as f64))
    }

    /// `∫₀¹ |f_n|² Φ`, 8-point Gauss per grid cell.
    pub fn weighted_energy(&self, f: &BlockPolynomial) -> f64 {
        let m = self.level.len();
        let h = 1.0 / m as f64;
        (0..m)
            .map(|j| {
                let lo = j as f64 * h;
                let cell: f64 = gauss(&GAUSS_LEGENDRE_8, lo, lo + h, |x| {
                    let v = f.modulus(x);
                    v * v
                });
                cell * self.phi(j)
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DyadicRow {
    pub n: u32,
    pub m: u32,
    pub norm_sq: f64,
    /// `∫ |f_n|² Φ`.
    pub weighted_energy: f64,
    pub f_measure: f64,
    /// `measure(F_n) / 2^{m − n + √n/2}`.
    pub f_measure_ratio: f64,
    pub e_energy: f64,
    /// `∫_{E_n}|f_n|² / 2^{−√n/2}`.
    pub e_energy_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DyadicVerification {
    pub alpha: f64,
    pub grid_size: usize,
    pub rows: Vec<DyadicRow>,
    pub min_phi: f64,
    /// Last weighted energy below half the first.
    pub energy_collapses: bool,
    /// Fitted exponent of `D_Λ(2^p)` over the upper half of the octaves.
    pub density_exponent: f64,
    pub density_fit_range: (u32, u32),
    /// `1 − α + 0.1`.
    pub density_bound: f64,
    pub density_ok: bool,
}

/// Weighted energies `w_n = ∫|f_n|²Φ` for `n` in `n_lo..=n_hi`, the positivity
/// of `Φ` and the density exponent of the realized `Λ`.
pub fn verify_dyadic_counterexample(alpha: f64, n_lo: u32, n_hi: u32, grid_size: usize) -> Result<DyadicVerification> {
    if n_lo == 0 || n_lo >= n_hi {
        return Err(Error::InvalidArgument("need 1 <= n_lo < n_hi".into()));
    }
    let ds = dyadic_spectrum(alpha, n_hi, grid_size)?;
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let f = BlockPolynomial::new(&ds.construction, n)?;
        let nf = n as f64;
        let fm = ds.f_measure[n as usize - 1];
        let ee = ds.e_energy[n as usize - 1];
        rows.push(DyadicRow {
            n,
            m: f.m,
            norm_sq: f.norm_sq(),
            weighted_energy: ds.weighted_energy(&f),
            f_measure: fm,
            f_measure_ratio: fm / pow(2.0, f.m as f64 - nf + 0.5 * sqrt(nf)),
            e_energy: ee,
            e_energy_ratio: ee / pow(2.0, -0.5 * sqrt(nf)),
        });
    }
    let min_phi = (0..ds.level.len()).map(|j| ds.phi(j)).fold(f64::INFINITY, f64::min);
    let energy_collapses = rows[rows.len() - 1].weighted_energy < 0.5 * rows[0].weighted_energy;
    let set = RealizedSet::from_points(ds.construction.points().into_iter().map(|p| p as f64).collect(), false)?;
    let p_lo = (n_hi / 2).max(1);
    let p_hi = n_hi - 1;
    let xs: Vec<f64> = (p_lo..=p_hi).map(|p| pow(2.0, p as f64)).collect();
    let density_exponent = set.density_exponent(&xs)?;
    let density_bound = 1.0 - alpha + 0.1;
    Ok(DyadicVerification {
        alpha,
        grid_size,
        rows,
        min_phi,
        energy_collapses,
        density_exponent,
        density_fit_range: (p_lo, p_hi),
        density_bound,
        density_ok: density_exponent <= density_bound,
    })
}
