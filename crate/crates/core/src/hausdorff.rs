//! Dyadic covers of small-value sets of `Φ_b`, trigonometric polynomial
//! inequalities on `H_Λ`, and the fractal-exactness evidence rule.

use alloc::string::String;
use alloc::vec::Vec;

use libm::{log, pow};
use num_complex::Complex64;

use crate::classify::{classify, Budgets, Classification};
use crate::math::{slope, TAU};
use crate::periodization::{periodize, PeriodizedSpectrum};
use crate::sets::{RealizedSet, TranslationSet};
use crate::spectrum::FourierProfile;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoverEstimate {
    pub alpha: f64,
    pub eps: f64,
    /// Covering intervals `[lo, hi)` at the chosen depth.
    pub intervals: Vec<(f64, f64)>,
    /// `Σ ℓ(I)^α`.
    pub measure_sum: f64,
    pub depth: u32,
    /// `ε ≥ sup Φ_b`, so the whole circle is covered.
    pub full_circle: bool,
}

/// Cheapest dyadic cover of `{ξ_j : Φ_b(ξ_j) ≤ ε}` over `depths`, dropping
/// cyclically isolated grid points.
pub fn hausdorff_sublevel(
    ps: &PeriodizedSpectrum,
    alpha: f64,
    eps: f64,
    depths: core::ops::RangeInclusive<u32>,
) -> Result<CoverEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
    }
    let values = ps.values();
    let m = values.len();
    let log_m = m.trailing_zeros();
    if depths.is_empty() || *depths.end() > log_m {
        return Err(Error::InvalidArgument("depths must be a nonempty range within the grid resolution".into()));
    }
    if eps >= ps.sup() {
        return Ok(CoverEstimate {
            alpha,
            eps,
            intervals: alloc::vec![(0.0, 1.0)],
            measure_sum: 1.0,
            depth: 0,
            full_circle: true,
        });
    }
    let low: Vec<bool> = values.iter().map(|&v| v <= eps).collect();
    let kept: Vec<bool> = (0..m).map(|j| low[j] && (low[(j + m - 1) % m] || low[(j + 1) % m])).collect();
    let mut best: Option<(f64, u32, Vec<usize>)> = None;
    for d in depths {
        let shift = log_m - d;
        let mut boxes: Vec<usize> = Vec::new();
        for (j, &k) in kept.iter().enumerate() {
            if k {
                let b = j >> shift;
                if boxes.last() != Some(&b) {
                    boxes.push(b);
                }
            }
        }
        let sum = boxes.len() as f64 * pow(2.0, -(d as f64) * alpha);
        if best.as_ref().is_none_or(|(s, _, _)| sum < *s) {
            best = Some((sum, d, boxes));
        }
    }
    let (measure_sum, depth, boxes) = best.expect("nonempty depth range");
    let len = pow(2.0, -(depth as f64));
    let intervals = boxes.iter().map(|&b| (b as f64 * len, (b + 1) as f64 * len)).collect();
    Ok(CoverEstimate { alpha, eps, intervals, measure_sum, depth, full_circle: false })
}

/// Fourier coefficients of `|f|²` for `f = Σ c_λ e^{2πiλξ}`, as `(n, F̂(n))`
/// sorted by `n`.
pub fn squared_modulus_coefficients(support: &[i64], coeffs: &[Complex64]) -> Vec<(i64, Complex64)> {
    let mut acc: alloc::collections::BTreeMap<i64, Complex64> = alloc::collections::BTreeMap::new();
    for (&l, &cl) in support.iter().zip(coeffs) {
        for (&k, &ck) in support.iter().zip(coeffs) {
            *acc.entry(l - k).or_insert(Complex64::new(0.0, 0.0)) += cl * ck.conj();
        }
    }
    acc.into_iter().collect()
}

fn normalize(coeffs: &[Complex64]) -> Result<(Vec<Complex64>, bool)> {
    let norm = libm::sqrt(coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>());
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("coefficients vanish".into()));
    }
    let renorm = (norm - 1.0).abs() > 1e-12;
    Ok((coeffs.iter().map(|c| c / norm).collect(), renorm))
}

fn check_support(set: &RealizedSet, support: &[i64], coeffs: &[Complex64]) -> Result<()> {
    if support.len() != coeffs.len() || support.is_empty() {
        return Err(Error::InvalidArgument("support and coefficients must be nonempty and of equal length".into()));
    }
    for &s in support {
        if set.points().binary_search_by(|p| p.total_cmp(&(s as f64))).is_err() {
            return Err(Error::InvalidArgument(alloc::format!("frequency {s} is not in the set")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MassCheck {
    /// `Σ_{n∈J} |F̂(n)|`.
    pub lhs: f64,
    /// `D_Λ(|J|)`, `|J|` the number of integers in `J`.
    pub rhs: f64,
    pub pass: bool,
    pub normalized: bool,
}

/// `Σ_{n ∈ J} |F̂(n)| ≤ D_Λ(|J|)` for `F = |f|²`, `f` of unit norm with
/// frequencies in `Λ`, `J = [j_lo, j_hi] ∩ ℤ`.
pub fn autocorrelation_mass_check(
    set: &RealizedSet,
    support: &[i64],
    coeffs: &[Complex64],
    j_lo: i64,
    j_hi: i64,
) -> Result<MassCheck> {
    if j_hi < j_lo {
        return Err(Error::InvalidArgument("empty integer interval".into()));
    }
    check_support(set, support, coeffs)?;
    let (c, normalized) = normalize(coeffs)?;
    let lhs: f64 = squared_modulus_coefficients(support, &c)
        .into_iter()
        .filter(|(n, _)| *n >= j_lo && *n <= j_hi)
        .map(|(_, v)| v.norm())
        .sum();
    let rhs = set.density((j_hi - j_lo + 1) as f64)? as f64;
    Ok(MassCheck { lhs, rhs, pass: lhs <= rhs + 1e-12, normalized })
}

/// `∫_lo^{lo+len} |f|²`, exact from the coefficients of `|f|²`.
pub fn interval_energy(support: &[i64], coeffs: &[Complex64], lo: f64, len: f64) -> f64 {
    squared_modulus_coefficients(support, coeffs)
        .into_iter()
        .map(|(n, v)| {
            if n == 0 {
                v.re * len
            } else {
                let w = Complex64::new(0.0, TAU * n as f64);
                (v * ((w * (lo + len)).exp() - (w * lo).exp()) / w).re
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LocalEnergy {
    pub energy: f64,
    pub length: f64,
    pub density: usize,
    /// `∫_I |f|² / (ℓ(I) D_Λ(1/ℓ(I)))`.
    pub ratio: f64,
}

/// Local energy of a unit-norm `f ∈ H_Λ` on `I = [lo, lo + len)`.
pub fn local_energy_check(
    set: &RealizedSet,
    support: &[i64],
    coeffs: &[Complex64],
    lo: f64,
    len: f64,
) -> Result<LocalEnergy> {
    if !(len > 0.0 && len <= 1.0) {
        return Err(Error::InvalidArgument("interval length must lie in (0, 1]".into()));
    }
    check_support(set, support, coeffs)?;
    let (c, _) = normalize(coeffs)?;
    let energy = interval_energy(support, &c, lo, len);
    let density = set.density(1.0 / len)?;
    Ok(LocalEnergy { energy, length: len, density, ratio: energy / (len * density as f64) })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LocalEnergyScan {
    pub lengths: Vec<f64>,
    /// Largest ratio over the inputs at each length.
    pub max_ratio: Vec<f64>,
    /// Slope of `ln max_ratio` against `ln length`.
    pub slope: f64,
}

/// Max local-energy ratio over `inputs` on intervals centred at `center`,
/// one per length.
pub fn local_energy_scan(
    set: &RealizedSet,
    inputs: &[(Vec<i64>, Vec<Complex64>)],
    center: f64,
    lengths: &[f64],
) -> Result<LocalEnergyScan> {
    if inputs.is_empty() || lengths.len() < 2 {
        return Err(Error::InvalidArgument("need inputs and at least two lengths".into()));
    }
    let mut max_ratio = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let mut best = 0.0f64;
        for (s, c) in inputs {
            best = best.max(local_energy_check(set, s, c, center - 0.5 * len, len)?.ratio);
        }
        max_ratio.push(best);
    }
    let lx: Vec<f64> = lengths.iter().map(|l| log(*l)).collect();
    let ly: Vec<f64> = max_ratio.iter().map(|r| log(*r)).collect();
    Ok(LocalEnergyScan { lengths: lengths.to_vec(), max_ratio, slope: slope(&lx, &ly) })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Hypothesis {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FractalEvidence {
    pub a: f64,
    pub hypotheses: Vec<Hypothesis>,
    /// First failing hypothesis, if any.
    pub failed: Option<&'static str>,
    /// Sublevel cover sums at `α = 2a − 1` for decreasing `ε`.
    pub cover_sums: Vec<(f64, f64)>,
    /// Gram-trend classification, run only when every hypothesis holds.
    pub classification: Option<Classification>,
    pub a_trend: Vec<f64>,
    pub note: String,
}

/// Checks decay `|φ(x)| = O(x^{−a−ε})`, the sublevel cover trend at
/// `α = 2a − 1` and `D_Λ(x) ≲ x^{2(1−a)}`; when all hold, runs the Gram trend
/// rule to look for a stable lower bound.
pub fn fractal_exactness_evidence(
    profile: &FourierProfile,
    b: f64,
    set: &TranslationSet,
    a: f64,
    budgets: &Budgets,
) -> Result<FractalEvidence> {
    if !(a > 0.5 && a < 1.0) {
        return Err(Error::InvalidArgument("decay exponent must lie in (1/2, 1)".into()));
    }
    let mut hypotheses = Vec::new();
    let decay = profile.time_decay_exponent(4..10, 64);
    hypotheses.push(Hypothesis { name: "time-decay", value: decay, threshold: a, holds: decay > a });

    let ps = periodize(profile, b, budgets.grid_size, 1.0)?;
    let alpha = 2.0 * a - 1.0;
    let sup = ps.sup();
    let log_m = ps.grid_size().trailing_zeros();
    let mut cover_sums = Vec::new();
    for k in 1..=4 {
        let eps = sup * pow(10.0, -(k as f64));
        cover_sums.push((eps, hausdorff_sublevel(&ps, alpha, eps, 0..=log_m)?.measure_sum));
    }
    let first = cover_sums[0].1;
    let last = cover_sums[cover_sums.len() - 1].1;
    let shrinks = last == 0.0 || (last < 0.5 * first && cover_sums.windows(2).all(|w| w[1].1 <= w[0].1));
    hypotheses.push(Hypothesis {
        name: "sublevel-cover-shrinks",
        value: if first > 0.0 { last / first } else { 0.0 },
        threshold: 0.5,
        holds: shrinks,
    });

    let realized = set.realize()?;
    let span = realized.span();
    let xs: Vec<f64> = (0..5).map(|k| span / pow(2.0, (k + 2) as f64)).filter(|x| *x >= 2.0).collect();
    let exponent = if realized.is_complete() { 0.0 } else { realized.density_exponent(&xs)? };
    let bound = 2.0 * (1.0 - a) + 0.1;
    hypotheses.push(Hypothesis {
        name: "density-exponent",
        value: exponent,
        threshold: bound,
        holds: exponent <= bound,
    });

    let failed = hypotheses.iter().find(|h| !h.holds).map(|h| h.name);
    let mut out = FractalEvidence {
        a,
        hypotheses,
        failed,
        cover_sums,
        classification: None,
        a_trend: Vec::new(),
        note: String::new(),
    };
    if failed.is_some() {
        out.note = "hypothesis failed; no conclusion drawn".into();
        return Ok(out);
    }
    let report = classify(profile, b, set, budgets)?;
    out.a_trend = report.a_trend.clone();
    out.classification = Some(report.classification);
    out.note = match report.classification {
        Classification::ExactFrameSequence | Classification::Orthonormal => "lower bound stable across windows".into(),
        _ => "hypotheses hold but the lower bound does not stabilize".into(),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{Piece, Shape};
    use alloc::vec;

    #[test]
    fn constant_spectrum_has_empty_cover() {
        let ps = periodize(&FourierProfile::indicator(0.0, 1.0).unwrap(), 1.0, 256, 1.0).unwrap();
        let c = hausdorff_sublevel(&ps, 0.5, 0.1, 0..=8).unwrap();
        assert_eq!(c.measure_sum, 0.0);
        assert!(c.intervals.is_empty());
        assert!(hausdorff_sublevel(&ps, 0.5, 2.0, 0..=8).unwrap().full_circle);
    }

    #[test]
    fn cover_shrinks_with_level() {
        let tri = FourierProfile::new(vec![
            Piece::new(0.0, 0.5, Shape::Constant(1.0)),
            Piece::new(0.5, 1.0, Shape::Affine { slope: -2.0, intercept: 2.0 }),
        ])
        .unwrap();
        let ps = periodize(&tri, 1.0, 1 << 12, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..6 {
            let c = hausdorff_sublevel(&ps, 0.5, pow(10.0, -(k as f64)), 0..=12).unwrap();
            assert!(c.measure_sum <= prev);
            prev = c.measure_sum;
        }
        assert!(prev < 0.2);
    }

    #[test]
    fn mass_check_on_a_character() {
        let set = RealizedSet::from_points(vec![0.0, 3.0, 7.0], true).unwrap();
        let r = autocorrelation_mass_check(&set, &[3], &[Complex64::new(2.0, 0.0)], -1, 1).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && r.pass && r.normalized);
    }

    #[test]
    fn interval_energy_of_a_character_is_length() {
        let e = interval_energy(&[5], &[Complex64::new(0.0, 1.0)], 0.2, 0.3);
        assert!((e - 0.3).abs() < 1e-15);
        let whole =
            interval_energy(&[0, 1, 4], &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), 0.0.into()], 0.37, 1.0);
        assert!((whole - 1.0).abs() < 1e-14);
    }
}
