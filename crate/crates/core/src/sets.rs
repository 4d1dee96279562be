//! Translation sets `Λ`, the density function `D_Λ(x) = sup_t |Λ ∩ [t, t+x]|`
//! and the upper-bound tests that combine it with an envelope's `G`.
//!
//! Infinite sets are realized on finite windows. Every window-derived verdict
//! is an asymptotic trend over that window, not a proof.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{exp, log, pow, round};

use crate::constructions::DyadicConstruction;
use crate::math::slope;
use crate::spectrum::{EnvelopeKind, TimeEnvelope};
use crate::{Error, Result};

/// Generator description of `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub enum TranslationSet {
    /// Finite set of reals, taken as the whole of `Λ`.
    Explicit(Vec<f64>),
    /// `ℤ ∩ [−n, n]`.
    Integers { n: i64 },
    /// `mℤ ∩ [−n, n]`.
    Subgroup { m: i64, n: i64 },
    /// `{1, …, n}`.
    Naturals { n: i64 },
    /// `{k^exponent : 0 ≤ k ≤ n_max}`.
    Powers { exponent: u32, n_max: i64 },
    /// `{2^k : 0 ≤ k ≤ n_max}`.
    PowersOfTwo { n_max: u32 },
    /// The dyadic block set with parameter `alpha` up to block `n_max`.
    Dyadic { alpha: f64, n_max: u32 },
}

/// Sorted finite realization of a [`TranslationSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedSet {
    points: Vec<f64>,
    /// The points are all of `Λ`, not a window of an infinite set.
    complete: bool,
}

impl TranslationSet {
    pub fn squares(n_max: i64) -> Self {
        TranslationSet::Powers { exponent: 2, n_max }
    }

    pub fn realize(&self) -> Result<RealizedSet> {
        let ints = |v: Vec<i64>| v.into_iter().map(|x| x as f64).collect::<Vec<f64>>();
        let nonneg = |n: i64| {
            if n < 0 {
                Err(Error::InvalidArgument("window size must be nonnegative".into()))
            } else {
                Ok(n)
            }
        };
        match self {
            TranslationSet::Explicit(pts) => RealizedSet::from_points(pts.clone(), true),
            TranslationSet::Integers { n } => {
                let n = nonneg(*n)?;
                RealizedSet::from_points(ints((-n..=n).collect()), false)
            }
            TranslationSet::Subgroup { m, n } => {
                if *m <= 0 {
                    return Err(Error::InvalidArgument("subgroup step must be positive".into()));
                }
                let n = nonneg(*n)?;
                let k = n / m;
                RealizedSet::from_points(ints((-k..=k).map(|j| j * m).collect()), false)
            }
            TranslationSet::Naturals { n } => {
                let n = nonneg(*n)?;
                RealizedSet::from_points(ints((1..=n).collect()), false)
            }
            TranslationSet::Powers { exponent, n_max } => {
                if *exponent == 0 {
                    return Err(Error::InvalidArgument("exponent must be positive".into()));
                }
                let n = nonneg(*n_max)?;
                let pts = (0..=n)
                    .map(|k| k.checked_pow(*exponent).ok_or_else(|| Error::InvalidArgument("power overflows".into())))
                    .collect::<Result<Vec<i64>>>()?;
                RealizedSet::from_points(ints(pts), false)
            }
            TranslationSet::PowersOfTwo { n_max } => {
                if *n_max > 62 {
                    return Err(Error::InvalidArgument("n_max above 62 overflows".into()));
                }
                RealizedSet::from_points(ints((0..=*n_max).map(|k| 1i64 << k).collect()), false)
            }
            TranslationSet::Dyadic { alpha, n_max } => {
                let c = DyadicConstruction::new(*alpha, *n_max)?;
                RealizedSet::from_points(ints(c.points()), false)
            }
        }
    }

    /// Realized points as integers; fails for non-integer sets.
    pub fn integers(&self) -> Result<Vec<i64>> {
        self.realize()?.integers()
    }
}

impl RealizedSet {
    /// Sorts the points and rejects duplicates and non-finite values.
    pub fn from_points(mut points: Vec<f64>, complete: bool) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("points must be finite".into()));
        }
        points.sort_by(f64::total_cmp);
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0]));
        }
        Ok(Self { points, complete })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// `max − min` of the realized points.
    pub fn span(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    pub fn integers(&self) -> Result<Vec<i64>> {
        self.points
            .iter()
            .map(|&p| if round(p) == p && p.abs() < 9.0e15 { Ok(p as i64) } else { Err(Error::NonInteger) })
            .collect()
    }

    pub fn shifted(&self, s: f64) -> Result<Self> {
        Self::from_points(self.points.iter().map(|p| p + s).collect(), self.complete)
    }

    /// Points in the closed interval `[lo, hi]`.
    pub fn in_interval(&self, lo: f64, hi: f64) -> &[f64] {
        let a = self.points.partition_point(|&p| p < lo);
        let b = self.points.partition_point(|&p| p <= hi);
        &self.points[a..b.max(a)]
    }

    /// `D_Λ(x)`, by a two-pointer sweep over closed intervals starting at
    /// each point. Windows of infinite sets must span at least `x`.
    pub fn density(&self, x: f64) -> Result<usize> {
        if !(x > 0.0) {
            return Err(Error::InvalidArgument("density length must be positive".into()));
        }
        if !self.complete && self.span() < x {
            return Err(Error::WindowTooShort { x, span: self.span() });
        }
        let p = &self.points;
        let mut best = 0usize;
        let mut j = 0usize;
        for i in 0..p.len() {
            if j < i {
                j = i;
            }
            let slack = 1e-12 * (1.0 + x.abs() + p[i].abs());
            while j < p.len() && p[j] - p[i] <= x + slack {
                j += 1;
            }
            best = best.max(j - i);
        }
        Ok(best)
    }

    /// Least-squares slope of `ln D_Λ(x)` against `ln x`.
    pub fn density_exponent(&self, xs: &[f64]) -> Result<f64> {
        if xs.len() < 2 {
            return Err(Error::InvalidArgument("need at least two lengths".into()));
        }
        let mut lx = Vec::with_capacity(xs.len());
        let mut ly = Vec::with_capacity(xs.len());
        for &x in xs {
            lx.push(log(x));
            ly.push(log(self.density(x)? as f64));
        }
        Ok(slope(&lx, &ly))
    }

    /// Window diagnostic for `Λ ∩ (Λ + n)` being finite.
    pub fn sparsity(&self, n_max: i64) -> Result<SparsityReport> {
        let ints = self.integers()?;
        if ints.len() < 4 {
            return Err(Error::InvalidArgument("need at least four points".into()));
        }
        let mid = ints[0] + (ints[ints.len() - 1] - ints[0]) / 2;
        let half: Vec<i64> = ints.iter().cloned().filter(|&x| x <= mid).collect();
        let count = |set: &[i64], n: i64| set.iter().filter(|&&x| set.binary_search(&(x + n)).is_ok()).count();
        let mut rows = Vec::with_capacity(n_max.max(0) as usize);
        for n in 1..=n_max {
            rows.push(SparsityRow { n, half_window: count(&half, n), full_window: count(&ints, n) });
        }
        let gaps: Vec<i64> = ints.windows(2).map(|w| w[1] - w[0]).collect();
        let gaps_nondecreasing = gaps.windows(2).all(|w| w[0] <= w[1]);
        let saturated = rows.iter().all(|r| r.half_window == r.full_window);
        Ok(SparsityReport {
            rows,
            gaps_nondecreasing,
            last_gap: *gaps.last().unwrap(),
            sparse: saturated,
            window: (ints[0], ints[ints.len() - 1]),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SparsityRow {
    pub n: i64,
    pub half_window: usize,
    pub full_window: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SparsityReport {
    /// `|Λ ∩ (Λ + n)|` on the lower half and on the whole window.
    pub rows: Vec<SparsityRow>,
    pub gaps_nondecreasing: bool,
    pub last_gap: i64,
    /// Every intersection count saturated within the lower half window.
    pub sparse: bool,
    pub window: (i64, i64),
}

/// Trend verdict for a condition at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Trend {
    Converges,
    Diverges,
    Bounded,
    Violated,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SufficiencyReport {
    /// `∫₁^{x_max} G(x) D_Λ(x) dx/x` on a log grid.
    pub window_integral: f64,
    /// Tail past `x_max` from the fitted power law, when it converges.
    pub tail: Option<f64>,
    /// Exponent `e` of `G(x) D_Λ(x) ≍ x^e`.
    pub integrand_exponent: Option<f64>,
    pub density_exponent: f64,
    pub verdict: Trend,
    pub x_max: f64,
    pub note: String,
}

const LOG_STEPS_PER_OCTAVE: usize = 64;

fn log_grid(lo: f64, hi: f64, per_octave: usize) -> Vec<f64> {
    let octaves = log(hi / lo) / core::f64::consts::LN_2;
    let n = ((octaves * per_octave as f64) as usize).max(1);
    (0..=n).map(|k| lo * exp(log(hi / lo) * k as f64 / n as f64)).collect()
}

/// Trend test for `∫₁^∞ G(x) D_Λ(x) dx/x < ∞`.
pub fn upper_bound_sufficient(env: &TimeEnvelope, set: &RealizedSet, x_max: f64) -> Result<SufficiencyReport> {
    if !(x_max > 16.0) {
        return Err(Error::InvalidArgument("x_max must exceed 16".into()));
    }
    if !set.complete && set.span() < x_max {
        return Err(Error::WindowTooShort { x: x_max, span: set.span() });
    }
    // midpoint rule in s = ln x
    let grid = log_grid(1.0, x_max, LOG_STEPS_PER_OCTAVE);
    let mut window_integral = 0.0;
    for w in grid.windows(2) {
        let xm = libm::sqrt(w[0] * w[1]);
        window_integral += env.g(xm) * set.density(xm)? as f64 * log(w[1] / w[0]);
    }
    let fit_xs: Vec<f64> = (0..=4).map(|k| x_max / pow(2.0, k as f64)).collect();
    let density_exponent = set.density_exponent(&fit_xs)?;
    let mut report = SufficiencyReport {
        window_integral,
        tail: None,
        integrand_exponent: None,
        density_exponent,
        verdict: Trend::Undetermined,
        x_max,
        note: String::new(),
    };
    let Some(g) = env.g_exponent() else {
        report.note = "no power-law tail model for this envelope".into();
        return Ok(report);
    };
    // complete finite sets have eventually constant density
    let beta = if set.complete { 0.0 } else { density_exponent };
    let e = g + beta;
    report.integrand_exponent = Some(e);
    if e < -0.05 {
        report.tail = Some(env.g(x_max) * set.density(x_max)? as f64 / -e);
        report.verdict = Trend::Converges;
        report.note = "asymptotic trend: integrand decays like a power".into();
    } else if e > 0.05 {
        report.verdict = Trend::Diverges;
        report.note = "asymptotic trend: integrand grows; sufficiency inconclusive".into();
    } else {
        report.note = "integrand exponent within 0.05 of zero".into();
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NecessityReport {
    /// `(W, sup_{1 ≤ x ≤ W} G(x) D_Λ(x))` per window.
    pub window_sups: Vec<(f64, f64)>,
    /// Last sup over first sup.
    pub growth_factor: f64,
    /// `ln(growth) / ln(W_last / W_first)`.
    pub growth_exponent: f64,
    pub verdict: Trend,
}

/// Trend test for `sup_{x>1} G(x) D_Λ(x) < ∞` over increasing windows.
pub fn upper_bound_necessary(env: &TimeEnvelope, set: &RealizedSet, windows: &[f64]) -> Result<NecessityReport> {
    if windows.len() < 2 || windows.windows(2).any(|w| !(w[0] < w[1])) || !(windows[0] > 1.0) {
        return Err(Error::InvalidArgument("need at least two increasing windows above 1".into()));
    }
    let last = windows[windows.len() - 1];
    if !set.complete && set.span() < last {
        return Err(Error::WindowTooShort { x: last, span: set.span() });
    }
    let grid = log_grid(1.0, last, 4 * LOG_STEPS_PER_OCTAVE);
    let mut window_sups = Vec::with_capacity(windows.len());
    let mut running = 0.0f64;
    let mut k = 0usize;
    for &w in windows {
        while k < grid.len() && grid[k] <= w * (1.0 + 1e-12) {
            running = running.max(env.g(grid[k]) * set.density(grid[k])? as f64);
            k += 1;
        }
        window_sups.push((w, running));
    }
    let growth_factor = window_sups[window_sups.len() - 1].1 / window_sups[0].1;
    let growth_exponent = log(growth_factor) / log(last / windows[0]);
    let verdict = if growth_exponent >= 0.25 {
        Trend::Violated
    } else if growth_exponent <= 0.1 {
        Trend::Bounded
    } else {
        Trend::Undetermined
    };
    Ok(NecessityReport { window_sups, growth_factor, growth_exponent, verdict })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntervalEnergy {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `Σ_{λ, μ ∈ I} G(|λ − μ|)`.
    pub pair_sum: f64,
    pub ratio: f64,
}

/// Pair sums of `G` over `Λ ∩ I` against the count, per interval. Empty
/// intervals are skipped.
pub fn interval_energy_test(env: &TimeEnvelope, set: &RealizedSet, intervals: &[(f64, f64)]) -> Vec<IntervalEnergy> {
    let mut out = Vec::with_capacity(intervals.len());
    for &(lo, hi) in intervals {
        let pts = set.in_interval(lo, hi);
        if pts.is_empty() {
            continue;
        }
        let mut gaps: BTreeMap<u64, usize> = BTreeMap::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                *gaps.entry((pts[j] - pts[i]).to_bits()).or_insert(0) += 1;
            }
        }
        let off: f64 = gaps.iter().map(|(&d, &k)| k as f64 * env.g(f64::from_bits(d))).sum();
        let pair_sum = pts.len() as f64 * env.g(0.0) + 2.0 * off;
        out.push(IntervalEnergy { lo, hi, count: pts.len(), pair_sum, ratio: pair_sum / pts.len() as f64 });
    }
    out
}

/// Smallest `C` with `C⁻¹ x F(x)² ≤ G(x) ≤ C x F(x)²` on the grid. Only power
/// envelopes with exponent in `(1/2, 1)` qualify.
pub fn envelope_regularity_constant(env: &TimeEnvelope, x_grid: &[f64]) -> Result<f64> {
    match env.kind() {
        EnvelopeKind::Power { exponent } if *exponent < 1.0 => {}
        EnvelopeKind::Power { exponent } => {
            return Err(Error::Hypothesis(alloc::format!(
                "x^(1+e) F(x)^2 is not decreasing for small e > 0 at exponent {exponent}"
            )))
        }
        _ => return Err(Error::Hypothesis("envelope is not a power law".into())),
    }
    let mut c = 1.0f64;
    for &x in x_grid {
        if !(x > 0.0) {
            return Err(Error::InvalidArgument("grid points must be positive".into()));
        }
        let f = env.value(x);
        let r = env.g(x) / (x * f * f);
        c = c.max(r).max(1.0 / r);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn brute_density(p: &[f64], x: f64) -> usize {
        // intervals starting at a point are enough, but scan a fine offset grid too
        let mut best = 0;
        for &start in p {
            for k in 0..20 {
                let t = start - x * k as f64 / 20.0;
                best = best.max(p.iter().filter(|&&q| q >= t && q <= t + x).count());
            }
        }
        best
    }

    #[test]
    fn density_examples() {
        let z = TranslationSet::Integers { n: 100 }.realize().unwrap();
        assert_eq!(z.density(2.5).unwrap(), 3);
        assert_eq!(z.density(2.0).unwrap(), 3);
        let sq = TranslationSet::squares(20).realize().unwrap();
        assert_eq!(sq.density(1.0).unwrap(), brute_density(sq.points(), 1.0));
        assert_eq!(sq.density(1.0).unwrap(), 2);
        for x in [3.0, 7.5, 40.0, 150.0] {
            assert_eq!(sq.density(x).unwrap(), brute_density(sq.points(), x));
        }
        assert!(matches!(z.density(500.0), Err(Error::WindowTooShort { .. })));
        let finite = RealizedSet::from_points(vec![0.0, 1.0], true).unwrap();
        assert_eq!(finite.density(1e6).unwrap(), 2);
    }

    #[test]
    fn realization_rejects_duplicates() {
        assert!(matches!(TranslationSet::Explicit(vec![1.0, 2.0, 1.0]).realize(), Err(Error::DuplicatePoint(_))));
        assert!(TranslationSet::Explicit(vec![0.5]).integers().is_err());
        assert_eq!(TranslationSet::Subgroup { m: 3, n: 7 }.integers().unwrap(), vec![-6, -3, 0, 3, 6]);
        assert_eq!(TranslationSet::Naturals { n: 3 }.integers().unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn sparsity_verdicts() {
        let z = TranslationSet::Integers { n: 200 }.realize().unwrap().sparsity(5).unwrap();
        assert!(!z.sparse);
        assert!(z.rows[0].full_window > z.rows[0].half_window);
        let sq = TranslationSet::squares(100).realize().unwrap().sparsity(10).unwrap();
        assert!(sq.sparse && sq.gaps_nondecreasing);
        let p2 = TranslationSet::PowersOfTwo { n_max: 40 }.realize().unwrap().sparsity(10).unwrap();
        assert!(p2.sparse);
    }

    #[test]
    fn regularity_constant() {
        let grid: Vec<f64> = (0..=400).map(|k| pow(10.0, k as f64 / 100.0)).collect();
        let c = envelope_regularity_constant(&TimeEnvelope::power(0.75).unwrap(), &grid).unwrap();
        assert!((1.0..10.0).contains(&c), "{c}");
        assert!(envelope_regularity_constant(&TimeEnvelope::power(0.6).unwrap(), &grid).unwrap().is_finite());
        assert!(matches!(
            envelope_regularity_constant(&TimeEnvelope::power(1.0).unwrap(), &grid),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn singleton_interval_energy_is_g0() {
        let env = TimeEnvelope::power(0.75).unwrap();
        let set = TranslationSet::squares(10).realize().unwrap();
        let rows = interval_energy_test(&env, &set, &[(3.5, 4.5), (5.0, 6.0)]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count, 1);
        assert!((rows[0].ratio - env.g(0.0)).abs() < 1e-15);
    }
}
