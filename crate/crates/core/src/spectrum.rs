//! Generator descriptions: the Fourier-side [`FourierProfile`] and the
//! time-side decay majorant [`TimeEnvelope`], plus their autocorrelations
//! `⟨τ_a φ, φ⟩`.
//!
//! Profiles are real and nonnegative. Complex or sign-changing `φ̂` are not
//! supported.

use alloc::format;
use alloc::vec::Vec;

use libm::{exp, fabs, floor, log, pow};
use num_complex::Complex64;

use crate::math::{slope, sqr};
use crate::quad::{self, poly_exp};
use crate::{Error, Result};

/// A quadratic polynomial in `(x − center)` restricted to `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyPiece {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub coeffs: [f64; 3],
}

impl PolyPiece {
    pub fn constant(lo: f64, hi: f64, c: f64) -> Self {
        Self { lo, hi, center: 0.5 * (lo + hi), coeffs: [c, 0.0, 0.0] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = x - self.center;
        self.coeffs[0] + u * (self.coeffs[1] + u * self.coeffs[2])
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    /// `∫_lo^hi p`.
    pub fn integral(&self) -> f64 {
        let h = 0.5 * (self.hi - self.lo);
        let off = self.center - 0.5 * (self.lo + self.hi);
        // integrate c0 + c1 u + c2 u² for u in [-h - off, h - off]
        let a = -h - off;
        let b = h - off;
        let prim = |u: f64| u * (self.coeffs[0] + u * (self.coeffs[1] / 2.0 + u * self.coeffs[2] / 3.0));
        prim(b) - prim(a)
    }

    /// `∫_lo^hi p(x) e^{−2πi·freq·x} dx`, exact.
    pub fn fourier(&self, freq: f64) -> Complex64 {
        poly_exp(self.coeffs, self.center, self.lo, self.hi, freq)
    }
}

/// Shape of `φ̂` on one piece.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Constant(f64),
    /// `slope·ξ + intercept` in absolute frequency.
    Affine {
        slope: f64,
        intercept: f64,
    },
    /// Step function on equal cells spanning the piece.
    Sampled(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub shape: Shape,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, shape: Shape) -> Self {
        Self { lo, hi, shape }
    }

    fn value(&self, xi: f64) -> f64 {
        match &self.shape {
            Shape::Constant(c) => *c,
            Shape::Affine { slope, intercept } => slope * xi + intercept,
            Shape::Sampled(v) => {
                let t = (xi - self.lo) / (self.hi - self.lo) * v.len() as f64;
                let j = (floor(t).max(0.0) as usize).min(v.len() - 1);
                v[j]
            }
        }
    }

    /// Pieces of `φ̂^power` for `power ∈ {1, 2}`.
    fn poly_pieces(&self, power: u8, out: &mut Vec<PolyPiece>) {
        let raise = |v: f64| if power == 2 { v * v } else { v };
        match &self.shape {
            Shape::Constant(c) => out.push(PolyPiece::constant(self.lo, self.hi, raise(*c))),
            Shape::Affine { slope, intercept } => {
                let center = 0.5 * (self.lo + self.hi);
                let vc = slope * center + intercept;
                let coeffs = if power == 2 { [vc * vc, 2.0 * vc * slope, slope * slope] } else { [vc, *slope, 0.0] };
                out.push(PolyPiece { lo: self.lo, hi: self.hi, center, coeffs });
            }
            Shape::Sampled(v) => {
                let h = (self.hi - self.lo) / v.len() as f64;
                for (j, &c) in v.iter().enumerate() {
                    let lo = self.lo + h * j as f64;
                    let hi = if j + 1 == v.len() { self.hi } else { self.lo + h * (j + 1) as f64 };
                    out.push(PolyPiece::constant(lo, hi, raise(c)));
                }
            }
        }
    }
}

/// Piecewise closed-form description of `φ̂`, zero outside its pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierProfile {
    pieces: Vec<Piece>,
}

impl FourierProfile {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidProfile("no pieces".into()));
        }
        let mut prev_hi = f64::NEG_INFINITY;
        for (i, p) in pieces.iter().enumerate() {
            if !(p.lo.is_finite() && p.hi.is_finite()) {
                return Err(Error::InvalidProfile(format!("piece {i} has a non-finite endpoint")));
            }
            if !(p.lo < p.hi) {
                return Err(Error::InvalidProfile(format!("piece {i} is empty or reversed")));
            }
            if p.lo < prev_hi {
                return Err(Error::InvalidProfile(format!("piece {i} overlaps or is out of order")));
            }
            prev_hi = p.hi;
            let scale = 1.0 + fabs(p.lo) + fabs(p.hi);
            match &p.shape {
                Shape::Constant(c) => check_value(i, *c, 0.0)?,
                Shape::Affine { slope, intercept } => {
                    let slack = 1e-12 * scale * (fabs(*slope) + fabs(*intercept));
                    check_value(i, slope * p.lo + intercept, slack)?;
                    check_value(i, slope * p.hi + intercept, slack)?;
                }
                Shape::Sampled(v) => {
                    if v.is_empty() {
                        return Err(Error::InvalidProfile(format!("piece {i} has no samples")));
                    }
                    for &x in v {
                        check_value(i, x, 0.0)?;
                    }
                }
            }
        }
        let profile = Self { pieces };
        if !(profile.norm_sq() > 0.0) {
            return Err(Error::InvalidProfile("profile has zero energy".into()));
        }
        Ok(profile)
    }

    /// `χ_[lo, hi)`.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::new(alloc::vec![Piece::new(lo, hi, Shape::Constant(1.0))])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Smallest interval containing every piece.
    pub fn support(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Every piece boundary, ascending, without duplicates.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(2 * self.pieces.len());
        for p in &self.pieces {
            for x in [p.lo, p.hi] {
                if out.last() != Some(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// `φ̂(ξ)`; zero outside the declared pieces.
    pub fn eval(&self, xi: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.lo <= xi);
        if idx == 0 {
            return 0.0;
        }
        let p = &self.pieces[idx - 1];
        if xi < p.hi {
            p.value(xi)
        } else {
            0.0
        }
    }

    /// `|φ̂|²` as polynomial pieces.
    pub fn squared_pieces(&self) -> Vec<PolyPiece> {
        let mut out = Vec::new();
        for p in &self.pieces {
            p.poly_pieces(2, &mut out);
        }
        out
    }

    fn linear_pieces(&self) -> Vec<PolyPiece> {
        let mut out = Vec::new();
        for p in &self.pieces {
            p.poly_pieces(1, &mut out);
        }
        out
    }

    /// `‖φ‖² = ∫ |φ̂|²`.
    pub fn norm_sq(&self) -> f64 {
        self.squared_pieces().iter().map(PolyPiece::integral).sum()
    }

    /// `⟨τ_a φ, φ⟩ = ∫ |φ̂(ξ)|² e^{−2πiaξ} dξ`, computed in closed form piece by
    /// piece. For a shift `a = nb` this equals `Φ̂_b(n) / b`.
    pub fn autocorrelation(&self, shift: f64) -> Complex64 {
        self.squared_pieces().iter().map(|p| p.fourier(shift)).sum()
    }

    /// `φ(x) = ∫ φ̂(ξ) e^{2πixξ} dξ`.
    pub fn time_value(&self, x: f64) -> Complex64 {
        self.linear_pieces().iter().map(|p| p.fourier(-x)).sum()
    }

    /// Fitted decay exponent `d` in `|φ(x)| ≈ C x^{−d}`, from the maximum of
    /// `|φ|` over the octaves `[2^k, 2^{k+1}]` for `k` in `octaves`.
    pub fn time_decay_exponent(&self, octaves: core::ops::Range<i32>, samples: usize) -> f64 {
        let linear = self.linear_pieces();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in octaves {
            let x0 = pow(2.0, k as f64);
            let mut peak = 0.0f64;
            for s in 0..samples {
                let x = x0 * pow(2.0, (s as f64 + 0.381_966) / samples as f64);
                let v: Complex64 = linear.iter().map(|p| p.fourier(-x)).sum();
                peak = peak.max(v.norm());
            }
            xs.push(log(x0));
            ys.push(log(peak.max(f64::MIN_POSITIVE)));
        }
        -slope(&xs, &ys)
    }

    /// Profile of `s·φ`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let scale = fabs(s);
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let shape = match &p.shape {
                    Shape::Constant(c) => Shape::Constant(c * scale),
                    Shape::Affine { slope, intercept } => {
                        Shape::Affine { slope: slope * scale, intercept: intercept * scale }
                    }
                    Shape::Sampled(v) => Shape::Sampled(v.iter().map(|x| x * scale).collect()),
                };
                Piece::new(p.lo, p.hi, shape)
            })
            .collect();
        Self::new(pieces)
    }
}

fn check_value(i: usize, v: f64, slack: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidProfile(format!("piece {i} has a non-finite value")));
    }
    if v < -slack {
        return Err(Error::InvalidProfile(format!("piece {i} is negative ({v})")));
    }
    Ok(())
}

/// Rate function `h` of an exponential envelope `e^{−δh(x)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFunction {
    /// `h(x) = x^p`.
    Power { exponent: f64 },
    /// `h(x) = x / ln(e + x)`.
    LinearOverLog,
}

/// Outcome of the doubling and divergence checks on a rate function.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Admissibility {
    /// `min h(2x)/h(x)` on the sample grid.
    pub c1: f64,
    /// `max h(2x)/h(x)` on the sample grid.
    pub c2: f64,
    /// Ratio of the last two dyadic block sums of `∫ t^{−2} h(t) dt`.
    pub block_ratio: f64,
    pub divergent: bool,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.c1 > 1.0 && self.c2.is_finite() && self.c1 <= self.c2 && self.divergent
    }
}

impl RateFunction {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            RateFunction::Power { exponent } => pow(x, exponent),
            RateFunction::LinearOverLog => x / log(core::f64::consts::E + x),
        }
    }

    fn ln_value(&self, x: f64) -> f64 {
        match *self {
            RateFunction::Power { exponent } => exponent * log(x),
            RateFunction::LinearOverLog => log(x) - log(log(core::f64::consts::E + x)),
        }
    }

    /// Doubling constants on `x = 2^{j/4}`, `j ∈ [−40, 400]`, and the
    /// divergence of `∫₁^∞ t^{−2} h(t) dt` judged from dyadic block sums:
    /// blocks `[2^64, 2^128)`, `[2^128, 2^256)`, `[2^256, 2^512)`. A convergent
    /// integral has geometrically shrinking blocks; divergent ones keep the
    /// last block at least half the size of the one before.
    pub fn admissibility(&self) -> Admissibility {
        let mut c1 = f64::INFINITY;
        let mut c2 = 0.0f64;
        for j in -40..=400 {
            let x = pow(2.0, j as f64 / 4.0);
            let r = exp(self.ln_value(2.0 * x) - self.ln_value(x));
            c1 = c1.min(r);
            c2 = c2.max(r);
        }
        // ln ∫_{2^k}^{2^{k+1}} t^{-2} h(t) dt
        let ln_increment = |k: i32| {
            let base = pow(2.0, k as f64);
            let lnh = self.ln_value(base);
            let inner: f64 =
                quad::gauss(&quad::GAUSS_LEGENDRE_16, 1.0, 2.0, |s| exp(self.ln_value(base * s) - lnh) / (s * s));
            -(k as f64) * core::f64::consts::LN_2 + lnh + log(inner)
        };
        let ln_block = |from: i32, to: i32| {
            let terms: Vec<f64> = (from..to).map(ln_increment).collect();
            let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            top + log(terms.iter().map(|t| exp(t - top)).sum::<f64>())
        };
        let b2 = ln_block(128, 256);
        let b3 = ln_block(256, 512);
        let block_ratio = exp(b3 - b2);
        Admissibility { c1, c2, block_ratio, divergent: block_ratio >= 0.5 }
    }
}

/// Decay majorant `F` on `(0, ∞)`, capped near the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeEnvelope {
    kind: EnvelopeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeKind {
    /// `min(1, x^{−a})`, `a > 1/2`.
    Power { exponent: f64 },
    /// `e^{−δ h(x)}`.
    Exponential { delta: f64, rate: RateFunction },
    /// Log-log interpolation of `(x, F)` nodes, constant below the first
    /// node, power-law extrapolation past the last.
    Tabulated { xs: Vec<f64>, fs: Vec<f64> },
}

/// `F(x) = coef · x^{−alpha}` for `x ≥ start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTail {
    pub coef: f64,
    pub alpha: f64,
    pub start: f64,
}

impl TimeEnvelope {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.5) || !exponent.is_finite() {
            return Err(Error::InvalidEnvelope(format!(
                "power exponent must exceed 1/2 for square integrability, got {exponent}"
            )));
        }
        Ok(Self { kind: EnvelopeKind::Power { exponent } })
    }

    pub fn exponential(delta: f64, rate: RateFunction) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidEnvelope("delta must be positive".into()));
        }
        if let RateFunction::Power { exponent } = rate {
            if !(exponent > 0.0) || !exponent.is_finite() {
                return Err(Error::InvalidEnvelope("rate exponent must be positive".into()));
            }
        }
        let adm = rate.admissibility();
        if !adm.admissible() {
            return Err(Error::InvalidEnvelope(format!(
                "rate function is not admissible: c1 = {}, c2 = {}, divergent = {}",
                adm.c1, adm.c2, adm.divergent
            )));
        }
        Ok(Self { kind: EnvelopeKind::Exponential { delta, rate } })
    }

    pub fn tabulated(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != fs.len() {
            return Err(Error::InvalidEnvelope("need at least two (x, F) nodes".into()));
        }
        if !(xs[0] > 0.0) || xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidEnvelope("nodes must be positive and increasing".into()));
        }
        if fs.iter().any(|f| !(*f > 0.0) || !f.is_finite()) || fs.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidEnvelope("values must be positive and nonincreasing".into()));
        }
        let env = Self { kind: EnvelopeKind::Tabulated { xs, fs } };
        let tail = env.power_tail().expect("tabulated envelopes have a power tail");
        if !(tail.alpha > 0.5) {
            return Err(Error::InvalidEnvelope(format!(
                "extrapolated tail x^-{} is not square integrable",
                tail.alpha
            )));
        }
        Ok(env)
    }

    pub fn kind(&self) -> &EnvelopeKind {
        &self.kind
    }

    /// `F(|x|)`.
    pub fn value(&self, x: f64) -> f64 {
        let x = fabs(x);
        match &self.kind {
            EnvelopeKind::Power { exponent } => {
                if x <= 1.0 {
                    1.0
                } else {
                    pow(x, -exponent)
                }
            }
            EnvelopeKind::Exponential { delta, rate } => exp(-delta * rate.value(x)),
            EnvelopeKind::Tabulated { xs, fs } => {
                if x <= xs[0] {
                    return fs[0];
                }
                let n = xs.len();
                let i = xs.partition_point(|&t| t <= x).min(n - 1).max(1) - 1;
                let s = segment_slope(xs, fs, i);
                fs[i] * pow(x / xs[i], s)
            }
        }
    }

    /// Asymptotic power-law form, if the envelope has one.
    pub fn power_tail(&self) -> Option<PowerTail> {
        match &self.kind {
            EnvelopeKind::Power { exponent } => Some(PowerTail { coef: 1.0, alpha: *exponent, start: 1.0 }),
            EnvelopeKind::Exponential { .. } => None,
            EnvelopeKind::Tabulated { xs, fs } => {
                let n = xs.len();
                let alpha = -segment_slope(xs, fs, n - 2);
                Some(PowerTail { coef: fs[n - 1] * pow(xs[n - 1], alpha), alpha, start: xs[n - 1] })
            }
        }
    }

    /// Whether `F ∈ L¹(0, ∞)`.
    pub fn is_integrable(&self) -> bool {
        match self.power_tail() {
            Some(t) => t.alpha > 1.0,
            None => true,
        }
    }

    /// `∫₀ˣ F`.
    pub fn integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            EnvelopeKind::Power { exponent } => {
                if x <= 1.0 {
                    x
                } else {
                    1.0 + power_integral(1.0, 1.0, -exponent, x)
                }
            }
            EnvelopeKind::Exponential { delta, rate } => {
                // past δh = 50 the remainder is below x·e^{−50}
                let mut end = 1.0;
                while end < x && delta * rate.value(end) < 50.0 {
                    end *= 2.0;
                }
                quad::adaptive(|t| exp(-delta * rate.value(t)), 0.0, x.min(end), 1e-13)
                    .map(|i| i.value)
                    .unwrap_or(f64::NAN)
            }
            EnvelopeKind::Tabulated { xs, fs } => tabulated_integral(xs, fs, x, 1),
        }
    }

    /// `∫ₓ^∞ F²`.
    pub fn tail_sq(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match &self.kind {
            EnvelopeKind::Power { exponent } => {
                let a2 = 2.0 * exponent;
                if x >= 1.0 {
                    pow(x, 1.0 - a2) / (a2 - 1.0)
                } else {
                    (1.0 - x) + 1.0 / (a2 - 1.0)
                }
            }
            EnvelopeKind::Exponential { delta, rate } => {
                let hx = delta * rate.value(x);
                let scale = exp(-2.0 * hx);
                if scale == 0.0 {
                    return 0.0;
                }
                // F² has dropped by e^{−70} relative to F(x)² past `end`
                let mut end = x.max(1.0);
                while delta * rate.value(end) < hx + 35.0 {
                    end *= 2.0;
                }
                quad::adaptive(|t| exp(-2.0 * (delta * rate.value(t) - hx)), x, end, 1e-9)
                    .map(|i| scale * i.value)
                    .unwrap_or(f64::NAN)
            }
            EnvelopeKind::Tabulated { xs, fs } => {
                let total = tabulated_integral(xs, fs, f64::INFINITY, 2);
                total - tabulated_integral(xs, fs, x, 2)
            }
        }
    }

    /// `G(x) = F(x)∫₀ˣF + ∫ₓ^∞F²`; `G(0) = ∫₀^∞ F²`.
    pub fn g(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.tail_sq(0.0);
        }
        self.value(x) * self.integral(x) + self.tail_sq(x)
    }

    /// Exponent `e` with `G(x) ≍ x^e` at infinity (a log factor is dropped
    /// at the `L¹` boundary `a = 1`). `None` for envelopes without a power tail.
    pub fn g_exponent(&self) -> Option<f64> {
        let t = self.power_tail()?;
        Some(if t.alpha < 1.0 { 1.0 - 2.0 * t.alpha } else { -t.alpha })
    }

    /// `∫ ψ(x) ψ(x − a) dx` for `ψ(x) = F(|x|)`, to absolute accuracy `tol`.
    pub fn autocorrelation(&self, shift: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let a = fabs(shift);
        let psi = |x: f64| self.value(x) * self.value(x - a);
        let (reach, tails) = match self.power_tail() {
            Some(t) => {
                let reach = (4.0 * (a + 1.0)).max(4.0 * t.start).max(16.0);
                (reach, 2.0 * power_pair_tail(t, reach, a))
            }
            None => {
                let mut reach = 16.0f64.max(a);
                while self.value(reach) > 1e-170 {
                    reach *= 2.0;
                }
                (reach, 0.0)
            }
        };
        let mut cuts: Vec<f64> = alloc::vec![-reach, 0.0, a, a + reach];
        let knots: Vec<f64> = match &self.kind {
            EnvelopeKind::Power { .. } => alloc::vec![1.0],
            EnvelopeKind::Tabulated { xs, .. } => xs.clone(),
            EnvelopeKind::Exponential { .. } => Vec::new(),
        };
        for k in knots {
            cuts.extend_from_slice(&[-k, k, a - k, a + k]);
        }
        cuts.retain(|c| *c >= -reach && *c <= a + reach);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let span = cuts[cuts.len() - 1] - cuts[0];
        let mut total = tails;
        for w in cuts.windows(2) {
            let share = tol * (w[1] - w[0]) / span;
            total += quad::adaptive(psi, w[0], w[1], share)?.value;
        }
        Ok(total)
    }
}

fn segment_slope(xs: &[f64], fs: &[f64], i: usize) -> f64 {
    log(fs[i + 1] / fs[i]) / log(xs[i + 1] / xs[i])
}

/// `∫_{x0}^{x} f0 (t/x0)^s dt`.
fn power_integral(x0: f64, f0: f64, s: f64, x: f64) -> f64 {
    if fabs(s + 1.0) < 1e-12 {
        f0 * x0 * log(x / x0)
    } else if x.is_infinite() {
        // only called with s < -1 here
        -f0 * x0 / (s + 1.0)
    } else {
        f0 * x0 * (pow(x / x0, s + 1.0) - 1.0) / (s + 1.0)
    }
}

/// `∫₀ˣ F^power` for a tabulated envelope, `power ∈ {1, 2}`.
fn tabulated_integral(xs: &[f64], fs: &[f64], x: f64, power: u8) -> f64 {
    let p = power as f64;
    let f = |v: f64| pow(v, p);
    let mut acc = f(fs[0]) * x.min(xs[0]);
    if x <= xs[0] {
        return acc;
    }
    let n = xs.len();
    for i in 0..n - 1 {
        let s = segment_slope(xs, fs, i) * p;
        let hi = x.min(xs[i + 1]);
        acc += power_integral(xs[i], f(fs[i]), s, hi);
        if x <= xs[i + 1] {
            return acc;
        }
    }
    let s = segment_slope(xs, fs, n - 2) * p;
    acc + power_integral(xs[n - 1], f(fs[n - 1]), s, x)
}

/// `∫_T^∞ F(y) F(y + a) dy` with `F(y) = c y^{−α}` on the range, by the
/// binomial series in `a/y` (requires `a < T`).
fn power_pair_tail(t: PowerTail, reach: f64, a: f64) -> f64 {
    let alpha = t.alpha;
    let ratio = a / reach;
    let base = pow(reach, 1.0 - 2.0 * alpha);
    let mut coef = 1.0; // (-1)^k (α)_k / k!
    let mut sum = 0.0;
    for k in 0..400 {
        let kf = k as f64;
        let term = coef * pow(ratio, kf) * base / (2.0 * alpha + kf - 1.0);
        sum += term;
        if fabs(term) < 1e-18 * fabs(sum) {
            break;
        }
        coef *= -(alpha + kf) / (kf + 1.0);
    }
    sqr(t.coef) * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn triangle() -> FourierProfile {
        // 1 on [0, 1/2], 2(1 − ξ) on [1/2, 1]
        FourierProfile::new(vec![
            Piece::new(0.0, 0.5, Shape::Constant(1.0)),
            Piece::new(0.5, 1.0, Shape::Affine { slope: -2.0, intercept: 2.0 }),
        ])
        .unwrap()
    }

    #[test]
    fn eval_follows_pieces() {
        let box_ = FourierProfile::indicator(0.0, 1.0).unwrap();
        assert_eq!(box_.eval(0.5), 1.0);
        assert_eq!(box_.eval(1.0), 0.0);
        assert_eq!(box_.eval(-0.1), 0.0);
        assert_eq!(box_.eval(7.0), 0.0);
        assert!((triangle().eval(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_profiles() {
        let overlap = vec![Piece::new(0.0, 0.6, Shape::Constant(1.0)), Piece::new(0.5, 1.0, Shape::Constant(1.0))];
        assert!(FourierProfile::new(overlap).is_err());
        assert!(FourierProfile::new(vec![Piece::new(0.0, 1.0, Shape::Constant(-1.0))]).is_err());
        assert!(FourierProfile::new(vec![Piece::new(0.0, 1.0, Shape::Constant(0.0))]).is_err());
        assert!(FourierProfile::new(vec![Piece::new(0.0, f64::INFINITY, Shape::Constant(1.0))]).is_err());
        assert!(FourierProfile::new(Vec::new()).is_err());
    }

    #[test]
    fn sampled_pieces_are_step_functions() {
        let p = FourierProfile::new(vec![Piece::new(0.0, 1.0, Shape::Sampled(vec![1.0, 2.0, 3.0, 4.0]))]).unwrap();
        assert_eq!(p.eval(0.1), 1.0);
        assert_eq!(p.eval(0.26), 2.0);
        assert_eq!(p.eval(0.99), 4.0);
        assert!((p.norm_sq() - (1.0 + 4.0 + 9.0 + 16.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn box_autocorrelation_is_orthonormal() {
        let p = FourierProfile::indicator(0.0, 1.0).unwrap();
        assert!((p.autocorrelation(0.0).re - 1.0).abs() < 1e-15);
        for n in 1..10 {
            assert!(p.autocorrelation(n as f64).norm() < 1e-15);
            assert!(p.autocorrelation(-(n as f64)).norm() < 1e-15);
        }
    }

    #[test]
    fn triangle_norm_and_symmetry() {
        let p = triangle();
        // 1/2 + ∫_{1/2}^1 4(1−ξ)² = 1/2 + 1/6
        assert!((p.norm_sq() - 2.0 / 3.0).abs() < 1e-15);
        for a in [0.3, 1.0, 2.5, 7.0] {
            let plus = p.autocorrelation(a);
            let minus = p.autocorrelation(-a);
            assert!((plus - minus.conj()).norm() < 1e-14);
            assert!(plus.norm() <= p.norm_sq() + 1e-14);
        }
    }

    #[test]
    fn time_value_of_box_is_a_modulated_sinc() {
        let p = FourierProfile::indicator(0.0, 1.0).unwrap();
        for x in [0.25, 1.5, 3.3] {
            let got = p.time_value(x);
            let want =
                Complex64::from_polar(libm::sin(crate::math::PI * x) / (crate::math::PI * x), crate::math::PI * x);
            assert!((got - want).norm() < 1e-14);
        }
        let d = p.time_decay_exponent(3..9, 64);
        assert!((d - 1.0).abs() < 0.05, "{d}");
    }

    #[test]
    fn power_envelope_closed_forms() {
        let f = TimeEnvelope::power(0.75).unwrap();
        assert_eq!(f.value(0.5), 1.0);
        assert!((f.value(16.0) - 0.125).abs() < 1e-15);
        assert!((f.integral(16.0) - (1.0 + 4.0 * (2.0 - 1.0))).abs() < 1e-14);
        assert!((f.tail_sq(4.0) - 2.0 * 0.5).abs() < 1e-15);
        assert!((f.g(0.0) - 3.0).abs() < 1e-15);
        // G(x) = 6 x^{-1/2} − 3 x^{-3/4} for x ≥ 1
        for x in [1.0, 10.0, 1000.0] {
            let want = 6.0 / libm::sqrt(x) - 3.0 * pow(x, -0.75);
            assert!((f.g(x) - want).abs() < 1e-13);
        }
        assert!(!f.is_integrable());
        assert!(TimeEnvelope::power(2.0).unwrap().is_integrable());
        assert!(TimeEnvelope::power(0.5).is_err());
    }

    #[test]
    fn g_is_continuous_and_nonincreasing() {
        for env in [
            TimeEnvelope::power(0.75).unwrap(),
            TimeEnvelope::power(1.0).unwrap(),
            TimeEnvelope::power(1.6).unwrap(),
            TimeEnvelope::tabulated(vec![1.0, 4.0, 100.0], vec![1.0, 0.4, 0.02]).unwrap(),
            TimeEnvelope::exponential(0.5, RateFunction::Power { exponent: 1.0 }).unwrap(),
        ] {
            let mut prev = env.g(0.0);
            for k in 1..400 {
                let x = k as f64 * 0.05;
                let g = env.g(x);
                assert!(g <= prev + 1e-12, "{env:?} at {x}");
                prev = g;
            }
        }
    }

    #[test]
    fn tabulated_matches_power_when_nodes_sample_a_power() {
        let tab =
            TimeEnvelope::tabulated(vec![1.0, 10.0, 100.0], vec![1.0, pow(10.0, -0.75), pow(100.0, -0.75)]).unwrap();
        let pw = TimeEnvelope::power(0.75).unwrap();
        for x in [0.3, 1.0, 5.0, 50.0, 1e4] {
            assert!((tab.value(x) - pw.value(x)).abs() < 1e-14);
            assert!((tab.integral(x) - pw.integral(x)).abs() < 1e-10);
            assert!((tab.tail_sq(x) - pw.tail_sq(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn exponential_integrals_match_closed_form() {
        let env = TimeEnvelope::exponential(2.0, RateFunction::Power { exponent: 1.0 }).unwrap();
        assert!((env.integral(3.0) - (1.0 - exp(-6.0)) / 2.0).abs() < 1e-12);
        assert!((env.tail_sq(0.5) - exp(-2.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn rate_admissibility() {
        let lin = RateFunction::Power { exponent: 1.0 }.admissibility();
        assert!(lin.admissible());
        assert!((lin.c1 - 2.0).abs() < 1e-12 && (lin.c2 - 2.0).abs() < 1e-12);
        assert!(RateFunction::LinearOverLog.admissibility().admissible());
        let slow = RateFunction::Power { exponent: 0.5 }.admissibility();
        assert!(!slow.divergent);
        assert!(TimeEnvelope::exponential(1.0, RateFunction::Power { exponent: 0.5 }).is_err());
    }

    #[test]
    fn envelope_autocorrelation_at_zero_is_energy() {
        let f = TimeEnvelope::power(0.75).unwrap();
        let v = f.autocorrelation(0.0, 1e-10).unwrap();
        assert!((v - 2.0 * f.g(0.0)).abs() < 1e-9, "{v}");
        let e = TimeEnvelope::exponential(1.0, RateFunction::Power { exponent: 1.0 }).unwrap();
        // ∫ e^{-|x|} e^{-|x-a|} dx = (1 + a) e^{-a}
        let a = 1.7;
        let v = e.autocorrelation(a, 1e-11).unwrap();
        assert!((v - (1.0 + a) * exp(-a)).abs() < 1e-9);
    }

    #[test]
    fn exponential_tail_keeps_relative_accuracy_far_out() {
        let delta = 0.15;
        let e = TimeEnvelope::exponential(delta, RateFunction::Power { exponent: 1.0 }).unwrap();
        for x in [0.0, 3.0, 100.0, 1000.0, 2000.0] {
            let exact = exp(-2.0 * delta * x) / (2.0 * delta);
            assert!((e.tail_sq(x) / exact - 1.0).abs() < 1e-8, "x = {x}");
            let integral = (1.0 - exp(-delta * x)) / delta;
            assert!((e.integral(x) - integral).abs() < 1e-10, "x = {x}");
        }
    }
}
