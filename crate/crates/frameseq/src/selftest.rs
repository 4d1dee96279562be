//! Seeded invariant suites. Each trial draws from its own stream
//! `trial_rng(seed, suite·2^32 + i)`, so results do not depend on the thread
//! count.

use std::f64::consts::TAU;

use frameseq_core::gram::{build_gram, weighted_norm_identity_check};
use frameseq_core::hausdorff::{autocorrelation_mass_check, local_energy_scan};
use frameseq_core::periodization::dilation_deviation;
use frameseq_core::rng::{trial_rng, TrialRng};
use frameseq_core::sets::RealizedSet;
use frameseq_core::{periodize, Complex64, FourierProfile, GramOptions, Piece, Shape, TimeEnvelope};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::gallery::gallery_profiles;
use crate::run::centred_window;
use crate::{Failure, SCHEMA};

pub const DEFAULT_TRIALS: usize = 200;
pub const MASS_CHECK_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suite {
    pub name: &'static str,
    pub trials: usize,
    pub violations: usize,
    /// Largest value of the suite's test statistic.
    pub max_statistic: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub schema: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<Suite>,
    pub violations: usize,
}

impl SelftestReport {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("selftest report serializes");
        s.push('\n');
        s
    }
}

/// Up to four constant or affine nonnegative pieces on `[-1, 2]`.
pub fn random_profile(rng: &mut TrialRng) -> FourierProfile {
    let mut lo = rng.random_range(-1.0..0.5);
    let parts = rng.random_range(1..5);
    let mut pieces = Vec::with_capacity(parts);
    for _ in 0..parts {
        lo += rng.random_range(0.0..0.2);
        let width = rng.random_range(0.05..0.6);
        let hi = lo + width;
        let v0 = rng.random_range(0.05..1.0);
        let shape = if rng.random_bool(0.5) {
            let slope = (rng.random_range(0.0..1.0) - v0) / width;
            Shape::Affine { slope, intercept: v0 - slope * lo }
        } else {
            Shape::Constant(v0)
        };
        pieces.push(Piece::new(lo, hi, shape));
        lo = hi;
    }
    FourierProfile::new(pieces).expect("generated pieces are valid")
}

fn random_coeffs(rng: &mut TrialRng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// Runs `trial` for `0..trials` in parallel; each returns its statistic.
fn suite<F>(name: &'static str, id: u64, seed: u64, trials: usize, limit: f64, trial: F) -> Result<Suite, Failure>
where
    F: Fn(&mut TrialRng, usize) -> Result<f64, Failure> + Sync,
{
    let stats = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, (id << 32) | i as u64);
            trial(&mut rng, i)
        })
        .collect::<Result<Vec<f64>, Failure>>()?;
    let violations = stats.iter().filter(|s| !(**s <= limit)).count();
    let max_statistic = stats.iter().cloned().fold(0.0, f64::max);
    Ok(Suite { name, trials, violations, max_statistic, limit })
}

fn hash(seed: u64, trials: usize) -> String {
    let text = json!({ "schema": SCHEMA, "selftest": { "seed": seed, "trials": trials } }).to_string();
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn selftest(seed: u64, trials: usize) -> Result<SelftestReport, Failure> {
    if trials == 0 {
        return Err(Failure::Usage("selftest needs at least one trial".into()));
    }
    let gallery = gallery_profiles()?;
    let pairs: Vec<(FourierProfile, f64)> =
        gallery.iter().flat_map(|g| g.spacings.iter().map(|&b| (g.profile.clone(), b))).collect();
    let mut suites = Vec::new();

    suites.push(suite("orthonormal-box", 1, seed, 1, 1e-6, |_, _| {
        let bx = FourierProfile::indicator(0.0, 1.0)?;
        let ps = periodize(&bx, 1.0, 4096, 1e-12)?;
        let phi_dev = ps.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        let idx: Vec<i64> = (0..64).collect();
        let ev = build_gram(&bx, 1.0, &idx, &GramOptions::default())?.eigenvalues()?;
        let gram_dev = ev.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        Ok(if phi_dev < 1e-12 { gram_dev } else { f64::INFINITY })
    })?);

    suites.push(suite("autocorrelation-symmetry", 2, seed, trials, 1e-12, |rng, _| {
        let p = random_profile(rng);
        let a = rng.random_range(-20.0..20.0);
        let plus = p.autocorrelation(a);
        let hermitian = (plus - p.autocorrelation(-a).conj()).norm();
        let excess = (plus.norm() - p.autocorrelation(0.0).re - 2e-12).max(0.0);
        Ok(hermitian + excess * 1e12)
    })?);

    suites.push(suite("coefficient-identity", 3, seed, trials, 1e-11, |rng, _| {
        let p = random_profile(rng);
        let b = rng.random_range(0.3..3.0);
        let n = rng.random_range(-40i64..40);
        let ps = periodize(&p, b, 256, 1e-12)?;
        Ok((ps.fourier_coeff(n)? / b - p.autocorrelation(n as f64 * b)).norm())
    })?);

    suites.push(suite("gram-psd-interlacing", 4, seed, pairs.len(), 1e-8, |_, i| {
        let (p, b) = &pairs[i];
        let z = frameseq_core::TranslationSet::Integers { n: 1000 };
        let mut worst = 0.0f64;
        let mut prev: Option<(f64, f64)> = None;
        for w in [64, 128, 256] {
            let idx = centred_window(&z, w)?;
            let g = build_gram(p, *b, &idx, &GramOptions::default())?;
            let fb = g.frame_bound_estimates(1e-6)?;
            let scale = g.norm_sq();
            worst = worst.max(-fb.min_eigenvalue / scale);
            if let Some((l0, b0)) = prev {
                if fb.min_eigenvalue > l0 + 1e-12 * scale || fb.b_est < b0 - 1e-12 * scale {
                    return Ok(f64::INFINITY);
                }
            }
            prev = Some((fb.min_eigenvalue, fb.b_est));
        }
        Ok(worst.max(0.0))
    })?);

    suites.push(suite("weighted-norm-identity", 5, seed, trials, 1e-8, |rng, _| {
        let p = random_profile(rng);
        let b = rng.random_range(0.3..3.0);
        let mut idx: Vec<i64> = (0..9).map(|_| rng.random_range(-30i64..30)).collect();
        idx.sort_unstable();
        idx.dedup();
        let c = random_coeffs(rng, idx.len());
        Ok(weighted_norm_identity_check(&p, b, &idx, &c)?.deviation)
    })?);

    suites.push(suite("dilation-identity", 6, seed, trials, 1e-10, |rng, _| {
        let p = random_profile(rng);
        let b = rng.random_range(0.3..2.0);
        let m = rng.random_range(2usize..4);
        Ok(dilation_deviation(&p, b, m, 1024)?)
    })?);

    suites.push(suite("mass-check", 7, seed, MASS_CHECK_TRIALS, 0.0, |rng, _| {
        let mut support: Vec<i64> = (0..rng.random_range(1..12)).map(|_| rng.random_range(0i64..64)).collect();
        support.sort_unstable();
        support.dedup();
        let set = RealizedSet::from_points(support.iter().map(|&v| v as f64).collect(), true)?;
        let mut c = random_coeffs(rng, support.len());
        c[0] += Complex64::new(0.5, 0.0);
        let lo = rng.random_range(-80i64..80);
        let hi = lo + rng.random_range(0i64..80);
        let r = autocorrelation_mass_check(&set, &support, &c, lo, hi)?;
        Ok(if r.pass { 0.0 } else { r.lhs - r.rhs })
    })?);

    suites.push(suite("local-energy-character", 8, seed, trials, 0.2, |rng, _| {
        let freq = rng.random_range(-5000i64..5000);
        let set = RealizedSet::from_points(vec![(freq - 7919) as f64, freq as f64, (freq + 104_729) as f64], true)?;
        let c = vec![Complex64::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..TAU))];
        let center = rng.random_range(0.0..1.0);
        let lengths: Vec<f64> = (3..=7).map(|k| 0.5f64.powi(k)).collect();
        Ok(local_energy_scan(&set, &[(vec![freq], c)], center, &lengths)?.slope.abs())
    })?);

    suites.push(suite("density-axioms", 9, seed, trials, 0.0, |rng, _| {
        let pts: Vec<f64> = (0..rng.random_range(2..60)).map(|_| rng.random_range(-500i64..500) as f64).collect();
        let set = RealizedSet::from_points(dedup(pts), true)?;
        let x = rng.random_range(0.5..200.0);
        let d = set.density(x)?;
        let ok = set.density(2.0 * x)? <= 2 * d
            && set.density(1.5 * x)? >= d
            && set.shifted(rng.random_range(-50.0..50.0))?.density(x)? == d;
        Ok(if ok { 0.0 } else { 1.0 })
    })?);

    suites.push(suite("g-bracket", 10, seed, 24, 1e-9, |_, k| {
        let env = TimeEnvelope::power(0.75)?;
        let t = 0.05 * 1.5f64.powi(k as i32);
        let v = env.autocorrelation(2.0 * t, 1e-10)?;
        Ok((4.0 / 3.0 * env.g(3.0 * t) - v).max(v - 4.0 * env.g(t)).max(0.0))
    })?);

    let violations = suites.iter().map(|s| s.violations).sum();
    Ok(SelftestReport { schema: SCHEMA, config_hash: hash(seed, trials), seed, trials, suites, violations })
}

fn dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}
