//! Values checked against numbers computed outside this crate (mpmath
//! quadrature, exact sums, a numpy reimplementation of the dyadic
//! construction) and frozen here.

#![allow(clippy::excessive_precision)]

use frameseq_core::constructions::{coarse_spacing_frame_profile, verify_dyadic_counterexample};
use frameseq_core::gram::build_gram;
use frameseq_core::hausdorff::autocorrelation_mass_check;
use frameseq_core::sets::{interval_energy_test, RealizedSet};
use frameseq_core::{periodize, Complex64, FourierProfile, GramOptions, TimeEnvelope, TranslationSet};

fn triangle() -> FourierProfile {
    coarse_spacing_frame_profile(2.0, 1.0).unwrap()
}

// ∫ |φ̂|² e^{−2πiaξ} for the triangle profile, mpmath at 30 digits
const TRIANGLE_AUTOCORRELATION: [(f64, f64, f64); 4] = [
    (1.0, -0.101_321_183_642_337_77, -0.223_658_011_958_294_31),
    (2.0, 0.025_330_295_910_584_443, -0.079_577_471_545_947_668),
    (3.0, -0.011_257_909_293_593_086, -0.055_440_650_247_905_815),
    (0.5, 0.258_012_275_465_595_91, -0.465_582_345_287_545_84),
];

#[test]
fn triangle_autocorrelation_matches_mpmath() {
    let p = triangle();
    for (a, re, im) in TRIANGLE_AUTOCORRELATION {
        let v = p.autocorrelation(a);
        assert!((v.re - re).abs() < 1e-14 && (v.im - im).abs() < 1e-14, "a = {a}: {v}");
    }
}

#[test]
fn triangle_fourier_coefficients_within_1e_minus_8() {
    let ps = periodize(&triangle(), 1.0, 4096, 1e-12).unwrap();
    for (a, re, im) in TRIANGLE_AUTOCORRELATION.iter().take(3) {
        let c = ps.fourier_coeff(*a as i64).unwrap();
        assert!((c - Complex64::new(*re, *im)).norm() < 1e-8);
    }
    assert!((ps.fourier_coeff(0).unwrap().re - 2.0 / 3.0).abs() < 1e-14);
}

#[test]
fn triangle_gram_pair() {
    let g = build_gram(&triangle(), 1.0, &[0, 1], &GramOptions::default()).unwrap();
    let (_, re, im) = TRIANGLE_AUTOCORRELATION[0];
    // entry (1, 0) pairs τ_1 φ with φ
    assert!((g.entry(1, 0) - Complex64::new(re, im)).norm() < 1e-14);
    assert!((g.entry(0, 1) - Complex64::new(re, -im)).norm() < 1e-14);
}

// Σ_{λ,μ ∈ I} G(|λ − μ|) / |Λ ∩ I| for F = min(1, x^{−3/4}) by exact summation
#[test]
fn interval_energy_ratios() {
    let env = TimeEnvelope::power(0.75).unwrap();
    let z = TranslationSet::Integers { n: 2000 }.realize().unwrap();
    let rows = interval_energy_test(&env, &z, &[(0.0, 100.0), (0.0, 1000.0)]);
    assert!((rows[0].ratio - 106.059_346_509_662_61).abs() < 1e-9);
    assert!((rows[1].ratio - 404.344_828_724_998_28).abs() < 1e-8);
    let growth = (rows[1].ratio / rows[0].ratio).ln() / 10f64.ln();
    assert!(growth > 0.4, "integers: {growth}");

    let sq = TranslationSet::squares(200).realize().unwrap();
    let rows = interval_energy_test(&env, &sq, &[(0.0, 100.0), (0.0, 1000.0), (0.0, 10000.0)]);
    let want = [12.536_812_638_082_073, 15.531_772_893_045_612, 17.841_973_083_816_177];
    for (r, w) in rows.iter().zip(want) {
        assert!((r.ratio - w).abs() < 1e-10, "{} vs {w}", r.ratio);
    }
    let growth = (rows[2].ratio / rows[0].ratio).ln() / 100f64.ln();
    assert!(growth < 0.1, "squares: {growth}");
}

#[test]
fn dirichlet_kernel_saturates_the_mass_bound() {
    for n in [4i64, 9, 30] {
        let set = RealizedSet::from_points((0..=n).map(|k| k as f64).collect(), true).unwrap();
        let support: Vec<i64> = (0..=n).collect();
        let coeffs = vec![Complex64::new(1.0, 0.0); support.len()];
        let r = autocorrelation_mass_check(&set, &support, &coeffs, -n, n).unwrap();
        assert!((r.lhs - (n + 1) as f64).abs() < 1e-12);
        assert_eq!(r.rhs, (n + 1) as f64);
        assert!(r.pass);
    }
}

// numpy reimplementation, same grid and per-cell 8-point rule
const WEIGHTED_ENERGY: [f64; 9] = [
    0.103_893_599_890_838_98,
    0.058_206_297_697_508_166,
    0.032_400_269_945_718_645,
    0.017_620_024_506_829_944,
    0.110_944_611_860_996_9,
    0.051_675_139_995_387_635,
    0.026_736_812_454_665_613,
    0.097_715_048_156_158_36,
    0.051_534_746_672_755_87,
];

#[test]
fn dyadic_weighted_energies_match_reference() {
    let v = verify_dyadic_counterexample(0.5, 4, 12, 1 << 16).unwrap();
    for (row, want) in v.rows.iter().zip(WEIGHTED_ENERGY) {
        assert!((row.weighted_energy - want).abs() < 1e-9 * want.max(1.0), "n = {}", row.n);
        assert!((row.norm_sq - 1.0).abs() < 1e-14);
    }
    assert_eq!(v.min_phi, 2f64.powi(-12));
}
