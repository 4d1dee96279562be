use frameseq_core::classify::truncation_decay;
use frameseq_core::constructions::{
    coarse_spacing_frame_profile, dyadic_spectrum, fine_spacing_frame_profile, verify_dyadic_counterexample,
};
use frameseq_core::hausdorff::{fractal_exactness_evidence, hausdorff_sublevel, local_energy_scan};
use frameseq_core::sets::{upper_bound_necessary, upper_bound_sufficient, RealizedSet, Trend};
use frameseq_core::{
    classify, periodize, Budgets, Classification, Complex64, Error, FourierProfile, RateFunction, TimeEnvelope,
    TranslationSet,
};

fn z() -> TranslationSet {
    TranslationSet::Integers { n: 1000 }
}

#[test]
fn box_is_orthonormal() {
    let r = classify(&FourierProfile::indicator(0.0, 1.0).unwrap(), 1.0, &z(), &Budgets::default()).unwrap();
    assert_eq!(r.classification, Classification::Orthonormal);
    let r = classify(
        &FourierProfile::indicator(0.0, 1.0).unwrap(),
        1.0,
        &TranslationSet::squares(300),
        &Budgets::default(),
    )
    .unwrap();
    assert_eq!(r.classification, Classification::Orthonormal);
}

#[test]
fn coarse_spacing_pair() {
    for a in [2.0, 3.0] {
        let p = coarse_spacing_frame_profile(a, 1.0).unwrap();
        let at_b = classify(&p, 1.0, &z(), &Budgets::default()).unwrap();
        let at_a = classify(&p, a, &z(), &Budgets::default()).unwrap();
        assert_eq!(at_b.classification, Classification::NotFrameSequence, "a = {a}");
        assert!(at_a.classification.is_frame(), "a = {a}");
        assert!(at_a.a_est.unwrap() * a >= 1.0 - 1e-9);
        let sub = classify(&p, 1.0, &TranslationSet::Subgroup { m: a as i64, n: 1000 }, &Budgets::default()).unwrap();
        assert!(sub.classification.is_frame());
    }
}

#[test]
fn fine_spacing_pair() {
    for (a, b) in [(3.0, 2.0), (std::f64::consts::PI, 1.0)] {
        let (p, eps) = fine_spacing_frame_profile(a, b).unwrap();
        let at_b = classify(&p, b, &z(), &Budgets::default()).unwrap();
        let at_a = classify(&p, a, &z(), &Budgets::default()).unwrap();
        assert!(at_b.classification.is_frame(), "({a}, {b})");
        assert_eq!(at_a.classification, Classification::NotFrameSequence, "({a}, {b})");
        let c = eps.min(eps / b);
        assert!(at_b.a_est.unwrap() * b >= (c * c).min(1.0) * (1.0 - 1e-9));
    }
}

#[test]
fn fine_spacing_periodization_is_at_least_one_near_zero() {
    let (p, eps) = fine_spacing_frame_profile(std::f64::consts::PI, 1.0).unwrap();
    let ps = periodize(&p, 1.0, 4096, 1e-12).unwrap();
    for j in 0..4096 {
        let xi = ps.grid_point(j);
        if xi <= eps {
            assert!(ps.values()[j] >= 1.0);
        }
    }
}

#[test]
fn half_line_forces_exactness() {
    let half = FourierProfile::indicator(0.0, 0.5).unwrap();
    let lattice = classify(&half, 1.0, &z(), &Budgets::default()).unwrap();
    assert_eq!(lattice.classification, Classification::FrameSequence);
    let naturals = classify(&half, 1.0, &TranslationSet::Naturals { n: 1000 }, &Budgets::default()).unwrap();
    assert_eq!(naturals.classification, Classification::NotFrameSequence);
    let tri = coarse_spacing_frame_profile(2.0, 1.0).unwrap();
    let r = classify(&tri, 2.0, &TranslationSet::Naturals { n: 1000 }, &Budgets::default()).unwrap();
    assert_eq!(r.classification, Classification::ExactFrameSequence);
}

#[test]
fn truncated_lower_bounds_decay() {
    let half = FourierProfile::indicator(0.0, 0.5).unwrap();
    let a: Vec<f64> = truncation_decay(&half, 1.0, &[8, 16, 32, 64, 128], &Budgets::default())
        .unwrap()
        .iter()
        .map(|f| f.a_est)
        .collect();
    assert!(a.windows(2).all(|w| w[1] < w[0]));
    assert!(a[3] < a[0]);
    let refuse = |p: &FourierProfile| truncation_decay(p, 1.0, &[8], &Budgets::default());
    assert!(matches!(refuse(&FourierProfile::indicator(0.0, 1.0).unwrap()), Err(Error::Precondition(_))));
    assert!(matches!(refuse(&coarse_spacing_frame_profile(2.0, 1.0).unwrap()), Err(Error::Precondition(_))));
}

#[test]
fn generic_sets_use_gram_trends() {
    let tri = coarse_spacing_frame_profile(2.0, 1.0).unwrap();
    let r = classify(&tri, 1.0, &TranslationSet::squares(2000), &Budgets::default()).unwrap();
    assert_eq!(r.classification, Classification::ExactFrameSequence);
    assert_eq!(r.a_trend.len(), 4);
    let finite = classify(&tri, 1.0, &TranslationSet::Explicit(vec![0.0, 5.0, 9.0]), &Budgets::default()).unwrap();
    assert_eq!(finite.classification, Classification::ExactFrameSequence);
    assert!(matches!(
        classify(&tri, 1.0, &TranslationSet::Explicit(vec![0.5]), &Budgets::default()),
        Err(Error::NonInteger)
    ));
}

#[test]
fn upper_bound_examples() {
    let f = TimeEnvelope::power(0.75).unwrap();
    let ints = TranslationSet::Integers { n: 2000 }.realize().unwrap();
    let nec = upper_bound_necessary(&f, &ints, &[1000.0, 2000.0, 4000.0]).unwrap();
    assert_eq!(nec.verdict, Trend::Violated);
    assert!(nec.growth_factor >= 2.0);
    assert_eq!(upper_bound_sufficient(&f, &ints, 4000.0).unwrap().verdict, Trend::Diverges);

    let fourth = TranslationSet::Powers { exponent: 4, n_max: 30 }.realize().unwrap();
    assert_eq!(upper_bound_necessary(&f, &fourth, &[1000.0, 2000.0, 4000.0]).unwrap().verdict, Trend::Bounded);
    assert_eq!(upper_bound_sufficient(&f, &fourth, 1e5).unwrap().verdict, Trend::Converges);

    let l1 = TimeEnvelope::power(2.0).unwrap();
    assert_eq!(upper_bound_sufficient(&l1, &ints, 4000.0).unwrap().verdict, Trend::Converges);
    assert_eq!(upper_bound_necessary(&l1, &ints, &[1000.0, 4000.0]).unwrap().verdict, Trend::Bounded);

    let expo = TimeEnvelope::exponential(1.0, RateFunction::LinearOverLog).unwrap();
    assert_eq!(upper_bound_sufficient(&expo, &ints, 4000.0).unwrap().verdict, Trend::Undetermined);
}

#[test]
fn character_local_energy_is_scale_free() {
    let set = RealizedSet::from_points(vec![-3000.0, 17.0, 5000.0], true).unwrap();
    let inputs = vec![(vec![17], vec![Complex64::new(0.3, -0.4)])];
    let lengths: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
    let scan = local_energy_scan(&set, &inputs, 0.3, &lengths).unwrap();
    assert!(scan.slope.abs() < 1e-9);
    assert!(scan.max_ratio.iter().all(|r| (r - 1.0).abs() < 1e-12));
}

#[test]
fn fractal_evidence_paths() {
    let budgets = Budgets::default();
    let tri = coarse_spacing_frame_profile(2.0, 1.0).unwrap();
    let ok = fractal_exactness_evidence(&tri, 1.0, &TranslationSet::squares(2000), 0.75, &budgets).unwrap();
    assert_eq!(ok.failed, None, "{ok:?}");
    assert_eq!(ok.classification, Some(Classification::ExactFrameSequence));

    let bx = FourierProfile::indicator(0.0, 1.0).unwrap();
    let fail = fractal_exactness_evidence(&bx, 1.0, &TranslationSet::Integers { n: 2000 }, 0.75, &budgets).unwrap();
    assert_eq!(fail.failed, Some("density-exponent"));
    assert!(fail.classification.is_none());
}

#[test]
fn dyadic_sublevel_covers_shrink() {
    let ds = dyadic_spectrum(0.5, 12, 1 << 16).unwrap();
    let sums: Vec<f64> = [3, 5, 7, 9]
        .iter()
        .map(|&k| hausdorff_sublevel(&ds.spectrum, 0.5, 2f64.powi(-k), 0..=16).unwrap().measure_sum)
        .collect();
    assert!(sums.windows(2).all(|w| w[1] < w[0]), "{sums:?}");
}

#[test]
fn dyadic_measure_and_energy_ratios_stay_bounded() {
    let v = verify_dyadic_counterexample(0.5, 4, 12, 1 << 16).unwrap();
    for r in &v.rows {
        assert!(r.f_measure_ratio > 0.0 && r.f_measure_ratio <= 1.0, "n = {}: {}", r.n, r.f_measure_ratio);
        assert!(r.e_energy_ratio > 0.0 && r.e_energy_ratio <= 1.0, "n = {}: {}", r.n, r.e_energy_ratio);
    }
    assert!(v.min_phi > 0.0);
    assert!(v.energy_collapses);
}
