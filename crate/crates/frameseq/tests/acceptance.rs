//! Acceptance criteria 1 to 10. Prints one line per criterion and exits
//! nonzero when any of them fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use frameseq::config::DyadicParams;
use frameseq::gallery::{dyadic_check, gallery_profiles};
use frameseq::run::centred_window;
use frameseq_core::classify::truncation_decay;
use frameseq_core::constructions::coarse_spacing_frame_profile;
use frameseq_core::gram::{build_gram, FrameBounds};
use frameseq_core::hausdorff::{autocorrelation_mass_check, local_energy_scan};
use frameseq_core::periodization::dilation_deviation;
use frameseq_core::rng::trial_rng;
use frameseq_core::sets::{envelope_regularity_constant, upper_bound_necessary, RealizedSet, Trend};
use frameseq_core::{
    periodize, Budgets, Complex64, FourierProfile, GramOptions, Piece, Shape, TimeEnvelope, TranslationSet,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frameseq"))
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let t = start.elapsed();
    if t < limit {
        Ok(format!("{detail}, {:.1}s", t.as_secs_f64()))
    } else {
        Err(format!("{detail}, took {:.1}s (limit {}s)", t.as_secs_f64(), limit.as_secs()))
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn a_est(p: &FourierProfile, b: f64, idx: &[i64]) -> Result<f64, String> {
    let g = build_gram(p, b, idx, &GramOptions::default()).map_err(|e| e.to_string())?;
    Ok(g.frame_bound_estimates(Budgets::default().kernel_tol).map_err(|e| e.to_string())?.a_est)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let bx = FourierProfile::indicator(0.0, 1.0).map_err(|e| e.to_string())?;
    let ps = periodize(&bx, 1.0, 4096, 1e-12).map_err(|e| e.to_string())?;
    let phi_dev = ps.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let idx: Vec<i64> = (0..64).collect();
    let ev =
        build_gram(&bx, 1.0, &idx, &GramOptions::default()).and_then(|g| g.eigenvalues()).map_err(|e| e.to_string())?;
    let gram_dev = ev.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let detail = format!("max|phi-1| = {phi_dev:.2e}, max|ev-1| = {gram_dev:.2e}");
    check(phi_dev < 1e-12 && gram_dev <= 1e-6, detail.clone())?;
    within(Duration::from_secs(5), start, detail)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p = coarse_spacing_frame_profile(2.0, 1.0).map_err(|e| e.to_string())?;
    let ps = periodize(&p, 1.0, 4096, 1e-12).map_err(|e| e.to_string())?;
    let sup = ps.sup();
    let z = TranslationSet::Integers { n: 1000 };
    let w256 = centred_window(&z, 256).map_err(|e| e.to_string())?;
    let w32 = centred_window(&z, 32).map_err(|e| e.to_string())?;
    let g = build_gram(&p, 1.0, &w256, &GramOptions::default()).map_err(|e| e.to_string())?;
    let fb = g.frame_bound_estimates(Budgets::default().kernel_tol).map_err(|e| e.to_string())?;
    let a32 = a_est(&p, 1.0, &w32)?;
    let rel = (fb.b_est - sup).abs() / sup;
    let detail = format!(
        "B_est(256) = {:.6}, sup phi = {sup:.6}, rel {rel:.2e}; A_est(256) = {:.3e}, A_est(32) = {a32:.3e}",
        fb.b_est, fb.a_est
    );
    check(rel <= 0.05 && fb.a_est < 0.5 * a32, detail.clone())?;
    within(Duration::from_secs(30), start, detail)
}

fn criterion_3() -> Outcome {
    let profiles = [
        FourierProfile::indicator(0.0, 1.0),
        coarse_spacing_frame_profile(2.0, 1.0),
        FourierProfile::new(vec![
            Piece::new(-0.3, 0.2, Shape::Affine { slope: 1.5, intercept: 0.6 }),
            Piece::new(0.4, 1.7, Shape::Constant(0.25)),
        ]),
    ];
    let mut worst = 0.0f64;
    for (k, p) in profiles.into_iter().enumerate() {
        let p = p.map_err(|e| e.to_string())?;
        let b = [1.0, 0.5, 0.7][k];
        worst = worst.max(dilation_deviation(&p, b, 2, 4096).map_err(|e| e.to_string())?);
    }
    check(worst < 1e-10, format!("max deviation over 3 profiles = {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (case, a, b) in [("thm23-1", "2", "1"), ("thm23-3", "3", "2")] {
        let out = bin().args(["gallery", case, "--a", a, "--b", b]).output().map_err(|e| e.to_string())?;
        let code = out.status.code().unwrap_or(-1);
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{case}: {e}"))?;
        let verdicts = report["results"]["gallery"]["pair"]["verdicts"].as_array().cloned().unwrap_or_default();
        let frames: Vec<(f64, bool)> = verdicts
            .iter()
            .map(|v| (v["spacing"].as_f64().unwrap_or(f64::NAN), v["matches"].as_bool() == Some(true)))
            .collect();
        let paired = frames.len() == 2 && frames.iter().all(|f| f.1);
        ok &= code == 0 && paired;
        details.push(format!("{case} (a={a}, b={b}) exit {code}, paired {paired}"));
    }
    check(ok, details.join("; "))
}

fn criterion_5() -> Outcome {
    let half = FourierProfile::indicator(0.0, 0.5).map_err(|e| e.to_string())?;
    let fb = truncation_decay(&half, 1.0, &[8, 128], &Budgets::default()).map_err(|e| e.to_string())?;
    let (a8, a128) = (fb[0].a_est, fb[1].a_est);
    check(a128 < 0.5 * a8, format!("A_est(8) = {a8:.4e}, A_est(128) = {a128:.4e}"))
}

fn criterion_6() -> Outcome {
    let env = TimeEnvelope::power(0.75).map_err(|e| e.to_string())?;
    let windows = [1e3, 2e3, 4e3];
    let z = RealizedSet::from_points((-5000..=5000).map(|n| n as f64).collect(), false).map_err(|e| e.to_string())?;
    let nz = upper_bound_necessary(&env, &z, &windows).map_err(|e| e.to_string())?;
    let quartic =
        RealizedSet::from_points((0..=10i64).map(|n| n.pow(4) as f64).collect(), false).map_err(|e| e.to_string())?;
    let nq = upper_bound_necessary(&env, &quartic, &windows).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=64).map(|k| 10f64.powf(4.0 * k as f64 / 64.0)).collect();
    let c = envelope_regularity_constant(&env, &grid).map_err(|e| e.to_string())?;
    let detail = format!(
        "Z growth {:.3} ({:?}), n^4 growth {:.3} ({:?}), regularity C = {c:.4}",
        nz.growth_factor, nz.verdict, nq.growth_factor, nq.verdict
    );
    check(nz.growth_factor >= 2.0 && nq.verdict == Trend::Bounded && c < 10.0, detail)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000u64 {
        let mut rng = trial_rng(0x4c34, i);
        let mut support: Vec<i64> = (0..rng.random_range(1..12)).map(|_| rng.random_range(0i64..64)).collect();
        support.sort_unstable();
        support.dedup();
        let set =
            RealizedSet::from_points(support.iter().map(|&v| v as f64).collect(), true).map_err(|e| e.to_string())?;
        let mut c: Vec<Complex64> =
            support.iter().map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        c[0] += Complex64::new(0.5, 0.0);
        let lo = rng.random_range(-80i64..80);
        let hi = lo + rng.random_range(0i64..80);
        let r = autocorrelation_mass_check(&set, &support, &c, lo, hi).map_err(|e| e.to_string())?;
        worst = worst.max(r.lhs - r.rhs);
        if r.lhs > r.rhs + 1e-12 {
            violations += 1;
        }
    }
    let mut max_slope = 0.0f64;
    for i in 0..16u64 {
        let mut rng = trial_rng(0x4c35, i);
        let freq = rng.random_range(-5000i64..5000);
        let set = RealizedSet::from_points(vec![(freq - 7919) as f64, freq as f64, (freq + 104_729) as f64], true)
            .map_err(|e| e.to_string())?;
        let c = vec![Complex64::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..TAU))];
        let lengths: Vec<f64> = (3..=7).map(|k| 0.5f64.powi(k)).collect();
        let scan = local_energy_scan(&set, &[(vec![freq], c)], rng.random_range(0.0..1.0), &lengths)
            .map_err(|e| e.to_string())?;
        max_slope = max_slope.max(scan.slope.abs());
    }
    let detail = format!("{violations} mass violations (max excess {worst:.2e}), max |slope| = {max_slope:.2e}");
    check(violations == 0 && max_slope <= 0.2, detail.clone())?;
    within(Duration::from_secs(60), start, detail)
}

fn criterion_8() -> Outcome {
    let z = TranslationSet::Integers { n: 1000 };
    let windows: Vec<Vec<i64>> =
        [64, 128, 256].iter().map(|&w| centred_window(&z, w)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    let mut psd_worst = 0.0f64;
    let mut cases = 0;
    for g in gallery_profiles().map_err(|e| e.to_string())? {
        for &b in &g.spacings {
            cases += 1;
            let nested = windows
                .iter()
                .map(|idx| {
                    build_gram(&g.profile, b, idx, &GramOptions::default())
                        .and_then(|m| m.frame_bound_estimates(Budgets::default().kernel_tol))
                })
                .collect::<Result<Vec<FrameBounds>, _>>()
                .map_err(|e| e.to_string())?;
            let norm = g.profile.norm_sq();
            for fb in &nested {
                psd_worst = psd_worst.max(-fb.min_eigenvalue / norm);
            }
            for w in nested.windows(2) {
                if w[1].a_est > w[0].a_est {
                    failures.push(format!("{}@{b}: A_est {:.3e} -> {:.3e}", g.name, w[0].a_est, w[1].a_est));
                }
                if w[1].b_est < w[0].b_est {
                    failures.push(format!("{}@{b}: B_est {:.6} -> {:.6}", g.name, w[0].b_est, w[1].b_est));
                }
            }
        }
    }
    let detail = format!(
        "{cases} cases, worst -min_ev/|phi|^2 = {psd_worst:.2e}, {} monotonicity violations{}{}",
        failures.len(),
        if failures.is_empty() { "" } else { ": " },
        failures.join("; ")
    );
    check(psd_worst <= 1e-8 && failures.is_empty(), detail)
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let params = DyadicParams { alpha: 0.5, n_max: 12, n_lo: 4, grid_size: 1 << 16 };
    let (dc, _) = dyadic_check(&params).map_err(|e| e.to_string())?;
    let v = &dc.verification;
    let w: Vec<f64> = v.rows.iter().map(|r| r.weighted_energy).collect();
    let (w4, w12) = (w[0], w[w.len() - 1]);
    let decreasing = w.windows(2).all(|p| p[1] < p[0]);
    let sums: Vec<String> = dc.covers.iter().map(|c| format!("{:.3e}", c.measure_sum)).collect();
    let ws: Vec<String> = w.iter().map(|x| format!("{x:.5}")).collect();
    let detail = format!(
        "w_4..w_12 = [{}], decreasing {decreasing}, w_12/w_4 = {:.3}, min phi = {:.3e}, density exponent {:.3} (bound {:.2}), cover sums [{}] decreasing {}",
        ws.join(", "),
        w12 / w4,
        v.min_phi,
        v.density_exponent,
        v.density_bound,
        sums.join(", "),
        dc.covers_decreasing
    );
    let ok = decreasing
        && w12 < 0.5 * w4
        && dc.phi_positive
        && v.density_exponent <= v.density_bound
        && dc.covers.len() == 4
        && dc.covers_decreasing;
    check(ok, detail.clone())?;
    within(Duration::from_secs(600), start, detail)
}

fn criterion_10() -> Outcome {
    let run = || bin().args(["selftest", "--seed", "20240917"]).output().map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    check(
        same && a.status.code() == Some(0),
        format!("{} bytes, identical {same}, exit {:?}", a.stdout.len(), a.status.code()),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        match f() {
            Ok(d) => println!("criterion {n}: PASS {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n}: FAIL {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
