//! The analysis pipeline: validated config in, JSON report and CSV tables out.

use std::collections::BTreeMap;
use std::path::Path;

use frameseq_core::gram::{bounds_from_eigenvalues, bounds_from_phi, weighted_norm_identity_check};
use frameseq_core::hausdorff::{fractal_exactness_evidence, hausdorff_sublevel};
use frameseq_core::rng::trial_rng;
use frameseq_core::sets::{
    envelope_regularity_constant, interval_energy_test, upper_bound_necessary, upper_bound_sufficient, Trend,
};
use frameseq_core::{
    build_gram, classify, periodize, Budgets, Complex64, Error, FourierProfile, GramOptions, PeriodizedSpectrum,
    TranslationSet,
};
use rand::Rng;
use serde_json::{json, Value};

use crate::config::{Analysis, AnalysisConfig, GallerySpec, LambdaSpec, ProfileSpec, VerifySpec, SCHEMA};
use crate::gallery::{dyadic_check, paired_verdicts};
use crate::tables::{to_csv, CoverRow, DensityRow, EigenRow, PhiRow, TrendRow};
use crate::{Failure, EXIT_INCONSISTENT, EXIT_OK, EXIT_UNDETERMINED};

const TAIL_TOL: f64 = 1e-12;
/// Indices used for the weighted-norm identity inside `bounds`.
const IDENTITY_POINTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub exit_code: i32,
    /// Pretty JSON with a trailing newline.
    pub report: String,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    /// Writes `report.json` and every artifact into `dir`, creating it.
    pub fn write_to(&self, dir: &Path) -> Result<(), Failure> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), &self.report)?;
        for a in &self.artifacts {
            std::fs::write(dir.join(&a.name), &a.contents)?;
        }
        Ok(())
    }
}

struct Context<'a> {
    config: &'a AnalysisConfig,
    budgets: Budgets,
    profile: Option<FourierProfile>,
    spectrum: Option<PeriodizedSpectrum>,
    results: BTreeMap<&'static str, Value>,
    artifacts: Vec<Artifact>,
    exit_code: i32,
}

impl Context<'_> {
    fn profile(&self) -> &FourierProfile {
        self.profile.as_ref().expect("validated: profile present")
    }

    fn set(&self) -> Result<TranslationSet, Failure> {
        self.config.lambda.as_ref().expect("validated: lambda present").build()
    }

    fn spectrum(&mut self) -> Result<&PeriodizedSpectrum, Failure> {
        if self.spectrum.is_none() {
            let ps = periodize(self.profile(), self.config.b, self.budgets.grid_size, TAIL_TOL)?;
            self.spectrum = Some(ps);
        }
        Ok(self.spectrum.as_ref().expect("just set"))
    }

    fn raise(&mut self, code: i32) {
        self.exit_code = self.exit_code.max(code);
    }

    fn artifact(&mut self, name: &str, contents: String) {
        self.artifacts.push(Artifact { name: name.into(), contents });
    }
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Runs every requested analysis in dependency order.
pub fn run(config: &AnalysisConfig) -> Result<RunOutput, Failure> {
    config.validate()?;
    let profile = config.profile.as_ref().map(ProfileSpec::build).transpose()?;
    let mut cx = Context {
        config,
        budgets: config.budgets.budgets(config.seed),
        profile,
        spectrum: None,
        results: BTreeMap::new(),
        artifacts: Vec::new(),
        exit_code: EXIT_OK,
    };
    let order = config.ordered_analyses();
    for &a in &order {
        match a {
            Analysis::Periodize => periodize_step(&mut cx)?,
            Analysis::Bounds => bounds_step(&mut cx)?,
            Analysis::Classify => classify_step(&mut cx)?,
            Analysis::Density => density_step(&mut cx)?,
            Analysis::Hausdorff => hausdorff_step(&mut cx)?,
            Analysis::Gallery => gallery_step(&mut cx)?,
            Analysis::Verify => verify_step(&mut cx)?,
        }
    }
    let report = json!({
        "schema": SCHEMA,
        "config_hash": config.hash(),
        "seed": config.seed,
        "b": config.b,
        "budgets": value(&config.budgets),
        "analyses": value(&order),
        "results": value(&cx.results),
        "exit_code": cx.exit_code,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    Ok(RunOutput { exit_code: cx.exit_code, report: text, artifacts: cx.artifacts })
}

fn periodize_step(cx: &mut Context) -> Result<(), Failure> {
    let ps = cx.spectrum()?.clone();
    let thresh = ps.default_zero_thresh();
    let bounds = ps.essential_bounds(thresh)?;
    let zeros = match ps.zero_count(thresh) {
        Ok(z) => value(&z),
        Err(e @ Error::ZeroSetTooLarge { .. }) => json!({ "error": e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    cx.results.insert(
        "periodize",
        json!({
            "b": ps.b(),
            "grid_size": ps.grid_size(),
            "truncation_range": ps.truncation_range(),
            "tail_bound": ps.tail_bound(),
            "norm_sq": ps.norm_sq(),
            "zero_thresh": thresh,
            "bounds": value(&bounds),
            "zero_count": zeros,
        }),
    );
    let rows = (0..ps.grid_size()).map(|j| PhiRow { xi: ps.grid_point(j), phi: ps.values()[j] });
    let csv = to_csv(rows)?;
    cx.artifact("periodize.csv", csv);
    Ok(())
}

/// The `window` points of `Λ` closest to 0, ascending.
pub fn centred_window(set: &TranslationSet, window: usize) -> Result<Vec<i64>, Failure> {
    let mut pts = set.integers()?;
    pts.sort_by_key(|p| (p.unsigned_abs(), *p));
    pts.truncate(window);
    pts.sort_unstable();
    Ok(pts)
}

fn bounds_step(cx: &mut Context) -> Result<(), Failure> {
    let set = match &cx.config.lambda {
        Some(l) => l.build()?,
        None => LambdaSpec::Shorthand("Z".into()).build()?,
    };
    let idx = centred_window(&set, cx.budgets.gram_window)?;
    let opts = GramOptions { tol: cx.budgets.tol, seed: cx.budgets.seed, ..GramOptions::default() };
    let g = build_gram(cx.profile(), cx.config.b, &idx, &opts)?;
    let ev = g.eigenvalues()?;
    let fb = bounds_from_eigenvalues(&ev, cx.budgets.kernel_tol)?;
    let ps = cx.spectrum()?.clone();
    let (a_phi, b_phi) = bounds_from_phi(&ps)?;
    let slack = 1e-9 * b_phi + cx.budgets.tol;
    let upper_consistent = fb.b_est <= b_phi + slack && ev[0] >= -1e-8 * g.norm_sq();

    let k = idx.len().min(IDENTITY_POINTS);
    let mut rng = trial_rng(cx.budgets.seed, 0x6964);
    let coeffs: Vec<Complex64> =
        (0..k).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let identity = weighted_norm_identity_check(cx.profile(), cx.config.b, &idx[..k], &coeffs)?;
    let identity_ok = identity.deviation < 1e-8;
    if !(upper_consistent && identity_ok) {
        cx.raise(EXIT_INCONSISTENT);
    }
    cx.results.insert(
        "bounds",
        json!({
            "window": idx.len(),
            "index_range": [idx[0], idx[idx.len() - 1]],
            "gram": value(&fb),
            "cross_checked_shifts": g.cross_checked_shifts().len(),
            "max_cross_check_deviation": g.max_cross_check_deviation(),
            "phi": { "a": a_phi, "b": b_phi, "grid_size": ps.grid_size() },
            "upper_consistent": upper_consistent,
            "weighted_norm_identity": value(&identity),
            "identity_consistent": identity_ok,
        }),
    );
    let csv = to_csv(ev.iter().enumerate().map(|(k, &eigenvalue)| EigenRow { k, eigenvalue }))?;
    cx.artifact("gram.csv", csv);
    Ok(())
}

fn classify_step(cx: &mut Context) -> Result<(), Failure> {
    let set = cx.set()?;
    let report = classify(cx.profile(), cx.config.b, &set, &cx.budgets)?;
    if !report.classification.is_determinate() {
        cx.raise(EXIT_UNDETERMINED);
    }
    let rows: Vec<TrendRow> = report
        .windows
        .iter()
        .zip(report.a_trend.iter().zip(&report.b_trend))
        .map(|(&window, (&a_est, &b_est))| TrendRow { window, a_est, b_est })
        .collect();
    cx.results.insert("classify", value(&report));
    let csv = to_csv(rows)?;
    cx.artifact("classify.csv", csv);
    Ok(())
}

fn density_step(cx: &mut Context) -> Result<(), Failure> {
    let p = &cx.config.density;
    let env = cx.config.envelope.as_ref().expect("validated: envelope present").build()?;
    let set = cx.set()?.realize()?;
    let steps = (p.x_max.log2() * p.per_octave as f64).ceil() as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let x = (p.x_max.ln() * k as f64 / steps as f64).exp();
        let d = set.density(x)?;
        let g = env.g(x);
        rows.push(DensityRow { x, density: d, g, product: g * d as f64 });
    }
    let sufficiency = upper_bound_sufficient(&env, &set, p.x_max)?;
    let necessity = upper_bound_necessary(&env, &set, &p.windows)?;
    for t in [sufficiency.verdict, necessity.verdict] {
        if t == Trend::Undetermined {
            cx.raise(EXIT_UNDETERMINED);
        }
    }
    let (lo, hi) = p.regularity_range;
    let grid: Vec<f64> = (0..=64).map(|k| lo * (hi / lo).powf(k as f64 / 64.0)).collect();
    let regularity = match envelope_regularity_constant(&env, &grid) {
        Ok(c) => json!({ "constant": c, "range": [lo, hi] }),
        Err(e @ Error::Hypothesis(_)) => json!({ "error": e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    let intervals: Vec<(f64, f64)> = p.windows.iter().map(|&w| (0.0, w)).collect();
    let energy = interval_energy_test(&env, &set, &intervals);
    let sparsity = set.sparsity(p.sparsity_shifts)?;
    cx.results.insert(
        "density",
        json!({
            "points": set.len(),
            "complete": set.is_complete(),
            "sufficiency": value(&sufficiency),
            "necessity": value(&necessity),
            "regularity": regularity,
            "interval_energy": value(&energy),
            "sparsity": value(&sparsity),
        }),
    );
    let csv = to_csv(rows)?;
    cx.artifact("density.csv", csv);
    Ok(())
}

fn hausdorff_step(cx: &mut Context) -> Result<(), Failure> {
    let params = cx.config.hausdorff.clone();
    let ps = cx.spectrum()?.clone();
    if !ps.grid_size().is_power_of_two() {
        return Err(Failure::Usage("hausdorff covers need a power-of-two grid".into()));
    }
    let depth = params.max_depth.min(ps.grid_size().trailing_zeros());
    let rows = params
        .eps
        .iter()
        .map(|&eps| {
            hausdorff_sublevel(&ps, params.alpha, eps, 0..=depth).map(|c| CoverRow {
                eps,
                alpha: c.alpha,
                measure_sum: c.measure_sum,
                intervals: c.intervals.len(),
                depth: c.depth,
                full_circle: c.full_circle,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let evidence = match params.a {
        Some(a) => {
            let set = cx.set()?;
            let ev = fractal_exactness_evidence(cx.profile(), cx.config.b, &set, a, &cx.budgets)?;
            if ev.classification.is_none() {
                cx.raise(EXIT_UNDETERMINED);
            }
            value(&ev)
        }
        None => Value::Null,
    };
    cx.results.insert(
        "hausdorff",
        json!({ "sup": ps.sup(), "grid_size": ps.grid_size(), "covers": value(&rows), "fractal_evidence": evidence }),
    );
    let csv = to_csv(rows)?;
    cx.artifact("hausdorff.csv", csv);
    Ok(())
}

fn gallery_step(cx: &mut Context) -> Result<(), Failure> {
    let spec = cx.config.gallery.clone().expect("validated: gallery present");
    match &spec {
        GallerySpec::Dyadic(params) => {
            let (check, profile) = dyadic_check(params)?;
            cx.raise(check.exit_code);
            let csv = to_csv(&check.verification.rows)?;
            cx.artifact("verify.csv", csv);
            cx.artifact("hausdorff.csv", to_csv(&check.covers)?);
            cx.artifact("profile.json", profile_json(&profile));
            cx.results.insert("gallery", json!({ "case": "sec5", "check": value(&check) }));
        }
        _ => {
            let pair = paired_verdicts(&spec, &cx.budgets)?;
            cx.raise(pair.exit_code);
            let (profile, _) = crate::gallery::spacing_profile(&spec)?;
            cx.artifact("profile.json", profile_json(&profile));
            cx.artifact("gallery.csv", to_csv(pair.rows())?);
            cx.results.insert(
                "gallery",
                json!({ "case": pair.case, "profile": value(&ProfileSpec::from_profile(&profile)), "pair": value(&pair) }),
            );
        }
    }
    Ok(())
}

fn verify_step(cx: &mut Context) -> Result<(), Failure> {
    let VerifySpec::Dyadic(params) = cx.config.verify.clone().expect("validated: verify target present");
    let (check, _) = dyadic_check(&params)?;
    cx.raise(check.exit_code);
    cx.artifact("verify.csv", to_csv(&check.verification.rows)?);
    cx.artifact("hausdorff.csv", to_csv(&check.covers)?);
    cx.results.insert("verify", json!({ "target": "sec5", "check": value(&check) }));
    Ok(())
}

fn profile_json(profile: &FourierProfile) -> String {
    let mut s = serde_json::to_string(&ProfileSpec::from_profile(profile)).expect("profile serializes");
    s.push('\n');
    s
}
