//! Worked constructions: paired spacing verdicts and the dyadic block
//! counterexample.

use frameseq_core::constructions::{
    coarse_spacing_frame_profile, dyadic_spectrum, fine_spacing_frame_profile, verify_dyadic_counterexample,
    DyadicVerification,
};
use frameseq_core::hausdorff::hausdorff_sublevel;
use frameseq_core::{
    classify, periodize, Budgets, Classification, EssentialBounds, FourierProfile, FrameReport, TranslationSet,
};
use serde::Serialize;

use crate::config::{DyadicParams, GallerySpec, SHORTHAND_EXTENT};
use crate::tables::{CoverRow, VerdictRow};
use crate::{Failure, EXIT_INCONSISTENT, EXIT_OK, EXIT_UNDETERMINED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Frame,
    NotFrame,
}

impl Expectation {
    pub fn matches(self, c: Classification) -> bool {
        match self {
            Expectation::Frame => c.is_frame(),
            Expectation::NotFrame => c == Classification::NotFrameSequence,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingVerdict {
    pub spacing: f64,
    pub expected: Expectation,
    pub matches: bool,
    pub periodization: EssentialBounds,
    pub report: FrameReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairedVerdicts {
    pub case: &'static str,
    pub a: f64,
    pub b: f64,
    /// Plateau width of the fine spacing construction.
    pub eps: Option<f64>,
    pub verdicts: Vec<SpacingVerdict>,
    pub exit_code: i32,
}

impl PairedVerdicts {
    pub fn rows(&self) -> Vec<VerdictRow> {
        self.verdicts
            .iter()
            .map(|v| VerdictRow {
                spacing: v.spacing,
                classification: kebab(v.report.classification),
                expected: match v.expected {
                    Expectation::Frame => "frame".into(),
                    Expectation::NotFrame => "not-frame".into(),
                },
                a_est: v.report.a_est,
                b_est: v.report.b_est,
                inf_nonzero: v.periodization.inf_nonzero,
                sup: v.periodization.sup,
                zero_fraction: v.periodization.zero_fraction,
            })
            .collect()
    }
}

pub fn kebab(c: Classification) -> String {
    serde_json::to_value(c).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn verdict_at(
    profile: &FourierProfile,
    spacing: f64,
    expected: Expectation,
    budgets: &Budgets,
) -> Result<SpacingVerdict, Failure> {
    let report = classify(profile, spacing, &TranslationSet::Integers { n: SHORTHAND_EXTENT }, budgets)?;
    let ps = periodize(profile, spacing, budgets.grid_size, 1e-12)?;
    let periodization = ps.essential_bounds(ps.default_zero_thresh())?;
    Ok(SpacingVerdict { spacing, expected, matches: expected.matches(report.classification), periodization, report })
}

/// Profile of a spacing construction, with the plateau width when there is one.
pub fn spacing_profile(spec: &GallerySpec) -> Result<(FourierProfile, Option<f64>), Failure> {
    match spec {
        GallerySpec::CoarseSpacing { a, b } => Ok((coarse_spacing_frame_profile(*a, *b)?, None)),
        GallerySpec::FineSpacing { a, b } => {
            let (p, eps) = fine_spacing_frame_profile(*a, *b)?;
            Ok((p, Some(eps)))
        }
        GallerySpec::Dyadic(_) => Err(Failure::Usage("the dyadic case has no spacing pair".into())),
    }
}

/// Verdicts at `b` and at `a` for one of the spacing constructions.
pub fn paired_verdicts(spec: &GallerySpec, budgets: &Budgets) -> Result<PairedVerdicts, Failure> {
    let (profile, eps) = spacing_profile(spec)?;
    let (case, a, b, at_b, at_a) = match spec {
        GallerySpec::CoarseSpacing { a, b } => ("thm23-1", *a, *b, Expectation::NotFrame, Expectation::Frame),
        GallerySpec::FineSpacing { a, b } => ("thm23-3", *a, *b, Expectation::Frame, Expectation::NotFrame),
        GallerySpec::Dyadic(_) => unreachable!("rejected by spacing_profile"),
    };
    let (vb, va) = rayon::join(|| verdict_at(&profile, b, at_b, budgets), || verdict_at(&profile, a, at_a, budgets));
    let verdicts = vec![vb?, va?];
    let exit_code = if verdicts.iter().any(|v| !v.report.classification.is_determinate()) {
        EXIT_UNDETERMINED
    } else if verdicts.iter().all(|v| v.matches) {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    };
    Ok(PairedVerdicts { case, a, b, eps, verdicts, exit_code })
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicCheck {
    pub params: DyadicParams,
    pub verification: DyadicVerification,
    /// `w_{n+1} < w_n` for every row.
    pub strictly_decreasing: bool,
    /// `w_{n+1} < w_n` whenever `m_{n+1} = m_n`.
    pub decreasing_within_runs: bool,
    pub phi_positive: bool,
    pub covers: Vec<CoverRow>,
    pub covers_decreasing: bool,
    pub exit_code: i32,
}

pub const DYADIC_COVER_LEVELS: [f64; 4] = [0.125, 0.03125, 0.0078125, 0.001953125];

pub fn dyadic_check(params: &DyadicParams) -> Result<(DyadicCheck, FourierProfile), Failure> {
    if !params.grid_size.is_power_of_two() {
        return Err(Failure::Usage("dyadic grid size must be a power of two".into()));
    }
    let verification = verify_dyadic_counterexample(params.alpha, params.n_lo, params.n_max, params.grid_size)?;
    let ds = dyadic_spectrum(params.alpha, params.n_max, params.grid_size)?;
    let rows = &verification.rows;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].weighted_energy < w[0].weighted_energy);
    let decreasing_within_runs =
        rows.windows(2).all(|w| w[1].m != w[0].m || w[1].weighted_energy < w[0].weighted_energy);
    let phi_positive = verification.min_phi > 0.0;
    let depth = params.grid_size.trailing_zeros();
    let covers = DYADIC_COVER_LEVELS
        .iter()
        .map(|&eps| {
            hausdorff_sublevel(&ds.spectrum, params.alpha, eps, 0..=depth).map(|c| CoverRow {
                eps,
                alpha: c.alpha,
                measure_sum: c.measure_sum,
                intervals: c.intervals.len(),
                depth: c.depth,
                full_circle: c.full_circle,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let covers_decreasing = covers.windows(2).all(|w| w[1].measure_sum < w[0].measure_sum);
    let exit_code = if verification.energy_collapses && phi_positive { EXIT_OK } else { EXIT_UNDETERMINED };
    let check = DyadicCheck {
        params: params.clone(),
        verification,
        strictly_decreasing,
        decreasing_within_runs,
        phi_positive,
        covers,
        covers_decreasing,
        exit_code,
    };
    Ok((check, ds.profile))
}

/// A gallery profile and the spacings it is shown at.
#[derive(Debug, Clone)]
pub struct GalleryProfile {
    pub name: &'static str,
    pub profile: FourierProfile,
    pub spacings: Vec<f64>,
}

/// Every profile the gallery produces at its default parameters, plus the
/// unit box and the half box.
pub fn gallery_profiles() -> Result<Vec<GalleryProfile>, Failure> {
    let (fine, _) = fine_spacing_frame_profile(3.0, 2.0)?;
    Ok(vec![
        GalleryProfile { name: "box", profile: FourierProfile::indicator(0.0, 1.0)?, spacings: vec![1.0] },
        GalleryProfile { name: "half-box", profile: FourierProfile::indicator(0.0, 0.5)?, spacings: vec![1.0] },
        GalleryProfile {
            name: "coarse-spacing",
            profile: coarse_spacing_frame_profile(2.0, 1.0)?,
            spacings: vec![1.0, 2.0],
        },
        GalleryProfile { name: "fine-spacing", profile: fine, spacings: vec![2.0, 3.0] },
        GalleryProfile { name: "dyadic", profile: dyadic_spectrum(0.5, 12, 1 << 16)?.profile, spacings: vec![1.0] },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_pair_matches() {
        let p = paired_verdicts(&GallerySpec::CoarseSpacing { a: 2.0, b: 1.0 }, &Budgets::default()).unwrap();
        assert_eq!(p.exit_code, EXIT_OK);
        assert_eq!(p.verdicts[0].report.classification, Classification::NotFrameSequence);
        assert!(p.verdicts[1].report.classification.is_frame());
        assert_eq!(p.rows()[0].classification, "not-frame-sequence");
    }

    #[test]
    fn dyadic_spec_has_no_pair() {
        let spec = GallerySpec::Dyadic(DyadicParams { alpha: 0.5, n_max: 6, n_lo: 2, grid_size: 1 << 10 });
        assert!(matches!(paired_verdicts(&spec, &Budgets::default()), Err(Failure::Usage(_))));
    }

    #[test]
    fn small_dyadic_check_runs() {
        let (c, p) = dyadic_check(&DyadicParams { alpha: 0.5, n_max: 8, n_lo: 2, grid_size: 1 << 12 }).unwrap();
        assert!(c.phi_positive);
        assert_eq!(c.covers.len(), 4);
        assert_eq!(p.support(), (0.0, 1.0));
        assert!(dyadic_check(&DyadicParams { alpha: 0.5, n_max: 8, n_lo: 2, grid_size: 1000 }).is_err());
    }
}
