use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frameseq::config::{
    read_json_arg, read_lambda_arg, Analysis, AnalysisConfig, DyadicParams, EnvelopeSpec, GallerySpec, LambdaSpec,
    ProfileSpec, VerifySpec,
};
use frameseq::selftest::{selftest, DEFAULT_TRIALS};
use frameseq::tables::COLUMNS;
use frameseq::{run, Failure, EXIT_INCONSISTENT, EXIT_OK, EXIT_USAGE};

const AFTER_HELP: &str = "\
Exit status: 0 determinate result, 1 usage or schema error, 2 undetermined
verdict, 3 failed internal cross-check.

Profiles, envelopes and translation sets are JSON, given inline or as a file
path. Translation sets also accept the shorthands Z, N and mZ (e.g. 3Z).
FRAMESEQ_THREADS caps the worker threads.";

#[derive(Parser)]
#[command(name = "frameseq", version, about = "Frame bounds of integer translates", after_help = format!("{AFTER_HELP}\n\n{COLUMNS}"))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Root seed, recorded in every report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report.json and the CSV tables; the report goes to
    /// stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid size M for the periodization.
    #[arg(long)]
    grid: Option<usize>,
    /// Gram window size.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args, Clone)]
struct ProfileArgs {
    /// Profile JSON or file, e.g. '{"pieces":[{"lo":0,"hi":1,"shape":{"const":1}}]}'.
    #[arg(long)]
    profile: String,
    /// Spacing b.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full config file (schema frameseq/1).
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Periodize, bound and classify one generator; or run --config.
    Analyze {
        #[arg(long, conflicts_with_all = ["profile", "lambda"])]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        profile: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Translation set: Z, N, mZ, or JSON such as '{"squares":{"n_max":100}}'.
        #[arg(long, required_unless_present = "config")]
        lambda: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Samples of the periodization with bounds and zero count.
    Periodize {
        #[command(flatten)]
        p: ProfileArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Gram matrix frame bounds against the periodization bounds.
    Gram {
        #[command(flatten)]
        p: ProfileArgs,
        /// Translation set, as for analyze; defaults to Z.
        #[arg(long)]
        lambda: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Density of a translation set and the upper-bound trend tests.
    Density {
        /// Translation set, as for analyze.
        #[arg(long)]
        lambda: String,
        /// Envelope JSON, e.g. '{"power":{"a":0.75}}'.
        #[arg(long)]
        envelope: String,
        #[arg(long, default_value_t = 4000.0)]
        x_max: f64,
        /// Comma separated increasing windows.
        #[arg(long, value_delimiter = ',', default_values_t = [1000.0, 2000.0, 4000.0])]
        windows: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Dyadic covers of the small-value sets of the periodization.
    Hausdorff {
        #[command(flatten)]
        p: ProfileArgs,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Comma separated levels.
        #[arg(long, value_delimiter = ',', default_values_t = [0.125, 0.03125, 0.0078125, 0.001953125])]
        eps: Vec<f64>,
        /// Decay exponent for the fractal evidence record; needs --lambda.
        #[arg(long, requires = "lambda")]
        a: Option<f64>,
        /// Translation set for the fractal evidence record.
        #[arg(long)]
        lambda: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Worked constructions.
    Gallery {
        #[command(subcommand)]
        case: GalleryCase,
    },
    /// Checks of the dyadic block construction.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Seeded invariant suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct DyadicArgs {
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 12)]
    nmax: u32,
    #[arg(long, default_value_t = 4)]
    nlo: u32,
    #[arg(long, default_value_t = 1 << 16)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl DyadicArgs {
    fn params(&self) -> DyadicParams {
        DyadicParams { alpha: self.alpha, n_max: self.nmax, n_lo: self.nlo, grid_size: self.grid }
    }
}

#[derive(Args, Clone)]
struct PairArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum GalleryCase {
    /// Frame at spacing a, not a frame at b (a > b).
    #[command(name = "thm23-1")]
    CoarseSpacing(PairArgs),
    /// Frame at spacing b, not a frame at a (a > b, a/b not an integer).
    #[command(name = "thm23-3")]
    FineSpacing(PairArgs),
    /// Dyadic block construction with its profile.
    #[command(name = "sec5")]
    Dyadic(DyadicArgs),
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Weighted energies, positivity, density exponent and covers.
    #[command(name = "sec5")]
    Dyadic(DyadicArgs),
}

fn apply(config: &mut AnalysisConfig, common: &Common) {
    config.seed = common.seed;
    config.output = common.out.clone();
    if let Some(g) = common.grid {
        config.budgets.grid_size = g;
    }
    if let Some(w) = common.window {
        config.budgets.window = w;
    }
}

fn profile_config(analyses: Vec<Analysis>, p: &ProfileArgs, common: &Common) -> Result<AnalysisConfig, Failure> {
    let mut c = AnalysisConfig::new(analyses);
    c.profile = Some(read_json_arg::<ProfileSpec>(&p.profile, "profile")?);
    c.b = p.b;
    apply(&mut c, common);
    Ok(c)
}

fn lambda(arg: &Option<String>) -> Result<Option<LambdaSpec>, Failure> {
    arg.as_deref().map(read_lambda_arg).transpose()
}

fn build(command: Command) -> Result<AnalysisConfig, Failure> {
    Ok(match command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", config.display())))?;
            let mut c = AnalysisConfig::from_json(&text)?;
            if out.is_some() {
                c.output = out;
            }
            c
        }
        Command::Analyze { config: Some(path), common, .. } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
            let mut c = AnalysisConfig::from_json(&text)?;
            if common.out.is_some() {
                c.output = common.out;
            }
            c
        }
        Command::Analyze { config: None, profile, b, lambda: l, common } => {
            let p = ProfileArgs { profile: profile.expect("clap: required"), b };
            let mut c = profile_config(vec![Analysis::Periodize, Analysis::Bounds, Analysis::Classify], &p, &common)?;
            c.lambda = lambda(&l)?;
            c
        }
        Command::Periodize { p, common } => profile_config(vec![Analysis::Periodize], &p, &common)?,
        Command::Gram { p, lambda: l, common } => {
            let mut c = profile_config(vec![Analysis::Bounds], &p, &common)?;
            c.lambda = lambda(&l)?;
            c
        }
        Command::Density { lambda: l, envelope, x_max, windows, common } => {
            let mut c = AnalysisConfig::new(vec![Analysis::Density]);
            c.lambda = Some(read_lambda_arg(&l)?);
            c.envelope = Some(read_json_arg::<EnvelopeSpec>(&envelope, "envelope")?);
            c.density.x_max = x_max;
            c.density.windows = windows;
            apply(&mut c, &common);
            c
        }
        Command::Hausdorff { p, alpha, eps, a, lambda: l, common } => {
            let mut c = profile_config(vec![Analysis::Hausdorff], &p, &common)?;
            c.hausdorff.alpha = alpha;
            c.hausdorff.eps = eps;
            c.hausdorff.a = a;
            c.lambda = lambda(&l)?;
            c
        }
        Command::Gallery { case } => {
            let mut c = AnalysisConfig::new(vec![Analysis::Gallery]);
            match case {
                GalleryCase::CoarseSpacing(p) => {
                    c.gallery = Some(GallerySpec::CoarseSpacing { a: p.a, b: p.b });
                    apply(&mut c, &p.common);
                }
                GalleryCase::FineSpacing(p) => {
                    c.gallery = Some(GallerySpec::FineSpacing { a: p.a, b: p.b });
                    apply(&mut c, &p.common);
                }
                GalleryCase::Dyadic(d) => {
                    c.gallery = Some(GallerySpec::Dyadic(d.params()));
                    c.output = d.out;
                }
            }
            c
        }
        Command::Verify { target: VerifyTarget::Dyadic(d) } => {
            let mut c = AnalysisConfig::new(vec![Analysis::Verify]);
            c.verify = Some(VerifySpec::Dyadic(d.params()));
            c.output = d.out;
            c
        }
        Command::Selftest { .. } => unreachable!("handled before config construction"),
    })
}

fn emit(
    report: &str,
    out: Option<&std::path::Path>,
    write: impl FnOnce(&std::path::Path) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match out {
        Some(dir) => write(dir),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    if let Command::Selftest { seed, trials, out } = command {
        let report = selftest(seed, trials)?;
        let text = report.render();
        emit(&text, out.as_deref(), |dir| {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("selftest.json"), &text)?;
            Ok(())
        })?;
        return Ok(if report.violations == 0 { EXIT_OK } else { EXIT_INCONSISTENT });
    }
    let config = build(command)?;
    let output = run(&config)?;
    emit(&output.report, config.output.as_deref(), |dir| output.write_to(dir))?;
    Ok(output.exit_code)
}

fn threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("FRAMESEQ_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("FRAMESEQ_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = threads().and_then(|()| execute(cli.command));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("frameseq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
