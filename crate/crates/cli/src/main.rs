use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use efseg::io::{read_result_json, write_result_json, AmbiguityPolicy};
use efseg::simulate::{run_study, study_csv, ScenarioConfig, StudyOptions};
use efseg::{
    hausdorff, partition_divergence, run_segment, theory_constants, Beta, CalibrationMethod,
    FamilySpec, InputSource, ParamBox, Partition, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "efseg",
    version,
    about = "Change-point segmentation for exponential-family sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment a series and write the result document.
    Segment(SegmentArgs),
    /// Run the simulation study and write the per-replicate table.
    Simulate(SimulateArgs),
    /// Compare two segmentations.
    Evaluate(EvaluateArgs),
    /// Variance/mean constants of a family over a parameter box.
    Constants(ConstantsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Poisson,
    Exponential,
    GaussianPositiveMean,
    Pareto,
    Gamma,
    Weibull,
    Laplace,
    Binomial,
    NegativeBinomial,
    Categorical,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Pareto scale x_m.
    #[arg(long)]
    scale: Option<f64>,
    /// Gamma or Weibull shape.
    #[arg(long)]
    shape: Option<f64>,
    /// Laplace location.
    #[arg(long)]
    location: Option<f64>,
    /// Binomial number of trials.
    #[arg(long)]
    trials: Option<u32>,
    /// Negative binomial dispersion.
    #[arg(long)]
    dispersion: Option<f64>,
    /// Categorical dimension d (d + 1 categories).
    #[arg(long)]
    dim: Option<usize>,
}

impl FamilyArgs {
    fn spec(&self) -> Result<FamilySpec> {
        fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
            v.with_context(|| format!("--{flag} is required for this family"))
        }
        Ok(match self.family {
            FamilyName::Poisson => FamilySpec::Poisson,
            FamilyName::Exponential => FamilySpec::Exponential,
            FamilyName::GaussianPositiveMean => FamilySpec::GaussianPositiveMean,
            FamilyName::Pareto => FamilySpec::Pareto {
                scale: need(self.scale, "scale")?,
            },
            FamilyName::Gamma => FamilySpec::Gamma {
                shape: need(self.shape, "shape")?,
            },
            FamilyName::Weibull => FamilySpec::Weibull {
                shape: need(self.shape, "shape")?,
            },
            FamilyName::Laplace => FamilySpec::Laplace {
                location: need(self.location, "location")?,
            },
            FamilyName::Binomial => FamilySpec::Binomial {
                trials: need(self.trials, "trials")?,
            },
            FamilyName::NegativeBinomial => FamilySpec::NegativeBinomial {
                dispersion: need(self.dispersion, "dispersion")?,
            },
            FamilyName::Categorical => FamilySpec::Categorical {
                dim: need(self.dim, "dim")?,
            },
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    DimensionJump,
    SlopeFit,
}

impl From<Method> for CalibrationMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::DimensionJump => CalibrationMethod::DimensionJump,
            Method::SlopeFit => CalibrationMethod::SlopeFit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Ambiguity {
    Reject,
    Drop,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Even-segment rate group, 1 to 4.
    #[arg(long, default_value_t = 1)]
    group: usize,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 20.0)]
    k_mean: f64,
    #[arg(long, default_value_t = 10)]
    min_seg: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ScenarioArgs {
    fn config(&self) -> Result<ScenarioConfig> {
        Ok(ScenarioConfig::rate_group(
            self.group,
            self.n,
            self.k_mean,
            self.min_seg,
            self.seed,
        )?)
    }
}

#[derive(Args)]
struct SegmentArgs {
    /// Series file: CSV with one value per line, or FASTA with --fasta.
    #[arg(
        long,
        required_unless_present = "simulate",
        conflicts_with = "simulate"
    )]
    input: Option<PathBuf>,
    /// Read the input as FASTA (categorical, d = 3).
    #[arg(long)]
    fasta: bool,
    /// Segment a simulated exponential series instead of a file.
    #[arg(long)]
    simulate: bool,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value = "reject")]
    ambiguity: Ambiguity,
    /// Family; defaults to categorical d = 3 for FASTA and exponential for simulated input.
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    shape: Option<f64>,
    #[arg(long)]
    location: Option<f64>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    dispersion: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 20)]
    kmax: usize,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    /// Fixed penalty multiplier; the slope heuristic is used when absent.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum, default_value = "dimension-jump")]
    method: Method,
    /// Restrict the search to candidates from greedy binary segmentation.
    #[arg(long)]
    hybrid: bool,
    #[arg(long)]
    max_candidates: Option<usize>,
    /// Also report natural parameters.
    #[arg(long)]
    natural: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl SegmentArgs {
    fn run_config(&self) -> Result<RunConfig> {
        let family = match self.family {
            Some(name) => FamilyArgs {
                family: name,
                scale: self.scale,
                shape: self.shape,
                location: self.location,
                trials: self.trials,
                dispersion: self.dispersion,
                dim: self.dim,
            }
            .spec()?,
            None if self.fasta => FamilySpec::Categorical { dim: 3 },
            None if self.simulate => FamilySpec::Exponential,
            None => bail!("--family is required for CSV input"),
        };
        let input = match (&self.input, self.simulate) {
            (_, true) => InputSource::Simulate(self.scenario.config()?),
            (Some(path), false) if self.fasta => InputSource::Fasta {
                path: path.display().to_string(),
                policy: match self.ambiguity {
                    Ambiguity::Reject => AmbiguityPolicy::Reject,
                    Ambiguity::Drop => AmbiguityPolicy::Drop,
                },
            },
            (Some(path), false) => InputSource::Csv(path.display().to_string()),
            (None, false) => bail!("either --input or --simulate is required"),
        };
        let mut config = RunConfig::new(input, family);
        config.kmax = self.kmax;
        config.min_len = self.min_len;
        config.beta = match self.beta {
            Some(b) => Beta::Fixed(b),
            None => Beta::Calibrate(self.method.into()),
        };
        config.hybrid = self.hybrid;
        config.max_candidates = self.max_candidates;
        config.natural = self.natural;
        Ok(config)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 50)]
    replicates: usize,
    #[arg(long, default_value_t = 60)]
    kmax: usize,
    /// Minimum segment length in the search; the scenario's min-seg when absent.
    #[arg(long)]
    min_len: Option<usize>,
    #[arg(long, value_enum, default_value = "dimension-jump")]
    method: Method,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Estimated segmentation: a result document or a list of change-points.
    estimate: PathBuf,
    /// Reference segmentation, same formats.
    reference: PathBuf,
    /// Series length, needed when neither file is a result document.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Lower corner of the box, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lower: Vec<f64>,
    /// Upper corner of the box, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    upper: Vec<f64>,
    /// Radius a of the categorical box [-log a, log a]^d, instead of --lower/--upper.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn segment(args: &SegmentArgs) -> Result<()> {
    let config = args.run_config()?;
    let outcome = run_segment(&config)?;
    match &args.output {
        Some(path) => write_result_json(&outcome.document, path)?,
        None => print!("{}", outcome.document.to_json()),
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    let config = args.scenario.config()?;
    let mut options = StudyOptions::new(args.replicates, args.kmax);
    options.min_len = args.min_len;
    options.method = args.method.into();
    let rows = run_study(&config, &options)?;
    emit(&study_csv(&rows), args.output.as_deref())
}

/// Reads a result document, or a plain list of change-points (one per line
/// or comma separated).
fn read_segmentation(path: &Path, n: Option<usize>) -> Result<(Vec<usize>, Option<usize>)> {
    if let Ok(doc) = read_result_json(path) {
        return Ok((doc.change_points, Some(doc.input.n)));
    }
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut breaks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for field in line.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            let v = field.parse::<usize>().map_err(|_| efseg::Error::Parse {
                path: path.display().to_string(),
                line: i + 1,
                message: format!("{field:?} is not a change-point"),
            })?;
            breaks.push(v);
        }
    }
    Ok((breaks, n))
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let (est, n_est) = read_segmentation(&args.estimate, args.n)?;
    let (reference, n_ref) = read_segmentation(&args.reference, args.n)?;
    let n = match (n_est, n_ref) {
        (Some(a), Some(b)) if a != b => bail!("segmentations cover different lengths ({a} vs {b})"),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => bail!("--n is required for change-point lists"),
    };
    let est = Partition::from_breaks(n, &est)?;
    let reference = Partition::from_breaks(n, &reference)?;
    let report = serde_json::json!({
        "n": n,
        "k_estimate": est.k(),
        "k_reference": reference.k(),
        "div_estimate_reference": partition_divergence(&est, &reference)?,
        "div_reference_estimate": partition_divergence(&reference, &est)?,
        "hausdorff": hausdorff(&est, &reference)?,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn constants(args: &ConstantsArgs) -> Result<()> {
    let spec = args.family.spec()?;
    let bx = match args.radius {
        Some(a) => ParamBox::symmetric_log(a, spec.dim()),
        None => ParamBox::new(args.lower.clone(), args.upper.clone()),
    };
    let c = theory_constants(&spec, &bx, args.epsilon)?;
    println!("{}", serde_json::to_string_pretty(&c)?);
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<efseg::Error>() {
        Some(efseg::Error::Infeasible(_) | efseg::Error::Calibration(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Segment(a) => segment(a),
        Command::Simulate(a) => simulate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Constants(a) => constants(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
