use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmwave_planner::io::{compare_sweep, rows_to_csv, CompareOptions, RunConfig};
use mmwave_planner::venue::random_toy;
use mmwave_planner::{
    evaluate_coverage, exact_place, generate_venue, greedy_place, monte_carlo_coverage, render_svg,
    uniform_place, ChannelParams, Deployment, Error, ExactLimits, GeneratorOverrides, Instance,
    McConfig, Parallelism, Venue, VenueKind,
};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_LIMIT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "mmwplan",
    version,
    about = "Plan mmWave AP placement and beam steering for seated venues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a venue file (hall, airport, stadium or toy).
    Generate(GenerateArgs),
    /// Place APs and steer beams for one operating point.
    Plan(PlanArgs),
    /// Sweep greedy, exact and uniform over beamwidth, alpha and beta; writes CSV.
    Compare(CompareArgs),
    /// Draw a venue and optionally a deployment as SVG.
    Render(RenderArgs),
    /// Monte Carlo replay of a deployment.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    kind: String,
    /// Randomize the toy venue with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Orientation standard deviation, radians.
    #[arg(long)]
    orientation_std: Option<f64>,
    /// MD elevation, radians.
    #[arg(long)]
    md_elevation: Option<f64>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ModelArgs {
    /// Run configuration JSON (`{"format_version":1,"params":{...}}`).
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    beamwidth_ap: Option<f64>,
    #[arg(long)]
    beamwidth_md: Option<f64>,
    /// GPs per beam.
    #[arg(long)]
    capacity: Option<usize>,
}

impl ModelArgs {
    fn load(&self) -> mmwave_planner::Result<ChannelParams> {
        let mut p = match &self.params {
            Some(path) => RunConfig::load(path)?.params,
            None => ChannelParams::default(),
        };
        if let Some(w) = self.beamwidth_ap {
            p.ap_beamwidth = w;
        }
        if let Some(w) = self.beamwidth_md {
            p.md_beamwidth = w;
        }
        if let Some(t) = self.capacity {
            p.capacity_per_beam = t;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = ExactLimits::default().max_l)]
    max_exact_l: usize,
    #[arg(long, default_value_t = ExactLimits::default().max_m)]
    max_exact_m: usize,
}

impl LimitArgs {
    fn limits(&self) -> ExactLimits {
        ExactLimits {
            max_l: self.max_exact_l,
            max_m: self.max_exact_m,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Greedy,
    Exact,
    Uniform,
}

#[derive(Args)]
struct PlanArgs {
    venue: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = SolverKind::Greedy)]
    solver: SolverKind,
    /// AP count for the uniform baseline (default: all candidates).
    #[arg(long)]
    count: Option<usize>,
    #[command(flatten)]
    limits: LimitArgs,
    /// Also write the greedy trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    venue: PathBuf,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.75])]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.9])]
    beta: Vec<f64>,
    /// AP beamwidths to sweep (default: the configured one).
    #[arg(long, value_delimiter = ',')]
    beamwidth_ap: Vec<f64>,
    #[arg(long)]
    beamwidth_md: Option<f64>,
    #[arg(long)]
    capacity: Option<usize>,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    venue: PathBuf,
    #[arg(long)]
    deployment: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    venue: PathBuf,
    #[arg(long)]
    deployment: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    #[arg(long, default_value_t = McConfig::default().n_samples)]
    samples: usize,
    #[arg(long, default_value_t = McConfig::default().seed)]
    seed: u64,
    /// Also sample log-normal shadowing per link.
    #[arg(long)]
    shadowing: bool,
    /// Extra fade margin for the replay, dB.
    #[arg(long, default_value_t = 0.0)]
    fade_margin: f64,
    #[arg(long, short)]
    out: PathBuf,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::LimitExceeded { .. } => EXIT_LIMIT,
        _ => EXIT_INPUT,
    }
}

fn write(path: &Path, text: &str) -> mmwave_planner::Result<()> {
    std::fs::write(path, text).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_venue(path: &Path) -> mmwave_planner::Result<Venue> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    Venue::from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::InvalidVenue(format!("{}: {j}", path.display())),
        other => other,
    })
}

fn load_deployment(path: &Path) -> mmwave_planner::Result<Deployment> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let d = Deployment::from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::InvalidParameter(format!("{}: {j}", path.display())),
        other => other,
    })?;
    mmwave_planner::io::check_version(d.format_version)?;
    Ok(d)
}

fn generate(args: GenerateArgs) -> mmwave_planner::Result<()> {
    let kind: VenueKind = args.kind.parse()?;
    let mut ov = GeneratorOverrides::default();
    if let Some(s) = args.orientation_std {
        ov.orientation_std = s;
    }
    if let Some(e) = args.md_elevation {
        ov.md_elevation = e;
    }
    let venue = match (kind, args.seed) {
        (VenueKind::Toy, Some(seed)) => random_toy(seed, &ov),
        (_, Some(_)) => {
            return Err(Error::InvalidParameter(
                "--seed only applies to the toy venue".into(),
            ))
        }
        _ => generate_venue(kind, &ov),
    };
    venue.validate()?;
    write(&args.out, &venue.to_json()?)?;
    println!(
        "{}: {} grid positions, {} candidate sites, {} blockers",
        venue.name,
        venue.num_gps(),
        venue.num_candidates(),
        venue.blockers.len()
    );
    Ok(())
}

fn summary(label: &str, d: &Deployment, secs: f64) {
    println!(
        "{label}: {} APs, coverage {:.4}, normalized coverage {:.4}, runtime {secs:.3} s",
        d.ap_count(),
        d.coverage,
        d.normalized_coverage
    );
}

fn plan(args: PlanArgs) -> mmwave_planner::Result<()> {
    let venue = load_venue(&args.venue)?;
    let params = args.model.load()?;
    let inst = Instance::with_beta(&venue, &params, args.beta)?;
    let start = Instant::now();
    let result = match args.solver {
        SolverKind::Greedy => {
            greedy_place(&inst, args.alpha, Parallelism::Parallel).map(|(d, t)| (d, Some(t)))
        }
        SolverKind::Exact => exact_place(
            &inst,
            args.alpha,
            args.limits.limits(),
            Parallelism::Parallel,
        )
        .map(|d| (d, None)),
        SolverKind::Uniform => {
            uniform_place(&inst, args.count.unwrap_or(inst.num_candidates())).map(|d| (d, None))
        }
    };
    let secs = start.elapsed().as_secs_f64();
    match result {
        Ok((d, trace)) => {
            evaluate_coverage(&inst, &d)?;
            write(&args.out, &d.to_json()?)?;
            if let (Some(path), Some(t)) = (&args.trace, trace) {
                write(path, &t.to_json()?)?;
            }
            summary("plan", &d, secs);
            Ok(())
        }
        Err(Error::Infeasible(inf)) => {
            write(&args.out, &inf.deployment.to_json()?)?;
            if let (Some(path), Some(t)) = (&args.trace, &inf.trace) {
                write(path, &t.to_json()?)?;
            }
            summary("partial plan", &inf.deployment, secs);
            Err(Error::Infeasible(inf))
        }
        Err(e) => Err(e),
    }
}

fn compare(args: CompareArgs) -> mmwave_planner::Result<()> {
    let venue = load_venue(&args.venue)?;
    let model = ModelArgs {
        params: args.params.clone(),
        beamwidth_ap: None,
        beamwidth_md: args.beamwidth_md,
        capacity: args.capacity,
    };
    let params = model.load()?;
    let widths = if args.beamwidth_ap.is_empty() {
        vec![params.ap_beamwidth]
    } else {
        args.beamwidth_ap.clone()
    };
    let opts = CompareOptions {
        limits: args.limits.limits(),
        parallelism: Parallelism::Parallel,
    };
    let rows = compare_sweep(&venue, &params, &widths, &args.alpha, &args.beta, &opts)?;
    write(&args.out, &rows_to_csv(&rows)?)?;
    println!("compare: {} rows", rows.len());
    Ok(())
}

fn render(args: RenderArgs) -> mmwave_planner::Result<()> {
    let venue = load_venue(&args.venue)?;
    let deployment = args
        .deployment
        .as_deref()
        .map(load_deployment)
        .transpose()?;
    write(&args.out, &render_svg(&venue, deployment.as_ref()))?;
    Ok(())
}

fn validate(args: ValidateArgs) -> mmwave_planner::Result<()> {
    let venue = load_venue(&args.venue)?;
    let params = args.model.load()?;
    let deployment = load_deployment(&args.deployment)?;
    let inst = Instance::with_beta(&venue, &params, args.beta)?;
    let mc = McConfig {
        n_samples: args.samples,
        seed: args.seed,
        sample_shadowing: args.shadowing,
        fade_margin_db: args.fade_margin,
    };
    let report = monte_carlo_coverage(&inst, &deployment, &mc, Parallelism::Parallel)?;
    write(&args.out, &report.to_json()?)?;
    println!(
        "validate: analytic normalized coverage {:.4}, empirical {:.4}, {:.1}% of GPs within 3σ",
        report.analytic_normalized,
        report.empirical_normalized,
        100.0 * report.within_3sigma_fraction
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Plan(a) => plan(a),
        Command::Compare(a) => compare(a),
        Command::Render(a) => render(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mmwplan: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
