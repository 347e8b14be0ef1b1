use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tubalkit::experiments::phase::{phase_csv, success_counts};
use tubalkit::experiments::{
    phase_transition, random_mask, rmse, rre, stripe_mask, MetricsReport, PhaseGrid, SyntheticInstance,
};
use tubalkit::regularizer::{curve_csv, curve_table, CurveParams};
use tubalkit::rng::derive_seed;
use tubalkit::{format, solve, Mask, RegularizerKind, SolverConfig};

use crate::artifacts::ArtifactSet;
use crate::error::{CliError, CliResult};
use crate::imageio::{self, Layout};

#[derive(Debug, Parser)]
#[command(
    name = "tubalkit",
    version,
    about = "Low-tubal-rank tensor completion with nonconvex thresholding"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complete a random low-tubal-rank tensor and report recovery metrics.
    Synth(SynthArgs),
    /// Success/failure table over a (rank, sampling rate) grid.
    Phase(PhaseArgs),
    /// Fill missing pixels of a PNG image or a directory of grayscale frames.
    Inpaint(InpaintArgs),
    /// Tabulate the thresholding functions on a grid.
    Curves(CurvesArgs),
}

#[derive(Debug, Args)]
struct RegArgs {
    /// soft (alias tnn), hop[:p], how[:sigma/lambda] or hoc[:gamma/lambda].
    #[arg(long = "reg", default_value = "hoc")]
    reg: String,
    /// Exponent for hop.
    #[arg(long)]
    p: Option<f64>,
    /// sigma/lambda for how (at most sqrt 2).
    #[arg(long)]
    sigma_ratio: Option<f64>,
    /// gamma/lambda for hoc (at most 1).
    #[arg(long)]
    gamma_ratio: Option<f64>,
}

impl RegArgs {
    fn kind(&self) -> CliResult<RegularizerKind> {
        let mut kind: RegularizerKind = self.reg.parse()?;
        match (&mut kind, self.p, self.sigma_ratio, self.gamma_ratio) {
            (_, None, None, None) => {}
            (RegularizerKind::Hop { p }, Some(v), None, None) => *p = v,
            (RegularizerKind::How { sigma_ratio }, None, Some(v), None) => *sigma_ratio = v,
            (RegularizerKind::Hoc { gamma_ratio }, None, None, Some(v)) => *gamma_ratio = v,
            _ => {
                return Err(CliError::config(format!(
                    "parameter flag does not apply to --reg {}",
                    self.reg
                )))
            }
        }
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Initial penalty rho_0.
    #[arg(long, default_value_t = 1e-4)]
    rho0: f64,
    /// Penalty growth factor (> 1).
    #[arg(long, default_value_t = 1.2)]
    mu: f64,
    /// Stopping tolerance on the entrywise changes.
    #[arg(long, default_value_t = 1e-4)]
    xi: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

impl SolverArgs {
    fn config(&self, kind: RegularizerKind) -> CliResult<SolverConfig> {
        let c = SolverConfig {
            kind,
            rho0: self.rho0,
            mu: self.mu,
            xi: self.xi,
            max_iters: self.max_iters,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Side length of the cubic tensor.
    #[arg(long, default_value_t = 20, conflicts_with = "dims")]
    n: usize,
    /// Explicit shape, e.g. 30,20,10.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    dims: Option<Vec<usize>>,
    /// Tubal rank of the ground truth.
    #[arg(long)]
    rank: usize,
    /// Sampling rate in (0, 1].
    #[arg(long, default_value_t = 0.8)]
    sr: f64,
    #[command(flatten)]
    reg: RegArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PhaseArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,7")]
    ranks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8")]
    srs: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Comma-separated regularizers, same syntax as --reg.
    #[arg(long, value_delimiter = ',', default_value = "soft,hop:0.6,hop:0.3,how,hoc")]
    specs: Vec<String>,
    /// RRE at or below which a trial counts as a success.
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    /// Record wall-clock seconds (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mask_source").required(true).args(["sr", "stripe_width", "mask"])))]
struct InpaintArgs {
    /// PNG image (8-bit gray or RGB) or a directory of grayscale PNG frames.
    #[arg(long)]
    input: PathBuf,
    /// Complete reference for the metrics, in the same layout as --input.
    #[arg(long)]
    original: Option<PathBuf>,
    /// Random mask with this sampling rate.
    #[arg(long)]
    sr: Option<f64>,
    /// Missing vertical stripes of this width...
    #[arg(long, requires = "stripe_period")]
    stripe_width: Option<usize>,
    /// ...repeating with this period (columns).
    #[arg(long)]
    stripe_period: Option<usize>,
    /// Mask image or frame directory; zero pixels are missing.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[command(flatten)]
    reg: RegArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// HOP exponent.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    sigma_ratio: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_ratio: f64,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 1001)]
    points: usize,
    /// Accepted for uniformity; the table is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Phase(a) => phase(a),
        Command::Inpaint(a) => inpaint(a),
        Command::Curves(a) => curves(a),
    }
}

fn check_out(out: &Path) -> CliResult<()> {
    if out.exists() && !out.is_dir() {
        return Err(CliError::config(format!("--out {} is not a directory", out.display())));
    }
    Ok(())
}

fn report(written: &[PathBuf]) {
    for p in written {
        println!("wrote {}", p.display());
    }
}

fn synth(a: SynthArgs) -> CliResult<()> {
    check_out(&a.out)?;
    let config = a.solver.config(a.reg.kind()?)?;
    let dims = match &a.dims {
        Some(d) => (d[0], d[1], d[2]),
        None => (a.n, a.n, a.n),
    };
    if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
        return Err(CliError::config("dimensions must be positive"));
    }
    let inst = SyntheticInstance::generate(dims, a.rank, a.sr, a.seed)?;
    let sol = solve(&inst.observed, &inst.mask, &config, Some(&inst.truth))?;
    let metrics = MetricsReport {
        rre: Some(rre(&sol.estimate, &inst.truth)?),
        psnr: None,
        ssim: None,
        rmse: Some(rmse(&sol.estimate, &inst.truth)?),
        runtime_seconds: sol.runtime_seconds,
        stop_reason: sol.stop_reason.to_string(),
    };
    let mut set = ArtifactSet::default();
    set.add("metrics.json", metrics.to_json().into_bytes());
    set.add("trace.csv", sol.trace.to_csv().into_bytes());
    set.add("estimate.t3r", format::encode(&sol.estimate));
    report(&set.commit(&a.out)?);
    println!(
        "{}: rre {:.3e} after {} iterations ({})",
        config.kind,
        metrics.rre.unwrap(),
        sol.iterations(),
        sol.stop_reason
    );
    Ok(())
}

fn phase(a: PhaseArgs) -> CliResult<()> {
    check_out(&a.out)?;
    let specs = a
        .specs
        .iter()
        .map(|s| s.parse::<RegularizerKind>().map_err(CliError::from))
        .collect::<CliResult<Vec<_>>>()?;
    let base = a
        .solver
        .config(specs.first().copied().unwrap_or(RegularizerKind::Soft))?;
    let mut grid = PhaseGrid::new(a.ranks, a.srs, a.trials);
    grid.success_threshold = a.threshold;
    if a.n == 0 {
        return Err(CliError::config("--n must be positive"));
    }
    grid.validate(a.n)?;
    let records = phase_transition(&grid, a.n, &specs, &base, a.seed)?;
    let mut set = ArtifactSet::default();
    set.add("phase.csv", phase_csv(&records, a.timing).into_bytes());
    report(&set.commit(&a.out)?);
    let total = grid.ranks.len() * grid.sampling_rates.len() * grid.trials;
    for (s, c) in specs.iter().zip(success_counts(&records, &specs)) {
        println!("{s}: {c}/{total} successes");
    }
    Ok(())
}

enum MaskSource {
    Random(f64),
    Stripes { width: usize, period: usize },
    File(PathBuf),
}

fn inpaint(a: InpaintArgs) -> CliResult<()> {
    check_out(&a.out)?;
    let config = a.solver.config(a.reg.kind()?)?;
    let source = match (a.sr, a.stripe_width, a.stripe_period, &a.mask) {
        (Some(sr), None, None, None) => MaskSource::Random(sr),
        (None, Some(width), Some(period), None) => MaskSource::Stripes { width, period },
        (None, None, None, Some(p)) => MaskSource::File(p.clone()),
        _ => {
            return Err(CliError::config(
                "give exactly one of --sr, --stripe-width/--stripe-period, --mask",
            ))
        }
    };

    let input = imageio::load(&a.input)?;
    let dims = input.tensor.dims();
    let mask = match &source {
        MaskSource::Random(sr) => random_mask(dims, *sr, derive_seed(a.seed, &[1]))?,
        MaskSource::Stripes { width, period } => stripe_mask(dims, *width, *period)?,
        MaskSource::File(p) => imageio::load_mask(p, dims)?,
    };
    // Synthetic masks are applied to a complete input, which then doubles as
    // the reference; a mask file means the input is already damaged.
    let reference = match &a.original {
        Some(p) => {
            let orig = imageio::load(p)?;
            if orig.tensor.dims() != dims || !same_kind(&orig.layout, &input.layout) {
                return Err(CliError::config("--original does not match --input in size or layout"));
            }
            Some(orig.tensor)
        }
        None if !matches!(source, MaskSource::File(_)) => Some(input.tensor.clone()),
        None => None,
    };
    let observed = mask.apply(&input.tensor)?;
    let sol = solve(&observed, &mask, &config, reference.as_ref())?;
    let completed = sol.estimate.map(|v| v.clamp(0.0, 1.0));

    let stop = sol.stop_reason.to_string();
    let metrics = match &reference {
        Some(r) => MetricsReport::image(&completed, r, sol.runtime_seconds, stop)?,
        None => MetricsReport {
            rre: None,
            psnr: None,
            ssim: None,
            rmse: None,
            runtime_seconds: sol.runtime_seconds,
            stop_reason: stop,
        },
    };

    let mut set = ArtifactSet::default();
    for (path, bytes) in imageio::encode(&completed, &input.layout, "completed")? {
        set.add(path, bytes);
    }
    for (path, bytes) in encode_mask(&mask, &input.layout)? {
        set.add(path, bytes);
    }
    set.add("metrics.json", metrics.to_json().into_bytes());
    set.add("trace.csv", sol.trace.to_csv().into_bytes());
    report(&set.commit(&a.out)?);
    match metrics.psnr {
        Some(p) => println!(
            "{}: PSNR {p:.2} dB after {} iterations ({})",
            config.kind,
            sol.iterations(),
            sol.stop_reason
        ),
        None => println!("{}: {} iterations ({})", config.kind, sol.iterations(), sol.stop_reason),
    }
    Ok(())
}

fn same_kind(a: &Layout, b: &Layout) -> bool {
    matches!(
        (a, b),
        (Layout::Gray, Layout::Gray) | (Layout::Rgb, Layout::Rgb) | (Layout::Frames(_), Layout::Frames(_))
    )
}

fn encode_mask(mask: &Mask, layout: &Layout) -> CliResult<Vec<(PathBuf, Vec<u8>)>> {
    imageio::encode(&imageio::mask_tensor(mask), layout, "mask")
}

fn curves(a: CurvesArgs) -> CliResult<()> {
    check_out(&a.out)?;
    if a.points < 2 || !a.x_min.is_finite() || !a.x_max.is_finite() || a.x_min >= a.x_max {
        return Err(CliError::config("need --points >= 2 and finite --x-min < --x-max"));
    }
    let params = CurveParams {
        lambda: a.lambda,
        p: a.p,
        sigma_ratio: a.sigma_ratio,
        gamma_ratio: a.gamma_ratio,
    };
    params.specs()?;
    let step = (a.x_max - a.x_min) / (a.points - 1) as f64;
    let grid: Vec<f64> = (0..a.points).map(|i| a.x_min + i as f64 * step).collect();
    let rows = curve_table(&params, &grid)?;
    let mut set = ArtifactSet::default();
    set.add("curves.csv", curve_csv(&rows).into_bytes());
    report(&set.commit(&a.out)?);
    Ok(())
}
