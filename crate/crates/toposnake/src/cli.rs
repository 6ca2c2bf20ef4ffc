//! Command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use toposnake_core::energy::EnergyWeights;
use toposnake_core::levelset::InitSpec;
use toposnake_core::regularize::{EdgeParams, RegularizerParams};
use toposnake_core::repulsion::RepulsionParams;
use toposnake_core::solver::splitbregman::WMode;
use toposnake_core::topology::jaccard;

use crate::config::{ExperimentConfig, Input, Scene, SolverKind};
use crate::experiment::{run_experiment, summary, write_outputs};
use crate::io::{load_mask, save_image};
use crate::presets::{edge_params, preset};

/// Caps the data-parallel width when set to a positive integer.
pub const THREADS_VAR: &str = "TOPOSNAKE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "toposnake",
    version,
    about = "Topology-preserving level-set segmentation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment an image; exits 0 on convergence, 2 at the iteration cap.
    Segment(Box<SegmentArgs>),
    /// Write a synthetic test image (PGM or PNG by extension).
    Synth {
        scene: Scene,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two mask images.
    Metrics {
        #[command(subcommand)]
        metric: Metric,
    },
}

#[derive(Debug, Subcommand)]
pub enum Metric {
    /// Intersection over union of the set pixels.
    Jaccard { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WModeArg {
    Thresh,
    Fp,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SegmentArgs {
    /// JSON experiment file; other flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Start from a built-in scene and its preset parameters.
    #[arg(long, conflicts_with = "input")]
    pub scene: Option<Scene>,
    /// 8-bit PGM or PNG image.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// `circle:x,y,r`, `rect:x0,y0,x1,y1` or `thresh:t`, with `x` the column.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Narrow-band half-width.
    #[arg(long)]
    pub l: Option<f64>,
    /// Repulsion distance scale.
    #[arg(long)]
    pub d: Option<f64>,
    /// Odd side length of the repulsion window.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Inner sweeps per outer iteration.
    #[arg(long = "inner-S")]
    pub inner: Option<usize>,
    /// Outer iteration cap.
    #[arg(long = "outer-K")]
    pub outer: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub w_mode: Option<WModeArg>,
    /// Edge detector contrast weight.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Edge detector smoothing.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

pub fn parse_init(s: &str) -> Result<InitSpec> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("init must look like kind:values, got {s:?}"))?;
    let nums = rest
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad number in {s:?}"))?;
    Ok(match (kind, nums.as_slice()) {
        ("circle", &[x, y, r]) => InitSpec::Circle {
            center: (y, x),
            radius: r,
        },
        ("rect", &[x0, y0, x1, y1]) => InitSpec::Rectangle {
            corner_a: (y0, x0),
            corner_b: (y1, x1),
        },
        ("thresh", &[t]) => InitSpec::Threshold { level: t },
        _ => bail!("unrecognized init {s:?}"),
    })
}

impl SegmentArgs {
    fn base(&self) -> Result<ExperimentConfig> {
        if let Some(path) = &self.config {
            let mut cfg = ExperimentConfig::from_json_file(path)?;
            if let Some(scene) = self.scene {
                cfg.input = Input::Synthetic(scene);
            }
            return Ok(cfg);
        }
        match (&self.input, self.scene) {
            (_, Some(scene)) => Ok(preset(scene)),
            (Some(_), None) => {
                let mut cfg = preset(Scene::TwoCircles);
                cfg.init = InitSpec::Threshold { level: 0.5 };
                cfg.edge = edge_params();
                Ok(cfg)
            }
            (None, None) => bail!("one of --config, --scene or --input is required"),
        }
    }

    /// The configuration after applying every flag.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = self.base()?;
        if let Some(p) = &self.input {
            cfg.input = Input::Path(p.clone());
        }
        if let Some(s) = self.solver {
            cfg.solver = s;
        }
        if let Some(init) = &self.init {
            cfg.init = parse_init(init)?;
        }
        if let Some(m) = self.w_mode {
            cfg.w_mode = match m {
                WModeArg::Thresh => WMode::Threshold,
                WModeArg::Fp => WMode::FixedPoint,
            };
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }

        let sb = &mut cfg.split_bregman;
        let w = sb.weights;
        sb.weights = EnergyWeights::new(
            self.gamma.unwrap_or(w.gamma),
            self.alpha.unwrap_or(w.alpha),
            self.beta.unwrap_or(w.beta),
            self.mu.unwrap_or(w.mu),
        )?;
        sb.reg = RegularizerParams::new(
            self.eps.unwrap_or(sb.reg.epsilon()),
            self.l.unwrap_or(sb.reg.band_offset()),
        )?;
        let half = match self.window {
            Some(n) if n % 2 == 1 && n >= 3 => n / 2,
            Some(n) => bail!("--window must be odd and at least 3, got {n}"),
            None => sb.rep.window_half(),
        };
        sb.rep = RepulsionParams::new(self.d.unwrap_or(sb.rep.scale()), half)?;
        sb.tau = self.tau.unwrap_or(sb.tau);
        sb.inner_iters = self.inner.unwrap_or(sb.inner_iters);
        sb.outer_iters = self.outer.unwrap_or(sb.outer_iters);
        sb.tol_outer = self.tol.unwrap_or(sb.tol_outer);

        // the two solvers share every model parameter
        let sb = *sb;
        let aos = &mut cfg.aos;
        aos.weights = sb.weights;
        aos.reg = sb.reg;
        aos.rep = sb.rep;
        if self.tau.is_some() {
            aos.tau = sb.tau;
        }
        if self.outer.is_some() {
            aos.outer_iters = sb.outer_iters;
        }
        if self.tol.is_some() {
            aos.tol = sb.tol_outer;
        }

        if self.rho.is_some() || self.sigma.is_some() {
            cfg.edge = EdgeParams::new(
                self.rho.unwrap_or(cfg.edge.rho()),
                self.sigma.unwrap_or(cfg.edge.sigma()),
                cfg.edge.power(),
            )?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Applies [`THREADS_VAR`] to the global pool; later calls are no-ops.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    // an already initialized pool keeps its width
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn segment(args: &SegmentArgs) -> Result<ExitCode> {
    let cfg = args.resolve()?;
    if args.print_config {
        println!("{}", cfg.to_json());
        return Ok(ExitCode::SUCCESS);
    }
    let report = run_experiment(&cfg)?;
    write_outputs(&report, &cfg.out)?;
    print!("{}", summary(&report));
    println!("wall_time_s: {:.3}", report.wall_time.as_secs_f64());
    println!("outputs: {}", cfg.out.display());
    Ok(if report.converged() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Segment(args) => segment(&args),
        Command::Synth { scene, out } => {
            save_image(&out, &scene.render())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Metrics {
            metric: Metric::Jaccard { a, b },
        } => {
            let j = jaccard(&load_mask(&a)?, &load_mask(&b)?).context("comparing masks")?;
            println!("{j}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Entry point of the binary: errors print to stderr and exit with 1, usage
/// errors included, so that 2 always means the iteration cap.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
