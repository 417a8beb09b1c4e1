//! `strictq`: runs the quantization checks and writes plot-ready tables.
//!
//! Exit status is 0 when every pass/fail predicate of the check holds, 1 when
//! one fails (or the numerics break down), and 2 on usage errors.

mod commands;
mod report;
mod symbols;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strictq::numerics::HbarSchedule;

use commands::{Failure, MetricName, Outcome, RunConfig};
use report::Format;
use symbols::SymbolSpec;

#[derive(Parser, Debug)]
#[command(name = "strictq", version, about = "Numerical checks of strict deformation quantization")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Points per axis.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Half-width of the position (and momentum) box.
    #[arg(long = "box", global = true)]
    half: Option<f64>,
    #[arg(long, global = true)]
    hbar_start: Option<f64>,
    #[arg(long, global = true)]
    hbar_ratio: Option<f64>,
    #[arg(long, global = true)]
    hbar_count: Option<usize>,
    /// Seed for `random` symbols.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dirac, von Neumann, norm and star-product limits of Weyl quantization.
    Axioms {
        #[arg(long, default_value = "gauss:0.5:0.3:0.5:0.5")]
        f: String,
        #[arg(long, default_value = "gauss:-0.4:-0.5:0.5:0.5")]
        g: String,
    },
    /// Positivity of quantized Gaussians over an (alpha, beta) grid.
    Positivity {
        /// lo:hi:steps
        #[arg(long, default_value = "0.25:1:4")]
        alpha: String,
        /// lo:hi:steps
        #[arg(long, default_value = "0.25:1:4")]
        beta: String,
    },
    /// Dirac defects and representation checks on the fuzzy torus.
    Torus {
        /// Range of N, lo:hi.
        #[arg(long, default_value = "2:32")]
        levels: String,
        /// x mode of the first observable.
        #[arg(long, default_value_t = 1)]
        m: i64,
        /// y mode of the second observable.
        #[arg(long, default_value_t = 1)]
        k: i64,
        /// K of the representations (coprime to every N, K ≤ N/2).
        #[arg(long, default_value_t = 1)]
        rep_k: usize,
    },
    /// Quantization of T*Q along geodesic charts.
    Landsman {
        #[arg(long, value_enum, default_value_t = MetricName::Flat)]
        metric: MetricName,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
    },
    /// Groupoid convolution against Weyl kernels and the tangent boundary.
    Groupoid {
        #[arg(long, default_value = "gauss:0.2:0.1:1:1")]
        f: String,
    },
    /// Classical limits of the star product.
    Star {
        #[arg(long, default_value = "gauss:0.5:0.3:0.5:0.5")]
        f: String,
        #[arg(long, default_value = "gauss:-0.4:-0.5:0.5:0.5")]
        g: String,
    },
}

/// Per-subcommand defaults for unset grid and schedule flags.
struct Defaults {
    n: usize,
    half: f64,
    hbar: (f64, f64, usize),
}

fn defaults(cmd: &Command) -> Defaults {
    match cmd {
        Command::Axioms { .. } | Command::Star { .. } => Defaults { n: 256, half: 6.0, hbar: (1.0, 0.5, 5) },
        Command::Positivity { .. } => Defaults { n: 256, half: 12.0, hbar: (1.0, 0.5, 1) },
        Command::Torus { .. } => Defaults { n: 2, half: 1.0, hbar: (1.0, 0.5, 1) },
        Command::Landsman { metric: MetricName::Exp2q, .. } => Defaults { n: 512, half: 3.0, hbar: (0.18, 0.5, 4) },
        Command::Landsman { metric: MetricName::Circle, .. } => Defaults { n: 128, half: 8.0, hbar: (0.5, 0.5, 3) },
        Command::Landsman { .. } => Defaults { n: 128, half: 8.0, hbar: (1.0, 0.5, 3) },
        Command::Groupoid { .. } => Defaults { n: 192, half: 8.0, hbar: (1.0, 0.5, 3) },
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let d = defaults(&cli.command);
    let n = cli.n.unwrap_or(d.n);
    let half = cli.half.unwrap_or(d.half);
    if n < 2 {
        return Err(Failure::Usage(format!("--n must be at least 2, got {n}")));
    }
    if !(half > 0.0 && half.is_finite()) {
        return Err(Failure::Usage(format!("--box must be positive, got {half}")));
    }
    let schedule = HbarSchedule::new(
        cli.hbar_start.unwrap_or(d.hbar.0),
        cli.hbar_ratio.unwrap_or(d.hbar.1),
        cli.hbar_count.unwrap_or(d.hbar.2),
    )
    .map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(RunConfig { n, half, schedule, seed: cli.seed })
}

fn set_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("STRICTQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("STRICTQ_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Numeric(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Outcome {
    set_threads()?;
    let cfg = resolve(cli)?;
    let format = match cli.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let config = cfg.to_map(format);
    let mut rng = symbols::seeded(cfg.seed);
    let mut parse = |s: &str| -> Result<SymbolSpec, Failure> { symbols::parse(s, &mut rng).map_err(Failure::Usage) };
    match &cli.command {
        Command::Axioms { f, g } => {
            let (f, g) = (parse(f)?, parse(g)?);
            commands::axioms(&cfg, config, f, g)
        }
        Command::Star { f, g } => {
            let (f, g) = (parse(f)?, parse(g)?);
            commands::star(&cfg, config, f, g)
        }
        Command::Positivity { alpha, beta } => {
            let a = commands::parse_range(alpha).map_err(Failure::Usage)?;
            let b = commands::parse_range(beta).map_err(Failure::Usage)?;
            commands::positivity(&cfg, config, &a, &b)
        }
        Command::Torus { levels, m, k, rep_k } => {
            let levels = commands::parse_levels(levels).map_err(Failure::Usage)?;
            let mut config = config;
            for key in ["n", "box", "hbar_start", "hbar_ratio", "hbar_count"] {
                config.remove(key);
            }
            commands::torus(config, levels, *m, *k, *rep_k)
        }
        Command::Landsman { metric, f, g } => {
            // Default pair centered on the grid; the circle grid starts at 0.
            let c = if *metric == MetricName::Circle { cfg.half } else { 0.0 };
            let fd = format!("gauss:{}:0.4:0.25:1", c + 0.3);
            let gd = format!("gauss:{}:-0.4:0.25:1", c - 0.3);
            let (f, g) = (parse(f.as_deref().unwrap_or(&fd))?, parse(g.as_deref().unwrap_or(&gd))?);
            commands::landsman(&cfg, config, *metric, f, g)
        }
        Command::Groupoid { f } => {
            let f = parse(f)?;
            commands::groupoid(&cfg, config, f)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, failed)) => {
            if let Err(e) = report.write(cli.format, cli.out.as_deref()) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(1);
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &failed {
                    eprintln!("check failed: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
