use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vk_core::analytics::Ordering;
use vk_pipeline::{cmd_constants, cmd_plotdata, cmd_run, parse_degrees, JobSpec, Mode, PipelineError, PlotSpec, Status};

#[derive(Parser)]
#[command(name = "vk", version, about = "Torsion in Voronoi-Koecher homology of congruence subgroups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Index,
    Norm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ratio,
    Euler,
}

#[derive(Subcommand)]
enum Cmd {
    /// Deficiency, dimension, torsion primes and limit constant of a group such as GL3(Q).
    Constants { group: String },
    /// Homology of Gamma_0(n) for every level in a norm range.
    Run {
        /// Field label from the catalog, e.g. Q or Q(sqrt-1).
        #[arg(long)]
        group: String,
        /// Matrix size of GL_n.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        min_norm: u64,
        #[arg(long)]
        max_norm: u64,
        /// `all`, or a list like `2,3` or `1-3`.
        #[arg(long, default_value = "all")]
        degrees: String,
        /// Wall-clock seconds per level.
        #[arg(long)]
        budget_sec: Option<f64>,
        /// Estimated bytes per level.
        #[arg(long)]
        budget_mem: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, env = "VK_CACHE_DIR", default_value = ".vk-cache")]
        cache: PathBuf,
    },
    /// Plot-data file from a report CSV.
    Plotdata {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value = "index")]
        order: OrderArg,
        /// `all`, `prime` or `tower:<seed>`.
        #[arg(long, default_value = "all")]
        filter: String,
        #[arg(long, value_enum, default_value = "ratio")]
        mode: ModeArg,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> vk_pipeline::Result<()> {
    match cli.cmd {
        Cmd::Constants { group } => print!("{}", cmd_constants(&group)?),
        Cmd::Run { group, n, min_norm, max_norm, degrees, budget_sec, budget_mem, out, cache } => {
            let spec = JobSpec {
                field: group,
                n,
                min_norm,
                max_norm,
                degrees: parse_degrees(&degrees)?,
                budget_sec,
                budget_mem,
                out,
                cache,
            };
            let o = cmd_run(&spec)?;
            println!("csv={}", o.csv_path.display());
            println!("ledger={}", o.ledger_path.display());
            println!("levels_computed={}", o.levels_computed);
            for s in [Status::Done, Status::SkippedBudget, Status::Failed, Status::Pending] {
                println!("{s}={}", o.ledger.count(s));
            }
        }
        Cmd::Plotdata { csv, degree, order, filter, mode, out } => {
            let spec = PlotSpec {
                csv,
                degree,
                ordering: match order {
                    OrderArg::Index => Ordering::ByIndex,
                    OrderArg::Norm => Ordering::ByLevelNorm,
                },
                filter: filter.parse()?,
                mode: match mode {
                    ModeArg::Ratio => Mode::Ratio,
                    ModeArg::Euler => Mode::Euler,
                },
            };
            let text = cmd_plotdata(&spec)?;
            match out {
                Some(p) => vk_pipeline::fsutil::write_atomic(&p, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ PipelineError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
