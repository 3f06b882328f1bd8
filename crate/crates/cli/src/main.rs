use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lentparticle::paths::{rotate, simulate_brownian, MartingaleKind};
use lentparticle::RngStream;
use lentparticle_cli::report::{num, Table};
use lentparticle_cli::{list_experiments, run_experiment, ExperimentConfig, GridConfig, Params};

#[derive(Parser)]
#[command(
    name = "lentparticle",
    version,
    about = "Run the lentparticle experiments and write CSV/JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment (or the one named in --config).
    Run {
        experiment: Option<String>,
        #[command(flatten)]
        opts: Box<RunOpts>,
    },
    /// List experiments whose name contains FILTER.
    List { filter: Option<String> },
    /// Write one sample of B, M and the rotated path as CSV.
    Paths {
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        grid_steps: usize,
        #[arg(long, default_value_t = 0.7)]
        theta: f64,
        /// compensated-poisson, symmetric-compound or brownian-copy
        #[arg(long, default_value = "symmetric-compound")]
        martingale: String,
        #[arg(long, default_value_t = 0)]
        path: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunOpts {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    grid_steps: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Directory for `<experiment>.csv` and `<experiment>.json`.
    #[arg(long, env = "LENTPARTICLE_OUTPUT_DIR")]
    output: Option<PathBuf>,
    /// Worker threads; reports do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    sde: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    h_norm_sq: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    inner_paths: Option<usize>,
}

impl RunOpts {
    fn as_config(&self, experiment: Option<String>) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            grid: GridConfig {
                horizon: self.horizon,
                n_steps: self.grid_steps,
            },
            n_paths: self.n_paths,
            master_seed: self.seed,
            theta: self.theta,
            order: self.order,
            sde: self.sde.clone(),
            sigma: self.sigma,
            b: self.b,
            x0: self.x0,
            h_norm_sq: self.h_norm_sq,
            inner_paths: self.inner_paths,
            output: self.output.clone(),
        }
    }
}

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BLOWUP: u8 = 3;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), String> {
    std::fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(experiment: Option<String>, opts: RunOpts) -> ExitCode {
    let mut cfg = match &opts.config {
        Some(path) => match ExperimentConfig::from_file(path) {
            Ok(c) => c,
            Err(e) => return fail(EXIT_CONFIG, e),
        },
        None => ExperimentConfig::default(),
    };
    cfg = cfg.overridden_by(opts.as_config(experiment));
    let params: Params = match cfg.resolve() {
        Ok(p) => p,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if opts.workers == Some(0) {
        return fail(EXIT_CONFIG, "workers must be positive");
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let report = match pool.install(|| run_experiment(&params)) {
        Ok(r) => r,
        Err(e @ lentparticle::Error::NumericalBlowup { .. }) => return fail(EXIT_BLOWUP, e),
        Err(e) => return fail(EXIT_CONFIG, e),
    };

    let dir = cfg.output.unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return fail(EXIT_CONFIG, format!("cannot create {}: {e}", dir.display()));
    }
    let csv = dir.join(format!("{}.csv", params.experiment));
    let json = dir.join(format!("{}.json", params.experiment));
    if let Err(e) = write(&csv, &report.csv_bytes()).and_then(|_| write(&json, &report.json_bytes())) {
        return fail(EXIT_CONFIG, e);
    }

    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {} and {}", csv.display(), json.display());
    if report.blew_up() {
        return fail(
            EXIT_BLOWUP,
            format!(
                "{} of {} paths excluded after numerical blowup",
                report.excluded_paths, report.attempted_paths
            ),
        );
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED_CHECK)
    }
}

fn paths(seed: u64, steps: usize, theta: f64, martingale: &str, path: u64, output: Option<PathBuf>) -> ExitCode {
    let kind = match martingale {
        "compensated-poisson" => MartingaleKind::CompensatedPoisson,
        "symmetric-compound" => MartingaleKind::SymmetricCompound,
        "brownian-copy" => MartingaleKind::Brownian,
        other => return fail(EXIT_CONFIG, format!("unknown martingale '{other}'")),
    };
    let grid = match lentparticle::TimeGrid::unit(steps) {
        Ok(g) => g,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let b = simulate_brownian(&grid, RngStream::brownian(seed, path));
    let m = kind.simulate(&grid, seed, path);
    let y = match rotate(&b, &m, theta) {
        Ok(y) => y,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let mut table = Table::new(&["t", "B", "M", "Y_theta"]);
    for k in 0..=steps {
        table.push(vec![
            num(grid.time(k)),
            num(b.levels[k]),
            num(m.levels[k]),
            num(y.levels[k]),
        ]);
    }
    let bytes = table.to_csv().expect("in-memory CSV");
    let written = match output {
        Some(p) => write(&p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_CONFIG, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { experiment, opts } => run(experiment, *opts),
        Command::List { filter } => {
            print!("{}", list_experiments(filter.as_deref()));
            ExitCode::SUCCESS
        }
        Command::Paths {
            seed,
            grid_steps,
            theta,
            martingale,
            path,
            output,
        } => paths(seed, grid_steps, theta, &martingale, path, output),
    }
}
