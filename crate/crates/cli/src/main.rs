use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use worktraj::{read_config, run, write_all, CouplingKind, Experiment, ExperimentConfig, THREADS_ENV};

#[derive(Parser)]
#[command(name = "worktraj", version, about = "Work statistics of a driven dissipative qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo batch: sample moments with jackknife errors.
    Simulate,
    /// Work moments from the selected route (`--route`).
    Moments,
    /// Tilted generating function G(u, t) on the `--u` grid.
    Mgf,
    /// Jarzynski ratio, ξ and the dissipated-work bound over time.
    Jarzynski,
    /// End-time FDR deviation across the `--taus` runtimes.
    Fdr,
    /// Minimum-work erasure protocol for runtime `--tau`.
    OptimalProtocol,
    /// Exact small-N cross-check of the two discrete enumerations.
    Oracle,
    /// Regenerates the data behind one figure.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
    /// Re-runs the config echoed at the top of an output file.
    Rerun { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig2,
    Fig3,
    Fig4,
}

#[derive(Clone, Copy, ValueEnum)]
enum CouplingArg {
    Constant,
    Ohmic,
}

/// Flags override fields of `--config`, which override built-in defaults.
#[derive(Args)]
struct Flags {
    /// Monte Carlo step.
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    trajectories: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Base intervals of the ODE grid.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    gap_floor: Option<f64>,
    /// Quadrature nodes for continuous ensembles.
    #[arg(long, global = true)]
    quad_nodes: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Ensemble name: eg, pm, haar, polar_pair.
    #[arg(long, global = true)]
    ensemble: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    ensemble_params: Option<Vec<f64>>,
    /// Protocol name: linear, power, tanh, ramp, constant, piecewise.
    #[arg(long, global = true)]
    protocol: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    params: Option<Vec<f64>>,
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Knot table to use as the protocol.
    #[arg(long, global = true)]
    knots: Option<PathBuf>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true, value_enum)]
    coupling: Option<CouplingArg>,
    /// gamma0 for constant coupling, kappa for Ohmic.
    #[arg(long, global = true)]
    strength: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    taus: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    u: Option<Vec<f64>>,
    /// hierarchy, monte-carlo or oracle.
    #[arg(long, global = true)]
    route: Option<String>,
    /// mgf-ansatz, phi-alpha-ode or formal-solution.
    #[arg(long, global = true)]
    xi_route: Option<String>,
    /// Oracle step count.
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    p_end: Option<f64>,
    /// Intervals of the optimized population path.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Trajectories to dump event by event.
    #[arg(long, global = true)]
    events: Option<u64>,
    /// Skip the halved-grid resolution check.
    #[arg(long, global = true)]
    no_resolution_check: bool,
}

impl Flags {
    fn apply(&self, c: &mut ExperimentConfig) {
        fn set<T: Clone>(field: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *field = v.clone();
            }
        }
        if self.dt.is_some() {
            c.solver.dt = self.dt;
        }
        set(&mut c.solver.trajectories, &self.trajectories);
        set(&mut c.solver.seed, &self.seed);
        set(&mut c.solver.grid, &self.grid);
        set(&mut c.bath.gap_floor, &self.gap_floor);
        set(&mut c.solver.quad_nodes, &self.quad_nodes);
        set(&mut c.out, &self.out);
        if let Some(name) = &self.ensemble {
            c.ensemble.name = name.clone();
            c.ensemble.preps.clear();
            c.ensemble.params.clear();
        }
        set(&mut c.ensemble.params, &self.ensemble_params);
        if let Some(name) = &self.protocol {
            c.protocol.name = name.clone();
            c.protocol.knots = None;
        }
        set(&mut c.protocol.params, &self.params);
        set(&mut c.protocol.tau, &self.tau);
        if self.knots.is_some() {
            c.protocol.knots = self.knots.clone();
        }
        set(&mut c.bath.beta, &self.beta);
        if let Some(k) = self.coupling {
            c.bath.coupling = match k {
                CouplingArg::Constant => CouplingKind::Constant,
                CouplingArg::Ohmic => CouplingKind::Ohmic,
            };
        }
        set(&mut c.bath.strength, &self.strength);
        set(&mut c.taus, &self.taus);
        set(&mut c.u, &self.u);
        set(&mut c.route, &self.route);
        set(&mut c.xi_route, &self.xi_route);
        set(&mut c.oracle_steps, &self.steps);
        set(&mut c.erasure.p_end, &self.p_end);
        set(&mut c.erasure.nodes, &self.nodes);
        set(&mut c.events, &self.events);
        if self.no_resolution_check {
            c.solver.check_resolution = false;
        }
    }
}

fn configure(cli: &Cli) -> worktraj::Result<ExperimentConfig> {
    let mut config = match (&cli.command, &cli.flags.config) {
        (Command::Rerun { file }, _) => {
            let f = std::fs::File::open(file).map_err(|e| worktraj::CliError::Io {
                path: file.display().to_string(),
                source: e,
            })?;
            read_config(f, &file.display().to_string())?
        }
        (_, Some(path)) => ExperimentConfig::from_file(path)?,
        (_, None) => ExperimentConfig::default(),
    };
    config.experiment = match &cli.command {
        Command::Simulate => Experiment::Simulate,
        Command::Moments => Experiment::Moments,
        Command::Mgf => Experiment::Mgf,
        Command::Jarzynski => Experiment::Jarzynski,
        Command::Fdr => Experiment::Fdr,
        Command::OptimalProtocol => Experiment::OptimalProtocol,
        Command::Oracle => Experiment::Oracle,
        Command::Reproduce { figure: Figure::Fig2 } => Experiment::Fig2,
        Command::Reproduce { figure: Figure::Fig3 } => Experiment::Fig3,
        Command::Reproduce { figure: Figure::Fig4 } => Experiment::Fig4,
        Command::Rerun { .. } => config.experiment,
    };
    cli.flags.apply(&mut config);
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = match configure(&cli).and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let artifacts = match run(&config) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match write_all(&config, &artifacts, &config.out) {
        Ok(paths) => paths.iter().for_each(|p| println!("{}", p.display())),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let partial: Vec<_> = artifacts.iter().filter_map(|a| a.partial.as_ref().map(|r| (&a.file, r))).collect();
    for (file, reason) in &partial {
        eprintln!("partial: {file}: {reason}");
    }
    if partial.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
