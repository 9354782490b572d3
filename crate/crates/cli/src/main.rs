use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cascade_grid::analytic::{
    critical_attack_size, giant_random_removal, predict_with, solve_u, AnalyticModel, Coupling,
    CriticalMethod, DegreeDistribution, GenFnSet, TargetedProfile,
};
use cascade_grid::attacks::{sample_attack, AttackKind, AttackSpec};
use cascade_grid::cascade::{run_cascade, CascadeOptions};
use cascade_grid::harness::{
    compare_with_sweep, emit_csv, run_experiment, write_comparison_csv, ExperimentConfig,
};
use cascade_grid::netgen::InterdependentGrid;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cascade-grid",
    version,
    about = "Cascading failures in coupled power/communication networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the grid described by a config and save it to a directory.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Sample an attack on a saved grid's comm network.
    Attack {
        #[command(flatten)]
        attack: AttackArgs,
        /// Write the attacked nodes here, one per line, instead of stdout.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Attack a saved grid and run the cascade to its fixpoint.
    Cascade {
        #[command(flatten)]
        attack: AttackArgs,
        /// Per-stage trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Prune both networks to their supported giants before attacking.
        #[arg(long)]
        pre_prune: bool,
    },
    /// Generating-function predictions.
    #[command(args_conflicts_with_subcommands = true)]
    Analytic {
        #[command(subcommand)]
        command: Option<AnalyticCommand>,
        #[command(flatten)]
        removal: RemovalArgs,
    },
    /// Run an attack sweep and write `<output>_raw.csv` and `<output>_summary.csv`.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output stem, overriding the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write `<output>_compare.csv` against the stage equations.
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Smallest attack size that leaves under 1% of the comm network functional.
    Critical {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        attack: AttackKind,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
        /// Replications per probe with `--method simulation`.
        #[arg(long, default_value_t = 10)]
        replications: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Args)]
struct AttackArgs {
    /// Directory written by `generate`.
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    attack: AttackKind,
    /// Number of comm nodes to attack.
    #[arg(long)]
    x: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RemovalArgs {
    /// Degree distribution CSV with `k,probability` rows.
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Fraction of nodes kept.
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Subcommand)]
enum AnalyticCommand {
    /// Steady state of the stage equations for a config's grid.
    Cascade {
        #[arg(long)]
        config: PathBuf,
        /// Attack sizes, overriding the config's `x_values`.
        #[arg(long, value_delimiter = ',')]
        x: Vec<usize>,
        /// Print every stage instead of only the steady state.
        #[arg(long)]
        stages: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Override the config's coupling between the two sides.
    #[arg(long, value_enum)]
    coupling: Option<CouplingArg>,
    /// Override the config's targeted survival profile.
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
}

impl ModelArgs {
    fn apply(&self, mut model: AnalyticModel) -> AnalyticModel {
        if let Some(c) = self.coupling {
            model.coupling = match c {
                CouplingArg::Literal => Coupling::Literal,
                CouplingArg::Conditional => Coupling::Conditional,
            };
        }
        if let Some(p) = self.profile {
            model.profile = match p {
                ProfileArg::Linear => TargetedProfile::Linear,
                ProfileArg::SuccessiveSampling => TargetedProfile::SuccessiveSampling,
            };
        }
        model
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CouplingArg {
    Literal,
    Conditional,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Linear,
    SuccessiveSampling,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Recursion,
    Simulation,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { config, out_dir } => {
            let config = ExperimentConfig::from_file(&config)?;
            let grid = config.build_grid(None)?;
            grid.save(&out_dir)?;
            println!(
                "comm: {} nodes, {} edges; power: {} nodes, {} edges -> {}",
                grid.comm().node_count(),
                grid.comm().edge_count(),
                grid.power().node_count(),
                grid.power().edge_count(),
                out_dir.display()
            );
        }
        Command::Attack { attack, dump } => {
            let grid = InterdependentGrid::load(&attack.grid)?;
            let spec = AttackSpec::new(attack.attack, attack.x, attack.seed);
            let result = sample_attack(grid.comm(), &spec)?;
            match dump {
                Some(path) => {
                    std::fs::write(&path, result.to_lines())
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("{} nodes -> {}", result.len(), path.display());
                }
                None => print!("{}", result.to_lines()),
            }
        }
        Command::Cascade {
            attack,
            trace,
            pre_prune,
        } => {
            let mut grid = InterdependentGrid::load(&attack.grid)?;
            let spec = AttackSpec::new(attack.attack, attack.x, attack.seed);
            let attacked = sample_attack(grid.comm(), &spec)?.attacked;
            let result = run_cascade(&mut grid, &attacked, CascadeOptions { pre_prune })?;
            if let Some(path) = trace {
                let file =
                    File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut out = BufWriter::new(file);
                result.write_csv(&mut out)?;
                out.flush()?;
            }
            println!(
                "mu_A={} mu_B={} stages={}",
                result.final_mu_a,
                result.final_mu_b,
                result.stages()
            );
        }
        Command::Analytic {
            command:
                Some(AnalyticCommand::Cascade {
                    config,
                    x,
                    stages,
                    model,
                }),
            ..
        } => analytic_cascade(&config, x, stages, &model)?,
        Command::Analytic {
            command: None,
            removal,
        } => {
            let (Some(dist), Some(phi)) = (removal.dist, removal.phi) else {
                bail!("analytic needs --dist and --phi, or the `cascade` subcommand");
            };
            let file = File::open(&dist).with_context(|| format!("opening {}", dist.display()))?;
            let dist = DegreeDistribution::read_csv(file)?;
            let genfns = GenFnSet::new(&dist);
            let u = solve_u(&genfns, phi)?;
            let mu = giant_random_removal(&genfns, phi)?;
            println!("u={u} mu={mu}");
        }
        Command::Experiment {
            config,
            output,
            compare,
            model,
        } => {
            let mut config = ExperimentConfig::from_file(&config)?;
            config.analytic = model.apply(config.analytic);
            let stem = match output {
                Some(stem) => stem,
                None if !config.output.is_empty() => PathBuf::from(&config.output),
                None => bail!("no output stem: set `output` in the config or pass --output"),
            };
            if compare && config.attacks.contains(&AttackKind::Mixed) {
                bail!("--compare has no analytic model for mixed attacks");
            }
            let sweep = run_experiment(&config)?;
            let (raw, summary) = emit_csv(&sweep, &stem)?;
            println!("{}\n{}", raw.display(), summary.display());
            if compare {
                let grid = config.build_grid(None)?;
                let rows = compare_with_sweep(&grid, &sweep, config.analytic)?;
                let path = compare_path(&stem);
                write_comparison_csv(&rows, &path)?;
                println!("{}", path.display());
            }
        }
        Command::Critical {
            config,
            attack,
            method,
            replications,
            model,
        } => {
            let config = ExperimentConfig::from_file(&config)?;
            let grid = config.build_grid(None)?;
            let method = match method {
                Method::Recursion => CriticalMethod::Recursion(model.apply(config.analytic)),
                Method::Simulation => CriticalMethod::Simulation {
                    replications,
                    seed: config.base_seed,
                },
            };
            let x = critical_attack_size(&grid, attack, method)?;
            println!(
                "x_c={x} fraction={}",
                x as f64 / grid.comm().node_count() as f64
            );
        }
    }
    Ok(())
}

fn compare_path(stem: &Path) -> PathBuf {
    let name = stem.file_name().unwrap_or_default().to_string_lossy();
    stem.with_file_name(format!("{name}_compare.csv"))
}

fn analytic_cascade(config: &Path, x: Vec<usize>, stages: bool, model: &ModelArgs) -> Result<()> {
    let config = ExperimentConfig::from_file(config)?;
    let model = model.apply(config.analytic);
    let grid = config.build_grid(None)?;
    let xs = if x.is_empty() {
        config.x_values.clone()
    } else {
        x
    };
    let kinds: Vec<AttackKind> = config
        .attacks
        .iter()
        .copied()
        .filter(|&k| k != AttackKind::Mixed)
        .collect();
    if kinds.is_empty() {
        bail!("no attack kinds with an analytic model in the config");
    }
    if stages {
        println!("kind,x,stage,side,mu,removed");
    } else {
        println!("kind,x,mu_A,mu_B,stages");
    }
    for kind in kinds {
        for &x in &xs {
            let p = predict_with(&grid, kind, x, model)?;
            if stages {
                for s in &p.stages {
                    println!("{kind},{x},{},{},{},{}", s.stage, s.side, s.mu, s.removed);
                }
            } else {
                println!(
                    "{kind},{x},{},{},{}",
                    p.steady_mu_a, p.steady_mu_b, p.iterations
                );
            }
        }
    }
    Ok(())
}
