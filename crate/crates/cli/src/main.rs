mod config;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use config::ConfigFile;
use qps_core::ion::{
    compile_rank_one_deliberation, rank_one_angles, shared_x_controlized_schedule, NoiseClass, PulseSequence,
};
use qps_core::invasion::{run_session, AgentKind, SessionConfig};
use qps_core::noise::{
    compare_csv, distance_csv, epsilon_grid, monte_carlo, ratios_csv, scaling_csv, ExperimentConfig,
    ExperimentStats, NoiseError, DEFAULT_TRIALS, DISTANCE_EPSILONS, DISTANCE_RATIOS, DISTANCE_SIGMAS, RATIO_GRID,
    SIGMA_GRID,
};
use qps_core::quantum::{controlization_angles, pad_distribution, ClipEncoding};
use qps_core::rng::stream;
use qps_core::{ClipId, ClipNetwork};

const RATIO_EPSILONS: [f64; 4] = [0.01, 0.05, 0.1, 0.25];

#[derive(Parser, Debug)]
#[command(name = "qps", version, about = "Projective simulation agents on classical and trapped-ion hardware")]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `key = value` file; command-line options take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a configuration file and optionally a clip network file.
    Validate {
        #[arg(long)]
        network: Option<PathBuf>,
    },
    /// One noisy deliberation experiment.
    Simulate {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Fixed m_eps; 0 gives the classical baseline.
        #[arg(long)]
        m_eps: Option<u64>,
        /// Comma-separated pulse classes to perturb.
        #[arg(long)]
        noise_mask: Option<String>,
    },
    /// Mean reflection count against epsilon for several noise levels.
    FigScaling {
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Noiseless quantum against classical reflection counts.
    FigCompare {
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Distance between sampled and target tails.
    FigDistance {
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Sampled output ratios against target ratios.
    FigRatio {
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Pulse sequence for the three-clip network.
    CompilePulses {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        ratio: Option<f64>,
        /// Number of reflection blocks.
        #[arg(long)]
        m: Option<u64>,
        /// Write the sequence here instead of stdout.
        #[arg(long)]
        emit_pulses: Option<PathBuf>,
        /// Emit the shared-X controlized preparation instead.
        #[arg(long)]
        controlized: bool,
    },
    /// Play the invasion game.
    Invasion {
        #[arg(long, value_enum)]
        agent: Option<Agent>,
        #[arg(long)]
        rounds: Option<u64>,
        #[arg(long)]
        switch_at: Option<u64>,
        /// Initial probability of the initially rewarded action.
        #[arg(long)]
        bias: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Agent {
    Quantum,
    Classical,
}

impl std::str::FromStr for Agent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Agent as ValueEnum>::from_str(s, true)
    }
}

enum Failure {
    Validation(Vec<String>),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Validation(vec![e])
    }
}

fn noise_failure(e: NoiseError) -> Failure {
    match e {
        NoiseError::BadConfig(issues) => Failure::Validation(issues.iter().map(|i| i.to_string()).collect()),
        other => Failure::Runtime(other.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(errors)) => {
            for e in errors {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QPS_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("QPS_THREADS must be a positive integer, found {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("building thread pool")?;
    Ok(())
}

struct Globals {
    file: ConfigFile,
    seed: u64,
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_threads()?;
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(Failure::Validation)?,
        None => ConfigFile::default(),
    };
    let seed = file.pick(cli.seed, "seed")?.unwrap_or(0);
    let out = file.pick(cli.out, "out")?.unwrap_or_else(|| PathBuf::from("."));
    let g = Globals { file, seed, out };

    match cli.command {
        Command::Validate { network } => validate(&g, network),
        Command::Simulate { epsilon, ratio, sigma, trials, m_eps, noise_mask } => {
            let config = experiment(&g, epsilon, ratio, sigma, trials, m_eps, noise_mask)?;
            let stats = monte_carlo(&config).map_err(noise_failure)?;
            write_output(&g.out, "ratios.csv", &ratios_csv(std::slice::from_ref(&stats)))?;
            write_output(&g.out, "scaling.csv", &scaling_csv(std::slice::from_ref(&stats)))?;
            println!(
                "epsilon={} ratio={} sigma={} trials={} mean_nu={:.6} ratio_empirical={:.6}",
                stats.epsilon,
                stats.ratio,
                stats.sigma,
                stats.trials,
                stats.mean_nu,
                stats.ratio_empirical()
            );
            Ok(())
        }
        Command::FigScaling { sigma, trials } => {
            let base = experiment(&g, None, Some(9.0), None, trials, None, None)?;
            let sigmas = match g.file.pick(sigma, "sigma")? {
                Some(s) => vec![s],
                None => SIGMA_GRID.to_vec(),
            };
            let mut rows = Vec::new();
            for s in sigmas {
                for eps in epsilon_grid() {
                    rows.push(run_point(&base, eps, base.ratio, s, None)?);
                }
            }
            write_output(&g.out, "scaling.csv", &scaling_csv(&rows))
        }
        Command::FigCompare { trials } => {
            let base = experiment(&g, None, None, Some(0.0), trials, None, None)?;
            let mut rows = Vec::new();
            for eps in epsilon_grid() {
                let q = run_point(&base, eps, base.ratio, 0.0, None)?;
                let c = run_point(&base, eps, base.ratio, 0.0, Some(0))?;
                rows.push((q, c));
            }
            write_output(&g.out, "compare.csv", &compare_csv(&rows))
        }
        Command::FigDistance { trials } => {
            let base = experiment(&g, None, None, None, trials, None, None)?;
            let mut rows = Vec::new();
            for eps in DISTANCE_EPSILONS {
                for r in DISTANCE_RATIOS {
                    for s in DISTANCE_SIGMAS {
                        rows.push(run_point(&base, eps, r, s, None)?);
                    }
                }
            }
            write_output(&g.out, "distance.csv", &distance_csv(&rows))
        }
        Command::FigRatio { sigma, trials } => {
            let base = experiment(&g, None, None, None, trials, None, None)?;
            let sigmas = match g.file.pick(sigma, "sigma")? {
                Some(s) => vec![s],
                None => std::iter::once(0.0).chain(SIGMA_GRID).collect(),
            };
            let mut rows = Vec::new();
            for s in sigmas {
                for eps in RATIO_EPSILONS {
                    for r in RATIO_GRID {
                        rows.push(run_point(&base, eps, r, s, None)?);
                    }
                }
            }
            write_output(&g.out, "ratios.csv", &ratios_csv(&rows))
        }
        Command::CompilePulses { epsilon, ratio, m, emit_pulses, controlized } => {
            let config = experiment(&g, epsilon, ratio, None, None, None, None)?;
            let m = g.file.pick(m, "m")?.unwrap_or(1);
            let controlized = controlized || g.file.get::<bool>("controlized")?.unwrap_or(false);
            let seq = compile(&config, m, controlized)?;
            let target = g.file.pick(emit_pulses, "emit_pulses")?;
            match target {
                Some(path) => {
                    fs::write(&path, seq.to_text()).with_context(|| format!("writing {}", path.display()))?;
                    Ok(())
                }
                None => {
                    print!("{}", seq.to_text());
                    Ok(())
                }
            }
        }
        Command::Invasion { agent, rounds, switch_at, bias } => {
            let defaults = SessionConfig::default();
            let agent = match g.file.pick(agent, "agent")?.unwrap_or(Agent::Quantum) {
                Agent::Quantum => AgentKind::QuantumRps,
                Agent::Classical => AgentKind::ClassicalRps,
            };
            let rounds = g.file.pick(rounds, "rounds")?.unwrap_or(defaults.rounds);
            let switch_at = g.file.pick(switch_at, "switch_at")?;
            let initial_bias = g.file.pick(bias, "bias")?;
            let mut problems = Vec::new();
            if rounds == 0 {
                problems.push("rounds: must be at least 1".to_string());
            }
            if let Some(b) = initial_bias {
                if !(b > 0.0 && b < 1.0) {
                    problems.push(format!("bias: {b} is not in (0, 1)"));
                }
            }
            if !problems.is_empty() {
                return Err(Failure::Validation(problems));
            }
            let config = SessionConfig { agent, rounds, switch_at, initial_bias, ..defaults };
            let history = run_session(&config, &mut stream(g.seed, "invasion", 0)).map_err(anyhow::Error::from)?;
            write_output(&g.out, "session.csv", &history.to_csv())?;
            let n = history.records.len();
            println!("rounds={n} block_rate={:.4} mean_n_u={:.4}", history.block_rate(0..n), history.mean_n_u(0..n));
            Ok(())
        }
    }
}

fn parse_mask(raw: &str) -> Result<BTreeSet<NoiseClass>, String> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| NoiseClass::parse(t).ok_or_else(|| format!("noise_mask: unknown pulse class '{t}'")))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    g: &Globals,
    epsilon: Option<f64>,
    ratio: Option<f64>,
    sigma: Option<f64>,
    trials: Option<u64>,
    m_eps: Option<u64>,
    noise_mask: Option<String>,
) -> Result<ExperimentConfig, Failure> {
    let d = ExperimentConfig::default();
    let f = &g.file;
    let noise_mask = match f.pick(noise_mask, "noise_mask")? {
        Some(raw) => parse_mask(&raw)?,
        None => d.noise_mask.clone(),
    };
    let config = ExperimentConfig {
        epsilon: f.pick(epsilon, "epsilon")?.unwrap_or(d.epsilon),
        ratio: f.pick(ratio, "ratio")?.unwrap_or(d.ratio),
        sigma: f.pick(sigma, "sigma")?.unwrap_or(d.sigma),
        trials: f.pick(trials, "trials")?.unwrap_or(DEFAULT_TRIALS),
        seed: g.seed,
        m_eps_override: f.pick(m_eps, "m_eps")?,
        noise_mask,
        attempt_limit: d.attempt_limit,
    };
    config.validate().map_err(noise_failure)?;
    Ok(config)
}

fn run_point(
    base: &ExperimentConfig,
    epsilon: f64,
    ratio: f64,
    sigma: f64,
    m_eps: Option<u64>,
) -> Result<ExperimentStats, Failure> {
    let config = ExperimentConfig { epsilon, ratio, sigma, m_eps_override: m_eps, ..base.clone() };
    monte_carlo(&config).map_err(noise_failure)
}

fn compile(config: &ExperimentConfig, m: u64, controlized: bool) -> Result<PulseSequence, Failure> {
    let pi = config.stationary();
    if controlized {
        let padded = pad_distribution(pi.as_slice(), &ClipEncoding::new(pi.len()));
        let tree = controlization_angles(&padded).map_err(anyhow::Error::from)?;
        let levels = tree.levels();
        return Ok(shared_x_controlized_schedule(levels[0][0], levels[1][0], levels[1][1]));
    }
    let (t1, t2) = rank_one_angles(&pi).map_err(anyhow::Error::from)?;
    let flags: BTreeSet<ClipId> = [ClipId(1), ClipId(2)].into();
    Ok(compile_rank_one_deliberation(t1, t2, &flags, m).map_err(anyhow::Error::from)?)
}

fn validate(g: &Globals, network: Option<PathBuf>) -> Result<(), Failure> {
    let mut problems = Vec::new();
    if let Err(Failure::Validation(e)) = experiment(g, None, None, None, None, None, None) {
        problems.extend(e);
    }
    let network = match g.file.pick(network, "network") {
        Ok(n) => n,
        Err(e) => {
            problems.push(e);
            None
        }
    };
    if let Some(path) = &network {
        match fs::read_to_string(path) {
            Ok(text) => match ClipNetwork::parse(&text) {
                Ok(net) => println!("{}: {} clips, {} actions", path.display(), net.len(), net.actions().len()),
                Err(errors) => problems.extend(errors.iter().map(|e| format!("{}: {e}", path.display()))),
            },
            Err(e) => problems.push(format!("{}: {e}", path.display())),
        }
    }
    if problems.is_empty() {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Validation(problems))
    }
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}
