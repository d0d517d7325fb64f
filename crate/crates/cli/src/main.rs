//! `acp`: runs the capability experiments and writes plot-ready CSVs.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acp_core::approx::{
    feasibility_at_accuracy, information_vs_epsilon, EpsilonGoalReport, Knapsack,
};
use acp_core::coloring::{default_configs, run_campaign, CampaignConfig};
use acp_core::gp::{a_priori_estimate, EstimationTask, RbfKernel};
use acp_core::report::{fmt_real, write_csv, CsvRecord};
use acp_core::seed::{derive_seed, streams};
use acp_core::slope::{run_noise_sweep, AgentConfig, SweepConfig};
use acp_core::stopping::{
    completion_fraction, high_prob_steps, trial_records, validate_bounds, GainFamily,
    GainSequenceSpec,
};
use acp_core::{AcpError, Bits};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "acp",
    version,
    about = "Agent capability experiments",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Master seed; every trial seed is derived from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for CSV files.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// key=value file of flag defaults; flags on the command line win.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Deterministic,
    Exponential,
    Uniform,
    TruncatedGaussian,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Model {
    /// GP surrogate with an RBF kernel.
    Rbf,
    /// Bayesian linear slope identification.
    Slope,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Configs {
    Default,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo check of the two-sided stopping cost bound.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Family::Exponential)]
        family: Family,
        /// Required information in bits.
        #[arg(long, default_value_t = 10.0)]
        i_total: f64,
        /// Non-increasing prefix of per-step mean gains.
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        mu: Vec<f64>,
        /// Tail mean gain [default: last value of --mu]
        #[arg(long)]
        mu_inf: Option<f64>,
        /// Second-moment bound [default: exact sup of E[X^2]]
        #[arg(long)]
        m2: Option<f64>,
        /// Support bound for uniform and truncated-gaussian gains [default: 2 * first mu]
        #[arg(long)]
        m: Option<f64>,
        /// Standard deviation before truncation (truncated-gaussian).
        #[arg(long, default_value_t = 1.0)]
        sd: f64,
        /// Cost per step.
        #[arg(long, default_value_t = 1.0)]
        cs: f64,
        /// Failure probability for the high-probability step budget.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Slope identification: predicted versus observed steps across noise levels.
    Slope {
        #[command(flatten)]
        common: Common,
        /// Trials per noise level.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Observation noise standard deviations.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,1.0,3.0")]
        noise: Vec<f64>,
        /// Target width of the 95% credible interval.
        #[arg(long, default_value_t = 0.1)]
        resolution: f64,
        #[arg(long, default_value_t = 200)]
        step_cap: usize,
    },
    /// Graph k-coloring benchmark: random, greedy and ACP agents.
    Coloring {
        #[command(flatten)]
        common: Common,
        /// Feasible instances per configuration.
        #[arg(long, visible_alias = "trials", default_value_t = 50)]
        instances: usize,
        /// Run the five reference (n, p) configurations [default when --n is absent]
        #[arg(long, value_enum, conflicts_with_all = ["n", "p"])]
        configs: Option<Configs>,
        /// Vertices of a single custom configuration.
        #[arg(long)]
        n: Option<usize>,
        /// Edge probability of the custom configuration.
        #[arg(long, default_value_t = 0.3, requires = "n")]
        p: f64,
        /// Number of colors.
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// A-priori effective cost estimate from surrogate information gains.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Outcome samples per action (slope model).
        #[arg(long, default_value_t = 64)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Model::Rbf)]
        model: Model,
        /// Observation noise standard deviation.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long, default_value_t = 1.0)]
        lengthscale: f64,
        #[arg(long, default_value_t = 1.0)]
        signal_var: f64,
        /// Hypothesis grid points (rbf model).
        #[arg(long, default_value_t = 401)]
        grid: usize,
        /// Goal resolution.
        #[arg(long, default_value_t = 0.1)]
        resolution: f64,
        #[arg(long, default_value_t = 100.0)]
        budget: f64,
    },
    /// Epsilon-approximate goal sets on random knapsack instances.
    Approx {
        #[command(flatten)]
        common: Common,
        /// Number of knapsack instances.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Items per knapsack.
        #[arg(long, default_value_t = 10)]
        items: usize,
        /// Accuracy levels, strictly ascending.
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.2,0.5")]
        eps: Vec<f64>,
        /// Information gained per action, in bits.
        #[arg(long, default_value_t = 1.0)]
        i_s: f64,
        #[arg(long, default_value_t = 1.0)]
        cs: f64,
        #[arg(long, default_value_t = 10.0)]
        budget: f64,
        /// Declared inapproximability ratio; accuracies below rho - 1 are infeasible.
        #[arg(long)]
        rho: Option<f64>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Bounds { common, .. }
            | Command::Slope { common, .. }
            | Command::Coloring { common, .. }
            | Command::Estimate { common, .. }
            | Command::Approx { common, .. } => common,
        }
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<AcpError> for Failure {
    fn from(e: AcpError) -> Self {
        match e {
            AcpError::Domain(_) | AcpError::TooLarge { .. } => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Run = Result<(), Failure>;

fn bits(v: f64, what: &str) -> Result<Bits, Failure> {
    Bits::new(v)
        .map_err(|_| Failure::Config(format!("{what} must be a non-negative number of bits")))
}

fn emit<R: CsvRecord>(rows: &[R], dir: &Path, name: &str) -> Run {
    let path = dir.join(name);
    write_csv(rows, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_bounds(cmd: &Command) -> Run {
    let Command::Bounds {
        common,
        trials,
        family,
        i_total,
        mu,
        mu_inf,
        m2,
        m,
        sd,
        cs,
        delta,
    } = cmd
    else {
        unreachable!()
    };
    let first = *mu
        .first()
        .ok_or_else(|| Failure::Config("--mu needs at least one value".into()))?;
    let support = m.unwrap_or(2.0 * first);
    let fam = match family {
        Family::Deterministic => GainFamily::Deterministic,
        Family::Exponential => GainFamily::Exponential,
        Family::Uniform => GainFamily::Uniform { support },
        Family::TruncatedGaussian => GainFamily::TruncatedGaussian { sd: *sd, support },
    };
    let tail = mu_inf.unwrap_or(*mu.last().unwrap());
    let mut spec = GainSequenceSpec::new(fam, mu.clone(), tail)?;
    if let Some(m2) = m2 {
        spec = spec.with_second_moment_bound(*m2)?;
    }
    let i_total = bits(*i_total, "--i-total")?;
    let (report, trials) = validate_bounds(&spec, i_total, *cs, *trials as usize, common.seed)?;
    emit(&[report], &common.out, "bounds.csv")?;
    emit(&trial_records(&trials), &common.out, "bounds_trials.csv")?;

    println!(
        "family {}  I_total {}  C_s {}",
        fam.name(),
        fmt_real(i_total.value()),
        fmt_real(*cs)
    );
    println!(
        "{:>12} {:>12} {:>12} {:>10} {:>12} {:>12} {:>7}",
        "lower", "upper", "mean_cost", "se", "overshoot", "lorden", "within"
    );
    println!(
        "{:>12} {:>12} {:>12} {:>10} {:>12} {:>12} {:>7}",
        fmt_real(report.lower),
        fmt_real(report.upper),
        fmt_real(report.empirical_mean_cost),
        fmt_real(report.standard_error),
        fmt_real(report.mean_overshoot),
        fmt_real(report.overshoot_bound),
        report.within_bounds
    );
    if let (Some(bound), Some(_)) = (spec.support_bound(), fam.support_bound()) {
        let n = high_prob_steps(i_total, spec.mu_inf(), bound, *delta)?;
        println!(
            "n_delta at delta {}: {}  (fraction finished within: {})",
            fmt_real(*delta),
            n,
            fmt_real(completion_fraction(&trials, n))
        );
    }
    Ok(())
}

fn run_slope(cmd: &Command) -> Run {
    let Command::Slope {
        common,
        trials,
        noise,
        resolution,
        step_cap,
    } = cmd
    else {
        unreachable!()
    };
    let config = SweepConfig {
        trials_per_level: *trials,
        success_resolution: *resolution,
        agent: AgentConfig {
            step_cap: *step_cap,
            ..AgentConfig::default()
        },
    };
    let report = run_noise_sweep(noise, &config, common.seed)?;
    emit(&report.summary, &common.out, "slope_summary.csv")?;
    emit(&report.trials, &common.out, "slope_trials.csv")?;
    println!(
        "{:>8} {:>10} {:>12} {:>10} {:>12}",
        "sigma", "predicted", "actual_mean", "actual_se", "gap"
    );
    for r in &report.summary {
        println!(
            "{:>8} {:>10} {:>12} {:>10} {:>12}",
            fmt_real(r.sigma),
            r.steps_predicted,
            fmt_real(r.steps_actual_mean),
            fmt_real(r.steps_actual_se),
            fmt_real(r.gap)
        );
    }
    Ok(())
}

fn run_coloring(cmd: &Command) -> Run {
    let Command::Coloring {
        common,
        instances,
        configs: _,
        n,
        p,
        k,
    } = cmd
    else {
        unreachable!()
    };
    let configs = match n {
        Some(n) => vec![CampaignConfig {
            n: *n,
            p: *p,
            k: *k,
            instance_count: *instances,
        }],
        None => default_configs(*instances)
            .into_iter()
            .map(|c| CampaignConfig { k: *k, ..c })
            .collect(),
    };
    let report = run_campaign(&configs, common.seed)?;
    emit(&report.summaries, &common.out, "coloring_summary.csv")?;
    emit(&report.instances, &common.out, "coloring_instances.csv")?;
    println!(
        "{:>4} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "n", "p", "random", "greedy", "acp", "predicted", "violations", "discarded"
    );
    for s in &report.summaries {
        println!(
            "{:>4} {:>6.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10} {:>10}",
            s.n,
            s.p,
            s.random.mean,
            s.greedy.mean,
            s.acp.mean,
            s.acp_prediction,
            s.bound_violations,
            s.discarded
        );
    }
    Ok(())
}

fn run_estimate(cmd: &Command) -> Run {
    let Command::Estimate {
        common,
        trials,
        model,
        noise,
        lengthscale,
        signal_var,
        grid,
        resolution,
        budget,
    } = cmd
    else {
        unreachable!()
    };
    let task = match model {
        Model::Rbf => EstimationTask::surrogate(
            RbfKernel::new(*lengthscale, *signal_var)?,
            *noise,
            *grid,
            *resolution,
        )?,
        Model::Slope => EstimationTask {
            n_outcome_samples: *trials,
            ..EstimationTask::slope(*noise, *resolution)?
        },
    };
    let report = a_priori_estimate(&task, *budget, common.seed)?;
    emit(&[report], &common.out, "estimate.csv")?;
    println!(
        "{:>10} {:>10} {:>12} {:>8} {:>10} {:>10} {:>9}",
        "I_total", "I_s", "C_eff", "steps", "mc_error", "margin", "solvable"
    );
    println!(
        "{:>10} {:>10} {:>12} {:>8} {:>10} {:>10} {:>9}",
        fmt_real(report.i_total.value()),
        fmt_real(report.i_s.value()),
        fmt_real(report.c_eff_predicted),
        report
            .predicted_steps
            .map_or("inf".to_string(), |s| s.to_string()),
        fmt_real(report.mc_error.value()),
        fmt_real(report.c_eff_margin),
        report.solvable
    );
    Ok(())
}

struct ApproxRow {
    instance: u64,
    report: EpsilonGoalReport,
}

impl CsvRecord for ApproxRow {
    fn header() -> &'static [&'static str] {
        &[
            "instance",
            "epsilon",
            "goal_count",
            "p_goal",
            "i_total_indicator_bits",
            "i_total_search_bits",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.instance.to_string()];
        f.extend(self.report.fields());
        f
    }
}

struct FeasibilityRow {
    instance: u64,
    epsilon: f64,
    i_total: f64,
    c_eff: f64,
    solvable: bool,
}

impl CsvRecord for FeasibilityRow {
    fn header() -> &'static [&'static str] {
        &["instance", "epsilon", "i_total_bits", "c_eff", "solvable"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.instance.to_string(),
            fmt_real(self.epsilon),
            fmt_real(self.i_total),
            fmt_real(self.c_eff),
            self.solvable.to_string(),
        ]
    }
}

fn run_approx(cmd: &Command) -> Run {
    let Command::Approx {
        common,
        trials,
        items,
        eps,
        i_s,
        cs,
        budget,
        rho,
    } = cmd
    else {
        unreachable!()
    };
    let i_s = bits(*i_s, "--i-s")?;
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for instance in 0..*trials {
        let knapsack = Knapsack::random(
            *items,
            derive_seed(common.seed, streams::KNAPSACK, instance),
        )?;
        let space = knapsack.to_instance()?;
        for report in information_vs_epsilon(&space, eps)? {
            let v = feasibility_at_accuracy(&space, report.epsilon, i_s, *cs, *budget, *rho)?;
            verdicts.push(FeasibilityRow {
                instance,
                epsilon: v.epsilon,
                i_total: v.i_total.value(),
                c_eff: v.c_eff,
                solvable: v.solvable,
            });
            rows.push(ApproxRow { instance, report });
        }
    }
    emit(&rows, &common.out, "approx.csv")?;
    emit(&verdicts, &common.out, "approx_feasibility.csv")?;
    println!(
        "{:>8} {:>8} {:>10} {:>10} {:>12} {:>12} {:>9}",
        "instance", "epsilon", "goal_count", "p_goal", "H(indicator)", "-log2 p", "solvable"
    );
    for (r, v) in rows.iter().zip(&verdicts) {
        println!(
            "{:>8} {:>8} {:>10} {:>10} {:>12} {:>12} {:>9}",
            r.instance,
            fmt_real(r.report.epsilon),
            r.report.goal_count,
            fmt_real(r.report.p_goal),
            fmt_real(r.report.i_total_indicator.value()),
            fmt_real(r.report.i_total_search.value()),
            v.solvable
        );
    }
    Ok(())
}

fn dispatch(cmd: &Command) -> Run {
    match cmd {
        Command::Bounds { .. } => run_bounds(cmd),
        Command::Slope { .. } => run_slope(cmd),
        Command::Coloring { .. } => run_coloring(cmd),
        Command::Estimate { .. } => run_estimate(cmd),
        Command::Approx { .. } => run_approx(cmd),
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(config::ConfigError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        // clap exits 0 for --help/--version and 2 for usage errors.
        Err(e) => e.exit(),
    };
    let Format::Csv = cli.command.common().format;
    let outcome = match cli.command.common().threads {
        Some(t) => match rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Failure::Runtime(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
