use clap::{Parser, Subcommand};
use hill_collide::commands::{self, parse_sweep_value, CliError, Task};
use hill_collide::config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hill-collide", version, about = "Collision orbits of two satellites in a Hill-type problem")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Integrate one trajectory and write it as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Also write satellite positions to simulate_physical.csv.
        #[arg(long)]
        physical: bool,
    },
    /// Collinear relative equilibria in both degree modes.
    Equilibria {
        #[command(flatten)]
        common: Common,
    },
    /// Scan, bisect and continue the collision orbit.
    Collide {
        #[command(flatten)]
        common: Common,
    },
    /// Repeat a task over values of one configuration field.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted field name, e.g. `model.epsilon`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Task::Collide)]
        task: Task,
    },
    /// Run the invariant suite.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = common.out.clone().unwrap_or_else(|| cfg.output.path.clone());
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (task, common, physical) = match &cli.command {
        Cmd::Simulate { common, physical } => (Task::Simulate, common, *physical),
        Cmd::Equilibria { common } => (Task::Equilibria, common, false),
        Cmd::Collide { common } => (Task::Collide, common, false),
        Cmd::Check { common } => (Task::Check, common, false),
        Cmd::Sweep {
            common,
            param,
            values,
            jobs,
            task,
        } => {
            let (cfg, out) = load(common)?;
            let values: Vec<_> = values.iter().map(|v| parse_sweep_value(v)).collect();
            let (code, index) = commands::sweep(&cfg, &out, param, &values, *jobs, *task)?;
            for r in &index.runs {
                println!("{:>3}  {:<24} exit {}  {}", r.index, r.value.to_string(), r.exit_code, r.error.as_deref().unwrap_or(""));
            }
            println!("{}/{} runs succeeded; index at {}", index.succeeded, index.runs.len(), out.join("index.json").display());
            return Ok(code);
        }
    };
    let (cfg, out) = load(common)?;
    log::info!("running {} into {}", task.name(), out.display());
    let outcome = commands::run_task(task, &cfg, &out, physical)?;
    for c in &outcome.envelope.checks {
        let measured = c.measured.map_or("n/a".to_string(), |m| format!("{m:.3e}"));
        println!(
            "{} {:<36} {} {} {:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            measured,
            if c.relation == "le" { "<=" } else { ">=" },
            c.threshold
        );
    }
    println!("{} exit {} -> {}", task.name(), outcome.exit_code, outcome.envelope_path.display());
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HILL_COLLIDE_LOG", "warn")).init();
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
