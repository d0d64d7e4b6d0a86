//! `hallscope`: command-line front end. Every subcommand builds an
//! experiment configuration, fills unset keys from `HALLSCOPE_*` variables
//! and runs it.
//!
//! Exit status: 0 when every embedded check passes, 1 when a check fails or
//! the run errors, 2 on usage and configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hallscope_core::config::ExperimentConfig;
use hallscope_core::experiment::run;
use hallscope_core::Error;

#[derive(Parser, Debug)]
#[command(name = "hallscope", version, about = "Bounded lecture hall tableaux: counting, sampling and limit shapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact count of bounded tableaux.
    Count {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        output: Output,
    },
    /// List every tableau and check the path bijection on each.
    Enumerate {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        output: Output,
    },
    /// Exact or MCMC samples.
    Sample {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Exact checks of the branching rule, the level generating function and
    /// the moment operator.
    IdentityCheck {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, value_parser = ["all", "branching", "level-sgf", "moment"])]
        which: Option<String>,
        #[arg(long)]
        kappa: Option<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Frozen boundary from the double-root condition.
    Frozen {
        #[command(flatten)]
        limit: Limit,
        #[arg(long)]
        grid: Option<u64>,
        #[arg(long)]
        z_min: Option<f64>,
        #[arg(long)]
        z_max: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Moments and density of the limiting level measure.
    LimitShape {
        #[command(flatten)]
        limit: Limit,
        #[arg(long)]
        s: Option<f64>,
        /// Largest moment order.
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        grid: Option<u64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Finite-difference check of the complex Burgers equation.
    Burgers {
        #[command(flatten)]
        limit: Limit,
        #[arg(long)]
        step: Option<f64>,
        /// Number of interior points.
        #[arg(long)]
        grid: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Limiting covariance of two power sums, by both representations.
    GffCov {
        #[command(flatten)]
        limit: Limit,
        #[arg(long)]
        k1: Option<u32>,
        #[arg(long)]
        k2: Option<u32>,
        #[arg(long)]
        s1: Option<f64>,
        #[arg(long)]
        s2: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Draw a tableau, path, sample or frozen-curve JSON file as SVG.
    Render {
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run a `key = value` configuration file.
    Run {
        config: PathBuf,
        /// Print the JSON report instead of the summary.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct Instance {
    /// Shape, e.g. `2,2`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    t: Option<u32>,
    /// Weights `x_0, ..., x_{t-1}` as rationals, e.g. `1,2,3/2`.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Args, Debug)]
struct Sampling {
    #[arg(long, value_parser = ["exact", "mcmc"])]
    method: Option<String>,
    #[arg(long, value_parser = ["flip", "heat-bath"])]
    moves: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    chains: Option<u64>,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct Limit {
    /// `staircase:p=3`, `intervals:0-0.5,1-1.5`, `two-speed`, `empirical:...`
    /// or `partition:4,3,1;n=5`.
    #[arg(long)]
    measure: Option<String>,
    #[arg(long, value_parser = ["uniform", "power"])]
    schedule: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    exponent: Option<f64>,
}

#[derive(Args, Debug)]
struct Output {
    /// Artifact path.
    #[arg(long)]
    out: Option<String>,
    /// Manifest path.
    #[arg(long)]
    manifest: Option<String>,
    #[arg(long, value_parser = ["csv", "json", "svg", "text"])]
    format: Option<String>,
    /// Print the JSON report instead of the summary.
    #[arg(long)]
    json: bool,
}

fn set_all(c: &mut ExperimentConfig, pairs: &[(&str, Option<String>)]) -> Result<(), Error> {
    for (k, v) in pairs {
        c.set_opt(k, v.as_ref())?;
    }
    Ok(())
}

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

impl Instance {
    fn apply(&self, c: &mut ExperimentConfig) -> Result<(), Error> {
        set_all(c, &[("lambda", s(&self.lambda)), ("n", s(&self.n)), ("t", s(&self.t)), ("weights", s(&self.weights))])
    }
}

impl Sampling {
    fn apply(&self, c: &mut ExperimentConfig) -> Result<(), Error> {
        set_all(
            c,
            &[
                ("method", s(&self.method)),
                ("moves", s(&self.moves)),
                ("samples", s(&self.samples)),
                ("chains", s(&self.chains)),
                ("burn_in", s(&self.burn_in)),
                ("thin", s(&self.thin)),
                ("seed", s(&self.seed)),
            ],
        )
    }
}

impl Limit {
    fn apply(&self, c: &mut ExperimentConfig) -> Result<(), Error> {
        set_all(
            c,
            &[
                ("measure", s(&self.measure)),
                ("schedule", s(&self.schedule)),
                ("alpha", s(&self.alpha)),
                ("exponent", s(&self.exponent)),
            ],
        )
    }
}

impl Output {
    fn apply(&self, c: &mut ExperimentConfig) -> Result<bool, Error> {
        set_all(c, &[("out", s(&self.out)), ("manifest", s(&self.manifest)), ("format", s(&self.format))])?;
        Ok(self.json)
    }
}


/// Builds the configuration; returns it with the `--json` flag.
fn configure(cmd: Command) -> Result<(ExperimentConfig, bool), Error> {
    let (mut c, json) = match cmd {
        Command::Run { config, json } => (ExperimentConfig::parse(&std::fs::read_to_string(config)?)?, json),
        Command::Count { instance, output } => {
            let mut c = ExperimentConfig::new("count")?;
            instance.apply(&mut c)?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::Enumerate { instance, output } => {
            let mut c = ExperimentConfig::new("enumerate")?;
            instance.apply(&mut c)?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::Sample { instance, sampling, output } => {
            let mut c = ExperimentConfig::new("sample")?;
            instance.apply(&mut c)?;
            sampling.apply(&mut c)?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::IdentityCheck { instance, which, kappa, output } => {
            let mut c = ExperimentConfig::new("identity-check")?;
            instance.apply(&mut c)?;
            set_all(&mut c, &[("which", which), ("kappa", s(&kappa))])?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::Frozen { limit, grid, z_min, z_max, tolerance, output } => {
            let mut c = ExperimentConfig::new("frozen")?;
            limit.apply(&mut c)?;
            set_all(
                &mut c,
                &[("grid", s(&grid)), ("z_min", s(&z_min)), ("z_max", s(&z_max)), ("tolerance", s(&tolerance))],
            )?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::LimitShape { limit, s: level, j, grid, tolerance, output } => {
            let mut c = ExperimentConfig::new("limit-shape")?;
            limit.apply(&mut c)?;
            set_all(&mut c, &[("s", s(&level)), ("j", s(&j)), ("grid", s(&grid)), ("tolerance", s(&tolerance))])?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::Burgers { limit, step, grid, output } => {
            let mut c = ExperimentConfig::new("burgers")?;
            limit.apply(&mut c)?;
            set_all(&mut c, &[("step", s(&step)), ("grid", s(&grid))])?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::GffCov { limit, k1, k2, s1, s2, tolerance, output } => {
            let mut c = ExperimentConfig::new("gff-cov")?;
            limit.apply(&mut c)?;
            set_all(
                &mut c,
                &[("k1", s(&k1)), ("k2", s(&k2)), ("s1", s(&s1)), ("s2", s(&s2)), ("tolerance", s(&tolerance))],
            )?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
        Command::Render { input, output } => {
            let mut c = ExperimentConfig::new("render")?;
            c.set("input", &input.to_string_lossy())?;
            let json = output.apply(&mut c)?;
            (c, json)
        }
    };
    c.fill_from_env(std::env::vars())?;
    Ok((c, json))
}

fn is_usage(e: &Error) -> bool {
    match e {
        Error::Parse { .. } | Error::Argument(_) => true,
        Error::Module { source, .. } => is_usage(source),
        _ => false,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if is_usage(e) { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, json) = match configure(cli.command) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    match run(&config) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("report serialises"));
            } else {
                print!("{}", out.human);
            }
            if out.manifest.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}
