use std::fs;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cg_lab::bench::{self, BenchOptions, Dataset};
use cg_lab::engine::{cg_solve, cg_solve_with, CgConfig, CgRun};
use cg_lab::env::{self, EnvConfig};
use cg_lab::instances::{read_instance, Category, ProblemKind};
use cg_lab::selection::{spawn_policy, Strategy};
use cg_lab::state::RewardParams;
use cg_lab::{Error, Result};

#[derive(Parser)]
#[command(name = "cg-lab", version, about = "Column generation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset of random instances.
    Gen {
        #[arg(long, default_value = "csp")]
        kind: ProblemKind,
        #[arg(long, default_value = "easy")]
        category: Category,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// greedy-s, random-s, greedy-m, random-m, diverse-m, lookahead-m or external.
        #[arg(long, default_value = "greedy-m")]
        strategy: String,
        /// Shell command of the policy process when the strategy is external.
        #[arg(long)]
        policy_cmd: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-iteration records as JSON lines.
        #[arg(long)]
        records: Option<PathBuf>,
        #[command(flatten)]
        cg: CgArgs,
    },
    /// Run strategy × dataset sweeps.
    Bench {
        /// Dataset directories written by `gen`. Without any, datasets are
        /// generated from --kind/--category.
        #[arg(long = "dataset")]
        datasets: Vec<PathBuf>,
        #[arg(long, default_value = "csp")]
        kind: ProblemKind,
        #[arg(long = "category", default_values = ["easy"])]
        categories: Vec<Category>,
        /// Fraction of the default dataset sizes to generate.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long = "strategy", default_values = ["greedy-s", "greedy-m"])]
        strategies: Vec<Strategy>,
        #[arg(long, default_value = "greedy-s")]
        baseline: String,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        #[command(flatten)]
        cg: CgArgs,
    },
    /// Aggregate stored run files.
    Report {
        files: Vec<PathBuf>,
        #[arg(long, default_value = "greedy-s")]
        baseline: String,
        /// Write report.csv and report.txt here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the selection step as an environment.
    ServeEnv {
        #[arg(long)]
        tcp: Option<u16>,
        #[arg(long, default_value = "csp")]
        problem: ProblemKind,
        #[arg(long, default_value = "easy")]
        category: Category,
        #[arg(long, default_value_t = 300.0)]
        reward_alpha: f64,
        #[arg(long, default_value_t = 0.02)]
        reward_beta: f64,
        #[arg(long, default_value_t = 0.9)]
        reward_gamma: f64,
        /// Zero the global feature vector.
        #[arg(long)]
        no_global: bool,
        #[command(flatten)]
        cg: CgArgs,
    },
}

#[derive(Args)]
struct CgArgs {
    #[arg(long, default_value_t = 10)]
    pool_size: usize,
    #[arg(long, default_value_t = 5)]
    select_count: usize,
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
    #[arg(long)]
    no_force: bool,
}

impl CgArgs {
    fn config(&self) -> CgConfig {
        CgConfig {
            pool_size: self.pool_size,
            select_count: self.select_count,
            max_iterations: self.max_iterations,
            force_optimum: !self.no_force,
            ..CgConfig::default()
        }
    }
}

fn print_run(run: &CgRun) {
    println!(
        "strategy={} iterations={} objective={:.9} status={:?} best_rc={:.3e} seconds={:.3}",
        run.strategy, run.iterations, run.final_objective, run.status, run.final_best_reduced_cost, run.total_seconds
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            kind,
            category,
            count,
            seed_base,
            out,
        } => {
            Dataset::generate(kind, category, count, seed_base)?.save(&out)?;
            println!("wrote {count} instances to {}", out.display());
        }
        Command::Solve {
            instance,
            strategy,
            policy_cmd,
            seed,
            records,
            cg,
        } => {
            let inst = read_instance(&instance)?;
            let config = cg.config();
            let run = if strategy == "external" {
                let cmd = policy_cmd
                    .ok_or_else(|| Error::InvalidConfig("--policy-cmd is required for the external strategy".into()))?;
                let (mut child, mut policy) = spawn_policy(&cmd)?;
                let result = cg_solve_with(&inst, &mut policy, &config, seed);
                drop(policy);
                let _ = child.wait();
                result?
            } else {
                cg_solve(&inst, &strategy.parse()?, &config, seed)?
            };
            if let Some(path) = records {
                let file = fs::File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                run.write_jsonl(BufWriter::new(file))?;
            }
            print_run(&run);
        }
        Command::Bench {
            datasets,
            kind,
            categories,
            scale,
            seed_base,
            strategies,
            baseline,
            threads,
            out,
            cg,
        } => {
            if !(scale > 0.0) {
                return Err(Error::InvalidConfig("--scale must be positive".into()));
            }
            let sets = if datasets.is_empty() {
                categories
                    .iter()
                    .map(|&c| {
                        let count = ((c.default_dataset_size() as f64 * scale).round() as usize).max(1);
                        Dataset::generate(kind, c, count, seed_base)
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                datasets.iter().map(Dataset::load).collect::<Result<Vec<_>>>()?
            };
            let options = BenchOptions {
                config: cg.config(),
                threads,
                baseline,
            };
            let outcome = bench::bench(&sets, &strategies, &options)?;
            outcome.write(&out)?;
            print!("{}", outcome.report.to_text());
            let capped: usize = outcome.report.rows.iter().map(|r| r.cap_reached).sum();
            if capped > 0 {
                eprintln!("warning: {capped} runs reached the iteration cap");
            }
        }
        Command::Report { files, baseline, out } => {
            let rep = bench::report(&files, &baseline)?;
            match out {
                Some(dir) => rep.write(dir)?,
                None => print!("{}", rep.to_text()),
            }
        }
        Command::ServeEnv {
            tcp,
            problem,
            category,
            reward_alpha,
            reward_beta,
            reward_gamma,
            no_global,
            cg,
        } => {
            let reward = RewardParams {
                alpha: reward_alpha,
                beta: reward_beta,
                gamma: reward_gamma,
            };
            reward.validate()?;
            let config = EnvConfig {
                problem,
                category,
                reward,
                cg: cg.config(),
                zero_global: no_global,
            };
            match tcp {
                Some(port) => env::serve_tcp(port, config)?,
                None => env::serve(io::stdin().lock(), io::stdout().lock(), config)?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
