use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ralloc::harness::{run_suite, SuiteConfig};
use ralloc::{
    export_ilp, generate, solve, Caps, Error, EvaluationLedger, Family, GenSpec, Instance, Method, MethodOptions,
    PointMenu,
};

#[derive(Parser)]
#[command(name = "ralloc", version, about = "Integer resource allocation with expensive cost evaluations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Individual budget, shared (`4`) or per player (`3,4,5`).
        #[arg(long, value_parser = parse_caps)]
        b: Caps,
        #[arg(long = "B")]
        budget: usize,
        #[arg(long = "M")]
        max_cost: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one method on an instance and print its report.
    Solve {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        convex_bounds: bool,
        /// Allow convex bounds on an instance not flagged convex.
        #[arg(long)]
        force_convex: bool,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Include bound matrices in the trace.
        #[arg(long)]
        verbose: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a suite config and write a results CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path; stdout if neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the full binary program of an instance in CPLEX LP format.
    ExportIlp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_caps(s: &str) -> Result<Caps, String> {
    let parts: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match parts {
        Ok(v) if v.len() == 1 && !s.contains(',') => Ok(Caps::Uniform(v[0])),
        Ok(v) => Ok(Caps::PerPlayer(v)),
        Err(e) => Err(format!("expected an integer or a comma-separated list: {e}")),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{}", text.trim_end()),
    }
    Ok(())
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Gen { family, n, b, budget, max_cost, seed, perturbation, out } => {
            let spec = GenSpec { family, n, b, budget, max_cost, seed, perturbation };
            emit(&generate(&spec)?.to_json_string(), out.as_ref())
        }
        Command::Solve { method, instance, epsilon, seed, convex_bounds, force_convex, max_iters, verbose, report } => {
            let inst = Instance::load(&instance)?;
            let options = MethodOptions { epsilon, seed, convex_bounds, force_convex, max_iters, verbose };
            let mut ledger = EvaluationLedger::new(&inst);
            let result = solve(&inst, &mut ledger, method, &options)?;
            emit(&result.to_json_string(), report.as_ref())
        }
        Command::Bench { config, out } => {
            let config = SuiteConfig::load(&config)?;
            let results = run_suite(&config)?;
            match out.or(config.output) {
                Some(path) => results.write_csv(std::fs::File::create(path)?),
                None => results.write_csv(std::io::stdout().lock()),
            }
        }
        Command::ExportIlp { instance, out } => {
            let inst = Instance::load(&instance)?;
            let mut ledger = EvaluationLedger::new(&inst);
            for i in 0..inst.n() {
                for k in 0..=inst.cap(i) {
                    ledger.evaluate(&inst, i, k)?;
                }
            }
            emit(&export_ilp(&PointMenu::from_ledger(&ledger), inst.budget()), out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
