use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mcalg::par::Exec;
use mcalg_cli::{report, Config, Report, RunOptions, TaskFile};

const EXIT_TASK_ERROR: u8 = 1;
const EXIT_CONFIG_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mcalg",
    version,
    about = "Run and replay certified commutative-algebra tasks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a task file and emit a report.
    Run {
        file: PathBuf,
        /// Degree cap for searches and per-degree linear algebra.
        #[arg(long, default_value_t = 4)]
        degree_bound: u32,
        /// Cap on p-power exponents.
        #[arg(long, default_value_t = 8)]
        exponent_cap: u32,
        /// Default prime for perfection and fiber-product tasks.
        #[arg(long)]
        prime: Option<u64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Record wall time per task (reports are then not byte-stable).
        #[arg(long)]
        timings: bool,
        /// Run tasks one at a time.
        #[arg(long)]
        sequential: bool,
    },
    /// Parse and check a task file without running it.
    Check { file: PathBuf },
    /// Re-verify every certificate in a JSON report.
    Replay { report: PathBuf },
}

fn load(file: &PathBuf) -> Result<TaskFile, ExitCode> {
    let src = fs::read_to_string(file).map_err(|e| {
        eprintln!("{}: {e}", file.display());
        ExitCode::from(EXIT_CONFIG_ERROR)
    })?;
    TaskFile::parse(&src).map_err(|e| {
        eprintln!("{}:{e}", file.display());
        ExitCode::from(EXIT_CONFIG_ERROR)
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            file,
            degree_bound,
            exponent_cap,
            prime,
            out,
            format,
            timings,
            sequential,
        } => {
            if degree_bound == 0 || exponent_cap == 0 {
                eprintln!("caps must be positive");
                return ExitCode::from(EXIT_CONFIG_ERROR);
            }
            if let Some(p) = prime.filter(|&p| !mcalg::coeff::is_prime(p)) {
                eprintln!("--prime {p} is not a prime");
                return ExitCode::from(EXIT_CONFIG_ERROR);
            }
            let tf = match load(&file) {
                Ok(tf) => tf,
                Err(code) => return code,
            };
            let flags = Config {
                degree_bound,
                exponent_cap,
                prime,
                ..Config::default()
            };
            let exec = if sequential {
                Exec::Sequential
            } else {
                Exec::Parallel
            };
            let rep = report::run(&tf, &flags, RunOptions { exec, timings });
            let text = match format {
                Format::Json => rep.to_json(),
                Format::Text => rep.to_text(),
            };
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text) {
                        eprintln!("{}: {e}", path.display());
                        return ExitCode::from(EXIT_CONFIG_ERROR);
                    }
                }
                None => print!("{text}"),
            }
            if rep.has_errors() {
                for t in rep.tasks.iter().filter(|t| t.error.is_some()) {
                    eprintln!(
                        "task {} (line {}): {}",
                        t.name,
                        t.line,
                        t.error.as_deref().unwrap_or("")
                    );
                }
                ExitCode::from(EXIT_TASK_ERROR)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Check { file } => match load(&file) {
            Ok(tf) => {
                println!("{} tasks", tf.tasks.len());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Replay { report: path } => {
            let parsed: Result<Report, String> = fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()));
            let rep = match parsed {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(EXIT_CONFIG_ERROR);
                }
            };
            let lines = match mcalg_cli::replay(&rep, Exec::Parallel) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_CONFIG_ERROR);
                }
            };
            let mut failed = false;
            for l in &lines {
                match &l.outcome {
                    Ok(()) => println!("{}: ok", l.task),
                    Err(e) => {
                        failed = true;
                        println!("{}: FAILED {e}", l.task);
                    }
                }
            }
            if failed {
                ExitCode::from(EXIT_TASK_ERROR)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
